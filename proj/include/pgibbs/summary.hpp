#pragma once

// Ternary summary chain. A SummaryState stands for the set of configurations
// obtained by replacing each '?' entry with 0 or 1 independently; one summary
// transition bounds the Gibbs conditional over that whole set using two
// extremal members, so no coupled chain is ever lost.

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "pgibbs/chain.hpp"
#include "pgibbs/model.hpp"

namespace pgibbs {

enum class Trit : std::uint8_t { Zero = 0, One = 1, Unknown = 2 };

struct SummaryState {
  std::vector<Trit> values;

  std::size_t size() const { return values.size(); }
  Trit operator[](NodeIndex i) const { return values[i]; }
  Trit& operator[](NodeIndex i) { return values[i]; }
  std::size_t unknown_count() const;

  bool operator==(const SummaryState&) const = default;
};

/// Over {0,1,?} in node order, e.g. "1?001?".
std::string to_string(const SummaryState& s);
SummaryState parse_summary(std::string_view text);

/// Evidence fixed, every unobserved node '?'.
SummaryState all_unknown(const Network& net);
SummaryState from_configuration(const Configuration& x);

struct ProbabilityBounds {
  double pmin = 0.0;
  double pmax = 0.0;
};

enum class Extremum { Min, Max };

inline constexpr std::size_t kDefaultBetaCap = 20;

bool summary_contains(const SummaryState& s, const Configuration& x);

/// Every configuration the summary stands for, '?' entries enumerated with
/// the lowest-index '?' as the most significant bit.
std::vector<Configuration> beta_expand(const SummaryState& s, std::size_t cap = kDefaultBetaCap);

/// The member of beta(s) at which the conditional of node k is smallest
/// (Min) or largest (Max). '?' nodes outside k's blanket are set to
/// `irrelevant_fill`; the result does not depend on it.
Configuration extremal_completion(const Network& net, const SummaryState& s, NodeIndex k, Extremum which,
                                  std::uint8_t irrelevant_fill = 0);

ProbabilityBounds summary_conditional_bounds(const Network& net, const SummaryState& s, NodeIndex k);

/// Node k becomes 1 if u < pmin, 0 if u >= pmax, '?' otherwise. In place.
void summary_update(const Network& net, SummaryState& s, NodeIndex k, double u);

SummaryState summary_step(const Network& net, const SummaryState& s, Time t, const RandomStream& stream,
                          const SweepSchedule& schedule);

bool is_coalesced(const SummaryState& s);

/// The single configuration of a coalesced state.
Configuration to_configuration(const SummaryState& s);

}  // namespace pgibbs
