#pragma once

// Coupling from the past with the doubling schedule T = 1, 2, 4, ...
//
// Every attempt starts at time -T and runs to time 0 using the stream values
// u(seed, t), so deeper attempts reuse the numbers of shallower ones at the
// times they share. The state reported is the one at t = 0, never the state
// at the moment of coalescence.

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "pgibbs/chain.hpp"
#include "pgibbs/model.hpp"

namespace pgibbs {

enum class RunStatus { Coalesced, Indeterminate };

std::string to_string(RunStatus status);

struct RunRecord {
  RunStatus status = RunStatus::Indeterminate;
  /// Exact sample at t = 0; present iff coalesced.
  std::optional<Configuration> sample;
  /// Start depth of the first attempt that coalesced by t = 0. For an
  /// indeterminate run, the deepest depth attempted.
  std::int64_t coalescence_time = 0;
  /// Time steps simulated over all attempts.
  std::int64_t total_steps = 0;
  std::uint64_t seed = 0;

  bool operator==(const RunRecord&) const = default;
};

/// One JSON object, no trailing newline.
std::string to_json_line(const RunRecord& r);

inline constexpr std::int64_t kDefaultTMax = std::int64_t{1} << 20;
inline constexpr std::size_t kExplicitUnknownCap = 16;

RunRecord cftp_summary(const Network& net, std::uint64_t seed, std::int64_t t_max = kDefaultTMax);

/// Called after every explicit step with (attempt depth, time, distinct chains left).
using ChainSetObserver = std::function<void(std::int64_t depth, Time t, std::size_t size)>;

/// Tracks every configuration of the unknowns explicitly. Oracle for
/// cftp_summary on small networks.
RunRecord cftp_explicit(const Network& net, std::uint64_t seed, std::int64_t t_max = kDefaultTMax,
                        std::size_t unknown_cap = kExplicitUnknownCap,
                        const ChainSetObserver& observer = {});

/// Continues an ordinary Gibbs run from `start` at t = 0 with the same seed
/// and records the state after each of n full sweeps.
std::vector<Configuration> forward_samples(const Network& net, const Configuration& start, std::size_t n,
                                           std::uint64_t seed);

/// Per-node frequency of the value 1.
std::vector<double> marginals(const std::vector<Configuration>& samples);

}  // namespace pgibbs
