#pragma once

// Systematic-scan Gibbs sampling driven by a counter-based random stream.
//
// One time step updates exactly one variable. The variable updated at time t
// and the uniform consumed at time t both depend only on the absolute value
// of t, so a run restarted from further back in the past replays the same
// updates at every time it revisits.

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "pgibbs/model.hpp"

namespace pgibbs {

using Time = std::int64_t;

/// Binary assignment to every node of a network (evidence included).
struct Configuration {
  std::vector<std::uint8_t> values;

  std::size_t size() const { return values.size(); }
  std::uint8_t operator[](NodeIndex i) const { return values[i]; }
  std::uint8_t& operator[](NodeIndex i) { return values[i]; }

  bool operator==(const Configuration&) const = default;
  auto operator<=>(const Configuration&) const = default;
};

/// "0110..." in node order.
std::string to_string(const Configuration& x);
Configuration parse_configuration(std::string_view text);

/// Configuration with evidence applied and every unknown set to `fill`.
Configuration evidence_configuration(const Network& net, std::uint8_t fill = 0);

/// Throws ContractError unless x has the right length, binary entries and
/// agrees with the evidence.
void check_configuration(const Network& net, const Configuration& x);

std::uint64_t zigzag(Time t);

/// Pure function of (seed, t), uniform on [0,1).
double unit_uniform(std::uint64_t seed, Time t);

struct RandomStream {
  std::uint64_t seed = 0;

  double operator()(Time t) const { return unit_uniform(seed, t); }
};

/// Unobserved nodes in topological (index) order; one sweep visits each once.
struct SweepSchedule {
  std::vector<NodeIndex> order;

  std::size_t period() const { return order.size(); }
};

SweepSchedule make_schedule(const Network& net);

/// order[t mod period], with the modulus taken non-negative.
NodeIndex variable_at(const SweepSchedule& schedule, Time t);

/// P(node k = 1 | all other nodes) under the network, computed from the
/// Markov blanket of k. With `child_zero_shortcut`, children observed at 0
/// contribute only their link weight from k and their other parents are
/// never read.
double gibbs_conditional(const Network& net, std::span<const std::uint8_t> values, NodeIndex k,
                         bool child_zero_shortcut = true);

inline double gibbs_conditional(const Network& net, const Configuration& x, NodeIndex k,
                                bool child_zero_shortcut = true) {
  return gibbs_conditional(net, std::span<const std::uint8_t>(x.values), k, child_zero_shortcut);
}

/// Sets node k to 1 iff u < conditional, in place.
void gibbs_update(const Network& net, Configuration& x, NodeIndex k, double u);

Configuration gibbs_step(const Network& net, const Configuration& x, Time t, const RandomStream& stream,
                         const SweepSchedule& schedule);

/// Applies steps t_from .. t_to-1.
Configuration gibbs_run(const Network& net, Configuration init, Time t_from, Time t_to,
                        const RandomStream& stream);

/// As gibbs_run, returning the state after every step (t_to - t_from entries).
std::vector<Configuration> gibbs_trajectory(const Network& net, Configuration init, Time t_from,
                                            Time t_to, const RandomStream& stream);

}  // namespace pgibbs
