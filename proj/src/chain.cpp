#include "pgibbs/chain.hpp"

#include <cmath>
#include <limits>

#include "pgibbs/errors.hpp"

namespace pgibbs {

std::string to_string(const Configuration& x) {
  std::string out;
  out.reserve(x.size());
  for (auto v : x.values) out.push_back(v ? '1' : '0');
  return out;
}

Configuration parse_configuration(std::string_view text) {
  Configuration x;
  x.values.reserve(text.size());
  for (char c : text) {
    if (c != '0' && c != '1') throw ParseError("configuration must be a string over {0,1}");
    x.values.push_back(c == '1');
  }
  return x;
}

Configuration evidence_configuration(const Network& net, std::uint8_t fill) {
  Configuration x{std::vector<std::uint8_t>(net.size(), fill)};
  for (const auto& [i, v] : net.evidence()) x[i] = static_cast<std::uint8_t>(v);
  return x;
}

void check_configuration(const Network& net, const Configuration& x) {
  if (x.size() != net.size()) {
    throw ContractError("configuration has " + std::to_string(x.size()) + " entries, network has " +
                        std::to_string(net.size()) + " nodes");
  }
  for (auto v : x.values) {
    if (v > 1) throw ContractError("configuration entries must be 0 or 1");
  }
  for (const auto& [i, v] : net.evidence()) {
    if (x[i] != v) throw ContractError("configuration disagrees with evidence at '" + net.node(i).name + "'");
  }
}

std::uint64_t zigzag(Time t) {
  const auto u = static_cast<std::uint64_t>(t);
  return t >= 0 ? u << 1 : ~(u << 1);
}

double unit_uniform(std::uint64_t seed, Time t) {
  constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;
  std::uint64_t z = (seed ^ (zigzag(t) * kGolden)) + kGolden;
  z ^= z >> 30;
  z *= 0xBF58476D1CE4E5B9ULL;
  z ^= z >> 27;
  z *= 0x94D049BB133111EBULL;
  z ^= z >> 31;
  // z / 2^64 correctly rounded; the top 2^10 values of z would round up to 1.
  const double u = std::ldexp(static_cast<double>(z), -64);
  return u < 1.0 ? u : std::nextafter(1.0, 0.0);
}

SweepSchedule make_schedule(const Network& net) {
  const auto unknowns = net.unknowns();
  return SweepSchedule{{unknowns.begin(), unknowns.end()}};
}

NodeIndex variable_at(const SweepSchedule& schedule, Time t) {
  if (schedule.order.empty()) throw ContractError("empty sweep schedule: every node is observed");
  const auto u = static_cast<Time>(schedule.order.size());
  return schedule.order[static_cast<std::size_t>(((t % u) + u) % u)];
}

double gibbs_conditional(const Network& net, std::span<const std::uint8_t> values, NodeIndex k,
                         bool child_zero_shortcut) {
  const double p_on = noisy_or_prob_in(net, k, values);
  double w1 = p_on;
  double w0 = 1.0 - p_on;
  for (const Link& child : net.children(k)) {
    const bool child_on = values[child.node] != 0;
    if (!child_on && child_zero_shortcut) {
      // The other parents' factor is common to both values of k.
      w1 *= 1.0 - child.weight;
      continue;
    }
    double off_others = 1.0 - net.node(child.node).leak;
    for (const Link& p : net.parents(child.node)) {
      if (p.node != k && values[p.node]) off_others *= 1.0 - p.weight;
    }
    const double off_if_k_on = off_others * (1.0 - child.weight);
    if (child_on) {
      w1 *= 1.0 - off_if_k_on;
      w0 *= 1.0 - off_others;
    } else {
      w1 *= off_if_k_on;
      w0 *= off_others;
    }
  }
  const double total = w0 + w1;
  if (!(total > 0.0)) {
    throw ImpossibleConfigurationError("node '" + net.node(k).name +
                                       "' has zero weight for both values in the current configuration");
  }
  return w1 / total;
}

void gibbs_update(const Network& net, Configuration& x, NodeIndex k, double u) {
  x[k] = u < gibbs_conditional(net, x, k) ? 1 : 0;
}

Configuration gibbs_step(const Network& net, const Configuration& x, Time t, const RandomStream& stream,
                         const SweepSchedule& schedule) {
  Configuration next = x;
  gibbs_update(net, next, variable_at(schedule, t), stream(t));
  return next;
}

Configuration gibbs_run(const Network& net, Configuration init, Time t_from, Time t_to,
                        const RandomStream& stream) {
  if (t_from > t_to) throw ContractError("gibbs_run needs t_from <= t_to");
  if (t_from == t_to) return init;
  const auto schedule = make_schedule(net);
  for (Time t = t_from; t < t_to; ++t) gibbs_update(net, init, variable_at(schedule, t), stream(t));
  return init;
}

std::vector<Configuration> gibbs_trajectory(const Network& net, Configuration init, Time t_from,
                                            Time t_to, const RandomStream& stream) {
  if (t_from > t_to) throw ContractError("gibbs_trajectory needs t_from <= t_to");
  std::vector<Configuration> out;
  if (t_from == t_to) return out;
  const auto schedule = make_schedule(net);
  out.reserve(static_cast<std::size_t>(t_to - t_from));
  for (Time t = t_from; t < t_to; ++t) {
    gibbs_update(net, init, variable_at(schedule, t), stream(t));
    out.push_back(init);
  }
  return out;
}

}  // namespace pgibbs
