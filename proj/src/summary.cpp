#include "pgibbs/summary.hpp"

#include <algorithm>

#include "pgibbs/errors.hpp"

namespace pgibbs {

namespace {

constexpr std::int8_t kUnset = -1;

// Assigns a value to a '?' node of the completion, rejecting conflicting
// assignments from two different rules.
void assign(std::vector<std::int8_t>& chosen, const Network& net, NodeIndex i, std::uint8_t v) {
  if (chosen[i] != kUnset && chosen[i] != static_cast<std::int8_t>(v)) {
    throw StructuralError("extremal completion rules disagree on node '" + net.node(i).name +
                          "'; the network is not strictly layered");
  }
  chosen[i] = static_cast<std::int8_t>(v);
}

}  // namespace

std::size_t SummaryState::unknown_count() const {
  return static_cast<std::size_t>(std::count(values.begin(), values.end(), Trit::Unknown));
}

std::string to_string(const SummaryState& s) {
  std::string out;
  out.reserve(s.size());
  for (Trit v : s.values) out.push_back(v == Trit::Zero ? '0' : v == Trit::One ? '1' : '?');
  return out;
}

SummaryState parse_summary(std::string_view text) {
  SummaryState s;
  s.values.reserve(text.size());
  for (char c : text) {
    switch (c) {
      case '0': s.values.push_back(Trit::Zero); break;
      case '1': s.values.push_back(Trit::One); break;
      case '?': s.values.push_back(Trit::Unknown); break;
      default: throw ParseError("summary state must be a string over {0,1,?}");
    }
  }
  return s;
}

SummaryState all_unknown(const Network& net) {
  SummaryState s{std::vector<Trit>(net.size(), Trit::Unknown)};
  for (const auto& [i, v] : net.evidence()) s[i] = v ? Trit::One : Trit::Zero;
  return s;
}

SummaryState from_configuration(const Configuration& x) {
  SummaryState s;
  s.values.reserve(x.size());
  for (auto v : x.values) s.values.push_back(v ? Trit::One : Trit::Zero);
  return s;
}

bool summary_contains(const SummaryState& s, const Configuration& x) {
  if (s.size() != x.size()) throw ContractError("summary state and configuration differ in length");
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] != Trit::Unknown && static_cast<std::uint8_t>(s[i]) != x[i]) return false;
  }
  return true;
}

std::vector<Configuration> beta_expand(const SummaryState& s, std::size_t cap) {
  std::vector<NodeIndex> free;
  Configuration base{std::vector<std::uint8_t>(s.size(), 0)};
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] == Trit::Unknown) {
      free.push_back(i);
    } else {
      base[i] = static_cast<std::uint8_t>(s[i]);
    }
  }
  if (free.size() > cap) {
    throw SizeError("summary state has " + std::to_string(free.size()) + " '?' entries, cap is " +
                    std::to_string(cap));
  }
  const std::size_t count = std::size_t{1} << free.size();
  std::vector<Configuration> out;
  out.reserve(count);
  for (std::size_t code = 0; code < count; ++code) {
    Configuration x = base;
    for (std::size_t b = 0; b < free.size(); ++b) {
      x[free[b]] = static_cast<std::uint8_t>((code >> (free.size() - 1 - b)) & 1U);
    }
    out.push_back(std::move(x));
  }
  return out;
}

Configuration extremal_completion(const Network& net, const SummaryState& s, NodeIndex k, Extremum which,
                                  std::uint8_t irrelevant_fill) {
  if (s.size() != net.size()) throw ContractError("summary state length does not match the network");
  if (net.is_observed(k)) throw ContractError("cannot update observed node '" + net.node(k).name + "'");

  const bool minimize = which == Extremum::Min;
  std::vector<std::int8_t> chosen(s.size(), kUnset);
  auto is_free = [&](NodeIndex i) { return s[i] == Trit::Unknown; };

  // Parents and children: off to minimize, on to maximize.
  const std::uint8_t near = minimize ? 0 : 1;
  for (const Link& p : net.parents(k)) {
    if (is_free(p.node)) assign(chosen, net, p.node, near);
  }
  for (const Link& c : net.children(k)) {
    if (is_free(c.node)) assign(chosen, net, c.node, near);
  }
  // Co-parents matter only through children that are (or may be) on. An
  // active co-parent explains the child away, lowering the conditional.
  for (const Link& c : net.children(k)) {
    const Trit cv = s[c.node];
    const bool applies = minimize ? cv == Trit::One : cv != Trit::Zero;
    if (!applies) continue;
    for (const Link& p : net.parents(c.node)) {
      if (p.node != k && is_free(p.node)) assign(chosen, net, p.node, minimize ? 1 : 0);
    }
  }

  Configuration x{std::vector<std::uint8_t>(s.size(), 0)};
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (!is_free(i)) {
      x[i] = static_cast<std::uint8_t>(s[i]);
    } else {
      x[i] = chosen[i] == kUnset ? irrelevant_fill : static_cast<std::uint8_t>(chosen[i]);
    }
  }
  return x;
}

ProbabilityBounds summary_conditional_bounds(const Network& net, const SummaryState& s, NodeIndex k) {
  const double lo = gibbs_conditional(net, extremal_completion(net, s, k, Extremum::Min), k);
  const double hi = gibbs_conditional(net, extremal_completion(net, s, k, Extremum::Max), k);
  return {std::min(lo, hi), std::max(lo, hi)};
}

void summary_update(const Network& net, SummaryState& s, NodeIndex k, double u) {
  const auto b = summary_conditional_bounds(net, s, k);
  s[k] = u < b.pmin ? Trit::One : u >= b.pmax ? Trit::Zero : Trit::Unknown;
}

SummaryState summary_step(const Network& net, const SummaryState& s, Time t, const RandomStream& stream,
                          const SweepSchedule& schedule) {
  SummaryState next = s;
  summary_update(net, next, variable_at(schedule, t), stream(t));
  return next;
}

bool is_coalesced(const SummaryState& s) {
  return std::none_of(s.values.begin(), s.values.end(), [](Trit v) { return v == Trit::Unknown; });
}

Configuration to_configuration(const SummaryState& s) {
  if (!is_coalesced(s)) throw ContractError("summary state still has '?' entries");
  Configuration x;
  x.values.reserve(s.size());
  for (Trit v : s.values) x.values.push_back(static_cast<std::uint8_t>(v));
  return x;
}

}  // namespace pgibbs
