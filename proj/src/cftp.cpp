#include "pgibbs/cftp.hpp"

#include <algorithm>

#include <json.hpp>

#include "pgibbs/errors.hpp"
#include "pgibbs/summary.hpp"

namespace pgibbs {

namespace {

void check_cftp_inputs(const Network& net, std::int64_t t_max) {
  if (net.unknowns().empty()) throw ContractError("network is fully observed; nothing to sample");
  if (t_max < 1) throw ContractError("t_max must be at least 1");
}

// Packs the unknowns of a configuration into an integer key, first unknown
// most significant.
std::uint64_t pack_unknowns(std::span<const NodeIndex> unknowns, const Configuration& x) {
  std::uint64_t key = 0;
  for (NodeIndex i : unknowns) key = (key << 1) | x[i];
  return key;
}

}  // namespace

std::string to_string(RunStatus status) {
  return status == RunStatus::Coalesced ? "coalesced" : "indeterminate";
}

std::string to_json_line(const RunRecord& r) {
  nlohmann::ordered_json j;
  j["seed"] = r.seed;
  j["status"] = to_string(r.status);
  j["coalescence_time"] = r.coalescence_time;
  j["total_steps"] = r.total_steps;
  if (r.sample) {
    j["sample"] = to_string(*r.sample);
  } else {
    j["sample"] = nullptr;
  }
  return j.dump();
}

RunRecord cftp_summary(const Network& net, std::uint64_t seed, std::int64_t t_max) {
  check_cftp_inputs(net, t_max);
  const auto schedule = make_schedule(net);
  const RandomStream stream{seed};
  const SummaryState start = all_unknown(net);

  RunRecord record;
  record.seed = seed;
  for (std::int64_t depth = 1; depth <= t_max; depth *= 2) {
    SummaryState s = start;
    for (Time t = -depth; t < 0; ++t) summary_update(net, s, variable_at(schedule, t), stream(t));
    record.total_steps += depth;
    record.coalescence_time = depth;
    if (is_coalesced(s)) {
      record.status = RunStatus::Coalesced;
      record.sample = to_configuration(s);
      return record;
    }
    if (depth > t_max / 2) break;
  }
  return record;
}

RunRecord cftp_explicit(const Network& net, std::uint64_t seed, std::int64_t t_max, std::size_t unknown_cap,
                        const ChainSetObserver& observer) {
  check_cftp_inputs(net, t_max);
  const auto unknowns = net.unknowns();
  if (unknowns.size() > unknown_cap) {
    throw SizeError("explicit tracking of " + std::to_string(unknowns.size()) + " unknowns exceeds the cap of " +
                    std::to_string(unknown_cap));
  }
  const auto schedule = make_schedule(net);
  const RandomStream stream{seed};

  std::vector<Configuration> initial;
  {
    const std::size_t count = std::size_t{1} << unknowns.size();
    initial.reserve(count);
    const Configuration base = evidence_configuration(net);
    for (std::size_t code = 0; code < count; ++code) {
      Configuration x = base;
      for (std::size_t b = 0; b < unknowns.size(); ++b) {
        x[unknowns[b]] = static_cast<std::uint8_t>((code >> (unknowns.size() - 1 - b)) & 1U);
      }
      initial.push_back(std::move(x));
    }
  }

  RunRecord record;
  record.seed = seed;
  std::vector<std::pair<std::uint64_t, std::size_t>> keys;
  for (std::int64_t depth = 1; depth <= t_max; depth *= 2) {
    std::vector<Configuration> chains = initial;
    for (Time t = -depth; t < 0; ++t) {
      const NodeIndex k = variable_at(schedule, t);
      const double u = stream(t);
      for (auto& x : chains) gibbs_update(net, x, k, u);
      // Deduplicate: chains that met stay together from here on.
      keys.clear();
      for (std::size_t i = 0; i < chains.size(); ++i) keys.emplace_back(pack_unknowns(unknowns, chains[i]), i);
      std::sort(keys.begin(), keys.end());
      std::vector<Configuration> distinct;
      distinct.reserve(keys.size());
      for (std::size_t i = 0; i < keys.size(); ++i) {
        if (i == 0 || keys[i].first != keys[i - 1].first) distinct.push_back(std::move(chains[keys[i].second]));
      }
      chains = std::move(distinct);
      if (observer) observer(depth, t, chains.size());
    }
    record.total_steps += depth;
    record.coalescence_time = depth;
    if (chains.size() == 1) {
      record.status = RunStatus::Coalesced;
      record.sample = std::move(chains.front());
      return record;
    }
    if (depth > t_max / 2) break;
  }
  return record;
}

std::vector<Configuration> forward_samples(const Network& net, const Configuration& start, std::size_t n,
                                           std::uint64_t seed) {
  check_configuration(net, start);
  std::vector<Configuration> out;
  if (n == 0) return out;
  const auto schedule = make_schedule(net);
  const RandomStream stream{seed};
  const auto period = static_cast<Time>(schedule.period());
  out.reserve(n);
  Configuration x = start;
  Time t = 0;
  for (std::size_t sweep = 0; sweep < n; ++sweep) {
    for (Time end = t + period; t < end; ++t) gibbs_update(net, x, variable_at(schedule, t), stream(t));
    out.push_back(x);
  }
  return out;
}

std::vector<double> marginals(const std::vector<Configuration>& samples) {
  if (samples.empty()) throw ContractError("marginals of an empty sample list");
  const auto n = samples.front().size();
  std::vector<double> freq(n, 0.0);
  for (const auto& x : samples) {
    if (x.size() != n) throw ContractError("samples differ in length");
    for (std::size_t i = 0; i < n; ++i) freq[i] += x[i];
  }
  for (auto& f : freq) f /= static_cast<double>(samples.size());
  return freq;
}

}  // namespace pgibbs
