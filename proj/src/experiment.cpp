#include "pgibbs/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <filesystem>
#include <map>
#include <sstream>

#include <json.hpp>

#include "pgibbs/chain.hpp"
#include "pgibbs/errors.hpp"

namespace pgibbs {

namespace {

using Json = nlohmann::json;

// Sequential draws from the counter stream.
class Draws {
 public:
  explicit Draws(std::uint64_t seed) : stream_{seed} {}

  double uniform() { return stream_(next_++); }
  double in(const Range& r) { return r.lo + (r.hi - r.lo) * uniform(); }
  bool bernoulli(double p) { return uniform() < p; }

 private:
  RandomStream stream_;
  Time next_ = 0;
};

void check_range(const Range& r, const char* what) {
  if (!(r.lo >= 0.0 && r.hi <= 1.0 && r.lo <= r.hi)) {
    throw ContractError(std::string(what) + " must be an ordered range within [0,1]");
  }
}

Range range_field(const Json& j, const std::string& where) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number()) {
    throw ParseError("field '" + where + "' must be [lo, hi]");
  }
  return {j[0].get<double>(), j[1].get<double>()};
}

GeneratorParams parse_generator(const Json& j, const std::string& where) {
  if (!j.is_object()) throw ParseError("field '" + where + "' must be an object");
  GeneratorParams p;
  for (const auto& [key, value] : j.items()) {
    const auto field = where + "." + key;
    if (key == "diseases") {
      p.n_diseases = value.get<std::size_t>();
    } else if (key == "symptoms") {
      p.n_symptoms = value.get<std::size_t>();
    } else if (key == "edge_prob") {
      p.edge_prob = value.get<double>();
    } else if (key == "weight_range") {
      p.weight_range = range_field(value, field);
    } else if (key == "disease_leak_range") {
      p.disease_leak_range = range_field(value, field);
    } else if (key == "symptom_leak_range") {
      p.symptom_leak_range = range_field(value, field);
    } else if (key == "evidence") {
      p.evidence_mode = parse_evidence_mode(value.get<std::string>());
    } else {
      throw ParseError("unknown field '" + field + "'");
    }
  }
  try {
    check_params(p);
  } catch (const ContractError& e) {
    throw ParseError("field '" + where + "': " + e.what());
  }
  return p;
}

double median(std::vector<std::int64_t> v) {
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  const auto n = v.size();
  return n % 2 ? static_cast<double>(v[n / 2]) : 0.5 * static_cast<double>(v[n / 2 - 1] + v[n / 2]);
}

struct ResolvedNetwork {
  std::string id;
  Network net;
};

std::vector<ResolvedNetwork> resolve(const ExperimentConfig& config) {
  std::vector<ResolvedNetwork> out;
  for (const auto& src : config.networks) {
    if (src.path) {
      out.push_back({src.id, load_network(*src.path)});
    } else {
      for (std::size_t i = 0; i < src.count; ++i) {
        const auto id = src.count == 1 ? src.id : src.id + "-" + std::to_string(i);
        out.push_back({id, generate_random_network(*src.generator, src.generator_seed + i)});
      }
    }
  }
  return out;
}

}  // namespace

std::string to_string(EvidenceMode mode) {
  switch (mode) {
    case EvidenceMode::ForwardSample: return "forward-sample";
    case EvidenceMode::AllOn: return "all-on";
    case EvidenceMode::None: return "none";
  }
  return "none";
}

EvidenceMode parse_evidence_mode(std::string_view text) {
  if (text == "forward-sample") return EvidenceMode::ForwardSample;
  if (text == "all-on") return EvidenceMode::AllOn;
  if (text == "none") return EvidenceMode::None;
  throw ParseError("evidence mode must be forward-sample, all-on or none");
}

std::string to_string(Method m) { return m == Method::Summary ? "summary" : "explicit"; }

void check_params(const GeneratorParams& params) {
  if (params.n_diseases < 1 || params.n_symptoms < 1) throw ContractError("disease and symptom counts must be >= 1");
  if (!(params.edge_prob >= 0.0 && params.edge_prob <= 1.0)) throw ContractError("edge_prob must lie in [0,1]");
  check_range(params.weight_range, "weight_range");
  check_range(params.disease_leak_range, "disease_leak_range");
  check_range(params.symptom_leak_range, "symptom_leak_range");
}

Network generate_random_network(const GeneratorParams& params, std::uint64_t seed) {
  check_params(params);
  Draws draws(seed);
  const auto nd = params.n_diseases;
  const auto ns = params.n_symptoms;

  std::vector<NodeSpec> nodes;
  std::vector<std::vector<NodeIndex>> layers(2);
  for (std::size_t d = 0; d < nd; ++d) {
    layers[0].push_back(nodes.size());
    nodes.push_back({"D" + std::to_string(d + 1), draws.in(params.disease_leak_range)});
  }
  for (std::size_t s = 0; s < ns; ++s) {
    layers[1].push_back(nodes.size());
    nodes.push_back({"S" + std::to_string(s + 1), draws.in(params.symptom_leak_range)});
  }

  std::vector<Edge> edges;
  for (std::size_t s = 0; s < ns; ++s) {
    for (std::size_t d = 0; d < nd; ++d) {
      // Always consume both draws so the stream layout does not depend on edge_prob.
      const bool present = draws.uniform() < params.edge_prob;
      const double w = draws.in(params.weight_range);
      if (present) edges.push_back({d, nd + s, w});
    }
  }
  std::sort(edges.begin(), edges.end(),
            [](const Edge& a, const Edge& b) { return std::pair(a.parent, a.child) < std::pair(b.parent, b.child); });

  std::map<NodeIndex, int> evidence;
  if (params.evidence_mode == EvidenceMode::AllOn) {
    for (std::size_t s = 0; s < ns; ++s) evidence[nd + s] = 1;
  } else if (params.evidence_mode == EvidenceMode::ForwardSample) {
    Network prior(nodes, layers, edges, {});
    std::vector<std::uint8_t> values(nodes.size(), 0);
    for (NodeIndex i = 0; i < nodes.size(); ++i) {
      values[i] = draws.bernoulli(noisy_or_prob_in(prior, i, values)) ? 1 : 0;
    }
    for (std::size_t s = 0; s < ns; ++s) evidence[nd + s] = values[nd + s];
  }
  return Network(std::move(nodes), std::move(layers), std::move(edges), std::move(evidence));
}

ExperimentConfig parse_experiment_config(std::string_view text, const std::string& base_dir) {
  Json doc;
  try {
    doc = Json::parse(text.begin(), text.end());
  } catch (const Json::parse_error& e) {
    throw ParseError(std::string("malformed experiment config: ") + e.what());
  }
  if (!doc.is_object()) throw ParseError("experiment config must be a JSON object");

  ExperimentConfig config;
  try {
    for (const auto& [key, value] : doc.items()) {
      if (key == "networks") {
        if (!value.is_array()) throw ParseError("field 'networks' must be an array");
        for (std::size_t i = 0; i < value.size(); ++i) {
          const Json& jn = value[i];
          const auto where = "networks[" + std::to_string(i) + "]";
          if (!jn.is_object()) throw ParseError("field '" + where + "' must be an object");
          NetworkSource src;
          src.id = jn.value("id", "net" + std::to_string(i));
          if (jn.contains("path") == jn.contains("generator")) {
            throw ParseError("field '" + where + "' needs exactly one of 'path' or 'generator'");
          }
          if (jn.contains("path")) {
            std::filesystem::path p = jn["path"].get<std::string>();
            if (p.is_relative()) p = std::filesystem::path(base_dir) / p;
            src.path = p.string();
          } else {
            src.generator = parse_generator(jn["generator"], where + ".generator");
            src.generator_seed = jn.value("seed", std::uint64_t{0});
            src.count = jn.value("count", std::size_t{1});
          }
          config.networks.push_back(std::move(src));
        }
      } else if (key == "seeds") {
        config.seed_base = value.value("base", std::uint64_t{0});
        config.seed_count = value.value("count", std::size_t{100});
      } else if (key == "t_max") {
        config.t_max = value.get<std::int64_t>();
      } else if (key == "methods") {
        config.methods.clear();
        for (const auto& m : value) {
          const auto name = m.get<std::string>();
          if (name == "summary") {
            config.methods.push_back(Method::Summary);
          } else if (name == "explicit") {
            config.methods.push_back(Method::Explicit);
          } else {
            throw ParseError("unknown method '" + name + "'");
          }
        }
      } else if (key == "compare") {
        config.compare = value.get<bool>();
      } else if (key == "checks") {
        for (const auto& c : value) {
          if (c.get<std::string>() != "exactness") throw ParseError("unknown check '" + c.get<std::string>() + "'");
          config.exactness = true;
        }
      } else {
        throw ParseError("unknown field '" + key + "'");
      }
    }
  } catch (const Json::exception& e) {
    throw ParseError(std::string("experiment config has a field of the wrong type: ") + e.what());
  }
  if (config.t_max < 1) throw ParseError("field 't_max' must be at least 1");
  if (config.compare) config.methods = {Method::Summary, Method::Explicit};
  return config;
}

bool ExperimentReport::all_indeterminate() const {
  return !rows.empty() &&
         std::all_of(rows.begin(), rows.end(), [](const auto& r) { return r.status == RunStatus::Indeterminate; });
}

ExperimentReport run_experiment(const ExperimentConfig& config) {
  ExperimentReport report;
  const bool want_summary =
      std::find(config.methods.begin(), config.methods.end(), Method::Summary) != config.methods.end();
  const bool want_explicit =
      std::find(config.methods.begin(), config.methods.end(), Method::Explicit) != config.methods.end();

  for (const auto& [id, net] : resolve(config)) {
    const auto u = net.unknowns().size();
    if (u == 0) throw ContractError("network '" + id + "' is fully observed");
    const bool run_explicit = want_explicit && u <= kExplicitUnknownCap;
    if (config.compare && !run_explicit) {
      throw ContractError("network '" + id + "' has " + std::to_string(u) +
                          " unknowns, too many for explicit tracking in comparison mode");
    }

    std::vector<std::uint64_t> counts;
    std::optional<StateCodec> codec;
    const bool check_exact = config.exactness && want_summary && u <= kPosteriorUnknownCap;
    if (check_exact) {
      codec.emplace(net, StateSpace::Original);
      counts.assign(codec->dim(), 0);
    }

    std::map<std::uint64_t, std::int64_t> summary_times;
    for (std::size_t i = 0; i < config.seed_count; ++i) {
      const std::uint64_t seed = config.seed_base + i;
      for (const Method m : {Method::Summary, Method::Explicit}) {
        if (m == Method::Summary ? !want_summary : !run_explicit) continue;
        const auto start = std::chrono::steady_clock::now();
        const RunRecord r = m == Method::Summary ? cftp_summary(net, seed, config.t_max)
                                                 : cftp_explicit(net, seed, config.t_max);
        const std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - start;
        report.rows.push_back({id, seed, m, r.status, r.coalescence_time, r.total_steps, elapsed.count()});
        if (m == Method::Summary) {
          if (r.status == RunStatus::Coalesced) {
            summary_times[seed] = r.coalescence_time;
            if (check_exact) ++counts[codec->index_of(*r.sample)];
          }
        } else if (r.status == RunStatus::Coalesced) {
          const auto it = summary_times.find(seed);
          if (it != summary_times.end() && it->second < r.coalescence_time) ++report.dominance_violations;
        }
      }
    }

    for (const Method m : {Method::Summary, Method::Explicit}) {
      if (m == Method::Summary ? !want_summary : !run_explicit) continue;
      MethodSummary s{id, m, u};
      std::vector<std::int64_t> times;
      double steps = 0.0;
      for (const auto& row : report.rows) {
        if (row.network_id != id || row.method != m) continue;
        ++s.runs;
        if (row.status != RunStatus::Coalesced) continue;
        ++s.coalesced;
        times.push_back(row.coalescence_time);
        steps += static_cast<double>(row.total_steps);
      }
      if (!times.empty()) {
        double sum = 0.0;
        for (auto t : times) sum += static_cast<double>(t);
        s.mean_coalescence_time = sum / static_cast<double>(times.size());
        s.mean_coalescence_sweeps = s.mean_coalescence_time / static_cast<double>(u);
        s.mean_total_steps = steps / static_cast<double>(times.size());
        s.max_coalescence_time = *std::max_element(times.begin(), times.end());
        s.median_coalescence_time = median(times);
      }
      report.summaries.push_back(s);
    }

    if (config.exactness) {
      ExactnessResult ex;
      ex.network_id = id;
      if (!check_exact) {
        ex.note = "skipped: needs the summary method and at most " + std::to_string(kPosteriorUnknownCap) + " unknowns";
      } else {
        for (auto c : counts) ex.samples += c;
        if (ex.samples == 0) {
          ex.note = "skipped: no coalesced samples";
        } else {
          const auto posterior = exact_posterior(net);
          try {
            ex.chi_square = chi_square_gof(counts, posterior.masses);
          } catch (const ImpossibleOutcomeError& e) {
            ex.impossible_outcome = true;
            ex.note = e.what();
          }
        }
      }
      report.exactness.push_back(std::move(ex));
    }
  }

  std::sort(report.rows.begin(), report.rows.end(), [](const ReportRow& a, const ReportRow& b) {
    return std::tie(a.network_id, a.seed, a.method) < std::tie(b.network_id, b.seed, b.method);
  });
  return report;
}

std::string report_csv(const ExperimentReport& report, bool with_timing) {
  std::ostringstream out;
  out << "network_id,seed,method,status,coalescence_time,total_steps";
  if (with_timing) out << ",wall_time";
  out << '\n';
  for (const auto& r : report.rows) {
    out << r.network_id << ',' << r.seed << ',' << to_string(r.method) << ',' << to_string(r.status) << ','
        << r.coalescence_time << ',' << r.total_steps;
    if (with_timing) out << ',' << r.wall_time;
    out << '\n';
  }
  return out.str();
}

std::string report_summary_json(const ExperimentReport& report) {
  nlohmann::ordered_json j;
  j["runs"] = report.rows.size();
  j["dominance_violations"] = report.dominance_violations;
  j["methods"] = nlohmann::ordered_json::array();
  for (const auto& s : report.summaries) {
    j["methods"].push_back({{"network_id", s.network_id},
                            {"method", to_string(s.method)},
                            {"unknowns", s.unknowns},
                            {"runs", s.runs},
                            {"coalesced", s.coalesced},
                            {"mean_coalescence_time", s.mean_coalescence_time},
                            {"mean_coalescence_sweeps", s.mean_coalescence_sweeps},
                            {"median_coalescence_time", s.median_coalescence_time},
                            {"max_coalescence_time", s.max_coalescence_time},
                            {"mean_total_steps", s.mean_total_steps}});
  }
  j["exactness"] = nlohmann::ordered_json::array();
  for (const auto& e : report.exactness) {
    nlohmann::ordered_json je{{"network_id", e.network_id}, {"samples", e.samples}};
    if (e.note.empty()) {
      je["statistic"] = e.chi_square.statistic;
      je["dof"] = e.chi_square.dof;
      je["p_value"] = e.chi_square.p_value;
    } else {
      je["impossible_outcome"] = e.impossible_outcome;
      je["note"] = e.note;
    }
    j["exactness"].push_back(std::move(je));
  }
  return j.dump(2) + "\n";
}

}  // namespace pgibbs
