// pgibbs: exact posterior sampling for layered noisy-OR networks.
//
// Exit codes: 0 success, 1 usage error, 2 invalid input (parse, reference or
// validation failure), 3 every run hit t_max without coalescing.

#include <CLI11.hpp>

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "pgibbs/analysis.hpp"
#include "pgibbs/cftp.hpp"
#include "pgibbs/errors.hpp"
#include "pgibbs/experiment.hpp"
#include "pgibbs/model.hpp"

using namespace pgibbs;

namespace {

constexpr int kOk = 0;
constexpr int kUsage = 1;
constexpr int kInvalid = 2;
constexpr int kIndeterminate = 3;

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ContractError("cannot write " + path);
  out << text;
  if (!out) throw ContractError("failed writing " + path);
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Writes to `path`, or stdout when it is empty or "-".
void emit(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
  } else {
    write_file(path, text);
  }
}

int cmd_validate(const std::string& path) {
  const Network net = load_network(path, false);
  const auto report = validate(net);
  for (const auto& issue : report.issues) {
    std::cout << (issue.severity == Severity::Error ? "error: " : "warning: ") << issue.message << '\n';
  }
  std::cout << (report.ok ? "valid" : "invalid") << ": " << net.size() << " nodes, " << net.unknowns().size()
            << " unknown, " << report.error_count() << " errors, " << report.warning_count() << " warnings\n";
  return report.ok ? kOk : kInvalid;
}

struct SampleArgs {
  std::string network;
  std::size_t seeds = 1;
  std::uint64_t seed_base = 0;
  std::int64_t t_max = kDefaultTMax;
  std::string jsonl;
  std::string method = "summary";
};

int cmd_sample(const SampleArgs& a) {
  const Network net = load_network(a.network);
  const Method method = a.method == "explicit" ? Method::Explicit : Method::Summary;
  std::ostringstream out;
  std::size_t coalesced = 0;
  for (std::size_t i = 0; i < a.seeds; ++i) {
    const std::uint64_t seed = a.seed_base + i;
    const auto r = method == Method::Summary ? cftp_summary(net, seed, a.t_max) : cftp_explicit(net, seed, a.t_max);
    if (r.status == RunStatus::Coalesced) ++coalesced;
    out << to_json_line(r) << '\n';
  }
  emit(a.jsonl, out.str());
  if (!a.jsonl.empty() && a.jsonl != "-") {
    std::cerr << coalesced << " of " << a.seeds << " runs coalesced\n";
  }
  return a.seeds > 0 && coalesced == 0 ? kIndeterminate : kOk;
}

int cmd_gibbs(const std::string& path, std::size_t sweeps, std::uint64_t seed, const std::string& output) {
  const Network net = load_network(path);
  std::ostringstream out;
  for (const auto& x : forward_samples(net, evidence_configuration(net), sweeps, seed)) out << to_string(x) << '\n';
  emit(output, out.str());
  return kOk;
}

int cmd_analyze(const std::string& path, const std::string& space, const std::string& csv, const std::string& json) {
  const Network net = load_network(path);
  const auto m = transition_matrix(net, parse_state_space(space));
  const auto spec = eigen_spectrum(m);
  if (!csv.empty()) emit(csv, matrix_csv(m, net));
  const auto text = spectrum_json(spec, m, net);
  if (!json.empty()) {
    emit(json, text);
  } else if (csv.empty() || csv != "-") {
    std::cout << text;
  }
  return kOk;
}

int cmd_generate(const GeneratorParams& params, std::uint64_t seed, const std::string& output) {
  emit(output, serialize_network(generate_random_network(params, seed)));
  return kOk;
}

int cmd_experiment(const std::string& path, const std::string& output, const std::string& summary, bool timing) {
  const auto base = std::filesystem::path(path).parent_path().string();
  const auto config = parse_experiment_config(read_file(path), base.empty() ? "." : base);
  const auto report = run_experiment(config);
  emit(output, report_csv(report, timing));
  if (!summary.empty()) emit(summary, report_summary_json(report));
  return report.all_indeterminate() ? kIndeterminate : kOk;
}

void add_range(CLI::App* app, const std::string& name, Range& r, const std::string& what) {
  app->add_option(name, [&r](const CLI::results_t& v) {
        r.lo = std::stod(v.at(0));
        r.hi = std::stod(v.at(1));
        return true;
      }, what + " as LO HI")
      ->expected(2)
      ->type_name("LO HI");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Exact posterior sampling for layered noisy-OR networks by coupling from the past"};
  app.require_subcommand(1);

  std::string net_path;

  auto* validate_cmd = app.add_subcommand("validate", "Check a network file and list every issue");
  validate_cmd->add_option("network", net_path, "Network JSON file")->required();

  SampleArgs sample;
  auto* sample_cmd = app.add_subcommand("sample", "Draw exact samples, one JSON line per seed");
  sample_cmd->add_option("network", sample.network, "Network JSON file")->required();
  sample_cmd->add_option("--seeds", sample.seeds, "Number of seeds")->capture_default_str();
  sample_cmd->add_option("--seed-base", sample.seed_base, "First seed")->capture_default_str();
  sample_cmd->add_option("--t-max", sample.t_max, "Deepest start time")->capture_default_str()->check(
      CLI::PositiveNumber);
  sample_cmd->add_option("--jsonl", sample.jsonl, "Output file (default stdout)");
  sample_cmd->add_option("--method", sample.method, "Coupling method")
      ->check(CLI::IsMember({"summary", "explicit"}))
      ->capture_default_str();

  std::size_t sweeps = 100;
  std::uint64_t gibbs_seed = 0;
  std::string gibbs_out;
  auto* gibbs_cmd = app.add_subcommand("gibbs", "Run an ordinary Gibbs sampler, one state per sweep");
  gibbs_cmd->add_option("network", net_path, "Network JSON file")->required();
  gibbs_cmd->add_option("--sweeps", sweeps, "Number of sweeps")->capture_default_str();
  gibbs_cmd->add_option("--seed", gibbs_seed, "Stream seed")->capture_default_str();
  gibbs_cmd->add_option("-o,--output", gibbs_out, "Output file (default stdout)");

  std::string space = "original";
  std::string csv_out;
  std::string json_out;
  auto* analyze_cmd = app.add_subcommand("analyze", "Transition matrix and spectrum of one sweep");
  analyze_cmd->add_option("network", net_path, "Network JSON file")->required();
  analyze_cmd->add_option("--space", space, "State space")
      ->check(CLI::IsMember({"original", "summary"}))
      ->capture_default_str();
  analyze_cmd->add_option("--csv", csv_out, "Write the matrix as CSV");
  analyze_cmd->add_option("--json", json_out, "Write the spectrum as JSON (default stdout)");

  GeneratorParams params;
  std::string evidence = "forward-sample";
  std::uint64_t gen_seed = 0;
  std::string gen_out;
  auto* generate_cmd = app.add_subcommand("generate", "Generate a random two-layer disease/symptom network");
  generate_cmd->add_option("--diseases", params.n_diseases, "Number of diseases")->capture_default_str();
  generate_cmd->add_option("--symptoms", params.n_symptoms, "Number of symptoms")->capture_default_str();
  generate_cmd->add_option("--edge-prob", params.edge_prob, "Edge probability")->capture_default_str();
  add_range(generate_cmd, "--weight-range", params.weight_range, "Edge weight range");
  add_range(generate_cmd, "--disease-leak-range", params.disease_leak_range, "Disease leak range");
  add_range(generate_cmd, "--symptom-leak-range", params.symptom_leak_range, "Symptom leak range");
  generate_cmd->add_option("--evidence", evidence, "Evidence mode")
      ->check(CLI::IsMember({"forward-sample", "all-on", "none"}))
      ->capture_default_str();
  generate_cmd->add_option("--seed", gen_seed, "Generator seed")->capture_default_str();
  generate_cmd->add_option("-o,--output", gen_out, "Output file (default stdout)");

  std::string config_path;
  std::string report_out;
  std::string summary_out;
  bool with_timing = false;
  auto* experiment_cmd = app.add_subcommand("experiment", "Run a batch of CFTP runs and write a CSV report");
  experiment_cmd->add_option("config", config_path, "Experiment config JSON")->required();
  experiment_cmd->add_option("-o,--output", report_out, "Report CSV (default stdout)");
  experiment_cmd->add_option("--summary", summary_out, "Write per-method aggregates as JSON");
  experiment_cmd->add_flag("--with-timing", with_timing, "Append a wall_time column");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*validate_cmd) return cmd_validate(net_path);
    if (*sample_cmd) return cmd_sample(sample);
    if (*gibbs_cmd) return cmd_gibbs(net_path, sweeps, gibbs_seed, gibbs_out);
    if (*analyze_cmd) return cmd_analyze(net_path, space, csv_out, json_out);
    if (*generate_cmd) {
      params.evidence_mode = parse_evidence_mode(evidence);
      return cmd_generate(params, gen_seed, gen_out);
    }
    if (*experiment_cmd) return cmd_experiment(config_path, report_out, summary_out, with_timing);
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kInvalid;
  } catch (const ReferenceError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kInvalid;
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kInvalid;
  } catch (const ImpossibleEvidenceError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kInvalid;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  }
  return kUsage;
}
