#include <doctest.h>

#include "pgibbs/errors.hpp"
#include "pgibbs/experiment.hpp"
#include "pgibbs/networks.hpp"

using namespace pgibbs;

namespace {

const std::string kNetworks = std::string(PGIBBS_SOURCE_DIR) + "/data/networks";

}  // namespace

TEST_CASE("generate_random_network") {
  GeneratorParams params;
  SUBCASE("deterministic in (params, seed)") {
    CHECK(generate_random_network(params, 7) == generate_random_network(params, 7));
    CHECK_FALSE(generate_random_network(params, 7) == generate_random_network(params, 8));
  }
  SUBCASE("edge_prob 1 gives the complete bipartite graph") {
    params.edge_prob = 1.0;
    params.n_diseases = 4;
    params.n_symptoms = 3;
    const Network net = generate_random_network(params, 1);
    CHECK(net.edges().size() == 12);
    for (NodeIndex s = 4; s < 7; ++s) CHECK(net.parents(s).size() == 4);
  }
  SUBCASE("default diagnostic shape") {
    const Network net = generate_random_network(params, 3);
    CHECK(net.size() == 20);
    CHECK(net.layers().size() == 2);
    CHECK(net.evidence().size() == 10);
    CHECK(net.unknowns().size() == 10);
    CHECK(validate(net).ok);
  }
  SUBCASE("evidence modes") {
    params.evidence_mode = EvidenceMode::AllOn;
    const Network on = generate_random_network(params, 2);
    CHECK(on.evidence().size() == params.n_symptoms);
    for (const auto& [i, v] : on.evidence()) CHECK(v == 1);
    params.evidence_mode = EvidenceMode::None;
    CHECK(generate_random_network(params, 2).evidence().empty());
  }
  SUBCASE("every generated network validates") {
    for (std::uint64_t seed = 0; seed < 200; ++seed) {
      params.n_diseases = 1 + seed % 7;
      params.n_symptoms = 1 + seed % 5;
      params.edge_prob = static_cast<double>(seed % 11) / 10.0;
      const auto r = validate(generate_random_network(params, seed));
      CHECK(r.ok);
      CHECK(r.error_count() == 0);
    }
  }
  SUBCASE("bad params") {
    params.n_diseases = 0;
    CHECK_THROWS_AS(generate_random_network(params, 1), ContractError);
    params.n_diseases = 2;
    params.weight_range = {0.9, 0.2};
    CHECK_THROWS_AS(check_params(params), ContractError);
  }
}

TEST_CASE("experiment config parsing") {
  const auto config = parse_experiment_config(R"({
    "networks": [{"id": "two", "path": "two_disease.json"},
                 {"id": "gen", "generator": {"diseases": 3, "symptoms": 2, "evidence": "all-on"}, "count": 2, "seed": 5}],
    "seeds": {"base": 10, "count": 4},
    "t_max": 4096,
    "methods": ["summary"],
    "checks": ["exactness"]
  })",
                                              kNetworks);
  REQUIRE(config.networks.size() == 2);
  CHECK(config.networks[0].path == kNetworks + "/two_disease.json");
  CHECK(config.networks[1].generator->n_diseases == 3);
  CHECK(config.networks[1].generator->evidence_mode == EvidenceMode::AllOn);
  CHECK(config.networks[1].count == 2);
  CHECK(config.seed_base == 10);
  CHECK(config.seed_count == 4);
  CHECK(config.t_max == 4096);
  CHECK(config.methods == std::vector<Method>{Method::Summary});
  CHECK(config.exactness);

  CHECK_THROWS_AS(parse_experiment_config(R"({"bogus": 1})"), ParseError);
  CHECK_THROWS_AS(parse_experiment_config(R"({"networks": [{"id": "x"}]})"), ParseError);
  CHECK_THROWS_AS(parse_experiment_config(R"({"t_max": "deep"})"), ParseError);
  CHECK_THROWS_AS(parse_experiment_config(R"({"networks": [{"generator": {"diseases": 2, "edge_prob": 3}}]})"),
                  ParseError);
}

TEST_CASE("empty experiment") {
  const auto report = run_experiment(parse_experiment_config(R"({"networks": []})"));
  CHECK(report.rows.empty());
  CHECK_FALSE(report.all_indeterminate());
  CHECK(report_csv(report) == "network_id,seed,method,status,coalescence_time,total_steps\n");
}

TEST_CASE("two-disease comparison: both methods identical per seed") {
  const auto config = parse_experiment_config(R"({
    "networks": [{"id": "two", "path": "two_disease.json"}],
    "seeds": {"base": 0, "count": 1000},
    "compare": true,
    "checks": ["exactness"]
  })",
                                              kNetworks);
  const auto report = run_experiment(config);
  REQUIRE(report.rows.size() == 2000);
  for (std::size_t i = 0; i < report.rows.size(); i += 2) {
    const auto& s = report.rows[i];
    const auto& e = report.rows[i + 1];
    CHECK(e.seed == s.seed);
    CHECK(s.method == Method::Summary);
    CHECK(e.method == Method::Explicit);
    CHECK(e.coalescence_time == s.coalescence_time);
  }
  CHECK(report.dominance_violations == 0);
  REQUIRE(report.exactness.size() == 1);
  CHECK(report.exactness[0].samples == 1000);
  CHECK(report.exactness[0].chi_square.p_value > 0.001);
  CHECK(report_csv(report) == report_csv(run_experiment(config)));
  CHECK(report_summary_json(report).find("\"mean_coalescence_sweeps\"") != std::string::npos);
}

TEST_CASE("indeterminate runs stay in the report") {
  const auto config = parse_experiment_config(R"({
    "networks": [{"id": "two", "path": "two_disease.json"}],
    "seeds": {"base": 0, "count": 5},
    "t_max": 1,
    "methods": ["summary"]
  })",
                                              kNetworks);
  const auto report = run_experiment(config);
  CHECK(report.rows.size() == 5);
  CHECK(report.all_indeterminate());
  CHECK(report_csv(report).find("indeterminate") != std::string::npos);
}

TEST_CASE("comparison mode refuses networks too large for explicit tracking") {
  const auto config = parse_experiment_config(R"({
    "networks": [{"id": "big", "generator": {"diseases": 17, "symptoms": 2}}],
    "seeds": {"count": 1},
    "compare": true
  })");
  CHECK_THROWS_AS(run_experiment(config), ContractError);
}
