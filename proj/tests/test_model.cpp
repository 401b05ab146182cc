#include <doctest.h>

#include <random>
#include <string>

#include "pgibbs/errors.hpp"
#include "pgibbs/experiment.hpp"
#include "pgibbs/model.hpp"
#include "pgibbs/networks.hpp"
#include "support/random_networks.hpp"

using namespace pgibbs;

namespace {

const char* kTwoDisease = R"({
  "layers": [["D1","D2"],["S1"]],
  "nodes":  {"D1": {"leak": 0.1}, "D2": {"leak": 0.1}, "S1": {"leak": 0.0}},
  "edges":  [["D1","S1",1.0],["D2","S1",1.0]],
  "evidence": {"S1": 1} })";

bool has_error_containing(const ValidationReport& r, const std::string& needle) {
  for (const auto& i : r.issues) {
    if (i.severity == Severity::Error && i.message.find(needle) != std::string::npos) return true;
  }
  return false;
}

}  // namespace

TEST_CASE("parse the two-disease document") {
  const Network net = parse_network(kTwoDisease);
  CHECK(net.size() == 3);
  CHECK(net.layers().size() == 2);
  CHECK(net.edges().size() == 2);
  CHECK(net.node(0).name == "D1");
  CHECK(net.node(0).leak == 0.1);
  CHECK(net.node(2).leak == 0.0);
  CHECK(net.evidence().at(2) == 1);
  CHECK(net.unknowns().size() == 2);
  CHECK(net == networks::two_disease());
}

TEST_CASE("single node, no edges") {
  const Network net = parse_network(R"({"layers": [["A"]], "nodes": {"A": {"leak": 0.3}}})");
  CHECK(net.size() == 1);
  CHECK(net.edges().empty());
  CHECK(validate(net).ok);
}

TEST_CASE("parse errors") {
  SUBCASE("weight out of range") {
    CHECK_THROWS_AS(parse_network(R"({"layers": [["A"],["B"]], "nodes": {"A": {"leak": 0.1}, "B": {"leak": 0.1}},
                                      "edges": [["A","B",1.5]]})"),
                    ValidationError);
  }
  SUBCASE("edge to an unknown node") {
    CHECK_THROWS_AS(parse_network(R"({"layers": [["A"]], "nodes": {"A": {"leak": 0.1}}, "edges": [["A","Z",0.5]]})"),
                    ReferenceError);
  }
  SUBCASE("evidence on an unknown node") {
    CHECK_THROWS_AS(parse_network(R"({"layers": [["A"]], "nodes": {"A": {"leak": 0.1}}, "evidence": {"Q": 1}})"),
                    ReferenceError);
  }
  SUBCASE("malformed json names the line") {
    try {
      parse_network("{\n\"layers\": [[\"A\"]],\n\"nodes\": {\"A\": {\"leak\": }}\n}");
      FAIL("expected a parse error");
    } catch (const ParseError& e) {
      CHECK(std::string(e.what()).find("line 3") != std::string::npos);
    }
  }
  SUBCASE("missing leak names the field") {
    try {
      parse_network(R"({"layers": [["A"]], "nodes": {"A": {}}})");
      FAIL("expected a parse error");
    } catch (const ParseError& e) {
      CHECK(std::string(e.what()).find("nodes.A.leak") != std::string::npos);
    }
  }
  SUBCASE("node missing from layers") {
    CHECK_THROWS_AS(parse_network(R"({"layers": [["A"]], "nodes": {"A": {"leak": 0.1}, "B": {"leak": 0.1}}})"),
                    ParseError);
  }
  SUBCASE("unknown top-level field") {
    CHECK_THROWS_AS(parse_network(R"({"layers": [], "nodes": {}, "extra": 1})"), ParseError);
  }
  SUBCASE("edge pointing back up a layer") {
    CHECK_THROWS_AS(parse_network(R"({"layers": [["A"],["B"]], "nodes": {"A": {"leak": 0.1}, "B": {"leak": 0.1}},
                                      "edges": [["B","A",0.5]]})"),
                    ValidationError);
  }
  SUBCASE("unchecked parse keeps the bad network for reporting") {
    const Network net = parse_network(R"({"layers": [["A"],["B"]], "nodes": {"A": {"leak": 0.1}, "B": {"leak": 0.1}},
                                          "edges": [["A","B",1.5]]})",
                                      false);
    CHECK_FALSE(validate(net).ok);
  }
}

TEST_CASE("validate") {
  SUBCASE("two-disease network is ok with a determinism warning") {
    const auto r = validate(networks::two_disease());
    CHECK(r.ok);
    CHECK(r.error_count() == 0);
    CHECK(r.warning_count() == 1);
  }
  SUBCASE("intra-layer edge") {
    const Network net({{"A", 0.2}, {"B", 0.2}}, {{0, 1}}, {{0, 1, 0.5}}, {});
    const auto r = validate(net);
    CHECK_FALSE(r.ok);
    CHECK(has_error_containing(r, "same layer"));
  }
  SUBCASE("layer-skipping edge") {
    const Network net({{"A", 0.2}, {"B", 0.2}, {"C", 0.2}}, {{0}, {1}, {2}}, {{0, 2, 0.5}}, {});
    CHECK(has_error_containing(validate(net), "next layer"));
  }
  SUBCASE("cycle") {
    const Network net({{"A", 0.2}, {"B", 0.2}}, {{0}, {1}}, {{0, 1, 0.5}, {1, 0, 0.5}}, {});
    CHECK(has_error_containing(validate(net), "cycle"));
  }
  SUBCASE("leak out of range and bad evidence value") {
    const Network net({{"A", -0.1}, {"B", 0.2}}, {{0}, {1}}, {{0, 1, 0.5}}, {{1, 2}});
    const auto r = validate(net);
    CHECK(has_error_containing(r, "leak"));
    CHECK(has_error_containing(r, "0 or 1"));
  }
  SUBCASE("node in no layer") {
    const Network net({{"A", 0.2}, {"B", 0.2}}, {{0}}, {}, {});
    CHECK(has_error_containing(validate(net), "not in any layer"));
  }
  SUBCASE("strictly positive network has no issues") {
    const Network net({{"A", 0.2}, {"B", 0.3}, {"C", 0.1}}, {{0, 1}, {2}}, {{0, 2, 0.5}, {1, 2, 0.7}}, {{2, 1}});
    const auto r = validate(net);
    CHECK(r.ok);
    CHECK(r.issues.empty());
  }
}

TEST_CASE("noisy_or_prob") {
  const Network net = networks::two_disease();
  const std::uint8_t off[] = {0, 0};
  const std::uint8_t one[] = {1, 0};
  CHECK(noisy_or_prob(net, 2, off) == 0.0);
  CHECK(noisy_or_prob(net, 2, one) == 1.0);
  CHECK(noisy_or_prob(net, 0, {}) == doctest::Approx(0.1).epsilon(1e-15));

  const Network mixed({{"A", 0.5}, {"B", 0.5}, {"W", 0.1}}, {{0, 1}, {2}}, {{0, 2, 0.5}, {1, 2, 0.2}}, {});
  const std::uint8_t both[] = {1, 1};
  CHECK(noisy_or_prob(mixed, 2, both) == doctest::Approx(0.64).epsilon(1e-14));

  SUBCASE("wrong number of parent values") {
    const std::uint8_t three[] = {1, 1, 1};
    CHECK_THROWS_AS(noisy_or_prob(net, 2, three), ContractError);
    CHECK_THROWS_AS(noisy_or_prob(net, 0, one), ContractError);
  }
}

TEST_CASE("noisy_or_prob is monotone and stays in [0,1]") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 200; ++trial) {
    const Network net = testing::random_layered_network(rng, {.max_layers = 3, .max_width = 4});
    for (NodeIndex i = 0; i < net.size(); ++i) {
      const auto np = net.parents(i).size();
      std::vector<std::uint8_t> pv(np);
      for (auto& v : pv) v = static_cast<std::uint8_t>(testing::pick(rng, 0, 1));
      const double p = noisy_or_prob(net, i, pv);
      CHECK(p >= 0.0);
      CHECK(p <= 1.0);
      for (std::size_t j = 0; j < np; ++j) {
        if (pv[j]) continue;
        auto flipped = pv;
        flipped[j] = 1;
        CHECK(noisy_or_prob(net, i, flipped) >= p);
      }
    }
  }
}

TEST_CASE("serialize then parse is the identity") {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 50; ++trial) {
    const Network net = testing::random_layered_network(rng, {.max_layers = 3, .max_width = 4});
    const Network again = parse_network(serialize_network(net));
    CHECK(again == net);
    CHECK(serialize_network(again) == serialize_network(net));
  }
}

TEST_CASE("bundled network files match the built-in networks") {
  const std::string dir = std::string(PGIBBS_SOURCE_DIR) + "/data/networks/";
  CHECK(load_network(dir + "two_disease.json") == networks::two_disease());
  CHECK(load_network(dir + "disease_triangle.json") == networks::disease_triangle());
  CHECK(load_network(dir + "extreme_triangle.json") == networks::extreme_triangle());
}
