#include <doctest.h>

#include <random>
#include <set>

#include "pgibbs/analysis.hpp"
#include "pgibbs/cftp.hpp"
#include "pgibbs/errors.hpp"
#include "pgibbs/networks.hpp"
#include "pgibbs/summary.hpp"
#include "support/random_networks.hpp"

using namespace pgibbs;

namespace {

// Every configuration of the unknowns, started at -depth and run to 0 on
// their own; returns the set of end states.
std::set<Configuration> run_all_from(const Network& net, std::uint64_t seed, std::int64_t depth) {
  const StateCodec codec(net, StateSpace::Original);
  std::set<Configuration> ends;
  for (std::size_t i = 0; i < codec.dim(); ++i) {
    ends.insert(gibbs_run(net, codec.configuration(i), -depth, 0, RandomStream{seed}));
  }
  return ends;
}

}  // namespace

TEST_CASE("a single unknown coalesces after one step") {
  const Network net({{"A", 0.3}, {"B", 0.4}}, {{0}, {1}}, {{0, 1, 0.6}}, {{1, 1}});
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const auto s = cftp_summary(net, seed);
    CHECK(s.status == RunStatus::Coalesced);
    CHECK(s.coalescence_time == 1);
    CHECK(s.total_steps == 1);
    const auto e = cftp_explicit(net, seed);
    CHECK(e.coalescence_time == 1);
    CHECK(e.sample == s.sample);
  }
}

TEST_CASE("cftp runs are deterministic in the seed") {
  const Network net = networks::disease_triangle();
  CHECK(cftp_summary(net, 17) == cftp_summary(net, 17));
  CHECK(cftp_explicit(net, 17) == cftp_explicit(net, 17));
  CHECK(to_json_line(cftp_summary(net, 17)) == to_json_line(cftp_summary(net, 17)));
}

TEST_CASE("cftp preconditions") {
  const Network observed({{"A", 0.3}}, {{0}}, {}, {{0, 1}});
  CHECK_THROWS_AS(cftp_summary(observed, 1), ContractError);
  CHECK_THROWS_AS(cftp_explicit(observed, 1), ContractError);
  CHECK_THROWS_AS(cftp_summary(networks::two_disease(), 1, 0), ContractError);
  CHECK_THROWS_AS(cftp_explicit(networks::disease_triangle(), 1, kDefaultTMax, 2), SizeError);
}

TEST_CASE("indeterminate runs report the deepest attempt") {
  // One step can settle at most one of the two diseases.
  const auto r = cftp_summary(networks::two_disease(), 3, 1);
  CHECK(r.status == RunStatus::Indeterminate);
  CHECK_FALSE(r.sample.has_value());
  CHECK(r.coalescence_time == 1);
  CHECK(r.total_steps == 1);
  CHECK(to_json_line(r) == R"({"seed":3,"status":"indeterminate","coalescence_time":1,"total_steps":1,"sample":null})");

  const auto deeper = cftp_explicit(networks::extreme_triangle(), 3, 6);
  if (deeper.status == RunStatus::Indeterminate) {
    CHECK(deeper.coalescence_time == 4);
    CHECK(deeper.total_steps == 7);
  }
}

TEST_CASE("run record json line") {
  const auto r = cftp_summary(networks::two_disease(), 0);
  const auto line = to_json_line(r);
  CHECK(line.find(R"("status":"coalesced")") != std::string::npos);
  CHECK(line.find(R"("sample":")" + to_string(*r.sample) + "\"") != std::string::npos);
}

TEST_CASE("coalesced samples are states at t = 0 of every chain started at the coalescence time") {
  for (const Network& net : {networks::two_disease(), networks::disease_triangle()}) {
    for (std::uint64_t seed = 0; seed < 40; ++seed) {
      const auto e = cftp_explicit(net, seed);
      REQUIRE(e.status == RunStatus::Coalesced);
      const auto ends = run_all_from(net, seed, e.coalescence_time);
      CHECK(ends.size() == 1);
      CHECK(*ends.begin() == *e.sample);
      if (e.coalescence_time > 1) CHECK(run_all_from(net, seed, e.coalescence_time / 2).size() > 1);
      CHECK(e.total_steps == 2 * e.coalescence_time - 1);

      const auto s = cftp_summary(net, seed);
      REQUIRE(s.status == RunStatus::Coalesced);
      CHECK(s.sample == e.sample);
      CHECK(s.coalescence_time >= e.coalescence_time);
      CHECK(s.total_steps == 2 * s.coalescence_time - 1);
    }
  }
}

TEST_CASE("two-disease network: summary and explicit agree on every seed") {
  const Network net = networks::two_disease();
  for (std::uint64_t seed = 0; seed < 1000; ++seed) {
    const auto s = cftp_summary(net, seed);
    const auto e = cftp_explicit(net, seed);
    CHECK(s.coalescence_time == e.coalescence_time);
    CHECK(s.sample == e.sample);
  }
}

TEST_CASE("explicit chain sets only shrink within an attempt") {
  const Network net = networks::disease_triangle();
  std::int64_t last_depth = 0;
  std::size_t last_size = 0;
  std::size_t violations = 0;
  std::size_t calls = 0;
  cftp_explicit(net, 5, kDefaultTMax, kExplicitUnknownCap, [&](std::int64_t depth, Time, std::size_t size) {
    if (depth == last_depth && size > last_size) ++violations;
    if (depth != last_depth) CHECK(size <= 8);
    last_depth = depth;
    last_size = size;
    ++calls;
  });
  CHECK(calls > 0);
  CHECK(violations == 0);
  CHECK(last_size == 1);

  const Network one({{"A", 0.3}}, {{0}}, {}, {});
  std::vector<std::size_t> sizes;
  cftp_explicit(one, 2, kDefaultTMax, kExplicitUnknownCap,
                [&](std::int64_t, Time, std::size_t size) { sizes.push_back(size); });
  CHECK(sizes == std::vector<std::size_t>{1});
}

TEST_CASE("summary never detects coalescence before explicit tracking") {
  std::mt19937_64 rng(77);
  for (int trial = 0; trial < 40; ++trial) {
    const Network net = testing::random_layered_network(rng, {.max_unknowns = 8});
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
      const auto s = cftp_summary(net, seed);
      const auto e = cftp_explicit(net, seed);
      REQUIRE(s.status == RunStatus::Coalesced);
      REQUIRE(e.status == RunStatus::Coalesced);
      CHECK(s.coalescence_time >= e.coalescence_time);
      CHECK(s.sample == e.sample);
    }
  }
}

TEST_CASE("two unknowns are summarized perfectly") {
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 40; ++trial) {
    const Network net = testing::random_layered_network(rng, {.unknowns = 2});
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
      CHECK(cftp_summary(net, seed).coalescence_time == cftp_explicit(net, seed).coalescence_time);
    }
  }
}

TEST_CASE("two-disease cftp samples follow the posterior") {
  const Network net = networks::two_disease();
  const StateCodec codec(net, StateSpace::Original);
  std::vector<std::uint64_t> counts(codec.dim(), 0);
  std::vector<Configuration> samples;
  for (std::uint64_t seed = 0; seed < 10000; ++seed) {
    const auto r = cftp_summary(net, seed);
    REQUIRE(r.status == RunStatus::Coalesced);
    ++counts[codec.index_of(*r.sample)];
    samples.push_back(*r.sample);
  }
  CHECK(counts[0] == 0);
  const double expected[] = {0.0, 9.0 / 19, 9.0 / 19, 1.0 / 19};
  const auto gof = chi_square_gof(counts, expected);
  CHECK(gof.dof == 2);
  CHECK(gof.p_value > 0.001);

  const auto freq = marginals(samples);
  CHECK(freq[0] == doctest::Approx(10.0 / 19).epsilon(0.03));
  CHECK(freq[1] == doctest::Approx(10.0 / 19).epsilon(0.03));
  CHECK(freq[2] == 1.0);
}

TEST_CASE("forward_samples") {
  const Network net = networks::two_disease();
  const auto r = cftp_summary(net, 12);
  REQUIRE(r.sample);
  CHECK(forward_samples(net, *r.sample, 0, 12).empty());
  CHECK(forward_samples(net, *r.sample, 25, 12) == forward_samples(net, *r.sample, 25, 12));

  // One recorded state per sweep: the state after the first sweep is a
  // two-step Gibbs run from t = 0.
  const auto few = forward_samples(net, *r.sample, 3, 12);
  CHECK(few[0] == gibbs_run(net, *r.sample, 0, 2, RandomStream{12}));
  CHECK(few[2] == gibbs_run(net, *r.sample, 0, 6, RandomStream{12}));

  const auto many = forward_samples(net, *r.sample, 50000, 12);
  const StateCodec codec(net, StateSpace::Original);
  Distribution hist{StateSpace::Original, {0, 1}, std::vector<double>(4, 0.0)};
  for (const auto& x : many) hist.masses[codec.index_of(x)] += 1.0 / static_cast<double>(many.size());
  CHECK(hist.masses[0] == 0.0);
  CHECK(total_variation(hist, exact_posterior(net)) < 0.02);

  CHECK_THROWS_AS(forward_samples(net, parse_configuration("110"), 3, 1), ContractError);
}

TEST_CASE("marginals") {
  const std::vector<Configuration> same(4, parse_configuration("101"));
  CHECK(marginals(same) == std::vector<double>{1.0, 0.0, 1.0});
  CHECK(marginals({parse_configuration("01"), parse_configuration("10")}) == std::vector<double>{0.5, 0.5});
  CHECK_THROWS_AS(marginals({}), ContractError);
  CHECK_THROWS_AS(marginals({parse_configuration("01"), parse_configuration("1")}), ContractError);
}
