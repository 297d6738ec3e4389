#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "oracles.hpp"
#include "recur/chain.hpp"
#include "recur/error.hpp"
#include "recur/passage.hpp"

using namespace recur;

namespace {

TransitionKernel cycle(std::size_t n) {
  std::vector<std::string> names;
  std::vector<std::vector<Transition>> rows(n);
  for (std::size_t k = 0; k < n; ++k) {
    names.push_back(std::to_string(k));
    rows[k].push_back({(k + 1) % n, 1.0});
  }
  return TransitionKernel(names, rows);
}

bool mentions(const ValidationReport& r, const std::string& word) {
  for (const auto& v : r.violations)
    if (v.find(word) != std::string::npos) return true;
  return false;
}

}  // namespace

TEST_CASE("validate_kernel") {
  SUBCASE("deterministic 2-cycle is valid") {
    const auto r = validate_kernel(cycle(2));
    CHECK(r.ok());
    CHECK(r.irreducible);
  }
  SUBCASE("short row") {
    TransitionKernel k({"0", "1"}, {{{1, 0.9}}, {{0, 1.0}}});
    const auto r = validate_kernel(k);
    CHECK_FALSE(r.ok());
    CHECK(mentions(r, "0"));
    CHECK(mentions(r, "sum"));
    CHECK_THROWS_AS(require_valid(k), InvalidArgument);
  }
  SUBCASE("two disconnected loops") {
    TransitionKernel k({"0", "1"}, {{{0, 1.0}}, {{1, 1.0}}});
    const auto r = validate_kernel(k);
    CHECK_FALSE(r.irreducible);
    CHECK(mentions(r, "irreducib"));
  }
  SUBCASE("bad entries") {
    CHECK_FALSE(validate_kernel(TransitionKernel({"0"}, {{{0, 1.5}}})).ok());
    CHECK_FALSE(validate_kernel(TransitionKernel({"0"}, {{{3, 1.0}}})).ok());
    CHECK_FALSE(validate_kernel(TransitionKernel({"0", "1"}, {{{1, 0.5}, {1, 0.5}}, {{0, 1.0}}})).ok());
  }
}

TEST_CASE("two-state chain") {
  const auto k = build_two_state(0.5);
  CHECK(k.prob(0, 0) == 0.5);
  CHECK(k.prob(0, 1) == 0.5);
  CHECK(k.prob(1, 0) == 1.0);
  CHECK(k.row(1).size() == 1);
  CHECK_THROWS_AS(build_two_state(1.0), InvalidArgument);
  CHECK_THROWS_AS(build_two_state(0.0), InvalidArgument);
  const auto k2 = build_two_state(0.05);
  CHECK(k2.prob(0, 0) + k2.prob(0, 1) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(validate_kernel(k2).ok());
}

TEST_CASE("petal chain") {
  SUBCASE("length-3 petals") {
    const auto k = build_petal_chain(AtomicDist::point_mass(3), AtomicDist::point_mass(3), 0.5, 8);
    CHECK(k.size() == 6);
    CHECK(validate_kernel(k).ok());
    const auto hub = k.index_of("1");
    const auto law = oracle::passage_bf(k, hub, hub, 3);
    CHECK(law[0] == doctest::Approx(0.0));
    CHECK(law[1] == doctest::Approx(0.5));
    CHECK(law[2] == doctest::Approx(0.5));
    CHECK(k.find("L:1:1").has_value());
    CHECK(k.find("R:1:2").has_value());
  }
  SUBCASE("unit petals become a self-loop") {
    const auto k = build_petal_chain(AtomicDist::point_mass(1), AtomicDist::point_mass(1), 0.5, 8);
    CHECK(k.size() == 2);
    const auto hub = k.index_of("1"), exit = k.index_of("0");
    CHECK(k.prob(hub, hub) == doctest::Approx(0.5));
    CHECK(k.prob(hub, exit) == doctest::Approx(0.5));
  }
  SUBCASE("mixed atoms keep rows stochastic") {
    const auto u1 = AtomicDist::from_probs({2, 4}, std::vector<double>{0.5, 0.5});
    const auto k = build_petal_chain(u1, AtomicDist::point_mass(3), 0.2, 8);
    double total = 0.0;
    for (const auto& t : k.row(k.index_of("1"))) total += t.prob;
    CHECK(std::abs(total - 1.0) < 1e-12);
    CHECK(validate_kernel(k).ok());
  }
  SUBCASE("truncation keeps the heaviest atoms") {
    const auto u = AtomicDist::from_probs({1, 2, 3, 4}, std::vector<double>{0.1, 0.4, 0.2, 0.3});
    const auto t = truncate_to_largest(u, 2);
    REQUIRE(t.size() == 2);
    CHECK(t.atoms()[0] == 2);
    CHECK(t.atoms()[1] == 4);
    CHECK(std::exp(t.log_probs()[0]) == doctest::Approx(4.0 / 7.0));
  }
}

TEST_CASE("stationary distribution") {
  auto pi = stationary_distribution(build_two_state(0.5));
  CHECK(pi[0] == doctest::Approx(2.0 / 3.0).epsilon(1e-14));
  CHECK(pi[1] == doctest::Approx(1.0 / 3.0).epsilon(1e-14));
  pi = stationary_distribution(cycle(2));
  CHECK(pi[0] == doctest::Approx(0.5));
  pi = stationary_distribution(cycle(3));
  for (double x : pi) CHECK(x == doctest::Approx(1.0 / 3.0));
}

TEST_CASE("property: stationary residual and power-iteration oracle") {
  std::mt19937_64 gen(7);
  for (int trial = 0; trial < 50; ++trial) {
    const auto k = oracle::random_kernel(gen, 2 + trial % 7);
    REQUIRE(validate_kernel(k).ok());
    const auto pi = stationary_distribution(k);
    std::vector<double> pp(k.size(), 0.0);
    for (std::size_t s = 0; s < k.size(); ++s)
      for (const auto& t : k.row(s)) pp[t.target] += pi[s] * t.prob;
    double resid = 0.0;
    for (std::size_t s = 0; s < k.size(); ++s) resid += std::abs(pp[s] - pi[s]);
    CHECK(resid < 1e-12);
    const auto ref = oracle::stationary_power(k, 20000);
    for (std::size_t s = 0; s < k.size(); ++s) CHECK(std::abs(pi[s] - ref[s]) < 1e-10);
  }
}

TEST_CASE("sampling") {
  SUBCASE("deterministic cycle") {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
      const auto s = sample_passage(cycle(2), 0, 1, 100, seed);
      REQUIRE(s.passage_time.has_value());
      CHECK(*s.passage_time == 1);
    }
  }
  SUBCASE("censoring at the cap") {
    const auto k = build_two_state(0.1);
    int censored = 0;
    for (std::uint64_t seed = 0; seed < 200; ++seed) {
      const auto s = sample_passage(k, 1, 1, 5, seed);
      CHECK(s.cap == 5);
      if (s.censored()) {
        ++censored;
      } else {
        CHECK(*s.passage_time <= 5);
      }
    }
    CHECK(censored > 0);
  }
  SUBCASE("same seed, same sample") {
    const auto k = build_two_state(0.3);
    for (std::uint64_t seed = 0; seed < 20; ++seed)
      CHECK(sample_passage(k, 1, 1, 1000, seed).passage_time == sample_passage(k, 1, 1, 1000, seed).passage_time);
  }
}

TEST_CASE("property: macro-step petal sampling matches state-by-state sampling") {
  const auto u1 = AtomicDist::from_probs({2, 5, 9}, std::vector<double>{0.5, 0.3, 0.2});
  const auto u2 = AtomicDist::from_probs({1, 4}, std::vector<double>{0.6, 0.4});
  const double p = 0.3;
  const auto kernel = build_petal_chain(u1, u2, p, 8);
  const auto chain = ParametricChain::petal(u1, u2, p);
  const KernelSampler naive(kernel);
  const ParametricSampler macro(chain);
  const StateIndex k0 = kernel.index_of("0"), k1 = kernel.index_of("1");
  constexpr std::size_t n = 100000;
  for (auto [from, to] : {std::pair<StateIndex, StateIndex>{1, 1}, {0, 0}}) {
    Rng ra(11), rb(12);
    std::vector<std::uint64_t> a, b;
    a.reserve(n);
    b.reserve(n);
    for (std::size_t s = 0; s < n; ++s) {
      a.push_back(*naive.sample(from == 0 ? k0 : k1, to == 0 ? k0 : k1, 1u << 30, ra).passage_time);
      b.push_back(*macro.sample(from, to, 1u << 30, rb).passage_time);
    }
    CHECK(oracle::ks_two_sample(a, b) < oracle::ks_critical_001(n, n));
  }
}
