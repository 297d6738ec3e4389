#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <chrono>
#include <limits>
#include <numbers>

#include "recur/constructions.hpp"
#include "recur/error.hpp"

using namespace recur;

namespace {

double prob(const PassageLaw& law, std::uint64_t n) { return std::exp(law.log_prob(n)); }

// Small function violating submultiplicativity early: log f jumps by j^2 at n = 2^j.
MomentFunction staircase() {
  return MomentFunction::custom("staircase", [](std::uint64_t n) {
    double v = 0.0;
    for (int j = 1; (std::uint64_t{1} << j) <= n; ++j) v += double(j) * double(j);
    return v;
  });
}

}  // namespace

TEST_CASE("witness_search") {
  const auto f = parse_moment_function("burst:default");
  SUBCASE("first witnesses") {
    const auto w = witness_search(f, 2);
    REQUIRE(w.size() == 2);
    CHECK(w[0].burst_index == 1);
    CHECK(w[0].x == 2);
    CHECK(w[0].y == 2);
    CHECK(*w[0].exact_log_ratio == 2);
    CHECK(w[1].burst_index == 2);
    CHECK(w[1].x == 12);
    CHECK(w[1].y == 12);
    CHECK(*f.exact_log(12) == 2);
    CHECK(*f.exact_log(24) == 10);
    CHECK(*w[1].exact_log_ratio == 6);
    CHECK(6.0 > 6.0 * std::log(2.0));
  }
  SUBCASE("property: strictly increasing with exact margins") {
    const auto w = witness_search(f, 50);
    REQUIRE(w.size() == 50);
    for (std::size_t k = 0; k < w.size(); ++k) {
      CHECK(w[k].k == k + 1);
      REQUIRE(w[k].exact_log_ratio.has_value());
      const std::int64_t exact = *f.exact_log(w[k].x + w[k].y) - *f.exact_log(w[k].x) - *f.exact_log(w[k].y);
      CHECK(*w[k].exact_log_ratio == exact);
      CHECK(static_cast<double>(exact) > 6.0 * std::log(static_cast<double>(k + 1)));
      if (k > 0) {
        CHECK(w[k].x > w[k - 1].x);
        CHECK(w[k].y > w[k - 1].y);
      }
    }
  }
  SUBCASE("submultiplicative f exhausts the budget") {
    CHECK_THROWS_AS(witness_search(MomentFunction::power(2), 3), BudgetExhausted);
  }
  SUBCASE("grid search on a custom function") {
    const auto w = witness_search(staircase(), 3, WitnessBudget{256});
    REQUIRE(w.size() == 3);
    for (const auto& x : w) CHECK(x.log_ratio > 6.0 * std::log(double(x.k)));
    CHECK(w[1].x > w[0].x);
    CHECK(w[2].y > w[1].y);
  }
}

TEST_CASE("heavy_tail_pair") {
  const auto f = parse_moment_function("burst:default");
  SUBCASE("two witnesses") {
    const auto w = witness_search(f, 2);
    const auto pair = heavy_tail_pair(f, w);
    CHECK(pair.u1.size() == 2);
    CHECK(pair.u2.size() == 2);
    CHECK(std::abs(logsumexp(pair.u1.log_probs())) < 1e-12);
    CHECK(std::abs(logsumexp(pair.u2.log_probs())) < 1e-12);
    // f(2) = 1 and f(12) = e^2: c = 1 / (1 + e^-2 / 4).
    CHECK(std::exp(pair.c1_log) == doctest::Approx(1.0 / (1.0 + std::exp(-2.0) / 4.0)).epsilon(1e-14));
  }
  SUBCASE("fewer than two witnesses") {
    const auto w = witness_search(f, 1);
    CHECK_THROWS_AS(heavy_tail_pair(f, w), PreconditionError);
  }
  SUBCASE("property: bounded marginals, diverging diagonal") {
    for (std::uint64_t k_max : {2, 5, 10, 30, 50}) {
      const auto pair = heavy_tail_pair(f, witness_search(f, k_max));
      const double bound1 = std::exp(pair.c1_log) * std::numbers::pi * std::numbers::pi / 6.0;
      const double bound2 = std::exp(pair.c2_log) * std::numbers::pi * std::numbers::pi / 6.0;
      CHECK(std::exp(log_f_moment_u1(pair)) <= bound1 + 1e-12);
      CHECK(std::exp(log_f_moment_u2(pair)) <= bound2 + 1e-12);
      const auto terms = diagonal_lower_bound_terms(pair, f);
      for (std::size_t k = 0; k < terms.size(); ++k) {
        const double kk = static_cast<double>(k + 1);
        CHECK(terms[k] >= pair.c1_log + pair.c2_log + 2.0 * std::log(kk));
      }
    }
  }
  SUBCASE("generic moment agrees where doubles resolve it") {
    const auto pair = heavy_tail_pair(f, witness_search(f, 6));
    CHECK(log_f_moment(pair.u1, f) == doctest::Approx(log_f_moment_u1(pair)).epsilon(1e-12));
  }
}

TEST_CASE("petal laws against the explicit kernel") {
  const auto u1 = AtomicDist::from_probs({1, 4, 7, 12, 20}, std::vector<double>{0.1, 0.3, 0.2, 0.25, 0.15});
  const auto u2 = AtomicDist::from_probs({2, 3, 9, 15}, std::vector<double>{0.4, 0.1, 0.3, 0.2});
  for (double p : {0.2, 0.5, 0.8}) {
    const auto k = build_petal_chain(u1, u2, p, 5);
    const auto hub = k.index_of("1"), exit = k.index_of("0");
    const auto t11 = to_dense(petal_return_law(u1, u2, p), 200);
    const auto exact11 = first_passage_law(k, hub, hub, 200);
    CompoundBudget budget;
    budget.max_value = 200;
    const auto t00 = to_dense(petal_exit_return_law(u1, u2, p, budget), 200);
    const auto exact00 = first_passage_law(k, exit, exit, 200);
    for (std::uint64_t n = 1; n <= 200; ++n) {
      CHECK(std::abs(prob(t11, n) - prob(exact11, n)) < 1e-12);
      CHECK(std::abs(prob(t00, n) - prob(exact00, n)) < 1e-10);
    }
    const auto f = MomentFunction::power(2);
    const double formula = logsumexp(std::vector<double>{std::log(p) + f.log_eval(2),
                                                         std::log((1 - p) / 2) + log_f_moment(u1, f),
                                                         std::log((1 - p) / 2) + log_f_moment(u2, f)});
    CHECK(std::abs(f_moment(petal_return_law(u1, u2, p), f).log_partial_sum - formula) < 1e-10);
  }
}

TEST_CASE("demo_sharp") {
  const auto f = parse_moment_function("burst:default");
  const auto start = std::chrono::steady_clock::now();
  const auto r = demo_sharp(f, 0.5, 50);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  CHECK(secs < 10.0);
  CHECK(r.success);
  CHECK(r.finite_side.verdict == MomentVerdict::Converged);
  CHECK(std::isfinite(r.finite_side.log_upper()));
  CHECK(r.infinite_side.diverged);
  CHECK(r.infinite_side.log_partial_sum > std::log(1e6));
  CHECK(r.witnesses.size() == 50);

  const auto pair = heavy_tail_pair(f, r.witnesses);
  const double mix = logsumexp(std::vector<double>{std::log(0.5) + f.log_eval(2),
                                                   std::log(0.25) + log_f_moment_u1(pair),
                                                   std::log(0.25) + log_f_moment_u2(pair)});
  CHECK(std::abs(r.finite_side.log_partial_sum - mix) < 1e-10);

  CHECK_THROWS_AS(demo_sharp(f, 0.0, 10), InvalidArgument);
  CHECK_THROWS_AS(demo_sharp(f, 1.0, 10), InvalidArgument);
  CHECK_THROWS_AS(demo_sharp(f, 0.5, 1), PreconditionError);
}

TEST_CASE("demo_exponential") {
  SUBCASE("delta 0.1, p 0.05") {
    const auto r = demo_exponential(0.1, 0.05);
    CHECK(r.success);
    const double expect = 0.95 * std::exp(0.1) + 0.05 * std::exp(0.2);
    CHECK(std::abs(std::exp(r.finite_side.log_partial_sum) - expect) <= 4 * std::numeric_limits<double>::epsilon());
    CHECK(r.infinite_side.diverged);
    const auto again = demo_exponential(0.1, 0.05);
    CHECK(again.infinite_side.crossing_index == r.infinite_side.crossing_index);
    bool found = false;
    for (const auto& [name, value] : r.diagnostics)
      if (name == "term_ratio") {
        found = true;
        CHECK(value == doctest::Approx(std::exp(0.1) * 0.95).epsilon(1e-12));
      }
    CHECK(found);
  }
  SUBCASE("faster divergence for larger delta") {
    const auto slow = demo_exponential(0.1, 0.05);
    const auto fast = demo_exponential(1.0, 0.05);
    CHECK(fast.success);
    CHECK(*fast.infinite_side.crossing_index < *slow.infinite_side.crossing_index);
  }
  SUBCASE("refuses when the series converges") {
    try {
      demo_exponential(0.1, 0.5);
      FAIL("expected PreconditionError");
    } catch (const PreconditionError& e) {
      const std::string msg = e.what();
      CHECK(msg.find("e^delta (1-p) > 1") != std::string::npos);
      CHECK(msg.find("0.55") != std::string::npos);
    }
  }
}
