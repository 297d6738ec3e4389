#include "recur/moments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <string>
#include <thread>

#include "recur/error.hpp"

namespace recur {

std::string to_string(MomentVerdict v) {
  switch (v) {
    case MomentVerdict::Converged:
      return "converged";
    case MomentVerdict::Diverged:
      return "diverged";
    case MomentVerdict::Inconclusive:
      return "inconclusive";
  }
  return "inconclusive";
}

double default_divergence_threshold(const MomentFunction& f) { return f.log_eval(1) + std::log(1e6); }

MomentEstimate f_moment(const PassageLaw& law, const MomentFunction& f, const MomentPolicy& policy) {
  MomentEstimate est;
  est.horizon = law.horizon();
  est.threshold = policy.divergence_threshold.value_or(default_divergence_threshold(f));
  LogAccumulator acc;
  law.for_each([&](std::uint64_t n, double lp) { acc.add(f.log_eval(n) + lp); });
  est.log_partial_sum = acc.value();

  if (law.log_tail_mass() == kNegInf) {
    est.log_tail_bound = kNegInf;
  } else if (const auto& cert = law.tail_cert(); cert && cert->n0 <= est.horizon && est.horizon >= 1) {
    if (auto log_gamma = f.log_step_bound(est.horizon, policy.growth_window, !policy.require_cert)) {
      const double log_gd = static_cast<double>(cert->period) * *log_gamma;
      const double log_gr = log_gd + std::log(cert->rho);
      if (log_gr < 0.0) {
        const double block = log_gd - log1mexp(log_gr);
        // Summation by parts: gamma + d (gamma - 1) gamma^d / (1 - gamma^d rho).
        double parts = *log_gamma;
        if (*log_gamma > 0.0)
          parts = log_add(parts, std::log(static_cast<double>(cert->period)) + std::log(std::expm1(*log_gamma)) + block);
        est.log_tail_bound = f.log_eval(est.horizon) + law.log_tail_mass() + std::min(block, parts);
      }
    }
  }

  if (est.log_tail_bound) {
    est.verdict = MomentVerdict::Converged;
  } else if (est.log_partial_sum > est.threshold) {
    est.verdict = MomentVerdict::Diverged;
  }
  return est;
}

SeriesVerdict lower_bound_series(const std::function<std::optional<double>(std::uint64_t)>& next_term, double threshold,
                                 std::uint64_t first_index, std::uint64_t max_terms) {
  SeriesVerdict out;
  out.threshold = threshold;
  LogAccumulator acc;
  for (std::uint64_t k = first_index; k < first_index + max_terms; ++k) {
    auto term = next_term(k);
    if (!term) break;
    if (std::isnan(*term)) throw InvalidArgument("lower_bound_series: NaN term");
    acc.add(*term);
    out.log_partial_sum = acc.value();
    out.trace.push_back({k, *term, out.log_partial_sum});
    if (out.log_partial_sum > threshold) {
      out.diverged = true;
      out.crossing_index = k;
      break;
    }
  }
  return out;
}

SeriesVerdict lower_bound_series(std::span<const double> log_terms, double threshold, std::uint64_t first_index) {
  return lower_bound_series(
      [&](std::uint64_t k) -> std::optional<double> {
        const auto idx = k - first_index;
        if (idx >= log_terms.size()) return std::nullopt;
        return log_terms[idx];
      },
      threshold, first_index, log_terms.size());
}

unsigned worker_threads() {
  if (const char* env = std::getenv("RECUR_MOMENTS_THREADS")) {
    const long v = std::strtol(env, nullptr, 10);
    if (v >= 1) return static_cast<unsigned>(v);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

namespace {

struct TaskMoments {
  double log_ref = kNegInf;  // all sums below are scaled by exp(-log_ref)
  double s1 = 0.0;
  double s2 = 0.0;
  std::uint64_t censored = 0;
};

}  // namespace

McEstimate mc_f_moment(const PassageSampler& sampler, const MomentFunction& f, std::uint64_t n_samples,
                       std::uint64_t cap, std::uint64_t seed) {
  if (n_samples < 1) throw InvalidArgument("mc_f_moment: n_samples must be >= 1");
  if (cap < 1) throw InvalidArgument("mc_f_moment: cap must be >= 1");
  constexpr std::uint64_t kTasks = 64;
  const Rng root(seed);
  std::vector<TaskMoments> results(kTasks);

  auto run_task = [&](std::uint64_t t) {
    const std::uint64_t lo = n_samples * t / kTasks, hi = n_samples * (t + 1) / kTasks;
    if (lo == hi) return;
    Rng rng = root.split(t);
    std::vector<double> values;
    values.reserve(hi - lo);
    TaskMoments& r = results[t];
    for (std::uint64_t k = lo; k < hi; ++k) {
      const auto s = sampler(cap, rng);
      if (s.censored()) ++r.censored;
      values.push_back(f.log_eval(s.censored() ? cap : *s.passage_time));
    }
    r.log_ref = *std::max_element(values.begin(), values.end());
    for (double v : values) {
      const double x = std::exp(v - r.log_ref);
      r.s1 += x;
      r.s2 += x * x;
    }
  };

  const unsigned threads = static_cast<unsigned>(std::min<std::uint64_t>(worker_threads(), kTasks));
  if (threads <= 1) {
    for (std::uint64_t t = 0; t < kTasks; ++t) run_task(t);
  } else {
    std::atomic<std::uint64_t> next{0};
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < threads; ++w)
      pool.emplace_back([&] {
        for (std::uint64_t t; (t = next.fetch_add(1)) < kTasks;) run_task(t);
      });
    for (auto& th : pool) th.join();
  }

  double log_ref = kNegInf;
  for (const auto& r : results) log_ref = std::max(log_ref, r.log_ref);
  double s1 = 0.0, s2 = 0.0;
  std::uint64_t censored = 0;
  for (const auto& r : results) {
    if (r.log_ref == kNegInf) continue;
    const double scale = std::exp(r.log_ref - log_ref);
    s1 += r.s1 * scale;
    s2 += r.s2 * scale * scale;
    censored += r.censored;
  }
  const double n = static_cast<double>(n_samples);
  const double mean = s1 / n;
  const double var = n > 1 ? std::max(0.0, (s2 / n - mean * mean) * n / (n - 1.0)) : 0.0;
  McEstimate est;
  est.n_samples = n_samples;
  est.mean_log_f = log_ref + std::log(mean);
  est.log_std_err = std::sqrt(var / n) / mean;
  est.std_err = std::exp(log_ref) * std::sqrt(var / n);
  est.censored_fraction = static_cast<double>(censored) / n;
  return est;
}

std::vector<GrowthPoint> compound_growth_curve(const PassageLaw& u, const MomentFunction& f, std::uint64_t m_max,
                                               const ConvolveOptions& options) {
  if (u.is_dense()) throw InvalidArgument("compound_growth_curve needs a sparse law");
  std::vector<GrowthPoint> out;
  AtomicDist sum = u.atoms();
  for (std::uint64_t m = 1; m <= m_max; ++m) {
    if (m > 1) sum = convolve(u.atoms(), sum, options);
    LogAccumulator acc;
    for (std::size_t k = 0; k < sum.size(); ++k) acc.add(sum.log_probs()[k] + f.log_eval(sum.atoms()[k]));
    const double lm = acc.value();
    out.push_back({m, lm, lm / static_cast<double>(m)});
  }
  return out;
}

}  // namespace recur
