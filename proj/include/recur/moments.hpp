#pragma once

// Generalized moments E f(T): certified log-space partial sums with tail
// bounds, divergence detection through diverging lower-bound series, and
// censored Monte Carlo.

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "recur/chain.hpp"
#include "recur/momentfn.hpp"
#include "recur/passage.hpp"
#include "recur/rng.hpp"

namespace recur {

enum class MomentVerdict { Converged, Diverged, Inconclusive };
std::string to_string(MomentVerdict v);

/// Default divergence threshold: log f(1) + log 10^6.
double default_divergence_threshold(const MomentFunction& f);

struct MomentPolicy {
  /// Log-value the partial sum must exceed for a Diverged verdict; defaults
  /// to default_divergence_threshold(f).
  std::optional<double> divergence_threshold;
  /// When false, Custom functions may use the growth factor observed on the
  /// window as if it held beyond it.
  bool require_cert = true;
  std::uint64_t growth_window = 100;
};

/// Divergence is only ever a threshold crossing of a lower bound; a finite
/// computation cannot prove E f(T) = inf.
struct MomentEstimate {
  double log_partial_sum = kNegInf;       // log Σ_{n <= N} f(n) P(T = n)
  std::optional<double> log_tail_bound;   // log bound on Σ_{n > N}; -inf when the tail is empty
  MomentVerdict verdict = MomentVerdict::Inconclusive;
  std::uint64_t horizon = 0;              // N
  double threshold = 0.0;

  /// Upper end of the certified interval (Converged only).
  double log_upper() const { return log_tail_bound ? log_add(log_partial_sum, *log_tail_bound) : kNegInf; }
};

/// Tail bound (law certified with ratio rho over period d from n0 <= N,
/// growth factor gamma with gamma^d rho < 1):
///   Σ_{n > N} f(n) P(T = n) <= f(N) P(T > N) min(B, gamma + d (gamma - 1) B),
///   B = gamma^d / (1 - gamma^d rho).
/// A certified Converged verdict takes precedence over the threshold test.
MomentEstimate f_moment(const PassageLaw& law, const MomentFunction& f, const MomentPolicy& policy = {});

struct SeriesPoint {
  std::uint64_t k;
  double log_term;
  double log_partial_sum;
};

struct SeriesVerdict {
  bool diverged = false;
  std::optional<std::uint64_t> crossing_index;  // first k whose partial sum exceeds the threshold
  double log_partial_sum = kNegInf;
  double threshold = 0.0;
  std::vector<SeriesPoint> trace;
};

/// Accumulates non-negative terms (given as logs, indexed from `first_index`)
/// and stops at the first threshold crossing.
SeriesVerdict lower_bound_series(std::span<const double> log_terms, double threshold, std::uint64_t first_index = 1);
/// Generator form: `next_term(k)` returns log term k, or nullopt when exhausted.
SeriesVerdict lower_bound_series(const std::function<std::optional<double>(std::uint64_t)>& next_term, double threshold,
                                 std::uint64_t first_index, std::uint64_t max_terms);

struct McEstimate {
  double mean_log_f = kNegInf;  // log of the sample mean of f(T)
  double std_err = 0.0;         // standard error of the sample mean
  double log_std_err = 0.0;     // delta-method standard error of mean_log_f
  double censored_fraction = 0.0;
  std::uint64_t n_samples = 0;

  double mean() const { return std::exp(mean_log_f); }
};

/// Draws one passage time censored at `cap`. Must be safe to call concurrently.
using PassageSampler = std::function<TrajectorySample(std::uint64_t cap, Rng& rng)>;

/// Number of worker threads: RECUR_MOMENTS_THREADS if set, else hardware concurrency.
unsigned worker_threads();

/// Monte Carlo estimate of E f(T). Censored samples contribute f(cap), so
/// with censoring the estimate is a lower bound on E f(T). Work is split into
/// a fixed number of seed streams, making the result independent of the
/// thread count.
McEstimate mc_f_moment(const PassageSampler& sampler, const MomentFunction& f, std::uint64_t n_samples, std::uint64_t cap,
                       std::uint64_t seed);

struct GrowthPoint {
  std::uint64_t m;
  double log_moment;  // log E f(U^(1) + ... + U^(m)), lower bound after pruning
  double rate;        // log_moment / m
};

/// Finite-m profile of (1/m) log E f(U^(1) + ... + U^(m)) for a sparse law.
/// Diagnostic only: it does not establish the limit as m -> inf.
std::vector<GrowthPoint> compound_growth_curve(const PassageLaw& u, const MomentFunction& f, std::uint64_t m_max,
                                               const ConvolveOptions& options = {});

}  // namespace recur
