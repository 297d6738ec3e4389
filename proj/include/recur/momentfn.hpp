#pragma once

// Candidate moment functions f: N -> (0, inf), evaluated as log f(n), and the
// two executable checks behind the characterization: submultiplicativity
// (f(x+y) <= K f(x) f(y)) and subexponential growth (limsup log f(n)/n = 0).

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace recur {

/// Burst starts s_i and lengths u_i, i >= 1. Generators may be infinite
/// (`last_index` empty) or a finite prefix read from a file.
struct BurstSchedule {
  std::function<std::uint64_t(std::uint64_t)> s;
  std::function<std::uint64_t(std::uint64_t)> u;
  std::optional<std::uint64_t> last_index;
  std::string label;
};

/// s_i = i^2 2^i, u_i = i 2^i. Burst ends are even, the witness midpoints
/// (s_i + u_i)/2 = 2^(i-1) i (i+1) sit in the flat stretch before burst i,
/// the excess u_i - Σ_{k<i} u_k = 2^(i+1) - 2 grows without bound and the
/// peak ratio g(n)/n at burst ends falls toward 0.
BurstSchedule default_burst_schedule();

/// CSV rows `i,s_i,u_i` (i = 1, 2, ... consecutive); a non-numeric first
/// line is treated as a header.
BurstSchedule read_burst_schedule(std::istream& in, std::string label);
BurstSchedule read_burst_schedule_file(const std::string& path);

enum class MomentKind { Power, LogPower, Exponential, Burst, Custom };

/// One burst of a Burst-kind function: g rises with slope 1 on
/// [start, start + length] and stays flat until the next start.
struct Burst {
  std::uint64_t index;
  std::uint64_t start;
  std::uint64_t length;
  std::int64_t level_before;  // g(start)
  std::uint64_t end() const { return start + length; }
  std::int64_t level_after() const { return level_before + static_cast<std::int64_t>(length); }
};

namespace detail {
class BurstTable;
}

/// Non-decreasing, unbounded f represented through log f. Cheap to copy;
/// Burst kinds share a lazily extended, internally synchronized table.
class MomentFunction {
 public:
  static MomentFunction power(double p);
  static MomentFunction log_power(double q);
  static MomentFunction exponential(double delta);
  static MomentFunction burst(BurstSchedule schedule);
  /// Custom f without analytic certificates; `log_f` must be non-decreasing.
  static MomentFunction custom(std::string name, std::function<double(std::uint64_t)> log_f);

  /// log f(n), n >= 1.
  double log_eval(std::uint64_t n) const;
  /// log f(n) with the convention f(0) := 1/K for a submultiplicativity constant K.
  double log_eval_extended(std::uint64_t n, double log_k) const { return n == 0 ? -log_k : log_eval(n); }

  MomentKind kind() const { return kind_; }
  const std::string& name() const { return name_; }
  /// p, q or delta for the closed-form kinds; 0 otherwise.
  double parameter() const { return param_; }

  /// Exact integer g(n) = log f(n) for Burst kinds.
  std::optional<std::int64_t> exact_log(std::uint64_t n) const;
  /// Exact log f(x+y) - log f(x) - log f(y) for Burst kinds.
  std::optional<std::int64_t> exact_log_ratio(std::uint64_t x, std::uint64_t y) const;

  /// log of a bound gamma with f(n+1) <= gamma f(n) for every n >= from.
  /// The closed-form kinds have non-increasing step ratios, so the maximum
  /// over [from, from + window] extends to all n; Burst kinds have slope at
  /// most 1. Custom kinds return the window maximum only when
  /// `allow_unregistered` is set.
  std::optional<double> log_step_bound(std::uint64_t from, std::uint64_t window, bool allow_unregistered = false) const;

  /// log K of an analytic submultiplicativity certificate, when one is known:
  /// (x+y)^p <= 2^p x^p y^p for x, y >= 1 and
  /// ln(x+y+2)^q <= (2/ln 3)^q ln(x+2)^q ln(y+2)^q.
  std::optional<double> analytic_log_k() const;

  /// Burst kinds: bursts whose start is <= limit.
  std::vector<Burst> bursts_up_to(std::uint64_t limit) const;
  /// Burst with the given index (extending the schedule as needed).
  Burst burst_at(std::uint64_t index) const;
  /// Points where log f(n) changes slope or where submultiplicativity
  /// witnesses live (burst boundaries and midpoints), up to `limit`.
  std::vector<std::uint64_t> structural_points(std::uint64_t limit) const;

 private:
  MomentFunction(MomentKind kind, std::string name, double param) : kind_(kind), name_(std::move(name)), param_(param) {}

  MomentKind kind_;
  std::string name_;
  double param_ = 0.0;
  std::shared_ptr<detail::BurstTable> burst_;
  std::function<double(std::uint64_t)> custom_;
};

/// Parses `power:2`, `logpow:1`, `exp:0.1`, `burst:default`, `burst:file=<path>`.
MomentFunction parse_moment_function(std::string_view spec);

struct SubmultWitness {
  std::uint64_t x;
  std::uint64_t y;
  double log_ratio;  // log f(x+y) - log f(x) - log f(y)
};

struct SubmultReport {
  double log_grid_k = 0.0;  // max log-ratio on the grid
  double grid_k = 1.0;      // exp(log_grid_k); a lower bound on any valid K
  std::vector<SubmultWitness> witnesses;  // sorted by log_ratio, descending
};

/// Exact log-ratio for every (x, y) in xs × ys. Keeps the `max_witnesses`
/// largest ratios.
SubmultReport submult_scan(const MomentFunction& f, std::span<const std::uint64_t> xs,
                           std::span<const std::uint64_t> ys, std::size_t max_witnesses = 64);

/// 1..32, powers of two and their neighbours, and the structural points of
/// f, all capped at `extent`.
std::vector<std::uint64_t> default_scan_grid(const MomentFunction& f, std::uint64_t extent);

struct GrowthProfile {
  std::vector<std::pair<std::uint64_t, double>> points;  // (n, log f(n) / n)
  std::vector<std::uint64_t> checkpoints;
  std::vector<double> running_sup_tail;  // sup over sampled n >= checkpoint
};

/// Samples log f(n)/n on a log-spaced grid over [1, n_max] together with the
/// checkpoints and every structural peak of f.
GrowthProfile growth_profile(const MomentFunction& f, std::uint64_t n_max, std::span<const std::uint64_t> checkpoints);

enum class Verdict { SatisfiesC, ViolatesCi, ViolatesCii, Inconclusive };
std::string to_string(Verdict v);

struct ClassifyBudget {
  /// Submultiplicativity grids at extents 2^1 .. 2^max_dyadic_exponent.
  unsigned max_dyadic_exponent = 40;
  /// Number of strict increases of the grid maximum that count as unbounded.
  unsigned min_increases = 5;
  /// Growth checkpoints 10^2 .. 10^max_decade.
  unsigned max_decade = 12;
  /// Rates below this are treated as zero.
  double rate_floor = 1e-6;
  /// Relative spread of the last three running suprema regarded as settled.
  double rate_spread = 1e-3;
};

struct Classification {
  Verdict verdict = Verdict::Inconclusive;
  std::vector<SubmultWitness> witnesses;    // ViolatesCi
  std::optional<double> rate;               // ViolatesCii
  std::optional<double> log_k;              // SatisfiesC
  std::vector<double> scan_maxima;          // max log-ratio per dyadic extent
  GrowthProfile profile;
  std::string reason;
};

/// Never reports SatisfiesC from sampling alone: only kinds carrying an
/// analytic certificate can get it.
Classification classify(const MomentFunction& f, const ClassifyBudget& budget = {});

}  // namespace recur
