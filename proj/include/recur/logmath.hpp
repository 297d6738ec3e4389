#pragma once

// Log-space probability arithmetic.

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>

namespace recur {

inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();

/// log(exp(a) + exp(b)) without overflow or underflow.
inline double log_add(double a, double b) {
  if (a < b) std::swap(a, b);
  if (b == kNegInf) return a;
  return a + std::log1p(std::exp(b - a));
}

/// log(Σ exp(x_i)); -inf for an empty range.
inline double logsumexp(std::span<const double> xs) {
  double m = kNegInf;
  for (double x : xs) m = std::max(m, x);
  if (m == kNegInf || std::isinf(m)) return m;
  double s = 0.0;
  for (double x : xs) s += std::exp(x - m);
  return m + std::log(s);
}

/// log(1 - exp(a)) for a <= 0.
inline double log1mexp(double a) {
  if (a >= 0.0) return kNegInf;
  if (a > -0.6931471805599453) return std::log(-std::expm1(a));
  return std::log1p(-std::exp(a));
}

inline double safe_log(double x) { return x > 0.0 ? std::log(x) : kNegInf; }

/// Streaming logsumexp that rescales as the running maximum grows.
class LogAccumulator {
 public:
  void add(double x) {
    if (x == kNegInf) return;
    if (x <= max_) {
      sum_ += std::exp(x - max_);
    } else {
      sum_ = sum_ * std::exp(max_ - x) + 1.0;
      max_ = x;
    }
  }
  double value() const { return max_ == kNegInf ? kNegInf : max_ + std::log(sum_); }

 private:
  double max_ = kNegInf;
  double sum_ = 0.0;
};

}  // namespace recur
