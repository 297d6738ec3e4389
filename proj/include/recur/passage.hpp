#pragma once

// Exact passage-time laws (T_ij, T_ii, U_ij, V_ij) by taboo propagation,
// plus the convolution / geometric-compound / mixture calculus on laws and a
// stochastic-order check.

#include <cstdint>
#include <optional>
#include <span>
#include <variant>
#include <vector>

#include "recur/atomic_dist.hpp"
#include "recur/chain.hpp"

namespace recur {

/// Certifies P(T > n+period) / P(T > n) <= rho < 1 for every n >= n0.
/// period > 1 covers passage times whose taboo dynamics are periodic, where
/// the one-step ratio oscillates forever.
struct TailCertificate {
  std::uint64_t n0 = 0;
  double rho = 0.0;
  std::uint64_t period = 1;
};

/// Law of a positive integer-valued passage time. Dense laws hold
/// log P(T = n) for n = 1..horizon; sparse laws hold an AtomicDist. Either
/// way the mass beyond what is represented sits in the tail.
class PassageLaw {
 public:
  static PassageLaw dense(std::vector<double> log_pmf, double log_tail, std::optional<TailCertificate> cert = {});
  static PassageLaw sparse(AtomicDist dist, std::optional<TailCertificate> cert = {});
  /// Point mass at `value`, dense over 1..horizon (tail 1 if value > horizon).
  static PassageLaw dense_point(std::uint64_t value, std::uint64_t horizon);

  bool is_dense() const { return std::holds_alternative<std::vector<double>>(repr_); }
  /// Dense: number of represented points. Sparse: largest atom.
  std::uint64_t horizon() const;
  const std::vector<double>& log_pmf() const { return std::get<std::vector<double>>(repr_); }
  const AtomicDist& atoms() const { return std::get<AtomicDist>(repr_); }

  double log_prob(std::uint64_t n) const;
  double log_tail_mass() const { return log_tail_; }
  const std::optional<TailCertificate>& tail_cert() const { return cert_; }

  /// log P(T > n), including the unrepresented tail.
  double log_survival(std::uint64_t n) const;
  /// log of represented mass plus tail; 0 for a proper law.
  double log_total_mass() const;
  /// Σ n P(T = n) over the represented support.
  double partial_mean() const;

  /// Calls f(n, log P(T = n)) for each represented point with positive mass.
  template <class F>
  void for_each(F&& f) const {
    if (is_dense()) {
      const auto& v = log_pmf();
      for (std::size_t k = 0; k < v.size(); ++k)
        if (v[k] != kNegInf) f(static_cast<std::uint64_t>(k + 1), v[k]);
    } else {
      const auto& d = atoms();
      for (std::size_t k = 0; k < d.size(); ++k) f(d.atoms()[k], d.log_probs()[k]);
    }
  }

 private:
  PassageLaw(std::variant<std::vector<double>, AtomicDist> repr, double log_tail, std::optional<TailCertificate> cert);

  std::variant<std::vector<double>, AtomicDist> repr_;
  double log_tail_ = kNegInf;
  std::optional<TailCertificate> cert_;
};

/// Derives a tail certificate from log P(T > n), n = 1..H (index n-1): once
/// the ratio P(T>n+d)/P(T>n) varies by less than 1e-6 over 20 consecutive
/// steps, rho is the largest ratio seen from there on plus 1e-6 and n0 is the
/// window start. Periods d = 1..8 are tried in order. nullopt if no ratio
/// settles, or rho >= 1.
std::optional<TailCertificate> certify_tail(std::span<const double> log_survival);

/// Law of the first passage time from i to j (first return when i == j).
PassageLaw first_passage_law(const TransitionKernel& kernel, StateIndex i, StateIndex j, std::uint64_t horizon);

/// Probability that the chain started in i reaches j before returning to i.
double hit_before_return_prob(const TransitionKernel& kernel, StateIndex i, StateIndex j);

/// Law of U_ij: return time to i conditioned on not visiting j before the
/// return. Throws NoSuchPath if every return to i passes through j.
PassageLaw conditioned_return_law(const TransitionKernel& kernel, StateIndex i, StateIndex j, std::uint64_t horizon);

/// Law of V_ij: hitting time of j from i conditioned on not returning to i first.
PassageLaw conditioned_hit_law(const TransitionKernel& kernel, StateIndex i, StateIndex j, std::uint64_t horizon);

/// Law of T_ii restricted to paths that visit j before returning,
/// renormalized. Computed by tracking a visited-j flag along paths.
PassageLaw crossing_return_law(const TransitionKernel& kernel, StateIndex i, StateIndex j, std::uint64_t horizon);

struct ConvolveOptions {
  /// Sparse atoms whose log-mass falls below this are moved to the tail.
  double log_mass_floor = -745.0;
  /// Sparse atoms above this value are moved to the tail.
  std::optional<std::uint64_t> max_value;
};

/// Law of the sum of independent variables with laws a and b. Both dense
/// (result horizon = the smaller horizon) or both sparse.
PassageLaw convolve(const PassageLaw& a, const PassageLaw& b, const ConvolveOptions& options = {});
AtomicDist convolve(const AtomicDist& a, const AtomicDist& b, const ConvolveOptions& options = {});

struct CompoundBudget {
  /// Sparse only: largest number M of summands expanded explicitly.
  std::uint64_t max_terms = 100000;
  /// Sparse only: stop when P(M > m) drops below this log-mass.
  double log_mass_floor = -745.0;
  /// Sparse only: atoms above this value are folded into the tail.
  std::optional<std::uint64_t> max_value;
};

/// Law of U^(1) + ... + U^(M) + V with P(M = m) = (1 - pi)^m pi, m >= 0.
/// pi == 1 returns v unchanged. Dense laws are exact on the common horizon;
/// sparse laws expand the series term by term with the budget above, every
/// truncated mass going to the tail.
PassageLaw geometric_compound(const PassageLaw& u, const PassageLaw& v, double pi, const CompoundBudget& budget = {});

/// Weighted mixture; weights must sum to 1 within 1e-12.
PassageLaw mixture(std::span<const PassageLaw> laws, std::span<const double> weights);

/// Dense restriction of a law to 1..horizon.
PassageLaw to_dense(const PassageLaw& law, std::uint64_t horizon);

struct DominationReport {
  bool dominates = false;
  double max_cdf_violation = 0.0;
};

/// a dominates b stochastically iff CDF_a(n) <= CDF_b(n) + tol at every
/// represented point.
DominationReport stochastic_dominates(const PassageLaw& a, const PassageLaw& b, double tol);

}  // namespace recur
