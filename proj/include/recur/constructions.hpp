#pragma once

// Counterexample constructions: the heavy-tailed pair (U1, U2) with finite
// marginal f-moments but a diverging f-moment of the sum, the petal chain
// built from it, and the two-state chain for exponentially growing f.

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "recur/atomic_dist.hpp"
#include "recur/momentfn.hpp"
#include "recur/moments.hpp"
#include "recur/passage.hpp"

namespace recur {

struct HeavyTailWitness {
  std::uint64_t k;
  std::uint64_t x;
  std::uint64_t y;
  double log_ratio;                           // log f(x+y) - log f(x) - log f(y)
  std::optional<std::int64_t> exact_log_ratio;  // integer form for burst functions
  std::uint64_t burst_index = 0;              // 0 unless taken from a burst
};

struct WitnessBudget {
  /// Generic search: coordinates scanned up to this value for each k.
  std::uint64_t max_coordinate = 1024;
};

/// For k = 1..k_max, pairs (x_k, y_k), strictly increasing in k, with
/// log f(x_k + y_k) - log f(x_k) - log f(y_k) > 6 ln k. Burst functions use
/// the flat-region midpoints of successive bursts; other kinds are searched
/// on a grid. Throws BudgetExhausted when no pair exists within budget.
std::vector<HeavyTailWitness> witness_search(const MomentFunction& f, std::uint64_t k_max,
                                             const WitnessBudget& budget = {});

/// The atoms' log-probabilities are of order -log f(x_k) and carry its
/// rounding; the f-weighted masses log(f(x_k) P(U1 = x_k)) = log c1 - 2 ln k
/// are kept separately so moment sums never cancel huge logs.
struct HeavyTailPair {
  AtomicDist u1;  // P(U1 = x_k) = c1 / (f(x_k) k^2)
  AtomicDist u2;  // P(U2 = y_k) = c2 / (f(y_k) k^2)
  std::vector<HeavyTailWitness> witnesses;
  double c1_log = 0.0;
  double c2_log = 0.0;
  std::vector<double> log_weighted_u1;  // log c1 - 2 ln k
  std::vector<double> log_weighted_u2;  // log c2 - 2 ln k
};

/// Throws PreconditionError with fewer than two witnesses.
HeavyTailPair heavy_tail_pair(const MomentFunction& f, std::span<const HeavyTailWitness> witnesses);

/// log E f(U) for a complete atomic law.
double log_f_moment(const AtomicDist& u, const MomentFunction& f);

/// log E f(U1) and log E f(U2) from the exact f-weighted masses.
double log_f_moment_u1(const HeavyTailPair& pair);
double log_f_moment_u2(const HeavyTailPair& pair);
/// log of f(x_k + y_k) p_k q_k, the diagonal terms of E f(U1 + U2),
/// computed as the witness log-ratio plus the f-weighted masses.
std::vector<double> diagonal_lower_bound_terms(const HeavyTailPair& pair, const MomentFunction& f);

/// Law of T_11 on the petal chain: p δ_2 + (1-p)/2 law(U1) + (1-p)/2 law(U2).
PassageLaw petal_return_law(const AtomicDist& u1, const AtomicDist& u2, double p);

/// Law of T_00 on the petal chain, 2 + U^(1) + ... + U^(M) with U the return
/// law given the hub does not exit and P(M = m) = (1-p)^m p.
PassageLaw petal_exit_return_law(const AtomicDist& u1, const AtomicDist& u2, double p, const CompoundBudget& budget);

struct DemoReport {
  std::string name;
  std::vector<std::pair<std::string, double>> parameters;
  MomentEstimate finite_side;
  SeriesVerdict infinite_side;
  /// Extra scalar diagnostics (bounds, cross-checks), in insertion order.
  std::vector<std::pair<std::string, double>> diagnostics;
  std::vector<HeavyTailWitness> witnesses;
  bool success = false;
};

struct SharpDemoOptions {
  std::optional<double> log_threshold;  // default: log f(1) + log 10^6
  WitnessBudget budget;
};

/// Petal chain from the heavy-tailed pair. Finite side: E f(T_11) from the
/// three-way conditioning identity (exact, finite support). Infinite side:
/// the "first left, then right" lower bound
///   E f(T_00) >= Σ_k p ((1-p)/2)^2 f(x_k + y_k) p_k q_k.
DemoReport demo_sharp(const MomentFunction& f, double p, std::uint64_t k_max, const SharpDemoOptions& options = {});

/// Two-state chain with p_01 = p, p_10 = 1 and f(n) = e^{delta n}. Finite
/// side E f(T_00) = (1-p) f(1) + p f(2); infinite side Σ_k f(k) p (1-p)^{k-2}.
/// Throws PreconditionError unless e^delta (1-p) > 1.
DemoReport demo_exponential(double delta, double p, std::optional<double> log_threshold = {},
                            std::uint64_t max_terms = 10'000'000);

}  // namespace recur
