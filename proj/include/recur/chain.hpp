#pragma once

// Finite Markov kernels, the two parametric chain families used by the
// counterexample constructions, stationary distributions and trajectory
// sampling.

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "recur/atomic_dist.hpp"
#include "recur/rng.hpp"

namespace recur {

using StateIndex = std::size_t;

struct Transition {
  StateIndex target;
  double prob;
};

/// Sparse row-stochastic matrix over named states. Construction only checks
/// shape; use validate_kernel() for the stochastic/irreducibility invariants.
/// Immutable once built.
class TransitionKernel {
 public:
  TransitionKernel() = default;
  TransitionKernel(std::vector<std::string> states, std::vector<std::vector<Transition>> rows);

  std::size_t size() const { return states_.size(); }
  const std::vector<std::string>& states() const { return states_; }
  const std::string& name(StateIndex k) const { return states_.at(k); }
  const std::vector<Transition>& row(StateIndex k) const { return rows_.at(k); }
  std::size_t nnz() const;

  std::optional<StateIndex> find(std::string_view name) const;
  /// Throws InvalidArgument for an unknown name.
  StateIndex index_of(std::string_view name) const;
  /// Dense lookup p_{from,to}; 0 when absent.
  double prob(StateIndex from, StateIndex to) const;

 private:
  std::vector<std::string> states_;
  std::vector<std::vector<Transition>> rows_;
};

struct ValidationReport {
  std::vector<std::string> violations;
  bool irreducible = false;

  bool ok() const { return violations.empty(); }
};

/// Reports every violated invariant; empty iff the kernel is a valid
/// irreducible stochastic matrix.
ValidationReport validate_kernel(const TransitionKernel& kernel);

/// Throws InvalidArgument naming the first violated invariant.
void require_valid(const TransitionKernel& kernel);

/// States {0,1}: p_00 = 1-p, p_01 = p, p_10 = 1.
TransitionKernel build_two_state(double p);

/// Hub state "1", exit state "0" and deterministic petal loops. From the hub
/// the chain moves to 0 with probability p and otherwise enters a left petal
/// of length x (prob (1-p)/2 P(U1 = x)) or a right petal of length y. Each
/// of U1, U2 keeps its `max_petals` most likely atoms, renormalized. An atom
/// of value 1 is a self-loop at the hub. Interior states are named
/// "L:n:m" / "R:n:m" (n = 1-based atom rank in increasing order).
TransitionKernel build_petal_chain(const AtomicDist& u1, const AtomicDist& u2, double p, std::size_t max_petals);

/// Keeps the `max_atoms` atoms of largest mass (ties: smaller atom first)
/// and renormalizes them to a complete distribution.
AtomicDist truncate_to_largest(const AtomicDist& dist, std::size_t max_atoms);

/// Solves pi P = pi, sum(pi) = 1. Throws BudgetExhausted if the L1 residual
/// cannot be brought below `tol`.
std::vector<double> stationary_distribution(const TransitionKernel& kernel, double tol = 1e-12);

struct TwoStateParams {
  double p;
};

struct PetalParams {
  AtomicDist u1;
  AtomicDist u2;
  double p;
};

/// Two-state chain or petal chain, kept symbolic so the petal support may
/// be arbitrarily spread out. States are "0" and "1" in both cases.
class ParametricChain {
 public:
  static ParametricChain two_state(double p);
  static ParametricChain petal(AtomicDist u1, AtomicDist u2, double p);

  const std::variant<TwoStateParams, PetalParams>& params() const { return params_; }

 private:
  explicit ParametricChain(std::variant<TwoStateParams, PetalParams> params) : params_(std::move(params)) {}
  std::variant<TwoStateParams, PetalParams> params_;
};

struct TrajectorySample {
  std::optional<std::uint64_t> passage_time;  // nullopt when censored
  std::uint64_t cap = 0;
  std::uint64_t steps_used = 0;  // simulation steps; macro-steps for petal chains

  bool censored() const { return !passage_time.has_value(); }
};

/// Step-by-step sampler over a kernel with precomputed cumulative rows.
class KernelSampler {
 public:
  explicit KernelSampler(const TransitionKernel& kernel);

  /// Hitting time of `to` from `from` (first return when equal), censored at cap.
  TrajectorySample sample(StateIndex from, StateIndex to, std::uint64_t cap, Rng& rng) const;
  StateIndex step(StateIndex from, Rng& rng) const;

 private:
  std::vector<std::vector<double>> cumulative_;
  std::vector<std::vector<StateIndex>> targets_;
};

/// Sampler for parametric chains; a petal traversal is one macro-step whose
/// length is drawn from U1 or U2.
class ParametricSampler {
 public:
  explicit ParametricSampler(const ParametricChain& chain);

  /// `from`, `to` in {0, 1}.
  TrajectorySample sample(StateIndex from, StateIndex to, std::uint64_t cap, Rng& rng) const;

 private:
  struct Drawer {
    std::vector<std::uint64_t> atoms;
    std::vector<double> cumulative;
    std::uint64_t draw(Rng& rng) const;
  };
  double p_ = 0.0;
  bool petal_ = false;
  Drawer left_, right_;
};

TrajectorySample sample_passage(const TransitionKernel& kernel, StateIndex from, StateIndex to, std::uint64_t cap,
                                std::uint64_t seed);
TrajectorySample sample_passage(const ParametricChain& chain, StateIndex from, StateIndex to, std::uint64_t cap,
                                std::uint64_t seed);

}  // namespace recur
