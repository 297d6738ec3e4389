#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "recur/logmath.hpp"

namespace recur {

/// Distribution on the positive integers with finitely many atoms, stored
/// in log space. Mass not assigned to any atom is carried in `log_tail`.
class AtomicDist {
 public:
  AtomicDist() = default;

  /// Validating constructor: atoms strictly increasing and >= 1, total mass
  /// (atoms + tail) equal to 1 within 1e-10.
  AtomicDist(std::vector<std::uint64_t> atoms, std::vector<double> log_probs,
             double log_tail = kNegInf);

  /// From linear-space probabilities; the vector must sum to 1 within 1e-10.
  static AtomicDist from_probs(std::vector<std::uint64_t> atoms, std::span<const double> probs);
  static AtomicDist point_mass(std::uint64_t value);

  const std::vector<std::uint64_t>& atoms() const { return atoms_; }
  const std::vector<double>& log_probs() const { return log_probs_; }
  double log_tail() const { return log_tail_; }
  std::size_t size() const { return atoms_.size(); }
  bool empty() const { return atoms_.empty(); }

  /// log P(X = n); -inf off the support.
  double log_prob(std::uint64_t n) const;
  /// log of the mass carried by the atoms.
  double log_atom_mass() const { return logsumexp(log_probs_); }
  std::uint64_t max_atom() const { return atoms_.empty() ? 0 : atoms_.back(); }

 private:
  std::vector<std::uint64_t> atoms_;
  std::vector<double> log_probs_;
  double log_tail_ = kNegInf;
};

}  // namespace recur
