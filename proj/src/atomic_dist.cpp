#include "recur/atomic_dist.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "recur/error.hpp"

namespace recur {

AtomicDist::AtomicDist(std::vector<std::uint64_t> atoms, std::vector<double> log_probs, double log_tail)
    : atoms_(std::move(atoms)), log_probs_(std::move(log_probs)), log_tail_(log_tail) {
  if (atoms_.size() != log_probs_.size()) throw InvalidArgument("AtomicDist: atoms and log_probs differ in length");
  for (std::size_t k = 0; k < atoms_.size(); ++k) {
    if (atoms_[k] < 1) throw InvalidArgument("AtomicDist: atoms must be >= 1");
    if (k > 0 && atoms_[k] <= atoms_[k - 1]) throw InvalidArgument("AtomicDist: atoms must be strictly increasing");
    if (std::isnan(log_probs_[k]) || log_probs_[k] > 1e-12)
      throw InvalidArgument("AtomicDist: log-probability out of range at atom " + std::to_string(atoms_[k]));
  }
  if (std::isnan(log_tail_) || log_tail_ > 1e-12) throw InvalidArgument("AtomicDist: tail log-mass out of range");
  const double total = log_add(log_atom_mass(), log_tail_);
  if (std::abs(total) > 1e-10) throw InvalidArgument("AtomicDist: total mass differs from 1 (log-mass " + std::to_string(total) + ")");
}

AtomicDist AtomicDist::from_probs(std::vector<std::uint64_t> atoms, std::span<const double> probs) {
  std::vector<double> lp(probs.size());
  std::transform(probs.begin(), probs.end(), lp.begin(), [](double p) {
    if (!(p > 0.0)) throw InvalidArgument("AtomicDist: atom probabilities must be positive");
    return std::log(p);
  });
  return AtomicDist(std::move(atoms), std::move(lp));
}

AtomicDist AtomicDist::point_mass(std::uint64_t value) { return AtomicDist({value}, {0.0}); }

double AtomicDist::log_prob(std::uint64_t n) const {
  auto it = std::lower_bound(atoms_.begin(), atoms_.end(), n);
  if (it == atoms_.end() || *it != n) return kNegInf;
  return log_probs_[static_cast<std::size_t>(it - atoms_.begin())];
}

}  // namespace recur
