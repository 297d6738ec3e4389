#include "recur/chain.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "recur/error.hpp"

namespace recur {

namespace {

void check_open_unit(double p, const char* what) {
  if (!(p > 0.0 && p < 1.0)) {
    std::ostringstream os;
    os << what << ": p must lie in (0,1), got " << p;
    throw InvalidArgument(os.str());
  }
}

std::vector<bool> reachable(const std::vector<std::vector<StateIndex>>& adj, StateIndex start) {
  std::vector<bool> seen(adj.size(), false);
  std::vector<StateIndex> stack{start};
  seen[start] = true;
  while (!stack.empty()) {
    StateIndex k = stack.back();
    stack.pop_back();
    for (StateIndex l : adj[k]) {
      if (!seen[l]) {
        seen[l] = true;
        stack.push_back(l);
      }
    }
  }
  return seen;
}

}  // namespace

TransitionKernel::TransitionKernel(std::vector<std::string> states, std::vector<std::vector<Transition>> rows)
    : states_(std::move(states)), rows_(std::move(rows)) {
  if (states_.size() != rows_.size()) throw InvalidArgument("kernel: number of rows differs from number of states");
}

std::size_t TransitionKernel::nnz() const {
  std::size_t n = 0;
  for (const auto& r : rows_) n += r.size();
  return n;
}

std::optional<StateIndex> TransitionKernel::find(std::string_view name) const {
  auto it = std::find(states_.begin(), states_.end(), name);
  if (it == states_.end()) return std::nullopt;
  return static_cast<StateIndex>(it - states_.begin());
}

StateIndex TransitionKernel::index_of(std::string_view name) const {
  if (auto k = find(name)) return *k;
  throw InvalidArgument("unknown state '" + std::string(name) + "'");
}

double TransitionKernel::prob(StateIndex from, StateIndex to) const {
  double s = 0.0;
  for (const auto& t : rows_.at(from))
    if (t.target == to) s += t.prob;
  return s;
}

ValidationReport validate_kernel(const TransitionKernel& kernel) {
  ValidationReport report;
  const std::size_t n = kernel.size();
  if (n == 0) {
    report.violations.emplace_back("kernel has no states");
    return report;
  }
  std::vector<std::vector<StateIndex>> fwd(n), bwd(n);
  bool targets_ok = true;
  for (StateIndex k = 0; k < n; ++k) {
    const auto& row = kernel.row(k);
    double sum = 0.0;
    std::vector<StateIndex> seen;
    for (const auto& t : row) {
      if (t.target >= n) {
        report.violations.push_back("state '" + kernel.name(k) + "': target index " + std::to_string(t.target) +
                                    " out of range");
        targets_ok = false;
        continue;
      }
      if (!(t.prob > 0.0 && t.prob <= 1.0)) {
        std::ostringstream os;
        os << "state '" << kernel.name(k) << "': probability " << t.prob << " to '" << kernel.name(t.target)
           << "' outside (0,1]";
        report.violations.push_back(os.str());
      }
      if (std::find(seen.begin(), seen.end(), t.target) != seen.end())
        report.violations.push_back("state '" + kernel.name(k) + "': duplicate target '" + kernel.name(t.target) + "'");
      seen.push_back(t.target);
      sum += t.prob;
      fwd[k].push_back(t.target);
      bwd[t.target].push_back(k);
    }
    if (std::abs(sum - 1.0) > 1e-12) {
      std::ostringstream os;
      os.precision(17);
      os << "state '" << kernel.name(k) << "': row sum " << sum << " differs from 1";
      report.violations.push_back(os.str());
    }
  }
  if (targets_ok) {
    auto f = reachable(fwd, 0);
    auto b = reachable(bwd, 0);
    report.irreducible = std::all_of(f.begin(), f.end(), [](bool x) { return x; }) &&
                         std::all_of(b.begin(), b.end(), [](bool x) { return x; });
  }
  if (!report.irreducible) report.violations.emplace_back("kernel is not irreducible");
  return report;
}

void require_valid(const TransitionKernel& kernel) {
  auto report = validate_kernel(kernel);
  if (!report.ok()) throw InvalidArgument("invalid kernel: " + report.violations.front());
}

TransitionKernel build_two_state(double p) {
  check_open_unit(p, "two-state chain");
  return TransitionKernel({"0", "1"}, {{{0, 1.0 - p}, {1, p}}, {{0, 1.0}}});
}

AtomicDist truncate_to_largest(const AtomicDist& dist, std::size_t max_atoms) {
  if (dist.empty()) throw InvalidArgument("petal distribution has empty support");
  if (max_atoms == 0) throw InvalidArgument("max_petals must be positive");
  std::vector<std::size_t> order(dist.size());
  std::iota(order.begin(), order.end(), 0);
  const auto& lp = dist.log_probs();
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return lp[a] > lp[b]; });
  order.resize(std::min(max_atoms, order.size()));
  std::sort(order.begin(), order.end());
  std::vector<std::uint64_t> atoms;
  std::vector<double> kept;
  for (std::size_t k : order) {
    atoms.push_back(dist.atoms()[k]);
    kept.push_back(lp[k]);
  }
  const double norm = logsumexp(kept);
  for (double& v : kept) v -= norm;
  return AtomicDist(std::move(atoms), std::move(kept));
}

TransitionKernel build_petal_chain(const AtomicDist& u1, const AtomicDist& u2, double p, std::size_t max_petals) {
  check_open_unit(p, "petal chain");
  const AtomicDist left = truncate_to_largest(u1, max_petals);
  const AtomicDist right = truncate_to_largest(u2, max_petals);

  std::vector<std::string> states{"0", "1"};
  std::vector<std::vector<Transition>> rows{{{1, 1.0}}, {{0, p}}};
  const double side = (1.0 - p) / 2.0;
  double self_loop = 0.0;

  auto add_petals = [&](const AtomicDist& d, char tag) {
    for (std::size_t n = 0; n < d.size(); ++n) {
      const std::uint64_t len = d.atoms()[n];
      const double mass = side * std::exp(d.log_probs()[n]);
      if (len == 1) {
        self_loop += mass;
        continue;
      }
      const StateIndex first = states.size();
      for (std::uint64_t m = 1; m < len; ++m) {
        states.push_back(std::string(1, tag) + ":" + std::to_string(n + 1) + ":" + std::to_string(m));
        const StateIndex next = (m + 1 < len) ? states.size() : StateIndex{1};
        rows.push_back({{next, 1.0}});
      }
      rows[1].push_back({first, mass});
    }
  };
  add_petals(left, 'L');
  add_petals(right, 'R');
  if (self_loop > 0.0) rows[1].push_back({1, self_loop});
  return TransitionKernel(std::move(states), std::move(rows));
}

std::vector<double> stationary_distribution(const TransitionKernel& kernel, double tol) {
  require_valid(kernel);
  const auto n = static_cast<Eigen::Index>(kernel.size());
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index k = 0; k < n; ++k)
    for (const auto& t : kernel.row(static_cast<StateIndex>(k))) a(static_cast<Eigen::Index>(t.target), k) += t.prob;
  a -= Eigen::MatrixXd::Identity(n, n);
  a.row(n - 1).setOnes();
  Eigen::VectorXd b = Eigen::VectorXd::Zero(n);
  b(n - 1) = 1.0;
  Eigen::FullPivLU<Eigen::MatrixXd> lu(a);
  Eigen::VectorXd pi = lu.solve(b);

  auto residual = [&](const Eigen::VectorXd& v) {
    Eigen::VectorXd next = Eigen::VectorXd::Zero(n);
    for (Eigen::Index k = 0; k < n; ++k)
      for (const auto& t : kernel.row(static_cast<StateIndex>(k))) next(static_cast<Eigen::Index>(t.target)) += v(k) * t.prob;
    return (next - v).lpNorm<1>() + std::abs(v.sum() - 1.0);
  };
  // Iterative refinement.
  for (int iter = 0; iter < 5 && residual(pi) >= tol; ++iter) pi += lu.solve(b - a * pi);
  if (!(residual(pi) < tol)) throw BudgetExhausted("stationary distribution: residual above tolerance");
  return {pi.data(), pi.data() + n};
}

ParametricChain ParametricChain::two_state(double p) {
  check_open_unit(p, "two-state chain");
  return ParametricChain(TwoStateParams{p});
}

ParametricChain ParametricChain::petal(AtomicDist u1, AtomicDist u2, double p) {
  check_open_unit(p, "petal chain");
  if (u1.empty() || u2.empty()) throw InvalidArgument("petal distribution has empty support");
  if (u1.log_tail() != kNegInf || u2.log_tail() != kNegInf)
    throw InvalidArgument("parametric petal chain needs complete petal distributions");
  return ParametricChain(PetalParams{std::move(u1), std::move(u2), p});
}

KernelSampler::KernelSampler(const TransitionKernel& kernel) {
  require_valid(kernel);
  cumulative_.resize(kernel.size());
  targets_.resize(kernel.size());
  for (StateIndex k = 0; k < kernel.size(); ++k) {
    double c = 0.0;
    for (const auto& t : kernel.row(k)) {
      c += t.prob;
      cumulative_[k].push_back(c);
      targets_[k].push_back(t.target);
    }
    cumulative_[k].back() = 1.0;
  }
}

StateIndex KernelSampler::step(StateIndex from, Rng& rng) const {
  const auto& c = cumulative_[from];
  const double u = rng.uniform();
  auto it = std::upper_bound(c.begin(), c.end(), u);
  if (it == c.end()) --it;
  return targets_[from][static_cast<std::size_t>(it - c.begin())];
}

TrajectorySample KernelSampler::sample(StateIndex from, StateIndex to, std::uint64_t cap, Rng& rng) const {
  if (from >= cumulative_.size() || to >= cumulative_.size()) throw InvalidArgument("sample_passage: invalid state");
  if (cap < 1) throw InvalidArgument("sample_passage: cap must be >= 1");
  TrajectorySample s;
  s.cap = cap;
  StateIndex x = from;
  for (std::uint64_t t = 1; t <= cap; ++t) {
    x = step(x, rng);
    s.steps_used = t;
    if (x == to) {
      s.passage_time = t;
      return s;
    }
  }
  return s;
}

std::uint64_t ParametricSampler::Drawer::draw(Rng& rng) const {
  const double u = rng.uniform();
  auto it = std::upper_bound(cumulative.begin(), cumulative.end(), u);
  if (it == cumulative.end()) --it;
  return atoms[static_cast<std::size_t>(it - cumulative.begin())];
}

ParametricSampler::ParametricSampler(const ParametricChain& chain) {
  auto make_drawer = [](const AtomicDist& d) {
    Drawer dr;
    dr.atoms = d.atoms();
    const double norm = d.log_atom_mass();
    double c = 0.0;
    for (double lp : d.log_probs()) {
      c += std::exp(lp - norm);
      dr.cumulative.push_back(c);
    }
    dr.cumulative.back() = 1.0;
    return dr;
  };
  if (const auto* ts = std::get_if<TwoStateParams>(&chain.params())) {
    p_ = ts->p;
  } else {
    const auto& pp = std::get<PetalParams>(chain.params());
    p_ = pp.p;
    petal_ = true;
    left_ = make_drawer(pp.u1);
    right_ = make_drawer(pp.u2);
  }
}

TrajectorySample ParametricSampler::sample(StateIndex from, StateIndex to, std::uint64_t cap, Rng& rng) const {
  if (from > 1 || to > 1) throw InvalidArgument("sample_passage: parametric chains expose states 0 and 1 only");
  if (cap < 1) throw InvalidArgument("sample_passage: cap must be >= 1");
  TrajectorySample s;
  s.cap = cap;
  StateIndex x = from;
  std::uint64_t t = 0;
  while (true) {
    std::uint64_t dt = 1;
    StateIndex next = 1;
    if (!petal_) {
      // Two-state: 0 -> 1 w.p. p, 0 -> 0 otherwise; 1 -> 0 always.
      next = (x == 0) ? (rng.uniform() < p_ ? 1 : 0) : 0;
    } else if (x == 0) {
      next = 1;
    } else {
      const double u = rng.uniform();
      if (u < p_) {
        next = 0;
      } else {
        dt = (u < p_ + (1.0 - p_) / 2.0) ? left_.draw(rng) : right_.draw(rng);
        next = 1;
      }
    }
    if (dt > cap - t) return s;
    t += dt;
    ++s.steps_used;
    x = next;
    if (x == to) {
      s.passage_time = t;
      return s;
    }
    if (t == cap) return s;
  }
}

TrajectorySample sample_passage(const TransitionKernel& kernel, StateIndex from, StateIndex to, std::uint64_t cap,
                                std::uint64_t seed) {
  Rng rng(seed);
  return KernelSampler(kernel).sample(from, to, cap, rng);
}

TrajectorySample sample_passage(const ParametricChain& chain, StateIndex from, StateIndex to, std::uint64_t cap,
                                std::uint64_t seed) {
  Rng rng(seed);
  return ParametricSampler(chain).sample(from, to, cap, rng);
}

}  // namespace recur
