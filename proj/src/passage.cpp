#include "recur/passage.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <string>

#include "recur/error.hpp"

namespace recur {

namespace {

constexpr double kMassTolerance = 1e-9;

void check_state(const TransitionKernel& kernel, StateIndex s) {
  if (s >= kernel.size()) throw InvalidArgument("state index " + std::to_string(s) + " out of range");
}

void check_horizon(std::uint64_t horizon) {
  if (horizon < 1) throw InvalidArgument("horizon must be >= 1");
}

// Sub-stochastic mass vector q = exp(log_scale) * v, rescaled to stay in range.
struct ScaledMass {
  std::vector<double> v;
  double log_scale = 0.0;

  void rescale() {
    const double m = *std::max_element(v.begin(), v.end());
    if (m > 0.0 && (m < 1e-150 || m > 1e150)) {
      for (double& x : v) x /= m;
      log_scale += std::log(m);
    }
  }
};

void push_forward(const TransitionKernel& kernel, const std::vector<double>& q, std::vector<double>& next) {
  std::fill(next.begin(), next.end(), 0.0);
  for (StateIndex k = 0; k < q.size(); ++k) {
    if (q[k] == 0.0) continue;
    for (const auto& t : kernel.row(k)) next[t.target] += q[k] * t.prob;
  }
}

struct Propagation {
  std::vector<double> log_absorbed;  // n = 1..H
  std::vector<double> log_survival;  // n = 1..H
};

// Taboo walk from `start`: mass arriving at l contributes absorb[l] to the
// absorbed mass of that step and is dropped if removed[l]; the surviving
// mass is weighted by weight[l].
Propagation propagate(const TransitionKernel& kernel, StateIndex start, const std::vector<double>& absorb,
                      const std::vector<char>& removed, const std::vector<double>& weight, std::uint64_t horizon) {
  const std::size_t n = kernel.size();
  ScaledMass q{std::vector<double>(n, 0.0)};
  q.v[start] = 1.0;
  std::vector<double> next(n);
  Propagation out;
  out.log_absorbed.reserve(horizon);
  out.log_survival.reserve(horizon);
  for (std::uint64_t step = 1; step <= horizon; ++step) {
    push_forward(kernel, q.v, next);
    double absorbed = 0.0;
    double survival = 0.0;
    for (std::size_t l = 0; l < n; ++l) {
      absorbed += next[l] * absorb[l];
      if (removed[l]) next[l] = 0.0;
      survival += next[l] * weight[l];
    }
    std::swap(q.v, next);
    out.log_absorbed.push_back(safe_log(absorbed) + q.log_scale);
    out.log_survival.push_back(safe_log(survival) + q.log_scale);
    q.rescale();
  }
  return out;
}

// h(k) = P(reach `target` before `other` | X_0 = k), with h(target) = 1,
// h(other) = 0.
std::vector<double> hitting_probabilities(const TransitionKernel& kernel, StateIndex target, StateIndex other) {
  const std::size_t n = kernel.size();
  std::vector<Eigen::Index> slot(n, -1);
  Eigen::Index m = 0;
  for (std::size_t k = 0; k < n; ++k)
    if (k != target && k != other) slot[k] = m++;
  std::vector<double> h(n, 0.0);
  h[target] = 1.0;
  if (m == 0) return h;
  Eigen::MatrixXd a = Eigen::MatrixXd::Identity(m, m);
  Eigen::VectorXd b = Eigen::VectorXd::Zero(m);
  for (std::size_t k = 0; k < n; ++k) {
    if (slot[k] < 0) continue;
    for (const auto& t : kernel.row(k)) {
      if (t.target == target) {
        b(slot[k]) += t.prob;
      } else if (slot[t.target] >= 0) {
        a(slot[k], slot[t.target]) -= t.prob;
      }
    }
  }
  Eigen::VectorXd x = a.partialPivLu().solve(b);
  for (std::size_t k = 0; k < n; ++k)
    if (slot[k] >= 0) h[k] = std::clamp(x(slot[k]), 0.0, 1.0);
  return h;
}

// Probability of reaching `target` before returning to `start`, from `start`.
double first_step_weight(const TransitionKernel& kernel, StateIndex start, const std::vector<double>& h) {
  double s = 0.0;
  for (const auto& t : kernel.row(start)) s += t.prob * h[t.target];
  return s;
}

// Is there a path i -> ... -> i of positive probability that avoids j?
bool has_avoiding_return(const TransitionKernel& kernel, StateIndex i, StateIndex j) {
  std::vector<bool> seen(kernel.size(), false);
  std::vector<StateIndex> stack;
  for (const auto& t : kernel.row(i)) {
    if (t.target == i) return true;
    if (t.target != j && !seen[t.target]) {
      seen[t.target] = true;
      stack.push_back(t.target);
    }
  }
  while (!stack.empty()) {
    StateIndex k = stack.back();
    stack.pop_back();
    for (const auto& t : kernel.row(k)) {
      if (t.target == i) return true;
      if (t.target != j && !seen[t.target]) {
        seen[t.target] = true;
        stack.push_back(t.target);
      }
    }
  }
  return false;
}

PassageLaw normalized_law(Propagation prop, double log_norm) {
  for (double& x : prop.log_absorbed) x -= log_norm;
  for (double& x : prop.log_survival) x -= log_norm;
  auto cert = certify_tail(prop.log_survival);
  const double tail = prop.log_survival.back();
  return PassageLaw::dense(std::move(prop.log_absorbed), tail, cert);
}

// log P(T > m) for m = 0..horizon of a dense law.
std::vector<double> survival_table(const PassageLaw& law) {
  const auto& p = law.log_pmf();
  std::vector<double> s(p.size() + 1);
  s[p.size()] = law.log_tail_mass();
  for (std::size_t m = p.size(); m-- > 0;) s[m] = log_add(s[m + 1], p[m]);
  return s;
}

void require_same_kind(const PassageLaw& a, const PassageLaw& b, const char* op) {
  if (a.is_dense() != b.is_dense())
    throw InvalidArgument(std::string(op) + ": dense and sparse laws cannot be combined; convert with to_dense");
}

AtomicDist atoms_from_map(const std::map<std::uint64_t, LogAccumulator>& acc, LogAccumulator tail, double floor) {
  std::vector<std::uint64_t> atoms;
  std::vector<double> lp;
  atoms.reserve(acc.size());
  lp.reserve(acc.size());
  for (const auto& [n, a] : acc) {
    const double v = a.value();
    if (v == kNegInf) continue;
    if (v < floor) {
      tail.add(v);
      continue;
    }
    atoms.push_back(n);
    lp.push_back(v);
  }
  return AtomicDist(std::move(atoms), std::move(lp), std::min(tail.value(), 0.0));
}

}  // namespace

PassageLaw::PassageLaw(std::variant<std::vector<double>, AtomicDist> repr, double log_tail,
                       std::optional<TailCertificate> cert)
    : repr_(std::move(repr)), log_tail_(log_tail), cert_(cert) {
  if (cert_ && !(cert_->rho > 0.0 && cert_->rho < 1.0)) throw InvalidArgument("tail certificate needs rho in (0,1)");
  if (cert_ && cert_->period < 1) throw InvalidArgument("tail certificate needs period >= 1");
  if (std::isnan(log_tail_) || log_tail_ > 1e-12) throw InvalidArgument("passage law: tail log-mass out of range");
  if (std::abs(log_total_mass()) > kMassTolerance)
    throw InvalidArgument("passage law: total mass differs from 1 (log-mass " + std::to_string(log_total_mass()) + ")");
}

PassageLaw PassageLaw::dense(std::vector<double> log_pmf, double log_tail, std::optional<TailCertificate> cert) {
  if (log_pmf.empty()) throw InvalidArgument("dense passage law needs horizon >= 1");
  for (double x : log_pmf)
    if (std::isnan(x) || x > 1e-12) throw InvalidArgument("dense passage law: log-probability out of range");
  return PassageLaw(std::move(log_pmf), log_tail, cert);
}

PassageLaw PassageLaw::sparse(AtomicDist dist, std::optional<TailCertificate> cert) {
  const double tail = dist.log_tail();
  return PassageLaw(std::move(dist), tail, cert);
}

PassageLaw PassageLaw::dense_point(std::uint64_t value, std::uint64_t horizon) {
  check_horizon(horizon);
  if (value < 1) throw InvalidArgument("passage times are >= 1");
  std::vector<double> p(horizon, kNegInf);
  if (value <= horizon) {
    p[value - 1] = 0.0;
    return dense(std::move(p), kNegInf);
  }
  return dense(std::move(p), 0.0);
}

std::uint64_t PassageLaw::horizon() const { return is_dense() ? log_pmf().size() : atoms().max_atom(); }

double PassageLaw::log_prob(std::uint64_t n) const {
  if (is_dense()) {
    const auto& p = log_pmf();
    return (n >= 1 && n <= p.size()) ? p[n - 1] : kNegInf;
  }
  return atoms().log_prob(n);
}

double PassageLaw::log_survival(std::uint64_t n) const {
  LogAccumulator acc;
  acc.add(log_tail_);
  for_each([&](std::uint64_t m, double lp) {
    if (m > n) acc.add(lp);
  });
  return acc.value();
}

double PassageLaw::log_total_mass() const {
  LogAccumulator acc;
  acc.add(log_tail_);
  for_each([&](std::uint64_t, double lp) { acc.add(lp); });
  return acc.value();
}

double PassageLaw::partial_mean() const {
  double s = 0.0;
  for_each([&](std::uint64_t n, double lp) { s += static_cast<double>(n) * std::exp(lp); });
  return s;
}

namespace {

std::optional<TailCertificate> certify_tail_period(std::span<const double> log_survival, std::size_t d) {
  constexpr std::size_t kWindow = 20;
  constexpr double kSpread = 1e-6;
  constexpr double kSlack = 1e-6;
  if (log_survival.size() < kWindow + d) return std::nullopt;
  // ratio[k] = P(T > k+1+d) / P(T > k+1), i.e. the ratio at n = k+1.
  std::vector<double> ratio(log_survival.size() - d);
  for (std::size_t k = 0; k + d < log_survival.size(); ++k) {
    const double a = log_survival[k], b = log_survival[k + d];
    ratio[k] = (a == kNegInf) ? std::nan("") : std::exp(b - a);
  }
  for (std::size_t start = 0; start + kWindow <= ratio.size(); ++start) {
    auto first = ratio.begin() + static_cast<std::ptrdiff_t>(start);
    auto last = first + kWindow;
    if (std::any_of(first, last, [](double r) { return !std::isfinite(r) || r <= 0.0; })) continue;
    auto [lo, hi] = std::minmax_element(first, last);
    if (*hi - *lo >= kSpread) continue;
    double rho = 0.0;
    for (auto it = first; it != ratio.end(); ++it) {
      if (!std::isfinite(*it)) return std::nullopt;
      rho = std::max(rho, *it);
    }
    rho += kSlack;
    if (!(rho < 1.0)) return std::nullopt;
    return TailCertificate{static_cast<std::uint64_t>(start + 1), rho, d};
  }
  return std::nullopt;
}

}  // namespace

std::optional<TailCertificate> certify_tail(std::span<const double> log_survival) {
  constexpr std::size_t kMaxPeriod = 8;
  for (std::size_t d = 1; d <= kMaxPeriod; ++d)
    if (auto c = certify_tail_period(log_survival, d)) return c;
  return std::nullopt;
}

PassageLaw first_passage_law(const TransitionKernel& kernel, StateIndex i, StateIndex j, std::uint64_t horizon) {
  check_state(kernel, i);
  check_state(kernel, j);
  check_horizon(horizon);
  require_valid(kernel);
  const std::size_t n = kernel.size();
  std::vector<double> absorb(n, 0.0), weight(n, 1.0);
  std::vector<char> removed(n, 0);
  absorb[j] = 1.0;
  removed[j] = 1;
  return normalized_law(propagate(kernel, i, absorb, removed, weight, horizon), 0.0);
}

double hit_before_return_prob(const TransitionKernel& kernel, StateIndex i, StateIndex j) {
  check_state(kernel, i);
  check_state(kernel, j);
  if (i == j) throw InvalidArgument("hit_before_return_prob needs distinct states");
  require_valid(kernel);
  if (!has_avoiding_return(kernel, i, j)) return 1.0;
  return std::min(first_step_weight(kernel, i, hitting_probabilities(kernel, j, i)), 1.0);
}

PassageLaw conditioned_return_law(const TransitionKernel& kernel, StateIndex i, StateIndex j, std::uint64_t horizon) {
  check_state(kernel, i);
  check_state(kernel, j);
  check_horizon(horizon);
  if (i == j) throw InvalidArgument("conditioned_return_law needs distinct states");
  require_valid(kernel);
  if (!has_avoiding_return(kernel, i, j))
    throw NoSuchPath("no return to '" + kernel.name(i) + "' avoiding '" + kernel.name(j) + "' has positive probability");
  const std::size_t n = kernel.size();
  // g(k) = P(reach i before j | X_0 = k); the survivors that come back without j.
  const auto g = hitting_probabilities(kernel, i, j);
  std::vector<double> absorb(n, 0.0);
  std::vector<char> removed(n, 0);
  absorb[i] = 1.0;
  removed[i] = removed[j] = 1;
  const double p_avoid = first_step_weight(kernel, i, g);
  if (!(p_avoid > 0.0)) throw NoSuchPath("return probability avoiding j is zero");
  return normalized_law(propagate(kernel, i, absorb, removed, g, horizon), std::log(p_avoid));
}

PassageLaw conditioned_hit_law(const TransitionKernel& kernel, StateIndex i, StateIndex j, std::uint64_t horizon) {
  check_state(kernel, i);
  check_state(kernel, j);
  check_horizon(horizon);
  if (i == j) throw InvalidArgument("conditioned_hit_law needs distinct states");
  require_valid(kernel);
  const std::size_t n = kernel.size();
  const auto h = hitting_probabilities(kernel, j, i);
  std::vector<double> absorb(n, 0.0);
  std::vector<char> removed(n, 0);
  absorb[j] = 1.0;
  removed[i] = removed[j] = 1;
  const double pi = first_step_weight(kernel, i, h);
  return normalized_law(propagate(kernel, i, absorb, removed, h, horizon), std::log(pi));
}

PassageLaw crossing_return_law(const TransitionKernel& kernel, StateIndex i, StateIndex j, std::uint64_t horizon) {
  check_state(kernel, i);
  check_state(kernel, j);
  check_horizon(horizon);
  if (i == j) throw InvalidArgument("crossing_return_law needs distinct states");
  require_valid(kernel);
  const std::size_t n = kernel.size();
  const auto h = hitting_probabilities(kernel, j, i);
  // fresh: has not visited j yet; crossed: has visited j. Shared scale.
  std::vector<double> fresh(n, 0.0), crossed(n, 0.0), nf(n), nc(n);
  double log_scale = 0.0;
  fresh[i] = 1.0;
  Propagation prop;
  for (std::uint64_t step = 1; step <= horizon; ++step) {
    push_forward(kernel, fresh, nf);
    push_forward(kernel, crossed, nc);
    const double absorbed = nc[i];
    nc[i] = 0.0;
    nf[i] = 0.0;  // returned without visiting j
    nc[j] += nf[j];
    nf[j] = 0.0;
    double survival = 0.0;
    for (std::size_t l = 0; l < n; ++l) survival += nc[l] + nf[l] * h[l];
    std::swap(fresh, nf);
    std::swap(crossed, nc);
    prop.log_absorbed.push_back(safe_log(absorbed) + log_scale);
    prop.log_survival.push_back(safe_log(survival) + log_scale);
    const double m = std::max(*std::max_element(fresh.begin(), fresh.end()),
                              *std::max_element(crossed.begin(), crossed.end()));
    if (m > 0.0 && m < 1e-150) {
      for (double& x : fresh) x /= m;
      for (double& x : crossed) x /= m;
      log_scale += std::log(m);
    }
  }
  const double pi = first_step_weight(kernel, i, h);
  return normalized_law(std::move(prop), std::log(pi));
}

AtomicDist convolve(const AtomicDist& a, const AtomicDist& b, const ConvolveOptions& options) {
  std::map<std::uint64_t, LogAccumulator> acc;
  LogAccumulator tail;
  // Mass in either input tail has no known position in the sum.
  tail.add(a.log_tail());
  tail.add(a.log_atom_mass() + b.log_tail());
  for (std::size_t x = 0; x < a.size(); ++x) {
    for (std::size_t y = 0; y < b.size(); ++y) {
      const std::uint64_t s = a.atoms()[x] + b.atoms()[y];
      if (s < a.atoms()[x]) throw InvalidArgument("convolve: atom sum overflows");
      const double lp = a.log_probs()[x] + b.log_probs()[y];
      if (options.max_value && s > *options.max_value) {
        tail.add(lp);
      } else {
        acc[s].add(lp);
      }
    }
  }
  return atoms_from_map(acc, tail, options.log_mass_floor);
}

PassageLaw convolve(const PassageLaw& a, const PassageLaw& b, const ConvolveOptions& options) {
  require_same_kind(a, b, "convolve");
  if (!a.is_dense()) return PassageLaw::sparse(convolve(a.atoms(), b.atoms(), options));
  const std::size_t h = std::min(a.log_pmf().size(), b.log_pmf().size());
  const auto& pa = a.log_pmf();
  const auto& pb = b.log_pmf();
  std::vector<double> out(h, kNegInf);
  for (std::size_t n = 2; n <= h; ++n) {
    LogAccumulator acc;
    for (std::size_t k = 1; k < n; ++k) acc.add(pa[k - 1] + pb[n - k - 1]);
    out[n - 1] = acc.value();
  }
  // P(A + B > h) = P(A > h) + Σ_{k <= h} P(A = k) P(B > h - k).
  const auto sa = survival_table(a);
  const auto sb = survival_table(b);
  LogAccumulator tail;
  tail.add(sa[h]);
  for (std::size_t k = 1; k <= h; ++k) tail.add(pa[k - 1] + sb[h - k]);
  return PassageLaw::dense(std::move(out), std::min(tail.value(), 0.0));
}

PassageLaw geometric_compound(const PassageLaw& u, const PassageLaw& v, double pi, const CompoundBudget& budget) {
  if (!(pi > 0.0 && pi <= 1.0)) throw InvalidArgument("geometric_compound: pi must lie in (0,1]");
  if (pi == 1.0) return v;
  require_same_kind(u, v, "geometric_compound");
  const double log_pi = std::log(pi);
  const double log_q = std::log1p(-pi);

  if (u.is_dense()) {
    // W = V w.p. pi, U + W' w.p. 1 - pi: a renewal recursion that sums the
    // series over M exactly on the horizon.
    const std::size_t h = std::min(u.log_pmf().size(), v.log_pmf().size());
    const auto& pu = u.log_pmf();
    const auto& pv = v.log_pmf();
    std::vector<double> w(h, kNegInf);
    for (std::size_t n = 1; n <= h; ++n) {
      LogAccumulator acc;
      for (std::size_t k = 1; k < n; ++k) acc.add(pu[k - 1] + w[n - k - 1]);
      w[n - 1] = log_add(log_pi + pv[n - 1], log_q + acc.value());
    }
    const auto su = survival_table(u);
    const auto sv = survival_table(v);
    std::vector<double> sw(h + 1);
    sw[0] = 0.0;
    for (std::size_t n = 1; n <= h; ++n) {
      LogAccumulator acc;
      acc.add(su[n]);
      for (std::size_t k = 1; k <= n; ++k) acc.add(pu[k - 1] + sw[n - k]);
      sw[n] = std::min(log_add(log_pi + sv[n], log_q + acc.value()), 0.0);
    }
    return PassageLaw::dense(std::move(w), sw[h]);
  }

  const ConvolveOptions conv{budget.log_mass_floor, budget.max_value};
  std::map<std::uint64_t, LogAccumulator> acc;
  LogAccumulator tail;
  AtomicDist term = v.atoms();  // law of U^{*m} * V
  for (std::uint64_t m = 0;; ++m) {
    const double log_weight = log_pi + static_cast<double>(m) * log_q;
    for (std::size_t k = 0; k < term.size(); ++k) {
      if (budget.max_value && term.atoms()[k] > *budget.max_value) {
        tail.add(log_weight + term.log_probs()[k]);
      } else {
        acc[term.atoms()[k]].add(log_weight + term.log_probs()[k]);
      }
    }
    tail.add(log_weight + term.log_tail());
    const double log_remaining = static_cast<double>(m + 1) * log_q;  // log P(M > m)
    if (term.empty() || log_remaining < budget.log_mass_floor || m + 1 > budget.max_terms) {
      tail.add(log_remaining);
      break;
    }
    term = convolve(u.atoms(), term, conv);
  }
  return PassageLaw::sparse(atoms_from_map(acc, tail, budget.log_mass_floor));
}

PassageLaw mixture(std::span<const PassageLaw> laws, std::span<const double> weights) {
  if (laws.empty() || laws.size() != weights.size()) throw InvalidArgument("mixture: one weight per law required");
  double total = 0.0;
  for (double w : weights) {
    if (!(w >= 0.0)) throw InvalidArgument("mixture: weights must be non-negative");
    total += w;
  }
  if (std::abs(total - 1.0) > 1e-12) throw InvalidArgument("mixture: weights must sum to 1");
  const bool dense = laws.front().is_dense();
  for (const auto& l : laws)
    if (l.is_dense() != dense) throw InvalidArgument("mixture: dense and sparse laws cannot be mixed");

  // Survival of the mixture decays no slower than its slowest component,
  // compared over the least common multiple of the periods.
  std::optional<TailCertificate> cert = TailCertificate{1, 0.0, 1};
  for (std::size_t k = 0; k < laws.size(); ++k) {
    if (weights[k] == 0.0 || laws[k].log_tail_mass() == kNegInf) continue;
    const auto& c = laws[k].tail_cert();
    if (!c) {
      cert.reset();
      break;
    }
    cert->period = std::lcm(cert->period, c->period);
  }
  if (cert) {
    for (std::size_t k = 0; k < laws.size(); ++k) {
      if (weights[k] == 0.0 || laws[k].log_tail_mass() == kNegInf) continue;
      const auto& c = *laws[k].tail_cert();
      cert->n0 = std::max(cert->n0, c.n0);
      cert->rho = std::max(cert->rho, std::pow(c.rho, static_cast<double>(cert->period / c.period)));
    }
    if (cert->rho == 0.0) cert.reset();
  }

  if (dense) {
    std::size_t h = laws.front().log_pmf().size();
    for (const auto& l : laws) h = std::min(h, l.log_pmf().size());
    std::vector<LogAccumulator> acc(h);
    LogAccumulator tail;
    for (std::size_t k = 0; k < laws.size(); ++k) {
      if (weights[k] == 0.0) continue;
      const double lw = std::log(weights[k]);
      const auto& p = laws[k].log_pmf();
      for (std::size_t n = 0; n < h; ++n) acc[n].add(lw + p[n]);
      tail.add(lw + laws[k].log_survival(h));
    }
    std::vector<double> out(h);
    for (std::size_t n = 0; n < h; ++n) out[n] = acc[n].value();
    return PassageLaw::dense(std::move(out), std::min(tail.value(), 0.0), cert);
  }
  std::map<std::uint64_t, LogAccumulator> acc;
  LogAccumulator tail;
  for (std::size_t k = 0; k < laws.size(); ++k) {
    if (weights[k] == 0.0) continue;
    const double lw = std::log(weights[k]);
    const auto& d = laws[k].atoms();
    for (std::size_t x = 0; x < d.size(); ++x) acc[d.atoms()[x]].add(lw + d.log_probs()[x]);
    tail.add(lw + d.log_tail());
  }
  return PassageLaw::sparse(atoms_from_map(acc, tail, kNegInf), cert);
}

PassageLaw to_dense(const PassageLaw& law, std::uint64_t horizon) {
  check_horizon(horizon);
  if (law.is_dense() && horizon > law.horizon())
    throw InvalidArgument("to_dense: cannot extend a dense law beyond its horizon");
  std::vector<double> p(horizon, kNegInf);
  law.for_each([&](std::uint64_t n, double lp) {
    if (n <= horizon) p[n - 1] = lp;
  });
  return PassageLaw::dense(std::move(p), law.log_survival(horizon), law.tail_cert());
}

DominationReport stochastic_dominates(const PassageLaw& a, const PassageLaw& b, double tol) {
  require_same_kind(a, b, "stochastic_dominates");
  std::vector<std::uint64_t> points;
  if (a.is_dense()) {
    if (a.horizon() != b.horizon()) throw InvalidArgument("stochastic_dominates: incomparable horizons");
    points.resize(a.horizon());
    std::iota(points.begin(), points.end(), std::uint64_t{1});
  } else {
    std::set_union(a.atoms().atoms().begin(), a.atoms().atoms().end(), b.atoms().atoms().begin(),
                   b.atoms().atoms().end(), std::back_inserter(points));
  }
  DominationReport report;
  double ca = 0.0, cb = 0.0;
  for (std::uint64_t n : points) {
    ca += std::exp(a.log_prob(n));
    cb += std::exp(b.log_prob(n));
    report.max_cdf_violation = std::max(report.max_cdf_violation, ca - cb);
  }
  report.dominates = report.max_cdf_violation <= tol;
  return report;
}

}  // namespace recur
