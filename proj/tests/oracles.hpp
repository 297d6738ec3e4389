#pragma once
// Independent reference computations for the tests. Nothing here calls the
// library's propagation, linear solves or law calculus.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "recur/chain.hpp"

namespace oracle {

using recur::StateIndex;
using recur::TransitionKernel;

// Random irreducible, aperiodic kernel: a Hamiltonian cycle guarantees strong
// connectivity, a self-loop at 0 kills periodicity, extra edges are random.
inline TransitionKernel random_kernel(std::mt19937_64& gen, std::size_t n, double extra_edge_prob = 0.4) {
  std::uniform_real_distribution<double> w(0.05, 1.0), coin(0.0, 1.0);
  std::vector<std::string> names;
  for (std::size_t k = 0; k < n; ++k) names.push_back(std::to_string(k));
  std::vector<std::vector<recur::Transition>> rows(n);
  for (std::size_t k = 0; k < n; ++k) {
    std::vector<double> weight(n, 0.0);
    weight[(k + 1) % n] = w(gen);
    if (k == 0) weight[0] = w(gen);
    for (std::size_t t = 0; t < n; ++t)
      if (weight[t] == 0.0 && coin(gen) < extra_edge_prob) weight[t] = w(gen);
    double total = 0.0;
    for (double x : weight) total += x;
    for (std::size_t t = 0; t < n; ++t)
      if (weight[t] > 0.0) rows[k].push_back({t, weight[t] / total});
  }
  return TransitionKernel(names, rows);
}

// Exhaustive path enumeration from `start`. `stop(state, step)` returns true
// when the path ends at that state (recorded at that step); `kill(state)`
// discards the path. Returns P(path ends at step n) for n = 1..max_len
// (index n-1).
inline std::vector<double> enumerate_paths(const TransitionKernel& k, StateIndex start, std::size_t max_len,
                                           const std::function<bool(StateIndex)>& stop,
                                           const std::function<bool(StateIndex)>& kill = {}) {
  std::vector<double> law(max_len, 0.0);
  std::function<void(StateIndex, std::size_t, double)> walk = [&](StateIndex at, std::size_t len, double prob) {
    if (len == max_len) return;
    for (const auto& t : k.row(at)) {
      const double q = prob * t.prob;
      if (stop(t.target)) {
        law[len] += q;
      } else if (!kill || !kill(t.target)) {
        walk(t.target, len + 1, q);
      }
    }
  };
  walk(start, 0, 1.0);
  return law;
}

// Joint law P(T_ij = n) by brute force.
inline std::vector<double> passage_bf(const TransitionKernel& k, StateIndex i, StateIndex j, std::size_t max_len) {
  return enumerate_paths(k, i, max_len, [j](StateIndex s) { return s == j; });
}

// P(T_ii = n, j not visited) by brute force (unnormalized U_ij).
inline std::vector<double> return_avoiding_bf(const TransitionKernel& k, StateIndex i, StateIndex j,
                                              std::size_t max_len) {
  return enumerate_paths(k, i, max_len, [i](StateIndex s) { return s == i; },
                         [j](StateIndex s) { return s == j; });
}

// P(T_ij = n, i not revisited before) by brute force (unnormalized V_ij).
inline std::vector<double> hit_avoiding_bf(const TransitionKernel& k, StateIndex i, StateIndex j,
                                           std::size_t max_len) {
  return enumerate_paths(k, i, max_len, [j](StateIndex s) { return s == j; },
                         [i](StateIndex s) { return s == i; });
}

// Dense taboo recursion in plain linear arithmetic: P(T_ij = n), n = 1..H.
inline std::vector<double> passage_dp(const TransitionKernel& k, StateIndex i, StateIndex j, std::size_t horizon) {
  const std::size_t n = k.size();
  std::vector<double> q(n, 0.0), next(n);
  q[i] = 1.0;
  std::vector<double> law(horizon, 0.0);
  for (std::size_t step = 0; step < horizon; ++step) {
    std::fill(next.begin(), next.end(), 0.0);
    for (std::size_t s = 0; s < n; ++s)
      for (std::size_t t = 0; t < n; ++t) next[t] += q[s] * k.prob(s, t);
    law[step] = next[j];
    next[j] = 0.0;
    q.swap(next);
  }
  return law;
}

// P(hit j before returning to i | start i) by value iteration.
inline double hit_before_return_vi(const TransitionKernel& k, StateIndex i, StateIndex j, int iterations = 20000) {
  const std::size_t n = k.size();
  std::vector<double> h(n, 0.0), next(n);
  h[j] = 1.0;
  for (int it = 0; it < iterations; ++it) {
    for (std::size_t s = 0; s < n; ++s) {
      if (s == j) {
        next[s] = 1.0;
        continue;
      }
      if (s == i) {
        next[s] = 0.0;
        continue;
      }
      double acc = 0.0;
      for (const auto& t : k.row(s)) acc += t.prob * h[t.target];
      next[s] = acc;
    }
    h.swap(next);
  }
  double out = 0.0;
  for (const auto& t : k.row(i)) out += t.prob * (t.target == j ? 1.0 : (t.target == i ? 0.0 : h[t.target]));
  return out;
}

// Stationary distribution by power iteration on the lazy chain (I + P)/2.
inline std::vector<double> stationary_power(const TransitionKernel& k, int iterations = 200000) {
  const std::size_t n = k.size();
  std::vector<double> pi(n, 1.0 / static_cast<double>(n)), next(n);
  for (int it = 0; it < iterations; ++it) {
    for (std::size_t t = 0; t < n; ++t) next[t] = 0.5 * pi[t];
    for (std::size_t s = 0; s < n; ++s)
      for (const auto& t : k.row(s)) next[t.target] += 0.5 * pi[s] * t.prob;
    pi.swap(next);
  }
  return pi;
}

// Two-state chain p_00 = 1-p, p_01 = p, p_10 = 1: P(T_11 = n) = p (1-p)^(n-2), n >= 2.
inline double two_state_t11(double p, std::uint64_t n) {
  return n < 2 ? 0.0 : p * std::pow(1.0 - p, static_cast<double>(n - 2));
}

// One-sample KS statistic of integer samples against an exact CDF.
inline double ks_statistic(std::vector<std::uint64_t> samples, const std::function<double(std::uint64_t)>& cdf) {
  std::sort(samples.begin(), samples.end());
  const double m = static_cast<double>(samples.size());
  double d = 0.0;
  std::size_t idx = 0;
  while (idx < samples.size()) {
    const std::uint64_t v = samples[idx];
    std::size_t end = idx;
    while (end < samples.size() && samples[end] == v) ++end;
    // Empirical CDF just below v and at v.
    d = std::max(d, std::abs(static_cast<double>(idx) / m - (v == 0 ? 0.0 : cdf(v - 1))));
    d = std::max(d, std::abs(static_cast<double>(end) / m - cdf(v)));
    idx = end;
  }
  return d;
}

inline double ks_two_sample(std::vector<std::uint64_t> a, std::vector<std::uint64_t> b) {
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  std::map<std::uint64_t, int> keys;
  for (auto v : a) keys[v];
  for (auto v : b) keys[v];
  double d = 0.0;
  for (const auto& [v, unused] : keys) {
    (void)unused;
    const double fa = static_cast<double>(std::upper_bound(a.begin(), a.end(), v) - a.begin()) / a.size();
    const double fb = static_cast<double>(std::upper_bound(b.begin(), b.end(), v) - b.begin()) / b.size();
    d = std::max(d, std::abs(fa - fb));
  }
  return d;
}

// Asymptotic KS critical values at level 0.01.
inline double ks_critical_001(std::size_t n) { return 1.628 / std::sqrt(static_cast<double>(n)); }
inline double ks_critical_001(std::size_t n, std::size_t m) {
  return 1.628 * std::sqrt(static_cast<double>(n + m) / (static_cast<double>(n) * static_cast<double>(m)));
}

}  // namespace oracle
