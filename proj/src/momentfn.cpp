#include "recur/momentfn.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <limits>
#include <mutex>
#include <queue>
#include <set>
#include <sstream>
#include <stdexcept>

#include "recur/error.hpp"

namespace recur {

namespace detail {

class BurstTable {
 public:
  explicit BurstTable(BurstSchedule schedule) : schedule_(std::move(schedule)) {}

  std::int64_t g(std::uint64_t n) {
    std::lock_guard lock(mutex_);
    extend_past(n);
    auto it = std::upper_bound(bursts_.begin(), bursts_.end(), n,
                               [](std::uint64_t v, const Burst& b) { return v < b.start; });
    if (it == bursts_.begin()) return 0;
    const Burst& b = *std::prev(it);
    if (n <= b.end()) return b.level_before + static_cast<std::int64_t>(n - b.start);
    if (it == bursts_.end() && exhausted_)
      throw std::out_of_range("burst schedule '" + schedule_.label + "' exhausted before n = " + std::to_string(n));
    return b.level_after();
  }

  Burst at(std::uint64_t index) {
    if (index < 1) throw InvalidArgument("burst indices start at 1");
    std::lock_guard lock(mutex_);
    while (bursts_.size() < index && extend_one()) {
    }
    if (bursts_.size() < index) throw std::out_of_range("burst " + std::to_string(index) + " not representable");
    return bursts_[index - 1];
  }

  std::vector<Burst> up_to(std::uint64_t limit) {
    std::lock_guard lock(mutex_);
    extend_past(limit);
    std::vector<Burst> out;
    for (const auto& b : bursts_)
      if (b.start <= limit) out.push_back(b);
    return out;
  }

 private:
  // Ensures the next unknown burst starts beyond n (or none exists).
  void extend_past(std::uint64_t n) {
    while ((bursts_.empty() || bursts_.back().start <= n) && extend_one()) {
    }
  }

  bool extend_one() {
    if (done_) return false;
    const std::uint64_t i = bursts_.size() + 1;
    if (schedule_.last_index && i > *schedule_.last_index) {
      done_ = exhausted_ = true;
      return false;
    }
    const std::uint64_t s = schedule_.s(i);
    const std::uint64_t u = schedule_.u(i);
    constexpr auto kMax = std::numeric_limits<std::uint64_t>::max();
    if (s == kMax || u == kMax || s > kMax - u) {
      // Later bursts start beyond any representable n.
      done_ = true;
      return false;
    }
    if (u < 1) throw InvalidArgument("burst schedule: u_" + std::to_string(i) + " must be >= 1");
    std::int64_t level = 0;
    if (!bursts_.empty()) {
      const Burst& prev = bursts_.back();
      if (s <= prev.start) throw InvalidArgument("burst schedule: s must be strictly increasing");
      if (prev.length > s - prev.start)
        throw InvalidArgument("burst schedule violates u_i <= s_{i+1} - s_i at i = " + std::to_string(prev.index));
      level = prev.level_after();
    }
    bursts_.push_back(Burst{i, s, u, level});
    return true;
  }

  BurstSchedule schedule_;
  std::vector<Burst> bursts_;
  bool done_ = false;
  bool exhausted_ = false;
  std::mutex mutex_;
};

}  // namespace detail

namespace {

constexpr auto kU64Max = std::numeric_limits<std::uint64_t>::max();

std::uint64_t saturate(unsigned __int128 v) { return v >= kU64Max ? kU64Max : static_cast<std::uint64_t>(v); }

void require_positive(double v, const char* what) {
  if (!(v > 0.0) || !std::isfinite(v)) throw InvalidArgument(std::string(what) + " must be a positive finite number");
}

double parse_double(std::string_view s, std::string_view spec) {
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size())
    throw InvalidArgument("cannot parse number in moment function spec '" + std::string(spec) + "'");
  return v;
}

std::uint64_t parse_u64(std::string_view s) {
  std::uint64_t v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) throw InvalidArgument("not an unsigned integer: '" + std::string(s) + "'");
  return v;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

}  // namespace

BurstSchedule default_burst_schedule() {
  BurstSchedule sched;
  sched.s = [](std::uint64_t i) {
    if (i >= 64) return kU64Max;
    return saturate(static_cast<unsigned __int128>(i) * i << i);
  };
  sched.u = [](std::uint64_t i) {
    if (i >= 64) return kU64Max;
    return saturate(static_cast<unsigned __int128>(i) << i);
  };
  sched.label = "default";

  // The properties the witness construction relies on, checked on the
  // representable prefix.
  std::uint64_t total_before = 0;  // Σ_{k<i} u_k
  double prev_peak = std::numeric_limits<double>::infinity();
  std::int64_t prev_margin = std::numeric_limits<std::int64_t>::min();
  for (std::uint64_t i = 1;; ++i) {
    const std::uint64_t s = sched.s(i), u = sched.u(i), s_next = sched.s(i + 1);
    if (s_next == kU64Max || s > kU64Max - u) break;
    const std::uint64_t end = s + u;
    const std::uint64_t prev_end = (i == 1) ? 0 : sched.s(i - 1) + sched.u(i - 1);
    const std::uint64_t mid = end / 2;
    const auto margin = static_cast<std::int64_t>(u) - static_cast<std::int64_t>(total_before);
    const double peak = static_cast<double>(total_before + u) / static_cast<double>(end);
    if (u > s_next - s || end % 2 != 0 || mid < prev_end || mid > s || margin <= prev_margin || !(peak < prev_peak))
      throw std::logic_error("default burst schedule failed self-check at i = " + std::to_string(i));
    prev_margin = margin;
    prev_peak = peak;
    total_before += u;
  }
  return sched;
}

BurstSchedule read_burst_schedule(std::istream& in, std::string label) {
  std::vector<std::uint64_t> s, u;
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    std::string_view v = trim(line);
    if (v.empty()) continue;
    if (first && !std::isdigit(static_cast<unsigned char>(v.front()))) {
      first = false;
      continue;
    }
    first = false;
    std::vector<std::string_view> cols;
    std::size_t pos = 0;
    while (true) {
      auto comma = v.find(',', pos);
      cols.push_back(trim(v.substr(pos, comma == std::string_view::npos ? std::string_view::npos : comma - pos)));
      if (comma == std::string_view::npos) break;
      pos = comma + 1;
    }
    if (cols.size() != 3) throw InvalidArgument("burst schedule rows must be 'i,s_i,u_i'");
    if (parse_u64(cols[0]) != s.size() + 1) throw InvalidArgument("burst schedule indices must be 1, 2, ... in order");
    s.push_back(parse_u64(cols[1]));
    u.push_back(parse_u64(cols[2]));
  }
  if (s.empty()) throw InvalidArgument("burst schedule file has no rows");
  BurstSchedule sched;
  sched.last_index = s.size();
  sched.s = [s](std::uint64_t i) { return s.at(i - 1); };
  sched.u = [u](std::uint64_t i) { return u.at(i - 1); };
  sched.label = std::move(label);
  // Surface constraint violations now rather than at first evaluation.
  detail::BurstTable probe(sched);
  probe.up_to(kU64Max - 1);
  return sched;
}

BurstSchedule read_burst_schedule_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot open burst schedule file '" + path + "'");
  return read_burst_schedule(in, "file=" + path);
}

MomentFunction MomentFunction::power(double p) {
  require_positive(p, "power exponent");
  std::ostringstream os;
  os << "power:" << p;
  return MomentFunction(MomentKind::Power, os.str(), p);
}

MomentFunction MomentFunction::log_power(double q) {
  require_positive(q, "log-power exponent");
  std::ostringstream os;
  os << "logpow:" << q;
  return MomentFunction(MomentKind::LogPower, os.str(), q);
}

MomentFunction MomentFunction::exponential(double delta) {
  require_positive(delta, "exponential rate");
  std::ostringstream os;
  os << "exp:" << delta;
  return MomentFunction(MomentKind::Exponential, os.str(), delta);
}

MomentFunction MomentFunction::burst(BurstSchedule schedule) {
  MomentFunction f(MomentKind::Burst, "burst:" + schedule.label, 0.0);
  f.burst_ = std::make_shared<detail::BurstTable>(std::move(schedule));
  return f;
}

MomentFunction MomentFunction::custom(std::string name, std::function<double(std::uint64_t)> log_f) {
  MomentFunction f(MomentKind::Custom, std::move(name), 0.0);
  f.custom_ = std::move(log_f);
  return f;
}

double MomentFunction::log_eval(std::uint64_t n) const {
  if (n < 1) throw InvalidArgument("moment functions are defined on n >= 1");
  const double x = static_cast<double>(n);
  switch (kind_) {
    case MomentKind::Power:
      return param_ * std::log(x);
    case MomentKind::LogPower:
      return param_ * std::log(std::log(x + 2.0));
    case MomentKind::Exponential:
      return param_ * x;
    case MomentKind::Burst:
      return static_cast<double>(burst_->g(n));
    case MomentKind::Custom:
      return custom_(n);
  }
  return 0.0;
}

std::optional<std::int64_t> MomentFunction::exact_log(std::uint64_t n) const {
  if (kind_ != MomentKind::Burst) return std::nullopt;
  return burst_->g(n);
}

std::optional<std::int64_t> MomentFunction::exact_log_ratio(std::uint64_t x, std::uint64_t y) const {
  if (kind_ != MomentKind::Burst) return std::nullopt;
  if (y > kU64Max - x) throw InvalidArgument("exact_log_ratio: x + y overflows");
  return burst_->g(x + y) - burst_->g(x) - burst_->g(y);
}

std::optional<double> MomentFunction::log_step_bound(std::uint64_t from, std::uint64_t window,
                                                     bool allow_unregistered) const {
  if (from < 1) from = 1;
  if (kind_ == MomentKind::Burst) return 1.0;
  if (kind_ == MomentKind::Custom && !allow_unregistered) return std::nullopt;
  double best = -std::numeric_limits<double>::infinity();
  for (std::uint64_t n = from; n <= from + window; ++n) best = std::max(best, log_eval(n + 1) - log_eval(n));
  return std::max(best, 0.0);
}

std::optional<double> MomentFunction::analytic_log_k() const {
  switch (kind_) {
    case MomentKind::Power:
      return param_ * std::log(2.0);
    case MomentKind::LogPower:
      return param_ * std::log(2.0 / std::log(3.0));
    default:
      return std::nullopt;
  }
}

std::vector<Burst> MomentFunction::bursts_up_to(std::uint64_t limit) const {
  if (kind_ != MomentKind::Burst) return {};
  return burst_->up_to(limit);
}

Burst MomentFunction::burst_at(std::uint64_t index) const {
  if (kind_ != MomentKind::Burst) throw InvalidArgument("burst_at needs a burst function");
  return burst_->at(index);
}

std::vector<std::uint64_t> MomentFunction::structural_points(std::uint64_t limit) const {
  std::vector<std::uint64_t> pts;
  for (const auto& b : bursts_up_to(limit)) {
    for (std::uint64_t v : {b.start, b.end(), b.end() / 2, (b.end() + 1) / 2})
      if (v >= 1 && v <= limit) pts.push_back(v);
  }
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  return pts;
}

MomentFunction parse_moment_function(std::string_view spec) {
  const auto colon = spec.find(':');
  if (colon == std::string_view::npos) throw InvalidArgument("moment function spec needs 'kind:arg', got '" + std::string(spec) + "'");
  const std::string_view kind = spec.substr(0, colon);
  const std::string_view arg = spec.substr(colon + 1);
  if (kind == "power") return MomentFunction::power(parse_double(arg, spec));
  if (kind == "logpow") return MomentFunction::log_power(parse_double(arg, spec));
  if (kind == "exp") return MomentFunction::exponential(parse_double(arg, spec));
  if (kind == "burst") {
    if (arg == "default") return MomentFunction::burst(default_burst_schedule());
    if (arg.starts_with("file=")) return MomentFunction::burst(read_burst_schedule_file(std::string(arg.substr(5))));
  }
  throw InvalidArgument("unknown moment function spec '" + std::string(spec) + "'");
}

namespace {

double log_ratio(const MomentFunction& f, std::uint64_t x, std::uint64_t y, double lx, double ly) {
  if (auto exact = f.exact_log_ratio(x, y)) return static_cast<double>(*exact);
  return f.log_eval(x + y) - (lx + ly);
}

// Min-heap keeping the largest log-ratios.
struct TopWitnesses {
  explicit TopWitnesses(std::size_t cap) : cap(cap) {}
  void offer(const SubmultWitness& w) {
    if (cap == 0) return;
    if (heap.size() < cap) {
      heap.push(w);
    } else if (w.log_ratio > heap.top().log_ratio) {
      heap.pop();
      heap.push(w);
    }
  }
  std::vector<SubmultWitness> sorted() {
    std::vector<SubmultWitness> out;
    while (!heap.empty()) {
      out.push_back(heap.top());
      heap.pop();
    }
    std::reverse(out.begin(), out.end());
    return out;
  }
  struct Greater {
    bool operator()(const SubmultWitness& a, const SubmultWitness& b) const {
      if (a.log_ratio != b.log_ratio) return a.log_ratio > b.log_ratio;
      return std::tie(a.x, a.y) > std::tie(b.x, b.y);
    }
  };
  std::size_t cap;
  std::priority_queue<SubmultWitness, std::vector<SubmultWitness>, Greater> heap;
};

}  // namespace

SubmultReport submult_scan(const MomentFunction& f, std::span<const std::uint64_t> xs,
                           std::span<const std::uint64_t> ys, std::size_t max_witnesses) {
  if (xs.empty() || ys.empty()) throw InvalidArgument("submult_scan: grids must be non-empty");
  std::vector<double> lx(xs.size()), ly(ys.size());
  for (std::size_t a = 0; a < xs.size(); ++a) lx[a] = f.log_eval(xs[a]);
  for (std::size_t b = 0; b < ys.size(); ++b) ly[b] = f.log_eval(ys[b]);
  SubmultReport report;
  report.log_grid_k = -std::numeric_limits<double>::infinity();
  TopWitnesses top(max_witnesses);
  for (std::size_t a = 0; a < xs.size(); ++a) {
    for (std::size_t b = 0; b < ys.size(); ++b) {
      const double r = log_ratio(f, xs[a], ys[b], lx[a], ly[b]);
      report.log_grid_k = std::max(report.log_grid_k, r);
      top.offer({xs[a], ys[b], r});
    }
  }
  report.grid_k = std::exp(report.log_grid_k);
  report.witnesses = top.sorted();
  return report;
}

std::vector<std::uint64_t> default_scan_grid(const MomentFunction& f, std::uint64_t extent) {
  std::vector<std::uint64_t> g;
  for (std::uint64_t n = 1; n <= std::min<std::uint64_t>(32, extent); ++n) g.push_back(n);
  for (unsigned e = 5; e < 63; ++e) {
    const std::uint64_t p = std::uint64_t{1} << e;
    for (std::uint64_t v : {p - 1, p, p + 1})
      if (v <= extent) g.push_back(v);
  }
  for (std::uint64_t v : f.structural_points(extent)) g.push_back(v);
  std::sort(g.begin(), g.end());
  g.erase(std::unique(g.begin(), g.end()), g.end());
  return g;
}

GrowthProfile growth_profile(const MomentFunction& f, std::uint64_t n_max, std::span<const std::uint64_t> checkpoints) {
  for (auto c : checkpoints)
    if (c < 1 || c > n_max) throw InvalidArgument("growth_profile: checkpoints must lie in [1, n_max]");
  std::vector<std::uint64_t> ns(checkpoints.begin(), checkpoints.end());
  ns.push_back(n_max);
  const double decades = std::log10(static_cast<double>(n_max));
  for (double t = 0.0; t <= decades; t += 1.0 / 32.0) {
    const auto n = static_cast<std::uint64_t>(std::llround(std::pow(10.0, t)));
    if (n >= 1 && n <= n_max) ns.push_back(n);
  }
  for (const auto& b : f.bursts_up_to(n_max))
    if (b.end() <= n_max) ns.push_back(b.end());
  std::sort(ns.begin(), ns.end());
  ns.erase(std::unique(ns.begin(), ns.end()), ns.end());

  GrowthProfile prof;
  prof.points.reserve(ns.size());
  for (auto n : ns) prof.points.emplace_back(n, f.log_eval(n) / static_cast<double>(n));
  std::vector<double> suffix(prof.points.size());
  double run = -std::numeric_limits<double>::infinity();
  for (std::size_t k = prof.points.size(); k-- > 0;) suffix[k] = run = std::max(run, prof.points[k].second);
  prof.checkpoints.assign(checkpoints.begin(), checkpoints.end());
  std::sort(prof.checkpoints.begin(), prof.checkpoints.end());
  for (auto c : prof.checkpoints) {
    auto it = std::lower_bound(prof.points.begin(), prof.points.end(), c,
                               [](const auto& pt, std::uint64_t v) { return pt.first < v; });
    prof.running_sup_tail.push_back(suffix[static_cast<std::size_t>(it - prof.points.begin())]);
  }
  return prof;
}

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::SatisfiesC:
      return "SatisfiesC";
    case Verdict::ViolatesCi:
      return "ViolatesC_i";
    case Verdict::ViolatesCii:
      return "ViolatesC_ii";
    case Verdict::Inconclusive:
      return "Inconclusive";
  }
  return "Inconclusive";
}

Classification classify(const MomentFunction& f, const ClassifyBudget& budget) {
  Classification out;

  // (i): does the grid maximum of the log-ratio keep climbing as the grid grows?
  // Increases are measured relative to the size of log f on the grid.
  constexpr double kIncrease = 1e-9;
  TopWitnesses top(32);
  double best = -std::numeric_limits<double>::infinity();
  unsigned increases = 0;
  std::uint64_t prev_extent = 0;
  for (unsigned e = 1; e <= budget.max_dyadic_exponent && e < 62; ++e) {
    const std::uint64_t extent = std::uint64_t{1} << e;
    const auto grid = default_scan_grid(f, extent);
    std::vector<double> lg(grid.size());
    double scale = 1.0;
    for (std::size_t a = 0; a < grid.size(); ++a) {
      lg[a] = f.log_eval(grid[a]);
      scale = std::max(scale, std::abs(lg[a]));
    }
    double level = best;
    for (std::size_t b = 0; b < grid.size(); ++b) {
      if (grid[b] <= prev_extent) continue;  // pairs inside the old grid are already scanned
      for (std::size_t a = 0; a <= b; ++a) {
        const double r = log_ratio(f, grid[a], grid[b], lg[a], lg[b]);
        level = std::max(level, r);
        top.offer({grid[a], grid[b], r});
      }
    }
    if (e > 1 && level > best + kIncrease * scale) ++increases;
    best = level;
    out.scan_maxima.push_back(level);
    prev_extent = extent;
  }

  // (ii): running suprema of log f(n)/n at decade checkpoints.
  std::vector<std::uint64_t> checkpoints;
  std::uint64_t c = 100;
  for (unsigned d = 2; d <= budget.max_decade; ++d, c *= 10) checkpoints.push_back(c);
  out.profile = growth_profile(f, checkpoints.back(), checkpoints);
  const auto& sup = out.profile.running_sup_tail;
  std::optional<double> rate;
  if (sup.size() >= 3) {
    const auto last3 = std::span(sup).last(3);
    auto [lo, hi] = std::minmax_element(last3.begin(), last3.end());
    if (*lo > budget.rate_floor && (*hi - *lo) <= budget.rate_spread * *hi) rate = last3.back();
  }

  if (increases >= budget.min_increases) {
    out.verdict = Verdict::ViolatesCi;
    out.witnesses = top.sorted();
    out.reason = "submultiplicativity ratio grew on " + std::to_string(increases) + " grid extensions";
  } else if (rate) {
    out.verdict = Verdict::ViolatesCii;
    out.rate = rate;
    out.reason = "log f(n)/n settles at a positive rate";
  } else if (auto lk = f.analytic_log_k()) {
    out.verdict = Verdict::SatisfiesC;
    out.log_k = lk;
    out.reason = "analytic certificate for " + f.name();
  } else {
    out.reason = "no violation found and no analytic certificate";
  }
  return out;
}

}  // namespace recur
