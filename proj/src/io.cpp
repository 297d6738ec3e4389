#include "recur/io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>

#include "recur/error.hpp"

namespace recur {

using nlohmann::json;

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

json log_value_json(double v) {
  if (std::isnan(v)) return nullptr;
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return v;
}

TransitionKernel parse_chain_json(const json& doc) {
  if (!doc.is_object() || !doc.contains("states") || !doc.contains("rows"))
    throw InvalidArgument("chain JSON needs 'states' and 'rows'");
  const auto& js = doc.at("states");
  const auto& jr = doc.at("rows");
  if (!js.is_array() || !jr.is_array()) throw InvalidArgument("chain JSON: 'states' and 'rows' must be arrays");
  std::vector<std::string> states;
  std::map<std::string, StateIndex> index;
  for (const auto& s : js) {
    if (!s.is_string()) throw InvalidArgument("chain JSON: state names must be strings");
    const auto name = s.get<std::string>();
    if (!index.emplace(name, states.size()).second) throw InvalidArgument("chain JSON: duplicate state '" + name + "'");
    states.push_back(name);
  }
  if (jr.size() != states.size()) throw InvalidArgument("chain JSON: one row per state required");
  std::vector<std::vector<Transition>> rows(states.size());
  for (std::size_t k = 0; k < jr.size(); ++k) {
    if (!jr[k].is_array()) throw InvalidArgument("chain JSON: row " + std::to_string(k) + " must be an array");
    for (const auto& e : jr[k]) {
      if (!e.is_array() || e.size() != 2 || !e[0].is_string() || !e[1].is_number())
        throw InvalidArgument("chain JSON: entries must be [\"target\", probability]");
      const auto target = e[0].get<std::string>();
      auto it = index.find(target);
      if (it == index.end()) throw InvalidArgument("chain JSON: unknown target state '" + target + "'");
      rows[k].push_back({it->second, e[1].get<double>()});
    }
  }
  TransitionKernel kernel(std::move(states), std::move(rows));
  require_valid(kernel);
  return kernel;
}

TransitionKernel read_chain_json(std::istream& in) {
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw InvalidArgument(std::string("chain JSON: ") + e.what());
  }
  return parse_chain_json(doc);
}

TransitionKernel read_chain_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot open chain file '" + path + "'");
  return read_chain_json(in);
}

json chain_to_json(const TransitionKernel& kernel) {
  json rows = json::array();
  for (StateIndex k = 0; k < kernel.size(); ++k) {
    json row = json::array();
    for (const auto& t : kernel.row(k)) row.push_back(json::array({kernel.name(t.target), t.prob}));
    rows.push_back(std::move(row));
  }
  return json{{"states", kernel.states()}, {"rows", std::move(rows)}};
}

namespace {

AtomicDist parse_atomic(const json& j, const char* which) {
  if (!j.is_object() || !j.contains("atoms") || !j.contains("probs"))
    throw InvalidArgument(std::string("petal JSON: '") + which + "' needs 'atoms' and 'probs'");
  const auto atoms = j.at("atoms").get<std::vector<std::uint64_t>>();
  const auto probs = j.at("probs").get<std::vector<double>>();
  if (atoms.size() != probs.size()) throw InvalidArgument(std::string("petal JSON: '") + which + "' atoms/probs length mismatch");
  return AtomicDist::from_probs(atoms, probs);
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

double parse_csv_double(const std::string& s) {
  if (s == "-inf") return kNegInf;
  if (s == "inf") return -kNegInf;
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw InvalidArgument("bad number '" + s + "'");
    return v;
  } catch (const std::logic_error&) {
    throw InvalidArgument("law CSV: bad number '" + s + "'");
  }
}

}  // namespace

PetalSpec parse_petal_json(const json& doc) {
  try {
    PetalSpec spec;
    spec.p = doc.at("p").get<double>();
    if (doc.contains("max_petals")) spec.max_petals = doc.at("max_petals").get<std::size_t>();
    spec.u1 = parse_atomic(doc.at("U1"), "U1");
    spec.u2 = parse_atomic(doc.at("U2"), "U2");
    return spec;
  } catch (const json::exception& e) {
    throw InvalidArgument(std::string("petal JSON: ") + e.what());
  }
}

PetalSpec read_petal_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot open petal file '" + path + "'");
  try {
    return parse_petal_json(json::parse(in));
  } catch (const json::parse_error& e) {
    throw InvalidArgument(std::string("petal JSON: ") + e.what());
  }
}

void write_law_csv(std::ostream& out, const PassageLaw& law) {
  out << "n,prob,log_prob\n";
  if (law.is_dense()) {
    const auto& p = law.log_pmf();
    for (std::size_t k = 0; k < p.size(); ++k)
      out << (k + 1) << ',' << format_double(std::exp(p[k])) << ',' << format_double(p[k]) << '\n';
  } else {
    law.for_each([&](std::uint64_t n, double lp) {
      out << n << ',' << format_double(std::exp(lp)) << ',' << format_double(lp) << '\n';
    });
  }
  const double t = law.log_tail_mass();
  out << "tail_mass," << format_double(std::exp(t)) << ',' << format_double(t) << '\n';
  const auto& c = law.tail_cert();
  out << "tail_cert_N0," << (c ? std::to_string(c->n0) : "") << ",\n";
  out << "tail_cert_rho," << (c ? format_double(c->rho) : "") << ",\n";
  out << "tail_cert_period," << (c ? std::to_string(c->period) : "") << ",\n";
}

PassageLaw read_law_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != "n,prob,log_prob") throw InvalidArgument("law CSV: missing header");
  std::vector<std::uint64_t> ns;
  std::vector<double> lps;
  double tail = kNegInf;
  std::optional<std::uint64_t> n0;
  std::optional<double> rho;
  std::uint64_t period = 1;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto cols = split_csv(line);
    if (cols.size() != 3) throw InvalidArgument("law CSV: rows need three columns");
    if (cols[0] == "tail_mass") {
      tail = parse_csv_double(cols[2]);
    } else if (cols[0] == "tail_cert_N0") {
      if (!cols[1].empty()) n0 = std::stoull(cols[1]);
    } else if (cols[0] == "tail_cert_period") {
      if (!cols[1].empty()) period = std::stoull(cols[1]);
    } else if (cols[0] == "tail_cert_rho") {
      if (!cols[1].empty()) rho = parse_csv_double(cols[1]);
    } else {
      ns.push_back(std::stoull(cols[0]));
      lps.push_back(parse_csv_double(cols[2]));
    }
  }
  std::optional<TailCertificate> cert;
  if (n0 && rho) cert = TailCertificate{*n0, *rho, period};
  bool consecutive = !ns.empty();
  for (std::size_t k = 0; k < ns.size(); ++k) consecutive = consecutive && ns[k] == k + 1;
  if (consecutive) return PassageLaw::dense(std::move(lps), tail, cert);
  return PassageLaw::sparse(AtomicDist(std::move(ns), std::move(lps), tail), cert);
}

json estimate_to_json(const MomentEstimate& est) {
  return json{{"log_partial_sum", log_value_json(est.log_partial_sum)},
              {"log_tail_bound", est.log_tail_bound ? log_value_json(*est.log_tail_bound) : json(nullptr)},
              {"verdict", to_string(est.verdict)},
              {"N", est.horizon}};
}

json mc_to_json(const McEstimate& est) {
  return json{{"mean_log_f", log_value_json(est.mean_log_f)},
              {"mean", log_value_json(est.mean())},
              {"std_err", log_value_json(est.std_err)},
              {"log_std_err", log_value_json(est.log_std_err)},
              {"censored_fraction", est.censored_fraction},
              {"n_samples", est.n_samples}};
}

json classification_to_json(const Classification& c, const MomentFunction& f) {
  json j{{"function", f.name()}, {"verdict", to_string(c.verdict)}, {"reason", c.reason}};
  if (c.rate) j["rate"] = *c.rate;
  if (c.log_k) j["log_K"] = *c.log_k;
  json w = json::array();
  for (const auto& x : c.witnesses) w.push_back(json{{"x", x.x}, {"y", x.y}, {"log_ratio", log_value_json(x.log_ratio)}});
  j["witnesses"] = std::move(w);
  j["scan_maxima"] = json::array();
  for (double m : c.scan_maxima) j["scan_maxima"].push_back(log_value_json(m));
  json prof = json::array();
  for (std::size_t k = 0; k < c.profile.checkpoints.size(); ++k)
    prof.push_back(json{{"N", c.profile.checkpoints[k]}, {"running_sup_tail", log_value_json(c.profile.running_sup_tail[k])}});
  j["growth_profile"] = std::move(prof);
  return j;
}

json demo_to_json(const DemoReport& report) {
  json params = json::object();
  for (const auto& [k, v] : report.parameters) params[k] = log_value_json(v);
  json diag = json::object();
  for (const auto& [k, v] : report.diagnostics) diag[k] = log_value_json(v);
  const auto& inf = report.infinite_side;
  json infinite{{"verdict", inf.diverged ? "diverged" : "inconclusive"},
                {"threshold", log_value_json(inf.threshold)},
                {"log_partial_sum", log_value_json(inf.log_partial_sum)},
                {"crossing_index", inf.crossing_index ? json(*inf.crossing_index) : json(nullptr)},
                {"terms", inf.trace.size()}};
  json witnesses = json::array();
  for (const auto& w : report.witnesses) {
    json jw{{"k", w.k}, {"x", w.x}, {"y", w.y}, {"log_ratio", log_value_json(w.log_ratio)}};
    if (w.exact_log_ratio) jw["exact_log_ratio"] = *w.exact_log_ratio;
    if (w.burst_index) jw["burst_index"] = w.burst_index;
    witnesses.push_back(std::move(jw));
  }
  return json{{"demo", report.name},
              {"success", report.success},
              {"parameters", std::move(params)},
              {"finite_side", estimate_to_json(report.finite_side)},
              {"infinite_side", std::move(infinite)},
              {"diagnostics", std::move(diag)},
              {"witnesses", std::move(witnesses)}};
}

std::string demo_summary(const DemoReport& report) {
  std::ostringstream os;
  os << "demo " << report.name << ": " << (report.success ? "SUCCESS" : "FAILED") << '\n';
  for (const auto& [k, v] : report.parameters) os << "  " << k << " = " << format_double(v) << '\n';
  const auto& fin = report.finite_side;
  os << "  finite side: " << to_string(fin.verdict) << ", log E f = " << format_double(fin.log_partial_sum);
  if (fin.log_tail_bound) os << " (upper " << format_double(fin.log_upper()) << ")";
  os << '\n';
  const auto& inf = report.infinite_side;
  os << "  infinite side: " << (inf.diverged ? "diverged" : "not diverged") << ", log partial sum "
     << format_double(inf.log_partial_sum) << " vs threshold " << format_double(inf.threshold);
  if (inf.crossing_index) os << ", crossed at k = " << *inf.crossing_index;
  os << '\n';
  for (const auto& [k, v] : report.diagnostics) os << "  " << k << " = " << format_double(v) << '\n';
  return os.str();
}

void write_trace_csv(std::ostream& out, const SeriesVerdict& series) {
  out << "k,log_term,log_partial_sum\n";
  for (const auto& p : series.trace)
    out << p.k << ',' << format_double(p.log_term) << ',' << format_double(p.log_partial_sum) << '\n';
}

void write_witness_csv(std::ostream& out, const std::vector<SubmultWitness>& witnesses) {
  out << "x,y,log_ratio\n";
  for (const auto& w : witnesses) out << w.x << ',' << w.y << ',' << format_double(w.log_ratio) << '\n';
}

}  // namespace recur
