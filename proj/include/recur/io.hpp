#pragma once

// File formats: JSON chains, passage-law CSV, JSON reports.

#include <iosfwd>
#include <string>

#include <json.hpp>

#include "recur/chain.hpp"
#include "recur/constructions.hpp"
#include "recur/momentfn.hpp"
#include "recur/moments.hpp"
#include "recur/passage.hpp"

namespace recur {

/// %.17g: round-trips every double.
std::string format_double(double v);

/// Finite values as numbers, infinities as "inf" / "-inf", NaN as null.
nlohmann::json log_value_json(double v);

/// {"states": [...], "rows": [[["<target>", prob], ...], ...]}. The loaded
/// kernel is validated; InvalidArgument names the violated invariant.
TransitionKernel parse_chain_json(const nlohmann::json& doc);
TransitionKernel read_chain_json(std::istream& in);
TransitionKernel read_chain_file(const std::string& path);
nlohmann::json chain_to_json(const TransitionKernel& kernel);

struct PetalSpec {
  AtomicDist u1;
  AtomicDist u2;
  double p = 0.5;
  std::size_t max_petals = 64;
};

/// {"p": 0.5, "max_petals": 5, "U1": {"atoms": [...], "probs": [...]}, "U2": {...}}
PetalSpec parse_petal_json(const nlohmann::json& doc);
PetalSpec read_petal_file(const std::string& path);

/// Header `n,prob,log_prob`, one row per represented point, then footer
/// rows `tail_mass,<prob>,<log_prob>`, `tail_cert_N0,<N0>,`,
/// `tail_cert_rho,<rho>,` and `tail_cert_period,<d>,` (values empty when
/// there is no certificate).
void write_law_csv(std::ostream& out, const PassageLaw& law);
/// Reads write_law_csv output back as a dense law when the rows are
/// consecutive from 1, otherwise as a sparse law.
PassageLaw read_law_csv(std::istream& in);

/// {"log_partial_sum": .., "log_tail_bound": ..|null, "verdict": "converged|diverged|inconclusive", "N": ..}
nlohmann::json estimate_to_json(const MomentEstimate& est);
nlohmann::json mc_to_json(const McEstimate& est);
nlohmann::json classification_to_json(const Classification& c, const MomentFunction& f);
nlohmann::json demo_to_json(const DemoReport& report);

std::string demo_summary(const DemoReport& report);
void write_trace_csv(std::ostream& out, const SeriesVerdict& series);
void write_witness_csv(std::ostream& out, const std::vector<SubmultWitness>& witnesses);

}  // namespace recur
