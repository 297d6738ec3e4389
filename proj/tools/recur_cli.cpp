// recur: passage-time laws, generalized moments and the counterexample demos.
//
// Exit codes: 0 success, 2 input error, 3 precondition or verdict failure.

#include <CLI11.hpp>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <string>

#include "recur/chain.hpp"
#include "recur/constructions.hpp"
#include "recur/error.hpp"
#include "recur/io.hpp"
#include "recur/momentfn.hpp"
#include "recur/moments.hpp"
#include "recur/passage.hpp"

namespace fs = std::filesystem;
using namespace recur;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInput = 2;
constexpr int kExitVerdict = 3;
constexpr std::uint64_t kDefaultSeed = 20240601;

struct Common {
  std::string output_dir = ".";
  std::uint64_t seed = kDefaultSeed;
  std::string format = "csv";
};

struct ChainArgs {
  std::string chain_file;
  std::string builtin;
  std::string from;
  std::string to;
  std::uint64_t horizon = 2000;
};

void add_chain_options(CLI::App* cmd, ChainArgs& a) {
  auto* file = cmd->add_option("--chain", a.chain_file, "chain JSON file");
  auto* builtin = cmd->add_option("--builtin", a.builtin, "two-state:<p> or petal:<file>");
  file->excludes(builtin);
  cmd->add_option("--from", a.from, "start state")->required();
  cmd->add_option("--to", a.to, "target state")->required();
  cmd->add_option("--horizon", a.horizon, "number of time steps computed exactly")->check(CLI::PositiveNumber);
}

TransitionKernel load_chain(const ChainArgs& a) {
  if (!a.chain_file.empty()) return read_chain_file(a.chain_file);
  if (a.builtin.starts_with("two-state:")) {
    const std::string v = a.builtin.substr(10);
    std::size_t used = 0;
    double p = 0.0;
    try {
      p = std::stod(v, &used);
    } catch (const std::logic_error&) {
      used = 0;
    }
    if (used != v.size() || v.empty()) throw InvalidArgument("bad two-state parameter '" + v + "'");
    return build_two_state(p);
  }
  if (a.builtin.starts_with("petal:")) {
    const auto spec = read_petal_file(a.builtin.substr(6));
    return build_petal_chain(spec.u1, spec.u2, spec.p, spec.max_petals);
  }
  if (a.builtin.empty()) throw InvalidArgument("one of --chain or --builtin is required");
  throw InvalidArgument("unknown builtin chain '" + a.builtin + "'");
}

std::ofstream open_output(const Common& c, const std::string& name) {
  fs::create_directories(c.output_dir);
  const fs::path path = fs::path(c.output_dir) / name;
  std::ofstream out(path);
  if (!out) throw InvalidArgument("cannot write '" + path.string() + "'");
  return out;
}

int cmd_fpt(const Common& c, const ChainArgs& a) {
  const auto kernel = load_chain(a);
  const auto law = first_passage_law(kernel, kernel.index_of(a.from), kernel.index_of(a.to), a.horizon);
  if (c.format == "json") {
    nlohmann::json pmf = nlohmann::json::array();
    for (double lp : law.log_pmf()) pmf.push_back(log_value_json(lp));
    nlohmann::json doc{{"log_pmf", pmf}, {"log_tail_mass", log_value_json(law.log_tail_mass())}};
    if (const auto& cert = law.tail_cert()) doc["tail_cert"] = {{"N0", cert->n0}, {"rho", cert->rho}, {"period", cert->period}};
    open_output(c, "fpt.json") << doc.dump(2) << '\n';
  } else {
    auto out = open_output(c, "fpt.csv");
    write_law_csv(out, law);
  }
  std::cout << "T(" << a.from << " -> " << a.to << "), horizon " << law.horizon() << '\n'
            << "  mean within horizon: " << format_double(law.partial_mean()) << '\n'
            << "  tail mass: " << format_double(std::exp(law.log_tail_mass())) << '\n';
  if (const auto& cert = law.tail_cert())
    std::cout << "  tail certificate: N0 = " << cert->n0 << ", rho = " << format_double(cert->rho)
              << ", period = " << cert->period << '\n';
  else
    std::cout << "  tail certificate: none\n";
  return kExitOk;
}

struct ClassifyArgs {
  std::string fspec;
  unsigned max_exponent = 40;
  unsigned max_decade = 12;
};

int cmd_classify(const Common& c, const ClassifyArgs& a) {
  const auto f = parse_moment_function(a.fspec);
  ClassifyBudget budget;
  budget.max_dyadic_exponent = a.max_exponent;
  budget.max_decade = a.max_decade;
  const auto result = classify(f, budget);
  open_output(c, "classify.json") << classification_to_json(result, f).dump(2) << '\n';
  if (result.verdict == Verdict::ViolatesCi) {
    auto out = open_output(c, "witnesses.csv");
    write_witness_csv(out, result.witnesses);
  }
  std::cout << f.name() << ": " << to_string(result.verdict) << " (" << result.reason << ")\n";
  if (result.rate) std::cout << "  rate: " << format_double(*result.rate) << '\n';
  if (result.log_k) std::cout << "  K: " << format_double(std::exp(*result.log_k)) << '\n';
  return kExitOk;
}

struct MomentArgs {
  ChainArgs chain;
  std::string fspec;
  std::optional<double> threshold;
  bool no_require_cert = false;
  std::uint64_t mc = 0;
  std::uint64_t cap = 10000;
};

int cmd_moment(const Common& c, const MomentArgs& a) {
  const auto f = parse_moment_function(a.fspec);
  const auto kernel = load_chain(a.chain);
  const StateIndex from = kernel.index_of(a.chain.from), to = kernel.index_of(a.chain.to);
  const auto law = first_passage_law(kernel, from, to, a.chain.horizon);
  MomentPolicy policy;
  policy.divergence_threshold = a.threshold;
  policy.require_cert = !a.no_require_cert;
  const auto est = f_moment(law, f, policy);
  open_output(c, "moment.json") << estimate_to_json(est).dump(2) << '\n';
  std::cout << "E " << f.name() << "(T(" << a.chain.from << " -> " << a.chain.to << ")): " << to_string(est.verdict)
            << '\n'
            << "  partial sum (N = " << est.horizon << "): " << format_double(std::exp(est.log_partial_sum)) << '\n';
  if (est.verdict == MomentVerdict::Converged)
    std::cout << "  certified interval: [" << format_double(std::exp(est.log_partial_sum)) << ", "
              << format_double(std::exp(est.log_upper())) << "]\n";
  if (a.mc > 0) {
    const KernelSampler sampler(kernel);
    const auto mc = mc_f_moment([&](std::uint64_t cap, Rng& rng) { return sampler.sample(from, to, cap, rng); }, f,
                                a.mc, a.cap, c.seed);
    open_output(c, "mc.json") << mc_to_json(mc).dump(2) << '\n';
    std::cout << "  monte carlo (" << mc.n_samples << " samples, cap " << a.cap << "): " << format_double(mc.mean())
              << " +- " << format_double(mc.std_err) << ", censored " << format_double(mc.censored_fraction) << '\n';
  }
  return kExitOk;
}

struct DemoArgs {
  std::string name;
  std::string fspec = "burst:default";
  double p = -1.0;
  double delta = 0.1;
  std::uint64_t kmax = 50;
  std::optional<double> threshold;
};

int cmd_demo(const Common& c, const DemoArgs& a) {
  DemoReport report;
  if (a.name == "exponential") {
    report = demo_exponential(a.delta, a.p < 0 ? 0.05 : a.p, a.threshold);
  } else {
    SharpDemoOptions options;
    options.log_threshold = a.threshold;
    report = demo_sharp(parse_moment_function(a.fspec), a.p < 0 ? 0.5 : a.p, a.kmax, options);
  }
  open_output(c, "demo_" + report.name + ".json") << demo_to_json(report).dump(2) << '\n';
  {
    auto out = open_output(c, "demo_" + report.name + "_trace.csv");
    write_trace_csv(out, report.infinite_side);
  }
  const std::string summary = demo_summary(report);
  open_output(c, "demo_" + report.name + ".txt") << summary;
  std::cout << summary;
  return report.success ? kExitOk : kExitVerdict;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"recur: first-passage laws and generalized moments of Markov chains"};
  app.require_subcommand(1);
  Common common;
  app.add_option("--output-dir,-o", common.output_dir, "directory for CSV/JSON artifacts");
  app.add_option("--seed", common.seed, "random seed (default 20240601)");
  app.add_option("--format", common.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));

  ChainArgs fpt_args;
  auto* fpt = app.add_subcommand("fpt", "first-passage / return-time law");
  add_chain_options(fpt, fpt_args);

  ClassifyArgs classify_args;
  auto* cls = app.add_subcommand("classify", "check submultiplicativity and subexponential growth of f");
  cls->add_option("fspec", classify_args.fspec, "power:<p> | logpow:<q> | exp:<delta> | burst:default | burst:file=<csv>")
      ->required();
  cls->add_option("--max-exponent", classify_args.max_exponent, "largest dyadic grid exponent");
  cls->add_option("--max-decade", classify_args.max_decade, "largest growth checkpoint decade");

  MomentArgs moment_args;
  auto* mom = app.add_subcommand("moment", "E f(T) with certified bounds");
  add_chain_options(mom, moment_args.chain);
  mom->add_option("fspec", moment_args.fspec, "moment function spec")->required();
  mom->add_option("--threshold", moment_args.threshold, "log divergence threshold");
  mom->add_flag("--no-require-cert", moment_args.no_require_cert, "accept window growth bounds for custom f");
  mom->add_option("--mc", moment_args.mc, "Monte Carlo cross-check with this many samples");
  mom->add_option("--cap", moment_args.cap, "Monte Carlo censoring cap")->check(CLI::PositiveNumber);

  DemoArgs demo_args;
  auto* demo = app.add_subcommand("demo", "counterexample pipelines");
  demo->add_option("name", demo_args.name, "sharp | exponential")->required()->check(CLI::IsMember({"sharp", "exponential"}));
  demo->add_option("--f", demo_args.fspec, "moment function for the sharp demo");
  demo->add_option("--p", demo_args.p, "chain parameter p");
  demo->add_option("--delta", demo_args.delta, "exponential rate for the exponential demo");
  demo->add_option("--kmax", demo_args.kmax, "number of witnesses for the sharp demo");
  demo->add_option("--threshold", demo_args.threshold, "log divergence threshold");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitInput;
  }

  try {
    if (*fpt) return cmd_fpt(common, fpt_args);
    if (*cls) return cmd_classify(common, classify_args);
    if (*mom) return cmd_moment(common, moment_args);
    if (*demo) return cmd_demo(common, demo_args);
  } catch (const InvalidArgument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInput;
  } catch (const PreconditionError& e) {
    std::cerr << "precondition failed: " << e.what() << '\n';
    return kExitVerdict;
  } catch (const NoSuchPath& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitVerdict;
  } catch (const BudgetExhausted& e) {
    std::cerr << "budget exhausted: " << e.what() << '\n';
    return kExitVerdict;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInput;
  }
  return kExitInput;
}
