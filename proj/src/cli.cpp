#include "icm/cli.hpp"

#include <iostream>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "icm/bounds.hpp"
#include "icm/complexity.hpp"
#include "icm/divergence.hpp"
#include "icm/estimators.hpp"
#include "icm/experiments.hpp"
#include "icm/io.hpp"
#include "icm/report.hpp"

namespace icm::cli {
namespace {

struct DivergenceArgs {
  std::string family;
  std::string kind;
  std::optional<double> rho;
  std::string from;
  std::string to;
};

struct FitArgs {
  std::string family;
  std::string data;
  double lambda = 1.0;
  double gamma = 1.0;
};

struct ResolvabilityArgs {
  std::string family;
  double lambda = 1.0;
  std::size_t n = 1;
  bool bayesian = false;
  bool index = false;
  bool prior_mass = false;
  bool critical = false;
  bool localized = false;
  std::optional<double> rho;
  std::optional<std::string> k;
  double shrink = 0.5;
};

struct VerifyArgs {
  std::string family;
  std::string bound;
  std::string bounds;  // sweep: comma separated
  std::string grid;
  std::optional<double> lambda, rho, gamma, alpha, beta, t, delta, shrink, lambda_prime;
  std::optional<std::size_t> n;
  std::optional<std::string> cover;
  std::string estimator = "mdl";
  std::size_t reps = 1000;
  std::optional<std::uint64_t> seed;
  bool exact = false;
  std::size_t threads = 0;
  std::optional<std::string> out;
};

struct CounterexampleArgs {
  std::size_t n = 8;
  std::optional<std::size_t> m;
  std::size_t reps = 2000;
  std::optional<std::uint64_t> seed;
  std::size_t threads = 0;
  std::optional<std::string> out;
};

struct RateDemoArgs {
  std::vector<std::size_t> ns{64, 256, 1024, 4096};
  std::optional<std::uint64_t> seed;
  std::size_t reps = 200;
  std::size_t threads = 0;
  std::optional<std::string> out;
};

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

const Density& require_truth(const io::FamilyFile& file) {
  if (!file.truth) throw UsageError("the family file has no \"truth\" density");
  return *file.truth;
}

std::uint64_t require_seed(const std::optional<std::uint64_t>& seed) {
  if (!seed) throw UsageError("--seed is required for stochastic subcommands");
  return *seed;
}

std::size_t resolve_model(const ModelFamily& family, const std::string& ref) {
  if (auto found = family.index_of(ref)) return *found;
  std::size_t pos = 0;
  try {
    const auto idx = std::stoull(ref, &pos);
    if (pos == ref.size() && idx < family.size()) return static_cast<std::size_t>(idx);
  } catch (const std::exception&) {
  }
  throw Error(ErrorKind::IndexOutOfRange, "unknown model '" + ref + "'");
}

const Density& resolve_density(const io::FamilyFile& file, const std::string& ref) {
  if (ref == "truth" && !file.family.index_of("truth")) return require_truth(file);
  return file.family.model(resolve_model(file.family, ref));
}

void emit(const std::optional<std::string>& path, const std::string& text, std::ostream& out) {
  if (path) {
    io::write_text(*path, text);
  } else {
    out << text;
  }
}

FeasibleSet parse_estimator(const std::string& name) {
  return name == "gibbs" ? FeasibleSet::FullSimplex : FeasibleSet::PointMasses;
}

int run_divergence(const DivergenceArgs& a, std::ostream& out) {
  const auto file = io::read_family(a.family);
  const Density& q = resolve_density(file, a.from);
  const Density& p = resolve_density(file, a.to);
  double value = 0.0;
  if (a.kind == "kl") {
    value = kl(q, p);
  } else if (a.kind == "hellinger") {
    value = hellinger_sq(q, p);
  } else {
    if (!a.rho) throw UsageError("--rho is required for --kind " + a.kind);
    value = a.kind == "rho" ? rho_divergence(q, p, *a.rho) : renyi_divergence(q, p, *a.rho);
  }
  out << format_number(value) << "\n";
  return kExitOk;
}

int run_fit_mdl(const FitArgs& a, std::ostream& out) {
  const auto file = io::read_family(a.family);
  const Dataset data = io::read_dataset(a.data, file.family.space_size());
  const auto choice = mdl_select(file.family, data, a.lambda);
  out << emit_csv({"model_id", "objective"},
                  {{file.family.id(choice.index), format_number(choice.objective)}});
  return kExitOk;
}

int run_fit_gibbs(const FitArgs& a, std::ostream& out) {
  const auto file = io::read_family(a.family);
  const Dataset data = io::read_dataset(a.data, file.family.space_size());
  const auto post = gibbs_posterior(file.family, data, a.gamma);
  std::vector<std::vector<std::string>> rows;
  for (std::size_t j = 0; j < post.size(); ++j) {
    rows.push_back({file.family.id(j), format_number(post[j])});
  }
  out << emit_csv({"model_id", "posterior_mass"}, rows);
  return kExitOk;
}

int run_resolvability(const ResolvabilityArgs& a, std::ostream& out) {
  const auto file = io::read_family(a.family);
  const Density& q = require_truth(file);
  const auto& family = file.family;
  const bool all = !(a.bayesian || a.index || a.prior_mass || a.critical || a.localized);
  std::vector<std::vector<std::string>> rows;
  if (all || a.bayesian) {
    rows.push_back({"bayesian_resolvability",
                    format_number(model_resolvability(family, q, a.lambda, a.n, FeasibleSet::FullSimplex))});
  }
  if (all || a.index) {
    const auto ir = index_of_resolvability(family, q, a.lambda, a.n);
    rows.push_back({"index_of_resolvability", format_number(ir.value)});
    rows.push_back({"index_argmin", family.id(ir.index)});
  }
  if (all || a.prior_mass) {
    rows.push_back({"prior_mass_bound",
                    format_number(prior_mass_resolvability_bound(family, q, a.lambda, a.n))});
  }
  if (all || a.critical) {
    rows.push_back({"critical_radius",
                    format_number(critical_prior_mass_radius(family, q, a.lambda, a.n).value)});
  }
  if (a.localized) {
    if (!a.rho || !a.k) throw UsageError("--localized needs --rho and --k");
    const std::size_t k = resolve_model(family, *a.k);
    rows.push_back({"localized_entropy",
                    format_number(localized_entropy_term(family, q, *a.rho, a.n, k, a.shrink))});
  }
  out << emit_csv({"quantity", "value"}, rows);
  return kExitOk;
}

BoundSpec base_spec(const VerifyArgs& a, const ModelFamily& family) {
  BoundSpec spec;
  if (a.lambda) spec.lambda = *a.lambda;
  spec.rho = a.rho.value_or(1.0 / spec.lambda);
  if (a.gamma) spec.gamma = *a.gamma;
  if (a.alpha) spec.alpha = *a.alpha;
  if (a.beta) spec.beta = *a.beta;
  if (a.n) spec.n = *a.n;
  if (a.t) spec.t = *a.t;
  if (a.delta) spec.delta = *a.delta;
  if (a.shrink) spec.shrink = *a.shrink;
  spec.lambda_prime = a.lambda_prime;
  spec.feasible = parse_estimator(a.estimator);
  if (a.cover) spec.cover = io::read_cover(*a.cover, family);
  return spec;
}

RunOptions run_options(const VerifyArgs& a) {
  RunOptions options;
  options.replicates = a.reps;
  options.seed = require_seed(a.seed);
  options.mode = a.exact ? Mode::Exact : Mode::Auto;
  options.threads = a.threads;
  return options;
}

BoundId require_bound(const std::string& name) {
  auto id = parse_bound_id(name);
  if (!id) throw UsageError("unknown bound id '" + name + "'");
  return *id;
}

int exit_for(const std::vector<BoundReport>& rows) {
  for (const auto& r : rows) {
    if (r.verdict == Verdict::Violated) return kExitViolation;
  }
  return kExitOk;
}

int run_verify(const VerifyArgs& a, std::ostream& out) {
  const BoundId id = require_bound(a.bound);
  const RunOptions options = run_options(a);
  const auto file = io::read_family(a.family);
  const Density& q = require_truth(file);
  BoundSpec spec = base_spec(a, file.family);
  spec.id = id;
  const std::vector<BoundReport> rows{verify(spec, file.family, q, options)};
  emit(a.out, emit_report(rows), out);
  return exit_for(rows);
}

int run_sweep_cmd(const VerifyArgs& a, std::ostream& out) {
  std::vector<BoundId> ids;
  std::stringstream ss(a.bounds);
  for (std::string name; std::getline(ss, name, ',');) {
    if (!name.empty()) ids.push_back(require_bound(name));
  }
  const RunOptions options = run_options(a);
  const auto file = io::read_family(a.family);
  const Density& q = require_truth(file);
  const auto grid = io::read_grid(a.grid);
  const auto rows = run_sweep(file.family, q, ids, grid, base_spec(a, file.family), options);
  emit(a.out, emit_report(rows), out);
  return exit_for(rows);
}

int run_counterexample_cmd(const CounterexampleArgs& a, std::ostream& out) {
  CounterexampleConfig config;
  config.n = a.n;
  if (!a.m) throw UsageError("--m is required");
  config.m = *a.m;
  config.replicates = a.reps;
  config.seed = require_seed(a.seed);
  config.threads = a.threads;
  const auto r = run_counterexample(config);
  const bool within = r.p_hat <= r.reference_bound + 3.0 * r.se;
  emit(a.out,
       emit_csv({"n", "m", "replicates", "hits", "p_hat", "se", "reference_bound", "feasibility",
                 "index_of_resolvability", "within_bound"},
                {{std::to_string(r.n), std::to_string(r.m), std::to_string(r.replicates),
                  std::to_string(r.hits), format_number(r.p_hat), format_number(r.se),
                  format_number(r.reference_bound), format_number(r.feasibility),
                  format_number(r.index_of_resolvability), within ? "true" : "false"}}),
       out);
  return within ? kExitOk : kExitViolation;
}

int run_rate_demo_cmd(const RateDemoArgs& a, std::ostream& out) {
  RateDemoConfig config;
  config.ns = a.ns;
  config.seed = require_seed(a.seed);
  config.replicates = a.reps;
  config.threads = a.threads;
  const auto report = run_parametric_rate_demo(config);
  std::vector<std::vector<std::string>> rows;
  for (const auto& row : report.rows) {
    rows.push_back({std::to_string(row.n), std::to_string(row.grid), format_number(row.truth),
                    format_number(row.global_entropy), format_number(row.localized_entropy),
                    format_number(row.mdl_risk), format_number(row.mdl_risk_se)});
  }
  emit(a.out,
       emit_csv({"n", "grid", "truth", "global_entropy", "localized_entropy", "mdl_risk",
                 "mdl_risk_se"},
                rows),
       out);
  return kExitOk;
}

void add_bound_options(CLI::App& sub, VerifyArgs& a) {
  sub.add_option("--family", a.family, "Family JSON file with a truth density")->required();
  sub.add_option("--lambda", a.lambda, "Regularization lambda");
  sub.add_option("--rho", a.rho, "Divergence order rho in (0,1); defaults to 1/lambda");
  sub.add_option("--gamma", a.gamma, "gamma");
  sub.add_option("--alpha", a.alpha, "alpha");
  sub.add_option("--beta", a.beta, "beta");
  sub.add_option("--n", a.n, "Sample size");
  sub.add_option("--t", a.t, "Deviation t");
  sub.add_option("--delta", a.delta, "Confidence delta");
  sub.add_option("--shrink", a.shrink, "Localization shrink factor");
  sub.add_option("--lambda-prime", a.lambda_prime, "lambda' of the empirical-risk lower bounds");
  sub.add_option("--cover", a.cover, "Cover JSON file");
  sub.add_option("--estimator", a.estimator, "mdl (point masses) or gibbs (full simplex)")
      ->check(CLI::IsMember({"mdl", "gibbs"}));
  sub.add_option("--reps", a.reps, "Monte Carlo replicates")->check(CLI::PositiveNumber);
  sub.add_option("--seed", a.seed, "Random seed (required)");
  sub.add_option("--threads", a.threads, "Worker threads (0 = all cores)");
  sub.add_option("--out", a.out, "Output CSV path (default: standard output)");
}

}  // namespace

int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Information complexity minimization: estimators, complexities and bound checks",
               "icm"};
  app.require_subcommand(1);

  DivergenceArgs div;
  auto* divergence = app.add_subcommand("divergence", "Divergence between two densities");
  divergence->add_option("--family", div.family, "Family JSON file")->required();
  divergence->add_option("--kind", div.kind, "kl | rho | renyi | hellinger")
      ->required()
      ->check(CLI::IsMember({"kl", "rho", "renyi", "hellinger"}));
  divergence->add_option("--rho", div.rho, "Order for rho/renyi");
  divergence->add_option("--from", div.from, "Model id, index or 'truth' (the q argument)")->required();
  divergence->add_option("--to", div.to, "Model id, index or 'truth'")->required();

  FitArgs fit;
  auto* fit_mdl = app.add_subcommand("fit-mdl", "Two-part-code MDL selection");
  fit_mdl->add_option("--family", fit.family, "Family JSON file")->required();
  fit_mdl->add_option("--data", fit.data, "Dataset JSON file")->required();
  fit_mdl->add_option("--lambda", fit.lambda, "Penalty lambda")->check(CLI::PositiveNumber);
  auto* fit_gibbs = app.add_subcommand("fit-gibbs", "Tempered (gamma) Bayesian posterior");
  fit_gibbs->add_option("--family", fit.family, "Family JSON file")->required();
  fit_gibbs->add_option("--data", fit.data, "Dataset JSON file")->required();
  fit_gibbs->add_option("--gamma", fit.gamma, "Temperature gamma")->check(CLI::PositiveNumber);

  ResolvabilityArgs res;
  auto* resolv = app.add_subcommand("resolvability", "Resolvabilities and critical radii");
  resolv->add_option("--family", res.family, "Family JSON file with a truth density")->required();
  resolv->add_option("--lambda", res.lambda, "lambda")->required();
  resolv->add_option("--n", res.n, "Sample size")->required()->check(CLI::PositiveNumber);
  resolv->add_flag("--bayesian", res.bayesian, "Bayesian resolvability");
  resolv->add_flag("--index", res.index, "Index of resolvability");
  resolv->add_flag("--prior-mass", res.prior_mass, "Prior-mass resolvability bound");
  resolv->add_flag("--critical", res.critical, "Critical prior-mass radius");
  resolv->add_flag("--localized", res.localized, "Localized entropy of model --k");
  resolv->add_option("--rho", res.rho, "rho for --localized");
  resolv->add_option("--k", res.k, "Model id or index for --localized");
  resolv->add_option("--shrink", res.shrink, "Shrink factor for --localized");

  VerifyArgs ver;
  auto* verify_cmd = app.add_subcommand("verify", "Check one bound on a family");
  add_bound_options(*verify_cmd, ver);
  verify_cmd->add_option("--bound", ver.bound, "Bound id")->required();
  verify_cmd->add_flag("--exact", ver.exact, "Force exact enumeration of all datasets");

  VerifyArgs swp;
  auto* sweep = app.add_subcommand("sweep", "Check bounds over a parameter grid");
  add_bound_options(*sweep, swp);
  sweep->add_option("--bounds", swp.bounds, "Comma-separated bound ids")->required();
  sweep->add_option("--grid", swp.grid, "Grid JSON file")->required();
  sweep->add_flag("--exact", swp.exact, "Force exact enumeration of all datasets");

  CounterexampleArgs cex;
  auto* counter = app.add_subcommand("counterexample", "Slow convergence of standard MDL");
  counter->add_option("--n", cex.n, "Sample size");
  counter->add_option("--m", cex.m, "Half the sample-space size")->required();
  counter->add_option("--reps", cex.reps, "Replicates")->check(CLI::PositiveNumber);
  counter->add_option("--seed", cex.seed, "Random seed (required)");
  counter->add_option("--threads", cex.threads, "Worker threads (0 = all cores)");
  counter->add_option("--out", cex.out, "Output CSV path");

  RateDemoArgs rate;
  auto* rate_demo = app.add_subcommand("rate-demo", "Global vs localized entropy on a Bernoulli net");
  rate_demo->add_option("--ns", rate.ns, "Comma-separated sample sizes")->delimiter(',');
  rate_demo->add_option("--seed", rate.seed, "Random seed (required)");
  rate_demo->add_option("--reps", rate.reps, "Replicates for the MDL risk estimate");
  rate_demo->add_option("--threads", rate.threads, "Worker threads (0 = all cores)");
  rate_demo->add_option("--out", rate.out, "Output CSV path");

  if (args.empty()) {
    err << app.help();
    return kExitUsage;
  }
  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << "\n";
    return kExitUsage;
  }

  try {
    if (divergence->parsed()) return run_divergence(div, out);
    if (fit_mdl->parsed()) return run_fit_mdl(fit, out);
    if (fit_gibbs->parsed()) return run_fit_gibbs(fit, out);
    if (resolv->parsed()) return run_resolvability(res, out);
    if (verify_cmd->parsed()) return run_verify(ver, out);
    if (sweep->parsed()) return run_sweep_cmd(swp, out);
    if (counter->parsed()) return run_counterexample_cmd(cex, out);
    if (rate_demo->parsed()) return run_rate_demo_cmd(rate, out);
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  err << app.help();
  return kExitUsage;
}

int main_entry(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return dispatch(args, std::cout, std::cerr);
}

}  // namespace icm::cli
