#include "icm/bounds.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>

#include "icm/divergence.hpp"
#include "icm/hull.hpp"
#include "parallel.hpp"

namespace icm {
namespace {

struct NamedBound {
  BoundId id;
  std::string_view name;
};

constexpr std::array<NamedBound, 18> kBoundNames{{
    {BoundId::FundamentalProbability, "thm2.1-prob"},
    {BoundId::FundamentalExpectation, "thm2.1-exp"},
    {BoundId::FundamentalMoment, "lemma2.1"},
    {BoundId::General, "thm3.1"},
    {BoundId::SimplifiedGeneral, "cor3.1"},
    {BoundId::Global, "cor3.2"},
    {BoundId::GlobalMdl, "thm4.1"},
    {BoundId::GlobalGibbs, "thm5.1"},
    {BoundId::Localized, "thm4.2"},
    {BoundId::LambdaOne, "cor3.3"},
    {BoundId::LambdaOneMdl, "thm4.3"},
    {BoundId::LambdaOneBayes, "thm5.2"},
    {BoundId::Weak, "thm3.2"},
    {BoundId::WeakMdl, "thm4.4"},
    {BoundId::Tail, "cor5.1"},
    {BoundId::Partition, "thm5.3"},
    {BoundId::RiskLowerBound, "lemmaA.1"},
    {BoundId::RiskLowerBoundCover, "lemmaA.2"},
}};

constexpr double kExactSlackTolerance = 1e-9;
// Slack needed to absorb rounding when lhs and rhs agree exactly in theory.
constexpr double kRhoEdgeTolerance = 1e-12;
constexpr std::uint64_t kTestFunctionStream = ~std::uint64_t{0};

[[noreturn]] void domain(const std::string& what) {
  throw Error(ErrorKind::ParameterDomain, what);
}

bool is_global(BoundId id) {
  return id == BoundId::Global || id == BoundId::GlobalMdl || id == BoundId::GlobalGibbs;
}
bool is_lambda_one(BoundId id) {
  return id == BoundId::LambdaOne || id == BoundId::LambdaOneMdl || id == BoundId::LambdaOneBayes;
}
bool is_weak(BoundId id) { return id == BoundId::Weak || id == BoundId::WeakMdl; }
bool is_fundamental(BoundId id) {
  return id == BoundId::FundamentalProbability || id == BoundId::FundamentalExpectation ||
         id == BoundId::FundamentalMoment;
}

// Parameters after the bound's own conventions are applied (fixed lambda, rho,
// or estimator).
struct Effective {
  BoundId id;
  double lambda;
  double rho;
  double gamma;
  double alpha;
  double beta;
  double lambda_prime;
  std::size_t n;
  double t;
  double delta;
  FeasibleSet feasible;
};

Effective effective(const BoundSpec& spec) {
  Effective e{spec.id,    spec.lambda, spec.rho, spec.gamma, spec.alpha, spec.beta,
              spec.lambda_prime.value_or(spec.lambda),       spec.n,     spec.t,
              spec.delta, spec.feasible};
  switch (spec.id) {
    case BoundId::SimplifiedGeneral:
      e.rho = 1.0 / e.lambda;
      break;
    case BoundId::GlobalMdl:
    case BoundId::LambdaOneMdl:
    case BoundId::WeakMdl:
      e.feasible = FeasibleSet::PointMasses;
      break;
    case BoundId::Localized:
      e.feasible = FeasibleSet::PointMasses;
      e.rho = 1.0 / e.lambda;
      break;
    case BoundId::GlobalGibbs:
    case BoundId::LambdaOneBayes:
    case BoundId::Tail:
    case BoundId::Partition:
      e.feasible = FeasibleSet::FullSimplex;
      break;
    default:
      break;
  }
  if (is_lambda_one(spec.id) || is_weak(spec.id) || spec.id == BoundId::Partition) {
    e.lambda = 1.0;
  }
  return e;
}

bool rho_open(double rho) { return rho > 0.0 && rho < 1.0; }

// Per-dataset statistic plus the exact right-hand side.
struct Evaluator {
  std::function<double(const Dataset&)> value;
  double rhs = 0.0;
  bool indicator = false;
};

PosteriorWeights estimate(const ModelFamily& family, const Dataset& data, const Effective& e) {
  return icm_minimize(family, data, e.lambda, e.feasible);
}

double posterior_renyi(const PosteriorWeights& post, const std::vector<double>& renyi) {
  return weighted_sum(post.masses(), renyi);
}

std::vector<double> draw_test_function(std::size_t size, std::uint64_t seed) {
  Rng rng({seed, kTestFunctionStream});
  std::vector<double> f(size);
  for (auto& v : f) v = rng.uniform(-1.0, 1.0);
  return f;
}

Evaluator fundamental_evaluator(const Effective& e, const ModelFamily& family, const Density& q) {
  const auto loss = rho_log_ratio_loss(family, q, e.rho);
  const double cn = c_n_general(family, q, loss, e.n, e.alpha, e.beta);
  const double nd = static_cast<double>(e.n);

  // A_j = ln E_q e^{-beta l_j}; the product beta * inf is taken as 0 at beta = 0.
  std::vector<double> log_moment(family.size());
  std::vector<double> exponent(q.size());
  for (std::size_t j = 0; j < family.size(); ++j) {
    for (std::size_t x = 0; x < q.size(); ++x) {
      exponent[x] = e.beta == 0.0 ? 0.0 : -e.beta * loss[j][x];
    }
    log_moment[j] = log_weighted_sum_exp(q.masses(), exponent);
  }

  auto l_hat = [&family, loss, log_moment, e, nd](const Dataset& data) {
    const auto post = estimate(family, data, e);
    double total = 0.0;
    for (std::size_t j = 0; j < family.size(); ++j) {
      if (post[j] == 0.0) continue;
      double fit = 0.0;
      for (std::size_t x : data.samples()) fit -= loss[j][x];
      const double moment = e.alpha == 0.0 ? 0.0 : -nd * e.alpha * log_moment[j];
      total += post[j] * (fit + moment);
    }
    return total - kl_entropy(post, family);
  };

  Evaluator ev;
  switch (e.id) {
    case BoundId::FundamentalProbability: {
      const double threshold = e.t + nd * cn;
      ev.value = [l_hat, threshold](const Dataset& data) {
        return l_hat(data) > threshold ? 1.0 : 0.0;
      };
      ev.rhs = std::exp(-e.t);
      ev.indicator = true;
      break;
    }
    case BoundId::FundamentalExpectation:
      ev.value = [l_hat, nd](const Dataset& data) { return l_hat(data) / nd; };
      ev.rhs = cn;
      break;
    default:
      ev.value = [l_hat](const Dataset& data) { return std::exp(l_hat(data)); };
      ev.rhs = std::exp(nd * cn);
      break;
  }
  return ev;
}

Evaluator make_evaluator(const BoundSpec& spec, const Effective& e, const ModelFamily& family,
                         const Density& q, std::uint64_t seed) {
  if (is_fundamental(e.id)) return fundamental_evaluator(e, family, q);

  Evaluator ev;
  const double nd = static_cast<double>(e.n);
  switch (e.id) {
    case BoundId::General: {
      const auto renyi = renyi_to_models(family, q, e.rho);
      const double scale = e.alpha * e.rho * (1.0 - e.rho);
      const double coef = (e.gamma - e.rho) / scale;
      const double lp = e.lambda_prime;
      ev.value = [&family, &q, renyi, coef, lp, e](const Dataset& data) {
        const auto post = estimate(family, data, e);
        double v = posterior_renyi(post, renyi);
        if (coef != 0.0) v += coef * empirical_risk(family, data, post, q, lp);
        return v;
      };
      const double res = model_resolvability(family, q, e.lambda, e.n, e.feasible);
      ev.rhs = (e.gamma * res + c_rho_n_alpha(family, q, e.rho, e.n, e.alpha)) / scale;
      return ev;
    }
    case BoundId::SimplifiedGeneral:
    case BoundId::Global:
    case BoundId::GlobalMdl:
    case BoundId::GlobalGibbs:
    case BoundId::Localized:
    case BoundId::LambdaOne:
    case BoundId::LambdaOneMdl:
    case BoundId::LambdaOneBayes: {
      const auto renyi = renyi_to_models(family, q, e.rho);
      ev.value = [&family, renyi, e](const Dataset& data) {
        return posterior_renyi(estimate(family, data, e), renyi);
      };
      if (e.id == BoundId::SimplifiedGeneral) {
        ev.rhs = model_resolvability(family, q, e.lambda, e.n, e.feasible) / (1.0 - e.rho);
      } else if (is_global(e.id)) {
        ev.rhs = rhs_global(family, q, e.lambda, e.rho, e.n, e.feasible);
      } else if (e.id == BoundId::Localized) {
        ev.rhs = rhs_localized(family, q, e.lambda, e.n).localized;
      } else {
        const FamilyCover cover = spec.cover.value_or(FamilyCover::singletons(family.size()));
        ev.rhs = rhs_lambda_one(family, q, e.rho, e.gamma, e.n, cover, e.feasible);
      }
      return ev;
    }
    case BoundId::Weak:
    case BoundId::WeakMdl: {
      const auto f = spec.test_function.value_or(draw_test_function(q.size(), seed));
      std::vector<double> model_mean(family.size(), 0.0);
      for (std::size_t j = 0; j < family.size(); ++j) {
        for (std::size_t x = 0; x < q.size(); ++x) model_mean[j] += family.model(j)[x] * f[x];
      }
      ev.value = [&family, f, model_mean, e, nd](const Dataset& data) {
        const auto post = estimate(family, data, e);
        double empirical = 0.0;
        for (std::size_t x : data.samples()) empirical += f[x];
        return std::abs(weighted_sum(post.masses(), model_mean) - empirical / nd);
      };
      ev.rhs = rhs_weak(family, q, e.n, e.feasible);
      return ev;
    }
    case BoundId::Tail: {
      const auto renyi = renyi_to_models(family, q, e.rho);
      const auto tail = rhs_tail(family, q, e.lambda, e.rho, e.n, e.t, e.delta);
      ev.value = [&family, renyi, tail, e](const Dataset& data) {
        const auto post = estimate(family, data, e);
        return posterior_tail_mass(post, renyi, tail.radius) > tail.tail_bound ? 1.0 : 0.0;
      };
      ev.rhs = e.delta;
      ev.indicator = true;
      return ev;
    }
    case BoundId::Partition: {
      const FamilyCover partition = spec.cover.value_or(FamilyCover::singletons(family.size()));
      ev.rhs = rhs_partition(family, q, e.rho, e.gamma, e.n, partition);
      std::vector<double> hull_inf;
      for (const auto& block : partition.blocks()) {
        hull_inf.push_back(inf_renyi_over_hull(q, block_members(family, block), e.rho));
      }
      ev.value = [&family, blocks = partition.blocks(), hull_inf](const Dataset& data) {
        const auto post = gibbs_posterior(family, data, 1.0);
        std::vector<double> block_post;
        for (const auto& block : blocks) {
          double mass = 0.0;
          for (std::size_t j : block) mass += post[j];
          block_post.push_back(mass);
        }
        return weighted_sum(block_post, hull_inf);
      };
      return ev;
    }
    case BoundId::RiskLowerBound:
    case BoundId::RiskLowerBoundCover: {
      const double lp = e.lambda_prime;
      ev.value = [&family, &q, lp, e](const Dataset& data) {
        return -empirical_risk(family, data, estimate(family, data, e), q, lp);
      };
      if (e.id == BoundId::RiskLowerBound) {
        ev.rhs = -risk_lower_bound(family, q, lp, e.n);
      } else {
        const FamilyCover cover = spec.cover.value_or(FamilyCover::singletons(family.size()));
        ev.rhs = cover_complexity_term(family, cover, lp, e.n) / nd;
      }
      return ev;
    }
    default:
      break;
  }
  domain("unhandled bound id");
}

Expectation exact_expectation(const Density& q, std::size_t n,
                              const std::function<double(const Dataset&)>& value) {
  const std::size_t m = q.size();
  std::vector<std::size_t> x(n, 0);
  Expectation out;
  out.mode = Mode::Exact;
  const std::size_t total = dataset_count(m, n);
  double mean = 0.0;
  for (std::size_t idx = 0; idx < total; ++idx) {
    double prob = 1.0;
    for (std::size_t i = 0; i < n && prob > 0.0; ++i) prob *= q[x[i]];
    if (prob > 0.0) {
      const double v = value(Dataset(x, m));
      mean += v == 0.0 ? 0.0 : prob * v;
      ++out.count;
    }
    for (std::size_t i = 0; i < n; ++i) {
      if (++x[i] < m) break;
      x[i] = 0;
    }
  }
  out.mean = mean;
  return out;
}

Expectation monte_carlo_expectation(const Density& q, std::size_t n,
                                    const std::function<double(const Dataset&)>& value,
                                    const RunOptions& options, bool indicator) {
  const std::size_t reps = options.replicates;
  if (reps == 0) domain("replicates must be positive");
  std::vector<double> values(reps);
  detail::parallel_for(reps, options.threads, [&](std::size_t r) {
    values[r] = value(sample_dataset(q, n, RngSpec{options.seed, r}));
  });

  Expectation out;
  out.mode = Mode::MonteCarlo;
  out.count = reps;
  const double r = static_cast<double>(reps);
  double sum = 0.0;
  for (double v : values) sum += v;
  out.mean = sum / r;
  if (!std::isfinite(out.mean)) {
    out.se = kInf;
    return out;
  }
  if (indicator) {
    out.se = std::sqrt(out.mean * (1.0 - out.mean) / r);
  } else if (reps > 1) {
    double ss = 0.0;
    for (double v : values) ss += (v - out.mean) * (v - out.mean);
    out.se = std::sqrt(ss / (r - 1.0) / r);
  }
  return out;
}

Expectation expectation(const Density& q, std::size_t n,
                        const std::function<double(const Dataset&)>& value,
                        const RunOptions& options, bool indicator) {
  const std::size_t count = dataset_count(q.size(), n);
  if (options.mode == Mode::Exact && count > kExactDatasetCap) {
    throw Error(ErrorKind::ProductSpaceTooLarge, "exact mode needs M^n <= 100000 datasets");
  }
  const bool exact =
      options.mode == Mode::Exact || (options.mode == Mode::Auto && count <= kExactDatasetCap);
  return exact ? exact_expectation(q, n, value) : monte_carlo_expectation(q, n, value, options, indicator);
}

BoundReport make_report(const Effective& e, const Expectation& lhs, double rhs) {
  BoundReport report;
  report.bound_id = std::string(to_string(e.id));
  report.mode = lhs.mode;
  report.n = e.n;
  report.lambda = e.lambda;
  report.rho = e.rho;
  report.gamma = e.gamma;
  report.alpha = e.alpha;
  report.t = e.t;
  report.delta = e.delta;
  report.lhs = lhs.mean;
  report.lhs_se = lhs.se;
  report.rhs = rhs;
  report.slack = rhs == kInf ? kInf : rhs - lhs.mean;
  report.replicates = lhs.count;
  report.verdict = judge(lhs.mean, lhs.se, rhs, lhs.mode);
  return report;
}

void check_cover(const FamilyCover& cover, const ModelFamily& family) {
  for (const auto& block : cover.blocks()) {
    for (std::size_t j : block) {
      if (j >= family.size()) throw Error(ErrorKind::InvalidCover, "cover names a model outside the family");
    }
  }
}

}  // namespace

std::string_view to_string(BoundId id) {
  for (const auto& nb : kBoundNames) {
    if (nb.id == id) return nb.name;
  }
  return "unknown";
}

std::optional<BoundId> parse_bound_id(std::string_view text) {
  for (const auto& nb : kBoundNames) {
    if (nb.name == text) return nb.id;
  }
  return std::nullopt;
}

std::vector<BoundId> all_bound_ids() {
  std::vector<BoundId> ids;
  for (const auto& nb : kBoundNames) ids.push_back(nb.id);
  return ids;
}

std::string_view to_string(Mode mode) {
  switch (mode) {
    case Mode::Auto: return "auto";
    case Mode::Exact: return "exact";
    case Mode::MonteCarlo: return "monte-carlo";
  }
  return "unknown";
}

std::string_view to_string(Verdict verdict) {
  switch (verdict) {
    case Verdict::Holds: return "holds";
    case Verdict::HoldsWithinNoise: return "holds-within-noise";
    case Verdict::Violated: return "violated";
  }
  return "unknown";
}

Verdict judge(double lhs, double lhs_se, double rhs, Mode mode) {
  if (rhs == kInf) return Verdict::Holds;
  if (!(lhs < kInf)) return Verdict::Violated;
  const double slack = rhs - lhs;
  if (mode == Mode::Exact) return slack < -kExactSlackTolerance ? Verdict::Violated : Verdict::Holds;
  if (slack >= 0.0) return Verdict::Holds;
  return slack < -3.0 * lhs_se - kExactSlackTolerance ? Verdict::Violated : Verdict::HoldsWithinNoise;
}

std::size_t dataset_count(std::size_t space_size, std::size_t n) {
  std::size_t count = 1;
  for (std::size_t i = 0; i < n; ++i) {
    if (count > kExactDatasetCap / std::max<std::size_t>(space_size, 1)) return kExactDatasetCap + 1;
    count *= space_size;
  }
  return count;
}

double model_resolvability(const ModelFamily& family, const Density& q, double lambda,
                           std::size_t n, FeasibleSet feasible) {
  if (feasible == FeasibleSet::PointMasses) return index_of_resolvability(family, q, lambda, n).value;
  try {
    return bayesian_resolvability(family, q, lambda, n).value;
  } catch (const Error& err) {
    if (err.kind() == ErrorKind::AllInfiniteKL) return kInf;
    throw;
  }
}

double rhs_global(const ModelFamily& family, const Density& q, double lambda, double rho,
                  std::size_t n, FeasibleSet estimator) {
  if (!(lambda > 1.0)) domain("global bound needs lambda > 1");
  if (!(rho > 0.0 && rho <= 1.0 / lambda + kRhoEdgeTolerance)) domain("global bound needs 0 < rho <= 1/lambda");
  if (n == 0) domain("n must be at least 1");
  return model_resolvability(family, q, lambda, n, estimator) / (rho * (lambda - 1.0));
}

LocalizedRhs rhs_localized(const ModelFamily& family, const Density& q, double lambda,
                           std::size_t n) {
  if (!(lambda > 1.0)) domain("localized bound needs lambda > 1");
  if (n == 0) domain("n must be at least 1");
  const double rho = 1.0 / lambda;
  const double scale = lambda / static_cast<double>(n);
  const auto kls = kl_to_models(family, q);
  double best_local = kInf;
  double best_global = kInf;
  for (std::size_t k = 0; k < family.size(); ++k) {
    if (kls[k] == kInf) continue;
    const double local = localized_entropy_term(family, q, rho, n, k, 0.5);
    best_local = std::min(best_local, kls[k] + scale * local);
    best_global = std::min(best_global, kls[k] - scale * std::log(family.prior(k)));
  }
  const double factor = 2.0 / (1.0 - rho);
  return {factor * best_local, factor * best_global};
}

double rhs_lambda_one(const ModelFamily& family, const Density& q, double rho, double gamma,
                      std::size_t n, const FamilyCover& cover, FeasibleSet estimator) {
  if (!rho_open(rho)) throw Error(ErrorKind::RhoOutOfRange, "rho must lie in (0, 1)");
  if (!(gamma >= 1.0)) domain("lambda = 1 bounds need gamma >= 1");
  if (n == 0) domain("n must be at least 1");
  check_cover(cover, family);
  const double denom = rho * (1.0 - rho);
  const double first = gamma * model_resolvability(family, q, 1.0, n, estimator) / denom;
  const double s = (gamma - 1.0) / (gamma - rho);
  const double second = (gamma - rho) / (denom * static_cast<double>(n)) *
                        cover_complexity_term(family, cover, s, n);
  return first + second;
}

double rhs_weak(const ModelFamily& family, const Density& q, std::size_t n, FeasibleSet feasible) {
  if (n == 0) domain("n must be at least 1");
  const double a = model_resolvability(family, q, 1.0, n, feasible) + std::log(2.0) / static_cast<double>(n);
  return 2.0 * a + std::sqrt(2.0 * a);
}

TailRhs rhs_tail(const ModelFamily& family, const Density& q, double lambda, double rho,
                 std::size_t n, double t, double delta) {
  if (!(lambda > 1.0)) domain("tail bound needs lambda > 1");
  if (!(rho > 0.0 && rho <= 1.0 / lambda + kRhoEdgeTolerance)) domain("tail bound needs 0 < rho <= 1/lambda");
  if (!(t >= 0.0) || t == kInf) domain("tail bound needs finite t >= 0");
  if (!(delta > 0.0 && delta < 1.0)) domain("tail bound needs delta in (0, 1)");
  if (n == 0) domain("n must be at least 1");
  const double eps = critical_prior_mass_radius(family, q, lambda, n).value;
  const double radius = (4.0 * eps + 2.0 * t) / (rho * (lambda - 1.0) * delta);
  // 1/(1+e^z) written to stay accurate for large z.
  const double z = static_cast<double>(n) * t / lambda;
  const double tail = std::exp(-z) / (1.0 + std::exp(-z));
  return {radius, tail, eps};
}

double rhs_partition(const ModelFamily& family, const Density& q, double rho, double gamma,
                     std::size_t n, const FamilyCover& partition) {
  if (!partition.is_partition()) throw Error(ErrorKind::NotAPartition, "blocks must be disjoint");
  if (!rho_open(rho)) throw Error(ErrorKind::RhoOutOfRange, "rho must lie in (0, 1)");
  if (!(gamma >= 1.0)) domain("partition bound needs gamma >= 1");
  if (n == 0) domain("n must be at least 1");
  check_cover(partition, family);
  const double nd = static_cast<double>(n);
  const double s = (gamma - 1.0) / (gamma - rho);
  std::vector<double> decay_terms;
  std::vector<double> fit_terms;
  for (const auto& block : partition.blocks()) {
    const double mass = block_prior(family, block);
    decay_terms.push_back(s * std::log(mass));
    const double sup_kl = sup_kl_over_hull(q, block_members(family, block));
    fit_terms.push_back(sup_kl == kInf ? -kInf : std::log(mass) - nd * sup_kl);
  }
  const double fit = log_sum_exp(fit_terms);
  if (fit == -kInf) return kInf;
  return ((gamma - rho) * log_sum_exp(decay_terms) - gamma * fit) / (rho * (1.0 - rho) * nd);
}

double risk_lower_bound(const ModelFamily& family, const Density& q, double lambda_prime,
                        std::size_t n) {
  if (!(lambda_prime > 0.0) || lambda_prime == kInf) domain("lambda' must be positive and finite");
  if (n == 0) domain("n must be at least 1");
  const double inv = 1.0 / lambda_prime;
  const double nd = static_cast<double>(n);
  std::vector<double> terms(family.size());
  for (std::size_t j = 0; j < family.size(); ++j) {
    const auto& p = family.model(j);
    double moment = 0.0;
    for (std::size_t x = 0; x < q.size(); ++x) {
      if (q[x] > 0.0 && p[x] > 0.0) {
        moment += std::exp((1.0 - inv) * std::log(q[x]) + inv * std::log(p[x]));
      }
    }
    terms[j] = moment > 0.0 ? std::log(family.prior(j)) + nd * std::log(moment) : -kInf;
  }
  const double lse = log_sum_exp(terms);
  if (lse == -kInf) return kInf;
  return -lambda_prime / nd * lse;
}

void validate_spec(const BoundSpec& spec, const ModelFamily& family) {
  const Effective e = effective(spec);
  if (e.n == 0) domain("n must be at least 1");
  if (!(e.lambda > 0.0) || e.lambda == kInf) domain("lambda must be positive and finite");
  if (spec.cover) check_cover(*spec.cover, family);
  const bool uses_rho = e.id != BoundId::RiskLowerBound && e.id != BoundId::RiskLowerBoundCover;
  if (uses_rho && !rho_open(e.rho)) throw Error(ErrorKind::RhoOutOfRange, "rho must lie in (0, 1)");

  switch (e.id) {
    case BoundId::FundamentalProbability:
      if (!std::isfinite(e.t)) domain("t must be finite");
      [[fallthrough]];
    case BoundId::FundamentalExpectation:
    case BoundId::FundamentalMoment:
      if (!std::isfinite(e.alpha) || !std::isfinite(e.beta)) domain("alpha and beta must be finite");
      break;
    case BoundId::General: {
      if (!(e.alpha > 0.0)) domain("general bound needs alpha > 0");
      if (!(e.gamma >= e.rho)) domain("general bound needs gamma >= rho");
      if (e.gamma == e.rho) {
        if (std::abs(e.lambda * e.gamma - 1.0) > kRhoEdgeTolerance) {
          domain("gamma = rho requires lambda gamma = 1");
        }
      } else {
        const double lp = (e.lambda * e.gamma - 1.0) / (e.gamma - e.rho);
        if (lp < 0.0) domain("general bound needs lambda' = (lambda gamma - 1)/(gamma - rho) >= 0");
      }
      break;
    }
    case BoundId::SimplifiedGeneral:
    case BoundId::Localized:
      if (!(e.lambda > 1.0)) domain("bound needs lambda > 1");
      break;
    case BoundId::Global:
    case BoundId::GlobalMdl:
    case BoundId::GlobalGibbs:
      if (!(e.lambda > 1.0)) domain("global bound needs lambda > 1");
      if (e.rho > 1.0 / e.lambda + kRhoEdgeTolerance) domain("global bound needs rho <= 1/lambda");
      break;
    case BoundId::LambdaOne:
    case BoundId::LambdaOneMdl:
    case BoundId::LambdaOneBayes:
      if (!(e.gamma >= 1.0)) domain("lambda = 1 bounds need gamma >= 1");
      break;
    case BoundId::Weak:
    case BoundId::WeakMdl:
      if (spec.test_function) {
        if (spec.test_function->size() != family.space_size()) {
          throw Error(ErrorKind::ShapeMismatch, "test function has the wrong length");
        }
        for (double v : *spec.test_function) {
          if (!(v >= -1.0 && v <= 1.0)) domain("test function values must lie in [-1, 1]");
        }
      }
      break;
    case BoundId::Tail:
      if (!(e.lambda > 1.0)) domain("tail bound needs lambda > 1");
      if (e.rho > 1.0 / e.lambda + kRhoEdgeTolerance) domain("tail bound needs rho <= 1/lambda");
      if (!(e.t >= 0.0) || !std::isfinite(e.t)) domain("tail bound needs finite t >= 0");
      if (!(e.delta > 0.0 && e.delta < 1.0)) domain("tail bound needs delta in (0, 1)");
      break;
    case BoundId::Partition:
      if (!(e.gamma >= 1.0)) domain("partition bound needs gamma >= 1");
      if (spec.cover && !spec.cover->is_partition()) {
        throw Error(ErrorKind::NotAPartition, "blocks must be disjoint");
      }
      break;
    case BoundId::RiskLowerBound:
      if (!(e.lambda_prime >= 1.0) || !std::isfinite(e.lambda_prime)) domain("lambda' must be >= 1");
      break;
    case BoundId::RiskLowerBoundCover:
      if (!(e.lambda_prime >= 0.0 && e.lambda_prime <= 1.0)) domain("lambda' must lie in [0, 1]");
      break;
  }
}

BoundReport verify(const BoundSpec& spec, const ModelFamily& family, const Density& q,
                   const RunOptions& options) {
  if (q.size() != family.space_size()) {
    throw Error(ErrorKind::ShapeMismatch, "truth and family live on different spaces");
  }
  validate_spec(spec, family);
  Effective e = effective(spec);
  if (e.id == BoundId::General && e.gamma != e.rho) {
    e.lambda_prime = (e.lambda * e.gamma - 1.0) / (e.gamma - e.rho);
  } else if (e.id == BoundId::General) {
    e.lambda_prime = 0.0;
  }
  Evaluator ev = make_evaluator(spec, e, family, q, options.seed);
  auto value = ev.value;
  if (ev.rhs == kInf) {
    // The bound is vacuous; datasets on which the estimator is undefined are
    // tolerated rather than reported as errors.
    value = [inner = ev.value](const Dataset& data) {
      try {
        return inner(data);
      } catch (const Error& err) {
        if (err.kind() == ErrorKind::AllModelsZeroLikelihood) return kInf;
        throw;
      }
    };
  }
  const Expectation lhs = expectation(q, e.n, value, options, ev.indicator);
  return make_report(e, lhs, ev.rhs);
}

BoundReport verify_risk_lower_bound(const ModelFamily& family, const Density& q, double lambda_prime,
                            std::size_t n, const BoundSpec& estimator, const RunOptions& options) {
  BoundSpec spec = estimator;
  spec.id = BoundId::RiskLowerBound;
  spec.lambda_prime = lambda_prime;
  spec.n = n;
  BoundReport report = verify(spec, family, q, options);
  if (risk_lower_bound(family, q, lambda_prime, n) < -1e-12) report.verdict = Verdict::Violated;
  return report;
}

}  // namespace icm
