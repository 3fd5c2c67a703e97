#pragma once

// Right-hand sides of the convergence bounds for information complexity
// minimization, and a verifier that estimates each left-hand side (exactly by
// enumerating every dataset when M^n is small, by seeded Monte Carlo
// otherwise) and renders a verdict.
//
// Every bound is verified in the orientation  lhs <= rhs  where lhs is an
// expectation over datasets and rhs is computed exactly. Bounds whose natural
// form has a data-dependent right side (the fundamental inequality, the general
// bound with its empirical-risk term, the lower bounds on the empirical risk)
// are rearranged so that all data-dependent parts sit in lhs; see README.

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "icm/complexity.hpp"
#include "icm/core.hpp"
#include "icm/estimators.hpp"

namespace icm {

// Command-line names of each bound are given by to_string / parse_bound_id.
enum class BoundId {
  FundamentalProbability,  // high-probability form of the fundamental inequality
  FundamentalExpectation,  // its expectation form
  FundamentalMoment,       // the exponential-moment inequality it rests on
  General,                 // general bound with the empirical-risk correction
  SimplifiedGeneral,       // rho = 1/lambda special case
  Global,                  // global resolvability bound, estimator chosen by the caller
  GlobalMdl,               // ... for two-part-code MDL
  GlobalGibbs,             // ... for the generalized Bayesian posterior
  Localized,               // MDL bound with localized entropy
  LambdaOne,               // lambda = 1 bound with a cover, estimator chosen by the caller
  LambdaOneMdl,            // ... for standard MDL
  LambdaOneBayes,          // ... for the standard Bayesian posterior
  Weak,                    // weak-convergence bound, estimator chosen by the caller
  WeakMdl,                 // ... for standard MDL
  Tail,                    // posterior concentration (tail mass) bound
  Partition,               // Bayesian posterior over a partition, hull divergences
  RiskLowerBound,          // lower bound on the expected empirical risk, lambda' >= 1
  RiskLowerBoundCover,     // cover-based lower bound, lambda' in [0, 1]
};

std::string_view to_string(BoundId id);
std::optional<BoundId> parse_bound_id(std::string_view text);
std::vector<BoundId> all_bound_ids();

enum class Mode { Auto, Exact, MonteCarlo };
enum class Verdict { Holds, HoldsWithinNoise, Violated };

std::string_view to_string(Mode mode);
std::string_view to_string(Verdict verdict);

struct BoundSpec {
  BoundId id = BoundId::Global;
  double lambda = 2.0;
  double rho = 0.5;
  double gamma = 1.0;
  double alpha = 1.0;
  double beta = 1.0;
  std::size_t n = 10;
  double t = 1.0;
  double delta = 0.2;
  double shrink = 0.5;
  /// lambda' of the empirical-risk lower bounds; defaults to lambda.
  std::optional<double> lambda_prime;
  FeasibleSet feasible = FeasibleSet::PointMasses;
  std::optional<FamilyCover> cover;
  /// Test function f : X -> [-1, 1] for the weak-convergence bound. Drawn
  /// uniformly from the seed when absent.
  std::optional<std::vector<double>> test_function;
};

struct RunOptions {
  std::size_t replicates = 1000;
  std::uint64_t seed = 0;
  Mode mode = Mode::Auto;
  /// 0 selects the hardware concurrency.
  std::size_t threads = 0;
};

/// Largest number of datasets M^n that exact mode enumerates.
inline constexpr std::size_t kExactDatasetCap = 100000;

struct BoundReport {
  std::string bound_id;
  Mode mode = Mode::Exact;
  std::size_t n = 0;
  double lambda = 0.0;
  double rho = 0.0;
  double gamma = 0.0;
  double alpha = 0.0;
  double t = 0.0;
  double delta = 0.0;
  double lhs = 0.0;
  double lhs_se = 0.0;
  double rhs = 0.0;
  double slack = 0.0;
  std::size_t replicates = 0;
  Verdict verdict = Verdict::Holds;
};

/// violated iff slack < -3 se (Monte Carlo) or slack < -1e-9 (exact).
Verdict judge(double lhs, double lhs_se, double rhs, Mode mode);

/// Mean and standard error of a per-dataset statistic.
struct Expectation {
  double mean = 0.0;
  double se = 0.0;
  std::size_t count = 0;
  Mode mode = Mode::Exact;
};

/// Number of datasets M^n, saturating at kExactDatasetCap + 1.
std::size_t dataset_count(std::size_t space_size, std::size_t n);

// Right-hand sides.

/// inf over the feasible set of the true risk: the index of resolvability for
/// point masses, the Bayesian resolvability for the full simplex. +inf when no
/// model has finite KL.
double model_resolvability(const ModelFamily& family, const Density& q, double lambda,
                           std::size_t n, FeasibleSet feasible);

/// resolvability / (rho (lambda - 1)); lambda > 1, 0 < rho <= 1/lambda.
double rhs_global(const ModelFamily& family, const Density& q, double lambda, double rho,
                  std::size_t n, FeasibleSet estimator);

struct LocalizedRhs {
  double localized;    ///< (2/(1-rho)) min_k [KL_k + (lambda/n) localized entropy_k]
  double global_form;  ///< same formula with ln(1/pi_k) in place of the localized entropy
};
/// rho = 1/lambda, lambda > 1, shrink 1/2 in the localized entropy.
LocalizedRhs rhs_localized(const ModelFamily& family, const Density& q, double lambda,
                           std::size_t n);

/// gamma resolvability(lambda=1)/(rho(1-rho)) +
/// ((gamma-rho)/(rho(1-rho)n)) ln sum_j pi(B_j)^{(gamma-1)/(gamma-rho)} (1 + r_ub(B_j))^n.
double rhs_lambda_one(const ModelFamily& family, const Density& q, double rho, double gamma,
                      std::size_t n, const FamilyCover& cover, FeasibleSet estimator);

/// 2 A_n + sqrt(2 A_n) with A_n = resolvability(lambda=1) + ln 2 / n.
double rhs_weak(const ModelFamily& family, const Density& q, std::size_t n, FeasibleSet feasible);

struct TailRhs {
  double radius;        ///< (4 eps_{pi,n} + 2t) / (rho (lambda-1) delta)
  double tail_bound;    ///< 1 / (1 + e^{nt/lambda})
  double critical;      ///< eps_{pi,n}
};
TailRhs rhs_tail(const ModelFamily& family, const Density& q, double lambda, double rho,
                 std::size_t n, double t, double delta);

/// [(gamma-rho) ln sum_j pi(B_j)^{(gamma-1)/(gamma-rho)}
///   - gamma ln sum_j pi(B_j) e^{-n sup_{co(B_j)} KL}] / (rho(1-rho)n).
double rhs_partition(const ModelFamily& family, const Density& q, double rho, double gamma,
                     std::size_t n, const FamilyCover& partition);

/// -(lambda'/n) ln E_pi (E_q (p/q)^{1/lambda'})^n, nonnegative for lambda' >= 1.
double risk_lower_bound(const ModelFamily& family, const Density& q, double lambda_prime,
                        std::size_t n);

/// Checks parameter domains for the bound; throws ParameterDomain.
void validate_spec(const BoundSpec& spec, const ModelFamily& family);

BoundReport verify(const BoundSpec& spec, const ModelFamily& family, const Density& q,
                   const RunOptions& options);

/// E_X R_{lambda'}(w_X) >= -(lambda'/n) ln E_pi E_q^n (p/q)^{1/lambda'} >= 0, reported
/// as lhs = -E_X R_{lambda'} and rhs = -(lower bound). Violated also when the
/// lower bound is below -1e-12.
BoundReport verify_risk_lower_bound(const ModelFamily& family, const Density& q, double lambda_prime,
                            std::size_t n, const BoundSpec& estimator, const RunOptions& options);

}  // namespace icm
