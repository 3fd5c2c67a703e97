#pragma once

// Named, seeded experiments: the slow-convergence counterexample for
// standard MDL, the parametric-rate comparison of global and localized
// entropy on a Bernoulli net, and parameter sweeps over the bound verifier.

#include <cstddef>
#include <cstdint>
#include <vector>

#include "icm/bounds.hpp"
#include "icm/core.hpp"
#include "icm/io.hpp"

namespace icm {

/// Dirichlet(1, ..., 1) density on `size` points.
Density random_density(std::size_t size, Rng& rng);
/// `members` Dirichlet(1) densities with a uniform prior, or a Dirichlet(1)
/// prior when `random_prior` is set.
ModelFamily random_family(std::size_t space_size, std::size_t members, Rng& rng,
                          bool random_prior = false);

struct CounterexampleConfig {
  std::size_t n = 8;
  std::size_t m = 128;  ///< half the size of the sample space
  std::size_t replicates = 2000;
  std::uint64_t seed = 0;
  std::size_t threads = 0;
};

struct CounterexampleReport {
  std::size_t n = 0;
  std::size_t m = 0;
  std::size_t replicates = 0;
  std::size_t hits = 0;        ///< replicates where MDL selected q
  double p_hat = 0.0;          ///< empirical P(selected model = q)
  double se = 0.0;             ///< binomial standard error of p_hat
  double reference_bound = 0.0;    ///< e^{-1/2}
  double feasibility = 0.0;    ///< (m-n)^n / m^n
  double index_of_resolvability = 0.0;
};

/// Outcome of one replicate, for checking the selection logic.
struct CounterexampleDraw {
  bool selected_wrong = false;  ///< MDL picked one of the random subset densities
  bool some_member_survives = false;  ///< a subset density covers every observation
};

/// Throws ConfigInfeasible unless 1 <= n <= 16, m >= n and (m-n)^n/m^n >= 1/2.
void validate_counterexample(const CounterexampleConfig& config);

/// The family of replicate `replicate`: q (uniform on 2m points, prior 1/4)
/// first, then 2^n densities uniform on random m-subsets with prior 3/2^{n+2}.
ModelFamily counterexample_family(const CounterexampleConfig& config, Rng& rng);

CounterexampleDraw counterexample_replicate(const CounterexampleConfig& config,
                                            std::uint64_t replicate);
CounterexampleReport run_counterexample(const CounterexampleConfig& config);

struct RateDemoConfig {
  std::vector<std::size_t> ns{64, 256, 1024, 4096};
  std::uint64_t seed = 0;
  std::size_t replicates = 200;
  double lambda = 2.0;  ///< MDL penalty for the risk estimate
  double shrink = 0.5;
  std::size_t threads = 0;
};

struct RateDemoRow {
  std::size_t n = 0;
  std::size_t grid = 0;           ///< N; the net has N + 1 points
  double truth = 0.0;             ///< theta of the true Bernoulli density
  double global_entropy = 0.0;    ///< ln(N + 1)
  double localized_entropy = 0.0;
  double mdl_risk = 0.0;          ///< E D^Re_{1/2}(q || p_khat)
  double mdl_risk_se = 0.0;
};

struct RateDemoReport {
  std::vector<RateDemoRow> rows;
  double localized_ratio = 0.0;   ///< max / min localized entropy over the grid
  double global_growth = 0.0;     ///< last minus first global entropy
  bool localized_bounded = false; ///< localized_ratio <= 1.5 and global_growth > ln 2
};

/// Bernoulli densities (theta_j, 1 - theta_j) at theta_j = j/N, uniform prior.
ModelFamily bernoulli_net(std::size_t grid);
RateDemoReport run_parametric_rate_demo(const RateDemoConfig& config);

struct CurvatureRange {
  double lower;
  double upper;
};
/// min and max over grid points theta in [margin, 1 - margin], theta != truth,
/// of D^Re_{rho}(Bern(truth) || Bern(theta)) / (theta - truth)^2.
CurvatureRange bernoulli_curvature_range(double truth, double rho, std::size_t grid, double margin);

/// One report per grid point. Parameters iterate in the order lambda, rho,
/// gamma, alpha, beta, n, t, delta (last varies fastest), after the bound ids.
/// rho defaults to 1/lambda when the grid does not set it. An empty grid yields
/// no rows.
std::vector<BoundReport> run_sweep(const ModelFamily& family, const Density& q,
                                   const std::vector<BoundId>& bounds,
                                   const io::ParameterGrid& grid, const BoundSpec& base,
                                   const RunOptions& options);

}  // namespace icm
