#pragma once

#include <span>

#include "icm/core.hpp"

namespace icm {

enum class FeasibleSet {
  FullSimplex,  ///< every posterior density: the minimizer is the Gibbs posterior
  PointMasses,  ///< deterministic selection: the minimizer is two-part-code MDL
};

enum class DivergenceKind { Rho, Renyi };

struct MdlChoice {
  std::size_t index;
  double objective;  ///< sum_i ln(1/p_k(X_i)) + lambda ln(1/pi_k)
};

/// Tempered posterior mu_j proportional to pi_j p_j(X)^gamma. Models with zero
/// likelihood get weight exactly 0. Throws AllModelsZeroLikelihood when every
/// model vanishes on some observation, ParameterDomain unless gamma > 0.
PosteriorWeights gibbs_posterior(const ModelFamily& family, const Dataset& data, double gamma);

/// Two-part code length of each model, +inf for zero likelihood.
std::vector<double> mdl_objectives(const ModelFamily& family, const Dataset& data, double lambda);

/// Minimizer of the two-part code length; lowest index wins ties.
MdlChoice mdl_select(const ModelFamily& family, const Dataset& data, double lambda);

/// Index of the minimum entry, lowest index on ties. Throws
/// AllModelsZeroLikelihood if every entry is +inf.
std::size_t argmin_objective(std::span<const double> objectives);

/// Minimizer of the regularized empirical risk over the given feasible set.
PosteriorWeights icm_minimize(const ModelFamily& family, const Dataset& data, double lambda,
                              FeasibleSet feasible);

/// Regularized empirical risk
///   (1/n) sum_j mu_j sum_i ln(q(X_i)/p_j(X_i)) + (lambda/n) KL(mu || pi).
/// +inf if a weighted model vanishes on an observation. Requires n >= 1,
/// lambda >= 0 and q(X_i) > 0 for every observation.
double empirical_risk(const ModelFamily& family, const Dataset& data, const PosteriorWeights& post,
                      const Density& q, double lambda);

/// -(lambda/n) ln E_pi exp((1/lambda) sum_i ln(p(X_i)/q(X_i))): the closed form
/// of the empirical risk attained by the Gibbs posterior at gamma = 1/lambda.
double gibbs_empirical_risk_closed_form(const ModelFamily& family, const Dataset& data,
                                        const Density& q, double lambda);

/// True risk sum_j mu_j KL(q || p_j) + (lambda/n) KL(mu || pi).
double true_risk(const ModelFamily& family, const PosteriorWeights& post, const Density& q,
                 double lambda, std::size_t n);

/// Mixture sum_j mu_j p_j.
Density posterior_mean_density(const ModelFamily& family, const PosteriorWeights& post);

/// sum_j mu_j D(q || p_j) for the rho- or Renyi divergence.
double posterior_expected_divergence(const ModelFamily& family, const PosteriorWeights& post,
                                     const Density& q, double rho, DivergenceKind kind);

/// Posterior mass of {j : D^Re_rho(q || p_j) >= epsilon}.
double posterior_tail_mass(const ModelFamily& family, const PosteriorWeights& post,
                           const Density& q, double rho, double epsilon);

/// Same, with the per-model Renyi divergences precomputed.
double posterior_tail_mass(const PosteriorWeights& post, std::span<const double> renyi_to_models,
                           double epsilon);

}  // namespace icm
