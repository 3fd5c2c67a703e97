#include "icm/estimators.hpp"

#include <cmath>

#include "icm/divergence.hpp"

namespace icm {
namespace {

void require_matching(const ModelFamily& family, const PosteriorWeights& post) {
  if (post.size() != family.size()) {
    throw Error(ErrorKind::ShapeMismatch, "posterior and family sizes differ");
  }
}

double log_truth_likelihood(const Dataset& data, const Density& q) {
  double total = 0.0;
  for (std::size_t x : data.samples()) {
    if (q[x] <= 0.0) {
      throw Error(ErrorKind::ParameterDomain, "observation has zero mass under the true density");
    }
    total += std::log(q[x]);
  }
  return total;
}

}  // namespace

PosteriorWeights gibbs_posterior(const ModelFamily& family, const Dataset& data, double gamma) {
  if (!(gamma > 0.0) || !std::isfinite(gamma)) {
    throw Error(ErrorKind::ParameterDomain, "gamma must be positive");
  }
  std::vector<double> log_weight(family.size());
  for (std::size_t j = 0; j < family.size(); ++j) {
    const double ll = log_likelihood(family, j, data);
    log_weight[j] = ll == -kInf ? -kInf : std::log(family.prior(j)) + gamma * ll;
  }
  const double log_norm = log_sum_exp(log_weight);
  if (log_norm == -kInf) {
    throw Error(ErrorKind::AllModelsZeroLikelihood, "every model assigns zero mass to the data");
  }
  std::vector<double> mu(family.size());
  for (std::size_t j = 0; j < mu.size(); ++j) {
    mu[j] = log_weight[j] == -kInf ? 0.0 : std::exp(log_weight[j] - log_norm);
  }
  return PosteriorWeights::from_masses(std::move(mu));
}

std::vector<double> mdl_objectives(const ModelFamily& family, const Dataset& data, double lambda) {
  std::vector<double> objective(family.size());
  for (std::size_t k = 0; k < family.size(); ++k) {
    const double ll = log_likelihood(family, k, data);
    objective[k] = ll == -kInf ? kInf : -ll - lambda * std::log(family.prior(k));
  }
  return objective;
}

std::size_t argmin_objective(std::span<const double> objectives) {
  std::size_t best = objectives.size();
  for (std::size_t k = 0; k < objectives.size(); ++k) {
    if (objectives[k] == kInf) continue;
    if (best == objectives.size() || objectives[k] < objectives[best]) best = k;
  }
  if (best == objectives.size()) {
    throw Error(ErrorKind::AllModelsZeroLikelihood, "every model assigns zero mass to the data");
  }
  return best;
}

MdlChoice mdl_select(const ModelFamily& family, const Dataset& data, double lambda) {
  if (!(lambda > 0.0) || !std::isfinite(lambda)) {
    throw Error(ErrorKind::ParameterDomain, "lambda must be positive");
  }
  const auto objective = mdl_objectives(family, data, lambda);
  const std::size_t k = argmin_objective(objective);
  return {k, objective[k]};
}

PosteriorWeights icm_minimize(const ModelFamily& family, const Dataset& data, double lambda,
                              FeasibleSet feasible) {
  if (!(lambda > 0.0) || !std::isfinite(lambda)) {
    throw Error(ErrorKind::ParameterDomain, "lambda must be positive");
  }
  switch (feasible) {
    case FeasibleSet::FullSimplex:
      return gibbs_posterior(family, data, 1.0 / lambda);
    case FeasibleSet::PointMasses:
      return PosteriorWeights::point_mass(family.size(), mdl_select(family, data, lambda).index);
  }
  throw Error(ErrorKind::ParameterDomain, "unknown feasible set");
}

double empirical_risk(const ModelFamily& family, const Dataset& data, const PosteriorWeights& post,
                      const Density& q, double lambda) {
  require_matching(family, post);
  if (data.empty()) throw Error(ErrorKind::ParameterDomain, "empirical risk needs n >= 1");
  if (!(lambda >= 0.0)) throw Error(ErrorKind::ParameterDomain, "lambda must be nonnegative");
  const double n = static_cast<double>(data.size());
  const double log_q = log_truth_likelihood(data, q);
  double fit = 0.0;
  for (std::size_t j = 0; j < family.size(); ++j) {
    if (post[j] == 0.0) continue;
    const double ll = log_likelihood(family, j, data);
    if (ll == -kInf) return kInf;
    fit += post[j] * (log_q - ll);
  }
  return fit / n + (lambda / n) * kl_entropy(post, family);
}

double gibbs_empirical_risk_closed_form(const ModelFamily& family, const Dataset& data,
                                        const Density& q, double lambda) {
  if (data.empty()) throw Error(ErrorKind::ParameterDomain, "empirical risk needs n >= 1");
  if (!(lambda > 0.0)) throw Error(ErrorKind::ParameterDomain, "lambda must be positive");
  const double n = static_cast<double>(data.size());
  const double log_q = log_truth_likelihood(data, q);
  std::vector<double> exponent(family.size());
  for (std::size_t j = 0; j < family.size(); ++j) {
    const double ll = log_likelihood(family, j, data);
    exponent[j] = ll == -kInf ? -kInf : (ll - log_q) / lambda;
  }
  return -(lambda / n) * log_weighted_sum_exp(family.priors(), exponent);
}

double true_risk(const ModelFamily& family, const PosteriorWeights& post, const Density& q,
                 double lambda, std::size_t n) {
  require_matching(family, post);
  if (n == 0) throw Error(ErrorKind::ParameterDomain, "true risk needs n >= 1");
  double fit = 0.0;
  for (std::size_t j = 0; j < family.size(); ++j) {
    if (post[j] == 0.0) continue;
    const double d = kl(q, family.model(j));
    if (d == kInf) return kInf;
    fit += post[j] * d;
  }
  return fit + (lambda / static_cast<double>(n)) * kl_entropy(post, family);
}

Density posterior_mean_density(const ModelFamily& family, const PosteriorWeights& post) {
  require_matching(family, post);
  std::vector<double> mix(family.space_size(), 0.0);
  for (std::size_t j = 0; j < family.size(); ++j) {
    if (post[j] == 0.0) continue;
    const auto& p = family.model(j);
    for (std::size_t x = 0; x < mix.size(); ++x) mix[x] += post[j] * p[x];
  }
  return Density::from_masses(std::move(mix));
}

double posterior_expected_divergence(const ModelFamily& family, const PosteriorWeights& post,
                                     const Density& q, double rho, DivergenceKind kind) {
  require_matching(family, post);
  require_open_rho(rho);
  double total = 0.0;
  for (std::size_t j = 0; j < family.size(); ++j) {
    if (post[j] == 0.0) continue;
    const double d = kind == DivergenceKind::Rho ? rho_divergence(q, family.model(j), rho)
                                                 : renyi_divergence(q, family.model(j), rho);
    if (d == kInf) return kInf;
    total += post[j] * d;
  }
  return total;
}

double posterior_tail_mass(const ModelFamily& family, const PosteriorWeights& post,
                           const Density& q, double rho, double epsilon) {
  require_matching(family, post);
  require_open_rho(rho);
  std::vector<double> renyi(family.size());
  for (std::size_t j = 0; j < family.size(); ++j) renyi[j] = renyi_divergence(q, family.model(j), rho);
  return posterior_tail_mass(post, renyi, epsilon);
}

double posterior_tail_mass(const PosteriorWeights& post, std::span<const double> renyi_to_models,
                           double epsilon) {
  if (!(epsilon >= 0.0)) throw Error(ErrorKind::ParameterDomain, "epsilon must be nonnegative");
  double mass = 0.0;
  for (std::size_t j = 0; j < post.size(); ++j) {
    if (renyi_to_models[j] >= epsilon) mass += post[j];
  }
  return std::min(mass, 1.0);
}

}  // namespace icm
