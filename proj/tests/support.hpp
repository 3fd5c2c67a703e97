#pragma once

// Hand-rolled random generators for property tests. Deliberately independent
// of the library's own generator so tests do not share its code paths.

#include <cmath>
#include <cstddef>
#include <random>
#include <string>
#include <vector>

#include "icm/core.hpp"

namespace testing_support {

using Gen = std::mt19937_64;

inline double uniform01(Gen& g) { return std::uniform_real_distribution<double>(0.0, 1.0)(g); }

inline std::size_t uniform_index(Gen& g, std::size_t lo, std::size_t hi) {
  return std::uniform_int_distribution<std::size_t>(lo, hi)(g);
}

/// Normalized masses; each entry is zeroed with probability `zero_prob` (at
/// least one entry stays positive).
inline std::vector<double> random_masses(Gen& g, std::size_t m, double zero_prob = 0.0) {
  std::vector<double> w(m);
  double total = 0.0;
  for (auto& v : w) {
    v = uniform01(g) < zero_prob ? 0.0 : -std::log(1.0 - uniform01(g));
    total += v;
  }
  if (total == 0.0) {
    w[uniform_index(g, 0, m - 1)] = 1.0;
    total = 1.0;
  }
  for (auto& v : w) v /= total;
  return w;
}

inline icm::Density random_density(Gen& g, std::size_t m, double zero_prob = 0.0) {
  return icm::Density::from_masses(random_masses(g, m, zero_prob));
}

inline icm::ModelFamily random_family(Gen& g, std::size_t m, std::size_t n_models,
                                      double zero_prob = 0.0) {
  std::vector<icm::Density> models;
  for (std::size_t j = 0; j < n_models; ++j) models.push_back(random_density(g, m, zero_prob));
  auto prior = random_masses(g, n_models);
  for (auto& p : prior) p = std::max(p, 1e-6);
  double total = 0.0;
  for (double p : prior) total += p;
  for (auto& p : prior) p /= total;
  return icm::ModelFamily(std::move(models), std::move(prior));
}

inline icm::PosteriorWeights random_posterior(Gen& g, std::size_t n_models, double zero_prob = 0.0) {
  return icm::PosteriorWeights::from_masses(random_masses(g, n_models, zero_prob));
}

/// n draws from the support of q (uniform over the support, not from q).
inline icm::Dataset random_dataset_on_support(Gen& g, const icm::Density& q, std::size_t n) {
  std::vector<std::size_t> support;
  for (std::size_t x = 0; x < q.size(); ++x) {
    if (q[x] > 0.0) support.push_back(x);
  }
  std::vector<std::size_t> xs(n);
  for (auto& x : xs) x = support[uniform_index(g, 0, support.size() - 1)];
  return icm::Dataset(std::move(xs), q.size());
}

/// Calls fn(dataset, probability) for every dataset in {0..M-1}^n with positive
/// probability under q^n.
template <class Fn>
void for_each_dataset(const icm::Density& q, std::size_t n, Fn&& fn) {
  const std::size_t m = q.size();
  std::vector<std::size_t> x(n, 0);
  while (true) {
    double prob = 1.0;
    for (std::size_t v : x) prob *= q[v];
    if (prob > 0.0) fn(icm::Dataset(x, m), prob);
    std::size_t i = 0;
    for (; i < n; ++i) {
      if (++x[i] < m) break;
      x[i] = 0;
    }
    if (i == n) break;
  }
}

inline std::string fixture(const std::string& name) {
  return std::string(ICM_TEST_DATA_DIR) + "/fixtures/" + name;
}

}  // namespace testing_support
