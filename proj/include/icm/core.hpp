#pragma once

// Finite-probability foundations: densities on a finite sample space (counting
// measure), model families with a strictly positive prior, posterior weights
// over the family, observed datasets and a counter-based random generator.
//
// Extended reals are carried as IEEE doubles; +infinity is a legitimate value
// (e.g. KL divergence without absolute continuity) and no routine in this
// library produces NaN from well-formed inputs. The convention 0 * ln 0 = 0 and
// 0 * (+-inf) = 0 is used whenever a zero weight multiplies a divergent term.

#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "icm/error.hpp"

namespace icm {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// Absolute tolerance for "sums to one" checks on user-supplied masses.
inline constexpr double kNormTolerance = 1e-9;

class SampleSpace {
 public:
  explicit SampleSpace(std::size_t size);

  std::size_t size() const noexcept { return size_; }

 private:
  std::size_t size_;
};

/// Probability mass function on {0, ..., M-1}. Validated on construction and
/// never renormalized.
class Density {
 public:
  static Density from_masses(std::vector<double> mass);
  static Density uniform(std::size_t size);
  static Density point_mass(std::size_t size, std::size_t at);

  std::size_t size() const noexcept { return mass_.size(); }
  double operator[](std::size_t x) const { return mass_[x]; }
  std::span<const double> masses() const noexcept { return mass_; }
  SampleSpace space() const { return SampleSpace(mass_.size()); }

  friend bool operator==(const Density&, const Density&) = default;

 private:
  explicit Density(std::vector<double> mass) : mass_(std::move(mass)) {}

  std::vector<double> mass_;
};

/// Finite list of densities on a common space with a strictly positive prior
/// summing to one. Duplicate densities are allowed.
class ModelFamily {
 public:
  ModelFamily(std::vector<Density> models, std::vector<double> prior,
              std::vector<std::string> ids = {});

  std::size_t size() const noexcept { return models_.size(); }
  std::size_t space_size() const noexcept { return models_.front().size(); }
  const Density& model(std::size_t j) const { return models_[j]; }
  const std::vector<Density>& models() const noexcept { return models_; }
  double prior(std::size_t j) const { return prior_[j]; }
  std::span<const double> priors() const noexcept { return prior_; }
  const std::string& id(std::size_t j) const { return ids_[j]; }
  const std::vector<std::string>& ids() const noexcept { return ids_; }
  std::optional<std::size_t> index_of(std::string_view id) const;

 private:
  std::vector<Density> models_;
  std::vector<double> prior_;
  std::vector<std::string> ids_;
};

/// Builds a family from raw rectangular lists. Throws NegativeMass,
/// PriorNotPositive or SumOutOfTolerance naming the offending index.
ModelFamily validate_family(const std::vector<std::vector<double>>& masses,
                            const std::vector<double>& priors,
                            std::vector<std::string> ids = {});

/// Posterior probability mu_j of each family member. The density with respect
/// to the prior is w_j = mu_j / pi_j.
class PosteriorWeights {
 public:
  static PosteriorWeights from_masses(std::vector<double> mu);
  static PosteriorWeights point_mass(std::size_t size, std::size_t at);
  static PosteriorWeights prior_of(const ModelFamily& family);

  std::size_t size() const noexcept { return mu_.size(); }
  double operator[](std::size_t j) const { return mu_[j]; }
  std::span<const double> masses() const noexcept { return mu_; }

 private:
  explicit PosteriorWeights(std::vector<double> mu) : mu_(std::move(mu)) {}

  std::vector<double> mu_;
};

class Dataset {
 public:
  Dataset(std::vector<std::size_t> samples, std::size_t space_size);

  std::size_t size() const noexcept { return samples_.size(); }
  bool empty() const noexcept { return samples_.empty(); }
  std::size_t space_size() const noexcept { return space_size_; }
  std::size_t operator[](std::size_t i) const { return samples_[i]; }
  std::span<const std::size_t> samples() const noexcept { return samples_; }

 private:
  std::vector<std::size_t> samples_;
  std::size_t space_size_;
};

struct RngSpec {
  std::uint64_t seed = 0;
  std::uint64_t stream = 0;
};

/// Counter-based generator: draw k of (seed, stream) is a pure function of the
/// triple, so replicate r of an experiment uses stream r and parallel and serial
/// runs see identical numbers on every platform.
class Rng {
 public:
  explicit Rng(RngSpec spec);

  std::uint64_t next_u64();
  /// Uniform on [0, 1) with 53 random bits.
  double uniform();
  double uniform(double lo, double hi);
  /// Uniform integer in [0, bound). bound must be positive.
  std::uint64_t below(std::uint64_t bound);
  /// Index drawn proportionally to nonnegative `weights`.
  std::size_t categorical(std::span<const double> weights);
  /// Standard exponential variate.
  double exponential();

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

Dataset sample_dataset(const Density& q, std::size_t n, RngSpec spec);
Dataset sample_dataset(const Density& q, std::size_t n, Rng& rng);

/// Sum_i ln p_j(X_i); -inf when some observation has zero mass under p_j.
double log_likelihood(const ModelFamily& family, std::size_t j, const Dataset& data);

/// KL-entropy of posterior weights against the prior: sum_j mu_j ln(mu_j / pi_j).
double kl_entropy(const PosteriorWeights& post, const ModelFamily& family);

/// KL(mu || pi) + ln E_pi e^f - E_mu f. Nonnegative; zero exactly at the Gibbs
/// weights mu_j proportional to pi_j e^{f_j}.
double convex_duality_gap(const PosteriorWeights& post, std::span<const double> f,
                          const ModelFamily& family);

// Numerical helpers shared by every module.

/// ln sum_j exp(v_j), max-shifted. Returns -inf for an empty list or when every
/// entry is -inf; +inf if any entry is +inf.
double log_sum_exp(std::span<const double> values);

/// ln sum_j w_j exp(v_j) for nonnegative weights; zero weights are skipped.
double log_weighted_sum_exp(std::span<const double> weights, std::span<const double> values);

/// sum_j w_j v_j with the 0 * inf = 0 convention.
double weighted_sum(std::span<const double> weights, std::span<const double> values);

}  // namespace icm
