#include "icm/core.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace icm {
namespace {

std::string describe_deviation(double sum) {
  std::ostringstream os;
  os.precision(17);
  os << "sum " << sum << " deviates from 1 by " << (sum - 1.0);
  return os.str();
}

// SplitMix64 finalizer.
std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

// Murmur3 finalizer, used for key derivation so keys and outputs do not share
// a mixing function.
std::uint64_t fmix64(std::uint64_t k) {
  k ^= k >> 33;
  k *= 0xFF51AFD7ED558CCDULL;
  k ^= k >> 33;
  k *= 0xC4CEB9FE1A85EC53ULL;
  k ^= k >> 33;
  return k;
}

constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

}  // namespace

SampleSpace::SampleSpace(std::size_t size) : size_(size) {
  if (size == 0) throw Error(ErrorKind::ShapeMismatch, "sample space must have at least one point");
}

Density Density::from_masses(std::vector<double> mass) {
  if (mass.empty()) throw Error(ErrorKind::ShapeMismatch, "density over an empty sample space");
  double sum = 0.0;
  for (std::size_t x = 0; x < mass.size(); ++x) {
    if (!(mass[x] >= 0.0) || !std::isfinite(mass[x])) {
      throw Error(ErrorKind::NegativeMass,
                  "entry " + std::to_string(x) + " is negative or not finite");
    }
    sum += mass[x];
  }
  if (std::abs(sum - 1.0) > kNormTolerance) {
    throw Error(ErrorKind::SumOutOfTolerance, describe_deviation(sum));
  }
  return Density(std::move(mass));
}

Density Density::uniform(std::size_t size) {
  SampleSpace space(size);
  return Density(std::vector<double>(space.size(), 1.0 / static_cast<double>(size)));
}

Density Density::point_mass(std::size_t size, std::size_t at) {
  SampleSpace space(size);
  if (at >= size) throw Error(ErrorKind::IndexOutOfRange, "point mass outside the sample space");
  std::vector<double> mass(size, 0.0);
  mass[at] = 1.0;
  return Density(std::move(mass));
}

ModelFamily::ModelFamily(std::vector<Density> models, std::vector<double> prior,
                         std::vector<std::string> ids)
    : models_(std::move(models)), prior_(std::move(prior)), ids_(std::move(ids)) {
  if (models_.empty()) throw Error(ErrorKind::ShapeMismatch, "model family is empty");
  if (prior_.size() != models_.size()) {
    throw Error(ErrorKind::ShapeMismatch, "prior length differs from the number of models");
  }
  const std::size_t m = models_.front().size();
  for (std::size_t j = 0; j < models_.size(); ++j) {
    if (models_[j].size() != m) {
      throw Error(ErrorKind::ShapeMismatch,
                  "model " + std::to_string(j) + " lives on a different sample space");
    }
  }
  double sum = 0.0;
  for (std::size_t j = 0; j < prior_.size(); ++j) {
    if (!(prior_[j] > 0.0) || !std::isfinite(prior_[j])) {
      throw Error(ErrorKind::PriorNotPositive, "prior " + std::to_string(j) + " is not positive");
    }
    sum += prior_[j];
  }
  if (std::abs(sum - 1.0) > kNormTolerance) {
    throw Error(ErrorKind::SumOutOfTolerance, "prior " + describe_deviation(sum));
  }
  if (ids_.empty()) {
    ids_.reserve(models_.size());
    for (std::size_t j = 0; j < models_.size(); ++j) ids_.push_back("m" + std::to_string(j));
  } else if (ids_.size() != models_.size()) {
    throw Error(ErrorKind::ShapeMismatch, "id list length differs from the number of models");
  }
}

std::optional<std::size_t> ModelFamily::index_of(std::string_view id) const {
  auto it = std::find(ids_.begin(), ids_.end(), id);
  if (it == ids_.end()) return std::nullopt;
  return static_cast<std::size_t>(it - ids_.begin());
}

ModelFamily validate_family(const std::vector<std::vector<double>>& masses,
                            const std::vector<double>& priors, std::vector<std::string> ids) {
  if (masses.empty()) throw Error(ErrorKind::ShapeMismatch, "no models given");
  if (priors.size() != masses.size()) {
    throw Error(ErrorKind::ShapeMismatch, "prior length differs from the number of models");
  }
  std::vector<Density> models;
  models.reserve(masses.size());
  for (std::size_t j = 0; j < masses.size(); ++j) {
    if (masses[j].size() != masses.front().size()) {
      throw Error(ErrorKind::ShapeMismatch, "model " + std::to_string(j) + " has a different length");
    }
    try {
      models.push_back(Density::from_masses(masses[j]));
    } catch (const Error& e) {
      throw Error(e.kind(), "model " + std::to_string(j) + ": " + e.what());
    }
  }
  return ModelFamily(std::move(models), priors, std::move(ids));
}

PosteriorWeights PosteriorWeights::from_masses(std::vector<double> mu) {
  if (mu.empty()) throw Error(ErrorKind::ShapeMismatch, "empty posterior");
  double sum = 0.0;
  for (std::size_t j = 0; j < mu.size(); ++j) {
    if (!(mu[j] >= 0.0) || !std::isfinite(mu[j])) {
      throw Error(ErrorKind::NegativeMass, "posterior weight " + std::to_string(j) + " is negative");
    }
    sum += mu[j];
  }
  if (std::abs(sum - 1.0) > kNormTolerance) {
    throw Error(ErrorKind::SumOutOfTolerance, "posterior " + describe_deviation(sum));
  }
  return PosteriorWeights(std::move(mu));
}

PosteriorWeights PosteriorWeights::point_mass(std::size_t size, std::size_t at) {
  if (at >= size) throw Error(ErrorKind::IndexOutOfRange, "point mass outside the family");
  std::vector<double> mu(size, 0.0);
  mu[at] = 1.0;
  return PosteriorWeights(std::move(mu));
}

PosteriorWeights PosteriorWeights::prior_of(const ModelFamily& family) {
  return PosteriorWeights({family.priors().begin(), family.priors().end()});
}

Dataset::Dataset(std::vector<std::size_t> samples, std::size_t space_size)
    : samples_(std::move(samples)), space_size_(space_size) {
  SampleSpace space(space_size);
  for (std::size_t i = 0; i < samples_.size(); ++i) {
    if (samples_[i] >= space.size()) {
      throw Error(ErrorKind::IndexOutOfRange,
                  "sample " + std::to_string(i) + " is outside the sample space");
    }
  }
}

Rng::Rng(RngSpec spec) : key_(fmix64(spec.seed ^ fmix64(spec.stream + kGolden))) {}

std::uint64_t Rng::next_u64() {
  ++counter_;
  return mix64(key_ + counter_ * kGolden);
}

double Rng::uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

double Rng::uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

std::uint64_t Rng::below(std::uint64_t bound) {
  // Rejection sampling keeps every residue equally likely.
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                              std::numeric_limits<std::uint64_t>::max() % bound;
  std::uint64_t r;
  do {
    r = next_u64();
  } while (r >= limit);
  return r % bound;
}

std::size_t Rng::categorical(std::span<const double> weights) {
  double total = 0.0;
  for (double w : weights) total += w;
  const double u = uniform() * total;
  double cum = 0.0;
  std::size_t last_positive = 0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    if (weights[i] <= 0.0) continue;
    cum += weights[i];
    last_positive = i;
    if (u < cum) return i;
  }
  return last_positive;
}

double Rng::exponential() { return -std::log1p(-uniform()); }

Dataset sample_dataset(const Density& q, std::size_t n, RngSpec spec) {
  Rng rng(spec);
  return sample_dataset(q, n, rng);
}

Dataset sample_dataset(const Density& q, std::size_t n, Rng& rng) {
  std::vector<std::size_t> samples(n);
  for (auto& s : samples) s = rng.categorical(q.masses());
  return Dataset(std::move(samples), q.size());
}

double log_likelihood(const ModelFamily& family, std::size_t j, const Dataset& data) {
  if (j >= family.size()) throw Error(ErrorKind::IndexOutOfRange, "model index out of range");
  const Density& p = family.model(j);
  double total = 0.0;
  for (std::size_t x : data.samples()) {
    if (p[x] <= 0.0) return -kInf;
    total += std::log(p[x]);
  }
  return total;
}

double kl_entropy(const PosteriorWeights& post, const ModelFamily& family) {
  if (post.size() != family.size()) {
    throw Error(ErrorKind::ShapeMismatch, "posterior and family sizes differ");
  }
  double total = 0.0;
  for (std::size_t j = 0; j < post.size(); ++j) {
    if (post[j] > 0.0) total += post[j] * std::log(post[j] / family.prior(j));
  }
  return std::max(total, 0.0);
}

double convex_duality_gap(const PosteriorWeights& post, std::span<const double> f,
                          const ModelFamily& family) {
  if (post.size() != family.size() || f.size() != family.size()) {
    throw Error(ErrorKind::ShapeMismatch, "posterior, f and family sizes differ");
  }
  const double log_partition = log_weighted_sum_exp(family.priors(), f);
  double gap = kl_entropy(post, family) + log_partition - weighted_sum(post.masses(), f);
  // The gap is a KL divergence; rounding can leave it a few ulps below zero.
  return std::max(gap, 0.0);
}

double log_sum_exp(std::span<const double> values) {
  double hi = -kInf;
  for (double v : values) hi = std::max(hi, v);
  if (hi == -kInf || hi == kInf) return hi;
  double acc = 0.0;
  for (double v : values) acc += std::exp(v - hi);
  return hi + std::log(acc);
}

double log_weighted_sum_exp(std::span<const double> weights, std::span<const double> values) {
  std::vector<double> terms;
  terms.reserve(values.size());
  for (std::size_t j = 0; j < values.size(); ++j) {
    if (weights[j] > 0.0) terms.push_back(std::log(weights[j]) + values[j]);
  }
  return log_sum_exp(terms);
}

double weighted_sum(std::span<const double> weights, std::span<const double> values) {
  double total = 0.0;
  for (std::size_t j = 0; j < values.size(); ++j) {
    if (weights[j] != 0.0) total += weights[j] * values[j];
  }
  return total;
}

}  // namespace icm
