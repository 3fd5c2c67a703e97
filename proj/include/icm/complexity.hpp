#pragma once

// Complexity functionals of a finite model family relative to a true density:
// resolvabilities, prior-mass radii, upper-bracketing radii/numbers, and the
// log-moment correction terms of the fundamental inequality.

#include <cstddef>
#include <span>
#include <vector>

#include "icm/core.hpp"

namespace icm {

using Block = std::vector<std::size_t>;

/// Cover of the family index set by blocks. Validated on construction: every
/// index appears in some block, blocks are nonempty and duplicate-free, and a
/// partition additionally has pairwise disjoint blocks.
class FamilyCover {
 public:
  FamilyCover(std::vector<Block> blocks, std::size_t family_size, bool is_partition);

  static FamilyCover singletons(std::size_t family_size);
  static FamilyCover whole(std::size_t family_size);

  const std::vector<Block>& blocks() const noexcept { return blocks_; }
  std::size_t size() const noexcept { return blocks_.size(); }
  bool is_partition() const noexcept { return is_partition_; }

 private:
  std::vector<Block> blocks_;
  bool is_partition_;
};

struct CriticalRadius {
  double value;
  double achieved_at;  ///< the KL breakpoint whose ball realizes the radius
};

struct Resolvability {
  double value;
  PosteriorWeights weights;  ///< minimizing weights (proportional to pi e^{-(n/lambda) KL})
};

struct IndexOfResolvability {
  double value;
  std::size_t index;  ///< minimizing model, lowest index on ties
};

struct BracketingNumber {
  std::size_t count;
  bool exact;                ///< false when the greedy fallback was used
  std::vector<Block> blocks;  ///< a cover attaining `count`
};

/// KL(q || p_j) for every member.
std::vector<double> kl_to_models(const ModelFamily& family, const Density& q);
/// Scaled Renyi divergence D^Re_rho(q || p_j) for every member.
std::vector<double> renyi_to_models(const ModelFamily& family, const Density& q, double rho);

/// min_k [KL(q || p_k) + (lambda/n) ln(1/pi_k)].
IndexOfResolvability index_of_resolvability(const ModelFamily& family, const Density& q,
                                            double lambda, std::size_t n);

/// -(lambda/n) ln E_pi exp(-(n/lambda) KL(q || p)), with its optimal weights.
/// Throws AllInfiniteKL when no member is absolutely continuous w.r.t. q.
Resolvability bayesian_resolvability(const ModelFamily& family, const Density& q, double lambda,
                                     std::size_t n);

/// inf_eps [eps - (lambda/n) ln pi(KL <= eps)], exact over the KL breakpoints.
double prior_mass_resolvability_bound(const ModelFamily& family, const Density& q, double lambda,
                                      std::size_t n);

/// inf{eps : eps >= -(lambda/n) ln pi(KL <= eps)}, exact over the KL breakpoints.
CriticalRadius critical_prior_mass_radius(const ModelFamily& family, const Density& q,
                                          double lambda, std::size_t n);
CriticalRadius critical_prior_mass_radius(std::span<const double> kl_values,
                                          std::span<const double> prior, double lambda,
                                          std::size_t n);

/// Prior mass of a set of indices.
double block_prior(const ModelFamily& family, const Block& block);

/// sum_x max_{j in block} p_j(x) - 1 (zero for singletons).
double upper_bracketing_radius(const ModelFamily& family, const Block& block);

/// Minimal number of pointwise-max envelopes f with E_q(f/q) <= 1 + eps covering
/// the family. Exhaustive (exact) for at most kExactBracketingLimit members,
/// greedy merge otherwise.
inline constexpr std::size_t kExactBracketingLimit = 12;
BracketingNumber upper_bracketing_number(const ModelFamily& family, const Density& q, double eps);

/// ln sum_j pi(B_j)^s (1 + r_ub(B_j))^n.
double cover_complexity_term(const ModelFamily& family, const FamilyCover& cover, double s,
                             std::size_t n);

/// ln sum_j pi_j exp(-shrink rho(1-rho) n D^Re_rho(q||p_j)) - ln pi_k.
double localized_entropy_term(const ModelFamily& family, const Density& q, double rho,
                              std::size_t n, std::size_t k, double shrink);

/// (1/n) ln E_pi exp(-rho(1-rho)(1-alpha) n D^Re_rho(q || p)).
double c_rho_n_alpha(const ModelFamily& family, const Density& q, double rho, std::size_t n,
                     double alpha);

/// Per-(model, point) loss table, loss[j][x]; +inf entries allowed.
using LossTable = std::vector<std::vector<double>>;

/// The loss rho ln(q(x)/p_j(x)); zero where q(x) = 0, +inf where p_j(x) = 0 < q(x).
LossTable rho_log_ratio_loss(const ModelFamily& family, const Density& q, double rho);

/// (1/n) ln E_pi (E_q e^{-l} / (E_q e^{-beta l})^alpha)^n.
double c_n_general(const ModelFamily& family, const Density& q, const LossTable& loss,
                   std::size_t n, double alpha, double beta);

}  // namespace icm
