#include "icm/complexity.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>

#include "icm/divergence.hpp"

namespace icm {
namespace {

void require_lambda_n(double lambda, std::size_t n) {
  if (!(lambda > 0.0) || !std::isfinite(lambda)) {
    throw Error(ErrorKind::ParameterDomain, "lambda must be positive");
  }
  if (n == 0) throw Error(ErrorKind::ParameterDomain, "n must be at least 1");
}

// c * v with 0 * inf = 0.
double scale(double c, double v) {
  if (c == 0.0) return 0.0;
  return c * v;
}

struct Breakpoint {
  double kl;
  double mass;  // prior mass of the closed KL ball of this radius
};

std::vector<Breakpoint> kl_breakpoints(std::span<const double> kl_values,
                                       std::span<const double> prior) {
  std::vector<std::pair<double, double>> finite;
  for (std::size_t j = 0; j < kl_values.size(); ++j) {
    if (kl_values[j] != kInf) finite.emplace_back(kl_values[j], prior[j]);
  }
  if (finite.empty()) {
    throw Error(ErrorKind::AllInfiniteKL, "no model is absolutely continuous w.r.t. the truth");
  }
  std::sort(finite.begin(), finite.end());
  std::vector<Breakpoint> out;
  double mass = 0.0;
  for (std::size_t i = 0; i < finite.size(); ++i) {
    mass += finite[i].second;
    if (i + 1 < finite.size() && finite[i + 1].first == finite[i].first) continue;
    out.push_back({finite[i].first, std::min(mass, 1.0)});
  }
  return out;
}

// sum over the support of q of the pointwise envelope of the members in `mask`.
double envelope_mass_on_support(const ModelFamily& family, const Density& q, std::uint32_t mask) {
  double total = 0.0;
  for (std::size_t x = 0; x < family.space_size(); ++x) {
    if (q[x] <= 0.0) continue;
    double hi = 0.0;
    for (std::size_t j = 0; j < family.size(); ++j) {
      if (mask & (1u << j)) hi = std::max(hi, family.model(j)[x]);
    }
    total += hi;
  }
  return total;
}

double envelope_mass_on_support(const ModelFamily& family, const Density& q, const Block& block) {
  double total = 0.0;
  for (std::size_t x = 0; x < family.space_size(); ++x) {
    if (q[x] <= 0.0) continue;
    double hi = 0.0;
    for (std::size_t j : block) hi = std::max(hi, family.model(j)[x]);
    total += hi;
  }
  return total;
}

BracketingNumber exact_bracketing(const ModelFamily& family, const Density& q, double eps) {
  const std::size_t n_models = family.size();
  const std::uint32_t full = (1u << n_models) - 1u;
  std::vector<char> feasible(full + 1u, 0);
  for (std::uint32_t mask = 1; mask <= full; ++mask) {
    if ((mask & (mask - 1u)) == 0u) {
      feasible[mask] = 1;  // a density is its own envelope
    } else {
      feasible[mask] = envelope_mass_on_support(family, q, mask) - 1.0 <= eps + kNormTolerance;
    }
  }
  constexpr std::size_t kUnset = std::numeric_limits<std::size_t>::max();
  std::vector<std::size_t> best(full + 1u, kUnset);
  std::vector<std::uint32_t> choice(full + 1u, 0u);
  best[0] = 0;
  for (std::uint32_t mask = 1; mask <= full; ++mask) {
    const std::uint32_t low = mask & (~mask + 1u);
    // Enumerate submasks of `mask` that contain its lowest member.
    for (std::uint32_t sub = mask; sub != 0u; sub = (sub - 1u) & mask) {
      if (!(sub & low) || !feasible[sub]) continue;
      const std::size_t rest = best[mask ^ sub];
      if (rest != kUnset && rest + 1 < best[mask]) {
        best[mask] = rest + 1;
        choice[mask] = sub;
      }
    }
  }
  BracketingNumber out{best[full], true, {}};
  for (std::uint32_t mask = full; mask != 0u; mask ^= choice[mask]) {
    Block block;
    for (std::size_t j = 0; j < n_models; ++j) {
      if (choice[mask] & (1u << j)) block.push_back(j);
    }
    out.blocks.push_back(std::move(block));
  }
  return out;
}

BracketingNumber greedy_bracketing(const ModelFamily& family, const Density& q, double eps) {
  std::vector<Block> blocks;
  for (std::size_t j = 0; j < family.size(); ++j) blocks.push_back({j});
  bool merged = true;
  while (merged) {
    merged = false;
    for (std::size_t a = 0; a < blocks.size() && !merged; ++a) {
      for (std::size_t b = a + 1; b < blocks.size() && !merged; ++b) {
        Block joined = blocks[a];
        joined.insert(joined.end(), blocks[b].begin(), blocks[b].end());
        if (envelope_mass_on_support(family, q, joined) - 1.0 <= eps + kNormTolerance) {
          std::sort(joined.begin(), joined.end());
          blocks[a] = std::move(joined);
          blocks.erase(blocks.begin() + static_cast<std::ptrdiff_t>(b));
          merged = true;
        }
      }
    }
  }
  return {blocks.size(), false, std::move(blocks)};
}

}  // namespace

FamilyCover::FamilyCover(std::vector<Block> blocks, std::size_t family_size, bool is_partition)
    : blocks_(std::move(blocks)), is_partition_(is_partition) {
  std::vector<int> hits(family_size, 0);
  for (auto& block : blocks_) {
    if (block.empty()) throw Error(ErrorKind::EmptyBlock, "cover contains an empty block");
    std::sort(block.begin(), block.end());
    if (std::adjacent_find(block.begin(), block.end()) != block.end()) {
      throw Error(ErrorKind::InvalidCover, "block lists a member twice");
    }
    for (std::size_t j : block) {
      if (j >= family_size) throw Error(ErrorKind::InvalidCover, "block member outside the family");
      ++hits[j];
    }
  }
  for (std::size_t j = 0; j < family_size; ++j) {
    if (hits[j] == 0) {
      throw Error(ErrorKind::InvalidCover, "model " + std::to_string(j) + " is not covered");
    }
    if (is_partition_ && hits[j] > 1) {
      throw Error(ErrorKind::NotAPartition,
                  "model " + std::to_string(j) + " appears in more than one block");
    }
  }
}

FamilyCover FamilyCover::singletons(std::size_t family_size) {
  std::vector<Block> blocks;
  for (std::size_t j = 0; j < family_size; ++j) blocks.push_back({j});
  return FamilyCover(std::move(blocks), family_size, true);
}

FamilyCover FamilyCover::whole(std::size_t family_size) {
  Block all(family_size);
  for (std::size_t j = 0; j < family_size; ++j) all[j] = j;
  return FamilyCover({all}, family_size, true);
}

std::vector<double> kl_to_models(const ModelFamily& family, const Density& q) {
  std::vector<double> out(family.size());
  for (std::size_t j = 0; j < family.size(); ++j) out[j] = kl(q, family.model(j));
  return out;
}

std::vector<double> renyi_to_models(const ModelFamily& family, const Density& q, double rho) {
  std::vector<double> out(family.size());
  for (std::size_t j = 0; j < family.size(); ++j) out[j] = renyi_divergence(q, family.model(j), rho);
  return out;
}

IndexOfResolvability index_of_resolvability(const ModelFamily& family, const Density& q,
                                            double lambda, std::size_t n) {
  require_lambda_n(lambda, n);
  const double share = lambda / static_cast<double>(n);
  IndexOfResolvability best{kInf, 0};
  for (std::size_t k = 0; k < family.size(); ++k) {
    const double d = kl(q, family.model(k));
    if (d == kInf) continue;
    const double value = d + share * std::log(1.0 / family.prior(k));
    if (value < best.value) best = {value, k};
  }
  return best;
}

Resolvability bayesian_resolvability(const ModelFamily& family, const Density& q, double lambda,
                                     std::size_t n) {
  require_lambda_n(lambda, n);
  const double rate = static_cast<double>(n) / lambda;
  std::vector<double> log_weight(family.size());
  for (std::size_t j = 0; j < family.size(); ++j) {
    const double d = kl(q, family.model(j));
    log_weight[j] = d == kInf ? -kInf : std::log(family.prior(j)) - rate * d;
  }
  const double log_norm = log_sum_exp(log_weight);
  if (log_norm == -kInf) {
    throw Error(ErrorKind::AllInfiniteKL, "no model is absolutely continuous w.r.t. the truth");
  }
  std::vector<double> mu(family.size());
  for (std::size_t j = 0; j < mu.size(); ++j) {
    mu[j] = log_weight[j] == -kInf ? 0.0 : std::exp(log_weight[j] - log_norm);
  }
  // The partition function is at most 1, so the value is nonnegative.
  return {std::max(-log_norm / rate, 0.0), PosteriorWeights::from_masses(std::move(mu))};
}

double prior_mass_resolvability_bound(const ModelFamily& family, const Density& q, double lambda,
                                      std::size_t n) {
  require_lambda_n(lambda, n);
  const auto kls = kl_to_models(family, q);
  const double share = lambda / static_cast<double>(n);
  double best = kInf;
  for (const auto& bp : kl_breakpoints(kls, family.priors())) {
    best = std::min(best, bp.kl - share * std::log(bp.mass));
  }
  return best;
}

CriticalRadius critical_prior_mass_radius(const ModelFamily& family, const Density& q,
                                          double lambda, std::size_t n) {
  const auto kls = kl_to_models(family, q);
  return critical_prior_mass_radius(kls, family.priors(), lambda, n);
}

CriticalRadius critical_prior_mass_radius(std::span<const double> kl_values,
                                          std::span<const double> prior, double lambda,
                                          std::size_t n) {
  require_lambda_n(lambda, n);
  const double share = lambda / static_cast<double>(n);
  const auto bps = kl_breakpoints(kl_values, prior);
  // On [d_i, d_{i+1}) the ball mass is constant, so the condition
  // eps >= -(lambda/n) ln mass_i first holds at max(d_i, threshold_i).
  for (std::size_t i = 0; i < bps.size(); ++i) {
    const double threshold = std::max(-share * std::log(bps[i].mass), 0.0);
    const double candidate = std::max(bps[i].kl, threshold);
    const double next = i + 1 < bps.size() ? bps[i + 1].kl : kInf;
    if (candidate < next) return {candidate, bps[i].kl};
  }
  // Unreachable: the last interval is unbounded.
  return {bps.back().kl, bps.back().kl};
}

double block_prior(const ModelFamily& family, const Block& block) {
  double mass = 0.0;
  for (std::size_t j : block) mass += family.prior(j);
  return std::min(mass, 1.0);
}

double upper_bracketing_radius(const ModelFamily& family, const Block& block) {
  if (block.empty()) throw Error(ErrorKind::EmptyBlock, "upper-bracketing radius of an empty block");
  for (std::size_t j : block) {
    if (j >= family.size()) throw Error(ErrorKind::IndexOutOfRange, "block member outside the family");
  }
  if (block.size() == 1) return 0.0;
  double total = 0.0;
  for (std::size_t x = 0; x < family.space_size(); ++x) {
    double hi = 0.0;
    for (std::size_t j : block) hi = std::max(hi, family.model(j)[x]);
    total += hi;
  }
  return std::max(total - 1.0, 0.0);
}

BracketingNumber upper_bracketing_number(const ModelFamily& family, const Density& q, double eps) {
  if (!(eps >= 0.0)) throw Error(ErrorKind::ParameterDomain, "eps must be nonnegative");
  if (q.size() != family.space_size()) {
    throw Error(ErrorKind::ShapeMismatch, "truth and family live on different spaces");
  }
  if (family.size() <= kExactBracketingLimit) return exact_bracketing(family, q, eps);
  return greedy_bracketing(family, q, eps);
}

double cover_complexity_term(const ModelFamily& family, const FamilyCover& cover, double s,
                             std::size_t n) {
  std::vector<double> terms;
  terms.reserve(cover.size());
  for (const auto& block : cover.blocks()) {
    const double radius = upper_bracketing_radius(family, block);
    terms.push_back(scale(s, std::log(block_prior(family, block))) +
                    static_cast<double>(n) * std::log1p(radius));
  }
  return log_sum_exp(terms);
}

double localized_entropy_term(const ModelFamily& family, const Density& q, double rho,
                              std::size_t n, std::size_t k, double shrink) {
  require_open_rho(rho);
  if (!(shrink > 0.0 && shrink <= 1.0)) {
    throw Error(ErrorKind::ParameterDomain, "shrink must lie in (0, 1]");
  }
  if (k >= family.size()) throw Error(ErrorKind::IndexOutOfRange, "model index out of range");
  const double rate = shrink * rho * (1.0 - rho) * static_cast<double>(n);
  std::vector<double> exponent(family.size());
  for (std::size_t j = 0; j < family.size(); ++j) {
    exponent[j] = -scale(rate, renyi_divergence(q, family.model(j), rho));
  }
  const double local = std::min(log_weighted_sum_exp(family.priors(), exponent), 0.0);
  return local - std::log(family.prior(k));
}

double c_rho_n_alpha(const ModelFamily& family, const Density& q, double rho, std::size_t n,
                     double alpha) {
  require_open_rho(rho);
  if (n == 0) throw Error(ErrorKind::ParameterDomain, "n must be at least 1");
  // The integrand is identically 1; skip ln(sum pi) so the result is exactly 0.
  if (alpha == 1.0) return 0.0;
  const double nn = static_cast<double>(n);
  const double rate = rho * (1.0 - rho) * (1.0 - alpha) * nn;
  std::vector<double> exponent(family.size());
  for (std::size_t j = 0; j < family.size(); ++j) {
    exponent[j] = -scale(rate, renyi_divergence(q, family.model(j), rho));
  }
  return log_weighted_sum_exp(family.priors(), exponent) / nn;
}

LossTable rho_log_ratio_loss(const ModelFamily& family, const Density& q, double rho) {
  require_open_rho(rho);
  LossTable loss(family.size(), std::vector<double>(family.space_size(), 0.0));
  for (std::size_t j = 0; j < family.size(); ++j) {
    const auto& p = family.model(j);
    for (std::size_t x = 0; x < family.space_size(); ++x) {
      if (q[x] <= 0.0) continue;
      loss[j][x] = p[x] <= 0.0 ? kInf : rho * (std::log(q[x]) - std::log(p[x]));
    }
  }
  return loss;
}

double c_n_general(const ModelFamily& family, const Density& q, const LossTable& loss,
                   std::size_t n, double alpha, double beta) {
  if (n == 0) throw Error(ErrorKind::ParameterDomain, "n must be at least 1");
  if (loss.size() != family.size()) throw Error(ErrorKind::ShapeMismatch, "loss table rows != models");
  const double nn = static_cast<double>(n);
  std::vector<double> exponent(family.size());
  std::vector<double> a_terms(q.size());
  std::vector<double> b_terms(q.size());
  for (std::size_t j = 0; j < family.size(); ++j) {
    if (loss[j].size() != q.size()) throw Error(ErrorKind::ShapeMismatch, "loss table width != M");
    for (std::size_t x = 0; x < q.size(); ++x) {
      a_terms[x] = -loss[j][x];
      b_terms[x] = -scale(beta, loss[j][x]);
    }
    const double a = log_weighted_sum_exp(q.masses(), a_terms);  // ln E_q e^{-l}
    const double b = log_weighted_sum_exp(q.masses(), b_terms);  // ln E_q e^{-beta l}
    double log_ratio;
    if (a == -kInf && b == -kInf) {
      // 0 / 0^alpha read as the limit E^{1 - alpha}.
      log_ratio = scale(1.0 - alpha, a);
    } else {
      log_ratio = a - scale(alpha, b);
    }
    exponent[j] = scale(nn, log_ratio);
  }
  return log_weighted_sum_exp(family.priors(), exponent) / nn;
}

}  // namespace icm
