#include "icm/hull.hpp"

#include <algorithm>
#include <cmath>

#include "icm/divergence.hpp"

namespace icm {
namespace {

enum class Objective { PowerMean, LogLikelihood };

// Concave objective f(p) = sum_x q(x) phi(p(x)/q(x)) restricted to the support
// of q, with phi(r) = r^rho or ln r (up to constants).
class HullObjective {
 public:
  HullObjective(const Density& q, std::span<const Density> block, Objective kind, double rho)
      : q_(q), block_(block), kind_(kind), rho_(rho) {
    if (block.empty()) throw Error(ErrorKind::EmptyBlock, "hull of an empty block");
    for (const auto& p : block) {
      if (p.size() != q.size()) throw Error(ErrorKind::ShapeMismatch, "block member on another space");
    }
    for (std::size_t x = 0; x < q.size(); ++x) {
      if (q[x] > 0.0) support_.push_back(x);
    }
  }

  std::size_t members() const { return block_.size(); }

  std::vector<double> mixture(std::span<const double> w) const {
    std::vector<double> p(q_.size(), 0.0);
    for (std::size_t k = 0; k < block_.size(); ++k) {
      if (w[k] == 0.0) continue;
      for (std::size_t x : support_) p[x] += w[k] * block_[k][x];
    }
    return p;
  }

  double value(std::span<const double> p) const {
    double total = 0.0;
    for (std::size_t x : support_) {
      if (kind_ == Objective::PowerMean) {
        if (p[x] > 0.0) total += std::exp((1.0 - rho_) * std::log(q_[x]) + rho_ * std::log(p[x]));
      } else {
        if (p[x] <= 0.0) return -kInf;
        total += q_[x] * std::log(p[x]);
      }
    }
    return total;
  }

  // d f / d p(x); +inf where the mixture vanishes on the support of q.
  double slope(std::span<const double> p, std::size_t x) const {
    if (p[x] <= 0.0) return kInf;
    if (kind_ == Objective::PowerMean) {
      return rho_ * std::exp((1.0 - rho_) * (std::log(q_[x]) - std::log(p[x])));
    }
    return q_[x] / p[x];
  }

  // sum_x slope(x) * delta(x) with 0 * inf = 0; -inf dominates +inf.
  double directional(std::span<const double> p, std::span<const double> delta) const {
    double total = 0.0;
    bool pos_inf = false;
    bool neg_inf = false;
    for (std::size_t x : support_) {
      if (delta[x] == 0.0) continue;
      const double s = slope(p, x);
      if (s == kInf) {
        (delta[x] > 0.0 ? pos_inf : neg_inf) = true;
      } else {
        total += s * delta[x];
      }
    }
    if (neg_inf) return -kInf;
    if (pos_inf) return kInf;
    return total;
  }

  std::vector<double> gradient(std::span<const double> p) const {
    std::vector<double> grad(block_.size(), 0.0);
    for (std::size_t k = 0; k < block_.size(); ++k) {
      grad[k] = directional(p, block_[k].masses());
    }
    return grad;
  }

 private:
  const Density& q_;
  std::span<const Density> block_;
  Objective kind_;
  double rho_;
  std::vector<std::size_t> support_;
};

// Maximizes t -> f(p + t delta) on [0, t_max] for concave f by bisection on the
// derivative.
double line_search(const HullObjective& obj, std::span<const double> p,
                   std::span<const double> delta, double t_max) {
  std::vector<double> pt(p.size());
  auto derivative_at = [&](double t) {
    for (std::size_t x = 0; x < p.size(); ++x) pt[x] = std::max(p[x] + t * delta[x], 0.0);
    return obj.directional(pt, delta);
  };
  if (derivative_at(t_max) >= 0.0) return t_max;
  double lo = 0.0;
  double hi = t_max;
  for (int it = 0; it < 100 && hi - lo > 1e-17; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (derivative_at(mid) > 0.0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return lo;
}

HullResult frank_wolfe(const HullObjective& obj, HullOptions options) {
  const std::size_t m = obj.members();
  HullResult result;
  result.weights.assign(m, 1.0 / static_cast<double>(m));
  auto p = obj.mixture(result.weights);
  result.value = obj.value(p);
  result.objective_trace.push_back(result.value);
  if (m == 1) {
    result.weights[0] = 1.0;
    result.converged = true;
    return result;
  }

  std::vector<double> delta(p.size());
  for (result.iterations = 0; result.iterations < options.max_iterations; ++result.iterations) {
    const auto grad = obj.gradient(p);
    const double inner = weighted_sum(result.weights, grad);
    std::size_t toward = 0;
    std::size_t away = m;
    for (std::size_t k = 0; k < m; ++k) {
      if (grad[k] > grad[toward]) toward = k;
      if (result.weights[k] > 0.0 && (away == m || grad[k] < grad[away])) away = k;
    }
    const double fw_gap = grad[toward] == kInf ? kInf : grad[toward] - inner;
    result.gap = fw_gap;
    if (fw_gap <= options.gap_tolerance) {
      result.converged = true;
      break;
    }

    const double away_gap = inner - grad[away];
    const bool use_away = away_gap > fw_gap && result.weights[away] < 1.0;
    double t_max;
    if (use_away) {
      const double wa = result.weights[away];
      t_max = wa / (1.0 - wa);
      std::vector<double> ea(m, 0.0);
      ea[away] = 1.0;
      const auto p_away = obj.mixture(ea);
      for (std::size_t x = 0; x < p.size(); ++x) delta[x] = p[x] - p_away[x];
    } else {
      t_max = 1.0;
      std::vector<double> et(m, 0.0);
      et[toward] = 1.0;
      const auto p_toward = obj.mixture(et);
      for (std::size_t x = 0; x < p.size(); ++x) delta[x] = p_toward[x] - p[x];
    }

    const double t = line_search(obj, p, delta, t_max);
    std::vector<double> next_w = result.weights;
    if (use_away) {
      for (auto& w : next_w) w *= (1.0 + t);
      next_w[away] -= t;
      if (t == t_max) next_w[away] = 0.0;
    } else {
      for (auto& w : next_w) w *= (1.0 - t);
      next_w[toward] += t;
    }
    for (auto& w : next_w) w = std::max(w, 0.0);
    double total = 0.0;
    for (double w : next_w) total += w;
    for (auto& w : next_w) w /= total;

    auto next_p = obj.mixture(next_w);
    const double next_value = obj.value(next_p);
    if (!(next_value >= result.value)) {
      // Rounding prevents further ascent; the current iterate is final.
      result.converged = fw_gap <= 1e3 * options.gap_tolerance;
      break;
    }
    result.weights = std::move(next_w);
    p = std::move(next_p);
    result.value = next_value;
    result.objective_trace.push_back(result.value);
  }
  return result;
}

void require_nonempty(std::span<const Density> block) {
  if (block.empty()) throw Error(ErrorKind::EmptyBlock, "hull of an empty block");
}

}  // namespace

std::vector<Density> block_members(const ModelFamily& family, const Block& block) {
  if (block.empty()) throw Error(ErrorKind::EmptyBlock, "empty block");
  std::vector<Density> out;
  out.reserve(block.size());
  for (std::size_t j : block) {
    if (j >= family.size()) throw Error(ErrorKind::IndexOutOfRange, "block member outside the family");
    out.push_back(family.model(j));
  }
  return out;
}

HullResult max_power_mean_over_hull(const Density& q, std::span<const Density> block, double rho,
                                    HullOptions options) {
  require_open_rho(rho);
  return frank_wolfe(HullObjective(q, block, Objective::PowerMean, rho), options);
}

HullResult max_log_likelihood_over_hull(const Density& q, std::span<const Density> block,
                                        HullOptions options) {
  return frank_wolfe(HullObjective(q, block, Objective::LogLikelihood, 0.5), options);
}

double inf_renyi_over_hull(const Density& q, std::span<const Density> block, double rho) {
  const double g = std::min(max_power_mean_over_hull(q, block, rho).value, 1.0);
  if (g <= 0.0) return kInf;
  return -std::log(g) / (rho * (1.0 - rho));
}

double inf_rho_over_hull(const Density& q, std::span<const Density> block, double rho) {
  const double g = std::min(max_power_mean_over_hull(q, block, rho).value, 1.0);
  return (1.0 - g) / (rho * (1.0 - rho));
}

double inf_kl_over_hull(const Density& q, std::span<const Density> block) {
  const double h = max_log_likelihood_over_hull(q, block).value;
  if (h == -kInf) return kInf;
  double neg_entropy = 0.0;
  for (double qx : q.masses()) {
    if (qx > 0.0) neg_entropy += qx * std::log(qx);
  }
  return std::max(neg_entropy - h, 0.0);
}

double sup_renyi_over_hull(const Density& q, std::span<const Density> block, double rho) {
  require_nonempty(block);
  double worst = 0.0;
  for (const auto& p : block) worst = std::max(worst, renyi_divergence(q, p, rho));
  return worst;
}

double sup_rho_over_hull(const Density& q, std::span<const Density> block, double rho) {
  require_nonempty(block);
  double worst = 0.0;
  for (const auto& p : block) worst = std::max(worst, rho_divergence(q, p, rho));
  return worst;
}

double sup_kl_over_hull(const Density& q, std::span<const Density> block) {
  require_nonempty(block);
  double worst = 0.0;
  for (const auto& p : block) worst = std::max(worst, kl(q, p));
  return worst;
}

double block_mixture_product_divergence(const Density& q, const ModelFamily& family,
                                        const Block& block, double rho, std::size_t n,
                                        ProductDivergence kind) {
  if (kind == ProductDivergence::Renyi) require_open_rho(rho);
  if (n == 0) throw Error(ErrorKind::ParameterDomain, "n must be at least 1");
  const auto members = block_members(family, block);
  const std::size_t m = q.size();
  std::size_t outcomes = 1;
  for (std::size_t i = 0; i < n; ++i) {
    if (outcomes > kProductEnumerationCap / m) {
      throw Error(ErrorKind::ProductSpaceTooLarge, "M^n exceeds the enumeration cap");
    }
    outcomes *= m;
  }

  const double block_mass = block_prior(family, block);
  std::vector<double> log_mix_weight(block.size());
  for (std::size_t k = 0; k < block.size(); ++k) {
    log_mix_weight[k] = std::log(family.prior(block[k]) / block_mass);
  }

  std::vector<std::size_t> x(n, 0);
  std::vector<double> log_terms;
  log_terms.reserve(outcomes);
  std::vector<double> log_prod(block.size());
  double kl_total = 0.0;
  for (std::size_t idx = 0; idx < outcomes; ++idx) {
    double log_q = 0.0;
    for (std::size_t i = 0; i < n && log_q != -kInf; ++i) {
      log_q = q[x[i]] > 0.0 ? log_q + std::log(q[x[i]]) : -kInf;
    }
    if (log_q != -kInf) {
      for (std::size_t k = 0; k < block.size(); ++k) {
        double lp = log_mix_weight[k];
        for (std::size_t i = 0; i < n && lp != -kInf; ++i) {
          const double px = members[k][x[i]];
          lp = px > 0.0 ? lp + std::log(px) : -kInf;
        }
        log_prod[k] = lp;
      }
      const double log_p = log_sum_exp(log_prod);
      if (kind == ProductDivergence::Renyi) {
        if (log_p != -kInf) log_terms.push_back((1.0 - rho) * log_q + rho * log_p);
      } else {
        if (log_p == -kInf) return kInf;
        kl_total += std::exp(log_q) * (log_q - log_p);
      }
    }
    for (std::size_t i = 0; i < n; ++i) {
      if (++x[i] < m) break;
      x[i] = 0;
    }
  }
  if (kind == ProductDivergence::KL) return std::max(kl_total, 0.0);
  const double lpm = std::min(log_sum_exp(log_terms), 0.0);
  if (lpm == -kInf) return kInf;
  return -lpm / (rho * (1.0 - rho));
}

}  // namespace icm
