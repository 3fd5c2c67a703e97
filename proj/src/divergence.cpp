#include "icm/divergence.hpp"

#include <cmath>
#include <vector>

namespace icm {
namespace {

void require_same_space(const Density& q, const Density& p) {
  if (q.size() != p.size()) throw Error(ErrorKind::ShapeMismatch, "densities live on different spaces");
}

}  // namespace

void require_open_rho(double rho) {
  if (!(rho > 0.0 && rho < 1.0)) {
    throw Error(ErrorKind::RhoOutOfRange, "rho must lie in the open interval (0, 1)");
  }
}

double kl(const Density& q, const Density& p) {
  require_same_space(q, p);
  double total = 0.0;
  for (std::size_t x = 0; x < q.size(); ++x) {
    if (q[x] <= 0.0) continue;
    if (p[x] <= 0.0) return kInf;
    total += q[x] * (std::log(q[x]) - std::log(p[x]));
  }
  return std::max(total, 0.0);
}

double log_power_mean(const Density& q, const Density& p, double rho) {
  require_same_space(q, p);
  require_open_rho(rho);
  std::vector<double> terms;
  terms.reserve(q.size());
  for (std::size_t x = 0; x < q.size(); ++x) {
    if (q[x] <= 0.0 || p[x] <= 0.0) continue;
    const double lq = std::log(q[x]);
    terms.push_back(lq + rho * (std::log(p[x]) - lq));
  }
  return std::min(log_sum_exp(terms), 0.0);
}

double power_mean(const Density& q, const Density& p, double rho) {
  require_same_space(q, p);
  require_open_rho(rho);
  double total = 0.0;
  for (std::size_t x = 0; x < q.size(); ++x) {
    if (q[x] <= 0.0 || p[x] <= 0.0) continue;
    const double lq = std::log(q[x]);
    total += std::exp(lq + rho * (std::log(p[x]) - lq));
  }
  return std::min(total, 1.0);
}

double rho_divergence(const Density& q, const Density& p, double rho) {
  return (1.0 - power_mean(q, p, rho)) / (rho * (1.0 - rho));
}

double renyi_divergence(const Density& q, const Density& p, double rho) {
  const double lpm = log_power_mean(q, p, rho);
  if (lpm == -kInf) return kInf;
  return -lpm / (rho * (1.0 - rho));
}

double hellinger_sq(const Density& q, const Density& p) { return rho_divergence(q, p, 0.5); }

double renyi_upper_from_rho(double rho_div, double rho) {
  require_open_rho(rho);
  const double denom = 1.0 - rho * (1.0 - rho) * rho_div;
  if (denom <= 0.0) return kInf;
  return rho_div / denom;
}

}  // namespace icm
