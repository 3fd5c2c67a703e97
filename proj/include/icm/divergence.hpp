#pragma once

#include "icm/core.hpp"

namespace icm {

/// D_KL(q || p) = sum_x q ln(q/p); +inf iff some x has q(x) > 0 = p(x).
double kl(const Density& q, const Density& p);

/// ln E_q (p/q)^rho, computed termwise in log space over the support of q.
/// -inf when p vanishes on the support of q.
double log_power_mean(const Density& q, const Density& p, double rho);

/// E_q (p/q)^rho as a plain sum (in [0, 1] by Jensen).
double power_mean(const Density& q, const Density& p, double rho);

/// rho-divergence (1/(rho(1-rho))) E_q[1 - (p/q)^rho]; always finite.
double rho_divergence(const Density& q, const Density& p, double rho);

/// Scaled Renyi divergence -(1/(rho(1-rho))) ln E_q (p/q)^rho.
double renyi_divergence(const Density& q, const Density& p, double rho);

/// rho_divergence at rho = 1/2.
double hellinger_sq(const Density& q, const Density& p);

/// Upper end of the rho/Renyi sandwich, D / (1 - rho(1-rho) D); +inf when the
/// denominator is not positive.
double renyi_upper_from_rho(double rho_div, double rho);

/// Throws RhoOutOfRange unless 0 < rho < 1.
void require_open_rho(double rho);

}  // namespace icm
