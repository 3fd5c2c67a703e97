#pragma once

// Divergence optimization over the convex hull of a block of densities, and
// exact divergences between n-fold products and block mixtures.

#include <cstddef>
#include <span>
#include <vector>

#include "icm/complexity.hpp"
#include "icm/core.hpp"

namespace icm {

struct HullResult {
  double value = 0.0;                   ///< optimum of the concave objective
  std::vector<double> weights;          ///< mixture weights over the block members
  std::size_t iterations = 0;
  bool converged = false;
  double gap = 0.0;                     ///< final Frank-Wolfe duality gap
  std::vector<double> objective_trace;  ///< objective after every iteration, starting point first
};

struct HullOptions {
  double gap_tolerance = 1e-8;
  std::size_t max_iterations = 10000;
};

std::vector<Density> block_members(const ModelFamily& family, const Block& block);

/// max over mixtures p_w of g(w) = E_q (p_w/q)^rho. g is concave in w, so the
/// Frank-Wolfe (with away steps) iterate converges to the global maximum.
HullResult max_power_mean_over_hull(const Density& q, std::span<const Density> block, double rho,
                                    HullOptions options = {});

/// max over mixtures p_w of E_q ln p_w (concave); used for the hull infimum of KL.
HullResult max_log_likelihood_over_hull(const Density& q, std::span<const Density> block,
                                        HullOptions options = {});

double inf_renyi_over_hull(const Density& q, std::span<const Density> block, double rho);
double inf_rho_over_hull(const Density& q, std::span<const Density> block, double rho);
double inf_kl_over_hull(const Density& q, std::span<const Density> block);

/// The concave power mean attains its minimum over the hull at a vertex, so the
/// supremum of the Renyi and rho divergences over the hull is a vertex maximum.
double sup_renyi_over_hull(const Density& q, std::span<const Density> block, double rho);
double sup_rho_over_hull(const Density& q, std::span<const Density> block, double rho);

/// KL(q || .) is convex, so its supremum over the hull is attained at a vertex.
double sup_kl_over_hull(const Density& q, std::span<const Density> block);

enum class ProductDivergence { Renyi, KL };

/// Largest product space M^n that block_mixture_product_divergence enumerates.
inline constexpr std::size_t kProductEnumerationCap = 1000000;

/// Divergence from q^n to the prior mixture over the block of the n-fold
/// products p^n, by enumerating every X in {0..M-1}^n. Throws
/// ProductSpaceTooLarge when M^n exceeds kProductEnumerationCap.
double block_mixture_product_divergence(const Density& q, const ModelFamily& family,
                                        const Block& block, double rho, std::size_t n,
                                        ProductDivergence kind = ProductDivergence::Renyi);

}  // namespace icm
