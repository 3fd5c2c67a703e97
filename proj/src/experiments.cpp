#include "icm/experiments.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include "icm/complexity.hpp"
#include "icm/divergence.hpp"
#include "icm/estimators.hpp"
#include "parallel.hpp"

namespace icm {

Density random_density(std::size_t size, Rng& rng) {
  std::vector<double> mass(size);
  double total = 0.0;
  for (auto& v : mass) {
    v = rng.exponential();
    total += v;
  }
  for (auto& v : mass) v /= total;
  return Density::from_masses(std::move(mass));
}

ModelFamily random_family(std::size_t space_size, std::size_t members, Rng& rng,
                          bool random_prior) {
  std::vector<Density> models;
  models.reserve(members);
  for (std::size_t j = 0; j < members; ++j) models.push_back(random_density(space_size, rng));
  std::vector<double> prior(members, 1.0 / static_cast<double>(members));
  if (random_prior) {
    const auto drawn = random_density(members, rng);
    for (std::size_t j = 0; j < members; ++j) prior[j] = std::max(drawn[j], 1e-12);
  }
  return ModelFamily(std::move(models), std::move(prior));
}

// Slow-convergence counterexample.

void validate_counterexample(const CounterexampleConfig& config) {
  if (config.n < 1 || config.n > 16) {
    throw Error(ErrorKind::ConfigInfeasible, "counterexample needs 1 <= n <= 16");
  }
  if (config.m < config.n) throw Error(ErrorKind::ConfigInfeasible, "counterexample needs m >= n");
  const double feasibility = std::pow(static_cast<double>(config.m - config.n) / config.m,
                                      static_cast<double>(config.n));
  if (feasibility < 0.5) {
    throw Error(ErrorKind::ConfigInfeasible,
                "(m - n)^n / m^n = " + std::to_string(feasibility) + " < 0.5; increase m");
  }
  if (config.replicates == 0) throw Error(ErrorKind::ConfigInfeasible, "replicates must be positive");
}

ModelFamily counterexample_family(const CounterexampleConfig& config, Rng& rng) {
  const std::size_t space = 2 * config.m;
  const std::size_t members = std::size_t{1} << config.n;
  std::vector<Density> models;
  models.reserve(members + 1);
  models.push_back(Density::uniform(space));
  std::vector<double> prior;
  prior.reserve(members + 1);
  prior.push_back(0.25);
  const double member_prior = 3.0 / std::ldexp(1.0, static_cast<int>(config.n) + 2);

  // Each member is uniform on the first m entries of a Fisher-Yates shuffle;
  // shuffling the previous arrangement is as uniform as shuffling the identity.
  std::vector<std::size_t> points(space);
  for (std::size_t x = 0; x < space; ++x) points[x] = x;
  const double level = 1.0 / static_cast<double>(config.m);
  for (std::size_t j = 0; j < members; ++j) {
    for (std::size_t i = 0; i < config.m; ++i) {
      std::swap(points[i], points[i + rng.below(space - i)]);
    }
    std::vector<double> mass(space, 0.0);
    for (std::size_t i = 0; i < config.m; ++i) mass[points[i]] = level;
    models.push_back(Density::from_masses(std::move(mass)));
    prior.push_back(member_prior);
  }
  return ModelFamily(std::move(models), std::move(prior));
}

CounterexampleDraw counterexample_replicate(const CounterexampleConfig& config,
                                            std::uint64_t replicate) {
  Rng rng({config.seed, replicate});
  const ModelFamily family = counterexample_family(config, rng);
  const Dataset data = sample_dataset(family.model(0), config.n, rng);
  CounterexampleDraw draw;
  draw.selected_wrong = mdl_select(family, data, 1.0).index != 0;
  for (std::size_t j = 1; j < family.size() && !draw.some_member_survives; ++j) {
    bool covers = true;
    for (std::size_t x : data.samples()) covers = covers && family.model(j)[x] > 0.0;
    draw.some_member_survives = covers;
  }
  return draw;
}

CounterexampleReport run_counterexample(const CounterexampleConfig& config) {
  validate_counterexample(config);
  std::vector<char> picked_truth(config.replicates, 0);
  detail::parallel_for(config.replicates, config.threads, [&](std::size_t r) {
    picked_truth[r] = counterexample_replicate(config, r).selected_wrong ? 0 : 1;
  });

  CounterexampleReport report;
  report.n = config.n;
  report.m = config.m;
  report.replicates = config.replicates;
  for (char hit : picked_truth) report.hits += static_cast<std::size_t>(hit);
  const double reps = static_cast<double>(config.replicates);
  report.p_hat = static_cast<double>(report.hits) / reps;
  report.se = std::sqrt(report.p_hat * (1.0 - report.p_hat) / reps);
  report.reference_bound = std::exp(-0.5);
  report.feasibility = std::pow(static_cast<double>(config.m - config.n) / config.m,
                                static_cast<double>(config.n));
  // The truth sits in the family with prior 1/4 and zero KL; resolvability is
  // attained there for every draw, so the first replicate's family suffices.
  Rng rng({config.seed, 0});
  const ModelFamily family = counterexample_family(config, rng);
  report.index_of_resolvability =
      index_of_resolvability(family, family.model(0), 1.0, config.n).value;
  return report;
}

// Parametric-rate demo.

ModelFamily bernoulli_net(std::size_t grid) {
  if (grid == 0) throw Error(ErrorKind::ParameterDomain, "Bernoulli net needs N >= 1");
  std::vector<Density> models;
  const double nd = static_cast<double>(grid);
  for (std::size_t j = 0; j <= grid; ++j) {
    models.push_back(Density::from_masses({static_cast<double>(j) / nd,
                                           static_cast<double>(grid - j) / nd}));
  }
  std::vector<double> prior(grid + 1, 1.0 / static_cast<double>(grid + 1));
  return ModelFamily(std::move(models), std::move(prior));
}

namespace {

std::size_t ceil_sqrt(std::size_t n) {
  auto r = static_cast<std::size_t>(std::sqrt(static_cast<double>(n)));
  while (r * r < n) ++r;
  while (r > 0 && (r - 1) * (r - 1) >= n) --r;
  return r;
}

}  // namespace

RateDemoReport run_parametric_rate_demo(const RateDemoConfig& config) {
  if (config.ns.empty()) throw Error(ErrorKind::ParameterDomain, "rate demo needs at least one n");
  if (!(config.lambda > 0.0)) throw Error(ErrorKind::ParameterDomain, "lambda must be positive");
  for (std::size_t n : config.ns) {
    if (n < 2) throw Error(ErrorKind::ParameterDomain, "rate demo needs n >= 2 for an interior truth");
  }
  constexpr double kRho = 0.5;
  RateDemoReport report;
  for (std::size_t n : config.ns) {
    RateDemoRow row;
    row.n = n;
    row.grid = ceil_sqrt(n);
    const std::size_t k = row.grid / 2;
    row.truth = static_cast<double>(k) / static_cast<double>(row.grid);
    const ModelFamily family = bernoulli_net(row.grid);
    const Density& q = family.model(k);
    row.global_entropy = std::log(static_cast<double>(row.grid + 1));
    row.localized_entropy = localized_entropy_term(family, q, kRho, n, k, config.shrink);

    const auto renyi = renyi_to_models(family, q, kRho);
    std::vector<double> risk(config.replicates, 0.0);
    detail::parallel_for(config.replicates, config.threads, [&](std::size_t r) {
      const Dataset data = sample_dataset(q, n, RngSpec{config.seed, r});
      risk[r] = renyi[mdl_select(family, data, config.lambda).index];
    });
    if (!risk.empty()) {
      const double reps = static_cast<double>(risk.size());
      double sum = 0.0;
      for (double v : risk) sum += v;
      row.mdl_risk = sum / reps;
      if (risk.size() > 1) {
        double ss = 0.0;
        for (double v : risk) ss += (v - row.mdl_risk) * (v - row.mdl_risk);
        row.mdl_risk_se = std::sqrt(ss / (reps - 1.0) / reps);
      }
    }
    report.rows.push_back(row);
  }

  double lo = kInf;
  double hi = 0.0;
  for (const auto& row : report.rows) {
    lo = std::min(lo, row.localized_entropy);
    hi = std::max(hi, row.localized_entropy);
  }
  report.localized_ratio = lo > 0.0 ? hi / lo : (hi > 0.0 ? kInf : 1.0);
  report.global_growth = report.rows.back().global_entropy - report.rows.front().global_entropy;
  report.localized_bounded = report.localized_ratio <= 1.5 && report.global_growth > std::log(2.0);
  return report;
}

CurvatureRange bernoulli_curvature_range(double truth, double rho, std::size_t grid, double margin) {
  if (!(truth > 0.0 && truth < 1.0)) throw Error(ErrorKind::ParameterDomain, "truth must be interior");
  require_open_rho(rho);
  const Density q = Density::from_masses({truth, 1.0 - truth});
  CurvatureRange range{kInf, 0.0};
  for (std::size_t j = 0; j <= grid; ++j) {
    const double theta = static_cast<double>(j) / static_cast<double>(grid);
    if (theta < margin || theta > 1.0 - margin || theta == truth) continue;
    const double d = renyi_divergence(q, Density::from_masses({theta, 1.0 - theta}), rho);
    const double ratio = d / ((theta - truth) * (theta - truth));
    range.lower = std::min(range.lower, ratio);
    range.upper = std::max(range.upper, ratio);
  }
  return range;
}

// Sweeps.

std::vector<BoundReport> run_sweep(const ModelFamily& family, const Density& q,
                                   const std::vector<BoundId>& bounds,
                                   const io::ParameterGrid& grid, const BoundSpec& base,
                                   const RunOptions& options) {
  static constexpr std::array<const char*, 8> kOrder{"lambda", "rho", "gamma", "alpha",
                                                     "beta",   "n",   "t",     "delta"};
  for (const auto& [key, values] : grid) {
    if (std::find_if(kOrder.begin(), kOrder.end(), [&](const char* k) { return key == k; }) ==
        kOrder.end()) {
      throw Error(ErrorKind::Parse, "unknown grid parameter '" + key + "'");
    }
  }
  if (grid.empty()) return {};
  std::vector<std::pair<std::string, std::vector<double>>> axes;
  for (const char* key : kOrder) {
    auto it = grid.find(key);
    if (it == grid.end()) continue;
    if (it->second.empty()) return {};
    axes.emplace_back(key, it->second);
  }
  const bool rho_in_grid = grid.count("rho") > 0;
  const bool lambda_in_grid = grid.count("lambda") > 0;

  std::vector<BoundSpec> specs;
  for (BoundId id : bounds) {
    std::vector<std::size_t> pos(axes.size(), 0);
    while (true) {
      BoundSpec spec = base;
      spec.id = id;
      for (std::size_t a = 0; a < axes.size(); ++a) {
        const std::string& key = axes[a].first;
        const double v = axes[a].second[pos[a]];
        if (key == "lambda") spec.lambda = v;
        else if (key == "rho") spec.rho = v;
        else if (key == "gamma") spec.gamma = v;
        else if (key == "alpha") spec.alpha = v;
        else if (key == "beta") spec.beta = v;
        else if (key == "t") spec.t = v;
        else if (key == "delta") spec.delta = v;
        else {
          if (!(v >= 1.0) || v != std::floor(v) || v > 1e9) {
            throw Error(ErrorKind::ParameterDomain, "grid n must be a positive integer");
          }
          spec.n = static_cast<std::size_t>(v);
        }
      }
      if (!rho_in_grid && lambda_in_grid) spec.rho = 1.0 / spec.lambda;
      validate_spec(spec, family);
      specs.push_back(std::move(spec));

      std::size_t a = axes.size();
      while (a > 0) {
        --a;
        if (++pos[a] < axes[a].second.size()) break;
        pos[a] = 0;
        if (a == 0) {
          a = axes.size() + 1;
          break;
        }
      }
      if (a == axes.size() + 1 || axes.empty()) break;
    }
  }

  std::vector<BoundReport> rows;
  rows.reserve(specs.size());
  for (const auto& spec : specs) rows.push_back(verify(spec, family, q, options));
  return rows;
}

}  // namespace icm
