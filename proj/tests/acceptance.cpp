// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any FAIL.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "icm/bounds.hpp"
#include "icm/cli.hpp"
#include "icm/complexity.hpp"
#include "icm/divergence.hpp"
#include "icm/estimators.hpp"
#include "icm/experiments.hpp"
#include "icm/hull.hpp"
#include "support.hpp"

using namespace icm;
namespace ts = testing_support;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

std::string fmt(const char* format, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, format, args...);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

// The shared grid of random families: M = 6 points, N = 10 models.
struct Instance {
  ModelFamily family;
  Density truth;
};

std::vector<Instance> random_instances() {
  std::vector<Instance> out;
  for (std::uint64_t f = 0; f < 20; ++f) {
    Rng rng({2024, f});
    auto family = random_family(6, 10, rng, true);
    auto truth = random_density(6, rng);
    out.push_back({std::move(family), std::move(truth)});
  }
  return out;
}

RunOptions mc(std::uint64_t seed, std::size_t reps = 1000) {
  RunOptions o;
  o.mode = Mode::MonteCarlo;
  o.replicates = reps;
  o.seed = seed;
  return o;
}

RunOptions exact() {
  RunOptions o;
  o.mode = Mode::Exact;
  return o;
}

FamilyCover random_three_block_cover(ts::Gen& g, std::size_t members) {
  std::vector<Block> blocks(3);
  std::vector<std::size_t> order(members);
  for (std::size_t j = 0; j < members; ++j) order[j] = j;
  std::shuffle(order.begin(), order.end(), g);
  for (std::size_t i = 0; i < members; ++i) blocks[i < 3 ? i : ts::uniform_index(g, 0, 2)].push_back(order[i]);
  for (auto& b : blocks) std::sort(b.begin(), b.end());
  return FamilyCover(blocks, members, true);
}

// Worst slack relative to the noise allowance over a set of reports.
struct Tally {
  std::size_t cells = 0;
  std::size_t violated = 0;
  double worst = kInf;  // min over cells of slack + 3 se

  void add(const BoundReport& r) {
    ++cells;
    if (r.verdict == Verdict::Violated) ++violated;
    worst = std::min(worst, r.slack + 3.0 * r.lhs_se);
  }
};

Outcome counterexample() {
  const auto start = std::chrono::steady_clock::now();
  CounterexampleConfig config;
  config.n = 8;
  config.m = 128;
  config.replicates = 2000;
  config.seed = 7;
  const auto r = run_counterexample(config);
  const double elapsed = seconds_since(start);
  const double index_target = std::log(4.0) / 8.0;
  Outcome o;
  o.pass = r.p_hat <= std::exp(-0.5) + 3.0 * r.se && r.index_of_resolvability == index_target &&
           elapsed < 60.0;
  o.detail = fmt("P(select truth)=%.4f se=%.4f limit=%.4f index=%.17g (ln4/8=%.17g) %.1fs", r.p_hat,
                 r.se, std::exp(-0.5) + 3.0 * r.se, r.index_of_resolvability, index_target, elapsed);
  return o;
}

Outcome divergence_inequalities() {
  const auto start = std::chrono::steady_clock::now();
  ts::Gen g(1);
  const double tol = 1e-9;
  std::size_t failures = 0;
  std::size_t checks = 0;
  for (int i = 0; i < 10000; ++i) {
    const std::size_t m = ts::uniform_index(g, 2, 8);
    const auto q = ts::random_density(g, m, 0.1);
    const auto p = ts::random_density(g, m, 0.1);
    const double h = hellinger_sq(q, p);
    for (int step = 1; step <= 9; ++step) {
      const double rho = step / 10.0;
      const double d = rho_divergence(q, p, rho);
      const double re = renyi_divergence(q, p, rho);
      const double denom = 1.0 - rho * (1.0 - rho) * d;
      bool ok = d <= re + tol;
      if (denom > 0.0) ok = ok && re <= d / denom + tol * std::max(1.0, re);
      ok = ok && std::max(rho, 1.0 - rho) * d >= 0.5 * h - tol;
      ok = ok && 0.5 * h >= std::min(rho, 1.0 - rho) * d - tol;
      ++checks;
      if (!ok) ++failures;
    }
  }
  const double elapsed = seconds_since(start);
  return {failures == 0 && elapsed < 10.0,
          fmt("%zu pair-rho checks, %zu failures, %.2fs", checks, failures, elapsed)};
}

Outcome gibbs_risk_identity() {
  ts::Gen g(2);
  double worst_identity = 0.0;
  double worst_gap = kInf;
  for (int i = 0; i < 100; ++i) {
    const std::size_t m = ts::uniform_index(g, 2, 6);
    const std::size_t members = ts::uniform_index(g, 1, 10);
    const auto fam = ts::random_family(g, m, members);
    const auto q = ts::random_density(g, m);
    const std::size_t n = ts::uniform_index(g, 1, 50);
    const auto data = ts::random_dataset_on_support(g, q, n);
    const double lambda = 0.25 + 4.0 * ts::uniform01(g);

    const auto gibbs = gibbs_posterior(fam, data, 1.0 / lambda);
    const double risk = empirical_risk(fam, data, gibbs, q, lambda);
    double e = 0.0;
    for (std::size_t j = 0; j < members; ++j) {
      double log_ratio = 0.0;
      for (std::size_t x : data.samples()) log_ratio += std::log(fam.model(j)[x] / q[x]);
      e += fam.prior(j) * std::exp(log_ratio / lambda);
    }
    worst_identity = std::max(worst_identity, std::abs(risk + lambda / n * std::log(e)));
    for (int k = 0; k < 100; ++k) {
      const auto w = ts::random_posterior(g, members, 0.3);
      worst_gap = std::min(worst_gap, empirical_risk(fam, data, w, q, lambda) - risk);
    }
  }
  return {worst_identity <= 1e-9 && worst_gap >= -1e-12,
          fmt("max identity error %.3g, min optimality margin %.3g", worst_identity, worst_gap)};
}

Outcome fundamental_exact() {
  ts::Gen g(3);
  const auto fam = ts::random_family(g, 3, 4);
  const auto q = ts::random_density(g, 3);
  double worst = kInf;
  std::size_t datasets = 0;
  const std::pair<double, double> params[] = {{1.0, 1.0}, {0.5, 1.0}, {0.25, 0.5}};
  for (auto feasible : {FeasibleSet::FullSimplex, FeasibleSet::PointMasses}) {
    for (auto [alpha, beta] : params) {
      BoundSpec s;
      s.id = BoundId::FundamentalMoment;
      s.n = 3;
      s.alpha = alpha;
      s.beta = beta;
      s.lambda = 1.5;
      s.feasible = feasible;
      const auto r = verify(s, fam, q, exact());
      worst = std::min(worst, r.slack);
      datasets = r.replicates;
    }
  }
  double expectation = -kInf;
  for (auto feasible : {FeasibleSet::FullSimplex, FeasibleSet::PointMasses}) {
    BoundSpec s;
    s.id = BoundId::FundamentalExpectation;
    s.n = 3;
    s.lambda = 1.5;
    s.feasible = feasible;
    expectation = std::max(expectation, verify(s, fam, q, exact()).lhs);
  }
  return {worst >= -1e-10 && expectation <= 0.0 && datasets == 27,
          fmt("%zu datasets, min moment slack %.3g, max E[L]/n at alpha=beta=1: %.3g", datasets, worst,
              expectation)};
}

Outcome global_bounds(const std::vector<Instance>& instances) {
  Tally t;
  std::uint64_t seed = 100;
  for (const auto& inst : instances) {
    for (double lambda : {1.5, 2.0, 4.0}) {
      for (std::size_t n : {10, 50}) {
        for (BoundId id : {BoundId::GlobalMdl, BoundId::GlobalGibbs}) {
          BoundSpec s;
          s.id = id;
          s.lambda = lambda;
          s.rho = 1.0 / lambda;
          s.n = n;
          t.add(verify(s, inst.family, inst.truth, mc(seed++)));
        }
      }
    }
  }
  return {t.cells == 240 && t.violated == 0,
          fmt("%zu cells, %zu violated, min slack+3se %.4g", t.cells, t.violated, t.worst)};
}

Outcome localized_bound(const std::vector<Instance>& instances) {
  Tally t;
  std::size_t not_smaller = 0;
  std::uint64_t seed = 300;
  for (const auto& inst : instances) {
    for (double lambda : {1.5, 2.0, 4.0}) {
      for (std::size_t n : {10, 50}) {
        const auto rhs = rhs_localized(inst.family, inst.truth, lambda, n);
        if (rhs.localized > rhs.global_form + 1e-12) ++not_smaller;
        BoundSpec s;
        s.id = BoundId::Localized;
        s.lambda = lambda;
        s.n = n;
        t.add(verify(s, inst.family, inst.truth, mc(seed++)));
      }
    }
  }
  return {not_smaller == 0 && t.violated == 0 && t.worst >= 0.0,
          fmt("%zu cells, localized > global in %zu, min slack+3se %.4g", t.cells, not_smaller, t.worst)};
}

Outcome lambda_one_bounds(const std::vector<Instance>& instances) {
  Tally t;
  ts::Gen g(7);
  std::uint64_t seed = 500;
  for (const auto& inst : instances) {
    for (double gamma : {1.0, 2.0}) {
      for (std::size_t n : {10, 50}) {
        BoundSpec mdl;
        mdl.id = BoundId::LambdaOneMdl;
        mdl.gamma = gamma;
        mdl.rho = 0.5;
        mdl.n = n;
        mdl.cover = FamilyCover::singletons(inst.family.size());
        t.add(verify(mdl, inst.family, inst.truth, mc(seed++)));

        BoundSpec bayes = mdl;
        bayes.id = BoundId::LambdaOneBayes;
        bayes.cover = random_three_block_cover(g, inst.family.size());
        t.add(verify(bayes, inst.family, inst.truth, mc(seed++)));
      }
    }
  }
  return {t.violated == 0, fmt("%zu cells, %zu violated, min slack+3se %.4g", t.cells, t.violated, t.worst)};
}

Outcome weak_convergence(const std::vector<Instance>& instances) {
  Tally t;
  ts::Gen g(8);
  std::vector<std::vector<double>> extremes;
  for (unsigned mask = 0; mask < 64; ++mask) {
    std::vector<double> f(6);
    for (std::size_t x = 0; x < 6; ++x) f[x] = (mask >> x) & 1U ? 1.0 : -1.0;
    extremes.push_back(f);
  }
  std::uint64_t seed = 700;
  for (const auto& inst : instances) {
    std::vector<std::vector<double>> functions = extremes;
    for (int k = 0; k < 50; ++k) {
      std::vector<double> f(6);
      for (auto& v : f) v = 2.0 * ts::uniform01(g) - 1.0;
      functions.push_back(f);
    }
    for (BoundId id : {BoundId::WeakMdl, BoundId::Weak}) {
      for (const auto& f : functions) {
        BoundSpec s;
        s.id = id;
        s.n = 30;
        s.feasible = FeasibleSet::FullSimplex;
        s.test_function = f;
        t.add(verify(s, inst.family, inst.truth, mc(seed++)));
      }
    }
  }
  return {t.violated == 0 && t.worst >= 0.0,
          fmt("%zu cells, %zu violated, min slack+3se %.4g", t.cells, t.violated, t.worst)};
}

Outcome risk_lower_bounds() {
  ts::Gen g(9);
  std::size_t failures = 0;
  double worst_bound = kInf;
  double worst_slack = kInf;
  std::size_t cells = 0;
  for (int i = 0; i < 10; ++i) {
    const auto fam = ts::random_family(g, 3, 5);
    const auto q = ts::random_density(g, 3);
    for (auto feasible : {FeasibleSet::PointMasses, FeasibleSet::FullSimplex}) {
      BoundSpec est;
      est.lambda = 1.5;
      est.feasible = feasible;
      for (double lp : {1.0, 2.0}) {
        const auto r = verify_risk_lower_bound(fam, q, lp, 2, est, exact());
        const double lower = risk_lower_bound(fam, q, lp, 2);
        worst_bound = std::min(worst_bound, lower);
        worst_slack = std::min(worst_slack, r.slack);
        ++cells;
        if (r.verdict == Verdict::Violated || lower < -1e-12) ++failures;
      }
      BoundSpec cover_spec;
      cover_spec.id = BoundId::RiskLowerBoundCover;
      cover_spec.n = 2;
      cover_spec.lambda = 1.5;
      cover_spec.feasible = feasible;
      cover_spec.cover = random_three_block_cover(g, 5);
      for (double lp : {0.0, 0.5, 1.0}) {
        cover_spec.lambda_prime = lp;
        const auto r = verify(cover_spec, fam, q, exact());
        worst_slack = std::min(worst_slack, r.slack);
        ++cells;
        if (r.verdict == Verdict::Violated) ++failures;
      }
    }
  }
  return {failures == 0, fmt("%zu exact cells, %zu failures, min lower bound %.3g, min slack %.3g", cells,
                             failures, worst_bound, worst_slack)};
}

Outcome hull_sandwich() {
  ts::Gen g(10);
  std::size_t checks = 0;
  std::size_t failures = 0;
  double worst_grid = 0.0;
  std::vector<Block> blocks;
  for (std::size_t a = 0; a < 4; ++a) {
    blocks.push_back({a});
    for (std::size_t b = a + 1; b < 4; ++b) {
      blocks.push_back({a, b});
      for (std::size_t c = b + 1; c < 4; ++c) blocks.push_back({a, b, c});
    }
  }
  for (std::size_t m = 2; m <= 4; ++m) {
    for (int trial = 0; trial < 3; ++trial) {
      const auto fam = ts::random_family(g, m, 4, 0.1);
      const auto q = ts::random_density(g, m);
      const double rho = 0.2 + 0.6 * ts::uniform01(g);
      for (const auto& block : blocks) {
        const auto members = block_members(fam, block);
        const double lo = inf_renyi_over_hull(q, members, rho);
        const double hi = sup_renyi_over_hull(q, members, rho);
        const double klo = inf_kl_over_hull(q, members);
        const double khi = sup_kl_over_hull(q, members);
        for (std::size_t n = 1; n <= 3; ++n) {
          const double d = block_mixture_product_divergence(q, fam, block, rho, n) / n;
          const double dk =
              block_mixture_product_divergence(q, fam, block, rho, n, ProductDivergence::KL) / n;
          checks += 2;
          if (!(lo <= d + 1e-9 && d <= hi + 1e-9)) ++failures;
          if (!(klo <= dk + 1e-9 && dk <= khi + 1e-9)) ++failures;
        }
        if (block.size() == 3 && trial == 0) {
          const auto opt = max_power_mean_over_hull(q, members, rho);
          double grid = -kInf;
          for (int a = 0; a <= 1000; ++a) {
            for (int b = 0; a + b <= 1000; ++b) {
              const double w0 = a * 1e-3;
              const double w1 = b * 1e-3;
              const double w2 = std::max(0.0, 1.0 - w0 - w1);
              double v = 0.0;
              for (std::size_t x = 0; x < m; ++x) {
                const double p = w0 * members[0][x] + w1 * members[1][x] + w2 * members[2][x];
                if (q[x] > 0.0) v += std::pow(q[x], 1.0 - rho) * std::pow(p, rho);
              }
              grid = std::max(grid, v);
            }
          }
          worst_grid = std::max(worst_grid, std::abs(opt.value - grid));
        }
      }
    }
  }
  return {failures == 0 && worst_grid <= 1e-6,
          fmt("%zu sandwich checks, %zu failures, max optimizer-grid gap %.3g", checks, failures, worst_grid)};
}

Outcome posterior_tail(const std::vector<Instance>& instances) {
  Tally t;
  std::uint64_t seed = 900;
  for (const auto& inst : instances) {
    for (double tt : {0.1, 0.3}) {
      for (std::size_t n : {10, 50}) {
        BoundSpec s;
        s.id = BoundId::Tail;
        s.lambda = 2.0;
        s.rho = 0.5;
        s.t = tt;
        s.delta = 0.2;
        s.n = n;
        t.add(verify(s, inst.family, inst.truth, mc(seed++)));
      }
    }
  }
  return {t.violated == 0, fmt("%zu cells, %zu violated, min slack+3se %.4g", t.cells, t.violated, t.worst)};
}

Outcome rate_demo() {
  RateDemoConfig config;
  config.seed = 3;
  const auto r = run_parametric_rate_demo(config);
  return {r.localized_ratio <= 1.5 && r.global_growth > std::log(2.0),
          fmt("localized max/min %.4f, global growth %.4f (> ln2 = %.4f)", r.localized_ratio,
              r.global_growth, std::log(2.0))};
}

Outcome determinism() {
  const std::string family = ts::fixture("small_family.json");
  const std::string grid = ts::fixture("grid.json");
  const std::vector<std::vector<std::string>> commands{
      {"counterexample", "--n", "8", "--m", "128", "--reps", "500", "--seed", "7"},
      {"rate-demo", "--ns", "64,256,1024", "--reps", "100", "--seed", "3"},
      {"sweep", "--family", family, "--bounds", "cor3.2,thm5.1", "--grid", grid, "--seed", "11"},
      {"verify", "--family", family, "--bound", "thm3.2", "--n", "25", "--reps", "500", "--seed", "4"},
  };
  std::size_t identical = 0;
  for (const auto& base : commands) {
    std::vector<std::string> outputs;
    for (const char* threads : {"1", "4", "0"}) {
      auto args = base;
      args.push_back("--threads");
      args.push_back(threads);
      std::ostringstream out;
      std::ostringstream err;
      cli::dispatch(args, out, err);
      outputs.push_back(out.str());
    }
    if (!outputs[0].empty() && outputs[0] == outputs[1] && outputs[1] == outputs[2]) ++identical;
  }
  return {identical == commands.size(),
          fmt("%zu/%zu subcommands byte-identical across 3 runs", identical, commands.size())};
}

}  // namespace

int main() {
  const auto instances = random_instances();
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
      {"slow-convergence counterexample", counterexample},
      {"divergence sandwich and hellinger equivalence", divergence_inequalities},
      {"gibbs empirical risk identity and optimality", gibbs_risk_identity},
      {"fundamental inequality by exact enumeration", fundamental_exact},
      {"global resolvability bounds (MDL and Gibbs)", [&] { return global_bounds(instances); }},
      {"localized entropy bound", [&] { return localized_bound(instances); }},
      {"lambda = 1 bounds with covers", [&] { return lambda_one_bounds(instances); }},
      {"weak convergence", [&] { return weak_convergence(instances); }},
      {"empirical risk lower bounds", risk_lower_bounds},
      {"hull sandwich for block mixtures", hull_sandwich},
      {"posterior tail concentration", [&] { return posterior_tail(instances); }},
      {"parametric rate with localized entropy", rate_demo},
      {"end-to-end determinism", determinism},
  };
  int failed = 0;
  for (const auto& [name, run] : criteria) {
    Outcome o;
    try {
      o = run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    std::printf("%s  %s: %s\n", o.pass ? "PASS" : "FAIL", name, o.detail.c_str());
    std::fflush(stdout);
    if (!o.pass) ++failed;
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
