#include <cmath>

#include "doctest.h"
#include "icm/divergence.hpp"
#include "icm/estimators.hpp"
#include "icm/experiments.hpp"
#include "icm/io.hpp"
#include "support.hpp"

using namespace icm;
namespace ts = testing_support;

namespace {

double log_choose(double a, double b) {
  return std::lgamma(a + 1) - std::lgamma(b + 1) - std::lgamma(a - b + 1);
}

// P(MDL picks the truth) = sum_d P(d distinct points observed) * P(no member
// covers all d)^(2^n); a member covers d given points with probability
// C(2m-d, m-d) / C(2m, m). Distinct counts come from the occupancy recursion.
double counterexample_probability(std::size_t n, std::size_t m) {
  const double space = 2.0 * m;
  std::vector<double> dist(n + 1, 0.0);
  dist[0] = 1.0;
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<double> next(n + 1, 0.0);
    for (std::size_t d = 0; d <= i; ++d) {
      next[d] += dist[d] * d / space;
      next[d + 1] += dist[d] * (space - d) / space;
    }
    dist = next;
  }
  const double members = std::ldexp(1.0, static_cast<int>(n));
  double p = 0.0;
  for (std::size_t d = 1; d <= n; ++d) {
    const double cover = std::exp(log_choose(space - d, m - static_cast<double>(d)) -
                                  log_choose(space, static_cast<double>(m)));
    p += dist[d] * std::pow(1.0 - cover, members);
  }
  return p;
}

}  // namespace

TEST_CASE("counterexample family: priors sum to one and members are m-subsets") {
  CounterexampleConfig config;
  config.n = 5;
  config.m = 40;
  Rng rng({1, 0});
  const auto fam = counterexample_family(config, rng);
  CHECK(fam.size() == 33);
  CHECK(fam.prior(0) == 0.25);
  double total = 0.0;
  for (double p : fam.priors()) total += p;
  CHECK(total == 1.0);
  CHECK(0.25 + 32 * (3.0 / 128.0) == 1.0);
  CHECK(fam.model(0) == Density::uniform(80));
  for (std::size_t j = 1; j < fam.size(); ++j) {
    std::size_t support = 0;
    for (double v : fam.model(j).masses()) {
      if (v > 0.0) {
        ++support;
        CHECK(v == 1.0 / 40.0);
      }
    }
    CHECK(support == 40);
  }
}

TEST_CASE("counterexample feasibility and rejection of infeasible configs") {
  CounterexampleConfig config;
  config.n = 8;
  config.m = 128;
  CHECK_NOTHROW(validate_counterexample(config));
  CHECK(std::pow(120.0 / 128.0, 8) == doctest::Approx(0.5967).epsilon(1e-4));

  auto kind = [](CounterexampleConfig c) {
    try {
      validate_counterexample(c);
    } catch (const Error& e) {
      return e.kind();
    }
    return ErrorKind::Io;
  };
  config.m = 64;  // (56/64)^8 ~ 0.34
  CHECK(kind(config) == ErrorKind::ConfigInfeasible);
  config.m = 4;
  CHECK(kind(config) == ErrorKind::ConfigInfeasible);
  config.m = 128;
  config.n = 0;
  CHECK(kind(config) == ErrorKind::ConfigInfeasible);
}

TEST_CASE("counterexample selection logic: MDL picks a member iff one covers the data") {
  CounterexampleConfig config;
  config.n = 6;
  config.m = 64;
  config.seed = 5;
  std::size_t wrong = 0;
  for (std::uint64_t r = 0; r < 100; ++r) {
    const auto draw = counterexample_replicate(config, r);
    CHECK(draw.selected_wrong == draw.some_member_survives);
    wrong += draw.selected_wrong ? 1 : 0;
  }
  CHECK(wrong > 0);
  CHECK(wrong < 100);
}

TEST_CASE("counterexample frequency matches the exact occupancy probability") {
  CounterexampleConfig config;
  config.n = 8;
  config.m = 128;
  config.replicates = 2000;
  config.seed = 7;
  const auto report = run_counterexample(config);
  const double exact = counterexample_probability(8, 128);
  CHECK(exact <= std::exp(-0.5));
  CHECK(std::pow(1.0 - std::ldexp(1.0, -9), 256) <= std::exp(-0.5));
  CHECK(std::abs(report.p_hat - exact) <= 4.0 * std::sqrt(exact * (1 - exact) / 2000));
  CHECK(report.p_hat <= report.reference_bound + 3.0 * report.se);
  CHECK(report.reference_bound == std::exp(-0.5));
  CHECK(report.index_of_resolvability == std::log(4.0) / 8.0);
  CHECK(report.hits == static_cast<std::size_t>(std::lround(report.p_hat * 2000)));
}

TEST_CASE("counterexample is deterministic and thread-independent") {
  CounterexampleConfig config;
  config.n = 6;
  config.m = 64;
  config.replicates = 300;
  config.seed = 11;
  config.threads = 1;
  const auto a = run_counterexample(config);
  config.threads = 5;
  const auto b = run_counterexample(config);
  CHECK(a.hits == b.hits);
  CHECK(a.p_hat == b.p_hat);
  config.seed = 12;
  const auto c = run_counterexample(config);
  CHECK(c.index_of_resolvability == std::log(4.0) / 6.0);
}

TEST_CASE("bernoulli net") {
  const auto net = bernoulli_net(4);
  CHECK(net.size() == 5);
  CHECK(net.model(1)[0] == 0.25);
  CHECK(net.prior(3) == 0.2);
  CHECK_THROWS_AS(bernoulli_net(0), Error);
}

TEST_CASE("rate demo: localized entropy stays bounded while the global one grows") {
  RateDemoConfig config;
  config.seed = 3;
  config.replicates = 50;
  const auto report = run_parametric_rate_demo(config);
  REQUIRE(report.rows.size() == 4);
  const std::size_t grids[] = {8, 16, 32, 64};
  for (std::size_t i = 0; i < 4; ++i) {
    const auto& row = report.rows[i];
    CHECK(row.grid == grids[i]);
    CHECK(row.truth == 0.5);
    CHECK(row.global_entropy == doctest::Approx(std::log(grids[i] + 1.0)));

    // Summation oracle for the localized entropy at the truth.
    const auto net = bernoulli_net(row.grid);
    const auto q = Density::from_masses({0.5, 0.5});
    double sum = 0.0;
    for (std::size_t j = 0; j <= row.grid; ++j) {
      sum += std::exp(-0.5 * 0.25 * row.n * renyi_divergence(q, net.model(j), 0.5)) / (row.grid + 1.0);
    }
    CHECK(row.localized_entropy == doctest::Approx(std::log(sum) + std::log(row.grid + 1.0)));
    CHECK(row.localized_entropy < row.global_entropy);
    CHECK(row.mdl_risk >= 0.0);
  }
  CHECK(report.localized_ratio <= 1.5);
  CHECK(report.global_growth > std::log(2.0));
  CHECK(report.localized_bounded);

  RateDemoConfig bad;
  bad.ns = {1};
  CHECK_THROWS_AS(run_parametric_rate_demo(bad), Error);
}

TEST_CASE("bernoulli divergence is comparable to squared parameter distance") {
  for (double truth : {0.3, 0.5, 0.6}) {
    const auto range = bernoulli_curvature_range(truth, 0.5, 100, 0.05);
    CHECK(range.lower > 0.0);
    CHECK(std::isfinite(range.upper));
    CHECK(range.upper / range.lower < 10.0);
    // Near the truth the scaled Renyi divergence at rho = 1/2 is half the Fisher
    // information times the squared distance: 1 / (2 theta (1 - theta)).
    const double local = 0.5 / (truth * (1 - truth));
    CHECK(range.lower <= local * 1.01);
    CHECK(range.upper >= local * 0.99);
  }
  CHECK_THROWS_AS(bernoulli_curvature_range(0.0, 0.5, 10, 0.1), Error);
}

TEST_CASE("sweep: empty, single-point and full grids") {
  const auto file = io::read_family(ts::fixture("small_family.json"));
  const auto& fam = file.family;
  const auto& q = *file.truth;
  RunOptions options;
  options.seed = 11;
  options.replicates = 300;
  BoundSpec base;

  CHECK(run_sweep(fam, q, {BoundId::Global}, {}, base, options).empty());
  CHECK(run_sweep(fam, q, {BoundId::Global}, {{"lambda", {}}}, base, options).empty());

  const auto single = run_sweep(fam, q, {BoundId::Global}, {{"n", {12}}}, base, options);
  REQUIRE(single.size() == 1);
  BoundSpec direct = base;
  direct.n = 12;
  const auto expected = verify(direct, fam, q, options);
  CHECK(single[0].lhs == expected.lhs);
  CHECK(single[0].rhs == expected.rhs);
  CHECK(single[0].lhs_se == expected.lhs_se);

  const auto grid = io::read_grid(ts::fixture("grid.json"));
  const auto rows = run_sweep(fam, q, {BoundId::Global, BoundId::GlobalGibbs}, grid, base, options);
  REQUIRE(rows.size() == 12);
  const double lambdas[] = {1.5, 2.0, 4.0};
  const std::size_t ns[] = {10, 50};
  for (std::size_t i = 0; i < rows.size(); ++i) {
    CHECK(rows[i].bound_id == (i < 6 ? "cor3.2" : "thm5.1"));
    CHECK(rows[i].lambda == lambdas[(i % 6) / 2]);
    CHECK(rows[i].rho == 1.0 / lambdas[(i % 6) / 2]);
    CHECK(rows[i].n == ns[i % 2]);
    CHECK(rows[i].verdict != Verdict::Violated);
  }
  CHECK_THROWS_AS(run_sweep(fam, q, {BoundId::Global}, {{"lambda", {0.5}}}, base, options), Error);
  CHECK_THROWS_AS(run_sweep(fam, q, {BoundId::Global}, {{"zeta", {1}}}, base, options), Error);
}

TEST_CASE("random family helper yields valid families") {
  Rng rng({4, 0});
  const auto fam = random_family(6, 10, rng, true);
  CHECK(fam.size() == 10);
  CHECK(fam.space_size() == 6);
  double total = 0.0;
  for (double p : fam.priors()) total += p;
  CHECK(total == doctest::Approx(1.0));
}
