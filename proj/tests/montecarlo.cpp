// Seeded Monte Carlo checks of the statistical behaviour of each stage.
#include <algorithm>
#include <cmath>
#include <numeric>

#include "cdpa/align.hpp"
#include "cdpa/bootstrap.hpp"
#include "cdpa/linalg.hpp"
#include "cdpa/pipeline.hpp"
#include "cdpa/simulate.hpp"
#include "doctest.h"
#include "helpers.hpp"

using namespace cdpa;

namespace {

SimulationConfig setup1(double theta, Index p1, double noise, Index n = 300) {
  SimulationConfig cfg;
  cfg.theta_deg = theta;
  cfg.p1 = p1;
  cfg.noise_var = noise;
  cfg.n = n;
  return normalize(cfg);
}

template <class F>
double rate(int trials, F&& success) {
  int hits = 0;
  for (int i = 0; i < trials; ++i) hits += success(i) ? 1 : 0;
  return static_cast<double>(hits) / trials;
}

double mean(const std::vector<double>& v) { return std::accumulate(v.begin(), v.end(), 0.0) / double(v.size()); }

// Independent signals with the setup spectrum but no cross-correlation.
std::pair<ObservedMatrix, ObservedMatrix> independent_pair(Index p, Index n, std::uint64_t seed) {
  const Vector root = setup_eigenvalues().cwiseSqrt();
  const Matrix x1 = testing::orthonormal(p, 5, seed) * root.asDiagonal() * testing::gaussian(5, n, seed + 1);
  const Matrix x2 = testing::orthonormal(p, 5, seed + 2) * root.asDiagonal() * testing::gaussian(5, n, seed + 3);
  return {make_observed(x1 + testing::gaussian(p, n, seed + 4)), make_observed(x2 + testing::gaussian(p, n, seed + 5))};
}

CdpaConfig true_ranks(int r12) {
  CdpaConfig cfg;
  cfg.ranks = RankProfile{kSetupRank, kSetupRank, r12};
  cfg.sign = SignMode::Plus;
  return cfg;
}

}  // namespace

TEST_SUITE("mc.denoise") {
  TEST_CASE("soft-threshold estimate error") {
    const auto cfg = setup1(15.0, 300, 1.0);
    const auto s = make_structure(cfg);
    std::vector<double> err;
    for (std::uint64_t i = 0; i < 100; ++i) {
      const auto d = generate_setup(s, cfg, 1000 + i);
      const auto x = soft_threshold_denoise(d.y1, kSetupRank);
      err.push_back((x.xhat - d.truth.x[0]).squaredNorm() / d.truth.x[0].squaredNorm());
    }
    MESSAGE("mean relative error " << mean(err));
    CHECK(mean(err) < 0.1);
  }

  TEST_CASE("signal covariance eigenvalues") {
    const auto cfg = setup1(15.0, 300, 0.25);
    const auto s = make_structure(cfg);
    const Vector lam = setup_eigenvalues();
    Vector average = Vector::Zero(5);
    for (std::uint64_t i = 0; i < 20; ++i) {
      const auto d = generate_setup(s, cfg, 2000 + i);
      const auto cov = signal_covariance(soft_threshold_denoise(d.y1, kSetupRank));
      REQUIRE(cov.eigvalues.size() == 5);
      // Single draws scatter by about sqrt(2 / n) around lambda, so each draw is
      // compared with the eigenvalues of its own noiseless signal.
      const Vector own = linalg::thin_svd(d.truth.x[0]).s.head(5).array().square() / double(cfg.n);
      for (Index l = 0; l < 5; ++l) CHECK(std::abs(cov.eigvalues(l) / own(l) - 1.0) < 0.1);
      average += cov.eigvalues / 20.0;
    }
    for (Index l = 0; l < 5; ++l) CHECK(std::abs(average(l) / lam(l) - 1.0) < 0.1);
  }

  TEST_CASE("ED on pure noise") {
    const double r = rate(100, [](int i) {
      return ed_select_rank(make_observed(testing::gaussian(100, 300, 3000 + std::uint64_t(i)))) == 0;
    });
    MESSAGE("pure-noise zero-rank rate " << r);
    CHECK(r >= 0.9);
  }

  TEST_CASE("ED on the setup") {
    const auto cfg = setup1(15.0, 300, 1.0);
    const auto s = make_structure(cfg);
    const double r = rate(100, [&](int i) {
      return ed_select_rank(generate_setup(s, cfg, 4000 + std::uint64_t(i)).y1) == kSetupRank;
    });
    MESSAGE("ED recovery rate " << r);
    CHECK(r >= 0.95);
  }

  TEST_CASE("correlation screen under the null and the alternative") {
    const double null_rate = rate(100, [](int i) {
      auto [y1, y2] = independent_pair(100, 300, 5000 + 10 * std::uint64_t(i));
      return !correlation_screen(soft_threshold_denoise(y1, 5), soft_threshold_denoise(y2, 5), 0.05);
    });
    MESSAGE("screen null acceptance rate " << null_rate);
    CHECK(null_rate >= 0.9);

    const auto cfg = setup1(15.0, 100, 1.0);
    const auto s = make_structure(cfg);
    const double power = rate(100, [&](int i) {
      const auto d = generate_setup(s, cfg, 6000 + std::uint64_t(i));
      return correlation_screen(soft_threshold_denoise(d.y1, 5), soft_threshold_denoise(d.y2, 5), 0.05);
    });
    MESSAGE("screen power " << power);
    CHECK(power >= 0.99);
  }

  TEST_CASE("MDL-IC with all five correlations present") {
    const auto cfg = setup1(15.0, 300, 1.0);
    const auto s = make_structure(cfg);
    const double r = rate(100, [&](int i) {
      const auto d = generate_setup(s, cfg, 7000 + std::uint64_t(i));
      return mdl_select_r12(d.y1, d.y2, 5, 5) == 5;
    });
    MESSAGE("MDL-IC recovery rate at 15 degrees " << r);
    CHECK(r >= 0.9);
  }

  TEST_CASE("pure-noise pair takes the trivial path") {
    const double r = rate(100, [](int i) {
      const auto seed = 8000 + 10 * std::uint64_t(i);
      const auto y1 = make_observed(testing::gaussian(100, 300, seed));
      const auto y2 = make_observed(testing::gaussian(100, 300, seed + 1));
      return estimate_cdpa(y1, y2, CdpaConfig{}).r12_zero;
    });
    MESSAGE("trivial-path rate " << r);
    CHECK(r >= 0.9);
  }
}

TEST_SUITE("mc.align") {
  TEST_CASE("DSPFP against the exhaustive optimum") {
    int good = 0;
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
      const Index r = 2 + Index(seed % 2);
      const Matrix q1 = testing::orthonormal(7, r, 10000 + seed);
      const Matrix q2 = testing::orthonormal(7, r, 20000 + seed);
      const double best = exhaustive_match(q1, q2).objective;
      const double got = dspfp_match(build_match_problem(q1, q2)).objective;
      CHECK(got <= best + 1e-12);
      if (got >= 0.95 * best) ++good;
    }
    MESSAGE("DSPFP within 95% on " << good << " of 100");
    CHECK(good >= 90);
  }

  TEST_CASE("estimated alignment approaches the population alignment as noise falls") {
    // p = 8 rows, 3 planted components, rows of dataset 2 scrambled.
    const Index p = 8, n = 300;
    const Vector lam = (Vector(3) << 500, 300, 100).finished();
    const Vector rho = (Vector(3) << 0.9, 0.7, 0.5).finished();
    const Matrix basis = testing::orthonormal(p, 6, 31);
    const Matrix v1 = basis.leftCols(3);
    const Vector comp = (1.0 - rho.array().square()).sqrt().matrix();
    const std::vector<Index> scramble{2, 6, 0, 7, 3, 1, 5, 4};
    const Matrix v2 = permute_rows(Matrix(v1 * rho.asDiagonal() + basis.rightCols(3) * comp.asDiagonal()), scramble);

    PopulationModel model{v1, v2, lam, lam, Matrix(rho.asDiagonal()), DualWeightVariant::Own};
    const auto pop = population_cdpa(model);
    const double optimum = exhaustive_match(pop.pair.q1, pop.pair.q2a).objective;

    std::vector<double> means;
    for (double noise : {64.0, 16.0, 4.0, 1.0}) {
      std::vector<double> gap;
      for (std::uint64_t i = 0; i < 30; ++i) {
        const std::uint64_t seed = 40000 + 100 * i;
        const Matrix z1 = testing::gaussian(3, n, seed);
        const Matrix z2 = rho.asDiagonal() * z1 + comp.asDiagonal() * testing::gaussian(3, n, seed + 1);
        const double sd = std::sqrt(noise);
        const auto y1 = make_observed(v1 * lam.cwiseSqrt().asDiagonal() * z1 + sd * testing::gaussian(p, n, seed + 2));
        const auto y2 = make_observed(v2 * lam.cwiseSqrt().asDiagonal() * z2 + sd * testing::gaussian(p, n, seed + 3));
        CdpaConfig cfg;
        cfg.ranks = RankProfile{3, 3, 3};
        cfg.permutation = PermutationMode::Exhaustive;
        cfg.sign = SignMode::Plus;
        const auto est = estimate_cdpa(y1, y2, cfg);
        gap.push_back(std::abs(cosine_objective(pop.pair.q1, pop.pair.q2a, est.permutation.perm) - optimum));
      }
      means.push_back(mean(gap));
    }
    MESSAGE("mean objective gaps " << means[0] << " " << means[1] << " " << means[2] << " " << means[3]);
    for (std::size_t i = 1; i < means.size(); ++i) CHECK(means[i] <= means[i - 1] + 1e-12);
    CHECK(means.back() < means.front());
  }
}

TEST_SUITE("mc.pattern") {
  TEST_CASE("common pattern error and explained variance at 15 degrees") {
    const auto cfg = setup1(15.0, 300, 1.0);
    const auto s = make_structure(cfg);
    std::vector<double> err, trace_gap;
    for (std::uint64_t i = 0; i < 100; ++i) {
      const auto d = generate_setup(s, cfg, 50000 + i);
      const auto est = estimate_cdpa(d.y1, d.y2, true_ranks(5));
      const auto e = error_metrics(est, d.truth);
      err.push_back(e.scaled_sq_error_c.frobenius);
      trace_gap.push_back(std::abs(est.pattern.explained - 0.479));
    }
    MESSAGE("mean scaled error " << mean(err) << ", mean explained gap " << mean(trace_gap));
    CHECK(mean(err) < 0.1);
    CHECK(mean(trace_gap) < 0.1);
  }

  TEST_CASE("noiseless large-sample explained variance approaches the population value") {
    auto cfg = setup1(15.0, 40, 0.0, 20000);
    const auto s = make_structure(cfg);
    const auto d = generate_setup(s, cfg, 11);
    const auto est = estimate_fixed(d.y1, d.y2, {5, 5, 5}, {}, 1, DualWeightVariant::Own);
    MESSAGE("explained " << est.pattern.explained << " vs " << s.population.trace_cov_c);
    CHECK(std::abs(est.pattern.explained - s.population.trace_cov_c) < 0.02);
    const double zero_err = d.truth.c.squaredNorm() / (0.5 * (d.truth.x[0].squaredNorm() + d.truth.x[1].squaredNorm()) / 1500.0);
    CHECK(std::abs(zero_err - 0.479) < 0.02);
  }

  TEST_CASE("invariants on randomized setup data") {
    for (std::uint64_t i = 0; i < 10; ++i) {
      auto cfg = setup1(15.0 * double(i % 5), 30 + Index(i), 1.0, 100);
      cfg.seed = 60000 + i;
      const auto d = generate_setup(cfg);
      const int r12 = d.truth.r12;
      const auto base = estimate_cdpa(d.y1, d.y2, true_ranks(r12));
      const auto& pd = base.pattern;
      for (std::size_t k = 0; k < 2; ++k)
        CHECK(testing::rel_err(pd.c_scaled[k] + pd.delta[k], pd.aligned_x[k]) < 1e-10);

      const auto scaled = estimate_cdpa(make_observed(2.5 * d.y1.values), make_observed(0.4 * d.y2.values), true_ranks(r12));
      CHECK(testing::rel_err(scaled.pattern.c, pd.c) < 1e-8);
      const auto neg = estimate_cdpa(make_observed(-d.y1.values), make_observed(-d.y2.values), true_ranks(r12));
      CHECK(testing::rel_err(neg.pattern.c, -pd.c) < 1e-8);
    }
  }
}

TEST_SUITE("mc.bootstrap") {
  TEST_CASE("interval width shrinks as n doubles") {
    std::vector<double> narrow, wide;
    BootstrapConfig bc;
    bc.replicates = 100;
    for (std::uint64_t i = 0; i < 8; ++i) {
      for (Index n : {150, 300}) {
        auto cfg = setup1(15.0, 60, 1.0, n);
        cfg.seed = 70000 + i;
        const auto d = generate_setup(cfg);
        const auto ci = bootstrap_ci(d.y1, d.y2, {5, 5, 5}, {}, bc);
        (n == 150 ? wide : narrow).push_back(ci.upper - ci.lower);
      }
    }
    MESSAGE("mean width n=150 " << mean(wide) << ", n=300 " << mean(narrow));
    CHECK(mean(narrow) < mean(wide));
  }

  TEST_CASE("coverage of the population value") {
    auto cfg = setup1(15.0, 60, 0.25, 300);
    const auto s = make_structure(cfg);
    BootstrapConfig bc;
    bc.replicates = 100;
    int covered = 0;
    for (std::uint64_t i = 0; i < 100; ++i) {
      const auto d = generate_setup(s, cfg, 80000 + i);
      bc.seed = 90000 + i;
      const auto ci = bootstrap_ci(d.y1, d.y2, {5, 5, 5}, {}, bc);
      if (ci.lower <= s.population.trace_cov_c && s.population.trace_cov_c <= ci.upper) ++covered;
    }
    MESSAGE("covered " << covered << " of 100");
    CHECK(covered >= 85);
  }
}

TEST_SUITE("mc.simulate") {
  TEST_CASE("error grows with the noise variance") {
    std::vector<double> means;
    for (double noise : {0.25, 1.0, 4.0}) {
      auto cfg = setup1(15.0, 300, noise);
      cfg.replications = 100;
      cfg.select_ranks = false;
      means.push_back(run_replications(cfg).metric("scaled_sq_error_c_fro").mean);
    }
    MESSAGE("mean error by noise " << means[0] << " " << means[1] << " " << means[2]);
    CHECK(means[0] <= means[1]);
    CHECK(means[1] <= means[2]);
  }

  TEST_CASE("replications are reproducible") {
    auto cfg = setup1(30.0, 50, 1.0, 100);
    cfg.replications = 4;
    const auto a = run_replications(cfg);
    const auto b = run_replications(cfg);
    for (std::size_t i = 0; i < 4; ++i) CHECK(a.rows[i].explained == b.rows[i].explained);
    CHECK(a.metric("explained").sd > 0.0);
  }
}
