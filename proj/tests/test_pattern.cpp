#include <cmath>
#include <numbers>

#include "cdpa/align.hpp"
#include "cdpa/pattern.hpp"
#include "cdpa/simulate.hpp"
#include "doctest.h"
#include "helpers.hpp"

using namespace cdpa;
using testing::rel_err;

namespace {

struct Chain {
  CanonicalSystem system;
  std::array<SignalEstimate, 2> x;
  std::array<SignalCovariance, 2> cov;
};

Chain canonical(const Matrix& x1, const Matrix& x2, int r1, int r2, int r12) {
  Chain ch;
  ch.x = {exact_signal(x1, r1), exact_signal(x2, r2)};
  ch.cov = {signal_covariance(ch.x[0]), signal_covariance(ch.x[1])};
  ch.system = canonical_system(ch.cov[0], ch.cov[1], ch.x[0], ch.x[1], r12);
  return ch;
}

// Pattern from a (possibly modified) canonical system; requires p1 >= p2.
PatternDecomposition finish(const Chain& ch, DualWeightVariant variant = DualWeightVariant::Own) {
  const auto c0 = common_factor_scores(ch.system, common_factor_coefficients(ch.system.correlations));
  auto [s1, b1] = source_decomposition(ch.x[0], ch.system, c0, 1);
  auto [s2, b2] = source_decomposition(ch.x[1], ch.system, c0, 2);
  const Index p = ch.x[0].variables();
  const MixingChannel b2a = zero_pad(b2, p);
  const auto pair = principal_angles(orthonormal_basis(b1), orthonormal_basis(b2a), PermutationPlan{});
  const auto basis = channel_common_basis(pair);
  const std::array<double, 2> traces{ch.cov[0].trace, ch.cov[1].trace};
  const auto w = dual_weights(pair, b1, b2a, traces, variant);
  const Matrix c = common_pattern(basis, w, c0);
  const std::array<Matrix, 2> xs{ch.x[0].xhat, zero_pad_rows(ch.x[1].xhat, p)};
  const std::array<SourceDecomposition, 2> src{s1, SourceDecomposition{zero_pad_rows(s2.c, p), zero_pad_rows(s2.d, p)}};
  return pattern_decomposition(xs, src, c, traces);
}

PatternDecomposition run(const Matrix& x1, const Matrix& x2, int r1, int r2, int r12,
                         DualWeightVariant variant = DualWeightVariant::Own) {
  return finish(canonical(x1, x2, r1, r2, r12), variant);
}

// Two correlated low-rank signals with p1 = 30, p2 = 24.
std::pair<Matrix, Matrix> correlated(Index n, std::uint64_t seed) {
  const Matrix z = testing::gaussian(3, n, seed);
  const Matrix x1 = testing::orthonormal(30, 3, seed + 1) * Vector::LinSpaced(3, 12, 4).asDiagonal() * z;
  const Matrix x2 = testing::orthonormal(24, 3, seed + 2) * Vector::LinSpaced(3, 10, 5).asDiagonal() *
                    (0.7 * z + 0.5 * testing::gaussian(3, n, seed + 3));
  return {x1, x2};
}

void check_additive(const PatternDecomposition& pd) {
  for (std::size_t k = 0; k < 2; ++k) {
    CHECK(rel_err(pd.c_scaled[k] + pd.h[k], pd.aligned_common[k]) < 1e-12);
    CHECK(rel_err(pd.aligned_common[k] + pd.aligned_distinct[k], pd.aligned_x[k]) < 1e-12);
    CHECK(rel_err(pd.c_scaled[k] + pd.delta[k], pd.aligned_x[k]) < 1e-12);
  }
}

}  // namespace

TEST_SUITE("pattern") {
  TEST_CASE("identical signals give the whole signal as pattern") {
    const Matrix x = testing::low_rank(12, 60, Vector::LinSpaced(3, 8, 2), 3);
    const auto pd = run(x, x, 3, 3, 3);
    const double tr = x.squaredNorm() / 60.0;
    CHECK(rel_err(pd.c, x / std::sqrt(tr)) < 1e-8);
    CHECK(pd.explained == doctest::Approx(1.0).epsilon(1e-8));
    CHECK(pd.h[0].norm() < 1e-8 * x.norm());
    CHECK(pd.delta[1].norm() < 1e-8 * x.norm());
    check_additive(pd);
  }

  TEST_CASE("orthogonal signals share nothing") {
    const Index n = 50;
    const Matrix w = testing::orthonormal(n, 4, 5) * std::sqrt(double(n));
    const Matrix a = testing::orthonormal(10, 2, 6) * w.leftCols(2).transpose();
    const Matrix b = testing::orthonormal(10, 2, 7) * w.rightCols(2).transpose();
    const auto pd = run(a, b, 2, 2, 2);
    CHECK(pd.c.norm() == 0.0);
    CHECK(pd.explained == 0.0);
    CHECK(rel_err(pd.delta[0], a) < 1e-12);
  }

  TEST_CASE("additivity on correlated signals") {
    auto [x1, x2] = correlated(80, 11);
    const auto pd = run(x1, x2, 3, 3, 3);
    check_additive(pd);
    CHECK(pd.explained > 0.0);
    CHECK(pd.explained < 1.0);
    CHECK(pd.explained == doctest::Approx(explained_variance(pd.c, 80)).epsilon(1e-14));
  }

  TEST_CASE("pattern does not depend on the scale of either dataset") {
    auto [x1, x2] = correlated(80, 21);
    const auto base = run(x1, x2, 3, 3, 3);
    const auto scaled = run(3.0 * x1, 0.25 * x2, 3, 3, 3);
    CHECK(rel_err(scaled.c, base.c) < 1e-9);
    CHECK(rel_err(scaled.c_scaled[0], 3.0 * base.c_scaled[0]) < 1e-9);
    CHECK(rel_err(scaled.c_scaled[1], 0.25 * base.c_scaled[1]) < 1e-9);
  }

  TEST_CASE("negating both datasets negates the pattern") {
    auto [x1, x2] = correlated(80, 31);
    const auto base = run(x1, x2, 3, 3, 3);
    const auto flipped = run(-x1, -x2, 3, 3, 3);
    CHECK(rel_err(flipped.c, -base.c) < 1e-9);
    CHECK(flipped.explained == doctest::Approx(base.explained).epsilon(1e-10));
  }

  TEST_CASE("rotation inside a tied canonical block leaves the pattern unchanged") {
    const Index n = 200;
    const Matrix z = testing::gaussian(6, n, 41);
    const Matrix zw = (z * z.transpose() / double(n)).llt().matrixL().solve(z);  // exact white scores
    const double r = std::sqrt(0.5);
    Matrix z1 = zw.topRows(3);
    Matrix z2(3, n);
    z2.row(0) = 0.9 * z1.row(0) + std::sqrt(1 - 0.81) * zw.row(3);
    z2.row(1) = r * z1.row(1) + r * zw.row(4);
    z2.row(2) = r * z1.row(2) + r * zw.row(5);
    const Matrix x1 = testing::orthonormal(20, 3, 42) * Vector::LinSpaced(3, 9, 5).asDiagonal() * z1;
    const Matrix x2 = testing::orthonormal(20, 3, 43) * Vector::LinSpaced(3, 8, 6).asDiagonal() * z2;
    Chain ch = canonical(x1, x2, 3, 3, 3);
    REQUIRE(ch.system.correlations(1) == doctest::Approx(ch.system.correlations(2)).epsilon(1e-10));
    const auto base = finish(ch);

    const double t = 0.7;
    Eigen::Matrix2d rot;
    rot << std::cos(t), -std::sin(t), std::sin(t), std::cos(t);
    ch.system.z1.middleRows(1, 2) = rot * ch.system.z1.middleRows(1, 2);
    ch.system.z2.middleRows(1, 2) = rot * ch.system.z2.middleRows(1, 2);
    const auto rotated = finish(ch);
    CHECK(rel_err(rotated.c, base.c) < 1e-8);
  }

  TEST_CASE("dual weights of the population setup") {
    SimulationConfig cfg;
    cfg.p1 = 40;
    cfg.theta_deg = 45.0;
    const auto s = make_structure(normalize(cfg));
    const auto& pop = s.population;
    REQUIRE(pop.r12 == 5);
    const Vector lam = setup_eigenvalues();
    for (Index l = 0; l < 5; ++l)
      CHECK(std::abs(pop.weights.s(l, l)) == doctest::Approx(std::sqrt(lam(l) / 1500.0)).epsilon(1e-10));
    Matrix off = pop.weights.s;
    off.diagonal().setZero();
    CHECK(off.cwiseAbs().maxCoeff() < 1e-12);
    CHECK(pop.contributions.sum() == doctest::Approx(pop.trace_cov_c).epsilon(1e-12));
  }

  TEST_CASE("population result does not depend on dataset order") {
    PopulationModel m;
    m.v1 = testing::orthonormal(25, 3, 51);
    m.v2 = testing::orthonormal(18, 2, 52);
    m.lambda1 = Vector::LinSpaced(3, 30, 10);
    m.lambda2 = Vector::LinSpaced(2, 20, 15);
    m.cross_cov = Matrix::Zero(3, 2);
    m.cross_cov(0, 0) = 0.8;
    m.cross_cov(1, 1) = 0.4;
    const auto a = population_cdpa(m);
    PopulationModel swapped{m.v2, m.v1, m.lambda2, m.lambda1, m.cross_cov.transpose(), m.variant};
    const auto b = population_cdpa(swapped);
    CHECK_FALSE(a.swapped);
    CHECK(b.swapped);
    CHECK(a.r12 == 2);
    CHECK(b.trace_cov_c == doctest::Approx(a.trace_cov_c).epsilon(1e-10));

    m.cross_cov.setZero();
    const auto none = population_cdpa(m);
    CHECK(none.r12 == 0);
    CHECK(none.trace_cov_c == 0.0);
  }

  TEST_CASE("first-basis variant differs from the default") {
    auto [x1, x2] = correlated(80, 61);
    const auto own = run(x1, x2, 3, 3, 3, DualWeightVariant::Own);
    const auto first = run(x1, x2, 3, 3, 3, DualWeightVariant::First);
    CHECK(rel_err(first.c, own.c) > 1e-6);
  }

  TEST_CASE("input validation") {
    CHECK_THROWS_AS(explained_variance(Matrix::Zero(2, 2), 0), Error);
    ChannelSubspacePair pair;
    pair.v_b1 = Matrix::Identity(3, 1);
    pair.v_b2 = Matrix::Identity(3, 1);
    const MixingChannel b{Matrix::Ones(3, 1), 1};
    CHECK_THROWS_AS(dual_weights(pair, b, b, {0.0, 1.0}), Error);
    CHECK_THROWS_AS(dual_weights(pair, MixingChannel{Matrix::Ones(4, 1), 1}, b, {1.0, 1.0}), Error);
  }
}
