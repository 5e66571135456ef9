#include "cdpa/dcca.hpp"

#include <algorithm>
#include <cmath>

#include "cdpa/linalg.hpp"

namespace cdpa {

namespace {

constexpr double kEigenRankTol = 1e-12;

Matrix whitened_scores(const SignalCovariance& cov, const SignalEstimate& x) {
  const double top = cov.eigvalues(0);
  for (Index i = 0; i < cov.eigvalues.size(); ++i) {
    if (cov.eigvalues(i) <= kEigenRankTol * top)
      throw Error(Errc::RankDeficiency, "signal covariance eigenvalue below 1e-12 * largest");
  }
  const Vector inv_sqrt = cov.eigvalues.array().rsqrt();
  return inv_sqrt.asDiagonal() * (cov.eigvectors.transpose() * x.xhat);
}

}  // namespace

CanonicalSystem canonical_system(const SignalCovariance& cov1, const SignalCovariance& cov2,
                                 const SignalEstimate& x1, const SignalEstimate& x2, int r12) {
  if (x1.samples() != x2.samples()) throw Error(Errc::BadDimensions, "signals have different n");
  const auto r1 = static_cast<int>(cov1.eigvalues.size());
  const auto r2 = static_cast<int>(cov2.eigvalues.size());
  if (r12 < 0 || r12 > std::min(r1, r2))
    throw Error(Errc::BadDimensions, "r12 exceeds min(r1, r2) of the signal covariances");
  const auto n = static_cast<double>(x1.samples());

  const Matrix z1s = whitened_scores(cov1, x1);
  const Matrix z2s = whitened_scores(cov2, x2);

  CanonicalSystem sys;
  sys.r12 = r12;
  sys.theta_hat = z1s * z2s.transpose() / n;
  auto svd = linalg::full_svd(sys.theta_hat);
  sys.rot1 = std::move(svd.u);
  sys.rot2 = std::move(svd.v);
  sys.singular_values = std::move(svd.s);
  sys.z1 = sys.rot1.transpose() * z1s;
  sys.z2 = sys.rot2.transpose() * z2s;
  sys.correlations = sys.singular_values.head(r12).cwiseMax(0.0).cwiseMin(1.0);
  return sys;
}

double half_angle_tangent(double c) {
  c = std::clamp(c, 0.0, 1.0);
  if (c >= 1.0 - kUnitCosineSnap) return 0.0;
  return std::sqrt((1.0 - c) / (1.0 + c));
}

Vector common_factor_coefficients(const Vector& correlations) {
  Vector a(correlations.size());
  for (Index l = 0; l < a.size(); ++l) {
    const double rho = std::clamp(correlations(l), 0.0, 1.0);
    a(l) = rho <= kCorrelationRankTol ? 0.0 : 0.5 * (1.0 - half_angle_tangent(rho));
  }
  return a;
}

CommonFactorSet common_factor_scores(const CanonicalSystem& system, const Vector& coefficients) {
  const int r = system.r12;
  if (coefficients.size() != r) throw Error(Errc::BadDimensions, "coefficient count != r12");
  CommonFactorSet out;
  out.coefficients = coefficients;
  out.c0 = coefficients.asDiagonal() * (system.z1.topRows(r) + system.z2.topRows(r));
  return out;
}

std::pair<SourceDecomposition, MixingChannel> source_decomposition(const SignalEstimate& xhat,
                                                                   const CanonicalSystem& system,
                                                                   const CommonFactorSet& c0, int k) {
  if (k != 1 && k != 2) throw Error(Errc::InvalidInput, "dataset index must be 1 or 2");
  const Matrix& z = (k == 1) ? system.z1 : system.z2;
  if (z.cols() != xhat.samples()) throw Error(Errc::BadDimensions, "scores and signal disagree on n");
  const auto n = static_cast<double>(xhat.samples());
  MixingChannel channel;
  channel.dataset_index = k;
  channel.b = xhat.xhat * z.topRows(system.r12).transpose() / n;
  SourceDecomposition src;
  src.c = channel.b * c0.c0;
  src.d = xhat.xhat - src.c;
  return {std::move(src), std::move(channel)};
}

}  // namespace cdpa
