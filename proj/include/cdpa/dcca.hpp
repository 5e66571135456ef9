#pragma once

#include <utility>

#include "cdpa/denoise.hpp"

namespace cdpa {

/// Sample canonical system of two denoised signals.
///
/// z1, z2 are the r_k x n score matrices with (1/n) Z_k Z_k^T = I and
/// (1/n) Z_1 Z_2^T diagonal with nonincreasing entries. `correlations` holds
/// the leading r12 canonical correlations, clamped to [0, 1].
struct CanonicalSystem {
  Matrix z1;
  Matrix z2;
  Matrix theta_hat;  // r1 x r2, (1/n) Z1* Z2*^T
  Matrix rot1;       // r1 x r1, left singular vectors of theta_hat
  Matrix rot2;       // r2 x r2, right singular vectors of theta_hat
  Vector singular_values;  // all min(r1, r2) singular values of theta_hat
  Vector correlations;     // first r12 of them, clamped
  int r12 = 0;
};

/// Correlations at or below this are treated as exact zeros (rank of Theta).
inline constexpr double kCorrelationRankTol = 1e-12;

/// Cosines this close to 1 are taken as exactly 1 before sqrt((1 - c) / (1 + c)),
/// which would otherwise turn an ulp of SVD round-off into a 1e-8 error.
inline constexpr double kUnitCosineSnap = 64 * 2.220446049250313e-16;

/// tan(t / 2) for cos t = c, with c clamped to [0, 1] and snapped near 1.
double half_angle_tangent(double c);

CanonicalSystem canonical_system(const SignalCovariance& cov1, const SignalCovariance& cov2,
                                 const SignalEstimate& x1, const SignalEstimate& x2, int r12);

/// a_l = (1 - sqrt((1 - rho_l) / (1 + rho_l))) / 2, zero for vanishing rho_l.
Vector common_factor_coefficients(const Vector& correlations);

struct CommonFactorSet {
  Matrix c0;  // r12 x n
  Vector coefficients;
};

CommonFactorSet common_factor_scores(const CanonicalSystem& system, const Vector& coefficients);

struct MixingChannel {
  Matrix b;  // p_k x r12
  int dataset_index = 1;
};

struct SourceDecomposition {
  Matrix c;  // common-source part C_k
  Matrix d;  // distinctive-source part D_k
};

/// B_k = (1/n) X_k Z_k[:r12]^T, C_k = B_k C0, D_k = X_k - C_k. `k` is 1 or 2.
std::pair<SourceDecomposition, MixingChannel> source_decomposition(const SignalEstimate& xhat,
                                                                   const CanonicalSystem& system,
                                                                   const CommonFactorSet& c0, int k);

}  // namespace cdpa
