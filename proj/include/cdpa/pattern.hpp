#pragma once

#include <array>

#include "cdpa/dcca.hpp"
#include "cdpa/subspace.hpp"

namespace cdpa {

/// Which principal vectors project each channel onto the shared basis.
/// `Own` uses V_Bk for dataset k; `First` uses V_B1 for both (kept for audit).
enum class DualWeightVariant { Own, First };

struct DualWeight {
  Matrix s1;  // V_B1^T B1
  Matrix s2;  // V_Bk^T P B2A (k per variant)
  Matrix s;   // (s1 / scale1 + s2 / scale2) / 2
  double scale1 = 1.0;
  double scale2 = 1.0;
};

/// `traces` are tr(Sigma_1), tr(Sigma_2); `b2a_permuted` is P B2A.
DualWeight dual_weights(const ChannelSubspacePair& pair, const MixingChannel& b1,
                        const MixingChannel& b2a_permuted, std::array<double, 2> traces,
                        DualWeightVariant variant = DualWeightVariant::Own);

/// C = C_B S C0.
Matrix common_pattern(const ChannelPatternBasis& basis, const DualWeight& weights, const CommonFactorSet& c0);

/// All matrices live in the reference row geometry (dataset 2 padded and
/// permuted when the datasets differ in size).
struct PatternDecomposition {
  Matrix c;
  std::array<Matrix, 2> c_scaled;   // sqrt(tr Sigma_k) C
  std::array<Matrix, 2> h;          // C_k - C^(k)
  std::array<Matrix, 2> delta;      // X_k - C^(k)
  std::array<Matrix, 2> aligned_x;  // X_k
  std::array<Matrix, 2> aligned_common;    // C_k
  std::array<Matrix, 2> aligned_distinct;  // D_k
  double explained = 0.0;
};

/// `sources[k]` must already be in the reference geometry.
PatternDecomposition pattern_decomposition(const std::array<Matrix, 2>& aligned_x,
                                           const std::array<SourceDecomposition, 2>& sources,
                                           const Matrix& c, std::array<double, 2> traces);

/// ||C||_F^2 / n.
double explained_variance(const Matrix& c, Index n);

/// Population model: x_k = V_k Lambda_k^{1/2} z_k with cov(z_k) = I and
/// cov(z1, z2) = cross_cov.
struct PopulationModel {
  Matrix v1, v2;
  Vector lambda1, lambda2;
  Matrix cross_cov;  // r1 x r2
  DualWeightVariant variant = DualWeightVariant::Own;
};

struct PopulationCdpa {
  bool swapped = false;  // dataset 2 had more rows and became the reference
  int r12 = 0;
  MixingChannel b1, b2a;  // reference geometry, identity alignment
  Vector correlations;
  Vector coefficients;
  ChannelSubspacePair pair;
  ChannelPatternBasis basis;
  DualWeight weights;
  double trace_cov_c = 0.0;
  Vector contributions;  // ||c_Bl||^2 (S cov(c0) S^T)_ll, sums to trace_cov_c
  // C = map1 Z1 + map2 Z2 and C_k = common_map[k] (Z1 + Z2-part) in the
  // original latent coordinates, for building sample-level ground truth.
  Matrix map1, map2;
  std::array<Matrix, 2> source_map1, source_map2;  // C_k = source_map1[k] Z1 + source_map2[k] Z2
};

PopulationCdpa population_cdpa(const PopulationModel& model);

}  // namespace cdpa
