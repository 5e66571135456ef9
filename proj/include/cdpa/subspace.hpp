#pragma once

#include "cdpa/dcca.hpp"
#include "cdpa/permutation.hpp"

namespace cdpa {

/// Orthonormal basis (left singular vectors) of a channel's column space.
Matrix orthonormal_basis(const MixingChannel& b);

/// Principal angles and vectors of colsp(Q1) and colsp(P Q2A).
struct ChannelSubspacePair {
  Matrix q1;
  Matrix q2a;
  Matrix theta_b;  // Q1^T P Q2A
  Vector cosines;  // nonincreasing, clamped to [0, 1]
  Matrix v_b1;     // Q1 U_B1
  Matrix v_b2;     // P Q2A U_B2
};

ChannelSubspacePair principal_angles(const Matrix& q1, const Matrix& q2a, const PermutationPlan& plan);

/// Common/distinctive split of each principal-vector pair:
/// c_l = (1 - tan(theta_l / 2)) (v1_l + v2_l) / 2, d_kl = v_kl - c_l.
struct ChannelPatternBasis {
  Matrix c_b;
  Matrix d_b1;
  Matrix d_b2;
};

/// 1 - sqrt((1 - c) / (1 + c)) = 1 - tan(theta / 2) for c = cos(theta).
double common_channel_weight(double cosine);

ChannelPatternBasis channel_common_basis(const ChannelSubspacePair& pair);

}  // namespace cdpa
