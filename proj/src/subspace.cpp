#include "cdpa/subspace.hpp"

#include <algorithm>
#include <cmath>

#include "cdpa/linalg.hpp"

namespace cdpa {

namespace {
constexpr double kChannelRankTol = 1e-10;
}

Matrix orthonormal_basis(const MixingChannel& b) {
  if (b.b.cols() == 0) throw Error(Errc::ChannelRankDeficient, "empty channel");
  auto svd = linalg::thin_svd(b.b);
  const double top = svd.s(0);
  const double bottom = svd.s(svd.s.size() - 1);
  if (!(top > 0.0) || bottom <= kChannelRankTol * top || svd.s.size() < b.b.cols())
    throw Error(Errc::ChannelRankDeficient, "channel " + std::to_string(b.dataset_index) +
                                                " does not have full column rank");
  return svd.u;
}

ChannelSubspacePair principal_angles(const Matrix& q1, const Matrix& q2a, const PermutationPlan& plan) {
  if (q1.rows() != q2a.rows() || q1.cols() != q2a.cols())
    throw Error(Errc::BadDimensions, "principal_angles needs two p1 x r12 bases");
  ChannelSubspacePair pair;
  pair.q1 = q1;
  pair.q2a = q2a;
  const Matrix pq2 = plan.perm.empty() ? q2a : permute_rows(q2a, plan.perm);
  pair.theta_b = q1.transpose() * pq2;
  auto svd = linalg::full_svd(pair.theta_b);
  pair.cosines = svd.s.cwiseMax(0.0).cwiseMin(1.0);
  pair.v_b1 = q1 * svd.u;
  pair.v_b2 = pq2 * svd.v;
  return pair;
}

double common_channel_weight(double cosine) {
  return 1.0 - half_angle_tangent(cosine);
}

ChannelPatternBasis channel_common_basis(const ChannelSubspacePair& pair) {
  ChannelPatternBasis basis;
  const Index r = pair.cosines.size();
  basis.c_b.resize(pair.v_b1.rows(), r);
  for (Index l = 0; l < r; ++l)
    basis.c_b.col(l) = common_channel_weight(pair.cosines(l)) * 0.5 * (pair.v_b1.col(l) + pair.v_b2.col(l));
  basis.d_b1 = pair.v_b1 - basis.c_b;
  basis.d_b2 = pair.v_b2 - basis.c_b;
  return basis;
}

}  // namespace cdpa
