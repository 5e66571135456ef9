#include "cdpa/pattern.hpp"

#include <cmath>
#include <utility>

#include "cdpa/align.hpp"
#include "cdpa/linalg.hpp"

namespace cdpa {

DualWeight dual_weights(const ChannelSubspacePair& pair, const MixingChannel& b1,
                        const MixingChannel& b2a_permuted, std::array<double, 2> traces,
                        DualWeightVariant variant) {
  if (!(traces[0] > 0.0) || !(traces[1] > 0.0)) throw Error(Errc::InvalidInput, "signal traces must be positive");
  if (b1.b.rows() != pair.v_b1.rows() || b2a_permuted.b.rows() != pair.v_b2.rows())
    throw Error(Errc::BadDimensions, "channels and principal vectors disagree on rows");
  DualWeight w;
  w.scale1 = std::sqrt(traces[0]);
  w.scale2 = std::sqrt(traces[1]);
  w.s1 = pair.v_b1.transpose() * b1.b;
  const Matrix& v2 = variant == DualWeightVariant::Own ? pair.v_b2 : pair.v_b1;
  w.s2 = v2.transpose() * b2a_permuted.b;
  w.s = 0.5 * (w.s1 / w.scale1 + w.s2 / w.scale2);
  return w;
}

Matrix common_pattern(const ChannelPatternBasis& basis, const DualWeight& weights, const CommonFactorSet& c0) {
  if (basis.c_b.cols() != weights.s.rows() || weights.s.cols() != c0.c0.rows())
    throw Error(Errc::BadDimensions, "pattern basis, dual weight and factors disagree on r12");
  return basis.c_b * (weights.s * c0.c0);
}

double explained_variance(const Matrix& c, Index n) {
  if (n <= 0) throw Error(Errc::InvalidInput, "sample count must be positive");
  return linalg::frobenius_sq(c) / static_cast<double>(n);
}

PatternDecomposition pattern_decomposition(const std::array<Matrix, 2>& aligned_x,
                                           const std::array<SourceDecomposition, 2>& sources,
                                           const Matrix& c, std::array<double, 2> traces) {
  PatternDecomposition out;
  out.c = c;
  for (int k = 0; k < 2; ++k) {
    const auto& x = aligned_x[static_cast<std::size_t>(k)];
    const auto& src = sources[static_cast<std::size_t>(k)];
    if (x.rows() != c.rows() || x.cols() != c.cols() || src.c.rows() != c.rows() || src.d.rows() != c.rows())
      throw Error(Errc::BadDimensions, "pattern inputs must share the reference geometry");
    auto& cs = out.c_scaled[static_cast<std::size_t>(k)];
    cs = std::sqrt(traces[static_cast<std::size_t>(k)]) * c;
    out.h[static_cast<std::size_t>(k)] = src.c - cs;
    out.delta[static_cast<std::size_t>(k)] = out.h[static_cast<std::size_t>(k)] + src.d;
    out.aligned_x[static_cast<std::size_t>(k)] = x;
    out.aligned_common[static_cast<std::size_t>(k)] = src.c;
    out.aligned_distinct[static_cast<std::size_t>(k)] = src.d;
  }
  out.explained = explained_variance(c, c.cols());
  return out;
}

PopulationCdpa population_cdpa(const PopulationModel& model) {
  PopulationCdpa out;
  // Internal frame: index 0 is the reference (more rows).
  out.swapped = model.v1.rows() < model.v2.rows();
  const Matrix& va = out.swapped ? model.v2 : model.v1;
  const Matrix& vb = out.swapped ? model.v1 : model.v2;
  const Vector& la = out.swapped ? model.lambda2 : model.lambda1;
  const Vector& lb = out.swapped ? model.lambda1 : model.lambda2;
  const Matrix theta = out.swapped ? Matrix(model.cross_cov.transpose()) : model.cross_cov;
  if (va.cols() != la.size() || vb.cols() != lb.size() || theta.rows() != la.size() || theta.cols() != lb.size())
    throw Error(Errc::BadDimensions, "population model factor shapes disagree");
  if ((la.array() <= 0.0).any() || (lb.array() <= 0.0).any())
    throw Error(Errc::InvalidInput, "population eigenvalues must be positive");

  auto svd = linalg::full_svd(theta);
  int r12 = 0;
  for (Index i = 0; i < svd.s.size(); ++i)
    if (svd.s(i) > kCorrelationRankTol) ++r12;
  out.r12 = r12;
  out.correlations = svd.s.head(r12).cwiseMin(1.0);
  out.coefficients = common_factor_coefficients(out.correlations);
  if (r12 == 0) {
    const Index p = va.rows();
    out.map1 = Matrix::Zero(p, model.lambda1.size());
    out.map2 = Matrix::Zero(p, model.lambda2.size());
    for (int k = 0; k < 2; ++k) {
      out.source_map1[static_cast<std::size_t>(k)] = out.map1;
      out.source_map2[static_cast<std::size_t>(k)] = out.map2;
    }
    out.contributions = Vector::Zero(0);
    return out;
  }

  const Matrix ua = svd.u.leftCols(r12);
  const Matrix ub = svd.v.leftCols(r12);
  const Index p = va.rows();
  MixingChannel ba{va * la.cwiseSqrt().asDiagonal() * ua, 1};
  MixingChannel bb = zero_pad(MixingChannel{vb * lb.cwiseSqrt().asDiagonal() * ub, 2}, p);

  PermutationPlan ident;
  ident.perm = identity_permutation(p);
  out.pair = principal_angles(orthonormal_basis(ba), orthonormal_basis(bb), ident);
  out.basis = channel_common_basis(out.pair);
  out.weights = dual_weights(out.pair, ba, bb, {la.sum(), lb.sum()}, model.variant);

  const Vector a = out.coefficients;
  const Vector c0_var = (a.array().square() * (2.0 + 2.0 * out.correlations.array())).matrix();
  const Matrix m = out.weights.s * c0_var.asDiagonal() * out.weights.s.transpose();
  out.trace_cov_c = (out.basis.c_b * m * out.basis.c_b.transpose()).trace();
  out.contributions.resize(r12);
  for (int l = 0; l < r12; ++l) out.contributions(l) = out.basis.c_b.col(l).squaredNorm() * m(l, l);

  // c0 = A (Ua^T za + Ub^T zb)
  const Matrix ca = a.asDiagonal() * ua.transpose();
  const Matrix cb = a.asDiagonal() * ub.transpose();
  const Matrix pattern = out.basis.c_b * out.weights.s;
  std::array<Matrix, 2> map{pattern * ca, pattern * cb};
  std::array<std::array<Matrix, 2>, 2> src{{{ba.b * ca, ba.b * cb}, {bb.b * ca, bb.b * cb}}};
  const std::size_t first = out.swapped ? 1 : 0;
  const std::size_t second = 1 - first;
  out.map1 = map[first];
  out.map2 = map[second];
  for (std::size_t k = 0; k < 2; ++k) {
    const std::size_t internal = out.swapped ? 1 - k : k;
    out.source_map1[k] = src[internal][first];
    out.source_map2[k] = src[internal][second];
  }
  out.b1 = out.swapped ? bb : ba;
  out.b2a = out.swapped ? ba : bb;
  return out;
}

}  // namespace cdpa
