#include "cdpa/linalg.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/QR>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <random>

#include "cdpa/kernels.hpp"

namespace cdpa::linalg {

namespace {

constexpr Index kDenseLimit = 200;
constexpr int kMaxSubspaceIterations = 300;
constexpr double kResidualTol = 1e-12;

Index argmax_abs(const Eigen::Ref<const Vector>& col) {
  Index best = 0;
  double best_val = -1.0;
  for (Index i = 0; i < col.size(); ++i) {
    const double a = std::fabs(col(i));
    if (a > best_val) {
      best_val = a;
      best = i;
    }
  }
  return best;
}

Matrix orthonormalize(const Matrix& a) {
  Eigen::HouseholderQR<Matrix> qr(a);
  return qr.householderQ() * Matrix::Identity(a.rows(), a.cols());
}

SvdFactors dense_top(const Matrix& a, Index r) {
  Eigen::BDCSVD<Matrix> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
  SvdFactors f{svd.matrixU().leftCols(r), svd.singularValues().head(r), svd.matrixV().leftCols(r)};
  normalize_signs(f.u, f.v, r);
  return f;
}

}  // namespace

double frobenius_sq(const Matrix& a) {
  return kernels::sum_squares({a.data(), static_cast<std::size_t>(a.size())});
}

void normalize_signs(Matrix& u, Matrix& v, Index count) {
  for (Index j = 0; j < count; ++j) {
    const Index i = argmax_abs(u.col(j));
    if (u(i, j) < 0.0) {
      u.col(j) *= -1.0;
      if (j < v.cols()) v.col(j) *= -1.0;
    }
  }
}

SvdFactors thin_svd(const Matrix& a) {
  Eigen::JacobiSVD<Matrix> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
  SvdFactors f{svd.matrixU(), svd.singularValues(), svd.matrixV()};
  normalize_signs(f.u, f.v, f.s.size());
  return f;
}

SvdFactors full_svd(const Matrix& a) {
  Eigen::JacobiSVD<Matrix> svd(a, Eigen::ComputeFullU | Eigen::ComputeFullV);
  SvdFactors f{svd.matrixU(), svd.singularValues(), svd.matrixV()};
  const Index k = f.s.size();
  normalize_signs(f.u, f.v, k);
  for (Index j = k; j < f.u.cols(); ++j) {
    const Index i = argmax_abs(f.u.col(j));
    if (f.u(i, j) < 0.0) f.u.col(j) *= -1.0;
  }
  for (Index j = k; j < f.v.cols(); ++j) {
    const Index i = argmax_abs(f.v.col(j));
    if (f.v(i, j) < 0.0) f.v.col(j) *= -1.0;
  }
  return f;
}

void complete_orthonormal(Matrix& u, Index valid) {
  const Index p = u.rows();
  const Index k = u.cols();
  if (valid >= k) return;
  Index next = valid;
  for (Index e = 0; e < p && next < k; ++e) {
    Vector cand = Vector::Unit(p, e);
    for (int pass = 0; pass < 2; ++pass)
      cand -= u.leftCols(next) * (u.leftCols(next).transpose() * cand);
    const double nrm = cand.norm();
    if (nrm > 1e-8) u.col(next++) = cand / nrm;
  }
}

TopSvd top_svd(const Matrix& a, Index r) {
  const Index p = a.rows();
  const Index n = a.cols();
  const Index m = std::min(p, n);
  r = std::min(r, m);
  TopSvd out;
  out.energy = frobenius_sq(a);

  if (m <= kDenseLimit || r + 10 > m / 2) {
    auto f = dense_top(a, r);
    out.u = std::move(f.u);
    out.s = std::move(f.s);
    out.v = std::move(f.v);
    return out;
  }

  const Index block = std::min(m, r + 10);
  std::mt19937_64 rng(0x5eedULL);
  std::normal_distribution<double> normal;
  Matrix omega(n, block);
  for (Index j = 0; j < block; ++j)
    for (Index i = 0; i < n; ++i) omega(i, j) = normal(rng);
  omega = orthonormalize(omega);

  const double scale = std::sqrt(out.energy);
  for (int iter = 0; iter < kMaxSubspaceIterations; ++iter) {
    Matrix q = orthonormalize(a * omega);
    Matrix bt = a.transpose() * q;  // n x block, B = Q^T A
    Eigen::JacobiSVD<Matrix> small(bt, Eigen::ComputeThinU | Eigen::ComputeThinV);
    // B^T = W S Z^T  =>  B = Z S W^T, so A ~ (Q Z) S W^T
    Matrix u = q * small.matrixV();
    Matrix v = small.matrixU();
    Vector s = small.singularValues();
    // A^T u_j = s_j v_j holds by construction; the informative residual is
    // ||A v_j - s_j u_j||.
    Matrix res = a * v.leftCols(r) - u.leftCols(r) * s.head(r).asDiagonal();
    double worst = 0.0;
    for (Index j = 0; j < r; ++j) worst = std::max(worst, res.col(j).norm());
    if (worst <= kResidualTol * std::max(scale, 1e-300) || out.energy == 0.0) {
      out.u = u.leftCols(r);
      out.s = s.head(r);
      out.v = v.leftCols(r);
      normalize_signs(out.u, out.v, r);
      return out;
    }
    omega = orthonormalize(v);
  }
  auto f = dense_top(a, r);
  out.u = std::move(f.u);
  out.s = std::move(f.s);
  out.v = std::move(f.v);
  return out;
}

GramSpectrum gram_spectrum(const Matrix& a, Index vectors) {
  const Index p = a.rows();
  const Index n = a.cols();
  const Index m = std::min(p, n);
  vectors = std::min(vectors, m);
  GramSpectrum out;
  out.squared_singular_values.resize(m);
  if (n <= p) {
    Matrix g = a.transpose() * a;
    Eigen::SelfAdjointEigenSolver<Matrix> es(g);
    const Vector& ev = es.eigenvalues();  // ascending
    for (Index i = 0; i < m; ++i) out.squared_singular_values(i) = std::max(ev(m - 1 - i), 0.0);
    out.right_vectors.resize(n, vectors);
    for (Index j = 0; j < vectors; ++j) out.right_vectors.col(j) = es.eigenvectors().col(m - 1 - j);
  } else {
    Matrix g = a * a.transpose();
    Eigen::SelfAdjointEigenSolver<Matrix> es(g);
    const Vector& ev = es.eigenvalues();
    for (Index i = 0; i < m; ++i) out.squared_singular_values(i) = std::max(ev(m - 1 - i), 0.0);
    out.right_vectors.resize(n, vectors);
    for (Index j = 0; j < vectors; ++j) {
      const double s = std::sqrt(out.squared_singular_values(j));
      if (s > 0.0) {
        out.right_vectors.col(j) = a.transpose() * es.eigenvectors().col(m - 1 - j) / s;
      } else {
        out.right_vectors.col(j).setZero();
      }
    }
  }
  // Right vectors of null directions (p < n) are completed deterministically.
  Index valid = 0;
  while (valid < vectors && out.right_vectors.col(valid).norm() > 0.5) ++valid;
  complete_orthonormal(out.right_vectors, valid);
  return out;
}

double spectral_norm(const Matrix& a) {
  if (a.size() == 0) return 0.0;
  const Matrix g = (a.rows() <= a.cols()) ? Matrix(a * a.transpose()) : Matrix(a.transpose() * a);
  Eigen::SelfAdjointEigenSolver<Matrix> es(g, Eigen::EigenvaluesOnly);
  return std::sqrt(std::max(es.eigenvalues().maxCoeff(), 0.0));
}

}  // namespace cdpa::linalg
