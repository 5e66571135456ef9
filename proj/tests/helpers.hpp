#pragma once

#include <cmath>
#include <cstdint>
#include <random>

#include "cdpa/types.hpp"

namespace testing {

using cdpa::Index;
using cdpa::Matrix;
using cdpa::Vector;

inline Matrix gaussian(Index rows, Index cols, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd;
  Matrix m(rows, cols);
  for (Index j = 0; j < cols; ++j)
    for (Index i = 0; i < rows; ++i) m(i, j) = nd(rng);
  return m;
}

inline Matrix orthonormal(Index rows, Index cols, std::uint64_t seed) {
  Eigen::HouseholderQR<Matrix> qr(gaussian(rows, cols, seed));
  return qr.householderQ() * Matrix::Identity(rows, cols);
}

inline double rel_err(const Matrix& a, const Matrix& b) {
  const double den = b.norm();
  return den > 0.0 ? (a - b).norm() / den : (a - b).norm();
}

inline Matrix projector(const Matrix& q) { return q * q.transpose(); }

// Low-rank p x n matrix with prescribed singular values.
inline Matrix low_rank(Index p, Index n, const Vector& s, std::uint64_t seed) {
  return orthonormal(p, s.size(), seed) * s.asDiagonal() * orthonormal(n, s.size(), seed + 1).transpose();
}

}  // namespace testing
