#pragma once

#include <span>
#include <vector>

#include "cdpa/types.hpp"

namespace cdpa::linalg {

struct SvdFactors {
  Matrix u;  // p x k
  Vector s;  // descending
  Matrix v;  // n x k
};

// Flips column pairs (u_j, v_j), j < count, so the largest-magnitude entry of
// u_j is positive (first index wins on ties).
void normalize_signs(Matrix& u, Matrix& v, Index count);

// Thin SVD, singular values descending, sign-normalized.
SvdFactors thin_svd(const Matrix& a);

// Full SVD: u is p x p, v is n x n. The first min(p, n) pairs follow the sign
// rule jointly; completion columns are sign-normalized on their own.
SvdFactors full_svd(const Matrix& a);

// Top-r singular triplets. Small problems use a dense bidiagonal SVD; larger
// ones use block subspace iteration with Rayleigh-Ritz and fall back to the
// dense solver if the residuals do not settle.
struct TopSvd {
  Matrix u;
  Vector s;
  Matrix v;
  double energy = 0.0;  // ||A||_F^2
};
TopSvd top_svd(const Matrix& a, Index r);

// Eigenvalues of the smaller Gram matrix (the squared singular values of A,
// length min(p, n), descending) and the top `vectors` right singular vectors.
struct GramSpectrum {
  Vector squared_singular_values;
  Matrix right_vectors;  // n x vectors
};
GramSpectrum gram_spectrum(const Matrix& a, Index vectors);

double spectral_norm(const Matrix& a);
double frobenius_sq(const Matrix& a);

// Columns appended so that u (p x k, orthonormal first `valid` columns) is
// orthonormal throughout. Deterministic.
void complete_orthonormal(Matrix& u, Index valid);

}  // namespace cdpa::linalg
