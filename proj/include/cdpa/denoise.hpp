#pragma once

#include <array>

#include "cdpa/types.hpp"

namespace cdpa {

/// A p x n data matrix, variables in rows and samples in columns.
struct ObservedMatrix {
  Matrix values;
  bool row_centered = false;

  Index variables() const { return values.rows(); }
  Index samples() const { return values.cols(); }
};

/// Validates finiteness and shape (p >= 1, n >= 2).
ObservedMatrix make_observed(Matrix values);

ObservedMatrix center_rows(const ObservedMatrix& y);

struct RankProfile {
  int r1 = 0;
  int r2 = 0;
  int r12 = 0;
};

/// Soft-thresholded rank-r estimate X = U diag(soft) W^T of a data matrix.
struct SignalEstimate {
  Matrix xhat;
  int rank = 0;
  Vector raw_singular_values;
  Vector soft_singular_values;
  double tau = 0.0;
  Matrix left_vectors;   // p x rank
  Matrix right_vectors;  // n x rank

  Index variables() const { return xhat.rows(); }
  Index samples() const { return xhat.cols(); }
};

SignalEstimate soft_threshold_denoise(const ObservedMatrix& y, int r);

/// Wraps an already low-rank matrix as a signal estimate without shrinkage.
/// Used when the caller has the signal itself (population checks, fixtures).
SignalEstimate exact_signal(const Matrix& x, int r);

/// Factored Sigma = V diag(eigvalues) V^T of X X^T / n, restricted to its rank.
struct SignalCovariance {
  Matrix eigvectors;
  Vector eigvalues;
  double trace = 0.0;
};

SignalCovariance signal_covariance(const SignalEstimate& xhat);

/// Eigenvalue-difference rank selection on the spectrum of Y Y^T / n.
struct EdSelection {
  int rank = 0;
  int cap = 0;         // T: eigenvalues above the mean, at most m / 10
  double delta = 0.0;  // calibrated gap threshold at the fixed point
  int iterations = 0;
};

/// `eigenvalues` holds the min(n, p) eigenvalues of Y Y^T / n, descending.
EdSelection ed_select(const Vector& eigenvalues);
int ed_select_rank(const ObservedMatrix& y);

/// Fisher-z screen over all cross-dataset variable pairs, Bonferroni-corrected.
/// True when at least one pair is significant at family-wise level alpha.
struct ScreenResult {
  bool significant = false;
  double max_abs_correlation = 0.0;
  double min_p_value = 1.0;  // unadjusted
  double threshold = 0.0;    // alpha / (p1 p2)
};
ScreenResult correlation_screen_detail(const SignalEstimate& x1, const SignalEstimate& x2, double alpha);
bool correlation_screen(const SignalEstimate& x1, const SignalEstimate& x2, double alpha);

/// MDL-IC choice of r12 in [1, min(r1, r2)] from the top right singular
/// subspaces of the raw data.
int mdl_select_r12(const ObservedMatrix& y1, const ObservedMatrix& y2, int r1, int r2);
/// Same criterion on precomputed canonical cosines s_1 >= s_2 >= ...
int mdl_criterion_argmin(const Vector& cosines, int r1, int r2, Index n);

/// Ranks chosen by ED for each dataset, the screen, then MDL-IC.
struct RankSelection {
  RankProfile ranks;
  bool screen = false;
  ScreenResult screen_detail;
};
RankSelection select_ranks(const ObservedMatrix& y1, const ObservedMatrix& y2, double alpha);

struct Diagnostics {
  std::array<double, 2> snr{};
  std::array<double, 2> noise_trace{};
  double delta_theta = 0.0;
  RankProfile selected_ranks;
};

/// ||Y - Xhat||_F^2 / n.
double noise_trace(const ObservedMatrix& y, const SignalEstimate& xhat);

Diagnostics compute_diagnostics(const SignalEstimate& x1, const SignalEstimate& x2,
                                std::array<double, 2> noise_traces, const RankProfile& ranks);

}  // namespace cdpa
