#include "cdpa/denoise.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>

#include "cdpa/kernels.hpp"
#include "cdpa/linalg.hpp"

namespace cdpa {

namespace {

constexpr int kEdWindow = 5;
constexpr int kEdMaxIterations = 50;
constexpr double kMdlFloor = 1e-12;
constexpr double kNoiseFloor = 1e-12;

std::span<double> column(Matrix& m, Index j) {
  return {m.col(j).data(), static_cast<std::size_t>(m.rows())};
}

}  // namespace

ObservedMatrix make_observed(Matrix values) {
  if (values.rows() < 1 || values.cols() < 2)
    throw Error(Errc::BadDimensions, "need p >= 1 variables and n >= 2 samples");
  if (!values.allFinite()) throw Error(Errc::InvalidInput, "matrix has non-finite entries");
  return ObservedMatrix{std::move(values), false};
}

ObservedMatrix center_rows(const ObservedMatrix& y) {
  ObservedMatrix out{y.values, true};
  const Vector means = y.values.rowwise().mean();
  for (Index j = 0; j < out.values.cols(); ++j)
    kernels::axpy(-1.0, {means.data(), static_cast<std::size_t>(means.size())}, column(out.values, j));
  return out;
}

SignalEstimate soft_threshold_denoise(const ObservedMatrix& y, int r) {
  const Index p = y.variables();
  const Index n = y.samples();
  if (r < 1 || r > std::min(p, n))
    throw Error(Errc::RankTooLarge, "rank " + std::to_string(r) + " outside [1, min(n, p)]");
  const double denom = static_cast<double>(n) * static_cast<double>(p) -
                       static_cast<double>(n) * r - static_cast<double>(p) * r;
  if (denom <= 0.0) throw Error(Errc::DegenerateThreshold, "np - nr - pr <= 0");

  auto top = linalg::top_svd(y.values, r);
  const double kept = top.s.squaredNorm();
  double residual = top.energy - kept;
  // Cancellation noise of an exactly rank-r input.
  if (residual <= 64.0 * std::numeric_limits<double>::epsilon() * top.energy) residual = 0.0;

  SignalEstimate est;
  est.rank = r;
  est.tau = residual / denom;
  est.raw_singular_values = top.s;
  est.soft_singular_values.resize(r);
  for (int l = 0; l < r; ++l)
    est.soft_singular_values(l) =
        std::sqrt(std::max(top.s(l) * top.s(l) - est.tau * static_cast<double>(p), 0.0));
  est.left_vectors = std::move(top.u);
  est.right_vectors = std::move(top.v);
  est.xhat = est.left_vectors * est.soft_singular_values.asDiagonal() * est.right_vectors.transpose();
  return est;
}

SignalEstimate exact_signal(const Matrix& x, int r) {
  if (r < 1 || r > std::min(x.rows(), x.cols()))
    throw Error(Errc::RankTooLarge, "rank outside [1, min(n, p)]");
  auto f = linalg::thin_svd(x);
  SignalEstimate est;
  est.rank = r;
  est.tau = 0.0;
  est.raw_singular_values = f.s.head(r);
  est.soft_singular_values = f.s.head(r);
  est.left_vectors = f.u.leftCols(r);
  est.right_vectors = f.v.leftCols(r);
  est.xhat = x;
  return est;
}

SignalCovariance signal_covariance(const SignalEstimate& xhat) {
  const auto n = static_cast<double>(xhat.samples());
  Index k = 0;
  while (k < xhat.soft_singular_values.size() && xhat.soft_singular_values(k) > 0.0) ++k;
  if (k == 0) throw Error(Errc::ZeroSignal, "signal estimate is identically zero");
  SignalCovariance cov;
  cov.eigvectors = xhat.left_vectors.leftCols(k);
  cov.eigvalues = xhat.soft_singular_values.head(k).array().square() / n;
  cov.trace = cov.eigvalues.sum();
  return cov;
}

EdSelection ed_select(const Vector& eigenvalues) {
  const auto m = static_cast<int>(eigenvalues.size());
  const double mean = eigenvalues.sum() / std::max(m, 1);
  int above = 0;
  for (int i = 0; i < m; ++i)
    if (eigenvalues(i) >= mean) ++above;
  EdSelection sel;
  sel.cap = std::min(above, m / 10);
  if (sel.cap + kEdWindow > m)
    throw Error(Errc::TooFewSamples, "ED calibration window exceeds the available eigenvalues");

  // 1-based j: regress lambda_j..lambda_{j+4} on (j-1)^{2/3}..(j+3)^{2/3}.
  auto calibrate = [&](int j) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (int t = 0; t < kEdWindow; ++t) {
      const double x = std::pow(static_cast<double>(j - 1 + t), 2.0 / 3.0);
      const double y = eigenvalues(j - 1 + t);
      sx += x;
      sy += y;
      sxx += x * x;
      sxy += x * y;
    }
    const double slope = (kEdWindow * sxy - sx * sy) / (kEdWindow * sxx - sx * sx);
    return 2.0 * std::fabs(slope);
  };
  auto rank_for = [&](double delta) {
    for (int i = sel.cap; i >= 1; --i)
      if (eigenvalues(i - 1) - eigenvalues(i) >= delta) return i;
    return 0;
  };

  int j = sel.cap + 1;
  int previous = -1;
  for (int it = 0; it < kEdMaxIterations; ++it) {
    sel.delta = calibrate(j);
    sel.rank = rank_for(sel.delta);
    sel.iterations = it + 1;
    if (sel.rank == previous) break;
    previous = sel.rank;
    j = sel.rank + 1;
  }
  return sel;
}

int ed_select_rank(const ObservedMatrix& y) {
  if (y.samples() < 20) throw Error(Errc::TooFewSamples, "ED needs at least 20 samples");
  auto spec = linalg::gram_spectrum(y.values, 0);
  return ed_select(spec.squared_singular_values / static_cast<double>(y.samples())).rank;
}

ScreenResult correlation_screen_detail(const SignalEstimate& x1, const SignalEstimate& x2, double alpha) {
  if (x1.samples() != x2.samples())
    throw Error(Errc::BadDimensions, "signals have different sample counts");
  const Index n = x1.samples();
  const auto nd = static_cast<double>(n);

  // Row-centred X = U F with F = diag(s) (W^T - wbar 1^T).
  auto centred_factor = [&](const SignalEstimate& x) {
    Matrix f = x.right_vectors.transpose();
    const Vector wbar = f.rowwise().mean();
    f.colwise() -= wbar;
    return Matrix(x.soft_singular_values.asDiagonal() * f);
  };
  const Matrix f1 = centred_factor(x1);
  const Matrix f2 = centred_factor(x2);

  auto row_norms = [](const Matrix& u, const Matrix& f) {
    const Matrix g = f * f.transpose();
    Vector out(u.rows());
    for (Index i = 0; i < u.rows(); ++i) out(i) = std::sqrt(std::max((u.row(i) * g * u.row(i).transpose()).value(), 0.0));
    return out;
  };
  const Vector n1 = row_norms(x1.left_vectors, f1);
  const Vector n2 = row_norms(x2.left_vectors, f2);

  auto inv = [](const Vector& v) {
    Vector out(v.size());
    for (Index i = 0; i < v.size(); ++i) out(i) = v(i) > 1e-300 ? 1.0 / v(i) : 0.0;
    return out;
  };
  const Matrix a = inv(n1).asDiagonal() * x1.left_vectors * (f1 * f2.transpose());
  const Matrix b = inv(n2).asDiagonal() * x2.left_vectors;

  ScreenResult res;
  constexpr Index kBlock = 256;
  Matrix block;
  for (Index start = 0; start < a.rows(); start += kBlock) {
    const Index rows = std::min(kBlock, a.rows() - start);
    block.noalias() = a.middleRows(start, rows) * b.transpose();
    res.max_abs_correlation = std::max(
        res.max_abs_correlation, kernels::max_abs({block.data(), static_cast<std::size_t>(block.size())}));
  }
  const double rmax = std::min(res.max_abs_correlation, 1.0);
  const double z = std::atanh(rmax) * std::sqrt(std::max(nd - 3.0, 1.0));
  res.min_p_value = std::isfinite(z) ? std::erfc(z / std::sqrt(2.0)) : 0.0;
  res.threshold = alpha / (static_cast<double>(x1.variables()) * static_cast<double>(x2.variables()));
  res.significant = res.min_p_value < res.threshold;
  return res;
}

bool correlation_screen(const SignalEstimate& x1, const SignalEstimate& x2, double alpha) {
  return correlation_screen_detail(x1, x2, alpha).significant;
}

int mdl_criterion_argmin(const Vector& cosines, int r1, int r2, Index n) {
  const int rmax = std::min({r1, r2, static_cast<int>(cosines.size())});
  if (rmax < 1) return 0;
  const auto nd = static_cast<double>(n);
  const double logn = std::log(nd);
  int best = 1;
  double best_val = std::numeric_limits<double>::infinity();
  double cumulative = 0.0;
  for (int r = 1; r <= rmax; ++r) {
    const double s = std::clamp(cosines(r - 1), 0.0, 1.0);
    cumulative += std::log(std::max(1.0 - s * s, kMdlFloor));
    const double value = nd * cumulative + r * (r1 + r2 - r) * logn;
    if (value < best_val) {
      best_val = value;
      best = r;
    }
  }
  return best;
}

int mdl_select_r12(const ObservedMatrix& y1, const ObservedMatrix& y2, int r1, int r2) {
  if (y1.samples() != y2.samples()) throw Error(Errc::BadDimensions, "datasets have different n");
  if (r1 < 1 || r2 < 1) throw Error(Errc::InvalidInput, "MDL-IC needs r1, r2 >= 1");
  const auto v1 = linalg::top_svd(y1.values, r1).v;
  const auto v2 = linalg::top_svd(y2.values, r2).v;
  Eigen::JacobiSVD<Matrix> svd(v1.transpose() * v2);
  return mdl_criterion_argmin(svd.singularValues(), r1, r2, y1.samples());
}

RankSelection select_ranks(const ObservedMatrix& y1, const ObservedMatrix& y2, double alpha) {
  if (y1.samples() != y2.samples()) throw Error(Errc::BadDimensions, "datasets have different n");
  if (y1.samples() < 20) throw Error(Errc::TooFewSamples, "ED needs at least 20 samples");
  const Index n = y1.samples();
  RankSelection sel;

  // One Gram eigendecomposition per dataset serves ED and the MDL right vectors.
  const Index want = std::min<Index>(std::min(y1.variables(), n), n / 10 + 1);
  auto s1 = linalg::gram_spectrum(y1.values, std::min(want, std::min(y1.variables(), n)));
  auto s2 = linalg::gram_spectrum(y2.values, std::min(want, std::min(y2.variables(), n)));
  sel.ranks.r1 = ed_select(s1.squared_singular_values / static_cast<double>(n)).rank;
  sel.ranks.r2 = ed_select(s2.squared_singular_values / static_cast<double>(n)).rank;
  if (sel.ranks.r1 == 0 || sel.ranks.r2 == 0) return sel;

  const auto x1 = soft_threshold_denoise(y1, sel.ranks.r1);
  const auto x2 = soft_threshold_denoise(y2, sel.ranks.r2);
  if (x1.soft_singular_values(0) <= 0.0 || x2.soft_singular_values(0) <= 0.0) return sel;
  sel.screen_detail = correlation_screen_detail(x1, x2, alpha);
  sel.screen = sel.screen_detail.significant;
  if (!sel.screen) return sel;

  Eigen::JacobiSVD<Matrix> svd(s1.right_vectors.leftCols(sel.ranks.r1).transpose() *
                               s2.right_vectors.leftCols(sel.ranks.r2));
  sel.ranks.r12 = mdl_criterion_argmin(svd.singularValues(), sel.ranks.r1, sel.ranks.r2, n);
  return sel;
}

double noise_trace(const ObservedMatrix& y, const SignalEstimate& xhat) {
  const Matrix r = y.values - xhat.xhat;
  return linalg::frobenius_sq(r) / static_cast<double>(y.samples());
}

Diagnostics compute_diagnostics(const SignalEstimate& x1, const SignalEstimate& x2,
                                std::array<double, 2> noise_traces, const RankProfile& ranks) {
  Diagnostics d;
  d.selected_ranks = ranks;
  d.noise_trace = noise_traces;
  const SignalEstimate* xs[2] = {&x1, &x2};
  const auto n = static_cast<double>(x1.samples());
  double rate = 1.0 / std::sqrt(n);
  for (int k = 0; k < 2; ++k) {
    const double signal_trace = linalg::frobenius_sq(xs[k]->xhat) / n;
    d.snr[k] = signal_trace / std::max(noise_traces[k], kNoiseFloor);
    const double p = static_cast<double>(xs[k]->variables());
    rate += d.snr[k] > 0.0 ? std::sqrt(std::log(p) / (n * d.snr[k]))
                           : std::numeric_limits<double>::infinity();
  }
  d.delta_theta = std::min(rate, 1.0);
  return d;
}

}  // namespace cdpa
