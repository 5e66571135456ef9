#include "cdpa/kernels.hpp"

#include <algorithm>
#include <cmath>

namespace cdpa::kernels {
namespace {

double dot_scalar(const double* a, const double* b, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += a[i] * b[i];
  return acc;
}

double sum_scalar(const double* a, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += a[i];
  return acc;
}

double sum_squares_scalar(const double* a, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += a[i] * a[i];
  return acc;
}

double max_abs_scalar(const double* a, std::size_t n) {
  double m = 0.0;
  for (std::size_t i = 0; i < n; ++i) m = std::max(m, std::fabs(a[i]));
  return m;
}

double max_abs_diff_scalar(const double* a, const double* b, std::size_t n) {
  double m = 0.0;
  for (std::size_t i = 0; i < n; ++i) m = std::max(m, std::fabs(a[i] - b[i]));
  return m;
}

void axpy_scalar(double alpha, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

void scale_scalar(double alpha, double* a, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) a[i] *= alpha;
}

void clamp_nonnegative_scalar(double* a, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i)
    if (a[i] < 0.0) a[i] = 0.0;
}

constexpr Table kScalar{Isa::Scalar,       dot_scalar,   sum_scalar,
                        sum_squares_scalar, max_abs_scalar, max_abs_diff_scalar,
                        axpy_scalar,        scale_scalar, clamp_nonnegative_scalar};

}  // namespace

const Table& scalar_table() noexcept { return kScalar; }

}  // namespace cdpa::kernels
