#pragma once

// Flat double-precision loops used on contiguous matrix storage. Each kernel
// has a scalar reference and, on x86-64, an AVX2/FMA variant picked at first
// use from CPUID. Set CDPA_ISA=scalar to force the reference path.

#include <cstddef>
#include <span>

namespace cdpa::kernels {

enum class Isa { Scalar, Avx2 };

struct Table {
  Isa isa;
  double (*dot)(const double* a, const double* b, std::size_t n);
  double (*sum)(const double* a, std::size_t n);
  double (*sum_squares)(const double* a, std::size_t n);
  double (*max_abs)(const double* a, std::size_t n);
  double (*max_abs_diff)(const double* a, const double* b, std::size_t n);
  void (*axpy)(double alpha, const double* x, double* y, std::size_t n);
  void (*scale)(double alpha, double* a, std::size_t n);
  void (*clamp_nonnegative)(double* a, std::size_t n);
};

const Table& scalar_table() noexcept;
// nullptr when the binary was built without AVX2 kernels.
const Table* avx2_table() noexcept;
bool cpu_has_avx2() noexcept;

// The table selected for this process.
const Table& active() noexcept;
const char* isa_name(Isa isa) noexcept;

inline double dot(std::span<const double> a, std::span<const double> b) {
  return active().dot(a.data(), b.data(), a.size());
}
inline double sum(std::span<const double> a) { return active().sum(a.data(), a.size()); }
inline double sum_squares(std::span<const double> a) {
  return active().sum_squares(a.data(), a.size());
}
inline double max_abs(std::span<const double> a) { return active().max_abs(a.data(), a.size()); }
inline double max_abs_diff(std::span<const double> a, std::span<const double> b) {
  return active().max_abs_diff(a.data(), b.data(), a.size());
}
inline void axpy(double alpha, std::span<const double> x, std::span<double> y) {
  active().axpy(alpha, x.data(), y.data(), y.size());
}
inline void scale(double alpha, std::span<double> a) { active().scale(alpha, a.data(), a.size()); }
inline void clamp_nonnegative(std::span<double> a) {
  active().clamp_nonnegative(a.data(), a.size());
}

}  // namespace cdpa::kernels
