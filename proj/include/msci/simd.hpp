#pragma once

// Reduction kernels used by the statistics and fitting code. Every kernel has
// a scalar reference implementation; vector variants (AVX2+FMA on x86-64,
// NEON on AArch64) are selected once at runtime. The environment variable
// MSCI_KERNELS=scalar forces the reference path.

#include <cstddef>
#include <span>
#include <string_view>

namespace msci::simd {

struct KernelTable {
  const char* name;
  double (*sum)(const double* a, std::size_t n);
  double (*dot)(const double* a, const double* b, std::size_t n);
  // sum_i w_i * a_i * b_i
  double (*weighted_dot)(const double* a, const double* b, const double* w, std::size_t n);
  // sum_i w_i * (a_i - c)^2
  double (*weighted_sq_dev)(const double* a, double c, const double* w, std::size_t n);
  // sum_i w_i * (y_i - f_i)^2
  double (*weighted_rss)(const double* y, const double* f, const double* w, std::size_t n);
  // sum_i (a_i - ma) * (b_i - mb)
  double (*centered_cross)(const double* a, double ma, const double* b, double mb, std::size_t n);
  // out_i = scale * in_i + shift; in and out may alias
  void (*affine)(const double* in, double* out, std::size_t n, double scale, double shift);
  // r_i = y_i - f_i
  void (*subtract)(const double* y, const double* f, double* r, std::size_t n);
};

const KernelTable& scalar_kernels() noexcept;
/// Vector kernels compiled for this target, or nullptr when none exist.
const KernelTable* vector_kernels_compiled() noexcept;
/// True when the vector kernels exist and the running CPU supports them.
bool vector_kernels_supported() noexcept;
/// The table used by the library.
const KernelTable& active() noexcept;

// Convenience wrappers over active().
double sum(std::span<const double> a);
double dot(std::span<const double> a, std::span<const double> b);
double weighted_dot(std::span<const double> a, std::span<const double> b, std::span<const double> w);
double weighted_sq_dev(std::span<const double> a, double c, std::span<const double> w);
double weighted_rss(std::span<const double> y, std::span<const double> f, std::span<const double> w);
double centered_cross(std::span<const double> a, double ma, std::span<const double> b, double mb);
void affine(std::span<const double> in, std::span<double> out, double scale, double shift);
void subtract(std::span<const double> y, std::span<const double> f, std::span<double> r);

}  // namespace msci::simd
