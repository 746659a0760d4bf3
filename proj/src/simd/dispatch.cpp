#include <cassert>
#include <cstdlib>
#include <cstring>

#include "kernels_internal.hpp"

namespace msci::simd {

const KernelTable& scalar_kernels() noexcept { return kScalarKernels; }

const KernelTable* vector_kernels_compiled() noexcept {
#if defined(MSCI_HAVE_AVX2)
  return &kAvx2Kernels;
#elif defined(MSCI_HAVE_NEON)
  return &kNeonKernels;
#else
  return nullptr;
#endif
}

bool vector_kernels_supported() noexcept {
#if defined(MSCI_HAVE_AVX2)
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#elif defined(MSCI_HAVE_NEON)
  return true;
#else
  return false;
#endif
}

namespace {

const KernelTable& select() noexcept {
  if (const char* forced = std::getenv("MSCI_KERNELS"); forced && std::strcmp(forced, "scalar") == 0) {
    return kScalarKernels;
  }
  if (vector_kernels_supported()) return *vector_kernels_compiled();
  return kScalarKernels;
}

}  // namespace

const KernelTable& active() noexcept {
  static const KernelTable& table = select();
  return table;
}

double sum(std::span<const double> a) { return active().sum(a.data(), a.size()); }

double dot(std::span<const double> a, std::span<const double> b) {
  assert(a.size() == b.size());
  return active().dot(a.data(), b.data(), a.size());
}

double weighted_dot(std::span<const double> a, std::span<const double> b, std::span<const double> w) {
  assert(a.size() == b.size() && a.size() == w.size());
  return active().weighted_dot(a.data(), b.data(), w.data(), a.size());
}

double weighted_sq_dev(std::span<const double> a, double c, std::span<const double> w) {
  assert(a.size() == w.size());
  return active().weighted_sq_dev(a.data(), c, w.data(), a.size());
}

double weighted_rss(std::span<const double> y, std::span<const double> f, std::span<const double> w) {
  assert(y.size() == f.size() && y.size() == w.size());
  return active().weighted_rss(y.data(), f.data(), w.data(), y.size());
}

double centered_cross(std::span<const double> a, double ma, std::span<const double> b, double mb) {
  assert(a.size() == b.size());
  return active().centered_cross(a.data(), ma, b.data(), mb, a.size());
}

void affine(std::span<const double> in, std::span<double> out, double scale, double shift) {
  assert(in.size() == out.size());
  active().affine(in.data(), out.data(), in.size(), scale, shift);
}

void subtract(std::span<const double> y, std::span<const double> f, std::span<double> r) {
  assert(y.size() == f.size() && y.size() == r.size());
  active().subtract(y.data(), f.data(), r.data(), y.size());
}

}  // namespace msci::simd
