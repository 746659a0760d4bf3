#include "kernels_internal.hpp"

namespace msci::simd {
namespace {

double sum_scalar(const double* a, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += a[i];
  return s;
}

double dot_scalar(const double* a, const double* b, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += a[i] * b[i];
  return s;
}

double weighted_dot_scalar(const double* a, const double* b, const double* w, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += w[i] * a[i] * b[i];
  return s;
}

double weighted_sq_dev_scalar(const double* a, double c, const double* w, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double d = a[i] - c;
    s += w[i] * d * d;
  }
  return s;
}

double weighted_rss_scalar(const double* y, const double* f, const double* w, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double d = y[i] - f[i];
    s += w[i] * d * d;
  }
  return s;
}

double centered_cross_scalar(const double* a, double ma, const double* b, double mb, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += (a[i] - ma) * (b[i] - mb);
  return s;
}

void affine_scalar(const double* in, double* out, std::size_t n, double scale, double shift) {
  for (std::size_t i = 0; i < n; ++i) out[i] = scale * in[i] + shift;
}

void subtract_scalar(const double* y, const double* f, double* r, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) r[i] = y[i] - f[i];
}

}  // namespace

const KernelTable kScalarKernels{
    "scalar",
    &sum_scalar,
    &dot_scalar,
    &weighted_dot_scalar,
    &weighted_sq_dev_scalar,
    &weighted_rss_scalar,
    &centered_cross_scalar,
    &affine_scalar,
    &subtract_scalar,
};

}  // namespace msci::simd
