#pragma once

// Reference computations written independently of the library. Nothing here
// calls into msci numerics.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <stdexcept>
#include <utility>
#include <vector>

namespace oracle {

// Weighted least squares for y ~ sum_j b_j phi_j(x) via normal equations and
// Gaussian elimination with partial pivoting in long double.
inline std::vector<double> least_squares(const std::vector<double>& x, const std::vector<double>& y,
                                         const std::vector<double>& w,
                                         const std::vector<std::function<double(double)>>& basis) {
  const std::size_t k = basis.size();
  std::vector<std::vector<long double>> a(k, std::vector<long double>(k + 1, 0.0L));
  for (std::size_t i = 0; i < x.size(); ++i) {
    std::vector<long double> phi(k);
    for (std::size_t j = 0; j < k; ++j) phi[j] = basis[j](x[i]);
    for (std::size_t r = 0; r < k; ++r) {
      for (std::size_t c = 0; c < k; ++c) a[r][c] += w[i] * phi[r] * phi[c];
      a[r][k] += w[i] * phi[r] * y[i];
    }
  }
  for (std::size_t col = 0; col < k; ++col) {
    std::size_t piv = col;
    for (std::size_t r = col + 1; r < k; ++r) {
      if (std::fabs(a[r][col]) > std::fabs(a[piv][col])) piv = r;
    }
    if (a[piv][col] == 0.0L) throw std::runtime_error("oracle: singular normal equations");
    std::swap(a[piv], a[col]);
    for (std::size_t r = 0; r < k; ++r) {
      if (r == col) continue;
      const long double f = a[r][col] / a[col][col];
      for (std::size_t c = col; c <= k; ++c) a[r][c] -= f * a[col][c];
    }
  }
  std::vector<double> b(k);
  for (std::size_t j = 0; j < k; ++j) b[j] = static_cast<double>(a[j][k] / a[j][j]);
  return b;
}

inline std::vector<double> polynomial_fit(const std::vector<double>& x, const std::vector<double>& y, int degree) {
  std::vector<std::function<double(double)>> basis;
  for (int d = 0; d <= degree; ++d) basis.push_back([d](double t) { return std::pow(t, d); });
  return least_squares(x, y, std::vector<double>(x.size(), 1.0), basis);
}

// Two-pass weighted r2 in long double.
inline double r_squared(const std::vector<double>& y, const std::vector<double>& yhat, const std::vector<double>& w) {
  long double sw = 0, swy = 0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    sw += w[i];
    swy += w[i] * y[i];
  }
  const long double mean = swy / sw;
  long double rss = 0, tss = 0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    rss += w[i] * (static_cast<long double>(y[i]) - yhat[i]) * (static_cast<long double>(y[i]) - yhat[i]);
    tss += w[i] * (y[i] - mean) * (y[i] - mean);
  }
  return static_cast<double>(1.0L - rss / tss);
}

inline double central_difference(const std::function<double(double)>& f, double x, double h) {
  return (f(x + h) - f(x - h)) / (2.0 * h);
}

// Argmax over `points` equally spaced samples including both ends.
inline std::pair<double, double> grid_argmax(const std::function<double(double)>& f, double lo, double hi,
                                             std::size_t points) {
  double best_x = lo, best = f(lo);
  for (std::size_t i = 1; i < points; ++i) {
    const double x = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(points - 1);
    const double v = f(x);
    if (v > best) {
      best = v;
      best_x = x;
    }
  }
  return {best_x, best};
}

struct Moments {
  double min, max, median, mean, sd;
};

// Sort-based order statistics and Welford moments.
inline Moments moments(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  Moments m{};
  m.min = v.front();
  m.max = v.back();
  m.median = n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
  double mean = 0, m2 = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double d = v[i] - mean;
    mean += d / static_cast<double>(i + 1);
    m2 += d * (v[i] - mean);
  }
  m.mean = mean;
  m.sd = n > 1 ? std::sqrt(m2 / static_cast<double>(n - 1)) : 0.0;
  return m;
}

inline double pearson(const std::vector<double>& a, const std::vector<double>& b) {
  long double ma = 0, mb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    ma += a[i];
    mb += b[i];
  }
  ma /= a.size();
  mb /= b.size();
  long double sab = 0, saa = 0, sbb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    sab += (a[i] - ma) * (b[i] - mb);
    saa += (a[i] - ma) * (a[i] - ma);
    sbb += (b[i] - mb) * (b[i] - mb);
  }
  return static_cast<double>(sab / std::sqrt(saa * sbb));
}

inline double rel_diff(double a, double b) {
  const double scale = std::max({std::fabs(a), std::fabs(b), 1e-300});
  return std::fabs(a - b) / scale;
}

}  // namespace oracle
