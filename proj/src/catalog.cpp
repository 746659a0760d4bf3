// Built-in model families. Each entry supplies value, parameter gradient,
// x-derivative, bounds and a data-driven starting point.

#include <algorithm>
#include <cmath>
#include <numeric>

#include <Eigen/Dense>

#include "msci/error.hpp"
#include "msci/models.hpp"
#include "msci/simd.hpp"

namespace msci {
namespace {

using P = std::span<const double>;
using Out = std::span<double>;

constexpr double kPositive = std::numeric_limits<double>::min();
const Interval kReal{-kInf, kInf};
const Interval kNonNeg{0.0, kInf};
const Interval kPos{kPositive, kInf};
const Interval kPositiveX{kPositive, kInf};
const Interval kShape{0.05, 50.0};

// ---------------------------------------------------------------------------
// Data summaries used by the starting-point heuristics.

struct Summary {
  double xmin = 0, xmax = 0, ymin = 0, ymax = 0, ymean = 0;
  double x_at_ymax = 0, x_at_ymin = 0, xmid = 0;
  double slope = 0;       // least-squares slope of y on x
  double x_half = 0;      // first x (sorted) where y crosses (ymin + ymax) / 2
  double y_left = 0, y_right = 0;  // mean y over the lowest / highest fifth of x
  double range() const { return std::max(xmax - xmin, 1e-3); }
  double yspan() const { return std::max(ymax - ymin, 1e-12 * (std::abs(ymax) + 1.0)); }
};

Summary summarize(const Dataset& d) {
  Summary s;
  const auto xs = d.xs();
  const auto ys = d.ys();
  const std::size_t n = xs.size();
  s.xmin = *std::min_element(xs.begin(), xs.end());
  s.xmax = *std::max_element(xs.begin(), xs.end());
  const auto imax = static_cast<std::size_t>(std::max_element(ys.begin(), ys.end()) - ys.begin());
  const auto imin = static_cast<std::size_t>(std::min_element(ys.begin(), ys.end()) - ys.begin());
  s.ymax = ys[imax];
  s.ymin = ys[imin];
  s.x_at_ymax = xs[imax];
  s.x_at_ymin = xs[imin];
  s.xmid = 0.5 * (s.xmin + s.xmax);
  s.ymean = simd::sum(ys) / static_cast<double>(n);
  const double xmean = simd::sum(xs) / static_cast<double>(n);
  const double sxx = simd::centered_cross(xs, xmean, xs, xmean);
  s.slope = sxx > 0 ? simd::centered_cross(xs, xmean, ys, s.ymean) / sxx : 0.0;

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return xs[a] < xs[b]; });
  const std::size_t fifth = std::max<std::size_t>(1, n / 5);
  double left = 0, right = 0;
  for (std::size_t i = 0; i < fifth; ++i) {
    left += ys[order[i]];
    right += ys[order[n - 1 - i]];
  }
  s.y_left = left / static_cast<double>(fifth);
  s.y_right = right / static_cast<double>(fifth);

  const double half = 0.5 * (s.ymin + s.ymax);
  s.x_half = s.xmid;
  for (std::size_t i = 1; i < n; ++i) {
    const double a = ys[order[i - 1]] - half;
    const double b = ys[order[i]] - half;
    if ((a <= 0 && b > 0) || (a >= 0 && b < 0)) {
      s.x_half = 0.5 * (xs[order[i - 1]] + xs[order[i]]);
      break;
    }
  }
  return s;
}

/// Weighted least squares on an arbitrary basis, restricted to points where
/// `use` holds. Returns an empty vector when there is too little data.
template <class Basis, class Target, class Use>
std::vector<double> basis_lsq(const Dataset& d, std::size_t k, Basis basis, Target target, Use use) {
  std::vector<std::size_t> idx;
  for (std::size_t i = 0; i < d.size(); ++i) {
    if (use(d.xs()[i], d.ys()[i])) idx.push_back(i);
  }
  if (idx.size() < k) return {};
  Eigen::MatrixXd A(idx.size(), k);
  Eigen::VectorXd b(idx.size());
  std::vector<double> row(k);
  for (std::size_t r = 0; r < idx.size(); ++r) {
    const std::size_t i = idx[r];
    const double sw = std::sqrt(d.weights()[i]);
    basis(d.xs()[i], std::span<double>(row));
    for (std::size_t j = 0; j < k; ++j) A(r, j) = sw * row[j];
    b(r) = sw * target(d.xs()[i], d.ys()[i]);
  }
  const Eigen::VectorXd sol = A.colPivHouseholderQr().solve(b);
  std::vector<double> out(sol.data(), sol.data() + k);
  for (double v : out) {
    if (!std::isfinite(v)) return {};
  }
  return out;
}

auto all_points = [](double, double) { return true; };
auto positive_x = [](double x, double) { return x > 0; };
auto positive_xy = [](double x, double y) { return x > 0 && y > 0; };
auto identity_y = [](double, double y) { return y; };

/// Polynomial coefficients (ascending) by least squares on x scaled to [-1, 1]-ish.
std::vector<double> poly_lsq(const Dataset& d, std::size_t degree) {
  double scale = 0.0;
  for (double x : d.xs()) scale = std::max(scale, std::abs(x));
  if (scale == 0.0) scale = 1.0;
  auto coef = basis_lsq(
      d, degree + 1,
      [&](double x, std::span<double> row) {
        double t = 1.0;
        for (auto& r : row) {
          r = t;
          t *= x / scale;
        }
      },
      identity_y, all_points);
  if (coef.empty()) return std::vector<double>(degree + 1, 0.0);
  double f = 1.0;
  for (auto& c : coef) {
    c /= f;
    f *= scale;
  }
  return coef;
}

/// (log a, b) for y = a exp(b x) from a log-linear fit on positive y.
std::pair<double, double> log_linear(const Dataset& d, double offset = 0.0) {
  auto sol = basis_lsq(
      d, 2,
      [](double x, std::span<double> row) {
        row[0] = 1.0;
        row[1] = x;
      },
      [&](double, double y) { return std::log(y - offset); }, [&](double, double y) { return y - offset > 0; });
  if (sol.empty()) return {0.0, 0.0};
  return {sol[0], sol[1]};
}

// ---------------------------------------------------------------------------
// Spec construction helpers

struct ParamDef {
  const char* name;
  ParamRole role;
  Interval bounds;
};

ModelSpec make(std::string name, FamilyClass cls, std::string formula, std::initializer_list<ParamDef> params,
               Interval support, ModelSpec::EvalFn eval, ModelSpec::GradFn grad, ModelSpec::EvalFn dydx,
               ModelSpec::GuessFn guess) {
  ModelSpec s;
  s.name = std::move(name);
  s.family_class = cls;
  s.formula = std::move(formula);
  for (const auto& p : params) {
    s.param_names.emplace_back(p.name);
    s.roles.push_back(p.role);
    s.bounds.push_back(p.bounds);
  }
  s.support = support;
  s.eval = std::move(eval);
  s.grad = std::move(grad);
  s.dydx = std::move(dydx);
  s.guess = std::move(guess);
  return s;
}

// ---------------------------------------------------------------------------
// Polynomials

void add_polynomials(Catalog& c) {
  static const char* kNames[] = {"c0", "c1", "c2", "c3", "c4", "c5"};
  for (std::size_t degree = 0; degree <= 5; ++degree) {
    ModelSpec s;
    s.name = "poly" + std::to_string(degree);
    s.family_class = FamilyClass::Polynomial;
    s.formula = degree == 0 ? "c0" : "sum_{i<=" + std::to_string(degree) + "} c_i x^i";
    for (std::size_t i = 0; i <= degree; ++i) {
      s.param_names.emplace_back(kNames[i]);
      s.roles.push_back(ParamRole::Coefficient);
      s.bounds.push_back(kReal);
    }
    s.support = kReal;
    s.eval = [](P p, double x) {
      double y = 0.0;
      for (std::size_t i = p.size(); i-- > 0;) y = y * x + p[i];
      return y;
    };
    s.grad = [](P p, double x, Out g) {
      double t = 1.0;
      for (std::size_t i = 0; i < p.size(); ++i) {
        g[i] = t;
        t *= x;
      }
    };
    s.dydx = [](P p, double x) {
      double y = 0.0;
      for (std::size_t i = p.size(); i-- > 1;) y = y * x + static_cast<double>(i) * p[i];
      return y;
    };
    s.guess = [degree](const Dataset& d) { return poly_lsq(d, degree); };
    c.add(std::move(s));
  }
}

// ---------------------------------------------------------------------------
// Exponentials

void add_exponentials(Catalog& c) {
  c.add(make(
      "exp_decay", FamilyClass::Exponential, "a exp(-b x)",
      {{"a", ParamRole::Amplitude, kReal}, {"b", ParamRole::Rate, kNonNeg}}, kReal,
      [](P p, double x) { return p[0] * std::exp(-p[1] * x); },
      [](P p, double x, Out g) {
        const double e = std::exp(-p[1] * x);
        g[0] = e;
        g[1] = -p[0] * x * e;
      },
      [](P p, double x) { return -p[0] * p[1] * std::exp(-p[1] * x); },
      [](const Dataset& d) {
        const auto s = summarize(d);
        auto [la, b] = log_linear(d);
        if (b >= 0.0 || la == 0.0) return Params{s.ymax, 1.0 / s.range()};
        return Params{std::exp(la), -b};
      }));

  c.add(make(
      "exp_decay_offset", FamilyClass::Exponential, "a exp(-b x) + c",
      {{"a", ParamRole::Amplitude, kReal}, {"b", ParamRole::Rate, kNonNeg}, {"c", ParamRole::Offset, kReal}}, kReal,
      [](P p, double x) { return p[0] * std::exp(-p[1] * x) + p[2]; },
      [](P p, double x, Out g) {
        const double e = std::exp(-p[1] * x);
        g[0] = e;
        g[1] = -p[0] * x * e;
        g[2] = 1.0;
      },
      [](P p, double x) { return -p[0] * p[1] * std::exp(-p[1] * x); },
      [](const Dataset& d) {
        const auto s = summarize(d);
        const double offset = s.ymin - 0.05 * s.yspan();
        auto [la, b] = log_linear(d, offset);
        if (b >= 0.0) return Params{s.y_left - s.y_right, 3.0 / s.range(), s.y_right};
        return Params{std::exp(la), -b, offset};
      }));

  c.add(make(
      "double_exp_decay", FamilyClass::Exponential, "a1 exp(-b1 x) + a2 exp(-b2 x)",
      {{"a1", ParamRole::Amplitude, kReal},
       {"b1", ParamRole::Rate, kNonNeg},
       {"a2", ParamRole::Amplitude, kReal},
       {"b2", ParamRole::Rate, kNonNeg}},
      kReal,
      [](P p, double x) { return p[0] * std::exp(-p[1] * x) + p[2] * std::exp(-p[3] * x); },
      [](P p, double x, Out g) {
        const double e1 = std::exp(-p[1] * x);
        const double e2 = std::exp(-p[3] * x);
        g[0] = e1;
        g[1] = -p[0] * x * e1;
        g[2] = e2;
        g[3] = -p[2] * x * e2;
      },
      [](P p, double x) { return -p[0] * p[1] * std::exp(-p[1] * x) - p[2] * p[3] * std::exp(-p[3] * x); },
      [](const Dataset& d) {
        const auto s = summarize(d);
        auto [la, b] = log_linear(d);
        double a = std::exp(la);
        double rate = -b;
        if (rate <= 0.0 || la == 0.0) {
          a = s.ymax;
          rate = 1.0 / s.range();
        }
        return Params{0.7 * a, 2.0 * rate, 0.3 * a, 0.5 * rate};
      }));

  c.add(make(
      "exp_growth", FamilyClass::Exponential, "a exp(b x)",
      {{"a", ParamRole::Amplitude, kReal}, {"b", ParamRole::Rate, kNonNeg}}, kReal,
      [](P p, double x) { return p[0] * std::exp(p[1] * x); },
      [](P p, double x, Out g) {
        const double e = std::exp(p[1] * x);
        g[0] = e;
        g[1] = p[0] * x * e;
      },
      [](P p, double x) { return p[0] * p[1] * std::exp(p[1] * x); },
      [](const Dataset& d) {
        const auto s = summarize(d);
        auto [la, b] = log_linear(d);
        if (b <= 0.0 || la == 0.0) return Params{std::max(s.ymean, 1e-6), 0.1 / s.range()};
        return Params{std::exp(la), b};
      }));

  c.add(make(
      "exp_growth_offset", FamilyClass::Exponential, "a exp(b x) + c",
      {{"a", ParamRole::Amplitude, kReal}, {"b", ParamRole::Rate, kNonNeg}, {"c", ParamRole::Offset, kReal}}, kReal,
      [](P p, double x) { return p[0] * std::exp(p[1] * x) + p[2]; },
      [](P p, double x, Out g) {
        const double e = std::exp(p[1] * x);
        g[0] = e;
        g[1] = p[0] * x * e;
        g[2] = 1.0;
      },
      [](P p, double x) { return p[0] * p[1] * std::exp(p[1] * x); },
      [](const Dataset& d) {
        const auto s = summarize(d);
        const double offset = s.ymin - 0.05 * s.yspan();
        auto [la, b] = log_linear(d, offset);
        if (b <= 0.0) return Params{s.yspan() * std::exp(-1.0), 1.0 / s.range(), s.ymin};
        return Params{std::exp(la), b, offset};
      }));

  c.add(make(
      "exp_rise_to_max", FamilyClass::Exponential, "c + a (1 - exp(-b x))",
      {{"a", ParamRole::Amplitude, kReal}, {"b", ParamRole::Rate, kNonNeg}, {"c", ParamRole::Offset, kReal}}, kReal,
      [](P p, double x) { return p[2] - p[0] * std::expm1(-p[1] * x); },
      [](P p, double x, Out g) {
        const double e = std::exp(-p[1] * x);
        g[0] = 1.0 - e;
        g[1] = p[0] * x * e;
        g[2] = 1.0;
      },
      [](P p, double x) { return p[0] * p[1] * std::exp(-p[1] * x); },
      [](const Dataset& d) {
        const auto s = summarize(d);
        return Params{s.y_right - s.y_left, 3.0 / s.range(), s.y_left};
      }));
}

// ---------------------------------------------------------------------------
// Sigmoids

double logistic_unit(double u) {
  // 1 / (1 + exp(-u)) without overflow warnings for large |u|.
  if (u >= 0) return 1.0 / (1.0 + std::exp(-u));
  const double e = std::exp(u);
  return e / (1.0 + e);
}

void add_sigmoids(Catalog& c) {
  auto logistic_guess = [](const Dataset& d, bool offset) {
    const auto s = summarize(d);
    const double dir = s.y_right >= s.y_left ? 1.0 : -1.0;
    const double k = dir * 8.0 / s.range();
    if (offset) return Params{s.yspan(), k, s.x_half, s.ymin};
    return Params{std::max(s.ymax, 1e-6), k, s.x_half};
  };

  c.add(make(
      "logistic", FamilyClass::Sigmoidal, "L / (1 + exp(-k (x - x0)))",
      {{"L", ParamRole::Amplitude, kReal}, {"k", ParamRole::Rate, kReal}, {"x0", ParamRole::Location, kReal}}, kReal,
      [](P p, double x) { return p[0] * logistic_unit(p[1] * (x - p[2])); },
      [](P p, double x, Out g) {
        const double s = logistic_unit(p[1] * (x - p[2]));
        const double ds = s * (1.0 - s);
        g[0] = s;
        g[1] = p[0] * ds * (x - p[2]);
        g[2] = -p[0] * ds * p[1];
      },
      [](P p, double x) {
        const double s = logistic_unit(p[1] * (x - p[2]));
        return p[0] * p[1] * s * (1.0 - s);
      },
      [logistic_guess](const Dataset& d) { return logistic_guess(d, false); }));

  c.add(make(
      "logistic_offset", FamilyClass::Sigmoidal, "d + L / (1 + exp(-k (x - x0)))",
      {{"L", ParamRole::Amplitude, kReal},
       {"k", ParamRole::Rate, kReal},
       {"x0", ParamRole::Location, kReal},
       {"d", ParamRole::Offset, kReal}},
      kReal, [](P p, double x) { return p[3] + p[0] * logistic_unit(p[1] * (x - p[2])); },
      [](P p, double x, Out g) {
        const double s = logistic_unit(p[1] * (x - p[2]));
        const double ds = s * (1.0 - s);
        g[0] = s;
        g[1] = p[0] * ds * (x - p[2]);
        g[2] = -p[0] * ds * p[1];
        g[3] = 1.0;
      },
      [](P p, double x) {
        const double s = logistic_unit(p[1] * (x - p[2]));
        return p[0] * p[1] * s * (1.0 - s);
      },
      [logistic_guess](const Dataset& d) { return logistic_guess(d, true); }));

  c.add(make(
      "gompertz", FamilyClass::Sigmoidal, "a exp(-b exp(-k x))",
      {{"a", ParamRole::Amplitude, kReal}, {"b", ParamRole::Shape, kPos}, {"k", ParamRole::Rate, kReal}}, kReal,
      [](P p, double x) { return p[0] * std::exp(-p[1] * std::exp(-p[2] * x)); },
      [](P p, double x, Out g) {
        const double e = std::exp(-p[2] * x);
        const double f = std::exp(-p[1] * e);
        g[0] = f;
        g[1] = -p[0] * e * f;
        g[2] = p[0] * f * p[1] * x * e;
      },
      [](P p, double x) {
        const double e = std::exp(-p[2] * x);
        return p[0] * std::exp(-p[1] * e) * p[1] * p[2] * e;
      },
      [](const Dataset& d) {
        const auto s = summarize(d);
        const double dir = s.y_right >= s.y_left ? 1.0 : -1.0;
        const double k = dir * 6.0 / s.range();
        // Put the inflection (x = ln(b)/k) at the half-crossing.
        return Params{s.ymax, std::exp(std::clamp(k * s.x_half, -30.0, 30.0)), k};
      }));

  c.add(make(
      "hill", FamilyClass::Sigmoidal, "a x^h / (K^h + x^h)",
      {{"a", ParamRole::Amplitude, kReal}, {"K", ParamRole::Location, kPos}, {"h", ParamRole::Shape, kShape}},
      kPositiveX,
      [](P p, double x) {
        const double r = std::pow(x / p[1], p[2]);
        return std::isinf(r) ? p[0] : p[0] * r / (1.0 + r);
      },
      [](P p, double x, Out g) {
        const double r = std::pow(x / p[1], p[2]);
        const double q = 1.0 / (1.0 + r);
        const double dr = p[0] * q * q;
        g[0] = r * q;
        g[1] = r == 0.0 ? 0.0 : -dr * p[2] * r / p[1];
        g[2] = r == 0.0 ? 0.0 : dr * r * std::log(x / p[1]);
      },
      [](P p, double x) {
        const double r = std::pow(x / p[1], p[2]);
        const double q = 1.0 / (1.0 + r);
        return p[0] * q * q * p[2] * r / x;
      },
      [](const Dataset& d) {
        const auto s = summarize(d);
        const double K = s.x_half > 0 ? s.x_half : std::max(s.xmid, 1.0);
        return Params{s.ymax, K, 2.0};
      }));

  c.add(make(
      "tanh_sigmoid", FamilyClass::Sigmoidal, "c + a tanh(k (x - x0))",
      {{"c", ParamRole::Offset, kReal},
       {"a", ParamRole::Amplitude, kReal},
       {"k", ParamRole::Rate, kNonNeg},
       {"x0", ParamRole::Location, kReal}},
      kReal, [](P p, double x) { return p[0] + p[1] * std::tanh(p[2] * (x - p[3])); },
      [](P p, double x, Out g) {
        const double t = std::tanh(p[2] * (x - p[3]));
        const double dt = 1.0 - t * t;
        g[0] = 1.0;
        g[1] = t;
        g[2] = p[1] * dt * (x - p[3]);
        g[3] = -p[1] * dt * p[2];
      },
      [](P p, double x) {
        const double t = std::tanh(p[2] * (x - p[3]));
        return p[1] * p[2] * (1.0 - t * t);
      },
      [](const Dataset& d) {
        const auto s = summarize(d);
        const double dir = s.y_right >= s.y_left ? 1.0 : -1.0;
        return Params{0.5 * (s.ymin + s.ymax), dir * 0.5 * s.yspan(), 4.0 / s.range(), s.x_half};
      }));

  c.add(make(
      "weibull_cdf", FamilyClass::Sigmoidal, "a (1 - exp(-(x/lambda)^k))",
      {{"a", ParamRole::Amplitude, kReal}, {"lambda", ParamRole::Location, kPos}, {"k", ParamRole::Shape, kShape}},
      kPositiveX, [](P p, double x) { return -p[0] * std::expm1(-std::pow(x / p[1], p[2])); },
      [](P p, double x, Out g) {
        const double u = std::pow(x / p[1], p[2]);
        const double e = std::exp(-u);
        g[0] = -std::expm1(-u);
        g[1] = -p[0] * e * p[2] * u / p[1];
        g[2] = u == 0.0 ? 0.0 : p[0] * e * u * std::log(x / p[1]);
      },
      [](P p, double x) {
        const double u = std::pow(x / p[1], p[2]);
        return p[0] * std::exp(-u) * p[2] * std::pow(x / p[1], p[2] - 1.0) / p[1];
      },
      [](const Dataset& d) {
        const auto s = summarize(d);
        const double lambda = s.x_half > 0 ? s.x_half : std::max(s.xmid, 1.0);
        return Params{s.ymax, lambda, 2.0};
      }));
}

// ---------------------------------------------------------------------------
// Peaks

/// Width estimate from the spread of points above half maximum.
double half_max_width(const Dataset& d, const Summary& s) {
  const double half = s.ymin + 0.5 * s.yspan();
  double lo = s.x_at_ymax, hi = s.x_at_ymax;
  for (std::size_t i = 0; i < d.size(); ++i) {
    if (d.ys()[i] >= half) {
      lo = std::min(lo, d.xs()[i]);
      hi = std::max(hi, d.xs()[i]);
    }
  }
  const double fwhm = hi - lo;
  return fwhm > 0 ? fwhm / 2.3548 : s.range() / 6.0;
}

void add_peaks(Catalog& c) {
  c.add(make(
      "gaussian", FamilyClass::Peaked, "A exp(-(x - c)^2 / (2 w^2))",
      {{"A", ParamRole::Amplitude, kReal}, {"c", ParamRole::Location, kReal}, {"w", ParamRole::Width, kPos}}, kReal,
      [](P p, double x) {
        const double z = (x - p[1]) / p[2];
        return p[0] * std::exp(-0.5 * z * z);
      },
      [](P p, double x, Out g) {
        const double z = (x - p[1]) / p[2];
        const double e = std::exp(-0.5 * z * z);
        g[0] = e;
        g[1] = p[0] * e * z / p[2];
        g[2] = p[0] * e * z * z / p[2];
      },
      [](P p, double x) {
        const double z = (x - p[1]) / p[2];
        return -p[0] * std::exp(-0.5 * z * z) * z / p[2];
      },
      [](const Dataset& d) {
        const auto s = summarize(d);
        return Params{s.ymax, s.x_at_ymax, half_max_width(d, s)};
      }));

  c.add(make(
      "gaussian_offset", FamilyClass::Peaked, "A exp(-(x - c)^2 / (2 w^2)) + d",
      {{"A", ParamRole::Amplitude, kReal},
       {"c", ParamRole::Location, kReal},
       {"w", ParamRole::Width, kPos},
       {"d", ParamRole::Offset, kReal}},
      kReal,
      [](P p, double x) {
        const double z = (x - p[1]) / p[2];
        return p[0] * std::exp(-0.5 * z * z) + p[3];
      },
      [](P p, double x, Out g) {
        const double z = (x - p[1]) / p[2];
        const double e = std::exp(-0.5 * z * z);
        g[0] = e;
        g[1] = p[0] * e * z / p[2];
        g[2] = p[0] * e * z * z / p[2];
        g[3] = 1.0;
      },
      [](P p, double x) {
        const double z = (x - p[1]) / p[2];
        return -p[0] * std::exp(-0.5 * z * z) * z / p[2];
      },
      [](const Dataset& d) {
        const auto s = summarize(d);
        return Params{s.yspan(), s.x_at_ymax, half_max_width(d, s), s.ymin};
      }));

  c.add(make(
      "lorentzian", FamilyClass::Peaked, "A / (1 + ((x - c) / w)^2)",
      {{"A", ParamRole::Amplitude, kReal}, {"c", ParamRole::Location, kReal}, {"w", ParamRole::Width, kPos}}, kReal,
      [](P p, double x) {
        const double z = (x - p[1]) / p[2];
        return p[0] / (1.0 + z * z);
      },
      [](P p, double x, Out g) {
        const double z = (x - p[1]) / p[2];
        const double q = 1.0 / (1.0 + z * z);
        g[0] = q;
        g[1] = p[0] * 2.0 * z * q * q / p[2];
        g[2] = p[0] * 2.0 * z * z * q * q / p[2];
      },
      [](P p, double x) {
        const double z = (x - p[1]) / p[2];
        const double q = 1.0 / (1.0 + z * z);
        return -p[0] * 2.0 * z * q * q / p[2];
      },
      [](const Dataset& d) {
        const auto s = summarize(d);
        return Params{s.ymax, s.x_at_ymax, 1.1774 * half_max_width(d, s)};
      }));

  // Log-normal bump in t = x - shift; shift 0 for plain ages, -1 for age
  // measured from conception.
  auto lognormal_peak = [](std::string name, double shift, std::string formula) {
    return make(
        std::move(name), FamilyClass::Peaked, std::move(formula),
        {{"A", ParamRole::Amplitude, kReal}, {"c", ParamRole::Location, kPos}, {"w", ParamRole::Width, kPos}},
        Interval{shift + kPositive, kInf},
        [shift](P p, double x) {
          const double l = std::log((x - shift) / p[1]) / p[2];
          return p[0] * std::exp(-0.5 * l * l);
        },
        [shift](P p, double x, Out g) {
          const double L = std::log((x - shift) / p[1]);
          const double e = std::exp(-0.5 * L * L / (p[2] * p[2]));
          g[0] = e;
          g[1] = p[0] * e * L / (p[2] * p[2] * p[1]);
          g[2] = p[0] * e * L * L / (p[2] * p[2] * p[2]);
        },
        [shift](P p, double x) {
          const double t = x - shift;
          const double L = std::log(t / p[1]);
          const double e = std::exp(-0.5 * L * L / (p[2] * p[2]));
          return -p[0] * e * L / (p[2] * p[2] * t);
        },
        [shift](const Dataset& d) {
          const auto s = summarize(d);
          const double c0 = s.x_at_ymax - shift > 0 ? s.x_at_ymax - shift : std::max(s.xmid - shift, 1.0);
          return Params{s.ymax, c0, 0.6};
        });
  };
  c.add(lognormal_peak("lognormal_peak", 0.0, "A exp(-ln(x/c)^2 / (2 w^2))"));
  c.add(lognormal_peak("lognormal_peak_conception", kMinAge, "A exp(-ln((x+1)/c)^2 / (2 w^2))"));

  c.add(make(
      "gamma_peak", FamilyClass::Peaked, "A (x/c)^k exp(k (1 - x/c))",
      {{"A", ParamRole::Amplitude, kReal}, {"c", ParamRole::Location, kPos}, {"k", ParamRole::Shape, kShape}},
      kPositiveX,
      [](P p, double x) {
        const double t = x / p[1];
        return p[0] * std::exp(p[2] * (std::log(t) + 1.0 - t));
      },
      [](P p, double x, Out g) {
        const double t = x / p[1];
        const double e = std::exp(p[2] * (std::log(t) + 1.0 - t));
        g[0] = e;
        g[1] = p[0] * e * p[2] * (x - p[1]) / (p[1] * p[1]);
        g[2] = p[0] * e * (std::log(t) + 1.0 - t);
      },
      [](P p, double x) {
        const double t = x / p[1];
        return p[0] * std::exp(p[2] * (std::log(t) + 1.0 - t)) * p[2] * (1.0 / x - 1.0 / p[1]);
      },
      [](const Dataset& d) {
        const auto s = summarize(d);
        const double c0 = s.x_at_ymax > 0 ? s.x_at_ymax : std::max(s.xmid, 1.0);
        return Params{s.ymax, c0, 2.0};
      }));

  c.add(make(
      "gumbel_peak", FamilyClass::Peaked, "A exp(1 - z - exp(-z)), z = (x - c) / w",
      {{"A", ParamRole::Amplitude, kReal}, {"c", ParamRole::Location, kReal}, {"w", ParamRole::Width, kPos}}, kReal,
      [](P p, double x) {
        const double z = (x - p[1]) / p[2];
        return p[0] * std::exp(1.0 - z - std::exp(-z));
      },
      [](P p, double x, Out g) {
        const double z = (x - p[1]) / p[2];
        const double ez = std::exp(-z);
        const double e = std::exp(1.0 - z - ez);
        if (e == 0.0) {
          g[0] = g[1] = g[2] = 0.0;
          return;
        }
        g[0] = e;
        g[1] = p[0] * e * (1.0 - ez) / p[2];
        g[2] = p[0] * e * z * (1.0 - ez) / p[2];
      },
      [](P p, double x) {
        const double z = (x - p[1]) / p[2];
        const double ez = std::exp(-z);
        const double e = std::exp(1.0 - z - ez);
        return e == 0.0 ? 0.0 : p[0] * e * (ez - 1.0) / p[2];
      },
      [](const Dataset& d) {
        const auto s = summarize(d);
        return Params{s.ymax, s.x_at_ymax, half_max_width(d, s)};
      }));

  c.add(make(
      "exp_pulse", FamilyClass::Peaked, "a x exp(-b x)",
      {{"a", ParamRole::Amplitude, kReal}, {"b", ParamRole::Rate, kPos}}, kReal,
      [](P p, double x) { return p[0] * x * std::exp(-p[1] * x); },
      [](P p, double x, Out g) {
        const double e = std::exp(-p[1] * x);
        g[0] = x * e;
        g[1] = -p[0] * x * x * e;
      },
      [](P p, double x) { return p[0] * std::exp(-p[1] * x) * (1.0 - p[1] * x); },
      [](const Dataset& d) {
        const auto s = summarize(d);
        // Peak at x = 1/b with height a / (b e).
        const double xp = s.x_at_ymax > 0 ? s.x_at_ymax : std::max(s.xmid, 1.0);
        const double b = 1.0 / xp;
        return Params{s.ymax * b * std::exp(1.0), b};
      }));
}

// ---------------------------------------------------------------------------
// Rationals

void add_rationals(Catalog& c) {
  auto line = [](const Dataset& d) {
    auto sol = basis_lsq(
        d, 2,
        [](double x, std::span<double> row) {
          row[0] = 1.0;
          row[1] = x;
        },
        identity_y, all_points);
    if (sol.empty()) sol = {summarize(d).ymean, 0.0};
    return sol;
  };

  c.add(make(
      "rational_01", FamilyClass::Rational, "a / (1 + b x)",
      {{"a", ParamRole::Coefficient, kReal}, {"b", ParamRole::Coefficient, kReal}}, kReal,
      [](P p, double x) { return p[0] / (1.0 + p[1] * x); },
      [](P p, double x, Out g) {
        const double q = 1.0 / (1.0 + p[1] * x);
        g[0] = q;
        g[1] = -p[0] * x * q * q;
      },
      [](P p, double x) {
        const double q = 1.0 / (1.0 + p[1] * x);
        return -p[0] * p[1] * q * q;
      },
      [](const Dataset& d) {
        // 1/y is linear in x: 1/y = 1/a + (b/a) x.
        auto sol = basis_lsq(
            d, 2,
            [](double x, std::span<double> row) {
              row[0] = 1.0;
              row[1] = x;
            },
            [](double, double y) { return 1.0 / y; }, [](double, double y) { return y > 0; });
        if (sol.empty() || sol[0] <= 0) return Params{summarize(d).ymean, 0.0};
        return Params{1.0 / sol[0], sol[1] / sol[0]};
      }));

  c.add(make(
      "rational_11", FamilyClass::Rational, "(a + b x) / (1 + c x)",
      {{"a", ParamRole::Coefficient, kReal}, {"b", ParamRole::Coefficient, kReal}, {"c", ParamRole::Coefficient, kReal}},
      kReal, [](P p, double x) { return (p[0] + p[1] * x) / (1.0 + p[2] * x); },
      [](P p, double x, Out g) {
        const double q = 1.0 / (1.0 + p[2] * x);
        g[0] = q;
        g[1] = x * q;
        g[2] = -(p[0] + p[1] * x) * x * q * q;
      },
      [](P p, double x) {
        const double q = 1.0 / (1.0 + p[2] * x);
        return (p[1] - p[0] * p[2]) * q * q;
      },
      [line](const Dataset& d) {
        const auto l = line(d);
        return Params{l[0], l[1], 0.0};
      }));

  c.add(make(
      "rational_12", FamilyClass::Rational, "(a + b x) / (1 + c x + d x^2)",
      {{"a", ParamRole::Coefficient, kReal},
       {"b", ParamRole::Coefficient, kReal},
       {"c", ParamRole::Coefficient, kReal},
       {"d", ParamRole::Coefficient, kReal}},
      kReal, [](P p, double x) { return (p[0] + p[1] * x) / (1.0 + x * (p[2] + p[3] * x)); },
      [](P p, double x, Out g) {
        const double q = 1.0 / (1.0 + x * (p[2] + p[3] * x));
        const double n = p[0] + p[1] * x;
        g[0] = q;
        g[1] = x * q;
        g[2] = -n * x * q * q;
        g[3] = -n * x * x * q * q;
      },
      [](P p, double x) {
        const double den = 1.0 + x * (p[2] + p[3] * x);
        const double n = p[0] + p[1] * x;
        return (p[1] * den - n * (p[2] + 2.0 * p[3] * x)) / (den * den);
      },
      [line](const Dataset& d) {
        const auto l = line(d);
        return Params{l[0], l[1], 0.0, 0.0};
      }));

  c.add(make(
      "rational_21", FamilyClass::Rational, "(a + b x + c x^2) / (1 + d x)",
      {{"a", ParamRole::Coefficient, kReal},
       {"b", ParamRole::Coefficient, kReal},
       {"c", ParamRole::Coefficient, kReal},
       {"d", ParamRole::Coefficient, kReal}},
      kReal, [](P p, double x) { return (p[0] + x * (p[1] + p[2] * x)) / (1.0 + p[3] * x); },
      [](P p, double x, Out g) {
        const double q = 1.0 / (1.0 + p[3] * x);
        const double n = p[0] + x * (p[1] + p[2] * x);
        g[0] = q;
        g[1] = x * q;
        g[2] = x * x * q;
        g[3] = -n * x * q * q;
      },
      [](P p, double x) {
        const double den = 1.0 + p[3] * x;
        const double n = p[0] + x * (p[1] + p[2] * x);
        return ((p[1] + 2.0 * p[2] * x) * den - n * p[3]) / (den * den);
      },
      [](const Dataset& d) {
        const auto q = poly_lsq(d, 2);
        return Params{q[0], q[1], q[2], 0.0};
      }));

  c.add(make(
      "rational_22", FamilyClass::Rational, "(a + b x + c x^2) / (1 + d x + e x^2)",
      {{"a", ParamRole::Coefficient, kReal},
       {"b", ParamRole::Coefficient, kReal},
       {"c", ParamRole::Coefficient, kReal},
       {"d", ParamRole::Coefficient, kReal},
       {"e", ParamRole::Coefficient, kReal}},
      kReal, [](P p, double x) { return (p[0] + x * (p[1] + p[2] * x)) / (1.0 + x * (p[3] + p[4] * x)); },
      [](P p, double x, Out g) {
        const double q = 1.0 / (1.0 + x * (p[3] + p[4] * x));
        const double n = p[0] + x * (p[1] + p[2] * x);
        g[0] = q;
        g[1] = x * q;
        g[2] = x * x * q;
        g[3] = -n * x * q * q;
        g[4] = -n * x * x * q * q;
      },
      [](P p, double x) {
        const double den = 1.0 + x * (p[3] + p[4] * x);
        const double n = p[0] + x * (p[1] + p[2] * x);
        return ((p[1] + 2.0 * p[2] * x) * den - n * (p[3] + 2.0 * p[4] * x)) / (den * den);
      },
      [](const Dataset& d) {
        const auto q = poly_lsq(d, 2);
        return Params{q[0], q[1], q[2], 0.0, 0.0};
      }));
}

// ---------------------------------------------------------------------------
// Power laws

void add_power_laws(Catalog& c) {
  auto loglog = [](const Dataset& d) {
    return basis_lsq(
        d, 2,
        [](double x, std::span<double> row) {
          row[0] = 1.0;
          row[1] = std::log(x);
        },
        [](double, double y) { return std::log(y); }, positive_xy);
  };

  c.add(make(
      "power_law", FamilyClass::Power, "a x^b",
      {{"a", ParamRole::Amplitude, kReal}, {"b", ParamRole::Shape, kReal}}, kPositiveX,
      [](P p, double x) { return p[0] * std::pow(x, p[1]); },
      [](P p, double x, Out g) {
        const double t = std::pow(x, p[1]);
        g[0] = t;
        g[1] = p[0] * t * std::log(x);
      },
      [](P p, double x) { return p[0] * p[1] * std::pow(x, p[1] - 1.0); },
      [loglog](const Dataset& d) {
        const auto sol = loglog(d);
        if (sol.empty()) return Params{std::max(summarize(d).ymean, 1e-6), 0.0};
        return Params{std::exp(sol[0]), sol[1]};
      }));

  c.add(make(
      "power_offset", FamilyClass::Power, "a x^b + c",
      {{"a", ParamRole::Amplitude, kReal}, {"b", ParamRole::Shape, kReal}, {"c", ParamRole::Offset, kReal}},
      kPositiveX, [](P p, double x) { return p[0] * std::pow(x, p[1]) + p[2]; },
      [](P p, double x, Out g) {
        const double t = std::pow(x, p[1]);
        g[0] = t;
        g[1] = p[0] * t * std::log(x);
        g[2] = 1.0;
      },
      [](P p, double x) { return p[0] * p[1] * std::pow(x, p[1] - 1.0); },
      [loglog](const Dataset& d) {
        const auto sol = loglog(d);
        if (sol.empty()) return Params{std::max(summarize(d).ymean, 1e-6), 0.0, 0.0};
        return Params{std::exp(sol[0]), sol[1], 0.0};
      }));

  c.add(make(
      "logarithmic", FamilyClass::Power, "a + b ln(x)",
      {{"a", ParamRole::Coefficient, kReal}, {"b", ParamRole::Coefficient, kReal}}, kPositiveX,
      [](P p, double x) { return p[0] + p[1] * std::log(x); },
      [](P, double x, Out g) {
        g[0] = 1.0;
        g[1] = std::log(x);
      },
      [](P p, double x) { return p[1] / x; },
      [](const Dataset& d) {
        auto sol = basis_lsq(
            d, 2,
            [](double x, std::span<double> row) {
              row[0] = 1.0;
              row[1] = std::log(x);
            },
            identity_y, positive_x);
        if (sol.empty()) return Params{summarize(d).ymean, 0.0};
        return Params{sol[0], sol[1]};
      }));

  c.add(make(
      "reciprocal", FamilyClass::Power, "a + b / x",
      {{"a", ParamRole::Coefficient, kReal}, {"b", ParamRole::Coefficient, kReal}}, kPositiveX,
      [](P p, double x) { return p[0] + p[1] / x; },
      [](P, double x, Out g) {
        g[0] = 1.0;
        g[1] = 1.0 / x;
      },
      [](P p, double x) { return -p[1] / (x * x); },
      [](const Dataset& d) {
        auto sol = basis_lsq(
            d, 2,
            [](double x, std::span<double> row) {
              row[0] = 1.0;
              row[1] = 1.0 / x;
            },
            identity_y, positive_x);
        if (sol.empty()) return Params{summarize(d).ymean, 0.0};
        return Params{sol[0], sol[1]};
      }));
}

Catalog build_catalog() {
  Catalog c;
  add_polynomials(c);
  add_exponentials(c);
  add_sigmoids(c);
  add_peaks(c);
  add_rationals(c);
  add_power_laws(c);
  return c;
}

}  // namespace

const Catalog& catalog() {
  static const Catalog c = build_catalog();
  return c;
}

}  // namespace msci
