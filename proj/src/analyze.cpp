#include "msci/analyze.hpp"

#include <algorithm>
#include <cmath>

#include <boost/math/distributions/normal.hpp>

#include "msci/csv.hpp"
#include "msci/error.hpp"
#include "msci/simd.hpp"

namespace msci::analyze {

double derivative(const ModelSpec& spec, std::span<const double> params, double x, DerivativeMethod method) {
  double d;
  if (method == DerivativeMethod::Analytic && spec.dydx && spec.support.contains(x)) {
    d = spec.dydx(params, x);
  } else {
    const double h = 1e-6 * std::max(1.0, std::abs(x));
    d = (evaluate(spec, params, x + h) - evaluate(spec, params, x - h)) / (2.0 * h);
  }
  if (!std::isfinite(d)) {
    throw Error("derivative: '" + spec.name + "' is not finite near x=" + csv::format_double(x));
  }
  return d;
}

double monthly_loss(const ModelSpec& spec, std::span<const double> params, double age) {
  return -derivative(spec, params, age) / 12.0;
}

Peak peak_age(const std::function<double(double)>& objective, Interval range, std::size_t grid) {
  if (grid < 16) throw Error("peak_age: grid must have at least 16 cells");
  if (range.empty() || !std::isfinite(range.lo) || !std::isfinite(range.hi) || range.width() <= 0.0) {
    throw Error("peak_age: range must be a finite interval of positive width");
  }
  const double h = range.width() / static_cast<double>(grid);
  auto at = [&](std::size_t i) { return i == grid ? range.hi : range.lo + h * static_cast<double>(i); };

  std::vector<double> values(grid + 1);
  for (std::size_t i = 0; i <= grid; ++i) {
    values[i] = objective(at(i));
    if (!std::isfinite(values[i])) {
      throw Error("peak_age: objective is not finite at x=" + csv::format_double(at(i)));
    }
  }
  const auto [mn, mx] = std::minmax_element(values.begin(), values.end());
  if (*mn == *mx) return {0.5 * (range.lo + range.hi), *mx, true};
  const auto best = static_cast<std::size_t>(mx - values.begin());

  // Golden-section maximization on the two cells around the best grid point.
  double a = at(best == 0 ? 0 : best - 1);
  double b = at(std::min(best + 1, grid));
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = objective(c), fd = objective(d);
  const double tol = h / 100.0;
  while (b - a > tol) {
    if (fc >= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = objective(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = objective(d);
    }
  }
  Peak peak{0.5 * (a + b), 0.0, false};
  peak.value = objective(peak.x);
  if (!(peak.value >= values[best])) {
    peak.x = at(best);
    peak.value = values[best];
  }
  return peak;
}

double percent_remaining(const ModelSpec& spec, std::span<const double> params, double age, const Reference& ref) {
  double reference;
  if (ref.kind == Reference::Kind::Peak) {
    reference = peak_age([&](double x) { return evaluate(spec, params, x); }, ref.domain).value;
  } else {
    reference = evaluate(spec, params, ref.age);
  }
  if (!(reference > 0.0) || !std::isfinite(reference)) {
    throw Error("percent_remaining: reference value must be positive and finite");
  }
  const double v = evaluate(spec, params, age);
  if (!std::isfinite(v)) throw Error("percent_remaining: model is not finite at the requested age");
  return 100.0 * v / reference;
}

std::string_view to_string(Transform t) {
  switch (t) {
    case Transform::Value: return "value";
    case Transform::Derivative: return "derivative";
    case Transform::NegatedDerivative: return "negated_derivative";
  }
  return "value";
}

Transform parse_transform(std::string_view text) {
  if (text == "value") return Transform::Value;
  if (text == "derivative") return Transform::Derivative;
  if (text == "negated_derivative") return Transform::NegatedDerivative;
  throw Error("unknown transform '" + std::string(text) + "' (value | derivative | negated_derivative)");
}

std::size_t monthly_grid(Interval range) {
  const auto months = static_cast<std::size_t>(std::ceil(range.width() * 12.0));
  return std::max<std::size_t>(months + 1, 3);
}

double pearson(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size() || a.size() < 3) throw Error("pearson: need two series of equal length >= 3");
  const double n = static_cast<double>(a.size());
  const double ma = simd::sum(a) / n;
  const double mb = simd::sum(b) / n;
  const double saa = simd::centered_cross(a, ma, a, ma);
  const double sbb = simd::centered_cross(b, mb, b, mb);
  auto negligible = [n](double ss, std::span<const double> v) {
    double big = 0.0;
    for (double x : v) big = std::max(big, std::abs(x));
    const double eps = 64.0 * std::numeric_limits<double>::epsilon() * big;
    return !(ss > n * eps * eps);
  };
  if (negligible(saa, a) || negligible(sbb, b)) throw Error("correlation undefined: a series is constant");
  const double r = simd::centered_cross(a, ma, b, mb) / std::sqrt(saa * sbb);
  return std::clamp(r, -1.0, 1.0);
}

CorrelationReport cross_correlation(const ModelRef& a, const ModelRef& b, Transform ta, Transform tb, Interval range,
                                    std::size_t grid) {
  if (!a.spec || !b.spec) throw Error("cross_correlation: missing model");
  if (grid < 3) throw Error("cross_correlation: grid must have at least 3 points");
  if (range.empty() || range.width() <= 0.0) throw Error("cross_correlation: empty range");
  auto series = [&](const ModelRef& m, Transform t) {
    std::vector<double> out(grid);
    for (std::size_t i = 0; i < grid; ++i) {
      const double x = i + 1 == grid ? range.hi : range.lo + range.width() * static_cast<double>(i) / (grid - 1);
      double v;
      switch (t) {
        case Transform::Value: v = evaluate(*m.spec, m.params, x); break;
        case Transform::Derivative: v = derivative(*m.spec, m.params, x); break;
        case Transform::NegatedDerivative: v = -derivative(*m.spec, m.params, x); break;
      }
      if (!std::isfinite(v)) {
        throw Error("cross_correlation: '" + m.spec->name + "' is not finite at x=" + csv::format_double(x));
      }
      out[i] = v;
    }
    return out;
  };
  const auto sa = series(a, ta);
  const auto sb = series(b, tb);
  return {pearson(sa, sb), range, grid, ta, tb};
}

double two_sided_z(double level) {
  if (!(level > 0.0 && level < 1.0)) throw Error("level must lie in (0, 1)");
  return boost::math::quantile(boost::math::normal_distribution<double>(), 0.5 + 0.5 * level);
}

IntervalBand prediction_band(const ModelSpec& spec, const FitResult& fit, const Dataset& d, double level,
                             std::size_t grid) {
  if (d.empty()) throw Error("prediction_band: empty dataset");
  if (fit.params.size() != spec.n_params()) throw Error("prediction_band: fit does not match the model");
  if (d.size() <= spec.n_params()) throw Error("prediction_band: non-positive degrees of freedom");
  if (!std::isfinite(fit.rss)) throw Error("prediction_band: fit has no finite residual sum of squares");
  grid = std::max<std::size_t>(grid, 2);

  IntervalBand band;
  band.level = level;
  band.residual_sd = std::sqrt(fit.rss / static_cast<double>(d.size() - spec.n_params()));
  band.half_width = two_sided_z(level) * band.residual_sd;
  const auto xs = d.xs();
  const double lo = *std::min_element(xs.begin(), xs.end());
  const double hi = *std::max_element(xs.begin(), xs.end());
  for (std::size_t i = 0; i < grid; ++i) {
    const double x = i + 1 == grid ? hi : lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(grid - 1);
    const double y = evaluate(spec, fit.params, x);
    band.x.push_back(x);
    band.fit.push_back(y);
    band.lower.push_back(y - band.half_width);
    band.upper.push_back(y + band.half_width);
  }
  return band;
}

}  // namespace msci::analyze
