#pragma once

#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "msci/dataset.hpp"
#include "msci/fit.hpp"
#include "msci/models.hpp"

namespace msci::analyze {

enum class DerivativeMethod { Analytic, Central };

/// dy/dx. Analytic when the family provides it and method is Analytic,
/// otherwise a central difference with h = 1e-6 max(1, |x|).
double derivative(const ModelSpec& spec, std::span<const double> params, double x,
                  DerivativeMethod method = DerivativeMethod::Analytic);

/// Loss per month from a per-year population model: -(dN/dage) / 12.
double monthly_loss(const ModelSpec& spec, std::span<const double> params, double age);

struct Peak {
  double x = 0.0;
  double value = 0.0;
  /// Objective was constant on the grid; x is the range midpoint.
  bool plateau = false;
};

/// Grid scan with `grid` cells, then golden-section refinement around the
/// best grid point to a bracket of at most range/grid/100.
Peak peak_age(const std::function<double(double)>& objective, Interval range, std::size_t grid = 512);

struct Reference {
  enum class Kind { Peak, Age } kind = Kind::Peak;
  /// Kind::Age: the reference age.
  double age = 0.0;
  /// Kind::Peak: the domain searched for the model maximum.
  Interval domain{0.0, 60.0};
};

/// 100 * N(age) / N(reference).
double percent_remaining(const ModelSpec& spec, std::span<const double> params, double age, const Reference& ref);

enum class Transform { Value, Derivative, NegatedDerivative };
std::string_view to_string(Transform t);
Transform parse_transform(std::string_view text);

struct ModelRef {
  const ModelSpec* spec = nullptr;
  Params params;
};

struct CorrelationReport {
  double r = 0.0;
  Interval age_range;
  std::size_t grid_size = 0;
  Transform transform_a = Transform::Value;
  Transform transform_b = Transform::Value;
};

/// Pearson r of the two transformed model curves on a uniform grid.
CorrelationReport cross_correlation(const ModelRef& a, const ModelRef& b, Transform ta, Transform tb, Interval range,
                                    std::size_t grid);
/// Monthly resolution: 12 points per year of range, plus the endpoint.
std::size_t monthly_grid(Interval range);
double pearson(std::span<const double> a, std::span<const double> b);

struct IntervalBand {
  double level = 0.95;
  /// Residual standard deviation sqrt(rss / (n - p)).
  double residual_sd = 0.0;
  double half_width = 0.0;
  std::vector<double> x, lower, fit, upper;
};

/// Two-sided normal quantile z with P(|Z| <= z) = level.
double two_sided_z(double level);

/// Constant-width band fit(x) +/- z(level) s over the data's x-range.
IntervalBand prediction_band(const ModelSpec& spec, const FitResult& fit, const Dataset& d, double level = 0.95,
                             std::size_t grid = 256);

}  // namespace msci::analyze
