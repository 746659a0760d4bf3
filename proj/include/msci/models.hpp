#pragma once

#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "msci/dataset.hpp"

namespace msci {

using Params = std::vector<double>;

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// Closed interval; either end may be infinite.
struct Interval {
  double lo = -kInf;
  double hi = kInf;

  bool contains(double v) const noexcept { return v >= lo && v <= hi; }
  double clamp(double v) const noexcept { return v < lo ? lo : (v > hi ? hi : v); }
  double width() const noexcept { return hi - lo; }
  bool empty() const noexcept { return !(lo <= hi); }
};

enum class FamilyClass { Polynomial, Exponential, Sigmoidal, Peaked, Rational, Power };
std::string_view to_string(FamilyClass c);

/// What a parameter does; multi-start uses it to choose perturbations.
enum class ParamRole { Coefficient, Amplitude, Offset, Location, Width, Rate, Shape };

/// A parametric family y = f(theta, x). Specs are immutable values.
struct ModelSpec {
  using EvalFn = std::function<double(std::span<const double> p, double x)>;
  using GradFn = std::function<void(std::span<const double> p, double x, std::span<double> out)>;
  using GuessFn = std::function<Params(const Dataset& d)>;

  std::string name;
  FamilyClass family_class = FamilyClass::Polynomial;
  std::string formula;
  std::vector<std::string> param_names;
  std::vector<ParamRole> roles;
  std::vector<Interval> bounds;
  /// x-values on which the family is defined (e.g. x > 0 for power laws).
  Interval support;
  EvalFn eval;
  /// d f / d theta_j, written into out[0..n_params).
  GradFn grad;
  /// d f / d x; optional, callers fall back to central differences.
  EvalFn dydx;
  GuessFn guess;

  std::size_t n_params() const noexcept { return param_names.size(); }
  bool within_bounds(std::span<const double> p) const;
  Params clamp_to_bounds(Params p) const;
};

/// Registry of specs with unique names. Order of registration is preserved.
class Catalog {
 public:
  void add(ModelSpec spec);
  const ModelSpec* find(std::string_view name) const;
  const ModelSpec& at(std::string_view name) const;
  const std::vector<ModelSpec>& specs() const noexcept { return specs_; }
  std::size_t size() const noexcept { return specs_.size(); }
  /// Comma-separated names or family classes; "all" or empty selects everything.
  Catalog filter(std::string_view selection) const;

 private:
  std::vector<ModelSpec> specs_;
};

/// The built-in catalog: polynomials of degree 0-5 and exponential,
/// sigmoidal, peaked, rational and power-law families.
const Catalog& catalog();

/// Returns NaN/inf when the model is undefined at x (pole, overflow,
/// outside its support); never throws for in-bounds parameters.
double evaluate(const ModelSpec& spec, std::span<const double> params, double x);
std::vector<double> gradient(const ModelSpec& spec, std::span<const double> params, double x);

/// Finite, in-bounds starting parameters derived from the data.
Params initial_guess(const ModelSpec& spec, const Dataset& d);

struct PlausibilityConfig {
  Interval domain{0.0, 60.0};
  bool require_nonnegative = false;
  bool require_finite = true;
  std::optional<int> max_sign_changes_of_derivative;
  std::size_t grid = 512;
};

struct Plausibility {
  bool plausible = true;
  std::string reason;
  explicit operator bool() const noexcept { return plausible; }
};

/// Scans the model on a uniform grid over cfg.domain.
Plausibility check_plausibility(const ModelSpec& spec, std::span<const double> params, const PlausibilityConfig& cfg);

}  // namespace msci
