#include "msci/models.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>

#include "msci/csv.hpp"
#include "msci/error.hpp"

namespace msci {

std::string_view to_string(FamilyClass c) {
  switch (c) {
    case FamilyClass::Polynomial: return "polynomial";
    case FamilyClass::Exponential: return "exponential";
    case FamilyClass::Sigmoidal: return "sigmoidal";
    case FamilyClass::Peaked: return "peaked";
    case FamilyClass::Rational: return "rational";
    case FamilyClass::Power: return "power";
  }
  return "unknown";
}

bool ModelSpec::within_bounds(std::span<const double> p) const {
  if (p.size() != n_params()) return false;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (!std::isfinite(p[i]) || !bounds[i].contains(p[i])) return false;
  }
  return true;
}

Params ModelSpec::clamp_to_bounds(Params p) const {
  for (std::size_t i = 0; i < p.size() && i < bounds.size(); ++i) p[i] = bounds[i].clamp(p[i]);
  return p;
}

void Catalog::add(ModelSpec spec) {
  const auto n = spec.n_params();
  if (spec.name.empty() || n == 0) throw Error("catalog: spec needs a name and at least one parameter");
  if (spec.bounds.size() != n || spec.roles.size() != n) {
    throw Error("catalog: spec '" + spec.name + "' has inconsistent parameter metadata");
  }
  if (!spec.eval || !spec.grad || !spec.guess) {
    throw Error("catalog: spec '" + spec.name + "' is missing eval, grad or guess");
  }
  if (find(spec.name)) throw Error("catalog: duplicate model name '" + spec.name + "'");
  specs_.push_back(std::move(spec));
}

const ModelSpec* Catalog::find(std::string_view name) const {
  for (const auto& s : specs_) {
    if (s.name == name) return &s;
  }
  return nullptr;
}

const ModelSpec& Catalog::at(std::string_view name) const {
  if (const auto* s = find(name)) return *s;
  throw Error("unknown model '" + std::string(name) + "'");
}

Catalog Catalog::filter(std::string_view selection) const {
  selection = csv::trim(selection);
  if (selection.empty() || selection == "all") return *this;
  std::vector<std::string> tokens;
  std::size_t start = 0;
  while (start <= selection.size()) {
    const auto comma = selection.find(',', start);
    const auto tok = csv::trim(selection.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start));
    if (!tok.empty()) tokens.emplace_back(tok);
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  Catalog out;
  for (const auto& tok : tokens) {
    bool matched = false;
    for (const auto& s : specs_) {
      if (s.name == tok || to_string(s.family_class) == tok) {
        matched = true;
        if (!out.find(s.name)) out.specs_.push_back(s);
      }
    }
    if (!matched) throw Error("catalog filter: '" + tok + "' matches no model or family class");
  }
  return out;
}

double evaluate(const ModelSpec& spec, std::span<const double> params, double x) {
  if (params.size() != spec.n_params()) throw Error("evaluate: '" + spec.name + "' expects " +
                                                    std::to_string(spec.n_params()) + " parameters");
  if (!std::isfinite(x) || !spec.support.contains(x)) return std::numeric_limits<double>::quiet_NaN();
  return spec.eval(params, x);
}

std::vector<double> gradient(const ModelSpec& spec, std::span<const double> params, double x) {
  std::vector<double> g(spec.n_params(), std::numeric_limits<double>::quiet_NaN());
  if (params.size() != spec.n_params()) throw Error("gradient: '" + spec.name + "' expects " +
                                                    std::to_string(spec.n_params()) + " parameters");
  if (!std::isfinite(x) || !spec.support.contains(x)) return g;
  spec.grad(params, x, g);
  return g;
}

Params initial_guess(const ModelSpec& spec, const Dataset& d) {
  if (d.empty()) throw Error("initial_guess: empty dataset");
  if (d.size() < spec.n_params()) {
    throw Error("initial_guess: '" + spec.name + "' has " + std::to_string(spec.n_params()) +
                " parameters but the dataset has " + std::to_string(d.size()) + " points");
  }
  Params p = spec.guess(d);
  p.resize(spec.n_params(), 0.0);
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (!std::isfinite(p[i])) {
      const auto& b = spec.bounds[i];
      p[i] = b.contains(1.0) ? 1.0 : (std::isfinite(b.lo) ? b.lo : b.hi);
    }
  }
  return spec.clamp_to_bounds(std::move(p));
}

namespace {

double slope_at(const ModelSpec& spec, std::span<const double> p, double x) {
  if (spec.dydx) return spec.dydx(p, x);
  const double h = 1e-6 * std::max(1.0, std::abs(x));
  return (evaluate(spec, p, x + h) - evaluate(spec, p, x - h)) / (2.0 * h);
}

// A sign change between two grid points is either a root or an odd-order
// pole. Bisect it: a pole makes |f| grow past both endpoints.
std::optional<double> pole_between(const ModelSpec& spec, std::span<const double> p, double a, double fa, double b,
                                   double fb) {
  const double bound = std::max(std::abs(fa), std::abs(fb));
  for (int i = 0; i < 200 && b - a > 0.0; ++i) {
    const double m = 0.5 * (a + b);
    if (m <= a || m >= b) break;
    const double fm = evaluate(spec, p, m);
    if (!std::isfinite(fm)) return m;
    if ((fm < 0.0) == (fa < 0.0)) {
      a = m;
      fa = fm;
    } else {
      b = m;
      fb = fm;
    }
  }
  if (std::max(std::abs(fa), std::abs(fb)) > 1e3 * bound) return 0.5 * (a + b);
  return std::nullopt;
}

}  // namespace

Plausibility check_plausibility(const ModelSpec& spec, std::span<const double> params, const PlausibilityConfig& cfg) {
  if (cfg.domain.empty() || !std::isfinite(cfg.domain.lo) || !std::isfinite(cfg.domain.hi)) {
    throw Error("check_plausibility: domain must be a finite nonempty interval");
  }
  const std::size_t grid = std::max<std::size_t>(cfg.grid, 2);
  const double step = cfg.domain.width() / static_cast<double>(grid - 1);
  const bool track_slope = cfg.max_sign_changes_of_derivative.has_value();

  std::vector<double> slopes;
  if (track_slope) slopes.reserve(grid);
  double prev_x = 0.0, prev_y = std::numeric_limits<double>::quiet_NaN();
  for (std::size_t i = 0; i < grid; ++i) {
    const double x = i + 1 == grid ? cfg.domain.hi : cfg.domain.lo + step * static_cast<double>(i);
    const double y = evaluate(spec, params, x);
    if (!std::isfinite(y)) {
      if (cfg.require_finite) return {false, "non-finite at x=" + csv::format_double(x)};
      prev_y = y;
      continue;
    }
    if (cfg.require_finite && std::isfinite(prev_y) && (y < 0.0) != (prev_y < 0.0) && y != 0.0 && prev_y != 0.0) {
      if (const auto pole = pole_between(spec, params, prev_x, prev_y, x, y)) {
        return {false, "non-finite at x=" + csv::format_double(*pole)};
      }
    }
    prev_x = x;
    prev_y = y;
    if (cfg.require_nonnegative && y < 0.0) return {false, "negative at x=" + csv::format_double(x)};
    if (track_slope) {
      const double s = slope_at(spec, params, x);
      if (std::isfinite(s)) slopes.push_back(s);
    }
  }
  if (track_slope) {
    double largest = 0.0;
    for (double s : slopes) largest = std::max(largest, std::abs(s));
    const double eps = 1e-12 * largest;
    int changes = 0;
    int last_sign = 0;
    for (double s : slopes) {
      if (std::abs(s) <= eps) continue;
      const int sign = s > 0 ? 1 : -1;
      if (last_sign != 0 && sign != last_sign) ++changes;
      last_sign = sign;
    }
    if (changes > *cfg.max_sign_changes_of_derivative) {
      return {false, "derivative changes sign " + std::to_string(changes) + " times"};
    }
  }
  return {true, {}};
}

}  // namespace msci
