#include "msci/fit.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <thread>

#include <Eigen/Dense>

#include "msci/error.hpp"
#include "msci/rng.hpp"
#include "msci/simd.hpp"

namespace msci {
namespace {

constexpr double kMaxLambda = 1e30;
constexpr double kMinLambda = 1e-15;

double norm(std::span<const double> v) { return std::sqrt(simd::dot(v, v)); }

/// Model values at every x; returns false if any is non-finite.
bool predict(const ModelSpec& spec, std::span<const double> p, std::span<const double> xs, std::span<double> out) {
  for (std::size_t i = 0; i < xs.size(); ++i) {
    out[i] = evaluate(spec, p, xs[i]);
    if (!std::isfinite(out[i])) return false;
  }
  return true;
}

double weighted_tss(const Dataset& d) {
  const auto w = d.weights();
  const double wsum = simd::sum(w);
  const double mean = simd::dot(w, d.ys()) / wsum;
  return simd::weighted_sq_dev(d.ys(), mean, w);
}

bool all_x_equal(const Dataset& d) {
  const auto xs = d.xs();
  return std::all_of(xs.begin(), xs.end(), [&](double x) { return x == xs.front(); });
}

void finalize(FitResult& r, const ModelSpec& spec, const Dataset& d) {
  std::vector<double> f(d.size());
  r.residuals.assign(d.size(), std::numeric_limits<double>::quiet_NaN());
  if (predict(spec, r.params, d.xs(), f)) {
    simd::subtract(d.ys(), f, r.residuals);
    r.rss = simd::weighted_rss(d.ys(), f, d.weights());
  } else {
    r.rss = kInf;
  }
  const double tss = weighted_tss(d);
  r.r2 = tss > 0.0 && std::isfinite(r.rss) ? 1.0 - r.rss / tss : std::numeric_limits<double>::quiet_NaN();
}

}  // namespace

FitResult fit_least_squares(const ModelSpec& spec, const Dataset& d, std::span<const double> start,
                            const FitOptions& options) {
  const std::size_t n = d.size();
  const std::size_t k = spec.n_params();
  if (start.size() != k) throw Error("fit: '" + spec.name + "' expects " + std::to_string(k) + " start values");
  if (n < k) {
    throw Error("fit: underdetermined, '" + spec.name + "' has " + std::to_string(k) + " parameters but only " +
                std::to_string(n) + " points");
  }
  if (k >= 2 && all_x_equal(d)) {
    throw SingularSystemError("fit: all x values are identical; '" + spec.name + "' is not identifiable");
  }
  if (!spec.within_bounds(start)) throw Error("fit: start values for '" + spec.name + "' are outside the bounds");

  const auto xs = d.xs();
  const auto ys = d.ys();
  const auto ws = d.weights();

  FitResult result;
  result.spec_name = spec.name;
  Params theta(start.begin(), start.end());
  std::vector<double> f(n), r(n), trial_f(n), trial_r(n), df(n);
  std::vector<double> jac(n * k);  // column-major: column j at jac[j*n]
  std::vector<double> grad_row(k);

  if (!predict(spec, theta, xs, f)) {
    result.params = theta;
    result.termination = "non-finite model values at the start";
    finalize(result, spec, d);
    return result;
  }
  double rss = simd::weighted_rss(ys, f, ws);
  double lambda = options.initial_lambda;
  std::string termination = "max-iterations";
  bool converged = false;
  int iter = 0;
  int small_changes = 0;

  Eigen::MatrixXd A(k, k);
  Eigen::VectorXd g(k);
  for (; iter < options.max_iterations; ++iter) {
    if (rss == 0.0) {
      termination = "exact";
      converged = true;
      break;
    }
    simd::subtract(ys, f, r);
    for (std::size_t i = 0; i < n; ++i) {
      spec.grad(theta, xs[i], grad_row);
      for (std::size_t j = 0; j < k; ++j) {
        jac[j * n + i] = std::isfinite(grad_row[j]) ? grad_row[j] : 0.0;
      }
    }
    for (std::size_t a = 0; a < k; ++a) {
      const std::span<const double> ca(jac.data() + a * n, n);
      g(static_cast<Eigen::Index>(a)) = simd::weighted_dot(ca, r, ws);
      for (std::size_t b = 0; b <= a; ++b) {
        const std::span<const double> cb(jac.data() + b * n, n);
        const double v = simd::weighted_dot(ca, cb, ws);
        A(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) = v;
        A(static_cast<Eigen::Index>(b), static_cast<Eigen::Index>(a)) = v;
      }
    }
    const double diag_floor = std::max(A.diagonal().maxCoeff(), 1.0) * 1e-12;

    bool accepted = false;
    bool stop = false;
    while (!accepted) {
      Eigen::MatrixXd M = A;
      for (std::size_t j = 0; j < k; ++j) {
        const auto jj = static_cast<Eigen::Index>(j);
        M(jj, jj) += lambda * std::max(A(jj, jj), diag_floor);
      }
      const Eigen::LDLT<Eigen::MatrixXd> ldlt(M);
      Eigen::VectorXd delta;
      bool solved = ldlt.info() == Eigen::Success;
      if (solved) {
        delta = ldlt.solve(g);
        solved = delta.allFinite();
      }
      if (solved) {
        Params trial(k);
        for (std::size_t j = 0; j < k; ++j) {
          trial[j] = spec.bounds[j].clamp(theta[j] + delta(static_cast<Eigen::Index>(j)));
        }
        std::vector<double> step(k);
        for (std::size_t j = 0; j < k; ++j) step[j] = trial[j] - theta[j];
        if (norm(step) <= options.step_tolerance * (norm(theta) + options.step_tolerance)) {
          termination = "step";
          converged = true;
          stop = true;
          break;
        }
        if (predict(spec, trial, xs, trial_f)) {
          // rss - trial_rss as sum w (f' - f)(r + r'), free of cancellation near the minimum.
          // Steps whose effect is below the rounding of f itself are taken; only the
          // linear algebra can resolve them.
          simd::subtract(trial_f, f, df);
          simd::subtract(ys, trial_f, trial_r);
          double noise = 0.0;
          for (std::size_t i = 0; i < n; ++i) {
            noise += ws[i] * (std::abs(f[i]) + std::abs(trial_f[i])) * (std::abs(r[i]) + std::abs(trial_r[i]));
            trial_r[i] += r[i];
          }
          noise *= 4.0 * std::numeric_limits<double>::epsilon();
          const double decrease = simd::weighted_dot(df, trial_r, ws);
          if (decrease > -noise) {
            const double trial_rss = simd::weighted_rss(ys, trial_f, ws);
            const double rel = std::max(decrease, 0.0) / rss;
            theta = std::move(trial);
            f.swap(trial_f);
            rss = trial_rss;
            lambda = std::max(lambda / options.lambda_factor, kMinLambda);
            accepted = true;
            small_changes = rel < options.rss_tolerance ? small_changes + 1 : 0;
            if (small_changes >= 2) {
              termination = "rss";
              converged = true;
              stop = true;
            }
            break;
          }
        }
      }
      lambda *= options.lambda_factor;
      if (lambda > kMaxLambda) {
        // No representable step lowers the RSS: a numerical minimum.
        termination = "damping-limit";
        converged = true;
        stop = true;
        break;
      }
    }
    if (stop) {
      if (accepted) ++iter;
      break;
    }
  }

  result.params = std::move(theta);
  result.iterations = iter;
  result.converged = converged;
  result.termination = termination;
  finalize(result, spec, d);
  return result;
}

double r_squared(std::span<const double> y, std::span<const double> yhat, std::span<const double> w) {
  if (y.size() < 2) throw Error("r_squared: need at least two points");
  if (y.size() != yhat.size() || y.size() != w.size()) throw Error("r_squared: size mismatch");
  for (double v : yhat) {
    if (!std::isfinite(v)) return std::numeric_limits<double>::quiet_NaN();
  }
  const double mean = simd::dot(w, y) / simd::sum(w);
  const double tss = simd::weighted_sq_dev(y, mean, w);
  if (!(tss > 0.0)) throw Error("r_squared: total sum of squares is zero (all y identical)");
  return 1.0 - simd::weighted_rss(y, yhat, w) / tss;
}

double r_squared(const ModelSpec& spec, std::span<const double> params, const Dataset& d) {
  std::vector<double> f(d.size());
  for (std::size_t i = 0; i < d.size(); ++i) f[i] = evaluate(spec, params, d.xs()[i]);
  return r_squared(d.ys(), f, d.weights());
}

namespace {

Params perturb(const ModelSpec& spec, const Params& base, const Dataset& d, CounterRng& rng) {
  const auto xs = d.xs();
  const double xmin = *std::min_element(xs.begin(), xs.end());
  const double xmax = *std::max_element(xs.begin(), xs.end());
  const double range = std::max(xmax - xmin, 1e-3);
  const auto ys = d.ys();
  const double ysd = describe(ys).sd;

  Params p = base;
  for (std::size_t j = 0; j < p.size(); ++j) {
    const double v = base[j];
    switch (spec.roles[j]) {
      case ParamRole::Location:
        p[j] = rng.uniform(xmin, xmax);
        break;
      case ParamRole::Width:
        p[j] = (v > 0 ? v : range / 6.0) * std::exp(rng.uniform(-1.5, 1.5));
        break;
      case ParamRole::Rate: {
        const double mag = v != 0.0 ? std::abs(v) : 1.0 / range;
        const double sign = v != 0.0 ? (v > 0 ? 1.0 : -1.0) : (rng.uniform() < 0.5 ? -1.0 : 1.0);
        p[j] = sign * mag * std::exp(rng.uniform(-1.5, 1.5));
        break;
      }
      case ParamRole::Shape:
        p[j] = v * std::exp(rng.uniform(-1.0, 1.0));
        break;
      case ParamRole::Amplitude:
      case ParamRole::Offset:
        p[j] = v * (1.0 + 0.5 * rng.normal()) + 0.1 * ysd * rng.normal();
        break;
      case ParamRole::Coefficient:
        p[j] = v != 0.0 ? v * (1.0 + 0.5 * rng.normal()) : 1e-3 * rng.normal();
        break;
    }
    if (!std::isfinite(p[j])) p[j] = v;
    p[j] = spec.bounds[j].clamp(p[j]);
  }
  return p;
}

bool better(const FitResult& a, const FitResult& b) {
  // NaN/inf rss never wins.
  if (!std::isfinite(a.rss)) return false;
  if (!std::isfinite(b.rss)) return true;
  return a.rss < b.rss;
}

}  // namespace

FitResult multi_start(const ModelSpec& spec, const Dataset& d, std::size_t n_starts, std::uint64_t seed,
                      const FitOptions& options) {
  if (n_starts == 0) throw Error("multi_start: n_starts must be at least 1");
  const Params guess = initial_guess(spec, d);
  std::optional<FitResult> best_converged;
  std::optional<FitResult> best_any;
  for (std::size_t s = 0; s < n_starts; ++s) {
    Params start = guess;
    if (s > 0) {
      CounterRng rng(derive_seed(seed, s));
      start = perturb(spec, guess, d, rng);
    }
    FitResult fr = fit_least_squares(spec, d, start, options);
    if (fr.converged && (!best_converged || better(fr, *best_converged))) best_converged = fr;
    if (!best_any || better(fr, *best_any)) best_any = std::move(fr);
  }
  if (best_converged) return *best_converged;
  return *best_any;
}

std::optional<std::size_t> RankedFits::gold_standard() const {
  if (!entries.empty() && entries.front().plausible) return 0;
  return std::nullopt;
}

namespace {

RankedEntry fit_one(const ModelSpec& spec, const Dataset& d, const PlausibilityConfig& plaus,
                    const RankOptions& options) {
  RankedEntry e;
  e.n_params = spec.n_params();
  e.param_names = spec.param_names;
  e.family_class = std::string(to_string(spec.family_class));
  try {
    e.fit = multi_start(spec, d, options.n_starts, derive_seed(options.seed, fnv1a64(spec.name)), options.fit);
  } catch (const Error& err) {
    e.fit.spec_name = spec.name;
    e.fit.termination = err.what();
    e.plausible = false;
    e.reason = std::string("fit failed: ") + err.what();
    return e;
  }
  if (!e.fit.converged) {
    e.reason = "fit did not converge (" + e.fit.termination + ")";
  } else if (!std::isfinite(e.fit.r2)) {
    e.reason = "r2 undefined";
  } else {
    const auto p = check_plausibility(spec, e.fit.params, plaus);
    e.plausible = p.plausible;
    e.reason = p.reason;
  }
  return e;
}

/// r2 rounded to 12 decimals so that round-off does not break ties.
long long r2_key(double r2) {
  if (!std::isfinite(r2)) return std::numeric_limits<long long>::min();
  return std::llround(std::clamp(r2, -1e6, 1.0) * 1e12);
}

}  // namespace

RankedFits rank_all(std::span<const ModelSpec> specs, const Dataset& d, const PlausibilityConfig& plausibility,
                    const RankOptions& options) {
  if (d.empty()) throw Error("rank_all: empty dataset");
  if (plausibility.domain.empty()) throw Error("rank_all: empty plausibility domain");

  RankedFits out;
  out.dataset_label = d.label();
  out.entries.resize(specs.size());

  unsigned threads = options.threads ? options.threads : std::max(1u, std::thread::hardware_concurrency());
  threads = std::min<unsigned>(threads, static_cast<unsigned>(std::max<std::size_t>(specs.size(), 1)));
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i; (i = next.fetch_add(1)) < specs.size();) {
      out.entries[i] = fit_one(specs[i], d, plausibility, options);
    }
  };
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
  }

  std::stable_sort(out.entries.begin(), out.entries.end(), [](const RankedEntry& a, const RankedEntry& b) {
    if (a.plausible != b.plausible) return a.plausible;
    const auto ka = r2_key(a.fit.r2), kb = r2_key(b.fit.r2);
    if (ka != kb) return ka > kb;
    if (a.n_params != b.n_params) return a.n_params < b.n_params;
    return a.fit.spec_name < b.fit.spec_name;
  });
  return out;
}

}  // namespace msci
