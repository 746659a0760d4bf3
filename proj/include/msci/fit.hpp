#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "msci/dataset.hpp"
#include "msci/models.hpp"

namespace msci {

struct FitOptions {
  int max_iterations = 200;
  /// Stop when two consecutive accepted steps each lower the RSS by less than this fraction.
  double rss_tolerance = 1e-10;
  /// Stop when |step| <= step_tolerance * (|params| + step_tolerance).
  double step_tolerance = 1e-10;
  double initial_lambda = 1e-3;
  double lambda_factor = 10.0;
};

struct FitResult {
  std::string spec_name;
  Params params;
  /// Weighted residual sum of squares; +inf when the fit failed outright.
  double rss = kInf;
  /// 1 - rss/tss on the fitted data; NaN when undefined.
  double r2 = std::numeric_limits<double>::quiet_NaN();
  bool converged = false;
  int iterations = 0;
  /// "rss", "step", "exact", "max-iterations", "damping-limit" or an error message.
  std::string termination;
  /// y_i - f(x_i), one per point.
  std::vector<double> residuals;
};

/// Damped Gauss-Newton (Levenberg-Marquardt) minimization of
/// sum_i w_i (y_i - f(theta, x_i))^2 with bound projection.
FitResult fit_least_squares(const ModelSpec& spec, const Dataset& d, std::span<const double> start,
                            const FitOptions& options = {});

/// Weighted coefficient of determination; weights default to the dataset's.
/// Throws when the total sum of squares is zero. NaN if the model is
/// non-finite at any point.
double r_squared(const ModelSpec& spec, std::span<const double> params, const Dataset& d);
double r_squared(std::span<const double> y, std::span<const double> yhat, std::span<const double> w);

/// Fits from the heuristic start plus n_starts-1 seeded perturbations and
/// keeps the lowest-RSS converged result.
FitResult multi_start(const ModelSpec& spec, const Dataset& d, std::size_t n_starts, std::uint64_t seed,
                      const FitOptions& options = {});

struct RankedEntry {
  FitResult fit;
  std::size_t n_params = 0;
  std::vector<std::string> param_names;
  std::string family_class;
  bool plausible = false;
  std::string reason;
};

struct RankedFits {
  std::string dataset_label;
  /// Plausible entries first (r2 descending, then fewer parameters, then
  /// name), followed by every other entry in the same order.
  std::vector<RankedEntry> entries;

  /// Index 0 when it is plausible; nullopt means there is no gold standard.
  std::optional<std::size_t> gold_standard() const;
};

struct RankOptions {
  std::size_t n_starts = 8;
  std::uint64_t seed = 0;
  FitOptions fit;
  /// Worker threads; 0 picks the hardware concurrency.
  unsigned threads = 0;
};

RankedFits rank_all(std::span<const ModelSpec> specs, const Dataset& d, const PlausibilityConfig& plausibility,
                    const RankOptions& options = {});

}  // namespace msci
