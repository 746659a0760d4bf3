#pragma once

#include <cstdint>
#include <istream>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "msci/dataset.hpp"

namespace msci::synth {

enum class Family { Normal, LogNormal };

/// Published statistics for one age: subject count, mean, and either a
/// standard deviation or an upper 95% prediction limit.
struct SummaryRow {
  double x = 0.0;
  std::size_t n = 0;
  double mean = 0.0;
  std::optional<double> sd;
  std::optional<double> upper_pl95;
  Family family = Family::Normal;
};

void validate_row(const SummaryRow& row);

/// Location and scale of the underlying normal: X = exp(N(x_log, y_log^2)).
struct LogNormalParams {
  double x_log = 0.0;
  double y_log = 0.0;
};

/// z-multipliers for an upper 95% prediction limit.
inline constexpr double kZOneSided95 = 1.6448536269514722;
inline constexpr double kZTwoSided95 = 1.959963984540054;

/// (pl95 - mean) / z.
double sd_from_upper_pl(double mean, double pl95, double z = kZOneSided95);

/// Closed-form moment matching: y^2 = ln(1 + sd^2/mean^2), x = ln(mean) - y^2/2.
LogNormalParams solve_lognormal(double mean, double sd);

/// Mean of the lognormal, e^{x + y^2/2}.
double lognormal_mean(const LogNormalParams& p);
/// Variance of the lognormal, e^{2x + y^2}(e^{y^2} - 1).
double lognormal_variance(const LogNormalParams& p);

struct Options {
  /// Multiplier used when a row has only an upper prediction limit.
  double z = kZOneSided95;
  /// Shift and rescale the standard-normal draws so the sample mean and sd
  /// hit their targets exactly (on the log scale for LogNormal rows).
  bool moment_correct = false;
  bool allow_repeated_ages = false;
  std::string study_id = "synthetic";
  std::string unit;
  std::string label = "synthetic";
};

/// Target mean and sd of a row on its sampling scale: (mean, sd) for
/// Normal, (x_log, y_log) for LogNormal.
std::pair<double, double> sampling_targets(const SummaryRow& row, double z);

std::vector<double> reconstruct_row(const SummaryRow& row, std::uint64_t seed, bool moment_correct,
                                    double z = kZOneSided95);

Dataset reconstruct_dataset(std::span<const SummaryRow> rows, std::uint64_t seed, const Options& options = {});

/// k datasets; dataset i uses derive_seed(master_seed, i).
std::vector<Dataset> replicate(std::span<const SummaryRow> rows, std::uint64_t master_seed, std::size_t k,
                               const Options& options = {});
std::uint64_t replicate_seed(std::uint64_t master_seed, std::size_t index);

/// Reads `x,n,mean,sd,upper_pl95,family` with empty cells for absent optionals.
std::vector<SummaryRow> read_summary_csv(std::istream& in);

}  // namespace msci::synth
