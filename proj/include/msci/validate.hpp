#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "msci/dataset.hpp"
#include "msci/models.hpp"

namespace msci::validate {

struct Split {
  Dataset train;
  Dataset test;
};

/// Random train/test partition. With stratify_bins > 1 the train share is
/// apportioned across equal-width x-bins by largest remainder, so every bin
/// is within one point of fraction * bin size and the total is exact.
Split split(const Dataset& d, double fraction, std::uint64_t seed, std::size_t stratify_bins = 1);

enum class AgreementMetric {
  /// min(r2) / max(r2), defined only when both are positive.
  Ratio,
  /// 1 - |r2_train - r2_test|, clamped to [0, 1].
  AbsoluteDifference,
};

std::optional<double> agreement(double r2_train, double r2_test, AgreementMetric metric = AgreementMetric::Ratio);

struct ValidationReport {
  double r2_train = 0.0;
  double r2_test = 0.0;
  /// nullopt when the metric is undefined (e.g. a non-positive r2).
  std::optional<double> agreement;
  AgreementMetric metric = AgreementMetric::Ratio;
  std::size_t n_train = 0;
  std::size_t n_test = 0;
};

/// Scores already-fitted parameters on both datasets. Nothing is refitted.
ValidationReport holdout_validate(const ModelSpec& spec, std::span<const double> params, const Dataset& train,
                                  const Dataset& test, AgreementMetric metric = AgreementMetric::Ratio);

struct StatDifference {
  std::string statistic;
  double a = 0.0;
  double b = 0.0;
  /// |b - a| / |a|, or |b| when a is zero.
  double relative = 0.0;
  bool within = true;
};

struct SimilarityReport {
  double tolerance = 0.0;
  std::vector<StatDifference> stats;
  bool pass = true;
};

/// Compares count, mean, median, min, max and sd of the y values.
SimilarityReport compare_descriptives(const Dataset& a, const Dataset& b, double tolerance);

}  // namespace msci::validate
