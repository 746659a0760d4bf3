#pragma once

#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

namespace msci {

/// Earliest admissible age in years. Ages before birth are negative.
inline constexpr double kMinAge = -1.0;

/// One observation: age `x` in years and a nonnegative measurement `y`.
struct DataPoint {
  double x = 0.0;
  double y = 0.0;
  std::string unit;
  std::string study_id;
  std::optional<std::string> assay_id;
  double weight = 1.0;

  friend bool operator==(const DataPoint&, const DataPoint&) = default;
};

/// Throws msci::Error if the point violates the DataPoint invariants.
void validate_point(const DataPoint& p);

/// Study descriptor. `first_author` and `year` identify the study; the
/// count and age fields are always derived from the study's points.
struct StudyMeta {
  std::string study_id;
  std::string first_author;
  int year = 0;
  std::size_t n_observations = 0;
  double min_age = 0.0;
  double max_age = 0.0;
  double median_age = 0.0;

  friend bool operator==(const StudyMeta&, const StudyMeta&) = default;
};

/// Bibliographic identity of a study, as read from a study-metadata CSV.
struct StudyInfo {
  std::string first_author;
  int year = 0;

  friend bool operator==(const StudyInfo&, const StudyInfo&) = default;
};

struct Descriptives {
  std::size_t count = 0;
  double min = 0.0;
  double max = 0.0;
  double median = 0.0;
  double mean = 0.0;
  double sd = 0.0;
};

enum class Axis { X, Y };

/// Immutable, validated collection of points with per-study provenance.
/// Column views (xs/ys/weights) are materialized once at construction.
class Dataset {
 public:
  Dataset() = default;
  /// Validates every point. Study metadata is derived from the points;
  /// `info` supplies author/year for studies that have them.
  Dataset(std::vector<DataPoint> points, std::string label, const std::map<std::string, StudyInfo>& info = {});

  const std::vector<DataPoint>& points() const noexcept { return points_; }
  const std::map<std::string, StudyMeta>& studies() const noexcept { return studies_; }
  const std::string& label() const noexcept { return label_; }
  std::size_t size() const noexcept { return points_.size(); }
  bool empty() const noexcept { return points_.empty(); }

  std::span<const double> xs() const noexcept { return xs_; }
  std::span<const double> ys() const noexcept { return ys_; }
  std::span<const double> weights() const noexcept { return weights_; }

  /// author/year for every study, keyed by study id.
  std::map<std::string, StudyInfo> study_info() const;

  /// Same points in a new dataset with a different label.
  Dataset relabel(std::string label) const;
  /// Subset by point index, preserving the given order.
  Dataset subset(std::span<const std::size_t> indices, std::string label) const;
  /// Points with y replaced (x, provenance and weights retained).
  Dataset with_ys(std::span<const double> ys, std::string label) const;

 private:
  std::vector<DataPoint> points_;
  std::map<std::string, StudyMeta> studies_;
  std::string label_;
  std::vector<double> xs_, ys_, weights_;
};

/// Column names used when reading a point CSV.
struct CsvSchema {
  std::string study_id = "study_id";
  std::string x = "x";
  std::string y = "y";
  std::string unit = "unit";
  std::string assay_id = "assay_id";
  std::string weight = "weight";
};

struct IngestOptions {
  CsvSchema schema;
  /// Drop invalid rows (recording diagnostics) instead of aborting.
  bool skip_bad_rows = false;
  std::string label = "dataset";
};

struct IngestResult {
  Dataset dataset;
  /// One message per dropped row; empty unless skip_bad_rows was set.
  std::vector<std::string> rejected;
};

IngestResult ingest_csv(std::istream& in, const IngestOptions& options = {},
                        const std::map<std::string, StudyInfo>& info = {});
/// Reads `study_id,first_author,year`.
std::map<std::string, StudyInfo> read_study_csv(std::istream& in);
/// Writes the point CSV header and one row per point. Re-ingesting the
/// output reproduces the dataset exactly.
void write_csv(std::ostream& out, const Dataset& d);

/// alias label -> (canonical label, factor). Canonical labels always map to
/// themselves with factor 1.
class AliasTable {
 public:
  struct Entry {
    std::string canonical;
    double factor = 1.0;
  };

  void add(const std::string& alias, const std::string& canonical, double factor = 1.0);
  const Entry* find(const std::string& label) const;
  const std::map<std::string, Entry>& entries() const noexcept { return entries_; }

  /// Parses `alias = canonical,factor` lines; `#` starts a comment and the
  /// factor defaults to 1 when omitted.
  static AliasTable parse(std::istream& in);

 private:
  std::map<std::string, Entry> entries_;
};

using UnitTable = AliasTable;

Dataset normalize_units(const Dataset& d, const UnitTable& table);
/// Renames assay ids through a synonym table. Entries with a factor other
/// than 1 are rejected: inter-assay conversion is not a renaming.
Dataset normalize_assays(const Dataset& d, const AliasTable& table);

Dataset merge(std::span<const Dataset> parts, std::string label);
Descriptives describe(const Dataset& d, Axis axis);
Descriptives describe(std::span<const double> values);
std::map<std::string, Dataset> split_by_assay(const Dataset& d);

}  // namespace msci
