#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "msci/dataset.hpp"

namespace fixture {

struct StudyRow {
  const char* id;
  const char* author;
  int year;
  std::size_t n;
  double min_age, max_age, median_age;
};

// Study counts and age summaries of the eight histological studies.
inline const std::vector<StudyRow>& histology_studies() {
  static const std::vector<StudyRow> rows{
      {"bendsen2006", "Bendsen", 2006, 11, -0.6, -0.6, -0.6},
      {"baker1963", "Baker", 1963, 11, -0.6, 7.0, -0.2},
      {"forabosco2007", "Forabosco", 2007, 15, -0.5, 0.5, -0.3},
      {"block1953", "Block", 1953, 19, -0.2, 0.0, 0.0},
      {"hansen2008", "Hansen", 2008, 122, 0.1, 51.0, 38.0},
      {"block1951", "Block", 1951, 86, 6.0, 44.0, 28.0},
      {"gougeon1987", "Gougeon", 1987, 52, 25.0, 46.0, 39.5},
      {"richardson1987", "Richardson", 1987, 9, 45.0, 51.0, 46.0},
  };
  return rows;
}

// Ages with exactly the given count, min, max and median.
inline std::vector<double> ages_for(const StudyRow& s) {
  std::vector<double> x;
  const std::size_t half = (s.n - 1) / 2;
  const std::size_t centre = s.n % 2 ? 1 : 2;
  for (std::size_t i = 0; i < half; ++i) {
    x.push_back(s.min_age + (s.median_age - s.min_age) * i / static_cast<double>(half));
  }
  for (std::size_t i = 0; i < centre; ++i) x.push_back(s.median_age);
  const std::size_t upper = s.n - half - centre;
  for (std::size_t i = 1; i <= upper; ++i) {
    x.push_back(s.median_age + (s.max_age - s.median_age) * i / static_cast<double>(upper));
  }
  return x;
}

inline double reserve_model(double age) { return 3.0e5 * std::exp(-0.5 * std::pow((age + 0.6) / 14.0, 2)); }

inline msci::Dataset study_dataset(const StudyRow& s) {
  std::vector<msci::DataPoint> pts;
  for (double x : ages_for(s)) {
    msci::DataPoint p;
    p.x = x;
    p.y = reserve_model(x);
    p.unit = "ngf";
    p.study_id = s.id;
    pts.push_back(p);
  }
  return msci::Dataset(std::move(pts), s.id, {{s.id, {s.author, s.year}}});
}

inline std::vector<msci::Dataset> histology_parts() {
  std::vector<msci::Dataset> parts;
  for (const auto& s : histology_studies()) parts.push_back(study_dataset(s));
  return parts;
}

}  // namespace fixture
