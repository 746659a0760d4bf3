#include "msci/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include "msci/csv.hpp"
#include "msci/error.hpp"
#include "msci/simd.hpp"

namespace msci {

void validate_point(const DataPoint& p) {
  if (!std::isfinite(p.x)) throw Error("x is not finite");
  if (!std::isfinite(p.y)) throw Error("y is not finite");
  if (p.x < kMinAge) throw Error("x = " + csv::format_double(p.x) + " precedes the age floor -1");
  if (p.y < 0.0) throw Error("y = " + csv::format_double(p.y) + " is negative");
  if (!(p.weight > 0.0) || !std::isfinite(p.weight)) throw Error("weight must be positive and finite");
  if (p.study_id.empty()) throw Error("missing study_id");
}

namespace {

double median_of_sorted(const std::vector<double>& v) {
  const std::size_t n = v.size();
  return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

}  // namespace

Dataset::Dataset(std::vector<DataPoint> points, std::string label, const std::map<std::string, StudyInfo>& info)
    : points_(std::move(points)), label_(std::move(label)) {
  std::map<std::string, std::vector<double>> ages;
  xs_.reserve(points_.size());
  ys_.reserve(points_.size());
  weights_.reserve(points_.size());
  for (std::size_t i = 0; i < points_.size(); ++i) {
    const auto& p = points_[i];
    try {
      validate_point(p);
    } catch (const Error& e) {
      throw Error("point " + std::to_string(i) + ": " + e.what());
    }
    ages[p.study_id].push_back(p.x);
    xs_.push_back(p.x);
    ys_.push_back(p.y);
    weights_.push_back(p.weight);
  }
  for (auto& [id, v] : ages) {
    std::sort(v.begin(), v.end());
    StudyMeta m;
    m.study_id = id;
    if (auto it = info.find(id); it != info.end()) {
      m.first_author = it->second.first_author;
      m.year = it->second.year;
    }
    m.n_observations = v.size();
    m.min_age = v.front();
    m.max_age = v.back();
    m.median_age = median_of_sorted(v);
    studies_.emplace(id, std::move(m));
  }
}

std::map<std::string, StudyInfo> Dataset::study_info() const {
  std::map<std::string, StudyInfo> out;
  for (const auto& [id, m] : studies_) out.emplace(id, StudyInfo{m.first_author, m.year});
  return out;
}

Dataset Dataset::relabel(std::string label) const {
  Dataset copy = *this;
  copy.label_ = std::move(label);
  return copy;
}

Dataset Dataset::subset(std::span<const std::size_t> indices, std::string label) const {
  std::vector<DataPoint> pts;
  pts.reserve(indices.size());
  for (std::size_t i : indices) pts.push_back(points_.at(i));
  return Dataset(std::move(pts), std::move(label), study_info());
}

Dataset Dataset::with_ys(std::span<const double> ys, std::string label) const {
  if (ys.size() != points_.size()) throw Error("with_ys: size mismatch");
  std::vector<DataPoint> pts = points_;
  for (std::size_t i = 0; i < pts.size(); ++i) pts[i].y = ys[i];
  return Dataset(std::move(pts), std::move(label), study_info());
}

// ---------------------------------------------------------------------------
// CSV

IngestResult ingest_csv(std::istream& in, const IngestOptions& options, const std::map<std::string, StudyInfo>& info) {
  const csv::Table table = csv::read(in);
  const auto& s = options.schema;
  const auto col_study = table.column(s.study_id);
  const auto col_x = table.column(s.x);
  const auto col_y = table.column(s.y);
  for (const auto& [col, name] : {std::pair{col_study, s.study_id}, {col_x, s.x}, {col_y, s.y}}) {
    if (!col) throw Error("csv: missing required column '" + name + "'");
  }
  const auto col_unit = table.column(s.unit);
  const auto col_assay = table.column(s.assay_id);
  const auto col_weight = table.column(s.weight);

  IngestResult result;
  std::vector<DataPoint> points;
  points.reserve(table.rows.size());
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const auto& row = table.rows[r];
    const std::size_t row_no = r + 2;
    auto cell = [&](std::optional<std::size_t> c) -> std::string_view {
      if (!c || *c >= row.size()) return {};
      return csv::trim(row[*c]);
    };
    try {
      DataPoint p;
      p.study_id = std::string(cell(col_study));
      const auto x = csv::parse_double(cell(col_x));
      if (!x) throw RowError(row_no, "x is not numeric: '" + std::string(cell(col_x)) + "'");
      const auto y = csv::parse_double(cell(col_y));
      if (!y) throw RowError(row_no, "y is not numeric: '" + std::string(cell(col_y)) + "'");
      p.x = *x;
      p.y = *y;
      p.unit = std::string(cell(col_unit));
      if (auto a = cell(col_assay); !a.empty()) p.assay_id = std::string(a);
      if (auto w = cell(col_weight); !w.empty()) {
        const auto wv = csv::parse_double(w);
        if (!wv) throw RowError(row_no, "weight is not numeric: '" + std::string(w) + "'");
        p.weight = *wv;
      }
      try {
        validate_point(p);
      } catch (const RowError&) {
        throw;
      } catch (const Error& e) {
        throw RowError(row_no, e.what());
      }
      points.push_back(std::move(p));
    } catch (const RowError& e) {
      if (!options.skip_bad_rows) throw;
      result.rejected.emplace_back(e.what());
    }
  }
  if (points.empty() && result.rejected.empty()) throw Error("csv: no data rows");
  result.dataset = Dataset(std::move(points), options.label, info);
  return result;
}

std::map<std::string, StudyInfo> read_study_csv(std::istream& in) {
  const csv::Table table = csv::read(in);
  const auto col_id = table.column("study_id");
  const auto col_author = table.column("first_author");
  const auto col_year = table.column("year");
  if (!col_id || !col_author || !col_year) {
    throw Error("study csv: header must contain study_id,first_author,year");
  }
  std::map<std::string, StudyInfo> out;
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const auto& row = table.rows[r];
    auto cell = [&](std::size_t c) { return c < row.size() ? csv::trim(row[c]) : std::string_view{}; };
    const std::string id(cell(*col_id));
    if (id.empty()) throw RowError(r + 2, "missing study_id");
    const auto year = csv::parse_int(cell(*col_year));
    if (!year) throw RowError(r + 2, "year is not an integer");
    StudyInfo info{std::string(cell(*col_author)), static_cast<int>(*year)};
    if (auto [it, inserted] = out.emplace(id, info); !inserted && it->second != info) {
      throw RowError(r + 2, "study '" + id + "' listed twice with different metadata");
    }
  }
  return out;
}

void write_csv(std::ostream& out, const Dataset& d) {
  csv::write_row(out, {"study_id", "x", "y", "unit", "assay_id", "weight"});
  for (const auto& p : d.points()) {
    csv::write_row(out, {p.study_id, csv::format_double(p.x), csv::format_double(p.y), p.unit,
                         p.assay_id.value_or(""), csv::format_double(p.weight)});
  }
}

// ---------------------------------------------------------------------------
// Label normalization

void AliasTable::add(const std::string& alias, const std::string& canonical, double factor) {
  if (!(factor > 0.0) || !std::isfinite(factor)) {
    throw Error("alias table: factor for '" + alias + "' must be positive");
  }
  if (auto it = entries_.find(canonical); it != entries_.end() && it->second.canonical != canonical) {
    throw Error("alias table: '" + canonical + "' is used both as alias and canonical label");
  }
  if (auto it = entries_.find(alias); it != entries_.end()) {
    const bool same = it->second.canonical == canonical && it->second.factor == factor;
    const bool self = alias == canonical && factor == 1.0 && it->second.canonical == alias;
    if (!same && !self) throw Error("alias table: conflicting entries for '" + alias + "'");
    return;
  }
  if (alias == canonical && factor != 1.0) {
    throw Error("alias table: canonical label '" + canonical + "' must have factor 1");
  }
  entries_.emplace(alias, Entry{canonical, factor});
  entries_.emplace(canonical, Entry{canonical, 1.0});
}

const AliasTable::Entry* AliasTable::find(const std::string& label) const {
  auto it = entries_.find(label);
  return it == entries_.end() ? nullptr : &it->second;
}

AliasTable AliasTable::parse(std::istream& in) {
  AliasTable t;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    const std::string_view body = csv::trim(line);
    if (body.empty()) continue;
    const auto eq = body.find('=');
    if (eq == std::string_view::npos) {
      throw Error("alias table line " + std::to_string(line_no) + ": expected 'alias = canonical,factor'");
    }
    const std::string alias(csv::trim(body.substr(0, eq)));
    std::string_view rhs = csv::trim(body.substr(eq + 1));
    double factor = 1.0;
    std::string canonical;
    if (auto comma = rhs.rfind(','); comma != std::string_view::npos) {
      const auto f = csv::parse_double(rhs.substr(comma + 1));
      if (!f) throw Error("alias table line " + std::to_string(line_no) + ": factor is not numeric");
      factor = *f;
      canonical = std::string(csv::trim(rhs.substr(0, comma)));
    } else {
      canonical = std::string(rhs);
    }
    if (alias.empty() || canonical.empty()) {
      throw Error("alias table line " + std::to_string(line_no) + ": empty label");
    }
    t.add(alias, canonical, factor);
  }
  return t;
}

Dataset normalize_units(const Dataset& d, const UnitTable& table) {
  std::vector<DataPoint> pts = d.points();
  for (auto& p : pts) {
    const auto* e = table.find(p.unit);
    if (!e) throw Error("unknown unit label '" + p.unit + "'");
    p.unit = e->canonical;
    p.y *= e->factor;
  }
  return Dataset(std::move(pts), d.label(), d.study_info());
}

Dataset normalize_assays(const Dataset& d, const AliasTable& table) {
  std::vector<DataPoint> pts = d.points();
  for (auto& p : pts) {
    if (!p.assay_id) continue;
    const auto* e = table.find(*p.assay_id);
    if (!e) continue;
    if (e->factor != 1.0) {
      throw Error("assay alias '" + *p.assay_id + "' carries a conversion factor; assays are only renamed");
    }
    p.assay_id = e->canonical;
  }
  return Dataset(std::move(pts), d.label(), d.study_info());
}

// ---------------------------------------------------------------------------
// Combining and summarizing

Dataset merge(std::span<const Dataset> parts, std::string label) {
  std::vector<DataPoint> pts;
  std::map<std::string, StudyInfo> info;
  std::size_t total = 0;
  for (const auto& d : parts) total += d.size();
  pts.reserve(total);
  for (const auto& d : parts) {
    for (const auto& [id, m] : d.studies()) {
      const StudyInfo si{m.first_author, m.year};
      const bool known = !si.first_author.empty() || si.year != 0;
      auto it = info.find(id);
      if (it == info.end()) {
        info.emplace(id, si);
        continue;
      }
      const bool other_known = !it->second.first_author.empty() || it->second.year != 0;
      if (known && other_known && it->second != si) {
        throw Error("merge: study '" + id + "' has conflicting metadata (" + it->second.first_author + " " +
                    std::to_string(it->second.year) + " vs " + si.first_author + " " + std::to_string(si.year) + ")");
      }
      if (known) it->second = si;
    }
    pts.insert(pts.end(), d.points().begin(), d.points().end());
  }
  return Dataset(std::move(pts), std::move(label), info);
}

Descriptives describe(std::span<const double> values) {
  if (values.empty()) throw Error("describe: empty dataset");
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  Descriptives out;
  out.count = sorted.size();
  out.min = sorted.front();
  out.max = sorted.back();
  out.median = median_of_sorted(sorted);
  const double n = static_cast<double>(out.count);
  out.mean = simd::sum(values) / n;
  if (out.count > 1) {
    const double ss = simd::centered_cross(values, out.mean, values, out.mean);
    out.sd = std::sqrt(ss / (n - 1.0));
  }
  return out;
}

Descriptives describe(const Dataset& d, Axis axis) {
  if (d.empty()) throw Error("describe: empty dataset");
  return describe(axis == Axis::X ? d.xs() : d.ys());
}

std::map<std::string, Dataset> split_by_assay(const Dataset& d) {
  std::set<std::string> missing;
  std::map<std::string, std::vector<std::size_t>> groups;
  for (std::size_t i = 0; i < d.size(); ++i) {
    const auto& p = d.points()[i];
    if (!p.assay_id || p.assay_id->empty()) {
      missing.insert(p.study_id);
    } else {
      groups[*p.assay_id].push_back(i);
    }
  }
  if (!missing.empty()) {
    std::string list;
    for (const auto& s : missing) list += (list.empty() ? "" : ", ") + s;
    throw Error("split_by_assay: points without assay_id in studies: " + list);
  }
  std::map<std::string, Dataset> out;
  for (const auto& [assay, idx] : groups) out.emplace(assay, d.subset(idx, d.label() + "/" + assay));
  return out;
}

}  // namespace msci
