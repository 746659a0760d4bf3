#include "msci/synth.hpp"

#include <cmath>
#include <set>

#include "msci/csv.hpp"
#include "msci/error.hpp"
#include "msci/rng.hpp"
#include "msci/simd.hpp"

namespace msci::synth {

void validate_row(const SummaryRow& row) {
  if (!std::isfinite(row.x)) throw Error("summary row: x is not finite");
  if (row.n == 0) throw Error("summary row at x=" + csv::format_double(row.x) + ": n must be positive");
  if (!(row.mean > 0.0) || !std::isfinite(row.mean)) {
    throw Error("summary row at x=" + csv::format_double(row.x) + ": mean must be positive");
  }
  if (!row.sd && !row.upper_pl95) {
    throw Error("summary row at x=" + csv::format_double(row.x) + ": needs sd or upper_pl95");
  }
  if (row.sd && (!(*row.sd > 0.0) || !std::isfinite(*row.sd))) {
    throw Error("summary row at x=" + csv::format_double(row.x) + ": sd must be positive");
  }
  if (row.upper_pl95 && !(*row.upper_pl95 > row.mean)) {
    throw Error("summary row at x=" + csv::format_double(row.x) + ": upper_pl95 must exceed the mean");
  }
}

double sd_from_upper_pl(double mean, double pl95, double z) {
  if (!(z > 0.0)) throw Error("sd_from_upper_pl: z must be positive");
  if (pl95 < mean) throw Error("sd_from_upper_pl: prediction limit below the mean");
  return (pl95 - mean) / z;
}

LogNormalParams solve_lognormal(double mean, double sd) {
  if (!(mean > 0.0) || !(sd > 0.0)) throw Error("solve_lognormal: mean and sd must be positive");
  const double cv = sd / mean;
  // log1p keeps the small-variance limit accurate.
  const double y2 = std::log1p(cv * cv);
  return {std::log(mean) - 0.5 * y2, std::sqrt(y2)};
}

double lognormal_mean(const LogNormalParams& p) { return std::exp(p.x_log + 0.5 * p.y_log * p.y_log); }

double lognormal_variance(const LogNormalParams& p) {
  const double y2 = p.y_log * p.y_log;
  return std::exp(2.0 * p.x_log + y2) * std::expm1(y2);
}

std::pair<double, double> sampling_targets(const SummaryRow& row, double z) {
  validate_row(row);
  const double sd = row.sd ? *row.sd : sd_from_upper_pl(row.mean, *row.upper_pl95, z);
  if (row.family == Family::Normal) return {row.mean, sd};
  const auto ln = solve_lognormal(row.mean, sd);
  return {ln.x_log, ln.y_log};
}

std::vector<double> reconstruct_row(const SummaryRow& row, std::uint64_t seed, bool moment_correct, double z) {
  const auto [loc, scale] = sampling_targets(row, z);
  if (moment_correct && row.n < 2) throw Error("reconstruct_row: moment correction needs n >= 2");

  CounterRng rng(seed);
  std::vector<double> draws(row.n);
  for (auto& v : draws) v = rng.normal();

  if (moment_correct) {
    const double n = static_cast<double>(row.n);
    const double m = simd::sum(draws) / n;
    const double s = std::sqrt(simd::centered_cross(draws, m, draws, m) / (n - 1.0));
    // Standardize to exact mean 0 / sd 1, then map onto the targets.
    simd::affine(draws, draws, scale / s, loc - scale * m / s);
  } else {
    simd::affine(draws, draws, scale, loc);
  }
  if (row.family == Family::LogNormal) {
    for (auto& v : draws) v = std::exp(v);
  }
  return draws;
}

std::uint64_t replicate_seed(std::uint64_t master_seed, std::size_t index) {
  return derive_seed(master_seed, 0x5245504Cull ^ (static_cast<std::uint64_t>(index) << 32));
}

Dataset reconstruct_dataset(std::span<const SummaryRow> rows, std::uint64_t seed, const Options& options) {
  if (!options.allow_repeated_ages) {
    std::set<double> ages;
    for (const auto& r : rows) {
      if (!ages.insert(r.x).second) {
        throw Error("reconstruct_dataset: age " + csv::format_double(r.x) + " appears more than once");
      }
    }
  }
  std::vector<DataPoint> points;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto values = reconstruct_row(rows[i], derive_seed(seed, i), options.moment_correct, options.z);
    for (double v : values) {
      if (v < 0.0) {
        throw Error("reconstruct_dataset: normal row at x=" + csv::format_double(rows[i].x) +
                    " drew a negative value; consider the lognormal family");
      }
      DataPoint p;
      p.x = rows[i].x;
      p.y = v;
      p.unit = options.unit;
      p.study_id = options.study_id;
      points.push_back(std::move(p));
    }
  }
  return Dataset(std::move(points), options.label);
}

std::vector<Dataset> replicate(std::span<const SummaryRow> rows, std::uint64_t master_seed, std::size_t k,
                               const Options& options) {
  if (k == 0) throw Error("replicate: k must be at least 1");
  std::vector<Dataset> out;
  out.reserve(k);
  for (std::size_t i = 0; i < k; ++i) {
    Options o = options;
    o.label = options.label + "_" + std::to_string(i);
    out.push_back(reconstruct_dataset(rows, replicate_seed(master_seed, i), o));
  }
  return out;
}

std::vector<SummaryRow> read_summary_csv(std::istream& in) {
  const csv::Table t = csv::read(in);
  const auto cx = t.column("x"), cn = t.column("n"), cm = t.column("mean");
  const auto csd = t.column("sd"), cpl = t.column("upper_pl95"), cf = t.column("family");
  if (!cx || !cn || !cm) throw Error("summary csv: header must contain x,n,mean");
  std::vector<SummaryRow> rows;
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    const auto& row = t.rows[r];
    const std::size_t row_no = r + 2;
    auto cell = [&](std::optional<std::size_t> c) -> std::string_view {
      if (!c || *c >= row.size()) return {};
      return csv::trim(row[*c]);
    };
    auto number = [&](std::optional<std::size_t> c, const char* name) -> std::optional<double> {
      const auto text = cell(c);
      if (text.empty()) return std::nullopt;
      const auto v = csv::parse_double(text);
      if (!v) throw RowError(row_no, std::string(name) + " is not numeric");
      return v;
    };
    SummaryRow s;
    const auto x = number(cx, "x");
    if (!x) throw RowError(row_no, "x is required");
    s.x = *x;
    const auto n = csv::parse_int(cell(cn));
    if (!n || *n <= 0) throw RowError(row_no, "n must be a positive integer");
    s.n = static_cast<std::size_t>(*n);
    const auto mean = number(cm, "mean");
    if (!mean) throw RowError(row_no, "mean is required");
    s.mean = *mean;
    s.sd = number(csd, "sd");
    s.upper_pl95 = number(cpl, "upper_pl95");
    const auto fam = cell(cf);
    if (fam.empty() || fam == "normal") {
      s.family = Family::Normal;
    } else if (fam == "lognormal") {
      s.family = Family::LogNormal;
    } else {
      throw RowError(row_no, "family must be normal or lognormal");
    }
    try {
      validate_row(s);
    } catch (const Error& e) {
      throw RowError(row_no, e.what());
    }
    rows.push_back(s);
  }
  return rows;
}

}  // namespace msci::synth
