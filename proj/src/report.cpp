#include "msci/report.hpp"

#include <cmath>
#include <cstdio>
#include <iomanip>

#include "msci/csv.hpp"
#include "msci/rng.hpp"

namespace msci::report {
namespace {

Json number(double v) {
  if (!std::isfinite(v)) return nullptr;
  return v;
}

Json numbers(std::span<const double> v) {
  Json a = Json::array();
  for (double x : v) a.push_back(number(x));
  return a;
}

Json bound(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return v;
}

std::string_view metric_name(validate::AgreementMetric m) {
  return m == validate::AgreementMetric::Ratio ? "ratio" : "absolute_difference";
}

}  // namespace

Json to_json(const Descriptives& d) {
  return Json{{"count", d.count}, {"min", number(d.min)},   {"max", number(d.max)},
              {"median", number(d.median)}, {"mean", number(d.mean)}, {"sd", number(d.sd)}};
}

Json to_json(const StudyMeta& m) {
  return Json{{"study_id", m.study_id},         {"first_author", m.first_author}, {"year", m.year},
              {"n_observations", m.n_observations}, {"min_age", m.min_age},        {"max_age", m.max_age},
              {"median_age", m.median_age}};
}

Json dataset_summary(const Dataset& d) {
  Json studies = Json::array();
  for (const auto& [id, m] : d.studies()) studies.push_back(to_json(m));
  Json j{{"label", d.label()}, {"n_points", d.size()}, {"studies", std::move(studies)}};
  if (!d.empty()) {
    j["x"] = to_json(describe(d, Axis::X));
    j["y"] = to_json(describe(d, Axis::Y));
  }
  return j;
}

Json to_json(const ModelSpec& spec) {
  Json bounds = Json::array();
  for (std::size_t i = 0; i < spec.n_params(); ++i) {
    bounds.push_back(Json{{"name", spec.param_names[i]}, {"lo", bound(spec.bounds[i].lo)}, {"hi", bound(spec.bounds[i].hi)}});
  }
  return Json{{"name", spec.name},
              {"n_params", spec.n_params()},
              {"family_class", to_string(spec.family_class)},
              {"formula", spec.formula},
              {"bounds", std::move(bounds)}};
}

Json catalog_json(const Catalog& c) {
  Json a = Json::array();
  for (const auto& s : c.specs()) a.push_back(to_json(s));
  return a;
}

Json to_json(const FitResult& f, std::span<const std::string> param_names) {
  Json params = Json::object();
  for (std::size_t i = 0; i < f.params.size(); ++i) {
    const std::string name = i < param_names.size() ? param_names[i] : "p" + std::to_string(i);
    params[name] = number(f.params[i]);
  }
  return Json{{"model", f.spec_name},
              {"params", std::move(params)},
              {"rss", number(f.rss)},
              {"r2", number(f.r2)},
              {"converged", f.converged},
              {"iterations", f.iterations},
              {"termination", f.termination}};
}

Json to_json(const RankedFits& r) {
  Json entries = Json::array();
  std::size_t rank = 0;
  for (const auto& e : r.entries) {
    Json j = to_json(e.fit, e.param_names);
    j["rank"] = ++rank;
    j["n_params"] = e.n_params;
    j["family_class"] = e.family_class;
    j["plausible"] = e.plausible;
    j["reason"] = e.reason;
    entries.push_back(std::move(j));
  }
  const auto gold = r.gold_standard();
  return Json{{"dataset", r.dataset_label},
              {"gold_standard", gold ? Json(r.entries[*gold].fit.spec_name) : Json(nullptr)},
              {"entries", std::move(entries)}};
}

Json to_json(const PlausibilityConfig& c) {
  return Json{{"domain", Json::array({c.domain.lo, c.domain.hi})},
              {"require_nonnegative", c.require_nonnegative},
              {"require_finite", c.require_finite},
              {"max_sign_changes_of_derivative",
               c.max_sign_changes_of_derivative ? Json(*c.max_sign_changes_of_derivative) : Json(nullptr)},
              {"grid", c.grid}};
}

Json to_json(const validate::ValidationReport& v) {
  return Json{{"r2_train", number(v.r2_train)},
              {"r2_test", number(v.r2_test)},
              {"agreement", v.agreement ? number(*v.agreement) : Json(nullptr)},
              {"agreement_defined", v.agreement.has_value()},
              {"metric", metric_name(v.metric)},
              {"n_train", v.n_train},
              {"n_test", v.n_test}};
}

Json to_json(const validate::SimilarityReport& s) {
  Json stats = Json::array();
  for (const auto& d : s.stats) {
    stats.push_back(Json{{"statistic", d.statistic},
                         {"a", number(d.a)},
                         {"b", number(d.b)},
                         {"relative_difference", number(d.relative)},
                         {"within_tolerance", d.within}});
  }
  return Json{{"tolerance", s.tolerance}, {"pass", s.pass}, {"statistics", std::move(stats)}};
}

Json to_json(const analyze::CorrelationReport& c) {
  return Json{{"r", number(c.r)},
              {"age_range", Json::array({c.age_range.lo, c.age_range.hi})},
              {"grid_size", c.grid_size},
              {"transform_a", analyze::to_string(c.transform_a)},
              {"transform_b", analyze::to_string(c.transform_b)}};
}

Json to_json(const analyze::IntervalBand& b) {
  return Json{{"level", b.level},
              {"residual_sd", number(b.residual_sd)},
              {"half_width", number(b.half_width)},
              {"assumption", "homoscedastic normal residuals (constant width)"},
              {"x", numbers(b.x)},
              {"lower", numbers(b.lower)},
              {"fit", numbers(b.fit)},
              {"upper", numbers(b.upper)}};
}

Json to_json(const analyze::Peak& p) {
  return Json{{"x", number(p.x)}, {"value", number(p.value)}, {"plateau", p.plateau}};
}

std::string digest(std::string_view bytes) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a64(bytes)));
  return buf;
}

Json envelope(const std::string& command, std::uint64_t seed, const std::vector<InputDigest>& inputs, Json result) {
  Json in = Json::array();
  for (const auto& i : inputs) in.push_back(Json{{"role", i.role}, {"path", i.path}, {"fnv1a64", i.fnv1a64}});
  return Json{{"tool", kToolName},
              {"version", kToolVersion},
              {"command", command},
              {"seed", seed},
              {"inputs", std::move(in)},
              {"result", std::move(result)}};
}

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

void write_leaderboard(std::ostream& out, const RankedFits& r) {
  const auto gold = r.gold_standard();
  out << "dataset: " << r.dataset_label << "\n";
  out << "gold standard: " << (gold ? r.entries[*gold].fit.spec_name : std::string("none")) << "\n\n";
  out << std::left << std::setw(5) << "rank" << std::setw(28) << "model" << std::setw(13) << "class" << std::right
      << std::setw(3) << "k" << std::setw(14) << "r2" << std::setw(11) << "plausible" << "  reason\n";
  std::size_t rank = 0;
  for (const auto& e : r.entries) {
    char r2[32];
    if (std::isfinite(e.fit.r2)) {
      std::snprintf(r2, sizeof r2, "%.8f", e.fit.r2);
    } else {
      std::snprintf(r2, sizeof r2, "-");
    }
    out << std::left << std::setw(5) << ++rank << std::setw(28) << e.fit.spec_name << std::setw(13)
        << e.family_class << std::right << std::setw(3) << e.n_params << std::setw(14) << r2 << std::setw(11)
        << (e.plausible ? "yes" : "no") << "  " << e.reason << "\n";
  }
}

void write_similarity(std::ostream& out, const validate::SimilarityReport& s) {
  out << std::left << std::setw(10) << "statistic" << std::right << std::setw(16) << "a" << std::setw(16) << "b"
      << std::setw(12) << "rel.diff" << "  ok\n";
  for (const auto& d : s.stats) {
    char a[32], b[32], rel[32];
    std::snprintf(a, sizeof a, "%.6g", d.a);
    std::snprintf(b, sizeof b, "%.6g", d.b);
    std::snprintf(rel, sizeof rel, "%.4g", d.relative);
    out << std::left << std::setw(10) << d.statistic << std::right << std::setw(16) << a << std::setw(16) << b
        << std::setw(12) << rel << "  " << (d.within ? "yes" : "no") << "\n";
  }
  out << "tolerance " << s.tolerance << ": " << (s.pass ? "PASS" : "FAIL") << "\n";
}

void write_band_csv(std::ostream& out, const analyze::IntervalBand& b) {
  csv::write_row(out, {"x", "lower", "fit", "upper"});
  for (std::size_t i = 0; i < b.x.size(); ++i) {
    csv::write_row(out, {csv::format_double(b.x[i]), csv::format_double(b.lower[i]), csv::format_double(b.fit[i]),
                         csv::format_double(b.upper[i])});
  }
}

}  // namespace msci::report
