#include "msci/cli.hpp"

#include <filesystem>
#include <fstream>
#include <iostream>
#include <iterator>
#include <sstream>

#include <CLI11.hpp>

#include "msci/analyze.hpp"
#include "msci/csv.hpp"
#include "msci/dataset.hpp"
#include "msci/error.hpp"
#include "msci/fit.hpp"
#include "msci/models.hpp"
#include "msci/plot.hpp"
#include "msci/report.hpp"
#include "msci/rng.hpp"
#include "msci/synth.hpp"
#include "msci/validate.hpp"

namespace msci::cli {
namespace {

namespace fs = std::filesystem;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct DataArgs {
  std::vector<std::string> paths;
  std::string studies;
  std::string units;
  std::string assays;
  bool skip_bad_rows = false;
  std::string label;
};

struct PlausArgs {
  bool nonnegative = false;
  std::string domain = "0:60";
  int max_sign_changes = -1;
  std::size_t grid = 512;
};

struct Args {
  std::uint64_t seed = 0;
  std::string out_dir;
  bool json = false;

  DataArgs data;
  PlausArgs plaus;

  // ingest / describe
  std::string csv_out;
  bool by_assay = false;

  // synth
  std::string summary;
  std::size_t replicates = 1;
  std::string z = "one-sided";
  bool moment_correct = false;
  bool allow_repeated_ages = false;
  std::string study_id = "synthetic";
  std::string unit;

  // fitting
  std::string model;
  std::string models = "all";
  std::size_t starts = 8;
  unsigned threads = 0;

  // validate
  std::string train, test;
  double fraction = 0.5;
  std::size_t stratify = 1;
  std::string metric = "ratio";
  double tolerance = 0.1;

  // analyze
  std::string range;
  std::vector<double> ages;
  std::string reference = "peak";
  double level = 0.95;
  std::size_t band_grid = 256;
  std::string band_csv;
  std::string with_data;
  std::string with_model;
  std::string transform_a = "value";
  std::string transform_b = "value";

  // plot
  bool band = false;
  std::string svg_out;
  std::string title;
  std::string x_label = "age (years)";
  std::string y_label = "value";
};

Interval parse_interval(const std::string& text, const char* flag) {
  const auto colon = text.find(':');
  if (colon == std::string::npos) throw UsageError(std::string(flag) + ": expected lo:hi, got '" + text + "'");
  const auto lo = csv::parse_double(text.substr(0, colon));
  const auto hi = csv::parse_double(text.substr(colon + 1));
  if (!lo || !hi || !(*lo < *hi)) throw UsageError(std::string(flag) + ": expected lo:hi with lo < hi, got '" + text + "'");
  return {*lo, *hi};
}

class Inputs {
 public:
  std::string load(const std::string& role, const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot read " + role + " file '" + path + "'");
    std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    digests_.push_back({role, path, report::digest(bytes)});
    return bytes;
  }
  const std::vector<report::InputDigest>& digests() const { return digests_; }

 private:
  std::vector<report::InputDigest> digests_;
};

struct Loaded {
  Dataset dataset;
  std::vector<std::string> rejected;
};

Loaded load_dataset(Inputs& inputs, const DataArgs& a) {
  if (a.paths.empty()) throw UsageError("--data is required");
  std::map<std::string, StudyInfo> info;
  if (!a.studies.empty()) {
    std::istringstream in(inputs.load("studies", a.studies));
    info = read_study_csv(in);
  }
  Loaded out;
  std::vector<Dataset> parts;
  for (const auto& path : a.paths) {
    std::istringstream in(inputs.load("data", path));
    IngestOptions opts;
    opts.skip_bad_rows = a.skip_bad_rows;
    opts.label = fs::path(path).stem().string();
    auto r = ingest_csv(in, opts, info);
    for (auto& msg : r.rejected) out.rejected.push_back(path + ": " + msg);
    parts.push_back(std::move(r.dataset));
  }
  std::string label = a.label;
  if (label.empty()) label = parts.size() == 1 ? parts.front().label() : "merged";
  Dataset d = parts.size() == 1 ? parts.front().relabel(label) : merge(parts, label);
  if (!a.units.empty()) {
    std::istringstream in(inputs.load("units", a.units));
    d = normalize_units(d, UnitTable::parse(in));
  }
  if (!a.assays.empty()) {
    std::istringstream in(inputs.load("assays", a.assays));
    d = normalize_assays(d, AliasTable::parse(in));
  }
  out.dataset = std::move(d);
  return out;
}

Dataset load_single(Inputs& inputs, const std::string& role, const std::string& path) {
  std::istringstream in(inputs.load(role, path));
  IngestOptions opts;
  opts.label = fs::path(path).stem().string();
  return ingest_csv(in, opts).dataset;
}

PlausibilityConfig plausibility(const PlausArgs& a) {
  PlausibilityConfig c;
  c.domain = parse_interval(a.domain, "--domain");
  c.require_nonnegative = a.nonnegative;
  if (a.max_sign_changes >= 0) c.max_sign_changes_of_derivative = static_cast<std::size_t>(a.max_sign_changes);
  c.grid = a.grid;
  return c;
}

const ModelSpec& find_model(const std::string& name) {
  const ModelSpec* spec = catalog().find(name);
  if (!spec) throw UsageError("unknown model '" + name + "'");
  return *spec;
}

/// Same seed derivation as rank_all, so a single fit reproduces its leaderboard row.
FitResult fit_model(const ModelSpec& spec, const Dataset& d, const Args& a) {
  return multi_start(spec, d, a.starts, derive_seed(a.seed, fnv1a64(spec.name)));
}

void write_file(const fs::path& path, std::string_view content) {
  if (path.has_parent_path()) {
    std::error_code ec;
    fs::create_directories(path.parent_path(), ec);
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error("cannot write '" + path.string() + "'");
  f << content;
  f.flush();
  if (!f) throw Error("failed writing '" + path.string() + "'");
}

std::string fmt(double v, int digits = 6) {
  if (!std::isfinite(v)) return "-";
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.*g", digits, v);
  return buf;
}

class Emitter {
 public:
  Emitter(const Args& a, Inputs& inputs, std::ostream& out) : a_(a), inputs_(inputs), out_(out) {}

  void emit(const std::string& command, Json result, const std::string& text) {
    const std::string json = report::dump(report::envelope(command, a_.seed, inputs_.digests(), std::move(result)));
    if (!a_.out_dir.empty()) {
      write_file(fs::path(a_.out_dir) / (command + ".json"), json);
      write_file(fs::path(a_.out_dir) / (command + ".txt"), text);
    }
    out_ << (a_.json ? json : text);
  }

 private:
  const Args& a_;
  Inputs& inputs_;
  std::ostream& out_;
};

void add_data_options(CLI::App* sub, DataArgs& d, bool required = true) {
  auto* opt = sub->add_option("--data", d.paths, "Point CSV file(s); several files are merged");
  if (required) opt->required();
  sub->add_option("--studies", d.studies, "Study metadata CSV (study_id,first_author,year)");
  sub->add_option("--units", d.units, "Unit alias table (alias = canonical,factor)");
  sub->add_option("--assays", d.assays, "Assay synonym table");
  sub->add_flag("--skip-bad-rows", d.skip_bad_rows, "Drop invalid rows instead of aborting");
  sub->add_option("--label", d.label, "Dataset label");
}

void add_plausibility_options(CLI::App* sub, PlausArgs& p) {
  sub->add_flag("--nonnegative", p.nonnegative, "Reject models that go negative on the domain");
  sub->add_option("--domain", p.domain, "Plausibility domain lo:hi")->capture_default_str();
  sub->add_option("--max-sign-changes", p.max_sign_changes, "Maximum sign changes of dy/dx on the domain");
  sub->add_option("--plausibility-grid", p.grid, "Grid size of the plausibility scan")->capture_default_str();
}

// ---- subcommands -------------------------------------------------------

void cmd_ingest(const Args& a, Inputs& inputs, Emitter& em) {
  auto loaded = load_dataset(inputs, a.data);
  const Dataset& d = loaded.dataset;
  if (!a.csv_out.empty()) {
    std::ostringstream s;
    write_csv(s, d);
    write_file(a.csv_out, s.str());
  }
  Json result = report::dataset_summary(d);
  result["rejected"] = loaded.rejected;
  result["output"] = a.csv_out.empty() ? Json(nullptr) : Json(a.csv_out);

  std::ostringstream t;
  t << "ingested " << d.size() << " points from " << d.studies().size() << " studies into '" << d.label() << "'\n";
  for (const auto& r : loaded.rejected) t << "rejected " << r << "\n";
  if (!a.csv_out.empty()) t << "wrote " << a.csv_out << "\n";
  em.emit("ingest", std::move(result), t.str());
}

void describe_text(std::ostream& t, const Dataset& d) {
  t << d.label() << ": " << d.size() << " points, " << d.studies().size() << " studies\n";
  if (d.empty()) return;
  t << "      " << std::string(4, ' ') << "count         min         max      median        mean          sd\n";
  for (Axis axis : {Axis::X, Axis::Y}) {
    const auto s = describe(d, axis);
    char line[160];
    std::snprintf(line, sizeof line, "  %c   %9zu %11s %11s %11s %11s %11s\n", axis == Axis::X ? 'x' : 'y', s.count,
                  fmt(s.min).c_str(), fmt(s.max).c_str(), fmt(s.median).c_str(), fmt(s.mean).c_str(),
                  fmt(s.sd).c_str());
    t << line;
  }
  for (const auto& [id, m] : d.studies()) {
    t << "  study " << id;
    if (!m.first_author.empty()) t << " (" << m.first_author << " " << m.year << ")";
    t << ": n=" << m.n_observations << ", ages " << fmt(m.min_age) << " to " << fmt(m.max_age) << ", median "
      << fmt(m.median_age) << "\n";
  }
}

void cmd_describe(const Args& a, Inputs& inputs, Emitter& em) {
  auto loaded = load_dataset(inputs, a.data);
  const Dataset& d = loaded.dataset;
  Json result = report::dataset_summary(d);
  std::ostringstream t;
  describe_text(t, d);
  if (a.by_assay) {
    Json parts = Json::object();
    for (const auto& [assay, part] : split_by_assay(d)) {
      parts[assay] = report::dataset_summary(part);
      t << "\n";
      describe_text(t, part);
    }
    result["by_assay"] = std::move(parts);
  }
  em.emit("describe", std::move(result), t.str());
}

double parse_z(const std::string& text) {
  if (text == "one-sided") return synth::kZOneSided95;
  if (text == "two-sided") return synth::kZTwoSided95;
  const auto z = csv::parse_double(text);
  if (!z || !(*z > 0.0)) throw UsageError("--z: expected one-sided, two-sided or a positive number");
  return *z;
}

void cmd_synth(const Args& a, Inputs& inputs, Emitter& em) {
  std::istringstream in(inputs.load("summary", a.summary));
  const auto rows = synth::read_summary_csv(in);
  if (a.replicates == 0) throw UsageError("--replicates must be at least 1");
  synth::Options opts;
  opts.z = parse_z(a.z);
  opts.moment_correct = a.moment_correct;
  opts.allow_repeated_ages = a.allow_repeated_ages;
  opts.study_id = a.study_id;
  opts.unit = a.unit;
  opts.label = a.data.label.empty() ? fs::path(a.summary).stem().string() : a.data.label;
  const auto sets = synth::replicate(rows, a.seed, a.replicates, opts);

  const fs::path dir = a.out_dir.empty() ? fs::path(".") : fs::path(a.out_dir);
  Json files = Json::array();
  std::ostringstream t;
  t << "reconstructed " << sets.size() << " replicate(s) from " << rows.size() << " summary rows\n";
  for (std::size_t i = 0; i < sets.size(); ++i) {
    const fs::path path = dir / (sets[i].label() + ".csv");
    std::ostringstream s;
    write_csv(s, sets[i]);
    write_file(path, s.str());
    files.push_back(Json{{"path", path.generic_string()},
                         {"label", sets[i].label()},
                         {"seed", synth::replicate_seed(a.seed, i)},
                         {"n_points", sets[i].size()},
                         {"y", report::to_json(describe(sets[i], Axis::Y))}});
    t << "  " << path.generic_string() << ": " << sets[i].size() << " points\n";
  }
  Json result{{"z", opts.z},
              {"moment_correct", opts.moment_correct},
              {"n_rows", rows.size()},
              {"replicates", std::move(files)}};
  em.emit("synth", std::move(result), t.str());
}

std::string fit_text(const ModelSpec& spec, const FitResult& f) {
  std::ostringstream t;
  t << "model " << spec.name << " (" << spec.formula << ")\n";
  for (std::size_t i = 0; i < f.params.size(); ++i) {
    t << "  " << spec.param_names[i] << " = " << fmt(f.params[i], 10) << "\n";
  }
  t << "r2 = " << fmt(f.r2, 10) << ", rss = " << fmt(f.rss, 10) << ", " << (f.converged ? "converged" : "not converged")
    << " (" << f.termination << ", " << f.iterations << " iterations)\n";
  return t.str();
}

void cmd_fit(const Args& a, Inputs& inputs, Emitter& em) {
  const ModelSpec& spec = find_model(a.model);
  const auto cfg = plausibility(a.plaus);
  auto loaded = load_dataset(inputs, a.data);
  const auto f = fit_model(spec, loaded.dataset, a);
  const auto p = check_plausibility(spec, f.params, cfg);
  Json result{{"dataset", loaded.dataset.label()},
              {"model", report::to_json(spec)},
              {"fit", report::to_json(f, spec.param_names)},
              {"plausibility", report::to_json(cfg)},
              {"plausible", p.plausible},
              {"reason", p.reason}};
  std::string text = fit_text(spec, f);
  text += std::string("plausible: ") + (p.plausible ? "yes" : "no") + (p.reason.empty() ? "" : " (" + p.reason + ")") + "\n";
  em.emit("fit", std::move(result), text);
}

RankedFits rank_models(const Dataset& d, const PlausibilityConfig& cfg, const Args& a) {
  const Catalog selected = catalog().filter(a.models);
  RankOptions opts;
  opts.n_starts = a.starts;
  opts.seed = a.seed;
  opts.threads = a.threads;
  return rank_all(selected.specs(), d, cfg, opts);
}

void cmd_rank(const Args& a, Inputs& inputs, Emitter& em) {
  const auto cfg = plausibility(a.plaus);
  auto loaded = load_dataset(inputs, a.data);
  const auto ranked = rank_models(loaded.dataset, cfg, a);
  Json result = report::to_json(ranked);
  result["models"] = a.models;
  result["n_starts"] = a.starts;
  result["plausibility"] = report::to_json(cfg);
  std::ostringstream t;
  report::write_leaderboard(t, ranked);
  em.emit("rank", std::move(result), t.str());
}

validate::AgreementMetric parse_metric(const std::string& text) {
  if (text == "ratio") return validate::AgreementMetric::Ratio;
  if (text == "absolute-difference" || text == "absolute") return validate::AgreementMetric::AbsoluteDifference;
  throw UsageError("--metric: expected ratio or absolute-difference");
}

void cmd_validate(const Args& a, Inputs& inputs, Emitter& em) {
  const ModelSpec& spec = find_model(a.model);
  const auto metric = parse_metric(a.metric);
  Dataset train, test;
  Json split_json;
  if (!a.train.empty() || !a.test.empty()) {
    if (a.train.empty() || a.test.empty()) throw UsageError("--train and --test must be given together");
    if (!a.data.paths.empty()) throw UsageError("use either --train/--test or --data");
    train = load_single(inputs, "train", a.train);
    test = load_single(inputs, "test", a.test);
    split_json = Json{{"mode", "files"}};
  } else {
    auto loaded = load_dataset(inputs, a.data);
    auto s = validate::split(loaded.dataset, a.fraction, a.seed, a.stratify);
    train = std::move(s.train);
    test = std::move(s.test);
    split_json = Json{{"mode", "random"}, {"fraction", a.fraction}, {"stratify_bins", a.stratify}};
  }
  const auto f = fit_model(spec, train, a);
  const auto v = validate::holdout_validate(spec, f.params, train, test, metric);
  const auto sim = validate::compare_descriptives(train, test, a.tolerance);
  Json result{{"split", std::move(split_json)},
              {"train", train.label()},
              {"test", test.label()},
              {"fit", report::to_json(f, spec.param_names)},
              {"validation", report::to_json(v)},
              {"similarity", report::to_json(sim)}};

  std::ostringstream t;
  t << fit_text(spec, f);
  t << "train r2 = " << fmt(v.r2_train, 10) << " (n=" << v.n_train << "), test r2 = " << fmt(v.r2_test, 10)
    << " (n=" << v.n_test << ")\n";
  t << "agreement (" << a.metric << ") = " << (v.agreement ? fmt(*v.agreement, 10) : std::string("undefined")) << "\n\n";
  report::write_similarity(t, sim);
  em.emit("validate", std::move(result), t.str());
}

void cmd_analyze(const Args& a, Inputs& inputs, Emitter& em) {
  const auto cfg = plausibility(a.plaus);
  auto loaded = load_dataset(inputs, a.data);
  const Dataset& d = loaded.dataset;

  const ModelSpec* spec = nullptr;
  FitResult f;
  Json selection;
  if (!a.model.empty()) {
    spec = &find_model(a.model);
    f = fit_model(*spec, d, a);
    selection = Json{{"mode", "given"}};
  } else {
    const auto ranked = rank_models(d, cfg, a);
    const auto gold = ranked.gold_standard();
    if (!gold) throw Error("analyze: no plausible model in the catalog selection '" + a.models + "'");
    f = ranked.entries[*gold].fit;
    spec = &catalog().at(f.spec_name);
    selection = Json{{"mode", "gold_standard"}, {"models", a.models}, {"plausibility", report::to_json(cfg)}};
  }
  const Interval range = a.range.empty() ? cfg.domain : parse_interval(a.range, "--range");

  const auto loss = [&](double x) { return analyze::monthly_loss(*spec, f.params, x); };
  const auto peak = analyze::peak_age(loss, range);

  analyze::Reference ref;
  if (a.reference == "peak") {
    ref.kind = analyze::Reference::Kind::Peak;
    ref.domain = range;
  } else {
    const auto age = csv::parse_double(a.reference);
    if (!age) throw UsageError("--reference: expected 'peak' or an age");
    ref.kind = analyze::Reference::Kind::Age;
    ref.age = *age;
  }
  Json remaining = Json::array();
  std::ostringstream t;
  t << fit_text(*spec, f);
  t << "peak monthly loss at age " << fmt(peak.x, 8) << ": " << fmt(peak.value, 8) << " per month"
    << (peak.plateau ? " (plateau)" : "") << "\n";
  for (double age : a.ages) {
    const double pct = analyze::percent_remaining(*spec, f.params, age, ref);
    remaining.push_back(Json{{"age", age}, {"percent", std::isfinite(pct) ? Json(pct) : Json(nullptr)}});
    t << "remaining at age " << fmt(age) << ": " << fmt(pct, 6) << "% of " << a.reference << "\n";
  }

  const auto band = analyze::prediction_band(*spec, f, d, a.level, a.band_grid);
  if (!a.band_csv.empty()) {
    std::ostringstream s;
    report::write_band_csv(s, band);
    write_file(a.band_csv, s.str());
  }
  t << "prediction band " << fmt(100 * a.level) << "%: fit +/- " << fmt(band.half_width) << " (residual sd "
    << fmt(band.residual_sd) << ")\n";

  Json result{{"dataset", d.label()},
              {"selection", std::move(selection)},
              {"fit", report::to_json(f, spec->param_names)},
              {"range", Json::array({range.lo, range.hi})},
              {"peak_monthly_loss", report::to_json(peak)},
              {"reference", a.reference},
              {"percent_remaining", std::move(remaining)},
              {"band", report::to_json(band)}};

  if (!a.with_data.empty() || !a.with_model.empty()) {
    if (a.with_data.empty() || a.with_model.empty()) throw UsageError("--with-data and --with-model go together");
    const ModelSpec& other = find_model(a.with_model);
    const Dataset od = load_single(inputs, "with-data", a.with_data);
    const auto of = fit_model(other, od, a);
    const auto ta = analyze::parse_transform(a.transform_a);
    const auto tb = analyze::parse_transform(a.transform_b);
    const auto c = analyze::cross_correlation({spec, f.params}, {&other, of.params}, ta, tb, range,
                                              analyze::monthly_grid(range));
    result["correlation"] = report::to_json(c);
    result["correlation"]["other_fit"] = report::to_json(of, other.param_names);
    t << "correlation r = " << fmt(c.r, 8) << " (" << analyze::to_string(ta) << " vs " << analyze::to_string(tb)
      << " of " << other.name << ", " << c.grid_size << " points)\n";
  }
  em.emit("analyze", std::move(result), t.str());
}

void cmd_plot(const Args& a, Inputs& inputs, Emitter& em, std::ostream& out) {
  auto loaded = load_dataset(inputs, a.data);
  const Dataset& d = loaded.dataset;
  const ModelSpec* spec = nullptr;
  FitResult f;
  std::optional<analyze::IntervalBand> band;
  if (!a.model.empty()) {
    spec = &find_model(a.model);
    f = fit_model(*spec, d, a);
    if (a.band) band = analyze::prediction_band(*spec, f, d, a.level, a.band_grid);
  } else if (a.band) {
    throw UsageError("--band requires --model");
  }
  plot::Figure fig;
  fig.title = a.title.empty() ? d.label() : a.title;
  fig.x_label = a.x_label;
  fig.y_label = a.y_label;
  const std::string svg = plot::render_svg(d, spec, f.params, band ? &*band : nullptr, fig);

  std::string path = a.svg_out;
  if (path.empty() && !a.out_dir.empty()) path = (fs::path(a.out_dir) / "plot.svg").string();
  if (path.empty()) {
    out << svg;
    return;
  }
  write_file(path, svg);
  Json result{{"svg", path},
              {"n_points", d.size()},
              {"fit", spec ? report::to_json(f, spec->param_names) : Json(nullptr)},
              {"band", band ? Json(band->level) : Json(nullptr)}};
  em.emit("plot", std::move(result), "wrote " + path + "\n");
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Model selection and curve fitting for age-dependent biomedical data", "msci"};
  app.set_version_flag("--version", kToolVersion);
  app.set_config("--config", "", "Key-value configuration file; flags override it");
  app.require_subcommand(1);
  app.fallthrough();

  Args a;
  app.add_option("--seed", a.seed, "Master seed for every random step")->capture_default_str();
  app.add_option("--out-dir", a.out_dir, "Write <command>.json and <command>.txt here");
  app.add_flag("--json", a.json, "Print the JSON report instead of text");

  auto* ingest = app.add_subcommand("ingest", "Read, validate, normalize and merge point CSVs");
  add_data_options(ingest, a.data);
  ingest->add_option("--out", a.csv_out, "Write the normalized dataset as CSV");

  auto* describe_cmd = app.add_subcommand("describe", "Descriptive statistics per axis and study");
  add_data_options(describe_cmd, a.data);
  describe_cmd->add_flag("--by-assay", a.by_assay, "Also describe each assay separately");

  auto* synth_cmd = app.add_subcommand("synth", "Reconstruct datasets from summary rows");
  synth_cmd->add_option("--summary", a.summary, "Summary CSV (x,n,mean,sd,upper_pl95,family)")->required();
  synth_cmd->add_option("--replicates", a.replicates, "Number of datasets")->capture_default_str();
  synth_cmd->add_option("--z", a.z, "one-sided, two-sided or a multiplier for prediction limits")->capture_default_str();
  synth_cmd->add_flag("--moment-correct", a.moment_correct, "Match sample moments to the targets exactly");
  synth_cmd->add_flag("--allow-repeated-ages", a.allow_repeated_ages, "Accept several rows with the same age");
  synth_cmd->add_option("--study-id", a.study_id, "Study id of the generated points")->capture_default_str();
  synth_cmd->add_option("--unit", a.unit, "Unit label of the generated points");
  synth_cmd->add_option("--label", a.data.label, "Dataset label prefix");

  auto* fit_cmd = app.add_subcommand("fit", "Fit one model");
  add_data_options(fit_cmd, a.data);
  add_plausibility_options(fit_cmd, a.plaus);
  fit_cmd->add_option("--model", a.model, "Model name")->required();
  fit_cmd->add_option("--starts", a.starts, "Multi-start count")->capture_default_str();

  auto* rank_cmd = app.add_subcommand("rank", "Fit the catalog and rank by r2 and plausibility");
  add_data_options(rank_cmd, a.data);
  add_plausibility_options(rank_cmd, a.plaus);
  rank_cmd->add_option("--models", a.models, "Model names or family classes, comma-separated")->capture_default_str();
  rank_cmd->add_option("--starts", a.starts, "Multi-start count per model")->capture_default_str();
  rank_cmd->add_option("--threads", a.threads, "Worker threads (0 = all cores)");

  auto* validate_cmd = app.add_subcommand("validate", "Train/test validation of one model");
  add_data_options(validate_cmd, a.data, false);
  validate_cmd->add_option("--train", a.train, "Training CSV");
  validate_cmd->add_option("--test", a.test, "Test CSV");
  validate_cmd->add_option("--fraction", a.fraction, "Train fraction for a random split")->capture_default_str();
  validate_cmd->add_option("--stratify", a.stratify, "Equal-width x-bins for stratified splitting")->capture_default_str();
  validate_cmd->add_option("--model", a.model, "Model name")->required();
  validate_cmd->add_option("--metric", a.metric, "ratio or absolute-difference")->capture_default_str();
  validate_cmd->add_option("--tolerance", a.tolerance, "Relative tolerance for descriptive similarity")
      ->capture_default_str();
  validate_cmd->add_option("--starts", a.starts, "Multi-start count")->capture_default_str();

  auto* analyze_cmd = app.add_subcommand("analyze", "Peak loss, percent remaining, bands and correlations");
  add_data_options(analyze_cmd, a.data);
  add_plausibility_options(analyze_cmd, a.plaus);
  analyze_cmd->add_option("--model", a.model, "Model name (default: the gold-standard model of a ranking)");
  analyze_cmd->add_option("--models", a.models, "Catalog selection when ranking")->capture_default_str();
  analyze_cmd->add_option("--starts", a.starts, "Multi-start count")->capture_default_str();
  analyze_cmd->add_option("--threads", a.threads, "Worker threads when ranking");
  analyze_cmd->add_option("--range", a.range, "Age range lo:hi (default: the plausibility domain)");
  analyze_cmd->add_option("--ages", a.ages, "Ages at which to report percent remaining");
  analyze_cmd->add_option("--reference", a.reference, "'peak' or a reference age")->capture_default_str();
  analyze_cmd->add_option("--level", a.level, "Prediction band level")->capture_default_str();
  analyze_cmd->add_option("--band-grid", a.band_grid, "Band grid size")->capture_default_str();
  analyze_cmd->add_option("--band-csv", a.band_csv, "Write the band as CSV");
  analyze_cmd->add_option("--with-data", a.with_data, "Second dataset for a correlation");
  analyze_cmd->add_option("--with-model", a.with_model, "Model fitted to the second dataset");
  analyze_cmd->add_option("--transform-a", a.transform_a, "value, derivative or negated-derivative")
      ->capture_default_str();
  analyze_cmd->add_option("--transform-b", a.transform_b, "value, derivative or negated-derivative")
      ->capture_default_str();

  auto* plot_cmd = app.add_subcommand("plot", "Render data, fitted curve and band as SVG");
  add_data_options(plot_cmd, a.data);
  plot_cmd->add_option("--model", a.model, "Model to fit and draw");
  plot_cmd->add_option("--starts", a.starts, "Multi-start count")->capture_default_str();
  plot_cmd->add_flag("--band", a.band, "Draw the prediction band");
  plot_cmd->add_option("--level", a.level, "Prediction band level")->capture_default_str();
  plot_cmd->add_option("--band-grid", a.band_grid, "Band grid size")->capture_default_str();
  plot_cmd->add_option("--out", a.svg_out, "SVG path (default: <out-dir>/plot.svg or stdout)");
  plot_cmd->add_option("--title", a.title, "Figure title");
  plot_cmd->add_option("--x-label", a.x_label, "x-axis label")->capture_default_str();
  plot_cmd->add_option("--y-label", a.y_label, "y-axis label")->capture_default_str();

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::Success& e) {
    app.exit(e, out, err);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n" << app.help();
    return kExitUsage;
  }

  Inputs inputs;
  Emitter em(a, inputs, out);
  try {
    if (*ingest) cmd_ingest(a, inputs, em);
    else if (*describe_cmd) cmd_describe(a, inputs, em);
    else if (*synth_cmd) cmd_synth(a, inputs, em);
    else if (*fit_cmd) cmd_fit(a, inputs, em);
    else if (*rank_cmd) cmd_rank(a, inputs, em);
    else if (*validate_cmd) cmd_validate(a, inputs, em);
    else if (*analyze_cmd) cmd_analyze(a, inputs, em);
    else if (*plot_cmd) cmd_plot(a, inputs, em, out);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitDataError;
  }
  return kExitOk;
}

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return run(args, std::cout, std::cerr);
}

}  // namespace msci::cli
