#include <catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>
#include <regex>
#include <sstream>

#include "../fixtures.hpp"
#include "msci/cli.hpp"
#include "msci/plot.hpp"
#include "msci/report.hpp"
#include "msci/rng.hpp"

using namespace msci;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& name) : path(fs::temp_directory_path() / ("msci_test_" + name)) {
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string operator/(const std::string& f) const { return (path / f).string(); }
};

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void spit(const std::string& path, const std::string& text) { std::ofstream(path, std::ios::binary) << text; }

struct Run {
  int code;
  std::string out, err;
};

Run run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::size_t count(const std::string& text, const std::string& what) {
  std::size_t n = 0;
  for (auto pos = text.find(what); pos != std::string::npos; pos = text.find(what, pos + 1)) ++n;
  return n;
}

Dataset peak_data(std::size_t n, std::uint64_t seed) {
  CounterRng rng(seed);
  std::vector<DataPoint> pts;
  for (std::size_t i = 0; i < n; ++i) {
    const double x = -0.5 + 55.0 * static_cast<double>(i) / static_cast<double>(n - 1);
    const double y = 1000 * std::exp(-0.5 * std::pow((x - 2) / 12.5, 2)) * (1 + 0.05 * rng.normal());
    pts.push_back({x, std::max(0.0, y), "count", i % 2 ? "s1" : "s2", std::string(i % 3 ? "A" : "B"), 1.0});
  }
  return Dataset(pts, "peak");
}

void write_dataset(const std::string& path, const Dataset& d) {
  std::ostringstream s;
  write_csv(s, d);
  spit(path, s.str());
}

// Minimal well-formedness check: tags balance and attribute quotes close.
bool balanced_xml(const std::string& svg) {
  std::vector<std::string> stack;
  const std::regex tag(R"(<(/?)([A-Za-z][\w:-]*)([^<>]*?)(/?)>)");
  std::size_t consumed = 0;
  for (auto it = std::sregex_iterator(svg.begin(), svg.end(), tag); it != std::sregex_iterator(); ++it) {
    const auto& m = *it;
    const std::string between = svg.substr(consumed, m.position() - consumed);
    if (between.find('<') != std::string::npos || between.find('>') != std::string::npos) return false;
    consumed = m.position() + m.length();
    if (count(m[3].str(), "\"") % 2) return false;
    if (m[1] == "/") {
      if (stack.empty() || stack.back() != m[2]) return false;
      stack.pop_back();
    } else if (m[4] != "/") {
      stack.push_back(m[2]);
    }
  }
  return stack.empty();
}

std::string without_prolog(const std::string& svg) { return svg.substr(svg.find("?>") + 2); }

}  // namespace

TEST_CASE("json numbers: non-finite values become null") {
  FitResult f;
  f.spec_name = "m";
  f.params = {1.5, std::numeric_limits<double>::quiet_NaN()};
  const auto j = report::to_json(f, std::vector<std::string>{"a", "b"});
  CHECK(j["params"]["a"] == 1.5);
  CHECK(j["params"]["b"].is_null());
  CHECK(j["rss"].is_null());
}

TEST_CASE("catalog json lists name, parameter count, class and bounds") {
  const auto j = report::catalog_json(catalog());
  REQUIRE(j.size() == catalog().size());
  const auto& g = j[0];
  CHECK(g.contains("name"));
  CHECK(g.contains("n_params"));
  CHECK(g.contains("family_class"));
  CHECK(g["bounds"][0]["lo"] == "-inf");
}

TEST_CASE("envelope carries tool, version, seed and digests") {
  const auto j = report::envelope("rank", 7, {{"data", "d.csv", report::digest("abc")}}, Json::object());
  CHECK(j["tool"] == "msci");
  CHECK(j["version"] == kToolVersion);
  CHECK(j["seed"] == 7);
  CHECK(j["inputs"][0]["fnv1a64"] == "e71fa2190541574b");
}

TEST_CASE("leaderboard text lists every entry") {
  const auto d = peak_data(60, 1);
  PlausibilityConfig cfg;
  const auto r = rank_all(catalog().filter("peaked").specs(), d, cfg);
  std::ostringstream s;
  report::write_leaderboard(s, r);
  for (const auto& e : r.entries) CHECK(s.str().find(e.fit.spec_name) != std::string::npos);
  const auto j = report::to_json(r);
  CHECK(j["entries"].size() == r.entries.size());
  CHECK(j["entries"][0]["rank"] == 1);
}

TEST_CASE("band csv has a header and one row per grid point") {
  analyze::IntervalBand b;
  b.x = {0, 1};
  b.lower = {-1, 0};
  b.fit = {0, 1};
  b.upper = {1, 2};
  std::ostringstream s;
  report::write_band_csv(s, b);
  CHECK(s.str() == "x,lower,fit,upper\n0,-1,0,1\n1,0,1,2\n");
}

TEST_CASE("scatter-only plot is well formed") {
  const auto d = peak_data(20, 2);
  const auto svg = plot::render_svg(d, nullptr, {}, nullptr);
  CHECK(balanced_xml(without_prolog(svg)));
  CHECK(count(svg, "<circle") == 20);
  CHECK(count(svg, "<path") == 0);
  CHECK(count(svg, "<polygon") == 0);
}

TEST_CASE("325-point plot has one circle per point and one curve") {
  const auto d = merge(fixture::histology_parts(), "combined");
  const auto& g = catalog().at("gaussian");
  const auto f = multi_start(g, d, 4, 1);
  const auto band = analyze::prediction_band(g, f, d);
  const auto svg = plot::render_svg(d, &g, f.params, &band);
  CHECK(count(svg, "<circle") == 325);
  CHECK(count(svg, "<path") == 1);
  CHECK(count(svg, "<polygon") == 1);
  CHECK(balanced_xml(without_prolog(svg)));
  CHECK(svg == plot::render_svg(d, &g, f.params, &band));
}

TEST_CASE("plot text is escaped") {
  const auto d = peak_data(5, 2);
  plot::Figure fig;
  fig.title = "A & B <test>";
  const auto svg = plot::render_svg(d, nullptr, {}, nullptr, fig);
  CHECK(svg.find("A &amp; B &lt;test&gt;") != std::string::npos);
  CHECK(balanced_xml(without_prolog(svg)));
}

TEST_CASE("cli usage errors exit 2, data errors exit 1") {
  CHECK(run({}).code == cli::kExitUsage);
  CHECK(run({"frobnicate"}).code == cli::kExitUsage);
  CHECK(run({"rank", "--no-such-flag"}).code == cli::kExitUsage);
  CHECK(run({"rank", "--data", "/nonexistent/file.csv"}).code == cli::kExitDataError);
  CHECK(run({"rank", "--data", "x.csv", "--domain", "5"}).code == cli::kExitUsage);
  CHECK(run({"--help"}).code == 0);

  TempDir tmp("errors");
  spit(tmp / "bad.csv", "study_id,x,y\nA,1,-5\n");
  const auto r = run({"describe", "--data", tmp / "bad.csv"});
  CHECK(r.code == cli::kExitDataError);
  CHECK(r.err.find("row 2") != std::string::npos);
}

TEST_CASE("cli rank is byte-identical across runs and matches the library") {
  TempDir tmp("rank");
  const auto d = peak_data(80, 3);
  write_dataset(tmp / "d.csv", d);
  const std::vector<std::string> args{"rank", "--data", tmp / "d.csv", "--nonnegative", "--domain", "0:60",
                                      "--seed", "7", "--json"};
  const auto a = run(args), b = run(args);
  REQUIRE(a.code == 0);
  CHECK(a.out == b.out);

  const auto j = Json::parse(a.out);
  CHECK(j["seed"] == 7);
  CHECK(j["inputs"][0]["fnv1a64"] == report::digest(slurp(tmp / "d.csv")));

  PlausibilityConfig cfg;
  cfg.domain = {0, 60};
  cfg.require_nonnegative = true;
  RankOptions o;
  o.seed = 7;
  const auto direct = rank_all(catalog().specs(), d.relabel("d"), cfg, o);
  auto expected = report::to_json(direct);
  CHECK(j["result"]["entries"] == expected["entries"]);
  CHECK(j["result"]["gold_standard"] == expected["gold_standard"]);
}

TEST_CASE("cli writes json and text into the output directory") {
  TempDir tmp("outdir");
  write_dataset(tmp / "d.csv", peak_data(40, 4));
  const auto r = run({"describe", "--data", tmp / "d.csv", "--out-dir", tmp / "out", "--by-assay"});
  REQUIRE(r.code == 0);
  CHECK(fs::exists(tmp / "out/describe.json"));
  CHECK(slurp(tmp / "out/describe.txt") == r.out);
  const auto j = Json::parse(slurp(tmp / "out/describe.json"));
  CHECK(j["result"]["n_points"] == 40);
  CHECK(j["result"]["by_assay"].size() == 2);
}

TEST_CASE("cli synth writes one csv per replicate with the summed row count") {
  TempDir tmp("synth");
  spit(tmp / "rows.csv", "x,n,mean,sd,upper_pl95,family\n20,10,5,1,,normal\n30,20,8,,12,lognormal\n40,7,3,0.5,,normal\n");
  const std::vector<std::string> args{"synth", "--summary", tmp / "rows.csv", "--seed", "1", "--replicates", "3",
                                      "--out-dir", tmp / "out"};
  REQUIRE(run(args).code == 0);
  std::vector<std::string> first;
  for (int i = 0; i < 3; ++i) {
    const auto path = tmp / ("out/rows_" + std::to_string(i) + ".csv");
    const auto text = slurp(path);
    CHECK(count(text, "\n") == 37 + 1);
    first.push_back(text);
  }
  REQUIRE(run(args).code == 0);
  for (int i = 0; i < 3; ++i) CHECK(slurp(tmp / ("out/rows_" + std::to_string(i) + ".csv")) == first[i]);
}

TEST_CASE("cli validate on fixed files matches the library call") {
  TempDir tmp("validate");
  const auto d = peak_data(200, 5);
  const auto s = validate::split(d, 0.5, 3);
  write_dataset(tmp / "a.csv", s.train);
  write_dataset(tmp / "b.csv", s.test);
  const auto r = run({"validate", "--train", tmp / "a.csv", "--test", tmp / "b.csv", "--model", "gaussian", "--json"});
  REQUIRE(r.code == 0);
  const auto j = Json::parse(r.out);

  const auto& g = catalog().at("gaussian");
  const auto f = multi_start(g, s.train, 8, derive_seed(0, fnv1a64("gaussian")));
  const auto v = validate::holdout_validate(g, f.params, s.train, s.test);
  REQUIRE(v.agreement);
  CHECK(j["result"]["validation"]["agreement"] == *v.agreement);
  CHECK(j["result"]["validation"]["r2_test"] == v.r2_test);
}

TEST_CASE("cli fit, analyze and plot run end to end") {
  TempDir tmp("pipeline");
  write_dataset(tmp / "d.csv", peak_data(150, 6));
  const auto fit = run({"fit", "--data", tmp / "d.csv", "--model", "gaussian", "--json"});
  REQUIRE(fit.code == 0);
  CHECK(Json::parse(fit.out)["result"]["fit"]["converged"] == true);

  const auto an = run({"analyze", "--data", tmp / "d.csv", "--model", "gaussian", "--ages", "30", "40",
                       "--band-csv", tmp / "band.csv", "--with-data", tmp / "d.csv", "--with-model", "gaussian",
                       "--json"});
  REQUIRE(an.code == 0);
  const auto j = Json::parse(an.out);
  CHECK(j["result"]["correlation"]["r"] == Catch::Approx(1.0).margin(1e-12));
  CHECK(j["result"]["percent_remaining"].size() == 2);
  CHECK(slurp(tmp / "band.csv").rfind("x,lower,fit,upper\n", 0) == 0);

  const auto gold = run({"analyze", "--data", tmp / "d.csv", "--nonnegative", "--models", "peaked"});
  CHECK(gold.code == 0);

  const std::vector<std::string> args{"plot", "--data", tmp / "d.csv", "--model", "gaussian", "--band",
                                      "--out", tmp / "p.svg"};
  REQUIRE(run(args).code == 0);
  const auto svg = slurp(tmp / "p.svg");
  CHECK(count(svg, "<circle") == 150);
  CHECK(count(svg, "<path") == 1);
  REQUIRE(run(args).code == 0);
  CHECK(slurp(tmp / "p.svg") == svg);

  CHECK(run({"plot", "--data", tmp / "d.csv", "--out", tmp / "d.csv" + "/p.svg"}).code == cli::kExitDataError);
}

TEST_CASE("cli ingest normalizes units and writes csv") {
  TempDir tmp("ingest");
  spit(tmp / "d.csv", "study_id,x,y,unit\nA,1,2000,mm3\nA,2,3,ml\n");
  spit(tmp / "units.txt", "mm3 = ml, 0.001\n");
  spit(tmp / "studies.csv", "study_id,first_author,year\nA,Hansen,2008\n");
  const auto r = run({"ingest", "--data", tmp / "d.csv", "--units", tmp / "units.txt", "--studies",
                      tmp / "studies.csv", "--out", tmp / "norm.csv", "--json"});
  REQUIRE(r.code == 0);
  CHECK(slurp(tmp / "norm.csv") == "study_id,x,y,unit,assay_id,weight\nA,1,2,ml,,1\nA,2,3,ml,,1\n");
  const auto j = Json::parse(r.out);
  CHECK(j["inputs"].size() == 3);
  CHECK(j["result"]["studies"][0]["first_author"] == "Hansen");
}

TEST_CASE("config file supplies flags that the command line overrides") {
  TempDir tmp("config");
  write_dataset(tmp / "d.csv", peak_data(60, 7));
  spit(tmp / "cfg.ini", "seed = 11\n");
  const auto a = run({"--config", tmp / "cfg.ini", "fit", "--data", tmp / "d.csv", "--model", "logistic", "--json"});
  REQUIRE(a.code == 0);
  CHECK(Json::parse(a.out)["seed"] == 11);
  const auto b = run({"--config", tmp / "cfg.ini", "--seed", "3", "fit", "--data", tmp / "d.csv", "--model",
                      "logistic", "--json"});
  CHECK(Json::parse(b.out)["seed"] == 3);
}
