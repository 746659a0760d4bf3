#include <catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>

#include "msci/error.hpp"
#include "msci/fit.hpp"
#include "msci/rng.hpp"
#include "msci/synth.hpp"
#include "msci/validate.hpp"

using namespace msci;
using namespace msci::validate;

namespace {

Dataset uniform_x(std::size_t n, std::uint64_t seed) {
  CounterRng rng(seed);
  std::vector<DataPoint> pts;
  for (std::size_t i = 0; i < n; ++i) pts.push_back({rng.uniform(0, 50), rng.uniform(0, 10), "u", "A", {}, 1.0});
  return Dataset(pts, "d");
}

std::vector<std::pair<double, double>> xy(const Dataset& d) {
  std::vector<std::pair<double, double>> v;
  for (const auto& p : d.points()) v.emplace_back(p.x, p.y);
  std::sort(v.begin(), v.end());
  return v;
}

Dataset gaussian_peak(std::size_t n, double noise, std::uint64_t seed) {
  CounterRng rng(seed);
  std::vector<DataPoint> pts;
  for (std::size_t i = 0; i < n; ++i) {
    const double x = 60.0 * static_cast<double>(i) / static_cast<double>(n - 1);
    const double y = 100 * std::exp(-0.5 * std::pow((x - 20) / 6, 2)) + noise * 100 * rng.normal();
    pts.push_back({x, std::max(0.0, y), "u", "A", {}, 1.0});
  }
  return Dataset(pts, "peak");
}

}  // namespace

TEST_CASE("half split of 100 points is a disjoint partition") {
  const auto d = uniform_x(100, 1);
  const auto s = split(d, 0.5, 7);
  CHECK(s.train.size() == 50);
  CHECK(s.test.size() == 50);
  auto all = xy(s.train);
  const auto t = xy(s.test);
  all.insert(all.end(), t.begin(), t.end());
  std::sort(all.begin(), all.end());
  CHECK(all == xy(d));
}

TEST_CASE("split is deterministic per seed") {
  const auto d = uniform_x(100, 1);
  CHECK(split(d, 0.3, 7).train.points() == split(d, 0.3, 7).train.points());
  CHECK(split(d, 0.3, 7).train.points() != split(d, 0.3, 8).train.points());
}

TEST_CASE("train size is within one point of the request") {
  for (std::size_t n : {4u, 7u, 33u, 101u}) {
    for (double f : {0.1, 0.25, 0.5, 0.9}) {
      const auto s = split(uniform_x(n, n), f, 3);
      CHECK(std::abs(static_cast<double>(s.train.size()) - f * static_cast<double>(n)) <= 1.0);
      CHECK(s.train.size() + s.test.size() == n);
    }
  }
}

TEST_CASE("stratified split keeps every bin near the requested share") {
  const auto d = uniform_x(1000, 5);
  const double f = 0.3;
  const auto s = split(d, f, 11, 10);
  const auto xs = d.xs();
  const double lo = *std::min_element(xs.begin(), xs.end()), hi = *std::max_element(xs.begin(), xs.end());
  auto bin = [&](double x) { return std::min<int>(9, static_cast<int>((x - lo) / (hi - lo) * 10)); };
  std::vector<int> total(10, 0), train(10, 0);
  for (double x : xs) ++total[bin(x)];
  for (double x : s.train.xs()) ++train[bin(x)];
  for (int b = 0; b < 10; ++b) {
    INFO("bin " << b);
    CHECK(std::abs(train[b] - f * total[b]) <= 1.0);
  }
}

TEST_CASE("split error cases") {
  const auto d = uniform_x(10, 1);
  CHECK_THROWS(split(d, 0.0, 1));
  CHECK_THROWS(split(d, 1.0, 1));
  CHECK_THROWS(split(uniform_x(3, 1), 0.5, 1));
}

TEST_CASE("agreement definitions") {
  CHECK(*agreement(0.45, 0.43) == Catch::Approx(0.43 / 0.45));
  CHECK(*agreement(0.45, 0.43) == Catch::Approx(0.9556).margin(1e-4));
  CHECK(*agreement(0.43, 0.45) == *agreement(0.45, 0.43));
  CHECK(*agreement(0.7, 0.7) == 1.0);
  CHECK_FALSE(agreement(0.5, -0.1));
  CHECK_FALSE(agreement(0.0, 0.5));
  CHECK(*agreement(0.45, 0.43, AgreementMetric::AbsoluteDifference) == Catch::Approx(0.98));
  CHECK(*agreement(0.9, -0.5, AgreementMetric::AbsoluteDifference) == 0.0);
}

TEST_CASE("self-validation has agreement one") {
  const auto d = gaussian_peak(100, 0.05, 3);
  const auto& spec = catalog().at("gaussian");
  const auto f = multi_start(spec, d, 4, 1);
  const auto r = holdout_validate(spec, f.params, d, d);
  CHECK(r.r2_test == r.r2_train);
  CHECK(r.agreement == 1.0);
}

TEST_CASE("holdout validation on synthetic peak data") {
  const auto d = gaussian_peak(300, 0.05, 17);
  const auto s = split(d, 0.5, 2);
  const auto& spec = catalog().at("gaussian");
  const auto f = multi_start(spec, s.train, 8, 4);
  const auto r = holdout_validate(spec, f.params, s.train, s.test);
  REQUIRE(r.agreement);
  CHECK(*r.agreement >= 0.9);
  CHECK(r.n_train == 150);
  CHECK(r.n_test == 150);
}

TEST_CASE("validation never refits") {
  const auto d = gaussian_peak(100, 0.05, 3);
  const auto s = split(d, 0.5, 9);
  const auto& spec = catalog().at("gaussian");
  const auto f = multi_start(spec, s.train, 4, 1);
  const auto a = holdout_validate(spec, f.params, s.train, s.test);
  std::vector<double> ys(s.test.ys().begin(), s.test.ys().end());
  for (auto& y : ys) y *= 1.3;
  const auto b = holdout_validate(spec, f.params, s.train, s.test.with_ys(ys, "perturbed"));
  CHECK(a.r2_train == b.r2_train);
  CHECK(a.r2_test != b.r2_test);
}

TEST_CASE("negative test r2 leaves agreement undefined") {
  const auto d = gaussian_peak(100, 0.05, 3);
  const auto& spec = catalog().at("poly0");
  const Dataset far({{1, 500, "u", "A", {}, 1}, {2, 600, "u", "A", {}, 1}}, "far");
  const auto r = holdout_validate(spec, std::vector<double>{10.0}, d, far);
  CHECK(r.r2_test < 0);
  CHECK_FALSE(r.agreement);
}

TEST_CASE("degenerate test set is an error") {
  const auto d = gaussian_peak(50, 0.05, 3);
  const Dataset flat({{1, 5, "u", "A", {}, 1}, {2, 5, "u", "A", {}, 1}}, "flat");
  CHECK_THROWS(holdout_validate(catalog().at("poly0"), std::vector<double>{1.0}, d, flat));
}

TEST_CASE("identical datasets are descriptively similar") {
  const auto d = uniform_x(50, 2);
  const auto r = compare_descriptives(d, d, 0.0);
  CHECK(r.pass);
  for (const auto& s : r.stats) CHECK(s.relative == 0.0);
  CHECK(r.stats.size() == 6);
}

TEST_CASE("scaled copy fails the similarity check") {
  const auto d = uniform_x(50, 2);
  std::vector<double> ys(d.ys().begin(), d.ys().end());
  for (auto& y : ys) y *= 2;
  const auto r = compare_descriptives(d, d.with_ys(ys, "x2"), 0.1);
  CHECK_FALSE(r.pass);
  for (const auto& s : r.stats) {
    if (s.statistic == "mean" || s.statistic == "sd") CHECK(s.relative == Catch::Approx(1.0));
    if (s.statistic == "count") CHECK(s.within);
  }
}

TEST_CASE("two reconstructions from the same rows are similar") {
  std::vector<synth::SummaryRow> rows;
  for (int i = 0; i < 5; ++i) {
    synth::SummaryRow r;
    r.x = 10 + i;
    r.n = 1000;
    r.mean = 20 + 3 * i;
    r.sd = 3;
    r.family = synth::Family::LogNormal;
    rows.push_back(r);
  }
  const auto reps = synth::replicate(rows, 44, 2);
  CHECK(compare_descriptives(reps[0], reps[1], 0.1).pass);
}
