#include <catch_amalgamated.hpp>

#include <cmath>
#include <sstream>

#include "../oracles.hpp"
#include "msci/error.hpp"
#include "msci/synth.hpp"

using namespace msci;
using namespace msci::synth;

namespace {

SummaryRow normal_row(double x, std::size_t n, double mean, double sd) {
  SummaryRow r;
  r.x = x;
  r.n = n;
  r.mean = mean;
  r.sd = sd;
  return r;
}

double sample_mean(const std::vector<double>& v) {
  double s = 0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

}  // namespace

TEST_CASE("sd from an upper prediction limit") {
  CHECK(sd_from_upper_pl(5, 5, 1.96) == 0.0);
  CHECK(sd_from_upper_pl(10, 11.96, 1.96) == Catch::Approx(1.0).epsilon(1e-12));
  CHECK(sd_from_upper_pl(10, 13.29, 1.645) == Catch::Approx(2.0).epsilon(1e-12));
  CHECK_THROWS(sd_from_upper_pl(10, 9, 1.645));
  CHECK_THROWS(sd_from_upper_pl(10, 11, 0));
}

TEST_CASE("sd from limit is linear in the gap and inverse in z") {
  for (double gap : {0.5, 1.0, 3.0}) {
    for (double z : {1.0, 1.645, 2.0}) {
      const double s = sd_from_upper_pl(7, 7 + gap, z);
      CHECK(sd_from_upper_pl(7, 7 + 2 * gap, z) == Catch::Approx(2 * s));
      CHECK(sd_from_upper_pl(7, 7 + gap, 2 * z) == Catch::Approx(s / 2));
    }
  }
}

TEST_CASE("lognormal solver: unit location and scale") {
  const auto p = solve_lognormal(std::exp(0.5), std::sqrt(std::exp(1.0) * (std::exp(1.0) - 1.0)));
  CHECK(std::abs(p.x_log) < 1e-12);
  CHECK(p.y_log == Catch::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("lognormal solver: mean 2 sd 1") {
  const auto p = solve_lognormal(2, 1);
  CHECK(p.x_log == Catch::Approx(0.581575).margin(1e-6));
  CHECK(p.y_log == Catch::Approx(0.472381).margin(1e-6));
  CHECK(lognormal_mean(p) == Catch::Approx(2.0).epsilon(1e-12));
  CHECK(std::sqrt(lognormal_variance(p)) == Catch::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("lognormal solver: small variance limit") {
  const auto p = solve_lognormal(1, 1e-6);
  CHECK(std::abs(p.x_log) < 1e-11);
  CHECK(p.y_log == Catch::Approx(1e-6).epsilon(1e-6));
  CHECK_THROWS(solve_lognormal(0, 1));
  CHECK_THROWS(solve_lognormal(1, 0));
}

TEST_CASE("lognormal round trip over the moment grid") {
  for (double mu : {0.1, 1.0, 5.0, 50.0}) {
    for (double sd : {0.01, 0.5, 2.0, 10.0}) {
      const auto p = solve_lognormal(mu, sd);
      // Forward moments written out independently of the library.
      const double m = std::exp(p.x_log + 0.5 * p.y_log * p.y_log);
      const double v = std::exp(2 * p.x_log + p.y_log * p.y_log) * std::expm1(p.y_log * p.y_log);
      CHECK(oracle::rel_diff(m, mu) < 1e-10);
      CHECK(oracle::rel_diff(v, sd * sd) < 1e-10);
    }
  }
}

TEST_CASE("moment corrected normal row hits its targets") {
  const auto v = reconstruct_row(normal_row(30, 100, 10, 2), 9, true);
  REQUIRE(v.size() == 100);
  const auto m = oracle::moments(v);
  CHECK(oracle::rel_diff(m.mean, 10) < 1e-9);
  CHECK(oracle::rel_diff(m.sd, 2) < 1e-9);
}

TEST_CASE("moment corrected lognormal row matches on the log scale") {
  SummaryRow r = normal_row(30, 50, 2, 1);
  r.family = Family::LogNormal;
  const auto v = reconstruct_row(r, 4, true);
  std::vector<double> logs;
  for (double x : v) {
    CHECK(x > 0);
    logs.push_back(std::log(x));
  }
  const auto p = solve_lognormal(2, 1);
  const auto m = oracle::moments(logs);
  CHECK(oracle::rel_diff(m.mean, p.x_log) < 1e-9);
  CHECK(oracle::rel_diff(m.sd, p.y_log) < 1e-9);
}

TEST_CASE("uncorrected lognormal sample mean is within three standard errors") {
  SummaryRow r = normal_row(30, 10000, 2, 1);
  r.family = Family::LogNormal;
  int inside = 0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const double m = sample_mean(reconstruct_row(r, seed, false));
    inside += std::abs(m - 2.0) < 3.0 * 1.0 / std::sqrt(10000.0);
  }
  CHECK(inside >= 19);
}

TEST_CASE("reconstruction is deterministic and seed-sensitive") {
  const auto r = normal_row(30, 20, 10, 2);
  CHECK(reconstruct_row(r, 1, false) == reconstruct_row(r, 1, false));
  CHECK(reconstruct_row(r, 1, false) != reconstruct_row(r, 2, false));
}

TEST_CASE("reconstruction error cases") {
  CHECK_THROWS(reconstruct_row(normal_row(30, 0, 10, 2), 1, false));
  CHECK_THROWS(reconstruct_row(normal_row(30, 1, 10, 2), 1, true));
  SummaryRow none;
  none.x = 1;
  none.n = 3;
  none.mean = 2;
  CHECK_THROWS(validate_row(none));
}

TEST_CASE("prediction limit rows use the configured z") {
  SummaryRow r;
  r.x = 40;
  r.n = 100;
  r.mean = 10;
  r.upper_pl95 = 10 + 2 * kZOneSided95;
  const auto [loc, scale] = sampling_targets(r, kZOneSided95);
  CHECK(loc == 10);
  CHECK(scale == Catch::Approx(2.0));
  CHECK(sampling_targets(r, kZTwoSided95).second == Catch::Approx(2 * kZOneSided95 / kZTwoSided95));
}

TEST_CASE("near-degenerate row gives points at one age") {
  const std::vector<SummaryRow> rows{normal_row(30, 5, 10, 1e-4)};
  const auto d = reconstruct_dataset(rows, 1);
  REQUIRE(d.size() == 5);
  for (const auto& p : d.points()) {
    CHECK(p.x == 30);
    CHECK(p.y == Catch::Approx(10).margin(1e-2));
    CHECK(p.study_id == "synthetic");
  }
}

TEST_CASE("dataset sizes add up over rows") {
  const std::vector<SummaryRow> rows{normal_row(1, 3, 10, 1), normal_row(2, 4, 10, 1)};
  CHECK(reconstruct_dataset(rows, 3).size() == 7);
  const std::vector<SummaryRow> dup{normal_row(1, 3, 10, 1), normal_row(1, 4, 10, 1)};
  CHECK_THROWS(reconstruct_dataset(dup, 3));
  Options o;
  o.allow_repeated_ages = true;
  CHECK(reconstruct_dataset(dup, 3, o).size() == 7);
}

TEST_CASE("pooled mean of a large reconstruction") {
  std::vector<SummaryRow> rows;
  double total = 0, pooled = 0, var_sum = 0;
  for (int i = 0; i < 60; ++i) {
    const std::size_t n = 100 + (i * 37) % 140;
    const double mean = 20 + i, sd = 2 + 0.05 * i;
    rows.push_back(normal_row(i, n, mean, sd));
    total += static_cast<double>(n);
    pooled += static_cast<double>(n) * mean;
    var_sum += static_cast<double>(n) * sd * sd;
  }
  pooled /= total;
  const auto d = reconstruct_dataset(rows, 12);
  CHECK(static_cast<double>(d.size()) == total);
  const double se = std::sqrt(var_sum) / total;
  CHECK(std::abs(describe(d, Axis::Y).mean - pooled) < 3 * se);
}

TEST_CASE("negative normal draws are reported clearly") {
  const std::vector<SummaryRow> rows{normal_row(1, 500, 1, 5)};
  CHECK_THROWS_WITH(reconstruct_dataset(rows, 1), Catch::Matchers::ContainsSubstring("negative"));
}

TEST_CASE("replicates are deterministic and distinct") {
  const std::vector<SummaryRow> rows{normal_row(1, 30, 10, 1), normal_row(2, 30, 12, 1)};
  const auto a = replicate(rows, 5, 2), b = replicate(rows, 5, 2);
  REQUIRE(a.size() == 2);
  for (int i = 0; i < 2; ++i) CHECK(a[i].points() == b[i].points());
  CHECK(a[0].points() != a[1].points());
  CHECK_THROWS(replicate(rows, 5, 0));

  const auto one = replicate(rows, 5, 1);
  CHECK(one[0].points() == reconstruct_dataset(rows, replicate_seed(5, 0)).points());
  // Replicate i depends only on the master seed and i.
  CHECK(replicate(rows, 5, 3)[1].points() == a[1].points());
}

TEST_CASE("spread of replicate means is consistent with sd over root n") {
  const std::vector<SummaryRow> rows{normal_row(10, 100, 50, 5)};
  std::vector<double> means;
  for (const auto& d : replicate(rows, 99, 20)) means.push_back(describe(d, Axis::Y).mean);
  const auto m = oracle::moments(means);
  const double expected = 5.0 / std::sqrt(100.0);
  CHECK(m.sd < 3 * expected);
  CHECK(m.sd > expected / 3);
}

TEST_CASE("summary csv reader") {
  std::istringstream in("x,n,mean,sd,upper_pl95,family\n1,10,5,1,,normal\n2,20,8,,12,lognormal\n3,5,2,0.5,,\n");
  const auto rows = read_summary_csv(in);
  REQUIRE(rows.size() == 3);
  CHECK(rows[0].sd == 1.0);
  CHECK_FALSE(rows[1].sd);
  CHECK(rows[1].upper_pl95 == 12.0);
  CHECK(rows[1].family == Family::LogNormal);
  CHECK(rows[2].family == Family::Normal);
  std::istringstream bad("x,n,mean,sd\n1,0,5,1\n");
  CHECK_THROWS_AS(read_summary_csv(bad), RowError);
}
