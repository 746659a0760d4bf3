#include "msci/validate.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "msci/error.hpp"
#include "msci/fit.hpp"
#include "msci/rng.hpp"

namespace msci::validate {

Split split(const Dataset& d, double fraction, std::uint64_t seed, std::size_t stratify_bins) {
  if (!(fraction > 0.0 && fraction < 1.0)) throw Error("split: fraction must lie in (0, 1)");
  if (d.size() < 4) throw Error("split: need at least 4 points");
  const std::size_t n = d.size();
  const std::size_t bins = std::max<std::size_t>(stratify_bins, 1);

  // Bin membership over equal-width x-bins.
  std::vector<std::vector<std::size_t>> members(bins);
  const auto xs = d.xs();
  const double lo = *std::min_element(xs.begin(), xs.end());
  const double hi = *std::max_element(xs.begin(), xs.end());
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t b = 0;
    if (bins > 1 && hi > lo) {
      b = static_cast<std::size_t>((xs[i] - lo) / (hi - lo) * static_cast<double>(bins));
      b = std::min(b, bins - 1);
    }
    members[b].push_back(i);
  }

  const auto target_total = static_cast<std::size_t>(
      std::clamp<double>(std::round(fraction * static_cast<double>(n)), 1.0, static_cast<double>(n - 1)));

  // Largest-remainder apportionment of the train count across bins.
  std::vector<std::size_t> take(bins);
  std::vector<std::pair<double, std::size_t>> remainders;
  std::size_t assigned = 0;
  for (std::size_t b = 0; b < bins; ++b) {
    const double exact = fraction * static_cast<double>(members[b].size());
    take[b] = static_cast<std::size_t>(std::floor(exact));
    assigned += take[b];
    remainders.emplace_back(exact - std::floor(exact), b);
  }
  std::stable_sort(remainders.begin(), remainders.end(),
                   [](const auto& a, const auto& b) { return a.first > b.first; });
  for (std::size_t i = 0; assigned < target_total && i < remainders.size(); ++i) {
    const std::size_t b = remainders[i].second;
    if (take[b] < members[b].size()) {
      ++take[b];
      ++assigned;
    }
  }
  // Only reachable through the [1, n-1] clamp on tiny datasets.
  for (std::size_t b = 0; assigned < target_total && b < bins; ++b) {
    while (assigned < target_total && take[b] < members[b].size()) {
      ++take[b];
      ++assigned;
    }
  }
  for (std::size_t b = bins; assigned > target_total && b-- > 0;) {
    while (assigned > target_total && take[b] > 0) {
      --take[b];
      --assigned;
    }
  }

  CounterRng rng(seed);
  std::vector<char> in_train(n, 0);
  for (std::size_t b = 0; b < bins; ++b) {
    auto& m = members[b];
    // Fisher-Yates with the library generator for platform-stable output.
    for (std::size_t i = m.size(); i > 1; --i) std::swap(m[i - 1], m[rng.below(i)]);
    for (std::size_t i = 0; i < take[b]; ++i) in_train[m[i]] = 1;
  }
  std::vector<std::size_t> train_idx, test_idx;
  for (std::size_t i = 0; i < n; ++i) (in_train[i] ? train_idx : test_idx).push_back(i);
  return {d.subset(train_idx, d.label() + "/train"), d.subset(test_idx, d.label() + "/test")};
}

std::optional<double> agreement(double r2_train, double r2_test, AgreementMetric metric) {
  if (!std::isfinite(r2_train) || !std::isfinite(r2_test)) return std::nullopt;
  if (metric == AgreementMetric::AbsoluteDifference) {
    return std::clamp(1.0 - std::abs(r2_train - r2_test), 0.0, 1.0);
  }
  if (!(r2_train > 0.0) || !(r2_test > 0.0)) return std::nullopt;
  return std::min(r2_train, r2_test) / std::max(r2_train, r2_test);
}

ValidationReport holdout_validate(const ModelSpec& spec, std::span<const double> params, const Dataset& train,
                                  const Dataset& test, AgreementMetric metric) {
  if (test.empty()) throw Error("holdout_validate: empty test set");
  ValidationReport rep;
  rep.metric = metric;
  rep.n_train = train.size();
  rep.n_test = test.size();
  rep.r2_train = r_squared(spec, params, train);
  rep.r2_test = r_squared(spec, params, test);
  rep.agreement = agreement(rep.r2_train, rep.r2_test, metric);
  return rep;
}

SimilarityReport compare_descriptives(const Dataset& a, const Dataset& b, double tolerance) {
  if (a.empty() || b.empty()) throw Error("compare_descriptives: empty dataset");
  const auto da = describe(a, Axis::Y);
  const auto db = describe(b, Axis::Y);
  SimilarityReport rep;
  rep.tolerance = tolerance;
  auto add = [&](const char* name, double va, double vb) {
    StatDifference s{name, va, vb, 0.0, true};
    s.relative = va != 0.0 ? std::abs(vb - va) / std::abs(va) : std::abs(vb);
    s.within = s.relative <= tolerance;
    rep.pass = rep.pass && s.within;
    rep.stats.push_back(std::move(s));
  };
  add("count", static_cast<double>(da.count), static_cast<double>(db.count));
  add("mean", da.mean, db.mean);
  add("median", da.median, db.median);
  add("min", da.min, db.min);
  add("max", da.max, db.max);
  add("sd", da.sd, db.sd);
  return rep;
}

}  // namespace msci::validate
