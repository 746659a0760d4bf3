#include <catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "msci/rng.hpp"
#include "msci/simd.hpp"

using msci::simd::KernelTable;

namespace {

struct Data {
  std::vector<double> a, b, w;
};

Data make(std::size_t n, std::uint64_t seed) {
  msci::CounterRng rng(seed);
  Data d;
  for (std::size_t i = 0; i < n; ++i) {
    d.a.push_back(rng.uniform(-100, 100));
    d.b.push_back(rng.uniform(-3, 7));
    d.w.push_back(rng.uniform(0.1, 2));
  }
  return d;
}

long double naive_sum_abs(const std::vector<double>& v) {
  long double s = 0;
  for (double x : v) s += std::fabs(x);
  return s;
}

// Reassociation changes rounding; bound the error by n * eps * sum|terms|.
void check_reduction(double got, long double exact, long double magnitude, std::size_t n) {
  const long double tol = (n + 4) * 2.3e-16L * magnitude + 1e-300L;
  CHECK(std::fabs(got - exact) <= tol);
}

void check_table(const KernelTable& k) {
  for (std::size_t n : {0u, 1u, 2u, 3u, 4u, 5u, 7u, 8u, 9u, 15u, 16u, 17u, 31u, 64u, 67u, 1000u, 1003u}) {
    const auto d = make(n, 17 + n);
    long double s = 0, dt = 0, wd = 0, sq = 0, rss = 0, cc = 0;
    long double ms = 0, mdt = 0, mwd = 0, msq = 0, mrss = 0, mcc = 0;
    const double c = 1.25, ma = 0.5, mb = -0.75;
    for (std::size_t i = 0; i < n; ++i) {
      const long double a = d.a[i], b = d.b[i], w = d.w[i];
      s += a;
      ms += std::fabs(a);
      dt += a * b;
      mdt += std::fabs(a * b);
      wd += w * a * b;
      mwd += std::fabs(w * a * b);
      sq += w * (a - c) * (a - c);
      msq += w * (a - c) * (a - c);
      rss += w * (a - b) * (a - b);
      mrss += w * (a - b) * (a - b);
      cc += (a - ma) * (b - mb);
      mcc += std::fabs((a - ma) * (b - mb));
    }
    INFO("kernel " << k.name << ", n = " << n);
    check_reduction(k.sum(d.a.data(), n), s, ms, n);
    check_reduction(k.dot(d.a.data(), d.b.data(), n), dt, mdt, n);
    check_reduction(k.weighted_dot(d.a.data(), d.b.data(), d.w.data(), n), wd, mwd, n);
    check_reduction(k.weighted_sq_dev(d.a.data(), c, d.w.data(), n), sq, msq, n);
    check_reduction(k.weighted_rss(d.a.data(), d.b.data(), d.w.data(), n), rss, mrss, n);
    check_reduction(k.centered_cross(d.a.data(), ma, d.b.data(), mb, n), cc, mcc, n);

    std::vector<double> out(n), r(n), inplace = d.a;
    k.affine(d.a.data(), out.data(), n, 2.5, -1.0);
    k.affine(inplace.data(), inplace.data(), n, 2.5, -1.0);
    k.subtract(d.a.data(), d.b.data(), r.data(), n);
    for (std::size_t i = 0; i < n; ++i) {
      CHECK(out[i] == Catch::Approx(2.5 * d.a[i] - 1.0).epsilon(1e-15).margin(1e-13));
      CHECK(inplace[i] == out[i]);
      CHECK(r[i] == d.a[i] - d.b[i]);
    }
  }
  (void)naive_sum_abs;
}

}  // namespace

TEST_CASE("scalar kernels match long double references") { check_table(msci::simd::scalar_kernels()); }

TEST_CASE("vector kernels match long double references") {
  const auto* v = msci::simd::vector_kernels_compiled();
  if (!v || !msci::simd::vector_kernels_supported()) SKIP("no vector kernels on this machine");
  check_table(*v);
}

TEST_CASE("vector and scalar kernels agree on every reduction") {
  const auto* v = msci::simd::vector_kernels_compiled();
  if (!v || !msci::simd::vector_kernels_supported()) SKIP("no vector kernels on this machine");
  const auto& s = msci::simd::scalar_kernels();
  for (std::size_t n = 0; n < 200; ++n) {
    const auto d = make(n, 1000 + n);
    const double mag = static_cast<double>(naive_sum_abs(d.a)) * 10 + 1;
    INFO("n = " << n);
    CHECK(std::fabs(v->sum(d.a.data(), n) - s.sum(d.a.data(), n)) <= 1e-14 * mag);
    CHECK(std::fabs(v->dot(d.a.data(), d.b.data(), n) - s.dot(d.a.data(), d.b.data(), n)) <= 1e-14 * mag * 10);
    CHECK(v->weighted_rss(d.a.data(), d.b.data(), d.w.data(), n) ==
          Catch::Approx(s.weighted_rss(d.a.data(), d.b.data(), d.w.data(), n)).epsilon(1e-13).margin(1e-300));
    CHECK(v->weighted_sq_dev(d.a.data(), 3.0, d.w.data(), n) ==
          Catch::Approx(s.weighted_sq_dev(d.a.data(), 3.0, d.w.data(), n)).epsilon(1e-13).margin(1e-300));
  }
}

TEST_CASE("active table is one of the compiled tables") {
  const auto& a = msci::simd::active();
  const bool is_scalar = &a == &msci::simd::scalar_kernels();
  const bool is_vector = &a == msci::simd::vector_kernels_compiled();
  CHECK((is_scalar || is_vector));
}

TEST_CASE("span wrappers route through the active table") {
  std::vector<double> a{1, 2, 3, 4, 5}, b{5, 4, 3, 2, 1}, w{1, 1, 1, 1, 1};
  CHECK(msci::simd::sum(a) == 15.0);
  CHECK(msci::simd::dot(a, b) == 35.0);
  CHECK(msci::simd::weighted_dot(a, b, w) == 35.0);
  CHECK(msci::simd::weighted_sq_dev(a, 3.0, w) == 10.0);
  CHECK(msci::simd::weighted_rss(a, b, w) == 40.0);
  CHECK(msci::simd::centered_cross(a, 3.0, b, 3.0) == -10.0);
}
