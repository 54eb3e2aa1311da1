#include <cmath>
#include <random>

#include "doctest.h"
#include "mfvol/distributions.hpp"
#include "mfvol/error.hpp"
#include "oracles.hpp"

using namespace mfvol;

namespace {

// Exact binned density of a unit-variance uniform on the default grid.
Pdf exact_uniform_pdf(const BinningConfig& g) {
  const double a = std::sqrt(3.0);
  Pdf p{g, std::vector<double>(g.bins(), 0.0), 0.0, 0.0};
  for (std::size_t k = 0; k < g.bins(); ++k) {
    const double lo = std::max(g.edge(k), -a);
    const double hi = std::min(g.edge(k + 1), a);
    if (hi > lo) p.densities[k] = (hi - lo) / (2.0 * a) / g.width;
  }
  return p;
}

Pdf random_pdf(std::mt19937_64& rng, const BinningConfig& g) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Pdf p{g, std::vector<double>(g.bins()), u(rng), u(rng)};
  double total = p.left_tail_mass + p.right_tail_mass;
  for (auto& d : p.densities) {
    d = u(rng) < 0.3 ? 0.0 : u(rng);
    total += d * g.width;
  }
  for (auto& d : p.densities) d /= total;
  p.left_tail_mass /= total;
  p.right_tail_mass /= total;
  return p;
}

}  // namespace

TEST_CASE("standardize examples") {
  std::vector<double> a{-1.0, 1.0};
  CHECK(standardize(a) == std::vector<double>{-1.0, 1.0});
  std::vector<double> b{0.0, 2.0};
  CHECK(standardize(b) == std::vector<double>{-1.0, 1.0});
  std::vector<double> c{3.0, 3.0, 3.0};
  CHECK_THROWS_AS(standardize(c), NumericalError);
  std::vector<double> one{1.0};
  CHECK_THROWS_AS(standardize(one), ConfigError);
  std::vector<double> centered{-2.0, 2.0, 0.0, 0.0};
  const auto rms = standardize(centered, Centering::root_mean_square);
  CHECK(rms[0] == doctest::Approx(-std::sqrt(2.0)));
}

TEST_CASE("property: standardize is affine invariant") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-50.0, 50.0);
  for (int trial = 0; trial < 100; ++trial) {
    const auto x = oracle::normals(5 + trial, trial);
    double a = u(rng);
    if (std::abs(a) < 1e-3) a = 1.0;
    const double b = u(rng);
    std::vector<double> y(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) y[i] = a * x[i] + b;
    const auto sx = standardize(x);
    const auto sy = standardize(y);
    const double sign = a > 0 ? 1.0 : -1.0;
    for (std::size_t i = 0; i < x.size(); ++i) CHECK(sy[i] == doctest::Approx(sign * sx[i]).epsilon(1e-9));
    CHECK(std::abs(oracle::sample_mean(sx)) < 1e-12);
    CHECK(oracle::sample_var(sx) == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("estimate_pdf examples") {
  const BinningConfig g;
  CHECK(g.bins() == 120);
  const auto x = oracle::normals(1000000, 42);
  const Pdf p = estimate_pdf(x, g);
  CHECK(p.total_mass() == doctest::Approx(1.0).epsilon(1e-10));
  double worst = 0.0;
  for (std::size_t k = 0; k < g.bins(); ++k) {
    const double exact = (oracle::Phi(g.edge(k + 1)) - oracle::Phi(g.edge(k))) / g.width;
    worst = std::max(worst, std::abs(p.densities[k] - exact));
  }
  CHECK(worst < 0.01);

  std::vector<double> zeros(50, 0.0);
  const Pdf z = estimate_pdf(zeros, g);
  int nonzero = 0;
  for (std::size_t k = 0; k < g.bins(); ++k) {
    if (z.densities[k] != 0.0) {
      ++nonzero;
      CHECK(z.densities[k] == doctest::Approx(1.0 / g.width));
      CHECK(g.edge(k) <= 0.0);
      CHECK(g.edge(k + 1) > 0.0);
    }
  }
  CHECK(nonzero == 1);

  std::vector<double> big(10, 7.5);
  const Pdf t = estimate_pdf(big, g);
  CHECK(t.right_tail_mass == 1.0);
  CHECK(t.left_tail_mass == 0.0);
  for (double d : t.densities) CHECK(d == 0.0);

  CHECK_THROWS(estimate_pdf(std::vector<double>{}, g));
}

TEST_CASE("gaussian_reference examples") {
  const BinningConfig g;
  const Pdf r = gaussian_reference(g);
  CHECK(std::abs(r.total_mass() - 1.0) < 1e-12);
  for (std::size_t k = 0; k < g.bins(); ++k) {
    CHECK(std::abs(r.densities[k] - r.densities[g.bins() - 1 - k]) < 1e-12);
  }
  const BinningConfig unit{-0.5, 0.5, 1.0};
  const Pdf c = gaussian_reference(unit);
  const double expected = std::erf(0.5 / std::sqrt(2.0));
  CHECK(c.bin_mass(0) == doctest::Approx(expected).epsilon(1e-14));
  CHECK(c.bin_mass(0) == doctest::Approx(0.382925).epsilon(1e-6));
}

TEST_CASE("overlap_deviation examples") {
  const BinningConfig g;
  const Pdf ref = gaussian_reference(g);
  CHECK(overlap_deviation(ref, ref) == 0.0);

  Pdf left{g, std::vector<double>(g.bins(), 0.0), 0.0, 0.0};
  Pdf right = left;
  left.densities[10] = 1.0 / g.width;
  right.densities[100] = 1.0 / g.width;
  CHECK(overlap_deviation(left, right) == doctest::Approx(1.0));
  right.densities[100] = 0.0;
  right.right_tail_mass = 1.0;
  CHECK(overlap_deviation(left, right) == doctest::Approx(1.0));

  // Oracle: half the integrated |uniform - phi| by Simpson quadrature.
  const double quad = 0.5 * oracle::simpson(
      [](double x) { return std::abs(oracle::uniform_pdf(x) - oracle::phi(x)); }, -12.0, 12.0, 2400000);
  CHECK(std::abs(quad - 0.1977) <= 5e-5);
  const double tv = overlap_deviation(exact_uniform_pdf(g), ref);
  CHECK(std::abs(tv - 0.198) <= 0.002);

  const Pdf other = gaussian_reference(BinningConfig{-6.0, 6.0, 0.1});
  CHECK_THROWS_AS(overlap_deviation(ref, other), ConfigError);
}

TEST_CASE("property: overlap_deviation is a metric on same-grid pdfs") {
  const BinningConfig g{-3.0, 3.0, 0.25};
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 300; ++trial) {
    const Pdf p = random_pdf(rng, g), q = random_pdf(rng, g), r = random_pdf(rng, g);
    const double pq = overlap_deviation(p, q);
    CHECK(pq == doctest::Approx(overlap_deviation(q, p)).epsilon(1e-15));
    CHECK(pq >= 0.0);
    CHECK(pq <= 1.0 + 1e-12);
    CHECK(overlap_deviation(p, p) == 0.0);
    CHECK(pq > 0.0);
    CHECK(overlap_deviation(p, r) <= pq + overlap_deviation(q, r) + 1e-12);
  }
}

TEST_CASE("property: refinement-consistent regridding keeps deviation within estimation error") {
  // Same samples on 0.1 and 0.05 grids: the finer grid picks up a little more
  // sampling noise, so the two values must agree within that noise.
  const BinningConfig coarse, fine{coarse.lo, coarse.hi, coarse.width / 2};
  for (int trial = 0; trial < 5; ++trial) {
    auto x = oracle::normals(200000, 900 + trial);
    for (auto& v : x) v = v > 0 ? std::sqrt(v) : -std::sqrt(-v);  // non-Gaussian
    const auto s = standardize(x);
    const double a = overlap_deviation(estimate_pdf(s, coarse), gaussian_reference(coarse));
    const double b = overlap_deviation(estimate_pdf(s, fine), gaussian_reference(fine));
    CHECK(std::abs(a - b) < 0.01);
  }
}

TEST_CASE("GaussianDeviation matches the composed path") {
  const BinningConfig g;
  const GaussianDeviation dev(g);
  std::vector<std::uint32_t> scratch;
  for (int trial = 0; trial < 20; ++trial) {
    auto x = oracle::normals(3000, 50 + trial);
    for (auto& v : x) v = v * v * v + 0.4;
    const double fast = dev(x, Centering::remove_mean, scratch);
    const double slow = overlap_deviation(estimate_pdf(standardize(x), g), gaussian_reference(g));
    CHECK(fast == doctest::Approx(slow).epsilon(1e-12));
    const double fast_rms = dev(x, Centering::root_mean_square, scratch);
    const double slow_rms = overlap_deviation(
        estimate_pdf(standardize(x, Centering::root_mean_square), g), gaussian_reference(g));
    CHECK(fast_rms == doctest::Approx(slow_rms).epsilon(1e-12));
  }
}

TEST_CASE("Kolmogorov survival matches the alternating series") {
  for (double lambda = 0.3; lambda < 3.0; lambda += 0.05) {
    CHECK(kolmogorov_survival(lambda) == doctest::Approx(oracle::kolmogorov_series(lambda)).epsilon(1e-9));
  }
  CHECK(kolmogorov_survival(0.0) == 1.0);
  CHECK(kolmogorov_survival(0.1) == doctest::Approx(1.0).epsilon(1e-12));
  // Tabulated 1% critical value of the limiting distribution.
  CHECK(std::abs(kolmogorov_survival(1.6276) - 0.01) < 2e-5);
}

TEST_CASE("ks_test statistic and decisions") {
  const auto x = oracle::normals(500, 1);
  const KsResult r = ks_test(x);
  CHECK(r.statistic_d == doctest::Approx(oracle::ks_statistic(x)).epsilon(1e-12));
  CHECK(r.reject == (r.p_value < r.significance));
  CHECK(r.statistic_d >= 0.0);
  CHECK(r.statistic_d <= 1.0);
  CHECK_THROWS_AS(ks_test(std::vector<double>(9, 0.0)), ConfigError);

  std::vector<double> shifted(x);
  for (auto& v : shifted) v += 1.0;
  CHECK(ks_test(shifted).reject);
}

TEST_CASE("ks_test seeded acceptance and rejection rates") {
  int accept_normal = 0, reject_uniform = 0, reject_triangle = 0;
  for (int trial = 0; trial < 100; ++trial) {
    std::mt19937_64 rng(7000 + trial);
    std::normal_distribution<double> nd;
    std::uniform_real_distribution<double> ud(-std::sqrt(3.0), std::sqrt(3.0));
    std::vector<double> g(12000), u(12000), t(12000);
    for (auto& v : g) v = nd(rng);
    for (auto& v : u) v = ud(rng);
    for (auto& v : t) v = (ud(rng) + ud(rng)) / std::sqrt(2.0);  // sum of uniforms
    accept_normal += !ks_test(standardize(g)).reject;
    reject_uniform += ks_test(standardize(u)).reject;
    reject_triangle += ks_test(standardize(t)).reject;
  }
  CHECK(accept_normal >= 95);
  CHECK(reject_uniform >= 99);
  CHECK(reject_triangle >= 99);
}

TEST_CASE("property: ks false-rejection rate on true normals is 1% +- 1pt") {
  int rejects = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    rejects += ks_test(oracle::normals(1000, 50000 + trial)).reject;
  }
  CHECK(rejects >= 0);
  CHECK(rejects <= 20);
}
