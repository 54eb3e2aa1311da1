#include <cmath>

#include "doctest.h"
#include "mfvol/distributions.hpp"
#include "mfvol/error.hpp"
#include "mfvol/fractal.hpp"
#include "mfvol/generators.hpp"
#include "mfvol/numeric.hpp"
#include "oracles.hpp"

using namespace mfvol;

namespace {

constexpr NoiseKind kAllKinds[] = {NoiseKind::gaussian, NoiseKind::rectangular,
                                   NoiseKind::triangular, NoiseKind::skew_triangular};

double kurtosis(const std::vector<double>& x) {
  const double m = oracle::sample_mean(x);
  double m2 = 0.0, m4 = 0.0;
  for (double v : x) {
    const double d = (v - m) * (v - m);
    m2 += d;
    m4 += d * d;
  }
  m2 /= x.size();
  m4 /= x.size();
  return m4 / (m2 * m2);
}

}  // namespace

TEST_CASE("noise kinds round-trip through their names") {
  for (auto k : kAllKinds) CHECK(parse_noise_kind(to_string(k)) == k);
  CHECK_THROWS_AS(parse_noise_kind("cauchy"), ConfigError);
}

TEST_CASE("property: every analytic density has unit mass, zero mean and unit variance") {
  for (auto kind : kAllKinds) {
    CAPTURE(to_string(kind));
    const NoiseDensity d(kind);
    const double lo = std::isfinite(d.support_lo()) ? d.support_lo() : -12.0;
    const double hi = std::isfinite(d.support_hi()) ? d.support_hi() : 12.0;
    // Split at the kinks so Simpson sees smooth pieces.
    std::vector<double> cuts{lo};
    for (double k : d.kinks()) {
      if (k > lo && k < hi) cuts.push_back(k);
    }
    cuts.push_back(hi);
    double mass = 0.0, m1 = 0.0, m2 = 0.0;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
      mass += oracle::simpson([&](double x) { return d.pdf(x); }, cuts[i], cuts[i + 1], 20000);
      m1 += oracle::simpson([&](double x) { return x * d.pdf(x); }, cuts[i], cuts[i + 1], 20000);
      m2 += oracle::simpson([&](double x) { return x * x * d.pdf(x); }, cuts[i], cuts[i + 1], 20000);
    }
    CHECK(std::abs(mass - 1.0) < 1e-8);
    CHECK(std::abs(m1) < 1e-8);
    CHECK(std::abs(m2 - 1.0) < 1e-8);
    for (double u : {0.01, 0.3, 0.5, 0.77, 0.99}) {
      CHECK(d.cdf(d.quantile(u)) == doctest::Approx(u).epsilon(1e-10));
    }
  }
}

TEST_CASE("skew triangle is a left-mode triangle standardized") {
  // Raw triangle on [0, 3], mode 1: mean 4/3, variance 7/18.
  const NoiseDensity d(NoiseKind::skew_triangular);
  const double scale = std::sqrt(7.0 / 18.0);
  CHECK(d.support_lo() == doctest::Approx(-4.0 / 3.0 / scale));
  CHECK(d.support_hi() == doctest::Approx((3.0 - 4.0 / 3.0) / scale));
  const double mode = (1.0 - 4.0 / 3.0) / scale;
  CHECK(d.pdf(mode) == doctest::Approx(2.0 / 3.0 * scale));
}

TEST_CASE("gen_noise sample properties") {
  const auto g = gen_noise(NoiseKind::gaussian, 200000, 1).values;
  CHECK(std::abs(oracle::sample_mean(g)) < 0.01);
  CHECK(std::abs(oracle::sample_var(g) - 1.0) < 0.02);

  const auto r = gen_noise(NoiseKind::rectangular, 20000, 2).values;
  for (double x : r) CHECK(std::abs(x) <= std::sqrt(3.0));
  const auto t = gen_noise(NoiseKind::triangular, 20000, 3).values;
  for (double x : t) CHECK(std::abs(x) <= std::sqrt(6.0));

  for (auto kind : kAllKinds) {
    const auto a = gen_noise(kind, 1000, 99).values;
    const auto b = gen_noise(kind, 1000, 99).values;
    CHECK(a == b);
    CHECK(a != gen_noise(kind, 1000, 100).values);
  }
  CHECK_THROWS_AS(gen_noise(NoiseKind::gaussian, 1, 0), ConfigError);
}

TEST_CASE("intrinsic deviation matches independent quadrature") {
  CHECK(intrinsic_deviation(NoiseKind::gaussian) == 0.0);
  const double rect = 0.5 * oracle::simpson(
      [](double x) { return std::abs(oracle::uniform_pdf(x) - oracle::phi(x)); }, -12, 12, 2400000);
  const double tri = 0.5 * oracle::simpson(
      [](double x) { return std::abs(oracle::triangle_pdf(x) - oracle::phi(x)); }, -12, 12, 2400000);
  CHECK(intrinsic_deviation(NoiseKind::rectangular) == doctest::Approx(rect).epsilon(1e-5));
  CHECK(intrinsic_deviation(NoiseKind::triangular) == doctest::Approx(tri).epsilon(1e-5));
  CHECK(std::abs(intrinsic_deviation(NoiseKind::rectangular) - 0.198) <= 0.001);
  CHECK(std::abs(intrinsic_deviation(NoiseKind::triangular) - 0.051) <= 0.001);
  const double skew = intrinsic_deviation(NoiseKind::skew_triangular);
  CHECK(skew > 0.05);
  CHECK(skew < 0.2);
}

TEST_CASE("MRW log covariance") {
  const auto c = mrw_log_covariance(0.03, 1000, 1500);
  CHECK(c[0] == doctest::Approx(0.03 * std::log(1000.0)));
  CHECK(c[9] == doctest::Approx(0.03 * std::log(100.0)));
  CHECK(c[999] == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(c[1200] == 0.0);
}

TEST_CASE("MRW parameter validation") {
  MrwParams p;
  p.horizon = p.n + 1;
  CHECK_THROWS_AS(gen_mrw(p), ConfigError);
  p.horizon = 0;
  CHECK_THROWS_AS(gen_mrw(p), ConfigError);
  p.horizon = 10;
  p.lambda2 = -0.1;
  CHECK_THROWS_AS(gen_mrw(p), ConfigError);
}

TEST_CASE("MRW with lambda2 = 0 is the plain noise generator") {
  for (auto kind : kAllKinds) {
    for (std::size_t n : {std::size_t{1000}, std::size_t{5000}}) {
      MrwParams p;
      p.n = n;
      p.lambda2 = 0.0;
      p.horizon = 10;
      p.noise = kind;
      p.seed = 31;
      const auto s = gen_mrw(p);
      CHECK(s.returns.values == gen_noise(kind, n, 31).values);
      for (double sg : s.truth.sigma) CHECK(sg == 1.0);
    }
  }
}

TEST_CASE("MRW ground truth reconstructs exactly and is heavy tailed") {
  MrwParams p;
  p.seed = 4;
  const auto s = gen_mrw(p);
  REQUIRE(s.returns.values.size() == p.n);
  CHECK(s.truth.max_reconstruction_error() < 1e-12);
  for (std::size_t i = 0; i < p.n; ++i) {
    CHECK(s.truth.sigma[i] == doctest::Approx(std::exp(s.log_volatility[i])).epsilon(1e-15));
  }
  CHECK(kurtosis(s.returns.values) > 3.0);
  // E[sigma^2] = 1 keeps the return variance near 1.
  CHECK(std::abs(oracle::sample_var(s.returns.values) - 1.0) < 0.25);
}

TEST_CASE("dense and circulant routes agree in distribution") {
  const auto cov = mrw_log_covariance(0.05, 200, 2000);
  const std::size_t n = 2000;
  const int reps = 60;
  // Oracle: the target covariance itself; compare empirical lag covariances.
  for (std::size_t lag : {0, 1, 10, 100, 300}) {
    double dense = 0.0, circ = 0.0;
    for (int r = 0; r < reps; ++r) {
      const auto a = gaussian_process_dense(cov, n, 100 + r);
      const auto b = gaussian_process_circulant(cov, n, 500 + r);
      double sa = 0.0, sb = 0.0;
      for (std::size_t i = 0; i + lag < n; ++i) {
        sa += a[i] * a[i + lag];
        sb += b[i] * b[i + lag];
      }
      dense += sa / (n - lag);
      circ += sb / (n - lag);
    }
    dense /= reps;
    circ /= reps;
    CAPTURE(lag);
    const double target = lag < cov.size() ? cov[lag] : 0.0;
    // Long memory makes the per-path estimate noisy; 0.05 is ~4 standard errors.
    CHECK(std::abs(dense - target) < 0.05);
    CHECK(std::abs(circ - target) < 0.05);
    CHECK(std::abs(dense - circ) < 0.07);
  }
}

TEST_CASE("generated log-volatility follows the logarithmic covariance") {
  MrwParams p;
  const std::size_t reps = 100;
  const std::vector<std::size_t> lags{1, 5, 20, 100, 400};
  std::vector<double> est(lags.size(), 0.0);
  for (std::size_t r = 0; r < reps; ++r) {
    p.seed = 2000 + r;
    const auto s = gen_mrw(p);
    const double m = -p.lambda2 * std::log(static_cast<double>(p.horizon));
    for (std::size_t j = 0; j < lags.size(); ++j) {
      double acc = 0.0;
      for (std::size_t i = 0; i + lags[j] < p.n; ++i) {
        acc += (s.log_volatility[i] - m) * (s.log_volatility[i + lags[j]] - m);
      }
      est[j] += acc / (p.n - lags[j]) / reps;
    }
  }
  for (std::size_t j = 0; j < lags.size(); ++j) {
    const double target = p.lambda2 * std::log(1000.0 / (lags[j] + 1));
    CAPTURE(lags[j]);
    CHECK(std::abs(est[j] - target) < 0.02);
  }
}

TEST_CASE("MRW increments are multifractal, gaussian iid monofractal") {
  // Averaged over realizations; f(q) from the fractal module.
  const auto q = default_q_grid();
  std::vector<double> f(q.size(), 0.0);
  const int reps = 50;
  for (int r = 0; r < reps; ++r) {
    MrwParams p;
    p.n = 65536;
    p.lambda2 = 0.03;
    p.seed = 300 + r;
    const auto path = cumulative_sum(gen_mrw(p).returns.values);
    const auto s = scaling_spectrum(path, q, default_t_grid(path.size()));
    for (std::size_t i = 0; i < q.size(); ++i) f[i] += s.fit.f_of_q[i] / reps;
  }
  const double f2 = f[3], f4 = f[7];
  CHECK(std::abs(f2 - 1.0) <= 0.1);
  CHECK(f4 < 2.0 * f2);
  for (std::size_t i = 1; i + 1 < q.size(); ++i) CHECK(f[i] > 0.5 * (f[i - 1] + f[i + 1]));
}
