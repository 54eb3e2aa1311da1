#include "mfvol/distributions.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "mfvol/error.hpp"
#include "mfvol/numeric.hpp"

namespace mfvol {

namespace {

struct Scale {
  double center;
  double spread;
};

Scale compute_scale(std::span<const double> samples, Centering centering) {
  if (samples.size() < 2) {
    throw ConfigError("standardization needs at least 2 samples");
  }
  Scale s{};
  if (centering == Centering::remove_mean) {
    s.center = mean(samples);
    s.spread = population_stddev(samples);
  } else {
    s.center = 0.0;
    s.spread = root_mean_square(samples);
  }
  if (!(s.spread > 0.0) || !std::isfinite(s.spread)) {
    throw NumericalError("zero or non-finite dispersion; cannot standardize");
  }
  return s;
}

// Bin index in [0, bins) or -1 / bins for the left / right tail.
inline std::ptrdiff_t bin_of(double z, const BinningConfig& grid, std::size_t bins) {
  if (z < grid.lo) return -1;
  const double pos = (z - grid.lo) / grid.width;
  if (!(pos < static_cast<double>(bins))) return static_cast<std::ptrdiff_t>(bins);
  return static_cast<std::ptrdiff_t>(pos);
}

}  // namespace

std::size_t BinningConfig::bins() const {
  return static_cast<std::size_t>(std::llround((hi - lo) / width));
}

void BinningConfig::validate() const {
  if (!(width > 0.0) || !(hi > lo) || !std::isfinite(lo) || !std::isfinite(hi)) {
    throw ConfigError("binning grid needs lo < hi and width > 0");
  }
  const double n = (hi - lo) / width;
  if (std::abs(n - std::round(n)) > 1e-9 * std::max(1.0, n)) {
    throw ConfigError("binning width must divide (hi - lo) evenly");
  }
}

double Pdf::total_mass() const {
  double m = left_tail_mass + right_tail_mass;
  for (std::size_t k = 0; k < densities.size(); ++k) m += bin_mass(k);
  return m;
}

std::vector<double> standardize(std::span<const double> samples, Centering centering) {
  const Scale s = compute_scale(samples, centering);
  std::vector<double> out(samples.size());
  for (std::size_t i = 0; i < samples.size(); ++i) {
    out[i] = (samples[i] - s.center) / s.spread;
  }
  return out;
}

Pdf estimate_pdf(std::span<const double> standardized, const BinningConfig& grid) {
  grid.validate();
  if (standardized.empty()) throw ConfigError("cannot estimate a pdf from no samples");
  const std::size_t bins = grid.bins();
  std::vector<std::size_t> counts(bins, 0);
  std::size_t left = 0, right = 0;
  for (double z : standardized) {
    const auto b = bin_of(z, grid, bins);
    if (b < 0) {
      ++left;
    } else if (b >= static_cast<std::ptrdiff_t>(bins)) {
      ++right;
    } else {
      ++counts[static_cast<std::size_t>(b)];
    }
  }
  const double n = static_cast<double>(standardized.size());
  Pdf pdf;
  pdf.grid = grid;
  pdf.densities.resize(bins);
  for (std::size_t k = 0; k < bins; ++k) {
    pdf.densities[k] = static_cast<double>(counts[k]) / (n * grid.width);
  }
  pdf.left_tail_mass = static_cast<double>(left) / n;
  pdf.right_tail_mass = static_cast<double>(right) / n;
  return pdf;
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

Pdf gaussian_reference(const BinningConfig& grid) {
  grid.validate();
  const std::size_t bins = grid.bins();
  Pdf pdf;
  pdf.grid = grid;
  pdf.densities.resize(bins);
  for (std::size_t k = 0; k < bins; ++k) {
    const double a = grid.edge(k);
    const double b = grid.edge(k + 1);
    // Difference of the smaller tail areas keeps precision on both sides.
    const double mass = (b <= 0.0) ? normal_cdf(b) - normal_cdf(a)
                                   : normal_cdf(-a) - normal_cdf(-b);
    pdf.densities[k] = mass / grid.width;
  }
  pdf.left_tail_mass = normal_cdf(grid.lo);
  pdf.right_tail_mass = normal_cdf(-grid.edge(bins));
  return pdf;
}

double overlap_deviation(const Pdf& p, const Pdf& q) {
  if (!(p.grid == q.grid) || p.densities.size() != q.densities.size()) {
    throw ConfigError("overlap_deviation needs pdfs on identical grids");
  }
  double diff = std::abs(p.left_tail_mass - q.left_tail_mass) +
                std::abs(p.right_tail_mass - q.right_tail_mass);
  for (std::size_t k = 0; k < p.densities.size(); ++k) {
    diff += std::abs(p.bin_mass(k) - q.bin_mass(k));
  }
  return std::clamp(0.5 * diff, 0.0, 1.0);
}

double kolmogorov_survival(double lambda) {
  if (lambda <= 0.0) return 1.0;
  if (lambda < 1.18) {
    // Jacobi theta form of the CDF converges fast for small lambda.
    const double pi2 = std::numbers::pi * std::numbers::pi;
    const double w = -pi2 / (8.0 * lambda * lambda);
    double cdf = 0.0;
    for (int k = 1; k <= 50; k += 2) {
      const double term = std::exp(w * k * k);
      cdf += term;
      if (term < 1e-18) break;
    }
    cdf *= std::sqrt(2.0 * std::numbers::pi) / lambda;
    return std::clamp(1.0 - cdf, 0.0, 1.0);
  }
  double sum = 0.0;
  double sign = 1.0;
  for (int k = 1; k <= 100; ++k) {
    const double term = std::exp(-2.0 * k * k * lambda * lambda);
    sum += sign * term;
    if (term < 1e-18) break;
    sign = -sign;
  }
  return std::clamp(2.0 * sum, 0.0, 1.0);
}

KsResult ks_test(std::span<const double> standardized, double significance) {
  if (standardized.size() < 10) {
    throw ConfigError("KS test needs at least 10 samples, got " +
                      std::to_string(standardized.size()));
  }
  if (!(significance > 0.0 && significance < 1.0)) {
    throw ConfigError("KS significance must lie in (0, 1)");
  }
  std::vector<double> x(standardized.begin(), standardized.end());
  std::sort(x.begin(), x.end());
  const double n = static_cast<double>(x.size());
  double d = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double f = normal_cdf(x[i]);
    d = std::max(d, static_cast<double>(i + 1) / n - f);
    d = std::max(d, f - static_cast<double>(i) / n);
  }
  const double root_n = std::sqrt(n);
  KsResult r;
  r.statistic_d = d;
  // Stephens' finite-sample correction of the asymptotic statistic.
  r.p_value = kolmogorov_survival((root_n + 0.12 + 0.11 / root_n) * d);
  r.significance = significance;
  r.reject = r.p_value < significance;
  return r;
}

GaussianDeviation::GaussianDeviation(const BinningConfig& grid) : grid_(grid) {
  const Pdf ref = gaussian_reference(grid);
  reference_mass_.resize(ref.densities.size());
  for (std::size_t k = 0; k < ref.densities.size(); ++k) {
    reference_mass_[k] = ref.bin_mass(k);
  }
  left_reference_ = ref.left_tail_mass;
  right_reference_ = ref.right_tail_mass;
}

double GaussianDeviation::operator()(std::span<const double> samples, Centering centering,
                                     std::vector<std::uint32_t>& scratch) const {
  const Scale s = compute_scale(samples, centering);
  const std::size_t bins = reference_mass_.size();
  scratch.assign(bins + 2, 0);
  for (double x : samples) {
    const double z = (x - s.center) / s.spread;
    ++scratch[static_cast<std::size_t>(bin_of(z, grid_, bins) + 1)];
  }
  const double n = static_cast<double>(samples.size());
  double diff = std::abs(static_cast<double>(scratch[0]) / n - left_reference_) +
                std::abs(static_cast<double>(scratch[bins + 1]) / n - right_reference_);
  for (std::size_t k = 0; k < bins; ++k) {
    diff += std::abs(static_cast<double>(scratch[k + 1]) / n - reference_mass_[k]);
  }
  return std::clamp(0.5 * diff, 0.0, 1.0);
}

}  // namespace mfvol
