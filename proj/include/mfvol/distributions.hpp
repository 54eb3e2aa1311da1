#pragma once

#include <cstddef>
#include <cstdint>
#include <numbers>
#include <span>
#include <vector>

namespace mfvol {

// Uniform histogram grid in standardized units. Anything outside [lo, hi)
// lands in the tail accumulators.
//
// The default has 120 bins of width sqrt(3)/17 (about 0.102) over roughly
// [-6.11, 6.11]. Putting +-sqrt(3) on bin edges keeps the jump of the
// unit-variance uniform from cancelling inside a straddling bin; with a plain
// 0.1 width that bin hides about 1.2 points of its deviation from N(0,1).
struct BinningConfig {
  static constexpr double kDefaultWidth = std::numbers::sqrt3 / 17.0;
  double lo = -60.0 * kDefaultWidth;
  double hi = 60.0 * kDefaultWidth;
  double width = kDefaultWidth;

  std::size_t bins() const;
  double edge(std::size_t k) const { return lo + static_cast<double>(k) * width; }
  void validate() const;
  bool operator==(const BinningConfig&) const = default;
};

struct Pdf {
  BinningConfig grid;
  std::vector<double> densities;  // probability per unit, one per bin
  double left_tail_mass = 0.0;
  double right_tail_mass = 0.0;

  double bin_mass(std::size_t k) const { return densities[k] * grid.width; }
  double bin_center(std::size_t k) const { return grid.edge(k) + 0.5 * grid.width; }
  double total_mass() const;
};

enum class Centering {
  remove_mean,        // (x - mean) / stddev
  root_mean_square,   // x / sqrt(<x^2>), for increments assumed centered
};

// Throws NumericalError on zero dispersion, ConfigError on fewer than 2 samples.
std::vector<double> standardize(std::span<const double> samples,
                                Centering centering = Centering::remove_mean);

Pdf estimate_pdf(std::span<const double> standardized,
                 const BinningConfig& grid = {});

// Exact standard-normal bin masses from CDF differences.
Pdf gaussian_reference(const BinningConfig& grid = {});

// Half the L1 distance between the two binned densities including tails.
double overlap_deviation(const Pdf& p, const Pdf& q);

double normal_cdf(double x);

struct KsResult {
  double statistic_d = 0.0;
  double p_value = 1.0;
  bool reject = false;
  double significance = 0.01;
};

// Survival function of the Kolmogorov distribution, P(K > lambda).
double kolmogorov_survival(double lambda);

// One-sample KS against N(0,1). Samples are expected to be standardized by
// the caller; no Lilliefors correction is applied.
KsResult ks_test(std::span<const double> standardized, double significance = 0.01);

// Allocation-light deviation from N(0,1) for repeated evaluation: centers and
// scales `samples` per `centering`, bins them and returns the same quantity as
// overlap_deviation(estimate_pdf(standardize(samples)), gaussian_reference()).
// The result depends only on the bin counts.
class GaussianDeviation {
 public:
  explicit GaussianDeviation(const BinningConfig& grid = {});

  // Throws NumericalError on zero dispersion.
  double operator()(std::span<const double> samples, Centering centering,
                    std::vector<std::uint32_t>& scratch) const;

  const BinningConfig& grid() const { return grid_; }

 private:
  BinningConfig grid_;
  std::vector<double> reference_mass_;
  double left_reference_ = 0.0;
  double right_reference_ = 0.0;
};

}  // namespace mfvol
