#pragma once

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

namespace mfvol {

struct CorrelationCurve {
  std::vector<std::size_t> lags;
  std::vector<double> values;
  std::vector<std::size_t> n_pairs;
  // 2 / sqrt(n_pairs) per lag.
  std::vector<double> band;

  // Fraction of lags in [first, last] with |value| < band_level.
  double fraction_within(double band_level, std::size_t first, std::size_t last) const;
};

// Sample autocorrelation about the global mean. Each lag is normalized by
// the root product of the sums of squares of the two overlapping segments,
// so lag 0 is exactly 1 and |value| <= 1. Requires length > 4 * max_lag.
CorrelationCurve autocorr(std::span<const double> x, std::size_t max_lag);

// autocorr of |x|.
CorrelationCurve abs_autocorr(std::span<const double> x, std::size_t max_lag);

enum class Conditioning { none, negative_only, positive_only };

std::string_view to_string(Conditioning c);
Conditioning parse_conditioning(std::string_view name);

// L(n) = <(a(t) - ma)(b(t + n) - mb)> / (sa sb) with global means and
// standard deviations. Conditioned variants average only over t where the
// standardized a(t) lies below -threshold or above +threshold.
// Requires equal lengths and max_lag < length / 4; a conditioning subset with
// fewer than 30 points is rejected.
CorrelationCurve leverage(std::span<const double> a, std::span<const double> b,
                          std::size_t max_lag, Conditioning conditioning = Conditioning::none,
                          double threshold = 1.0);

// Unconditioned cross-correlation at a signed lag: <a(t) b(t + lag)>.
double cross_correlation(std::span<const double> a, std::span<const double> b,
                         std::ptrdiff_t lag);

}  // namespace mfvol
