#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace mfvol {

// How PriceSeries stamps are interpreted. Calendar stamps are days since
// 1970-01-01; step stamps are plain integer indices (synthetic series).
enum class TimeAxis { steps, calendar_days };

// Positive prices with strictly increasing stamps. Immutable once built.
class PriceSeries {
 public:
  // Empty `stamps` means consecutive step indices 0..n-1.
  explicit PriceSeries(std::vector<double> prices,
                       std::vector<std::int64_t> stamps = {},
                       TimeAxis axis = TimeAxis::steps);

  std::span<const double> prices() const { return prices_; }
  std::span<const std::int64_t> stamps() const { return stamps_; }
  TimeAxis axis() const { return axis_; }
  std::size_t size() const { return prices_.size(); }

 private:
  std::vector<double> prices_;
  std::vector<std::int64_t> stamps_;
  TimeAxis axis_;
};

struct ReturnSeries {
  std::vector<double> values;
  bool mean_removed = false;
  // Removed per-step mean; zero until demean() runs.
  double mu = 0.0;
};

// values[i] = ln(prices[i+1] / prices[i]).
ReturnSeries log_returns(const PriceSeries& series);

// Subtracts the sample mean and records it in `mu`. Throws ConfigError when
// the input is already demeaned.
ReturnSeries demean(const ReturnSeries& returns);

// Inverse of log_returns: S_0, S_0 e^{r_0}, ... (length values.size() + 1).
std::vector<double> prices_from_returns(double first_price,
                                        std::span<const double> values);

std::string format_stamp(std::int64_t stamp, TimeAxis axis);

}  // namespace mfvol
