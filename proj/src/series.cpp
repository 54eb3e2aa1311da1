#include "mfvol/series.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>

#include "mfvol/error.hpp"
#include "mfvol/numeric.hpp"

namespace mfvol {

PriceSeries::PriceSeries(std::vector<double> prices,
                         std::vector<std::int64_t> stamps, TimeAxis axis)
    : prices_(std::move(prices)), stamps_(std::move(stamps)), axis_(axis) {
  if (prices_.size() < 2) {
    throw DataError("price series needs at least 2 entries, got " +
                    std::to_string(prices_.size()));
  }
  for (std::size_t i = 0; i < prices_.size(); ++i) {
    if (!(prices_[i] > 0.0) || !std::isfinite(prices_[i])) {
      throw DataError("non-positive or non-finite price at index " +
                      std::to_string(i));
    }
  }
  if (stamps_.empty()) {
    stamps_.resize(prices_.size());
    for (std::size_t i = 0; i < stamps_.size(); ++i) {
      stamps_[i] = static_cast<std::int64_t>(i);
    }
    axis_ = TimeAxis::steps;
  }
  if (stamps_.size() != prices_.size()) {
    throw DataError("stamp count does not match price count");
  }
  for (std::size_t i = 1; i < stamps_.size(); ++i) {
    if (stamps_[i] <= stamps_[i - 1]) {
      throw DataError("stamps not strictly increasing at index " +
                      std::to_string(i));
    }
  }
}

ReturnSeries log_returns(const PriceSeries& series) {
  const auto p = series.prices();
  ReturnSeries out;
  out.values.resize(p.size() - 1);
  for (std::size_t i = 0; i + 1 < p.size(); ++i) {
    out.values[i] = std::log(p[i + 1] / p[i]);
  }
  return out;
}

ReturnSeries demean(const ReturnSeries& returns) {
  if (returns.mean_removed) {
    throw ConfigError("return series is already demeaned");
  }
  ReturnSeries out;
  out.mu = mean(returns.values);
  out.values.resize(returns.values.size());
  for (std::size_t i = 0; i < returns.values.size(); ++i) {
    out.values[i] = returns.values[i] - out.mu;
  }
  out.mean_removed = true;
  return out;
}

std::vector<double> prices_from_returns(double first_price,
                                        std::span<const double> values) {
  std::vector<double> prices(values.size() + 1);
  prices[0] = first_price;
  double log_level = std::log(first_price);
  double comp = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    // Kahan-compensated running log level.
    const double y = values[i] - comp;
    const double t = log_level + y;
    comp = (t - log_level) - y;
    log_level = t;
    prices[i + 1] = std::exp(log_level);
  }
  return prices;
}

std::string format_stamp(std::int64_t stamp, TimeAxis axis) {
  if (axis == TimeAxis::steps) return std::to_string(stamp);
  const std::chrono::year_month_day ymd{
      std::chrono::sys_days{std::chrono::days{stamp}}};
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(ymd.year()),
                static_cast<unsigned>(ymd.month()),
                static_cast<unsigned>(ymd.day()));
  return buf;
}

}  // namespace mfvol
