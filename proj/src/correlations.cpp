#include "mfvol/correlations.hpp"

#include <cmath>
#include <string>

#include "mfvol/error.hpp"
#include "mfvol/numeric.hpp"

namespace mfvol {

namespace {

constexpr std::size_t kMinConditioned = 30;

void add_band(CorrelationCurve& c) {
  c.band.resize(c.n_pairs.size());
  for (std::size_t k = 0; k < c.n_pairs.size(); ++k) {
    c.band[k] = c.n_pairs[k] > 0 ? 2.0 / std::sqrt(static_cast<double>(c.n_pairs[k])) : 1.0;
  }
}

}  // namespace

double CorrelationCurve::fraction_within(double band_level, std::size_t first,
                                         std::size_t last) const {
  std::size_t total = 0, inside = 0;
  for (std::size_t k = 0; k < lags.size(); ++k) {
    if (lags[k] < first || lags[k] > last) continue;
    ++total;
    if (std::abs(values[k]) < band_level) ++inside;
  }
  return total == 0 ? 0.0 : static_cast<double>(inside) / static_cast<double>(total);
}

CorrelationCurve autocorr(std::span<const double> x, std::size_t max_lag) {
  if (x.size() <= 4 * max_lag) {
    throw ConfigError("autocorrelation needs length > 4 * max_lag");
  }
  const double m = mean(x);
  std::vector<double> c(x.size());
  double total = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    c[i] = x[i] - m;
    total += c[i] * c[i];
  }
  if (!(total > 0.0)) throw NumericalError("zero variance; autocorrelation undefined");

  // head[k] = sum of squares of c[0..n-k), tail[k] = of c[k..n).
  CorrelationCurve out;
  double head = total, tail = total;
  const std::size_t n = x.size();
  for (std::size_t k = 0; k <= max_lag; ++k) {
    if (k > 0) {
      head -= c[n - k] * c[n - k];
      tail -= c[k - 1] * c[k - 1];
    }
    double acc = 0.0;
    for (std::size_t t = 0; t + k < n; ++t) acc += c[t] * c[t + k];
    const double val = k == 0 ? 1.0 : acc / std::sqrt(head * tail);
    out.lags.push_back(k);
    out.values.push_back(val);
    out.n_pairs.push_back(n - k);
  }
  add_band(out);
  return out;
}

CorrelationCurve abs_autocorr(std::span<const double> x, std::size_t max_lag) {
  std::vector<double> a(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) a[i] = std::abs(x[i]);
  return autocorr(a, max_lag);
}

std::string_view to_string(Conditioning c) {
  switch (c) {
    case Conditioning::none: return "none";
    case Conditioning::negative_only: return "negative";
    case Conditioning::positive_only: return "positive";
  }
  return "none";
}

Conditioning parse_conditioning(std::string_view name) {
  for (auto c : {Conditioning::none, Conditioning::negative_only, Conditioning::positive_only}) {
    if (to_string(c) == name) return c;
  }
  throw ConfigError("unknown conditioning '" + std::string(name) + "'");
}

CorrelationCurve leverage(std::span<const double> a, std::span<const double> b,
                          std::size_t max_lag, Conditioning conditioning, double threshold) {
  if (a.size() != b.size()) throw ConfigError("leverage needs equal-length inputs");
  if (4 * max_lag >= a.size()) throw ConfigError("leverage needs max_lag < length / 4");
  const double ma = mean(a), mb = mean(b);
  const double sa = population_stddev(a), sb = population_stddev(b);
  if (!(sa > 0.0) || !(sb > 0.0)) throw NumericalError("zero variance in leverage input");

  const std::size_t n = a.size();
  std::vector<char> selected(n, 1);
  if (conditioning != Conditioning::none) {
    std::size_t count = 0;
    for (std::size_t t = 0; t < n; ++t) {
      const double z = (a[t] - ma) / sa;
      const bool keep = conditioning == Conditioning::negative_only ? z < -threshold
                                                                    : z > threshold;
      selected[t] = keep ? 1 : 0;
      count += keep ? 1 : 0;
    }
    if (count < kMinConditioned) {
      throw NumericalError("conditioning subset has " + std::to_string(count) +
                           " points (< 30)");
    }
  }

  CorrelationCurve out;
  for (std::size_t lag = 0; lag <= max_lag; ++lag) {
    double acc = 0.0;
    std::size_t pairs = 0;
    for (std::size_t t = 0; t + lag < n; ++t) {
      if (!selected[t]) continue;
      acc += (a[t] - ma) * (b[t + lag] - mb);
      ++pairs;
    }
    out.lags.push_back(lag);
    out.values.push_back(pairs > 0 ? acc / (static_cast<double>(pairs) * sa * sb) : 0.0);
    out.n_pairs.push_back(pairs);
  }
  add_band(out);
  return out;
}

double cross_correlation(std::span<const double> a, std::span<const double> b,
                         std::ptrdiff_t lag) {
  if (a.size() != b.size()) throw ConfigError("cross correlation needs equal lengths");
  const auto n = static_cast<std::ptrdiff_t>(a.size());
  if (lag >= n || -lag >= n) throw ConfigError("lag exceeds series length");
  const double ma = mean(a), mb = mean(b);
  const double sa = population_stddev(a), sb = population_stddev(b);
  if (!(sa > 0.0) || !(sb > 0.0)) throw NumericalError("zero variance in correlation input");
  double acc = 0.0;
  std::size_t pairs = 0;
  for (std::ptrdiff_t t = 0; t < n; ++t) {
    const std::ptrdiff_t u = t + lag;
    if (u < 0 || u >= n) continue;
    acc += (a[static_cast<std::size_t>(t)] - ma) * (b[static_cast<std::size_t>(u)] - mb);
    ++pairs;
  }
  return acc / (static_cast<double>(pairs) * sa * sb);
}

}  // namespace mfvol
