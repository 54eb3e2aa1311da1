#pragma once

#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "mfvol/decomposition.hpp"
#include "mfvol/series.hpp"

namespace mfvol {

// All variants have mean 0 and variance 1.
enum class NoiseKind { gaussian, rectangular, triangular, skew_triangular };

std::string_view to_string(NoiseKind kind);
NoiseKind parse_noise_kind(std::string_view name);

// Analytic standardized density of a NoiseKind.
class NoiseDensity {
 public:
  explicit NoiseDensity(NoiseKind kind);

  NoiseKind kind() const { return kind_; }
  double pdf(double x) const;
  double cdf(double x) const;
  double quantile(double u) const;
  // Support bounds; infinite for the Gaussian.
  double support_lo() const { return lo_; }
  double support_hi() const { return hi_; }
  // Points where the density is not smooth (support ends, triangle mode).
  std::vector<double> kinks() const;

 private:
  // Triangular density on [a, b] with mode m in raw units, then
  // x = (raw - shift) / scale.
  double raw_pdf(double y) const;
  double raw_cdf(double y) const;

  NoiseKind kind_;
  double a_ = 0.0, b_ = 0.0, m_ = 0.0;
  double shift_ = 0.0, scale_ = 1.0;
  double lo_ = 0.0, hi_ = 0.0;
};

// n i.i.d. standardized draws; deterministic per seed.
ReturnSeries gen_noise(NoiseKind kind, std::size_t n, std::uint64_t seed);

struct MrwParams {
  std::size_t n = 12000;
  double lambda2 = 0.03;
  std::size_t horizon = 1000;
  NoiseKind noise = NoiseKind::gaussian;
  std::uint64_t seed = 0;

  void validate() const;
};

struct MrwSample {
  ReturnSeries returns;
  Decomposition truth;  // sigma = exp(omega), dw = epsilon, mu = 0
  std::vector<double> log_volatility;
};

// r_i = sigma_i eps_i with ln sigma a stationary Gaussian process,
// Cov(omega_i, omega_j) = lambda2 ln(horizon / (|i-j| + 1)) for |i-j| < horizon
// and E[omega] = -Var(omega) so that E[sigma^2] = 1.
MrwSample gen_mrw(const MrwParams& params);

// Autocovariance of omega at lags 0..max_lag.
std::vector<double> mrw_log_covariance(double lambda2, std::size_t horizon,
                                       std::size_t max_lag);

// Zero-mean stationary Gaussian samples with the given autocovariance
// (cov[k] for lags 0.., zero beyond). Circulant embedding via FFT.
// Throws NumericalError if the embedding has materially negative eigenvalues.
std::vector<double> gaussian_process_circulant(std::span<const double> cov,
                                               std::size_t n, std::uint64_t seed);

// Same distribution via a dense factorization of the n x n Toeplitz matrix.
std::vector<double> gaussian_process_dense(std::span<const double> cov,
                                           std::size_t n, std::uint64_t seed);

// Size at which gen_mrw switches from the dense to the circulant route.
inline constexpr std::size_t kCirculantThreshold = 4096;

// Half the integrated |density - phi| by adaptive quadrature.
double intrinsic_deviation(NoiseKind kind);

}  // namespace mfvol
