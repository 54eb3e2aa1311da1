#pragma once

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

namespace mfvol {

enum class FractalClass { monofractal, multifractal };

std::string_view to_string(FractalClass c);

// M(q, T) = mean over t of |X(t + T) - X(t)|^q using all overlapping pairs.
struct MomentSurface {
  std::vector<double> q_grid;
  std::vector<std::size_t> t_grid;
  std::vector<std::vector<double>> moments;  // [q index][T index]
};

// {0.5, 1.0, ..., 5.0}.
std::vector<double> default_q_grid();
// Dyadic lags {1, 2, ..., 256} no larger than length / 10.
std::vector<std::size_t> default_t_grid(std::size_t length);

// Requires length >= 10 * max(t_grid) and all q > 0. Throws NumericalError
// when every moment vanishes (constant input).
MomentSurface moment_surface(std::span<const double> x, std::span<const double> q_grid,
                             std::span<const std::size_t> t_grid);

struct ScalingFit {
  std::vector<double> f_of_q;
  std::vector<double> log_prefactor;  // ln K_q
  std::vector<double> r2;
  std::vector<double> slope_stderr;
};

// Least-squares ln M vs ln T per q, skipping non-positive cells. Throws
// NumericalError if any q keeps fewer than 4 points.
ScalingFit scaling_exponents(const MomentSurface& surface);

// H = f(2) / 2. Throws ConfigError if q = 2 is not on the grid.
double hurst(std::span<const double> f_of_q, std::span<const double> q_grid);

// Best linear f = qH through the origin.
double linear_exponent(std::span<const double> f_of_q, std::span<const double> q_grid);

// Monofractal iff max_q |f(q) - qH| <= tolerance, H from linear_exponent.
FractalClass classify(std::span<const double> f_of_q, std::span<const double> q_grid,
                      double tolerance = 0.05);

struct ScalingSpectrum {
  MomentSurface surface;
  ScalingFit fit;
  double hurst = 0.0;
  double linear_h = 0.0;
  FractalClass classification = FractalClass::monofractal;
};

ScalingSpectrum scaling_spectrum(std::span<const double> x, std::span<const double> q_grid,
                                 std::span<const std::size_t> t_grid,
                                 double tolerance = 0.05);

// Triples (q_a < q_b < q_c) on which f is convex by more than `k` combined
// slope standard errors. An empty result means concave within fit error.
struct ConcavityViolation {
  std::size_t a, b, c;
  double excess;
};
std::vector<ConcavityViolation> concavity_violations(const ScalingSpectrum& s, double k = 2.0);

// Running sum, the usual path built from increments before moment analysis.
std::vector<double> cumulative_sum(std::span<const double> increments);

}  // namespace mfvol
