#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "mfvol/decomposition.hpp"
#include "mfvol/distributions.hpp"
#include "mfvol/series.hpp"

namespace mfvol {

struct SigmaPath {
  std::vector<double> sigma;
  // Steps whose window held only zeros and were lifted to the sigma floor.
  std::size_t floored = 0;
};

// sigma_i = sqrt(mean of r_j^2 over j in [i, i + window)), truncated at the
// end of the series. All-zero windows are floored at 1e-8 * RMS(returns).
SigmaPath moving_window_volatility(const ReturnSeries& returns, std::size_t window);

struct CostBreakdown {
  double total = 0.0;
  double dev_dw = 0.0;
  double dev_dln_sigma = 0.0;
  // dln(sigma) had zero dispersion; its contribution is 0.
  bool dln_sigma_degenerate = false;
};

// F = c * dev(dW) + dev(dln sigma), both measured against N(0,1) on `grid`.
// dW = r / sigma is standardized by mean and deviation, dln(sigma) by its
// root mean square. Any non-positive sigma yields an infinite total.
CostBreakdown cost(std::span<const double> sigma, std::span<const double> returns,
                   double c, const BinningConfig& grid = {});

struct GaConfig {
  std::size_t population = 500;
  std::size_t generations = 500;
  double crossover_fraction = 0.20;
  double mutation_rate = 0.02;
  double cost_c = 1.5;
  std::size_t window = 25;
  std::uint64_t seed = 1;

  // Standard deviation of the ln(sigma) perturbation applied to the seed path
  // for chromosomes 1..population-1.
  double init_spread = 0.1;
  // Standard deviation of a mutation step in ln(sigma).
  double mutation_step = 0.05;
  // Genes stay within +-gene_clamp of the seed's ln(sigma).
  double gene_clamp = 3.0;
  // Stop when the best cost improved by less than plateau_tolerance over the
  // last plateau_generations generations. 0 disables the check.
  std::size_t plateau_generations = 50;
  double plateau_tolerance = 1e-5;

  BinningConfig grid{};
  // Threads for fitness evaluation. Results do not depend on it.
  std::size_t workers = 1;

  void validate() const;
};

struct DeviationReport {
  double delta_w = 0.0;
  // Empty when dln(sigma) is degenerate (constant sigma path).
  std::optional<double> delta_dln_sigma;
  KsResult ks_dw;
  std::optional<KsResult> ks_dln_sigma;
  double final_cost = 0.0;
};

// Overlap deviations of dW and dln(sigma) from N(0,1) plus KS tests.
DeviationReport deviation_metrics(const Decomposition& d, const BinningConfig& grid = {},
                                  double significance = 0.01, double cost_c = 1.5);

struct GaResult {
  Decomposition decomposition;
  DeviationReport report;
  // Best cost after initialization (index 0) and after each generation.
  std::vector<double> history;
  std::size_t generations_run = 0;
  bool plateau_stop = false;
  std::size_t floored_steps = 0;
};

// Genetic search over per-step ln(sigma) paths seeded from the moving-window
// estimate. Requires demeaned, finite returns with length >= 2 * window.
GaResult ga_optimize(const ReturnSeries& returns, const GaConfig& config);

}  // namespace mfvol
