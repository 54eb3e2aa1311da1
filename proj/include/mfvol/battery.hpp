#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"
#include "mfvol/decomposer.hpp"
#include "mfvol/generators.hpp"

namespace mfvol {

// One row of the simulated validation table.
struct BatteryCase {
  std::string label;  // "i" .. "vii"
  NoiseKind noise;
  bool mrw;
};

// Cases i-vii: gaussian, rectangular, triangular, then MRW with gaussian,
// rectangular, triangular and skew-triangular noise.
const std::vector<BatteryCase>& battery_cases();

struct BatteryConfig {
  std::size_t realizations = 100;
  std::size_t n = 12000;
  GaConfig ga{};
  double lambda2 = 0.03;
  std::size_t horizon = 1000;
  std::uint64_t seed = 2012;
  double significance = 0.01;
  // Case labels to run; empty means all.
  std::vector<std::string> cases;
  std::size_t workers = 1;

  void validate() const;
};

// Full-scale defaults (100 x 12000, GA 500/500) and the reduced desk-scale
// configuration.
BatteryConfig full_battery();
BatteryConfig desk_battery();

struct RealizationFailure {
  std::size_t index;
  std::string message;
};

struct CaseResult {
  BatteryCase spec;
  double intrinsic = 0.0;           // analytic deviation of the noise law
  double sampled_intrinsic = 0.0;   // mean deviation of the generated noise
  double intrinsic_accept = 0.0;    // fraction of KS accepts on the true noise
  double reconstructed = 0.0;       // mean reconstructed delta W
  double reconstructed_accept = 0.0;
  double reconstructed_dln_sigma = 0.0;
  std::vector<double> per_realization_dw;
  std::vector<std::uint8_t> per_realization_reject;
  std::vector<RealizationFailure> failures;

  // "T" when the majority of KS tests accept normality, else "N".
  std::string intrinsic_label() const;
  std::string reconstructed_label() const;
};

struct BatteryReport {
  BatteryConfig config;
  std::vector<CaseResult> cases;

  const CaseResult& find(const std::string& label) const;
};

// Realization k of case c uses data seed derive_seed(seed, c, k) and GA seed
// derive_seed(data seed, "ga"); realizations run in parallel on `workers`.
BatteryReport run_battery(const BatteryConfig& config);

nlohmann::json to_json(const BatteryReport& report);
std::string format_table(const BatteryReport& report);

}  // namespace mfvol
