#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "mfvol/battery.hpp"
#include "mfvol/decomposer.hpp"
#include "mfvol/io.hpp"

namespace mfvol::cli {

namespace fs = std::filesystem;

enum ExitCode : int { kOk = 0, kUsage = 2, kData = 3, kNumerical = 4 };

struct SimulateOptions {
  std::string model = "mrw";
  std::string noise = "gaussian";
  std::size_t n = 12000;
  double lambda2 = 0.03;
  std::size_t horizon = 1000;
  std::uint64_t seed = 1;
  fs::path returns_out;
  std::optional<fs::path> truth_out;
  std::optional<fs::path> prices_out;
};

struct DecomposeOptions {
  std::optional<fs::path> returns_in;
  std::optional<fs::path> prices_in;
  MarketCsvSchema schema;
  std::string date_format = "iso";
  GaConfig ga;
  fs::path decomposition_out;
  fs::path report_out;
};

struct AnalyzeOptions {
  fs::path decomposition_in;
  fs::path report_out;
  std::optional<fs::path> plots_dir;
  BinningConfig grid;
  double significance = 0.01;
  double cost_c = 1.5;
  std::vector<double> q_grid;
  double mf_tolerance = 0.05;
  std::size_t max_lag = 0;  // 0: command default
  double threshold = 1.0;
};

struct BatteryOptions {
  BatteryConfig config;
  fs::path report_out;
};

struct ReportOptions {
  std::vector<fs::path> inputs;
  std::vector<std::string> labels;
  fs::path report_out;
};

// Each returns the process exit code; argv is echoed into the manifest.
int run_simulate(const SimulateOptions& o, const std::vector<std::string>& argv);
int run_decompose(const DecomposeOptions& o, const std::vector<std::string>& argv);
int run_analyze(const std::string& what, const AnalyzeOptions& o,
                const std::vector<std::string>& argv);
int run_battery_command(const BatteryOptions& o, const std::vector<std::string>& argv);
int run_report(const ReportOptions& o, const std::vector<std::string>& argv);

}  // namespace mfvol::cli
