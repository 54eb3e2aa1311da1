#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "mfvol/correlations.hpp"
#include "mfvol/decomposer.hpp"
#include "mfvol/distributions.hpp"
#include "mfvol/fractal.hpp"

namespace mfvol {

inline constexpr int kSchemaVersion = 1;
inline constexpr const char* kToolkitVersion = "0.1.0";
// Arrays longer than this are written to a sidecar file instead of inline.
inline constexpr std::size_t kInlineArrayLimit = 10000;

nlohmann::json to_json(const BinningConfig& g);
nlohmann::json to_json(const KsResult& ks);
nlohmann::json to_json(const GaConfig& c);
nlohmann::json to_json(const DeviationReport& r);
nlohmann::json to_json(const ScalingSpectrum& s);
nlohmann::json to_json(const CorrelationCurve& c);

// Report skeleton: schema_version, toolkit_version, command, parameters.
nlohmann::json make_report(const std::string& command, nlohmann::json parameters);

// Stores `values` inline when short enough; otherwise writes a one-column
// sidecar next to `report_path` and stores {path, sha256, length}.
nlohmann::json array_or_sidecar(std::span<const double> values, const std::string& name,
                                const std::filesystem::path& report_path,
                                std::vector<std::filesystem::path>* written = nullptr);

// Deterministic serialization (sorted keys, 2-space indent, trailing newline).
std::string dump_report(const nlohmann::json& report);
void write_json(const std::filesystem::path& path, const nlohmann::json& doc);
nlohmann::json read_json(const std::filesystem::path& path);

// Provenance record written after every command's outputs.
class RunManifest {
 public:
  RunManifest(std::string command, std::vector<std::string> argv);

  void set_parameters(nlohmann::json parameters);
  void set_ga_config(const GaConfig& config);
  void set_grid(const BinningConfig& grid);
  void add_seed(const std::string& name, std::uint64_t seed);
  void add_input(const std::filesystem::path& path);
  void add_output(const std::filesystem::path& path);
  void set_wall_seconds(double seconds);
  void set_worker_count(std::size_t workers);

  const nlohmann::json& document() const { return doc_; }
  void write(const std::filesystem::path& path) const;

 private:
  nlohmann::json doc_;
};

}  // namespace mfvol
