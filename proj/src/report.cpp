#include "mfvol/report.hpp"

#include <fstream>

#include "mfvol/error.hpp"
#include "mfvol/hash.hpp"
#include "mfvol/io.hpp"

namespace mfvol {

using nlohmann::json;

json to_json(const BinningConfig& g) {
  return {{"lo", g.lo}, {"hi", g.hi}, {"width", g.width}, {"bins", g.bins()},
          {"tails", "accumulated"}};
}

json to_json(const KsResult& ks) {
  return {{"statistic_d", ks.statistic_d},
          {"p_value", ks.p_value},
          {"reject", ks.reject},
          {"significance", ks.significance},
          {"label", ks.reject ? "N" : "T"}};
}

json to_json(const GaConfig& c) {
  return {{"population", c.population},
          {"generations", c.generations},
          {"crossover_fraction", c.crossover_fraction},
          {"mutation_rate", c.mutation_rate},
          {"cost_c", c.cost_c},
          {"window", c.window},
          {"window_anchor", "forward"},
          {"seed", c.seed},
          {"init_spread", c.init_spread},
          {"mutation_step", c.mutation_step},
          {"gene_clamp", c.gene_clamp},
          {"plateau_generations", c.plateau_generations},
          {"plateau_tolerance", c.plateau_tolerance},
          {"grid", to_json(c.grid)}};
}

json to_json(const DeviationReport& r) {
  json j{{"delta_w", r.delta_w}, {"ks_dw", to_json(r.ks_dw)}, {"final_cost", r.final_cost}};
  if (r.delta_dln_sigma) {
    j["delta_dln_sigma"] = *r.delta_dln_sigma;
    j["ks_dln_sigma"] = to_json(*r.ks_dln_sigma);
    j["dln_sigma_degenerate"] = false;
  } else {
    j["delta_dln_sigma"] = nullptr;
    j["ks_dln_sigma"] = nullptr;
    j["dln_sigma_degenerate"] = true;
  }
  return j;
}

json to_json(const ScalingSpectrum& s) {
  json moments = json::array();
  for (const auto& row : s.surface.moments) moments.push_back(row);
  return {{"q_grid", s.surface.q_grid},
          {"t_grid", s.surface.t_grid},
          {"increments", "overlapping"},
          {"moments", moments},
          {"f_of_q", s.fit.f_of_q},
          {"log_prefactor", s.fit.log_prefactor},
          {"fit_r2", s.fit.r2},
          {"slope_stderr", s.fit.slope_stderr},
          {"hurst", s.hurst},
          {"linear_h", s.linear_h},
          {"classification", std::string(to_string(s.classification))},
          {"concave_within_error", concavity_violations(s).empty()}};
}

json to_json(const CorrelationCurve& c) {
  return {{"lags", c.lags}, {"values", c.values}, {"n_pairs", c.n_pairs}, {"band", c.band}};
}

json make_report(const std::string& command, json parameters) {
  return {{"schema_version", kSchemaVersion},
          {"toolkit_version", kToolkitVersion},
          {"command", command},
          {"parameters", std::move(parameters)}};
}

json array_or_sidecar(std::span<const double> values, const std::string& name,
                      const std::filesystem::path& report_path,
                      std::vector<std::filesystem::path>* written) {
  if (values.size() <= kInlineArrayLimit) return json(std::vector<double>(values.begin(), values.end()));
  const auto sidecar = report_path.parent_path() /
                       (report_path.stem().string() + "." + name + ".txt");
  const Column col{name, values};
  write_plot(sidecar, std::span(&col, 1));
  if (written) written->push_back(sidecar);
  return {{"path", sidecar.filename().string()},
          {"sha256", sha256_file(sidecar)},
          {"length", values.size()}};
}

std::string dump_report(const json& report) { return report.dump(2) + "\n"; }

void write_json(const std::filesystem::path& path, const json& doc) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write '" + path.string() + "'");
  out << dump_report(doc);
  if (!out) throw DataError("failed writing '" + path.string() + "'");
}

json read_json(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot read '" + path.string() + "'");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw DataError(path.string() + ": invalid JSON: " + e.what());
  }
}

RunManifest::RunManifest(std::string command, std::vector<std::string> argv) {
  doc_ = {{"schema_version", kSchemaVersion},
          {"toolkit_version", kToolkitVersion},
          {"command", std::move(command)},
          {"argv", std::move(argv)},
          {"parameters", json::object()},
          {"seeds", json::object()},
          {"inputs", json::array()},
          {"outputs", json::array()}};
}

void RunManifest::set_parameters(json parameters) { doc_["parameters"] = std::move(parameters); }
void RunManifest::set_ga_config(const GaConfig& config) { doc_["ga_config"] = to_json(config); }
void RunManifest::set_grid(const BinningConfig& grid) { doc_["grid"] = to_json(grid); }
void RunManifest::add_seed(const std::string& name, std::uint64_t seed) { doc_["seeds"][name] = seed; }

void RunManifest::add_input(const std::filesystem::path& path) {
  doc_["inputs"].push_back({{"path", path.string()}, {"sha256", sha256_file(path)}});
}

void RunManifest::add_output(const std::filesystem::path& path) {
  doc_["outputs"].push_back({{"path", path.string()}, {"sha256", sha256_file(path)}});
}

void RunManifest::set_wall_seconds(double seconds) { doc_["timings"]["wall_seconds"] = seconds; }
void RunManifest::set_worker_count(std::size_t workers) { doc_["workers"] = workers; }

void RunManifest::write(const std::filesystem::path& path) const { write_json(path, doc_); }

}  // namespace mfvol
