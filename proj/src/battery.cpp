#include "mfvol/battery.hpp"

#include <algorithm>
#include <cstdio>
#include <sstream>

#include "mfvol/distributions.hpp"
#include "mfvol/error.hpp"
#include "mfvol/numeric.hpp"
#include "mfvol/parallel.hpp"
#include "mfvol/report.hpp"

namespace mfvol {

namespace {

constexpr std::uint64_t kGaStream = 0x6761;  // "ga"

struct Outcome {
  bool ok = false;
  std::string error;
  double sampled_intrinsic = 0.0;
  bool intrinsic_reject = false;
  double reconstructed = 0.0;
  bool reconstructed_reject = false;
  double dln_sigma = 0.0;
};

Outcome run_one(const BatteryConfig& cfg, const BatteryCase& bc, std::size_t case_index,
                std::size_t k) {
  Outcome o;
  try {
    MrwParams p;
    p.n = cfg.n;
    p.lambda2 = bc.mrw ? cfg.lambda2 : 0.0;
    p.horizon = std::min(cfg.horizon, cfg.n);
    p.noise = bc.noise;
    p.seed = derive_seed(cfg.seed, case_index, k);
    const MrwSample sample = gen_mrw(p);

    const auto truth_dw = standardize(sample.truth.dw);
    o.sampled_intrinsic =
        overlap_deviation(estimate_pdf(truth_dw, cfg.ga.grid), gaussian_reference(cfg.ga.grid));
    o.intrinsic_reject = ks_test(truth_dw, cfg.significance).reject;

    GaConfig ga = cfg.ga;
    ga.seed = derive_seed(p.seed, kGaStream);
    ga.workers = 1;
    const GaResult res = ga_optimize(demean(sample.returns), ga);
    const DeviationReport rep =
        deviation_metrics(res.decomposition, cfg.ga.grid, cfg.significance, ga.cost_c);
    o.reconstructed = rep.delta_w;
    o.reconstructed_reject = rep.ks_dw.reject;
    o.dln_sigma = rep.delta_dln_sigma.value_or(0.0);
    o.ok = true;
  } catch (const std::exception& e) {
    o.error = e.what();
  }
  return o;
}

std::string percent(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.1f%%", 100.0 * v);
  return buf;
}

}  // namespace

const std::vector<BatteryCase>& battery_cases() {
  static const std::vector<BatteryCase> cases{
      {"i", NoiseKind::gaussian, false},        {"ii", NoiseKind::rectangular, false},
      {"iii", NoiseKind::triangular, false},    {"iv", NoiseKind::gaussian, true},
      {"v", NoiseKind::rectangular, true},      {"vi", NoiseKind::triangular, true},
      {"vii", NoiseKind::skew_triangular, true}};
  return cases;
}

void BatteryConfig::validate() const {
  if (realizations < 1) throw ConfigError("battery needs at least one realization");
  ga.validate();
  if (n < 2 * ga.window) throw ConfigError("battery series length below 2 * window");
  if (!(significance > 0.0 && significance < 1.0)) {
    throw ConfigError("significance must lie in (0, 1)");
  }
  for (const auto& label : cases) {
    const auto& all = battery_cases();
    if (std::none_of(all.begin(), all.end(),
                     [&](const BatteryCase& c) { return c.label == label; })) {
      throw ConfigError("unknown battery case '" + label + "'");
    }
  }
}

BatteryConfig full_battery() { return BatteryConfig{}; }

BatteryConfig desk_battery() {
  BatteryConfig c;
  c.realizations = 10;
  c.n = 4000;
  c.ga.population = 100;
  c.ga.generations = 100;
  return c;
}

std::string CaseResult::intrinsic_label() const { return intrinsic_accept >= 0.5 ? "T" : "N"; }
std::string CaseResult::reconstructed_label() const {
  return reconstructed_accept >= 0.5 ? "T" : "N";
}

const CaseResult& BatteryReport::find(const std::string& label) const {
  for (const auto& c : cases) {
    if (c.spec.label == label) return c;
  }
  throw ConfigError("battery report has no case '" + label + "'");
}

BatteryReport run_battery(const BatteryConfig& config) {
  config.validate();
  std::vector<std::pair<std::size_t, BatteryCase>> selected;
  const auto& all = battery_cases();
  for (std::size_t c = 0; c < all.size(); ++c) {
    if (config.cases.empty() ||
        std::find(config.cases.begin(), config.cases.end(), all[c].label) != config.cases.end()) {
      selected.emplace_back(c, all[c]);
    }
  }

  const std::size_t reps = config.realizations;
  std::vector<Outcome> outcomes(selected.size() * reps);
  parallel_for(outcomes.size(), std::max<std::size_t>(1, config.workers), [&](std::size_t t) {
    const auto& [case_index, bc] = selected[t / reps];
    outcomes[t] = run_one(config, bc, case_index, t % reps);
  });

  BatteryReport report;
  report.config = config;
  for (std::size_t s = 0; s < selected.size(); ++s) {
    CaseResult r;
    r.spec = selected[s].second;
    r.intrinsic = intrinsic_deviation(r.spec.noise);
    std::size_t ok = 0, intrinsic_accepts = 0, reconstructed_accepts = 0;
    for (std::size_t k = 0; k < reps; ++k) {
      const Outcome& o = outcomes[s * reps + k];
      if (!o.ok) {
        r.failures.push_back({k, o.error});
        continue;
      }
      ++ok;
      r.sampled_intrinsic += o.sampled_intrinsic;
      r.reconstructed += o.reconstructed;
      r.reconstructed_dln_sigma += o.dln_sigma;
      intrinsic_accepts += o.intrinsic_reject ? 0 : 1;
      reconstructed_accepts += o.reconstructed_reject ? 0 : 1;
      r.per_realization_dw.push_back(o.reconstructed);
      r.per_realization_reject.push_back(o.reconstructed_reject ? 1 : 0);
    }
    if (ok > 0) {
      const double d = static_cast<double>(ok);
      r.sampled_intrinsic /= d;
      r.reconstructed /= d;
      r.reconstructed_dln_sigma /= d;
      r.intrinsic_accept = static_cast<double>(intrinsic_accepts) / d;
      r.reconstructed_accept = static_cast<double>(reconstructed_accepts) / d;
    }
    report.cases.push_back(std::move(r));
  }
  return report;
}

nlohmann::json to_json(const BatteryReport& report) {
  using nlohmann::json;
  const auto& c = report.config;
  json cfg{{"realizations", c.realizations}, {"n", c.n},
           {"lambda2", c.lambda2},           {"horizon", c.horizon},
           {"seed", c.seed},                 {"significance", c.significance},
           {"ga", to_json(c.ga)},            {"cases", c.cases}};
  json rows = json::array();
  for (const auto& r : report.cases) {
    json failures = json::array();
    for (const auto& f : r.failures) failures.push_back({{"index", f.index}, {"error", f.message}});
    rows.push_back({{"case", r.spec.label},
                    {"noise", std::string(to_string(r.spec.noise))},
                    {"model", r.spec.mrw ? "mrw" : "iid"},
                    {"intrinsic_dw", r.intrinsic},
                    {"intrinsic_ks", r.intrinsic_label()},
                    {"intrinsic_ks_accept_fraction", r.intrinsic_accept},
                    {"sampled_intrinsic_dw", r.sampled_intrinsic},
                    {"reconstructed_dw", r.reconstructed},
                    {"reconstructed_ks", r.reconstructed_label()},
                    {"reconstructed_ks_accept_fraction", r.reconstructed_accept},
                    {"reconstructed_dln_sigma", r.reconstructed_dln_sigma},
                    {"per_realization_dw", r.per_realization_dw},
                    {"per_realization_ks_reject", r.per_realization_reject},
                    {"failures", failures}});
  }
  return {{"config", cfg}, {"table", rows}};
}

std::string format_table(const BatteryReport& report) {
  std::ostringstream out;
  out << "case  noise            model  intrinsic  KS  reconstructed  KS  failed\n";
  for (const auto& r : report.cases) {
    char line[160];
    std::snprintf(line, sizeof line, "%-5s %-16s %-6s %9s  %-2s  %13s  %-2s  %zu\n",
                  r.spec.label.c_str(), std::string(to_string(r.spec.noise)).c_str(),
                  r.spec.mrw ? "mrw" : "iid", percent(r.intrinsic).c_str(),
                  r.intrinsic_label().c_str(), percent(r.reconstructed).c_str(),
                  r.reconstructed_label().c_str(), r.failures.size());
    out << line;
  }
  return out.str();
}

}  // namespace mfvol
