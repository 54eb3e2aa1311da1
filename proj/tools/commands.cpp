#include "commands.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>

#include "mfvol/correlations.hpp"
#include "mfvol/error.hpp"
#include "mfvol/fractal.hpp"
#include "mfvol/generators.hpp"
#include "mfvol/numeric.hpp"
#include "mfvol/parallel.hpp"
#include "mfvol/report.hpp"

namespace mfvol::cli {

using nlohmann::json;

namespace {

class Stopwatch {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

fs::path manifest_path(const fs::path& primary) {
  return fs::path(primary.string() + ".manifest.json");
}

void require_upstream(const fs::path& path, const std::string& what, const std::string& producer) {
  if (!fs::exists(path)) {
    throw DataError(what + " '" + path.string() + "' not found; produce it with `mfvol " +
                    producer + "`");
  }
}

json grid_params(const BinningConfig& g) { return to_json(g); }

// Plot helpers --------------------------------------------------------------

void write_pdf_plot(const fs::path& path, const Pdf& pdf, const Pdf& reference) {
  std::vector<double> centers(pdf.densities.size());
  for (std::size_t k = 0; k < centers.size(); ++k) centers[k] = pdf.bin_center(k);
  const Column cols[] = {{"bin_center", centers},
                         {"density", pdf.densities},
                         {"gaussian", reference.densities}};
  write_plot(path, cols);
}

void write_curve_plot(const fs::path& path, const CorrelationCurve& c) {
  std::vector<double> lags(c.lags.begin(), c.lags.end());
  const Column cols[] = {{"lag", lags}, {"value", c.values}, {"band", c.band}};
  write_plot(path, cols);
}

void write_spectrum_plots(const fs::path& dir, const std::string& name,
                          const ScalingSpectrum& s, std::vector<fs::path>& written) {
  std::vector<double> lags(s.surface.t_grid.begin(), s.surface.t_grid.end());
  std::vector<std::string> names;
  std::vector<Column> cols{{"T", lags}};
  names.reserve(s.surface.q_grid.size());
  for (std::size_t qi = 0; qi < s.surface.q_grid.size(); ++qi) {
    names.push_back("M_q" + format_double(s.surface.q_grid[qi]));
  }
  for (std::size_t qi = 0; qi < s.surface.q_grid.size(); ++qi) {
    cols.push_back({names[qi], s.surface.moments[qi]});
  }
  const auto moments_path = dir / ("mf_" + name + "_moments.txt");
  write_plot(moments_path, cols);
  written.push_back(moments_path);

  const Column fcols[] = {{"q", s.surface.q_grid}, {"f_q", s.fit.f_of_q}};
  const auto fq_path = dir / ("mf_" + name + "_fq.txt");
  write_plot(fq_path, fcols);
  written.push_back(fq_path);
}

json curve_or_error(const std::function<CorrelationCurve()>& make, const std::string& name,
                    const std::optional<fs::path>& plots, std::vector<fs::path>& written) {
  try {
    const CorrelationCurve c = make();
    if (plots) {
      const auto p = *plots / (name + ".txt");
      write_curve_plot(p, c);
      written.push_back(p);
    }
    return to_json(c);
  } catch (const NumericalError& e) {
    return {{"error", e.what()}};
  }
}

void finish(const fs::path& primary, RunManifest& manifest, const std::vector<fs::path>& outputs,
            const Stopwatch& watch) {
  for (const auto& p : outputs) manifest.add_output(p);
  manifest.set_wall_seconds(watch.seconds());
  manifest.write(manifest_path(primary));
}

}  // namespace

int run_simulate(const SimulateOptions& o, const std::vector<std::string>& argv) {
  Stopwatch watch;
  MrwParams p;
  p.n = o.n;
  p.noise = parse_noise_kind(o.noise);
  p.seed = o.seed;
  if (o.model == "iid") {
    p.lambda2 = 0.0;
    p.horizon = 1;
  } else if (o.model == "mrw") {
    p.lambda2 = o.lambda2;
    p.horizon = o.horizon;
  } else {
    throw ConfigError("unknown model '" + o.model + "' (expected iid or mrw)");
  }
  const MrwSample sample = gen_mrw(p);

  std::vector<fs::path> outputs;
  write_returns(o.returns_out, sample.returns.values);
  outputs.push_back(o.returns_out);
  if (o.truth_out) {
    write_decomposition(*o.truth_out, sample.truth);
    outputs.push_back(*o.truth_out);
  }
  if (o.prices_out) {
    const auto prices = prices_from_returns(100.0, sample.returns.values);
    const fs::path path = *o.prices_out;
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    out << "date,open\n";
    for (std::size_t i = 0; i < prices.size(); ++i) out << i << ',' << format_double(prices[i]) << '\n';
    if (!out) throw DataError("failed writing '" + path.string() + "'");
    outputs.push_back(path);
  }

  RunManifest manifest("simulate", argv);
  manifest.set_parameters({{"model", o.model},
                           {"noise", o.noise},
                           {"n", o.n},
                           {"lambda2", p.lambda2},
                           {"horizon", p.horizon},
                           {"seed", o.seed},
                           {"circulant_threshold", kCirculantThreshold},
                           {"skew_triangular_shape", "triangle on [0,3], mode 1, standardized"}});
  manifest.add_seed("simulate", o.seed);
  finish(o.returns_out, manifest, outputs, watch);
  std::cout << "wrote " << sample.returns.values.size() << " returns to " << o.returns_out.string()
            << '\n';
  return kOk;
}

int run_decompose(const DecomposeOptions& o, const std::vector<std::string>& argv) {
  Stopwatch watch;
  if (o.returns_in.has_value() == o.prices_in.has_value()) {
    throw ConfigError("decompose needs exactly one of --returns or --prices");
  }
  RunManifest manifest("decompose", argv);
  ReturnSeries raw;
  json input;
  if (o.returns_in) {
    require_upstream(*o.returns_in, "returns file", "simulate");
    raw = read_returns(*o.returns_in);
    input = {{"kind", "returns"}, {"path", o.returns_in->string()}};
    manifest.add_input(*o.returns_in);
  } else {
    MarketCsvSchema schema = o.schema;
    schema.date_format = parse_date_format(o.date_format);
    if (!fs::exists(*o.prices_in)) {
      throw DataError("price file '" + o.prices_in->string() + "' not found");
    }
    const LoadedPrices loaded = load_csv(*o.prices_in, schema);
    raw = log_returns(loaded.series);
    input = {{"kind", "prices"},
             {"path", o.prices_in->string()},
             {"date_column", schema.date_column},
             {"price_column", schema.price_column},
             {"delimiter", std::string(1, schema.delimiter)},
             {"date_format", std::string(to_string(schema.date_format))},
             {"rows", loaded.series.size()},
             {"skipped_rows", loaded.skipped_rows},
             {"first_stamp", format_stamp(loaded.series.stamps().front(), loaded.series.axis())},
             {"last_stamp", format_stamp(loaded.series.stamps().back(), loaded.series.axis())}};
    if (loaded.skipped_rows > 0) {
      std::cerr << "warning: skipped " << loaded.skipped_rows
                << " rows with missing or non-positive prices\n";
    }
    manifest.add_input(*o.prices_in);
  }
  const ReturnSeries returns = demean(raw);

  GaConfig ga = o.ga;
  ga.workers = default_worker_count();
  const GaResult res = ga_optimize(returns, ga);

  std::vector<fs::path> outputs;
  write_decomposition(o.decomposition_out, res.decomposition);
  outputs.push_back(o.decomposition_out);

  json results{{"n", returns.values.size()},
               {"mu", returns.mu},
               {"deviation", to_json(res.report)},
               {"generations_run", res.generations_run},
               {"plateau_stop", res.plateau_stop},
               {"floored_steps", res.floored_steps},
               {"decomposition_file", o.decomposition_out.string()}};
  results["history"] = array_or_sidecar(res.history, "history", o.report_out, &outputs);
  json report = make_report("decompose", {{"input", input}, {"ga", to_json(ga)}});
  report["results"] = results;
  write_json(o.report_out, report);
  outputs.push_back(o.report_out);

  manifest.set_parameters({{"input", input}});
  manifest.set_ga_config(ga);
  manifest.set_grid(ga.grid);
  manifest.add_seed("ga", ga.seed);
  manifest.set_worker_count(ga.workers);
  finish(o.report_out, manifest, outputs, watch);

  const auto& r = res.report;
  std::cout << "delta_W_S = " << 100.0 * r.delta_w << "% (KS " << (r.ks_dw.reject ? "N" : "T")
            << ")";
  if (r.delta_dln_sigma) {
    std::cout << ", delta_dln_sigma = " << 100.0 * *r.delta_dln_sigma << "% (KS "
              << (r.ks_dln_sigma->reject ? "N" : "T") << ")";
  }
  std::cout << ", generations " << res.generations_run << '\n';
  return kOk;
}

int run_analyze(const std::string& what, const AnalyzeOptions& o,
                const std::vector<std::string>& argv) {
  Stopwatch watch;
  require_upstream(o.decomposition_in, "decomposition file", "decompose` or `mfvol simulate --truth");
  const Decomposition d = read_decomposition(o.decomposition_in);
  RunManifest manifest("analyze " + what, argv);
  manifest.add_input(o.decomposition_in);
  std::vector<fs::path> outputs;
  json params{{"decomposition", o.decomposition_in.string()}};
  json results;

  if (what == "deviation") {
    const DeviationReport rep = deviation_metrics(d, o.grid, o.significance, o.cost_c);
    results = to_json(rep);
    params["grid"] = grid_params(o.grid);
    params["significance"] = o.significance;
    params["cost_c"] = o.cost_c;
    manifest.set_grid(o.grid);
    if (o.plots_dir) {
      const Pdf ref = gaussian_reference(o.grid);
      auto emit = [&](const std::string& name, std::span<const double> xs, Centering c) {
        try {
          const auto p = *o.plots_dir / ("pdf_" + name + ".txt");
          write_pdf_plot(p, estimate_pdf(standardize(xs, c), o.grid), ref);
          outputs.push_back(p);
        } catch (const NumericalError&) {
        }
      };
      std::vector<double> ln_sigma(d.sigma.size());
      for (std::size_t i = 0; i < d.sigma.size(); ++i) ln_sigma[i] = std::log(d.sigma[i]);
      emit("dw", d.dw, Centering::remove_mean);
      emit("dln_sigma", d.dln_sigma, Centering::root_mean_square);
      emit("ln_sigma", ln_sigma, Centering::remove_mean);
    }
  } else if (what == "mf") {
    const std::vector<double> q = o.q_grid.empty() ? default_q_grid() : o.q_grid;
    const auto t = default_t_grid(d.size());
    params["q_grid"] = q;
    params["t_grid"] = t;
    params["tolerance"] = o.mf_tolerance;
    params["increments"] = "overlapping";
    struct Named {
      std::string name;
      std::vector<double> path;
    };
    const std::vector<Named> series{{"dw", cumulative_sum(d.dw)},
                                    {"dlns", cumulative_sum(d.dlns)},
                                    {"sigma", d.sigma}};
    json spectra;
    std::optional<ScalingSpectrum> dw_spec, sigma_spec;
    for (const auto& s : series) {
      try {
        ScalingSpectrum sp = scaling_spectrum(s.path, q, t, o.mf_tolerance);
        spectra[s.name] = to_json(sp);
        if (o.plots_dir) write_spectrum_plots(*o.plots_dir, s.name, sp, outputs);
        if (s.name == "dw") dw_spec = sp;
        if (s.name == "sigma") sigma_spec = sp;
      } catch (const NumericalError& e) {
        spectra[s.name] = {{"degenerate", true}, {"error", e.what()}};
      }
    }
    if (!dw_spec) throw NumericalError("dW path has no usable moment scaling");
    // sigma carries the multifractal structure only when dW is Wiener-like.
    const std::vector<double> dw_std = standardize(d.dw);
    const KsResult ks = ks_test(dw_std, o.significance);
    const bool use_sigma = !ks.reject && sigma_spec.has_value();
    const ScalingSpectrum& primary = use_sigma ? *sigma_spec : *dw_spec;
    results = {{"spectra", spectra},
               {"ks_dw", to_json(ks)},
               {"primary_series", use_sigma ? "sigma" : "dw"},
               {"classification", std::string(to_string(primary.classification))},
               {"primary_concave_within_error", concavity_violations(primary).empty()},
               {"hurst_dw", dw_spec->hurst}};
  } else if (what == "acf") {
    const std::size_t lag = o.max_lag == 0 ? 100 : o.max_lag;
    params["max_lag"] = lag;
    json curves;
    auto add = [&](const std::string& name, std::span<const double> xs, bool absolute) {
      curves[name] = curve_or_error(
          [&] { return absolute ? abs_autocorr(xs, lag) : autocorr(xs, lag); }, "acf_" + name,
          o.plots_dir, outputs);
    };
    add("dw", d.dw, false);
    add("abs_dw", d.dw, true);
    add("dln_sigma", d.dln_sigma, false);
    add("abs_dln_sigma", d.dln_sigma, true);
    add("sigma", d.sigma, false);
    add("dlns", d.dlns, false);
    add("abs_dlns", d.dlns, true);
    results = {{"curves", curves}};
  } else if (what == "leverage") {
    const std::size_t lag = o.max_lag == 0 ? 30 : o.max_lag;
    params["max_lag"] = lag;
    params["threshold"] = o.threshold;
    params["normalization"] = "global standard deviations";
    // Align dln_sigma[t] = ln sigma[t+1] - ln sigma[t] with returns at t.
    const std::span<const double> dlns(d.dlns.data(), d.dln_sigma.size());
    const std::span<const double> dw(d.dw.data(), d.dln_sigma.size());
    json curves;
    for (auto cond : {Conditioning::none, Conditioning::negative_only, Conditioning::positive_only}) {
      const std::string suffix(to_string(cond));
      curves["dlns_to_dln_sigma_" + suffix] = curve_or_error(
          [&] { return leverage(dlns, d.dln_sigma, lag, cond, o.threshold); },
          "leverage_dlns_to_dln_sigma_" + suffix, o.plots_dir, outputs);
      curves["dw_to_dln_sigma_" + suffix] = curve_or_error(
          [&] { return leverage(dw, d.dln_sigma, lag, cond, o.threshold); },
          "leverage_dw_to_dln_sigma_" + suffix, o.plots_dir, outputs);
    }
    curves["dln_sigma_to_dlns"] = curve_or_error(
        [&] { return leverage(d.dln_sigma, dlns, lag); }, "leverage_dln_sigma_to_dlns",
        o.plots_dir, outputs);
    curves["dln_sigma_to_dw"] = curve_or_error(
        [&] { return leverage(d.dln_sigma, dw, lag); }, "leverage_dln_sigma_to_dw", o.plots_dir,
        outputs);
    results = {{"curves", curves}};
  } else {
    throw ConfigError("unknown analysis '" + what + "'");
  }

  json report = make_report("analyze " + what, params);
  report["results"] = results;
  write_json(o.report_out, report);
  outputs.push_back(o.report_out);
  manifest.set_parameters(params);
  finish(o.report_out, manifest, outputs, watch);
  std::cout << "wrote " << o.report_out.string() << '\n';
  return kOk;
}

int run_battery_command(const BatteryOptions& o, const std::vector<std::string>& argv) {
  Stopwatch watch;
  BatteryConfig cfg = o.config;
  cfg.workers = default_worker_count();
  const BatteryReport rep = run_battery(cfg);
  json report = make_report("battery", to_json(rep)["config"]);
  report["results"] = to_json(rep)["table"];
  write_json(o.report_out, report);

  RunManifest manifest("battery", argv);
  manifest.set_parameters(report["parameters"]);
  manifest.set_ga_config(cfg.ga);
  manifest.set_grid(cfg.ga.grid);
  manifest.add_seed("battery", cfg.seed);
  manifest.set_worker_count(cfg.workers);
  finish(o.report_out, manifest, {o.report_out}, watch);
  std::cout << format_table(rep);
  for (const auto& c : rep.cases) {
    if (!c.failures.empty()) return kNumerical;
  }
  return kOk;
}

int run_report(const ReportOptions& o, const std::vector<std::string>& argv) {
  Stopwatch watch;
  if (o.inputs.empty()) throw ConfigError("report needs at least one --inputs file");
  if (!o.labels.empty() && o.labels.size() != o.inputs.size()) {
    throw ConfigError("--labels must match --inputs one to one");
  }
  RunManifest manifest("report", argv);
  json rows = json::array();
  std::cout << "series                 dW_S     KS   dln_sigma  KS\n";
  for (std::size_t i = 0; i < o.inputs.size(); ++i) {
    require_upstream(o.inputs[i], "report", "decompose` or `mfvol analyze deviation");
    const json in = read_json(o.inputs[i]);
    manifest.add_input(o.inputs[i]);
    const std::string command = in.value("command", "");
    json dev;
    if (command == "decompose") {
      dev = in.at("results").at("deviation");
    } else if (command == "analyze deviation") {
      dev = in.at("results");
    } else {
      throw DataError(o.inputs[i].string() +
                      ": expected a decompose or analyze deviation report, got '" + command + "'");
    }
    const std::string label = o.labels.empty() ? o.inputs[i].stem().string() : o.labels[i];
    json row{{"label", label},
             {"source", o.inputs[i].string()},
             {"delta_w", dev.at("delta_w")},
             {"ks_dw", dev.at("ks_dw").at("label")},
             {"delta_dln_sigma", dev.at("delta_dln_sigma")},
             {"ks_dln_sigma",
              dev.at("ks_dln_sigma").is_null() ? json(nullptr) : dev.at("ks_dln_sigma").at("label")}};
    rows.push_back(row);
    char line[160];
    const double dln = dev.at("delta_dln_sigma").is_null()
                           ? std::nan("")
                           : dev.at("delta_dln_sigma").get<double>();
    std::snprintf(line, sizeof line, "%-20s %6.2f%%   %-2s   %6.2f%%   %s\n", label.c_str(),
                  100.0 * dev.at("delta_w").get<double>(),
                  row["ks_dw"].get<std::string>().c_str(), 100.0 * dln,
                  row["ks_dln_sigma"].is_null() ? "-" : row["ks_dln_sigma"].get<std::string>().c_str());
    std::cout << line;
  }
  json report = make_report("report", {{"inputs", rows.size()}});
  report["results"] = rows;
  write_json(o.report_out, report);
  manifest.set_parameters(report["parameters"]);
  finish(o.report_out, manifest, {o.report_out}, watch);
  return kOk;
}

}  // namespace mfvol::cli
