#include <exception>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "commands.hpp"
#include "mfvol/error.hpp"
#include "mfvol/report.hpp"

namespace {

using namespace mfvol;
using namespace mfvol::cli;

void add_grid_options(CLI::App* app, BinningConfig& grid) {
  app->add_option("--grid-lo", grid.lo, "lower edge of the standardized histogram grid")
      ->capture_default_str();
  app->add_option("--grid-hi", grid.hi, "upper edge of the standardized histogram grid")
      ->capture_default_str();
  app->add_option("--bin-width", grid.width, "histogram bin width")->capture_default_str();
}

void add_ga_options(CLI::App* app, GaConfig& ga) {
  app->add_option("--population", ga.population)->capture_default_str();
  app->add_option("--generations", ga.generations)->capture_default_str();
  app->add_option("--crossover", ga.crossover_fraction, "fraction of the population recombined")
      ->capture_default_str();
  app->add_option("--mutation-rate", ga.mutation_rate, "per-gene mutation probability")
      ->capture_default_str();
  app->add_option("--mutation-step", ga.mutation_step, "std of a mutation in ln sigma")
      ->capture_default_str();
  app->add_option("--init-spread", ga.init_spread, "std of initial ln sigma jitter")
      ->capture_default_str();
  app->add_option("--gene-clamp", ga.gene_clamp, "max |ln sigma - seed path|")
      ->capture_default_str();
  app->add_option("--cost-c", ga.cost_c, "weight of the dW term in the cost")
      ->capture_default_str();
  app->add_option("--window", ga.window, "moving-window length of the seed path")
      ->capture_default_str();
  app->add_option("--plateau-generations", ga.plateau_generations)->capture_default_str();
  app->add_option("--plateau-tolerance", ga.plateau_tolerance)->capture_default_str();
  app->add_option("--seed", ga.seed)->capture_default_str();
  add_grid_options(app, ga.grid);
}

int exit_for(const std::exception& e, int code) {
  std::cerr << "mfvol: " << e.what() << '\n';
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::string> args(argv, argv + argc);
  CLI::App app{"Volatility decomposition and multifractal analysis toolkit"};
  app.set_version_flag("--version", std::string(kToolkitVersion));
  app.require_subcommand(1);

  SimulateOptions sim;
  auto* simulate = app.add_subcommand("simulate", "generate iid or MRW returns");
  simulate->add_option("--model", sim.model, "iid or mrw")->capture_default_str();
  simulate->add_option("--noise", sim.noise, "gaussian, rectangular, triangular, skew-triangular")
      ->capture_default_str();
  simulate->add_option("-n,--length", sim.n)->capture_default_str();
  simulate->add_option("--lambda2", sim.lambda2, "MRW intermittency")->capture_default_str();
  simulate->add_option("--horizon", sim.horizon, "MRW integral scale")->capture_default_str();
  simulate->add_option("--seed", sim.seed)->capture_default_str();
  simulate->add_option("--out", sim.returns_out, "returns file")->required();
  simulate->add_option("--truth", sim.truth_out, "ground-truth decomposition file");
  simulate->add_option("--prices", sim.prices_out, "price CSV (date=index, open)");

  DecomposeOptions dec;
  auto* decompose = app.add_subcommand("decompose", "split returns into sigma and dW");
  auto* in_returns = decompose->add_option("--returns", dec.returns_in, "returns file");
  auto* in_prices = decompose->add_option("--prices", dec.prices_in, "price CSV");
  in_returns->excludes(in_prices);
  decompose->add_option("--date-column", dec.schema.date_column)->capture_default_str();
  decompose->add_option("--price-column", dec.schema.price_column)->capture_default_str();
  decompose->add_option("--delimiter", dec.schema.delimiter)->capture_default_str();
  decompose->add_option("--date-format", dec.date_format,
                        "iso, ymd-slash, mdy-slash, dmy-slash or index")
      ->capture_default_str();
  add_ga_options(decompose, dec.ga);
  decompose->add_option("--out", dec.decomposition_out, "decomposition file")->required();
  decompose->add_option("--report", dec.report_out, "JSON report")->required();

  AnalyzeOptions an;
  std::string an_what;
  auto* analyze = app.add_subcommand("analyze", "statistics of a stored decomposition");
  analyze->require_subcommand(1);
  for (const char* what : {"deviation", "mf", "acf", "leverage"}) {
    auto* sub = analyze->add_subcommand(what);
    sub->add_option("--decomposition", an.decomposition_in)->required();
    sub->add_option("--report", an.report_out, "JSON report")->required();
    sub->add_option("--plots", an.plots_dir, "directory for plot-ready text files");
    sub->callback([&an_what, what] { an_what = what; });
  }
  auto* an_dev = analyze->get_subcommand("deviation");
  add_grid_options(an_dev, an.grid);
  an_dev->add_option("--significance", an.significance)->capture_default_str();
  an_dev->add_option("--cost-c", an.cost_c)->capture_default_str();
  auto* an_mf = analyze->get_subcommand("mf");
  an_mf->add_option("--q", an.q_grid, "moment orders (default 0.5..5 step 0.5)");
  an_mf->add_option("--tolerance", an.mf_tolerance, "linearity tolerance")->capture_default_str();
  an_mf->add_option("--significance", an.significance)->capture_default_str();
  analyze->get_subcommand("acf")->add_option("--max-lag", an.max_lag, "default 100");
  auto* an_lev = analyze->get_subcommand("leverage");
  an_lev->add_option("--max-lag", an.max_lag, "default 30");
  an_lev->add_option("--threshold", an.threshold, "conditioning threshold in std units")
      ->capture_default_str();

  BatteryOptions bat;
  bat.config = desk_battery();
  bool full_scale = false;
  std::optional<std::size_t> realizations, length, population, generations;
  std::optional<std::uint64_t> bat_seed;
  std::vector<std::string> cases;
  auto* battery = app.add_subcommand("battery", "simulated validation table");
  auto* full = battery->add_flag("--full", full_scale, "full-scale preset (100 x 12000, GA 500/500)");
  battery->add_flag("--desk", "desk-scale preset (default: 10 x 4000, GA 100/100)")->excludes(full);
  battery->add_option("--realizations", realizations);
  battery->add_option("-n,--length", length);
  battery->add_option("--population", population);
  battery->add_option("--generations", generations);
  battery->add_option("--seed", bat_seed);
  battery->add_option("--cases", cases, "case labels i..vii");
  battery->add_option("--report", bat.report_out, "JSON report")->required();

  ReportOptions rep;
  auto* report = app.add_subcommand("report", "tabulate deviation reports");
  report->add_option("--inputs", rep.inputs, "decompose or analyze-deviation reports")
      ->required();
  report->add_option("--labels", rep.labels, "row labels");
  report->add_option("--out", rep.report_out, "JSON summary")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*simulate) return run_simulate(sim, args);
    if (*decompose) {
      if (!*in_returns && !*in_prices) {
        throw ConfigError("decompose needs --returns or --prices");
      }
      return run_decompose(dec, args);
    }
    if (*analyze) return run_analyze(an_what, an, args);
    if (*battery) {
      if (full_scale) bat.config = full_battery();
      if (realizations) bat.config.realizations = *realizations;
      if (length) bat.config.n = *length;
      if (population) bat.config.ga.population = *population;
      if (generations) bat.config.ga.generations = *generations;
      if (bat_seed) bat.config.seed = *bat_seed;
      bat.config.cases = cases;
      return run_battery_command(bat, args);
    }
    if (*report) return run_report(rep, args);
  } catch (const ConfigError& e) {
    return exit_for(e, kUsage);
  } catch (const DataError& e) {
    return exit_for(e, kData);
  } catch (const NumericalError& e) {
    return exit_for(e, kNumerical);
  } catch (const std::filesystem::filesystem_error& e) {
    return exit_for(e, kData);
  } catch (const nlohmann::json::exception& e) {
    return exit_for(e, kData);
  } catch (const std::exception& e) {
    return exit_for(e, kNumerical);
  }
  return kUsage;
}
