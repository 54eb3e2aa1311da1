#include "mfvol/decomposer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <string>

#include "mfvol/error.hpp"
#include "mfvol/numeric.hpp"
#include "mfvol/parallel.hpp"

namespace mfvol {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Fitness of a ln(sigma) path. Stateless apart from the immutable reference
// masses, so one instance is shared by all workers.
class LogSigmaCost {
 public:
  LogSigmaCost(std::span<const double> returns, double c, const BinningConfig& grid)
      : returns_(returns), c_(c), deviation_(grid) {}

  CostBreakdown operator()(std::span<const double> log_sigma) const {
    thread_local std::vector<double> dw;
    thread_local std::vector<double> dln;
    thread_local std::vector<std::uint32_t> counts;
    const std::size_t n = returns_.size();
    dw.resize(n);
    dln.resize(n - 1);
    CostBreakdown out;
    for (std::size_t i = 0; i < n; ++i) {
      if (!std::isfinite(log_sigma[i])) {
        out.total = kInf;
        return out;
      }
      dw[i] = returns_[i] * std::exp(-log_sigma[i]);
    }
    for (std::size_t i = 0; i + 1 < n; ++i) dln[i] = log_sigma[i + 1] - log_sigma[i];

    out.dev_dw = deviation_(dw, Centering::remove_mean, counts);
    try {
      out.dev_dln_sigma = deviation_(dln, Centering::root_mean_square, counts);
    } catch (const NumericalError&) {
      out.dev_dln_sigma = 0.0;
      out.dln_sigma_degenerate = true;
    }
    out.total = c_ * out.dev_dw + out.dev_dln_sigma;
    return out;
  }

 private:
  std::span<const double> returns_;
  double c_;
  GaussianDeviation deviation_;
};

struct Chromosome {
  std::vector<double> genes;
  double cost = kInf;
};

double sortable(double c) { return std::isnan(c) ? kInf : c; }

}  // namespace

SigmaPath moving_window_volatility(const ReturnSeries& returns, std::size_t window) {
  const auto& r = returns.values;
  if (window < 1) throw ConfigError("moving window must hold at least one step");
  if (window > r.size()) {
    throw ConfigError("moving window (" + std::to_string(window) +
                      ") exceeds series length (" + std::to_string(r.size()) + ")");
  }
  const double rms = root_mean_square(r);
  if (!(rms > 0.0) || !std::isfinite(rms)) {
    throw DataError("returns are all zero or non-finite; volatility undefined");
  }
  const double floor = 1e-8 * rms;
  SigmaPath out;
  out.sigma.resize(r.size());
  for (std::size_t i = 0; i < r.size(); ++i) {
    const std::size_t end = std::min(r.size(), i + window);
    double acc = 0.0;
    for (std::size_t j = i; j < end; ++j) acc += r[j] * r[j];
    const double s = std::sqrt(acc / static_cast<double>(end - i));
    if (s < floor) {
      out.sigma[i] = floor;
      ++out.floored;
    } else {
      out.sigma[i] = s;
    }
  }
  return out;
}

CostBreakdown cost(std::span<const double> sigma, std::span<const double> returns,
                   double c, const BinningConfig& grid) {
  if (sigma.size() != returns.size() || sigma.size() < 2) {
    throw ConfigError("cost needs equal-length sigma and returns with n >= 2");
  }
  std::vector<double> log_sigma(sigma.size());
  for (std::size_t i = 0; i < sigma.size(); ++i) {
    if (!(sigma[i] > 0.0)) {
      CostBreakdown culled;
      culled.total = kInf;
      return culled;
    }
    log_sigma[i] = std::log(sigma[i]);
  }
  return LogSigmaCost(returns, c, grid)(log_sigma);
}

void GaConfig::validate() const {
  if (population < 2) throw ConfigError("GA population must be at least 2");
  if (!(crossover_fraction >= 0.0 && crossover_fraction <= 1.0)) {
    throw ConfigError("crossover fraction must lie in [0, 1]");
  }
  if (!(mutation_rate >= 0.0 && mutation_rate <= 1.0)) {
    throw ConfigError("mutation rate must lie in [0, 1]");
  }
  if (!(cost_c >= 0.0) || !std::isfinite(cost_c)) {
    throw ConfigError("cost weight c must be finite and >= 0");
  }
  if (window < 2) throw ConfigError("moving window must be at least 2");
  if (!(init_spread >= 0.0) || !(mutation_step >= 0.0) || !(gene_clamp > 0.0)) {
    throw ConfigError("GA perturbation scales must be >= 0 and the clamp > 0");
  }
  if (!(plateau_tolerance >= 0.0)) throw ConfigError("plateau tolerance must be >= 0");
  grid.validate();
}

DeviationReport deviation_metrics(const Decomposition& d, const BinningConfig& grid,
                                  double significance, double cost_c) {
  const Pdf reference = gaussian_reference(grid);
  DeviationReport rep;
  const auto dw = standardize(d.dw, Centering::remove_mean);
  rep.delta_w = overlap_deviation(estimate_pdf(dw, grid), reference);
  rep.ks_dw = ks_test(dw, significance);
  try {
    const auto dln = standardize(d.dln_sigma, Centering::root_mean_square);
    rep.delta_dln_sigma = overlap_deviation(estimate_pdf(dln, grid), reference);
    rep.ks_dln_sigma = ks_test(dln, significance);
  } catch (const NumericalError&) {
    rep.delta_dln_sigma.reset();
    rep.ks_dln_sigma.reset();
  }
  rep.final_cost = cost_c * rep.delta_w + rep.delta_dln_sigma.value_or(0.0);
  return rep;
}

GaResult ga_optimize(const ReturnSeries& returns, const GaConfig& config) {
  config.validate();
  const auto& r = returns.values;
  const std::size_t n = r.size();
  if (!returns.mean_removed) throw ConfigError("ga_optimize needs demeaned returns");
  for (std::size_t i = 0; i < n; ++i) {
    if (!std::isfinite(r[i])) {
      throw DataError("non-finite return at step " + std::to_string(i));
    }
  }
  if (n < 2 * config.window) {
    throw DataError("series length " + std::to_string(n) + " is below 2 * window (" +
                    std::to_string(2 * config.window) + ")");
  }

  const SigmaPath seed_path = moving_window_volatility(returns, config.window);
  std::vector<double> base(n);
  for (std::size_t i = 0; i < n; ++i) base[i] = std::log(seed_path.sigma[i]);
  auto clamp_gene = [&](std::size_t i, double g) {
    return std::clamp(g, base[i] - config.gene_clamp, base[i] + config.gene_clamp);
  };

  const LogSigmaCost fitness(r, config.cost_c, config.grid);
  const std::size_t pop_size = config.population;
  const std::size_t workers = std::max<std::size_t>(1, config.workers);

  std::vector<Chromosome> population(pop_size);
  parallel_for(pop_size, workers, [&](std::size_t k) {
    Chromosome& c = population[k];
    c.genes = base;
    if (k > 0) {
      Rng rng(derive_seed(config.seed, 0, k));
      std::normal_distribution<double> jitter(0.0, config.init_spread);
      for (std::size_t i = 0; i < n; ++i) c.genes[i] = clamp_gene(i, base[i] + jitter(rng));
    }
    c.cost = sortable(fitness(c.genes).total);
  });
  std::stable_sort(population.begin(), population.end(),
                   [](const Chromosome& a, const Chromosome& b) { return a.cost < b.cost; });

  GaResult result;
  result.floored_steps = seed_path.floored;
  result.history.push_back(population.front().cost);

  const auto pairs = static_cast<std::size_t>(
      std::llround(config.crossover_fraction * static_cast<double>(pop_size) / 2.0));
  const std::size_t babies = 2 * pairs;

  std::vector<Chromosome> offspring(babies + pop_size);
  for (std::size_t gen = 1; gen <= config.generations; ++gen) {
    // Task t < pairs breeds babies 2t, 2t+1; task pairs + m mutates member m.
    parallel_for(pairs + pop_size, workers, [&](std::size_t t) {
      Rng rng(derive_seed(config.seed, gen, t));
      if (t < pairs) {
        std::uniform_int_distribution<std::size_t> pick(0, pop_size - 1);
        std::uniform_int_distribution<std::size_t> pick_other(0, pop_size - 2);
        std::uniform_int_distribution<std::size_t> cut_at(1, n - 1);
        const std::size_t i = pick(rng);
        std::size_t j = pick_other(rng);
        if (j >= i) ++j;
        const std::size_t cut = cut_at(rng);
        const auto& a = population[i].genes;
        const auto& b = population[j].genes;
        Chromosome& x = offspring[2 * t];
        Chromosome& y = offspring[2 * t + 1];
        x.genes.resize(n);
        y.genes.resize(n);
        std::copy(a.begin(), a.begin() + cut, x.genes.begin());
        std::copy(b.begin() + cut, b.end(), x.genes.begin() + cut);
        std::copy(b.begin(), b.begin() + cut, y.genes.begin());
        std::copy(a.begin() + cut, a.end(), y.genes.begin() + cut);
        x.cost = sortable(fitness(x.genes).total);
        y.cost = sortable(fitness(y.genes).total);
        return;
      }
      const std::size_t m = t - pairs;
      Chromosome& mutant = offspring[babies + m];
      mutant.genes = population[m].genes;
      std::binomial_distribution<std::size_t> how_many(n, config.mutation_rate);
      std::uniform_int_distribution<std::size_t> site(0, n - 1);
      std::normal_distribution<double> step(0.0, config.mutation_step);
      const std::size_t sites = how_many(rng);
      if (sites == 0) {
        // Unchanged copy; ranks behind its parent and never displaces it.
        mutant.cost = kInf;
        return;
      }
      for (std::size_t s = 0; s < sites; ++s) {
        const std::size_t i = site(rng);
        mutant.genes[i] = clamp_gene(i, mutant.genes[i] + step(rng));
      }
      mutant.cost = sortable(fitness(mutant.genes).total);
    });

    // Elitist (mu + lambda) selection; ties resolved by pool position.
    std::vector<std::size_t> order(pop_size + offspring.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    auto cost_of = [&](std::size_t k) {
      return k < pop_size ? population[k].cost : offspring[k - pop_size].cost;
    };
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return cost_of(a) < cost_of(b); });
    std::vector<Chromosome> next;
    next.reserve(pop_size);
    for (std::size_t k = 0; k < pop_size; ++k) {
      const std::size_t idx = order[k];
      next.push_back(idx < pop_size ? std::move(population[idx])
                                    : std::move(offspring[idx - pop_size]));
    }
    population = std::move(next);
    for (auto& o : offspring) o.genes.clear();

    result.history.push_back(population.front().cost);
    result.generations_run = gen;
    const std::size_t window = config.plateau_generations;
    if (window > 0 && gen >= window &&
        result.history[gen - window] - result.history[gen] < config.plateau_tolerance) {
      result.plateau_stop = true;
      break;
    }
  }

  // Scale sigma so that dW has unit root mean square; the cost is unaffected.
  const auto& best = population.front().genes;
  std::vector<double> sigma(n);
  for (std::size_t i = 0; i < n; ++i) sigma[i] = std::exp(best[i]);
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += (r[i] / sigma[i]) * (r[i] / sigma[i]);
  const double unit = std::sqrt(acc / static_cast<double>(n));
  for (auto& s : sigma) s *= unit;

  std::vector<double> dlns(n);
  for (std::size_t i = 0; i < n; ++i) dlns[i] = r[i] + returns.mu;
  result.decomposition = Decomposition::from_sigma(std::move(dlns), returns.mu, std::move(sigma));
  result.report =
      deviation_metrics(result.decomposition, config.grid, 0.01, config.cost_c);
  result.report.final_cost = result.history.back();
  return result;
}

}  // namespace mfvol
