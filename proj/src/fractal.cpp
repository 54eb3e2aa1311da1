#include "mfvol/fractal.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "mfvol/error.hpp"

namespace mfvol {

std::string_view to_string(FractalClass c) {
  return c == FractalClass::monofractal ? "monofractal" : "multifractal";
}

std::vector<double> default_q_grid() {
  std::vector<double> q;
  for (int k = 1; k <= 10; ++k) q.push_back(0.5 * k);
  return q;
}

std::vector<std::size_t> default_t_grid(std::size_t length) {
  std::vector<std::size_t> t;
  for (std::size_t lag = 1; lag <= 256 && 10 * lag <= length; lag *= 2) t.push_back(lag);
  return t;
}

MomentSurface moment_surface(std::span<const double> x, std::span<const double> q_grid,
                             std::span<const std::size_t> t_grid) {
  if (q_grid.empty() || t_grid.empty()) throw ConfigError("empty q or T grid");
  for (double q : q_grid) {
    if (!(q > 0.0)) throw ConfigError("moment orders q must be positive");
  }
  std::size_t max_t = 0;
  for (std::size_t t : t_grid) {
    if (t == 0) throw ConfigError("lags T must be positive");
    max_t = std::max(max_t, t);
  }
  if (x.size() < 10 * max_t) {
    throw ConfigError("series of length " + std::to_string(x.size()) +
                      " is too short for lag " + std::to_string(max_t) +
                      " (needs 10x the largest lag)");
  }

  MomentSurface s;
  s.q_grid.assign(q_grid.begin(), q_grid.end());
  s.t_grid.assign(t_grid.begin(), t_grid.end());
  s.moments.assign(q_grid.size(), std::vector<double>(t_grid.size(), 0.0));

  std::vector<double> log_abs;
  bool any_positive = false;
  for (std::size_t ti = 0; ti < t_grid.size(); ++ti) {
    const std::size_t lag = t_grid[ti];
    const std::size_t pairs = x.size() - lag;
    log_abs.resize(pairs);
    for (std::size_t t = 0; t < pairs; ++t) {
      const double d = std::abs(x[t + lag] - x[t]);
      log_abs[t] = d > 0.0 ? std::log(d) : -INFINITY;
    }
    for (std::size_t qi = 0; qi < q_grid.size(); ++qi) {
      const double q = q_grid[qi];
      double acc = 0.0;
      for (double l : log_abs) acc += std::exp(q * l);
      s.moments[qi][ti] = acc / static_cast<double>(pairs);
      any_positive = any_positive || s.moments[qi][ti] > 0.0;
    }
  }
  if (!any_positive) {
    throw NumericalError("all moments vanish (constant series); log scaling undefined");
  }
  return s;
}

ScalingFit scaling_exponents(const MomentSurface& surface) {
  ScalingFit fit;
  for (std::size_t qi = 0; qi < surface.q_grid.size(); ++qi) {
    std::vector<double> lx, ly;
    for (std::size_t ti = 0; ti < surface.t_grid.size(); ++ti) {
      const double m = surface.moments[qi][ti];
      if (m > 0.0 && std::isfinite(m)) {
        lx.push_back(std::log(static_cast<double>(surface.t_grid[ti])));
        ly.push_back(std::log(m));
      }
    }
    if (lx.size() < 4) {
      throw NumericalError("fewer than 4 usable lags for q = " +
                           std::to_string(surface.q_grid[qi]));
    }
    const double k = static_cast<double>(lx.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < lx.size(); ++i) {
      mx += lx[i];
      my += ly[i];
    }
    mx /= k;
    my /= k;
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < lx.size(); ++i) {
      sxx += (lx[i] - mx) * (lx[i] - mx);
      sxy += (lx[i] - mx) * (ly[i] - my);
      syy += (ly[i] - my) * (ly[i] - my);
    }
    const double slope = sxy / sxx;
    const double intercept = my - slope * mx;
    double ssr = 0.0;
    for (std::size_t i = 0; i < lx.size(); ++i) {
      const double e = ly[i] - (intercept + slope * lx[i]);
      ssr += e * e;
    }
    fit.f_of_q.push_back(slope);
    fit.log_prefactor.push_back(intercept);
    fit.r2.push_back(syy > 0.0 ? std::clamp(1.0 - ssr / syy, 0.0, 1.0) : 1.0);
    fit.slope_stderr.push_back(std::sqrt(ssr / (k - 2.0) / sxx));
  }
  return fit;
}

double hurst(std::span<const double> f_of_q, std::span<const double> q_grid) {
  for (std::size_t i = 0; i < q_grid.size() && i < f_of_q.size(); ++i) {
    if (std::abs(q_grid[i] - 2.0) < 1e-12) return f_of_q[i] / 2.0;
  }
  throw ConfigError("q = 2 is not on the moment grid; Hurst exponent undefined");
}

double linear_exponent(std::span<const double> f_of_q, std::span<const double> q_grid) {
  double sqf = 0.0, sqq = 0.0;
  for (std::size_t i = 0; i < q_grid.size(); ++i) {
    sqf += q_grid[i] * f_of_q[i];
    sqq += q_grid[i] * q_grid[i];
  }
  return sqf / sqq;
}

FractalClass classify(std::span<const double> f_of_q, std::span<const double> q_grid,
                      double tolerance) {
  if (q_grid.size() < 4 || f_of_q.size() != q_grid.size()) {
    throw ConfigError("classification needs at least 4 (q, f(q)) points");
  }
  const double h = linear_exponent(f_of_q, q_grid);
  double worst = 0.0;
  for (std::size_t i = 0; i < q_grid.size(); ++i) {
    worst = std::max(worst, std::abs(f_of_q[i] - q_grid[i] * h));
  }
  return worst <= tolerance ? FractalClass::monofractal : FractalClass::multifractal;
}

ScalingSpectrum scaling_spectrum(std::span<const double> x, std::span<const double> q_grid,
                                 std::span<const std::size_t> t_grid, double tolerance) {
  ScalingSpectrum s;
  s.surface = moment_surface(x, q_grid, t_grid);
  s.fit = scaling_exponents(s.surface);
  s.hurst = hurst(s.fit.f_of_q, s.surface.q_grid);
  s.linear_h = linear_exponent(s.fit.f_of_q, s.surface.q_grid);
  s.classification = classify(s.fit.f_of_q, s.surface.q_grid, tolerance);
  return s;
}

std::vector<ConcavityViolation> concavity_violations(const ScalingSpectrum& s, double k) {
  std::vector<ConcavityViolation> out;
  const auto& q = s.surface.q_grid;
  const auto& f = s.fit.f_of_q;
  const auto& se = s.fit.slope_stderr;
  for (std::size_t a = 0; a < q.size(); ++a) {
    for (std::size_t b = a + 1; b < q.size(); ++b) {
      for (std::size_t c = b + 1; c < q.size(); ++c) {
        // Concavity: f(b) >= chord value between a and c.
        const double w = (q[b] - q[a]) / (q[c] - q[a]);
        const double chord = (1.0 - w) * f[a] + w * f[c];
        const double excess = chord - f[b];
        const double tol = k * std::sqrt(se[a] * se[a] + se[b] * se[b] + se[c] * se[c]);
        if (excess > tol) out.push_back({a, b, c, excess});
      }
    }
  }
  return out;
}

std::vector<double> cumulative_sum(std::span<const double> increments) {
  std::vector<double> x(increments.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < increments.size(); ++i) {
    acc += increments[i];
    x[i] = acc;
  }
  return x;
}

}  // namespace mfvol
