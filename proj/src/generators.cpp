#include "mfvol/generators.hpp"

#include <fftw3.h>

#include <Eigen/Dense>
#include <algorithm>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/special_functions/erf.hpp>
#include <boost/math/tools/roots.hpp>
#include <cmath>
#include <limits>
#include <memory>
#include <mutex>
#include <numbers>
#include <string>

#include "mfvol/distributions.hpp"
#include "mfvol/error.hpp"
#include "mfvol/numeric.hpp"

namespace mfvol {

namespace {

const double kSqrt3 = std::sqrt(3.0);
const double kSqrt6 = std::sqrt(6.0);

double normal_pdf(double x) {
  return std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi);
}

// FFTW planning is not thread-safe; execution on distinct buffers is.
std::mutex& fftw_planner_mutex() {
  static std::mutex m;
  return m;
}

struct FftwDeleter {
  void operator()(fftw_complex* p) const { fftw_free(p); }
};
using FftwBuffer = std::unique_ptr<fftw_complex[], FftwDeleter>;

FftwBuffer make_buffer(std::size_t n) {
  auto* p = static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * n));
  if (p == nullptr) throw std::bad_alloc();
  return FftwBuffer(p);
}

// In-place forward DFT of `data` (length m).
void forward_dft(fftw_complex* data, std::size_t m) {
  fftw_plan plan;
  {
    std::lock_guard lock(fftw_planner_mutex());
    plan = fftw_plan_dft_1d(static_cast<int>(m), data, data, FFTW_FORWARD, FFTW_ESTIMATE);
  }
  fftw_execute(plan);
  std::lock_guard lock(fftw_planner_mutex());
  fftw_destroy_plan(plan);
}

}  // namespace

std::string_view to_string(NoiseKind kind) {
  switch (kind) {
    case NoiseKind::gaussian: return "gaussian";
    case NoiseKind::rectangular: return "rectangular";
    case NoiseKind::triangular: return "triangular";
    case NoiseKind::skew_triangular: return "skew_triangular";
  }
  return "unknown";
}

NoiseKind parse_noise_kind(std::string_view name) {
  for (auto k : {NoiseKind::gaussian, NoiseKind::rectangular, NoiseKind::triangular,
                 NoiseKind::skew_triangular}) {
    if (to_string(k) == name) return k;
  }
  throw ConfigError("unknown noise kind '" + std::string(name) + "'");
}

NoiseDensity::NoiseDensity(NoiseKind kind) : kind_(kind) {
  switch (kind) {
    case NoiseKind::gaussian:
      lo_ = -std::numeric_limits<double>::infinity();
      hi_ = std::numeric_limits<double>::infinity();
      return;
    case NoiseKind::rectangular:
      a_ = -kSqrt3;
      b_ = kSqrt3;
      break;
    case NoiseKind::triangular:
      a_ = -kSqrt6;
      b_ = kSqrt6;
      m_ = 0.0;
      break;
    case NoiseKind::skew_triangular:
      // Mode at the left third of [0, 3].
      a_ = 0.0;
      b_ = 3.0;
      m_ = 1.0;
      break;
  }
  if (kind != NoiseKind::rectangular) {
    shift_ = (a_ + b_ + m_) / 3.0;
    scale_ = std::sqrt((a_ * a_ + b_ * b_ + m_ * m_ - a_ * b_ - a_ * m_ - b_ * m_) / 18.0);
  }
  lo_ = (a_ - shift_) / scale_;
  hi_ = (b_ - shift_) / scale_;
}

double NoiseDensity::raw_pdf(double y) const {
  if (y < a_ || y > b_) return 0.0;
  if (kind_ == NoiseKind::rectangular) return 1.0 / (b_ - a_);
  if (y < m_) return 2.0 * (y - a_) / ((b_ - a_) * (m_ - a_));
  return 2.0 * (b_ - y) / ((b_ - a_) * (b_ - m_));
}

double NoiseDensity::raw_cdf(double y) const {
  if (y <= a_) return 0.0;
  if (y >= b_) return 1.0;
  if (kind_ == NoiseKind::rectangular) return (y - a_) / (b_ - a_);
  if (y < m_) return (y - a_) * (y - a_) / ((b_ - a_) * (m_ - a_));
  return 1.0 - (b_ - y) * (b_ - y) / ((b_ - a_) * (b_ - m_));
}

double NoiseDensity::pdf(double x) const {
  if (kind_ == NoiseKind::gaussian) return normal_pdf(x);
  return scale_ * raw_pdf(x * scale_ + shift_);
}

double NoiseDensity::cdf(double x) const {
  if (kind_ == NoiseKind::gaussian) return normal_cdf(x);
  return raw_cdf(x * scale_ + shift_);
}

double NoiseDensity::quantile(double u) const {
  if (kind_ == NoiseKind::gaussian) {
    return -std::numbers::sqrt2 * boost::math::erfc_inv(2.0 * u);
  }
  double y;
  if (kind_ == NoiseKind::rectangular) {
    y = a_ + u * (b_ - a_);
  } else if (u < (m_ - a_) / (b_ - a_)) {
    y = a_ + std::sqrt(u * (b_ - a_) * (m_ - a_));
  } else {
    y = b_ - std::sqrt((1.0 - u) * (b_ - a_) * (b_ - m_));
  }
  return (y - shift_) / scale_;
}

std::vector<double> NoiseDensity::kinks() const {
  if (kind_ == NoiseKind::gaussian) return {};
  if (kind_ == NoiseKind::rectangular) return {lo_, hi_};
  return {lo_, (m_ - shift_) / scale_, hi_};
}

ReturnSeries gen_noise(NoiseKind kind, std::size_t n, std::uint64_t seed) {
  if (n < 2) throw ConfigError("gen_noise needs n >= 2");
  Rng rng(seed);
  ReturnSeries out;
  out.values.resize(n);
  if (kind == NoiseKind::gaussian) {
    std::normal_distribution<double> normal(0.0, 1.0);
    for (auto& v : out.values) v = normal(rng);
    return out;
  }
  const NoiseDensity density(kind);
  std::uniform_real_distribution<double> uniform(0.0, 1.0);
  for (auto& v : out.values) v = density.quantile(uniform(rng));
  return out;
}

void MrwParams::validate() const {
  if (n < 2) throw ConfigError("MRW length must be at least 2");
  if (horizon < 1 || horizon > n) {
    throw ConfigError("MRW horizon must satisfy 1 <= horizon <= n");
  }
  if (!(lambda2 >= 0.0) || !std::isfinite(lambda2)) {
    throw ConfigError("MRW lambda2 must be finite and >= 0");
  }
}

std::vector<double> mrw_log_covariance(double lambda2, std::size_t horizon,
                                       std::size_t max_lag) {
  std::vector<double> cov(max_lag + 1, 0.0);
  for (std::size_t k = 0; k <= max_lag && k < horizon; ++k) {
    cov[k] = lambda2 * std::log(static_cast<double>(horizon) / static_cast<double>(k + 1));
  }
  return cov;
}

std::vector<double> gaussian_process_circulant(std::span<const double> cov,
                                               std::size_t n, std::uint64_t seed) {
  if (n == 0) return {};
  std::size_t m = 2;
  while (m < 2 * (n - 1)) m *= 2;

  auto buf = make_buffer(m);
  for (std::size_t k = 0; k < m; ++k) {
    const std::size_t lag = std::min(k, m - k);
    buf[k][0] = lag < cov.size() ? cov[lag] : 0.0;
    buf[k][1] = 0.0;
  }
  forward_dft(buf.get(), m);

  double max_eig = 0.0;
  for (std::size_t k = 0; k < m; ++k) max_eig = std::max(max_eig, buf[k][0]);
  Rng rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  for (std::size_t k = 0; k < m; ++k) {
    double eig = buf[k][0];
    if (eig < 0.0) {
      if (eig < -1e-10 * std::max(max_eig, 1e-300)) {
        throw NumericalError("circulant embedding is not non-negative definite");
      }
      eig = 0.0;
    }
    const double amp = std::sqrt(eig / static_cast<double>(m));
    buf[k][0] = amp * normal(rng);
    buf[k][1] = amp * normal(rng);
  }
  forward_dft(buf.get(), m);

  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = buf[i][0];
  return out;
}

std::vector<double> gaussian_process_dense(std::span<const double> cov, std::size_t n,
                                           std::uint64_t seed) {
  Eigen::MatrixXd k(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const std::size_t lag = i > j ? i - j : j - i;
      k(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          lag < cov.size() ? cov[lag] : 0.0;
    }
  }
  Rng rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::VectorXd z(static_cast<Eigen::Index>(n));
  for (Eigen::Index i = 0; i < z.size(); ++i) z(i) = normal(rng);

  Eigen::VectorXd x;
  Eigen::LLT<Eigen::MatrixXd> llt(k);
  if (llt.info() == Eigen::Success) {
    x = llt.matrixL() * z;
  } else {
    // Semi-definite covariance: symmetric square root with clipped spectrum.
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(k);
    const Eigen::VectorXd root = eig.eigenvalues().cwiseMax(0.0).cwiseSqrt();
    x = eig.eigenvectors() * (root.asDiagonal() * z);
  }
  return {x.data(), x.data() + x.size()};
}

MrwSample gen_mrw(const MrwParams& params) {
  params.validate();
  const std::size_t n = params.n;
  MrwSample out;
  std::vector<double> eps = gen_noise(params.noise, n, params.seed).values;

  out.log_volatility.assign(n, 0.0);
  if (params.lambda2 > 0.0) {
    const auto cov = mrw_log_covariance(params.lambda2, params.horizon, params.horizon);
    const std::uint64_t gp_seed = derive_seed(params.seed, 0x6c6f67766f6cULL);
    out.log_volatility = n >= kCirculantThreshold
                             ? gaussian_process_circulant(cov, n, gp_seed)
                             : gaussian_process_dense(cov, n, gp_seed);
    const double var = cov[0];
    for (auto& w : out.log_volatility) w -= var;
  }

  Decomposition& truth = out.truth;
  truth.sigma.resize(n);
  truth.dlns.resize(n);
  truth.dln_sigma.resize(n - 1);
  for (std::size_t i = 0; i < n; ++i) {
    truth.sigma[i] = std::exp(out.log_volatility[i]);
    truth.dlns[i] = truth.sigma[i] * eps[i];
  }
  for (std::size_t i = 0; i + 1 < n; ++i) {
    truth.dln_sigma[i] = out.log_volatility[i + 1] - out.log_volatility[i];
  }
  truth.dw = std::move(eps);
  truth.mu = 0.0;
  out.returns.values = truth.dlns;
  return out;
}

double intrinsic_deviation(NoiseKind kind) {
  if (kind == NoiseKind::gaussian) return 0.0;
  const NoiseDensity density(kind);
  auto diff = [&](double x) { return density.pdf(x) - normal_pdf(x); };

  // Outside [-12, 12] the Gaussian mass is below 1e-32 and bounded supports
  // are empty.
  constexpr double kRange = 12.0;
  std::vector<double> breaks{-kRange, kRange};
  for (double k : density.kinks()) breaks.push_back(k);
  std::sort(breaks.begin(), breaks.end());

  // Split every smooth piece at the sign changes of the difference.
  std::vector<double> nodes;
  for (std::size_t s = 0; s + 1 < breaks.size(); ++s) {
    const double a = breaks[s];
    const double b = breaks[s + 1];
    nodes.push_back(a);
    constexpr int kScan = 400;
    // Probe strictly inside the piece; the density may jump at a kink.
    double prev_x = a + (b - a) * 1e-9;
    double prev = diff(prev_x);
    for (int j = 1; j <= kScan; ++j) {
      const double x = (j == kScan) ? b - (b - a) * 1e-9 : a + (b - a) * j / kScan;
      const double cur = diff(x);
      if ((prev < 0.0) != (cur < 0.0)) {
        boost::math::tools::eps_tolerance<double> tol(52);
        std::uintmax_t iters = 100;
        const auto root =
            boost::math::tools::toms748_solve(diff, prev_x, x, prev, cur, tol, iters);
        nodes.push_back(0.5 * (root.first + root.second));
      }
      prev_x = x;
      prev = cur;
    }
  }
  nodes.push_back(breaks.back());

  double area = 0.0;
  auto abs_diff = [&](double x) { return std::abs(diff(x)); };
  for (std::size_t s = 0; s + 1 < nodes.size(); ++s) {
    if (nodes[s + 1] <= nodes[s]) continue;
    area += boost::math::quadrature::gauss_kronrod<double, 31>::integrate(
        abs_diff, nodes[s], nodes[s + 1], 15, 1e-14);
  }
  return 0.5 * area;
}

}  // namespace mfvol
