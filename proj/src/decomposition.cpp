#include "mfvol/decomposition.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "mfvol/error.hpp"

namespace mfvol {

Decomposition Decomposition::from_sigma(std::vector<double> dlns, double mu,
                                        std::vector<double> sigma) {
  if (dlns.size() != sigma.size() || sigma.empty()) {
    throw DataError("decomposition needs equal, non-zero dlnS and sigma lengths");
  }
  Decomposition d;
  d.dw.resize(sigma.size());
  d.dln_sigma.resize(sigma.size() - 1);
  for (std::size_t i = 0; i < sigma.size(); ++i) {
    if (!(sigma[i] > 0.0) || !std::isfinite(sigma[i])) {
      throw DataError("non-positive sigma at step " + std::to_string(i));
    }
    d.dw[i] = (dlns[i] - mu) / sigma[i];
  }
  for (std::size_t i = 0; i + 1 < sigma.size(); ++i) {
    d.dln_sigma[i] = std::log(sigma[i + 1]) - std::log(sigma[i]);
  }
  d.dlns = std::move(dlns);
  d.sigma = std::move(sigma);
  d.mu = mu;
  return d;
}

double Decomposition::max_reconstruction_error() const {
  double worst = 0.0;
  for (std::size_t i = 0; i < sigma.size(); ++i) {
    const double scale = std::max({std::abs(dlns[i]), std::abs(mu),
                                   std::numeric_limits<double>::min()});
    worst = std::max(worst, std::abs(sigma[i] * dw[i] + mu - dlns[i]) / scale);
  }
  return worst;
}

void Decomposition::validate() const {
  const std::size_t n = sigma.size();
  if (n == 0 || dlns.size() != n || dw.size() != n || dln_sigma.size() + 1 != n) {
    throw DataError("decomposition column lengths are inconsistent");
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (!(sigma[i] > 0.0)) {
      throw DataError("non-positive sigma at step " + std::to_string(i));
    }
  }
  if (max_reconstruction_error() > 1e-12) {
    throw DataError("decomposition violates sigma*dW + mu = dlnS");
  }
}

}  // namespace mfvol
