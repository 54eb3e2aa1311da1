#pragma once

#include <span>
#include <vector>

namespace mfvol {

// dlnS[i] = mu + sigma[i] * dw[i]; dln_sigma[i] = ln sigma[i+1] - ln sigma[i].
struct Decomposition {
  std::vector<double> dlns;
  std::vector<double> sigma;
  std::vector<double> dw;
  std::vector<double> dln_sigma;
  double mu = 0.0;

  // Builds dw = (dlns - mu) / sigma and dln_sigma from a positive sigma path.
  // Throws DataError on length mismatch or non-positive sigma.
  static Decomposition from_sigma(std::vector<double> dlns, double mu,
                                  std::vector<double> sigma);

  std::size_t size() const { return sigma.size(); }

  // max_i |sigma_i dw_i + mu - dlns_i| / max(|dlns_i|, |mu|, tiny).
  double max_reconstruction_error() const;

  // Throws DataError when an invariant is violated.
  void validate() const;
};

}  // namespace mfvol
