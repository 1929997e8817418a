#pragma once

#include <string>
#include <vector>

namespace hww {

/// One-group macroscopic cross sections [1/cm] and particle speed [cm/s].
struct Material {
  double sigma_t = 1.0;
  double sigma_s = 0.0;
  double sigma_f = 0.0;
  double nu_f = 0.0;
  double speed = 1.0;

  /// Removal rate sigma_t - sigma_s - nu_f*sigma_f; negative means the
  /// medium is supercritical.
  double removal() const { return sigma_t - sigma_s - nu_f * sigma_f; }

  std::vector<std::string> validate() const {
    std::vector<std::string> issues;
    if (!(sigma_t > 0)) issues.push_back("sigma_t must be > 0");
    if (sigma_s < 0 || sigma_s > sigma_t)
      issues.push_back("sigma_s must lie in [0, sigma_t]");
    if (sigma_f < 0 || sigma_f > sigma_t)
      issues.push_back("sigma_f must lie in [0, sigma_t]");
    if (sigma_s + sigma_f > sigma_t)
      issues.push_back("sigma_s + sigma_f must not exceed sigma_t");
    if (nu_f < 0) issues.push_back("nu_f must be >= 0");
    if (!(speed > 0)) issues.push_back("speed must be > 0");
    return issues;
  }
};

}  // namespace hww
