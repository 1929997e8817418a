#include "hww/metrics.hpp"

#include <cmath>
#include <stdexcept>

namespace hww {

double l2_norm(std::span<const double> f, const Mesh1D& mesh) {
  if (f.size() != static_cast<std::size_t>(mesh.cells()))
    throw std::invalid_argument("l2_norm expects one value per cell");
  double sum = 0.0;
  for (int i = 0; i < mesh.cells(); ++i) sum += f[i] * f[i] * mesh.width(i);
  return std::sqrt(sum);
}

double modified_l2_norm(std::span<const double> f, const Mesh1D& mesh,
                        std::span<const double> mask_flux, double phi_star,
                        bool* empty_mask) {
  if (f.size() != static_cast<std::size_t>(mesh.cells()) ||
      mask_flux.size() != f.size())
    throw std::invalid_argument("modified_l2_norm shape mismatch");
  double sum = 0.0;
  bool any = false;
  for (int i = 0; i < mesh.cells(); ++i) {
    if (mask_flux[i] < phi_star) {
      sum += f[i] * f[i] * mesh.width(i);
      any = true;
    }
  }
  if (empty_mask) *empty_mask = !any;
  return std::sqrt(sum);
}

FomResult fom(std::span<const double> values, double tau, const Mesh1D& mesh,
              std::span<const double> mask_flux, double phi_star) {
  if (!(tau > 0.0)) throw std::invalid_argument("fom needs tau > 0");
  if (values.size() != static_cast<std::size_t>(mesh.cells()))
    throw std::invalid_argument("fom expects one value per cell");
  FomResult r;
  r.per_cell.assign(values.size(), 0.0);
  double sum = 0.0, sum_mod = 0.0;
  for (int i = 0; i < mesh.cells(); ++i) {
    if (values[i] == 0.0) {
      ++r.excluded;
      continue;
    }
    const double f = 1.0 / (tau * values[i] * values[i]);
    r.per_cell[i] = f;
    sum += f * f * mesh.width(i);
    if (!mask_flux.empty() && mask_flux[i] < phi_star) sum_mod += f * f * mesh.width(i);
  }
  r.l2 = std::sqrt(sum);
  r.modified_l2 = std::sqrt(sum_mod);
  return r;
}

double relative_change(std::span<const double> phi_now,
                       std::span<const double> phi_prev, const Mesh1D& mesh) {
  if (phi_now.size() != phi_prev.size())
    throw std::invalid_argument("relative_change shape mismatch");
  const double denom = l2_norm(phi_now, mesh);
  if (denom == 0.0) throw std::invalid_argument("relative_change: ||phi_now|| is zero");
  std::vector<double> diff(phi_now.size());
  for (std::size_t i = 0; i < diff.size(); ++i) diff[i] = phi_now[i] - phi_prev[i];
  return l2_norm(diff, mesh) / denom;
}

}  // namespace hww
