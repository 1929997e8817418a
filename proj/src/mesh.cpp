#include "hww/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace hww {

Mesh1D Mesh1D::from_edges(std::vector<double> edges) {
  if (edges.size() < 2) throw std::invalid_argument("mesh needs at least one cell");
  for (std::size_t i = 1; i < edges.size(); ++i) {
    if (!(edges[i] > edges[i - 1]))
      throw std::invalid_argument("mesh edges must be strictly increasing");
  }
  Mesh1D mesh;
  mesh.edges_ = std::move(edges);
  const int n = static_cast<int>(mesh.edges_.size()) - 1;
  mesh.widths_.resize(n);
  for (int c = 0; c < n; ++c) mesh.widths_[c] = mesh.edges_[c + 1] - mesh.edges_[c];
  const double w0 = mesh.widths_.front();
  mesh.uniform_ = std::all_of(mesh.widths_.begin(), mesh.widths_.end(),
                              [&](double w) { return std::abs(w - w0) <= 1e-12 * w0; });
  return mesh;
}

std::optional<int> Mesh1D::locate(double x) const {
  if (x < x_min() || x > x_max()) return std::nullopt;
  if (x == x_max()) return cells() - 1;
  if (uniform_) {
    const double w = widths_.front();
    int c = static_cast<int>((x - x_min()) / w);
    // Guard against round-off landing one cell over.
    if (c >= cells()) c = cells() - 1;
    if (x < edges_[c]) --c;
    else if (x >= edges_[c + 1]) ++c;
    return c;
  }
  const auto it = std::upper_bound(edges_.begin(), edges_.end(), x);
  return static_cast<int>(it - edges_.begin()) - 1;
}

Mesh1D build_uniform_mesh(double x_min, double x_max, int cells) {
  if (cells < 1) throw std::invalid_argument("cell count must be positive");
  if (!(x_min < x_max)) throw std::invalid_argument("x_min must be < x_max");
  std::vector<double> edges(cells + 1);
  const double w = (x_max - x_min) / cells;
  for (int e = 0; e <= cells; ++e) edges[e] = x_min + e * w;
  edges.back() = x_max;
  return Mesh1D::from_edges(std::move(edges));
}

}  // namespace hww
