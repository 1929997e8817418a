#pragma once

#include <optional>
#include <vector>

namespace hww {

/// 1-D spatial mesh given by strictly increasing edges x_0 < ... < x_I.
/// Cells are indexed 0..I-1; cell c spans [edges[c], edges[c+1]].
/// Ghost widths at both ends are zero by convention, which the low-order
/// solver relies on for its boundary half-cell equations.
class Mesh1D {
 public:
  static Mesh1D from_edges(std::vector<double> edges);

  int cells() const { return static_cast<int>(edges_.size()) - 1; }
  double x_min() const { return edges_.front(); }
  double x_max() const { return edges_.back(); }

  const std::vector<double>& edges() const { return edges_; }
  double edge(int e) const { return edges_[e]; }

  double width(int cell) const { return widths_[cell]; }
  double center(int cell) const {
    return 0.5 * (edges_[cell] + edges_[cell + 1]);
  }

  /// Width with ghost convention, indexed 0..I+1: ghost_width(0) =
  /// ghost_width(I+1) = 0, ghost_width(i) = width of cell i-1 otherwise.
  double ghost_width(int i) const {
    if (i <= 0 || i >= cells() + 1) return 0.0;
    return widths_[i - 1];
  }

  /// Half-cell control-volume width around edge i (0..I):
  /// 0.5*(ghost_width(i+1) + ghost_width(i)).
  double half_width(int edge) const {
    return 0.5 * (ghost_width(edge + 1) + ghost_width(edge));
  }

  /// Cell containing x, or nullopt when x lies outside [x_min, x_max].
  /// The right end is closed: x == x_max maps to the last cell.
  std::optional<int> locate(double x) const;

  bool uniform() const { return uniform_; }

 private:
  std::vector<double> edges_;
  std::vector<double> widths_;
  bool uniform_ = false;
};

/// Equispaced mesh with the given number of cells.
Mesh1D build_uniform_mesh(double x_min, double x_max, int cells);

inline std::optional<int> cell_index(const Mesh1D& mesh, double x) {
  return mesh.locate(x);
}

}  // namespace hww
