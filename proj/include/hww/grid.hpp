#pragma once

#include <cstddef>
#include <vector>

#include "hww/mesh.hpp"

namespace hww {

/// Where a grid function lives on the mesh.
enum class Placement {
  cell,                // one value per cell (length I)
  cell_with_boundary,  // boundary point, I cell averages, boundary point (I+2)
  edge,                // one value per edge (length I+1)
};

/// Real-valued vector indexed by mesh cells or edges; the common currency of
/// the solver, the filters, and the metrics.
struct GridFunction {
  Placement placement = Placement::cell;
  std::vector<double> values;

  static GridFunction cell(int cells, double fill = 0.0) {
    return {Placement::cell, std::vector<double>(cells, fill)};
  }
  static GridFunction cell_with_boundary(int cells, double fill = 0.0) {
    return {Placement::cell_with_boundary, std::vector<double>(cells + 2, fill)};
  }
  static GridFunction edge(int cells, double fill = 0.0) {
    return {Placement::edge, std::vector<double>(cells + 1, fill)};
  }

  std::size_t size() const { return values.size(); }
  double& operator[](std::size_t i) { return values[i]; }
  double operator[](std::size_t i) const { return values[i]; }

  bool shape_matches(const Mesh1D& mesh) const {
    const std::size_t cells = static_cast<std::size_t>(mesh.cells());
    switch (placement) {
      case Placement::cell: return values.size() == cells;
      case Placement::cell_with_boundary: return values.size() == cells + 2;
      case Placement::edge: return values.size() == cells + 1;
    }
    return false;
  }
};

}  // namespace hww
