#pragma once

#include <vector>

namespace hww {

/// Tridiagonal system with one fill superdiagonal for partial pivoting.
/// lower[k] couples row k to column k-1 (lower[0] unused), upper[k] couples
/// row k to column k+1 (upper[n-1] unused).
struct TridiagonalSystem {
  std::vector<double> lower;
  std::vector<double> diag;
  std::vector<double> upper;
  std::vector<double> rhs;

  explicit TridiagonalSystem(int n)
      : lower(n, 0.0), diag(n, 0.0), upper(n, 0.0), rhs(n, 0.0) {}

  int size() const { return static_cast<int>(diag.size()); }
};

/// Reported when elimination hits a zero pivot; `row` names the offending
/// pivot index.
struct SingularSystemError {
  int row = -1;
};

/// Direct banded elimination with partial pivoting (row swaps between
/// adjacent rows; fill limited to a second superdiagonal). Throws
/// SingularSystemError on a vanishing pivot. Destroys the system in place
/// and returns the solution.
std::vector<double> solve_tridiagonal_pivoted(TridiagonalSystem system);

}  // namespace hww
