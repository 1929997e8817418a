#include "hww/banded.hpp"

#include <cmath>
#include <utility>

namespace hww {

std::vector<double> solve_tridiagonal_pivoted(TridiagonalSystem sys) {
  const int n = sys.size();
  std::vector<double>& a = sys.lower;
  std::vector<double>& b = sys.diag;
  std::vector<double>& c = sys.upper;
  std::vector<double>& r = sys.rhs;
  std::vector<double> fill(n, 0.0);  // second superdiagonal created by swaps

  for (int k = 0; k + 1 < n; ++k) {
    if (std::abs(a[k + 1]) > std::abs(b[k])) {
      std::swap(b[k], a[k + 1]);
      std::swap(c[k], b[k + 1]);
      if (k + 2 < n) std::swap(fill[k], c[k + 1]);
      std::swap(r[k], r[k + 1]);
    }
    if (b[k] == 0.0) throw SingularSystemError{k};
    const double m = a[k + 1] / b[k];
    a[k + 1] = 0.0;
    b[k + 1] -= m * c[k];
    if (k + 2 < n) c[k + 1] -= m * fill[k];
    r[k + 1] -= m * r[k];
  }
  if (b[n - 1] == 0.0) throw SingularSystemError{n - 1};

  std::vector<double> x(n);
  x[n - 1] = r[n - 1] / b[n - 1];
  if (n >= 2) x[n - 2] = (r[n - 2] - c[n - 2] * x[n - 1]) / b[n - 2];
  for (int k = n - 3; k >= 0; --k)
    x[k] = (r[k] - c[k] * x[k + 1] - fill[k] * x[k + 2]) / b[k];
  return x;
}

}  // namespace hww
