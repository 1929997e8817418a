#include <doctest.h>

#include <cmath>
#include <vector>

#include "hww/banded.hpp"
#include "hww/config.hpp"
#include "hww/losm.hpp"
#include "hww/rng.hpp"

using namespace hww;

namespace {

// Dense Gaussian elimination with partial pivoting: the oracle for the
// banded solver.
std::vector<double> dense_solve(std::vector<std::vector<double>> a,
                                std::vector<double> b) {
  const int n = static_cast<int>(b.size());
  for (int k = 0; k < n; ++k) {
    int pivot = k;
    for (int r = k + 1; r < n; ++r)
      if (std::abs(a[r][k]) > std::abs(a[pivot][k])) pivot = r;
    std::swap(a[k], a[pivot]);
    std::swap(b[k], b[pivot]);
    for (int r = k + 1; r < n; ++r) {
      const double m = a[r][k] / a[k][k];
      for (int c = k; c < n; ++c) a[r][c] -= m * a[k][c];
      b[r] -= m * b[k];
    }
  }
  std::vector<double> x(n);
  for (int k = n - 1; k >= 0; --k) {
    double s = b[k];
    for (int c = k + 1; c < n; ++c) s -= a[k][c] * x[c];
    x[k] = s / a[k][k];
  }
  return x;
}

LOSMState random_state(int cells, RngStream& rng) {
  LOSMState s = LOSMState::zero(cells);
  for (auto& v : s.phi.values) v = rng.uniform_pm1();
  for (auto& v : s.current.values) v = 0.3 * rng.uniform_pm1();
  return s;
}

ClosureInput random_closures(int cells, RngStream& rng, bool implicit) {
  GridFunction F_prev = GridFunction::cell_with_boundary(cells);
  for (auto& v : F_prev.values) v = 0.05 * rng.uniform_pm1();
  if (!implicit) return ClosureInput::lagged(F_prev, 0.01, -0.02);
  GridFunction F_now = GridFunction::cell_with_boundary(cells);
  for (auto& v : F_now.values) v = 0.05 * rng.uniform_pm1();
  return ClosureInput::implicit(F_now, 0.02, 0.01, F_prev, 0.01, -0.02);
}

}  // namespace

TEST_CASE("pivoted tridiagonal solver matches dense elimination") {
  RngStream rng(42, 0);
  for (int trial = 0; trial < 20; ++trial) {
    const int n = 3 + static_cast<int>(rng.uniform() * 30);
    TridiagonalSystem sys(n);
    std::vector<std::vector<double>> dense(n, std::vector<double>(n, 0.0));
    for (int i = 0; i < n; ++i) {
      sys.diag[i] = rng.uniform_pm1();
      sys.rhs[i] = rng.uniform_pm1();
      dense[i][i] = sys.diag[i];
      if (i > 0) {
        sys.lower[i] = rng.uniform_pm1();
        dense[i][i - 1] = sys.lower[i];
      }
      if (i + 1 < n) {
        sys.upper[i] = rng.uniform_pm1();
        dense[i][i + 1] = sys.upper[i];
      }
    }
    const auto expect = dense_solve(dense, sys.rhs);
    const auto got = solve_tridiagonal_pivoted(sys);
    for (int i = 0; i < n; ++i)
      CHECK(got[i] == doctest::Approx(expect[i]).epsilon(1e-9));
  }

  // A vanishing pivot is reported with its row.
  TridiagonalSystem singular(3);
  singular.diag = {1.0, 0.0, 0.0};
  singular.upper = {0.0, 0.0, 0.0};
  singular.lower = {0.0, 0.0, 0.0};
  singular.rhs = {1.0, 1.0, 1.0};
  CHECK_THROWS_AS(solve_tridiagonal_pivoted(singular), SingularSystemError);
}

TEST_CASE("zero data solves to zero") {
  const Mesh1D mesh = build_uniform_mesh(0.0, 1.0, 8);
  const std::vector<Material> mats(mesh.cells(), RunConfig::benchmark().material);
  const LOSMState prev = LOSMState::zero(mesh.cells());
  const ClosureInput closures = ClosureInput::lagged(
      GridFunction::cell_with_boundary(mesh.cells()), 0.0, 0.0);
  const GridFunction q = GridFunction::cell(mesh.cells());
  const LOSMState out = assemble_solve(prev, closures, 1.0, 0.5, mats, mesh, q);
  for (double v : out.phi.values) CHECK(v == 0.0);
  for (double v : out.current.values) CHECK(v == 0.0);
}

TEST_CASE("infinite-medium implicit solve hits the point-kinetics value") {
  // Oracle: with no gradients, (1/(v dt) + removal) phi^n = phi^{n-1}/(v dt),
  // so phi^n = 1/(1 + v dt removal) = 1/0.9 for the benchmark constants.
  const Mesh1D mesh = build_uniform_mesh(0.0, 60.0, 300);
  const std::vector<Material> mats(mesh.cells(), RunConfig::benchmark().material);
  LOSMState prev = LOSMState::zero(mesh.cells());
  for (auto& v : prev.phi.values) v = 1.0;
  const ClosureInput closures = ClosureInput::lagged(
      GridFunction::cell_with_boundary(mesh.cells()), 0.0, 0.0);
  const GridFunction q = GridFunction::cell(mesh.cells());
  const LOSMState out = assemble_solve(prev, closures, 1.0, 1.0, mats, mesh, q);

  const double expected = 1.0 / 0.9;
  for (int i = 0; i < mesh.cells(); ++i) {
    const double x = mesh.center(i);
    if (x > 20.0 && x < 40.0)
      CHECK(out.phi[i + 1] == doctest::Approx(expected).epsilon(1e-10));
  }
}

TEST_CASE("every discrete equation is satisfied to round-off") {
  const Mesh1D mesh = build_uniform_mesh(-2.0, 2.0, 37);
  const std::vector<Material> mats(mesh.cells(), RunConfig::benchmark().material);
  RngStream rng(3, 3);
  const LOSMState prev = random_state(mesh.cells(), rng);
  GridFunction q = GridFunction::cell(mesh.cells());
  for (auto& v : q.values) v = rng.uniform_pm1();

  for (const bool implicit : {false, true}) {
    const ClosureInput closures = random_closures(mesh.cells(), rng, implicit);
    for (const double theta : {0.5, 0.7, 1.0}) {
      const LOSMState out =
          assemble_solve(prev, closures, theta, 0.25, mats, mesh, q);
      const auto residuals =
          equation_residuals(prev, closures, theta, 0.25, mats, mesh, q, out);
      for (double r : residuals) CHECK(r <= 1e-12);
    }
  }
}

TEST_CASE("residuals hold on a nonuniform mesh") {
  // Pins the half-cell width convention on nonuniform spacing.
  const Mesh1D mesh = Mesh1D::from_edges({0.0, 0.1, 0.4, 1.0, 1.3, 2.4});
  std::vector<Material> mats;
  for (int i = 0; i < mesh.cells(); ++i)
    mats.push_back({1.0 + 0.2 * i, 0.3, 0.1, 2.0, 1.0 + 0.1 * i});
  RngStream rng(4, 4);
  const LOSMState prev = random_state(mesh.cells(), rng);
  const ClosureInput closures = random_closures(mesh.cells(), rng, true);
  const GridFunction q = GridFunction::cell(mesh.cells());
  const LOSMState out = assemble_solve(prev, closures, 0.5, 0.3, mats, mesh, q);
  const auto residuals =
      equation_residuals(prev, closures, 0.5, 0.3, mats, mesh, q, out);
  for (double r : residuals) CHECK(r <= 1e-12);
}

TEST_CASE("solution scales linearly with the data") {
  const Mesh1D mesh = build_uniform_mesh(0.0, 3.0, 15);
  const std::vector<Material> mats(mesh.cells(), RunConfig::benchmark().material);
  RngStream rng(5, 5);
  LOSMState prev = random_state(mesh.cells(), rng);
  ClosureInput closures = random_closures(mesh.cells(), rng, false);
  GridFunction q = GridFunction::cell(mesh.cells());
  for (auto& v : q.values) v = rng.uniform_pm1();

  const LOSMState base = assemble_solve(prev, closures, 0.5, 0.4, mats, mesh, q);

  // Powers of two scale exactly.
  const double lambda = 64.0;
  LOSMState prev2 = prev;
  for (auto& v : prev2.phi.values) v *= lambda;
  for (auto& v : prev2.current.values) v *= lambda;
  ClosureInput closures2 = closures;
  for (auto& v : closures2.F_prev.values) v *= lambda;
  closures2.PL_prev *= lambda;
  closures2.PR_prev *= lambda;
  GridFunction q2 = q;
  for (auto& v : q2.values) v *= lambda;

  const LOSMState scaled = assemble_solve(prev2, closures2, 0.5, 0.4, mats, mesh, q2);
  for (std::size_t i = 0; i < base.phi.values.size(); ++i)
    CHECK(scaled.phi.values[i] == lambda * base.phi.values[i]);
  for (std::size_t i = 0; i < base.current.values.size(); ++i)
    CHECK(scaled.current.values[i] == lambda * base.current.values[i]);
}

TEST_CASE("edge currents from census cell averages") {
  const Mesh1D mesh = build_uniform_mesh(0.0, 1.0, 2);
  const GridFunction edges = edge_currents_from_census({1.0, 3.0}, mesh);
  CHECK(edges[0] == 1.0);
  CHECK(edges[1] == doctest::Approx(2.0));  // midpoint average
  CHECK(edges[2] == 3.0);

  const Mesh1D fine = build_uniform_mesh(0.0, 1.0, 10);
  const GridFunction flat = edge_currents_from_census(
      std::vector<double>(10, 0.7), fine);
  for (double v : flat.values) CHECK(v == doctest::Approx(0.7));

  // Linear fields are reconstructed exactly at interior edges.
  std::vector<double> linear(10);
  for (int i = 0; i < 10; ++i) linear[i] = 2.0 * fine.center(i) - 0.3;
  const GridFunction lin_edges = edge_currents_from_census(linear, fine);
  for (int e = 1; e < 10; ++e)
    CHECK(lin_edges[e] == doctest::Approx(2.0 * fine.edge(e) - 0.3).epsilon(1e-13));

  CHECK_THROWS(edge_currents_from_census({1.0}, build_uniform_mesh(0, 1, 1)));
}

TEST_CASE("march composes single steps") {
  const Mesh1D mesh = build_uniform_mesh(0.0, 2.0, 9);
  const std::vector<Material> mats(mesh.cells(), RunConfig::benchmark().material);
  RngStream rng(6, 6);
  const LOSMState initial = random_state(mesh.cells(), rng);
  const GridFunction q = GridFunction::cell(mesh.cells());
  const TimeGrid tgrid = TimeGrid::uniform(0.0, 1.0, 3);

  std::vector<ClosureInput> closures;
  for (int n = 0; n < 3; ++n)
    closures.push_back(random_closures(mesh.cells(), rng, false));

  const auto states = march(initial, closures, tgrid, 1.0, mats, mesh, q);
  REQUIRE(states.size() == 3);

  LOSMState step = assemble_solve(initial, closures[0], 1.0, tgrid.dt(1), mats, mesh, q);
  for (std::size_t i = 0; i < step.phi.values.size(); ++i)
    CHECK(states[0].phi.values[i] == step.phi.values[i]);

  // Zero everything marches to zero.
  const std::vector<ClosureInput> zero_closures(
      3, ClosureInput::lagged(GridFunction::cell_with_boundary(mesh.cells()), 0, 0));
  const auto zeros = march(LOSMState::zero(mesh.cells()), zero_closures, tgrid,
                           0.5, mats, mesh, q);
  for (const auto& s : zeros)
    for (double v : s.phi.values) CHECK(v == 0.0);
}

TEST_CASE("theta schemes converge together as dt shrinks") {
  // || phi_BE - phi_CN || = O(dt) on a fixed smooth decay problem.
  const Mesh1D mesh = build_uniform_mesh(0.0, 40.0, 100);
  std::vector<Material> mats(mesh.cells(), Material{1.0, 0.3, 0.0, 0.0, 1.0});
  LOSMState initial = LOSMState::zero(mesh.cells());
  for (auto& v : initial.phi.values) v = 1.0;
  const GridFunction q = GridFunction::cell(mesh.cells());

  auto gap_at = [&](int steps) {
    const TimeGrid tgrid = TimeGrid::uniform(0.0, 1.0, steps);
    const std::vector<ClosureInput> closures(
        steps, ClosureInput::lagged(GridFunction::cell_with_boundary(mesh.cells()), 0, 0));
    const auto be = march(initial, closures, tgrid, 1.0, mats, mesh, q);
    const auto cn = march(initial, closures, tgrid, 0.5, mats, mesh, q);
    double gap = 0.0;
    const int mid = mesh.cells() / 2;
    gap = std::abs(be.back().phi[mid + 1] - cn.back().phi[mid + 1]);
    return gap;
  };

  const double coarse = gap_at(4);
  const double fine = gap_at(8);
  CHECK(coarse / fine == doctest::Approx(2.0).epsilon(0.2));
}
