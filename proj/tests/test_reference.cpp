#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <vector>

#include "hww/config.hpp"
#include "hww/reference.hpp"

using namespace hww;

TEST_CASE("gauss-legendre quadrature integrates polynomials exactly") {
  for (const int order : {2, 4, 8, 16}) {
    const GaussLegendre quad = GaussLegendre::order(order);
    double w_sum = 0.0, mu2 = 0.0;
    for (int k = 0; k < order; ++k) {
      w_sum += quad.weight[k];
      mu2 += quad.weight[k] * quad.mu[k] * quad.mu[k];
      CHECK(quad.mu[k] == doctest::Approx(-quad.mu[order - 1 - k]).epsilon(1e-14));
    }
    CHECK(w_sum == doctest::Approx(2.0).epsilon(1e-14));
    CHECK(mu2 == doctest::Approx(2.0 / 3.0).epsilon(1e-13));
  }
  CHECK_THROWS(GaussLegendre::order(3));
}

TEST_CASE("angular moments of canonical fluxes") {
  const GaussLegendre quad = GaussLegendre::order(8);
  const int cells = 1;

  // Isotropic psi = 1/2: phi = 1, J = 0, F = 0.
  std::vector<double> iso(8 * cells, 0.5);
  const MomentSet m_iso = moments(iso, quad, cells);
  CHECK(m_iso.phi[0] == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(m_iso.current[0] == doctest::Approx(0.0).epsilon(1e-14));
  CHECK(m_iso.closure[0] == doctest::Approx(0.0).epsilon(1e-14));

  // A beam at one node: J/phi = mu_k.
  std::vector<double> beam(8 * cells, 0.0);
  beam[5 * cells] = 1.0 / quad.weight[5];
  const MomentSet m_beam = moments(beam, quad, cells);
  CHECK(m_beam.current[0] / m_beam.phi[0] == doctest::Approx(quad.mu[5]));

  // psi(mu) = P2(mu): F = int (1/3 - mu^2) P2 / ... = -4/15 analytically.
  std::vector<double> p2(8 * cells);
  for (int k = 0; k < 8; ++k)
    p2[k * cells] = 0.5 * (3.0 * quad.mu[k] * quad.mu[k] - 1.0);
  const MomentSet m_p2 = moments(p2, quad, cells);
  CHECK(m_p2.phi[0] == doctest::Approx(0.0).epsilon(1e-14));
  CHECK(m_p2.closure[0] == doctest::Approx(-4.0 / 15.0).epsilon(1e-13));
}

TEST_CASE("steady beam attenuates exponentially through a pure absorber") {
  // Oracle: per-direction cell-average of e^{-sigma x / mu}. A huge time
  // step reduces backward Euler to the steady equation.
  const int cells = 200;
  SnProblem prob;
  prob.mesh = build_uniform_mesh(0.0, 5.0, cells);
  prob.materials.assign(cells, Material{1.0, 0.0, 0.0, 0.0, 1.0});
  prob.tgrid = TimeGrid::uniform(0.0, 1e12, 1);
  const int order = 8;
  prob.psi0.assign(order * cells, 0.0);
  prob.inc_left.assign(order, 1.0);
  prob.inc_right.assign(order, 0.0);
  prob.q.assign(cells, 0.0);

  SnConfig config;
  config.quadrature_order = order;
  const SnSolution sol = sn_solve(prob, config);
  const GaussLegendre& quad = sol.quadrature;

  // With no scattering each direction attenuates independently, so the
  // scalar flux equals the quadrature sum of analytic per-direction
  // cell-average attenuations.
  double worst = 0.0;
  std::vector<double> expect(cells, 0.0);
  for (int i = 0; i < cells; ++i) {
    const double x0 = prob.mesh.edge(i), x1 = prob.mesh.edge(i + 1);
    for (int k = 0; k < order; ++k) {
      const double mu = quad.mu[k];
      if (mu <= 0.0) continue;
      expect[i] += quad.weight[k] * mu / (x1 - x0) *
                   (std::exp(-x0 / mu) - std::exp(-x1 / mu));
    }
  }
  for (int i = 0; i < cells; ++i) {
    const double got = sol.layers.back().phi[i];
    const double rel = std::abs(got - expect[i]) / expect[i];
    worst = std::max(worst, rel);
  }
  CHECK(worst < 0.01);
}

TEST_CASE("per-step particle balance closes") {
  RunConfig config = RunConfig::benchmark();
  config.cells = 50;
  config.x_min = -5.0;
  config.x_max = 5.0;
  config.t_end = 2.0;
  config.time_steps = 2;
  SnProblem prob = pulse_problem(config, 3, 5);
  const int cells = prob.mesh.cells();
  const int order = 8;
  prob.psi0.assign(order * cells, 0.0);
  // Smooth isotropic initial hump.
  for (int k = 0; k < order; ++k)
    for (int i = 0; i < cells; ++i)
      prob.psi0[static_cast<std::size_t>(k) * cells + i] =
          0.5 * std::exp(-prob.mesh.center(i) * prob.mesh.center(i));
  prob.inc_left.assign(order, 0.0);
  prob.inc_right.assign(order, 0.0);

  SnConfig sn;
  sn.quadrature_order = order;
  sn.tolerance = 1e-12;
  const SnSolution sol = sn_solve(prob, sn);

  const Material mat = config.material;
  for (int n = 1; n <= prob.tgrid.steps(); ++n) {
    const auto& now = sol.layers[n];
    const auto& prev = sol.layers[n - 1];
    const double dt = prob.tgrid.dt(n);
    double time_term = 0.0, reaction = 0.0;
    for (int i = 0; i < cells; ++i) {
      const double dx = prob.mesh.width(i);
      time_term += (now.phi[i] - prev.phi[i]) / (mat.speed * dt) * dx;
      reaction += mat.removal() * now.phi[i] * dx;
    }
    const double leakage = now.current_edge[cells] - now.current_edge[0];
    const double residual = time_term + leakage + reaction;
    double scale = std::abs(time_term) + std::abs(leakage) + std::abs(reaction);
    CHECK(std::abs(residual) <= 1e-9 * scale);
  }
}

TEST_CASE("supercritical population grows like the point-kinetics law") {
  // Oracle: total population N(t) = integral phi/v = e^{0.1 t} for the
  // benchmark constants with the pulse normalized to one particle.
  RunConfig config = RunConfig::benchmark();
  config.x_min = -25.0;
  config.x_max = 25.0;
  config.cells = 125;
  config.t_end = 20.0;
  config.time_steps = 20;
  SnProblem prob = pulse_problem(config, 2, 50);  // dt = 0.02
  // Load the impulse.
  const int order = 8;
  const int cells = prob.mesh.cells();
  prob.psi0.assign(order * cells, 0.0);
  prob.inc_left.assign(order, 0.0);
  prob.inc_right.assign(order, 0.0);
  const auto center = prob.mesh.locate(0.0);
  REQUIRE(center.has_value());
  for (int k = 0; k < order; ++k)
    prob.psi0[static_cast<std::size_t>(k) * cells + *center] =
        0.5 / prob.mesh.width(*center);

  SnConfig sn;
  sn.quadrature_order = order;
  const SnSolution sol = sn_solve(prob, sn);

  double population = 0.0;
  for (int i = 0; i < cells; ++i)
    population += sol.layers.back().phi[i] * prob.mesh.width(i);
  CHECK(population == doctest::Approx(std::exp(2.0)).epsilon(0.005));

  // Zero data stays zero.
  SnProblem empty = prob;
  empty.psi0.assign(order * cells, 0.0);
  const SnSolution zero = sn_solve(empty, sn);
  for (double v : zero.layers.back().phi) CHECK(v == 0.0);
}

TEST_CASE("projection onto tally grids") {
  // Identity when the grids coincide; width-weighted means otherwise.
  const Mesh1D tally = build_uniform_mesh(0.0, 1.0, 4);
  SnSolution fine;
  fine.mesh = build_uniform_mesh(0.0, 1.0, 8);
  fine.tgrid = TimeGrid::uniform(0.0, 1.0, 2);
  fine.layers.resize(3);
  for (int m = 0; m <= 2; ++m) {
    fine.layers[m].phi.resize(8);
    for (int i = 0; i < 8; ++i)
      fine.layers[m].phi[i] = (m + 1) * (i + 1);  // layer- and cell-dependent
  }
  const TimeGrid mc_grid = TimeGrid::uniform(0.0, 1.0, 2);
  const ReferenceSolution ref = project(fine, tally, mc_grid);
  // Pairs of fine cells average arithmetically on a uniform mesh.
  CHECK(ref.phi_layer[0][0] == doctest::Approx(1.5));
  CHECK(ref.phi_layer[2][3] == doctest::Approx(3.0 * 7.5));
  // Trapezoid in time over one fine step per MC step = endpoint average.
  CHECK(ref.interval_avg(1)[0] == doctest::Approx(0.5 * (1.5 + 3.0)));

  const Mesh1D stranger = build_uniform_mesh(0.0, 2.0, 4);
  CHECK_THROWS(project(fine, stranger, mc_grid));
}

TEST_CASE("reference file round trip and shape validation") {
  RunConfig config = RunConfig::benchmark();
  config.cells = 21;
  config.x_min = -2.0;
  config.x_max = 2.0;
  config.t_end = 2.0;
  config.time_steps = 2;
  const ReferenceSolution ref = compute_reference(config, 3, 4, 4);

  const auto path = std::filesystem::temp_directory_path() / "hww_ref_test.csv";
  save_reference(ref, path.string());
  const ReferenceSolution loaded =
      load_reference(path.string(), config.make_mesh(), config.make_time_grid());
  for (int n = 0; n <= 2; ++n)
    for (int c = 0; c < config.cells; ++c)
      CHECK(loaded.phi_layer[n][c] == ref.phi_layer[n][c]);
  for (int n = 1; n <= 2; ++n)
    for (int c = 0; c < config.cells; ++c)
      CHECK(loaded.interval_avg(n)[c] == ref.interval_avg(n)[c]);

  // A mismatched mesh is rejected with a shape error.
  RunConfig other = config;
  other.cells = 11;
  CHECK_THROWS(load_reference(path.string(), other.make_mesh(),
                              other.make_time_grid()));
  std::filesystem::remove(path);
}
