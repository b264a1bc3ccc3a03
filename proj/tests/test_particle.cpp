#include "doctest.h"

#include "qfr/particle.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

using namespace qfr;

namespace {

constexpr double kPi = std::numbers::pi;

SpinFieldModel constant_field(Eigen::Vector3d n, KineticScheme scheme = KineticScheme::Fd3) {
  SpinFieldModel m;
  m.scheme = scheme;
  m.field = [n](double) { return n; };
  return m;
}

double mean_position(const GridSpec& g, const Vec& psi) {
  double m = 0.0;
  for (int j = 0; j < g.n_points; ++j) m += g.point(j) * std::norm(psi(j));
  return m;
}

// <p> from the fourth-order central difference of -i d/dy.
double mean_momentum(const GridSpec& g, const Vec& psi) {
  cplx m = 0.0;
  for (int j = 2; j + 2 < g.n_points; ++j)
    m += std::conj(psi(j)) * (8.0 * (psi(j + 1) - psi(j - 1)) - (psi(j + 2) - psi(j - 2))) / (12.0 * g.dy());
  return (cplx(0.0, -1.0) * m).real();
}

}  // namespace

TEST_CASE("field profile matches the stated piecewise form") {
  CHECK((default_field(-3.0) - Eigen::Vector3d(0, 0, 1)).norm() == 0.0);
  CHECK((default_field(3.0) - Eigen::Vector3d(0.5, 0, 0)).norm() == 0.0);
  // Continuous at both ends of the interaction region.
  CHECK((default_field(-1.0) - Eigen::Vector3d(0, 0, 1)).norm() < 1e-15);
  CHECK((default_field(1.0) - Eigen::Vector3d(0.5, 0, 0)).norm() < 1e-15);
  CHECK((default_field(-1.0 - 1e-9) - default_field(-1.0 + 1e-9)).norm() < 1e-8);
  CHECK((default_field(1.0 - 1e-9) - default_field(1.0 + 1e-9)).norm() < 1e-8);
  CHECK(default_field(0.0).norm() == doctest::Approx(0.75).epsilon(1e-14));
}

TEST_CASE("kinetic schemes against the particle in a box") {
  const GridSpec g{-8.0, 8.0, 255};
  const double mass = 10.0;
  const double box = g.y_max - g.y_min;
  auto analytic = [&](int m) { return std::pow(kPi * m / box, 2) / (2.0 * mass); };

  SUBCASE("sine scheme reproduces the continuum levels") {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(kinetic_matrix(g, mass, KineticScheme::Sine));
    for (int m = 1; m <= 5; ++m) CHECK(es.eigenvalues()(m - 1) == doctest::Approx(analytic(m)).epsilon(1e-10));
  }
  SUBCASE("finite differences converge at the expected order") {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> e3(kinetic_matrix(g, mass, KineticScheme::Fd3));
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> e5(kinetic_matrix(g, mass, KineticScheme::Fd5));
    const double kdy = kPi / box * g.dy();
    const double err3 = std::abs(e3.eigenvalues()(0) / analytic(1) - 1.0);
    const double err5 = std::abs(e5.eigenvalues()(0) / analytic(1) - 1.0);
    CHECK(err3 == doctest::Approx(kdy * kdy / 12.0).epsilon(0.01));
    CHECK(err5 < err3);
    CHECK(e3.eigenvalues()(0) > 0.0);
  }
}

TEST_CASE("spin field Hamiltonian spectra") {
  const GridSpec g{-8.0, 8.0, 96};
  SUBCASE("zero field is two copies of the box") {
    const auto h = spin_field_matrix(constant_field({0, 0, 0}, KineticScheme::Sine), g);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(h);
    const double ground = std::pow(kPi / (g.y_max - g.y_min), 2) / 20.0;
    CHECK(es.eigenvalues()(0) == doctest::Approx(ground).epsilon(1e-10));
    CHECK(es.eigenvalues()(1) == doctest::Approx(ground).epsilon(1e-10));
  }
  SUBCASE("constant z field shifts the box levels by -+E0/2") {
    const auto k = kinetic_matrix(g, 10.0, KineticScheme::Fd3);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> ek(k);
    std::vector<double> expected;
    for (int j = 0; j < g.n_points; ++j) {
      expected.push_back(ek.eigenvalues()(j) - 0.5);
      expected.push_back(ek.eigenvalues()(j) + 0.5);
    }
    std::sort(expected.begin(), expected.end());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(spin_field_matrix(constant_field({0, 0, 1}), g));
    for (int j = 0; j < 2 * g.n_points; ++j) CHECK(es.eigenvalues()(j) == doctest::Approx(expected[j]).epsilon(1e-12));
  }
  SUBCASE("real symmetric, so the transpose reversal fixes H") {
    const Operator h = build_hamiltonian(SpinFieldModel{}, g);
    CHECK(max_abs(Mat(h.matrix().imag().cast<cplx>())) == 0.0);
    CHECK(max_abs(Mat(h.matrix() - h.matrix().transpose())) == 0.0);
  }
  SUBCASE("a y-component would make H complex and is rejected") {
    CHECK_THROWS_AS(spin_field_matrix(constant_field({0, 1, 0}), g), Error);
  }
}

TEST_CASE("coherent states") {
  const GridSpec g{-16.0, 16.0, 512};
  const Vec c0 = coherent_state(g, 0.0, 0.5);
  CHECK(c0.norm() == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(std::abs(mean_position(g, c0)) < 1e-12);
  CHECK(std::abs(mean_momentum(g, c0)) < 1e-12);

  const Vec a = coherent_state(g, cplx(-4.0, 2.0), 0.5);
  CHECK(mean_position(g, a) == doctest::Approx(-4.0).epsilon(1e-10));
  CHECK(mean_momentum(g, a) == doctest::Approx(4.0).epsilon(5e-3));

  // Transposing |alpha><alpha| in position space conjugates the wave function.
  const Vec conj = coherent_state(g, cplx(-4.0, -2.0), 0.5);
  CHECK(max_abs(Mat(projector(a).transpose() - projector(conj))) < 1e-15);
  CHECK(mean_momentum(g, conj) == doctest::Approx(-4.0).epsilon(5e-3));

  CHECK_THROWS_AS(coherent_state(g, cplx(-31.0, 0.0), 0.5), Error);
  CHECK_THROWS_AS(coherent_state(GridSpec{-16.0, 16.0, 64}, 0.0, 0.5), Error);
}

TEST_CASE("propagator") {
  const GridSpec g{-6.0, 6.0, 64};
  const Operator h = build_hamiltonian(SpinFieldModel{}, g);
  CHECK(max_abs(Mat(evolve(h, 0.0).matrix() - Mat::Identity(h.dim(), h.dim()))) < 1e-12);
  const Mat v1 = evolve(h, 1.3).matrix(), v2 = evolve(h, 2.1).matrix();
  CHECK(max_abs(Mat(v1 * v2 - evolve(h, 3.4).matrix())) < 1e-11);
  CHECK(is_unitary(v1, 1e-11));
  CHECK(max_abs(Mat(h.matrix() * v1 - v1 * h.matrix())) < 1e-11);

  // The real-spectral path agrees with the generic one.
  const RealSpectral rs(spin_field_matrix(SpinFieldModel{}, g));
  CHECK(max_abs(Mat(rs.unitary(1.3) - v1)) < 1e-11);
  const Vec x = Vec::Random(h.dim());
  CHECK((rs.propagate(x, 1.3) - v1 * x).norm() < 1e-11);
}

TEST_CASE("free packet moves ballistically") {
  const GridSpec g{-16.0, 16.0, 512};
  const SpinFieldModel m = constant_field({0, 0, 0}, KineticScheme::Fd5);
  const RealSpectral k(kinetic_matrix(g, m.mass(), m.scheme));
  const Vec psi = coherent_state(g, cplx(-2.0, 2.0), 0.5);
  const double p = 2.0 / 0.5, t = 5.0;
  const Vec later = k.propagate(psi, t);
  const double moved = mean_position(g, later) - mean_position(g, psi);
  CHECK(moved == doctest::Approx(p / m.mass() * t).epsilon(0.01));
}

TEST_CASE("low-rank deficit against the dense trace norm") {
  const GridSpec g{-6.0, 6.0, 80};
  const SpinFieldModel m;
  const Eigen::MatrixXd hm = spin_field_matrix(m, g);
  const Eigen::MatrixXd km = kinetic_matrix(g, m.mass(), m.scheme);
  const RealSpectral hs(hm), ks(km);
  const TensorSpace spin{{"spin", 2}}, pos{{"y", g.n_points}};
  const Operator h(spin.concat(pos), hm.cast<cplx>());
  const Operator k(pos, km.cast<cplx>());
  Eigen::Matrix2d h_spin;
  h_spin << 0.2, 0.3, 0.3, -0.4;
  for (double r : {-2.0, 0.0, 1.5}) {
    const Vec psi = coherent_state(g, cplx(r, 1.0), 0.5);
    const double dense = factorization_deficit(h, Operator(spin, h_spin.cast<cplx>()), k, Operator::identity(spin),
                                               Operator(pos, projector(psi)), 1.0);
    CHECK(spin_grid_deficit(hs, ks, h_spin, psi, 1.0) == doctest::Approx(dense).epsilon(1e-9));
  }
}

TEST_CASE("worked example on the coarse grid") {
  const H3Result r = run_h3(H3Params::coarse());
  CHECK(r.p_plus == doctest::Approx(0.36).epsilon(0.01 / 0.36));
  CHECK(r.p_minus == doctest::Approx(0.39).epsilon(0.01 / 0.39));
  CHECK(r.residual <= 1e-6);
  CHECK(r.residual <= r.bound);
  CHECK(r.bound >= 1.2e-6);
  CHECK(r.bound <= 1.2e-4);
  CHECK(r.wall_probability < 1e-8);
}

TEST_CASE("worked example on the default grid") {
  const H3Result r = run_h3(H3Params{});
  CHECK(r.unitarity_defect <= 1e-11);
  CHECK(r.commutator_defect <= 1e-11);
  CHECK(r.wall_probability < 1e-8);
  CHECK(r.residual <= r.bound);
  CHECK(r.relative_residual < 1e-7);
  // The two approximate weights agree even though P+ and P- differ.
  CHECK(std::abs(r.p_plus - r.p_minus) > 0.01);
}

TEST_CASE("deficit curves") {
  H3Params p = H3Params::coarse();
  const auto rows = deficit_curves(p, -10.0, 10.0, 21);
  REQUIRE(rows.size() == 21);
  for (const auto& row : rows) {
    CHECK(std::isfinite(row.deficit_i));
    // Outside the region the local Hamiltonian is the asymptotic one.
    if (row.r <= -1.0) CHECK(row.deficit_local == doctest::Approx(row.deficit_i).epsilon(1e-12));
    if (row.r >= 1.0) CHECK(row.deficit_local == doctest::Approx(row.deficit_f).epsilon(1e-12));
  }
  const auto at = [&](double r) {
    return *std::find_if(rows.begin(), rows.end(), [r](const DeficitPoint& d) { return std::abs(d.r - r) < 1e-9; });
  };
  CHECK(at(-8.0).deficit_i < 1e-6);
  CHECK(at(8.0).deficit_f < 1e-6);
  CHECK(at(-8.0).deficit_f > 1e-2);
  CHECK(at(0.0).deficit_local < std::min(at(0.0).deficit_i, at(0.0).deficit_f));
}

TEST_CASE("approximate conditional relation with a control particle") {
  SUBCASE("no position dependence makes the relation exact") {
    ApproxConditionalParams p;
    p.coupling = 0.0;
    const auto r = run_approx_conditional(p);
    CHECK(r.diff <= 1e-10);
    CHECK(r.choi_distance <= 1e-10);
  }
  ApproxConditionalParams far;
  const auto rf = run_approx_conditional(far);
  CHECK(rf.diff <= rf.bound);
  CHECK(rf.diff > 0.0);
  CHECK_FALSE(rf.overlap_warning);

  ApproxConditionalParams inside;
  inside.alpha_i = {-0.5, 2.0};
  inside.alpha_f = {0.5, 2.0};
  inside.time = 2.5;
  const auto ri = run_approx_conditional(inside);
  CHECK(ri.overlap_warning);
  CHECK(ri.diff >= 10.0 * rf.diff);
  CHECK(ri.diff <= ri.bound);
}
