#include "doctest.h"

#include "qfr/gibbs.hpp"
#include "qfr/random.hpp"

#include <cmath>

using namespace qfr;

namespace {

Mat diag2(double a, double b) {
  Mat m = Mat::Zero(2, 2);
  m(0, 0) = a;
  m(1, 1) = b;
  return m;
}

}  // namespace

TEST_CASE("J-map basics") {
  TensorSpace q{{"q", 2}};
  ThermalContext zero(0.0, Operator(q, diag2(0.3, 1.7)));
  Rng rng(21);
  Mat x = random_ginibre(2, 2, rng);
  CHECK(max_abs(zero.j_map(x) - x) <= 1e-15);

  ThermalContext ctx(1.0, Operator(q, diag2(0.0, 1.0)));
  CHECK(max_abs(ctx.j_map(Mat::Identity(2, 2)) - diag2(1.0, std::exp(-1.0))) <= 1e-15);
  Mat e01 = matrix_unit(2, 0, 1);
  CHECK(max_abs(ctx.j_map(e01) - std::exp(-0.5) * e01) <= 1e-15);
  CHECK(max_abs(ctx.j_map(ctx.j_map(x), Direction::Inverse) - x) <= 1e-14);
}

TEST_CASE("partition and Gibbs maps") {
  const double beta = 0.7, s = 1.3;
  TensorSpace q{{"q", 2}};
  ThermalContext ctx(beta, Operator(q, diag2(-s / 2, s / 2)));
  CHECK(std::abs(ctx.partition(Mat::Identity(2, 2)) - (std::exp(beta * s / 2) + std::exp(-beta * s / 2))) <= 1e-14);
  CHECK(std::abs(ctx.partition() - ctx.partition(Mat::Identity(2, 2))) <= 1e-14);
  Mat g = ctx.gibbs_state().matrix();
  CHECK(std::abs(g.trace() - 1.0) <= 1e-15);
  CHECK(std::abs(g(0, 0).real() - std::exp(beta * s / 2) / ctx.partition()) <= 1e-15);

  Rng rng(22);
  TensorSpace h{{"h", 4}};
  Mat ham = random_hermitian(4, rng);
  ThermalContext c4(1.1, Operator(h, ham));
  Spectrum sp = eig_hermitian(ham);
  Mat psi = sp.vectors.col(2) * sp.vectors.col(2).adjoint();
  CHECK(max_abs(c4.gibbs(psi) - psi) <= 1e-13);
  CHECK(std::abs(c4.partition(psi) - std::exp(-1.1 * sp.values(2))) <= 1e-13);

  // An effect orthogonal to everything has no Gibbs image.
  CHECK_THROWS_AS(c4.gibbs(Mat(Mat::Zero(4, 4))), Error);

  // Gibbs map is onto the density operators.
  Mat rho = random_density(4, rng);
  Operator qpre = c4.gibbs_preimage(Operator(h, rho));
  CHECK(is_effect(qpre, 1e-10));
  CHECK(max_abs(c4.gibbs(qpre.matrix()) - rho) <= 1e-9);
}

TEST_CASE("J-map duality and positivity") {
  Rng rng(23);
  TensorSpace h{{"h", 5}};
  Mat ham = random_hermitian(5, rng);
  ThermalContext ctx(0.9, Operator(h, ham));
  Mat a = random_ginibre(5, 5, rng), r = random_ginibre(5, 5, rng);
  CHECK(std::abs((a * ctx.j_map(r)).trace() - (ctx.j_map(a) * r).trace()) <= 1e-11);
  CHECK(is_positive_semidefinite(ctx.j_map(random_density(5, rng)), 1e-12));

  // With H >= 0 the J-map does not increase the trace of effects.
  Mat shifted = ham - Mat::Identity(5, 5) * eig_hermitian(ham).values.minCoeff();
  ThermalContext pos(0.9, Operator(h, shifted));
  for (int k = 0; k < 5; ++k) {
    Mat q = random_effect(5, rng);
    CHECK(pos.j_map(q).trace().real() <= q.trace().real() + 1e-12);
  }
}

TEST_CASE("factorization for non-interacting Hamiltonians") {
  Rng rng(24);
  TensorSpace a{{"a", 3}}, b{{"b", 2}};
  Operator h1(a, random_hermitian(3, rng)), h2(b, random_hermitian(2, rng));
  Operator hg = tensor_product(h1, Operator::identity(b)) + tensor_product(Operator::identity(a), h2);
  for (int k = 0; k < 5; ++k) {
    Operator q1(a, random_effect(3, rng)), q2(b, random_effect(2, rng));
    CHECK(factorization_deficit(hg, h1, h2, q1, q2, 1.3) <= 1e-11);
    CHECK(factorization_deficit(hg, h1, h2, q1, q2, 0.0) <= 1e-13);
  }
  // An interaction term makes the deficit finite.
  Operator coupling(a.concat(b), random_hermitian(6, rng));
  Operator hint = hg + coupling * cplx(0.5);
  Operator one_a = Operator::identity(a), one_b = Operator::identity(b);
  CHECK(factorization_deficit(hint, h1, h2, one_a, one_b, 1.0) > 1e-2);
  CHECK(factorization_deficit(hint, h1, h2, one_a, one_b, 0.0) <= 1e-13);
}

TEST_CASE("generalized J-maps lose factorization") {
  TensorSpace a{{"a", 2}}, b{{"b", 2}};
  // Spectrum {0, 2} keeps g(x) = 1/(1+x) finite.
  Operator h1(a, diag2(0, 2)), h2(b, diag2(0, 2));
  Operator hg = tensor_product(h1, Operator::identity(b)) + tensor_product(Operator::identity(a), h2);
  Operator q1 = Operator::identity(a), q2 = Operator::identity(b);
  auto expo = [](double x) { return cplx(std::exp(-x / 2)); };
  auto rational = [](double x) { return cplx(1.0 / (1.0 + x)); };
  auto one = [](double) { return cplx(1.0); };
  CHECK(std::abs(generalized_j_deficit(expo, hg, h1, h2, q1, q2, 1.0) -
                 factorization_deficit(hg, h1, h2, q1, q2, 1.0)) <= 1e-14);
  // Diagonal oracle: sum over (x,y) in {0,2}^2 of |g(x)^2 g(y)^2 - g(x+y)^2|.
  double oracle = 0;
  for (double x : {0.0, 2.0})
    for (double y : {0.0, 2.0}) {
      const double gx = 1 / (1 + x), gy = 1 / (1 + y), gxy = 1 / (1 + x + y);
      oracle += std::abs(gx * gx * gy * gy - gxy * gxy);
    }
  const double d = generalized_j_deficit(rational, hg, h1, h2, q1, q2, 1.0);
  CHECK(d > 0.01);
  CHECK(std::abs(d - oracle) <= 1e-14);
  Rng rng(25);
  Operator r1(a, random_effect(2, rng)), r2(b, random_effect(2, rng));
  CHECK(generalized_j_deficit(one, hg, h1, h2, r1, r2, 1.0) <= 1e-14);
}
