#include "qfr/random.hpp"

#include <Eigen/QR>

namespace qfr {

Mat random_ginibre(int rows, int cols, Rng& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  Mat m(rows, cols);
  for (int j = 0; j < cols; ++j)
    for (int i = 0; i < rows; ++i) m(i, j) = cplx(g(rng), g(rng)) / std::sqrt(2.0);
  return m;
}

Mat random_unitary(int n, Rng& rng) {
  Eigen::HouseholderQR<Mat> qr(random_ginibre(n, n, rng));
  Mat q = qr.householderQ();
  Mat r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int k = 0; k < n; ++k) {
    const double a = std::abs(r(k, k));
    if (a > 0) q.col(k) *= r(k, k) / a;
  }
  return q;
}

Eigen::MatrixXd random_orthogonal(int n, Rng& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  Eigen::MatrixXd m(n, n);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) m(i, j) = g(rng);
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(m);
  Eigen::MatrixXd q = qr.householderQ();
  for (int k = 0; k < n; ++k)
    if (qr.matrixQR()(k, k) < 0) q.col(k) *= -1.0;
  return q;
}

Mat random_hermitian(int n, Rng& rng, double scale) {
  Mat g = random_ginibre(n, n, rng);
  return scale * 0.5 * (g + g.adjoint());
}

Mat random_density(int n, Rng& rng) {
  Mat g = random_ginibre(n, n, rng);
  Mat rho = g * g.adjoint();
  return rho / rho.trace().real();
}

Mat random_effect(int n, Rng& rng) {
  Mat u = random_unitary(n, rng);
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  RVec d(n);
  for (int k = 0; k < n; ++k) d(k) = uni(rng);
  return u * d.cast<cplx>().asDiagonal() * u.adjoint();
}

Mat random_symmetric_unitary(int n, Rng& rng) {
  Mat w = random_unitary(n, rng);
  return w * w.transpose();
}

}  // namespace qfr
