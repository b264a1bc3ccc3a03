#pragma once

#include "qfr/operator.hpp"

#include <random>

namespace qfr {

using Rng = std::mt19937_64;

Mat random_ginibre(int rows, int cols, Rng& rng);
// Haar-distributed unitary (QR of a Ginibre matrix with phase correction).
Mat random_unitary(int n, Rng& rng);
// Haar orthogonal matrix with real entries.
Eigen::MatrixXd random_orthogonal(int n, Rng& rng);
Mat random_hermitian(int n, Rng& rng, double scale = 1.0);
Mat random_density(int n, Rng& rng);
Mat random_effect(int n, Rng& rng);
// Complex-symmetric unitary W W^t.
Mat random_symmetric_unitary(int n, Rng& rng);

}  // namespace qfr
