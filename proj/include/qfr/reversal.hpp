#pragma once

#include "qfr/channels.hpp"

namespace qfr {

// T(Q) = U Q^{t_B} U^dagger, where Q^{t_B} = B (B^dagger Q B)^t B^dagger is the
// transpose in the orthonormal basis formed by the columns of B.
class TimeReversal {
 public:
  TimeReversal() = default;

  const TensorSpace& space() const { return space_; }
  const Mat& basis() const { return basis_; }
  const Mat& twist() const { return twist_; }
  int sign() const { return sign_; }
  // Equivalent twist for the computational-basis transpose: T(Q) = W Q^t W^dagger.
  const Mat& effective_twist() const { return effective_; }

  Mat apply(const Mat& q) const { return effective_ * q.transpose() * effective_.adjoint(); }
  Operator apply(const Operator& q) const;

 private:
  friend TimeReversal make_reversal(const TensorSpace&, const Mat&, const Mat&, double);
  TensorSpace space_;
  Mat basis_, twist_, effective_;
  int sign_ = 1;
};

TimeReversal make_reversal(const TensorSpace& space, const Mat& basis, const Mat& twist, double tol = 1e-10);
// Plain transpose in the computational basis.
TimeReversal transpose_reversal(const TensorSpace& space);
Operator apply_reversal(const TimeReversal& t, const Operator& q);

struct ReversalReport {
  double product_order = 0.0;   // T(AB) - T(B)T(A)
  double adjoint = 0.0;         // T(A^dagger) - T(A)^dagger
  double trace = 0.0;           // Tr T(A) - Tr A
  double involution = 0.0;      // T(T(A)) - A
  double norm_preservation = 0.0;
  double worst() const;
};

// Checks the defining properties on all matrix units plus a few random operators.
ReversalReport validate_reversal(const TimeReversal& t, unsigned seed = 7);
// The same checks for an arbitrary linear map supplied as a function.
ReversalReport validate_reversal_map(int dim, const std::function<Mat(const Mat&)>& map, unsigned seed = 7);

TimeReversal product_reversal(const TimeReversal& a, const TimeReversal& b);

// phi: in -> out gives phi^ominus = T_in o phi^* o T_out : out -> in.
CPM ominus(const CPM& phi, const TimeReversal& t_in, const TimeReversal& t_out);

}  // namespace qfr
