#include "qfr/reversal.hpp"

#include "qfr/random.hpp"

#include <algorithm>
#include <sstream>

namespace qfr {

TimeReversal make_reversal(const TensorSpace& space, const Mat& basis, const Mat& twist, double tol) {
  const int d = space.dim();
  if (basis.rows() != d || basis.cols() != d || twist.rows() != d || twist.cols() != d)
    throw Error(ErrorKind::Space, "reversal basis and twist must be square on " + space.describe());
  if (!is_unitary(basis, tol)) throw Error(ErrorKind::Precondition, "reversal basis is not unitary");
  if (!is_unitary(twist, tol)) throw Error(ErrorKind::Precondition, "reversal twist is not unitary");
  // Twist expressed in the basis; it must be complex symmetric or skew-symmetric there.
  const Mat local = basis.adjoint() * twist * basis;
  const double sym = max_abs(local.transpose() - local);
  const double skew = max_abs(local.transpose() + local);
  TimeReversal t;
  if (sym <= tol) {
    t.sign_ = 1;
  } else if (skew <= tol) {
    t.sign_ = -1;
  } else {
    std::ostringstream os;
    os << "twist is neither symmetric nor skew-symmetric in the basis (defects " << sym << ", " << skew << ")";
    throw Error(ErrorKind::Precondition, os.str());
  }
  t.space_ = space;
  t.basis_ = basis;
  t.twist_ = twist;
  t.effective_ = twist * basis * basis.transpose();
  return t;
}

TimeReversal transpose_reversal(const TensorSpace& space) {
  const Mat id = Mat::Identity(space.dim(), space.dim());
  return make_reversal(space, id, id);
}

Operator TimeReversal::apply(const Operator& q) const {
  if (q.space() != space_) throw Error(ErrorKind::Space, "operator does not live on reversal space " + space_.describe());
  return {space_, apply(q.matrix())};
}

Operator apply_reversal(const TimeReversal& t, const Operator& q) { return t.apply(q); }

double ReversalReport::worst() const {
  return std::max({product_order, adjoint, trace, involution, norm_preservation});
}

ReversalReport validate_reversal_map(int dim, const std::function<Mat(const Mat&)>& map, unsigned seed) {
  std::vector<Mat> probes;
  Rng rng(seed);
  if (dim <= 16) {
    for (int i = 0; i < dim; ++i)
      for (int j = 0; j < dim; ++j) probes.push_back(matrix_unit(dim, i, j));
  } else {
    // Large spaces: a random sample of matrix units keeps the cost bounded.
    std::uniform_int_distribution<int> pick(0, dim - 1);
    for (int k = 0; k < 64; ++k) probes.push_back(matrix_unit(dim, pick(rng), pick(rng)));
  }
  for (int k = 0; k < 3; ++k) probes.push_back(random_ginibre(dim, dim, rng));

  ReversalReport r;
  std::vector<Mat> images;
  images.reserve(probes.size());
  for (const auto& a : probes) images.push_back(map(a));
  for (std::size_t x = 0; x < probes.size(); ++x) {
    const Mat& a = probes[x];
    const Mat& ta = images[x];
    r.adjoint = std::max(r.adjoint, max_abs(map(a.adjoint()) - ta.adjoint()));
    r.trace = std::max(r.trace, std::abs(ta.trace() - a.trace()));
    r.involution = std::max(r.involution, max_abs(map(ta) - a));
  }
  // Products over a spanning pair set: every unit against the random probes and vice versa.
  const std::size_t nunits = probes.size() - 3;
  for (std::size_t x = 0; x < probes.size(); ++x)
    for (std::size_t y = nunits; y < probes.size(); ++y) {
      r.product_order = std::max(r.product_order, max_abs(map(probes[x] * probes[y]) - images[y] * images[x]));
      r.product_order = std::max(r.product_order, max_abs(map(probes[y] * probes[x]) - images[x] * images[y]));
    }
  for (std::size_t y = nunits; y < probes.size(); ++y) {
    const double on = operator_norm(probes[y]), tn = trace_norm(probes[y]);
    r.norm_preservation = std::max(r.norm_preservation, std::abs(operator_norm(images[y]) - on) / on);
    r.norm_preservation = std::max(r.norm_preservation, std::abs(trace_norm(images[y]) - tn) / tn);
  }
  return r;
}

ReversalReport validate_reversal(const TimeReversal& t, unsigned seed) {
  return validate_reversal_map(t.space().dim(), [&](const Mat& q) { return t.apply(q); }, seed);
}

TimeReversal product_reversal(const TimeReversal& a, const TimeReversal& b) {
  const TensorSpace joint = a.space().concat(b.space());
  return make_reversal(joint, kron(a.basis(), b.basis()), kron(a.twist(), b.twist()));
}

CPM ominus(const CPM& phi, const TimeReversal& t_in, const TimeReversal& t_out) {
  if (t_in.space() != phi.in_space() || t_out.space() != phi.out_space())
    throw Error(ErrorKind::Space, "reversal spaces do not match the map endpoints");
  // T_in(K^dagger T_out(X) K) written as L X L^dagger with L = W_in K^t conj(W_out).
  const Mat& wi = t_in.effective_twist();
  const Mat wo = t_out.effective_twist().conjugate();
  std::vector<Mat> ks;
  ks.reserve(phi.kraus().size());
  for (const auto& k : phi.kraus()) ks.push_back(wi * k.transpose() * wo);
  return {phi.out_space(), phi.in_space(), ks};
}

}  // namespace qfr
