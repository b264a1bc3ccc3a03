#include "qfr/channels.hpp"

#include <Eigen/Eigenvalues>

#include <sstream>

namespace qfr {

CPM::CPM(TensorSpace in_space, TensorSpace out_space, std::vector<Mat> kraus)
    : in_(std::move(in_space)), out_(std::move(out_space)), kraus_(std::move(kraus)) {
  if (kraus_.empty()) kraus_.push_back(Mat::Zero(out_.dim(), in_.dim()));
  for (const auto& k : kraus_)
    if (k.rows() != out_.dim() || k.cols() != in_.dim())
      throw Error(ErrorKind::Space, "Kraus operator does not map " + in_.describe() + " to " + out_.describe());
}

CPM CPM::identity(const TensorSpace& space) { return {space, space, {Mat::Identity(space.dim(), space.dim())}}; }

CPM CPM::conjugation(const Operator& v) { return {v.space(), v.space(), {v.matrix()}}; }

CPM CPM::sandwich(const TensorSpace& space, const Mat& a) { return {space, space, {a}}; }

Mat CPM::apply(const Mat& sigma) const {
  if (sigma.rows() != in_.dim() || sigma.cols() != in_.dim())
    throw Error(ErrorKind::Space, "input does not live on " + in_.describe());
  Mat out = Mat::Zero(out_.dim(), out_.dim());
  for (const auto& k : kraus_) out.noalias() += k * sigma * k.adjoint();
  return out;
}

Operator CPM::apply(const Operator& sigma) const {
  if (sigma.space() != in_) throw Error(ErrorKind::Space, "input does not live on " + in_.describe());
  return {out_, apply(sigma.matrix())};
}

Mat CPM::apply_dual(const Mat& y) const {
  if (y.rows() != out_.dim() || y.cols() != out_.dim())
    throw Error(ErrorKind::Space, "dual input does not live on " + out_.describe());
  Mat out = Mat::Zero(in_.dim(), in_.dim());
  for (const auto& k : kraus_) out.noalias() += k.adjoint() * y * k;
  return out;
}

Mat CPM::kraus_sum() const {
  Mat s = Mat::Zero(in_.dim(), in_.dim());
  for (const auto& k : kraus_) s.noalias() += k.adjoint() * k;
  return s;
}

bool CPM::is_trace_non_increasing(double tol) const {
  Mat s = kraus_sum();
  Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (s + s.adjoint()), Eigen::EigenvaluesOnly);
  return es.eigenvalues().maxCoeff() <= 1.0 + tol;
}

bool CPM::is_channel(double tol) const {
  return max_abs(kraus_sum() - Mat::Identity(in_.dim(), in_.dim())) <= tol;
}

const Mat& CPM::superoperator() const {
  std::call_once(cache_->once, [this] {
    const int di = in_.dim(), dout = out_.dim();
    Mat s = Mat::Zero(dout * dout, di * di);
    // vec(K X K^dagger) = (conj(K) kron K) vec(X) for column stacking.
    for (const auto& k : kraus_) s.noalias() += kron(k.conjugate(), k);
    cache_->super = std::move(s);
  });
  return cache_->super;
}

CPM CPM::scaled(double c) const {
  if (c < 0) throw Error(ErrorKind::Precondition, "CPM can only be scaled by a non-negative factor");
  std::vector<Mat> ks;
  for (const auto& k : kraus_) ks.push_back(std::sqrt(c) * k);
  return {in_, out_, ks};
}

CPM compose(const CPM& second, const CPM& first) {
  if (first.out_space() != second.in_space())
    throw Error(ErrorKind::Space, "cannot compose maps: " + first.out_space().describe() + " vs " +
                                      second.in_space().describe());
  std::vector<Mat> ks;
  ks.reserve(first.kraus().size() * second.kraus().size());
  for (const auto& b : second.kraus())
    for (const auto& a : first.kraus()) ks.push_back(b * a);
  return {first.in_space(), second.out_space(), ks};
}

CPM conjugate_cpm(const CPM& phi) {
  std::vector<Mat> ks;
  for (const auto& k : phi.kraus()) ks.push_back(k.adjoint());
  return {phi.out_space(), phi.in_space(), ks};
}

CPM restrict_input(const CPM& phi, const Mat& isometry, const TensorSpace& window_space) {
  if (isometry.rows() != phi.in_space().dim() || isometry.cols() != window_space.dim())
    throw Error(ErrorKind::Space, "isometry shape does not match the map input and window");
  std::vector<Mat> ks;
  for (const auto& k : phi.kraus()) ks.push_back(k * isometry);
  return {window_space, phi.out_space(), ks};
}

CPM induced_cpm(const Operator& v, const Operator& env_state, const Operator& final_effect,
                const std::vector<std::string>& traced_labels) {
  const TensorSpace& joint = v.space();
  const TensorSpace traced = joint.select(traced_labels);
  if (env_state.space() != traced || final_effect.space() != traced)
    throw Error(ErrorKind::Space, "environment state and effect must live on " + traced.describe());
  std::vector<std::string> rest;
  for (const auto& l : joint.labels())
    if (!traced.has(l)) rest.push_back(l);
  const TensorSpace reservoir = joint.select(rest);

  if (!is_unitary(v.matrix(), 1e-9)) throw Error(ErrorKind::Precondition, "global operator is not unitary");
  if (!is_positive_semidefinite(env_state.matrix(), 1e-9) || std::abs(env_state.trace() - 1.0) > 1e-9)
    throw Error(ErrorKind::Precondition, "environment operator is not a density operator");
  if (!is_effect(final_effect.matrix(), 1e-9)) throw Error(ErrorKind::Precondition, "final operator is not an effect");

  std::vector<std::string> order = traced_labels;
  order.insert(order.end(), rest.begin(), rest.end());
  const Mat vp = permute_factors(v, order).matrix();
  const int dt = traced.dim(), dr = reservoir.dim();

  const Spectrum rho = eig_hermitian(env_state.matrix(), 1e-9);
  const Spectrum q = eig_hermitian(final_effect.matrix(), 1e-9);
  const Mat sqrt_q = spectral_apply(q, [](double x) { return cplx(std::sqrt(std::max(x, 0.0)), 0.0); });
  const bool q_is_identity = max_abs(final_effect.matrix() - Mat::Identity(dt, dt)) < 1e-15;

  std::vector<Mat> ks;
  for (int a = 0; a < dt; ++a) {
    const double p = rho.values(a);
    if (p <= 1e-15) continue;
    // M = V (|e_a> (x) 1), stacked in traced blocks of dr rows.
    Mat m = Mat::Zero(dt * dr, dr);
    for (int t = 0; t < dt; ++t) {
      const cplx c = rho.vectors(t, a);
      if (c != 0.0) m.noalias() += c * vp.middleCols(t * dr, dr);
    }
    for (int b = 0; b < dt; ++b) {
      Mat k;
      if (q_is_identity) {
        k = m.middleRows(b * dr, dr);
      } else {
        k = Mat::Zero(dr, dr);
        for (int t = 0; t < dt; ++t)
          if (sqrt_q(b, t) != 0.0) k.noalias() += sqrt_q(b, t) * m.middleRows(t * dr, dr);
      }
      k *= std::sqrt(p);
      if (k.norm() > 1e-14) ks.push_back(std::move(k));
    }
  }
  return {reservoir, reservoir, ks};
}

namespace {

TensorSpace input_copy(const TensorSpace& in) {
  std::vector<Factor> f;
  for (const auto& x : in.factors()) f.push_back({x.label + "~in", x.dim});
  return TensorSpace(f);
}

// Columns are the column-stacked Kraus operators, so Choi = W W^dagger.
Mat choi_factor(const CPM& phi) {
  const int n = phi.in_space().dim() * phi.out_space().dim();
  Mat w(n, static_cast<Eigen::Index>(phi.kraus().size()));
  for (std::size_t k = 0; k < phi.kraus().size(); ++k)
    w.col(static_cast<Eigen::Index>(k)) = Eigen::Map<const Vec>(phi.kraus()[k].data(), n);
  return w;
}

}  // namespace

Operator choi_matrix(const CPM& phi) {
  const Mat w = choi_factor(phi);
  return {input_copy(phi.in_space()).concat(phi.out_space()), w * w.adjoint()};
}

CpmDistance cpm_distance(const CPM& a, const CPM& b) { return cpm_distance(a, 1.0, b, 1.0); }

CpmDistance cpm_distance(const CPM& a, double ca, const CPM& b, double cb) {
  if (a.in_space().dim() != b.in_space().dim() || a.out_space().dim() != b.out_space().dim())
    throw Error(ErrorKind::Space, "maps compared across different endpoint spaces");
  const Mat wa = choi_factor(a), wb = choi_factor(b);
  Mat w(wa.rows(), wa.cols() + wb.cols());
  w << wa, wb;
  RVec signs(w.cols());
  signs.head(wa.cols()).setConstant(ca);
  signs.tail(wb.cols()).setConstant(-cb);
  CpmDistance d;
  d.choi_trace = low_rank_trace_norm(w, signs);
  if (w.rows() <= 2048) d.max_entry = max_abs(w * signs.cast<cplx>().asDiagonal() * w.adjoint());
  return d;
}

CPM petz_recovery(const CPM& phi, const Mat& reference, double cutoff) {
  if (reference.rows() != phi.in_space().dim()) throw Error(ErrorKind::Space, "reference not on map input");
  if (!is_positive_semidefinite(reference, 1e-9)) throw Error(ErrorKind::Precondition, "reference is not PSD");
  const Spectrum ref = eig_hermitian(reference, 1e-9);
  const Mat sqrt_ref = spectral_apply(ref, [](double x) { return cplx(std::sqrt(std::max(x, 0.0)), 0.0); });
  const Spectrum img = eig_hermitian(phi.apply(reference), 1e-9);
  const double top = img.values.cwiseAbs().maxCoeff();
  if (top <= 0) throw Error(ErrorKind::Precondition, "map annihilates the reference");
  const Mat inv_sqrt = spectral_apply(img, [&](double x) {
    return x > cutoff * top ? cplx(1.0 / std::sqrt(x), 0.0) : cplx(0.0, 0.0);
  });
  std::vector<Mat> ks;
  for (const auto& k : phi.kraus()) ks.push_back(sqrt_ref * k.adjoint() * inv_sqrt);
  return {phi.out_space(), phi.in_space(), ks};
}

}  // namespace qfr
