#include "qfr/gibbs.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>

namespace qfr {

namespace {

Spectrum decompose(const Operator& h) {
  const Mat& m = h.matrix();
  if (hermiticity_defect(m) > kHermitianTol) throw Error(ErrorKind::Precondition, "Hamiltonian is not Hermitian");
  // Real symmetric Hamiltonians are common here and much cheaper to diagonalize.
  if (max_abs(m.imag()) == 0.0) {
    Eigen::MatrixXd r = m.real();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (r + r.transpose()));
    if (es.info() != Eigen::Success) throw Error(ErrorKind::Numerical, "eigensolver did not converge");
    return {es.eigenvalues(), es.eigenvectors().cast<cplx>()};
  }
  return eig_hermitian(m);
}

}  // namespace

ThermalContext::ThermalContext(double beta, Operator hamiltonian)
    : beta_(beta), h_(std::move(hamiltonian)), spec_(std::make_shared<Spectrum>(decompose(h_))) {
  build();
}

ThermalContext::ThermalContext(double beta, Operator hamiltonian, Spectrum spectrum)
    : beta_(beta), h_(std::move(hamiltonian)), spec_(std::make_shared<Spectrum>(std::move(spectrum))) {
  build();
}

void ThermalContext::build() {
  if (!std::isfinite(beta_) || beta_ < 0) throw Error(ErrorKind::Precondition, "inverse temperature must be >= 0");
  const double b = beta_;
  fwd_ = spectral_apply(*spec_, [b](double x) { return cplx(std::exp(-0.5 * b * x), 0.0); });
  inv_ = spectral_apply(*spec_, [b](double x) { return cplx(std::exp(0.5 * b * x), 0.0); });
}

ThermalContext ThermalContext::with_beta(double beta) const { return {beta, h_, *spec_}; }

Mat ThermalContext::j_map(const Mat& q, Direction d) const {
  const Mat& w = half_weight(d);
  return w * q * w;
}

Operator ThermalContext::j_map(const Operator& q, Direction d) const {
  if (q.space() != space()) throw Error(ErrorKind::Space, "operator not on thermal context space " + space().describe());
  return {space(), j_map(q.matrix(), d)};
}

CPM ThermalContext::j_cpm(Direction d) const { return CPM::sandwich(space(), half_weight(d)); }

double ThermalContext::partition(const Mat& q) const {
  const double z = j_map(q).trace().real();
  if (!(z > 0) || !std::isfinite(z))
    throw Error(ErrorKind::Precondition, "partition value is not positive (effect outside thermal support)");
  return z;
}

double ThermalContext::partition() const {
  double z = 0;
  for (Eigen::Index k = 0; k < spec_->values.size(); ++k) z += std::exp(-beta_ * spec_->values(k));
  return z;
}

Mat ThermalContext::gibbs(const Mat& q) const {
  const Mat j = j_map(q);
  const double z = j.trace().real();
  if (!(z > 0)) throw Error(ErrorKind::Precondition, "partition value is not positive (effect outside thermal support)");
  return j / z;
}

Operator ThermalContext::gibbs(const Operator& q) const {
  if (q.space() != space()) throw Error(ErrorKind::Space, "operator not on thermal context space");
  return {space(), gibbs(q.matrix())};
}

Operator ThermalContext::gibbs_state() const { return gibbs(Operator::identity(space())); }

Operator ThermalContext::gibbs_preimage(const Operator& rho) const {
  Mat q = j_map(rho.matrix(), Direction::Inverse);
  q /= operator_norm(q);
  return {space(), 0.5 * (q + q.adjoint())};
}

Mat psd_factor(const Mat& q, double rel_cutoff) {
  const Spectrum s = eig_hermitian(q, 1e-9);
  const double top = std::max(s.values.cwiseAbs().maxCoeff(), 1e-300);
  std::vector<int> keep;
  for (Eigen::Index k = 0; k < s.values.size(); ++k) {
    if (s.values(k) < -1e-9 * top) throw Error(ErrorKind::Precondition, "effect has a negative eigenvalue");
    if (s.values(k) > rel_cutoff * top) keep.push_back(static_cast<int>(k));
  }
  Mat f(q.rows(), static_cast<Eigen::Index>(keep.size()));
  for (std::size_t c = 0; c < keep.size(); ++c)
    f.col(static_cast<Eigen::Index>(c)) = std::sqrt(s.values(keep[c])) * s.vectors.col(keep[c]);
  return f;
}

namespace {

// ||(A1 (x) A2)... - A (q1 (x) q2) A^dagger||_1 with q = F F^dagger, done in low rank.
double product_deficit(const Mat& a_global, const Mat& a1, const Mat& a2, const Mat& q1, const Mat& q2) {
  const Mat f1 = psd_factor(q1), f2 = psd_factor(q2);
  const Mat joint = kron(f1, f2);
  const Mat left = kron(Mat(a1 * f1), Mat(a2 * f2));
  const Mat right = a_global * joint;
  Mat w(left.rows(), left.cols() + right.cols());
  w << left, right;
  RVec signs(w.cols());
  signs.head(left.cols()).setOnes();
  signs.tail(right.cols()).setConstant(-1.0);
  return low_rank_trace_norm(w, signs);
}

void check_split(const TensorSpace& g, const TensorSpace& a, const TensorSpace& b) {
  if (a.concat(b) != g)
    throw Error(ErrorKind::Space, "global space " + g.describe() + " is not " + a.describe() + " x " + b.describe());
}

}  // namespace

double factorization_deficit(const ThermalContext& global, const ThermalContext& c1, const ThermalContext& c2,
                             const Mat& q1, const Mat& q2) {
  check_split(global.space(), c1.space(), c2.space());
  if (global.beta() != c1.beta() || global.beta() != c2.beta())
    throw Error(ErrorKind::Precondition, "deficit requires a common inverse temperature");
  return product_deficit(global.half_weight(Direction::Forward), c1.half_weight(Direction::Forward),
                         c2.half_weight(Direction::Forward), q1, q2);
}

double factorization_deficit(const Operator& h_global, const Operator& h1, const Operator& h2, const Operator& q1,
                             const Operator& q2, double beta) {
  return factorization_deficit(ThermalContext(beta, h_global), ThermalContext(beta, h1), ThermalContext(beta, h2),
                               q1.matrix(), q2.matrix());
}

double generalized_j_deficit(const std::function<cplx(double)>& g, const Operator& h_global, const Operator& h1,
                             const Operator& h2, const Operator& q1, const Operator& q2, double beta) {
  check_split(h_global.space(), h1.space(), h2.space());
  auto weight = [&](const Operator& h) {
    return spectral_apply(eig_hermitian(h.matrix()), [&](double x) { return g(beta * x); });
  };
  return product_deficit(weight(h_global), weight(h1), weight(h2), q1.matrix(), q2.matrix());
}

double deficit_lower_bound(const ThermalContext& global, const ThermalContext& c1, const ThermalContext& c2,
                           const std::vector<std::pair<Mat, Mat>>& family) {
  double best = 0.0;
  for (const auto& [a, b] : family) best = std::max(best, factorization_deficit(global, c1, c2, a, b));
  return best;
}

}  // namespace qfr
