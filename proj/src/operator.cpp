#include "qfr/operator.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/QR>
#include <Eigen/SVD>

#include <algorithm>
#include <set>
#include <sstream>

namespace qfr {

namespace {

std::vector<int> strides_of(const std::vector<Factor>& f) {
  std::vector<int> s(f.size(), 1);
  for (int k = static_cast<int>(f.size()) - 2; k >= 0; --k) s[k] = s[k + 1] * f[k + 1].dim;
  return s;
}

// Flat indices of every multi-index over the listed factor positions, embedded
// into the full space with the given strides (other positions held at zero).
std::vector<int> flat_offsets(const std::vector<Factor>& f, const std::vector<int>& strides,
                              const std::vector<int>& positions) {
  std::vector<int> out{0};
  for (int p : positions) {
    std::vector<int> next;
    next.reserve(out.size() * f[p].dim);
    for (int base : out)
      for (int v = 0; v < f[p].dim; ++v) next.push_back(base + v * strides[p]);
    out.swap(next);
  }
  return out;
}

}  // namespace

TensorSpace::TensorSpace(std::vector<Factor> factors) : factors_(std::move(factors)) {
  std::set<std::string> seen;
  long long d = 1;
  for (const auto& f : factors_) {
    if (f.dim < 1) throw Error(ErrorKind::Space, "factor '" + f.label + "' has non-positive dimension");
    if (!seen.insert(f.label).second) throw Error(ErrorKind::Space, "duplicate factor label '" + f.label + "'");
    d *= f.dim;
    if (d > (1LL << 30)) throw Error(ErrorKind::Space, "tensor space dimension overflow");
  }
  dim_ = static_cast<int>(d);
}

bool TensorSpace::has(const std::string& label) const {
  return std::any_of(factors_.begin(), factors_.end(), [&](const Factor& f) { return f.label == label; });
}

int TensorSpace::position(const std::string& label) const {
  for (std::size_t k = 0; k < factors_.size(); ++k)
    if (factors_[k].label == label) return static_cast<int>(k);
  throw Error(ErrorKind::Space, "unknown factor label '" + label + "' in " + describe());
}

std::vector<std::string> TensorSpace::labels() const {
  std::vector<std::string> out;
  for (const auto& f : factors_) out.push_back(f.label);
  return out;
}

TensorSpace TensorSpace::concat(const TensorSpace& other) const {
  auto f = factors_;
  f.insert(f.end(), other.factors_.begin(), other.factors_.end());
  return TensorSpace(std::move(f));
}

TensorSpace TensorSpace::select(const std::vector<std::string>& labels) const {
  std::vector<Factor> f;
  for (const auto& l : labels) f.push_back(factors_[position(l)]);
  return TensorSpace(std::move(f));
}

std::string TensorSpace::describe() const {
  std::ostringstream os;
  os << "[";
  for (std::size_t k = 0; k < factors_.size(); ++k) {
    if (k) os << " x ";
    os << factors_[k].label << ":" << factors_[k].dim;
  }
  os << "]";
  return os.str();
}

Operator::Operator(TensorSpace space, Mat matrix) : space_(std::move(space)), matrix_(std::move(matrix)) {
  if (matrix_.rows() != space_.dim() || matrix_.cols() != space_.dim()) {
    std::ostringstream os;
    os << "matrix of size " << matrix_.rows() << "x" << matrix_.cols() << " does not fit space "
       << space_.describe();
    throw Error(ErrorKind::Space, os.str());
  }
}

Operator Operator::identity(const TensorSpace& space) { return {space, Mat::Identity(space.dim(), space.dim())}; }
Operator Operator::zero(const TensorSpace& space) { return {space, Mat::Zero(space.dim(), space.dim())}; }
Operator Operator::diagonal(const TensorSpace& space, const RVec& diag) {
  return {space, diag.cast<cplx>().asDiagonal().toDenseMatrix()};
}

void Operator::require_same(const Operator& o, const char* op) const {
  if (space_ != o.space_)
    throw Error(ErrorKind::Space, std::string("operator ") + op + " across different spaces " +
                                      space_.describe() + " and " + o.space_.describe());
}

Operator Operator::operator+(const Operator& o) const {
  require_same(o, "+");
  return {space_, matrix_ + o.matrix_};
}
Operator Operator::operator-(const Operator& o) const {
  require_same(o, "-");
  return {space_, matrix_ - o.matrix_};
}
Operator Operator::operator*(const Operator& o) const {
  require_same(o, "*");
  return {space_, matrix_ * o.matrix_};
}

double max_abs(const Mat& m) { return m.size() ? m.cwiseAbs().maxCoeff() : 0.0; }
double hermiticity_defect(const Mat& m) { return max_abs(m - m.adjoint()); }

Spectrum eig_hermitian(const Mat& a, double tol) {
  if (a.rows() != a.cols()) throw Error(ErrorKind::Space, "spectral decomposition of a non-square matrix");
  const double defect = hermiticity_defect(a);
  if (defect > tol) {
    std::ostringstream os;
    os << "matrix is not Hermitian (defect " << defect << " > " << tol << ")";
    throw Error(ErrorKind::Precondition, os.str());
  }
  Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (a + a.adjoint()));
  if (es.info() != Eigen::Success) throw Error(ErrorKind::Numerical, "Hermitian eigensolver did not converge");
  return {es.eigenvalues(), es.eigenvectors()};
}

Mat spectral_apply(const Spectrum& s, const std::function<cplx(double)>& f) {
  Vec fv(s.values.size());
  for (Eigen::Index k = 0; k < s.values.size(); ++k) fv(k) = f(s.values(k));
  return s.vectors * fv.asDiagonal() * s.vectors.adjoint();
}

Mat kron(const Mat& a, const Mat& b) {
  Mat out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

Operator tensor_product(const Operator& a, const Operator& b) {
  return {a.space().concat(b.space()), kron(a.matrix(), b.matrix())};
}

Operator tensor_product(const std::vector<Operator>& ops) {
  if (ops.empty()) return Operator{};
  Operator acc = ops.front();
  for (std::size_t k = 1; k < ops.size(); ++k) acc = tensor_product(acc, ops[k]);
  return acc;
}

Operator permute_factors(const Operator& op, const std::vector<std::string>& order) {
  const auto& space = op.space();
  if (static_cast<int>(order.size()) != space.rank())
    throw Error(ErrorKind::Space, "permutation must list every factor of " + space.describe());
  TensorSpace target = space.select(order);
  const auto strides = strides_of(space.factors());
  std::vector<int> positions;
  for (const auto& l : order) positions.push_back(space.position(l));
  // new flat index (row-major over `order`) -> old flat index
  const std::vector<int> map = flat_offsets(space.factors(), strides, positions);
  const int d = space.dim();
  Mat out(d, d);
  const Mat& m = op.matrix();
  for (int j = 0; j < d; ++j)
    for (int i = 0; i < d; ++i) out(i, j) = m(map[i], map[j]);
  return {target, out};
}

Mat partial_trace(const Mat& m, const TensorSpace& space, const std::vector<std::string>& keep) {
  if (m.rows() != space.dim() || m.cols() != space.dim())
    throw Error(ErrorKind::Space, "matrix does not fit space " + space.describe());
  std::vector<int> kept, traced;
  std::set<std::string> keep_set;
  for (const auto& l : keep) {
    if (!keep_set.insert(l).second) throw Error(ErrorKind::Space, "label '" + l + "' listed twice");
    kept.push_back(space.position(l));
  }
  for (int p = 0; p < space.rank(); ++p)
    if (!keep_set.count(space.factors()[p].label)) traced.push_back(p);
  const auto strides = strides_of(space.factors());
  const auto ka = flat_offsets(space.factors(), strides, kept);
  const auto tr = flat_offsets(space.factors(), strides, traced);
  const int dk = static_cast<int>(ka.size());
  Mat out = Mat::Zero(dk, dk);
  for (int b = 0; b < dk; ++b)
    for (int a = 0; a < dk; ++a) {
      cplx acc = 0.0;
      for (int t : tr) acc += m(ka[a] + t, ka[b] + t);
      out(a, b) = acc;
    }
  return out;
}

Operator partial_trace(const Operator& op, const std::vector<std::string>& keep) {
  return {op.space().select(keep), partial_trace(op.matrix(), op.space(), keep)};
}

Operator embed(const Operator& local, const TensorSpace& global) {
  std::vector<Factor> rest;
  for (const auto& f : global.factors())
    if (!local.space().has(f.label)) rest.push_back(f);
  for (const auto& f : local.space().factors())
    if (!global.has(f.label) || global.factor_dim(f.label) != f.dim)
      throw Error(ErrorKind::Space, "factor '" + f.label + "' is not part of " + global.describe());
  TensorSpace rest_space(rest);
  Operator full = tensor_product(local, Operator::identity(rest_space));
  return permute_factors(full, global.labels());
}

Operator hermitian_function(const Operator& h, const std::function<cplx(double)>& f, double tol) {
  return {h.space(), spectral_apply(eig_hermitian(h.matrix(), tol), f)};
}

namespace {
bool near_hermitian(const Mat& m) { return hermiticity_defect(m) <= 1e-13 * std::max(1.0, max_abs(m)); }
}  // namespace

double operator_norm(const Mat& m) {
  if (m.size() == 0) return 0.0;
  if (near_hermitian(m)) {
    Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (m + m.adjoint()), Eigen::EigenvaluesOnly);
    return es.eigenvalues().cwiseAbs().maxCoeff();
  }
  Eigen::BDCSVD<Mat> svd(m);
  return svd.singularValues()(0);
}

double trace_norm(const Mat& m) {
  if (m.size() == 0) return 0.0;
  if (near_hermitian(m)) {
    Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (m + m.adjoint()), Eigen::EigenvaluesOnly);
    return es.eigenvalues().cwiseAbs().sum();
  }
  Eigen::BDCSVD<Mat> svd(m);
  return svd.singularValues().sum();
}

double low_rank_trace_norm(const Mat& w, const RVec& signs) {
  if (w.cols() != signs.size()) throw Error(ErrorKind::Space, "low-rank factor and weights disagree in size");
  // W = Q R gives W S W^dagger = Q (R S R^dagger) Q^dagger. Working with R keeps
  // cancellations between nearly equal columns at machine precision.
  if (w.rows() <= w.cols()) return trace_norm(Mat(w * signs.cast<cplx>().asDiagonal() * w.adjoint()));
  Eigen::HouseholderQR<Mat> qr(w);
  Mat r = qr.matrixQR().topRows(w.cols()).triangularView<Eigen::Upper>();
  Mat core = r * signs.cast<cplx>().asDiagonal() * r.adjoint();
  Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (core + core.adjoint()), Eigen::EigenvaluesOnly);
  return es.eigenvalues().cwiseAbs().sum();
}

bool is_hermitian(const Mat& m, double tol) { return m.rows() == m.cols() && hermiticity_defect(m) <= tol; }

bool is_unitary(const Mat& m, double tol) {
  if (m.rows() != m.cols()) return false;
  return max_abs(m.adjoint() * m - Mat::Identity(m.rows(), m.cols())) <= tol;
}

bool is_positive_semidefinite(const Mat& m, double tol) {
  if (!is_hermitian(m, tol)) return false;
  Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (m + m.adjoint()), Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff() >= -tol;
}

bool is_effect(const Mat& m, double tol) {
  if (!is_hermitian(m, tol)) return false;
  Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (m + m.adjoint()), Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff() >= -tol && es.eigenvalues().maxCoeff() <= 1.0 + tol;
}

Mat matrix_unit(int dim, int i, int j) {
  Mat e = Mat::Zero(dim, dim);
  e(i, j) = 1.0;
  return e;
}

Mat projector(const Vec& v) { return v * v.adjoint(); }

}  // namespace qfr
