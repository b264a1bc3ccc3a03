#pragma once

#include <Eigen/Dense>

#include <complex>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace qfr {

using cplx = std::complex<double>;
using Mat = Eigen::MatrixXcd;
using Vec = Eigen::VectorXcd;
using RVec = Eigen::VectorXd;

inline constexpr double kHermitianTol = 1e-10;

// Error categories let the command line map failures onto exit codes.
enum class ErrorKind { Space, Precondition, Numerical, Config };

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

struct Factor {
  std::string label;
  int dim = 1;
  bool operator==(const Factor& o) const { return label == o.label && dim == o.dim; }
};

// Ordered list of labelled tensor factors. An empty space has dimension 1.
class TensorSpace {
 public:
  TensorSpace() = default;
  explicit TensorSpace(std::vector<Factor> factors);
  TensorSpace(std::initializer_list<Factor> factors) : TensorSpace(std::vector<Factor>(factors)) {}

  const std::vector<Factor>& factors() const { return factors_; }
  int dim() const { return dim_; }
  int rank() const { return static_cast<int>(factors_.size()); }
  bool has(const std::string& label) const;
  int position(const std::string& label) const;
  int factor_dim(const std::string& label) const { return factors_[position(label)].dim; }
  std::vector<std::string> labels() const;

  TensorSpace concat(const TensorSpace& other) const;
  TensorSpace select(const std::vector<std::string>& labels) const;
  std::string describe() const;

  bool operator==(const TensorSpace& o) const { return factors_ == o.factors_; }
  bool operator!=(const TensorSpace& o) const { return !(*this == o); }

 private:
  std::vector<Factor> factors_;
  int dim_ = 1;
};

class Operator {
 public:
  Operator() = default;
  Operator(TensorSpace space, Mat matrix);

  static Operator identity(const TensorSpace& space);
  static Operator zero(const TensorSpace& space);
  static Operator diagonal(const TensorSpace& space, const RVec& diag);

  const TensorSpace& space() const { return space_; }
  const Mat& matrix() const { return matrix_; }
  int dim() const { return space_.dim(); }

  Operator adjoint() const { return {space_, matrix_.adjoint()}; }
  cplx trace() const { return matrix_.trace(); }
  cplx operator()(int i, int j) const { return matrix_(i, j); }

  Operator operator+(const Operator& o) const;
  Operator operator-(const Operator& o) const;
  Operator operator*(const Operator& o) const;
  Operator operator*(cplx c) const { return {space_, matrix_ * c}; }
  friend Operator operator*(cplx c, const Operator& a) { return a * c; }

 private:
  void require_same(const Operator& o, const char* op) const;
  TensorSpace space_;
  Mat matrix_ = Mat::Identity(1, 1);
};

// Spectral decomposition of a Hermitian matrix: A = V diag(values) V^dagger.
struct Spectrum {
  RVec values;
  Mat vectors;
};

Spectrum eig_hermitian(const Mat& a, double tol = kHermitianTol);
Mat spectral_apply(const Spectrum& s, const std::function<cplx(double)>& f);

Mat kron(const Mat& a, const Mat& b);
Operator tensor_product(const Operator& a, const Operator& b);
Operator tensor_product(const std::vector<Operator>& ops);

// Reorders the tensor factors of op so that they follow `order`.
Operator permute_factors(const Operator& op, const std::vector<std::string>& order);
// Traces out every factor not listed in `keep`; the result follows the order of `keep`.
Operator partial_trace(const Operator& op, const std::vector<std::string>& keep);
Mat partial_trace(const Mat& m, const TensorSpace& space, const std::vector<std::string>& keep);

// Embeds a local operator into a larger space (identity elsewhere).
Operator embed(const Operator& local, const TensorSpace& global);

Operator hermitian_function(const Operator& h, const std::function<cplx(double)>& f,
                            double tol = kHermitianTol);

double operator_norm(const Mat& m);
double trace_norm(const Mat& m);
inline double operator_norm(const Operator& op) { return operator_norm(op.matrix()); }
inline double trace_norm(const Operator& op) { return trace_norm(op.matrix()); }
// Trace norm of W diag(signs) W^dagger through a thin QR of W (W tall and skinny).
double low_rank_trace_norm(const Mat& w, const RVec& signs);

double max_abs(const Mat& m);
double hermiticity_defect(const Mat& m);
bool is_hermitian(const Mat& m, double tol = kHermitianTol);
bool is_unitary(const Mat& m, double tol = kHermitianTol);
bool is_positive_semidefinite(const Mat& m, double tol = kHermitianTol);
bool is_effect(const Mat& m, double tol = kHermitianTol);
inline bool is_hermitian(const Operator& op, double tol = kHermitianTol) { return is_hermitian(op.matrix(), tol); }
inline bool is_unitary(const Operator& op, double tol = kHermitianTol) { return is_unitary(op.matrix(), tol); }
inline bool is_positive_semidefinite(const Operator& op, double tol = kHermitianTol) {
  return is_positive_semidefinite(op.matrix(), tol);
}
inline bool is_effect(const Operator& op, double tol = kHermitianTol) { return is_effect(op.matrix(), tol); }

Mat matrix_unit(int dim, int i, int j);
Mat projector(const Vec& v);

}  // namespace qfr
