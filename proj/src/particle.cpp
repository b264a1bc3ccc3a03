#include "qfr/particle.hpp"

#include <unsupported/Eigen/KroneckerProduct>

#include <array>
#include <chrono>
#include <cmath>
#include <memory>
#include <numbers>

namespace qfr {

namespace {

using Eigen::MatrixXd;

constexpr double kPi = std::numbers::pi;

Eigen::Matrix2d sigma_x() { return (Eigen::Matrix2d() << 0.0, 1.0, 1.0, 0.0).finished(); }
Eigen::Matrix2d sigma_z() { return (Eigen::Matrix2d() << -1.0, 0.0, 0.0, 1.0).finished(); }

Vec kron_vec(const Vec& a, const Vec& b) {
  Vec out(a.size() * b.size());
  for (Eigen::Index i = 0; i < a.size(); ++i) out.segment(i * b.size(), b.size()) = a(i) * b;
  return out;
}

Vec basis_vec(int dim, int k) {
  Vec e = Vec::Zero(dim);
  e(k) = 1.0;
  return e;
}

// Gibbs weights e^{-beta e_k}/Z and eigenvectors of a real symmetric 2x2 block.
struct SpinGibbs {
  RVec weights;
  Mat vectors;
  double partition = 0.0;
};

SpinGibbs spin_gibbs(const Eigen::Matrix2d& h, double beta) {
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(h);
  SpinGibbs g;
  g.weights = (-beta * es.eigenvalues().array()).exp();
  g.partition = g.weights.sum();
  g.weights /= g.partition;
  g.vectors = es.eigenvectors().cast<cplx>();
  return g;
}

double gaussian_mass(double center, double width, double lo, double hi) {
  const double s = width * std::sqrt(2.0);
  return 0.5 * (std::erf((hi - center) / s) - std::erf((lo - center) / s));
}

}  // namespace

KineticScheme parse_kinetic_scheme(const std::string& name) {
  if (name == "fd3") return KineticScheme::Fd3;
  if (name == "fd5") return KineticScheme::Fd5;
  if (name == "sine") return KineticScheme::Sine;
  throw Error(ErrorKind::Config, "unknown kinetic scheme '" + name + "' (expected fd3, fd5 or sine)");
}

std::string to_string(KineticScheme s) {
  switch (s) {
    case KineticScheme::Fd3: return "fd3";
    case KineticScheme::Fd5: return "fd5";
    case KineticScheme::Sine: return "sine";
  }
  return "fd5";
}

RVec GridSpec::points() const {
  RVec y(n_points);
  for (int j = 0; j < n_points; ++j) y(j) = point(j);
  return y;
}

void GridSpec::validate() const {
  if (n_points < 64) throw Error(ErrorKind::Precondition, "grid needs at least 64 points");
  if (!(y_max > y_min)) throw Error(ErrorKind::Precondition, "grid bounds must satisfy y_min < y_max");
}

Eigen::Vector3d default_field(double y, double y0) {
  if (y < -y0) return {0.0, 0.0, 1.0};
  if (y > y0) return {0.5, 0.0, 0.0};
  const double amp = 0.75 - y / (4.0 * y0);
  const double angle = kPi * (y + y0) / (4.0 * y0);
  return {amp * std::sin(angle), 0.0, amp * std::cos(angle)};
}

MatrixXd kinetic_matrix(const GridSpec& grid, double mass, KineticScheme scheme) {
  const int n = grid.n_points;
  const double dy = grid.dy();
  const double c = 1.0 / (2.0 * mass);
  MatrixXd k = MatrixXd::Zero(n, n);
  switch (scheme) {
    case KineticScheme::Fd3: {
      const double a = c / (dy * dy);
      for (int j = 0; j < n; ++j) {
        k(j, j) = 2.0 * a;
        if (j + 1 < n) k(j, j + 1) = k(j + 1, j) = -a;
      }
      break;
    }
    case KineticScheme::Fd5: {
      const double a = c / (12.0 * dy * dy);
      for (int j = 0; j < n; ++j) {
        k(j, j) = 30.0 * a;
        if (j + 1 < n) k(j, j + 1) = k(j + 1, j) = -16.0 * a;
        if (j + 2 < n) k(j, j + 2) = k(j + 2, j) = a;
      }
      // The outer stencil point beyond each wall mirrors the first interior point with
      // opposite sign (odd reflection about the node where psi vanishes).
      k(0, 0) -= a;
      k(n - 1, n - 1) -= a;
      break;
    }
    case KineticScheme::Sine: {
      // Discrete sine transform diagonalizes the Dirichlet Laplacian; use the exact
      // continuum wave numbers of the box.
      MatrixXd s(n, n);
      RVec e(n);
      const double norm = std::sqrt(2.0 / (n + 1));
      for (int j = 0; j < n; ++j) {
        for (int m = 0; m < n; ++m) s(j, m) = norm * std::sin(kPi * (j + 1) * (m + 1) / (n + 1));
        const double wave = kPi * (j + 1) / ((n + 1) * dy);
        e(j) = c * wave * wave;
      }
      k = s * e.asDiagonal() * s;
      break;
    }
  }
  return k;
}

MatrixXd spin_field_matrix(const SpinFieldModel& model, const GridSpec& grid) {
  grid.validate();
  const int n = grid.n_points;
  MatrixXd h = MatrixXd::Zero(2 * n, 2 * n);
  const MatrixXd k = kinetic_matrix(grid, model.mass(), model.scheme);
  h.topLeftCorner(n, n) = k;
  h.bottomRightCorner(n, n) = k;
  for (int j = 0; j < n; ++j) {
    const Eigen::Vector3d f = model.field_at(grid.point(j));
    if (f.y() != 0.0)
      throw Error(ErrorKind::Precondition, "field profile must lie in the xz-plane for a real Hamiltonian");
    const double half = 0.5 * model.e0;
    h(j, j) += -half * f.z();
    h(n + j, n + j) += half * f.z();
    h(j, n + j) += half * f.x();
    h(n + j, j) += half * f.x();
  }
  return h;
}

Operator build_hamiltonian(const SpinFieldModel& model, const GridSpec& grid) {
  TensorSpace space{{"spin", 2}, {"y", grid.n_points}};
  return {space, spin_field_matrix(model, grid).cast<cplx>()};
}

Vec coherent_state(const GridSpec& grid, cplx alpha, double sigma) {
  grid.validate();
  if (sigma < 3.0 * grid.dy())
    throw Error(ErrorKind::Precondition, "coherent state width is not resolved by the grid (sigma < 3 dy)");
  const double center = 2.0 * sigma * alpha.real();
  const double leak = 1.0 - gaussian_mass(center, sigma, grid.y_min, grid.y_max);
  if (leak > 1e-8)
    throw Error(ErrorKind::Precondition, "coherent state centred at " + std::to_string(center) +
                                             " leaks beyond the grid walls (weight " + std::to_string(leak) + ")");
  Vec psi(grid.n_points);
  for (int j = 0; j < grid.n_points; ++j) {
    const cplx u = grid.point(j) / sigma - 2.0 * alpha;
    psi(j) = std::exp(-0.25 * u * u);
  }
  return psi / psi.norm();
}

Operator evolve(const Operator& h, double t) {
  return hermitian_function(h, [t](double e) { return std::exp(cplx(0.0, -t * e)); });
}

RealSpectral::RealSpectral(const MatrixXd& h) {
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(h);
  if (es.info() != Eigen::Success) throw Error(ErrorKind::Numerical, "eigensolver did not converge");
  values_ = es.eigenvalues();
  vectors_ = es.eigenvectors();
}

Vec RealSpectral::apply(const Vec& v, const std::function<cplx(double)>& f) const {
  const RVec re = vectors_.transpose() * v.real();
  const RVec im = vectors_.transpose() * v.imag();
  Vec c(values_.size());
  for (Eigen::Index k = 0; k < values_.size(); ++k) c(k) = f(values_(k)) * cplx(re(k), im(k));
  const RVec out_re = vectors_ * c.real();
  const RVec out_im = vectors_ * c.imag();
  Vec out(values_.size());
  out.real() = out_re;
  out.imag() = out_im;
  return out;
}

Vec RealSpectral::propagate(const Vec& v, double t) const {
  return apply(v, [t](double e) { return std::exp(cplx(0.0, -t * e)); });
}

Vec RealSpectral::thermal_half(const Vec& v, double beta) const {
  return apply(v, [beta](double e) { return cplx(std::exp(-0.5 * beta * e), 0.0); });
}

Mat RealSpectral::unitary(double t) const {
  const RVec c = (-t * values_.array()).cos();
  const RVec s = (-t * values_.array()).sin();
  const MatrixXd re = vectors_ * c.asDiagonal() * vectors_.transpose();
  const MatrixXd im = vectors_ * s.asDiagonal() * vectors_.transpose();
  Mat u(re.rows(), re.cols());
  u.real() = re;
  u.imag() = im;
  return u;
}

double spin_grid_deficit(const RealSpectral& h_spec, const RealSpectral& k_spec, const Eigen::Matrix2d& h_spin,
                         const Vec& psi, double beta) {
  const int n = k_spec.dim();
  if (h_spec.dim() != 2 * n || psi.size() != n)
    throw Error(ErrorKind::Space, "deficit: spin (x) grid dimensions disagree");
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(h_spin);
  const Vec u = k_spec.thermal_half(psi, beta);
  Mat w(2 * n, 4);
  for (int s = 0; s < 2; ++s) {
    const Vec v = es.eigenvectors().col(s).cast<cplx>() * std::exp(-0.5 * beta * es.eigenvalues()(s));
    w.col(s) = kron_vec(v, u);
    w.col(2 + s) = h_spec.thermal_half(kron_vec(basis_vec(2, s), psi), beta);
  }
  const RVec signs = (RVec(4) << 1.0, 1.0, -1.0, -1.0).finished();
  return low_rank_trace_norm(w, signs);
}

H3Params H3Params::coarse() {
  H3Params p;
  p.model.scheme = KineticScheme::Fd3;
  p.grid = {-16.0, 16.0, 319};
  return p;
}

namespace {

// Probability that a spin (x) grid state sits on one of the two points next to either wall.
double wall_weight(const Vec& state, int n) {
  double w = 0.0;
  for (int s = 0; s < 2; ++s)
    for (int j : {0, 1, n - 2, n - 1}) w += std::norm(state(s * n + j));
  return w;
}

struct TransitionRun {
  double probability = 0.0;
  double partition = 0.0;  // Z(h_spin) Z_K(|start><start|)
  double wall = 0.0;
};

// Start in G(h_spin) (x) G_K(|start><start|), evolve, measure 1 (x) |target><target|.
TransitionRun spin_grid_transition(const RealSpectral& h_spec, const RealSpectral& k_spec,
                                   const Eigen::Matrix2d& h_spin, const Vec& start, const Vec& target,
                                   double beta, double t, int snapshots) {
  const int n = k_spec.dim();
  const SpinGibbs g = spin_gibbs(h_spin, beta);
  const Vec u = k_spec.thermal_half(start, beta);
  TransitionRun run;
  run.partition = g.partition * u.squaredNorm();
  const Vec u_hat = u / u.norm();
  for (int s = 0; s < 2; ++s) {
    const Vec initial = kron_vec(g.vectors.col(s), u_hat);
    const Vec out = h_spec.propagate(initial, t);
    for (int b = 0; b < 2; ++b) run.probability += g.weights(s) * std::norm(target.dot(out.segment(b * n, n)));
    for (int k = 0; k <= snapshots; ++k) {
      const Vec mid = k == snapshots ? out : h_spec.propagate(initial, t * k / std::max(snapshots, 1));
      run.wall = std::max(run.wall, g.weights(s) * wall_weight(mid, n));
    }
  }
  return run;
}

}  // namespace

H3Result run_h3(const H3Params& p) {
  const auto t0 = std::chrono::steady_clock::now();
  const MatrixXd h = spin_field_matrix(p.model, p.grid);
  const RealSpectral h_spec(h);
  const RealSpectral k_spec(kinetic_matrix(p.grid, p.model.mass(), p.model.scheme));

  const Eigen::Matrix2d h_i = 0.5 * p.model.e0 * sigma_z();
  const Eigen::Matrix2d h_f = 0.25 * p.model.e0 * sigma_x();
  const Vec psi_i = coherent_state(p.grid, p.alpha_i, p.sigma);
  const Vec psi_f = coherent_state(p.grid, p.alpha_f, p.sigma);

  const auto fwd = spin_grid_transition(h_spec, k_spec, h_i, psi_i, psi_f, p.beta, p.time, p.wall_snapshots);
  const auto rev = spin_grid_transition(h_spec, k_spec, h_f, psi_f.conjugate(), psi_i.conjugate(), p.beta, p.time,
                                        p.wall_snapshots);

  H3Result r;
  r.p_plus = fwd.probability;
  r.p_minus = rev.probability;
  r.z_i = fwd.partition;
  r.z_f = rev.partition;
  r.residual = std::abs(r.z_i * r.p_plus - r.z_f * r.p_minus);
  r.relative_residual = r.residual / (std::abs(r.z_i * r.p_plus) + std::abs(r.z_f * r.p_minus));
  r.deficit_i = spin_grid_deficit(h_spec, k_spec, h_i, psi_i, p.beta);
  r.deficit_f = spin_grid_deficit(h_spec, k_spec, h_f, psi_f, p.beta);
  r.bound = r.deficit_i + r.deficit_f;
  r.wall_probability = std::max(fwd.wall, rev.wall);
  if (p.check_propagator) {
    const Mat v = h_spec.unitary(p.time);
    const Mat hc = h.cast<cplx>();
    r.unitarity_defect = max_abs(v.adjoint() * v - Mat::Identity(v.rows(), v.cols()));
    r.commutator_defect = max_abs(hc * v - v * hc);
  }
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return r;
}

std::vector<DeficitPoint> deficit_curves(const H3Params& p, double r_min, double r_max, int count) {
  if (count < 2) throw Error(ErrorKind::Precondition, "deficit curves need at least two points");
  const MatrixXd h = spin_field_matrix(p.model, p.grid);
  const RealSpectral h_spec(h);
  const RealSpectral k_spec(kinetic_matrix(p.grid, p.model.mass(), p.model.scheme));
  const Eigen::Matrix2d h_i = 0.5 * p.model.e0 * sigma_z();
  const Eigen::Matrix2d h_f = 0.25 * p.model.e0 * sigma_x();
  std::vector<DeficitPoint> rows(count);
  for (int k = 0; k < count; ++k) {
    DeficitPoint& row = rows[k];
    row.r = r_min + (r_max - r_min) * k / (count - 1);
    const Vec psi = coherent_state(p.grid, cplx(row.r, 2.0), p.sigma);
    const Eigen::Vector3d f = p.model.field_at(row.r * p.model.y0);
    const Eigen::Matrix2d h_local = 0.5 * p.model.e0 * (f.x() * sigma_x() + f.z() * sigma_z());
    row.deficit_i = spin_grid_deficit(h_spec, k_spec, h_i, psi, p.beta);
    row.deficit_f = spin_grid_deficit(h_spec, k_spec, h_f, psi, p.beta);
    row.deficit_local = spin_grid_deficit(h_spec, k_spec, h_local, psi, p.beta);
  }
  return rows;
}

// ---------------------------------------------------------------------------
// Control particle with separate system and reservoir qubits.

namespace {

double ramp(double x, double a, double b) {
  if (x <= a) return 0.0;
  if (x >= b) return 1.0;
  const double s = std::sin(0.5 * kPi * (x - a) / (b - a));
  return s * s;
}

double bump(double x, double a, double b) {
  if (x <= a || x >= b) return 0.0;
  const double s = std::sin(kPi * (x - a) / (b - a));
  return s * s;
}

// Effects on a qubit: the identity plus pure-state projectors on a Bloch grid.
std::vector<Mat> qubit_effect_family(int steps) {
  std::vector<Mat> family{Mat::Identity(2, 2)};
  for (int a = 0; a <= steps; ++a) {
    const double theta = kPi * a / steps;
    const int n_phi = (a == 0 || a == steps) ? 1 : 2 * steps;
    for (int b = 0; b < n_phi; ++b) {
      const double phi = kPi * b / steps;
      Vec v(2);
      v << std::cos(0.5 * theta), std::polar(std::sin(0.5 * theta), phi);
      family.push_back(v * v.adjoint());
    }
  }
  return family;
}

// Vectors q_k with sum |q_k><q_k| = Q for the family members above (identity or rank one).
std::vector<Vec> effect_vectors(const Mat& q) {
  Eigen::SelfAdjointEigenSolver<Mat> es(q);
  std::vector<Vec> out;
  for (int k = 0; k < 2; ++k)
    if (es.eigenvalues()(k) > 1e-12) out.push_back(std::sqrt(es.eigenvalues()(k)) * es.eigenvectors().col(k));
  return out;
}

struct ControlSetup {
  int n = 0;
  MatrixXd h;  // C (x) S' (x) E, control index major
  std::unique_ptr<RealSpectral> h_spec, k_spec;
  Eigen::Matrix2d h_sprime_i, h_sprime_f;  // effective asymptotic S' Hamiltonians
};

// F~(sigma) = Tr_{C S'}([|target><target| (x) 1_{S'E}] V [G_K(start) (x) G(h_sprime) (x) sigma] V^dagger).
CPM conditioned_map(const ControlSetup& c, const Eigen::Matrix2d& h_sprime, const Vec& start, const Vec& target,
                    double beta, double t, double* partition) {
  const SpinGibbs g = spin_gibbs(h_sprime, beta);
  const Vec u = c.k_spec->thermal_half(start, beta);
  *partition = g.partition * u.squaredNorm();
  const Vec u_hat = u / u.norm();
  std::vector<Mat> kraus;
  for (int s = 0; s < 2; ++s) {
    std::array<Vec, 2> out;
    for (int e = 0; e < 2; ++e)
      out[e] = c.h_spec->propagate(kron_vec(u_hat, kron_vec(g.vectors.col(s), basis_vec(2, e))), t);
    for (int sp = 0; sp < 2; ++sp) {
      Mat k(2, 2);
      for (int e = 0; e < 2; ++e)
        for (int eo = 0; eo < 2; ++eo) {
          cplx acc = 0.0;
          for (int x = 0; x < c.n; ++x) acc += std::conj(target(x)) * out[e]((x * 2 + sp) * 2 + eo);
          k(eo, e) = std::sqrt(g.weights(s)) * acc;
        }
      kraus.push_back(k);
    }
  }
  const TensorSpace e_space{{"E", 2}};
  return CPM(e_space, e_space, kraus);
}

// ||J_K(|psi><psi|) (x) J(h_sprime)(1) (x) J(h_e)(Q) - J_H(|psi><psi| (x) 1 (x) Q)||_1
double control_deficit(const ControlSetup& c, const Eigen::Matrix2d& h_sprime, const Eigen::Matrix2d& h_e,
                       const Vec& psi, const Mat& q, double beta) {
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(h_sprime);
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> ee(h_e);
  const Mat e_half = ee.eigenvectors().cast<cplx>() *
                     (-0.5 * beta * ee.eigenvalues().array()).exp().matrix().cast<cplx>().asDiagonal() *
                     ee.eigenvectors().transpose().cast<cplx>();
  const Vec u = c.k_spec->thermal_half(psi, beta);
  const std::vector<Vec> qs = effect_vectors(q);
  const int cols = 4 * static_cast<int>(qs.size());
  Mat w(4 * c.n, cols);
  RVec signs(cols);
  int col = 0;
  for (const Vec& qv : qs)
    for (int s = 0; s < 2; ++s) {
      const Vec sv = es.eigenvectors().col(s).cast<cplx>() * std::exp(-0.5 * beta * es.eigenvalues()(s));
      w.col(col) = kron_vec(u, kron_vec(sv, e_half * qv));
      signs(col++) = 1.0;
      w.col(col) = c.h_spec->thermal_half(kron_vec(psi, kron_vec(basis_vec(2, s), qv)), beta);
      signs(col++) = -1.0;
    }
  return low_rank_trace_norm(w, signs);
}

}  // namespace

ApproxConditionalResult run_approx_conditional(const ApproxConditionalParams& p) {
  p.grid.validate();
  if (!(p.x_f > p.x_i)) throw Error(ErrorKind::Precondition, "interaction region needs x_i < x_f");
  ControlSetup c;
  c.n = p.grid.n_points;
  const MatrixXd k = kinetic_matrix(p.grid, 1.0 / p.kappa, p.scheme);
  const Eigen::Matrix4d w =
      p.interaction.isZero() ? Eigen::Matrix4d(Eigen::kroneckerProduct(sigma_x(), sigma_x())) : p.interaction;
  if (!w.isApprox(w.transpose())) throw Error(ErrorKind::Precondition, "interaction must be real symmetric");
  c.h_sprime_i = p.h_sprime_i;
  c.h_sprime_f = p.h_sprime_i + p.coupling * (p.h_sprime_f - p.h_sprime_i);

  const Eigen::Matrix2d id2 = Eigen::Matrix2d::Identity();
  c.h = Eigen::kroneckerProduct(k, Eigen::Matrix4d::Identity());
  for (int x = 0; x < c.n; ++x) {
    const double y = p.grid.point(x);
    const Eigen::Matrix2d hs = p.h_sprime_i + p.coupling * ramp(y, p.x_i, p.x_f) * (p.h_sprime_f - p.h_sprime_i);
    Eigen::Matrix4d local = Eigen::kroneckerProduct(hs, id2);
    local += Eigen::kroneckerProduct(id2, p.h_e);
    local += p.coupling * bump(y, p.x_i, p.x_f) * w;
    c.h.block(4 * x, 4 * x, 4, 4) += local;
  }
  c.h_spec = std::make_unique<RealSpectral>(c.h);
  c.k_spec = std::make_unique<RealSpectral>(k);

  const Vec psi_i = coherent_state(p.grid, p.alpha_i, p.sigma);
  const Vec psi_f = coherent_state(p.grid, p.alpha_f, p.sigma);

  ApproxConditionalResult r;
  const CPM f_plus = conditioned_map(c, c.h_sprime_i, psi_i, psi_f, p.beta, p.time, &r.z_i);
  const CPM f_minus =
      conditioned_map(c, c.h_sprime_f, psi_f.conjugate(), psi_i.conjugate(), p.beta, p.time, &r.z_f);

  const TensorSpace e_space{{"E", 2}};
  const TimeReversal t_e = transpose_reversal(e_space);
  const CPM j_e = ThermalContext(p.beta, Operator(e_space, p.h_e.cast<cplx>())).j_cpm();
  r.lhs = compose(f_plus, j_e).scaled(r.z_i);
  r.rhs = compose(j_e, ominus(f_minus, t_e, t_e)).scaled(r.z_f);
  r.choi_distance = cpm_distance(r.lhs, r.rhs).choi_trace;

  const std::vector<Mat> family = qubit_effect_family(p.bloch_steps);
  for (const Mat& q : family) {
    const Mat delta = r.rhs.apply(q) - r.lhs.apply(q);
    Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (delta + delta.adjoint()), Eigen::EigenvaluesOnly);
    const RVec ev = es.eigenvalues();
    r.diff = std::max({r.diff, ev.cwiseMax(0.0).sum(), -ev.cwiseMin(0.0).sum()});
    r.d_i = std::max(r.d_i, control_deficit(c, c.h_sprime_i, p.h_e, psi_i, q, p.beta));
    r.d_f = std::max(r.d_f, control_deficit(c, c.h_sprime_f, p.h_e, psi_f, q, p.beta));
  }
  r.bound = r.d_i + r.d_f;
  r.overlap = std::max(gaussian_mass(2.0 * p.sigma * p.alpha_i.real(), p.sigma, p.x_i, p.x_f),
                       gaussian_mass(2.0 * p.sigma * p.alpha_f.real(), p.sigma, p.x_i, p.x_f));
  r.overlap_warning = r.overlap > p.overlap_threshold;
  return r;
}

}  // namespace qfr
