#pragma once

// Spin-half particle on a one-dimensional grid (hbar = 1, lengths in units of y0,
// energies in units of E0), plus the control-particle model with a separate reservoir.

#include "qfr/gibbs.hpp"
#include "qfr/reversal.hpp"

#include <Eigen/Eigenvalues>

namespace qfr {

enum class KineticScheme { Fd3, Fd5, Sine };

KineticScheme parse_kinetic_scheme(const std::string& name);
std::string to_string(KineticScheme s);

// Interior points of [y_min, y_max]; the wave function vanishes at both ends.
struct GridSpec {
  double y_min = -18.0;
  double y_max = 18.0;
  int n_points = 512;

  double dy() const { return (y_max - y_min) / (n_points + 1); }
  double point(int j) const { return y_min + (j + 1) * dy(); }
  RVec points() const;
  void validate() const;  // throws Precondition
};

using FieldProfile = std::function<Eigen::Vector3d(double)>;

// n(y) from the worked example: z-directed for y < -y0, rotating and shrinking inside
// [-y0, y0], x-directed with magnitude 1/2 for y > y0.
Eigen::Vector3d default_field(double y, double y0 = 1.0);

struct SpinFieldModel {
  double e0 = 1.0;
  double kappa = 0.1;  // hbar^2 / (M E0 y0^2)
  double y0 = 1.0;
  KineticScheme scheme = KineticScheme::Fd5;
  FieldProfile field;  // empty means default_field

  double mass() const { return 1.0 / (kappa * e0 * y0 * y0); }
  Eigen::Vector3d field_at(double y) const { return field ? field(y) : default_field(y, y0); }
};

// -(1/2M) d^2/dy^2 with hard walls.
Eigen::MatrixXd kinetic_matrix(const GridSpec& grid, double mass, KineticScheme scheme);

// Real symmetric matrix on spin (x) grid, spin index major, sigma_z = |1><1| - |0><0|.
Eigen::MatrixXd spin_field_matrix(const SpinFieldModel& model, const GridSpec& grid);
Operator build_hamiltonian(const SpinFieldModel& model, const GridSpec& grid);

// Sampled exp(-(y/sigma - 2 alpha)^2 / 4), unit norm on the grid.
Vec coherent_state(const GridSpec& grid, cplx alpha, double sigma);

// e^{-i t H} by spectral decomposition.
Operator evolve(const Operator& h, double t);

// Diagonalized real symmetric matrix acting on complex vectors without forming
// complex dense matrices.
class RealSpectral {
 public:
  explicit RealSpectral(const Eigen::MatrixXd& h);

  const RVec& values() const { return values_; }
  const Eigen::MatrixXd& vectors() const { return vectors_; }
  int dim() const { return static_cast<int>(values_.size()); }

  Vec apply(const Vec& v, const std::function<cplx(double)>& f) const;
  Vec propagate(const Vec& v, double t) const;
  Vec thermal_half(const Vec& v, double beta) const;  // e^{-beta H/2} v
  Mat unitary(double t) const;

 private:
  RVec values_;
  Eigen::MatrixXd vectors_;
};

// ||J_{h_spin}(1) (x) J_K(|psi><psi|) - J_H(1 (x) |psi><psi|)||_1, evaluated on the
// rank-4 difference. `k_spec` diagonalizes the grid kinetic term, `h_spec` the full H.
double spin_grid_deficit(const RealSpectral& h_spec, const RealSpectral& k_spec, const Eigen::Matrix2d& h_spin,
                         const Vec& psi, double beta);

struct H3Params {
  SpinFieldModel model;
  GridSpec grid;
  double beta = 1.0;
  double time = 21.5;
  double sigma = 0.5;
  cplx alpha_i{-4.0, 2.0};
  cplx alpha_f{4.0, 2.0};
  int wall_snapshots = 16;
  bool check_propagator = true;

  // 3-point stencil with dy = 0.1, which lands on the two published digits of P+ and P-.
  static H3Params coarse();
};

struct H3Result {
  double p_plus = 0.0, p_minus = 0.0;
  double z_i = 0.0, z_f = 0.0;          // Z(H_S^i) Z_K(Q^i), Z(H_S^f) Z_K(Q^f)
  double residual = 0.0;                // |z_i P+ - z_f P-|
  double relative_residual = 0.0;
  double deficit_i = 0.0, deficit_f = 0.0;
  double bound = 0.0;                   // deficit_i + deficit_f (all effect norms are 1)
  double wall_probability = 0.0;        // max weight within 2 dy of a wall during both runs
  double unitarity_defect = 0.0;        // zero when check_propagator is off
  double commutator_defect = 0.0;
  double seconds = 0.0;
};

H3Result run_h3(const H3Params& p);

struct DeficitPoint {
  double r = 0.0;
  double deficit_i = 0.0;      // spin Hamiltonian E0 sigma_z / 2
  double deficit_f = 0.0;      // E0 sigma_x / 4
  double deficit_local = 0.0;  // E0 n(r y0).sigma / 2
};
// alpha = r + 2i for `count` equally spaced r in [r_min, r_max].
std::vector<DeficitPoint> deficit_curves(const H3Params& p, double r_min = -10.0, double r_max = 10.0,
                                         int count = 81);

// Control particle C on a grid, qubits S' and E. Every position dependence of
// H_{S'E}(x) is scaled by `coupling`: a ramp from H_S'^i to H_S'^f plus a bump
// coupling * chi(x) * W on [x_i, x_f]. With coupling = 0 the three systems do not interact.
struct ApproxConditionalParams {
  GridSpec grid{-12.0, 12.0, 192};
  double kappa = 0.1;
  KineticScheme scheme = KineticScheme::Fd5;
  double beta = 1.0;
  double time = 21.5;
  double sigma = 0.5;
  double coupling = 1.0;
  double x_i = -1.0, x_f = 1.0;
  cplx alpha_i{-4.0, 2.0};
  cplx alpha_f{4.0, 2.0};
  Eigen::Matrix2d h_sprime_i = (Eigen::Matrix2d() << -0.5, 0.0, 0.0, 0.5).finished();
  Eigen::Matrix2d h_sprime_f = (Eigen::Matrix2d() << 0.0, 0.25, 0.25, 0.0).finished();
  Eigen::Matrix2d h_e = (Eigen::Matrix2d() << -0.5, 0.0, 0.0, 0.5).finished();
  Eigen::Matrix4d interaction = Eigen::Matrix4d::Zero();  // zero selects sigma_x (x) sigma_x
  int bloch_steps = 12;           // polar resolution of the effect family on E
  double overlap_threshold = 1e-6;
};

struct ApproxConditionalResult {
  double z_i = 0.0, z_f = 0.0;
  double diff = 0.0;            // sup over effects of |Tr Q^f (lhs - rhs)(Q^i)|, family estimate
  double choi_distance = 0.0;   // trace norm of the Choi difference
  double d_i = 0.0, d_f = 0.0;  // family lower bounds of the uniform deficits
  double bound = 0.0;           // d_i + d_f
  double overlap = 0.0;         // weight of the control effects inside [x_i, x_f]
  bool overlap_warning = false;
  CPM lhs, rhs;                 // z_i F+ o J_E and z_f J_E o F-^ominus
};

ApproxConditionalResult run_approx_conditional(const ApproxConditionalParams& p);

}  // namespace qfr
