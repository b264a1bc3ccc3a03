#pragma once

#include "qfr/gibbs.hpp"
#include "qfr/ladder.hpp"
#include "qfr/reversal.hpp"

#include <optional>

namespace qfr {

// Ingredients of z_i F+ = z_f J o F-^ominus o J^{-1} on the reservoir.
struct CrooksScenario {
  CPM forward;
  CPM reverse;
  double z_i = 1.0;
  double z_f = 1.0;
  ThermalContext reservoir;                    // J^{-1} on the input side
  std::optional<ThermalContext> reservoir_out; // J on the output side; defaults to `reservoir`
  TimeReversal reversal;                       // reservoir time reversal
  // Orthonormal columns spanning the admissible input states; empty means all.
  Mat input_window;
  // false compares against R^* directly (the reverse slot holds R).
  bool use_ominus = true;
};

struct CrooksResult {
  double residual = 0.0;   // Choi trace distance
  double max_entry = 0.0;
  double scale = 0.0;      // trace norm of the left-hand Choi matrix
};
CrooksResult crooks_residual(const CrooksScenario& s);

// The map J o F-^ominus o J^{-1} (or J o R^* o J^{-1}) scaled by z_f / z_i.
CPM crooks_partner(const CrooksScenario& s);

// max |z_i p+(m|n) - e^{beta(E_n - E_m)} z_f p-(n|m)| over the given indices.
double diagonal_crooks_check(const Eigen::MatrixXd& p_fwd, const Eigen::MatrixXd& p_rev, double z_i, double z_f,
                             const RVec& energies, double beta, const std::vector<int>& inputs = {});
// Same for the q^delta tables: z_i q+^delta(m|n) = z_f e^{beta(E_n - E_m)} q-^delta(n|m).
double offdiagonal_crooks_check(const AmplitudeTable& q_fwd, const AmplitudeTable& q_rev, double z_i, double z_f,
                                const RVec& energies, double beta, const std::vector<int>& inputs = {});

struct ClassicalCrooksResult {
  double residual = 0.0;
  std::map<int, double> p_forward, p_reverse;  // keyed by w / s
};
// max_w |z_i P+(w) - e^{beta w} z_f P-(-w)|, P computed from sigma.
ClassicalCrooksResult classical_crooks_check(const CPM& f_plus, const CPM& f_minus, const LadderSpec& spec,
                                             double beta, double z_i, double z_f, const Mat& sigma);

struct JarzynskiResult {
  cplx lhs = 0.0, rhs = 0.0;
  double residual = 0.0;
};
// Both sides of Tr[e^{bH} F+(e^{(-b+r+z)H/2} rho e^{(-b+r-z)H/2})] = (Z_f/Z_i) Tr[e^{rH/2} R+(1) e^{rH/2} rho].
// `r_plus_unit` is R+(1); pass the identity for unital scenarios.
JarzynskiResult jarzynski_check(const CPM& f_plus, const Mat& r_plus_unit, const RVec& energies, double beta,
                                double z_i, double z_f, const Mat& rho, double r, cplx z);
// Transformed input rho' = e^{(r+z)H/2} rho e^{(r-z)H/2}: the (0,0) member applied to rho'
// reproduces the (r,z) member applied to rho.
Mat jarzynski_shift(const Mat& rho, const RVec& energies, double r, cplx z);
// sum_w e^{-beta w} P+(w) against z_f / z_i.
JarzynskiResult classical_jarzynski_check(const CPM& f_plus, const LadderSpec& spec, double beta, double z_i,
                                          double z_f, const Mat& sigma);

struct WorkBoundResult {
  double energy_drop = 0.0;        // Tr(H sigma) - Tr(H F+(sigma))
  double free_energy_delta = 0.0;  // F(H^f) - F(H^i)
  double correction_term = 0.0;    // -(1/beta) ln Tr(sigma R+(1))
  double slack = 0.0;              // energy_drop - free_energy_delta - correction_term
  double standard_slack = 0.0;     // energy_drop - free_energy_delta
};
WorkBoundResult work_bound_check(const CPM& f_plus, const CPM& r_plus, const RVec& energies, double beta, double z_i,
                                 double z_f, const Mat& sigma);

struct ViolationResult {
  double min_energy_cost = 0.0;  // min D(V, |0><0|)
  double free_energy_delta = 0.0;
  double gap = 0.0;              // free_energy_delta - min_energy_cost
  double closed_form_gap = 0.0;  // equal-spacing formula, when applicable
};
// Minimum of D over per-block unitaries via sorted eigenvalue pairing. Levels are in
// units of s; sigma_diag holds reservoir populations indexed from `sigma_offset`.
ViolationResult violation_minimizer(const std::vector<int>& z_i, const std::vector<int>& z_f, double s, double beta,
                                    const std::vector<double>& sigma_diag = {1.0}, int sigma_offset = 0);
// Same minimum by enumerating every permutation per block (N! per block).
double violation_brute_force(const std::vector<int>& z_i, const std::vector<int>& z_f, double s, double beta,
                             const std::vector<double>& sigma_diag = {1.0}, int sigma_offset = 0);
// kT [sb e^{-sb}/(1-e^{-sb}) - sb(K+1)e^{-sb(K+1)}/(1-e^{-sb(K+1)})].
double violation_closed_form(int k_max, double s, double beta);

// |Tr(Q^f V J(Q^i) V^dagger) - Tr(T(Q^i) V J(T(Q^f)) V^dagger)|. Throws Precondition
// when [H,V], T(H) = H or T(V) = V fail by more than 1e-9 (relative).
double global_invariance_check(const Operator& h, const Operator& v, const TimeReversal& t, const Operator& q_i,
                               const Operator& q_f, double beta);

// Tr(Q^f F(G(Q^i))).
double transition_probability(const CPM& f, const ThermalContext& ctx, const Mat& q_i, const Mat& q_f);
// Tr(Q^f V G(Q^i) V^dagger) for a global unitary.
double transition_probability(const Operator& v, const ThermalContext& ctx, const Mat& q_i, const Mat& q_f);

struct ConditionalJarzynskiResult {
  double lhs = 0.0;         // <e^{-beta W} | Q^{f+}>
  double rhs = 0.0;         // (f-/f+) Z(Q^f)/Z(Q^i)
  double residual = 0.0;
  double f_plus = 0.0, f_minus = 0.0;
  double success_spread = 0.0;  // max |Tr F~(sigma) - f Tr sigma| over the supplied states
};
ConditionalJarzynskiResult conditional_jarzynski_check(const CPM& f_plus, const CPM& f_minus, const LadderSpec& spec,
                                                       double beta, double z_i, double z_f,
                                                       const std::vector<Mat>& states);

// max |p(n'|n) G_n(H1) - p(n|n') G_n'(H1)| with system 2 starting in G(H2).
double detailed_balance_check(const Operator& h1, const Operator& h2, const Operator& v, double beta);

}  // namespace qfr
