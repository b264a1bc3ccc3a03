#pragma once

#include "qfr/gibbs.hpp"
#include "qfr/ladder.hpp"
#include "qfr/random.hpp"
#include "qfr/reversal.hpp"

#include <optional>

namespace qfr {

// Control states, in this order on the 4-dimensional control factor.
enum Control : int { kInitialPlus = 0, kInitialMinus = 1, kFinalPlus = 2, kFinalMinus = 3 };

// Y swaps i+ <-> i- and f+ <-> f-.
Mat control_swap();

// Transition blocks of a perfectly controlled unitary, written in the eigenbases
// of the initial and final Hamiltonians. `forward` maps i+ to f+ and `back`
// maps f+ to i+. The mirrored blocks (f- to i-, i- to f-) are the transposes
// when the model is time-reversal symmetric and independent unitaries otherwise.
struct ControlBlocks {
  Mat forward, back;
  Mat mirror_forward, mirror_back;
  static ControlBlocks symmetric(Mat forward, Mat back);
};
// Assembles sum of the four blocks; index(n, c) gives the position of |chi_n>|c>.
Mat assemble_control_unitary(const ControlBlocks& b, int n, const std::function<int(int, int)>& index);

// ---------------------------------------------------------------------------
// Spin-1/2 system and spin-1/2 reservoir in resonance.

struct TwoQubitParams {
  double theta = 0.7;
  double beta = 1.0;
  double s = 1.0;
  double chi = 0.0, chi_plus = 0.0, chi_minus = 0.0, delta = 0.0;
};

struct TwoQubitModel {
  TwoQubitParams params;
  TensorSpace system, reservoir;  // labels "S" and "E"
  Operator h_system, h_reservoir;
  Mat u;                          // 2x2 block on span{|01>, |10>}
  Operator v;
  Operator q_i_plus, q_f_plus, q_i_minus, q_f_minus;
  double z_i = 0.0, z_f = 0.0;    // partition-map values on the system
  CPM forward, reverse;           // conditional maps on the reservoir
  TimeReversal t_system, t_reservoir;

  ThermalContext reservoir_context() const { return {params.beta, h_reservoir}; }
  ThermalContext system_context() const { return {params.beta, h_system}; }
};
TwoQubitModel make_two_qubit(const TwoQubitParams& p);

// Closed forms of F+(|0><0|) and F-(|0><1|) for chi = chi_pm = delta = 0.
Mat two_qubit_forward_00(double theta, double beta, double s);
Mat two_qubit_reverse_01(double theta, double beta, double s);
// Kraus operators V_{0+}, V_{1+} (or V_{0-}, V_{1-}) of the same special case.
CPM two_qubit_kraus_form(double theta, double beta, double s, bool forward);

// ---------------------------------------------------------------------------
// S' (x) C (x) E with perfect control, energy ladder reservoir.

struct ControlledLadderParams {
  LadderSpec ladder{1.0, -20, 20};
  double beta = 1.0;
  std::vector<int> z_initial{0, 1, 3};
  std::vector<int> z_final{0, 2, 2};
  bool time_symmetric = true;
  // Draw new blocks for every total level; R+ is then no longer unital.
  bool level_dependent = false;
  unsigned seed = 1;
  // Overrides the random blocks when set.
  std::function<ControlBlocks(int level)> blocks;
  // Eigenbases of H^i, H^f on S' (real orthogonal). Random when empty.
  Mat basis_initial, basis_final;
};

struct ControlledLadderModel {
  ControlledLadderParams params;
  LevelSystem sprime_control;  // S' (x) C, labels "S" and "C"
  Operator h_initial, h_final; // on S'
  Operator v;
  double z_i = 0.0, z_f = 0.0;
  CPM f_plus, f_minus, r_plus, r_minus;
  TimeReversal t_sc, t_reservoir;

  int span() const { return sprime_control.span(); }
  ThermalContext reservoir_context() const { return {params.beta, params.ladder.hamiltonian()}; }
  // Interior window [j_min + margin, j_max - margin].
  std::pair<int, int> interior(int margin) const;
  // Map on E induced by `v` with S' in `state` and control in `control`; effect 1.
  CPM induced(const Operator& v, const Mat& state, Control control) const;
};
ControlledLadderModel make_controlled_ladder(const ControlledLadderParams& p);

// ---------------------------------------------------------------------------
// Conditional model: S~ with integer levels, V = censored V(U), T(U) = U.

struct ConditionalLadderParams {
  LadderSpec ladder{1.0, -12, 12};
  double beta = 1.0;
  std::vector<int> z{0, 1, 3};
  bool diagonal_effects = true;
  unsigned seed = 3;
};

struct ConditionalLadderModel {
  ConditionalLadderParams params;
  LevelSystem system;  // label "S", diagonal Hamiltonian
  Operator h_system;
  Operator u, v;
  Operator q_i_plus, q_f_plus, q_i_minus, q_f_minus;
  double z_i = 0.0, z_f = 0.0;
  CPM f_plus, f_minus;
  TimeReversal t_system, t_reservoir;

  ThermalContext reservoir_context() const { return {params.beta, params.ladder.hamiltonian()}; }
  ThermalContext system_context() const { return {params.beta, h_system}; }
  // Success probabilities computed from U alone.
  double success_forward() const;
  double success_reverse() const;
};
ConditionalLadderModel make_conditional_ladder(const ConditionalLadderParams& p);

// ---------------------------------------------------------------------------
// Control C(4), bath B, and a correlated pair S (x) E whose Hamiltonian switches
// between H^i_SE and H^f_SE. Maps act on S (x) E.

struct PrecorrelatedParams {
  double beta = 0.8;
  std::vector<int> se_levels{0, 1, 1, 2};
  std::vector<int> bath_levels{0, 1};
  double spacing = 1.0;
  unsigned seed = 5;
};

struct PrecorrelatedModel {
  PrecorrelatedParams params;
  TensorSpace se;
  Operator h_initial, h_final, h_bath;
  Operator v;
  CPM f_plus, f_minus;
  TimeReversal t_se, t_global;
  ThermalContext initial_context() const { return {params.beta, h_initial}; }
  ThermalContext final_context() const { return {params.beta, h_final}; }
};
PrecorrelatedModel make_precorrelated(const PrecorrelatedParams& p);

// ---------------------------------------------------------------------------
// Two d-level systems with equal spacing and an energy-conserving coupling.

struct ResonantModel {
  Operator h1, h2, v;
  TimeReversal t;
};
// symmetric = true draws T-symmetric blocks (W W^t); otherwise generic unitaries.
ResonantModel make_resonant(int d, double spacing, bool symmetric, unsigned seed);

// ---------------------------------------------------------------------------
// Reservoir start |0><0|, H^i = H^f = s sum_{k<=K} k |k><k|, per-level
// permutations chosen to minimize the reservoir's energy loss.

struct ViolationModel {
  ControlledLadderModel model;
  int levels = 0;
  double free_energy_change = 0.0;
};
ViolationModel make_violation_model(int k_max, double s, double beta);

}  // namespace qfr
