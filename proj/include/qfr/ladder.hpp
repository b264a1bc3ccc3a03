#pragma once

#include "qfr/channels.hpp"

#include <map>

namespace qfr {

// Truncated ladder H_E = s * sum_j j |j><j| for j in [j_min, j_max].
struct LadderSpec {
  double spacing = 1.0;
  int j_min = -20;
  int j_max = 20;
  std::string label = "E";

  int size() const { return j_max - j_min + 1; }
  int index(int j) const { return j - j_min; }
  bool contains(int j) const { return j >= j_min && j <= j_max; }
  TensorSpace space() const { return TensorSpace{{label, size()}}; }
  Operator hamiltonian() const;
  RVec energies() const;
  void validate() const;
};

// Finite system whose eigenvalues are integer multiples of the ladder spacing:
// H = s * sum_n z_n |psi_n><psi_n| with the psi_n the columns of `basis`.
struct LevelSystem {
  TensorSpace space;
  std::vector<int> z;
  Mat basis;

  int dim() const { return space.dim(); }
  int span() const;  // max z - min z
  Operator hamiltonian(double spacing) const;
  void validate() const;
};

LevelSystem diagonal_level_system(const std::string& label, const std::vector<int>& z);

Operator shift_operator(const LadderSpec& spec, int power);

// Energy-conserving lift of U. For each total level l the block spanned by
// |psi_n>|l - z_n> receives the matrix <psi_n|U|psi_n'> when every member lies in
// the truncation and acts as the identity otherwise (censoring at both ends).
Operator censored_v_of_u(const Operator& u, const LevelSystem& sys, const LadderSpec& spec);
// Same construction with a block matrix (computational basis) chosen per total level.
Operator censored_v_of_blocks(const std::function<Mat(int level)>& u_of_level, const LevelSystem& sys,
                              const LadderSpec& spec);
// Total levels whose blocks are complete (not censored).
std::pair<int, int> complete_levels(const LevelSystem& sys, const LadderSpec& spec);

// Projector basis for an interior window [lo, hi] of ladder levels, as an isometry.
Mat window_isometry(const LadderSpec& spec, int lo, int hi);

struct TranslationResidual {
  double max_residual = 0.0;
  int tested = 0;
};
// max || Delta^a F(|n><n'|) Delta^{dagger b} - F(Delta^a |n><n'| Delta^{dagger b}) ||_1
// for n, n' in [lo, hi] and shifts a, b in [-max_shift, max_shift].
TranslationResidual translation_invariance_check(const CPM& cpm, const LadderSpec& spec, int lo, int hi,
                                                 int max_shift);

// p(m|n) = <m|F(|n><n|)|m>, rows m (output), columns n (input).
Eigen::MatrixXd diagonal_probs(const CPM& cpm);

// q^delta(m|n) = <m|F(|n><n'|)|m'> with n' = n - delta, m' = m - delta (indices).
struct AmplitudeTable {
  int delta = 0;
  Mat q;  // rows m, columns n; entries outside the valid range are zero
  bool valid(int m, int n) const {
    return m - delta >= 0 && m - delta < q.rows() && n - delta >= 0 && n - delta < q.cols();
  }
};
AmplitudeTable offdiag_amplitudes(const CPM& cpm, int delta);

// Exact Tr(A F(|psi_theta><psi_theta|)) for the interference arrangement.
double interference_probability(const CPM& cpm, int n, int n2, int m, int m2, double theta);
// (1/4) sum of the four p's + (1/2)|q| cos(arg q - theta).
double interference_prediction(const CPM& cpm, int n, int n2, int m, int m2, double theta);

// P(w) keyed by w in units of the spacing: sum over n - m = k of p(m|n) <n|sigma|n>.
std::map<int, double> work_distribution(const CPM& cpm, const Mat& sigma);

// max |<m|F(|n><n'|)|m'>| with E_m - E_n != E_m' - E_n'; inputs restricted to `inputs` when non-empty.
double decoupling_check(const CPM& cpm, const RVec& energies, const std::vector<int>& inputs = {});

// Rebuilds F on the interior from p(k|0) and the q^delta tables of a translation-invariant map.
double reconstruction_residual(const CPM& cpm, const LadderSpec& spec, int lo, int hi, int span);

}  // namespace qfr
