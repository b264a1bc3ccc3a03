#pragma once

#include "qfr/channels.hpp"

#include <memory>

namespace qfr {

enum class Direction { Forward, Inverse };

// Inverse temperature plus Hamiltonian. The spectral decomposition is computed
// once at construction and shared between copies.
class ThermalContext {
 public:
  ThermalContext(double beta, Operator hamiltonian);
  ThermalContext(double beta, Operator hamiltonian, Spectrum spectrum);

  double beta() const { return beta_; }
  const Operator& hamiltonian() const { return h_; }
  const TensorSpace& space() const { return h_.space(); }
  const Spectrum& spectrum() const { return *spec_; }

  // e^{-beta H/2} (Forward) or e^{+beta H/2} (Inverse).
  const Mat& half_weight(Direction d) const { return d == Direction::Forward ? fwd_ : inv_; }

  Mat j_map(const Mat& q, Direction d = Direction::Forward) const;
  Operator j_map(const Operator& q, Direction d = Direction::Forward) const;
  CPM j_cpm(Direction d = Direction::Forward) const;

  double partition(const Mat& q) const;
  double partition(const Operator& q) const { return partition(q.matrix()); }
  double partition() const;  // Z(H) = Tr e^{-beta H}
  Mat gibbs(const Mat& q) const;
  Operator gibbs(const Operator& q) const;
  Operator gibbs_state() const;

  // Effect Q with G(Q) = rho: J^{-1}(rho) rescaled to unit operator norm.
  Operator gibbs_preimage(const Operator& rho) const;

  ThermalContext with_beta(double beta) const;

 private:
  void build();
  double beta_;
  Operator h_;
  std::shared_ptr<const Spectrum> spec_;
  Mat fwd_, inv_;
};

// || J_{beta h1}(q1) (x) J_{beta h2}(q2) - J_{beta h}(q1 (x) q2) ||_1
double factorization_deficit(const ThermalContext& global, const ThermalContext& c1, const ThermalContext& c2,
                             const Mat& q1, const Mat& q2);
double factorization_deficit(const Operator& h_global, const Operator& h1, const Operator& h2, const Operator& q1,
                             const Operator& q2, double beta);

// Same deficit with J^g(Q) = g(beta H) Q g(beta H)^dagger.
double generalized_j_deficit(const std::function<cplx(double)>& g, const Operator& h_global, const Operator& h1,
                             const Operator& h2, const Operator& q1, const Operator& q2, double beta);

// Largest deficit over a finite family of product effects: a lower bound on the uniform deficit.
double deficit_lower_bound(const ThermalContext& global, const ThermalContext& c1, const ThermalContext& c2,
                           const std::vector<std::pair<Mat, Mat>>& family);

// Z(H_S) from Z(H_S') when S' = S B with non-interacting bath B: Z(H_S) = Z(H_S')/Z(H_B).
inline double system_partition(double z_sprime, double z_bath) { return z_sprime / z_bath; }

// PSD factor: q = F F^dagger, columns scaled by sqrt of the positive eigenvalues.
Mat psd_factor(const Mat& q, double rel_cutoff = 1e-14);

}  // namespace qfr
