#pragma once

#include "qfr/operator.hpp"

#include <memory>
#include <mutex>

namespace qfr {

// Completely positive map in Kraus form. Kraus matrices are out_dim x in_dim.
class CPM {
 public:
  CPM() = default;  // empty map on trivial spaces
  CPM(TensorSpace in_space, TensorSpace out_space, std::vector<Mat> kraus);

  static CPM identity(const TensorSpace& space);
  static CPM conjugation(const Operator& v);
  static CPM sandwich(const TensorSpace& space, const Mat& a);  // X -> a X a^dagger

  const TensorSpace& in_space() const { return in_; }
  const TensorSpace& out_space() const { return out_; }
  const std::vector<Mat>& kraus() const { return kraus_; }

  Mat apply(const Mat& sigma) const;
  Operator apply(const Operator& sigma) const;
  // Heisenberg-picture action of the conjugate map.
  Mat apply_dual(const Mat& y) const;

  Mat kraus_sum() const;  // sum K^dagger K
  bool is_trace_non_increasing(double tol = 1e-9) const;
  bool is_channel(double tol = 1e-9) const;

  // Superoperator acting on column-stacked matrices; computed once per value.
  const Mat& superoperator() const;

  CPM scaled(double c) const;

 private:
  TensorSpace in_, out_;
  std::vector<Mat> kraus_;
  struct Cache {
    std::once_flag once;
    Mat super;
  };
  std::shared_ptr<Cache> cache_ = std::make_shared<Cache>();
};

// second after first.
CPM compose(const CPM& second, const CPM& first);
CPM conjugate_cpm(const CPM& phi);

// Replaces the input by the span of the orthonormal columns of `isometry`.
CPM restrict_input(const CPM& phi, const Mat& isometry, const TensorSpace& window_space);

// sigma -> Tr_traced([Q x 1] V [rho x sigma] V^dagger) with Q absorbed as sqrt(Q) on both sides.
CPM induced_cpm(const Operator& v, const Operator& env_state, const Operator& final_effect,
                const std::vector<std::string>& traced_labels);

// Choi operator sum_ij |i><j| (x) phi(|i><j|); input factors are relabelled with a "~in" suffix.
Operator choi_matrix(const CPM& phi);

struct CpmDistance {
  double choi_trace = 0.0;
  double max_entry = 0.0;
};
CpmDistance cpm_distance(const CPM& a, const CPM& b);
// Linear combination distance ||ca Choi(a) - cb Choi(b)||_1 without forming scaled maps.
CpmDistance cpm_distance(const CPM& a, double ca, const CPM& b, double cb);

CPM petz_recovery(const CPM& phi, const Mat& reference, double cutoff = 1e-12);

}  // namespace qfr
