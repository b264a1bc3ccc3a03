#include "qfr/ladder.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include <Eigen/Sparse>

namespace qfr {

Operator LadderSpec::hamiltonian() const { return Operator::diagonal(space(), energies()); }

RVec LadderSpec::energies() const {
  RVec e(size());
  for (int j = j_min; j <= j_max; ++j) e(index(j)) = spacing * j;
  return e;
}

void LadderSpec::validate() const {
  if (!(spacing > 0)) throw Error(ErrorKind::Precondition, "ladder spacing must be positive");
  if (j_max <= j_min) throw Error(ErrorKind::Precondition, "ladder needs j_max > j_min");
}

int LevelSystem::span() const {
  auto [lo, hi] = std::minmax_element(z.begin(), z.end());
  return *hi - *lo;
}

Operator LevelSystem::hamiltonian(double spacing) const {
  RVec zz(dim());
  for (int n = 0; n < dim(); ++n) zz(n) = spacing * z[n];
  return {space, basis * zz.cast<cplx>().asDiagonal() * basis.adjoint()};
}

void LevelSystem::validate() const {
  if (static_cast<int>(z.size()) != dim() || basis.rows() != dim() || basis.cols() != dim())
    throw Error(ErrorKind::Space, "level system data does not match its space");
  if (!is_unitary(basis, 1e-10)) throw Error(ErrorKind::Precondition, "level system eigenbasis is not orthonormal");
}

LevelSystem diagonal_level_system(const std::string& label, const std::vector<int>& z) {
  const int n = static_cast<int>(z.size());
  return {TensorSpace{{label, n}}, z, Mat::Identity(n, n)};
}

Operator shift_operator(const LadderSpec& spec, int power) {
  const int l = spec.size();
  if (std::abs(power) >= l) throw Error(ErrorKind::Precondition, "shift power exceeds the ladder size");
  Mat d = Mat::Zero(l, l);
  for (int i = 0; i < l; ++i)
    if (i + power >= 0 && i + power < l) d(i + power, i) = 1.0;
  return {spec.space(), d};
}

std::pair<int, int> complete_levels(const LevelSystem& sys, const LadderSpec& spec) {
  auto [zlo, zhi] = std::minmax_element(sys.z.begin(), sys.z.end());
  // l is complete when l - z_n lies in [j_min, j_max] for every n.
  return {spec.j_min + *zhi, spec.j_max + *zlo};
}

Operator censored_v_of_blocks(const std::function<Mat(int level)>& u_of_level, const LevelSystem& sys,
                              const LadderSpec& spec) {
  sys.validate();
  spec.validate();
  for (const auto& f : sys.space.factors())
    if (f.label == spec.label) throw Error(ErrorKind::Space, "system and ladder labels collide");
  const int n = sys.dim(), l = spec.size();
  const TensorSpace joint = sys.space.concat(spec.space());
  auto [zlo, zhi] = std::minmax_element(sys.z.begin(), sys.z.end());
  const auto [full_lo, full_hi] = complete_levels(sys, spec);

  // V in the product basis |psi_n> (x) |j>, then rotated to the computational basis.
  std::vector<Eigen::Triplet<cplx>> entries;
  for (int level = spec.j_min + *zlo; level <= spec.j_max + *zhi; ++level) {
    if (level >= full_lo && level <= full_hi) {
      const Mat u = u_of_level(level);
      if (u.rows() != n || u.cols() != n) throw Error(ErrorKind::Space, "block unitary has the wrong size");
      const Mat ub = sys.basis.adjoint() * u * sys.basis;
      for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b)
          if (ub(a, b) != cplx(0.0))
            entries.emplace_back(a * l + spec.index(level - sys.z[a]), b * l + spec.index(level - sys.z[b]), ub(a, b));
    } else {
      for (int a = 0; a < n; ++a) {
        const int j = level - sys.z[a];
        if (spec.contains(j)) entries.emplace_back(a * l + spec.index(j), a * l + spec.index(j), 1.0);
      }
    }
  }
  Eigen::SparseMatrix<cplx> vpsi(n * l, n * l), rot(n * l, n * l);
  vpsi.setFromTriplets(entries.begin(), entries.end());
  std::vector<Eigen::Triplet<cplx>> r;
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      if (sys.basis(a, b) != cplx(0.0))
        for (int j = 0; j < l; ++j) r.emplace_back(a * l + j, b * l + j, sys.basis(a, b));
  rot.setFromTriplets(r.begin(), r.end());
  const Mat right = vpsi * Mat(rot.adjoint());
  return {joint, Mat(rot * right)};
}

Operator censored_v_of_u(const Operator& u, const LevelSystem& sys, const LadderSpec& spec) {
  if (u.space() != sys.space) throw Error(ErrorKind::Space, "U must act on the level system");
  if (!is_unitary(u.matrix(), 1e-10)) throw Error(ErrorKind::Precondition, "U is not unitary");
  const Mat& m = u.matrix();
  return censored_v_of_blocks([&m](int) { return m; }, sys, spec);
}

Mat window_isometry(const LadderSpec& spec, int lo, int hi) {
  if (!spec.contains(lo) || !spec.contains(hi) || hi < lo)
    throw Error(ErrorKind::Precondition, "window lies outside the ladder");
  Mat p = Mat::Zero(spec.size(), hi - lo + 1);
  for (int j = lo; j <= hi; ++j) p(spec.index(j), j - lo) = 1.0;
  return p;
}

namespace {

// F(|a><b|) = sum_K K e_a e_b^t K^dagger
Mat apply_unit(const CPM& cpm, int a, int b) {
  const int d = cpm.out_space().dim();
  Mat out = Mat::Zero(d, d);
  for (const auto& k : cpm.kraus()) out.noalias() += k.col(a) * k.col(b).adjoint();
  return out;
}

Mat shift_rows_cols(const Mat& x, int a, int b) {
  const int d = static_cast<int>(x.rows());
  Mat out = Mat::Zero(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j)
      if (i + a >= 0 && i + a < d && j + b >= 0 && j + b < d) out(i + a, j + b) = x(i, j);
  return out;
}

}  // namespace

TranslationResidual translation_invariance_check(const CPM& cpm, const LadderSpec& spec, int lo, int hi,
                                                 int max_shift) {
  if (cpm.in_space().dim() != spec.size() || cpm.out_space().dim() != spec.size())
    throw Error(ErrorKind::Space, "translation check needs a map on the ladder");
  if (!spec.contains(lo - max_shift) || !spec.contains(hi + max_shift))
    throw Error(ErrorKind::Precondition, "translation window exceeds the ladder interior");
  TranslationResidual r;
  for (int n = lo; n <= hi; ++n)
    for (int n2 = lo; n2 <= hi; ++n2) {
      const Mat base = apply_unit(cpm, spec.index(n), spec.index(n2));
      for (int a = -max_shift; a <= max_shift; ++a)
        for (int b = -max_shift; b <= max_shift; ++b) {
          const Mat lhs = shift_rows_cols(base, a, b);
          const Mat rhs = apply_unit(cpm, spec.index(n + a), spec.index(n2 + b));
          r.max_residual = std::max(r.max_residual, trace_norm(Mat(lhs - rhs)));
          ++r.tested;
        }
    }
  return r;
}

Eigen::MatrixXd diagonal_probs(const CPM& cpm) {
  const int din = cpm.in_space().dim(), dout = cpm.out_space().dim();
  Eigen::MatrixXd p = Eigen::MatrixXd::Zero(dout, din);
  for (const auto& k : cpm.kraus()) p += k.cwiseAbs2();
  return p;
}

AmplitudeTable offdiag_amplitudes(const CPM& cpm, int delta) {
  const int din = cpm.in_space().dim(), dout = cpm.out_space().dim();
  AmplitudeTable t;
  t.delta = delta;
  t.q = Mat::Zero(dout, din);
  for (int n = 0; n < din; ++n) {
    if (n - delta < 0 || n - delta >= din) continue;
    for (int m = 0; m < dout; ++m) {
      if (m - delta < 0 || m - delta >= dout) continue;
      cplx acc = 0.0;
      for (const auto& k : cpm.kraus()) acc += k(m, n) * std::conj(k(m - delta, n - delta));
      t.q(m, n) = acc;
    }
  }
  return t;
}

double interference_probability(const CPM& cpm, int n, int n2, int m, int m2, double theta) {
  const int din = cpm.in_space().dim(), dout = cpm.out_space().dim();
  Vec psi = Vec::Zero(din);
  psi(n) = 1.0 / std::sqrt(2.0);
  psi(n2) = std::polar(1.0, theta) / std::sqrt(2.0);
  Vec a = Vec::Zero(dout);
  a(m) = 1.0;
  a(m2) = 1.0;
  const Mat effect = 0.5 * a * a.adjoint();
  return (effect * cpm.apply(Mat(psi * psi.adjoint()))).trace().real();
}

double interference_prediction(const CPM& cpm, int n, int n2, int m, int m2, double theta) {
  const Eigen::MatrixXd p = diagonal_probs(cpm);
  cplx q = 0.0;
  for (const auto& k : cpm.kraus()) q += k(m, n) * std::conj(k(m2, n2));
  return 0.25 * (p(m, n) + p(m2, n) + p(m, n2) + p(m2, n2)) + 0.5 * std::abs(q) * std::cos(std::arg(q) - theta);
}

std::map<int, double> work_distribution(const CPM& cpm, const Mat& sigma) {
  const Eigen::MatrixXd p = diagonal_probs(cpm);
  std::map<int, double> out;
  for (int n = 0; n < p.cols(); ++n) {
    const double w = sigma(n, n).real();
    if (w == 0.0) continue;
    for (int m = 0; m < p.rows(); ++m)
      if (p(m, n) != 0.0) out[n - m] += p(m, n) * w;
  }
  return out;
}

double decoupling_check(const CPM& cpm, const RVec& energies, const std::vector<int>& inputs) {
  const int din = cpm.in_space().dim(), dout = cpm.out_space().dim();
  if (energies.size() != din || din != dout) throw Error(ErrorKind::Space, "energies do not match the map");
  std::vector<double> sorted(energies.data(), energies.data() + energies.size());
  std::sort(sorted.begin(), sorted.end());
  for (std::size_t k = 1; k < sorted.size(); ++k)
    if (sorted[k] - sorted[k - 1] < 1e-12) throw Error(ErrorKind::Precondition, "reservoir spectrum is degenerate");
  std::vector<int> idx = inputs;
  if (idx.empty())
    for (int n = 0; n < din; ++n) idx.push_back(n);
  const double tol = 1e-9 * std::max(1.0, energies.cwiseAbs().maxCoeff());
  double worst = 0.0;
  for (int n : idx)
    for (int n2 : idx) {
      const Mat out = apply_unit(cpm, n, n2);
      for (int m = 0; m < dout; ++m)
        for (int m2 = 0; m2 < dout; ++m2)
          if (std::abs((energies(m) - energies(n)) - (energies(m2) - energies(n2))) > tol)
            worst = std::max(worst, std::abs(out(m, m2)));
    }
  return worst;
}

double reconstruction_residual(const CPM& cpm, const LadderSpec& spec, int lo, int hi, int span) {
  if (!spec.contains(lo - span) || !spec.contains(hi + span))
    throw Error(ErrorKind::Precondition, "reconstruction window too close to the ladder edge");
  const Eigen::MatrixXd p = diagonal_probs(cpm);
  const int ref = spec.index((lo + hi) / 2);
  double worst = 0.0;
  for (int n = lo; n <= hi; ++n)
    for (int n2 = lo; n2 <= hi; ++n2) {
      Mat rebuilt = Mat::Zero(spec.size(), spec.size());
      for (int k = -span; k <= span; ++k)
        rebuilt(spec.index(n + k), spec.index(n2 + k)) = p(ref + k, ref);
      worst = std::max(worst, trace_norm(Mat(rebuilt - apply_unit(cpm, spec.index(n), spec.index(n2)))));
    }
  return worst;
}

}  // namespace qfr
