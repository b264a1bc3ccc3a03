#include "qfr/models.hpp"

#include <cmath>
#include <map>

namespace qfr {

namespace {

Mat unit_vector_projector(int d, int i) { return matrix_unit(d, i, i); }

Mat real_to_complex(const Eigen::MatrixXd& m) { return m.cast<cplx>(); }

Mat diag_levels(const std::vector<int>& z, double s) {
  RVec d(static_cast<int>(z.size()));
  for (std::size_t k = 0; k < z.size(); ++k) d(static_cast<int>(k)) = s * z[k];
  return d.cast<cplx>().asDiagonal();
}

double boltzmann_sum(const std::vector<int>& z, double s, double beta) {
  double acc = 0.0;
  for (int v : z) acc += std::exp(-beta * s * v);
  return acc;
}

}  // namespace

Mat control_swap() {
  Mat y = Mat::Zero(4, 4);
  y(kInitialPlus, kInitialMinus) = y(kInitialMinus, kInitialPlus) = 1.0;
  y(kFinalPlus, kFinalMinus) = y(kFinalMinus, kFinalPlus) = 1.0;
  return y;
}

ControlBlocks ControlBlocks::symmetric(Mat forward, Mat back) {
  ControlBlocks b;
  b.mirror_forward = forward.transpose();
  b.mirror_back = back.transpose();
  b.forward = std::move(forward);
  b.back = std::move(back);
  return b;
}

Mat assemble_control_unitary(const ControlBlocks& b, int n, const std::function<int(int, int)>& index) {
  for (const Mat* m : {&b.forward, &b.back, &b.mirror_forward, &b.mirror_back})
    if (m->rows() != n || m->cols() != n) throw Error(ErrorKind::Space, "control block has the wrong size");
  Mat u = Mat::Zero(4 * n, 4 * n);
  for (int m = 0; m < n; ++m)
    for (int k = 0; k < n; ++k) {
      u(index(m, kFinalPlus), index(k, kInitialPlus)) = b.forward(m, k);
      u(index(k, kInitialPlus), index(m, kFinalPlus)) = b.back(k, m);
      u(index(k, kInitialMinus), index(m, kFinalMinus)) = b.mirror_forward(k, m);
      u(index(m, kFinalMinus), index(k, kInitialMinus)) = b.mirror_back(m, k);
    }
  return u;
}

// ---------------------------------------------------------------------------

TwoQubitModel make_two_qubit(const TwoQubitParams& p) {
  if (!(p.s > 0)) throw Error(ErrorKind::Config, "two-qubit spacing must be positive");
  TwoQubitModel m;
  m.params = p;
  m.system = TensorSpace{{"S", 2}};
  m.reservoir = TensorSpace{{"E", 2}};
  Mat h = Mat::Zero(2, 2);
  h(0, 0) = -p.s / 2;
  h(1, 1) = p.s / 2;
  m.h_system = Operator(m.system, h);
  m.h_reservoir = Operator(m.reservoir, h);

  const cplx phase = std::polar(1.0, p.chi);
  const double c = std::cos(p.theta), sn = std::sin(p.theta);
  m.u = Mat(2, 2);
  m.u << -std::polar(1.0, -p.delta) * c, sn, sn, std::polar(1.0, p.delta) * c;
  m.u *= phase;

  // Basis order |s, e> -> 2 s + e.
  Mat v = Mat::Zero(4, 4);
  v(0, 0) = std::polar(1.0, p.chi_minus);
  v(3, 3) = std::polar(1.0, p.chi_plus);
  v(1, 1) = m.u(0, 0);
  v(1, 2) = m.u(0, 1);
  v(2, 1) = m.u(1, 0);
  v(2, 2) = m.u(1, 1);
  m.v = Operator(m.system.concat(m.reservoir), v);

  Vec psi(2);
  psi << 1.0 / std::sqrt(2.0), cplx(0.0, 1.0 / std::sqrt(2.0));
  m.t_system = transpose_reversal(m.system);
  m.t_reservoir = transpose_reversal(m.reservoir);
  m.q_i_plus = Operator::identity(m.system);
  m.q_f_plus = Operator(m.system, projector(psi));
  m.q_i_minus = m.t_system.apply(m.q_i_plus);
  m.q_f_minus = m.t_system.apply(m.q_f_plus);

  const ThermalContext ctx(p.beta, m.h_system);
  m.z_i = ctx.partition(m.q_i_plus);
  m.z_f = ctx.partition(m.q_f_plus);
  m.forward = induced_cpm(m.v, ctx.gibbs(m.q_i_plus), m.q_f_plus, {"S"});
  m.reverse = induced_cpm(m.v, ctx.gibbs(m.q_f_minus), m.q_i_minus, {"S"});
  return m;
}

Mat two_qubit_forward_00(double theta, double beta, double s) {
  const double c = std::cos(theta), sn = std::sin(theta);
  const double e = std::exp(-beta * s / 2), ep = std::exp(beta * s / 2), z = e + ep;
  const cplx i(0.0, 1.0);
  Mat out = Mat::Zero(2, 2);
  out(1, 1) = sn * sn * e;
  out(0, 0) = c * c * e + ep;
  out(1, 0) = i * sn * c * e;
  out(0, 1) = -i * sn * c * e;
  return 0.5 / z * out;
}

Mat two_qubit_reverse_01(double theta, double beta, double s) {
  const double c = std::cos(theta), sn = std::sin(theta);
  const double e = std::exp(-beta * s / 2), ep = std::exp(beta * s / 2), z = e + ep;
  const cplx i(0.0, 1.0);
  Mat out = Mat::Zero(2, 2);
  out(0, 1) = e - ep;
  out(1, 1) = i * sn;
  out(0, 0) = -i * sn;
  return c / z * out;
}

CPM two_qubit_kraus_form(double theta, double beta, double s, bool forward) {
  const double c = std::cos(theta), sn = std::sin(theta);
  const double up = std::exp(beta * s / 4), down = std::exp(-beta * s / 4);
  const double norm = 1.0 / std::sqrt(std::exp(beta * s / 2) + std::exp(-beta * s / 2));
  const cplx i(0.0, 1.0);
  const Mat k00 = matrix_unit(2, 0, 0), k11 = matrix_unit(2, 1, 1);
  const Mat k01 = matrix_unit(2, 0, 1), k10 = matrix_unit(2, 1, 0);
  Mat a, b;
  if (forward) {
    a = up / std::sqrt(2.0) * (k00 - c * k11 - i * sn * k01);
    b = down / std::sqrt(2.0) * (k11 + c * k00 + i * sn * k10);
  } else {
    a = up * (k00 - c * k11) - i * sn * down * k10;
    b = down * (k11 + c * k00) + i * sn * up * k01;
  }
  TensorSpace e{{"E", 2}};
  return CPM(e, e, {norm * a, norm * b});
}

// ---------------------------------------------------------------------------

std::pair<int, int> ControlledLadderModel::interior(int margin) const {
  const auto& l = params.ladder;
  if (margin < 0 || l.j_min + margin > l.j_max - margin)
    throw Error(ErrorKind::Precondition, "interior margin leaves no levels");
  return {l.j_min + margin, l.j_max - margin};
}

CPM ControlledLadderModel::induced(const Operator& vv, const Mat& state, Control control) const {
  const TensorSpace& sc = sprime_control.space;
  const Mat env = kron(state, unit_vector_projector(4, control));
  return induced_cpm(vv, Operator(sc, env), Operator::identity(sc), {"S", "C"});
}

ControlledLadderModel make_controlled_ladder(const ControlledLadderParams& p) {
  const int n = static_cast<int>(p.z_initial.size());
  if (n == 0 || static_cast<int>(p.z_final.size()) != n)
    throw Error(ErrorKind::Config, "initial and final level lists must be non-empty and of equal size");
  p.ladder.validate();
  ControlledLadderModel m;
  m.params = p;
  Rng rng(p.seed);
  Mat wi = p.basis_initial.size() ? p.basis_initial : real_to_complex(random_orthogonal(n, rng));
  Mat wf = p.basis_final.size() ? p.basis_final : real_to_complex(random_orthogonal(n, rng));
  if (wi.rows() != n || wf.rows() != n) throw Error(ErrorKind::Space, "eigenbasis size does not match the levels");
  if (max_abs(Mat(wi.imag().cast<cplx>())) > 0 || max_abs(Mat(wf.imag().cast<cplx>())) > 0)
    throw Error(ErrorKind::Precondition, "eigenbases must be real");
  m.params.basis_initial = wi;
  m.params.basis_final = wf;

  TensorSpace sc{{"S", n}, {"C", 4}};
  std::vector<int> z(4 * n);
  Mat basis = Mat::Zero(4 * n, 4 * n);
  for (int k = 0; k < n; ++k)
    for (int c = 0; c < 4; ++c) {
      const bool initial = c == kInitialPlus || c == kInitialMinus;
      z[k * 4 + c] = initial ? p.z_initial[k] : p.z_final[k];
      Vec e = Vec::Zero(4);
      e(c) = 1.0;
      basis.col(k * 4 + c) = kron(Mat((initial ? wi : wf).col(k)), Mat(e));
    }
  m.sprime_control = LevelSystem{sc, z, basis};
  m.h_initial = Operator(TensorSpace{{"S", n}}, wi * diag_levels(p.z_initial, p.ladder.spacing) * wi.adjoint());
  m.h_final = Operator(TensorSpace{{"S", n}}, wf * diag_levels(p.z_final, p.ladder.spacing) * wf.adjoint());
  m.z_i = boltzmann_sum(p.z_initial, p.ladder.spacing, p.beta);
  m.z_f = boltzmann_sum(p.z_final, p.ladder.spacing, p.beta);

  auto draw = [&](Rng& r) {
    Mat a = random_unitary(n, r), b = random_unitary(n, r);
    if (p.time_symmetric) return ControlBlocks::symmetric(a, b);
    ControlBlocks cb{a, b, random_unitary(n, r), random_unitary(n, r)};
    return cb;
  };
  const ControlBlocks fixed = draw(rng);
  auto index = [](int k, int c) { return k * 4 + c; };
  auto u_of_level = [&](int level) -> Mat {
    ControlBlocks b;
    if (p.blocks) {
      b = p.blocks(level);
    } else if (p.level_dependent) {
      Rng r(p.seed * 7919ULL + static_cast<unsigned long long>(level - p.ladder.j_min) * 104729ULL + 1);
      b = draw(r);
    } else {
      b = fixed;
    }
    return basis * assemble_control_unitary(b, n, index) * basis.adjoint();
  };
  m.v = censored_v_of_blocks(u_of_level, m.sprime_control, p.ladder);

  m.t_sc = make_reversal(sc, basis, kron(Mat::Identity(n, n), control_swap()));
  m.t_reservoir = transpose_reversal(p.ladder.space());

  const ThermalContext ci(p.beta, m.h_initial), cf(p.beta, m.h_final);
  const Mat gi = ci.gibbs_state().matrix(), gf = cf.gibbs_state().matrix();
  m.f_plus = m.induced(m.v, gi, kInitialPlus);
  m.f_minus = m.induced(m.v, gf, kFinalMinus);
  const Operator vd = m.v.adjoint();
  m.r_plus = m.induced(vd, gf, kFinalPlus);
  m.r_minus = m.induced(vd, gi, kInitialMinus);
  return m;
}

// ---------------------------------------------------------------------------

double ConditionalLadderModel::success_forward() const {
  const Mat g = system_context().gibbs(q_i_plus.matrix());
  return (q_f_plus.matrix() * u.matrix() * g * u.matrix().adjoint()).trace().real();
}

double ConditionalLadderModel::success_reverse() const {
  const Mat g = system_context().gibbs(q_f_minus.matrix());
  return (q_i_minus.matrix() * u.matrix() * g * u.matrix().adjoint()).trace().real();
}

ConditionalLadderModel make_conditional_ladder(const ConditionalLadderParams& p) {
  const int n = static_cast<int>(p.z.size());
  if (n == 0) throw Error(ErrorKind::Config, "conditional model needs at least one level");
  ConditionalLadderModel m;
  m.params = p;
  m.system = diagonal_level_system("S", p.z);
  m.h_system = m.system.hamiltonian(p.ladder.spacing);
  Rng rng(p.seed);
  m.u = Operator(m.system.space, random_symmetric_unitary(n, rng));
  m.v = censored_v_of_u(m.u, m.system, p.ladder);
  m.t_system = transpose_reversal(m.system.space);
  m.t_reservoir = transpose_reversal(p.ladder.space());

  auto effect = [&]() {
    if (!p.diagonal_effects) return random_effect(n, rng);
    Mat q = Mat::Zero(n, n);
    std::uniform_real_distribution<double> dist(0.2, 1.0);
    for (int k = 0; k < n; ++k) q(k, k) = dist(rng);
    return q;
  };
  m.q_i_plus = Operator(m.system.space, effect());
  m.q_f_plus = Operator(m.system.space, effect());
  m.q_i_minus = m.t_system.apply(m.q_i_plus);
  m.q_f_minus = m.t_system.apply(m.q_f_plus);

  const ThermalContext ctx = m.system_context();
  m.z_i = ctx.partition(m.q_i_plus);
  m.z_f = ctx.partition(m.q_f_plus);
  m.f_plus = induced_cpm(m.v, ctx.gibbs(m.q_i_plus), m.q_f_plus, {"S"});
  m.f_minus = induced_cpm(m.v, ctx.gibbs(m.q_f_minus), m.q_i_minus, {"S"});
  return m;
}

// ---------------------------------------------------------------------------

PrecorrelatedModel make_precorrelated(const PrecorrelatedParams& p) {
  if (p.se_levels.size() != 4) throw Error(ErrorKind::Config, "S (x) E is a pair of qubits: four levels expected");
  const int nb = static_cast<int>(p.bath_levels.size());
  if (nb == 0) throw Error(ErrorKind::Config, "bath needs at least one level");
  PrecorrelatedModel m;
  m.params = p;
  m.se = TensorSpace{{"S", 2}, {"E", 2}};
  Rng rng(p.seed);
  const Mat oi = real_to_complex(random_orthogonal(4, rng));
  const Mat of = real_to_complex(random_orthogonal(4, rng));
  const Mat d = diag_levels(p.se_levels, p.spacing);
  m.h_initial = Operator(m.se, oi * d * oi.adjoint());
  m.h_final = Operator(m.se, of * d * of.adjoint());
  m.h_bath = Operator(TensorSpace{{"B", nb}}, diag_levels(p.bath_levels, p.spacing));

  // Inner index n = b * 4 + k labels |b> (x) |chi_k>; energy bath_b + se_k.
  const int inner = nb * 4;
  std::map<int, std::vector<int>> shells;
  for (int b = 0; b < nb; ++b)
    for (int k = 0; k < 4; ++k) shells[p.bath_levels[b] + p.se_levels[k]].push_back(b * 4 + k);
  Mat fwd = Mat::Zero(inner, inner), back = Mat::Zero(inner, inner);
  for (const auto& [energy, members] : shells) {
    const int sz = static_cast<int>(members.size());
    const Mat a = random_unitary(sz, rng), ab = random_unitary(sz, rng);
    for (int x = 0; x < sz; ++x)
      for (int y = 0; y < sz; ++y) {
        fwd(members[x], members[y]) = a(x, y);
        back(members[x], members[y]) = ab(x, y);
      }
  }
  auto index = [inner](int k, int c) { return c * inner + k; };
  const Mat ub = assemble_control_unitary(ControlBlocks::symmetric(fwd, back), inner, index);

  const TensorSpace global{{"C", 4}, {"B", nb}, {"S", 2}, {"E", 2}};
  Mat basis = Mat::Zero(4 * inner, 4 * inner);
  for (int c = 0; c < 4; ++c) {
    const Mat& o = (c == kInitialPlus || c == kInitialMinus) ? oi : of;
    basis.block(c * inner, c * inner, inner, inner) = kron(Mat::Identity(nb, nb), o);
  }
  m.v = Operator(global, basis * ub * basis.adjoint());
  m.t_se = transpose_reversal(m.se);
  m.t_global = make_reversal(global, Mat::Identity(4 * inner, 4 * inner), kron(control_swap(), Mat::Identity(inner, inner)));

  const ThermalContext bath(p.beta, m.h_bath);
  const TensorSpace cb{{"C", 4}, {"B", nb}};
  const Mat gb = bath.gibbs_state().matrix();
  auto induced = [&](Control c) {
    return induced_cpm(m.v, Operator(cb, kron(unit_vector_projector(4, c), gb)), Operator::identity(cb), {"C", "B"});
  };
  m.f_plus = induced(kInitialPlus);
  m.f_minus = induced(kFinalMinus);
  return m;
}

// ---------------------------------------------------------------------------

ResonantModel make_resonant(int d, double spacing, bool symmetric, unsigned seed) {
  if (d < 2) throw Error(ErrorKind::Config, "resonant model needs at least two levels");
  Rng rng(seed);
  TensorSpace a{{"A", d}}, b{{"B", d}};
  std::vector<int> z(d);
  for (int k = 0; k < d; ++k) z[k] = k;
  const Mat h = diag_levels(z, spacing);
  Mat v = Mat::Zero(d * d, d * d);
  for (int e = 0; e <= 2 * (d - 1); ++e) {
    std::vector<int> members;
    for (int x = 0; x < d; ++x)
      if (e - x >= 0 && e - x < d) members.push_back(x * d + (e - x));
    const int sz = static_cast<int>(members.size());
    const Mat blk = symmetric ? random_symmetric_unitary(sz, rng) : random_unitary(sz, rng);
    for (int x = 0; x < sz; ++x)
      for (int y = 0; y < sz; ++y) v(members[x], members[y]) = blk(x, y);
  }
  const TensorSpace joint = a.concat(b);
  return {Operator(a, h), Operator(b, h), Operator(joint, v), transpose_reversal(joint)};
}

// ---------------------------------------------------------------------------

ViolationModel make_violation_model(int k_max, double s, double beta) {
  if (k_max < 1) throw Error(ErrorKind::Config, "violation model needs K >= 1");
  const int n = k_max + 1;
  ControlledLadderParams p;
  p.ladder = LadderSpec{s, -k_max - 2, k_max + 2};
  p.beta = beta;
  p.z_initial.resize(n);
  for (int k = 0; k < n; ++k) p.z_initial[k] = k;
  p.z_final = p.z_initial;
  p.basis_initial = p.basis_final = Mat::Identity(n, n);
  // At total level l the reservoir sits at |0> only for the system level n = l;
  // sending that level to the ground state hands the reservoir l quanta.
  p.blocks = [n](int level) {
    Mat perm = Mat::Zero(n, n);
    if (level < 0 || level >= n) {
      perm.setIdentity();
    } else {
      for (int k = 0; k < n; ++k) {
        const int to = k == level ? 0 : (k < level ? k + 1 : k);
        perm(to, k) = 1.0;
      }
    }
    return ControlBlocks::symmetric(perm, Mat(perm.transpose()));
  };
  ViolationModel out{make_controlled_ladder(p), n, 0.0};
  return out;
}

}  // namespace qfr
