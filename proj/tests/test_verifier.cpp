#include "doctest.h"

#include "qfr/models.hpp"
#include "qfr/verifier.hpp"

#include <cmath>

using namespace qfr;

namespace {

Mat window_state(const LadderSpec& spec, int lo, int hi, Rng& rng) {
  const Mat iso = window_isometry(spec, lo, hi);
  return iso * random_density(hi - lo + 1, rng) * iso.adjoint();
}

CrooksScenario ladder_scenario(const ControlledLadderModel& m) {
  auto [lo, hi] = m.interior(m.span());
  return {m.f_plus, m.f_minus, m.z_i, m.z_f, m.reservoir_context(), std::nullopt, m.t_reservoir,
          window_isometry(m.params.ladder, lo, hi)};
}

std::vector<int> window_indices(const LadderSpec& spec, int lo, int hi) {
  std::vector<int> out;
  for (int j = lo; j <= hi; ++j) out.push_back(spec.index(j));
  return out;
}

// V = 1 with equal initial and final Hamiltonians.
ControlledLadderModel trivial_model() {
  ControlledLadderParams p;
  p.ladder = LadderSpec{1.0, -8, 8};
  p.z_initial = p.z_final = {0, 1, 2};
  p.basis_initial = p.basis_final = Mat::Identity(3, 3);
  p.blocks = [](int) { return ControlBlocks::symmetric(Mat::Identity(3, 3), Mat::Identity(3, 3)); };
  return make_controlled_ladder(p);
}

}  // namespace

TEST_CASE("Crooks residual on exact scenarios") {
  for (double theta : {0.0, 0.3, 0.7, M_PI / 2}) {
    TwoQubitModel m = make_two_qubit({theta});
    CrooksScenario s{m.forward, m.reverse, m.z_i, m.z_f, m.reservoir_context(), std::nullopt, m.t_reservoir};
    CHECK(crooks_residual(s).residual <= 1e-12);
  }
  ControlledLadderModel m = make_controlled_ladder({});
  CrooksResult r = crooks_residual(ladder_scenario(m));
  CHECK(r.residual <= 1e-10);
  CHECK(r.scale > 1.0);

  PrecorrelatedModel pc = make_precorrelated({});
  CrooksScenario se{pc.f_plus, pc.f_minus, 1.0, 1.0, pc.initial_context(), pc.final_context(), pc.t_se};
  CHECK(crooks_residual(se).residual <= 1e-10);

  ConditionalLadderModel c = make_conditional_ladder({});
  CrooksScenario cs{c.f_plus, c.f_minus, c.z_i, c.z_f, c.reservoir_context(), std::nullopt, c.t_reservoir};
  CHECK(crooks_residual(cs).residual <= 1e-10);
}

TEST_CASE("Crooks residual detects broken assumptions") {
  ControlledLadderParams p;
  p.time_symmetric = false;
  ControlledLadderModel asym = make_controlled_ladder(p);
  CHECK(crooks_residual(ladder_scenario(asym)).residual > 1e-3);
  // The intermediate relation does not need time-reversal symmetry.
  CrooksScenario inter = ladder_scenario(asym);
  inter.reverse = asym.r_plus;
  inter.use_ominus = false;
  CHECK(crooks_residual(inter).residual <= 1e-10);

  ControlledLadderModel m = make_controlled_ladder({});
  CrooksScenario wrong_beta = ladder_scenario(m);
  wrong_beta.reservoir = m.reservoir_context().with_beta(1.3);
  CHECK(crooks_residual(wrong_beta).residual > 1e-3);

  Rng rng(51);
  CrooksScenario not_gibbs = ladder_scenario(m);
  not_gibbs.forward = m.induced(m.v, random_density(3, rng), kInitialPlus);
  CHECK(crooks_residual(not_gibbs).residual > 1e-3);
}

TEST_CASE("diagonal and off-diagonal Crooks tables") {
  ControlledLadderModel m = make_controlled_ladder({});
  const auto& spec = m.params.ladder;
  auto [lo, hi] = m.interior(m.span());
  const auto idx = window_indices(spec, lo, hi);
  const RVec e = spec.energies();
  CHECK(diagonal_crooks_check(diagonal_probs(m.f_plus), diagonal_probs(m.f_minus), m.z_i, m.z_f, e, 1.0, idx) <= 1e-11);
  for (int delta : {-2, 1, 3})
    CHECK(offdiagonal_crooks_check(offdiag_amplitudes(m.f_plus, delta), offdiag_amplitudes(m.f_minus, delta), m.z_i,
                                   m.z_f, e, 1.0, idx) <= 1e-11);

  // beta = 0 with equal level sets: p+(m|n) = p-(n|m).
  ControlledLadderParams p0;
  p0.beta = 0.0;
  p0.z_final = p0.z_initial;
  ControlledLadderModel m0 = make_controlled_ladder(p0);
  const Eigen::MatrixXd a = diagonal_probs(m0.f_plus), b = diagonal_probs(m0.f_minus);
  double worst = 0.0;
  for (int n : idx)
    for (int k : idx) worst = std::max(worst, std::abs(a(k, n) - b(n, k)));
  CHECK(worst <= 1e-12);
  CHECK_THROWS_AS(diagonal_crooks_check(a, Eigen::MatrixXd::Zero(3, 3), 1, 1, e, 1.0), Error);
}

TEST_CASE("classical Crooks and Jarzynski on the translation-invariant model") {
  Rng rng(52);
  ControlledLadderModel m = make_controlled_ladder({});
  const auto& spec = m.params.ladder;
  for (int k = 0; k < 3; ++k) {
    const Mat sigma = window_state(spec, -6 + k, 2 + k, rng);
    CHECK(classical_crooks_check(m.f_plus, m.f_minus, spec, 1.0, m.z_i, m.z_f, sigma).residual <= 1e-10);
    CHECK(classical_jarzynski_check(m.f_plus, spec, 1.0, m.z_i, m.z_f, sigma).residual <= 1e-10);
  }
  // Edge-supported states see the truncation.
  Mat edge = Mat::Zero(spec.size(), spec.size());
  edge(0, 0) = 1.0;
  CHECK(classical_crooks_check(m.f_plus, m.f_minus, spec, 1.0, m.z_i, m.z_f, edge).residual > 1e-3);

  ControlledLadderModel t = trivial_model();
  const auto& ts = t.params.ladder;
  ClassicalCrooksResult cr = classical_crooks_check(t.f_plus, t.f_minus, ts, 1.0, t.z_i, t.z_f, window_state(ts, -2, 2, rng));
  CHECK(cr.residual == 0.0);
  CHECK(cr.p_forward.size() == 1);
  CHECK(std::abs(cr.p_forward[0] - 1.0) <= 1e-14);
}

TEST_CASE("Jarzynski family") {
  Rng rng(53);
  for (bool level_dependent : {false, true}) {
    ControlledLadderParams p;
    p.level_dependent = level_dependent;
    ControlledLadderModel m = make_controlled_ladder(p);
    const auto& spec = m.params.ladder;
    const RVec e = spec.energies();
    const Mat r1 = m.r_plus.apply(Mat::Identity(spec.size(), spec.size()));
    const Mat rho = window_state(spec, -4, 4, rng);
    for (double r : {-1.0, 0.0, 1.0})
      for (cplx z : {cplx(0.0), cplx(0.5), cplx(0.0, 0.3)}) {
        const JarzynskiResult j = jarzynski_check(m.f_plus, r1, e, 1.0, m.z_i, m.z_f, rho, r, z);
        CHECK(j.residual <= 1e-10);
        // (r, z) member equals the (0, 0) member on the transformed input.
        const JarzynskiResult j0 = jarzynski_check(m.f_plus, r1, e, 1.0, m.z_i, m.z_f, jarzynski_shift(rho, e, r, z), 0.0, 0.0);
        CHECK(std::abs(j.lhs - j0.lhs) <= 1e-10 * std::max(1.0, std::abs(j.lhs)));
      }
    if (!level_dependent) {
      // r = z = 0 with R+(1) = 1 on the interior.
      const Mat one = Mat::Identity(spec.size(), spec.size());
      const JarzynskiResult j = jarzynski_check(m.f_plus, one, e, 1.0, m.z_i, m.z_f, rho, 0.0, 0.0);
      CHECK(std::abs(j.rhs - m.z_f / m.z_i) <= 1e-12);
      CHECK(j.residual <= 1e-10);
    }
  }
  ControlledLadderModel t = trivial_model();
  const auto& ts = t.params.ladder;
  const Mat rho = window_state(ts, -2, 2, rng);
  const JarzynskiResult j = jarzynski_check(t.f_plus, Mat::Identity(ts.size(), ts.size()), ts.energies(), 1.0, t.z_i,
                                            t.z_f, rho, 1.0, cplx(0.2, 0.1));
  CHECK(j.residual <= 1e-13);
}

TEST_CASE("work bound") {
  Rng rng(54);
  ControlledLadderModel m = make_controlled_ladder({});
  const auto& spec = m.params.ladder;
  const Mat sigma = window_state(spec, -4, 4, rng);
  WorkBoundResult w = work_bound_check(m.f_plus, m.r_plus, spec.energies(), 1.0, m.z_i, m.z_f, sigma);
  CHECK(std::abs(w.correction_term) <= 1e-12);
  CHECK(w.slack >= -1e-10);

  ControlledLadderParams p;
  p.level_dependent = true;
  ControlledLadderModel nu = make_controlled_ladder(p);
  w = work_bound_check(nu.f_plus, nu.r_plus, spec.energies(), 1.0, nu.z_i, nu.z_f, sigma);
  CHECK(std::abs(w.correction_term) > 1e-4);
  CHECK(w.slack >= -1e-10);

  ControlledLadderModel t = trivial_model();
  const auto& ts = t.params.ladder;
  w = work_bound_check(t.f_plus, t.r_plus, ts.energies(), 1.0, t.z_i, t.z_f, window_state(ts, -2, 2, rng));
  CHECK(std::abs(w.energy_drop) <= 1e-13);
  CHECK(std::abs(w.free_energy_delta) <= 1e-15);
  CHECK(std::abs(w.slack) <= 1e-13);
}

TEST_CASE("violation of the standard bound") {
  for (int k = 1; k <= 8; ++k) {
    std::vector<int> z(k + 1);
    for (int j = 0; j <= k; ++j) z[j] = j;
    const ViolationResult v = violation_minimizer(z, z, 1.0, 1.0);
    CHECK(std::abs(v.gap - v.closed_form_gap) <= 1e-12);
    if (k + 1 <= 4) CHECK(violation_brute_force(z, z, 1.0, 1.0) == doctest::Approx(v.min_energy_cost).epsilon(1e-15));
  }
  // K = 1 by hand.
  const double e1 = std::exp(-1.0), e2 = std::exp(-2.0);
  CHECK(std::abs(violation_closed_form(1, 1.0, 1.0) - (e1 / (1 - e1) - 2 * e2 / (1 - e2))) <= 1e-15);
  // Large-K limit.
  CHECK(std::abs(violation_closed_form(60, 1.0, 1.0) - e1 / (1 - e1)) <= 1e-12);
  CHECK(std::abs(e1 / (1 - e1) - 0.582) < 1e-3);

  // Generic levels and a spread-out reservoir state.
  const std::vector<int> zi{0, 2, 3}, zf{1, 1, 4};
  const std::vector<double> sig{0.2, 0.5, 0.3};
  CHECK(std::abs(violation_brute_force(zi, zf, 0.7, 1.2, sig, -1) - violation_minimizer(zi, zf, 0.7, 1.2, sig, -1).min_energy_cost) <= 1e-13);
  CHECK_THROWS_AS(violation_minimizer({0, 0, 1}, {0, 1, 2}, 1.0, 1.0), Error);

  // The explicit construction attains the minimum and obeys the corrected bound.
  ViolationModel vm = make_violation_model(4, 1.0, 1.0);
  const auto& spec = vm.model.params.ladder;
  Mat sigma = Mat::Zero(spec.size(), spec.size());
  sigma(spec.index(0), spec.index(0)) = 1.0;
  const WorkBoundResult w = work_bound_check(vm.model.f_plus, vm.model.r_plus, spec.energies(), 1.0, vm.model.z_i,
                                             vm.model.z_f, sigma);
  const ViolationResult v = violation_minimizer({0, 1, 2, 3, 4}, {0, 1, 2, 3, 4}, 1.0, 1.0);
  CHECK(std::abs(w.energy_drop - v.min_energy_cost) <= 1e-12);
  CHECK(w.standard_slack < -0.5);
  CHECK(w.slack >= -1e-10);
  const TimeReversal t = product_reversal(vm.model.t_sc, vm.model.t_reservoir);
  CHECK(max_abs(Mat(t.apply(vm.model.v.matrix()) - vm.model.v.matrix())) <= 1e-12);
}

TEST_CASE("global invariance") {
  Rng rng(55);
  ConditionalLadderModel c = make_conditional_ladder({});
  const auto& spec = c.params.ladder;
  const Operator h = tensor_product(c.h_system, Operator::identity(spec.space())) +
                     tensor_product(Operator::identity(c.system.space), spec.hamiltonian());
  const TimeReversal t = product_reversal(c.t_system, c.t_reservoir);
  const Operator one = Operator::identity(h.space());
  CHECK(global_invariance_check(h, c.v, t, one, one, 1.0) <= 1e-12 * ThermalContext(1.0, h).partition());
  // Tr J(Q) reaches e^{15} on this ladder; compare relative to Z(H).
  const double zh = ThermalContext(1.0, h).partition();
  for (int k = 0; k < 3; ++k) {
    Operator qi(h.space(), random_effect(h.space().dim(), rng)), qf(h.space(), random_effect(h.space().dim(), rng));
    CHECK(global_invariance_check(h, c.v, t, qi, qf, 1.0) <= 1e-14 * zh);
  }
  // Absolute bound on a short ladder where the traces are of order one.
  ConditionalLadderParams sp;
  sp.ladder = LadderSpec{1.0, -3, 3};
  sp.z = {0, 1};
  ConditionalLadderModel small = make_conditional_ladder(sp);
  const Operator hs = tensor_product(small.h_system, Operator::identity(sp.ladder.space())) +
                      tensor_product(Operator::identity(small.system.space), sp.ladder.hamiltonian());
  const TimeReversal ts = product_reversal(small.t_system, small.t_reservoir);
  for (int k = 0; k < 3; ++k) {
    Operator qi(hs.space(), random_effect(hs.space().dim(), rng)), qf(hs.space(), random_effect(hs.space().dim(), rng));
    CHECK(global_invariance_check(hs, small.v, ts, qi, qf, 1.0) <= 1e-11);
  }
  // Schrodinger evolution under a real symmetric H.
  TensorSpace q{{"q", 4}};
  Mat hm = random_hermitian(4, rng).real().cast<cplx>();
  Operator hq(q, hm);
  Operator v(q, spectral_apply(eig_hermitian(hm), [](double x) { return std::exp(cplx(0, -2.3 * x)); }));
  Operator qi(q, random_effect(4, rng)), qf(q, random_effect(4, rng));
  CHECK(global_invariance_check(hq, v, transpose_reversal(q), qi, qf, 0.8) <= 1e-12);
  CHECK_THROWS_AS(global_invariance_check(hq, Operator(q, random_unitary(4, rng)), transpose_reversal(q), qi, qf, 0.8), Error);
}

TEST_CASE("transition probabilities") {
  Rng rng(56);
  ControlledLadderModel m = make_controlled_ladder({});
  const auto& spec = m.params.ladder;
  const ThermalContext ctx = m.reservoir_context();
  const Mat iso = window_isometry(spec, -4, 4);
  const Mat qi = iso * random_effect(9, rng) * iso.adjoint(), qf = iso * random_effect(9, rng) * iso.adjoint();
  CHECK(std::abs(transition_probability(m.f_plus, ctx, qi, Mat::Identity(spec.size(), spec.size())) - 1.0) <= 1e-12);
  // z_i Z(Q^i) P+[Q^i -> Q^f] = z_f Z(T Q^f) P-[T Q^f -> T Q^i].
  const Mat tqi = m.t_reservoir.apply(qi), tqf = m.t_reservoir.apply(qf);
  const double lhs = m.z_i * ctx.partition(qi) * transition_probability(m.f_plus, ctx, qi, qf);
  const double rhs = m.z_f * ctx.partition(tqf) * transition_probability(m.f_minus, ctx, tqf, tqi);
  CHECK(std::abs(lhs - rhs) <= 1e-11);
  CHECK_THROWS_AS(transition_probability(m.f_plus, ctx, Mat(2.0 * qi), qf), Error);
}

TEST_CASE("conditional Jarzynski and success probabilities") {
  Rng rng(57);
  ConditionalLadderModel c = make_conditional_ladder({});
  const auto& spec = c.params.ladder;
  std::vector<Mat> states{window_state(spec, -3, 3, rng), window_state(spec, -1, 4, rng), window_state(spec, -4, 0, rng)};
  const ConditionalJarzynskiResult r = conditional_jarzynski_check(c.f_plus, c.f_minus, spec, 1.0, c.z_i, c.z_f, states);
  CHECK(r.residual <= 1e-10);
  CHECK(r.success_spread <= 1e-12);
  CHECK(std::abs(r.f_plus - c.success_forward()) <= 1e-12);
  CHECK(std::abs(r.f_minus - c.success_reverse()) <= 1e-12);
  CHECK(classical_crooks_check(c.f_plus, c.f_minus, spec, 1.0, c.z_i, c.z_f, states[0]).residual <= 1e-10);

  // Identity effects: the unconditional Jarzynski equality.
  ConditionalLadderParams p;
  ConditionalLadderModel u = make_conditional_ladder(p);
  u.q_i_plus = u.q_f_plus = u.q_i_minus = u.q_f_minus = Operator::identity(u.system.space);
  const ThermalContext sctx = u.system_context();
  const CPM fp = induced_cpm(u.v, sctx.gibbs_state(), u.q_f_plus, {"S"});
  const CPM fm = induced_cpm(u.v, sctx.gibbs_state(), u.q_i_minus, {"S"});
  const ConditionalJarzynskiResult ru = conditional_jarzynski_check(fp, fm, spec, 1.0, sctx.partition(), sctx.partition(), states);
  CHECK(std::abs(ru.f_plus - 1.0) <= 1e-12);
  CHECK(std::abs(ru.lhs - 1.0) <= 1e-10);
}

TEST_CASE("detailed balance") {
  ResonantModel trivial = make_resonant(3, 1.0, true, 1);
  trivial.v = Operator::identity(trivial.v.space());
  CHECK(detailed_balance_check(trivial.h1, trivial.h2, trivial.v, 0.9) == 0.0);

  TwoQubitModel tq = make_two_qubit({0.7});
  CHECK(detailed_balance_check(tq.h_system, tq.h_reservoir, tq.v, 1.0) <= 1e-12);
  ResonantModel sym = make_resonant(3, 1.0, true, 2);
  CHECK(detailed_balance_check(sym.h1, sym.h2, sym.v, 0.9) <= 1e-12);
  ResonantModel broken = make_resonant(3, 1.0, false, 4);
  CHECK(detailed_balance_check(broken.h1, broken.h2, broken.v, 0.9) > 1e-3);

  Operator flat(TensorSpace{{"A", 2}}, Mat::Identity(2, 2));
  Operator h2(TensorSpace{{"B", 2}}, Mat::Identity(2, 2));
  CHECK_THROWS_AS(detailed_balance_check(flat, h2, Operator::identity(TensorSpace{{"A", 2}, {"B", 2}}), 1.0), Error);
}

TEST_CASE("two-qubit closed forms") {
  for (double theta : {0.0, 0.3, 0.7, M_PI / 2, 2.1}) {
    TwoQubitModel m = make_two_qubit({theta});
    CHECK(max_abs(Mat(m.forward.apply(matrix_unit(2, 0, 0)) - two_qubit_forward_00(theta, 1.0, 1.0))) <= 1e-12);
    CHECK(max_abs(Mat(m.reverse.apply(matrix_unit(2, 0, 1)) - two_qubit_reverse_01(theta, 1.0, 1.0))) <= 1e-12);
    CHECK(cpm_distance(m.forward, two_qubit_kraus_form(theta, 1.0, 1.0, true)).choi_trace <= 1e-12);
    CHECK(cpm_distance(m.reverse, two_qubit_kraus_form(theta, 1.0, 1.0, false)).choi_trace <= 1e-12);
    const double e = std::exp(1.0 / 2) + std::exp(-1.0 / 2);
    CHECK(std::abs(m.z_i - e) <= 1e-14);
    CHECK(std::abs(m.z_f - e / 2) <= 1e-14);
  }
}

TEST_CASE("Petz recovery reproduces the forward map") {
  ControlledLadderParams p;
  p.ladder = LadderSpec{1.0, -12, 12};
  p.beta = 0.5;
  p.time_symmetric = false;
  ControlledLadderModel m = make_controlled_ladder(p);
  const auto& spec = m.params.ladder;
  const Mat ref = m.reservoir_context().j_map(Mat(Mat::Identity(spec.size(), spec.size())));
  auto [lo, hi] = m.interior(2 * m.span());
  const Mat iso = window_isometry(spec, lo, hi);
  const TensorSpace w{{"w", hi - lo + 1}};
  CHECK(cpm_distance(restrict_input(petz_recovery(m.r_plus, ref), iso, w), restrict_input(m.f_plus, iso, w)).choi_trace <= 1e-10);
}
