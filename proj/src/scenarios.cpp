#include "qfr/scenarios.hpp"

#include "qfr/models.hpp"
#include "qfr/particle.hpp"
#include "qfr/verifier.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <numbers>

namespace qfr {

namespace {

double num(const Json& p, const char* key) { return p.at(key).get<double>(); }
int integer(const Json& p, const char* key) { return static_cast<int>(p.at(key).get<long long>()); }

LadderSpec ladder_from(const Json& p) { return LadderSpec{1.0, integer(p, "j_min"), integer(p, "j_max")}; }

Mat window_state(const LadderSpec& spec, int lo, int hi, Rng& rng) {
  if (!spec.contains(lo) || !spec.contains(hi) || lo > hi)
    throw Error(ErrorKind::Config, "state window [" + std::to_string(lo) + ", " + std::to_string(hi) +
                                       "] does not fit the ladder");
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

ControlledLadderParams ladder_params(const Json& p) {
  ControlledLadderParams lp;
  lp.ladder = ladder_from(p);
  lp.beta = num(p, "beta");
  lp.seed = static_cast<unsigned>(p.at("seed").get<long long>());
  return lp;
}

// Checks every entry of a ladder must leave room for states around level 0.
void require_interior(const ControlledLadderModel& m, int lo, int hi) {
  auto [a, b] = m.interior(m.span());
  if (lo < a || hi > b)
    throw Error(ErrorKind::Config, "ladder too short: states need [" + std::to_string(lo) + ", " +
                                       std::to_string(hi) + "] inside the interior [" + std::to_string(a) + ", " +
                                       std::to_string(b) + "]");
}

// ---------------------------------------------------------------------------

void run_two_qubit(const Json& p, ScenarioReport& r) {
  const double theta = num(p, "theta"), beta = num(p, "beta"), s = num(p, "s"), tol = num(p, "tol");
  TwoQubitModel m = make_two_qubit({theta, beta, s});
  const CrooksResult c =
      crooks_residual({m.forward, m.reverse, m.z_i, m.z_f, m.reservoir_context(), std::nullopt, m.t_reservoir, Mat{}});
  const RVec e = m.h_reservoir.matrix().diagonal().real();
  r.value("z_i", m.z_i);
  r.value("z_f", m.z_f);
  r.value("decoupling_forward", decoupling_check(m.forward, e));
  r.value("choi_scale", c.scale);
  r.at_most("crooks_residual", c.residual, tol);
  r.at_most("closed_form_forward_00",
            max_abs(Mat(m.forward.apply(matrix_unit(2, 0, 0)) - two_qubit_forward_00(theta, beta, s))), tol);
  r.at_most("closed_form_reverse_01",
            max_abs(Mat(m.reverse.apply(matrix_unit(2, 0, 1)) - two_qubit_reverse_01(theta, beta, s))), tol);
}

void run_ladder_crooks(const Json& p, ScenarioReport& r) {
  const double tol = num(p, "tol"), broken = num(p, "broken_min");
  ControlledLadderParams lp = ladder_params(p);
  double worst = 0.0, decoupling = 0.0;
  const int samples = integer(p, "samples");
  if (samples < 1) throw Error(ErrorKind::Config, "samples must be positive");
  ControlledLadderModel first;
  for (int k = 0; k < samples; ++k) {
    ControlledLadderParams q = lp;
    q.seed = lp.seed + k;
    ControlledLadderModel m = make_controlled_ladder(q);
    worst = std::max(worst, crooks_residual(ladder_scenario(m)).residual);
    decoupling = std::max(decoupling, decoupling_check(m.f_plus, q.ladder.energies()));
    if (k == 0) first = m;
  }
  r.value("levels", lp.ladder.size());
  r.value("span", first.span());
  r.at_most("crooks_residual_max", worst, tol);
  r.at_most("decoupling_unconditional", decoupling, num(p, "tol_decoupling"));

  ControlledLadderParams ap = lp;
  ap.time_symmetric = false;
  ControlledLadderModel asym = make_controlled_ladder(ap);
  CrooksScenario inter = ladder_scenario(asym);
  inter.reverse = asym.r_plus;
  inter.use_ominus = false;
  r.at_most("intermediate_relation", crooks_residual(inter).residual, tol);

  r.at_least("broken_non_symmetric", crooks_residual(ladder_scenario(asym)).residual, broken);
  CrooksScenario wrong_beta = ladder_scenario(first);
  wrong_beta.reservoir = first.reservoir_context().with_beta(1.3 * lp.beta + 0.3);
  r.at_least("broken_wrong_beta", crooks_residual(wrong_beta).residual, broken);
  Rng rng(lp.seed + 1000);
  CrooksScenario not_gibbs = ladder_scenario(first);
  not_gibbs.forward = first.induced(first.v, random_density(first.h_initial.dim(), rng), kInitialPlus);
  r.at_least("broken_non_gibbs", crooks_residual(not_gibbs).residual, broken);
}

void run_ladder_classical(const Json& p, ScenarioReport& r) {
  const double tol = num(p, "tol");
  ControlledLadderModel m = make_controlled_ladder(ladder_params(p));
  const auto& spec = m.params.ladder;
  Rng rng(static_cast<unsigned>(p.at("state_seed").get<long long>()));
  double crooks = 0.0, spread = 0.0;
  std::map<int, double> reference;
  for (int k = 0; k < 3; ++k) {
    const int lo = -4 + k, hi = 4 + k;
    require_interior(m, lo, hi);
    const Mat sigma = window_state(spec, lo, hi, rng);
    const ClassicalCrooksResult c = classical_crooks_check(m.f_plus, m.f_minus, spec, m.params.beta, m.z_i, m.z_f, sigma);
    crooks = std::max(crooks, c.residual);
    const auto dist = work_distribution(m.f_plus, sigma);
    if (k == 0) reference = dist;
    for (const auto& [w, pw] : dist) spread = std::max(spread, std::abs(pw - (reference.count(w) ? reference[w] : 0.0)));
    for (const auto& [w, pw] : reference) spread = std::max(spread, std::abs(pw - (dist.count(w) ? dist.at(w) : 0.0)));
  }
  for (const auto& [w, pw] : reference) r.value("p_forward(" + std::to_string(w) + ")", pw);
  r.at_most("classical_crooks", crooks, tol);
  r.at_most("sigma_independence", spread, num(p, "tol_sigma"));
  auto [lo, hi] = m.interior(m.span());
  const auto idx = window_indices(spec, lo, hi);
  const RVec e = spec.energies();
  r.at_most("diagonal_table",
            diagonal_crooks_check(diagonal_probs(m.f_plus), diagonal_probs(m.f_minus), m.z_i, m.z_f, e, m.params.beta, idx),
            num(p, "tol_tables"));
  double off = 0.0;
  for (int delta = -m.span(); delta <= m.span(); ++delta)
    if (delta != 0)
      off = std::max(off, offdiagonal_crooks_check(offdiag_amplitudes(m.f_plus, delta),
                                                   offdiag_amplitudes(m.f_minus, delta), m.z_i, m.z_f, e,
                                                   m.params.beta, idx));
  r.at_most("offdiagonal_tables", off, num(p, "tol_tables"));
}

void run_jarzynski(const Json& p, ScenarioReport& r) {
  const double tol = num(p, "tol");
  Rng rng(static_cast<unsigned>(p.at("state_seed").get<long long>()));
  for (bool level_dependent : {false, true}) {
    ControlledLadderParams lp = ladder_params(p);
    lp.level_dependent = level_dependent;
    ControlledLadderModel m = make_controlled_ladder(lp);
    const auto& spec = m.params.ladder;
    require_interior(m, -4, 4);
    const RVec e = spec.energies();
    const Mat r1 = m.r_plus.apply(Mat::Identity(spec.size(), spec.size()));
    const Mat rho = window_state(spec, -4, 4, rng);
    double worst = 0.0;
    for (double rr : {-1.0, 0.0, 1.0})
      for (cplx z : {cplx(0.0), cplx(0.5), cplx(0.0, 0.3)})
        worst = std::max(worst, jarzynski_check(m.f_plus, r1, e, lp.beta, m.z_i, m.z_f, rho, rr, z).residual);
    const std::string tag = level_dependent ? "non_unital" : "unital";
    r.at_most("jarzynski_family_" + tag, worst, tol);
    if (!level_dependent) {
      const Mat one = Mat::Identity(spec.size(), spec.size());
      const JarzynskiResult j = jarzynski_check(m.f_plus, one, e, lp.beta, m.z_i, m.z_f, rho, 0.0, 0.0);
      r.value("z_f_over_z_i", m.z_f / m.z_i);
      r.at_most("jarzynski_specialized", j.residual, tol);
      const JarzynskiResult c = classical_jarzynski_check(m.f_plus, spec, lp.beta, m.z_i, m.z_f, rho);
      r.value("classical_lhs", c.lhs.real());
      r.at_most("classical_jarzynski", c.residual, tol);
    } else {
      r.value("r_plus_unit_deviation", max_abs(Mat(r1 - Mat::Identity(spec.size(), spec.size()))));
    }
  }
}

void run_work_bound(const Json& p, ScenarioReport& r) {
  const double tol = num(p, "tol");
  Rng rng(static_cast<unsigned>(p.at("state_seed").get<long long>()));
  for (bool level_dependent : {false, true}) {
    ControlledLadderParams lp = ladder_params(p);
    lp.level_dependent = level_dependent;
    ControlledLadderModel m = make_controlled_ladder(lp);
    const auto& spec = m.params.ladder;
    require_interior(m, -4, 4);
    const Mat sigma = window_state(spec, -4, 4, rng);
    const WorkBoundResult w = work_bound_check(m.f_plus, m.r_plus, spec.energies(), lp.beta, m.z_i, m.z_f, sigma);
    const std::string tag = level_dependent ? "non_unital" : "unital";
    r.value(tag + ".energy_drop", w.energy_drop);
    r.value(tag + ".free_energy_delta", w.free_energy_delta);
    r.value(tag + ".correction_term", w.correction_term);
    r.value(tag + ".standard_slack", w.standard_slack);
    r.at_least(tag + ".slack", w.slack, -tol);
  }
}

void run_violation(const Json& p, ScenarioReport& r) {
  const int k_max = integer(p, "k_max");
  const double s = num(p, "s"), beta = num(p, "beta");
  if (k_max < 1) throw Error(ErrorKind::Config, "k_max must be at least 1");
  double closed = 0.0, brute = 0.0;
  for (int k = 1; k <= k_max; ++k) {
    std::vector<int> z(k + 1);
    for (int j = 0; j <= k; ++j) z[j] = j;
    const ViolationResult v = violation_minimizer(z, z, s, beta);
    closed = std::max(closed, std::abs(v.gap - v.closed_form_gap));
    if (k + 1 <= integer(p, "brute_max_levels"))
      brute = std::max(brute, std::abs(violation_brute_force(z, z, s, beta) - v.min_energy_cost));
    if (k == k_max) {
      r.value("gap", v.gap);
      r.value("closed_form_gap", v.closed_form_gap);
      r.value("min_energy_cost", v.min_energy_cost);
    }
  }
  r.at_most("closed_form_match", closed, num(p, "tol"));
  r.at_most("brute_force_match", brute, num(p, "tol_brute"));

  const int k_ex = integer(p, "explicit_k");
  ViolationModel vm = make_violation_model(k_ex, s, beta);
  const auto& spec = vm.model.params.ladder;
  Mat sigma = Mat::Zero(spec.size(), spec.size());
  sigma(spec.index(0), spec.index(0)) = 1.0;
  const WorkBoundResult w =
      work_bound_check(vm.model.f_plus, vm.model.r_plus, spec.energies(), beta, vm.model.z_i, vm.model.z_f, sigma);
  std::vector<int> z(k_ex + 1);
  for (int j = 0; j <= k_ex; ++j) z[j] = j;
  r.value("explicit.standard_slack", w.standard_slack);
  r.value("explicit.correction_term", w.correction_term);
  r.at_most("explicit_attains_minimum", std::abs(w.energy_drop - violation_minimizer(z, z, s, beta).min_energy_cost),
            num(p, "tol"));
  r.at_least("explicit.slack", w.slack, -1e-10);
}

void run_conditional_ladder(const Json& p, ScenarioReport& r) {
  const double tol = num(p, "tol");
  ConditionalLadderParams cp;
  cp.ladder = ladder_from(p);
  cp.beta = num(p, "beta");
  cp.seed = static_cast<unsigned>(p.at("seed").get<long long>());
  cp.diagonal_effects = p.at("diagonal_effects").get<bool>();
  ConditionalLadderModel c = make_conditional_ladder(cp);
  const auto& spec = c.params.ladder;
  r.value("z_i", c.z_i);
  r.value("z_f", c.z_f);
  r.at_most("crooks_residual",
            crooks_residual({c.f_plus, c.f_minus, c.z_i, c.z_f, c.reservoir_context(), std::nullopt, c.t_reservoir, Mat{}})
                .residual,
            tol);
  if (cp.diagonal_effects) {
    Rng rng(static_cast<unsigned>(p.at("state_seed").get<long long>()));
    std::vector<Mat> states{window_state(spec, -3, 3, rng), window_state(spec, -1, 4, rng),
                            window_state(spec, -4, 0, rng)};
    const ConditionalJarzynskiResult j =
        conditional_jarzynski_check(c.f_plus, c.f_minus, spec, cp.beta, c.z_i, c.z_f, states);
    r.value("success_forward", j.f_plus);
    r.value("success_reverse", j.f_minus);
    r.at_most("conditional_jarzynski", j.residual, tol);
    r.at_most("success_spread", j.success_spread, 1e-12);
    r.at_most("classical_crooks",
              classical_crooks_check(c.f_plus, c.f_minus, spec, cp.beta, c.z_i, c.z_f, states[0]).residual, tol);
  }
}

void run_precorrelated(const Json& p, ScenarioReport& r) {
  PrecorrelatedParams pp;
  pp.beta = num(p, "beta");
  pp.seed = static_cast<unsigned>(p.at("seed").get<long long>());
  PrecorrelatedModel m = make_precorrelated(pp);
  const CrooksResult c =
      crooks_residual({m.f_plus, m.f_minus, 1.0, 1.0, m.initial_context(), m.final_context(), m.t_se, Mat{}});
  r.value("choi_scale", c.scale);
  r.at_most("crooks_residual", c.residual, num(p, "tol"));
}

H3Params h3_params(const Json& p) {
  H3Params h;
  h.model.kappa = num(p, "kappa");
  h.model.scheme = parse_kinetic_scheme(p.at("scheme").get<std::string>());
  h.grid = {num(p, "y_min"), num(p, "y_max"), integer(p, "n_points")};
  h.beta = num(p, "beta");
  h.time = num(p, "time");
  h.sigma = num(p, "sigma");
  h.alpha_i = {num(p, "alpha_i_re"), num(p, "alpha_im")};
  h.alpha_f = {num(p, "alpha_f_re"), num(p, "alpha_im")};
  return h;
}

void run_particle_h3(const Json& p, ScenarioReport& r) {
  const H3Params h = h3_params(p);
  const H3Result res = run_h3(h);
  r.value("p_plus", res.p_plus);
  r.value("p_minus", res.p_minus);
  r.value("z_i", res.z_i);
  r.value("z_f", res.z_f);
  r.value("weighted_plus", res.z_i * res.p_plus);
  r.value("weighted_minus", res.z_f * res.p_minus);
  r.value("residual", res.residual);
  r.value("relative_residual", res.relative_residual);
  r.value("deficit_i", res.deficit_i);
  r.value("deficit_f", res.deficit_f);
  r.value("bound", res.bound);
  r.at_most("residual", res.residual, num(p, "tol_residual"));
  r.at_most("residual_minus_bound", res.residual - res.bound, 0.0);
  r.at_most("wall_probability", res.wall_probability, num(p, "tol_wall"));
  r.at_most("unitarity_defect", res.unitarity_defect, 1e-11);
  r.at_most("commutator_defect", res.commutator_defect, 1e-11);
  if (p.at("curves").get<bool>()) {
    Table t{{"r", "deficit_i", "deficit_f", "deficit_local"}, {}};
    for (const DeficitPoint& d : deficit_curves(h, -10.0, 10.0, integer(p, "curve_points")))
      t.rows.push_back({d.r, d.deficit_i, d.deficit_f, d.deficit_local});
    r.tables["deficit_curves"] = t;
  }
}

void run_approx(const Json& p, ScenarioReport& r) {
  ApproxConditionalParams a;
  a.grid = {num(p, "y_min"), num(p, "y_max"), integer(p, "n_points")};
  a.kappa = num(p, "kappa");
  a.beta = num(p, "beta");
  a.time = num(p, "time");
  a.sigma = num(p, "sigma");
  a.coupling = num(p, "coupling");
  a.x_i = num(p, "x_i");
  a.x_f = num(p, "x_f");
  a.alpha_i = {num(p, "alpha_i_re"), num(p, "alpha_im")};
  a.alpha_f = {num(p, "alpha_f_re"), num(p, "alpha_im")};
  a.bloch_steps = integer(p, "bloch_steps");
  const ApproxConditionalResult res = run_approx_conditional(a);
  r.value("z_i", res.z_i);
  r.value("z_f", res.z_f);
  r.value("diff", res.diff);
  r.value("choi_distance", res.choi_distance);
  r.value("d_i_lower", res.d_i);
  r.value("d_f_lower", res.d_f);
  r.value("bound", res.bound);
  r.value("overlap", res.overlap);
  r.value("overlap_warning", res.overlap_warning ? 1.0 : 0.0);
  r.at_most("diff_minus_bound", res.diff - res.bound, 0.0);
}

void run_detailed_balance(const Json& p, ScenarioReport& r) {
  const double beta = num(p, "beta"), tol = num(p, "tol");
  TwoQubitModel tq = make_two_qubit({num(p, "theta"), beta});
  r.at_most("resonant_qubits", detailed_balance_check(tq.h_system, tq.h_reservoir, tq.v, beta), tol);
  const int d = integer(p, "d");
  ResonantModel sym = make_resonant(d, 1.0, true, static_cast<unsigned>(p.at("seed").get<long long>()));
  r.at_most("resonant_symmetric", detailed_balance_check(sym.h1, sym.h2, sym.v, beta), tol);
  ResonantModel broken = make_resonant(d, 1.0, false, static_cast<unsigned>(p.at("seed").get<long long>()) + 2);
  r.at_least("broken_non_symmetric", detailed_balance_check(broken.h1, broken.h2, broken.v, beta),
             num(p, "broken_min"));
}

void run_petz(const Json& p, ScenarioReport& r) {
  ControlledLadderParams lp = ladder_params(p);
  lp.time_symmetric = p.at("time_symmetric").get<bool>();
  ControlledLadderModel m = make_controlled_ladder(lp);
  const auto& spec = m.params.ladder;
  const Mat ref = m.reservoir_context().j_map(Mat(Mat::Identity(spec.size(), spec.size())));
  auto [lo, hi] = m.interior(2 * m.span());
  if (lo > hi) throw Error(ErrorKind::Config, "ladder too short for the Petz window");
  const Mat iso = window_isometry(spec, lo, hi);
  const TensorSpace w{{"w", hi - lo + 1}};
  r.value("window_lo", lo);
  r.value("window_hi", hi);
  r.at_most("petz_vs_forward",
            cpm_distance(restrict_input(petz_recovery(m.r_plus, ref), iso, w), restrict_input(m.f_plus, iso, w))
                .choi_trace,
            num(p, "tol"));
}

std::vector<ParamSpec> ladder_keys(int j_min, int j_max, double beta, long long seed) {
  return {{"j_min", j_min, "lowest ladder level"},
          {"j_max", j_max, "highest ladder level"},
          {"beta", beta, "inverse temperature (ladder spacing s = 1)"},
          {"seed", seed, "seed for the random energy-conserving blocks"}};
}

template <class... P>
std::vector<ParamSpec> join(std::vector<ParamSpec> a, P... more) {
  (a.insert(a.end(), more.begin(), more.end()), ...);
  return a;
}

std::vector<ScenarioSpec> build_registry() {
  using V = std::vector<ParamSpec>;
  const V particle_common{{"kappa", 0.1, "hbar^2 / (M E0 y0^2)"},
                          {"beta", 1.0, "beta E0"},
                          {"time", 21.5, "t E0 / hbar"},
                          {"sigma", 0.5, "coherent-state width in units of y0"},
                          {"alpha_im", 2.0, "imaginary part of both coherent-state labels"}};
  return {
      {"two_qubit", "resonant qubit pair, conditional maps with off-diagonal effects",
       {{"theta", 0.7, "mixing angle of the resonant block"},
        {"beta", 1.0, "inverse temperature"},
        {"s", 1.0, "level spacing"},
        {"tol", 1e-12, "tolerance for the exact identities"}},
       run_two_qubit},
      {"ladder_crooks", "quantum Crooks relation on the controlled energy ladder, plus broken probes",
       join(ladder_keys(-20, 20, 1.0, 1), V{{"samples", 10, "number of random T-symmetric unitaries"},
                                            {"tol", 1e-10, "tolerance for exact relations"},
                                            {"tol_decoupling", 1e-12, "tolerance for mode decoupling"},
                                            {"broken_min", 1e-3, "minimum residual expected from broken probes"}}),
       run_ladder_crooks},
      {"ladder_classical", "classical Crooks relation and sigma-independence on the translation-invariant ladder",
       join(ladder_keys(-20, 20, 1.0, 1), V{{"state_seed", 52, "seed for the interior input states"},
                                            {"tol", 1e-10, "tolerance for the classical relation"},
                                            {"tol_sigma", 1e-12, "tolerance for sigma-independence"},
                                            {"tol_tables", 1e-11, "tolerance for the transition tables"}}),
       run_ladder_classical},
      {"jarzynski_family", "Jarzynski family over r and z on unital and non-unital ladders",
       join(ladder_keys(-20, 20, 1.0, 1),
            V{{"state_seed", 53, "seed for the input state"}, {"tol", 1e-10, "tolerance"}}),
       run_jarzynski},
      {"work_bound", "corrected work bound on unital and non-unital ladders",
       join(ladder_keys(-20, 20, 1.0, 1),
            V{{"state_seed", 54, "seed for the input state"}, {"tol", 1e-10, "allowed negative slack"}}),
       run_work_bound},
      {"violation", "violation of the standard bound without the unitality correction",
       {{"k_max", 8, "largest K for the closed-form comparison"},
        {"s", 1.0, "level spacing"},
        {"beta", 1.0, "inverse temperature"},
        {"brute_max_levels", 4, "largest level count checked by permutation enumeration"},
        {"explicit_k", 4, "K for the explicit minimizing model"},
        {"tol", 1e-12, "tolerance for the closed form"},
        {"tol_brute", 1e-14, "tolerance for the brute-force comparison"}},
       run_violation},
      {"conditional_ladder", "conditional Crooks and Jarzynski relations with imperfect control",
       join(ladder_keys(-12, 12, 1.0, 3), V{{"diagonal_effects", true, "diagonal control effects"},
                                            {"state_seed", 57, "seed for the input states"},
                                            {"tol", 1e-10, "tolerance"}}),
       run_conditional_ladder},
      {"precorrelated_se", "Crooks relation for an initially correlated system and reservoir",
       {{"beta", 0.8, "inverse temperature"}, {"seed", 5, "seed for the energy blocks"}, {"tol", 1e-10, "tolerance"}},
       run_precorrelated},
      {"particle_h3", "spin-half particle as joint control and reservoir; approximate relation and deficit curves",
       join(V{{"scheme", "fd5", "kinetic discretization: fd3, fd5 or sine"},
              {"n_points", 512, "grid points"},
              {"y_min", -18.0, "left wall (units of y0)"},
              {"y_max", 18.0, "right wall (units of y0)"},
              {"alpha_i_re", -4.0, "real part of alpha_i"},
              {"alpha_f_re", 4.0, "real part of alpha_f"}},
            particle_common,
            V{{"curves", true, "emit the deficit curves table"},
              {"curve_points", 81, "points on r in [-10, 10]"},
              {"tol_residual", 1e-6, "tolerance on |Z_i P+ - Z_f P-|"},
              {"tol_wall", 1e-8, "tolerance on the weight next to the walls"}}),
       run_particle_h3},
      {"approx_conditional", "control particle with separate system and reservoir qubits",
       join(V{{"n_points", 192, "grid points"},
              {"y_min", -12.0, "left wall"},
              {"y_max", 12.0, "right wall"},
              {"coupling", 1.0, "scale of every position dependence of H_S'E(x)"},
              {"x_i", -1.0, "start of the interaction region"},
              {"x_f", 1.0, "end of the interaction region"},
              {"alpha_i_re", -4.0, "real part of the initial control label"},
              {"alpha_f_re", 4.0, "real part of the final control label"},
              {"bloch_steps", 12, "resolution of the qubit effect family"}},
            particle_common),
       run_approx},
      {"detailed_balance", "detailed balance for resonant pairs, broken without time-reversal symmetry",
       {{"beta", 1.0, "inverse temperature"},
        {"theta", 0.7, "mixing angle of the qubit pair"},
        {"d", 3, "local dimension of the resonant pair"},
        {"seed", 2, "seed for the symmetric blocks (broken probe uses seed + 2)"},
        {"tol", 1e-12, "tolerance"},
        {"broken_min", 1e-3, "minimum violation expected from the broken probe"}},
       run_detailed_balance},
      {"petz", "Petz recovery of the reverse map equals the forward map",
       join(ladder_keys(-12, 12, 0.5, 1),
            V{{"time_symmetric", false, "draw T-symmetric blocks"}, {"tol", 1e-10, "tolerance"}}),
       run_petz},
  };
}

Json coerce(const ParamSpec& spec, const Json& value, const std::string& scenario) {
  const Json& d = spec.default_value;
  auto fail = [&] {
    throw Error(ErrorKind::Config, "parameter '" + spec.key + "' of " + scenario + " expects " +
                                       std::string(d.type_name()) + ", got " + value.dump());
  };
  if (d.is_boolean()) {
    if (!value.is_boolean()) fail();
  } else if (d.is_number_integer()) {
    if (value.is_number_integer()) return value;
    if (value.is_number_float() && std::floor(value.get<double>()) == value.get<double>())
      return static_cast<long long>(value.get<double>());
    fail();
  } else if (d.is_number()) {
    if (!value.is_number()) fail();
    return value.get<double>();
  } else if (d.is_string()) {
    if (!value.is_string()) fail();
  }
  return value;
}

Json parse_text_value(const ParamSpec& spec, const std::string& text, const std::string& scenario) {
  const Json& d = spec.default_value;
  auto fail = [&] {
    throw Error(ErrorKind::Config, "cannot read '" + text + "' as " + std::string(d.type_name()) +
                                       " for parameter '" + spec.key + "' of " + scenario);
  };
  if (d.is_string()) return text;
  if (d.is_boolean()) {
    if (text == "true" || text == "1") return true;
    if (text == "false" || text == "0") return false;
    fail();
  }
  std::size_t used = 0;
  try {
    if (d.is_number_integer()) {
      const long long v = std::stoll(text, &used);
      if (used == text.size()) return v;
    } else {
      const double v = std::stod(text, &used);
      if (used == text.size()) return v;
    }
  } catch (const std::exception&) {
  }
  fail();
  return {};
}

}  // namespace

const std::vector<ScenarioSpec>& scenario_registry() {
  static const std::vector<ScenarioSpec> registry = build_registry();
  return registry;
}

const ScenarioSpec& find_scenario(const std::string& name) {
  for (const auto& s : scenario_registry())
    if (s.name == name) return s;
  std::string known;
  for (const auto& s : scenario_registry()) known += (known.empty() ? "" : ", ") + s.name;
  throw Error(ErrorKind::Config, "unknown scenario '" + name + "' (known: " + known + ")");
}

std::pair<std::string, std::string> split_assignment(const std::string& text) {
  const auto eq = text.find('=');
  if (eq == std::string::npos || eq == 0) throw Error(ErrorKind::Config, "expected key=value, got '" + text + "'");
  return {text.substr(0, eq), text.substr(eq + 1)};
}

Json load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Config, "cannot open config file '" + path + "'");
  try {
    Json j = Json::parse(in);
    if (!j.is_object()) throw Error(ErrorKind::Config, "config file '" + path + "' must hold a JSON object");
    return j;
  } catch (const Json::parse_error& e) {
    throw Error(ErrorKind::Config, "config file '" + path + "': " + e.what());
  }
}

ScenarioConfig make_config(const std::string& scenario, const Json& file,
                           const std::vector<std::pair<std::string, std::string>>& overrides,
                           std::optional<long long> seed) {
  for (auto it = file.begin(); it != file.end(); ++it)
    if (it.key() != "scenario" && it.key() != "params" && it.key() != "format" && it.key() != "out" &&
        it.key() != "seed")
      throw Error(ErrorKind::Config, "unknown config key '" + it.key() + "'");
  std::string name = scenario;
  if (name.empty()) {
    if (!file.contains("scenario") || !file["scenario"].is_string())
      throw Error(ErrorKind::Config, "no scenario given on the command line or in the config file");
    name = file["scenario"].get<std::string>();
  }
  const ScenarioSpec& spec = find_scenario(name);
  auto lookup = [&](const std::string& key) -> const ParamSpec& {
    for (const auto& ps : spec.params)
      if (ps.key == key) return ps;
    throw Error(ErrorKind::Config, "scenario " + name + " has no parameter '" + key + "'");
  };

  ScenarioConfig c;
  c.scenario = name;
  for (const auto& ps : spec.params) c.params[ps.key] = ps.default_value;
  if (file.contains("params")) {
    if (!file["params"].is_object()) throw Error(ErrorKind::Config, "config 'params' must be an object");
    for (auto it = file["params"].begin(); it != file["params"].end(); ++it)
      c.params[it.key()] = coerce(lookup(it.key()), it.value(), name);
  }
  if (file.contains("format")) c.format = parse_format(file["format"].get<std::string>());
  if (file.contains("out")) c.out_path = file["out"].get<std::string>();
  for (const auto& [key, text] : overrides) c.params[key] = parse_text_value(lookup(key), text, name);
  std::optional<long long> s = seed;
  if (!s && file.contains("seed")) s = file["seed"].get<long long>();
  if (s && c.params.contains("seed")) c.params["seed"] = *s;
  return c;
}

ScenarioReport run_scenario(const ScenarioConfig& config) {
  const ScenarioSpec& spec = find_scenario(config.scenario);
  ScenarioReport r;
  r.scenario = spec.name;
  r.parameters = config.params;
  const auto t0 = std::chrono::steady_clock::now();
  spec.run(config.params, r);
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  r.require_finite();
  return r;
}

}  // namespace qfr
