#include "qfr/verifier.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace qfr {

namespace {

void require_same_reservoir(const CPM& a, const CPM& b) {
  if (a.in_space() != b.out_space() || a.out_space() != b.in_space())
    throw Error(ErrorKind::Space, "forward and reverse maps must act between the same reservoir spaces");
}

double entropy(const std::vector<double>& p) {
  double s = 0.0;
  for (double x : p)
    if (x > 0) s -= x * std::log(x);
  return s;
}

std::vector<double> gibbs_weights(const std::vector<int>& z, double s, double beta) {
  std::vector<double> w(z.size());
  double zsum = 0.0;
  for (std::size_t k = 0; k < z.size(); ++k) zsum += (w[k] = std::exp(-beta * s * z[k]));
  for (double& x : w) x /= zsum;
  return w;
}

double partition_sum(const std::vector<int>& z, double s, double beta) {
  double acc = 0.0;
  for (int v : z) acc += std::exp(-beta * s * v);
  return acc;
}

// Blocks j that receive weight from sigma: j - z_n in the support of sigma for some n.
std::vector<std::vector<double>> block_weights(const std::vector<int>& z_i, const std::vector<double>& gi,
                                               const std::vector<double>& sigma, int offset) {
  std::vector<std::vector<double>> out;
  const int zlo = *std::min_element(z_i.begin(), z_i.end()), zhi = *std::max_element(z_i.begin(), z_i.end());
  const int slo = offset, shi = offset + static_cast<int>(sigma.size()) - 1;
  for (int j = slo + zlo; j <= shi + zhi; ++j) {
    std::vector<double> w(z_i.size(), 0.0);
    bool any = false;
    for (std::size_t n = 0; n < z_i.size(); ++n) {
      const int k = j - z_i[n] - offset;
      if (k >= 0 && k < static_cast<int>(sigma.size()) && sigma[k] != 0.0) {
        w[n] = sigma[k] * gi[n];
        any = true;
      }
    }
    if (any) out.push_back(std::move(w));
  }
  return out;
}

void check_violation_inputs(const std::vector<int>& z_i, const std::vector<int>& z_f, double s, double beta,
                            const std::vector<double>& sigma) {
  if (z_i.empty() || z_i.size() != z_f.size()) throw Error(ErrorKind::Precondition, "level lists must match in size");
  if (!(s > 0) || !(beta > 0)) throw Error(ErrorKind::Precondition, "spacing and beta must be positive");
  std::vector<int> sorted = z_i;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
    throw Error(ErrorKind::Precondition, "initial Hamiltonian is degenerate");
  if (sigma.empty()) throw Error(ErrorKind::Precondition, "reservoir populations are empty");
}

}  // namespace

CPM crooks_partner(const CrooksScenario& s) {
  require_same_reservoir(s.forward, s.reverse);
  const ThermalContext& out = s.reservoir_out ? *s.reservoir_out : s.reservoir;
  const CPM rev = s.use_ominus ? ominus(s.reverse, s.reversal, s.reversal) : conjugate_cpm(s.reverse);
  CPM partner = compose(out.j_cpm(Direction::Forward), compose(rev, s.reservoir.j_cpm(Direction::Inverse)));
  if (s.input_window.size()) partner = restrict_input(partner, s.input_window, TensorSpace{{"window", static_cast<int>(s.input_window.cols())}});
  return partner;
}

CrooksResult crooks_residual(const CrooksScenario& s) {
  if (!(s.z_i > 0) || !(s.z_f > 0)) throw Error(ErrorKind::Precondition, "partition values must be positive");
  const CPM partner = crooks_partner(s);
  const CPM fwd = s.input_window.size()
                      ? restrict_input(s.forward, s.input_window,
                                       TensorSpace{{"window", static_cast<int>(s.input_window.cols())}})
                      : s.forward;
  const CpmDistance d = cpm_distance(fwd, s.z_i, partner, s.z_f);
  double scale = 0.0;
  for (const auto& k : fwd.kraus()) scale += k.squaredNorm();
  return {d.choi_trace, d.max_entry, s.z_i * scale};
}

double diagonal_crooks_check(const Eigen::MatrixXd& p_fwd, const Eigen::MatrixXd& p_rev, double z_i, double z_f,
                             const RVec& energies, double beta, const std::vector<int>& inputs) {
  if (p_fwd.rows() != p_rev.cols() || p_fwd.cols() != p_rev.rows() || p_fwd.rows() != p_fwd.cols() ||
      energies.size() != p_fwd.rows())
    throw Error(ErrorKind::Space, "probability tables do not share an index set");
  std::vector<int> idx = inputs;
  if (idx.empty()) {
    idx.resize(p_fwd.cols());
    std::iota(idx.begin(), idx.end(), 0);
  }
  double worst = 0.0;
  for (int n : idx)
    for (int m : idx)
      worst = std::max(worst, std::abs(z_i * p_fwd(m, n) -
                                       std::exp(beta * (energies(n) - energies(m))) * z_f * p_rev(n, m)));
  return worst;
}

double offdiagonal_crooks_check(const AmplitudeTable& q_fwd, const AmplitudeTable& q_rev, double z_i, double z_f,
                                const RVec& energies, double beta, const std::vector<int>& inputs) {
  if (q_fwd.delta != q_rev.delta || q_fwd.q.rows() != q_rev.q.cols() || q_fwd.q.cols() != q_rev.q.rows() ||
      energies.size() != q_fwd.q.rows())
    throw Error(ErrorKind::Space, "amplitude tables do not share an index set");
  std::vector<int> idx = inputs;
  if (idx.empty()) {
    idx.resize(q_fwd.q.cols());
    std::iota(idx.begin(), idx.end(), 0);
  }
  double worst = 0.0;
  for (int n : idx)
    for (int m : idx) {
      if (!q_fwd.valid(m, n) || !q_rev.valid(n, m)) continue;
      worst = std::max(worst, std::abs(z_i * q_fwd.q(m, n) -
                                       std::exp(beta * (energies(n) - energies(m))) * z_f * q_rev.q(n, m)));
    }
  return worst;
}

ClassicalCrooksResult classical_crooks_check(const CPM& f_plus, const CPM& f_minus, const LadderSpec& spec,
                                             double beta, double z_i, double z_f, const Mat& sigma) {
  ClassicalCrooksResult r;
  r.p_forward = work_distribution(f_plus, sigma);
  r.p_reverse = work_distribution(f_minus, sigma);
  auto get = [](const std::map<int, double>& m, int k) {
    auto it = m.find(k);
    return it == m.end() ? 0.0 : it->second;
  };
  std::vector<int> keys;
  for (const auto& [k, v] : r.p_forward) keys.push_back(k);
  for (const auto& [k, v] : r.p_reverse) keys.push_back(-k);
  for (int k : keys)
    r.residual = std::max(r.residual, std::abs(z_i * get(r.p_forward, k) -
                                               std::exp(beta * spec.spacing * k) * z_f * get(r.p_reverse, -k)));
  return r;
}

Mat jarzynski_shift(const Mat& rho, const RVec& energies, double r, cplx z) {
  Mat out = rho;
  for (int a = 0; a < rho.rows(); ++a)
    for (int b = 0; b < rho.cols(); ++b)
      out(a, b) *= std::exp((r + z) * energies(a) / 2.0) * std::exp((r - z) * energies(b) / 2.0);
  return out;
}

JarzynskiResult jarzynski_check(const CPM& f_plus, const Mat& r_plus_unit, const RVec& energies, double beta,
                                double z_i, double z_f, const Mat& rho, double r, cplx z) {
  const int d = static_cast<int>(energies.size());
  if (rho.rows() != d || r_plus_unit.rows() != d || f_plus.in_space().dim() != d)
    throw Error(ErrorKind::Space, "Jarzynski inputs do not match the reservoir");
  Mat x = rho;
  for (int a = 0; a < d; ++a)
    for (int b = 0; b < d; ++b)
      x(a, b) *= std::exp((-beta + r + z) * energies(a) / 2.0) * std::exp((-beta + r - z) * energies(b) / 2.0);
  const Mat out = f_plus.apply(x);
  JarzynskiResult res;
  for (int m = 0; m < d; ++m) res.lhs += std::exp(beta * energies(m)) * out(m, m);
  cplx acc = 0.0;
  for (int a = 0; a < d; ++a)
    for (int b = 0; b < d; ++b)
      acc += std::exp(r * energies(a) / 2) * r_plus_unit(a, b) * std::exp(r * energies(b) / 2) * rho(b, a);
  res.rhs = z_f / z_i * acc;
  res.residual = std::abs(res.lhs - res.rhs);
  return res;
}

JarzynskiResult classical_jarzynski_check(const CPM& f_plus, const LadderSpec& spec, double beta, double z_i,
                                          double z_f, const Mat& sigma) {
  JarzynskiResult res;
  for (const auto& [k, p] : work_distribution(f_plus, sigma)) res.lhs += std::exp(-beta * spec.spacing * k) * p;
  res.rhs = z_f / z_i * sigma.trace().real();
  res.residual = std::abs(res.lhs - res.rhs);
  return res;
}

WorkBoundResult work_bound_check(const CPM& f_plus, const CPM& r_plus, const RVec& energies, double beta, double z_i,
                                 double z_f, const Mat& sigma) {
  if (!(beta > 0)) throw Error(ErrorKind::Precondition, "work bound needs a positive beta");
  const Mat h = energies.cast<cplx>().asDiagonal();
  WorkBoundResult w;
  w.energy_drop = (h * sigma).trace().real() - (h * f_plus.apply(sigma)).trace().real();
  w.free_energy_delta = -std::log(z_f / z_i) / beta;
  const Mat r1 = r_plus.apply(Mat::Identity(sigma.rows(), sigma.cols()));
  const double overlap = (sigma * r1).trace().real();
  if (!(overlap > 0)) throw Error(ErrorKind::Numerical, "Tr(sigma R(1)) is not positive");
  w.correction_term = -std::log(overlap) / beta;
  w.standard_slack = w.energy_drop - w.free_energy_delta;
  w.slack = w.standard_slack - w.correction_term;
  return w;
}

ViolationResult violation_minimizer(const std::vector<int>& z_i, const std::vector<int>& z_f, double s, double beta,
                                    const std::vector<double>& sigma_diag, int sigma_offset) {
  check_violation_inputs(z_i, z_f, s, beta, sigma_diag);
  const std::vector<double> gi = gibbs_weights(z_i, s, beta), gf = gibbs_weights(z_f, s, beta);
  std::vector<double> lf = gf;
  std::sort(lf.begin(), lf.end(), std::greater<>());
  double pairing = 0.0;
  for (auto w : block_weights(z_i, gi, sigma_diag, sigma_offset)) {
    std::sort(w.begin(), w.end(), std::greater<>());
    for (std::size_t m = 0; m < w.size(); ++m) pairing += w[m] * std::log(lf[m]);
  }
  ViolationResult r;
  r.free_energy_delta = -std::log(partition_sum(z_f, s, beta) / partition_sum(z_i, s, beta)) / beta;
  r.min_energy_cost = r.free_energy_delta - (entropy(gi) + pairing) / beta;
  r.gap = r.free_energy_delta - r.min_energy_cost;
  // Equal-spacing example 0, 1, ..., K on both sides.
  bool ladder = true;
  for (std::size_t k = 0; k < z_i.size(); ++k) ladder = ladder && z_i[k] == static_cast<int>(k) && z_f[k] == z_i[k];
  r.closed_form_gap = ladder ? violation_closed_form(static_cast<int>(z_i.size()) - 1, s, beta)
                             : std::numeric_limits<double>::quiet_NaN();
  return r;
}

double violation_brute_force(const std::vector<int>& z_i, const std::vector<int>& z_f, double s, double beta,
                             const std::vector<double>& sigma_diag, int sigma_offset) {
  check_violation_inputs(z_i, z_f, s, beta, sigma_diag);
  if (z_i.size() > 8) throw Error(ErrorKind::Precondition, "brute force is limited to 8 levels");
  const std::vector<double> gi = gibbs_weights(z_i, s, beta), gf = gibbs_weights(z_f, s, beta);
  double total = 0.0;
  for (const auto& w : block_weights(z_i, gi, sigma_diag, sigma_offset)) {
    std::vector<int> perm(w.size());
    std::iota(perm.begin(), perm.end(), 0);
    double best = -std::numeric_limits<double>::infinity();
    do {
      double acc = 0.0;
      for (std::size_t n = 0; n < w.size(); ++n) acc += w[n] * std::log(gf[perm[n]]);
      best = std::max(best, acc);
    } while (std::next_permutation(perm.begin(), perm.end()));
    total += best;
  }
  const double df = -std::log(partition_sum(z_f, s, beta) / partition_sum(z_i, s, beta)) / beta;
  return df - (entropy(gi) + total) / beta;
}

double violation_closed_form(int k_max, double s, double beta) {
  const double x = s * beta, k1 = k_max + 1.0;
  return (x * std::exp(-x) / (1 - std::exp(-x)) - x * k1 * std::exp(-x * k1) / (1 - std::exp(-x * k1))) / beta;
}

double global_invariance_check(const Operator& h, const Operator& v, const TimeReversal& t, const Operator& q_i,
                               const Operator& q_f, double beta) {
  if (h.space() != v.space() || t.space() != h.space() || q_i.space() != h.space() || q_f.space() != h.space())
    throw Error(ErrorKind::Space, "global invariance inputs live on different spaces");
  const Mat& hm = h.matrix();
  const Mat& vm = v.matrix();
  const double hn = std::max(1.0, operator_norm(hm));
  if (max_abs(Mat(hm * vm - vm * hm)) > 1e-9 * hn) throw Error(ErrorKind::Precondition, "V does not conserve energy");
  if (max_abs(Mat(t.apply(hm) - hm)) > 1e-9 * hn) throw Error(ErrorKind::Precondition, "H is not time-reversal invariant");
  if (max_abs(Mat(t.apply(vm) - vm)) > 1e-9) throw Error(ErrorKind::Precondition, "V is not time-reversal invariant");
  const ThermalContext ctx(beta, h);
  const Mat fwd = q_f.matrix() * vm * ctx.j_map(q_i.matrix()) * vm.adjoint();
  const Mat rev = t.apply(q_i.matrix()) * vm * ctx.j_map(Mat(t.apply(q_f.matrix()))) * vm.adjoint();
  return std::abs(fwd.trace() - rev.trace());
}

double transition_probability(const CPM& f, const ThermalContext& ctx, const Mat& q_i, const Mat& q_f) {
  if (!is_effect(q_i, 1e-9) || !is_effect(q_f, 1e-9)) throw Error(ErrorKind::Precondition, "measurement operators must be effects");
  return (q_f * f.apply(ctx.gibbs(q_i))).trace().real();
}

double transition_probability(const Operator& v, const ThermalContext& ctx, const Mat& q_i, const Mat& q_f) {
  if (!is_effect(q_i, 1e-9) || !is_effect(q_f, 1e-9)) throw Error(ErrorKind::Precondition, "measurement operators must be effects");
  const Mat& vm = v.matrix();
  return (q_f * vm * ctx.gibbs(q_i) * vm.adjoint()).trace().real();
}

ConditionalJarzynskiResult conditional_jarzynski_check(const CPM& f_plus, const CPM& f_minus, const LadderSpec& spec,
                                                       double beta, double z_i, double z_f,
                                                       const std::vector<Mat>& states) {
  if (states.empty()) throw Error(ErrorKind::Precondition, "need at least one reservoir state");
  ConditionalJarzynskiResult r;
  const Mat& sigma = states.front();
  r.f_plus = f_plus.apply(sigma).trace().real() / sigma.trace().real();
  r.f_minus = f_minus.apply(sigma).trace().real() / sigma.trace().real();
  for (const auto& st : states) {
    const double tr = st.trace().real();
    r.success_spread = std::max(r.success_spread, std::abs(f_plus.apply(st).trace().real() - r.f_plus * tr));
    r.success_spread = std::max(r.success_spread, std::abs(f_minus.apply(st).trace().real() - r.f_minus * tr));
  }
  if (!(r.f_plus > 0)) throw Error(ErrorKind::Numerical, "forward success probability vanishes");
  double acc = 0.0;
  for (const auto& [k, p] : work_distribution(f_plus, sigma)) acc += std::exp(-beta * spec.spacing * k) * p;
  r.lhs = acc / (r.f_plus * sigma.trace().real());
  r.rhs = r.f_minus / r.f_plus * z_f / z_i;
  r.residual = std::abs(r.lhs - r.rhs);
  return r;
}

double detailed_balance_check(const Operator& h1, const Operator& h2, const Operator& v, double beta) {
  const TensorSpace joint = h1.space().concat(h2.space());
  if (v.space() != joint) throw Error(ErrorKind::Space, "V must act on the joint space");
  const Spectrum sp = eig_hermitian(h1.matrix());
  for (int k = 1; k < sp.values.size(); ++k)
    if (sp.values(k) - sp.values(k - 1) < 1e-10) throw Error(ErrorKind::Precondition, "H1 is degenerate");
  const Operator h = tensor_product(h1, Operator::identity(h2.space())) + tensor_product(Operator::identity(h1.space()), h2);
  const Mat& vm = v.matrix();
  if (max_abs(Mat(h.matrix() * vm - vm * h.matrix())) > 1e-9 * std::max(1.0, operator_norm(h)))
    throw Error(ErrorKind::Precondition, "V does not conserve energy");
  const int d1 = h1.space().dim();
  const Mat g2 = ThermalContext(beta, h2).gibbs_state().matrix();
  RVec g1(d1);
  for (int n = 0; n < d1; ++n) g1(n) = std::exp(-beta * (sp.values(n) - sp.values(0)));
  g1 /= g1.sum();
  Eigen::MatrixXd p(d1, d1);
  for (int n = 0; n < d1; ++n) {
    const Mat rho = kron(projector(sp.vectors.col(n)), g2);
    const Mat out = partial_trace(Mat(vm * rho * vm.adjoint()), joint, {h1.space().factors().front().label});
    for (int m = 0; m < d1; ++m) p(m, n) = (sp.vectors.col(m).adjoint() * out * sp.vectors.col(m))(0, 0).real();
  }
  double worst = 0.0;
  for (int n = 0; n < d1; ++n)
    for (int m = 0; m < d1; ++m) worst = std::max(worst, std::abs(p(m, n) * g1(n) - p(n, m) * g1(m)));
  return worst;
}

}  // namespace qfr
