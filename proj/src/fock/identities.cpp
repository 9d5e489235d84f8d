#include <chiprobe/analytic.hpp>
#include <chiprobe/fock/identities.hpp>

#include <Eigen/SVD>

#include <algorithm>
#include <cmath>

namespace chiprobe::fock {

namespace {

using analytic::SkewParams;

int resolve_bulk(const FockSpace& space, int bulk) { return bulk > 0 ? std::min(bulk, space.dim()) : default_bulk(space); }

double spectral_norm(const Matrix& m) {
  if (m.size() == 0) return 0;
  return Eigen::JacobiSVD<Matrix>(m).singularValues()(0);
}

double operator_residual(const Matrix& lhs, const Matrix& rhs, int bulk) {
  const Matrix l = lhs.topLeftCorner(bulk, bulk), r = rhs.topLeftCorner(bulk, bulk);
  return spectral_norm(l - r) / std::max(1.0, spectral_norm(r));
}

Matrix disp(const FockSpace& space, cdouble beta) { return displacement_matrix(space, beta).matrix; }

SuperOperator thermal(const FockSpace& space, const OscillatorParams& p, double t) {
  return SuperOperator::propagator(liouvillian(space, p), t, space.dim());
}

cdouble unit_i() { return {0, 1}; }

}  // namespace

double commutator_factorization_residual(const FockSpace& space, const OscillatorParams& p, double t, int sign,
                                         int bulk) {
  const cdouble eps = analytic::epsilon(p);
  const double s = sign;
  const SuperOperator lhs = SuperOperator::propagator(generator_c(space, p, sign), t, space.dim());
  const SuperOperator rhs =
      superdisplacement_sym(space, -s * eps) * thermal(space, p, t) * superdisplacement_sym(space, s * eps);
  return restricted_norm(lhs - rhs, resolve_bulk(space, bulk));
}

double thermalize_then_displace_residual(const FockSpace& space, const OscillatorParams& p, double t, int sign,
                                         int bulk) {
  const cdouble eps = analytic::epsilon(p);
  const cdouble w = analytic::complex_frequency(p);
  const double s = sign;
  const SuperOperator lhs = SuperOperator::propagator(generator_c(space, p, sign), t, space.dim());
  const SuperOperator rhs =
      superdisplacement_sym(space, -s * eps * (1.0 - std::exp(-unit_i() * w * t))) * thermal(space, p, t);
  return restricted_norm(lhs - rhs, resolve_bulk(space, bulk));
}

double switch_identity_residual(const FockSpace& space, const OscillatorParams& p, cdouble eps, double t, int bulk) {
  if (!(t >= 0)) throw Error(Errc::domain, "switch identity requires t >= 0");
  const cdouble w = analytic::complex_frequency(p);
  const SuperOperator lhs = thermal(space, p, t) * superdisplacement_sym(space, eps);
  const SuperOperator rhs = superdisplacement_sym(space, eps * std::exp(-unit_i() * w * t)) * thermal(space, p, t);
  return restricted_norm(lhs - rhs, resolve_bulk(space, bulk));
}

double anticommutator_factorization_residual(const FockSpace& space, const OscillatorParams& p, double t, int sign,
                                             int bulk) {
  const SkewParams xi = analytic::skew_params(p);
  const double gam = analytic::gamma_interference(p);
  const cdouble pref = std::exp(-gam * t) * std::exp(xi.xi1 * (xi.xi3 - xi.xi2));
  const SuperOperator lhs = SuperOperator::propagator(generator_a(space, p, sign), t, space.dim());
  const SuperOperator rhs =
      (superdisplacement_skew(space, xi, -sign) * thermal(space, p, t) * superdisplacement_skew(space, xi, sign))
          .scaled(pref);
  return restricted_norm(lhs - rhs, resolve_bulk(space, bulk));
}

double skew_product_residual(const FockSpace& space, const SkewParams& a, const SkewParams& b, int bulk) {
  const cdouble pref =
      std::exp((a.xi3 - a.xi2) * b.xi1) *
      std::exp(0.5 * (a.xi2 * std::conj(b.xi2) - std::conj(a.xi2) * b.xi2 - a.xi3 * std::conj(b.xi3) +
                      std::conj(a.xi3) * b.xi3));
  const SuperOperator lhs = superdisplacement_skew(space, a, 1) * superdisplacement_skew(space, b, 1);
  const SuperOperator rhs = superdisplacement_skew(space, a + b, 1).scaled(pref);
  return restricted_norm(lhs - rhs, resolve_bulk(space, bulk));
}

double skew_inverse_residual(const FockSpace& space, const SkewParams& xi, int bulk) {
  const SuperOperator lhs = superdisplacement_skew(space, xi, 1) * superdisplacement_skew(space, xi, -1);
  const SuperOperator rhs = SuperOperator::identity(space.dim()).scaled(std::exp(xi.xi1 * (xi.xi2 - xi.xi3)));
  return restricted_norm(lhs - rhs, resolve_bulk(space, bulk));
}

double sym_group_residual(const FockSpace& space, cdouble a, cdouble b, int bulk) {
  const SuperOperator lhs = superdisplacement_sym(space, a) * superdisplacement_sym(space, b);
  const SuperOperator rhs = superdisplacement_sym(space, a + b);
  return restricted_norm(lhs - rhs, resolve_bulk(space, bulk));
}

double skew_on_displacement_residual(const FockSpace& space, const SkewParams& xi, cdouble sigma, int bulk) {
  const cdouble sum = xi.xi2 + xi.xi3;
  const cdouble pref = std::exp(xi.xi1 * (xi.xi2 - xi.xi3)) *
                       std::exp(0.5 * (std::conj(xi.xi2) * xi.xi3 - xi.xi2 * std::conj(xi.xi3))) *
                       std::exp(0.5 * (sum * std::conj(sigma) - std::conj(sum) * sigma)) * std::exp(xi.xi1 * sigma);
  const Matrix lhs = superdisplacement_skew(space, xi, 1)(disp(space, sigma));
  const Matrix rhs = pref * disp(space, sigma + xi.xi2 - xi.xi3);
  return operator_residual(lhs, rhs, resolve_bulk(space, bulk));
}

double sym_on_displacement_residual(const FockSpace& space, cdouble eps, cdouble sigma, int bulk) {
  // D[eps] D^dagger(sigma) = e^{eps^* sigma - eps sigma^*} D^dagger(sigma)
  const Matrix dag = disp(space, -sigma);
  const Matrix lhs = superdisplacement_sym(space, eps)(dag);
  const Matrix rhs = std::exp(std::conj(eps) * sigma - eps * std::conj(sigma)) * dag;
  return operator_residual(lhs, rhs, resolve_bulk(space, bulk));
}

double thermal_displacement_residual(const FockSpace& space, const OscillatorParams& p, double t, cdouble sigma,
                                     int bulk) {
  const cdouble st = sigma * std::exp(-unit_i() * std::conj(analytic::complex_frequency(p)) * t);
  const Matrix lhs = thermal(space, p, t)(disp(space, sigma));
  const Matrix rhs = std::exp(p.gamma * t - analytic::nbar_t(p, t) * std::norm(st)) * disp(space, st);
  return operator_residual(lhs, rhs, resolve_bulk(space, bulk));
}

double segment_pair_residual(const FockSpace& space, const OscillatorParams& p, double t, cdouble sigma, int sign,
                             int bulk) {
  const cdouble wc = std::conj(analytic::complex_frequency(p));
  const double gam = analytic::gamma_interference(p);
  const double s = sign;
  const cdouble one_minus = 1.0 - std::exp(-unit_i() * wc * t);
  const cdouble target = sigma * std::exp(-2.0 * unit_i() * wc * t) + s * 2.0 * std::conj(analytic::epsilon(p)) *
                                                                         one_minus * one_minus;
  const double expo = 2 * (p.gamma - gam) * t + gam * p.gamma / analytic::frequency_norm2(p) +
                      analytic::f_exponent(p, t, s * sigma);
  const int d = space.dim();
  const SuperOperator pair = SuperOperator::propagator(generator_a(space, p, -sign), t, d) *
                             SuperOperator::propagator(generator_a(space, p, sign), t, d);
  const Matrix lhs = pair(disp(space, sigma));
  const Matrix rhs = std::exp(expo) * disp(space, target);
  return operator_residual(lhs, rhs, resolve_bulk(space, bulk));
}

double sequence_displacement_residual(const FockSpace& space, const OscillatorParams& p, const PulseSequence& seq,
                                      cdouble beta, int sign, int bulk) {
  const cdouble wc = std::conj(analytic::complex_frequency(p));
  const double gam = analytic::gamma_interference(p);
  const double total = seq.total_time();
  double fsum = 0;
  for (std::size_t n = 1; n <= seq.size(); ++n)
    fsum += analytic::f_exponent(p, seq[n - 1], analytic::beta_n(p, seq, beta, n, sign));
  const double expo = (p.gamma - gam) * total + double(seq.size()) * gam * p.gamma / analytic::frequency_norm2(p) + fsum;
  const cdouble shift = std::exp(-unit_i() * wc * total) * (beta - double(sign) * analytic::zeta(p, seq));
  const Matrix lhs = v_propagator(space, p, seq, sign)(disp(space, -beta));
  const Matrix rhs = std::exp(expo) * disp(space, -shift);
  return operator_residual(lhs, rhs, resolve_bulk(space, bulk));
}

double main_relation_residual(const FockSpace& space, const OscillatorParams& p, const ProbeAmplitudes& probe,
                              const PulseSequence& seq, const ReferenceState& state, double dephasing_rate) {
  const JointState out = run_sequence(space, p, probe, seq, state.density_matrix(space.dim()), dephasing_rate);
  const PauliExpectations pauli = pauli_expectations(out);
  const auto pred = analytic::invert_measurement(p, probe, seq, pauli.minus, pauli.plus, dephasing_rate);
  return std::max(std::abs(pred.chi_plus - state.chi(pred.zeta)), std::abs(pred.chi_minus - state.chi(-pred.zeta)));
}

std::vector<std::string> convergence_tracked() {
  return {"commutator_factorization+", "commutator_factorization-", "switch_relation",
          "thermalize_then_displace+", "thermalize_then_displace-", "skew_product_rule",
          "anticommutator_factorization+", "anticommutator_factorization-", "skew_on_displacement",
          "thermal_displacement_action", "segment_pair+", "segment_pair-"};
}

std::vector<IdentityResidual> run_identity_suite(int dim, const IdentityConfig& config) {
  const FockSpace space(dim);
  const OscillatorParams& p = config.params;
  p.validate();
  const int bulk = resolve_bulk(space, config.bulk);
  const double tol = config.threshold;
  const SkewParams xi = analytic::skew_params(p);
  const SkewParams xa{{-0.02, 0.05}, {0.3, 0.1}, {-0.2, 0.05}};
  const SkewParams xb{{-0.03, 0.01}, {0.1, -0.2}, {0.25, 0.1}};
  const PulseSequence seq(config.taus);

  std::vector<IdentityResidual> out;
  auto add = [&](std::string name, double r) { out.push_back({std::move(name), r, tol}); };
  for (int s : {1, -1}) {
    const char* tag = s > 0 ? "+" : "-";
    add(std::string("commutator_factorization") + tag, commutator_factorization_residual(space, p, config.t, s, bulk));
    add(std::string("thermalize_then_displace") + tag, thermalize_then_displace_residual(space, p, config.t, s, bulk));
    add(std::string("anticommutator_factorization") + tag,
        anticommutator_factorization_residual(space, p, config.t, s, bulk));
    add(std::string("segment_pair") + tag, segment_pair_residual(space, p, config.t, config.sigma, s, bulk));
    add(std::string("sequence_action") + tag, sequence_displacement_residual(space, p, seq, config.beta, s, bulk));
  }
  add("switch_relation", switch_identity_residual(space, p, config.switch_eps, config.switch_t, bulk));
  add("skew_product_rule", skew_product_residual(space, xa, xb, bulk));
  add("skew_inverse", skew_inverse_residual(space, xa, bulk));
  add("sym_group_law", sym_group_residual(space, {0.2, -0.1}, {-0.05, 0.3}, bulk));
  add("sym_on_displacement", sym_on_displacement_residual(space, {0.2, -0.1}, config.sigma, bulk));
  add("skew_on_displacement", skew_on_displacement_residual(space, xa, config.sigma, bulk));
  add("thermal_displacement_action", thermal_displacement_residual(space, p, config.t, config.sigma, bulk));
  add("skew_difference", std::abs(xi.xi2 - xi.xi3 - 2.0 * std::conj(analytic::epsilon(p))));
  add("gamma_from_xi1",
      std::abs(cdouble(analytic::gamma_interference(p)) - unit_i() * p.g * xi.xi1 / 2.0));
  const ReferenceState coherent(Coherent{1.5});
  add("main_relation", main_relation_residual(space, p, ProbeAmplitudes(), seq, coherent));
  // The end-to-end relation is only as accurate as the truncation allows.
  out.back().threshold = 1e-4;
  return out;
}

bool ConvergenceStudy::monotone(double floor) const {
  const auto tracked = convergence_tracked();
  for (const auto& name : tracked) {
    double prev = -1;
    for (const auto& run : runs) {
      const auto it = std::find_if(run.begin(), run.end(), [&](const IdentityResidual& r) { return r.name == name; });
      if (it == run.end()) return false;
      const double r = std::max(it->residual, floor);
      if (prev >= 0 && r > prev) return false;
      prev = r;
    }
  }
  return true;
}

ConvergenceStudy identity_convergence(const std::vector<int>& dims, const IdentityConfig& config) {
  ConvergenceStudy study;
  study.dims = dims;
  for (int d : dims) study.runs.push_back(run_identity_suite(d, config));
  return study;
}

}  // namespace chiprobe::fock
