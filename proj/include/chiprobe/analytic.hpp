#pragma once

// Closed-form evaluation of the pulsed characteristic-function protocol.
//
// Every function is a pure template over the real scalar type, so the same
// code runs in double for production and in long double for spot checks.
// Segment indices n are 1-based (1 <= n <= N) to match the usual notation
// for tau_n; empty products are 1 and empty sums are 0.

#include <chiprobe/errors.hpp>
#include <chiprobe/model.hpp>

#include <cmath>
#include <complex>
#include <limits>
#include <utility>
#include <vector>

namespace chiprobe::analytic {

template <typename Real>
using Cx = std::complex<Real>;

/// Neumaier-compensated complex accumulator.
template <typename Real>
class CompensatedSum {
 public:
  void add(Cx<Real> z) {
    add_part(re_, cre_, z.real());
    add_part(im_, cim_, z.imag());
  }
  Cx<Real> value() const { return {re_ + cre_, im_ + cim_}; }

 private:
  static void add_part(Real& sum, Real& comp, Real x) {
    const Real t = sum + x;
    if (std::abs(sum) >= std::abs(x))
      comp += (sum - t) + x;
    else
      comp += (x - t) + sum;
    sum = t;
  }
  Real re_ = 0, im_ = 0, cre_ = 0, cim_ = 0;
};

/// e^z - 1 without cancellation for small |z|.
template <typename Real>
Cx<Real> cexpm1(Cx<Real> z) {
  const Real x = z.real(), y = z.imag();
  const Real half_sin = std::sin(y / 2);
  const Real re = std::expm1(x) * std::cos(y) - 2 * half_sin * half_sin;
  const Real im = std::exp(x) * std::sin(y);
  return {re, im};
}

/// nu~ = nu - i gamma / 2.
template <typename Real>
Cx<Real> complex_frequency(const OscillatorParamsT<Real>& p) {
  return {p.nu, -p.gamma / 2};
}

/// |nu~|^2 = nu^2 + gamma^2 / 4.
template <typename Real>
Real frequency_norm2(const OscillatorParamsT<Real>& p) {
  return p.nu * p.nu + p.gamma * p.gamma / 4;
}

/// Relative coupling strength eps = g / (2 nu~).
template <typename Real>
Cx<Real> epsilon(const OscillatorParamsT<Real>& p) {
  return p.g / (Real(2) * complex_frequency(p));
}

/// Interference decay rate Gamma = g^2 (2 nbar + 1) gamma / (2 |nu~|^2).
template <typename Real>
Real gamma_interference(const OscillatorParamsT<Real>& p) {
  return p.g * p.g * (2 * p.nbar + 1) * p.gamma / (2 * frequency_norm2(p));
}

/// Displacement parameters of the skew superdisplacement that maps A_pm onto L.
template <typename Real>
struct SkewParamsT {
  Cx<Real> xi1, xi2, xi3;

  SkewParamsT operator-() const { return {-xi1, -xi2, -xi3}; }
  SkewParamsT operator+(const SkewParamsT& o) const { return {xi1 + o.xi1, xi2 + o.xi2, xi3 + o.xi3}; }
  SkewParamsT operator*(Real s) const { return {s * xi1, s * xi2, s * xi3}; }
};

using SkewParams = SkewParamsT<double>;

template <typename Real>
SkewParamsT<Real> skew_params(const OscillatorParamsT<Real>& p) {
  const Real pref = p.g / (4 * frequency_norm2(p));
  const Real two_nbar = 2 * p.nbar;
  return {pref * Cx<Real>(0, -4 * (two_nbar + 1) * p.gamma),
          pref * Cx<Real>(2 * p.nu, (2 * two_nbar + 1) * p.gamma),
          pref * Cx<Real>(-2 * p.nu, (2 * two_nbar + 3) * p.gamma)};
}

/// Time-dependent occupation (nbar + 1/2)(1 - e^{-gamma t}).
template <typename Real>
Real nbar_t(const OscillatorParamsT<Real>& p, Real t) {
  if (!(t >= 0)) throw Error(Errc::domain, "nbar_t requires t >= 0");
  return (p.nbar + Real(0.5)) * -std::expm1(-p.gamma * t);
}

namespace detail {

// e^{i w tau} for complex frequency w.
template <typename Real>
Cx<Real> phase(Cx<Real> w, Real tau) {
  return std::exp(Cx<Real>(0, 1) * w * tau);
}

// Compensated prefix sums S_0 = 0, S_n = tau_1 + ... + tau_n.
template <typename Real>
std::vector<Real> prefix_sums(std::span<const Real> taus) {
  std::vector<Real> s(taus.size() + 1, Real(0));
  Real sum = 0, comp = 0;
  for (std::size_t n = 0; n < taus.size(); ++n) {
    const Real y = taus[n] - comp;
    const Real t = sum + y;
    comp = (t - sum) - y;
    sum = t;
    s[n + 1] = sum;
  }
  return s;
}

template <typename Real>
void check_index(const PulseSequenceT<Real>& seq, std::size_t n) {
  if (n < 1 || n > seq.size()) throw Error(Errc::index, "segment index out of range");
}

}  // namespace detail

/// Displacement of the probe-diagonal propagators U_pm = D[pm upsilon] e^{L T}.
///
/// Evaluated as eps sum_n (1 - e^{-i nu~ tau_n})^2 e^{-2 i nu~ R_n} with
/// R_n = sum_{k>n} tau_k, which keeps every factor bounded for gamma T >> 1.
template <typename Real>
Cx<Real> upsilon(const OscillatorParamsT<Real>& p, const PulseSequenceT<Real>& seq) {
  const Cx<Real> w = complex_frequency(p);
  const auto taus = seq.taus();
  const auto s = detail::prefix_sums(taus);
  const Real total = s.back();
  CompensatedSum<Real> acc;
  for (std::size_t n = 0; n < taus.size(); ++n) {
    const Cx<Real> d = -cexpm1(Cx<Real>(0, -1) * w * taus[n]);
    acc.add(d * d * detail::phase(w, -2 * (total - s[n + 1])));
  }
  return epsilon(p) * acc.value();
}

/// Accessible reciprocal-phase-space point zeta(tau).
///
/// Evaluated as 2 eps^* sum_n (e^{i nu~^* tau_n} - 1)^2 e^{2 i nu~^* S_{n-1}}.
template <typename Real>
Cx<Real> zeta(const OscillatorParamsT<Real>& p, const PulseSequenceT<Real>& seq) {
  const Cx<Real> wc = std::conj(complex_frequency(p));
  const auto taus = seq.taus();
  const auto s = detail::prefix_sums(taus);
  CompensatedSum<Real> acc;
  for (std::size_t n = 0; n < taus.size(); ++n) {
    const Cx<Real> d = cexpm1(Cx<Real>(0, 1) * wc * taus[n]);
    acc.add(d * d * detail::phase(wc, 2 * s[n]));
  }
  return Real(2) * std::conj(epsilon(p)) * acc.value();
}

/// Closed form -4 eps^* sin(N nu~^* tau0) tan(nu~^* tau0 / 2) e^{i N nu~^* tau0}
/// for the equidistant family, the geometric sum of the general expression.
/// Throws Errc::pole within 1e-6 of a tangent pole.
template <typename Real>
Cx<Real> zeta_equidistant_closed(const OscillatorParamsT<Real>& p, Real tau0, int n) {
  if (n < 1) throw Error(Errc::empty_sequence, "equidistant family needs N >= 1");
  const Cx<Real> z = std::conj(complex_frequency(p)) * tau0;
  const Cx<Real> half = z / Real(2);
  if (std::abs(std::cos(half)) < Real(1e-6))
    throw Error(Errc::pole, "tan(nu~^* tau0 / 2) is at a pole");
  const Cx<Real> nz = Real(n) * z;
  const Cx<Real> value = Real(-4) * std::conj(epsilon(p)) * std::sin(nz) * std::tan(half) *
                         std::exp(Cx<Real>(0, 1) * nz);
  if (!std::isfinite(value.real()) || !std::isfinite(value.imag()))
    throw Error(Errc::pole, "closed form overflowed");
  return value;
}

/// Equidistant zeta: closed form away from poles, general sum otherwise.
template <typename Real>
Cx<Real> zeta_equidistant(const OscillatorParamsT<Real>& p, Real tau0, int n) {
  try {
    return zeta_equidistant_closed(p, tau0, n);
  } catch (const Error& e) {
    if (e.code() != Errc::pole) throw;
    return zeta(p, PulseSequenceT<Real>(std::vector<Real>(std::size_t(n), tau0)));
  }
}

/// Per-segment displacement argument beta_pm^(n) entering f(tau_n, .) when
/// V_pm acts on D^dagger(beta). sign = +1 selects beta_+, -1 selects beta_-.
template <typename Real>
Cx<Real> beta_n(const OscillatorParamsT<Real>& p, const PulseSequenceT<Real>& seq, Cx<Real> beta,
                std::size_t n, int sign) {
  detail::check_index(seq, n);
  const Cx<Real> wc = std::conj(complex_frequency(p));
  const auto taus = seq.taus();
  const auto s = detail::prefix_sums(taus);
  CompensatedSum<Real> acc;
  for (std::size_t j = 1; j < n; ++j) {
    const Cx<Real> d = -cexpm1(Cx<Real>(0, -1) * wc * taus[j - 1]);
    acc.add(d * d * detail::phase(wc, -2 * (s[n - 1] - s[j])));
  }
  const Cx<Real> shift = beta * detail::phase(wc, -2 * s[n - 1]);
  return Real(2) * std::conj(epsilon(p)) * acc.value() - Real(sign) * shift;
}

/// beta_pm^(n) evaluated at beta = pm zeta:
/// -2 eps^* sum_{j>=n} (e^{i nu~^* tau_j} - 1)^2 e^{2 i nu~^* (S_{j-1} - S_{n-1})}.
template <typename Real>
Cx<Real> phi_n(const OscillatorParamsT<Real>& p, const PulseSequenceT<Real>& seq, std::size_t n) {
  detail::check_index(seq, n);
  const Cx<Real> wc = std::conj(complex_frequency(p));
  const auto taus = seq.taus();
  const auto s = detail::prefix_sums(taus);
  CompensatedSum<Real> acc;
  for (std::size_t j = n; j <= taus.size(); ++j) {
    const Cx<Real> d = cexpm1(Cx<Real>(0, 1) * wc * taus[j - 1]);
    acc.add(d * d * detail::phase(wc, 2 * (s[j - 1] - s[n - 1])));
  }
  return Real(-2) * std::conj(epsilon(p)) * acc.value();
}

/// Real exponent f(t, sigma) acquired by D(sigma) over one pulse segment.
///
/// The (sigma / g) term is evaluated as g sigma (2 nbar + 1) gamma / (2 |nu~|^2)
/// so the decoupled point g = 0 is exact.
template <typename Real>
Real f_exponent(const OscillatorParamsT<Real>& p, Real t, Cx<Real> sigma) {
  if (!(t >= 0)) throw Error(Errc::domain, "f_exponent requires t >= 0");
  const Cx<Real> wc = std::conj(complex_frequency(p));
  const Cx<Real> e = std::exp(Cx<Real>(0, -1) * wc * t);
  const Cx<Real> one_minus = -cexpm1(Cx<Real>(0, -1) * wc * t);
  const Real gam = gamma_interference(p);
  const Real gam_over_g = p.g * (2 * p.nbar + 1) * p.gamma / (2 * frequency_norm2(p));
  const Cx<Real> two_minus = Real(1) + one_minus;
  const Real coherent = 2 * gam * std::imag(two_minus * two_minus / wc) +
                        2 * std::imag(gam_over_g * sigma * one_minus * one_minus);
  const Cx<Real> eps2c = Real(2) * std::conj(epsilon(p));
  const Cx<Real> c = eps2c + sigma;
  const Real thermal =
      nbar_t(p, t) * std::exp(p.gamma * t) * (std::norm(c) + std::norm(c * e - Real(2) * eps2c));
  (void)e;
  return coherent - thermal;
}

/// Real exponent E with C_pm = e^{E} / (2 psi_pm psi_mp^*):
/// E = Gamma T - N Gamma gamma / |nu~|^2 - sum_n f(tau_n, phi_n).
template <typename Real>
Real scaling_exponent(const OscillatorParamsT<Real>& p, const PulseSequenceT<Real>& seq) {
  const Real gam = gamma_interference(p);
  const Real total = seq.total_time();
  const std::size_t count = seq.size();
  Real fsum = 0, comp = 0;
  for (std::size_t n = 1; n <= count; ++n) {
    const Real y = f_exponent(p, seq[n - 1], phi_n(p, seq, n)) - comp;
    const Real t = fsum + y;
    comp = (t - fsum) - y;
    fsum = t;
  }
  return gam * total - Real(count) * gam * p.gamma / frequency_norm2(p) - fsum;
}

/// Compensation e^{Gamma_d T} for pure probe dephasing at rate Gamma_d.
template <typename Real>
Real dephasing_compensation(Real gamma_d, Real total_time) {
  if (!(gamma_d >= 0) || !(total_time >= 0))
    throw Error(Errc::domain, "dephasing compensation needs gamma_d >= 0 and T >= 0");
  return std::exp(gamma_d * total_time);
}

template <typename Real>
struct ScalingFactorsT {
  Cx<Real> plus;   ///< C_+, multiplies <sigma_x - i sigma_y>
  Cx<Real> minus;  ///< C_-, multiplies <sigma_x + i sigma_y>
};

/// C_pm(psi, tau), optionally including the dephasing compensation factor.
template <typename Real>
ScalingFactorsT<Real> scaling_factor(const OscillatorParamsT<Real>& p, const ProbeAmplitudesT<Real>& probe,
                                     const PulseSequenceT<Real>& seq, Real dephasing_rate = 0) {
  const Cx<Real> coherence = probe.coherence();
  if (std::abs(coherence) <= std::numeric_limits<Real>::min())
    throw Error(Errc::degenerate_probe, "probe state has no coherence between |+> and |->");
  const Real magnitude =
      std::exp(scaling_exponent(p, seq)) * dephasing_compensation(dephasing_rate, seq.total_time());
  return {magnitude / (Real(2) * coherence), magnitude / (Real(2) * std::conj(coherence))};
}

/// Predicted probe signals <sigma_x -+ i sigma_y> for a state whose
/// characteristic function at +zeta is chi_at_zeta.
template <typename Real>
std::pair<Cx<Real>, Cx<Real>> forward_pauli(const OscillatorParamsT<Real>& p, const ProbeAmplitudesT<Real>& probe,
                                            const PulseSequenceT<Real>& seq, Cx<Real> chi_at_zeta,
                                            Real dephasing_rate = 0) {
  const Real damping =
      std::exp(-scaling_exponent(p, seq)) / dephasing_compensation(dephasing_rate, seq.total_time());
  const Cx<Real> coherence = probe.coherence();
  const Cx<Real> minus_signal = Real(2) * coherence * damping * chi_at_zeta;
  const Cx<Real> plus_signal = Real(2) * std::conj(coherence) * damping * std::conj(chi_at_zeta);
  return {minus_signal, plus_signal};
}

template <typename Real>
struct MeasurementPredictionT {
  Cx<Real> zeta;
  Cx<Real> c_plus;
  Cx<Real> c_minus;
  Cx<Real> pauli_minus;  ///< <sigma_x - i sigma_y>
  Cx<Real> pauli_plus;   ///< <sigma_x + i sigma_y>
  Cx<Real> chi_plus;     ///< chi(+zeta)
  Cx<Real> chi_minus;    ///< chi(-zeta)
  Real hermiticity_residual = 0;
};

using MeasurementPrediction = MeasurementPredictionT<double>;

/// Converts measured probe signals into chi(pm zeta).
template <typename Real>
MeasurementPredictionT<Real> invert_measurement(const OscillatorParamsT<Real>& p,
                                                const ProbeAmplitudesT<Real>& probe,
                                                const PulseSequenceT<Real>& seq, Cx<Real> pauli_minus,
                                                Cx<Real> pauli_plus, Real dephasing_rate = 0) {
  if (!std::isfinite(pauli_minus.real()) || !std::isfinite(pauli_minus.imag()) ||
      !std::isfinite(pauli_plus.real()) || !std::isfinite(pauli_plus.imag()))
    throw Error(Errc::domain, "probe expectation values must be finite");
  const auto c = scaling_factor(p, probe, seq, dephasing_rate);
  MeasurementPredictionT<Real> out;
  out.zeta = zeta(p, seq);
  out.c_plus = c.plus;
  out.c_minus = c.minus;
  out.pauli_minus = pauli_minus;
  out.pauli_plus = pauli_plus;
  out.chi_plus = c.plus * pauli_minus;
  out.chi_minus = c.minus * pauli_plus;
  out.hermiticity_residual = std::abs(out.chi_minus - std::conj(out.chi_plus));
  return out;
}

}  // namespace chiprobe::analytic
