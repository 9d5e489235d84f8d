#pragma once

#include <chiprobe/errors.hpp>

#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <numbers>
#include <random>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace chiprobe {

/// Physical constants of the thermalizing oscillator and its probe coupling.
///
/// All rates are expressed in units of the oscillator frequency; the
/// conventional choice is nu = 1.
template <typename Real>
struct OscillatorParamsT {
  Real nu = 1;     ///< angular frequency
  Real gamma = 0;  ///< amplitude damping rate
  Real nbar = 0;   ///< mean thermal occupation of the bath
  Real g = 0;      ///< probe coupling strength

  void validate() const {
    if (!(nu > 0) || !(gamma >= 0) || !(nbar >= 0) || !(g >= 0) || !std::isfinite(nu) ||
        !std::isfinite(gamma) || !std::isfinite(nbar) || !std::isfinite(g))
      throw Error(Errc::domain, "oscillator parameters require nu > 0 and gamma, nbar, g >= 0");
  }

  template <typename Other>
  OscillatorParamsT<Other> cast() const {
    return {Other(nu), Other(gamma), Other(nbar), Other(g)};
  }
};

using OscillatorParams = OscillatorParamsT<double>;

/// Amplitudes (psi_+, psi_-) of the initial pure probe state.
template <typename Real>
class ProbeAmplitudesT {
 public:
  using Complex = std::complex<Real>;

  /// Equal superposition, which maximizes |psi_+ psi_-^*|.
  ProbeAmplitudesT() : plus_(1 / std::sqrt(Real(2))), minus_(1 / std::sqrt(Real(2))) {}

  ProbeAmplitudesT(Complex plus, Complex minus) : plus_(plus), minus_(minus) {
    const Real norm = std::norm(plus_) + std::norm(minus_);
    if (!(std::abs(norm - 1) <= Real(1e-12)))
      throw Error(Errc::domain, "probe amplitudes must satisfy |psi+|^2 + |psi-|^2 = 1");
  }

  /// Normalizes an arbitrary nonzero pair.
  static ProbeAmplitudesT normalized(Complex plus, Complex minus) {
    const Real norm = std::sqrt(std::norm(plus) + std::norm(minus));
    if (!(norm > 0)) throw Error(Errc::domain, "probe amplitudes must not both vanish");
    // leave already normalized input untouched so printed values round-trip
    if (std::abs(norm - 1) <= 4 * std::numeric_limits<Real>::epsilon()) return ProbeAmplitudesT(plus, minus);
    return ProbeAmplitudesT(plus / norm, minus / norm);
  }

  Complex plus() const { return plus_; }
  Complex minus() const { return minus_; }

  /// psi_+ psi_-^*, the weight of the |+><-| coherence.
  Complex coherence() const { return plus_ * std::conj(minus_); }

 private:
  Complex plus_;
  Complex minus_;
};

using ProbeAmplitudes = ProbeAmplitudesT<double>;

/// Free-evolution half times tau_1..tau_N of a 2N-pulse schedule.
template <typename Real>
class PulseSequenceT {
 public:
  PulseSequenceT() = default;

  explicit PulseSequenceT(std::vector<Real> taus) : taus_(std::move(taus)) {
    if (taus_.empty()) throw Error(Errc::empty_sequence, "pulse sequence must have at least one segment");
    for (Real t : taus_)
      if (!(t > 0) || !std::isfinite(t))
        throw Error(Errc::domain, "free-evolution times must be strictly positive");
  }

  std::span<const Real> taus() const { return taus_; }
  std::size_t size() const { return taus_.size(); }
  bool empty() const { return taus_.empty(); }
  Real operator[](std::size_t n) const { return taus_[n]; }

  /// T = 2 sum tau_n.
  Real total_time() const {
    Real sum = 0, carry = 0;
    for (Real t : taus_) {
      const Real y = t - carry;
      const Real s = sum + y;
      carry = (s - sum) - y;
      sum = s;
    }
    return 2 * sum;
  }

  template <typename Other>
  PulseSequenceT<Other> cast() const {
    return PulseSequenceT<Other>(std::vector<Other>(taus_.begin(), taus_.end()));
  }

  friend bool operator==(const PulseSequenceT&, const PulseSequenceT&) = default;

 private:
  std::vector<Real> taus_;
};

using PulseSequence = PulseSequenceT<double>;

template <typename Real>
Real total_time(const PulseSequenceT<Real>& seq) {
  return seq.total_time();
}

/// (tau0, tau0, ..., tau0), N entries.
struct Equidistant {
  double tau0 = 0;
  int n = 0;
  friend bool operator==(const Equidistant&, const Equidistant&) = default;
};

/// N i.i.d. uniform draws on [lo, hi), reproducible from (seed, stream).
///
/// hi <= lo selects the default range [0, 2 pi / nu).
struct RandomFamily {
  int n = 0;
  std::uint64_t seed = 0;
  std::uint64_t stream = 0;
  double lo = 0;
  double hi = 0;
  friend bool operator==(const RandomFamily&, const RandomFamily&) = default;
};

/// (tau0, 2 tau0, ..., N tau0, ..., 2 tau0, tau0), 2N - 1 entries.
struct Linear {
  double tau0 = 0;
  int n = 0;
  friend bool operator==(const Linear&, const Linear&) = default;
};

using SequenceFamily = std::variant<Equidistant, RandomFamily, Linear>;

enum class FamilyKind { equidistant, random, linear };

FamilyKind family_kind(const SequenceFamily& f);
std::string to_string(FamilyKind kind);
FamilyKind parse_family_kind(const std::string& name);

/// Concrete tau vector for a family member. nu fixes the default random range.
PulseSequence expand_family(const SequenceFamily& f, double nu = 1.0);

/// Mean thermal occupation 1/(e^x - 1) for x = hbar nu / (k_B Theta).
double nbar_from_ratio(double x);

/// Deterministic uniform [0,1) stream: mt19937_64 seeded through seed_seq
/// with (seed, stream), converted with 53-bit mantissa extraction so results
/// do not depend on the standard library's distribution implementation.
class UniformStream {
 public:
  UniformStream(std::uint64_t seed, std::uint64_t stream);
  double next() { return double(engine_() >> 11) * 0x1.0p-53; }

 private:
  std::mt19937_64 engine_;
};

}  // namespace chiprobe
