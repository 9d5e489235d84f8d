#pragma once

// Reference oscillator states and their Wigner characteristic functions.

#include <chiprobe/errors.hpp>

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <string>
#include <variant>

namespace chiprobe {

using cdouble = std::complex<double>;

/// Associated Laguerre polynomial L_n^(k)(x) by three-term recurrence.
template <typename Real>
Real laguerre(int n, int k, Real x) {
  if (n < 0 || k < 0) throw Error(Errc::domain, "laguerre requires n >= 0 and k >= 0");
  Real prev = 1;
  if (n == 0) return prev;
  Real cur = 1 + Real(k) - x;
  for (int m = 1; m < n; ++m) {
    const Real next = ((2 * m + 1 + k - x) * cur - (m + k) * prev) / Real(m + 1);
    prev = cur;
    cur = next;
  }
  return cur;
}

/// Fock matrix element <m|D(beta)|n>.
template <typename Real>
std::complex<Real> displacement_element(int m, int n, std::complex<Real> beta) {
  if (m < 0 || n < 0) throw Error(Errc::domain, "Fock labels must be nonnegative");
  const Real r2 = std::norm(beta);
  if (r2 == 0) return m == n ? Real(1) : Real(0);
  const int lo = std::min(m, n), k = std::abs(m - n);
  // sqrt(lo! / hi!) |beta|^k e^{-|beta|^2/2} in log space
  const Real log_mag = (std::lgamma(Real(lo + 1)) - std::lgamma(Real(lo + k + 1))) / 2 +
                       Real(k) * std::log(r2) / 2 - r2 / 2;
  const Real arg = std::arg(beta);
  // (beta)^k for m >= n, (-beta^*)^k otherwise
  const Real phase = m >= n ? Real(k) * arg : Real(k) * (std::numbers::pi_v<Real> - arg);
  return std::polar(std::exp(log_mag) * laguerre(lo, k, r2), phase);
}

/// chi(beta) of (|1> + |3>)/sqrt(2) in closed form.
cdouble chi_fock_pair(cdouble beta);

/// chi(beta) of the coherent state D(alpha)|0>.
cdouble chi_coherent(cdouble alpha, cdouble beta);

/// chi(beta) of the even cat state (|alpha> + |-alpha>)/c.
cdouble chi_cat(cdouble alpha, cdouble beta);

/// Squared cat normalization c^2 = 2 [1 + e^{-2|alpha|^2}].
double cat_norm2(cdouble alpha);

/// c1|n1> + c2|n2> with |c1|^2 + |c2|^2 = 1.
struct FockPair {
  int n1 = 1;
  int n2 = 3;
  cdouble c1 = std::numbers::sqrt2 / 2;
  cdouble c2 = std::numbers::sqrt2 / 2;
};

struct Coherent {
  cdouble alpha = 1.5;
};

struct Cat {
  cdouble alpha = 1.5;
};

/// Pure reference state. All three kinds validate on construction.
class ReferenceState {
 public:
  using Kind = std::variant<FockPair, Coherent, Cat>;

  ReferenceState(Kind kind);  // NOLINT(google-explicit-constructor)

  const Kind& kind() const { return kind_; }
  std::string name() const;

  /// Closed-form characteristic function; the general Fock pair sums
  /// displacement matrix elements.
  cdouble chi(cdouble beta) const;

  /// Fock amplitudes truncated to dim levels (not renormalized).
  Eigen::VectorXcd state_vector(int dim) const;

  /// |phi><phi| truncated to dim levels.
  Eigen::MatrixXcd density_matrix(int dim) const;

  /// Highest Fock level carrying appreciable weight, used to size truncations.
  int support_hint() const;

 private:
  Kind kind_;
};

/// Coherent-state Fock amplitudes e^{-|alpha|^2/2} alpha^n / sqrt(n!).
Eigen::VectorXcd coherent_amplitudes(cdouble alpha, int dim);

}  // namespace chiprobe
