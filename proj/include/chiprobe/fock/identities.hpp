#pragma once

// Numerical checks of the superoperator algebra behind the protocol.
//
// Superoperator identities are scored by the spectral norm of the difference
// restricted to operators living on the lowest `bulk` levels. Identities that
// act on a displacement operator are scored by the spectral norm of the bulk
// block of the resulting operator difference, relative to max(1, |rhs|).

#include <chiprobe/fock/sequence.hpp>
#include <chiprobe/states.hpp>

#include <string>
#include <vector>

namespace chiprobe::fock {

/// Parameters shared by the identity suite. bulk = 0 selects default_bulk().
struct IdentityConfig {
  OscillatorParams params{1.0, 0.05, 0.2, 0.3};
  double t = 0.8;
  double switch_t = 1.5;
  cdouble switch_eps{0.3, 0.0};
  cdouble sigma{0.2, 0.1};
  std::vector<double> taus{0.7, 1.3, 0.45};
  cdouble beta{0.3, -0.2};
  int bulk = 0;
  double threshold = 1e-6;
};

// Superoperator-level identities.
double commutator_factorization_residual(const FockSpace& space, const OscillatorParams& p, double t, int sign,
                                         int bulk);
double thermalize_then_displace_residual(const FockSpace& space, const OscillatorParams& p, double t, int sign,
                                         int bulk);
double switch_identity_residual(const FockSpace& space, const OscillatorParams& p, cdouble eps, double t,
                                int bulk = 0);
double anticommutator_factorization_residual(const FockSpace& space, const OscillatorParams& p, double t, int sign,
                                             int bulk);
double skew_product_residual(const FockSpace& space, const analytic::SkewParams& a, const analytic::SkewParams& b,
                             int bulk);
double skew_inverse_residual(const FockSpace& space, const analytic::SkewParams& xi, int bulk);
double sym_group_residual(const FockSpace& space, cdouble a, cdouble b, int bulk);

// Identities acting on displacement operators.
double skew_on_displacement_residual(const FockSpace& space, const analytic::SkewParams& xi, cdouble sigma,
                                     int bulk);
double sym_on_displacement_residual(const FockSpace& space, cdouble eps, cdouble sigma, int bulk);
double thermal_displacement_residual(const FockSpace& space, const OscillatorParams& p, double t, cdouble sigma,
                                     int bulk);
double segment_pair_residual(const FockSpace& space, const OscillatorParams& p, double t, cdouble sigma, int sign,
                             int bulk);
double sequence_displacement_residual(const FockSpace& space, const OscillatorParams& p, const PulseSequence& seq,
                                      cdouble beta, int sign, int bulk);

/// max_pm |C_pm <sigma_x -+ i sigma_y>_oracle - chi(pm zeta)| for a reference state.
double main_relation_residual(const FockSpace& space, const OscillatorParams& p, const ProbeAmplitudes& probe,
                              const PulseSequence& seq, const ReferenceState& state, double dephasing_rate = 0);

struct IdentityResidual {
  std::string name;
  double residual = 0;
  double threshold = 0;
  bool passed() const { return residual < threshold; }
};

/// Runs every identity once at truncation dim.
std::vector<IdentityResidual> run_identity_suite(int dim, const IdentityConfig& config);

/// Names of the identities that the convergence study tracks across truncations.
std::vector<std::string> convergence_tracked();

struct ConvergenceStudy {
  std::vector<int> dims;
  std::vector<std::vector<IdentityResidual>> runs;  ///< one suite per dim
  /// Residuals of every tracked identity are nonincreasing in d once the
  /// noise floor is accounted for.
  bool monotone(double floor = 1e-12) const;
};

ConvergenceStudy identity_convergence(const std::vector<int>& dims, const IdentityConfig& config);

}  // namespace chiprobe::fock
