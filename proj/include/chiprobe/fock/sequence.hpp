#pragma once

// Brute-force simulation of the probe + oscillator pulse protocol.
//
// The joint state is ordered qubit (x) oscillator with |+> first, so the
// (p, q) probe block sits at rows p*d and columns q*d.

#include <chiprobe/fock/space.hpp>
#include <chiprobe/fock/superop.hpp>
#include <chiprobe/model.hpp>

namespace chiprobe::fock {

struct JointState {
  Matrix rho;          ///< (2d) x (2d)
  double time = 0;
  double leakage = 0;  ///< largest top-two-level population seen during evolution

  static constexpr double kLeakageLimit = 1e-8;

  int dim() const { return int(rho.rows()) / 2; }
  /// Probe block with index 0 for |+> and 1 for |->.
  Matrix block(int row, int col) const { return rho.block(row * dim(), col * dim(), dim(), dim()); }
  /// Partial trace over the probe.
  Matrix oscillator() const { return block(0, 0) + block(1, 1); }
  bool leakage_flag() const { return !(leakage < kLeakageLimit); }
};

/// |psi><psi| (x) rho0.
JointState product_state(const ProbeAmplitudes& probe, const Matrix& rho0);

/// Exact instantaneous pi pulse: conjugation by sigma_x (x) 1.
void apply_pi_pulse(JointState& state);

/// Evolves the joint state through tau_1, pi, tau_1, pi, ..., tau_N, pi, tau_N, pi.
JointState run_sequence(const FockSpace& space, const OscillatorParams& p, const ProbeAmplitudes& probe,
                        const PulseSequence& seq, const Matrix& rho0, double dephasing_rate = 0);

/// U_pm[tau] rho0 from the commutator generators alone.
Matrix apply_u(const FockSpace& space, const OscillatorParams& p, const PulseSequence& seq, int sign,
               const Matrix& rho0);

/// V_pm[tau] rho0 from the anticommutator generators alone.
Matrix apply_v(const FockSpace& space, const OscillatorParams& p, const PulseSequence& seq, int sign,
               const Matrix& rho0, double dephasing_rate = 0);

/// V_pm[tau] as a matrix-free superoperator.
SuperOperator v_propagator(const FockSpace& space, const OscillatorParams& p, const PulseSequence& seq, int sign);

struct PauliExpectations {
  double x = 0, y = 0, z = 0;
  cdouble minus;  ///< <sigma_x - i sigma_y> = 2 Tr rho_{+-}
  cdouble plus;   ///< <sigma_x + i sigma_y> = 2 Tr rho_{-+}
};

PauliExpectations pauli_expectations(const JointState& state);

/// Hermiticity, trace and positivity diagnostics of a joint state.
struct StateDiagnostics {
  double hermiticity = 0;  ///< max |rho - rho^dagger|
  double trace_error = 0;  ///< |Tr rho - 1|
  double min_eigenvalue = 0;
};

StateDiagnostics diagnose(const JointState& state);

}  // namespace chiprobe::fock
