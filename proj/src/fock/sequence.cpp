#include <chiprobe/fock/expmv.hpp>
#include <chiprobe/fock/sequence.hpp>

#include <Eigen/Eigenvalues>

#include <array>

namespace chiprobe::fock {

namespace {

constexpr int sign_of(int index) { return index == 0 ? 1 : -1; }

void check_rho(const FockSpace& space, const Matrix& rho0) {
  if (rho0.rows() != space.dim() || rho0.cols() != space.dim())
    throw Error(Errc::domain, "initial oscillator state does not match the Fock space");
}

// Evolves one d x d block through the schedule; the block label flips with
// every pi pulse and returns to its start after each segment.
Matrix propagate_block(const FockSpace& space, const OscillatorParams& p, const PulseSequence& seq, int row_sign,
                       int col_sign, const Matrix& rho0, double dephasing_rate) {
  const int d = space.dim();
  const SparseMatrix first = block_generator(space, p, row_sign, col_sign, dephasing_rate);
  const SparseMatrix second = block_generator(space, p, -row_sign, -col_sign, dephasing_rate);
  Vector v = vec(rho0);
  for (double tau : seq.taus()) {
    v = expmv(first, tau, v);
    v = expmv(second, tau, v);
  }
  return unvec(v, d);
}

}  // namespace

JointState product_state(const ProbeAmplitudes& probe, const Matrix& rho0) {
  const int d = int(rho0.rows());
  const std::array<cdouble, 2> psi{probe.plus(), probe.minus()};
  JointState s{Matrix(2 * d, 2 * d), 0.0, top_population(rho0)};
  for (int r = 0; r < 2; ++r)
    for (int c = 0; c < 2; ++c) s.rho.block(r * d, c * d, d, d) = psi[r] * std::conj(psi[c]) * rho0;
  return s;
}

void apply_pi_pulse(JointState& state) {
  const int d = state.dim();
  Matrix out(2 * d, 2 * d);
  for (int r = 0; r < 2; ++r)
    for (int c = 0; c < 2; ++c) out.block(r * d, c * d, d, d) = state.block(1 - r, 1 - c);
  state.rho = std::move(out);
}

JointState run_sequence(const FockSpace& space, const OscillatorParams& p, const ProbeAmplitudes& probe,
                        const PulseSequence& seq, const Matrix& rho0, double dephasing_rate) {
  check_rho(space, rho0);
  if (seq.empty()) throw Error(Errc::empty_sequence, "pulse sequence must have at least one segment");
  const int d = space.dim();
  std::array<std::array<SparseMatrix, 2>, 2> gen;
  for (int r = 0; r < 2; ++r)
    for (int c = 0; c < 2; ++c) gen[r][c] = block_generator(space, p, sign_of(r), sign_of(c), dephasing_rate);

  JointState state = product_state(probe, rho0);
  auto free_evolution = [&](double tau) {
    for (int r = 0; r < 2; ++r)
      for (int c = 0; c < 2; ++c) {
        const Vector v = expmv(gen[r][c], tau, vec(state.block(r, c)));
        state.rho.block(r * d, c * d, d, d) = unvec(v, d);
      }
    state.time += tau;
    state.leakage = std::max(state.leakage, top_population(state.oscillator()));
  };
  for (double tau : seq.taus()) {
    free_evolution(tau);
    apply_pi_pulse(state);
    free_evolution(tau);
    apply_pi_pulse(state);
  }
  return state;
}

Matrix apply_u(const FockSpace& space, const OscillatorParams& p, const PulseSequence& seq, int sign,
               const Matrix& rho0) {
  check_rho(space, rho0);
  return propagate_block(space, p, seq, sign, sign, rho0, 0.0);
}

Matrix apply_v(const FockSpace& space, const OscillatorParams& p, const PulseSequence& seq, int sign,
               const Matrix& rho0, double dephasing_rate) {
  check_rho(space, rho0);
  return propagate_block(space, p, seq, sign, -sign, rho0, dephasing_rate);
}

SuperOperator v_propagator(const FockSpace& space, const OscillatorParams& p, const PulseSequence& seq, int sign) {
  const int d = space.dim();
  SuperOperator out = SuperOperator::identity(d);
  const SparseMatrix first = generator_a(space, p, sign);
  const SparseMatrix second = generator_a(space, p, -sign);
  for (double tau : seq.taus())
    out = SuperOperator::propagator(second, tau, d) * SuperOperator::propagator(first, tau, d) * out;
  return out;
}

PauliExpectations pauli_expectations(const JointState& state) {
  const cdouble pm = state.block(0, 1).trace();
  const cdouble mp = state.block(1, 0).trace();
  PauliExpectations out;
  out.minus = 2.0 * pm;
  out.plus = 2.0 * mp;
  out.x = (pm + mp).real();
  out.y = (cdouble(0, 1) * (pm - mp)).real();
  out.z = (state.block(0, 0).trace() - state.block(1, 1).trace()).real();
  return out;
}

StateDiagnostics diagnose(const JointState& state) {
  StateDiagnostics out;
  out.hermiticity = (state.rho - state.rho.adjoint()).cwiseAbs().maxCoeff();
  out.trace_error = std::abs(state.rho.trace() - 1.0);
  const Matrix herm = (state.rho + state.rho.adjoint()) / 2.0;
  Eigen::SelfAdjointEigenSolver<Matrix> es(herm, Eigen::EigenvaluesOnly);
  out.min_eigenvalue = es.eigenvalues().minCoeff();
  return out;
}

}  // namespace chiprobe::fock
