#include <chiprobe/analytic.hpp>
#include <chiprobe/fock/sequence.hpp>
#include <chiprobe/parallel.hpp>
#include <chiprobe/reconstruct/samples.hpp>

#include <cmath>
#include <numbers>
#include <optional>

namespace chiprobe::reconstruct {

std::string to_string(SampleSource source) {
  switch (source) {
    case SampleSource::analytic: return "analytic";
    case SampleSource::oracle: return "oracle";
    case SampleSource::external: return "external";
  }
  return "external";
}

SampleSource parse_sample_source(const std::string& name) {
  if (name == "analytic") return SampleSource::analytic;
  if (name == "oracle") return SampleSource::oracle;
  if (name == "external") return SampleSource::external;
  throw Error(Errc::config, "unknown sample source '" + name + "'");
}

std::string to_string(SampleMode mode) { return mode == SampleMode::oracle ? "oracle" : "analytic"; }

SampleMode parse_sample_mode(const std::string& name) {
  if (name == "analytic") return SampleMode::analytic;
  if (name == "oracle") return SampleMode::oracle;
  throw Error(Errc::config, "unknown mode '" + name + "' (expected analytic or oracle)");
}

namespace {

std::vector<double> tau0_grid(int count, double nu) {
  if (count < 1) throw Error(Errc::empty_sequence, "tau0 grid needs at least one point");
  std::vector<double> grid(std::size_t(count), 0.0);
  for (int k = 1; k <= count; ++k) grid[std::size_t(k - 1)] = 2 * std::numbers::pi * k / (count * nu);
  return grid;
}

}  // namespace

SamplingPlan SamplingPlan::equidistant(int n_max, int tau0_count, double nu) {
  if (n_max < 1) throw Error(Errc::empty_sequence, "sweep needs N >= 1");
  SamplingPlan plan;
  for (int n = 1; n <= n_max; ++n)
    for (double t : tau0_grid(tau0_count, nu)) plan.sequences.push_back(Equidistant{t, n});
  return plan;
}

SamplingPlan SamplingPlan::linear(int n_max, int tau0_count, double nu) {
  if (n_max < 1) throw Error(Errc::empty_sequence, "sweep needs N >= 1");
  SamplingPlan plan;
  for (int n = 1; n <= n_max; ++n)
    for (double t : tau0_grid(tau0_count, nu)) plan.sequences.push_back(Linear{t, n});
  return plan;
}

SamplingPlan SamplingPlan::random(int n_max, int draws, std::uint64_t seed) {
  if (n_max < 1 || draws < 1) throw Error(Errc::empty_sequence, "random sweep needs N >= 1 and draws >= 1");
  SamplingPlan plan;
  plan.sequences.reserve(std::size_t(n_max) * std::size_t(draws));
  for (int n = 1; n <= n_max; ++n)
    for (int k = 0; k < draws; ++k)
      plan.sequences.push_back(RandomFamily{n, seed, (std::uint64_t(n) << 32) | std::uint64_t(k), 0.0, 0.0});
  return plan;
}

void SamplingPlan::append(const SamplingPlan& other) {
  sequences.insert(sequences.end(), other.sequences.begin(), other.sequences.end());
}

void SamplingPlan::validate(double nu) const {
  if (sequences.empty()) throw Error(Errc::empty_sequence, "sampling plan is empty");
  for (const auto& f : sequences) (void)expand_family(f, nu);
}

AccessiblePoint accessible_point(const OscillatorParams& p, const SequenceFamily& family) {
  if (const auto* eq = std::get_if<Equidistant>(&family)) {
    try {
      return {analytic::zeta_equidistant_closed(p, eq->tau0, eq->n), 0u};
    } catch (const Error& e) {
      if (e.code() != Errc::pole) throw;
      return {analytic::zeta(p, expand_family(family, p.nu)), kPole};
    }
  }
  return {analytic::zeta(p, expand_family(family, p.nu)), 0u};
}

std::vector<cdouble> accessible_points(const OscillatorParams& p, const SamplingPlan& plan, int jobs) {
  p.validate();
  plan.validate(p.nu);
  std::vector<cdouble> out(plan.size());
  parallel_for(plan.size(), jobs, [&](std::size_t i) { out[i] = accessible_point(p, plan.sequences[i]).zeta; });
  return out;
}

std::vector<CharacteristicSample> collect_samples(const OscillatorParams& p, const ProbeAmplitudes& probe,
                                                  const SamplingPlan& plan, const ReferenceState& state,
                                                  const CollectOptions& options) {
  p.validate();
  plan.validate(p.nu);
  if (std::abs(probe.coherence()) == 0)
    throw Error(Errc::degenerate_probe, "probe state has no coherence between |+> and |->");
  const SampleSource source = options.mode == SampleMode::oracle ? SampleSource::oracle : SampleSource::analytic;
  std::optional<fock::FockSpace> space;
  fock::Matrix rho0;
  if (options.mode == SampleMode::oracle) {
    space.emplace(options.fock_dim);
    rho0 = state.density_matrix(options.fock_dim);
  }

  std::vector<std::array<CharacteristicSample, 2>> pairs(plan.size());
  std::vector<char> single(plan.size(), 0);
  parallel_for(plan.size(), options.jobs, [&](std::size_t i) {
    const PulseSequence seq = expand_family(plan.sequences[i], p.nu);
    const AccessiblePoint point = accessible_point(p, plan.sequences[i]);
    unsigned flags = point.flags;
    cdouble chi_plus, chi_minus;
    cdouble zeta = point.zeta;
    if (options.mode == SampleMode::oracle) {
      const fock::JointState out = fock::run_sequence(*space, p, probe, seq, rho0, options.dephasing_rate);
      if (out.leakage_flag()) flags |= kTruncation;
      const fock::PauliExpectations pauli = fock::pauli_expectations(out);
      const auto pred = analytic::invert_measurement(p, probe, seq, pauli.minus, pauli.plus, options.dephasing_rate);
      chi_plus = pred.chi_plus;
      chi_minus = pred.chi_minus;
    } else {
      const double e = analytic::scaling_exponent(p, seq);
      const double damping = std::exp(-e) / analytic::dephasing_compensation(options.dephasing_rate, seq.total_time());
      const cdouble exact = state.chi(zeta);
      if (!(damping > 1e-280) || !std::isfinite(damping)) {
        flags |= kUnderflow;
        chi_plus = exact;
        chi_minus = std::conj(exact);
      } else {
        const auto [minus_signal, plus_signal] =
            analytic::forward_pauli(p, probe, seq, exact, options.dephasing_rate);
        const auto pred =
            analytic::invert_measurement(p, probe, seq, minus_signal, plus_signal, options.dephasing_rate);
        chi_plus = pred.chi_plus;
        chi_minus = pred.chi_minus;
      }
    }
    pairs[i][0] = {zeta, chi_plus, source, flags, i};
    pairs[i][1] = {-zeta, chi_minus, source, flags | kConjugate, i};
    single[i] = zeta == cdouble(0) ? 1 : 0;
  });

  std::vector<CharacteristicSample> out;
  out.reserve(2 * plan.size());
  for (std::size_t i = 0; i < plan.size(); ++i) {
    out.push_back(pairs[i][0]);
    if (!single[i]) out.push_back(pairs[i][1]);
  }
  return out;
}

}  // namespace chiprobe::reconstruct
