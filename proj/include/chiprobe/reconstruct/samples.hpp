#pragma once

// Characteristic-function samples produced by pulse-sequence sweeps.

#include <chiprobe/model.hpp>
#include <chiprobe/states.hpp>

#include <cstdint>
#include <string>
#include <vector>

namespace chiprobe::reconstruct {

enum class SampleSource { analytic, oracle, external };

std::string to_string(SampleSource source);
SampleSource parse_sample_source(const std::string& name);

/// Bit flags attached to a sample.
enum SampleFlag : unsigned {
  kConjugate = 1u << 0,   ///< obtained at -zeta from the <sigma_x + i sigma_y> signal
  kTruncation = 1u << 1,  ///< oracle truncation leakage above the limit
  kPole = 1u << 2,        ///< closed form hit a pole and fell back to the sum
  kUnderflow = 1u << 3,   ///< probe signal underflows; value taken from the model directly
};

struct CharacteristicSample {
  cdouble beta;
  cdouble value;
  SampleSource source = SampleSource::analytic;
  unsigned flags = 0;
  std::size_t sequence_id = 0;
};

/// Ordered list of pulse sequences to run.
struct SamplingPlan {
  std::vector<SequenceFamily> sequences;

  /// Equidistant(tau0, N) for N = 1..n_max and tau0 = 2 pi k / (count nu), k = 1..count.
  static SamplingPlan equidistant(int n_max, int tau0_count, double nu = 1.0);
  /// Linear(tau0, N) on the same tau0 grid.
  static SamplingPlan linear(int n_max, int tau0_count, double nu = 1.0);
  /// `draws` random sequences per N = 1..n_max; draw k of length N uses stream (N << 32) | k.
  static SamplingPlan random(int n_max, int draws, std::uint64_t seed);

  void append(const SamplingPlan& other);
  std::size_t size() const { return sequences.size(); }
  /// Throws unless the plan is nonempty and every entry expands.
  void validate(double nu = 1.0) const;
};

enum class SampleMode { analytic, oracle };

std::string to_string(SampleMode mode);
SampleMode parse_sample_mode(const std::string& name);

struct CollectOptions {
  SampleMode mode = SampleMode::analytic;
  int fock_dim = 30;          ///< oracle truncation
  double dephasing_rate = 0;  ///< probe dephasing, compensated on inversion
  int jobs = 1;
};

/// Samples at +zeta(tau) and -zeta(tau) for every sequence of the plan, in plan
/// order. A sequence with zeta = 0 contributes a single sample.
std::vector<CharacteristicSample> collect_samples(const OscillatorParams& p, const ProbeAmplitudes& probe,
                                                  const SamplingPlan& plan, const ReferenceState& state,
                                                  const CollectOptions& options);

struct AccessiblePoint {
  cdouble zeta;
  unsigned flags = 0;  ///< kPole when the closed form fell back to the sum
};

/// zeta(tau) of one family member; equidistant members use the closed form.
AccessiblePoint accessible_point(const OscillatorParams& p, const SequenceFamily& family);

/// zeta(tau) for every sequence of the plan, in plan order.
std::vector<cdouble> accessible_points(const OscillatorParams& p, const SamplingPlan& plan, int jobs = 1);

}  // namespace chiprobe::reconstruct
