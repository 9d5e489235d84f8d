#pragma once

// Run configuration: an INI-style document of [section] key = value lines,
// overridable from the command line and two environment variables.

#include <chiprobe/model.hpp>
#include <chiprobe/reconstruct/interpolate.hpp>
#include <chiprobe/reconstruct/samples.hpp>
#include <chiprobe/states.hpp>

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

namespace chiprobe::cli {

/// Raw key-value document. Keys are "section.key"; every entry remembers where
/// it came from so validation errors can point at the offending line.
class ConfigDocument {
 public:
  struct Entry {
    std::string value;
    std::string origin;  ///< file name, "--set", or an environment variable
    int line = 0;        ///< 0 when not from a file
  };

  static ConfigDocument parse(std::istream& in, const std::string& origin);
  static ConfigDocument load(const std::string& path);

  /// Adds or replaces section.key.
  void set(const std::string& key, const std::string& value, const std::string& origin);
  bool has(const std::string& key) const { return entries_.count(key) != 0; }
  const std::map<std::string, Entry>& entries() const { return entries_; }

 private:
  std::map<std::string, Entry> entries_;
};

struct SweepConfig {
  FamilyKind family = FamilyKind::equidistant;
  int n_min = 1;
  int n_max = 20;
  int tau0_count = 200;            ///< tau0 = 2 pi k / (count nu), k = 1..count
  std::vector<double> tau0_values; ///< explicit tau0 list in units of pi / nu; overrides the grid
  int draws = 10000;               ///< random family draws per N
  std::uint64_t seed = 1;
};

struct GridConfig {
  reconstruct::GridSpec spec{6.0, 0.08};
  reconstruct::InterpolationMethod method = reconstruct::InterpolationMethod::cubic;
  int output_dim = 30;
  double tail_tolerance = 1e-3;
  bool project = false;  ///< also write the nearest density matrix
};

struct FidelitySweepConfig {
  std::vector<FamilyKind> families{FamilyKind::equidistant, FamilyKind::random, FamilyKind::linear};
  std::vector<double> gammas;  ///< log grid from gamma_min..gamma_max when empty
  double gamma_min = 1e-4;
  double gamma_max = 1.0;
  int gamma_points = 12;
  std::vector<int> n_caps{10, 20};
  int draws = 2000;  ///< random family draws per N inside the sweep

  std::vector<double> gamma_grid() const;
};

struct VerifyConfig {
  std::vector<int> dims{30, 40, 50, 60};
  double threshold = 1e-6;
  /// Oscillator used by the identity suite; nu comes from [oscillator].
  double gamma = 0.05;
  double nbar = 0.2;
  double g = 0.3;
};

struct OutputConfig {
  std::string dir = "chiprobe-out";
  std::string prefix = "run";
  bool plotscript = false;
};

struct RunConfig {
  OscillatorParams oscillator{1.0, 1e-4, 0.0, 0.075};
  ProbeAmplitudes probe;
  SweepConfig sweep;
  ReferenceState state{Coherent{}};
  reconstruct::SampleMode mode = reconstruct::SampleMode::analytic;
  int fock_dim = 30;
  double dephasing = 0;
  GridConfig grid;
  FidelitySweepConfig fidelity;
  VerifyConfig verify;
  OutputConfig output;
  int jobs = 1;

  /// Canonical [section] key = value rendering of every setting.
  std::string to_ini() const;
};

/// Builds and validates a configuration. Unknown sections or keys, malformed
/// values and violated preconditions throw Errc::config naming origin and line.
RunConfig build_config(const ConfigDocument& doc);

/// Applies CHIPROBE_OUTPUT_DIR and CHIPROBE_JOBS when set.
void apply_environment(ConfigDocument& doc);

/// Every accepted key with its default, in file order.
std::vector<std::pair<std::string, std::string>> config_keys();

}  // namespace chiprobe::cli
