#include <chiprobe/cli/commands.hpp>
#include <chiprobe/fock/dump.hpp>
#include <chiprobe/fock/identities.hpp>
#include <chiprobe/parallel.hpp>
#include <chiprobe/reconstruct/tomography.hpp>

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <numbers>
#include <ostream>
#include <sstream>

#ifndef CHIPROBE_VERSION
#define CHIPROBE_VERSION "0.0.0"
#endif

namespace chiprobe::cli {

using nlohmann::ordered_json;
namespace fs = std::filesystem;

int exit_code_for(Errc code) {
  switch (code) {
    case Errc::config:
    case Errc::domain:
    case Errc::empty_sequence:
    case Errc::index:
    case Errc::degenerate_probe:
      return kConfigError;
    case Errc::coverage:
    case Errc::grid_mismatch:
      return kCoverageFailure;
    case Errc::pole:
    case Errc::convergence:
      return kConvergenceFailure;
  }
  return kConvergenceFailure;
}

std::string version() { return CHIPROBE_VERSION; }

int sequence_order(const SequenceFamily& family) {
  return std::visit([](const auto& f) { return f.n; }, family);
}

reconstruct::SamplingPlan make_plan(FamilyKind family, const SweepConfig& sweep, int n_max, int draws, double nu) {
  std::vector<double> taus;
  if (!sweep.tau0_values.empty()) {
    for (double v : sweep.tau0_values) taus.push_back(v * std::numbers::pi / nu);
  } else {
    for (int k = 1; k <= sweep.tau0_count; ++k) taus.push_back(2 * std::numbers::pi * k / (sweep.tau0_count * nu));
  }
  reconstruct::SamplingPlan plan;
  for (int n = sweep.n_min; n <= n_max; ++n) {
    switch (family) {
      case FamilyKind::equidistant:
        for (double t : taus) plan.sequences.push_back(Equidistant{t, n});
        break;
      case FamilyKind::linear:
        for (double t : taus) plan.sequences.push_back(Linear{t, n});
        break;
      case FamilyKind::random:
        for (int k = 0; k < draws; ++k)
          plan.sequences.push_back(
              RandomFamily{n, sweep.seed, (std::uint64_t(n) << 32) | std::uint64_t(k), 0.0, 0.0});
        break;
    }
  }
  if (plan.sequences.empty()) throw Error(Errc::config, "empty sweep: no pulse sequences selected");
  return plan;
}

namespace {

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string flag_names(unsigned flags) {
  std::string out;
  auto add = [&](unsigned bit, const char* name) {
    if (flags & bit) out += (out.empty() ? "" : "|") + std::string(name);
  };
  add(reconstruct::kConjugate, "conjugate");
  add(reconstruct::kTruncation, "truncation");
  add(reconstruct::kPole, "pole");
  add(reconstruct::kUnderflow, "underflow");
  return out.empty() ? "none" : out;
}

/// CSV with a commented preamble carrying the tool version, the command and
/// the complete configuration.
class CsvWriter {
 public:
  CsvWriter(const std::string& path, const std::string& command, const RunConfig& config,
            const std::vector<std::string>& columns)
      : out_(path) {
    if (!out_) throw Error(Errc::config, "cannot write '" + path + "'");
    out_ << "# chiprobe " << version() << "\n# command: " << command << "\n";
    std::istringstream ini(config.to_ini());
    for (std::string line; std::getline(ini, line);)
      if (!line.empty()) out_ << "# " << line << "\n";
    for (std::size_t i = 0; i < columns.size(); ++i) out_ << (i ? "," : "") << columns[i];
    out_ << "\n";
  }

  CsvWriter& operator<<(double v) { return cell(num(v)); }
  CsvWriter& operator<<(int v) { return cell(std::to_string(v)); }
  CsvWriter& operator<<(std::size_t v) { return cell(std::to_string(v)); }
  CsvWriter& operator<<(const std::string& v) { return cell(v); }

  void end_row() {
    out_ << "\n";
    first_ = true;
  }

 private:
  CsvWriter& cell(const std::string& text) {
    out_ << (first_ ? "" : ",") << text;
    first_ = false;
    return *this;
  }

  std::ofstream out_;
  bool first_ = true;
};

ordered_json config_json(const RunConfig& config) {
  std::istringstream ini(config.to_ini());
  const ConfigDocument doc = ConfigDocument::parse(ini, "config");
  ordered_json out = ordered_json::object();
  for (const auto& [key, entry] : doc.entries()) {
    const auto dot = key.find('.');
    out[key.substr(0, dot)][key.substr(dot + 1)] = entry.value;
  }
  return out;
}

struct Output {
  const RunConfig& config;
  std::string command;
  CommandResult result;

  Output(const RunConfig& c, std::string cmd) : config(c), command(std::move(cmd)) {
    fs::create_directories(config.output.dir);
  }

  std::string path(const std::string& suffix) {
    const std::string p = (fs::path(config.output.dir) / (config.output.prefix + "_" + suffix)).string();
    result.files.push_back(p);
    return p;
  }

  void manifest(ordered_json extra) {
    ordered_json m;
    m["tool"] = "chiprobe";
    m["version"] = version();
    m["command"] = command;
    m["config"] = config_json(config);
    for (auto it = extra.begin(); it != extra.end(); ++it) m[it.key()] = it.value();
    const std::string p = path(command + ".json");
    m["outputs"] = result.files;
    std::ofstream out(p);
    out << m.dump(2) << "\n";
  }

  void plotscript(const std::string& body) {
    if (!config.output.plotscript) return;
    std::ofstream out(path(command + ".gp"));
    out << "# gnuplot script written by chiprobe " << version() << "\n"
        << "set datafile separator ','\nset key autotitle columnhead\n"
        << body;
  }
};

reconstruct::CollectOptions collect_options(const RunConfig& c) {
  return {c.mode, c.fock_dim, c.dephasing, c.jobs};
}

}  // namespace

CommandResult cmd_points(const RunConfig& config, std::ostream& log) {
  Output out(config, "points");
  const auto plan = make_plan(config.sweep.family, config.sweep, config.sweep.n_max, config.sweep.draws,
                              config.oscillator.nu);
  std::vector<reconstruct::AccessiblePoint> points(plan.size());
  parallel_for(plan.size(), config.jobs,
               [&](std::size_t i) { points[i] = reconstruct::accessible_point(config.oscillator, plan.sequences[i]); });

  const std::string csv = out.path("points.csv");
  CsvWriter w(csv, "points", config,
              {"family", "N", "tau0_or_seed", "sequence_id", "re_zeta", "im_zeta", "abs_zeta", "flags"});
  std::map<int, double> max_abs;
  for (std::size_t i = 0; i < plan.size(); ++i) {
    const auto& f = plan.sequences[i];
    const int n = sequence_order(f);
    w << to_string(family_kind(f)) << n;
    if (const auto* r = std::get_if<RandomFamily>(&f)) {
      w << r->seed;
    } else {
      w << std::visit(
          [](const auto& s) -> double {
            if constexpr (std::is_same_v<std::decay_t<decltype(s)>, RandomFamily>) return 0.0;
            else return s.tau0;
          },
          f);
    }
    const double a = std::abs(points[i].zeta);
    w << i << points[i].zeta.real() << points[i].zeta.imag() << a << flag_names(points[i].flags);
    w.end_row();
    max_abs[n] = std::max(max_abs[n], a);
  }

  ordered_json maxima = ordered_json::array();
  log << "N    max|zeta|\n";
  for (const auto& [n, a] : max_abs) {
    char line[64];
    std::snprintf(line, sizeof line, "%-4d %.10f\n", n, a);
    log << line;
    maxima.push_back({{"N", n}, {"max_abs_zeta", a}});
  }
  out.plotscript("set xlabel 'Re zeta'\nset ylabel 'Im zeta'\nset size ratio -1\nplot '" +
                 fs::path(csv).filename().string() + "' using 5:6 with dots title 'accessible points'\n");
  out.manifest({{"sequences", plan.size()}, {"max_abs_zeta", maxima}});
  return out.result;
}

CommandResult cmd_measure(const RunConfig& config, std::ostream& log) {
  Output out(config, "measure");
  const auto plan = make_plan(config.sweep.family, config.sweep, config.sweep.n_max, config.sweep.draws,
                              config.oscillator.nu);
  const auto samples =
      reconstruct::collect_samples(config.oscillator, config.probe, plan, config.state, collect_options(config));

  const std::string csv = out.path("samples.csv");
  CsvWriter w(csv, "measure", config,
              {"re_beta", "im_beta", "re_chi", "im_chi", "source", "sequence_id", "N", "flags"});
  std::size_t rows = 0, flagged = 0;
  bool origin_written = false;
  for (const auto& s : samples) {
    // Every sequence with zeta = 0 measures chi(0) = 1; report the origin once.
    if (s.beta == cdouble(0)) {
      if (origin_written) continue;
      origin_written = true;
    }
    w << s.beta.real() << s.beta.imag() << s.value.real() << s.value.imag() << reconstruct::to_string(s.source)
      << s.sequence_id << sequence_order(plan.sequences[s.sequence_id]) << flag_names(s.flags);
    w.end_row();
    ++rows;
    if (s.flags & (reconstruct::kTruncation | reconstruct::kPole | reconstruct::kUnderflow)) ++flagged;
  }
  log << "wrote " << rows << " samples from " << plan.size() << " sequences (" << flagged << " flagged)\n";
  out.plotscript("set xlabel 'Re beta'\nset ylabel 'Im beta'\nsplot '" + fs::path(csv).filename().string() +
                 "' using 1:2:3 with dots title 'Re chi'\n");
  out.manifest({{"sequences", plan.size()}, {"samples", rows}, {"flagged", flagged}, {"state", config.state.name()}});
  return out.result;
}

std::vector<FidelityPoint> fidelity_sweep(const RunConfig& config, const std::vector<FamilyKind>& families,
                                          const std::vector<double>& gammas, const std::vector<int>& n_caps,
                                          int draws) {
  if (n_caps.empty()) throw Error(Errc::config, "fidelity sweep needs at least one N cap");
  const int n_max = *std::max_element(n_caps.begin(), n_caps.end());
  SweepConfig sweep = config.sweep;
  sweep.n_min = 1;
  const reconstruct::ChiGrid exact =
      reconstruct::sample_grid(config.grid.spec, [&](cdouble b) { return config.state.chi(b); });
  std::vector<FidelityPoint> rows;
  for (FamilyKind family : families) {
    const auto plan = make_plan(family, sweep, n_max, draws, config.oscillator.nu);
    for (double gamma : gammas) {
      OscillatorParams p = config.oscillator;
      p.gamma = gamma;
      const auto samples = reconstruct::collect_samples(p, config.probe, plan, config.state, collect_options(config));
      for (int cap : n_caps) {
        FidelityPoint row{family, gamma, cap, std::numeric_limits<double>::quiet_NaN(), 0, "ok"};
        std::vector<reconstruct::CharacteristicSample> kept;
        for (const auto& s : samples)
          if (sequence_order(plan.sequences[s.sequence_id]) <= cap) kept.push_back(s);
        try {
          reconstruct::InterpolationReport report;
          const auto chi = reconstruct::interpolate_chi(kept, config.grid.spec, {config.grid.method, 1e-12, 1.0},
                                                        &report);
          row.fidelity = reconstruct::chi_overlap(exact, chi);
          row.distinct_points = report.distinct_points;
        } catch (const Error& e) {
          if (e.code() != Errc::coverage) throw;
          row.status = "coverage";
        }
        rows.push_back(row);
      }
    }
  }
  return rows;
}

CommandResult cmd_reconstruct(const RunConfig& config, std::ostream& log) {
  Output out(config, "reconstruct");
  const auto plan = make_plan(config.sweep.family, config.sweep, config.sweep.n_max, config.sweep.draws,
                              config.oscillator.nu);
  const auto samples =
      reconstruct::collect_samples(config.oscillator, config.probe, plan, config.state, collect_options(config));
  reconstruct::InterpolationReport report;
  const auto chi =
      reconstruct::interpolate_chi(samples, config.grid.spec, {config.grid.method, 1e-12, 1.0}, &report);
  reconstruct::ReconstructOptions ropts;
  ropts.tail_tolerance = config.grid.tail_tolerance;
  const auto result = reconstruct::reconstruct_rho(chi, config.grid.output_dim, ropts);
  const auto fid = reconstruct::fidelity(config.state, chi, &result.rho_tilde);

  const std::string stem = (fs::path(config.output.dir) / (config.output.prefix + "_rho_tilde")).string();
  fock::dump_matrix(stem, result.rho_tilde, "rho_tilde", config.oscillator, config.grid.output_dim, 0.0);
  out.result.files.push_back(stem + ".npy");
  out.result.files.push_back(stem + ".json");
  if (config.grid.project) {
    const std::string pstem = (fs::path(config.output.dir) / (config.output.prefix + "_rho_projected")).string();
    fock::dump_matrix(pstem, reconstruct::nearest_density_matrix(result.rho_tilde), "rho_projected",
                      config.oscillator, config.grid.output_dim, 0.0);
    out.result.files.push_back(pstem + ".npy");
    out.result.files.push_back(pstem + ".json");
  }
  char line[256];
  std::snprintf(line, sizeof line,
                "%s, %s family, N <= %d: F(chi overlap) = %.6f, F(<phi|rho|phi>) = %.6f, trace error %.2e, "
                "min eigenvalue %.2e\n",
                config.state.name().c_str(), to_string(config.sweep.family).c_str(), config.sweep.n_max,
                fid.chi_overlap, *fid.pure_state, result.residuals.trace_error, result.residuals.min_eigenvalue);
  log << line;

  const auto gammas = config.fidelity.gamma_grid();
  const auto rows =
      fidelity_sweep(config, config.fidelity.families, gammas, config.fidelity.n_caps, config.fidelity.draws);
  const std::string csv = out.path("fidelity.csv");
  CsvWriter w(csv, "reconstruct", config, {"family", "gamma", "n_cap", "fidelity", "distinct_points", "status"});
  for (const auto& r : rows) {
    w << to_string(r.family) << r.gamma << r.n_cap << r.fidelity << r.distinct_points << r.status;
    w.end_row();
    std::snprintf(line, sizeof line, "  %-12s gamma %-10.4g N <= %-3d F = %.6f%s\n", to_string(r.family).c_str(),
                  r.gamma, r.n_cap, r.fidelity, r.status == "ok" ? "" : "  (coverage)");
    log << line;
  }

  std::string plot = "set logscale x\nset xlabel 'gamma / nu'\nset ylabel 'F'\nplot ";
  bool first = true;
  for (std::size_t fi = 0; fi < config.fidelity.families.size(); ++fi)
    for (int cap : config.fidelity.n_caps) {
      const std::string fam = to_string(config.fidelity.families[fi]);
      plot += std::string(first ? "" : ", \\\n     ") + "'" + fs::path(csv).filename().string() +
              "' using (strcol(1) eq '" + fam + "' && $3 == " + std::to_string(cap) +
              " ? $2 : NaN):4 with linespoints title '" + fam + " N<=" + std::to_string(cap) + "'";
      first = false;
    }
  out.plotscript(plot + "\n");

  const auto& d = result.residuals;
  out.manifest({{"state", config.state.name()},
                {"fidelity_chi_overlap", fid.chi_overlap},
                {"fidelity_pure_state", *fid.pure_state},
                {"grid", {{"extent", config.grid.spec.extent}, {"spacing", config.grid.spec.spacing}}},
                {"distinct_points", report.distinct_points},
                {"radial_fallback", report.radial_fallback},
                {"diagnostics",
                 {{"hermiticity", d.hermiticity},
                  {"trace_error", d.trace_error},
                  {"min_eigenvalue", d.min_eigenvalue},
                  {"tail_ratio", d.tail_ratio},
                  {"path_difference", d.path_difference},
                  {"nonphysical", d.nonphysical}}}});
  return out.result;
}

CommandResult cmd_verify(const RunConfig& config, std::ostream& log) {
  Output out(config, "verify");
  fock::IdentityConfig icfg;
  icfg.params = {config.oscillator.nu, config.verify.gamma, config.verify.nbar, config.verify.g};
  icfg.threshold = config.verify.threshold;
  const auto study = fock::identity_convergence(config.verify.dims, icfg);

  const std::string csv = out.path("verify.csv");
  CsvWriter w(csv, "verify", config, {"dim", "identity", "residual", "threshold", "passed"});
  ordered_json runs = ordered_json::array();
  std::vector<std::string> failed_final;
  char line[160];
  for (std::size_t k = 0; k < study.dims.size(); ++k) {
    log << "d = " << study.dims[k] << "\n";
    ordered_json entries = ordered_json::array();
    for (const auto& r : study.runs[k]) {
      w << study.dims[k] << r.name << r.residual << r.threshold << std::string(r.passed() ? "true" : "false");
      w.end_row();
      std::snprintf(line, sizeof line, "  %-32s %.3e  %s\n", r.name.c_str(), r.residual,
                    r.passed() ? "ok" : "NOT CONVERGED");
      log << line;
      entries.push_back({{"identity", r.name}, {"residual", r.residual}, {"threshold", r.threshold},
                         {"passed", r.passed()}});
      if (k + 1 == study.dims.size() && !r.passed()) failed_final.push_back(r.name);
    }
    runs.push_back({{"dim", study.dims[k]}, {"identities", entries}});
  }
  const bool monotone = study.dims.size() < 2 || study.monotone();
  if (study.dims.size() > 1)
    log << "residuals " << (monotone ? "shrink" : "do NOT shrink") << " monotonically over the truncations\n";
  if (!failed_final.empty()) {
    log << failed_final.size() << " identit" << (failed_final.size() == 1 ? "y" : "ies")
        << " not converged at d = " << study.dims.back() << ":";
    for (const auto& n : failed_final) log << " " << n;
    log << "\n";
  }
  out.plotscript("set logscale y\nset xlabel 'Fock truncation d'\nset ylabel 'residual'\nplot '" +
                 fs::path(csv).filename().string() + "' using 1:3 with points title 'identity residuals'\n");
  out.manifest({{"runs", runs}, {"monotone", monotone}, {"not_converged", failed_final}});
  out.result.exit_code = failed_final.empty() && monotone ? kSuccess : kConvergenceFailure;
  return out.result;
}

}  // namespace chiprobe::cli
