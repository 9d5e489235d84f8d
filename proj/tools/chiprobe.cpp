// chiprobe: pulsed probe measurement of a thermalizing oscillator's
// characteristic function.

#include <chiprobe/cli/commands.hpp>

#include <CLI11.hpp>

#include <iostream>

namespace {

using namespace chiprobe;

cli::CommandResult dispatch(const std::string& command, const cli::RunConfig& config) {
  if (command == "points") return cli::cmd_points(config, std::cout);
  if (command == "measure") return cli::cmd_measure(config, std::cout);
  if (command == "reconstruct") return cli::cmd_reconstruct(config, std::cout);
  return cli::cmd_verify(config, std::cout);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Direct measurement of the Wigner characteristic function of a thermalizing oscillator"};
  app.set_version_flag("--version", cli::version());
  app.require_subcommand(1);
  app.fallthrough();  // global options may follow the subcommand name

  std::string config_path, output_dir, mode;
  std::vector<std::string> overrides;
  int jobs = -1;
  bool plotscript = false, print_config = false;
  app.add_option("-c,--config", config_path, "configuration file ([section] key = value)")->check(CLI::ExistingFile);
  app.add_option("--set", overrides, "override one setting, e.g. --set oscillator.gamma=1e-2 (repeatable)");
  app.add_option("-o,--output-dir", output_dir, "output directory (env CHIPROBE_OUTPUT_DIR)");
  app.add_option("-j,--jobs", jobs, "worker threads, 0 for all hardware threads (env CHIPROBE_JOBS)")
      ->check(CLI::Range(0, 1024));
  app.add_option("--mode", mode, "sample source: analytic or oracle")->check(CLI::IsMember({"analytic", "oracle"}));
  app.add_flag("--emit-plotscript", plotscript, "also write a gnuplot script next to the data");
  app.add_flag("--print-config", print_config, "print the effective configuration before running");

  app.add_subcommand("points", "accessible points zeta(tau) for the configured sweep");
  app.add_subcommand("measure", "characteristic-function samples from the configured sweep");
  app.add_subcommand("reconstruct", "interpolate, reconstruct rho and tabulate fidelities over a gamma sweep");
  app.add_subcommand("verify", "truncated-Fock identity suite with convergence report");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : cli::kConfigError;
  }

  try {
    cli::ConfigDocument doc = config_path.empty() ? cli::ConfigDocument{} : cli::ConfigDocument::load(config_path);
    cli::apply_environment(doc);
    for (const auto& item : overrides) {
      const auto eq = item.find('=');
      if (eq == std::string::npos || item.find('.') > eq)
        throw Error(Errc::config, "--set expects section.key=value, got '" + item + "'");
      doc.set(item.substr(0, eq), item.substr(eq + 1), "--set " + item);
    }
    if (!output_dir.empty()) doc.set("output.dir", output_dir, "--output-dir");
    if (jobs >= 0) doc.set("run.jobs", std::to_string(jobs), "--jobs");
    if (!mode.empty()) doc.set("run.mode", mode, "--mode");
    if (plotscript) doc.set("output.plotscript", "true", "--emit-plotscript");

    const cli::RunConfig config = cli::build_config(doc);
    if (print_config) std::cout << config.to_ini() << "\n";
    const auto result = dispatch(app.get_subcommands().front()->get_name(), config);
    for (const auto& f : result.files) std::cerr << "wrote " << f << "\n";
    return result.exit_code;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return cli::exit_code_for(e.code());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return cli::kConvergenceFailure;
  }
}
