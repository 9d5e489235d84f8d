#include <chiprobe/cli/config.hpp>
#include <chiprobe/parallel.hpp>

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <set>
#include <sstream>

namespace chiprobe::cli {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::string where(const ConfigDocument::Entry& e) {
  return e.line > 0 ? e.origin + ":" + std::to_string(e.line) : e.origin;
}

[[noreturn]] void fail(const std::string& key, const ConfigDocument::Entry& e, const std::string& why) {
  throw Error(Errc::config, where(e) + ": " + key + " = '" + e.value + "': " + why);
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

template <typename T>
std::string join(const std::vector<T>& xs, std::string (*f)(T)) {
  std::string out;
  for (std::size_t i = 0; i < xs.size(); ++i) out += (i ? ", " : "") + f(xs[i]);
  return out;
}

std::string fmt_int(int v) { return std::to_string(v); }
std::string fmt_family(FamilyKind k) { return to_string(k); }

}  // namespace

ConfigDocument ConfigDocument::parse(std::istream& in, const std::string& origin) {
  ConfigDocument doc;
  std::string raw, section;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    auto hash = raw.find_first_of("#;");
    const std::string text = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (text.empty()) continue;
    if (text.front() == '[') {
      if (text.back() != ']' || text.size() < 3)
        throw Error(Errc::config, origin + ":" + std::to_string(line) + ": malformed section header '" + text + "'");
      section = trim(text.substr(1, text.size() - 2));
      continue;
    }
    const auto eq = text.find('=');
    if (eq == std::string::npos)
      throw Error(Errc::config, origin + ":" + std::to_string(line) + ": expected 'key = value', got '" + text + "'");
    if (section.empty())
      throw Error(Errc::config, origin + ":" + std::to_string(line) + ": key outside of any [section]");
    const std::string key = section + "." + trim(text.substr(0, eq));
    if (doc.has(key))
      throw Error(Errc::config, origin + ":" + std::to_string(line) + ": duplicate key '" + key + "' (first at line " +
                                    std::to_string(doc.entries_.at(key).line) + ")");
    doc.entries_[key] = {trim(text.substr(eq + 1)), origin, line};
  }
  return doc;
}

ConfigDocument ConfigDocument::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::config, "cannot open config file '" + path + "'");
  return parse(in, path);
}

void ConfigDocument::set(const std::string& key, const std::string& value, const std::string& origin) {
  entries_[key] = {value, origin, 0};
}

void apply_environment(ConfigDocument& doc) {
  if (const char* dir = std::getenv("CHIPROBE_OUTPUT_DIR"); dir && *dir)
    doc.set("output.dir", dir, "CHIPROBE_OUTPUT_DIR");
  if (const char* jobs = std::getenv("CHIPROBE_JOBS"); jobs && *jobs) doc.set("run.jobs", jobs, "CHIPROBE_JOBS");
}

std::vector<double> FidelitySweepConfig::gamma_grid() const {
  if (!gammas.empty()) return gammas;
  std::vector<double> out;
  if (gamma_points == 1) return {gamma_min};
  for (int i = 0; i < gamma_points; ++i)
    out.push_back(gamma_min * std::pow(gamma_max / gamma_min, double(i) / double(gamma_points - 1)));
  return out;
}

std::vector<std::pair<std::string, std::string>> config_keys() {
  return {
      {"oscillator.nu", "1"},
      {"oscillator.gamma", "1e-4"},
      {"oscillator.nbar", "0"},
      {"oscillator.temperature_ratio", ""},
      {"oscillator.g", "0.075"},
      {"probe.plus_re", "1"},
      {"probe.plus_im", "0"},
      {"probe.minus_re", "1"},
      {"probe.minus_im", "0"},
      {"sweep.family", "equidistant"},
      {"sweep.n_min", "1"},
      {"sweep.n_max", "20"},
      {"sweep.tau0_count", "200"},
      {"sweep.tau0_values", ""},
      {"sweep.draws", "10000"},
      {"sweep.seed", "1"},
      {"state.kind", "coherent"},
      {"state.alpha_re", "1.5"},
      {"state.alpha_im", "0"},
      {"state.n1", "1"},
      {"state.n2", "3"},
      {"state.c1", "1"},
      {"state.c2", "1"},
      {"run.mode", "analytic"},
      {"run.fock_dim", "30"},
      {"run.dephasing", "0"},
      {"run.jobs", "1"},
      {"grid.extent", "6"},
      {"grid.spacing", "0.08"},
      {"grid.method", "cubic"},
      {"grid.output_dim", "30"},
      {"grid.tail_tolerance", "1e-3"},
      {"grid.project", "false"},
      {"fidelity.families", "equidistant, random, linear"},
      {"fidelity.gammas", ""},
      {"fidelity.gamma_min", "1e-4"},
      {"fidelity.gamma_max", "1"},
      {"fidelity.gamma_points", "12"},
      {"fidelity.n_caps", "10, 20"},
      {"fidelity.draws", "2000"},
      {"verify.dims", "30, 40, 50, 60"},
      {"verify.threshold", "1e-6"},
      {"verify.gamma", "0.05"},
      {"verify.nbar", "0.2"},
      {"verify.g", "0.3"},
      {"output.dir", "chiprobe-out"},
      {"output.prefix", "run"},
      {"output.plotscript", "false"},
  };
}

namespace {

class Reader {
 public:
  explicit Reader(const ConfigDocument& doc) {
    std::set<std::string> known;
    for (const auto& [key, def] : config_keys()) {
      known.insert(key);
      values_[key] = {def, "default", 0};
    }
    for (const auto& [key, entry] : doc.entries()) {
      if (!known.count(key)) {
        const auto dot = key.find('.');
        const std::string section = key.substr(0, dot);
        const bool section_known = std::any_of(known.begin(), known.end(), [&](const std::string& k) {
          return k.compare(0, section.size() + 1, section + ".") == 0;
        });
        throw Error(Errc::config, where(entry) + ": " +
                                      (section_known ? "unknown key '" + key.substr(dot + 1) + "' in [" + section + "]"
                                                     : "unknown section [" + section + "]"));
      }
      values_[key] = entry;
    }
  }

  const ConfigDocument::Entry& entry(const std::string& key) const { return values_.at(key); }
  const std::string& str(const std::string& key) const { return entry(key).value; }
  bool given(const std::string& key) const { return entry(key).origin != "default"; }

  double real(const std::string& key) const {
    const auto& e = entry(key);
    char* end = nullptr;
    const double v = std::strtod(e.value.c_str(), &end);
    if (e.value.empty() || *end != '\0' || !std::isfinite(v)) fail(key, e, "expected a finite number");
    return v;
  }

  long long integer(const std::string& key) const {
    const auto& e = entry(key);
    long long v = 0;
    const auto [ptr, ec] = std::from_chars(e.value.data(), e.value.data() + e.value.size(), v);
    if (ec != std::errc() || ptr != e.value.data() + e.value.size()) fail(key, e, "expected an integer");
    return v;
  }

  bool boolean(const std::string& key) const {
    const auto& e = entry(key);
    std::string v = e.value;
    std::transform(v.begin(), v.end(), v.begin(), [](unsigned char c) { return char(std::tolower(c)); });
    if (v == "true" || v == "yes" || v == "1" || v == "on") return true;
    if (v == "false" || v == "no" || v == "0" || v == "off") return false;
    fail(key, e, "expected true or false");
  }

  std::vector<std::string> list(const std::string& key) const {
    std::vector<std::string> out;
    std::stringstream ss(str(key));
    std::string item;
    while (std::getline(ss, item, ','))
      if (!trim(item).empty()) out.push_back(trim(item));
    return out;
  }

  std::vector<double> reals(const std::string& key) const {
    std::vector<double> out;
    for (const auto& item : list(key)) {
      char* end = nullptr;
      const double v = std::strtod(item.c_str(), &end);
      if (*end != '\0' || !std::isfinite(v)) fail(key, entry(key), "expected a comma-separated list of numbers");
      out.push_back(v);
    }
    return out;
  }

  std::vector<int> ints(const std::string& key) const {
    std::vector<int> out;
    for (const auto& item : list(key)) {
      int v = 0;
      const auto [ptr, ec] = std::from_chars(item.data(), item.data() + item.size(), v);
      if (ec != std::errc() || ptr != item.data() + item.size())
        fail(key, entry(key), "expected a comma-separated list of integers");
      out.push_back(v);
    }
    return out;
  }

  void require(bool ok, const std::string& key, const std::string& why) const {
    if (!ok) fail(key, entry(key), why);
  }

 private:
  std::map<std::string, ConfigDocument::Entry> values_;
};

}  // namespace

RunConfig build_config(const ConfigDocument& doc) {
  const Reader r(doc);
  RunConfig c;

  c.oscillator.nu = r.real("oscillator.nu");
  r.require(c.oscillator.nu > 0, "oscillator.nu", "must be positive");
  c.oscillator.gamma = r.real("oscillator.gamma");
  r.require(c.oscillator.gamma >= 0, "oscillator.gamma", "must be nonnegative");
  c.oscillator.g = r.real("oscillator.g");
  r.require(c.oscillator.g >= 0, "oscillator.g", "must be nonnegative");
  c.oscillator.nbar = r.real("oscillator.nbar");
  r.require(c.oscillator.nbar >= 0, "oscillator.nbar", "must be nonnegative");
  if (!r.str("oscillator.temperature_ratio").empty()) {
    r.require(!r.given("oscillator.nbar"), "oscillator.temperature_ratio", "give either nbar or temperature_ratio");
    const double x = r.real("oscillator.temperature_ratio");
    r.require(x > 0, "oscillator.temperature_ratio", "must be positive");
    c.oscillator.nbar = nbar_from_ratio(x);
  }

  try {
    c.probe = ProbeAmplitudes::normalized({r.real("probe.plus_re"), r.real("probe.plus_im")},
                                          {r.real("probe.minus_re"), r.real("probe.minus_im")});
  } catch (const Error& e) {
    fail("probe.plus_re", r.entry("probe.plus_re"), e.what());
  }
  r.require(std::abs(c.probe.coherence()) > 0, "probe.plus_re",
            "probe needs both |+> and |-> components (degenerate probe)");

  try {
    c.sweep.family = parse_family_kind(r.str("sweep.family"));
  } catch (const Error&) {
    fail("sweep.family", r.entry("sweep.family"), "expected equidistant, random or linear");
  }
  c.sweep.n_min = int(r.integer("sweep.n_min"));
  c.sweep.n_max = int(r.integer("sweep.n_max"));
  r.require(c.sweep.n_min >= 1, "sweep.n_min", "must be at least 1");
  r.require(c.sweep.n_max >= c.sweep.n_min, "sweep.n_max", "empty sweep: n_max is below n_min");
  r.require(c.sweep.n_max <= 10000, "sweep.n_max", "must not exceed 10000");
  c.sweep.tau0_count = int(r.integer("sweep.tau0_count"));
  r.require(c.sweep.tau0_count >= 1, "sweep.tau0_count", "empty sweep: needs at least one tau0");
  c.sweep.tau0_values = r.reals("sweep.tau0_values");
  for (double t : c.sweep.tau0_values) r.require(t > 0, "sweep.tau0_values", "durations must be positive");
  c.sweep.draws = int(r.integer("sweep.draws"));
  r.require(c.sweep.draws >= 1, "sweep.draws", "empty sweep: needs at least one draw");
  r.require(r.integer("sweep.seed") >= 0, "sweep.seed", "must be nonnegative");
  c.sweep.seed = std::uint64_t(r.integer("sweep.seed"));

  const std::string kind = r.str("state.kind");
  const cdouble alpha{r.real("state.alpha_re"), r.real("state.alpha_im")};
  try {
    if (kind == "coherent") {
      c.state = ReferenceState(Coherent{alpha});
    } else if (kind == "cat") {
      c.state = ReferenceState(Cat{alpha});
    } else if (kind == "fock_pair") {
      const double c1 = r.real("state.c1"), c2 = r.real("state.c2");
      const double norm = std::hypot(c1, c2);
      r.require(norm > 0, "state.c1", "Fock pair amplitudes must not both vanish");
      c.state = ReferenceState(FockPair{int(r.integer("state.n1")), int(r.integer("state.n2")), c1 / norm, c2 / norm});
    } else {
      fail("state.kind", r.entry("state.kind"), "expected coherent, cat or fock_pair");
    }
  } catch (const Error& e) {
    if (e.code() == Errc::config) throw;
    fail("state.kind", r.entry("state.kind"), e.what());
  }

  try {
    c.mode = reconstruct::parse_sample_mode(r.str("run.mode"));
  } catch (const Error&) {
    fail("run.mode", r.entry("run.mode"), "expected analytic or oracle");
  }
  c.fock_dim = int(r.integer("run.fock_dim"));
  r.require(c.fock_dim >= 2 && c.fock_dim <= 400, "run.fock_dim", "must lie in [2, 400]");
  c.dephasing = r.real("run.dephasing");
  r.require(c.dephasing >= 0, "run.dephasing", "must be nonnegative");
  const long long jobs = r.integer("run.jobs");
  r.require(jobs >= 0 && jobs <= 1024, "run.jobs", "must lie in [0, 1024]; 0 uses every hardware thread");
  c.jobs = resolve_jobs(int(jobs));

  c.grid.spec = {r.real("grid.extent"), r.real("grid.spacing")};
  r.require(c.grid.spec.extent > 0, "grid.extent", "must be positive");
  r.require(c.grid.spec.spacing > 0 && c.grid.spec.size() <= 4001, "grid.spacing",
            "must be positive with at most 4001 points per axis");
  try {
    c.grid.method = reconstruct::parse_interpolation_method(r.str("grid.method"));
  } catch (const Error&) {
    fail("grid.method", r.entry("grid.method"), "expected linear or cubic");
  }
  c.grid.output_dim = int(r.integer("grid.output_dim"));
  r.require(c.grid.output_dim >= 1 && c.grid.output_dim <= 200, "grid.output_dim", "must lie in [1, 200]");
  c.grid.tail_tolerance = r.real("grid.tail_tolerance");
  r.require(c.grid.tail_tolerance > 0, "grid.tail_tolerance", "must be positive");
  c.grid.project = r.boolean("grid.project");

  c.fidelity.families.clear();
  for (const auto& name : r.list("fidelity.families")) {
    try {
      c.fidelity.families.push_back(parse_family_kind(name));
    } catch (const Error&) {
      fail("fidelity.families", r.entry("fidelity.families"), "unknown family '" + name + "'");
    }
  }
  r.require(!c.fidelity.families.empty(), "fidelity.families", "needs at least one family");
  c.fidelity.gammas = r.reals("fidelity.gammas");
  for (double g : c.fidelity.gammas) r.require(g >= 0, "fidelity.gammas", "rates must be nonnegative");
  c.fidelity.gamma_min = r.real("fidelity.gamma_min");
  c.fidelity.gamma_max = r.real("fidelity.gamma_max");
  c.fidelity.gamma_points = int(r.integer("fidelity.gamma_points"));
  r.require(c.fidelity.gamma_min > 0, "fidelity.gamma_min", "must be positive for a log grid");
  r.require(c.fidelity.gamma_max >= c.fidelity.gamma_min, "fidelity.gamma_max", "must not be below gamma_min");
  r.require(c.fidelity.gamma_points >= 1, "fidelity.gamma_points", "must be at least 1");
  c.fidelity.n_caps = r.ints("fidelity.n_caps");
  r.require(!c.fidelity.n_caps.empty(), "fidelity.n_caps", "needs at least one cap");
  for (int cap : c.fidelity.n_caps) r.require(cap >= 1, "fidelity.n_caps", "caps must be at least 1");
  c.fidelity.draws = int(r.integer("fidelity.draws"));
  r.require(c.fidelity.draws >= 1, "fidelity.draws", "must be at least 1");

  c.verify.dims = r.ints("verify.dims");
  r.require(!c.verify.dims.empty(), "verify.dims", "needs at least one truncation");
  for (int d : c.verify.dims) r.require(d >= 4 && d <= 200, "verify.dims", "truncations must lie in [4, 200]");
  c.verify.threshold = r.real("verify.threshold");
  r.require(c.verify.threshold > 0, "verify.threshold", "must be positive");
  c.verify.gamma = r.real("verify.gamma");
  c.verify.nbar = r.real("verify.nbar");
  c.verify.g = r.real("verify.g");
  r.require(c.verify.gamma >= 0, "verify.gamma", "must be nonnegative");
  r.require(c.verify.nbar >= 0, "verify.nbar", "must be nonnegative");
  r.require(c.verify.g >= 0, "verify.g", "must be nonnegative");

  c.output.dir = r.str("output.dir");
  r.require(!c.output.dir.empty(), "output.dir", "must not be empty");
  c.output.prefix = r.str("output.prefix");
  r.require(!c.output.prefix.empty() && c.output.prefix.find('/') == std::string::npos, "output.prefix",
            "must be a plain file name stem");
  c.output.plotscript = r.boolean("output.plotscript");
  return c;
}

std::string RunConfig::to_ini() const {
  std::ostringstream out;
  out << "[oscillator]\nnu = " << fmt(oscillator.nu) << "\ngamma = " << fmt(oscillator.gamma)
      << "\nnbar = " << fmt(oscillator.nbar) << "\ng = " << fmt(oscillator.g) << "\n\n";
  out << "[probe]\nplus_re = " << fmt(probe.plus().real()) << "\nplus_im = " << fmt(probe.plus().imag())
      << "\nminus_re = " << fmt(probe.minus().real()) << "\nminus_im = " << fmt(probe.minus().imag()) << "\n\n";
  out << "[sweep]\nfamily = " << to_string(sweep.family) << "\nn_min = " << sweep.n_min << "\nn_max = " << sweep.n_max
      << "\ntau0_count = " << sweep.tau0_count << "\ntau0_values = " << join<double>(sweep.tau0_values, &fmt)
      << "\ndraws = " << sweep.draws << "\nseed = " << sweep.seed << "\n\n";
  out << "[state]\n";
  std::visit(
      [&](const auto& s) {
        using S = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<S, FockPair>) {
          out << "kind = fock_pair\nn1 = " << s.n1 << "\nn2 = " << s.n2 << "\nc1 = " << fmt(s.c1.real())
              << "\nc2 = " << fmt(s.c2.real()) << "\n\n";
        } else {
          out << "kind = " << (std::is_same_v<S, Coherent> ? "coherent" : "cat") << "\nalpha_re = "
              << fmt(s.alpha.real()) << "\nalpha_im = " << fmt(s.alpha.imag()) << "\n\n";
        }
      },
      state.kind());
  out << "[run]\nmode = " << reconstruct::to_string(mode) << "\nfock_dim = " << fock_dim
      << "\ndephasing = " << fmt(dephasing) << "\njobs = " << jobs << "\n\n";
  out << "[grid]\nextent = " << fmt(grid.spec.extent) << "\nspacing = " << fmt(grid.spec.spacing)
      << "\nmethod = " << reconstruct::to_string(grid.method) << "\noutput_dim = " << grid.output_dim
      << "\ntail_tolerance = " << fmt(grid.tail_tolerance) << "\nproject = " << (grid.project ? "true" : "false")
      << "\n\n";
  out << "[fidelity]\nfamilies = " << join<FamilyKind>(fidelity.families, &fmt_family)
      << "\ngammas = " << join<double>(fidelity.gammas, &fmt) << "\ngamma_min = " << fmt(fidelity.gamma_min)
      << "\ngamma_max = " << fmt(fidelity.gamma_max) << "\ngamma_points = " << fidelity.gamma_points
      << "\nn_caps = " << join<int>(fidelity.n_caps, &fmt_int) << "\ndraws = " << fidelity.draws << "\n\n";
  out << "[verify]\ndims = " << join<int>(verify.dims, &fmt_int) << "\nthreshold = " << fmt(verify.threshold)
      << "\ngamma = " << fmt(verify.gamma) << "\nnbar = " << fmt(verify.nbar) << "\ng = " << fmt(verify.g) << "\n\n";
  out << "[output]\ndir = " << output.dir << "\nprefix = " << output.prefix
      << "\nplotscript = " << (output.plotscript ? "true" : "false") << "\n";
  return out.str();
}

}  // namespace chiprobe::cli
