// hypangles: lattice enumeration, angle pair correlation, limiting density and
// the volume check, as CSV.
//
// Exit codes: 0 success, 1 a requested check failed, 2 bad configuration,
// 3 I/O or numerical failure.

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "hypangles/angle_stats.hpp"
#include "hypangles/density.hpp"
#include "hypangles/generators_file.hpp"
#include "hypangles/lattice.hpp"
#include "hypangles/volume.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace hypangles;

namespace {

enum Exit : int { kOk = 0, kCheckFailed = 1, kConfigError = 2, kRuntimeError = 3 };

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct RunConfig {
  std::string lattice = "psl2z";
  std::string generators;
  double Q = 100.0;
  double xi_max = 4.0;
  double xi_step = 0.05;
  std::string interval;
  std::uint64_t samples = 200000;
  std::uint64_t seed = 1;
  double tolerance = 0.1;
  std::string out = ".";
  double margin = 4.0;
  double theory_Q = 0.0;  // 0: same as Q
  std::string M = "1,1,0,1";
  std::vector<double> Q_list = {50.0, 100.0, 200.0};
  double slack = 5.0;
  bool summary_only = false;
};

json to_json(const RunConfig& c) {
  return json{{"lattice", c.lattice},   {"generators", c.generators}, {"Q", c.Q},
              {"xi-max", c.xi_max},     {"xi-step", c.xi_step},       {"interval", c.interval},
              {"samples", c.samples},   {"seed", c.seed},             {"tolerance", c.tolerance},
              {"margin", c.margin},     {"theory-Q", c.theory_Q},     {"M", c.M},
              {"Q-list", c.Q_list},     {"slack", c.slack},           {"summary-only", c.summary_only}};
}

std::string fmt(double v) {
  if (std::isnan(v)) return "nan";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::uint64_t fnv1a(std::string_view text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  return h;
}

class CsvWriter {
 public:
  CsvWriter(const RunConfig& config, const std::string& command, const std::string& name) {
    std::error_code ec;
    fs::create_directories(config.out, ec);
    path_ = fs::path(config.out) / name;
    file_.open(path_, std::ios::binary);
    if (!file_) throw std::runtime_error("cannot write " + path_.string());
    char hash[20];
    std::snprintf(hash, sizeof hash, "%016llx",
                  static_cast<unsigned long long>(fnv1a(to_json(config).dump())));
    file_ << "# hypangles " << HYPANGLES_VERSION << " " << command << " config " << hash << "\n";
  }

  void row(const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) file_ << (i ? "," : "") << cells[i];
    file_ << "\n";
  }

  void close() {
    file_.close();
    if (!file_) throw std::runtime_error("error writing " + path_.string());
  }

  const fs::path& path() const { return path_; }

 private:
  fs::path path_;
  std::ofstream file_;
};

LatticeSpec resolve_lattice(const RunConfig& c) {
  try {
    if (!c.generators.empty()) return load_generator_file(c.generators);
    return builtin_lattice(c.lattice);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
}

GeneratedSearch search_of(const RunConfig& c) {
  GeneratedSearch s;
  s.margin = c.margin;
  return s;
}

double parse_angle(std::string text) {
  bool negative = false;
  if (!text.empty() && text.front() == '-') {
    negative = true;
    text.erase(0, 1);
  }
  double factor = 1.0;
  if (const auto p = text.find("pi"); p != std::string::npos) {
    std::string coef = text.substr(0, p);
    if (!coef.empty() && coef.back() == '*') coef.pop_back();
    factor = coef.empty() ? kPi : kPi * parse_rational(coef);
    if (p + 2 < text.size()) {
      std::string rest = text.substr(p + 2);
      if (rest.front() != '/') throw ConfigError("bad angle: " + text);
      factor /= parse_rational(rest.substr(1));
    }
  } else {
    factor = parse_rational(text);
  }
  return negative ? -factor : factor;
}

std::optional<Arc> parse_interval(const std::string& text) {
  if (text.empty()) return std::nullopt;
  const auto colon = text.find(':');
  if (colon == std::string::npos) throw ConfigError("--interval expects lo:hi");
  try {
    return Arc::between(parse_angle(text.substr(0, colon)), parse_angle(text.substr(colon + 1)));
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("--interval: ") + e.what());
  }
}

GroupElement parse_matrix(const std::string& text) {
  std::vector<double> v;
  std::stringstream ss(text);
  std::string item;
  try {
    while (std::getline(ss, item, ',')) v.push_back(parse_rational(item));
    if (v.size() != 4) throw ConfigError("--M expects a,b,c,d");
    return GroupElement::from_entries(v[0], v[1], v[2], v[3]);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("--M: ") + e.what());
  }
}

std::vector<double> grid_of(const RunConfig& c) {
  try {
    return make_xi_grid(c.xi_max, c.xi_step);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
}

LengthSpectrum theory_spectrum(const RunConfig& c, const LatticeSpec& spec,
                               const BallEnumeration* reuse) {
  const double T = c.theory_Q > 0.0 ? c.theory_Q : c.Q;
  if (reuse != nullptr && reuse->Q == T) return LengthSpectrum::from_enumeration(*reuse);
  return LengthSpectrum::from_enumeration(enumerate_lattice(spec, T, search_of(c)));
}

void report_incomplete(const BallEnumeration& ball) {
  if (!ball.warning.empty()) std::cerr << "warning: " << ball.warning << "\n";
}

int cmd_enumerate(const RunConfig& c) {
  const LatticeSpec spec = resolve_lattice(c);
  const BallEnumeration ball = enumerate_lattice(spec, c.Q, search_of(c));
  report_incomplete(ball);
  if (!c.summary_only) {
    CsvWriter csv(c, "enumerate", "enumerate.csv");
    csv.row({"a", "b", "c", "d", "norm_sq", "theta"});
    for (const auto& g : ball.elements) {
      const RayAngle ray = angle_of(g);
      csv.row({fmt(g.a()), fmt(g.b()), fmt(g.c()), fmt(g.d()), fmt(norm_sq(g)),
               ray.stabilizer ? "nan" : fmt(ray.theta)});
    }
    csv.close();
  }
  const double asymptotic = kPi * c.Q * c.Q / spec.covolume;
  const double ratio = static_cast<double>(ball.count()) / asymptotic;
  CsvWriter summary(c, "enumerate", "enumerate_summary.csv");
  summary.row({"lattice", "Q", "count", "asymptotic", "ratio", "complete"});
  summary.row({spec.label, fmt(c.Q), std::to_string(ball.count()), fmt(asymptotic), fmt(ratio),
               ball.complete ? "1" : "0"});
  summary.close();
  std::cout << spec.label << " Q=" << fmt(c.Q) << " count=" << ball.count()
            << " asymptotic=" << fmt(asymptotic) << " ratio=" << fmt(ratio) << "\n";
  return kOk;
}

int cmd_paircorr(const RunConfig& c) {
  const LatticeSpec spec = resolve_lattice(c);
  const std::vector<double> grid = grid_of(c);
  const std::optional<Arc> arc = parse_interval(c.interval);
  const BallEnumeration ball = enumerate_lattice(spec, c.Q, search_of(c));
  report_incomplete(ball);
  const std::vector<AngleRecord> records = angle_records(ball);
  const CorrelationCurve emp = empirical_R2(records, c.Q, grid, spec.covolume);
  std::optional<CorrelationCurve> restricted;
  if (arc) restricted = restricted_R2(records, c.Q, grid, spec.covolume, *arc);

  const LengthSpectrum spectrum = theory_spectrum(c, spec, &ball);
  const R2Theory r2 = R2_theoretical(grid, spectrum, spec.covolume);

  CsvWriter csv(c, "paircorr", "paircorr.csv");
  std::vector<std::string> header = {"xi",        "N_Q",     "R2_emp",  "R2_theory", "g2_emp",
                                     "g2_theory", "abs_gap", "rel_gap", "tail_bound"};
  if (restricted) {
    header.insert(header.end(), {"R2_restricted", "g2_restricted", "restricted_rel_gap"});
  }
  csv.row(header);
  double worst = 0.0;
  for (std::size_t j = 0; j < grid.size(); ++j) {
    const G2Value g2 = g2_theoretical(grid[j], spectrum, spec.covolume);
    const double gap = std::abs(emp.R2_emp[j] - r2.value[j]);
    const double rel = gap / std::max(r2.value[j], 0.1);
    worst = std::max(worst, rel);
    std::vector<std::string> cells = {fmt(grid[j]),       fmt(emp.N_Q[j]),  fmt(emp.R2_emp[j]),
                                      fmt(r2.value[j]),   fmt(emp.g2_emp[j]), fmt(g2.value),
                                      fmt(gap),           fmt(rel),         fmt(r2.tail_bound[j])};
    if (restricted) {
      const double rgap = std::abs(restricted->R2_emp[j] - r2.value[j]) / std::max(r2.value[j], 0.1);
      cells.insert(cells.end(),
                   {fmt(restricted->R2_emp[j]), fmt(restricted->g2_emp[j]), fmt(rgap)});
    }
    csv.row(cells);
  }
  csv.close();
  const bool pass = worst < c.tolerance;
  std::cout << spec.label << " Q=" << fmt(c.Q) << " max_rel_gap=" << fmt(worst)
            << " tolerance=" << fmt(c.tolerance) << (pass ? " PASS" : " FAIL") << "\n";
  return pass ? kOk : kCheckFailed;
}

int cmd_density(const RunConfig& c) {
  const LatticeSpec spec = resolve_lattice(c);
  const std::vector<double> grid = grid_of(c);
  const double T = c.theory_Q > 0.0 ? c.theory_Q : c.Q;
  const BallEnumeration ball = enumerate_lattice(spec, T, search_of(c));
  report_incomplete(ball);
  const LengthSpectrum spectrum = LengthSpectrum::from_enumeration(ball);
  const R2Theory r2 = R2_theoretical(grid, spectrum, spec.covolume);
  CsvWriter csv(c, "density", "density.csv");
  csv.row({"xi", "g2_theory", "R2_theory", "tail_bound", "R2_tail_bound"});
  csv.row({fmt(0.0), fmt(g2_at_zero(spectrum, spec.covolume)), fmt(0.0), fmt(0.0), fmt(0.0)});
  for (std::size_t j = 0; j < grid.size(); ++j) {
    const G2Value g2 = g2_theoretical(grid[j], spectrum, spec.covolume);
    csv.row({fmt(grid[j]), fmt(g2.value), fmt(r2.value[j]), fmt(g2.tail_bound),
             fmt(r2.tail_bound[j])});
  }
  csv.close();
  std::cout << spec.label << " T=" << fmt(T) << " shells=" << spectrum.shells().size()
            << " wrote " << csv.path().string() << "\n";
  return kOk;
}

int cmd_volcheck(const RunConfig& c) {
  const GroupElement M = parse_matrix(c.M);
  if (fixes_base_point(M)) throw ConfigError("--M fixes the base point (M in K)");
  const std::vector<double> grid = grid_of(c);
  if (c.Q_list.empty()) throw ConfigError("--Q-list is empty");
  CsvWriter csv(c, "volcheck", "volcheck.csv");
  csv.row({"Q", "xi", "ell", "F_M", "mc_mean", "mc_stderr", "closed_form", "samples", "seed",
           "rel_gap", "within"});
  const double m2 = norm_sq(M);
  bool all = true;
  for (double Q : c.Q_list) {
    if (!(Q > 0.0)) throw ConfigError("--Q-list entries must be positive");
    const double slack = c.slack * std::pow(Q, 2.0 / 3.0) * m2;
    for (double xi : grid) {
      const RegionSpec region = RegionSpec::make(M, Q, xi);
      const double f = F_M(region);
      const double closed = Q * Q * f;
      const VolumeEstimate mc = mc_volume(region, c.samples, c.seed);
      const double diff = std::abs(mc.mean - closed);
      const bool within = diff <= 3.0 * mc.stderr + slack;
      all = all && within;
      csv.row({fmt(Q), fmt(xi), fmt(region.ell), fmt(f), fmt(mc.mean), fmt(mc.stderr),
               fmt(closed), std::to_string(mc.samples), std::to_string(mc.seed),
               fmt(closed > 0.0 ? diff / closed : 0.0), within ? "1" : "0"});
    }
  }
  csv.close();
  std::cout << "volcheck rows=" << c.Q_list.size() * grid.size() << (all ? " PASS" : " FAIL")
            << "\n";
  return all ? kOk : kCheckFailed;
}

// Fills every option the command line left unset from the JSON config file.
void apply_config_file(const std::string& path, RunConfig& c, const CLI::App& command) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  const std::map<std::string, std::function<void(const json&)>> setters = {
      {"lattice", [&](const json& v) { c.lattice = v.get<std::string>(); }},
      {"generators", [&](const json& v) { c.generators = v.get<std::string>(); }},
      {"Q", [&](const json& v) { c.Q = v.get<double>(); }},
      {"xi-max", [&](const json& v) { c.xi_max = v.get<double>(); }},
      {"xi-step", [&](const json& v) { c.xi_step = v.get<double>(); }},
      {"interval", [&](const json& v) { c.interval = v.get<std::string>(); }},
      {"samples", [&](const json& v) { c.samples = v.get<std::uint64_t>(); }},
      {"seed", [&](const json& v) { c.seed = v.get<std::uint64_t>(); }},
      {"tolerance", [&](const json& v) { c.tolerance = v.get<double>(); }},
      {"out", [&](const json& v) { c.out = v.get<std::string>(); }},
      {"margin", [&](const json& v) { c.margin = v.get<double>(); }},
      {"theory-Q", [&](const json& v) { c.theory_Q = v.get<double>(); }},
      {"M", [&](const json& v) { c.M = v.get<std::string>(); }},
      {"Q-list", [&](const json& v) { c.Q_list = v.get<std::vector<double>>(); }},
      {"slack", [&](const json& v) { c.slack = v.get<double>(); }},
      {"summary-only", [&](const json& v) { c.summary_only = v.get<bool>(); }},
  };
  for (const auto& [key, value] : j.items()) {
    const auto setter = setters.find(key);
    if (setter == setters.end()) throw ConfigError("unknown config key: " + key);
    const CLI::Option* opt = command.get_option_no_throw("--" + key);
    if (opt != nullptr && opt->count() > 0) continue;
    try {
      setter->second(value);
    } catch (const json::exception& e) {
      throw ConfigError("config key " + key + ": " + e.what());
    }
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Angles between lattice orbit points in the hyperbolic plane"};
  app.set_version_flag("--version", std::string(HYPANGLES_VERSION));
  app.require_subcommand(1);

  RunConfig config;
  std::string config_path;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "JSON file; flags override its fields");
    sub->add_option("--lattice", config.lattice, "psl2z or octagon");
    sub->add_option("--generators", config.generators, "JSON generator file");
    sub->add_option("--Q", config.Q, "norm radius");
    sub->add_option("--margin", config.margin, "generated search margin");
    sub->add_option("--out", config.out, "output directory");
  };
  auto add_grid = [&](CLI::App* sub) {
    sub->add_option("--xi-max", config.xi_max, "largest xi");
    sub->add_option("--xi-step", config.xi_step, "grid step");
    sub->add_option("--theory-Q", config.theory_Q, "truncation radius of the lattice sum");
  };

  CLI::App* enumerate = app.add_subcommand("enumerate", "list Gamma cap B_Q");
  add_common(enumerate);
  enumerate->add_flag("--summary-only", config.summary_only, "skip the element CSV");

  CLI::App* paircorr = app.add_subcommand("paircorr", "empirical vs limiting R2");
  add_common(paircorr);
  add_grid(paircorr);
  paircorr->add_option("--interval", config.interval, "restrict angles to lo:hi");
  paircorr->add_option("--tolerance", config.tolerance, "max relative R2 gap");

  CLI::App* density = app.add_subcommand("density", "limiting g2 and R2");
  add_common(density);
  add_grid(density);

  CLI::App* volcheck = app.add_subcommand("volcheck", "Monte Carlo region volume");
  volcheck->add_option("--config", config_path, "JSON file; flags override its fields");
  volcheck->add_option("--out", config.out, "output directory");
  volcheck->add_option("--xi-max", config.xi_max, "largest xi");
  volcheck->add_option("--xi-step", config.xi_step, "grid step");
  volcheck->add_option("--M", config.M, "a,b,c,d");
  volcheck->add_option("--Q-list", config.Q_list, "radii")->delimiter(',');
  volcheck->add_option("--samples", config.samples, "per row");
  volcheck->add_option("--seed", config.seed, "RNG seed");
  volcheck->add_option("--slack", config.slack, "coefficient of Q^(2/3) ||M||^2");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfigError;
  }

  try {
    for (CLI::App* sub : {enumerate, paircorr, density, volcheck}) {
      if (sub->parsed() && !config_path.empty()) apply_config_file(config_path, config, *sub);
    }
    if (enumerate->parsed()) return cmd_enumerate(config);
    if (paircorr->parsed()) return cmd_paircorr(config);
    if (density->parsed()) return cmd_density(config);
    if (volcheck->parsed()) return cmd_volcheck(config);
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kConfigError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kRuntimeError;
  }
  return kConfigError;
}
