// ou-bounds: distortion-power tradeoff bounds for a dense sensor network
// observing an Ornstein-Uhlenbeck process.
//
//   ou-bounds bounds   --config cfg.json [--n-grid 8,16,...] [--out path]
//   ou-bounds validate --config cfg.json --trials T --seed S [--n N]
//   ou-bounds regimes  --config cfg.json
//
// Exit codes: 0 success, 1 numeric failure, 2 usage/config error.

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "oubounds/oubounds.hpp"

namespace {

using json = nlohmann::json;
using namespace oubounds;

struct RunConfig {
  double sigma = 1.0;
  double eta = 1.0;
  double t0 = 1.0;
  double h = 1.0;
  double alpha = 2.0;
  PowerLaw power = PowerLaw::constant(1.0);
  std::vector<PowerLaw> power_list;
  std::vector<int> n_grid = {8, 16, 32, 64, 128, 256, 512, 1024, 2048, 4096};
  int quad_order = 16;
  int trials = 2000;
  std::uint64_t seed = 42;
  std::string out_path = "bounds.csv";
};

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

PowerLaw power_from_json(const json& j) {
  const std::string form = j.at("form").get<std::string>();
  if (form == "constant") return PowerLaw::constant(j.at("value").get<double>());
  if (form == "linear_per_node") {
    return PowerLaw::linear_per_node(j.at("value").get<double>());
  }
  if (form == "power_of_n") {
    return PowerLaw::power_of_n(j.value("coefficient", 1.0),
                                j.at("exponent").get<double>());
  }
  if (form == "exp_root_over_n") {
    return PowerLaw::exp_root_times_power(j.at("root_exponent").get<double>(),
                                          j.value("poly_exponent", -1.0),
                                          j.value("coefficient", 1.0));
  }
  throw ConfigError("unknown power law form '" + form + "'");
}

/// Compact form for flags: constant:P | linear:P | pow:coef:exp | exproot:r[:q]
PowerLaw power_from_spec(const std::string& s) {
  std::vector<std::string> parts;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ':')) parts.push_back(item);
  try {
    if (parts.size() == 2 && parts[0] == "constant") {
      return PowerLaw::constant(std::stod(parts[1]));
    }
    if (parts.size() == 2 && parts[0] == "linear") {
      return PowerLaw::linear_per_node(std::stod(parts[1]));
    }
    if (parts.size() == 3 && parts[0] == "pow") {
      return PowerLaw::power_of_n(std::stod(parts[1]), std::stod(parts[2]));
    }
    if ((parts.size() == 2 || parts.size() == 3) && parts[0] == "exproot") {
      const double q = parts.size() == 3 ? std::stod(parts[2]) : -1.0;
      return PowerLaw::exp_root_times_power(std::stod(parts[1]), q);
    }
  } catch (const std::invalid_argument&) {
  }
  throw ConfigError("cannot parse power law spec '" + s +
                    "' (expected constant:P, linear:P, pow:c:p or exproot:r[:q])");
}

void load_config_file(const std::string& path, RunConfig& cfg) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw ConfigError("config parse error in '" + path + "': " + e.what());
  }
  cfg.sigma = j.value("sigma", cfg.sigma);
  cfg.eta = j.value("eta", cfg.eta);
  cfg.t0 = j.value("t0", cfg.t0);
  cfg.h = j.value("h", cfg.h);
  cfg.alpha = j.value("alpha", cfg.alpha);
  if (j.contains("power")) cfg.power = power_from_json(j["power"]);
  if (j.contains("power_list")) {
    cfg.power_list.clear();
    for (const auto& item : j["power_list"]) {
      cfg.power_list.push_back(power_from_json(item));
    }
  }
  if (j.contains("n_grid")) cfg.n_grid = j["n_grid"].get<std::vector<int>>();
  cfg.quad_order = j.value("quad_order", cfg.quad_order);
  cfg.trials = j.value("trials", cfg.trials);
  cfg.seed = j.value("seed", cfg.seed);
  cfg.out_path = j.value("out", cfg.out_path);
}

void validate_common(const RunConfig& cfg) {
  if (!(cfg.sigma > 0.0)) throw ConfigError("sigma must be positive");
  if (!(cfg.eta > 0.0)) throw ConfigError("eta must be positive");
  if (!(cfg.t0 > 0.0)) throw ConfigError("t0 must be positive");
  if (!(cfg.h > 0.0)) throw ConfigError("h must be positive");
  if (!(cfg.alpha > 0.0)) {
    throw ConfigError("alpha must be positive (got " +
                      std::to_string(cfg.alpha) + ")");
  }
  if (cfg.alpha < 2.0 || cfg.alpha > 6.0) {
    std::cerr << "warning: alpha=" << cfg.alpha
              << " outside the typical path-loss range [2, 6]\n";
  }
  if (cfg.quad_order < 2) throw ConfigError("quad_order must be >= 2");
  if (cfg.n_grid.empty()) throw ConfigError("n_grid is empty");
  for (std::size_t i = 0; i < cfg.n_grid.size(); ++i) {
    if (cfg.n_grid[i] < 2) throw ConfigError("n_grid entries must be >= 2");
    if (i > 0 && cfg.n_grid[i] <= cfg.n_grid[i - 1]) {
      throw ConfigError("n_grid must be strictly ascending");
    }
  }
}

int cmd_bounds(const RunConfig& cfg) {
  validate_common(cfg);
  const OuParams p(cfg.sigma, cfg.eta, cfg.t0);
  SweepOptions opt;
  opt.quad_order = cfg.quad_order;
  const auto rows = sweep(p, cfg.power, cfg.h, cfg.alpha, cfg.n_grid, opt);

  std::ofstream out(cfg.out_path, std::ios::binary | std::ios::trunc);
  if (!out) {
    std::cerr << "error: cli: cannot write '" << cfg.out_path << "'\n";
    return 2;
  }
  write_csv(out, rows);
  out.close();

  int failures = 0;
  for (const auto& row : rows) {
    if (row.error) {
      std::cerr << "error: row N=" << row.n << ": " << *row.error << "\n";
      ++failures;
    }
  }
  std::ostringstream summary;
  summary << "wrote " << rows.size() << " rows to " << cfg.out_path;
  try {
    const ScalingFit ds = fit_scaling(rows, FitTarget::DsVsN);
    summary << "; D_s slope " << ds.slope << " (r^2 " << ds.r_squared << ")";
  } catch (const std::exception&) {
  }
  try {
    const ScalingFit dl = fit_scaling(rows, FitTarget::DlVsLogNP);
    summary << "; D_l*log(NP) mean " << dl.coefficient << " (max/min "
            << dl.ratio_max_min << ")";
  } catch (const std::exception&) {
  }
  try {
    const ScalingFit du = fit_scaling(rows, FitTarget::DuVsLogNP);
    summary << "; D_u*log(NP) mean " << du.coefficient << " (max/min "
            << du.ratio_max_min << ")";
  } catch (const std::exception&) {
  }
  std::cout << summary.str() << "\n";
  return failures == 0 ? 0 : 1;
}

struct CheckReporter {
  int failures = 0;

  void report(const std::string& name, bool ok, const std::string& detail) {
    std::cout << (ok ? "PASS " : "FAIL ") << name << ": " << detail << "\n";
    if (!ok) ++failures;
  }
  void skip(const std::string& name, const std::string& why) {
    std::cout << "SKIP " << name << ": " << why << "\n";
  }
};

int cmd_validate(const RunConfig& cfg, int n_check) {
  validate_common(cfg);
  if (cfg.trials < 100) throw ConfigError("trials must be >= 100");
  if (n_check < 2) throw ConfigError("validate N must be >= 2");
  const OuParams p(cfg.sigma, cfg.eta, cfg.t0);
  CheckReporter rep;

  {  // Monte Carlo vs analytic D_s^N
    const SampleGeometry g(n_check, p.t0);
    const double analytic = distortion_from_samples(p, g, cfg.quad_order);
    const auto mc =
        monte_carlo_distortion(p, g, cfg.trials, cfg.quad_order, cfg.seed);
    const double sigmas = std::abs(mc.mean - analytic) / mc.std_error;
    std::ostringstream os;
    os << "N=" << n_check << " trials=" << cfg.trials << " analytic="
       << analytic << " mc=" << mc.mean << " (" << sigmas << " std errors, rel se "
       << mc.std_error / mc.mean << ")";
    rep.report("mc-vs-analytic", sigmas <= 3.0 && mc.std_error < 0.02 * mc.mean,
               os.str());
  }

  const EigenSequence lam = EigenSequence::lower_prime(p);
  {  // large-rate floor: theta(R) >= (sigma T0 / (2 pi R))^2 for R >= R_large
    double r_large = -1.0;
    const int pts = 200;
    std::vector<bool> holds(pts);
    std::vector<double> grid(pts);
    for (int i = 0; i < pts; ++i) {
      const double r = 0.05 * std::pow(1000.0 / 0.05, i / double(pts - 1));
      grid[i] = r;
      const double bound = std::pow(p.sigma * p.t0 / (2.0 * kPi * r), 2);
      holds[i] = theta_of_rate(lam, r, p.t0) >= bound;
    }
    for (int i = 0; i < pts; ++i) {
      bool all = true;
      for (int j = i; j < pts; ++j) all = all && holds[j];
      if (all) {
        r_large = grid[i];
        break;
      }
    }
    std::ostringstream os;
    os << "holds for R >= " << r_large << " (grid up to 1000)";
    rep.report("theta-rate-floor", r_large > 0 && r_large <= 100.0,
               os.str());
  }
  {  // small-theta floor: D(theta) >= (sigma/pi) sqrt(theta) up to theta_small
    double theta_small = -1.0;
    const int pts = 200;
    for (int i = pts - 1; i >= 0; --i) {
      const double th =
          1e-8 * std::pow(lam.lambda0() * 4.0 / 1e-8, i / double(pts - 1));
      bool all = true;
      for (int j = 0; j <= i; ++j) {
        const double tj =
            1e-8 * std::pow(lam.lambda0() * 4.0 / 1e-8, j / double(pts - 1));
        all = all && distortion_of_theta(lam, tj, p.t0) >=
                         p.sigma / kPi * std::sqrt(tj);
      }
      if (all) {
        theta_small = th;
        break;
      }
    }
    std::ostringstream os;
    os << "holds for theta <= " << theta_small;
    rep.report("sqrt-theta-distortion-floor", theta_small > 0, os.str());
  }
  {  // eigenvalue sandwich at N=400
    const SampleGeometry g(400, p.t0);
    const ScaledSpectrum spec = scaled_spectrum(p, g);
    bool ok = true;
    for (int k = 0; k <= 10; ++k) {
      const double mu = spec.mu[static_cast<std::size_t>(k)];
      ok = ok && mu >= 0.95 * lambda_prime(p, k) &&
           mu <= 1.05 * lambda_double_prime(p, k);
    }
    rep.report("eigenvalue-sandwich",
               ok, "mu_k within [0.95 lambda'_k, 1.05 lambda''_k], N=400, k<=10");
  }

  const bool window_ok = achievable_rate_condition(cfg.power, cfg.alpha) &&
                         spectrum_window_condition(cfg.power);
  if (!window_ok) {
    rep.skip("theta-a-sandwich",
             "power law outside the achievable validity window");
    rep.skip("d-b-sqrt-bound",
             "power law outside the achievable validity window");
  } else {
    bool l4 = true, l5 = true;
    std::ostringstream os4, os5;
    for (int n : {128, 512, 2048}) {
      const SampleGeometry g(n, p.t0);
      const ScaledSpectrum spec = scaled_spectrum(
          p, g, n > 1024 ? SolvePath::MarkovFast : SolvePath::Dense);
      const ValidityWindow win = validity_window(p, n);
      for (int i = 0; i < 20; ++i) {
        const double th =
            win.theta_lo *
            std::pow(win.theta_hi / win.theta_lo, i / 19.0);
        l5 = l5 && distortion_second_term(spec, th, p.t0) <=
                       12.0 * p.sigma / kPi * std::sqrt(th);
      }
      const auto [r_lo, r_hi] = induced_rate_window(spec, win);
      for (int i = 0; i < 20; ++i) {
        const double r = r_lo * std::pow(r_hi / r_lo, i / 19.0);
        const double th = theta_achievable_of_rate(spec, r);
        const double lo = std::pow(p.sigma * p.t0 / (4.0 * kPi * r), 2);
        const double hi = std::pow(8.0 * p.sigma * p.t0 / (kPi * r), 2);
        l4 = l4 && lo <= th && th <= hi;
      }
    }
    rep.report("theta-a-sandwich", l4,
               "sandwich over rate window preimage, N in {128,512,2048}");
    rep.report("d-b-sqrt-bound", l5,
               "D_b <= (12 sigma/pi) sqrt(theta') over theta window");
  }

  return rep.failures == 0 ? 0 : 1;
}

int cmd_regimes(const RunConfig& cfg) {
  if (!(cfg.alpha > 0.0)) {
    throw ConfigError("alpha must be positive (got " +
                      std::to_string(cfg.alpha) + ")");
  }
  if (cfg.power_list.empty()) {
    throw ConfigError("regimes needs a non-empty power_list");
  }
  const OuParams p(cfg.sigma, cfg.eta, cfg.t0);
  const auto table = regime_table(p, cfg.power_list, cfg.alpha);
  std::printf("%-28s %-12s %-22s %-22s %-12s %s\n", "power", "regime",
              "lower-bound order", "upper-bound order", "bounds", "note");
  for (const auto& row : table) {
    std::printf("%-28s %-12s %-22s %-22s %-12s %s\n", row.power.c_str(),
                std::string(to_string(row.regime)).c_str(),
                row.lower_order.c_str(), row.upper_order.c_str(),
                row.bounds_meet.c_str(), row.note.c_str());
  }
  return 0;
}

std::vector<int> parse_n_grid(const std::string& csv) {
  std::vector<int> out;
  std::stringstream ss(csv);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      out.push_back(std::stoi(item));
    } catch (const std::exception&) {
      throw ConfigError("cannot parse n-grid entry '" + item + "'");
    }
  }
  if (out.empty()) throw ConfigError("empty n-grid");
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Distortion-power tradeoff bounds for OU-observing sensor networks"};
  app.require_subcommand(1);

  std::string config_path;
  std::string n_grid_csv;
  std::string out_path;
  std::string power_spec;
  std::vector<std::string> regime_powers;
  std::optional<double> sigma, eta, t0, h, alpha;
  std::optional<int> quad_order, trials;
  std::optional<std::uint64_t> seed;
  int validate_n = 64;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "JSON config file");
    sub->add_option("--sigma", sigma, "diffusion amplitude");
    sub->add_option("--eta", eta, "mean reversion rate");
    sub->add_option("--t0", t0, "interval length");
    sub->add_option("--gain", h, "collector channel gain h");
    sub->add_option("--alpha", alpha, "path-loss exponent");
    sub->add_option("--quad-order", quad_order, "Gauss-Legendre order per gap");
    sub->add_option("--seed", seed, "master RNG seed");
    sub->add_option("--power", power_spec,
                    "power law (constant:P | linear:P | pow:c:p | exproot:r[:q])");
  };

  CLI::App* bounds = app.add_subcommand("bounds", "sweep N and write the bounds CSV");
  add_common(bounds);
  bounds->add_option("--n-grid", n_grid_csv, "comma-separated N values");
  bounds->add_option("--out", out_path, "output CSV path");

  CLI::App* validate = app.add_subcommand("validate", "Monte Carlo and inequality checks");
  add_common(validate);
  validate->add_option("--trials", trials, "Monte Carlo trials (>= 100)");
  validate->add_option("--n", validate_n, "sensor count for the MC check");

  CLI::App* regimes = app.add_subcommand("regimes", "print the regime comparison table");
  add_common(regimes);
  regimes->add_option("--power-list", regime_powers,
                      "power law specs (repeatable)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    RunConfig cfg;
    if (!config_path.empty()) load_config_file(config_path, cfg);
    if (sigma) cfg.sigma = *sigma;
    if (eta) cfg.eta = *eta;
    if (t0) cfg.t0 = *t0;
    if (h) cfg.h = *h;
    if (alpha) cfg.alpha = *alpha;
    if (quad_order) cfg.quad_order = *quad_order;
    if (trials) cfg.trials = *trials;
    if (seed) cfg.seed = *seed;
    if (!power_spec.empty()) cfg.power = power_from_spec(power_spec);
    if (!n_grid_csv.empty()) cfg.n_grid = parse_n_grid(n_grid_csv);
    if (!out_path.empty()) cfg.out_path = out_path;
    for (const auto& spec : regime_powers) {
      cfg.power_list.push_back(power_from_spec(spec));
    }

    if (bounds->parsed()) return cmd_bounds(cfg);
    if (validate->parsed()) return cmd_validate(cfg, validate_n);
    if (regimes->parsed()) return cmd_regimes(cfg);
    return 2;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "numeric error: " << e.what() << "\n";
    return 1;
  }
}
