// thermoform batch runner: parses a JSON experiment config, dispatches to
// the computational modules, writes a CSV report, and prints a one-line
// scalar summary. See README.md for the config schema.
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <nlohmann/json.hpp>
#include <string>
#include <vector>

#include "thermoform/thermoform.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace thermoform;

namespace {

using Scalars = std::map<std::string, double>;

void check_keys(const json& obj, const std::vector<std::string>& allowed,
                const std::string& ctx) {
  if (!obj.is_object()) throw ConfigError(ctx + " must be a JSON object");
  for (const auto& item : obj.items()) {
    if (std::find(allowed.begin(), allowed.end(), item.key()) ==
        allowed.end()) {
      throw ConfigError("unknown key \"" + item.key() + "\" in " + ctx);
    }
  }
}

std::vector<double> parse_reals(const json& arr, const std::string& ctx) {
  if (!arr.is_array()) throw ConfigError(ctx + " must be an array of numbers");
  std::vector<double> out;
  for (const auto& v : arr) {
    if (!v.is_number()) throw ConfigError(ctx + " must contain only numbers");
    const double x = v.get<double>();
    if (!std::isfinite(x)) throw ConfigError(ctx + " contains a non-finite value");
    out.push_back(x);
  }
  return out;
}

double parse_real(const json& obj, const std::string& key,
                  const std::string& ctx) {
  if (!obj.contains(key)) throw ConfigError(ctx + " is missing \"" + key + "\"");
  if (!obj.at(key).is_number()) {
    throw ConfigError(ctx + "." + key + " must be a number");
  }
  const double x = obj.at(key).get<double>();
  if (!std::isfinite(x)) throw ConfigError(ctx + "." + key + " is not finite");
  return x;
}

long parse_int(const json& obj, const std::string& key,
               const std::string& ctx) {
  if (!obj.contains(key)) throw ConfigError(ctx + " is missing \"" + key + "\"");
  if (!obj.at(key).is_number_integer()) {
    throw ConfigError(ctx + "." + key + " must be an integer");
  }
  return obj.at(key).get<long>();
}

TrigPoly parse_poly(const json& obj, const std::string& ctx) {
  check_keys(obj, {"sin", "cos", "constant"}, ctx);
  std::vector<double> sin_c, cos_c;
  double constant = 0.0;
  if (obj.contains("sin")) sin_c = parse_reals(obj.at("sin"), ctx + ".sin");
  if (obj.contains("cos")) cos_c = parse_reals(obj.at("cos"), ctx + ".cos");
  if (obj.contains("constant")) constant = parse_real(obj, "constant", ctx);
  return TrigPoly(constant, std::move(cos_c), std::move(sin_c));
}

CircleMap parse_map(const json& obj) {
  check_keys(obj, {"degree", "sin", "cos", "constant"}, "map");
  const long degree = parse_int(obj, "degree", "map");
  json poly = obj;
  poly.erase("degree");
  return CircleMap(static_cast<int>(degree), parse_poly(poly, "map"));
}

Potential parse_potential(const json& obj, const CircleMap& map,
                          const std::string& ctx) {
  if (obj.is_object() && obj.contains("neg_log_deriv")) {
    check_keys(obj, {"neg_log_deriv"}, ctx);
    if (!obj.at("neg_log_deriv").is_boolean() ||
        !obj.at("neg_log_deriv").get<bool>()) {
      throw ConfigError(ctx + ".neg_log_deriv must be true when present");
    }
    return Potential::neg_log_deriv(map);
  }
  return Potential(parse_poly(obj, ctx));
}

// ----------------------------------------------------------------------
// Command handlers. Each returns the scalar summary that the one-line
// report and the corpus accept-blocks read.

struct RunContext {
  CircleMap map;
  Potential phi;
  json observable;  // raw; parsed on demand
  Grid grid;
  json params;
  std::string out_path;
  bool timestamp;
};

TrigPoly require_observable(const RunContext& ctx) {
  if (ctx.observable.is_null()) {
    throw ConfigError("this command requires an \"observable\"");
  }
  return parse_poly(ctx.observable, "observable");
}

Scalars run_pressure(const RunContext& ctx) {
  std::vector<double> t_grid{1.0};
  if (ctx.params.contains("t_grid")) {
    t_grid = parse_reals(ctx.params.at("t_grid"), "params.t_grid");
  }
  CsvWriter csv(ctx.out_path,
                {"t", "pressure", "entropy", "lyapunov", "gap_ratio"},
                ctx.timestamp);
  Scalars out;
  for (double t : t_grid) {
    const Potential phi_t = t * ctx.phi;
    const auto triple = solve_triple(ctx.map, phi_t, ctx.grid);
    const auto mu = equilibrium_measure(triple);
    const double ent =
        triple.pressure -
        mu.integrate_fn(ctx.grid, [&](double x) { return phi_t(x); });
    const double lyap = mu.integrate_fn(
        ctx.grid, [&](double x) { return std::log(ctx.map.deriv(x)); });
    csv.write_row({t, triple.pressure, ent, lyap, triple.gap_ratio});
    out["pressure"] = triple.pressure;
    out["entropy"] = ent;
    out["lyapunov"] = lyap;
    out["gap_ratio"] = triple.gap_ratio;
  }
  return out;
}

Scalars run_response(const RunContext& ctx) {
  double fd_step = kFdStep;
  if (ctx.params.contains("fd_step")) {
    fd_step = parse_real(ctx.params, "fd_step", "params");
  }
  const bool has_h1 = ctx.params.contains("h1");
  const bool has_h2 = ctx.params.contains("h2");
  if (!has_h1 && !has_h2) {
    throw ConfigError("response needs params.h1 and/or params.h2");
  }
  CsvWriter csv(ctx.out_path,
                {"case_id", "formula_value", "fd_value", "fd_step",
                 "discrepancy"},
                ctx.timestamp);
  Scalars out;
  auto emit = [&](const std::string& id, const ResponseReport& r) {
    csv.write_strings({id, format_double(r.formula_value),
                       format_double(r.fd_value), format_double(r.fd_step),
                       format_double(r.discrepancy)});
    out[id + "_formula"] = r.formula_value;
    out[id + "_fd"] = r.fd_value;
    out[id + "_discrepancy"] = r.discrepancy;
  };
  if (has_h2) {
    const TrigPoly h2 = parse_poly(ctx.params.at("h2"), "params.h2");
    emit("potential", pressure_derivative_potential(ctx.map, ctx.phi, h2,
                                                    ctx.grid, fd_step));
  }
  if (has_h1) {
    const TrigPoly h1 = parse_poly(ctx.params.at("h1"), "params.h1");
    emit("map",
         pressure_derivative_map(ctx.map, ctx.phi, h1, ctx.grid, fd_step));
  }
  if (!ctx.observable.is_null()) {
    const TrigPoly psi = require_observable(ctx);
    const TrigPoly h1 =
        has_h1 ? parse_poly(ctx.params.at("h1"), "params.h1") : TrigPoly();
    const Potential h2 =
        has_h2 ? Potential(parse_poly(ctx.params.at("h2"), "params.h2"))
               : Potential();
    emit("average", equilibrium_average_derivative(ctx.map, ctx.phi, psi, h1,
                                                   h2, ctx.grid, fd_step));
  }
  double worst = 0.0;
  for (const auto& [k, v] : out) {
    if (k.size() > 11 && k.substr(k.size() - 11) == "discrepancy") {
      worst = std::max(worst, v);
    }
  }
  out["max_discrepancy"] = worst;
  return out;
}

Scalars run_variance(const RunContext& ctx, bool with_ks) {
  const TrigPoly psi = require_observable(ctx);
  const VarianceReport var = clt_variance(ctx.map, ctx.phi, psi, ctx.grid);
  double ks = std::nan("");
  long seed = 0;
  if (with_ks) {
    const long n = parse_int(ctx.params, "n", "params");
    const long samples = parse_int(ctx.params, "samples", "params");
    seed = parse_int(ctx.params, "seed", "params");
    ks = clt_empirical(ctx.map, ctx.phi, psi, ctx.grid, static_cast<int>(n),
                       static_cast<int>(samples),
                       static_cast<std::uint64_t>(seed));
  }
  CsvWriter csv(ctx.out_path,
                {"case_id", "mean", "sigma2_series", "sigma2_resolvent",
                 "is_coboundary", "ks_statistic", "seed"},
                ctx.timestamp);
  csv.write_strings({with_ks ? "clt" : "variance", format_double(var.mean),
                     format_double(var.sigma2_series),
                     format_double(var.sigma2_resolvent),
                     var.is_coboundary ? "1" : "0", format_double(ks),
                     std::to_string(seed)});
  Scalars out{{"mean", var.mean},
              {"sigma2_series", var.sigma2_series},
              {"sigma2_resolvent", var.sigma2_resolvent},
              {"is_coboundary", var.is_coboundary ? 1.0 : 0.0}};
  if (with_ks) out["ks_statistic"] = ks;
  return out;
}

Scalars run_ldp(const RunContext& ctx) {
  const TrigPoly psi = require_observable(ctx);
  if (!ctx.params.contains("mode") || !ctx.params.at("mode").is_string()) {
    throw ConfigError("ldp needs params.mode: \"curve\", \"rate\" or \"mc\"");
  }
  const std::string mode = ctx.params.at("mode").get<std::string>();
  Scalars out;
  if (mode == "curve") {
    const auto t_grid = parse_reals(ctx.params.at("t_grid"), "params.t_grid");
    const auto curve = free_energy(ctx.map, ctx.phi, psi, t_grid, ctx.grid);
    CsvWriter csv(ctx.out_path, {"t", "E", "E_prime"}, ctx.timestamp);
    for (std::size_t i = 0; i < t_grid.size(); ++i) {
      csv.write_row({curve.t_grid[i], curve.energy[i], curve.energy_prime[i]});
    }
    out["second_at_zero"] = curve.second_at_zero;
  } else if (mode == "rate") {
    const auto t_grid = parse_reals(ctx.params.at("t_grid"), "params.t_grid");
    const auto s_grid = parse_reals(ctx.params.at("s_grid"), "params.s_grid");
    const auto be = dynamical_backend(ctx.map, ctx.phi, psi, ctx.grid);
    const auto curve = free_energy(ctx.map, ctx.phi, psi, t_grid, ctx.grid);
    const auto rf = legendre(be, curve, s_grid);
    CsvWriter csv(ctx.out_path, {"s", "t_of_s", "I"}, ctx.timestamp);
    double min_rate = 1e300;
    for (std::size_t i = 0; i < s_grid.size(); ++i) {
      csv.write_row({rf.s_grid[i], rf.t_of_s[i], rf.rate[i]});
      min_rate = std::min(min_rate, rf.rate[i]);
    }
    out["mean"] = rf.mean;
    out["min_rate"] = min_rate;
    out["rate_at_mean"] = rate_at(be, rf.mean);
  } else if (mode == "mc") {
    const double a = parse_real(ctx.params, "a", "params");
    const double b = parse_real(ctx.params, "b", "params");
    std::vector<double> n_values;
    if (ctx.params.at("n").is_array()) {
      n_values = parse_reals(ctx.params.at("n"), "params.n");
    } else {
      n_values.push_back(static_cast<double>(parse_int(ctx.params, "n", "params")));
    }
    const long samples = parse_int(ctx.params, "samples", "params");
    const long seed = parse_int(ctx.params, "seed", "params");
    CsvWriter csv(ctx.out_path,
                  {"a", "b", "n", "samples", "hits", "empirical_rate",
                   "predicted_rate"},
                  ctx.timestamp);
    double prev_gap = 1e300;
    bool monotone = true;
    double first_n = 0.0, first_log_p = 0.0, last_n = 0.0, last_log_p = 0.0;
    bool have_first = false;
    for (double nd : n_values) {
      const int n = static_cast<int>(nd);
      const auto mc = ldp_monte_carlo(ctx.map, ctx.phi, psi, a, b, n,
                                      static_cast<int>(samples),
                                      static_cast<std::uint64_t>(seed),
                                      ctx.grid);
      csv.write_row({a, b, nd, static_cast<double>(mc.samples),
                     static_cast<double>(mc.hits), mc.empirical_rate,
                     mc.predicted_rate});
      const double gap = std::abs(mc.empirical_rate - mc.predicted_rate);
      if (gap > prev_gap) monotone = false;
      prev_gap = gap;
      if (mc.hits > 0) {
        const double log_p =
            std::log(static_cast<double>(mc.hits) / mc.samples);
        if (!have_first) {
          first_n = nd;
          first_log_p = log_p;
          have_first = true;
        }
        last_n = nd;
        last_log_p = log_p;
      }
      out["empirical_rate"] = mc.empirical_rate;
      out["predicted_rate"] = mc.predicted_rate;
      out["hits"] = static_cast<double>(mc.hits);
      out["trivial_interval"] = mc.predicted_rate == 0.0 ? 1.0 : 0.0;
      out["rel_gap"] = mc.predicted_rate != 0.0
                           ? gap / std::abs(mc.predicted_rate)
                           : gap;
    }
    out["gap_monotone"] = monotone ? 1.0 : 0.0;
    // Prefactor-free rate estimate: the slope of log mu_n between the first
    // and last n cancels the subexponential prefactor of the LDP.
    if (have_first && last_n > first_n) {
      const double slope = (last_log_p - first_log_p) / (last_n - first_n);
      out["slope_rate"] = slope;
      if (out["predicted_rate"] != 0.0) {
        out["slope_rel_gap"] = std::abs(slope - out["predicted_rate"]) /
                               std::abs(out["predicted_rate"]);
      }
    }
  } else {
    throw ConfigError("unknown ldp mode \"" + mode + "\"");
  }
  return out;
}

Scalars run_multifractal(const RunContext& ctx) {
  const TrigPoly psi = require_observable(ctx);
  const auto c_grid = parse_reals(ctx.params.at("c_grid"), "params.c_grid");
  const auto spec =
      multifractal_spectrum(ctx.map, ctx.phi, psi, c_grid, ctx.grid);
  CsvWriter csv(ctx.out_path, {"c", "pressure_of_level_set"}, ctx.timestamp);
  int monotone_violations = 0;
  for (std::size_t i = 0; i < spec.c_grid.size(); ++i) {
    csv.write_row({spec.c_grid[i], spec.pressure_of_level_set[i]});
    if (i > 0 &&
        spec.pressure_of_level_set[i] >
            spec.pressure_of_level_set[i - 1] + 1e-12) {
      ++monotone_violations;
    }
  }
  Scalars out{{"p_top", spec.p_top},
              {"c_max", spec.c_max},
              {"mean", spec.mean},
              {"monotone_violations", static_cast<double>(monotone_violations)}};
  if (!spec.c_grid.empty() && spec.c_grid.front() == 0.0) {
    out["value_at_zero"] = spec.pressure_of_level_set.front();
  }
  return out;
}

Scalars run_cone_check(const RunContext& ctx) {
  long samples = 200;
  if (ctx.params.contains("samples")) {
    samples = parse_int(ctx.params, "samples", "params");
  }
  const auto rep = cone_invariance_check(ctx.map, ctx.phi, ctx.grid,
                                         static_cast<int>(samples));
  const TransferMatrix tm = assemble_transfer(ctx.map, ctx.phi, ctx.grid);
  const auto triple = dominant_triple(tm);
  std::vector<ContractionTrial> trials;
  const double contraction = contraction_factor_estimate(tm, 50, 7, &trials);
  const auto decay = iterate_decay(tm, triple);
  CsvWriter csv(ctx.out_path,
                {"trial", "theta_before", "theta_after", "ratio"},
                ctx.timestamp);
  for (std::size_t i = 0; i < trials.size(); ++i) {
    csv.write_row({static_cast<double>(i), trials[i].theta_before,
                   trials[i].theta_after, trials[i].ratio});
  }
  return {{"kappa0", rep.params.kappa0},
          {"rho", rep.params.rho},
          {"worst_ratio", rep.worst_ratio},
          {"violations", static_cast<double>(rep.violations)},
          {"contraction_median", contraction},
          {"decay_r2", decay.r_squared},
          {"gap_ratio", triple.gap_ratio}};
}

const std::vector<std::string> kCommands = {
    "pressure", "response", "variance", "ldp",
    "multifractal", "cone-check", "clt"};

Scalars run_config(const json& cfg, const std::string& command,
                   const std::string& out_path, bool timestamp) {
  check_keys(cfg,
             {"command", "map", "potential", "observable", "grid", "params",
              "accept", "out"},
             "config");
  if (!cfg.contains("command") || !cfg.at("command").is_string()) {
    throw ConfigError("config is missing the \"command\" string");
  }
  const std::string cfg_command = cfg.at("command").get<std::string>();
  if (std::find(kCommands.begin(), kCommands.end(), cfg_command) ==
      kCommands.end()) {
    throw ConfigError("unknown command \"" + cfg_command + "\" in config");
  }
  if (!command.empty() && command != cfg_command) {
    throw ConfigError("config command \"" + cfg_command +
                      "\" does not match the CLI subcommand \"" + command +
                      "\"");
  }
  if (!cfg.contains("map")) throw ConfigError("config is missing \"map\"");
  CircleMap map = parse_map(cfg.at("map"));
  Potential phi = cfg.contains("potential")
                      ? parse_potential(cfg.at("potential"), map, "potential")
                      : Potential();
  long n = 128;
  if (cfg.contains("grid")) n = parse_int(cfg, "grid", "config");
  if (n < 8 || n > 1024 || n % 2 != 0) {
    throw ConfigError("grid must be an even integer in [8, 1024]");
  }
  RunContext ctx{std::move(map),
                 std::move(phi),
                 cfg.contains("observable") ? cfg.at("observable") : json(),
                 Grid(static_cast<int>(n)),
                 cfg.contains("params") ? cfg.at("params") : json::object(),
                 out_path,
                 timestamp};
  if (!ctx.params.is_object()) {
    throw ConfigError("params must be a JSON object");
  }

  if (cfg_command == "pressure") return run_pressure(ctx);
  if (cfg_command == "response") return run_response(ctx);
  if (cfg_command == "variance") return run_variance(ctx, false);
  if (cfg_command == "clt") return run_variance(ctx, true);
  if (cfg_command == "ldp") return run_ldp(ctx);
  if (cfg_command == "multifractal") return run_multifractal(ctx);
  return run_cone_check(ctx);
}

json load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed JSON: ") + e.what());
  }
}

void print_summary(const Scalars& scalars) {
  bool first = true;
  for (const auto& [k, v] : scalars) {
    std::printf("%s%s=%.6f", first ? "" : " ", k.c_str(), v);
    first = false;
  }
  std::printf("\n");
}

std::string default_out(const std::string& config_path) {
  fs::path p(config_path);
  p.replace_extension(".csv");
  return p.string();
}

int run_corpus(const std::string& dir) {
  std::vector<fs::path> files;
  if (!fs::is_directory(dir)) {
    std::fprintf(stderr, "error: not a directory: %s\n", dir.c_str());
    return 2;
  }
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.path().extension() == ".json") files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  if (files.empty()) {
    std::fprintf(stderr, "error: no .json configs in %s\n", dir.c_str());
    return 2;
  }
  int failures = 0;
  for (const auto& file : files) {
    std::string verdict = "PASS";
    std::string detail;
    try {
      const json cfg = load_config(file.string());
      std::string out_path = default_out(file.string());
      if (cfg.contains("out") && cfg.at("out").is_string()) {
        out_path = (file.parent_path() / cfg.at("out").get<std::string>())
                       .string();
      }
      const Scalars scalars = run_config(cfg, "", out_path, false);
      if (cfg.contains("accept")) {
        const json& accept = cfg.at("accept");
        if (!accept.is_object()) {
          throw ConfigError("accept must be an object");
        }
        for (const auto& item : accept.items()) {
          check_keys(item.value(), {"target", "tol"},
                     "accept." + item.key());
          const double target =
              parse_real(item.value(), "target", "accept." + item.key());
          const double tol =
              parse_real(item.value(), "tol", "accept." + item.key());
          const auto it = scalars.find(item.key());
          if (it == scalars.end()) {
            verdict = "FAIL";
            detail += " " + item.key() + "=missing";
            continue;
          }
          if (!(std::abs(it->second - target) <= tol)) {
            verdict = "FAIL";
            char buf[128];
            std::snprintf(buf, sizeof(buf), " %s=%.9g (want %.9g±%.3g)",
                          item.key().c_str(), it->second, target, tol);
            detail += buf;
          }
        }
      }
    } catch (const ConfigError& e) {
      verdict = "FAIL";
      detail = std::string(" config error: ") + e.what();
    } catch (const Error& e) {
      verdict = "FAIL";
      detail = std::string(" error: ") + e.what();
    }
    if (verdict == "FAIL") ++failures;
    std::printf("%s %s%s\n", verdict.c_str(),
                file.filename().string().c_str(), detail.c_str());
  }
  std::printf("corpus: %zu configs, %d failed\n", files.size(), failures);
  return failures == 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  if (argc < 2) {
    std::fprintf(stderr,
                 "usage: %s <command> --config <path> [--out <path>] "
                 "[--no-timestamp]\n       %s corpus --dir <path>\n",
                 argv[0], argv[0]);
    return 2;
  }
  const std::string command = argv[1];
  std::string config_path, out_path, dir;
  bool timestamp = true;
  for (int i = 2; i < argc; ++i) {
    const std::string arg = argv[i];
    auto next = [&]() -> std::string {
      if (i + 1 >= argc) {
        std::fprintf(stderr, "error: %s needs a value\n", arg.c_str());
        std::exit(2);
      }
      return argv[++i];
    };
    if (arg == "--config") config_path = next();
    else if (arg == "--out") out_path = next();
    else if (arg == "--dir") dir = next();
    else if (arg == "--no-timestamp") timestamp = false;
    else {
      std::fprintf(stderr, "error: unknown argument %s\n", arg.c_str());
      return 2;
    }
  }

  try {
    if (command == "corpus") {
      if (dir.empty()) throw ConfigError("corpus needs --dir <path>");
      return run_corpus(dir);
    }
    if (std::find(kCommands.begin(), kCommands.end(), command) ==
        kCommands.end()) {
      throw ConfigError("unknown command \"" + command + "\"");
    }
    if (config_path.empty()) throw ConfigError("missing --config <path>");
    const json cfg = load_config(config_path);
    if (out_path.empty()) {
      if (cfg.contains("out") && cfg.at("out").is_string()) {
        out_path = (fs::path(config_path).parent_path() /
                    cfg.at("out").get<std::string>())
                       .string();
      } else {
        out_path = default_out(config_path);
      }
    }
    const Scalars scalars = run_config(cfg, command, out_path, timestamp);
    print_summary(scalars);
    return 0;
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  } catch (const Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "internal error: %s\n", e.what());
    return 1;
  }
}
