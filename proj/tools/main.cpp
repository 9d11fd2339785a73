// singlab: numerical laboratory for rough singular integral operators on
// uniform grids. Subcommands expose sphere-density norms, kernel-condition
// estimates, Calderon-Zygmund decompositions, direction nets, operator
// application, weak-(1,1) probes, parameter admissibility, and a selftest.

#include "singlab/experiment.hpp"
#include "singlab/selftest.hpp"
#include "singlab/version.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <fstream>
#include <iostream>

namespace {

using nlohmann::json;
using namespace singlab;

std::filesystem::path default_outdir() {
  const char* env = std::getenv("SINGLAB_OUT");
  return env ? std::filesystem::path(env) : std::filesystem::path("out");
}

json load_config(const std::string& path) {
  if (path.empty()) return json::object();
  std::ifstream is(path);
  if (!is) throw std::invalid_argument("cannot open config file '" + path + "'");
  json cfg;
  try {
    is >> cfg;
  } catch (const json::parse_error& err) {
    throw std::invalid_argument("config parse error in '" + path + "': " + err.what());
  }
  return cfg;
}

int run_and_report(const json& config, const std::filesystem::path& outdir) {
  ExperimentOutcome outcome = run_experiment(config, outdir);
  std::cout << outcome.result.dump(2) << "\n";
  for (const auto& file : outcome.files) std::cerr << "wrote " << file.string() << "\n";
  return 0;
}

MultiplierSymbol symbol_from_key(const std::string& key, int dim) {
  auto colon = key.find(':');
  std::string head = key.substr(0, colon);
  if (head == "one") {
    MultiplierSymbol m;
    m.label = "one";
    m.eval = [](const Point&) { return Complex(1.0, 0.0); };
    return m;
  }
  if (head == "riesz") {
    int axis = std::stoi(key.substr(colon + 1));
    MultiplierSymbol m;
    m.homogeneous = true;
    m.label = key;
    m.eval = [axis](const Point& xi) -> Complex {
      double r = xi.norm();
      if (r == 0.0) return Complex(0.0, 0.0);
      return Complex(0.0, -xi[axis - 1] / r);
    };
    return m;
  }
  if (head == "lp") {
    int k = std::stoi(key.substr(colon + 1));
    return lp_symbols(k, make_psi_lowpass()).band;
  }
  if (head == "dir") {
    std::string rest = key.substr(colon + 1);
    auto c1 = rest.find(',');
    auto c2 = rest.find(',', c1 + 1);
    if (c1 == std::string::npos || c2 == std::string::npos)
      throw std::invalid_argument("symbol key: expected dir:n,gamma,v");
    int n = std::stoi(rest.substr(0, c1));
    double gamma = std::stod(rest.substr(c1 + 1, c2 - c1 - 1));
    Eigen::Index v = std::stoll(rest.substr(c2 + 1));
    double separation = std::exp2(-n * gamma - 4.0);
    Eigen::Index resolution =
        dim == 2 ? static_cast<Eigen::Index>(std::ceil(4.0 * kTwoPi / separation))
                 : static_cast<Eigen::Index>(
                       std::ceil(4.0 * kPi * 16.0 * 1.21 / (separation * separation)));
    DirectionNet net = direction_net(n, gamma, dim, build_quadrature(dim, resolution));
    if (v < 0 || v >= net.count())
      throw std::invalid_argument("symbol key: net vector index out of range");
    return directional_symbol(net.vector(v), n, gamma, make_Phi_plateau());
  }
  throw std::invalid_argument("unknown symbol key '" + key + "'");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"singlab - rough singular integral laboratory"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);
  app.fallthrough();

  std::string config_path;
  std::string outdir_flag;
  int threads = 0;
  app.add_option("--config", config_path, "JSON config file (flags override its keys)")
      ->configurable(false);
  app.add_option("--out", outdir_flag, "output directory (default $SINGLAB_OUT or ./out)");
  app.add_option("--threads", threads, "cap worker threads (0 = hardware)");

  // collected into the config document; flags override file keys
  std::string omega_key, kernel_key, field_key, profile_key, rule;
  int d = 0, grid_n = 0, samples = 0, lambda_points = 0, net_n = 0, n1 = 0;
  Eigen::Index resolution = 0;
  double grid_l = 0, level_factor = 0, enlargement = 0, gamma = -1, delta = -1, iota = -1,
         eps0 = -1, mu = -1, epsilon_cells = -1, measure_radius = -1;
  std::vector<double> epsilons, q_list;
  bool cz_exclusion = false;
  std::uint64_t seed = 0;
  bool seed_set = false;

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--d", d, "dimension (2 or 3)");
    cmd->add_option_function<std::uint64_t>(
        "--seed", [&](std::uint64_t s) { seed = s; seed_set = true; }, "RNG seed");
  };

  auto* norms = app.add_subcommand("norms", "sphere-density norms and the C constant");
  add_common(norms);
  norms->add_option("--omega", omega_key, "density key");
  norms->add_option("--resolution", resolution, "quadrature resolution");
  norms->add_option("--q", q_list, "extra Lq exponents");

  auto* check = app.add_subcommand("check-kernel", "size and regularity constants of a kernel");
  add_common(check);
  check->add_option("--kernel", kernel_key, "kernel key");
  check->add_option("--field", field_key, "coefficient field key");
  check->add_option("--profile", profile_key, "analytic profile key");
  check->add_option("--samples", samples, "sample count");

  auto* cz = app.add_subcommand("cz", "decompose a seeded random field and verify");
  add_common(cz);
  cz->add_option("--grid-n", grid_n, "cells per axis");
  cz->add_option("--grid-l", grid_l, "box half-width");
  cz->add_option("--level-factor", level_factor, "t as a multiple of the root average");
  cz->add_option("--enlargement", enlargement, "enlarged-cube factor");

  auto* net = app.add_subcommand("net", "separated direction net");
  add_common(net);
  net->add_option("--n", net_n, "smoothing index n");
  net->add_option("--gamma", gamma, "separation exponent gamma");
  net->add_option("--resolution", resolution, "sphere quadrature resolution");

  auto* probe = app.add_subcommand("probe", "spike-family weak-(1,1) sweep");
  add_common(probe);
  probe->add_option("--omega", omega_key, "density key");
  probe->add_option("--kernel", kernel_key, "kernel key");
  probe->add_option("--field", field_key, "coefficient field key");
  probe->add_option("--profile", profile_key, "analytic profile key");
  probe->add_option("--grid-n", grid_n, "cells per axis");
  probe->add_option("--grid-l", grid_l, "box half-width");
  probe->add_option("--epsilons", epsilons, "spike radii");
  probe->add_option("--lambda-points", lambda_points, "levels per sweep");
  probe->add_option("--measure-radius", measure_radius, "statistics window radius");
  probe->add_option("--epsilon-cells", epsilon_cells, "truncation in cells");
  probe->add_option("--rule", rule, "plain | antisymmetrized");
  probe->add_flag("--cz-exclusion", cz_exclusion, "exclude the enlarged exceptional set");

  auto* params = app.add_subcommand("params", "admissibility exponents");
  params->add_option("--d", d, "dimension");
  params->add_option("--delta", delta, "kernel regularity exponent");
  params->add_option("--gamma", gamma, "net separation exponent");
  params->add_option("--iota", iota, "density truncation exponent");
  params->add_option("--eps0", eps0, "frequency split exponent");
  params->add_option("--mu", mu, "pigeonhole exponent");
  params->add_option("--N1", n1, "integration-by-parts order");

  std::string input_path, output_path, multiplier_key;
  int dyadic_j = std::numeric_limits<int>::min();
  int mollify = 0;
  double gaussian_width = 0;
  auto* apply = app.add_subcommand("apply", "apply an operator or multiplier to a grid");
  add_common(apply);
  apply->add_option("--omega", omega_key, "density key");
  apply->add_option("--kernel", kernel_key, "kernel key");
  apply->add_option("--field", field_key, "coefficient field key");
  apply->add_option("--profile", profile_key, "analytic profile key");
  apply->add_option("--epsilon-cells", epsilon_cells, "truncation in cells");
  apply->add_option("--rule", rule, "plain | antisymmetrized");
  apply->add_option("--input", input_path, "input grid (.sgrd)");
  apply->add_option("--gaussian", gaussian_width, "synthesize exp(-|x|^2 / (2 w^2)) input");
  apply->add_option("--grid-n", grid_n, "cells per axis (synthesized input)");
  apply->add_option("--grid-l", grid_l, "box half-width (synthesized input)");
  apply->add_option("--output", output_path, "output grid (.sgrd)");
  apply->add_option("--j", dyadic_j, "apply one dyadic piece");
  apply->add_option("--mollify", mollify, "smoothing index for the dyadic piece");
  apply->add_option("--multiplier", multiplier_key, "apply a symbol instead (one|riesz:j|lp:k|dir:n,g,v)");

  auto* selftest = app.add_subcommand("selftest", "run the module invariant suites");
  (void)selftest;

  CLI11_PARSE(app, argc, argv);

  std::filesystem::path outdir =
      outdir_flag.empty() ? default_outdir() : std::filesystem::path(outdir_flag);
  set_max_threads(threads);

  try {
    json cfg = load_config(config_path);

    auto put = [&](const char* key, auto value) { cfg[key] = value; };
    auto put_nested = [&](const char* obj, const char* key, auto value) { cfg[obj][key] = value; };
    if (!omega_key.empty()) put("omega_key", omega_key);
    if (!kernel_key.empty()) put("kernel_key", kernel_key);
    if (!field_key.empty()) put("field_key", field_key);
    if (!profile_key.empty()) put("profile_key", profile_key);
    if (resolution > 0) put("resolution", static_cast<int>(resolution));
    if (!q_list.empty()) put("q_list", q_list);
    if (samples > 0) put("samples", samples);
    if (level_factor > 0) put("cz_level_factor", level_factor);
    if (enlargement > 0) put("enlargement", enlargement);
    if (seed_set) put("seed", seed);
    if (threads > 0) put("threads", threads);
    if (d > 0) put_nested("grid", "d", d);
    if (grid_n > 0) put_nested("grid", "N", grid_n);
    if (grid_l > 0) put_nested("grid", "L", grid_l);
    if (epsilon_cells > 0) put_nested("operator", "epsilon_cells", epsilon_cells);
    if (!rule.empty()) put_nested("operator", "rule", rule);
    if (net_n > 0) put_nested("net", "n", net_n);
    if (gamma >= 0 && (net->parsed() || probe->parsed())) put_nested("net", "gamma", gamma);
    if (!epsilons.empty()) put_nested("probe", "epsilons", epsilons);
    if (lambda_points > 0) put_nested("probe", "lambda_points", lambda_points);
    if (measure_radius > 0) put_nested("probe", "measure_radius", measure_radius);
    if (cz_exclusion) put_nested("probe", "cz_exclusion", true);

    if (selftest->parsed()) {
      return run_selftest(std::cout) == 0 ? 0 : 1;
    }
    if (params->parsed()) {
      cfg["experiment"] = "params";
      if (params->count("--d")) cfg["params"]["d"] = d;
      if (params->count("--delta")) cfg["params"]["delta"] = delta;
      if (params->count("--gamma")) cfg["params"]["gamma"] = gamma;
      if (params->count("--iota")) cfg["params"]["iota"] = iota;
      if (params->count("--eps0")) cfg["params"]["eps0"] = eps0;
      if (params->count("--mu")) cfg["params"]["mu"] = mu;
      if (params->count("--N1")) cfg["params"]["N1"] = n1;
      cfg.erase("grid");
      return run_and_report(cfg, outdir);
    }
    if (norms->parsed()) {
      cfg["experiment"] = "norms";
      return run_and_report(cfg, outdir);
    }
    if (check->parsed()) {
      cfg["experiment"] = "kernel-check";
      return run_and_report(cfg, outdir);
    }
    if (cz->parsed()) {
      cfg["experiment"] = "cz";
      return run_and_report(cfg, outdir);
    }
    if (net->parsed()) {
      cfg["experiment"] = "net";
      return run_and_report(cfg, outdir);
    }
    if (probe->parsed()) {
      cfg["experiment"] = "probe";
      return run_and_report(cfg, outdir);
    }

    // apply
    GridFunction input = [&]() {
      if (!input_path.empty()) return read_sgrd(input_path);
      if (gaussian_width > 0) {
        GridSpec spec = make_grid_spec(d > 0 ? d : 2, grid_n > 0 ? grid_n : 128,
                                       grid_l > 0 ? grid_l : 8.0);
        double w2 = gaussian_width * gaussian_width;
        return make_grid_function(spec, [w2](const Point& x) {
          return Complex(std::exp(-x.squaredNorm() / (2.0 * w2)), 0.0);
        });
      }
      throw std::invalid_argument("apply: provide --input or --gaussian");
    }();

    GridFunction result = [&]() {
      if (!multiplier_key.empty())
        return apply_multiplier(symbol_from_key(multiplier_key, input.spec.dim), input);
      std::optional<LipschitzField> field;
      if (!field_key.empty()) field = field_sample(field_key, input.spec.dim);
      std::optional<AnalyticProfile> profile;
      if (!profile_key.empty()) profile = analytic_profile_sample(profile_key);
      SphereFunction omega =
          omega_sample(omega_key.empty() ? "theta1" : omega_key, input.spec.dim);
      KernelSpec kernel =
          make_kernel(kernel_key.empty() ? "power" : kernel_key, input.spec.dim, field, profile);
      OperatorConfig op = make_operator_config(omega, kernel, input.spec);
      if (epsilon_cells > 0) op.epsilon_cells = epsilon_cells;
      if (rule == "antisymmetrized") op.rule = QuadratureRule::antisymmetrized;
      if (dyadic_j != std::numeric_limits<int>::min())
        return apply_dyadic(op, input, dyadic_j,
                            mollify > 0 ? std::optional<int>(mollify) : std::nullopt);
      return apply_truncated(op, input);
    }();

    std::filesystem::create_directories(outdir);
    std::filesystem::path out_path =
        output_path.empty() ? outdir / "apply_out.sgrd" : std::filesystem::path(output_path);
    write_sgrd(out_path, result);
    std::cout << "{\"output\": \"" << out_path.string()
              << "\", \"l1\": " << lebesgue_norm(result, 1.0)
              << ", \"l2\": " << lebesgue_norm(result, 2.0) << "}\n";
    return 0;
  } catch (const std::invalid_argument& err) {
    std::cerr << "config error: " << err.what() << "\n";
    return 2;
  } catch (const std::domain_error& err) {
    std::cerr << "config error: " << err.what() << "\n";
    return 2;
  } catch (const std::exception& err) {
    std::cerr << "error: " << err.what() << "\n";
    return 1;
  }
}
