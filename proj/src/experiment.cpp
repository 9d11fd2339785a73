#include "singlab/experiment.hpp"

#include "singlab/czd.hpp"
#include "singlab/version.hpp"

#include <cstdio>
#include <fstream>
#include <random>

namespace singlab {

namespace {

using nlohmann::json;

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void require_keys(const json& obj, const std::string& context,
                  std::initializer_list<const char*> allowed) {
  if (!obj.is_object()) throw std::invalid_argument("config: '" + context + "' must be an object");
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    bool known = false;
    for (const char* key : allowed) known = known || it.key() == key;
    if (!known)
      throw std::invalid_argument("config: unknown key '" + it.key() + "' in " + context);
  }
}

template <typename T>
T get_or(const json& obj, const char* key, T fallback) {
  if (!obj.contains(key)) return fallback;
  return obj.at(key).get<T>();
}

GridSpec grid_from(const json& cfg, int default_n = 128, double default_l = 8.0) {
  json g = cfg.value("grid", json::object());
  require_keys(g, "grid", {"d", "N", "L"});
  return make_grid_spec(get_or<int>(g, "d", 2), get_or<int>(g, "N", default_n),
                        get_or<double>(g, "L", default_l));
}

OperatorConfig operator_from(const json& cfg, const GridSpec& spec) {
  SphereFunction omega = omega_sample(cfg.value("omega_key", "theta1"), spec.dim);
  std::optional<LipschitzField> field;
  if (cfg.contains("field_key")) field = field_sample(cfg.at("field_key").get<std::string>(), spec.dim);
  std::optional<AnalyticProfile> profile;
  if (cfg.contains("profile_key"))
    profile = analytic_profile_sample(cfg.at("profile_key").get<std::string>());
  KernelSpec kernel = make_kernel(cfg.value("kernel_key", "power"), spec.dim, field, profile);
  OperatorConfig op = make_operator_config(omega, kernel, spec);
  json o = cfg.value("operator", json::object());
  require_keys(o, "operator", {"epsilon_cells", "rule", "j_min", "j_max"});
  op.epsilon_cells = get_or<double>(o, "epsilon_cells", 1.0);
  std::string rule = get_or<std::string>(o, "rule", "plain");
  if (rule == "plain")
    op.rule = QuadratureRule::plain;
  else if (rule == "antisymmetrized")
    op.rule = QuadratureRule::antisymmetrized;
  else
    throw std::invalid_argument("config: operator.rule must be plain or antisymmetrized");
  if (o.contains("j_min")) op.j_min = o.at("j_min").get<int>();
  if (o.contains("j_max")) op.j_max = o.at("j_max").get<int>();
  return op;
}

json norms_to_json(const OmegaNorms& norms) {
  json j;
  j["l1"] = norms.l1;
  j["llogl"] = norms.llogl;
  j["c_omega"] = norms.c_omega;
  json lq = json::array();
  for (auto [q, v] : norms.lq) lq.push_back({{"q", q}, {"norm", v}});
  j["lq"] = lq;
  return j;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot open " + path.string());
  os << text;
}

json run_norms(const json& cfg) {
  int dim = cfg.contains("grid") ? grid_from(cfg).dim : 2;
  Eigen::Index resolution = get_or<int>(cfg, "resolution", dim == 2 ? 2048 : 65536);
  std::vector<double> q_list = get_or<std::vector<double>>(cfg, "q_list", {2.0});
  SphereFunction omega = omega_sample(cfg.value("omega_key", "const1"), dim);
  SphereQuadrature quad = build_quadrature(dim, resolution);
  json out;
  out["omega"] = omega.label;
  out["d"] = dim;
  out["resolution"] = resolution;
  try {
    out["norms"] = norms_to_json(compute_norms(omega, quad, q_list));
  } catch (const std::domain_error&) {
    // zero density: the plain norms vanish and c_omega does not exist
    out["norms"] = {{"l1", 0.0}, {"llogl", 0.0}, {"c_omega", nullptr}, {"lq", json::array()}};
  }
  return out;
}

json run_kernel_check(const json& cfg) {
  int dim = cfg.contains("grid") ? grid_from(cfg).dim : 2;
  std::optional<LipschitzField> field;
  if (cfg.contains("field_key")) field = field_sample(cfg.at("field_key").get<std::string>(), dim);
  std::optional<AnalyticProfile> profile;
  if (cfg.contains("profile_key"))
    profile = analytic_profile_sample(cfg.at("profile_key").get<std::string>());
  KernelSpec kernel = make_kernel(cfg.value("kernel_key", "power"), dim, field, profile);
  int samples = get_or<int>(cfg, "samples", 10000);
  SamplerConfig sampler;
  sampler.seed = get_or<std::uint64_t>(cfg, "seed", 1);

  json out;
  out["kernel"] = kernel.label;
  out["d"] = dim;
  out["delta"] = kernel.holder_delta;
  out["samples"] = samples;
  double size1 = check_size(kernel, sampler, samples);
  double size2 = check_size(kernel, sampler, 2 * samples);
  RegularityEstimate reg1 = check_regularity(kernel, sampler, samples);
  RegularityEstimate reg2 = check_regularity(kernel, sampler, 2 * samples);
  out["c_size"] = size2;
  out["c_size_half_sample"] = size1;
  out["c_reg_first_slot"] = reg2.first_slot;
  out["c_reg_second_slot"] = reg2.second_slot;
  out["c_reg_first_slot_half_sample"] = reg1.first_slot;
  out["c_reg_second_slot_half_sample"] = reg1.second_slot;
  out["doubling_change"] = {
      {"c_size", size1 > 0 ? size2 / size1 - 1.0 : 0.0},
      {"c_reg_first_slot", reg1.first_slot > 0 ? reg2.first_slot / reg1.first_slot - 1.0 : 0.0},
      {"c_reg_second_slot",
       reg1.second_slot > 0 ? reg2.second_slot / reg1.second_slot - 1.0 : 0.0}};
  return out;
}

GridFunction random_lognormal_field(const GridSpec& spec, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  GridFunction f{spec, Eigen::ArrayXcd(spec.cell_count())};
  for (Eigen::Index i = 0; i < f.values.size(); ++i) f.values[i] = std::exp(gauss(rng));
  return f;
}

json run_cz(const json& cfg) {
  GridSpec spec = grid_from(cfg, 256, 8.0);
  std::uint64_t seed = get_or<std::uint64_t>(cfg, "seed", 7);
  GridFunction f = random_lognormal_field(spec, seed);
  double root_avg = f.values.abs().mean();
  double factor = get_or<double>(cfg, "cz_level_factor", 4.0);
  double t = factor * root_avg;
  double enlargement = get_or<double>(cfg, "enlargement", 4.0);
  CZDecomposition dec = cz_decompose(f, t, enlargement);
  CZReport rep = verify_cz(dec, f, t);
  json out = cz_report_json(rep, dec);
  out["level"] = t;
  out["enlargement"] = enlargement;
  return out;
}

json run_net(const json& cfg) {
  int dim = cfg.contains("grid") ? grid_from(cfg).dim : 2;
  json n_cfg = cfg.value("net", json::object());
  require_keys(n_cfg, "net", {"n", "gamma"});
  int n = get_or<int>(n_cfg, "n", 8);
  double gamma = get_or<double>(n_cfg, "gamma", 0.25);
  double separation = std::exp2(-n * gamma - 4.0);
  Eigen::Index resolution;
  if (cfg.contains("resolution")) {
    resolution = cfg.at("resolution").get<int>();
  } else {
    // default node spacing well below the quarter-separation guard, so the
    // packing count is not visibly quantized by the node grid
    resolution = dim == 2 ? static_cast<Eigen::Index>(std::ceil(16.0 * kTwoPi / separation))
                          : static_cast<Eigen::Index>(
                                std::ceil(4.0 * kPi * 16.0 * 1.21 / (separation * separation)));
  }
  SphereQuadrature quad = build_quadrature(dim, resolution);
  DirectionNet net = direction_net(n, gamma, dim, quad);
  json out;
  out["n"] = n;
  out["gamma"] = gamma;
  out["d"] = dim;
  out["separation"] = separation;
  out["cardinality"] = net.count();
  json vectors = json::array();
  for (Eigen::Index v = 0; v < net.count(); ++v) {
    json row = json::array();
    for (int a = 0; a < dim; ++a) row.push_back(net.vectors(v, a));
    vectors.push_back(std::move(row));
  }
  out["vectors"] = std::move(vectors);
  return out;
}

json run_params(const json& cfg) {
  json p = cfg.value("params", json::object());
  require_keys(p, "params", {"d", "delta", "gamma", "iota", "eps0", "mu", "N1"});
  AdmissibilityParams params;
  params.dim = get_or<int>(p, "d", 2);
  params.delta = get_or<double>(p, "delta", 1.0);
  params.gamma = get_or<double>(p, "gamma", 0.0);
  params.iota = get_or<double>(p, "iota", 0.0);
  params.eps0 = get_or<double>(p, "eps0", 0.5);
  params.mu = get_or<double>(p, "mu", 0.0);
  params.N1 = get_or<int>(p, "N1", 1);
  AdmissibilityResult r = admissible_parameters(params);
  json out;
  out["s1"] = r.s1;
  out["s2"] = r.s2;
  out["s3"] = r.s3;
  out["s4"] = r.s4;
  out["admissible"] = r.admissible;
  return out;
}

struct ProbeRun {
  json summary;
  std::string csv;
};

ProbeRun run_probe(const json& cfg) {
  GridSpec spec = grid_from(cfg, 512, 2.0);
  OperatorConfig op = operator_from(cfg, spec);
  json p = cfg.value("probe", json::object());
  require_keys(p, "probe", {"epsilons", "lambda_points", "measure_radius", "cz_exclusion"});
  std::vector<double> epsilons =
      get_or<std::vector<double>>(p, "epsilons", {0.25, 0.125, 0.0625, 0.03125});
  SpikeFamilyOptions opts;
  opts.lambda_points = get_or<int>(p, "lambda_points", 32);
  opts.measure_radius = get_or<double>(p, "measure_radius", spec.half_width / 2.0);
  opts.cz_exclusion = get_or<bool>(p, "cz_exclusion", false);
  std::uint64_t seed = get_or<std::uint64_t>(cfg, "seed", 0);

  std::vector<ProbeResult> results = spike_family(op, epsilons, spec, opts);

  std::string csv = "experiment,epsilon,lambda,measure,weak_term,weak_ratio,l1_ratio,grid_N,seed\n";
  for (const auto& res : results) {
    for (size_t i = 0; i < res.lambdas.size(); ++i) {
      csv += "probe," + fmt(res.epsilon) + "," + fmt(res.lambdas[i]) + "," +
             fmt(res.measures[i]) + "," + fmt(res.weak_terms[i]) + "," + fmt(res.weak_ratio) +
             "," + fmt(res.l1_ratio) + "," + std::to_string(spec.cells) + "," +
             std::to_string(seed) + "\n";
    }
  }

  json summary;
  summary["grid_N"] = spec.cells;
  json rows = json::array();
  for (const auto& res : results)
    rows.push_back({{"epsilon", res.epsilon},
                    {"weak_ratio", res.weak_ratio},
                    {"l1_ratio", res.l1_ratio},
                    {"u_sup", res.u_sup}});
  summary["family"] = std::move(rows);
  return {std::move(summary), std::move(csv)};
}

std::string kv_csv(const json& result) {
  std::string csv = "key,value\n";
  for (auto it = result.begin(); it != result.end(); ++it) {
    if (it.value().is_number())
      csv += it.key() + "," + fmt(it.value().get<double>()) + "\n";
    else if (it.value().is_boolean())
      csv += it.key() + "," + std::string(it.value().get<bool>() ? "1" : "0") + "\n";
  }
  return csv;
}

}  // namespace

void validate_config(const json& config) {
  require_keys(config, "top level",
               {"experiment", "seed", "omega_key", "kernel_key", "field_key", "profile_key",
                "resolution", "q_list", "samples", "cz_level_factor", "enlargement", "grid",
                "operator", "net", "probe", "params", "threads"});
  if (!config.contains("experiment"))
    throw std::invalid_argument("config: missing required key 'experiment'");
  std::string experiment = config.at("experiment").get<std::string>();
  const char* known[] = {"norms", "kernel-check", "cz", "net", "probe", "params"};
  bool ok = false;
  for (const char* k : known) ok = ok || experiment == k;
  if (!ok) throw std::invalid_argument("config: unknown experiment '" + experiment + "'");
  if (config.contains("grid")) require_keys(config.at("grid"), "grid", {"d", "N", "L"});
  if (config.contains("operator"))
    require_keys(config.at("operator"), "operator", {"epsilon_cells", "rule", "j_min", "j_max"});
  if (config.contains("net")) require_keys(config.at("net"), "net", {"n", "gamma"});
  if (config.contains("probe"))
    require_keys(config.at("probe"), "probe",
                 {"epsilons", "lambda_points", "measure_radius", "cz_exclusion"});
  if (config.contains("params"))
    require_keys(config.at("params"), "params", {"d", "delta", "gamma", "iota", "eps0", "mu", "N1"});
}

ExperimentOutcome run_experiment(const json& config, const std::filesystem::path& outdir) {
  validate_config(config);
  std::filesystem::create_directories(outdir);
  std::string experiment = config.at("experiment").get<std::string>();
  if (config.contains("threads")) set_max_threads(config.at("threads").get<int>());

  ExperimentOutcome outcome;
  std::string csv;
  if (experiment == "norms") {
    outcome.result = run_norms(config);
    csv = kv_csv(outcome.result.contains("norms") && outcome.result["norms"].is_object()
                     ? outcome.result["norms"]
                     : outcome.result);
  } else if (experiment == "kernel-check") {
    outcome.result = run_kernel_check(config);
    csv = kv_csv(outcome.result);
  } else if (experiment == "cz") {
    outcome.result = run_cz(config);
    csv = kv_csv(outcome.result["constants"]);
  } else if (experiment == "net") {
    outcome.result = run_net(config);
    json head = outcome.result;
    head.erase("vectors");
    csv = kv_csv(head);
  } else if (experiment == "params") {
    outcome.result = run_params(config);
    csv = kv_csv(outcome.result);
  } else {
    ProbeRun run = run_probe(config);
    outcome.result = std::move(run.summary);
    csv = std::move(run.csv);
  }

  outcome.result["experiment"] = experiment;
  outcome.result["resolved_config"] = config;
  outcome.result["library_version"] = kVersion;

  std::filesystem::path json_path = outdir / (experiment + "_result.json");
  std::filesystem::path csv_path = outdir / (experiment + "_result.csv");
  write_text(json_path, outcome.result.dump(2) + "\n");
  write_text(csv_path, csv);
  outcome.files = {json_path, csv_path};
  return outcome;
}

}  // namespace singlab
