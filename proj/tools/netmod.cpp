// netmod command-line interface: every stage of the analysis plus the full
// pipeline. Data goes to files or standard output; diagnostics to standard
// error. Exit 0 on success, 1 on validation/usage errors, 2 on runtime
// errors.

#include <netmod/netmod.hpp>

#include <CLI11.hpp>

#include <cstdio>
#include <cstdlib>
#include <iostream>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <thread>
#include <vector>

using namespace netmod;

namespace {

std::vector<std::string> split_list(const std::string& csv) {
  std::vector<std::string> out;
  std::string item;
  for (char c : csv) {
    if (c == ',') {
      if (!item.empty()) out.push_back(item);
      item.clear();
    } else {
      item += c;
    }
  }
  if (!item.empty()) out.push_back(item);
  return out;
}

std::string file_stem(const std::string& path) {
  auto slash = path.find_last_of("/\\");
  std::string name = slash == std::string::npos ? path : path.substr(slash + 1);
  auto dot = name.find_last_of('.');
  return dot == std::string::npos ? name : name.substr(0, dot);
}

// "name=path" pairs from repeated --covariate flags
CovariateMap load_covariates(const std::vector<std::string>& specs) {
  CovariateMap out;
  for (const auto& spec : specs) {
    auto eq = spec.find('=');
    if (eq == std::string::npos)
      throw ValidationError("covariate must be name=path, got: " + spec);
    out[spec.substr(0, eq)] = load_square_matrix_csv(spec.substr(eq + 1));
  }
  return out;
}

// "edges", "isolates", "nonzero", "weight-sum", "transitive-weights",
// "gwesp:ALPHA", "edge-cov:NAME"
std::vector<StatisticSpec> parse_statistics(const std::string& csv) {
  std::vector<StatisticSpec> out;
  for (const auto& item : split_list(csv)) {
    auto colon = item.find(':');
    std::string head = colon == std::string::npos ? item : item.substr(0, colon);
    std::string arg = colon == std::string::npos ? "" : item.substr(colon + 1);
    if (head == "edges") out.push_back(StatisticSpec::edges());
    else if (head == "isolates") out.push_back(StatisticSpec::isolates());
    else if (head == "nonzero") out.push_back(StatisticSpec::nonzero());
    else if (head == "weight-sum") out.push_back(StatisticSpec::weight_sum());
    else if (head == "transitive-weights") out.push_back(StatisticSpec::transitive_weights());
    else if (head == "gwesp") {
      if (arg.empty()) throw ValidationError("gwesp needs a decay, e.g. gwesp:0.5");
      out.push_back(StatisticSpec::gwesp(std::stod(arg)));
    } else if (head == "edge-cov") {
      if (arg.empty()) throw ValidationError("edge-cov needs a name, e.g. edge-cov:org");
      out.push_back(StatisticSpec::edge_covariate_sum(arg));
    } else {
      throw ValidationError("unknown statistic: " + item);
    }
  }
  if (out.empty()) throw ValidationError("no statistics given");
  return out;
}

std::uint64_t resolve_seed(std::optional<std::uint64_t> seed) {
  if (seed) return *seed;
  std::random_device entropy;
  std::uint64_t drawn = (static_cast<std::uint64_t>(entropy()) << 32) ^ entropy();
  std::cerr << "seed drawn from system entropy: " << drawn << "\n";
  return drawn;
}

std::size_t resolve_jobs(std::size_t jobs_flag) {
  if (jobs_flag > 0) return jobs_flag;
  if (const char* env = std::getenv("NETMOD_JOBS")) {
    long v = std::strtol(env, nullptr, 10);
    if (v > 0) return static_cast<std::size_t>(v);
  }
  unsigned hw = std::thread::hardware_concurrency();
  return hw > 0 ? hw : 1;
}

void deliver(const Json& payload, const std::string& out_path) {
  if (out_path.empty()) std::cout << payload.dump(2) << "\n";
  else write_json(payload, out_path);
}

struct MetricFlags {
  std::string kind = "total-weight";
  std::string model_path;
  std::string target_path;
  std::string focal_as_covariate;

  void attach(CLI::App* cmd) {
    cmd->add_option("--metric", kind,
                    "Objective: total-weight, cosine-distance, expected-dyad-sum")
        ->capture_default_str();
    cmd->add_option("--dyadic-model", model_path,
                    "Fitted dyadic model JSON (expected-dyad-sum)");
    cmd->add_option("--target", target_path, "Target network CSV (cosine-distance)");
    cmd->add_option("--focal-as-covariate", focal_as_covariate,
                    "Substitute the focal network for this model predictor");
  }

  MetricSpec build(const NetworkState& state) const {
    MetricSpec metric;
    metric.kind = detail::metric_kind_from_string(kind);
    if (metric.kind == MetricKind::ExpectedDyadSum) {
      if (model_path.empty())
        throw ValidationError("expected-dyad-sum needs --dyadic-model");
      metric.model = dyadic_model_from_json(read_json(model_path));
    }
    if (metric.kind == MetricKind::CosineDistanceToTarget) {
      if (target_path.empty()) throw ValidationError("cosine-distance needs --target");
      metric.target = load_square_matrix_csv(target_path);
    }
    if (!focal_as_covariate.empty()) metric.focal_as_covariate = focal_as_covariate;
    (void)state;
    return metric;
  }
};

int dispatch(int argc, char** argv) {
  CLI::App app{"network intervention modeling toolkit"};
  app.require_subcommand(1);

  // shared option storage
  std::string network_path, response_path, out_path, config_path, predictors_csv,
      statistics_csv, mode = "binary", strategy = "greedy", change_type = "remove-node-replace",
      degree_network = "focal";
  std::vector<std::string> covariate_specs;
  std::optional<std::uint64_t> seed;
  std::size_t permutations = 999, sweeps = 100, burn_in = 0, steps = 100, replicates = 1000,
              budget_units = 1, draws = 100, jobs_flag = 0;
  int max_weight = 0;
  double unit_size = 1.0;
  bool rescale = false;

  auto add_seed = [&](CLI::App* cmd) {
    cmd->add_option("--seed", seed, "Root seed (default: drawn from system entropy)");
  };
  auto add_jobs = [&](CLI::App* cmd) {
    cmd->add_option("--jobs", jobs_flag, "Worker threads (default: NETMOD_JOBS or all cores)");
  };
  auto add_out = [&](CLI::App* cmd) {
    cmd->add_option("--out", out_path, "Output file (default: standard output)");
  };

  CLI::App* validate = app.add_subcommand("validate", "Check a run config and its input files");
  validate->add_option("--config", config_path, "Run config JSON")->required();

  CLI::App* fit_dyadic =
      app.add_subcommand("fit-dyadic", "Quasi-Poisson dyadic regression");
  fit_dyadic->add_option("--response", response_path, "Response network CSV")->required();
  fit_dyadic->add_option("--predictors", predictors_csv, "Comma-separated predictor CSVs")
      ->required();
  add_out(fit_dyadic);

  CLI::App* qap = app.add_subcommand("qap-test", "Dyadic regression with permutation inference");
  qap->add_option("--response", response_path, "Response network CSV")->required();
  qap->add_option("--predictors", predictors_csv, "Comma-separated predictor CSVs")->required();
  qap->add_option("--permutations", permutations, "Permutation count")->capture_default_str();
  add_seed(qap);
  add_out(qap);

  CLI::App* fit_ergm = app.add_subcommand("fit-ergm", "Pseudolikelihood network-model fit");
  fit_ergm->add_option("--network", network_path, "Network CSV")->required();
  fit_ergm->add_option("--statistics", statistics_csv, "e.g. edges,gwesp:0.5,edge-cov:org")
      ->required();
  fit_ergm->add_option("--covariate", covariate_specs, "name=path, repeatable");
  fit_ergm->add_option("--mode", mode, "binary or valued")->capture_default_str();
  fit_ergm->add_option("--max-weight", max_weight, "Valued-mode cap (0 = observed max)");
  add_out(fit_ergm);

  CLI::App* simulate = app.add_subcommand("simulate", "Sample networks from a fitted model");
  simulate->add_option("--network", network_path, "Starting network CSV")->required();
  simulate->add_option("--model", config_path, "Fitted model JSON")->required();
  simulate->add_option("--covariate", covariate_specs, "name=path, repeatable");
  simulate->add_option("--sweeps", sweeps, "Update sweeps to run")->capture_default_str();
  simulate->add_option("--out", out_path, "Final network CSV (required)")->required();
  add_seed(simulate);

  CLI::App* optimize = app.add_subcommand("optimize", "Budget-constrained intervention search");
  optimize->add_option("--network", network_path, "Focal network CSV")->required();
  optimize->add_option("--covariate", covariate_specs, "name=path, repeatable");
  optimize->add_option("--strategy", strategy,
                       "greedy, exhaustive, degree-heuristic, random-best, do-nothing")
      ->capture_default_str();
  optimize->add_option("--budget", budget_units, "Units to spend")->capture_default_str();
  optimize->add_option("--change-type", change_type,
                       "remove-node-replace, remove-node-excise, add-edge-unit, remove-edge-unit")
      ->capture_default_str();
  optimize->add_option("--unit-size", unit_size, "Edge-unit size")->capture_default_str();
  optimize->add_option("--draws", draws, "Random-best draw count")->capture_default_str();
  optimize->add_option("--degree-network", degree_network, "Ranking network for the heuristic")
      ->capture_default_str();
  add_seed(optimize);
  add_out(optimize);
  MetricFlags optimize_metric;
  optimize_metric.attach(optimize);

  CLI::App* evolve = app.add_subcommand("evolve", "Monte Carlo trajectory of a metric");
  evolve->add_option("--network", network_path, "Starting network CSV")->required();
  evolve->add_option("--model", config_path, "Fitted model JSON")->required();
  evolve->add_option("--covariate", covariate_specs, "name=path, repeatable");
  evolve->add_option("--steps", steps, "Simulated steps")->capture_default_str();
  evolve->add_option("--replicates", replicates, "Replicate count")->capture_default_str();
  evolve->add_option("--burn-in", burn_in, "Pre-trajectory sweeps")->capture_default_str();
  evolve->add_flag("--rescale", rescale, "Rescale the mean trajectory to [0, 1]");
  add_seed(evolve);
  add_jobs(evolve);
  add_out(evolve);
  MetricFlags evolve_metric;
  evolve_metric.attach(evolve);

  CLI::App* pipeline = app.add_subcommand("pipeline", "Full calibrate-optimize-evolve-report run");
  pipeline->add_option("--config", config_path, "Run config JSON")->required();
  add_seed(pipeline);
  add_jobs(pipeline);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);  // prints usage or --help text to the right stream
    return code == 0 ? 0 : 1;
  }

  if (validate->parsed()) {
    Json j = read_json(config_path);
    validate_config(run_config_from_json(j));
    std::cerr << "OK\n";
    return 0;
  }

  if (fit_dyadic->parsed() || qap->parsed()) {
    WeightedNetwork response = load_square_matrix_csv(response_path);
    std::vector<std::pair<std::string, WeightedNetwork>> predictors;
    for (const auto& path : split_list(predictors_csv))
      predictors.emplace_back(file_stem(path), load_square_matrix_csv(path));
    DyadDesign design = build_design(response, predictors);
    if (fit_dyadic->parsed()) {
      deliver(to_json(fit_quasipoisson(design)), out_path);
    } else {
      QapResult result = qap_dsp_test(design, permutations, resolve_seed(seed));
      deliver(to_json(result), out_path);
    }
    return 0;
  }

  if (fit_ergm->parsed()) {
    WeightedNetwork net = load_square_matrix_csv(network_path);
    CovariateMap covariates = load_covariates(covariate_specs);
    ErgmMode ergm_mode = mode == "valued" ? ErgmMode::Valued : ErgmMode::Binary;
    if (mode != "valued" && mode != "binary")
      throw ValidationError("mode must be binary or valued");
    int cap = 1;
    if (ergm_mode == ErgmMode::Valued) {
      cap = max_weight > 0 ? max_weight
                           : std::max(1, static_cast<int>(std::round(net.weights().maxCoeff())));
    }
    ErgmModel model =
        fit_mple(net, covariates, parse_statistics(statistics_csv), ergm_mode, cap);
    deliver(to_json(model), out_path);
    return 0;
  }

  if (simulate->parsed()) {
    WeightedNetwork net = load_square_matrix_csv(network_path);
    CovariateMap covariates = load_covariates(covariate_specs);
    ErgmModel model = ergm_model_from_json(read_json(config_path));
    std::uint64_t used_seed = resolve_seed(seed);
    Rng rng(used_seed);
    for (std::size_t s = 0; s < sweeps; ++s)
      net = simulate_step(net, covariates, model, rng);
    save_square_matrix_csv(net, out_path);
    Json meta;
    meta["seed"] = used_seed;
    meta["sweeps"] = sweeps;
    meta["statistics"] = to_json(compute_statistics(net, covariates, model.statistics));
    std::cout << meta.dump(2) << "\n";
    return 0;
  }

  if (optimize->parsed()) {
    NetworkState state;
    state.focal = load_square_matrix_csv(network_path);
    state.covariates = load_covariates(covariate_specs);
    MetricSpec metric = optimize_metric.build(state);
    Budget budget{budget_units, detail::intervention_kind_from_string(change_type), unit_size};
    Strategy chosen = detail::strategy_from_string(strategy);
    OptimizationResult result;
    Json extra;
    switch (chosen) {
      case Strategy::Greedy: result = greedy_optimize(state, metric, budget); break;
      case Strategy::Exhaustive: result = exhaustive_optimize(state, metric, budget); break;
      case Strategy::DegreeHeuristic:
        result = degree_heuristic(state, metric, budget, degree_network);
        break;
      case Strategy::RandomBest: {
        std::uint64_t used_seed = resolve_seed(seed);
        result = random_best(state, metric, budget, draws, used_seed);
        extra["seed"] = used_seed;
        break;
      }
      case Strategy::DoNothing: result = do_nothing(state, metric); break;
    }
    Json payload = to_json(result);
    for (auto& [k, v] : extra.items()) payload[k] = v;
    deliver(payload, out_path);
    return 0;
  }

  if (evolve->parsed()) {
    NetworkState state;
    state.focal = load_square_matrix_csv(network_path);
    state.covariates = load_covariates(covariate_specs);
    MetricSpec metric = evolve_metric.build(state);
    if (metric.focal_as_covariate && !state.covariates.count(*metric.focal_as_covariate))
      state.covariates[*metric.focal_as_covariate] = state.focal;
    ErgmModel model = ergm_model_from_json(read_json(config_path));
    EvolutionConfig cfg;
    cfg.steps = steps;
    cfg.replicates = replicates;
    cfg.burn_in = burn_in;
    cfg.rescale_to_unit = rescale;
    cfg.seed = resolve_seed(seed);
    cfg.jobs = resolve_jobs(jobs_flag);
    deliver(to_json(run_evolution(state, model, metric, cfg)), out_path);
    return 0;
  }

  // pipeline
  Json j = read_json(config_path);
  if (seed) j["seed"] = *seed;  // flags override config values
  else if (!j.contains("seed")) j["seed"] = resolve_seed(std::nullopt);
  RunConfig cfg = run_config_from_json(j);
  if (jobs_flag > 0) {
    cfg.jobs = jobs_flag;
    cfg.evolution.jobs = jobs_flag;
  }
  run_pipeline(cfg, j);
  std::cerr << "pipeline complete: " << cfg.output_dir << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return dispatch(argc, argv);
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
