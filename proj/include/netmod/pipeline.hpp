#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "netmod/dyadreg.hpp"
#include "netmod/ergm.hpp"
#include "netmod/errors.hpp"
#include "netmod/evolve.hpp"
#include "netmod/intervene.hpp"
#include "netmod/io.hpp"
#include "netmod/metrics.hpp"
#include "netmod/serialization.hpp"

#define NETMOD_VERSION "0.1.0"

namespace netmod {

struct RunConfig {
  // inputs
  std::string focal_path;
  NetworkFormat focal_format = NetworkFormat::SquareMatrixCsv;
  std::map<std::string, std::string> covariate_paths;
  std::optional<std::string> target_path;
  std::optional<std::string> response_path;  // dyadic-regression response

  // metric
  MetricKind metric_kind = MetricKind::TotalEdgeWeight;
  std::optional<std::string> dyadic_model_path;       // load a fitted model
  std::vector<std::string> fit_predictors;            // or fit from response + covariates
  std::optional<std::string> focal_as_covariate;
  std::size_t qap_permutations = 0;                   // 0 = skip the QAP report

  // optimization
  std::vector<Strategy> strategies;
  Budget budget;
  std::string degree_network = "focal";
  std::size_t random_draws = 100;

  // recovery model
  std::vector<StatisticSpec> ergm_statistics;
  ErgmMode ergm_mode = ErgmMode::Binary;
  int ergm_max_weight = 0;                            // 0 = observed maximum
  std::optional<Eigen::VectorXd> ergm_theta;          // external parameters
  std::optional<std::string> ergm_model_path;         // or a saved model file

  EvolutionConfig evolution;
  std::string output_dir;
  std::uint64_t seed = 0;
  std::size_t jobs = 1;
};

struct RunManifest {
  Json json;
};

namespace detail {

inline std::string fnv1a_file_hash(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot hash missing file: " + path);
  std::uint64_t h = 0xcbf29ce484222325ULL;
  char buf[4096];
  while (in.read(buf, sizeof buf) || in.gcount() > 0) {
    for (std::streamsize i = 0; i < in.gcount(); ++i) {
      h ^= static_cast<unsigned char>(buf[i]);
      h *= 0x100000001b3ULL;
    }
    if (!in) break;
  }
  char hex[17];
  std::snprintf(hex, sizeof hex, "%016llx", static_cast<unsigned long long>(h));
  return hex;
}

inline Strategy strategy_from_string(const std::string& s) {
  if (s == "greedy") return Strategy::Greedy;
  if (s == "exhaustive") return Strategy::Exhaustive;
  if (s == "degree-heuristic" || s == "degreeHeuristic") return Strategy::DegreeHeuristic;
  if (s == "random-best" || s == "randomBest") return Strategy::RandomBest;
  if (s == "do-nothing" || s == "doNothing") return Strategy::DoNothing;
  throw ValidationError("unknown strategy: " + s);
}

inline InterventionKind intervention_kind_from_string(const std::string& s) {
  if (s == "remove-node-excise") return InterventionKind::RemoveNodeExcise;
  if (s == "remove-node-replace") return InterventionKind::RemoveNodeReplace;
  if (s == "add-edge-unit") return InterventionKind::AddEdgeUnit;
  if (s == "remove-edge-unit") return InterventionKind::RemoveEdgeUnit;
  if (s == "set-attribute") return InterventionKind::SetAttribute;
  if (s == "node-addition")
    throw UnsupportedChangeError("node addition is not an optimizable change type");
  throw ValidationError("unknown intervention kind: " + s);
}

inline MetricKind metric_kind_from_string(const std::string& s) {
  if (s == "expected-dyad-sum") return MetricKind::ExpectedDyadSum;
  if (s == "cosine-distance") return MetricKind::CosineDistanceToTarget;
  if (s == "total-weight") return MetricKind::TotalEdgeWeight;
  throw ValidationError("unknown metric kind: " + s);
}

}  // namespace detail

inline RunConfig run_config_from_json(const Json& j) {
  RunConfig cfg;
  const Json& inputs = j.at("inputs");
  cfg.focal_path = inputs.at("focal").get<std::string>();
  if (inputs.value("focal_format", "square-matrix-csv") == "edge-list-csv")
    cfg.focal_format = NetworkFormat::EdgeListCsv;
  if (inputs.contains("covariates"))
    for (auto& [name, path] : inputs.at("covariates").items())
      cfg.covariate_paths[name] = path.get<std::string>();
  if (inputs.contains("target")) cfg.target_path = inputs.at("target").get<std::string>();
  if (inputs.contains("response")) cfg.response_path = inputs.at("response").get<std::string>();

  const Json& metric = j.at("metric");
  cfg.metric_kind = detail::metric_kind_from_string(metric.at("kind").get<std::string>());
  if (metric.contains("model")) cfg.dyadic_model_path = metric.at("model").get<std::string>();
  if (metric.contains("fit_predictors"))
    cfg.fit_predictors = metric.at("fit_predictors").get<std::vector<std::string>>();
  if (metric.contains("focal_as_covariate"))
    cfg.focal_as_covariate = metric.at("focal_as_covariate").get<std::string>();
  cfg.qap_permutations = metric.value("qap_permutations", 0);

  for (const auto& s : j.at("strategies"))
    cfg.strategies.push_back(detail::strategy_from_string(s.get<std::string>()));
  const Json& budget = j.at("budget");
  cfg.budget.units = budget.at("units").get<std::size_t>();
  cfg.budget.change_type =
      detail::intervention_kind_from_string(budget.at("change_type").get<std::string>());
  cfg.budget.unit_size = budget.value("unit_size", 1.0);
  cfg.degree_network = j.value("degree_network", "focal");
  cfg.random_draws = j.value("random_draws", 100);

  const Json& ergm = j.at("ergm");
  cfg.ergm_mode = ergm.value("mode", "binary") == "valued" ? ErgmMode::Valued : ErgmMode::Binary;
  cfg.ergm_max_weight = ergm.value("max_weight", 0);
  if (ergm.contains("model")) {
    cfg.ergm_model_path = ergm.at("model").get<std::string>();
  } else {
    for (const auto& s : ergm.at("statistics"))
      cfg.ergm_statistics.push_back(statistic_spec_from_json(s));
    if (ergm.contains("theta")) cfg.ergm_theta = vector_from_json(ergm.at("theta"));
  }

  const Json& evo = j.at("evolution");
  cfg.evolution.steps = evo.at("steps").get<std::size_t>();
  cfg.evolution.replicates = evo.at("replicates").get<std::size_t>();
  cfg.evolution.burn_in = evo.value("burn_in", 0);
  cfg.evolution.rescale_to_unit = evo.value("rescale_to_unit", false);

  cfg.output_dir = j.at("output_dir").get<std::string>();
  cfg.seed = j.at("seed").get<std::uint64_t>();
  cfg.jobs = j.value("jobs", 1);
  cfg.evolution.jobs = cfg.jobs;
  return cfg;
}

inline void validate_config(const RunConfig& cfg) {
  namespace fs = std::filesystem;
  auto check = [](const std::string& path) {
    if (!fs::exists(path)) throw ValidationError("input file missing: " + path);
  };
  check(cfg.focal_path);
  for (const auto& [name, path] : cfg.covariate_paths) check(path);
  if (cfg.target_path) check(*cfg.target_path);
  if (cfg.response_path) check(*cfg.response_path);
  if (cfg.dyadic_model_path) check(*cfg.dyadic_model_path);
  if (cfg.ergm_model_path) check(*cfg.ergm_model_path);
  if (cfg.strategies.empty()) throw ValidationError("no strategies requested");
  cfg.budget.validate();
  cfg.evolution.validate();
  if (cfg.metric_kind == MetricKind::ExpectedDyadSum && !cfg.dyadic_model_path &&
      cfg.fit_predictors.empty())
    throw ValidationError("expected-dyad-sum needs either a model file or fit_predictors");
  if (cfg.metric_kind == MetricKind::CosineDistanceToTarget && !cfg.target_path)
    throw ValidationError("cosine-distance needs a target network");
  if (cfg.ergm_statistics.empty() && !cfg.ergm_model_path)
    throw ValidationError("ergm needs either statistics or a model file");
}

// Calibrate -> optimize -> evolve -> report, all artifacts under output_dir.
// Re-running with the same config and seed reproduces every numeric output.
inline RunManifest run_pipeline(const RunConfig& cfg, const Json& config_echo = Json::object()) {
  namespace fs = std::filesystem;
  validate_config(cfg);
  fs::create_directories(cfg.output_dir);
  auto started = std::chrono::steady_clock::now();

  RunManifest manifest;
  manifest.json["version"] = NETMOD_VERSION;
  manifest.json["seed"] = cfg.seed;
  manifest.json["config"] = config_echo;
  Json inputs = Json::array();
  auto record_input = [&](const std::string& path) {
    inputs.push_back({{"file", path}, {"hash", detail::fnv1a_file_hash(path)}});
  };
  record_input(cfg.focal_path);
  for (const auto& [name, path] : cfg.covariate_paths) record_input(path);
  if (cfg.target_path) record_input(*cfg.target_path);
  if (cfg.response_path) record_input(*cfg.response_path);
  if (cfg.dyadic_model_path) record_input(*cfg.dyadic_model_path);
  if (cfg.ergm_model_path) record_input(*cfg.ergm_model_path);
  manifest.json["inputs"] = inputs;
  Json outputs = Json::array();
  auto emit = [&](const std::string& name, const Json& payload) {
    std::string path = (fs::path(cfg.output_dir) / name).string();
    write_json(payload, path);
    outputs.push_back({{"file", name}, {"hash", detail::fnv1a_file_hash(path)}});
  };
  auto record = [&](const std::string& name) {
    std::string path = (fs::path(cfg.output_dir) / name).string();
    outputs.push_back({{"file", name}, {"hash", detail::fnv1a_file_hash(path)}});
  };
  std::string stage = "load";
  try {
    // stage: load
    NetworkState state;
    state.focal = load_network(cfg.focal_path, cfg.focal_format);
    for (const auto& [name, path] : cfg.covariate_paths)
      state.covariates[name] = load_square_matrix_csv(path);
    state.validate();

    // stage: calibrate
    stage = "calibrate";
    MetricSpec metric;
    metric.kind = cfg.metric_kind;
    metric.focal_as_covariate = cfg.focal_as_covariate;
    if (cfg.metric_kind == MetricKind::CosineDistanceToTarget)
      metric.target = load_square_matrix_csv(*cfg.target_path);
    if (cfg.metric_kind == MetricKind::ExpectedDyadSum) {
      if (cfg.dyadic_model_path) {
        metric.model = dyadic_model_from_json(read_json(*cfg.dyadic_model_path));
      } else {
        WeightedNetwork response = load_square_matrix_csv(*cfg.response_path);
        std::vector<std::pair<std::string, WeightedNetwork>> predictors;
        for (const auto& name : cfg.fit_predictors) {
          if (name == "focal") predictors.emplace_back(name, state.focal);
          else predictors.emplace_back(name, state.covariates.at(name));
        }
        DyadDesign design = build_design(response, predictors);
        if (cfg.qap_permutations > 0) {
          QapResult qap = qap_dsp_test(design, cfg.qap_permutations,
                                       hash_combine(cfg.seed, hash_label("qap")));
          metric.model = qap.model;
          emit("qap.json", to_json(qap));
        } else {
          metric.model = fit_quasipoisson(design);
        }
        // a model fitted on "focal" tracks the evolving network
        if (!metric.focal_as_covariate)
          for (const auto& name : cfg.fit_predictors)
            if (name == "focal") metric.focal_as_covariate = name;
        emit("dyadic_model.json", to_json(*metric.model));
      }
      if (metric.focal_as_covariate && !state.covariates.count(*metric.focal_as_covariate))
        state.covariates[*metric.focal_as_covariate] = state.focal;
    }
    metric.validate();

    ErgmModel ergm_model;
    if (cfg.ergm_model_path) {
      ergm_model = ergm_model_from_json(read_json(*cfg.ergm_model_path));
    } else {
      int max_weight = cfg.ergm_max_weight;
      if (cfg.ergm_mode == ErgmMode::Valued && max_weight == 0) {
        double observed = state.focal.weights().maxCoeff();
        max_weight = std::max(1, static_cast<int>(std::round(observed)));
      }
      if (cfg.ergm_theta) {
        ergm_model.statistics = cfg.ergm_statistics;
        ergm_model.theta = *cfg.ergm_theta;
        ergm_model.mode = cfg.ergm_mode;
        ergm_model.max_weight = cfg.ergm_mode == ErgmMode::Binary ? 1 : max_weight;
        ergm_model.reference = cfg.ergm_mode == ErgmMode::Binary
                                   ? ReferenceMeasure::Bernoulli
                                   : ReferenceMeasure::DiscreteUniform;
        ergm_model.converged = true;
        ergm_model.validate();
      } else {
        ergm_model = fit_mple(state.focal, state.covariates, cfg.ergm_statistics, cfg.ergm_mode,
                              cfg.ergm_mode == ErgmMode::Binary ? 1 : max_weight);
      }
    }
    emit("ergm_model.json", to_json(ergm_model));

    // stage: optimize
    stage = "optimize";
    std::vector<std::pair<std::string, OptimizationResult>> optimized;
    for (Strategy s : cfg.strategies) {
      OptimizationResult result;
      switch (s) {
        case Strategy::Greedy:
          result = greedy_optimize(state, metric, cfg.budget);
          break;
        case Strategy::Exhaustive:
          result = exhaustive_optimize(state, metric, cfg.budget);
          break;
        case Strategy::DegreeHeuristic:
          result = degree_heuristic(state, metric, cfg.budget, cfg.degree_network);
          break;
        case Strategy::RandomBest:
          result = random_best(state, metric, cfg.budget, cfg.random_draws,
                               hash_combine(cfg.seed, hash_label("optimizer")));
          break;
        case Strategy::DoNothing:
          result = do_nothing(state, metric);
          break;
      }
      std::string name = to_string(s);
      emit("optimize_" + name + ".json", to_json(result));
      optimized.emplace_back(name, std::move(result));
    }

    // stage: evolve
    stage = "evolve";
    EvolutionConfig evo = cfg.evolution;
    evo.seed = hash_combine(cfg.seed, hash_label("evolution"));
    std::vector<StrategyTrajectory> trajectories;
    for (auto& [name, result] : optimized) {
      EvolutionSummary summary = run_evolution(result.final_state, ergm_model, metric, evo);
      trajectories.push_back({name, std::move(summary)});
    }

    // stage: report
    stage = "report";
    ComparisonReport report = compare_strategies(trajectories, cfg.evolution.rescale_to_unit);
    {
      std::string path = (fs::path(cfg.output_dir) / "trajectories.csv").string();
      write_trajectory_csv(report.strategies, path);
      record("trajectories.csv");
    }
    const StrategyTrajectory* baseline = nullptr;
    for (const auto& t : trajectories)
      if (t.name == to_string(Strategy::DoNothing)) baseline = &t;
    if (baseline) {
      for (const auto& t : trajectories) {
        if (&t == baseline) continue;
        auto improvement = percentage_improvement(t.summary, baseline->summary);
        std::string name = "improvement_" + t.name + ".csv";
        write_improvement_csv(improvement, (fs::path(cfg.output_dir) / name).string());
        record(name);
      }
    }
    Json summary_json;
    summary_json["seed"] = cfg.seed;
    summary_json["final_step"] = Json::object();
    for (const auto& t : report.strategies) {
      summary_json["final_step"][t.name] = {{"mean", t.summary.mean.back()},
                                            {"sd", t.summary.sd.back()}};
    }
    emit("summary.json", summary_json);
  } catch (const std::exception& e) {
    manifest.json["failed_stage"] = stage;
    manifest.json["error"] = e.what();
    manifest.json["outputs"] = outputs;
    write_json(manifest.json, (fs::path(cfg.output_dir) / "manifest.json").string());
    throw;
  }

  manifest.json["outputs"] = outputs;
  write_json(manifest.json, (fs::path(cfg.output_dir) / "manifest.json").string());
  // wall-clock lives outside the manifest so identical runs stay byte-identical
  auto elapsed =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  Json timing;
  timing["wall_clock_seconds"] = elapsed;
  write_json(timing, (fs::path(cfg.output_dir) / "timing.json").string());
  return manifest;
}

}  // namespace netmod
