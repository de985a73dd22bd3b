#pragma once

#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "netmod/dyadreg.hpp"
#include "netmod/ergm.hpp"
#include "netmod/errors.hpp"
#include "netmod/evolve.hpp"
#include "netmod/intervene.hpp"
#include "netmod/io.hpp"

namespace netmod {

using Json = nlohmann::ordered_json;

inline Json to_json(const Eigen::VectorXd& v) {
  Json arr = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) arr.push_back(v(i));
  return arr;
}

inline Eigen::VectorXd vector_from_json(const Json& arr) {
  Eigen::VectorXd v(static_cast<Eigen::Index>(arr.size()));
  for (std::size_t i = 0; i < arr.size(); ++i) v(static_cast<Eigen::Index>(i)) = arr[i].get<double>();
  return v;
}

inline Json to_json(const StatisticSpec& spec) {
  Json j;
  j["kind"] = to_string(spec.kind);
  if (spec.kind == StatisticKind::Gwesp) j["alpha"] = spec.alpha;
  if (spec.kind == StatisticKind::EdgeCovariateSum) j["covariate"] = spec.name;
  return j;
}

inline StatisticSpec statistic_spec_from_json(const Json& j) {
  StatisticSpec spec;
  spec.kind = statistic_kind_from_string(j.at("kind").get<std::string>());
  if (spec.kind == StatisticKind::Gwesp) spec.alpha = j.at("alpha").get<double>();
  if (spec.kind == StatisticKind::EdgeCovariateSum) spec.name = j.at("covariate").get<std::string>();
  return spec;
}

inline Json to_json(const ErgmModel& model) {
  Json j;
  Json stats = Json::array();
  for (const auto& s : model.statistics) stats.push_back(to_json(s));
  j["statistics"] = stats;
  j["theta"] = to_json(model.theta);
  j["mode"] = model.mode == ErgmMode::Binary ? "binary" : "valued";
  j["max_weight"] = model.max_weight;
  j["reference"] = model.reference == ReferenceMeasure::Bernoulli ? "bernoulli" : "discrete-uniform";
  j["converged"] = model.converged;
  j["iterations"] = model.iterations;
  return j;
}

inline ErgmModel ergm_model_from_json(const Json& j) {
  ErgmModel model;
  for (const auto& s : j.at("statistics")) model.statistics.push_back(statistic_spec_from_json(s));
  model.theta = vector_from_json(j.at("theta"));
  std::string mode = j.at("mode").get<std::string>();
  if (mode == "binary") model.mode = ErgmMode::Binary;
  else if (mode == "valued") model.mode = ErgmMode::Valued;
  else throw ValidationError("unknown ERGM mode: " + mode);
  model.max_weight = j.at("max_weight").get<int>();
  std::string ref = j.at("reference").get<std::string>();
  if (ref == "bernoulli") model.reference = ReferenceMeasure::Bernoulli;
  else if (ref == "discrete-uniform") model.reference = ReferenceMeasure::DiscreteUniform;
  else throw ValidationError("unknown reference measure: " + ref);
  model.converged = j.value("converged", true);
  model.iterations = j.value("iterations", 0);
  model.validate();
  return model;
}

inline Json to_json(const DyadicModel& model) {
  Json j;
  j["beta"] = to_json(model.beta);
  j["dispersion"] = model.dispersion;
  j["predictor_names"] = model.predictor_names;
  j["standard_errors"] = to_json(model.standard_errors);
  j["converged"] = model.converged;
  j["iterations"] = model.iterations;
  return j;
}

inline DyadicModel dyadic_model_from_json(const Json& j) {
  DyadicModel model;
  model.beta = vector_from_json(j.at("beta"));
  model.dispersion = j.value("dispersion", 1.0);
  model.predictor_names = j.at("predictor_names").get<std::vector<std::string>>();
  if (j.contains("standard_errors")) model.standard_errors = vector_from_json(j.at("standard_errors"));
  model.converged = j.value("converged", true);
  model.iterations = j.value("iterations", 0);
  if (static_cast<std::size_t>(model.beta.size()) != model.predictor_names.size() + 1)
    throw ValidationError("beta length does not match predictor names + intercept");
  return model;
}

inline Json to_json(const QapResult& r) {
  Json j;
  j["coefficients"] = Json::object();
  j["coefficients"]["intercept"] = r.model.beta(0);
  for (std::size_t k = 0; k < r.model.predictor_names.size(); ++k)
    j["coefficients"][r.model.predictor_names[k]] = r.model.beta(static_cast<Eigen::Index>(k + 1));
  j["t_stats"] = to_json(r.t_stats);
  j["p_values"] = Json::object();
  for (std::size_t k = 0; k < r.model.predictor_names.size(); ++k)
    j["p_values"][r.model.predictor_names[k]] = r.p_values(static_cast<Eigen::Index>(k));
  j["dispersion"] = r.model.dispersion;
  j["permutations"] = r.permutations;
  j["seed"] = r.seed;
  return j;
}

inline Json to_json(const OptimizationResult& r) {
  Json j;
  j["strategy"] = to_string(r.strategy);
  j["chosen"] = r.chosen_labels;
  j["trace"] = r.trace;
  j["metric_final"] = r.metric_final;
  return j;
}

inline Json to_json(const EvolutionSummary& s) {
  Json j;
  j["mean"] = s.mean;
  j["sd"] = s.sd;
  j["replicates"] = s.replicates;
  j["seed"] = s.seed;
  j["metric"] = s.metric_name;
  j["rescaled"] = s.rescaled;
  if (s.rescaled) {
    j["rescale_min"] = s.rescale_min;
    j["rescale_max"] = s.rescale_max;
  }
  return j;
}

inline EvolutionSummary evolution_summary_from_json(const Json& j) {
  EvolutionSummary s;
  s.mean = j.at("mean").get<std::vector<double>>();
  s.sd = j.at("sd").get<std::vector<double>>();
  s.replicates = j.at("replicates").get<std::size_t>();
  s.seed = j.at("seed").get<std::uint64_t>();
  s.metric_name = j.at("metric").get<std::string>();
  s.rescaled = j.value("rescaled", false);
  if (s.rescaled) {
    s.rescale_min = j.at("rescale_min").get<double>();
    s.rescale_max = j.at("rescale_max").get<double>();
  }
  if (s.mean.size() != s.sd.size()) throw ValidationError("mean/sd length mismatch");
  return s;
}

inline void write_json(const Json& j, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot write file: " + path);
  out << j.dump(2) << "\n";
}

inline Json read_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open file: " + path);
  try {
    return Json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(path + ": " + e.what());
  }
}

// Plot-ready trajectory CSV: step, strategy, mean, sd, lower, upper.
inline void write_trajectory_csv(const std::vector<StrategyTrajectory>& strategies,
                                 const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot write file: " + path);
  out << "step,strategy,mean,sd,lower,upper\n";
  for (const auto& s : strategies)
    for (std::size_t t = 0; t < s.summary.mean.size(); ++t) {
      double m = s.summary.mean[t];
      double sd = s.summary.sd[t];
      out << t << "," << s.name << "," << format_number(m) << "," << format_number(sd) << ","
          << format_number(m - 2.0 * sd) << "," << format_number(m + 2.0 * sd) << "\n";
    }
}

inline void write_improvement_csv(const std::vector<ImprovementStep>& steps,
                                  const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot write file: " + path);
  out << "step,percent_improvement,lower,upper,defined\n";
  for (std::size_t t = 0; t < steps.size(); ++t)
    out << t << "," << format_number(steps[t].estimate) << "," << format_number(steps[t].lower)
        << "," << format_number(steps[t].upper) << "," << (steps[t].defined ? 1 : 0) << "\n";
}

}  // namespace netmod
