#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <future>
#include <limits>
#include <string>
#include <thread>
#include <vector>

#include "netmod/ergm.hpp"
#include "netmod/errors.hpp"
#include "netmod/metrics.hpp"
#include "netmod/network.hpp"
#include "netmod/rng.hpp"

namespace netmod {

struct EvolutionConfig {
  std::size_t steps = 100;      // MH sweeps of social time
  std::size_t replicates = 1000;
  std::uint64_t seed = 0;
  std::size_t burn_in = 0;
  bool rescale_to_unit = false;
  std::size_t jobs = 1;

  void validate() const {
    if (steps < 1) throw ValidationError("steps must be >= 1");
    if (replicates < 1) throw ValidationError("replicates must be >= 1");
  }
};

struct EvolutionSummary {
  std::vector<double> mean;  // length steps + 1; index 0 = post-intervention
  std::vector<double> sd;
  std::size_t replicates = 0;
  std::uint64_t seed = 0;
  std::string metric_name;
  bool rescaled = false;
  double rescale_min = 0.0, rescale_max = 0.0;
};

namespace detail {

inline std::vector<double> evolve_one_replicate(const NetworkState& state,
                                                const ErgmModel& model, const MetricSpec& metric,
                                                const EvolutionConfig& cfg, std::size_t replicate) {
  Rng rng = Rng::substream(cfg.seed, "evolution.replicate", replicate);
  NetworkState current = state;
  for (std::size_t b = 0; b < cfg.burn_in; ++b)
    current.focal = simulate_step(current.focal, current.covariates, model, rng);
  std::vector<double> trace;
  trace.reserve(cfg.steps + 1);
  trace.push_back(evaluate(metric, current));
  for (std::size_t s = 0; s < cfg.steps; ++s) {
    current.focal = simulate_step(current.focal, current.covariates, model, rng);
    trace.push_back(evaluate(metric, current));
  }
  return trace;
}

}  // namespace detail

inline void rescale_summary(EvolutionSummary& s, double lo, double hi) {
  double span = hi - lo;
  if (span <= 0.0) span = 1.0;
  for (auto& v : s.mean) v = (v - lo) / span;
  for (auto& v : s.sd) v /= span;
  s.rescaled = true;
  s.rescale_min = lo;
  s.rescale_max = hi;
}

// Evolves the focal network under the fitted ERGM, replicate by replicate,
// and reports the per-step mean and sample SD of the metric. Other
// covariates stay fixed (exogenous); when the metric names the focal
// network as its own predictor, the evolving network is substituted
// before each evaluation.
inline EvolutionSummary run_evolution(const NetworkState& state, const ErgmModel& model,
                                      const MetricSpec& metric, const EvolutionConfig& cfg) {
  cfg.validate();
  model.validate();
  metric.validate();
  const std::size_t R = cfg.replicates;
  std::vector<std::vector<double>> traces(R);
  const std::size_t jobs = std::max<std::size_t>(1, cfg.jobs);
  if (jobs == 1 || R == 1) {
    for (std::size_t r = 0; r < R; ++r)
      traces[r] = detail::evolve_one_replicate(state, model, metric, cfg, r);
  } else {
    std::vector<std::future<void>> workers;
    std::atomic<std::size_t> next{0};
    for (std::size_t t = 0; t < std::min(jobs, R); ++t)
      workers.push_back(std::async(std::launch::async, [&] {
        for (std::size_t r = next++; r < R; r = next++)
          traces[r] = detail::evolve_one_replicate(state, model, metric, cfg, r);
      }));
    for (auto& w : workers) w.get();
  }

  EvolutionSummary summary;
  summary.replicates = R;
  summary.seed = cfg.seed;
  summary.metric_name = to_string(metric.kind);
  const std::size_t T = cfg.steps + 1;
  summary.mean.assign(T, 0.0);
  summary.sd.assign(T, 0.0);
  for (std::size_t t = 0; t < T; ++t) {
    double m = 0.0;
    for (std::size_t r = 0; r < R; ++r) m += traces[r][t];
    m /= static_cast<double>(R);
    double ss = 0.0;
    for (std::size_t r = 0; r < R; ++r) {
      double d = traces[r][t] - m;
      ss += d * d;
    }
    summary.mean[t] = m;
    summary.sd[t] = R > 1 ? std::sqrt(ss / static_cast<double>(R - 1)) : 0.0;
  }
  if (cfg.rescale_to_unit) {
    double lo = *std::min_element(summary.mean.begin(), summary.mean.end());
    double hi = *std::max_element(summary.mean.begin(), summary.mean.end());
    rescale_summary(summary, lo, hi);
  }
  return summary;
}

struct StrategyTrajectory {
  std::string name;
  EvolutionSummary summary;
};

struct ComparisonReport {
  std::vector<StrategyTrajectory> strategies;  // possibly rescaled copies
  // pairwise_diff[a][b][t] = strategies[a].mean[t] - strategies[b].mean[t]
  std::vector<std::vector<std::vector<double>>> pairwise_diff;
  bool rescaled = false;
  double rescale_min = 0.0, rescale_max = 0.0;
};

inline ComparisonReport compare_strategies(std::vector<StrategyTrajectory> summaries,
                                           bool rescale_to_unit = false) {
  if (summaries.empty()) throw ShapeMismatchError("no summaries to compare");
  const auto& first = summaries.front().summary;
  for (const auto& s : summaries)
    if (s.summary.mean.size() != first.mean.size() ||
        s.summary.replicates != first.replicates ||
        s.summary.metric_name != first.metric_name)
      throw ShapeMismatchError("summaries do not share steps/replicates/metric");
  ComparisonReport report;
  if (rescale_to_unit) {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    for (const auto& s : summaries)
      for (double v : s.summary.mean) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
      }
    for (auto& s : summaries) rescale_summary(s.summary, lo, hi);
    report.rescaled = true;
    report.rescale_min = lo;
    report.rescale_max = hi;
  }
  const std::size_t T = first.mean.size();
  const std::size_t S = summaries.size();
  report.pairwise_diff.assign(S, std::vector<std::vector<double>>(S, std::vector<double>(T, 0.0)));
  for (std::size_t a = 0; a < S; ++a)
    for (std::size_t b = 0; b < S; ++b)
      for (std::size_t t = 0; t < T; ++t)
        report.pairwise_diff[a][b][t] = summaries[a].summary.mean[t] - summaries[b].summary.mean[t];
  report.strategies = std::move(summaries);
  return report;
}

struct ImprovementStep {
  double estimate = 0.0;  // percent
  double lower = 0.0;
  double upper = 0.0;
  bool defined = true;
};

// Percentage improvement over a baseline, with a +/-2 SD band from an
// unequal-variance two-sample z-test on the per-step difference.
inline std::vector<ImprovementStep> percentage_improvement(const EvolutionSummary& treated,
                                                           const EvolutionSummary& baseline) {
  if (treated.mean.size() != baseline.mean.size() || treated.replicates != baseline.replicates)
    throw ShapeMismatchError("summaries do not share steps/replicates");
  const auto R = static_cast<double>(treated.replicates);
  std::vector<ImprovementStep> out(treated.mean.size());
  for (std::size_t t = 0; t < treated.mean.size(); ++t) {
    double base = baseline.mean[t];
    if (std::abs(base) <= 1e-9) {
      out[t].defined = false;
      continue;
    }
    double est = 100.0 * (base - treated.mean[t]) / base;
    double se = std::sqrt(treated.sd[t] * treated.sd[t] / R + baseline.sd[t] * baseline.sd[t] / R);
    double half = 2.0 * 100.0 / std::abs(base) * se;
    out[t] = {est, est - half, est + half, true};
  }
  return out;
}

}  // namespace netmod
