#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "netmod/errors.hpp"
#include "netmod/metrics.hpp"
#include "netmod/network.hpp"
#include "netmod/rng.hpp"

namespace netmod {

struct Budget {
  std::size_t units = 1;
  InterventionKind change_type = InterventionKind::RemoveNodeReplace;
  double unit_size = 1.0;

  void validate() const {
    if (units < 1) throw ValidationError("budget units must be >= 1");
    if (unit_size <= 0.0) throw ValidationError("unit size must be positive");
  }
};

enum class Strategy { Greedy, Exhaustive, DegreeHeuristic, RandomBest, DoNothing };

inline const char* to_string(Strategy s) {
  switch (s) {
    case Strategy::Greedy: return "greedy";
    case Strategy::Exhaustive: return "exhaustive";
    case Strategy::DegreeHeuristic: return "degree-heuristic";
    case Strategy::RandomBest: return "random-best";
    case Strategy::DoNothing: return "do-nothing";
  }
  return "?";
}

struct OptimizationResult {
  std::vector<Intervention> chosen;        // application order
  std::vector<std::string> chosen_labels;  // human-readable, captured per step
  std::vector<double> trace;               // metric after each unit, trace[0] = initial
  Strategy strategy = Strategy::Greedy;
  double metric_final = 0.0;
  NetworkState final_state;
};

// Human-readable description of an intervention against the state it is
// about to be applied to (indices may shift under excise).
inline std::string describe_intervention(const NetworkState& state, const Intervention& iv) {
  const auto& labels = state.focal.labels();
  switch (iv.kind) {
    case InterventionKind::RemoveNodeExcise:
    case InterventionKind::RemoveNodeReplace:
      return std::string(to_string(iv.kind)) + " " + labels.at(iv.node);
    case InterventionKind::AddEdgeUnit:
    case InterventionKind::RemoveEdgeUnit:
      return std::string(to_string(iv.kind)) + " " + labels.at(iv.i) + "--" + labels.at(iv.j) +
             " amount " + std::to_string(iv.amount);
    case InterventionKind::SetAttribute:
      return std::string(to_string(iv.kind)) + " " + labels.at(iv.node) + ":" + iv.attribute +
             " = " + std::to_string(iv.value);
  }
  return "?";
}

struct CandidateConstraints {
  // SetAttribute candidates are supplied by the caller.
  std::vector<Intervention> attribute_candidates;
};

namespace detail {

// A node counts as already removed (replace semantics) when its focal and
// covariate rows and its attributes are all zero.
inline bool node_is_blank(const NetworkState& state, std::size_t v) {
  if (state.focal.weighted_degree(v) != 0.0) return false;
  for (const auto& [name, net] : state.covariates)
    if (net.weighted_degree(v) != 0.0) return false;
  for (const auto& [name, vals] : state.attributes)
    if (vals[v] != 0.0) return false;
  return true;
}

}  // namespace detail

inline std::vector<Intervention> enumerate_candidates(const NetworkState& state,
                                                      InterventionKind change_type,
                                                      const CandidateConstraints& constraints = {},
                                                      double unit_size = 1.0) {
  std::vector<Intervention> out;
  const std::size_t n = state.focal.n();
  switch (change_type) {
    case InterventionKind::RemoveNodeExcise:
      for (std::size_t v = 0; v < n; ++v)
        out.push_back(Intervention::remove_node(change_type, v));
      break;
    case InterventionKind::RemoveNodeReplace:
      for (std::size_t v = 0; v < n; ++v)
        if (!detail::node_is_blank(state, v))
          out.push_back(Intervention::remove_node(change_type, v));
      break;
    case InterventionKind::AddEdgeUnit:
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
          out.push_back(Intervention::add_edge(i, j, unit_size));
      break;
    case InterventionKind::RemoveEdgeUnit:
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
          if (state.focal.weight(i, j) >= unit_size)
            out.push_back(Intervention::remove_edge(i, j, unit_size));
      break;
    case InterventionKind::SetAttribute:
      out = constraints.attribute_candidates;
      break;
  }
  return out;
}

// One locally optimal unit at a time. Removal kinds stop early once no
// candidate strictly improves; edge addition always spends the full budget.
inline OptimizationResult greedy_optimize(const NetworkState& state, const MetricSpec& metric,
                                          const Budget& budget,
                                          const CandidateConstraints& constraints = {}) {
  budget.validate();
  OptimizationResult result;
  result.strategy = Strategy::Greedy;
  NetworkState current = state;
  result.trace.push_back(evaluate(metric, current));
  const bool force_full_spend = budget.change_type == InterventionKind::AddEdgeUnit;
  for (std::size_t unit = 0; unit < budget.units; ++unit) {
    auto candidates = enumerate_candidates(current, budget.change_type, constraints, budget.unit_size);
    if (candidates.empty()) break;
    double best_value = std::numeric_limits<double>::infinity();
    std::optional<std::size_t> best;
    std::optional<NetworkState> best_state;
    for (std::size_t c = 0; c < candidates.size(); ++c) {
      NetworkState next = apply_intervention(current, candidates[c]);
      double value = evaluate(metric, next);
      if (value < best_value) {
        best_value = value;
        best = c;
        best_state = std::move(next);
      }
    }
    if (!force_full_spend && best_value >= result.trace.back()) break;
    result.chosen_labels.push_back(describe_intervention(current, candidates[*best]));
    current = std::move(*best_state);
    result.chosen.push_back(candidates[*best]);
    result.trace.push_back(best_value);
  }
  result.metric_final = result.trace.back();
  result.final_state = std::move(current);
  return result;
}

namespace detail {

// Per-dyad contribution table allowing O(|S|^2) evaluation of a removal
// set S: untouched dyads contribute E_ij, touched dyads a constant r.
struct RemovalEvaluator {
  Eigen::MatrixXd per_dyad;   // symmetric contribution matrix, zero diagonal
  Eigen::VectorXd row_sums;   // upper+lower halves, i.e. 2x dyad share
  double total = 0.0;         // sum over upper triangle
  double removed_dyad_value = 0.0;
  std::size_t n = 0;

  double evaluate(const std::vector<std::size_t>& removal_set) const {
    const auto k = removal_set.size();
    double sum = total;
    for (std::size_t v : removal_set) sum -= row_sums(static_cast<Eigen::Index>(v));
    for (std::size_t a = 0; a < k; ++a)
      for (std::size_t b = a + 1; b < k; ++b)
        sum += per_dyad(static_cast<Eigen::Index>(removal_set[a]),
                        static_cast<Eigen::Index>(removal_set[b]));
    if (removed_dyad_value != 0.0) {
      double touched = static_cast<double>(k) * static_cast<double>(n - k) +
                       static_cast<double>(k * (k - 1)) / 2.0;
      sum += removed_dyad_value * touched;
    }
    return sum;
  }
};

inline std::optional<RemovalEvaluator> make_removal_evaluator(const NetworkState& state,
                                                              const MetricSpec& metric,
                                                              InterventionKind kind) {
  RemovalEvaluator ev;
  ev.n = state.focal.n();
  const auto n = static_cast<Eigen::Index>(ev.n);
  if (metric.kind == MetricKind::TotalEdgeWeight) {
    ev.per_dyad = state.focal.weights();
  } else if (metric.kind == MetricKind::ExpectedDyadSum && !metric.focal_as_covariate) {
    const DyadicModel& model = *metric.model;
    ev.per_dyad = Eigen::MatrixXd::Zero(n, n);
    const std::size_t q = model.num_predictors();
    std::vector<const WeightedNetwork*> preds(q);
    for (std::size_t k = 0; k < q; ++k) {
      auto it = state.covariates.find(model.predictor_names[k]);
      if (it == state.covariates.end())
        throw MissingCovariateError("state lacks covariate '" + model.predictor_names[k] + "'");
      preds[k] = &it->second;
    }
    for (Eigen::Index i = 0; i < n; ++i)
      for (Eigen::Index j = i + 1; j < n; ++j) {
        double eta = model.beta(0);
        for (std::size_t k = 0; k < q; ++k)
          eta += model.beta(static_cast<Eigen::Index>(k + 1)) *
                 preds[k]->weight(static_cast<std::size_t>(i), static_cast<std::size_t>(j));
        ev.per_dyad(i, j) = ev.per_dyad(j, i) = std::exp(eta);
      }
    if (kind == InterventionKind::RemoveNodeReplace)
      ev.removed_dyad_value = std::exp(model.beta(0));
  } else {
    return std::nullopt;
  }
  ev.row_sums = ev.per_dyad.rowwise().sum();
  ev.total = ev.per_dyad.sum() / 2.0;
  return ev;
}

inline NetworkState apply_removal_set(const NetworkState& state, InterventionKind kind,
                                      const std::vector<std::size_t>& nodes) {
  NetworkState current = state;
  std::vector<std::size_t> order = nodes;
  // excise shifts indices, so delete from the highest index down
  std::sort(order.begin(), order.end(), std::greater<>());
  for (std::size_t v : order)
    current = apply_intervention(current, Intervention::remove_node(kind, v));
  return current;
}

}  // namespace detail

// Every removal subset of size <= budget.units, rated; guaranteed optimal.
inline OptimizationResult exhaustive_optimize(const NetworkState& state, const MetricSpec& metric,
                                              const Budget& budget,
                                              std::uint64_t evaluation_cap = 20'000'000) {
  budget.validate();
  if (!is_node_removal(budget.change_type))
    throw UnsupportedChangeError("exhaustive search supports node-removal kinds only");
  const std::size_t n = state.focal.n();
  const std::size_t units = std::min(budget.units, n);
  double evaluations = 0.0;
  {
    double binom = 1.0;
    for (std::size_t k = 1; k <= units; ++k) {
      binom = binom * static_cast<double>(n - k + 1) / static_cast<double>(k);
      evaluations += binom;
      if (evaluations > static_cast<double>(evaluation_cap))
        throw FeasibilityError("subset count exceeds the evaluation cap");
    }
  }

  auto fast = detail::make_removal_evaluator(state, metric, budget.change_type);
  auto evaluate_set = [&](const std::vector<std::size_t>& nodes) {
    if (fast) return fast->evaluate(nodes);
    return evaluate(metric, detail::apply_removal_set(state, budget.change_type, nodes));
  };

  OptimizationResult result;
  result.strategy = Strategy::Exhaustive;
  const double initial = evaluate(metric, state);
  result.trace.push_back(initial);
  double best_value = initial;
  std::vector<std::size_t> best_set;

  std::vector<std::size_t> subset;
  for (std::size_t size = 1; size <= units; ++size) {
    double best_at_size = std::numeric_limits<double>::infinity();
    std::vector<std::size_t> best_set_at_size;
    subset.assign(size, 0);
    // lexicographic enumeration of size-`size` subsets of [0, n)
    std::function<void(std::size_t, std::size_t)> recurse = [&](std::size_t depth,
                                                                std::size_t start) {
      if (depth == size) {
        double value = evaluate_set(subset);
        if (value < best_at_size) {
          best_at_size = value;
          best_set_at_size = subset;
        }
        return;
      }
      for (std::size_t v = start; v + (size - depth) <= n; ++v) {
        subset[depth] = v;
        recurse(depth + 1, v + 1);
      }
    };
    recurse(0, 0);
    if (best_at_size < best_value) {
      best_value = best_at_size;
      best_set = best_set_at_size;
    }
    result.trace.push_back(std::min(result.trace.back(), best_at_size));
  }

  for (auto it = best_set.rbegin(); it != best_set.rend(); ++it) {
    result.chosen.push_back(Intervention::remove_node(budget.change_type, *it));
    result.chosen_labels.push_back(std::string(to_string(budget.change_type)) + " " +
                                   state.focal.labels().at(*it));
  }
  result.metric_final = best_value;
  result.final_state = detail::apply_removal_set(state, budget.change_type, best_set);
  return result;
}

// Removes the highest-weighted-degree nodes on the named network
// ("focal" or a covariate name); ties broken by ascending node index.
inline OptimizationResult degree_heuristic(const NetworkState& state, const MetricSpec& metric,
                                           const Budget& budget,
                                           const std::string& network_name = "focal") {
  budget.validate();
  if (!is_node_removal(budget.change_type))
    throw UnsupportedChangeError("degree heuristic supports node-removal kinds only");
  const WeightedNetwork* ranked = &state.focal;
  if (network_name != "focal") {
    auto it = state.covariates.find(network_name);
    if (it == state.covariates.end())
      throw MissingCovariateError("no covariate named '" + network_name + "'");
    ranked = &it->second;
  }
  const std::size_t n = state.focal.n();
  std::vector<std::size_t> order(n);
  for (std::size_t v = 0; v < n; ++v) order[v] = v;
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return ranked->weighted_degree(a) > ranked->weighted_degree(b);
  });

  OptimizationResult result;
  result.strategy = Strategy::DegreeHeuristic;
  NetworkState current = state;
  result.trace.push_back(evaluate(metric, current));
  const std::size_t units = std::min(budget.units, n);
  std::vector<std::size_t> picked(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(units));
  if (budget.change_type == InterventionKind::RemoveNodeExcise) {
    // delete from the highest original index down so indices stay valid
    std::vector<std::size_t> seq = picked;
    std::sort(seq.begin(), seq.end(), std::greater<>());
    for (std::size_t v : seq) {
      result.chosen_labels.push_back(std::string(to_string(budget.change_type)) + " " +
                                     state.focal.labels().at(v));
      current = apply_intervention(current, Intervention::remove_node(budget.change_type, v));
      result.chosen.push_back(Intervention::remove_node(budget.change_type, v));
      result.trace.push_back(evaluate(metric, current));
    }
  } else {
    for (std::size_t v : picked) {
      result.chosen_labels.push_back(std::string(to_string(budget.change_type)) + " " +
                                     state.focal.labels().at(v));
      current = apply_intervention(current, Intervention::remove_node(budget.change_type, v));
      result.chosen.push_back(Intervention::remove_node(budget.change_type, v));
      result.trace.push_back(evaluate(metric, current));
    }
  }
  result.metric_final = result.trace.back();
  result.final_state = std::move(current);
  return result;
}

// Best of `draws` uniformly random budget allocations.
inline OptimizationResult random_best(const NetworkState& state, const MetricSpec& metric,
                                      const Budget& budget, std::size_t draws, std::uint64_t seed,
                                      const CandidateConstraints& constraints = {}) {
  budget.validate();
  if (draws < 1) throw ValidationError("need at least one draw");
  OptimizationResult best;
  best.strategy = Strategy::RandomBest;
  double best_value = std::numeric_limits<double>::infinity();
  for (std::size_t d = 0; d < draws; ++d) {
    Rng rng = Rng::substream(seed, "random-best", d);
    OptimizationResult attempt;
    attempt.strategy = Strategy::RandomBest;
    NetworkState current = state;
    attempt.trace.push_back(evaluate(metric, current));
    for (std::size_t unit = 0; unit < budget.units; ++unit) {
      auto candidates = enumerate_candidates(current, budget.change_type, constraints, budget.unit_size);
      if (candidates.empty()) break;
      const Intervention& pick = candidates[rng.uniform_int(candidates.size())];
      attempt.chosen_labels.push_back(describe_intervention(current, pick));
      current = apply_intervention(current, pick);
      attempt.chosen.push_back(pick);
      attempt.trace.push_back(evaluate(metric, current));
    }
    attempt.metric_final = attempt.trace.back();
    attempt.final_state = std::move(current);
    if (attempt.metric_final < best_value) {
      best_value = attempt.metric_final;
      best = std::move(attempt);
    }
  }
  return best;
}

inline OptimizationResult do_nothing(const NetworkState& state, const MetricSpec& metric) {
  OptimizationResult result;
  result.strategy = Strategy::DoNothing;
  result.trace.push_back(evaluate(metric, state));
  result.metric_final = result.trace.back();
  result.final_state = state;
  return result;
}

}  // namespace netmod
