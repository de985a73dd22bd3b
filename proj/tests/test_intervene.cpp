#include <doctest.h>

#include <netmod/netmod.hpp>

#include <algorithm>
#include <functional>
#include <set>

#include "helpers.hpp"

using namespace netmod;

namespace {

// Independent brute-force oracle: enumerate subsets recursively and rate
// them through the generic apply/evaluate path only.
double brute_force_best(const NetworkState& state, const MetricSpec& metric,
                        InterventionKind kind, std::size_t max_size) {
  const std::size_t n = state.focal.n();
  double best = evaluate(metric, state);
  std::vector<std::size_t> subset;
  std::function<void(std::size_t)> recurse = [&](std::size_t start) {
    if (!subset.empty()) {
      NetworkState current = state;
      for (auto it = subset.rbegin(); it != subset.rend(); ++it)
        current = apply_intervention(current, Intervention::remove_node(kind, *it));
      best = std::min(best, evaluate(metric, current));
    }
    if (subset.size() == max_size) return;
    for (std::size_t v = start; v < n; ++v) {
      subset.push_back(v);
      recurse(v + 1);
      subset.pop_back();
    }
  };
  recurse(0);
  return best;
}

}  // namespace

TEST_CASE("candidate enumeration") {
  NetworkState state;
  state.focal = WeightedNetwork::empty(4);
  CHECK(enumerate_candidates(state, InterventionKind::AddEdgeUnit).size() == 6);
  CHECK(enumerate_candidates(state, InterventionKind::RemoveEdgeUnit).empty());
  CHECK(enumerate_candidates(state, InterventionKind::RemoveNodeExcise).size() == 4);

  NetworkState three;
  three.focal = WeightedNetwork::empty(3);
  three.focal.set_weight(0, 1, 1.0);
  three.focal.set_weight(1, 2, 1.0);
  three.focal.set_weight(0, 2, 1.0);
  NetworkState replaced = apply_intervention(
      three, Intervention::remove_node(InterventionKind::RemoveNodeReplace, 1));
  CHECK(enumerate_candidates(replaced, InterventionKind::RemoveNodeReplace).size() == 2);
}

TEST_CASE("greedy on the counterexample removes the heavy hub and pays for it") {
  NetworkState state = testutil::counterexample_fixture();
  MetricSpec metric{MetricKind::TotalEdgeWeight};
  Budget budget{2, InterventionKind::RemoveNodeExcise};

  OptimizationResult greedy = greedy_optimize(state, metric, budget);
  CHECK(greedy.trace[0] == doctest::Approx(14.0));
  REQUIRE(greedy.chosen.size() == 2);
  CHECK(greedy.chosen_labels[0] == "remove-node-excise i");
  CHECK(greedy.metric_final == doctest::Approx(3.0));

  OptimizationResult best = exhaustive_optimize(state, metric, budget);
  CHECK(best.metric_final == doctest::Approx(0.0));
  std::set<std::string> chosen(best.chosen_labels.begin(), best.chosen_labels.end());
  CHECK(chosen == std::set<std::string>{"remove-node-excise j", "remove-node-excise k"});
  CHECK(best.metric_final < greedy.metric_final);  // the suboptimality gap
}

TEST_CASE("greedy stops early when no removal helps") {
  NetworkState state;
  state.focal = WeightedNetwork::empty(4);
  MetricSpec metric{MetricKind::TotalEdgeWeight};
  Budget budget{3, InterventionKind::RemoveNodeExcise};
  OptimizationResult r = greedy_optimize(state, metric, budget);
  CHECK(r.chosen.empty());
  CHECK(r.trace == std::vector<double>{0.0});
}

TEST_CASE("greedy edge addition spends the whole budget on the target dyad") {
  NetworkState state;
  state.focal = WeightedNetwork::empty(5);
  WeightedNetwork target = WeightedNetwork::empty(5);
  target.set_weight(1, 3, 2.0);
  MetricSpec metric;
  metric.kind = MetricKind::CosineDistanceToTarget;
  metric.target = target;
  Budget budget{4, InterventionKind::AddEdgeUnit};
  OptimizationResult r = greedy_optimize(state, metric, budget);
  REQUIRE(r.chosen.size() == 4);
  for (const auto& iv : r.chosen) {
    CHECK(iv.i == 1);
    CHECK(iv.j == 3);
  }
  CHECK(r.trace[1] == doctest::Approx(0.0));  // scale invariance: one unit is enough
  CHECK(r.metric_final == doctest::Approx(0.0));
  CHECK(r.final_state.focal.weight(1, 3) == doctest::Approx(4.0));
}

TEST_CASE("greedy edge addition conserves the budget exactly") {
  for (std::uint64_t seed = 0; seed < 25; ++seed) {
    Rng rng = Rng::substream(seed, "budget-conservation");
    NetworkState state;
    state.focal = testutil::random_weighted_network(6, rng, 0.4);
    WeightedNetwork target = testutil::random_weighted_network(6, rng, 0.6);
    if (target.frobenius_norm() == 0.0) continue;
    MetricSpec metric;
    metric.kind = MetricKind::CosineDistanceToTarget;
    metric.target = target;
    std::size_t units = 1 + rng.uniform_int(6);
    Budget budget{units, InterventionKind::AddEdgeUnit};
    OptimizationResult r = greedy_optimize(state, metric, budget);
    CHECK(r.chosen.size() == units);
    double added = r.final_state.focal.total_edge_weight() - state.focal.total_edge_weight();
    CHECK(added == doctest::Approx(static_cast<double>(units)));
  }
}

TEST_CASE("exhaustive matches the brute-force oracle on random instances") {
  for (std::uint64_t seed = 0; seed < 25; ++seed) {
    Rng rng = Rng::substream(seed, "exhaustive-oracle");
    auto [state, model] = testutil::random_monotone_instance(7, rng);
    std::size_t units = 1 + rng.uniform_int(3);

    MetricSpec total{MetricKind::TotalEdgeWeight};
    MetricSpec expected;
    expected.kind = MetricKind::ExpectedDyadSum;
    expected.model = model;
    for (auto kind : {InterventionKind::RemoveNodeExcise, InterventionKind::RemoveNodeReplace}) {
      Budget budget{units, kind};
      for (const MetricSpec* metric : {&total, &expected}) {
        OptimizationResult r = exhaustive_optimize(state, *metric, budget);
        double oracle = brute_force_best(state, *metric, kind, units);
        CHECK(r.metric_final == doctest::Approx(oracle).epsilon(1e-10));
      }
    }
  }
}

TEST_CASE("exhaustive at full budget reaches zero under excise") {
  Rng rng(67);
  auto [state, model] = testutil::random_monotone_instance(6, rng);
  MetricSpec metric;
  metric.kind = MetricKind::ExpectedDyadSum;
  metric.model = model;
  Budget budget{6, InterventionKind::RemoveNodeExcise};
  OptimizationResult r = exhaustive_optimize(state, metric, budget);
  CHECK(r.metric_final == doctest::Approx(0.0));
}

TEST_CASE("exhaustive guards") {
  NetworkState state;
  state.focal = WeightedNetwork::empty(40);
  MetricSpec metric{MetricKind::TotalEdgeWeight};
  CHECK_THROWS_AS(
      exhaustive_optimize(state, metric, Budget{20, InterventionKind::RemoveNodeExcise}),
      FeasibilityError);
  CHECK_THROWS_AS(exhaustive_optimize(state, metric, Budget{2, InterventionKind::AddEdgeUnit}),
                  UnsupportedChangeError);
}

TEST_CASE("degree heuristic removes the hub of a star") {
  NetworkState state;
  state.focal = WeightedNetwork::empty(5);
  for (std::size_t leaf = 1; leaf < 5; ++leaf) state.focal.set_weight(0, leaf, 1.0);
  MetricSpec metric{MetricKind::TotalEdgeWeight};
  OptimizationResult r =
      degree_heuristic(state, metric, Budget{1, InterventionKind::RemoveNodeReplace});
  REQUIRE(r.chosen.size() == 1);
  CHECK(r.chosen[0].node == 0);
  CHECK(r.metric_final == doctest::Approx(0.0));
}

TEST_CASE("degree heuristic breaks ties by lowest node index") {
  NetworkState state;
  state.focal = WeightedNetwork::empty(4);
  state.focal.set_weight(0, 1, 1.0);
  state.focal.set_weight(2, 3, 1.0);  // all degrees equal
  MetricSpec metric{MetricKind::TotalEdgeWeight};
  OptimizationResult r =
      degree_heuristic(state, metric, Budget{2, InterventionKind::RemoveNodeReplace});
  CHECK(r.chosen[0].node == 0);
  CHECK(r.chosen[1].node == 1);
}

TEST_CASE("degree heuristic can rank on a named covariate") {
  NetworkState state;
  state.focal = WeightedNetwork::empty(3);
  WeightedNetwork cov = WeightedNetwork::empty(3);
  cov.set_weight(1, 2, 5.0);
  state.covariates["friend"] = cov;
  MetricSpec metric{MetricKind::TotalEdgeWeight};
  OptimizationResult r = degree_heuristic(state, metric,
                                          Budget{1, InterventionKind::RemoveNodeReplace}, "friend");
  CHECK(r.chosen[0].node == 1);
  CHECK_THROWS_AS(
      degree_heuristic(state, metric, Budget{1, InterventionKind::RemoveNodeReplace}, "nope"),
      MissingCovariateError);
}

TEST_CASE("random_best is deterministic and approaches the optimum with many draws") {
  Rng rng(71);
  auto [state, model] = testutil::random_monotone_instance(6, rng);
  MetricSpec metric{MetricKind::TotalEdgeWeight};
  Budget budget{2, InterventionKind::RemoveNodeReplace};

  OptimizationResult once = random_best(state, metric, budget, 1, 42);
  OptimizationResult again = random_best(state, metric, budget, 1, 42);
  CHECK(once.metric_final == again.metric_final);
  REQUIRE(once.chosen.size() == again.chosen.size());
  for (std::size_t k = 0; k < once.chosen.size(); ++k)
    CHECK(once.chosen[k].node == again.chosen[k].node);

  OptimizationResult many = random_best(state, metric, budget, 500, 42);
  OptimizationResult best = exhaustive_optimize(state, metric, budget);
  CHECK(many.metric_final == doctest::Approx(best.metric_final).epsilon(1e-9));
}

TEST_CASE("strategy ordering: exhaustive <= greedy <= initial on monotone metrics") {
  for (std::uint64_t seed = 0; seed < 15; ++seed) {
    Rng rng = Rng::substream(seed, "ordering");
    auto [state, model] = testutil::random_monotone_instance(7, rng);
    MetricSpec metric;
    metric.kind = MetricKind::ExpectedDyadSum;
    metric.model = model;
    Budget budget{2, InterventionKind::RemoveNodeReplace};
    OptimizationResult g = greedy_optimize(state, metric, budget);
    OptimizationResult e = exhaustive_optimize(state, metric, budget);
    double initial = evaluate(metric, state);
    CHECK(e.metric_final <= g.metric_final + 1e-10);
    CHECK(g.metric_final <= initial + 1e-10);
    // greedy trace is non-increasing for removals under a monotone metric
    for (std::size_t t = 1; t < g.trace.size(); ++t) CHECK(g.trace[t] <= g.trace[t - 1] + 1e-10);
  }
}

TEST_CASE("optimization result serializes with labels") {
  NetworkState state = testutil::counterexample_fixture();
  MetricSpec metric{MetricKind::TotalEdgeWeight};
  OptimizationResult r =
      greedy_optimize(state, metric, Budget{2, InterventionKind::RemoveNodeExcise});
  Json j = to_json(r);
  CHECK(j.at("strategy") == "greedy");
  CHECK(j.at("chosen")[0] == "remove-node-excise i");
  CHECK(j.at("trace").size() == r.trace.size());
}
