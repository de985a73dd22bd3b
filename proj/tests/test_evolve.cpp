#include <doctest.h>

#include <netmod/netmod.hpp>

#include <cmath>

#include "helpers.hpp"

using namespace netmod;

namespace {

ErgmModel edges_only(double theta) {
  ErgmModel model;
  model.statistics = {StatisticSpec::edges()};
  model.theta = Eigen::VectorXd(1);
  model.theta << theta;
  model.mode = ErgmMode::Binary;
  return model;
}

double logistic(double x) { return 1.0 / (1.0 + std::exp(-x)); }

}  // namespace

TEST_CASE("step zero pins the post-intervention metric exactly") {
  Rng rng(7);
  NetworkState state;
  state.focal = testutil::random_binary_network(8, rng, 0.5);
  MetricSpec metric{MetricKind::TotalEdgeWeight};
  EvolutionConfig cfg;
  cfg.steps = 5;
  cfg.replicates = 20;
  cfg.seed = 11;
  EvolutionSummary s = run_evolution(state, edges_only(0.3), metric, cfg);
  REQUIRE(s.mean.size() == 6);
  REQUIRE(s.sd.size() == 6);
  CHECK(s.mean[0] == evaluate(metric, state));
  CHECK(s.sd[0] == 0.0);
  CHECK(s.replicates == 20);
}

TEST_CASE("same seed gives bitwise identical summaries") {
  Rng rng(13);
  NetworkState state;
  state.focal = testutil::random_binary_network(8, rng, 0.4);
  MetricSpec metric{MetricKind::TotalEdgeWeight};
  EvolutionConfig cfg;
  cfg.steps = 10;
  cfg.replicates = 30;
  cfg.seed = 99;
  EvolutionSummary a = run_evolution(state, edges_only(-0.5), metric, cfg);
  EvolutionSummary b = run_evolution(state, edges_only(-0.5), metric, cfg);
  CHECK(a.mean == b.mean);
  CHECK(a.sd == b.sd);
}

TEST_CASE("parallel replicates reproduce the serial result exactly") {
  Rng rng(17);
  NetworkState state;
  state.focal = testutil::random_binary_network(10, rng, 0.4);
  MetricSpec metric{MetricKind::TotalEdgeWeight};
  EvolutionConfig cfg;
  cfg.steps = 8;
  cfg.replicates = 40;
  cfg.seed = 5;
  cfg.jobs = 1;
  EvolutionSummary serial = run_evolution(state, edges_only(0.2), metric, cfg);
  cfg.jobs = 4;
  EvolutionSummary parallel = run_evolution(state, edges_only(0.2), metric, cfg);
  CHECK(serial.mean == parallel.mean);
  CHECK(serial.sd == parallel.sd);
}

TEST_CASE("edges-only evolution settles at the stationary density") {
  // For an edges-only model the per-dyad chains are independent with
  // stationary edge probability logistic(theta).
  const double theta = 0.5;
  NetworkState state;
  state.focal = WeightedNetwork::empty(10);
  MetricSpec metric{MetricKind::TotalEdgeWeight};
  EvolutionConfig cfg;
  cfg.steps = 20;
  cfg.replicates = 200;
  cfg.seed = 31;
  cfg.burn_in = 60;
  cfg.jobs = 4;
  EvolutionSummary s = run_evolution(state, edges_only(theta), metric, cfg);
  const double expected = 45.0 * logistic(theta);
  double late = 0.0;
  for (std::size_t t = 0; t <= cfg.steps; ++t) late += s.mean[t];
  late /= static_cast<double>(cfg.steps + 1);
  CHECK(late == doctest::Approx(expected).epsilon(0.04));
  for (std::size_t t = 1; t <= cfg.steps; ++t) CHECK(s.sd[t] > 0.0);
}

TEST_CASE("unit rescaling maps the mean trajectory onto [0, 1]") {
  NetworkState state;
  state.focal = WeightedNetwork::empty(8);
  MetricSpec metric{MetricKind::TotalEdgeWeight};
  EvolutionConfig cfg;
  cfg.steps = 15;
  cfg.replicates = 25;
  cfg.seed = 3;
  cfg.rescale_to_unit = true;
  EvolutionSummary s = run_evolution(state, edges_only(1.0), metric, cfg);
  CHECK(s.rescaled);
  double lo = *std::min_element(s.mean.begin(), s.mean.end());
  double hi = *std::max_element(s.mean.begin(), s.mean.end());
  CHECK(lo == doctest::Approx(0.0));
  CHECK(hi == doctest::Approx(1.0));
  CHECK(s.rescale_min < s.rescale_max);
}

TEST_CASE("evolution can feed the focal network back into its own model") {
  Rng rng(23);
  NetworkState state;
  state.focal = testutil::random_binary_network(8, rng, 0.5);
  state.covariates["communication"] = state.focal;
  DyadicModel model;
  model.beta = Eigen::VectorXd(2);
  model.beta << -1.0, 1.0;
  model.predictor_names = {"communication"};
  MetricSpec metric;
  metric.kind = MetricKind::ExpectedDyadSum;
  metric.model = model;
  metric.focal_as_covariate = "communication";
  EvolutionConfig cfg;
  cfg.steps = 10;
  cfg.replicates = 10;
  cfg.seed = 77;
  EvolutionSummary s = run_evolution(state, edges_only(0.0), metric, cfg);
  CHECK(s.mean[0] == doctest::Approx(evaluate(metric, state)));
  bool moved = false;
  for (std::size_t t = 1; t < s.mean.size(); ++t)
    if (s.mean[t] != s.mean[0]) moved = true;
  CHECK(moved);
}

TEST_CASE("compare_strategies: a strategy differs from itself by zero") {
  NetworkState state;
  state.focal = WeightedNetwork::empty(8);
  MetricSpec metric{MetricKind::TotalEdgeWeight};
  EvolutionConfig cfg;
  cfg.steps = 6;
  cfg.replicates = 15;
  cfg.seed = 41;
  EvolutionSummary s = run_evolution(state, edges_only(0.4), metric, cfg);
  ComparisonReport report = compare_strategies({{"a", s}, {"b", s}});
  for (std::size_t t = 0; t < s.mean.size(); ++t) {
    CHECK(report.pairwise_diff[0][1][t] == 0.0);
    CHECK(report.pairwise_diff[1][0][t] == 0.0);
  }
}

TEST_CASE("compare_strategies reproduces an injected constant gap") {
  EvolutionSummary base;
  base.mean = {10.0, 11.0, 12.0};
  base.sd = {0.0, 1.0, 1.0};
  base.replicates = 50;
  base.metric_name = "total-weight";
  EvolutionSummary shifted = base;
  for (auto& v : shifted.mean) v -= 2.5;
  ComparisonReport report = compare_strategies({{"base", base}, {"shifted", shifted}});
  for (std::size_t t = 0; t < 3; ++t)
    CHECK(report.pairwise_diff[0][1][t] == doctest::Approx(2.5));

  ComparisonReport scaled = compare_strategies({{"base", base}, {"shifted", shifted}}, true);
  CHECK(scaled.rescaled);
  CHECK(scaled.rescale_min == doctest::Approx(7.5));
  CHECK(scaled.rescale_max == doctest::Approx(12.0));
  // both trajectories land in [0, 1] after the shared rescale
  for (const auto& s : scaled.strategies)
    for (double v : s.summary.mean) {
      CHECK(v >= 0.0);
      CHECK(v <= 1.0);
    }
  // differences shrink by the shared span, not per-strategy spans
  CHECK(scaled.pairwise_diff[0][1][0] == doctest::Approx(2.5 / 4.5));
}

TEST_CASE("compare_strategies rejects mismatched summaries") {
  EvolutionSummary a;
  a.mean = {1.0, 2.0};
  a.sd = {0.0, 0.0};
  a.replicates = 10;
  a.metric_name = "total-weight";
  EvolutionSummary b = a;
  b.mean.push_back(3.0);
  b.sd.push_back(0.0);
  CHECK_THROWS_AS(compare_strategies({{"a", a}, {"b", b}}), ShapeMismatchError);
  CHECK_THROWS_AS(compare_strategies({}), ShapeMismatchError);
}

TEST_CASE("percentage improvement: exact arithmetic cases") {
  EvolutionSummary base;
  base.mean = {10.0, 10.0, 10.0};
  base.sd = {0.0, 1.0, 0.0};
  base.replicates = 100;
  EvolutionSummary treated = base;
  treated.mean = {10.0, 5.0, 0.0};
  treated.sd = {0.0, 2.0, 0.0};

  std::vector<ImprovementStep> steps = percentage_improvement(treated, base);
  REQUIRE(steps.size() == 3);
  CHECK(steps[0].estimate == doctest::Approx(0.0));
  CHECK(steps[0].lower == doctest::Approx(0.0));
  CHECK(steps[0].upper == doctest::Approx(0.0));

  CHECK(steps[1].estimate == doctest::Approx(50.0));
  double se = std::sqrt(4.0 / 100.0 + 1.0 / 100.0);
  double half = 2.0 * 100.0 / 10.0 * se;
  CHECK(steps[1].lower == doctest::Approx(50.0 - half));
  CHECK(steps[1].upper == doctest::Approx(50.0 + half));

  CHECK(steps[2].estimate == doctest::Approx(100.0));
}

TEST_CASE("percentage improvement is undefined on a zero baseline") {
  EvolutionSummary base;
  base.mean = {0.0};
  base.sd = {0.0};
  base.replicates = 10;
  EvolutionSummary treated = base;
  treated.mean = {1.0};
  std::vector<ImprovementStep> steps = percentage_improvement(treated, base);
  CHECK_FALSE(steps[0].defined);

  EvolutionSummary other;
  other.mean = {1.0, 2.0};
  other.sd = {0.0, 0.0};
  other.replicates = 10;
  CHECK_THROWS_AS(percentage_improvement(other, base), ShapeMismatchError);
}

TEST_CASE("improvement band covers a real simulated gap") {
  // Burned-in edges-only chains at theta = -1 (treated) versus theta = +1
  // (baseline): per-dyad stationary probabilities are logistic(theta), so
  // the true improvement is known in closed form.
  NetworkState state;
  state.focal = WeightedNetwork::empty(10);
  MetricSpec metric{MetricKind::TotalEdgeWeight};
  EvolutionConfig cfg;
  cfg.steps = 20;
  cfg.replicates = 150;
  cfg.burn_in = 50;
  cfg.jobs = 4;
  cfg.seed = 8;
  EvolutionSummary treated = run_evolution(state, edges_only(-1.0), metric, cfg);
  cfg.seed = 9;
  EvolutionSummary baseline = run_evolution(state, edges_only(1.0), metric, cfg);
  std::vector<ImprovementStep> steps = percentage_improvement(treated, baseline);

  const double truth = 100.0 * (logistic(1.0) - logistic(-1.0)) / logistic(1.0);
  std::size_t covered = 0;
  double mean_est = 0.0;
  for (const auto& s : steps) {
    REQUIRE(s.defined);
    CHECK(s.lower < s.upper);
    if (s.lower <= truth && truth <= s.upper) ++covered;
    mean_est += s.estimate;
  }
  mean_est /= static_cast<double>(steps.size());
  CHECK(mean_est == doctest::Approx(truth).epsilon(0.05));
  // each step's +/-2 SE band covers the truth ~95% of the time
  CHECK(covered >= steps.size() * 7 / 10);
}

TEST_CASE("evolution summary serializes and round-trips") {
  NetworkState state;
  state.focal = WeightedNetwork::empty(6);
  MetricSpec metric{MetricKind::TotalEdgeWeight};
  EvolutionConfig cfg;
  cfg.steps = 4;
  cfg.replicates = 8;
  cfg.seed = 21;
  EvolutionSummary s = run_evolution(state, edges_only(0.7), metric, cfg);
  Json j = to_json(s);
  CHECK(j.at("mean").size() == 5);
  CHECK(j.at("replicates") == 8);
  CHECK(j.at("seed") == 21);
  EvolutionSummary back = evolution_summary_from_json(j);
  CHECK(back.mean == s.mean);
  CHECK(back.sd == s.sd);
}
