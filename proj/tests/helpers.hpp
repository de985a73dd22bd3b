#pragma once

#include <netmod/netmod.hpp>

#include <set>
#include <string>
#include <utility>
#include <vector>

namespace testutil {

using namespace netmod;

// Five-node instance where greedy removal is provably suboptimal:
// i carries the most weight in round one but removing {j, k} clears
// every tie.
inline NetworkState counterexample_fixture() {
  NetworkState state;
  state.focal = WeightedNetwork::empty({"i", "j", "k", "a", "b"});
  state.focal.set_weight(0, 1, 4.0);  // i--j
  state.focal.set_weight(0, 2, 4.0);  // i--k
  state.focal.set_weight(1, 3, 3.0);  // j--a
  state.focal.set_weight(2, 4, 3.0);  // k--b
  return state;
}

inline WeightedNetwork random_weighted_network(std::size_t n, Rng& rng, double density = 0.5,
                                               double max_weight = 3.0) {
  WeightedNetwork net = WeightedNetwork::empty(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      if (rng.bernoulli(density))
        net.set_weight(i, j, 1.0 + rng.uniform() * (max_weight - 1.0));
  return net;
}

inline WeightedNetwork random_binary_network(std::size_t n, Rng& rng, double density = 0.5) {
  WeightedNetwork net = WeightedNetwork::empty(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      if (rng.bernoulli(density)) net.set_weight(i, j, 1.0);
  return net;
}

inline WeightedNetwork random_integer_network(std::size_t n, int max_weight, Rng& rng,
                                              double density = 0.6) {
  WeightedNetwork net = WeightedNetwork::empty(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      if (rng.bernoulli(density))
        net.set_weight(i, j, static_cast<double>(1 + rng.uniform_int(max_weight)));
  return net;
}

// Dyadic-model state with nonnegative coefficients and covariates.
inline std::pair<NetworkState, DyadicModel> random_monotone_instance(std::size_t n, Rng& rng) {
  NetworkState state;
  state.focal = random_binary_network(n, rng, 0.4);
  state.covariates["org"] = random_binary_network(n, rng, 0.3);
  state.covariates["edu"] = random_binary_network(n, rng, 0.3);
  DyadicModel model;
  model.beta = Eigen::VectorXd(3);
  model.beta << -2.0 + rng.uniform(), rng.uniform() * 1.5, rng.uniform() * 1.5;
  model.predictor_names = {"org", "edu"};
  return {state, model};
}

// Noordin-shaped synthetic bundle: binary communication focal network,
// exogenous org/edu covariates, and a positive-coefficient dyadic model
// predicting collaboration from all three.
struct SyntheticBundle {
  NetworkState state;
  DyadicModel model;
  std::vector<StatisticSpec> ergm_statistics;
};

inline SyntheticBundle synthetic_noordin_bundle(std::size_t n, std::uint64_t seed) {
  Rng rng = Rng::substream(seed, "synthetic-bundle");
  SyntheticBundle b;
  b.state.covariates["org"] = random_binary_network(n, rng, 0.25);
  b.state.covariates["edu"] = random_binary_network(n, rng, 0.25);
  // communication leans on org ties so the covariates matter
  WeightedNetwork comm = WeightedNetwork::empty(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      double p = 0.12 + 0.5 * b.state.covariates.at("org").weight(i, j);
      if (rng.bernoulli(p)) comm.set_weight(i, j, 1.0);
    }
  b.state.focal = comm;
  b.state.covariates["communication"] = comm;
  b.model.beta = Eigen::VectorXd(4);
  b.model.beta << -3.0, 1.2, 0.8, 0.5;
  b.model.predictor_names = {"communication", "org", "edu"};
  b.ergm_statistics = {StatisticSpec::edges(), StatisticSpec::edge_covariate_sum("org")};
  return b;
}

}  // namespace testutil
