#pragma once

#include <cmath>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "netmod/dyadreg.hpp"
#include "netmod/errors.hpp"
#include "netmod/network.hpp"

namespace netmod {

enum class RemovalSemantics { Excise, Replace };

enum class MetricKind { ExpectedDyadSum, CosineDistanceToTarget, TotalEdgeWeight };

inline const char* to_string(MetricKind k) {
  switch (k) {
    case MetricKind::ExpectedDyadSum: return "expected-dyad-sum";
    case MetricKind::CosineDistanceToTarget: return "cosine-distance";
    case MetricKind::TotalEdgeWeight: return "total-weight";
  }
  return "?";
}

// Graph objective f : G -> R, minimized by the optimizer.
struct MetricSpec {
  MetricKind kind = MetricKind::TotalEdgeWeight;
  std::optional<DyadicModel> model;            // ExpectedDyadSum
  std::optional<WeightedNetwork> target;       // CosineDistanceToTarget
  // When set, the focal network is injected as this covariate before the
  // model is evaluated (the evolving network feeds its own predictor).
  std::optional<std::string> focal_as_covariate;

  void validate() const {
    if (kind == MetricKind::ExpectedDyadSum && !model)
      throw ValidationError("expected-dyad-sum requires a fitted dyadic model");
    if (kind == MetricKind::CosineDistanceToTarget) {
      if (!target) throw ValidationError("cosine-distance requires a target network");
      if (target->frobenius_norm() <= 0.0) throw ZeroTargetError("target has zero Frobenius norm");
    }
  }
};

// Sum over upper-triangle dyads of exp(b0 + b.x). Removed nodes contribute
// nothing under excise, exp(b0) per dyad under replace (covariates zeroed).
inline double expected_dyad_sum(const NetworkState& state, const DyadicModel& model,
                                const std::set<std::size_t>& removed,
                                RemovalSemantics semantics) {
  const std::size_t n = state.focal.n();
  for (std::size_t v : removed)
    if (v >= n) throw IndexError("removed node out of range");
  const std::size_t q = model.num_predictors();
  std::vector<const WeightedNetwork*> preds(q);
  for (std::size_t k = 0; k < q; ++k) {
    auto it = state.covariates.find(model.predictor_names[k]);
    if (it == state.covariates.end())
      throw MissingCovariateError("state lacks covariate '" + model.predictor_names[k] + "'");
    if (it->second.n() != n) throw DimensionMismatchError("covariate size mismatch");
    preds[k] = &it->second;
  }
  if (static_cast<std::size_t>(model.beta.size()) != q + 1)
    throw ArityMismatchError("model beta does not match predictor names");
  const double base = std::exp(model.beta(0));
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      bool hit = removed.count(i) || removed.count(j);
      if (hit) {
        if (semantics == RemovalSemantics::Replace) total += base;
        continue;
      }
      double eta = model.beta(0);
      for (std::size_t k = 0; k < q; ++k)
        eta += model.beta(static_cast<Eigen::Index>(k + 1)) * preds[k]->weight(i, j);
      total += std::exp(eta);
    }
  return total;
}

// 1 - cosine of the vectorized weight matrices; 1 when `a` is empty.
inline double cosine_distance(const WeightedNetwork& a, const WeightedNetwork& target) {
  if (a.n() != target.n() || a.labels() != target.labels())
    throw DimensionMismatchError("networks do not share a node set");
  double tnorm = target.frobenius_norm();
  if (tnorm <= 0.0) throw ZeroTargetError("target has zero Frobenius norm");
  double anorm = a.frobenius_norm();
  if (anorm <= 0.0) return 1.0;
  double dot = (a.weights().array() * target.weights().array()).sum();
  return 1.0 - dot / (anorm * tnorm);
}

inline double evaluate(const MetricSpec& spec, const NetworkState& state) {
  spec.validate();
  switch (spec.kind) {
    case MetricKind::TotalEdgeWeight:
      return state.focal.total_edge_weight();
    case MetricKind::CosineDistanceToTarget:
      return cosine_distance(state.focal, *spec.target);
    case MetricKind::ExpectedDyadSum: {
      if (spec.focal_as_covariate) {
        NetworkState patched = state;
        patched.covariates[*spec.focal_as_covariate] = state.focal;
        return expected_dyad_sum(patched, *spec.model, {}, RemovalSemantics::Replace);
      }
      return expected_dyad_sum(state, *spec.model, {}, RemovalSemantics::Replace);
    }
  }
  throw ValidationError("unknown metric kind");
}

}  // namespace netmod
