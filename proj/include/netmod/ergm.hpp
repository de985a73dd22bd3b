#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <functional>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "netmod/errors.hpp"
#include "netmod/network.hpp"
#include "netmod/rng.hpp"

namespace netmod {

enum class StatisticKind {
  Edges,
  Isolates,
  Gwesp,
  EdgeCovariateSum,
  NonZero,
  WeightSum,
  TransitiveWeights,
};

inline const char* to_string(StatisticKind k) {
  switch (k) {
    case StatisticKind::Edges: return "edges";
    case StatisticKind::Isolates: return "isolates";
    case StatisticKind::Gwesp: return "gwesp";
    case StatisticKind::EdgeCovariateSum: return "edge-covariate-sum";
    case StatisticKind::NonZero: return "nonzero";
    case StatisticKind::WeightSum: return "weight-sum";
    case StatisticKind::TransitiveWeights: return "transitive-weights";
  }
  return "?";
}

inline StatisticKind statistic_kind_from_string(const std::string& s) {
  if (s == "edges") return StatisticKind::Edges;
  if (s == "isolates") return StatisticKind::Isolates;
  if (s == "gwesp") return StatisticKind::Gwesp;
  if (s == "edge-covariate-sum") return StatisticKind::EdgeCovariateSum;
  if (s == "nonzero") return StatisticKind::NonZero;
  if (s == "weight-sum") return StatisticKind::WeightSum;
  if (s == "transitive-weights") return StatisticKind::TransitiveWeights;
  throw ValidationError("unknown statistic kind: " + s);
}

struct StatisticSpec {
  StatisticKind kind;
  double alpha = 0.0;  // Gwesp decay
  std::string name;    // EdgeCovariateSum covariate key

  static StatisticSpec edges() { return {StatisticKind::Edges}; }
  static StatisticSpec isolates() { return {StatisticKind::Isolates}; }
  static StatisticSpec gwesp(double alpha) { return {StatisticKind::Gwesp, alpha}; }
  static StatisticSpec edge_covariate_sum(std::string name) {
    return {StatisticKind::EdgeCovariateSum, 0.0, std::move(name)};
  }
  static StatisticSpec nonzero() { return {StatisticKind::NonZero}; }
  static StatisticSpec weight_sum() { return {StatisticKind::WeightSum}; }
  static StatisticSpec transitive_weights() { return {StatisticKind::TransitiveWeights}; }
};

enum class ErgmMode { Binary, Valued };
enum class ReferenceMeasure { Bernoulli, DiscreteUniform };

struct ErgmModel {
  std::vector<StatisticSpec> statistics;
  Eigen::VectorXd theta;
  ErgmMode mode = ErgmMode::Binary;
  int max_weight = 1;  // valued-mode weight cap
  ReferenceMeasure reference = ReferenceMeasure::Bernoulli;
  bool converged = false;
  int iterations = 0;

  void validate() const {
    if (static_cast<std::size_t>(theta.size()) != statistics.size())
      throw ValidationError("theta length does not match statistic list");
    if (mode == ErgmMode::Valued && max_weight < 1)
      throw ValidationError("valued mode requires max_weight >= 1");
  }
};

using CovariateMap = std::map<std::string, WeightedNetwork>;

// Weight each connected pair with i shared partners receives in the GWESP
// statistic: 1 - (1 - e^-alpha)^i.
inline double gwesp_weight(double alpha, int shared_partners) {
  if (shared_partners <= 0) return 0.0;
  return 1.0 - std::pow(1.0 - std::exp(-alpha), shared_partners);
}

namespace detail {

inline void require_binary(const WeightedNetwork& net, const char* what) {
  if (!net.is_binary()) throw ModeMismatchError(std::string(what) + " requires a binary network");
}

inline int shared_partners(const WeightedNetwork& net, std::size_t a, std::size_t b) {
  int count = 0;
  for (std::size_t m = 0; m < net.n(); ++m) {
    if (m == a || m == b) continue;
    if (net.weight(a, m) > 0.0 && net.weight(b, m) > 0.0) ++count;
  }
  return count;
}

// min over the pair weight and its strongest two-path.
template <typename WFun>
double transitive_term(std::size_t n, WFun&& w, std::size_t a, std::size_t b) {
  double direct = w(a, b);
  if (direct <= 0.0) return 0.0;
  double best = 0.0;
  for (std::size_t m = 0; m < n; ++m) {
    if (m == a || m == b) continue;
    best = std::max(best, std::min(w(a, m), w(b, m)));
  }
  return std::min(direct, best);
}

inline const WeightedNetwork& find_covariate(const CovariateMap& covariates,
                                             const std::string& name) {
  auto it = covariates.find(name);
  if (it == covariates.end()) throw MissingCovariateError("no covariate named '" + name + "'");
  return it->second;
}

}  // namespace detail

inline double gwesp(const WeightedNetwork& net, double alpha) {
  detail::require_binary(net, "gwesp");
  if (alpha < 0.0) throw ValidationError("gwesp alpha must be nonnegative");
  double sum = 0.0;
  for (std::size_t i = 0; i < net.n(); ++i)
    for (std::size_t j = i + 1; j < net.n(); ++j) {
      if (net.weight(i, j) <= 0.0) continue;
      sum += gwesp_weight(alpha, detail::shared_partners(net, i, j));
    }
  return std::exp(alpha) * sum;
}

inline double compute_statistic(const WeightedNetwork& net, const CovariateMap& covariates,
                                const StatisticSpec& spec) {
  const std::size_t n = net.n();
  switch (spec.kind) {
    case StatisticKind::Edges:
      detail::require_binary(net, "edges");
      [[fallthrough]];
    case StatisticKind::NonZero: {
      int count = 0;
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
          if (net.weight(i, j) > 0.0) ++count;
      return count;
    }
    case StatisticKind::Isolates: {
      int count = 0;
      for (std::size_t v = 0; v < n; ++v)
        if (net.weighted_degree(v) == 0.0) ++count;
      return count;
    }
    case StatisticKind::Gwesp:
      return gwesp(net, spec.alpha);
    case StatisticKind::EdgeCovariateSum: {
      const WeightedNetwork& cov = detail::find_covariate(covariates, spec.name);
      if (cov.n() != n) throw DimensionMismatchError("covariate size mismatch");
      double sum = 0.0;
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
          if (net.weight(i, j) > 0.0) sum += cov.weight(i, j);
      return sum;
    }
    case StatisticKind::WeightSum:
      return net.total_edge_weight();
    case StatisticKind::TransitiveWeights: {
      auto w = [&](std::size_t a, std::size_t b) { return net.weight(a, b); };
      double sum = 0.0;
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
          sum += detail::transitive_term(n, w, i, j);
      return sum;
    }
  }
  throw ValidationError("unknown statistic kind");
}

inline Eigen::VectorXd compute_statistics(const WeightedNetwork& net,
                                          const CovariateMap& covariates,
                                          const std::vector<StatisticSpec>& specs) {
  Eigen::VectorXd out(static_cast<Eigen::Index>(specs.size()));
  for (std::size_t k = 0; k < specs.size(); ++k)
    out(static_cast<Eigen::Index>(k)) = compute_statistic(net, covariates, specs[k]);
  return out;
}

namespace detail {

// Shared-partner count for pair (a, b) with the (i, j) adjacency forced off.
inline int shared_partners_excluding(const WeightedNetwork& net, std::size_t a, std::size_t b,
                                     std::size_t i, std::size_t j) {
  auto adj = [&](std::size_t x, std::size_t y) {
    if ((x == i && y == j) || (x == j && y == i)) return false;
    return net.weight(x, y) > 0.0;
  };
  int count = 0;
  for (std::size_t m = 0; m < net.n(); ++m) {
    if (m == a || m == b) continue;
    if (adj(a, m) && adj(b, m)) ++count;
  }
  return count;
}

// GWESP delta for switching the (i, j) edge ON, evaluated as if it were
// currently absent. Removal is the negation.
inline double gwesp_add_delta(const WeightedNetwork& net, double alpha, std::size_t i,
                              std::size_t j) {
  const std::size_t n = net.n();
  auto adj = [&](std::size_t x, std::size_t y) {
    if ((x == i && y == j) || (x == j && y == i)) return false;
    return net.weight(x, y) > 0.0;
  };
  double delta = 0.0;
  int sp_ij = 0;
  for (std::size_t k = 0; k < n; ++k) {
    if (k == i || k == j) continue;
    bool near_i = adj(i, k);
    bool near_j = adj(j, k);
    if (near_i && near_j) {
      ++sp_ij;
      // the new edge makes j a shared partner of pair (i, k) and vice versa
      int sp_ik = shared_partners_excluding(net, i, k, i, j);
      int sp_jk = shared_partners_excluding(net, j, k, i, j);
      delta += gwesp_weight(alpha, sp_ik + 1) - gwesp_weight(alpha, sp_ik);
      delta += gwesp_weight(alpha, sp_jk + 1) - gwesp_weight(alpha, sp_jk);
    }
  }
  delta += gwesp_weight(alpha, sp_ij);
  return std::exp(alpha) * delta;
}

}  // namespace detail

// s(y with dyad set to new_weight) - s(y), computed without a full recompute.
inline Eigen::VectorXd change_statistics(const WeightedNetwork& net,
                                         const CovariateMap& covariates,
                                         const std::vector<StatisticSpec>& specs,
                                         std::size_t i, std::size_t j, double new_weight) {
  if (i >= net.n() || j >= net.n() || i == j) throw IndexError("bad dyad");
  if (i > j) std::swap(i, j);
  if (new_weight < 0.0) throw NegativeWeightError("new weight must be nonnegative");
  const double old_weight = net.weight(i, j);
  Eigen::VectorXd delta = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(specs.size()));
  if (new_weight == old_weight) return delta;
  const bool old_on = old_weight > 0.0;
  const bool new_on = new_weight > 0.0;
  const std::size_t n = net.n();
  for (std::size_t k = 0; k < specs.size(); ++k) {
    const StatisticSpec& spec = specs[k];
    double d = 0.0;
    switch (spec.kind) {
      case StatisticKind::Edges:
        detail::require_binary(net, "edges");
        [[fallthrough]];
      case StatisticKind::NonZero:
        d = static_cast<double>(new_on) - static_cast<double>(old_on);
        break;
      case StatisticKind::Isolates: {
        double di = net.weighted_degree(i);
        double dj = net.weighted_degree(j);
        double shift = new_weight - old_weight;
        d = (static_cast<double>(di + shift == 0.0) - static_cast<double>(di == 0.0)) +
            (static_cast<double>(dj + shift == 0.0) - static_cast<double>(dj == 0.0));
        break;
      }
      case StatisticKind::Gwesp: {
        detail::require_binary(net, "gwesp");
        if (new_weight != 0.0 && new_weight != 1.0)
          throw ModeMismatchError("gwesp change requires binary weights");
        if (old_on == new_on) break;
        double add = detail::gwesp_add_delta(net, spec.alpha, i, j);
        d = new_on ? add : -add;
        break;
      }
      case StatisticKind::EdgeCovariateSum: {
        const WeightedNetwork& cov = detail::find_covariate(covariates, spec.name);
        d = cov.weight(i, j) * (static_cast<double>(new_on) - static_cast<double>(old_on));
        break;
      }
      case StatisticKind::WeightSum:
        d = new_weight - old_weight;
        break;
      case StatisticKind::TransitiveWeights: {
        auto w_old = [&](std::size_t a, std::size_t b) { return net.weight(a, b); };
        auto w_new = [&](std::size_t a, std::size_t b) {
          if ((a == i && b == j) || (a == j && b == i)) return new_weight;
          return net.weight(a, b);
        };
        // only terms for pairs touching i or j can change
        d = detail::transitive_term(n, w_new, i, j) - detail::transitive_term(n, w_old, i, j);
        for (std::size_t m = 0; m < n; ++m) {
          if (m == i || m == j) continue;
          d += detail::transitive_term(n, w_new, i, m) - detail::transitive_term(n, w_old, i, m);
          d += detail::transitive_term(n, w_new, j, m) - detail::transitive_term(n, w_old, j, m);
        }
        break;
      }
    }
    delta(static_cast<Eigen::Index>(k)) = d;
  }
  return delta;
}

namespace detail {

// Per-dyad change-statistic table for every candidate weight 0..max_weight,
// relative to the observed network. Row v of entry d is s(y; d<-v) - s(y).
struct MpleTables {
  std::vector<Eigen::MatrixXd> deltas;  // per dyad: (max_weight+1) x p
  std::vector<int> observed;            // per dyad: observed weight
  std::vector<std::pair<std::size_t, std::size_t>> dyads;
};

inline MpleTables build_mple_tables(const WeightedNetwork& net, const CovariateMap& covariates,
                                    const std::vector<StatisticSpec>& specs, int max_weight) {
  MpleTables t;
  const auto p = static_cast<Eigen::Index>(specs.size());
  for (std::size_t i = 0; i < net.n(); ++i)
    for (std::size_t j = i + 1; j < net.n(); ++j) {
      double wobs = net.weight(i, j);
      double rounded = std::round(wobs);
      if (std::abs(wobs - rounded) > 1e-9 || rounded < 0 || rounded > max_weight)
        throw ModeMismatchError("weights must be integers in [0, max_weight] for MPLE");
      Eigen::MatrixXd d(max_weight + 1, p);
      for (int v = 0; v <= max_weight; ++v)
        d.row(v) = change_statistics(net, covariates, specs, i, j, v).transpose();
      t.deltas.push_back(std::move(d));
      t.observed.push_back(static_cast<int>(rounded));
      t.dyads.emplace_back(i, j);
    }
  return t;
}

// Negative log pseudolikelihood with gradient and Hessian under a uniform
// reference: per dyad, softmax over candidate weights of theta . delta.
inline double mple_negloglik(const MpleTables& t, const Eigen::VectorXd& theta,
                             Eigen::VectorXd* grad, Eigen::MatrixXd* hess = nullptr) {
  const Eigen::Index p = theta.size();
  double nll = 0.0;
  if (grad) grad->setZero(p);
  if (hess) hess->setZero(p, p);
  for (std::size_t d = 0; d < t.deltas.size(); ++d) {
    const Eigen::MatrixXd& del = t.deltas[d];
    Eigen::VectorXd scores = del * theta;
    double m = scores.maxCoeff();
    Eigen::VectorXd ex = (scores.array() - m).exp();
    double z = ex.sum();
    nll -= scores(t.observed[d]) - (m + std::log(z));
    if (grad || hess) {
      Eigen::VectorXd probs = ex / z;
      Eigen::VectorXd mean = del.transpose() * probs;
      if (grad) *grad -= del.row(t.observed[d]).transpose() - mean;
      if (hess) {
        Eigen::MatrixXd weighted = del;
        for (Eigen::Index v = 0; v < del.rows(); ++v) weighted.row(v) *= probs(v);
        *hess += del.transpose() * weighted - mean * mean.transpose();
      }
    }
  }
  return nll;
}

}  // namespace detail

// Maximum pseudolikelihood fit. Binary mode is the classic logistic MPLE;
// valued mode maximizes per-dyad conditionals over {0..max_weight} with a
// discrete-uniform reference. Both reduce to the same softmax objective.
inline ErgmModel fit_mple(const WeightedNetwork& net, const CovariateMap& covariates,
                          const std::vector<StatisticSpec>& specs, ErgmMode mode,
                          int max_weight = 1) {
  if (specs.empty()) throw ValidationError("need at least one statistic");
  if (mode == ErgmMode::Binary) {
    detail::require_binary(net, "binary MPLE");
    max_weight = 1;
  } else if (max_weight < 1) {
    throw ValidationError("valued mode requires max_weight >= 1");
  }
  detail::MpleTables tables = detail::build_mple_tables(net, covariates, specs, max_weight);

  ErgmModel model;
  model.statistics = specs;
  model.mode = mode;
  model.max_weight = max_weight;
  model.reference = mode == ErgmMode::Binary ? ReferenceMeasure::Bernoulli
                                             : ReferenceMeasure::DiscreteUniform;
  const auto p = static_cast<Eigen::Index>(specs.size());
  Eigen::VectorXd theta = Eigen::VectorXd::Zero(p);
  Eigen::VectorXd grad(p);
  Eigen::MatrixXd hess(p, p);
  double nll = detail::mple_negloglik(tables, theta, &grad, &hess);
  for (int iter = 1; iter <= 500; ++iter) {
    model.iterations = iter;
    // Newton step with step halving on the negative log pseudolikelihood
    Eigen::MatrixXd damped = hess + 1e-10 * Eigen::MatrixXd::Identity(p, p);
    Eigen::VectorXd direction = damped.ldlt().solve(grad);
    if (!direction.allFinite()) direction = grad;
    double s = 1.0;
    Eigen::VectorXd trial;
    bool improved = false;
    for (int half = 0; half < 60; ++half) {
      trial = theta - s * direction;
      if (detail::mple_negloglik(tables, trial, nullptr) <= nll) {
        improved = true;
        break;
      }
      s /= 2.0;
    }
    if (!improved) break;  // at a numerical optimum
    double move = (trial - theta).cwiseAbs().maxCoeff();
    theta = trial;
    nll = detail::mple_negloglik(tables, theta, &grad, &hess);
    if (theta.cwiseAbs().maxCoeff() > 30.0)
      throw SeparationError("pseudolikelihood diverging, statistics separate the data");
    if (move < 1e-6) {
      model.converged = true;
      break;
    }
  }
  if (!model.converged && grad.cwiseAbs().maxCoeff() > 1e-4)
    throw NonConvergenceError("MPLE did not converge in 500 iterations");
  model.converged = true;
  model.theta = theta;
  return model;
}

// One Metropolis-Hastings sweep: every upper-triangle dyad visited once in
// shuffled order. Binary proposes a toggle; valued proposes a uniform draw
// from the non-current weights. Both proposals are symmetric.
inline WeightedNetwork simulate_step(const WeightedNetwork& net, const CovariateMap& covariates,
                                     const ErgmModel& model, Rng& rng) {
  model.validate();
  if (model.mode == ErgmMode::Binary) detail::require_binary(net, "binary simulation");
  WeightedNetwork current = net;
  const std::size_t n = current.n();
  std::vector<std::pair<std::size_t, std::size_t>> dyads;
  dyads.reserve(n * (n - 1) / 2);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) dyads.emplace_back(i, j);
  rng.shuffle(dyads);
  for (auto [i, j] : dyads) {
    double cur = current.weight(i, j);
    double proposal;
    if (model.mode == ErgmMode::Binary) {
      proposal = cur > 0.0 ? 0.0 : 1.0;
    } else {
      auto v = static_cast<double>(rng.uniform_int(static_cast<std::uint64_t>(model.max_weight)));
      proposal = v >= cur ? v + 1.0 : v;  // uniform over {0..max_weight} \ {cur}
    }
    Eigen::VectorXd delta = change_statistics(current, covariates, model.statistics, i, j, proposal);
    double log_ratio = model.theta.dot(delta);
    if (log_ratio >= 0.0 || rng.uniform() < std::exp(log_ratio))
      current.set_weight(i, j, proposal);
  }
  return current;
}

}  // namespace netmod
