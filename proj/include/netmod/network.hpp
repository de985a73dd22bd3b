#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "netmod/errors.hpp"

namespace netmod {

// Symmetric nonnegative dyad-weight matrix with node labels.
class WeightedNetwork {
 public:
  WeightedNetwork() = default;

  WeightedNetwork(std::vector<std::string> labels, Eigen::MatrixXd w)
      : labels_(std::move(labels)), w_(std::move(w)) {
    validate();
  }

  static WeightedNetwork empty(std::size_t n) {
    std::vector<std::string> labels(n);
    for (std::size_t i = 0; i < n; ++i) labels[i] = "v" + std::to_string(i);
    return WeightedNetwork(std::move(labels), Eigen::MatrixXd::Zero(n, n));
  }

  static WeightedNetwork empty(std::vector<std::string> labels) {
    const auto n = static_cast<Eigen::Index>(labels.size());
    return WeightedNetwork(std::move(labels), Eigen::MatrixXd::Zero(n, n));
  }

  std::size_t n() const { return labels_.size(); }
  const std::vector<std::string>& labels() const { return labels_; }
  const Eigen::MatrixXd& weights() const { return w_; }

  double weight(std::size_t i, std::size_t j) const {
    check_index(i);
    check_index(j);
    return w_(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
  }

  // Sets both (i,j) and (j,i); diagonal writes are rejected.
  void set_weight(std::size_t i, std::size_t j, double v) {
    check_index(i);
    check_index(j);
    if (i == j) throw DiagonalError("cannot set a diagonal entry");
    if (v < 0.0) throw NegativeWeightError("weight must be nonnegative");
    w_(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = v;
    w_(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)) = v;
  }

  double weighted_degree(std::size_t v) const {
    check_index(v);
    return w_.row(static_cast<Eigen::Index>(v)).sum();
  }

  double total_edge_weight() const {
    double s = 0.0;
    for (Eigen::Index i = 0; i < w_.rows(); ++i)
      for (Eigen::Index j = i + 1; j < w_.cols(); ++j) s += w_(i, j);
    return s;
  }

  bool is_binary(double tol = 1e-12) const {
    for (Eigen::Index i = 0; i < w_.rows(); ++i)
      for (Eigen::Index j = i + 1; j < w_.cols(); ++j) {
        double v = w_(i, j);
        if (std::abs(v) > tol && std::abs(v - 1.0) > tol) return false;
      }
    return true;
  }

  double frobenius_norm() const { return w_.norm(); }

  std::size_t label_index(const std::string& label) const {
    auto it = std::find(labels_.begin(), labels_.end(), label);
    if (it == labels_.end()) throw IndexError("unknown node label: " + label);
    return static_cast<std::size_t>(it - labels_.begin());
  }

  WeightedNetwork without_node(std::size_t v) const {
    check_index(v);
    if (n() == 1) throw SemanticsError("excising the last node leaves an empty network");
    const auto m = static_cast<Eigen::Index>(n()) - 1;
    Eigen::MatrixXd out(m, m);
    std::vector<std::string> labels;
    labels.reserve(static_cast<std::size_t>(m));
    std::vector<Eigen::Index> keep;
    for (std::size_t i = 0; i < n(); ++i)
      if (i != v) {
        keep.push_back(static_cast<Eigen::Index>(i));
        labels.push_back(labels_[i]);
      }
    for (Eigen::Index a = 0; a < m; ++a)
      for (Eigen::Index b = 0; b < m; ++b) out(a, b) = w_(keep[a], keep[b]);
    return WeightedNetwork(std::move(labels), std::move(out));
  }

  WeightedNetwork with_zeroed_node(std::size_t v) const {
    check_index(v);
    WeightedNetwork out = *this;
    out.w_.row(static_cast<Eigen::Index>(v)).setZero();
    out.w_.col(static_cast<Eigen::Index>(v)).setZero();
    return out;
  }

  void validate() const {
    const auto n_ = static_cast<Eigen::Index>(labels_.size());
    if (w_.rows() != n_ || w_.cols() != n_)
      throw DimensionMismatchError("weight matrix does not match label count");
    std::set<std::string> uniq(labels_.begin(), labels_.end());
    if (uniq.size() != labels_.size()) throw ParseError("node labels must be unique");
    for (Eigen::Index i = 0; i < n_; ++i) {
      if (w_(i, i) != 0.0) throw DiagonalError("nonzero diagonal at node " + std::to_string(i));
      for (Eigen::Index j = 0; j < n_; ++j) {
        if (!std::isfinite(w_(i, j))) throw ParseError("non-finite weight");
        if (w_(i, j) < 0.0) throw NegativeWeightError("negative weight at (" + std::to_string(i) + "," + std::to_string(j) + ")");
        if (w_(i, j) != w_(j, i))
          throw AsymmetryError("weights not symmetric at (" + std::to_string(i) + "," + std::to_string(j) + ")");
      }
    }
  }

  friend bool operator==(const WeightedNetwork& a, const WeightedNetwork& b) {
    return a.labels_ == b.labels_ && a.w_ == b.w_;
  }

 private:
  void check_index(std::size_t i) const {
    if (i >= n()) throw IndexError("node index " + std::to_string(i) + " out of range");
  }

  std::vector<std::string> labels_;
  Eigen::MatrixXd w_;
};

// Focal network plus named dyadic covariates and per-node attributes,
// all sharing the focal network's node set and ordering.
struct NetworkState {
  WeightedNetwork focal;
  std::map<std::string, WeightedNetwork> covariates;
  std::map<std::string, std::vector<double>> attributes;

  void validate() const {
    focal.validate();
    for (const auto& [name, net] : covariates) {
      net.validate();
      if (net.labels() != focal.labels())
        throw DimensionMismatchError("covariate '" + name + "' does not share the focal node set");
    }
    for (const auto& [name, vals] : attributes)
      if (vals.size() != focal.n())
        throw DimensionMismatchError("attribute '" + name + "' has wrong length");
  }
};

enum class InterventionKind {
  RemoveNodeExcise,
  RemoveNodeReplace,
  AddEdgeUnit,
  RemoveEdgeUnit,
  SetAttribute,
};

inline const char* to_string(InterventionKind k) {
  switch (k) {
    case InterventionKind::RemoveNodeExcise: return "remove-node-excise";
    case InterventionKind::RemoveNodeReplace: return "remove-node-replace";
    case InterventionKind::AddEdgeUnit: return "add-edge-unit";
    case InterventionKind::RemoveEdgeUnit: return "remove-edge-unit";
    case InterventionKind::SetAttribute: return "set-attribute";
  }
  return "?";
}

inline bool is_node_removal(InterventionKind k) {
  return k == InterventionKind::RemoveNodeExcise || k == InterventionKind::RemoveNodeReplace;
}

struct Intervention {
  InterventionKind kind;
  std::size_t node = 0;      // node kinds and SetAttribute
  std::size_t i = 0, j = 0;  // edge kinds, i < j
  double amount = 1.0;       // edge kinds
  std::string attribute;     // SetAttribute
  double value = 0.0;        // SetAttribute

  static Intervention remove_node(InterventionKind kind, std::size_t v) {
    Intervention iv;
    iv.kind = kind;
    iv.node = v;
    return iv;
  }
  static Intervention add_edge(std::size_t i, std::size_t j, double amount = 1.0) {
    Intervention iv;
    iv.kind = InterventionKind::AddEdgeUnit;
    iv.i = std::min(i, j);
    iv.j = std::max(i, j);
    iv.amount = amount;
    return iv;
  }
  static Intervention remove_edge(std::size_t i, std::size_t j, double amount = 1.0) {
    Intervention iv;
    iv.kind = InterventionKind::RemoveEdgeUnit;
    iv.i = std::min(i, j);
    iv.j = std::max(i, j);
    iv.amount = amount;
    return iv;
  }
  static Intervention set_attribute(std::size_t v, std::string name, double value) {
    Intervention iv;
    iv.kind = InterventionKind::SetAttribute;
    iv.node = v;
    iv.attribute = std::move(name);
    iv.value = value;
    return iv;
  }
};

// Applies one intervention, returning a new state. The input is untouched.
// `consumed`, when given, receives the edge weight actually moved (differs
// from iv.amount only when RemoveEdgeUnit clamps at zero).
inline NetworkState apply_intervention(const NetworkState& state, const Intervention& iv,
                                       double* consumed = nullptr) {
  NetworkState out = state;
  if (consumed) *consumed = 0.0;
  const std::size_t n = state.focal.n();
  switch (iv.kind) {
    case InterventionKind::RemoveNodeExcise: {
      if (iv.node >= n) throw IndexError("node out of range");
      if (n == 1) throw SemanticsError("excise would leave an empty network");
      out.focal = state.focal.without_node(iv.node);
      for (auto& [name, net] : out.covariates) net = net.without_node(iv.node);
      for (auto& [name, vals] : out.attributes)
        vals.erase(vals.begin() + static_cast<std::ptrdiff_t>(iv.node));
      break;
    }
    case InterventionKind::RemoveNodeReplace: {
      if (iv.node >= n) throw IndexError("node out of range");
      out.focal = state.focal.with_zeroed_node(iv.node);
      for (auto& [name, net] : out.covariates) net = net.with_zeroed_node(iv.node);
      for (auto& [name, vals] : out.attributes) vals[iv.node] = 0.0;
      break;
    }
    case InterventionKind::AddEdgeUnit: {
      if (iv.amount <= 0.0) throw SemanticsError("edge amount must be positive");
      out.focal.set_weight(iv.i, iv.j, state.focal.weight(iv.i, iv.j) + iv.amount);
      if (consumed) *consumed = iv.amount;
      break;
    }
    case InterventionKind::RemoveEdgeUnit: {
      if (iv.amount <= 0.0) throw SemanticsError("edge amount must be positive");
      double cur = state.focal.weight(iv.i, iv.j);
      out.focal.set_weight(iv.i, iv.j, std::max(0.0, cur - iv.amount));
      if (consumed) *consumed = std::min(cur, iv.amount);
      break;
    }
    case InterventionKind::SetAttribute: {
      if (iv.node >= n) throw IndexError("node out of range");
      auto it = out.attributes.find(iv.attribute);
      if (it == out.attributes.end())
        throw IndexError("unknown attribute: " + iv.attribute);
      it->second[iv.node] = iv.value;
      break;
    }
  }
  return out;
}

inline double weighted_degree(const WeightedNetwork& net, std::size_t v) {
  return net.weighted_degree(v);
}

// Projects an m-entity x r-role binary incidence matrix onto the roles:
// w[i][j] counts entities linked to both roles.
inline WeightedNetwork project_bipartite(const Eigen::MatrixXd& incidence,
                                         std::vector<std::string> role_labels) {
  const Eigen::Index m = incidence.rows();
  const Eigen::Index r = incidence.cols();
  if (m < 1 || r < 2) throw DimensionMismatchError("incidence must be at least 1x2");
  if (role_labels.size() != static_cast<std::size_t>(r))
    throw DimensionMismatchError("role label count does not match columns");
  for (Eigen::Index a = 0; a < m; ++a)
    for (Eigen::Index b = 0; b < r; ++b)
      if (incidence(a, b) != 0.0 && incidence(a, b) != 1.0)
        throw NonBinaryError("incidence entries must be 0 or 1");
  Eigen::MatrixXd w = incidence.transpose() * incidence;
  w.diagonal().setZero();
  return WeightedNetwork(std::move(role_labels), std::move(w));
}

}  // namespace netmod
