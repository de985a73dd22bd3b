#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "netmod/errors.hpp"
#include "netmod/network.hpp"
#include "netmod/rng.hpp"

namespace netmod {

// Upper-triangle dyadic design: one row per unordered pair, lexicographic
// in (i, j), intercept in column 0.
struct DyadDesign {
  Eigen::VectorXd y;
  Eigen::MatrixXd X;
  std::vector<std::string> predictor_names;
  std::size_t n = 0;
  std::vector<std::pair<std::size_t, std::size_t>> dyad_index;

  std::size_t num_dyads() const { return static_cast<std::size_t>(y.size()); }
  std::size_t num_predictors() const { return predictor_names.size(); }
};

struct DyadicModel {
  Eigen::VectorXd beta;  // intercept first
  double dispersion = 1.0;
  std::vector<std::string> predictor_names;
  Eigen::VectorXd standard_errors;
  bool converged = false;
  int iterations = 0;

  std::size_t num_predictors() const { return predictor_names.size(); }
};

struct QapResult {
  DyadicModel model;
  Eigen::VectorXd t_stats;       // per coefficient, intercept first
  Eigen::VectorXd p_values;      // per non-intercept predictor
  std::size_t permutations = 0;
  std::uint64_t seed = 0;
};

inline DyadDesign build_design(const WeightedNetwork& response,
                               const std::vector<std::pair<std::string, WeightedNetwork>>& predictors) {
  for (const auto& [name, net] : predictors)
    if (net.labels() != response.labels())
      throw DimensionMismatchError("predictor '" + name + "' does not share the response node set");
  const std::size_t n = response.n();
  const std::size_t D = n * (n - 1) / 2;
  const std::size_t q = predictors.size();
  DyadDesign d;
  d.n = n;
  d.y.resize(static_cast<Eigen::Index>(D));
  d.X.resize(static_cast<Eigen::Index>(D), static_cast<Eigen::Index>(q + 1));
  d.dyad_index.reserve(D);
  for (const auto& [name, net] : predictors) d.predictor_names.push_back(name);
  Eigen::Index row = 0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      d.dyad_index.emplace_back(i, j);
      d.y(row) = response.weight(i, j);
      d.X(row, 0) = 1.0;
      for (std::size_t k = 0; k < q; ++k)
        d.X(row, static_cast<Eigen::Index>(k + 1)) = predictors[k].second.weight(i, j);
      ++row;
    }
  return d;
}

namespace detail {

// One IRLS pass for Poisson with log link on an arbitrary (y, X).
inline DyadicModel irls_poisson(const Eigen::VectorXd& y, const Eigen::MatrixXd& X,
                                const std::vector<std::string>& names) {
  const Eigen::Index D = y.size();
  const Eigen::Index p = X.cols();
  if (D <= p) throw RankDeficiencyError("more coefficients than dyads");
  for (Eigen::Index d = 0; d < D; ++d)
    if (y(d) < 0.0) throw SeparationError("negative response");
  Eigen::FullPivLU<Eigen::MatrixXd> lu(X);
  if (lu.rank() < p) throw RankDeficiencyError("design matrix is rank deficient");
  double ymean = y.mean();
  if (ymean <= 0.0) throw SeparationError("all-zero response, log link undefined");

  Eigen::VectorXd beta = Eigen::VectorXd::Zero(p);
  beta(0) = std::log(ymean + 1e-9);
  DyadicModel model;
  model.predictor_names = names;
  Eigen::MatrixXd info;  // X' W X at convergence
  for (int iter = 1; iter <= 100; ++iter) {
    Eigen::VectorXd eta = X * beta;
    Eigen::VectorXd mu = eta.array().exp();
    // working response z = eta + (y - mu)/mu, weights W = mu
    Eigen::VectorXd z = eta.array() + (y - mu).array() / mu.array();
    Eigen::MatrixXd Xw = X;
    for (Eigen::Index d = 0; d < D; ++d) Xw.row(d) *= mu(d);
    info = X.transpose() * Xw;  // X' diag(mu) X
    Eigen::VectorXd rhs = Xw.transpose() * z;
    Eigen::LDLT<Eigen::MatrixXd> solver(info);
    if (solver.info() != Eigen::Success)
      throw RankDeficiencyError("weighted normal equations not solvable");
    Eigen::VectorXd next = solver.solve(rhs);
    double delta = (next - beta).cwiseAbs().maxCoeff();
    beta = next;
    model.iterations = iter;
    if (beta.cwiseAbs().maxCoeff() > 30.0)
      throw SeparationError("coefficients diverging, response pattern separable");
    if (delta < 1e-8) {
      model.converged = true;
      break;
    }
  }
  model.beta = beta;
  Eigen::VectorXd mu = (X * beta).array().exp();
  double pearson = 0.0;
  for (Eigen::Index d = 0; d < D; ++d) {
    double r = y(d) - mu(d);
    pearson += r * r / mu(d);
  }
  model.dispersion = pearson / static_cast<double>(D - p);
  Eigen::MatrixXd cov = model.dispersion * info.inverse();
  model.standard_errors = cov.diagonal().array().sqrt();
  return model;
}

}  // namespace detail

// Quasi-Poisson fit: beta from Poisson IRLS, Pearson dispersion, quasi SEs.
inline DyadicModel fit_quasipoisson(const DyadDesign& design) {
  return detail::irls_poisson(design.y, design.X, design.predictor_names);
}

inline double predict_dyad(const DyadicModel& model, const std::vector<double>& x) {
  if (x.size() + 1 != static_cast<std::size_t>(model.beta.size()))
    throw ArityMismatchError("covariate vector does not match coefficient arity");
  double eta = model.beta(0);
  for (std::size_t k = 0; k < x.size(); ++k) eta += model.beta(static_cast<Eigen::Index>(k + 1)) * x[k];
  return std::exp(eta);
}

// MRQAP with double semi-partialling: each predictor's OLS residual (given
// the other predictors) is row-and-column permuted and substituted back,
// the model refit, and |t| compared against the observed |t|.
inline QapResult qap_dsp_test(const DyadDesign& design, std::size_t permutations,
                              std::uint64_t seed) {
  if (permutations < 100) throw ValidationError("need at least 100 permutations");
  QapResult result;
  result.model = fit_quasipoisson(design);
  result.permutations = permutations;
  result.seed = seed;
  const std::size_t q = design.num_predictors();
  const auto p = static_cast<Eigen::Index>(q + 1);
  result.t_stats = result.model.beta.array() / result.model.standard_errors.array();
  result.p_values.resize(static_cast<Eigen::Index>(q));

  const std::size_t n = design.n;
  for (std::size_t k = 0; k < q; ++k) {
    const auto col = static_cast<Eigen::Index>(k + 1);
    // OLS residual of x_k on the remaining columns (incl. intercept).
    Eigen::MatrixXd others(design.X.rows(), p - 1);
    Eigen::Index c = 0;
    for (Eigen::Index j = 0; j < p; ++j)
      if (j != col) others.col(c++) = design.X.col(j);
    Eigen::VectorXd xk = design.X.col(col);
    Eigen::VectorXd coef = others.colPivHouseholderQr().solve(xk);
    Eigen::VectorXd fitted = others * coef;
    Eigen::VectorXd resid = xk - fitted;

    // Residual as a symmetric n x n matrix for joint row/column permutation.
    Eigen::MatrixXd eps = Eigen::MatrixXd::Zero(n, n);
    for (std::size_t d = 0; d < design.num_dyads(); ++d) {
      auto [i, j] = design.dyad_index[d];
      eps(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = resid(static_cast<Eigen::Index>(d));
      eps(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)) = resid(static_cast<Eigen::Index>(d));
    }

    const double observed = std::abs(result.t_stats(col));
    std::size_t at_least = 0;
    for (std::size_t rep = 0; rep < permutations; ++rep) {
      Rng rng = Rng::substream(seed, "qap", hash_combine(k, rep));
      bool done = false;
      for (int attempt = 0; attempt < 10 && !done; ++attempt) {
        std::vector<std::size_t> perm(n);
        for (std::size_t i = 0; i < n; ++i) perm[i] = i;
        rng.shuffle(perm);
        Eigen::MatrixXd Xperm = design.X;
        for (std::size_t d = 0; d < design.num_dyads(); ++d) {
          auto [i, j] = design.dyad_index[d];
          Xperm(static_cast<Eigen::Index>(d), col) =
              eps(static_cast<Eigen::Index>(perm[i]), static_cast<Eigen::Index>(perm[j]));
        }
        try {
          DyadicModel m = detail::irls_poisson(design.y, Xperm, design.predictor_names);
          double t = std::abs(m.beta(col) / m.standard_errors(col));
          if (t >= observed) ++at_least;
          done = true;
        } catch (const Error&) {
          // redraw
        }
      }
      if (!done)
        throw PermutationFailureError("permutation refit failed 10 times for predictor '" +
                                      design.predictor_names[k] + "'");
    }
    result.p_values(static_cast<Eigen::Index>(k)) =
        static_cast<double>(1 + at_least) / static_cast<double>(1 + permutations);
  }
  return result;
}

}  // namespace netmod
