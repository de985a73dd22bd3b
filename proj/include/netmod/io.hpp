#pragma once

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "netmod/errors.hpp"
#include "netmod/network.hpp"

namespace netmod {

enum class NetworkFormat { SquareMatrixCsv, EdgeListCsv };

namespace detail {

inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::stringstream ss(line);
  while (std::getline(ss, cell, ',')) {
    // trim surrounding whitespace
    std::size_t a = cell.find_first_not_of(" \t\r");
    std::size_t b = cell.find_last_not_of(" \t\r");
    cells.push_back(a == std::string::npos ? "" : cell.substr(a, b - a + 1));
  }
  if (!line.empty() && line.back() == ',') cells.push_back("");
  return cells;
}

inline double parse_number(const std::string& cell, const std::string& context) {
  try {
    std::size_t pos = 0;
    double v = std::stod(cell, &pos);
    if (pos != cell.size()) throw ParseError("trailing characters in '" + cell + "' (" + context + ")");
    return v;
  } catch (const Error&) {
    throw;
  } catch (const std::exception&) {
    throw ParseError("cannot parse '" + cell + "' as a number (" + context + ")");
  }
}

inline std::vector<std::string> read_nonempty_lines(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open file: " + path);
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") != std::string::npos) lines.push_back(line);
  }
  return lines;
}

}  // namespace detail

// Square-matrix CSV: header row of labels, then n rows of n numeric cells.
inline WeightedNetwork load_square_matrix_csv(const std::string& path) {
  auto lines = detail::read_nonempty_lines(path);
  if (lines.empty()) throw ParseError("empty file: " + path);
  std::vector<std::string> labels = detail::split_csv_line(lines[0]);
  const std::size_t n = labels.size();
  if (lines.size() != n + 1)
    throw ParseError(path + ": expected " + std::to_string(n) + " data rows, found " +
                     std::to_string(lines.size() - 1));
  Eigen::MatrixXd w(n, n);
  for (std::size_t r = 0; r < n; ++r) {
    auto cells = detail::split_csv_line(lines[r + 1]);
    if (cells.size() != n)
      throw ParseError(path + " row " + std::to_string(r + 1) + ": expected " +
                       std::to_string(n) + " cells, found " + std::to_string(cells.size()));
    for (std::size_t c = 0; c < n; ++c)
      w(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
          detail::parse_number(cells[c], path + " row " + std::to_string(r + 1));
  }
  for (std::size_t i = 0; i < n; ++i) {
    double d = w(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i));
    if (std::abs(d) > 1e-12)
      throw DiagonalError(path + ": nonzero diagonal at '" + labels[i] + "'");
    if (d != 0.0) {
      std::cerr << "warning: " << path << ": zeroing tiny diagonal at '" << labels[i] << "'\n";
      w(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)) = 0.0;
    }
  }
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      double a = w(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
      double b = w(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i));
      if (std::abs(a - b) > 1e-9)
        throw AsymmetryError(path + ": w(" + labels[i] + "," + labels[j] + ") != transpose");
      double v = (a + b) / 2.0;
      if (v < 0.0) throw NegativeWeightError(path + ": negative weight at (" + labels[i] + "," + labels[j] + ")");
      w(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = v;
      w(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)) = v;
    }
  return WeightedNetwork(std::move(labels), std::move(w));
}

// Edge-list CSV: rows `labelA,labelB,weight`; both directions are summed
// into one symmetric weight. Node set is the union of labels in first-seen
// order unless an explicit node list is given.
inline WeightedNetwork load_edge_list_csv(const std::string& path,
                                          const std::vector<std::string>& node_list = {}) {
  auto lines = detail::read_nonempty_lines(path);
  std::vector<std::string> labels = node_list;
  std::map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < labels.size(); ++i) index[labels[i]] = i;
  struct Row {
    std::string a, b;
    double w;
  };
  std::vector<Row> rows;
  for (const auto& line : lines) {
    auto cells = detail::split_csv_line(line);
    if (cells.size() != 3)
      throw ParseError(path + ": edge-list rows need 3 cells, got " + std::to_string(cells.size()));
    double v = detail::parse_number(cells[2], path);
    if (v < 0.0) throw NegativeWeightError(path + ": negative edge weight");
    rows.push_back({cells[0], cells[1], v});
    for (const auto& lab : {cells[0], cells[1]})
      if (node_list.empty() && !index.count(lab)) {
        index[lab] = labels.size();
        labels.push_back(lab);
      }
  }
  const std::size_t n = labels.size();
  Eigen::MatrixXd w = Eigen::MatrixXd::Zero(n, n);
  for (const auto& row : rows) {
    auto ia = index.find(row.a);
    auto ib = index.find(row.b);
    if (ia == index.end() || ib == index.end())
      throw ParseError(path + ": edge references a label outside the node list");
    if (ia->second == ib->second) throw DiagonalError(path + ": self-loop on '" + row.a + "'");
    auto i = static_cast<Eigen::Index>(ia->second);
    auto j = static_cast<Eigen::Index>(ib->second);
    w(i, j) += row.w;
    w(j, i) += row.w;
  }
  return WeightedNetwork(std::move(labels), std::move(w));
}

inline WeightedNetwork load_network(const std::string& path, NetworkFormat format) {
  switch (format) {
    case NetworkFormat::SquareMatrixCsv: return load_square_matrix_csv(path);
    case NetworkFormat::EdgeListCsv: return load_edge_list_csv(path);
  }
  throw ParseError("unknown network format");
}

// Incidence CSV: header row of role names, then one row of 0/1 cells per entity.
inline WeightedNetwork load_bipartite_incidence_csv(const std::string& path) {
  auto lines = detail::read_nonempty_lines(path);
  if (lines.size() < 2) throw ParseError(path + ": need a header and at least one entity row");
  std::vector<std::string> roles = detail::split_csv_line(lines[0]);
  const std::size_t r = roles.size();
  const std::size_t m = lines.size() - 1;
  Eigen::MatrixXd incidence(m, r);
  for (std::size_t a = 0; a < m; ++a) {
    auto cells = detail::split_csv_line(lines[a + 1]);
    if (cells.size() != r)
      throw ParseError(path + " row " + std::to_string(a + 1) + ": wrong cell count");
    for (std::size_t b = 0; b < r; ++b)
      incidence(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) =
          detail::parse_number(cells[b], path);
  }
  return project_bipartite(incidence, std::move(roles));
}

inline std::string format_number(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

inline void save_square_matrix_csv(const WeightedNetwork& net, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ParseError("cannot write file: " + path);
  const std::size_t n = net.n();
  for (std::size_t i = 0; i < n; ++i) out << (i ? "," : "") << net.labels()[i];
  out << "\n";
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j)
      out << (j ? "," : "") << format_number(net.weights()(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)));
    out << "\n";
  }
}

}  // namespace netmod
