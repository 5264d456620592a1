#include "markov_fiber/configuration.hpp"

#include <boost/multiprecision/cpp_int.hpp>
#include <stdexcept>
#include <utility>

namespace mfiber {

using boost::multiprecision::cpp_rational;

std::string ConstraintLabel::to_string() const {
  switch (kind) {
    case ConstraintKind::RowSum:
      return "row " + std::to_string(index + 1);
    case ConstraintKind::ColSum:
      return "col " + std::to_string(index + 1);
    case ConstraintKind::Subtable:
      return "subtable " + std::to_string(index + 1);
  }
  return "?";
}

Configuration::Configuration(int rows, int cols, const std::vector<CellSet>& terms)
    : rows_(rows), cols_(cols) {
  const int cells = rows * cols;
  std::vector<std::vector<int>> supports;
  for (int i = 0; i < rows; ++i) {
    labels_.push_back({ConstraintKind::RowSum, i});
    std::vector<int> s;
    for (int j = 0; j < cols; ++j) s.push_back(i * cols + j);
    supports.push_back(std::move(s));
  }
  for (int j = 0; j < cols; ++j) {
    labels_.push_back({ConstraintKind::ColSum, j});
    std::vector<int> s;
    for (int i = 0; i < rows; ++i) s.push_back(i * cols + j);
    supports.push_back(std::move(s));
  }
  for (std::size_t q = 0; q < terms.size(); ++q) {
    if (terms[q].rows() != rows || terms[q].cols() != cols) {
      throw std::invalid_argument("subtable term on a different grid");
    }
    labels_.push_back({ConstraintKind::Subtable, static_cast<int>(q)});
    supports.push_back(terms[q].cells());
  }

  support_offsets_.push_back(0);
  for (const auto& s : supports) {
    support_cells_.insert(support_cells_.end(), s.begin(), s.end());
    support_offsets_.push_back(static_cast<int>(support_cells_.size()));
  }

  std::vector<std::vector<int>> by_cell(cells);
  for (std::size_t r = 0; r < supports.size(); ++r)
    for (int c : supports[r]) by_cell[c].push_back(static_cast<int>(r));
  column_offsets_.push_back(0);
  for (const auto& rs : by_cell) {
    column_rows_.insert(column_rows_.end(), rs.begin(), rs.end());
    column_offsets_.push_back(static_cast<int>(column_rows_.size()));
  }
}

int Configuration::entry(int constraint, int cell) const {
  for (int c : support(constraint))
    if (c == cell) return 1;
  return 0;
}

std::span<const int> Configuration::support(int constraint) const {
  return std::span<const int>(support_cells_)
      .subspan(support_offsets_[constraint],
               support_offsets_[constraint + 1] - support_offsets_[constraint]);
}

std::span<const int> Configuration::constraints_of(int cell) const {
  return std::span<const int>(column_rows_)
      .subspan(column_offsets_[cell],
               column_offsets_[cell + 1] - column_offsets_[cell]);
}

std::vector<std::int64_t> Configuration::apply(std::span<const std::int64_t> x) const {
  if (static_cast<int>(x.size()) != cell_count()) {
    throw std::invalid_argument("vector length does not match configuration");
  }
  std::vector<std::int64_t> t(constraint_count(), 0);
  for (int r = 0; r < constraint_count(); ++r)
    for (int c : support(r)) t[r] += x[c];
  return t;
}

std::vector<double> Configuration::apply(std::span<const double> x) const {
  if (static_cast<int>(x.size()) != cell_count()) {
    throw std::invalid_argument("vector length does not match configuration");
  }
  std::vector<double> t(constraint_count(), 0.0);
  for (int r = 0; r < constraint_count(); ++r)
    for (int c : support(r)) t[r] += x[c];
  return t;
}

std::vector<std::vector<std::int64_t>> Configuration::dense() const {
  std::vector<std::vector<std::int64_t>> m(constraint_count(),
                                           std::vector<std::int64_t>(cell_count(), 0));
  for (int r = 0; r < constraint_count(); ++r)
    for (int c : support(r)) m[r][c] = 1;
  return m;
}

Configuration build_configuration(const ModelSpec& model, int rows, int cols) {
  require_valid(model, rows, cols);
  return Configuration(rows, cols, subtable_terms(model, rows, cols));
}

SufficientStat sufficient_statistic(const Table& table, const Configuration& cfg) {
  if (table.rows() != cfg.rows() || table.cols() != cfg.cols()) {
    throw std::invalid_argument("table dimensions do not match configuration");
  }
  return cfg.apply(table.counts());
}

int exact_rank(const std::vector<std::vector<std::int64_t>>& matrix) {
  if (matrix.empty()) return 0;
  const std::size_t n_rows = matrix.size();
  const std::size_t n_cols = matrix.front().size();
  std::vector<std::vector<cpp_rational>> m(n_rows);
  for (std::size_t r = 0; r < n_rows; ++r) {
    if (matrix[r].size() != n_cols) throw std::invalid_argument("ragged matrix");
    m[r].assign(matrix[r].begin(), matrix[r].end());
  }

  int rank = 0;
  std::size_t pivot_row = 0;
  for (std::size_t col = 0; col < n_cols && pivot_row < n_rows; ++col) {
    std::size_t pivot = pivot_row;
    while (pivot < n_rows && m[pivot][col] == 0) ++pivot;
    if (pivot == n_rows) continue;
    std::swap(m[pivot], m[pivot_row]);
    for (std::size_t r = pivot_row + 1; r < n_rows; ++r) {
      if (m[r][col] == 0) continue;
      const cpp_rational factor = m[r][col] / m[pivot_row][col];
      for (std::size_t k = col; k < n_cols; ++k) m[r][k] -= factor * m[pivot_row][k];
    }
    ++pivot_row;
    ++rank;
  }
  return rank;
}

int config_rank(const Configuration& cfg) { return exact_rank(cfg.dense()); }

int degrees_of_freedom(const Configuration& cfg) {
  return cfg.cell_count() - config_rank(cfg);
}

bool row_space_contains(const Configuration& cfg,
                        const std::vector<std::vector<std::int64_t>>& rows) {
  auto m = cfg.dense();
  const int base = exact_rank(m);
  for (const auto& row : rows) {
    if (static_cast<int>(row.size()) != cfg.cell_count()) {
      throw std::invalid_argument("row length does not match configuration");
    }
    m.push_back(row);
  }
  return exact_rank(m) == base;
}

}  // namespace mfiber
