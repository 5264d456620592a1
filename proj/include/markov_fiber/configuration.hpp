#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "markov_fiber/models.hpp"
#include "markov_fiber/table.hpp"

namespace mfiber {

enum class ConstraintKind { RowSum, ColSum, Subtable };

struct ConstraintLabel {
  ConstraintKind kind;
  int index;

  std::string to_string() const;
};

/// Sufficient statistic t = (x_{1+}..x_{R+}, x_{+1}..x_{+C}, x_{S_1}..x_{S_Q}).
using SufficientStat = std::vector<std::int64_t>;

/// The 0-1 matrix A with A vec(x) = t. Rows are ordered row sums, column
/// sums, then subtable terms; columns follow the row-major cell order.
class Configuration {
 public:
  Configuration(int rows, int cols, const std::vector<CellSet>& terms);

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  int cell_count() const { return rows_ * cols_; }
  int constraint_count() const { return static_cast<int>(labels_.size()); }

  int entry(int constraint, int cell) const;
  const std::vector<ConstraintLabel>& labels() const { return labels_; }

  /// Cells carrying a 1 in the given row of A.
  std::span<const int> support(int constraint) const;
  /// Rows of A carrying a 1 in the given cell's column.
  std::span<const int> constraints_of(int cell) const;

  std::vector<std::int64_t> apply(std::span<const std::int64_t> x) const;
  std::vector<double> apply(std::span<const double> x) const;

  /// Dense T x RC matrix, row-major.
  std::vector<std::vector<std::int64_t>> dense() const;

 private:
  int rows_;
  int cols_;
  std::vector<ConstraintLabel> labels_;
  std::vector<int> support_offsets_;
  std::vector<int> support_cells_;
  std::vector<int> column_offsets_;
  std::vector<int> column_rows_;
};

Configuration build_configuration(const ModelSpec& model, int rows, int cols);

SufficientStat sufficient_statistic(const Table& table, const Configuration& cfg);

/// Exact rank over the rationals.
int exact_rank(const std::vector<std::vector<std::int64_t>>& matrix);

int config_rank(const Configuration& cfg);

/// R*C minus the exact rank of A.
int degrees_of_freedom(const Configuration& cfg);

/// True iff every vector in `rows` lies in the row space of A.
bool row_space_contains(const Configuration& cfg,
                        const std::vector<std::vector<std::int64_t>>& rows);

}  // namespace mfiber
