#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace mfiber {

/// Zero-based cell coordinate. Cells are vectorized row-major, so the
/// cell (i, j) of an R x C grid has index i * C + j.
struct Cell {
  int row = 0;
  int col = 0;

  friend bool operator==(const Cell&, const Cell&) = default;
};

/// Two-way contingency table of nonnegative counts, at least 2 x 2.
class Table {
 public:
  Table(int rows, int cols);
  Table(int rows, int cols, std::vector<std::int64_t> counts);

  static Table from_rows(const std::vector<std::vector<std::int64_t>>& rows);

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  int cell_count() const { return rows_ * cols_; }

  std::int64_t operator()(int i, int j) const { return counts_[index(i, j)]; }
  std::int64_t operator[](int cell) const { return counts_[cell]; }
  void set(int i, int j, std::int64_t value);

  int index(int i, int j) const { return i * cols_ + j; }
  Cell cell(int index) const { return {index / cols_, index % cols_}; }

  std::span<const std::int64_t> counts() const { return counts_; }

  std::int64_t total() const;
  std::vector<std::int64_t> row_sums() const;
  std::vector<std::int64_t> col_sums() const;

  friend bool operator==(const Table&, const Table&) = default;

 private:
  friend class TableMutator;

  int rows_;
  int cols_;
  std::vector<std::int64_t> counts_;
};

/// Unchecked in-place access used by the samplers. Callers own the
/// nonnegativity invariant while they hold one.
class TableMutator {
 public:
  explicit TableMutator(Table& table) : table_(table) {}
  std::int64_t& operator[](int cell) { return table_.counts_[cell]; }

 private:
  Table& table_;
};

/// Inclusive zero-based rectangle [first_row, last_row] x [first_col, last_col].
struct Rectangle {
  int first_row = 0;
  int last_row = 0;
  int first_col = 0;
  int last_col = 0;

  bool contains(int i, int j) const {
    return first_row <= i && i <= last_row && first_col <= j && j <= last_col;
  }
  bool contains(const Rectangle& other) const {
    return first_row <= other.first_row && other.last_row <= last_row &&
           first_col <= other.first_col && other.last_col <= last_col;
  }
  int row_span() const { return last_row - first_row + 1; }
  int col_span() const { return last_col - first_col + 1; }

  friend bool operator==(const Rectangle&, const Rectangle&) = default;
};

/// Explicit set of cells of an R x C grid.
class CellSet {
 public:
  CellSet(int rows, int cols);

  static CellSet from_rectangle(int rows, int cols, const Rectangle& rect);

  void insert(int i, int j);
  bool contains(int i, int j) const { return mask_[i * cols_ + j] != 0; }
  bool contains(int cell) const { return mask_[cell] != 0; }
  bool empty() const { return size_ == 0; }
  int size() const { return size_; }
  int rows() const { return rows_; }
  int cols() const { return cols_; }

  /// Cell indices in row-major order.
  std::vector<int> cells() const;

  std::int64_t sum(const Table& table) const;

  CellSet& operator|=(const CellSet& other);
  friend bool operator==(const CellSet&, const CellSet&) = default;

 private:
  int rows_;
  int cols_;
  int size_ = 0;
  std::vector<char> mask_;
};

}  // namespace mfiber
