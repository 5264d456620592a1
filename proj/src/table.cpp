#include "markov_fiber/table.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

namespace mfiber {

namespace {

void check_dims(int rows, int cols) {
  if (rows < 2 || cols < 2) {
    throw std::invalid_argument("table must be at least 2 x 2, got " +
                                std::to_string(rows) + " x " +
                                std::to_string(cols));
  }
}

}  // namespace

Table::Table(int rows, int cols)
    : rows_(rows), cols_(cols), counts_() {
  check_dims(rows, cols);
  counts_.assign(static_cast<std::size_t>(rows) * cols, 0);
}

Table::Table(int rows, int cols, std::vector<std::int64_t> counts)
    : rows_(rows), cols_(cols), counts_(std::move(counts)) {
  check_dims(rows, cols);
  if (counts_.size() != static_cast<std::size_t>(rows) * cols) {
    throw std::invalid_argument("table count vector has wrong length");
  }
  if (std::any_of(counts_.begin(), counts_.end(),
                  [](std::int64_t v) { return v < 0; })) {
    throw std::invalid_argument("table counts must be nonnegative");
  }
}

Table Table::from_rows(const std::vector<std::vector<std::int64_t>>& rows) {
  if (rows.empty()) throw std::invalid_argument("table has no rows");
  const auto cols = rows.front().size();
  std::vector<std::int64_t> counts;
  counts.reserve(rows.size() * cols);
  for (const auto& row : rows) {
    if (row.size() != cols) {
      throw std::invalid_argument("ragged table: rows differ in length");
    }
    counts.insert(counts.end(), row.begin(), row.end());
  }
  return Table(static_cast<int>(rows.size()), static_cast<int>(cols),
               std::move(counts));
}

void Table::set(int i, int j, std::int64_t value) {
  if (i < 0 || i >= rows_ || j < 0 || j >= cols_) {
    throw std::out_of_range("cell outside table");
  }
  if (value < 0) throw std::invalid_argument("table counts must be nonnegative");
  counts_[index(i, j)] = value;
}

std::int64_t Table::total() const {
  return std::accumulate(counts_.begin(), counts_.end(), std::int64_t{0});
}

std::vector<std::int64_t> Table::row_sums() const {
  std::vector<std::int64_t> sums(rows_, 0);
  for (int i = 0; i < rows_; ++i)
    for (int j = 0; j < cols_; ++j) sums[i] += (*this)(i, j);
  return sums;
}

std::vector<std::int64_t> Table::col_sums() const {
  std::vector<std::int64_t> sums(cols_, 0);
  for (int i = 0; i < rows_; ++i)
    for (int j = 0; j < cols_; ++j) sums[j] += (*this)(i, j);
  return sums;
}

CellSet::CellSet(int rows, int cols)
    : rows_(rows), cols_(cols), mask_(static_cast<std::size_t>(rows) * cols, 0) {}

CellSet CellSet::from_rectangle(int rows, int cols, const Rectangle& rect) {
  CellSet set(rows, cols);
  for (int i = rect.first_row; i <= rect.last_row; ++i)
    for (int j = rect.first_col; j <= rect.last_col; ++j) set.insert(i, j);
  return set;
}

void CellSet::insert(int i, int j) {
  if (i < 0 || i >= rows_ || j < 0 || j >= cols_) {
    throw std::out_of_range("cell outside grid");
  }
  char& slot = mask_[i * cols_ + j];
  if (!slot) {
    slot = 1;
    ++size_;
  }
}

std::vector<int> CellSet::cells() const {
  std::vector<int> out;
  out.reserve(size_);
  for (int c = 0; c < static_cast<int>(mask_.size()); ++c)
    if (mask_[c]) out.push_back(c);
  return out;
}

std::int64_t CellSet::sum(const Table& table) const {
  std::int64_t s = 0;
  for (int c = 0; c < static_cast<int>(mask_.size()); ++c)
    if (mask_[c]) s += table[c];
  return s;
}

CellSet& CellSet::operator|=(const CellSet& other) {
  if (other.rows_ != rows_ || other.cols_ != cols_) {
    throw std::invalid_argument("cell sets over different grids");
  }
  for (int c = 0; c < static_cast<int>(mask_.size()); ++c)
    if (other.mask_[c] && !mask_[c]) {
      mask_[c] = 1;
      ++size_;
    }
  return *this;
}

}  // namespace mfiber
