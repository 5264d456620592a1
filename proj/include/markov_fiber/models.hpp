#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "markov_fiber/table.hpp"

namespace mfiber {

enum class ModelFamily {
  Independence,
  ChangePoint,
  BlockDiagonalOwn,
  CommonBlockDiagonal,
  GeneralBlockDiagonal,
};

std::string_view to_string(ModelFamily family);
ModelFamily parse_family(std::string_view name);

/// Log-linear model with row and column main effects plus subtable effects.
///
/// All coordinates are zero-based. For the block families, `row_bounds`
/// holds r_1 < r_2 < ... < r_{N+1} with r_1 = 0 and block n covering rows
/// [r_n, r_{n+1}); likewise `col_bounds`. Groups index blocks from 0.
///
/// `shift` rotates the block layout cyclically on both axes: bound
/// position p refers to row (p + shift) mod R, so with shift s > 0 block 0
/// starts at row s and the last block wraps past the end of the grid.
struct ModelSpec {
  ModelFamily family = ModelFamily::Independence;
  std::vector<Rectangle> rectangles;
  std::vector<int> row_bounds;
  std::vector<int> col_bounds;
  std::vector<std::vector<int>> groups;
  int shift = 0;

  static ModelSpec independence();
  static ModelSpec change_point(std::vector<Rectangle> rectangles);
  static ModelSpec own_blocks(std::vector<int> row_bounds, std::vector<int> col_bounds);
  static ModelSpec common_blocks(std::vector<int> row_bounds, std::vector<int> col_bounds);
  static ModelSpec general_blocks(std::vector<int> row_bounds, std::vector<int> col_bounds,
                                  std::vector<std::vector<int>> groups);

  bool is_block_family() const;
  /// Number of diagonal blocks N (zero for non-block families).
  int block_count() const;
  /// Number of subtable-effect terms Q, i.e. rows of the configuration
  /// beyond the row and column sums.
  int term_count() const;

  /// Same model on the transposed grid.
  ModelSpec transposed() const;

  friend bool operator==(const ModelSpec&, const ModelSpec&) = default;
};

class ModelError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Every violated constraint of `model` on an R x C grid; empty iff valid.
std::vector<std::string> validate(const ModelSpec& model, int rows, int cols);

/// Throws ModelError listing the violations when the model is invalid.
void require_valid(const ModelSpec& model, int rows, int cols);

/// Subtable-effect cell sets in declaration order.
std::vector<CellSet> subtable_terms(const ModelSpec& model, int rows, int cols);

struct BlockIndex {
  int row_block = 0;
  int col_block = 0;

  bool diagonal() const { return row_block == col_block; }
  friend bool operator==(const BlockIndex&, const BlockIndex&) = default;
};

/// Block index of every row (or column) of an axis of length `extent`;
/// uncovered positions get block_count().
std::vector<int> block_membership(const std::vector<int>& bounds, int extent, int shift);

/// Block I_kl holding cell (i, j), or nullopt when the cell lies outside
/// the region covered by the blocks (possible only for the general family).
std::optional<BlockIndex> cell_block(const ModelSpec& model, int rows, int cols,
                                     int i, int j);

/// Index s of the change-point stratum holding (i, j): the cell lies in
/// rectangles[s] but in no earlier rectangle, and s == N marks cells outside
/// every rectangle.
int cell_stratum(const ModelSpec& model, int rows, int cols, int i, int j);

/// Every valid change point model on the grid with 1..max_rectangles
/// nested rectangles. Intended for desk-scale sweeps.
std::vector<ModelSpec> enumerate_change_point_models(int rows, int cols, int max_rectangles);

/// Every own or common block model with N diagonal blocks on the grid,
/// one per choice of row and column bounds.
std::vector<ModelSpec> enumerate_block_models(ModelFamily family, int blocks, int rows, int cols);

/// True iff the sufficient statistic of `inner` is a linear function of the
/// sufficient statistic of `outer` on the R x C grid.
bool is_nested(const ModelSpec& inner, const ModelSpec& outer, int rows, int cols);

}  // namespace mfiber
