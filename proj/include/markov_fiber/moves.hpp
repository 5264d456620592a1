#pragma once

#include <boost/container/small_vector.hpp>
#include <compare>
#include <cstdint>
#include <memory>
#include <random>
#include <span>
#include <string_view>
#include <vector>

#include "markov_fiber/configuration.hpp"
#include "markov_fiber/models.hpp"

namespace mfiber {

/// Random engine used throughout. Streams are reproducible for a fixed
/// seed within one build.
using Rng = std::mt19937_64;

/// Shape of a move. I is the square-free degree-2 basic move; II and III
/// are square-free degree-3 loops; IV is the degree-4 block move and
/// IVTransposed its transpose.
enum class MoveType { I, II, III, IV, IVTransposed };

std::string_view to_string(MoveType type);
MoveType parse_move_type(std::string_view name);

struct MoveEntry {
  int cell = 0;
  int coeff = 0;

  friend bool operator==(const MoveEntry&, const MoveEntry&) = default;
  friend auto operator<=>(const MoveEntry&, const MoveEntry&) = default;
};

/// Sparse integer table. Entries are sorted by cell and never zero.
class Move {
 public:
  Move() = default;
  Move(std::span<const MoveEntry> entries, MoveType type);

  static Move from_dense(std::span<const std::int64_t> z, MoveType type);

  /// (a)(b) - (a.row, b.col)(b.row, a.col) on a grid with `cols` columns.
  static Move basic(int cols, Cell a, Cell b);

  std::span<const MoveEntry> entries() const { return {entries_.data(), entries_.size()}; }
  MoveType type() const { return type_; }
  bool empty() const { return entries_.empty(); }

  /// Half the l1 norm.
  int degree() const;

  Move negated() const;
  /// Orientation whose lowest cell carries a positive coefficient.
  Move canonical() const;

  std::vector<std::int64_t> dense(int cell_count) const;
  std::vector<std::int64_t> positive_part(int cell_count) const;
  std::vector<std::int64_t> negative_part(int cell_count) const;

  /// Equality and ordering ignore the type tag.
  friend bool operator==(const Move& a, const Move& b) { return a.entries_ == b.entries_; }
  friend bool operator<(const Move& a, const Move& b) { return a.entries_ < b.entries_; }

 private:
  boost::container::small_vector<MoveEntry, 8> entries_;
  MoveType type_ = MoveType::I;
};

/// True iff A z = 0.
bool is_kernel_move(const Configuration& cfg, const Move& z);

struct BasisOptions {
  /// Grids with more cells than this use lazy proposals unless
  /// `force_enumeration` is set.
  int enumeration_threshold = 400;
  bool force_enumeration = false;
  bool force_lazy = false;
  /// Draws per move type used to estimate lazy type weights.
  int pilot_draws = 20000;
};

/// Sign-invariant set of moves for one model on one grid.
///
/// An enumerated basis stores one orientation per +/- pair; the opposite
/// orientation is implied. A lazy basis draws moves by rejection from
/// structured index proposals and never materializes the full list.
class MoveBasis {
 public:
  static MoveBasis from_moves(const ModelSpec& model, int rows, int cols,
                              std::vector<Move> moves);

  const ModelSpec& model() const;
  int rows() const;
  int cols() const;
  const Configuration& configuration() const;

  bool enumerated() const;
  /// One orientation per pair, sorted. Throws for lazy bases.
  std::span<const Move> moves() const;
  std::size_t size() const { return moves().size(); }
  std::size_t count(MoveType type) const;

  /// Subset of an enumerated basis keeping only the given move types.
  MoveBasis restricted_to(std::span<const MoveType> types) const;

  /// A basis element drawn from a fixed, state-independent distribution
  /// with positive mass on every element. The caller flips the sign.
  Move random_move(Rng& rng) const;

  struct State;
  explicit MoveBasis(std::shared_ptr<const State> state) : state_(std::move(state)) {}

 private:
  std::shared_ptr<const State> state_;
};

/// Basic moves in the kernel of a change point (or independence) model.
MoveBasis basis_change_point(const ModelSpec& model, int rows, int cols,
                             const BasisOptions& options = {});

/// Types I-IV (with transposes) in the kernel of a block diagonal model.
/// For own-parameter blocks only Types I and II survive the kernel filter.
MoveBasis basis_block(const ModelSpec& model, int rows, int cols,
                      const BasisOptions& options = {});

/// Dispatches on the model family.
MoveBasis markov_basis(const ModelSpec& model, int rows, int cols,
                       const BasisOptions& options = {});

/// Every candidate of one type on the model geometry that meets the type's
/// block conditions, before the kernel filter. Canonical, deduplicated.
std::vector<Move> enumerate_type(const ModelSpec& model, int rows, int cols, MoveType type);

}  // namespace mfiber
