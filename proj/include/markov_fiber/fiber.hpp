#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "markov_fiber/configuration.hpp"
#include "markov_fiber/moves.hpp"
#include "markov_fiber/statistic.hpp"

namespace mfiber {

inline constexpr std::size_t kDefaultFiberCap = 5'000'000;

/// Every nonnegative table with A x = t, with log weights -sum log x_ij!.
struct Fiber {
  SufficientStat t;
  int rows = 0;
  int cols = 0;
  std::vector<std::vector<std::int64_t>> members;
  std::vector<double> log_weights;

  std::size_t size() const { return members.size(); }
  /// Normalized conditional probabilities of the members.
  std::vector<double> probabilities() const;
};

/// Result of a capped enumeration: either the complete fiber or an
/// overflow marker when more than `cap` members exist.
struct FiberEnumeration {
  std::optional<Fiber> fiber;
  bool overflow = false;
};

/// Depth-first cell assignment with remaining-capacity pruning on every
/// constraint of A.
FiberEnumeration enumerate_fiber(const SufficientStat& t, const Configuration& cfg,
                                 std::size_t cap = kDefaultFiberCap);

/// Whether the moves (both signs) connect the fiber through nonnegative
/// tables. The basis must be enumerated.
bool is_connected(const Fiber& fiber, const MoveBasis& basis);
bool is_connected(const Fiber& fiber, std::span<const Move> moves);

/// True iff the fiber through z+ is exactly {z+, z-}.
bool indispensable(const Move& z, const Configuration& cfg);

/// Exact conditional p-value P(stat >= observed) on the fiber of `table`;
/// nullopt when the fiber exceeds `cap`.
std::optional<double> exact_pvalue(const Table& table, const Configuration& cfg,
                                   const Statistic& statistic,
                                   std::size_t cap = kDefaultFiberCap);

/// Connectivity of every fiber whose tables have total <= max_total.
struct FiberSweepReport {
  struct Witness {
    SufficientStat t;
    std::size_t members = 0;
    std::size_t components = 0;
    /// Two members lying in different components.
    std::vector<std::int64_t> first;
    std::vector<std::int64_t> second;
  };

  int max_total = 0;
  std::size_t tables = 0;
  std::size_t fibers = 0;
  std::size_t multi_member_fibers = 0;
  std::size_t disconnected_fibers = 0;
  std::vector<Witness> witnesses;

  bool all_connected() const { return disconnected_fibers == 0; }
};

/// Enumerates all tables of each total 1..max_total, joins them with the
/// moves, and groups them by sufficient statistic. Grids are limited to 63
/// cells and totals to 10.
FiberSweepReport sweep_fibers(const Configuration& cfg, std::span<const Move> moves,
                              int max_total, std::size_t max_witnesses = 4);

}  // namespace mfiber
