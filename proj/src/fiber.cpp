#include "markov_fiber/fiber.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <stdexcept>
#include <string>
#include <unordered_map>

#include "markov_fiber/log_factorial.hpp"

namespace mfiber {

namespace {

class UnionFind {
 public:
  explicit UnionFind(std::size_t n) : parent_(n) {
    std::iota(parent_.begin(), parent_.end(), std::uint32_t{0});
  }
  std::uint32_t find(std::uint32_t x) {
    while (parent_[x] != x) {
      parent_[x] = parent_[parent_[x]];
      x = parent_[x];
    }
    return x;
  }
  bool unite(std::uint32_t a, std::uint32_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    parent_[std::max(a, b)] = std::min(a, b);
    return true;
  }

 private:
  std::vector<std::uint32_t> parent_;
};

double log_weight(std::span<const std::int64_t> x) {
  double w = 0.0;
  for (auto v : x) w -= log_factorial(v);
  return w;
}

struct FiberSearch {
  const Configuration& cfg;
  std::size_t cap;
  std::vector<std::int64_t> remaining;
  std::vector<std::vector<int>> closing;  // constraints whose last cell is c
  std::vector<std::int64_t> x;
  std::vector<std::vector<std::int64_t>> found;
  bool overflow = false;

  void run(int c) {
    if (overflow) return;
    if (c == cfg.cell_count()) {
      if (found.size() >= cap) {
        overflow = true;
        return;
      }
      found.push_back(x);
      return;
    }
    const auto rows = cfg.constraints_of(c);
    std::int64_t upper = std::numeric_limits<std::int64_t>::max();
    for (int r : rows) upper = std::min(upper, remaining[r]);
    std::int64_t lower = 0;
    for (int r : closing[c]) {
      // The last cell of a constraint must absorb what is left of it.
      lower = std::max(lower, remaining[r]);
      upper = std::min(upper, remaining[r]);
    }
    for (std::int64_t v = lower; v <= upper && !overflow; ++v) {
      for (int r : rows) remaining[r] -= v;
      x[c] = v;
      run(c + 1);
      for (int r : rows) remaining[r] += v;
    }
    x[c] = 0;
  }
};

}  // namespace

std::vector<double> Fiber::probabilities() const {
  if (log_weights.empty()) return {};
  const double top = *std::max_element(log_weights.begin(), log_weights.end());
  std::vector<double> p(log_weights.size());
  double z = 0.0;
  for (std::size_t k = 0; k < p.size(); ++k) z += p[k] = std::exp(log_weights[k] - top);
  for (auto& v : p) v /= z;
  return p;
}

FiberEnumeration enumerate_fiber(const SufficientStat& t, const Configuration& cfg,
                                 std::size_t cap) {
  if (static_cast<int>(t.size()) != cfg.constraint_count()) {
    throw std::invalid_argument("sufficient statistic length does not match configuration");
  }
  std::int64_t row_total = 0, col_total = 0;
  for (int r = 0; r < cfg.constraint_count(); ++r) {
    if (t[r] < 0) throw std::invalid_argument("sufficient statistic must be nonnegative");
    if (cfg.labels()[r].kind == ConstraintKind::RowSum) row_total += t[r];
    if (cfg.labels()[r].kind == ConstraintKind::ColSum) col_total += t[r];
  }
  if (row_total != col_total) {
    throw std::invalid_argument("inconsistent statistic: row and column totals differ");
  }

  FiberSearch search{cfg, cap, t, std::vector<std::vector<int>>(cfg.cell_count()),
                     std::vector<std::int64_t>(cfg.cell_count(), 0), {}, false};
  for (int r = 0; r < cfg.constraint_count(); ++r) {
    const auto support = cfg.support(r);
    if (support.empty()) {
      if (t[r] != 0) return {Fiber{t, cfg.rows(), cfg.cols(), {}, {}}, false};
      continue;
    }
    search.closing[*std::max_element(support.begin(), support.end())].push_back(r);
  }
  search.run(0);

  FiberEnumeration out;
  if (search.overflow) {
    out.overflow = true;
    return out;
  }
  Fiber fiber{t, cfg.rows(), cfg.cols(), std::move(search.found), {}};
  fiber.log_weights.reserve(fiber.members.size());
  for (const auto& m : fiber.members) fiber.log_weights.push_back(log_weight(m));
  out.fiber = std::move(fiber);
  return out;
}

bool is_connected(const Fiber& fiber, std::span<const Move> moves) {
  if (fiber.members.size() <= 1) return true;
  std::map<std::vector<std::int64_t>, std::uint32_t> index;
  for (std::size_t k = 0; k < fiber.members.size(); ++k)
    index.emplace(fiber.members[k], static_cast<std::uint32_t>(k));

  UnionFind uf(fiber.members.size());
  std::size_t components = fiber.members.size();
  std::vector<std::int64_t> y;
  for (std::size_t k = 0; k < fiber.members.size(); ++k) {
    const auto& x = fiber.members[k];
    for (const auto& z : moves) {
      for (int sign : {1, -1}) {
        y = x;
        bool nonnegative = true;
        for (const auto& e : z.entries()) {
          if (e.cell >= static_cast<int>(y.size())) {
            throw std::invalid_argument("move does not fit the fiber's grid");
          }
          y[e.cell] += sign * e.coeff;
          if (y[e.cell] < 0) {
            nonnegative = false;
            break;
          }
        }
        if (!nonnegative) continue;
        auto it = index.find(y);
        if (it != index.end() && uf.unite(static_cast<std::uint32_t>(k), it->second)) {
          if (--components == 1) return true;
        }
      }
    }
  }
  return components == 1;
}

bool is_connected(const Fiber& fiber, const MoveBasis& basis) {
  return is_connected(fiber, basis.moves());
}

bool indispensable(const Move& z, const Configuration& cfg) {
  if (!is_kernel_move(cfg, z)) throw std::invalid_argument("indispensable: z is not a move");
  if (z.empty()) return false;
  const auto plus = z.positive_part(cfg.cell_count());
  const auto result = enumerate_fiber(cfg.apply(plus), cfg, 2);
  // Overflow means more than two members.
  return !result.overflow && result.fiber->size() == 2;
}

std::optional<double> exact_pvalue(const Table& table, const Configuration& cfg,
                                   const Statistic& statistic, std::size_t cap) {
  const auto result = enumerate_fiber(sufficient_statistic(table, cfg), cfg, cap);
  if (result.overflow) return std::nullopt;
  const Fiber& fiber = *result.fiber;
  const double observed = statistic(table);
  const auto prob = fiber.probabilities();
  double p = 0.0;
  for (std::size_t k = 0; k < fiber.size(); ++k) {
    const Table member(fiber.rows, fiber.cols, fiber.members[k]);
    if (statistic(member) >= observed - 1e-12) p += prob[k];
  }
  return std::min(p, 1.0);
}

// ---------------------------------------------------------------------------
// Sweep over all small fibers. A table of total n is stored as the sorted
// multiset of its n cells, packed 6 bits per cell with the first cell in the
// most significant position so that numeric order is lexicographic order.

namespace {

constexpr int kBits = 6;
constexpr int kMaxCells = 63;
constexpr int kMaxTotal = 10;

using Key = std::uint64_t;

Key pack(const std::array<int, kMaxTotal>& cells, int n) {
  Key k = 0;
  for (int a = 0; a < n; ++a) k = (k << kBits) | static_cast<Key>(cells[a]);
  return k;
}

void unpack(Key k, int n, std::array<int, kMaxTotal>& cells) {
  for (int a = n - 1; a >= 0; --a) {
    cells[a] = static_cast<int>(k & ((Key{1} << kBits) - 1));
    k >>= kBits;
  }
}

struct OrientedMove {
  std::vector<int> minus;  // sorted multiset
  std::vector<int> plus;
};

std::vector<Key> all_multisets(int cells, int n) {
  std::vector<Key> keys;
  std::array<int, kMaxTotal> seq{};
  // Nondecreasing sequences in lexicographic order.
  for (;;) {
    keys.push_back(pack(seq, n));
    int a = n - 1;
    while (a >= 0 && seq[a] == cells - 1) --a;
    if (a < 0) break;
    ++seq[a];
    for (int b = a + 1; b < n; ++b) seq[b] = seq[a];
  }
  return keys;
}

double multiset_count(int cells, int n) {
  double c = 1.0;
  for (int k = 1; k <= n; ++k) c = c * (cells - 1 + k) / k;
  return c;
}

}  // namespace

FiberSweepReport sweep_fibers(const Configuration& cfg, std::span<const Move> moves,
                              int max_total, std::size_t max_witnesses) {
  const int cells = cfg.cell_count();
  if (cells > kMaxCells) throw std::invalid_argument("sweep_fibers supports at most 63 cells");
  if (max_total < 0 || max_total > kMaxTotal) {
    throw std::invalid_argument("sweep_fibers supports totals up to 10");
  }

  // Oriented moves keyed by their two smallest removed cells; a move with
  // a single removed unit is keyed by (c, c) in `by_single`.
  std::vector<std::vector<OrientedMove>> by_pair(cells * cells);
  std::vector<std::vector<OrientedMove>> by_single(cells);
  for (const auto& z : moves) {
    for (int sign : {1, -1}) {
      OrientedMove om;
      for (const auto& e : z.entries()) {
        auto& side = sign * e.coeff > 0 ? om.plus : om.minus;
        side.insert(side.end(), std::abs(e.coeff), e.cell);
      }
      std::sort(om.minus.begin(), om.minus.end());
      std::sort(om.plus.begin(), om.plus.end());
      if (om.minus.empty()) continue;
      if (om.minus.size() == 1) {
        by_single[om.minus.front()].push_back(std::move(om));
      } else {
        by_pair[om.minus[0] * cells + om.minus[1]].push_back(std::move(om));
      }
    }
  }

  FiberSweepReport report;
  report.max_total = max_total;
  for (int n = 1; n <= max_total; ++n) {
    if (multiset_count(cells, n) > 5e7) {
      throw std::invalid_argument("sweep_fibers: too many tables for this grid and total");
    }
    const auto keys = all_multisets(cells, n);
    report.tables += keys.size();
    UnionFind uf(keys.size());

    std::array<int, kMaxTotal> seq{}, next{};
    std::vector<int> buckets;
    for (std::size_t idx = 0; idx < keys.size(); ++idx) {
      unpack(keys[idx], n, seq);
      buckets.clear();
      for (int a = 0; a < n; ++a) {
        if (a > 0 && seq[a] == seq[a - 1]) continue;
        buckets.push_back(-1 - seq[a]);
        for (int b = a + 1; b < n; ++b) {
          if (b > a + 1 && seq[b] == seq[b - 1]) continue;
          buckets.push_back(seq[a] * cells + seq[b]);
        }
      }
      for (int bucket : buckets) {
        const auto& list = bucket < 0 ? by_single[-1 - bucket] : by_pair[bucket];
        for (const auto& om : list) {
          if (static_cast<int>(om.minus.size()) > n) continue;
          // next = seq - minus + plus, when minus is a sub-multiset of seq.
          int out = 0, m = 0;
          for (int b = 0; b < n; ++b) {
            if (m < static_cast<int>(om.minus.size()) && om.minus[m] == seq[b]) {
              ++m;
            } else {
              next[out++] = seq[b];
            }
          }
          if (m != static_cast<int>(om.minus.size())) continue;
          for (int p : om.plus) next[out++] = p;
          if (out != n) continue;
          std::sort(next.begin(), next.begin() + n);
          const Key k = pack(next, n);
          const auto it = std::lower_bound(keys.begin(), keys.end(), k);
          if (it != keys.end() && *it == k) {
            uf.unite(static_cast<std::uint32_t>(idx),
                     static_cast<std::uint32_t>(it - keys.begin()));
          }
        }
      }
    }

    // Group by sufficient statistic and count distinct components per group.
    std::unordered_map<std::string, std::uint32_t> fiber_ids;
    std::vector<std::string> fiber_keys;
    std::vector<std::pair<std::uint32_t, std::uint32_t>> fiber_root;
    fiber_root.reserve(keys.size());
    std::vector<std::uint32_t> fiber_size;
    std::string tkey(cfg.constraint_count(), '\0');
    for (std::size_t idx = 0; idx < keys.size(); ++idx) {
      unpack(keys[idx], n, seq);
      std::fill(tkey.begin(), tkey.end(), '\0');
      for (int a = 0; a < n; ++a)
        for (int r : cfg.constraints_of(seq[a])) ++tkey[r];
      auto [it, inserted] =
          fiber_ids.emplace(tkey, static_cast<std::uint32_t>(fiber_keys.size()));
      if (inserted) {
        fiber_keys.push_back(tkey);
        fiber_size.push_back(0);
      }
      ++fiber_size[it->second];
      fiber_root.emplace_back(it->second, uf.find(static_cast<std::uint32_t>(idx)));
    }
    report.fibers += fiber_keys.size();
    for (auto s : fiber_size)
      if (s > 1) ++report.multi_member_fibers;

    std::vector<std::pair<std::uint32_t, std::uint32_t>> pairs = fiber_root;
    std::sort(pairs.begin(), pairs.end());
    pairs.erase(std::unique(pairs.begin(), pairs.end()), pairs.end());
    std::vector<std::uint32_t> components(fiber_keys.size(), 0);
    for (const auto& [f, root] : pairs) ++components[f];

    for (std::uint32_t f = 0; f < components.size(); ++f) {
      if (components[f] <= 1) continue;
      ++report.disconnected_fibers;
      if (report.witnesses.size() >= max_witnesses) continue;
      FiberSweepReport::Witness w;
      w.t.assign(fiber_keys[f].begin(), fiber_keys[f].end());
      w.members = fiber_size[f];
      w.components = components[f];
      // First two tables of this fiber lying in different components.
      std::optional<std::uint32_t> first_root;
      for (std::size_t idx = 0; idx < keys.size(); ++idx) {
        if (fiber_root[idx].first != f) continue;
        const auto root = fiber_root[idx].second;
        if (first_root && root == *first_root) continue;
        unpack(keys[idx], n, seq);
        std::vector<std::int64_t> x(cells, 0);
        for (int a = 0; a < n; ++a) ++x[seq[a]];
        if (!first_root) {
          first_root = root;
          w.first = std::move(x);
        } else {
          w.second = std::move(x);
          break;
        }
      }
      report.witnesses.push_back(std::move(w));
    }
  }
  return report;
}

}  // namespace mfiber
