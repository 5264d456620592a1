#include "markov_fiber/moves.hpp"

#include <algorithm>
#include <array>
#include <cstdlib>
#include <optional>
#include <stdexcept>

namespace mfiber {

std::string_view to_string(MoveType type) {
  switch (type) {
    case MoveType::I:
      return "I";
    case MoveType::II:
      return "II";
    case MoveType::III:
      return "III";
    case MoveType::IV:
      return "IV";
    case MoveType::IVTransposed:
      return "IVT";
  }
  return "?";
}

MoveType parse_move_type(std::string_view name) {
  for (auto t : {MoveType::I, MoveType::II, MoveType::III, MoveType::IV,
                 MoveType::IVTransposed})
    if (to_string(t) == name) return t;
  throw std::invalid_argument("unknown move type '" + std::string(name) + "'");
}

// ---------------------------------------------------------------------------
// Move

Move::Move(std::span<const MoveEntry> entries, MoveType type) : type_(type) {
  boost::container::small_vector<MoveEntry, 8> sorted(entries.begin(), entries.end());
  std::sort(sorted.begin(), sorted.end(),
            [](const MoveEntry& a, const MoveEntry& b) { return a.cell < b.cell; });
  for (const auto& e : sorted) {
    if (!entries_.empty() && entries_.back().cell == e.cell) {
      entries_.back().coeff += e.coeff;
      if (entries_.back().coeff == 0) entries_.pop_back();
    } else if (e.coeff != 0) {
      entries_.push_back(e);
    }
  }
}

Move Move::from_dense(std::span<const std::int64_t> z, MoveType type) {
  boost::container::small_vector<MoveEntry, 8> entries;
  for (std::size_t c = 0; c < z.size(); ++c)
    if (z[c] != 0) entries.push_back({static_cast<int>(c), static_cast<int>(z[c])});
  return Move(std::span<const MoveEntry>(entries.data(), entries.size()), type);
}

Move Move::basic(int cols, Cell a, Cell b) {
  const std::array<MoveEntry, 4> e{{{a.row * cols + a.col, 1},
                                    {b.row * cols + b.col, 1},
                                    {a.row * cols + b.col, -1},
                                    {b.row * cols + a.col, -1}}};
  return Move(e, MoveType::I);
}

int Move::degree() const {
  int l1 = 0;
  for (const auto& e : entries_) l1 += std::abs(e.coeff);
  return l1 / 2;
}

Move Move::negated() const {
  Move m = *this;
  for (auto& e : m.entries_) e.coeff = -e.coeff;
  return m;
}

Move Move::canonical() const {
  if (!entries_.empty() && entries_.front().coeff < 0) return negated();
  return *this;
}

std::vector<std::int64_t> Move::dense(int cell_count) const {
  std::vector<std::int64_t> z(cell_count, 0);
  for (const auto& e : entries_) z.at(e.cell) = e.coeff;
  return z;
}

std::vector<std::int64_t> Move::positive_part(int cell_count) const {
  std::vector<std::int64_t> z(cell_count, 0);
  for (const auto& e : entries_)
    if (e.coeff > 0) z.at(e.cell) = e.coeff;
  return z;
}

std::vector<std::int64_t> Move::negative_part(int cell_count) const {
  std::vector<std::int64_t> z(cell_count, 0);
  for (const auto& e : entries_)
    if (e.coeff < 0) z.at(e.cell) = -e.coeff;
  return z;
}

bool is_kernel_move(const Configuration& cfg, const Move& z) {
  std::vector<std::int64_t> az(cfg.constraint_count(), 0);
  for (const auto& e : z.entries()) {
    if (e.cell < 0 || e.cell >= cfg.cell_count()) {
      throw std::invalid_argument("move cell outside configuration grid");
    }
    for (int r : cfg.constraints_of(e.cell)) az[r] += e.coeff;
  }
  return std::all_of(az.begin(), az.end(), [](std::int64_t v) { return v == 0; });
}

// ---------------------------------------------------------------------------
// Block geometry and the move-type patterns

namespace {

/// Row and column block membership with an extra index `n` for the part of
/// the grid not covered by any block. `effect[k]` marks diagonal blocks
/// whose cells carry a subtable effect (together they form S).
struct Geometry {
  int rows = 0;
  int cols = 0;
  int n = 0;
  std::vector<int> row_block;
  std::vector<int> col_block;
  std::vector<char> effect;
  std::vector<Cell> s_cells;
  std::vector<std::vector<int>> rows_of_block;

  bool in_s(int i, int j) const {
    const int k = row_block[i];
    return k < n && k == col_block[j] && effect[k];
  }
  int block_id(int i, int j) const { return row_block[i] * (n + 1) + col_block[j]; }
  int cell(int i, int j) const { return i * cols + j; }

  Geometry transposed() const {
    Geometry t;
    t.rows = cols;
    t.cols = rows;
    t.n = n;
    t.row_block = col_block;
    t.col_block = row_block;
    t.effect = effect;
    t.finish();
    return t;
  }

  void finish() {
    s_cells.clear();
    for (int i = 0; i < rows; ++i)
      for (int j = 0; j < cols; ++j)
        if (in_s(i, j)) s_cells.push_back({i, j});
    rows_of_block.assign(n + 1, {});
    for (int i = 0; i < rows; ++i) rows_of_block[row_block[i]].push_back(i);
  }
};

Geometry make_geometry(const ModelSpec& model, int rows, int cols) {
  Geometry g;
  g.rows = rows;
  g.cols = cols;
  g.n = model.block_count();
  g.row_block = block_membership(model.row_bounds, rows, model.shift);
  g.col_block = block_membership(model.col_bounds, cols, model.shift);
  g.effect.assign(g.n, model.family != ModelFamily::GeneralBlockDiagonal);
  for (const auto& grp : model.groups)
    for (int k : grp) g.effect[k] = 1;
  g.finish();
  return g;
}

template <std::size_t K>
bool distinct(const std::array<int, K>& v) {
  for (std::size_t a = 0; a < K; ++a)
    for (std::size_t b = a + 1; b < K; ++b)
      if (v[a] == v[b]) return false;
  return true;
}

using Rows3 = std::array<int, 3>;
using Rows4 = std::array<int, 4>;

//      j1  j2  j3
// i1    0  +1  -1
// i2   -1   0  +1
// i3   +1  -1   0
bool type2_ok(const Geometry& g, const Rows3& i, const Rows3& j) {
  if (!distinct(i) || !distinct(j)) return false;
  const std::array<Cell, 6> cells{{{i[0], j[1]}, {i[0], j[2]}, {i[1], j[0]},
                                   {i[1], j[2]}, {i[2], j[0]}, {i[2], j[1]}}};
  std::array<int, 6> blocks{};
  for (std::size_t k = 0; k < cells.size(); ++k) {
    if (g.in_s(cells[k].row, cells[k].col)) return false;
    blocks[k] = g.block_id(cells[k].row, cells[k].col);
  }
  return distinct(blocks);
}

Move type2_move(const Geometry& g, const Rows3& i, const Rows3& j, MoveType tag) {
  const std::array<MoveEntry, 6> e{{{g.cell(i[0], j[1]), 1},
                                    {g.cell(i[0], j[2]), -1},
                                    {g.cell(i[1], j[0]), -1},
                                    {g.cell(i[1], j[2]), 1},
                                    {g.cell(i[2], j[0]), 1},
                                    {g.cell(i[2], j[1]), -1}}};
  return Move(std::span<const MoveEntry>(e.data(), e.size()), tag);
}

//      j1  j2  j3
// i1   +1   0  -1
// i2    0  -1  +1
// i3   -1  +1   0
bool type3_ok(const Geometry& g, const Rows3& i, const Rows3& j) {
  if (!distinct(i) || !distinct(j)) return false;
  if (!g.in_s(i[0], j[0]) || !g.in_s(i[1], j[1])) return false;
  if (g.block_id(i[0], j[0]) == g.block_id(i[1], j[1])) return false;
  const std::array<Cell, 4> cells{{{i[0], j[2]}, {i[1], j[2]}, {i[2], j[0]}, {i[2], j[1]}}};
  std::array<int, 4> blocks{};
  for (std::size_t k = 0; k < cells.size(); ++k) {
    if (g.in_s(cells[k].row, cells[k].col)) return false;
    blocks[k] = g.block_id(cells[k].row, cells[k].col);
  }
  return distinct(blocks);
}

Move type3_move(const Geometry& g, const Rows3& i, const Rows3& j) {
  const std::array<MoveEntry, 6> e{{{g.cell(i[0], j[0]), 1},
                                    {g.cell(i[0], j[2]), -1},
                                    {g.cell(i[1], j[1]), -1},
                                    {g.cell(i[1], j[2]), 1},
                                    {g.cell(i[2], j[0]), -1},
                                    {g.cell(i[2], j[1]), 1}}};
  return Move(e, MoveType::III);
}

//      j1  j2  j3  j4
// i1   +1   0  -1   0
// i2    0  +1   0  -1
// i3    0  -1  +1   0
// i4   -1   0   0  +1
Move type4_move(const Geometry& g, const Rows4& i, const Rows4& j, MoveType tag) {
  const std::array<MoveEntry, 8> e{{{g.cell(i[0], j[0]), 1},
                                    {g.cell(i[0], j[2]), -1},
                                    {g.cell(i[1], j[1]), 1},
                                    {g.cell(i[1], j[3]), -1},
                                    {g.cell(i[2], j[1]), -1},
                                    {g.cell(i[2], j[2]), 1},
                                    {g.cell(i[3], j[0]), -1},
                                    {g.cell(i[3], j[3]), 1}}};
  return Move(std::span<const MoveEntry>(e.data(), e.size()), tag);
}

// Indices may coincide (non-square-free moves) as long as nothing cancels.
bool type4_ok(const Geometry& g, const Rows4& i, const Rows4& j, const Move& m) {
  if (!g.in_s(i[0], j[0]) || !g.in_s(i[2], j[1])) return false;
  if (g.block_id(i[0], j[0]) == g.block_id(i[2], j[1])) return false;
  if (g.row_block[i[0]] != g.row_block[i[1]]) return false;
  if (g.row_block[i[2]] != g.row_block[i[3]]) return false;
  const std::array<Cell, 6> others{{{i[0], j[2]}, {i[1], j[1]}, {i[1], j[3]},
                                    {i[2], j[2]}, {i[3], j[0]}, {i[3], j[3]}}};
  for (const auto& c : others)
    if (g.in_s(c.row, c.col)) return false;
  return m.degree() == 4;
}

Move transpose_move(const Move& m, int rows, int cols, MoveType tag) {
  // m lives on a cols x rows grid; map (a, b) there to (b, a) here.
  boost::container::small_vector<MoveEntry, 8> e;
  for (const auto& x : m.entries()) {
    const int a = x.cell / rows;
    const int b = x.cell % rows;
    e.push_back({b * cols + a, x.coeff});
  }
  return Move(std::span<const MoveEntry>(e.data(), e.size()), tag);
}

void canonicalize(std::vector<Move>& moves) {
  for (auto& m : moves) m = m.canonical();
  std::stable_sort(moves.begin(), moves.end());
  moves.erase(std::unique(moves.begin(), moves.end()), moves.end());
}

std::vector<Move> enumerate_basic(int rows, int cols) {
  std::vector<Move> out;
  for (int i1 = 0; i1 < rows; ++i1)
    for (int i2 = i1 + 1; i2 < rows; ++i2)
      for (int j1 = 0; j1 < cols; ++j1)
        for (int j2 = j1 + 1; j2 < cols; ++j2)
          out.push_back(Move::basic(cols, {i1, j1}, {i2, j2}));
  return out;
}

std::vector<Move> enumerate_type2(const Geometry& g) {
  std::vector<Move> out;
  Rows3 i{}, j{};
  for (i[0] = 0; i[0] < g.rows; ++i[0])
    for (i[1] = 0; i[1] < g.rows; ++i[1])
      for (i[2] = 0; i[2] < g.rows; ++i[2]) {
        if (!distinct(i)) continue;
        for (j[0] = 0; j[0] < g.cols; ++j[0])
          for (j[1] = 0; j[1] < g.cols; ++j[1])
            for (j[2] = 0; j[2] < g.cols; ++j[2])
              if (type2_ok(g, i, j)) out.push_back(type2_move(g, i, j, MoveType::II));
      }
  canonicalize(out);
  return out;
}

std::vector<Move> enumerate_type3(const Geometry& g) {
  std::vector<Move> out;
  for (const Cell& a : g.s_cells)
    for (const Cell& b : g.s_cells)
      for (int i3 = 0; i3 < g.rows; ++i3)
        for (int j3 = 0; j3 < g.cols; ++j3) {
          const Rows3 i{a.row, b.row, i3};
          const Rows3 j{a.col, b.col, j3};
          if (type3_ok(g, i, j)) out.push_back(type3_move(g, i, j));
        }
  canonicalize(out);
  return out;
}

std::vector<Move> enumerate_type4(const Geometry& g, MoveType tag) {
  std::vector<Move> out;
  for (const Cell& a : g.s_cells)
    for (const Cell& b : g.s_cells) {
      if (g.block_id(a.row, a.col) == g.block_id(b.row, b.col)) continue;
      for (int i2 : g.rows_of_block[g.row_block[a.row]])
        for (int i4 : g.rows_of_block[g.row_block[b.row]])
          for (int j3 = 0; j3 < g.cols; ++j3)
            for (int j4 = 0; j4 < g.cols; ++j4) {
              const Rows4 i{a.row, i2, b.row, i4};
              const Rows4 j{a.col, b.col, j3, j4};
              Move m = type4_move(g, i, j, tag);
              if (type4_ok(g, i, j, m)) out.push_back(std::move(m));
            }
    }
  canonicalize(out);
  return out;
}

std::vector<Move> enumerate_on(const Geometry& g, MoveType type) {
  switch (type) {
    case MoveType::I:
      return enumerate_basic(g.rows, g.cols);
    case MoveType::II:
      return enumerate_type2(g);
    case MoveType::III:
      return enumerate_type3(g);
    case MoveType::IV:
      return enumerate_type4(g, MoveType::IV);
    case MoveType::IVTransposed: {
      std::vector<Move> out;
      for (const auto& m : enumerate_type4(g.transposed(), MoveType::IVTransposed))
        out.push_back(transpose_move(m, g.rows, g.cols, MoveType::IVTransposed));
      canonicalize(out);
      return out;
    }
  }
  return {};
}

// ---------------------------------------------------------------------------
// Lazy proposals: one structured draw per type, rejected unless the drawn
// index tuple meets the type's conditions and lands in the kernel.

std::optional<Move> draw_candidate(const Geometry& g, const Geometry& gt, MoveType type,
                                   Rng& rng) {
  auto uniform = [&rng](int n) { return std::uniform_int_distribution<int>(0, n - 1)(rng); };
  switch (type) {
    case MoveType::I: {
      const int i1 = uniform(g.rows), i2 = uniform(g.rows);
      const int j1 = uniform(g.cols), j2 = uniform(g.cols);
      if (i1 == i2 || j1 == j2) return std::nullopt;
      return Move::basic(g.cols, {i1, j1}, {i2, j2});
    }
    case MoveType::II: {
      const Rows3 i{uniform(g.rows), uniform(g.rows), uniform(g.rows)};
      const Rows3 j{uniform(g.cols), uniform(g.cols), uniform(g.cols)};
      if (!type2_ok(g, i, j)) return std::nullopt;
      return type2_move(g, i, j, MoveType::II);
    }
    case MoveType::III: {
      if (g.s_cells.empty()) return std::nullopt;
      const Cell a = g.s_cells[uniform(static_cast<int>(g.s_cells.size()))];
      const Cell b = g.s_cells[uniform(static_cast<int>(g.s_cells.size()))];
      const Rows3 i{a.row, b.row, uniform(g.rows)};
      const Rows3 j{a.col, b.col, uniform(g.cols)};
      if (!type3_ok(g, i, j)) return std::nullopt;
      return type3_move(g, i, j);
    }
    case MoveType::IV: {
      if (g.s_cells.empty()) return std::nullopt;
      const Cell a = g.s_cells[uniform(static_cast<int>(g.s_cells.size()))];
      const Cell b = g.s_cells[uniform(static_cast<int>(g.s_cells.size()))];
      const auto& ra = g.rows_of_block[g.row_block[a.row]];
      const auto& rb = g.rows_of_block[g.row_block[b.row]];
      const Rows4 i{a.row, ra[uniform(static_cast<int>(ra.size()))], b.row,
                    rb[uniform(static_cast<int>(rb.size()))]};
      const Rows4 j{a.col, b.col, uniform(g.cols), uniform(g.cols)};
      Move m = type4_move(g, i, j, MoveType::IV);
      if (!type4_ok(g, i, j, m)) return std::nullopt;
      return m;
    }
    case MoveType::IVTransposed: {
      auto m = draw_candidate(gt, g, MoveType::IV, rng);
      if (!m) return std::nullopt;
      return transpose_move(*m, g.rows, g.cols, MoveType::IVTransposed);
    }
  }
  return std::nullopt;
}

double candidate_space(const Geometry& g, MoveType type) {
  const double r = g.rows, c = g.cols, s = static_cast<double>(g.s_cells.size());
  switch (type) {
    case MoveType::I:
      return r * r * c * c;
    case MoveType::II:
      return r * r * r * c * c * c;
    case MoveType::III:
      return s * s * r * c;
    case MoveType::IV:
    case MoveType::IVTransposed: {
      const double per_block = g.n > 0 ? r / g.n : r;
      return s * s * per_block * per_block * c * c;
    }
  }
  return 0.0;
}

std::vector<MoveType> family_types(const ModelSpec& model) {
  if (model.is_block_family()) {
    return {MoveType::I, MoveType::II, MoveType::III, MoveType::IV, MoveType::IVTransposed};
  }
  return {MoveType::I};
}

Geometry geometry_for(const ModelSpec& model, int rows, int cols) {
  if (model.is_block_family()) return make_geometry(model, rows, cols);
  Geometry g;
  g.rows = rows;
  g.cols = cols;
  g.n = 0;
  g.row_block.assign(rows, 0);
  g.col_block.assign(cols, 0);
  g.finish();
  return g;
}

}  // namespace

// ---------------------------------------------------------------------------
// MoveBasis

struct MoveBasis::State {
  ModelSpec model;
  int rows = 0;
  int cols = 0;
  Configuration cfg;
  bool enumerated = true;
  std::vector<Move> moves;

  // Lazy proposal data.
  Geometry geometry;
  Geometry transposed;
  std::vector<MoveType> lazy_types;
  std::vector<double> lazy_weights;

  State(ModelSpec m, int r, int c)
      : model(std::move(m)), rows(r), cols(c),
        cfg(r, c, subtable_terms(model, r, c)) {}
};

MoveBasis MoveBasis::from_moves(const ModelSpec& model, int rows, int cols,
                                std::vector<Move> moves) {
  require_valid(model, rows, cols);
  auto state = std::make_shared<State>(model, rows, cols);
  canonicalize(moves);
  state->moves = std::move(moves);
  return MoveBasis(std::move(state));
}

const ModelSpec& MoveBasis::model() const { return state_->model; }
int MoveBasis::rows() const { return state_->rows; }
int MoveBasis::cols() const { return state_->cols; }
const Configuration& MoveBasis::configuration() const { return state_->cfg; }
bool MoveBasis::enumerated() const { return state_->enumerated; }

std::span<const Move> MoveBasis::moves() const {
  if (!state_->enumerated) {
    throw std::logic_error("lazy move basis has no materialized move list");
  }
  return state_->moves;
}

std::size_t MoveBasis::count(MoveType type) const {
  return static_cast<std::size_t>(std::count_if(
      state_->moves.begin(), state_->moves.end(),
      [type](const Move& m) { return m.type() == type; }));
}

MoveBasis MoveBasis::restricted_to(std::span<const MoveType> types) const {
  std::vector<Move> kept;
  for (const auto& m : moves())
    if (std::find(types.begin(), types.end(), m.type()) != types.end()) kept.push_back(m);
  auto state = std::make_shared<State>(state_->model, state_->rows, state_->cols);
  state->moves = std::move(kept);
  return MoveBasis(std::move(state));
}

Move MoveBasis::random_move(Rng& rng) const {
  const State& s = *state_;
  if (s.enumerated) {
    if (s.moves.empty()) throw std::logic_error("cannot draw from an empty move basis");
    std::uniform_int_distribution<std::size_t> pick(0, s.moves.size() - 1);
    return s.moves[pick(rng)];
  }
  std::discrete_distribution<std::size_t> pick_type(s.lazy_weights.begin(),
                                                    s.lazy_weights.end());
  for (;;) {
    const MoveType type = s.lazy_types[pick_type(rng)];
    auto m = draw_candidate(s.geometry, s.transposed, type, rng);
    if (m && is_kernel_move(s.cfg, *m)) return *m;
  }
}

namespace {

MoveBasis build_basis(const ModelSpec& model, int rows, int cols,
                      const BasisOptions& options) {
  require_valid(model, rows, cols);
  auto state = std::make_shared<MoveBasis::State>(model, rows, cols);
  const Geometry g = geometry_for(model, rows, cols);
  const auto types = family_types(model);
  const bool lazy =
      options.force_lazy ||
      (!options.force_enumeration && rows * cols > options.enumeration_threshold);

  if (!lazy) {
    std::vector<Move> all;
    for (MoveType t : types)
      for (auto& m : enumerate_on(g, t))
        if (is_kernel_move(state->cfg, m)) all.push_back(std::move(m));
    // Stable sort keeps the first type tag when two patterns coincide.
    std::stable_sort(all.begin(), all.end());
    all.erase(std::unique(all.begin(), all.end()), all.end());
    state->moves = std::move(all);
    return MoveBasis(std::move(state));
  }

  state->enumerated = false;
  state->geometry = g;
  state->transposed = g.transposed();
  Rng pilot(0x6d61726b6f76ULL);
  for (MoveType t : types) {
    int hits = 0;
    for (int k = 0; k < options.pilot_draws; ++k) {
      auto m = draw_candidate(g, state->transposed, t, pilot);
      if (m && is_kernel_move(state->cfg, *m)) ++hits;
    }
    if (hits == 0) continue;
    state->lazy_types.push_back(t);
    state->lazy_weights.push_back(candidate_space(g, t) * hits / options.pilot_draws);
  }
  if (state->lazy_types.empty()) {
    throw std::logic_error("lazy basis found no kernel moves for this model");
  }
  return MoveBasis(std::move(state));
}

}  // namespace

MoveBasis basis_change_point(const ModelSpec& model, int rows, int cols,
                             const BasisOptions& options) {
  if (model.family != ModelFamily::ChangePoint && model.family != ModelFamily::Independence) {
    throw ModelError("basis_change_point needs a change point model");
  }
  return build_basis(model, rows, cols, options);
}

MoveBasis basis_block(const ModelSpec& model, int rows, int cols,
                      const BasisOptions& options) {
  if (!model.is_block_family()) throw ModelError("basis_block needs a block diagonal model");
  return build_basis(model, rows, cols, options);
}

MoveBasis markov_basis(const ModelSpec& model, int rows, int cols,
                       const BasisOptions& options) {
  if (model.is_block_family()) return basis_block(model, rows, cols, options);
  return basis_change_point(model, rows, cols, options);
}

std::vector<Move> enumerate_type(const ModelSpec& model, int rows, int cols, MoveType type) {
  require_valid(model, rows, cols);
  if (!model.is_block_family() && type != MoveType::I) return {};
  return enumerate_on(geometry_for(model, rows, cols), type);
}

}  // namespace mfiber
