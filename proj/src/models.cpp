#include "markov_fiber/models.hpp"

#include <algorithm>
#include <set>
#include <sstream>

#include "markov_fiber/configuration.hpp"

namespace mfiber {

std::string_view to_string(ModelFamily family) {
  switch (family) {
    case ModelFamily::Independence:
      return "independence";
    case ModelFamily::ChangePoint:
      return "change_point";
    case ModelFamily::BlockDiagonalOwn:
      return "block_diagonal_own";
    case ModelFamily::CommonBlockDiagonal:
      return "common_block_diagonal";
    case ModelFamily::GeneralBlockDiagonal:
      return "general_block_diagonal";
  }
  return "unknown";
}

ModelFamily parse_family(std::string_view name) {
  for (auto f : {ModelFamily::Independence, ModelFamily::ChangePoint,
                 ModelFamily::BlockDiagonalOwn, ModelFamily::CommonBlockDiagonal,
                 ModelFamily::GeneralBlockDiagonal}) {
    if (to_string(f) == name) return f;
  }
  throw ModelError("unknown model family '" + std::string(name) + "'");
}

ModelSpec ModelSpec::independence() { return {}; }

ModelSpec ModelSpec::change_point(std::vector<Rectangle> rectangles) {
  ModelSpec m;
  m.family = ModelFamily::ChangePoint;
  m.rectangles = std::move(rectangles);
  return m;
}

ModelSpec ModelSpec::own_blocks(std::vector<int> row_bounds, std::vector<int> col_bounds) {
  ModelSpec m;
  m.family = ModelFamily::BlockDiagonalOwn;
  m.row_bounds = std::move(row_bounds);
  m.col_bounds = std::move(col_bounds);
  return m;
}

ModelSpec ModelSpec::common_blocks(std::vector<int> row_bounds, std::vector<int> col_bounds) {
  ModelSpec m = own_blocks(std::move(row_bounds), std::move(col_bounds));
  m.family = ModelFamily::CommonBlockDiagonal;
  return m;
}

ModelSpec ModelSpec::general_blocks(std::vector<int> row_bounds, std::vector<int> col_bounds,
                                    std::vector<std::vector<int>> groups) {
  ModelSpec m = own_blocks(std::move(row_bounds), std::move(col_bounds));
  m.family = ModelFamily::GeneralBlockDiagonal;
  m.groups = std::move(groups);
  return m;
}

bool ModelSpec::is_block_family() const {
  return family == ModelFamily::BlockDiagonalOwn ||
         family == ModelFamily::CommonBlockDiagonal ||
         family == ModelFamily::GeneralBlockDiagonal;
}

int ModelSpec::block_count() const {
  if (!is_block_family() || row_bounds.empty()) return 0;
  return static_cast<int>(row_bounds.size()) - 1;
}

int ModelSpec::term_count() const {
  switch (family) {
    case ModelFamily::Independence:
      return 0;
    case ModelFamily::ChangePoint:
      return static_cast<int>(rectangles.size());
    case ModelFamily::BlockDiagonalOwn:
      return block_count();
    case ModelFamily::CommonBlockDiagonal:
      return 1;
    case ModelFamily::GeneralBlockDiagonal:
      return static_cast<int>(groups.size());
  }
  return 0;
}

ModelSpec ModelSpec::transposed() const {
  ModelSpec t = *this;
  for (auto& r : t.rectangles) {
    r = Rectangle{r.first_col, r.last_col, r.first_row, r.last_row};
  }
  std::swap(t.row_bounds, t.col_bounds);
  return t;
}

namespace {

std::string describe(const Rectangle& r) {
  std::ostringstream os;
  os << "[" << r.first_row + 1 << "," << r.last_row + 1 << "]x[" << r.first_col + 1
     << "," << r.last_col + 1 << "]";
  return os.str();
}

void check_bounds(const std::vector<int>& bounds, int extent, bool must_cover,
                  const char* axis, std::vector<std::string>& out) {
  if (bounds.size() < 2) {
    out.push_back(std::string(axis) + " bounds need at least two entries");
    return;
  }
  if (bounds.front() != 0) {
    out.push_back(std::string(axis) + " bounds must start at the first " + axis);
  }
  for (std::size_t n = 1; n < bounds.size(); ++n) {
    if (bounds[n] <= bounds[n - 1]) {
      out.push_back(std::string(axis) + " bounds must be strictly increasing");
      break;
    }
  }
  if (must_cover && bounds.back() != extent) {
    out.push_back(std::string(axis) + " bounds must end past the last " + axis);
  } else if (bounds.back() > extent) {
    out.push_back(std::string(axis) + " bounds exceed the grid");
  }
}

void validate_change_point(const ModelSpec& m, int rows, int cols,
                           std::vector<std::string>& out) {
  if (m.rectangles.empty()) out.push_back("change point model needs at least one rectangle");
  for (const auto& r : m.rectangles) {
    if (r.first_row < 0 || r.first_col < 0 || r.last_row >= rows || r.last_col >= cols ||
        r.first_row > r.last_row || r.first_col > r.last_col) {
      out.push_back("rectangle " + describe(r) + " is not inside the grid");
    } else if (r.row_span() == 1 && r.col_span() == 1) {
      out.push_back("rectangle " + describe(r) + " is a single cell");
    }
  }
  for (std::size_t n = 1; n < m.rectangles.size(); ++n) {
    const auto& inner = m.rectangles[n - 1];
    const auto& outer = m.rectangles[n];
    if (!outer.contains(inner) || inner == outer) {
      out.push_back("rectangles must satisfy strict inclusion: " + describe(inner) +
                    " is not strictly inside " + describe(outer));
    }
  }
  if (!m.rectangles.empty()) {
    const auto& last = m.rectangles.back();
    if (last == Rectangle{0, rows - 1, 0, cols - 1}) {
      out.push_back("the largest rectangle must be a strict subset of the grid");
    }
  }
}

void validate_blocks(const ModelSpec& m, int rows, int cols, std::vector<std::string>& out) {
  const bool general = m.family == ModelFamily::GeneralBlockDiagonal;
  check_bounds(m.row_bounds, rows, !general, "row", out);
  check_bounds(m.col_bounds, cols, !general, "col", out);
  if (m.row_bounds.size() != m.col_bounds.size()) {
    out.push_back("row and col bounds must define the same number of blocks");
    return;
  }
  if (m.shift < 0 || m.shift >= rows || m.shift >= cols) {
    out.push_back("shift must lie in [0, min(R, C))");
  }
  const int n = m.block_count();
  if (!general && n < 2) out.push_back("block model needs at least two diagonal blocks");
  if (!general) return;

  if (m.groups.empty()) out.push_back("general block model needs at least one group");
  std::set<int> seen;
  for (const auto& g : m.groups) {
    if (g.empty()) out.push_back("groups must be nonempty");
    for (int b : g) {
      if (b < 0 || b >= n) {
        out.push_back("group refers to block " + std::to_string(b + 1) +
                      " which does not exist");
      } else if (!seen.insert(b).second) {
        out.push_back("groups must be disjoint: block " + std::to_string(b + 1) +
                      " appears twice");
      }
    }
  }
}

}  // namespace

std::vector<std::string> validate(const ModelSpec& model, int rows, int cols) {
  std::vector<std::string> out;
  if (rows < 2 || cols < 2) {
    out.push_back("grid must be at least 2 x 2");
    return out;
  }
  if (!model.is_block_family() && model.shift != 0) {
    out.push_back("shift applies to block diagonal models only");
  }
  switch (model.family) {
    case ModelFamily::Independence:
      break;
    case ModelFamily::ChangePoint:
      validate_change_point(model, rows, cols, out);
      break;
    case ModelFamily::BlockDiagonalOwn:
    case ModelFamily::CommonBlockDiagonal:
    case ModelFamily::GeneralBlockDiagonal:
      validate_blocks(model, rows, cols, out);
      break;
  }
  return out;
}

void require_valid(const ModelSpec& model, int rows, int cols) {
  const auto problems = validate(model, rows, cols);
  if (problems.empty()) return;
  std::string msg = "invalid " + std::string(to_string(model.family)) + " model:";
  for (const auto& p : problems) msg += " " + p + ";";
  msg.pop_back();
  throw ModelError(msg);
}

namespace {

CellSet diagonal_block(const ModelSpec& m, int rows, int cols, int n) {
  const auto rb = block_membership(m.row_bounds, rows, m.shift);
  const auto cb = block_membership(m.col_bounds, cols, m.shift);
  CellSet s(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j)
      if (rb[i] == n && cb[j] == n) s.insert(i, j);
  return s;
}

}  // namespace

std::vector<int> block_membership(const std::vector<int>& bounds, int extent, int shift) {
  const int n = bounds.empty() ? 0 : static_cast<int>(bounds.size()) - 1;
  std::vector<int> out(extent, n);
  for (int k = 0; k < n; ++k)
    for (int p = std::max(bounds[k], 0); p < bounds[k + 1] && p < extent; ++p)
      out[(p + shift) % extent] = k;
  return out;
}

std::vector<CellSet> subtable_terms(const ModelSpec& model, int rows, int cols) {
  std::vector<CellSet> terms;
  switch (model.family) {
    case ModelFamily::Independence:
      break;
    case ModelFamily::ChangePoint:
      for (const auto& r : model.rectangles)
        terms.push_back(CellSet::from_rectangle(rows, cols, r));
      break;
    case ModelFamily::BlockDiagonalOwn:
      for (int n = 0; n < model.block_count(); ++n)
        terms.push_back(diagonal_block(model, rows, cols, n));
      break;
    case ModelFamily::CommonBlockDiagonal: {
      CellSet s(rows, cols);
      for (int n = 0; n < model.block_count(); ++n) s |= diagonal_block(model, rows, cols, n);
      terms.push_back(std::move(s));
      break;
    }
    case ModelFamily::GeneralBlockDiagonal:
      for (const auto& g : model.groups) {
        CellSet t(rows, cols);
        for (int n : g) t |= diagonal_block(model, rows, cols, n);
        terms.push_back(std::move(t));
      }
      break;
  }
  return terms;
}

namespace {

void check_cell(int rows, int cols, int i, int j) {
  if (i < 0 || i >= rows || j < 0 || j >= cols) {
    throw std::out_of_range("cell (" + std::to_string(i + 1) + "," + std::to_string(j + 1) +
                            ") outside the grid");
  }
}

}  // namespace

std::optional<BlockIndex> cell_block(const ModelSpec& model, int rows, int cols, int i,
                                     int j) {
  check_cell(rows, cols, i, j);
  if (!model.is_block_family()) {
    throw ModelError("cell_block needs a block diagonal model");
  }
  const int n = model.block_count();
  const int k = block_membership(model.row_bounds, rows, model.shift)[i];
  const int l = block_membership(model.col_bounds, cols, model.shift)[j];
  if (k == n || l == n) return std::nullopt;
  return BlockIndex{k, l};
}

int cell_stratum(const ModelSpec& model, int rows, int cols, int i, int j) {
  check_cell(rows, cols, i, j);
  if (model.family != ModelFamily::ChangePoint) {
    throw ModelError("cell_stratum needs a change point model");
  }
  const int n = static_cast<int>(model.rectangles.size());
  for (int s = 0; s < n; ++s)
    if (model.rectangles[s].contains(i, j)) return s;
  return n;
}

std::vector<ModelSpec> enumerate_change_point_models(int rows, int cols, int max_rectangles) {
  std::vector<Rectangle> rects;
  for (int a1 = 0; a1 < rows; ++a1)
    for (int a2 = a1; a2 < rows; ++a2)
      for (int b1 = 0; b1 < cols; ++b1)
        for (int b2 = b1; b2 < cols; ++b2) rects.push_back(Rectangle{a1, a2, b1, b2});

  std::vector<ModelSpec> out;
  std::vector<Rectangle> chain;
  auto extend = [&](auto&& self) -> void {
    if (!chain.empty()) {
      auto m = ModelSpec::change_point(chain);
      if (validate(m, rows, cols).empty()) out.push_back(std::move(m));
    }
    if (static_cast<int>(chain.size()) == max_rectangles) return;
    for (const auto& r : rects) {
      if (!chain.empty() && (!r.contains(chain.back()) || r == chain.back())) continue;
      chain.push_back(r);
      self(self);
      chain.pop_back();
    }
  };
  extend(extend);
  return out;
}

namespace {

void compositions(int extent, int parts, std::vector<int>& bounds,
                  std::vector<std::vector<int>>& out) {
  if (static_cast<int>(bounds.size()) == parts) {
    bounds.push_back(extent);
    out.push_back(bounds);
    bounds.pop_back();
    return;
  }
  const int remaining = parts - static_cast<int>(bounds.size());
  for (int b = bounds.back() + 1; b <= extent - remaining; ++b) {
    bounds.push_back(b);
    compositions(extent, parts, bounds, out);
    bounds.pop_back();
  }
}

std::vector<std::vector<int>> all_bounds(int extent, int parts) {
  std::vector<std::vector<int>> out;
  std::vector<int> bounds{0};
  if (parts >= 1 && parts <= extent) compositions(extent, parts, bounds, out);
  return out;
}

}  // namespace

std::vector<ModelSpec> enumerate_block_models(ModelFamily family, int blocks, int rows, int cols) {
  if (family != ModelFamily::BlockDiagonalOwn && family != ModelFamily::CommonBlockDiagonal) {
    throw ModelError("enumerate_block_models covers the own and common families");
  }
  std::vector<ModelSpec> out;
  for (const auto& rb : all_bounds(rows, blocks)) {
    for (const auto& cb : all_bounds(cols, blocks)) {
      auto m = family == ModelFamily::BlockDiagonalOwn ? ModelSpec::own_blocks(rb, cb)
                                                       : ModelSpec::common_blocks(rb, cb);
      if (validate(m, rows, cols).empty()) out.push_back(std::move(m));
    }
  }
  return out;
}

bool is_nested(const ModelSpec& inner, const ModelSpec& outer, int rows, int cols) {
  const auto inner_cfg = build_configuration(inner, rows, cols);
  const auto outer_cfg = build_configuration(outer, rows, cols);
  return row_space_contains(outer_cfg, inner_cfg.dense());
}

}  // namespace mfiber
