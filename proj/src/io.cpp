#include "markov_fiber/io.hpp"

#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "json.hpp"

namespace mfiber {

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::int64_t parse_count(const std::string& field, int line) {
  std::int64_t v = 0;
  const auto* end = field.data() + field.size();
  auto [ptr, ec] = std::from_chars(field.data(), end, v);
  if (field.empty() || ec != std::errc() || ptr != end) {
    throw ParseError("line " + std::to_string(line) + ": '" + field + "' is not an integer");
  }
  if (v < 0) throw ParseError("line " + std::to_string(line) + ": negative count " + field);
  return v;
}

}  // namespace

Table read_table_csv(std::istream& in, bool header) {
  std::vector<std::vector<std::int64_t>> rows;
  std::string line;
  int lineno = 0;
  bool skipped_header = !header;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    if (!skipped_header) {
      skipped_header = true;
      continue;
    }
    std::vector<std::int64_t> row;
    std::stringstream ss(line);
    std::string field;
    bool first = true;
    while (std::getline(ss, field, ',')) {
      if (header && first) {
        first = false;
        continue;
      }
      first = false;
      row.push_back(parse_count(trim(field), lineno));
    }
    if (!line.empty() && line.back() == ',') {
      throw ParseError("line " + std::to_string(lineno) + ": trailing comma");
    }
    if (!rows.empty() && row.size() != rows.front().size()) {
      throw ParseError("line " + std::to_string(lineno) + ": expected " +
                       std::to_string(rows.front().size()) + " fields, found " +
                       std::to_string(row.size()));
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw ParseError("table has no rows");
  try {
    return Table::from_rows(rows);
  } catch (const std::invalid_argument& e) {
    throw ParseError(e.what());
  }
}

Table read_table_file(const std::string& path, bool header) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path);
  return read_table_csv(in, header);
}

void write_table_csv(std::ostream& out, const Table& table) {
  for (int i = 0; i < table.rows(); ++i) {
    for (int j = 0; j < table.cols(); ++j) {
      if (j) out << ',';
      out << table(i, j);
    }
    out << '\n';
  }
}

std::string table_to_csv(const Table& table) {
  std::ostringstream os;
  write_table_csv(os, table);
  return os.str();
}

namespace {

using nlohmann::json;

std::vector<int> shift_down(const std::vector<int>& v) {
  std::vector<int> out;
  for (int x : v) out.push_back(x - 1);
  return out;
}

std::vector<int> shift_up(const std::vector<int>& v) {
  std::vector<int> out;
  for (int x : v) out.push_back(x + 1);
  return out;
}

}  // namespace

ModelSpec parse_model_json(std::string_view text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("model file is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw ParseError("model file must hold a JSON object");
  if (!j.contains("family")) throw ParseError("model file lacks 'family'");

  try {
    ModelSpec m;
    m.family = parse_family(j.at("family").get<std::string>());
    if (j.contains("rectangles")) {
      for (const auto& r : j.at("rectangles")) {
        const auto v = r.get<std::vector<int>>();
        if (v.size() != 4) throw ParseError("a rectangle is [a1,a2,b1,b2]");
        m.rectangles.push_back(Rectangle{v[0] - 1, v[1] - 1, v[2] - 1, v[3] - 1});
      }
    }
    if (j.contains("row_bounds")) m.row_bounds = shift_down(j.at("row_bounds").get<std::vector<int>>());
    if (j.contains("col_bounds")) m.col_bounds = shift_down(j.at("col_bounds").get<std::vector<int>>());
    if (j.contains("shift")) m.shift = j.at("shift").get<int>();
    if (j.contains("groups")) {
      for (const auto& g : j.at("groups")) m.groups.push_back(shift_down(g.get<std::vector<int>>()));
    }
    return m;
  } catch (const json::exception& e) {
    throw ParseError(std::string("malformed model file: ") + e.what());
  }
}

ModelSpec read_model_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_model_json(ss.str());
}

std::string model_to_json(const ModelSpec& model) {
  json j;
  j["family"] = std::string(to_string(model.family));
  if (model.family == ModelFamily::ChangePoint) {
    json rects = json::array();
    for (const auto& r : model.rectangles)
      rects.push_back({r.first_row + 1, r.last_row + 1, r.first_col + 1, r.last_col + 1});
    j["rectangles"] = rects;
  }
  if (model.is_block_family()) {
    j["row_bounds"] = shift_up(model.row_bounds);
    j["col_bounds"] = shift_up(model.col_bounds);
    if (model.shift) j["shift"] = model.shift;
  }
  if (model.family == ModelFamily::GeneralBlockDiagonal) {
    json groups = json::array();
    for (const auto& g : model.groups) groups.push_back(shift_up(g));
    j["groups"] = groups;
  }
  return j.dump();
}

void write_moves(std::ostream& out, std::span<const Move> moves, int cols) {
  for (const auto& z : moves) {
    out << z.degree() << ' ' << to_string(z.type()) << ' ';
    for (const auto& e : z.entries()) {
      out << ' ' << e.cell / cols + 1 << ',' << e.cell % cols + 1 << ':'
          << (e.coeff > 0 ? "+" : "") << e.coeff;
    }
    out << '\n';
  }
}

}  // namespace mfiber
