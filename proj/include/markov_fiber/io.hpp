#pragma once

#include <iosfwd>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>

#include "markov_fiber/models.hpp"
#include "markov_fiber/moves.hpp"
#include "markov_fiber/table.hpp"

namespace mfiber {

class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Comma-separated nonnegative integers, one table row per line. With
/// `header` the first line and the first field of every row are labels.
/// Blank lines are skipped.
Table read_table_csv(std::istream& in, bool header = false);
Table read_table_file(const std::string& path, bool header = false);
void write_table_csv(std::ostream& out, const Table& table);
std::string table_to_csv(const Table& table);

/// Model file (see docs/model-json.md). Coordinates in the file are
/// one-based and inclusive; the returned model is zero-based.
ModelSpec parse_model_json(std::string_view text);
ModelSpec read_model_file(const std::string& path);
std::string model_to_json(const ModelSpec& model);

/// `deg type  i,j:+c i,j:-c ...` with one-based cells, one move per line.
void write_moves(std::ostream& out, std::span<const Move> moves, int cols);

}  // namespace mfiber
