#include <boost/crc.hpp>
#include <sstream>

#include "doctest.h"
#include "markov_fiber/datasets.hpp"
#include "markov_fiber/io.hpp"

using namespace mfiber;

namespace {

std::uint32_t crc32(const std::string& s) {
  boost::crc_32_type crc;
  crc.process_bytes(s.data(), s.size());
  return crc.checksum();
}

Table parse(const std::string& text, bool header = false) {
  std::istringstream in(text);
  return read_table_csv(in, header);
}

}  // namespace

TEST_CASE("embedded datasets") {
  const auto g = datasets::gilby();
  const auto v = datasets::victoria();
  CHECK(g.rows() == 8);
  CHECK(g.cols() == 4);
  CHECK(g.total() == 1725);
  CHECK(v.total() == 82);
  CHECK(v(4, 0) == 2);  // born in May, died in January
  const auto csv = table_to_csv(g);
  CHECK(csv.substr(0, csv.find('\n')) == "86,49,10,1");
  CHECK(crc32(csv) == 2023233629u);
  CHECK(crc32(table_to_csv(v)) == 3575824441u);
  CHECK(datasets::table("nope") == std::nullopt);
  for (const auto& name : datasets::model_names()) CHECK(datasets::model(name).has_value());
  for (const auto& name : datasets::table_names()) CHECK(datasets::table(name).has_value());
}

TEST_CASE("CSV round trip and header handling") {
  const auto v = datasets::victoria();
  CHECK(parse(table_to_csv(v)) == v);
  const auto t = parse(",a,b\nx,1,2\ny, 3 ,4\r\n\n", true);
  CHECK(t == Table::from_rows({{1, 2}, {3, 4}}));
  CHECK(parse("1,2\n3,4\n") == Table::from_rows({{1, 2}, {3, 4}}));
}

TEST_CASE("CSV errors") {
  CHECK_THROWS_AS(parse(""), ParseError);
  CHECK_THROWS_AS(parse("1,2\n3\n"), ParseError);
  CHECK_THROWS_AS(parse("1,x\n3,4\n"), ParseError);
  CHECK_THROWS_AS(parse("1,-2\n3,4\n"), ParseError);
  CHECK_THROWS_AS(parse("1,2,\n3,4,\n"), ParseError);
  CHECK_THROWS_AS(parse("1,2,3\n"), ParseError);  // a 1 x C table
  CHECK_THROWS_AS(read_table_file("/nonexistent/table.csv"), ParseError);
}

TEST_CASE("model files are one-based") {
  const auto m = parse_model_json(
      R"({"family":"change_point","rectangles":[[1,3,1,1],[1,5,1,2]]})");
  CHECK(m == datasets::changepoint_gilby());
  const auto b = parse_model_json(
      R"({"family":"common_block_diagonal","row_bounds":[1,4,7,10,13],"col_bounds":[1,4,7,10,13],"shift":2})");
  CHECK(b == datasets::common_blocks());
  const auto g = parse_model_json(
      R"({"family":"general_block_diagonal","row_bounds":[1,2,3],"col_bounds":[1,2,3],"groups":[[1],[2]]})");
  CHECK(g.groups == std::vector<std::vector<int>>{{0}, {1}});
  for (const auto& name : datasets::model_names()) {
    const auto m = *datasets::model(name);
    CHECK(parse_model_json(model_to_json(m)) == m);
  }
  CHECK(parse_model_json(model_to_json(g)) == g);
  CHECK(parse_model_json(R"({"family":"independence"})") == ModelSpec::independence());
}

TEST_CASE("model file errors") {
  CHECK_THROWS_AS(parse_model_json("{"), ParseError);
  CHECK_THROWS_AS(parse_model_json("[]"), ParseError);
  CHECK_THROWS_AS(parse_model_json(R"({"rectangles":[]})"), ParseError);
  CHECK_THROWS_AS(parse_model_json(R"({"family":"change_point","rectangles":[[1,2,3]]})"), ParseError);
  CHECK_THROWS_AS(parse_model_json(R"({"family":"change_point","rectangles":"x"})"), ParseError);
  CHECK_THROWS_AS(parse_model_json(R"({"family":"bogus"})"), ModelError);
}

TEST_CASE("moves dump format") {
  std::ostringstream out;
  const std::vector<Move> moves{Move::basic(3, {0, 0}, {1, 2})};
  write_moves(out, moves, 3);
  CHECK(out.str() == "2 I  1,1:+1 1,3:-1 2,1:-1 2,3:+1\n");
}
