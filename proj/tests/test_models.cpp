#include <algorithm>

#include "doctest.h"
#include "markov_fiber/datasets.hpp"
#include "markov_fiber/models.hpp"

using namespace mfiber;

namespace {

bool mentions(const std::vector<std::string>& problems, const std::string& needle) {
  return std::any_of(problems.begin(), problems.end(),
                     [&](const std::string& p) { return p.find(needle) != std::string::npos; });
}

}  // namespace

TEST_CASE("change point validation") {
  CHECK(validate(datasets::changepoint_gilby(), 8, 4).empty());
  // S1 must sit inside S2.
  auto crossed = ModelSpec::change_point({Rectangle{0, 2, 0, 2}, Rectangle{0, 4, 0, 1}});
  CHECK(mentions(validate(crossed, 8, 4), "strict inclusion"));
  auto equal = ModelSpec::change_point({Rectangle{0, 2, 0, 1}, Rectangle{0, 2, 0, 1}});
  CHECK(mentions(validate(equal, 8, 4), "strict inclusion"));
  CHECK(mentions(validate(ModelSpec::change_point({Rectangle{0, 7, 0, 3}}), 8, 4), "strict subset"));
  CHECK(mentions(validate(ModelSpec::change_point({Rectangle{1, 1, 2, 2}}), 8, 4), "single cell"));
  CHECK(mentions(validate(ModelSpec::change_point({Rectangle{0, 8, 0, 1}}), 8, 4), "inside the grid"));
  CHECK(!validate(ModelSpec::change_point({}), 8, 4).empty());
  CHECK_THROWS_AS(require_valid(crossed, 8, 4), ModelError);
  CHECK(!validate(ModelSpec::independence(), 1, 4).empty());
}

TEST_CASE("block validation") {
  CHECK(validate(ModelSpec::own_blocks({0, 2, 4}, {0, 1, 4}), 4, 4).empty());
  CHECK(!validate(ModelSpec::own_blocks({0, 2, 3}, {0, 1, 4}), 4, 4).empty());
  CHECK(!validate(ModelSpec::common_blocks({0, 4}, {0, 4}), 4, 4).empty());
  CHECK(!validate(ModelSpec::common_blocks({0, 2, 2, 4}, {0, 1, 2, 4}), 4, 4).empty());
  CHECK(!validate(ModelSpec::common_blocks({1, 2, 4}, {0, 1, 4}), 4, 4).empty());
  // General models may leave rows uncovered but need disjoint groups.
  CHECK(validate(ModelSpec::general_blocks({0, 1, 2, 3}, {0, 1, 2, 3}, {{0, 1}, {2}}), 5, 5).empty());
  auto overlap = ModelSpec::general_blocks({0, 1, 2, 3}, {0, 1, 2, 3}, {{0, 1}, {1}});
  CHECK(mentions(validate(overlap, 5, 5), "disjoint"));
  CHECK(!validate(ModelSpec::general_blocks({0, 1, 2}, {0, 1, 2}, {{0, 5}}), 5, 5).empty());
  CHECK(!validate(ModelSpec::general_blocks({0, 1, 2}, {0, 1, 2}, {}), 5, 5).empty());
  auto shifted = datasets::common_blocks();
  CHECK(validate(shifted, 12, 12).empty());
  shifted.shift = 12;
  CHECK(!validate(shifted, 12, 12).empty());
  auto cp = datasets::changepoint_gilby();
  cp.shift = 1;
  CHECK(!validate(cp, 8, 4).empty());
}

TEST_CASE("cell strata") {
  const auto m = datasets::changepoint_gilby();
  CHECK(cell_stratum(m, 8, 4, 0, 0) == 0);
  CHECK(cell_stratum(m, 8, 4, 2, 0) == 0);
  CHECK(cell_stratum(m, 8, 4, 3, 0) == 1);
  CHECK(cell_stratum(m, 8, 4, 4, 1) == 1);
  CHECK(cell_stratum(m, 8, 4, 5, 0) == 2);
  CHECK(cell_stratum(m, 8, 4, 0, 2) == 2);
  CHECK_THROWS(cell_stratum(m, 8, 4, 8, 0));
  CHECK_THROWS_AS(cell_stratum(ModelSpec::own_blocks({0, 1, 2}, {0, 1, 2}), 2, 2, 0, 0), ModelError);
}

TEST_CASE("cell blocks, including shifted and partial layouts") {
  const auto m = ModelSpec::own_blocks({0, 2, 4}, {0, 1, 4});
  CHECK(cell_block(m, 4, 4, 0, 0) == BlockIndex{0, 0});
  CHECK(cell_block(m, 4, 4, 3, 0) == BlockIndex{1, 0});
  CHECK(cell_block(m, 4, 4, 3, 3)->diagonal());
  CHECK_THROWS(cell_block(ModelSpec::independence(), 4, 4, 0, 0));

  const auto g = ModelSpec::general_blocks({0, 1, 2}, {0, 1, 2}, {{0}});
  CHECK(cell_block(g, 4, 4, 1, 1) == BlockIndex{1, 1});
  CHECK_FALSE(cell_block(g, 4, 4, 3, 0).has_value());

  // Seasons: March is the first row of block 0, January and February close
  // the last block.
  const auto v = datasets::common_blocks();
  CHECK(cell_block(v, 12, 12, 2, 2) == BlockIndex{0, 0});
  CHECK(cell_block(v, 12, 12, 0, 11) == BlockIndex{3, 3});
  CHECK(cell_block(v, 12, 12, 1, 4) == BlockIndex{3, 0});
  CHECK(block_membership({0, 3, 6, 9, 12}, 12, 2) ==
        std::vector<int>{3, 3, 0, 0, 0, 1, 1, 1, 2, 2, 2, 3});
}

TEST_CASE("subtable terms") {
  const auto own = subtable_terms(ModelSpec::own_blocks({0, 1, 3}, {0, 2, 3}), 3, 3);
  REQUIRE(own.size() == 2);
  CHECK(own[0].cells() == std::vector<int>{0, 1});
  CHECK(own[1].cells() == std::vector<int>{5, 8});
  const auto common = subtable_terms(ModelSpec::common_blocks({0, 1, 3}, {0, 2, 3}), 3, 3);
  REQUIRE(common.size() == 1);
  CHECK(common[0].size() == 4);
  const auto general =
      subtable_terms(ModelSpec::general_blocks({0, 1, 2, 3}, {0, 1, 2, 3}, {{0, 2}, {1}}), 3, 3);
  REQUIRE(general.size() == 2);
  CHECK(general[0].cells() == std::vector<int>{0, 8});
  CHECK(general[1].cells() == std::vector<int>{4});
}

TEST_CASE("nesting") {
  const auto common = datasets::common_blocks();
  const auto own = datasets::own_blocks();
  CHECK(is_nested(common, own, 12, 12));
  CHECK_FALSE(is_nested(own, common, 12, 12));
  CHECK(is_nested(ModelSpec::independence(), common, 12, 12));
  const auto s1 = ModelSpec::change_point({Rectangle{0, 2, 0, 0}});
  CHECK(is_nested(s1, datasets::changepoint_gilby(), 8, 4));
  // A general model with one group per block is the own model.
  const auto general = ModelSpec::general_blocks({0, 2, 4}, {0, 2, 4}, {{0}, {1}});
  CHECK(is_nested(general, ModelSpec::own_blocks({0, 2, 4}, {0, 2, 4}), 4, 4));
  CHECK(is_nested(ModelSpec::own_blocks({0, 2, 4}, {0, 2, 4}), general, 4, 4));
}

TEST_CASE("transposition and names") {
  const auto m = datasets::changepoint_gilby().transposed();
  CHECK(m.rectangles[0] == Rectangle{0, 0, 0, 2});
  CHECK(validate(m, 4, 8).empty());
  for (auto f : {ModelFamily::Independence, ModelFamily::ChangePoint, ModelFamily::BlockDiagonalOwn,
                 ModelFamily::CommonBlockDiagonal, ModelFamily::GeneralBlockDiagonal})
    CHECK(parse_family(to_string(f)) == f);
  CHECK_THROWS_AS(parse_family("nope"), ModelError);
  CHECK(datasets::own_blocks().term_count() == 4);
  CHECK(datasets::common_blocks().term_count() == 1);
}

TEST_CASE("model enumerators") {
  // 2x2: one rectangle per row pair or column pair: 4 single rows/cols.
  CHECK(enumerate_change_point_models(2, 2, 2).size() == 4);
  for (const auto& m : enumerate_change_point_models(3, 4, 2)) CHECK(validate(m, 3, 4).empty());
  // Compositions of 5 into 3 parts: C(4,2) = 6 per axis.
  CHECK(enumerate_block_models(ModelFamily::CommonBlockDiagonal, 3, 5, 5).size() == 36);
  CHECK(enumerate_block_models(ModelFamily::BlockDiagonalOwn, 2, 2, 3).size() == 2);
  CHECK_THROWS(enumerate_block_models(ModelFamily::ChangePoint, 2, 3, 3));
}
