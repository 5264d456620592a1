#include "markov_fiber/datasets.hpp"

namespace mfiber::datasets {

Table gilby() {
  return Table::from_rows({
      {86, 49, 10, 1},
      {102, 116, 24, 3},
      {25, 19, 2, 0},
      {137, 98, 33, 4},
      {209, 222, 73, 16},
      {65, 154, 71, 27},
      {9, 33, 1, 1},
      {3, 60, 51, 21},
  });
}

Table victoria() {
  return Table::from_rows({
      {1, 0, 0, 0, 1, 2, 0, 0, 1, 0, 1, 0},
      {1, 0, 0, 1, 0, 0, 0, 0, 0, 1, 0, 2},
      {1, 0, 0, 0, 2, 1, 0, 0, 0, 0, 0, 1},
      {3, 0, 2, 0, 0, 0, 1, 0, 1, 3, 1, 1},
      {2, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 0},
      {2, 0, 0, 0, 1, 0, 0, 0, 0, 0, 0, 0},
      {2, 0, 2, 1, 0, 0, 0, 0, 1, 1, 1, 2},
      {0, 0, 0, 3, 0, 0, 1, 0, 0, 1, 0, 2},
      {0, 0, 0, 1, 1, 0, 0, 0, 0, 0, 1, 0},
      {1, 1, 0, 2, 0, 0, 1, 0, 0, 1, 1, 0},
      {0, 1, 1, 1, 2, 0, 0, 2, 0, 1, 1, 0},
      {0, 1, 1, 0, 0, 0, 1, 0, 0, 0, 0, 0},
  });
}

ModelSpec changepoint_gilby() {
  return ModelSpec::change_point({Rectangle{0, 2, 0, 0}, Rectangle{0, 4, 0, 1}});
}

// Seasons: Mar-May, Jun-Aug, Sep-Nov, and Dec-Feb wrapping past December.
ModelSpec common_blocks() {
  auto m = ModelSpec::common_blocks({0, 3, 6, 9, 12}, {0, 3, 6, 9, 12});
  m.shift = 2;
  return m;
}

ModelSpec own_blocks() {
  auto m = ModelSpec::own_blocks({0, 3, 6, 9, 12}, {0, 3, 6, 9, 12});
  m.shift = 2;
  return m;
}

std::vector<std::string> table_names() { return {"gilby", "victoria"}; }

std::vector<std::string> model_names() {
  return {"changepoint-gilby", "common-blocks", "own-blocks"};
}

std::optional<Table> table(std::string_view name) {
  if (name == "gilby") return gilby();
  if (name == "victoria") return victoria();
  return std::nullopt;
}

std::optional<ModelSpec> model(std::string_view name) {
  if (name == "changepoint-gilby" || name == "gilby") return changepoint_gilby();
  if (name == "common-blocks" || name == "victoria") return common_blocks();
  if (name == "own-blocks") return own_blocks();
  return std::nullopt;
}

}  // namespace mfiber::datasets
