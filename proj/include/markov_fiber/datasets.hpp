#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "markov_fiber/models.hpp"
#include "markov_fiber/table.hpp"

namespace mfiber::datasets {

/// School (rows, ascending wealth) by clothing (columns, ascending
/// neatness) for 1725 children; 8 x 4.
Table gilby();
/// Birth month (rows) by death month (columns) for 82 descendants of
/// Queen Victoria; 12 x 12.
Table victoria();

/// Change point model for gilby: S1 = rows 1-3 x col 1, S2 = rows 1-5 x
/// cols 1-2.
ModelSpec changepoint_gilby();
/// Quarter-year diagonal blocks (bounds 1,4,7,10,13) on the 12 x 12 grid,
/// shifted by two months so the blocks are the seasons starting in March.
ModelSpec common_blocks();
ModelSpec own_blocks();

/// Names accepted by `table` and `model`.
std::vector<std::string> table_names();
std::vector<std::string> model_names();
std::optional<Table> table(std::string_view name);
std::optional<ModelSpec> model(std::string_view name);

}  // namespace mfiber::datasets
