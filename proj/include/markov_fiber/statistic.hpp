#pragma once

#include <functional>

#include "markov_fiber/table.hpp"

namespace mfiber {

/// Test statistic evaluated on a table. Implementations must be pure;
/// they may memoize internally but are copied once per chain.
using Statistic = std::function<double(const Table&)>;

}  // namespace mfiber
