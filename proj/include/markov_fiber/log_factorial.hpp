#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

namespace mfiber {

inline double log_factorial(std::int64_t n) {
  return std::lgamma(static_cast<double>(n) + 1.0);
}

/// log n! tabulated up to `max_n`, falling back to lgamma beyond it.
class LogFactorialTable {
 public:
  explicit LogFactorialTable(std::int64_t max_n) : table_(static_cast<std::size_t>(max_n) + 1) {
    table_[0] = 0.0;
    for (std::size_t k = 1; k < table_.size(); ++k)
      table_[k] = table_[k - 1] + std::log(static_cast<double>(k));
  }

  double operator()(std::int64_t n) const {
    return n < static_cast<std::int64_t>(table_.size()) ? table_[n] : log_factorial(n);
  }

 private:
  std::vector<double> table_;
};

}  // namespace mfiber
