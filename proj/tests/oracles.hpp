#pragma once

// Slow, obviously-correct reference implementations used by the tests.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <span>
#include <vector>

#include "markov_fiber/configuration.hpp"
#include "markov_fiber/moves.hpp"

namespace oracle {

using Vec = std::vector<std::int64_t>;

/// Calls f on every nonnegative vector of length `cells` with entry sum n.
inline void for_each_table(int cells, int n, const std::function<void(const Vec&)>& f) {
  Vec x(cells, 0);
  std::function<void(int, int)> rec = [&](int c, int left) {
    if (c == cells - 1) {
      x[c] = left;
      f(x);
      return;
    }
    for (int v = 0; v <= left; ++v) {
      x[c] = v;
      rec(c + 1, left - v);
    }
    x[c] = 0;
  };
  rec(0, n);
}

/// Fiber of t by filtering every table with the same total.
inline std::vector<Vec> fiber(const mfiber::Configuration& cfg, const mfiber::SufficientStat& t) {
  std::int64_t n = 0;
  for (int j = 0; j < cfg.rows(); ++j) n += t[j];
  std::vector<Vec> out;
  for_each_table(cfg.cell_count(), static_cast<int>(n), [&](const Vec& x) {
    if (cfg.apply(x) == t) out.push_back(x);
  });
  return out;
}

/// Connectivity of a fiber under +/- moves by breadth-first search.
inline bool connected(const std::vector<Vec>& members, std::span<const mfiber::Move> moves) {
  if (members.size() <= 1) return true;
  std::map<Vec, int> index;
  for (std::size_t k = 0; k < members.size(); ++k) index[members[k]] = static_cast<int>(k);
  std::vector<char> seen(members.size(), 0);
  std::vector<int> stack{0};
  seen[0] = 1;
  std::size_t reached = 1;
  while (!stack.empty()) {
    const Vec x = members[stack.back()];
    stack.pop_back();
    for (const auto& z : moves) {
      for (int s : {1, -1}) {
        Vec y = x;
        bool ok = true;
        for (const auto& e : z.entries()) {
          y[e.cell] += s * e.coeff;
          if (y[e.cell] < 0) ok = false;
        }
        if (!ok) continue;
        auto it = index.find(y);
        if (it != index.end() && !seen[it->second]) {
          seen[it->second] = 1;
          ++reached;
          stack.push_back(it->second);
        }
      }
    }
  }
  return reached == members.size();
}

/// Every degree-2 move in ker A, canonical orientation, by brute force.
inline std::vector<mfiber::Move> degree2_kernel(const mfiber::Configuration& cfg) {
  const int cells = cfg.cell_count();
  std::vector<mfiber::Move> out;
  for (int a = 0; a < cells; ++a)
    for (int b = a; b < cells; ++b)
      for (int c = 0; c < cells; ++c)
        for (int d = c; d < cells; ++d) {
          if (a == c || a == d || b == c || b == d) continue;
          Vec z(cells, 0);
          ++z[a];
          ++z[b];
          --z[c];
          --z[d];
          bool zero = true;
          for (auto v : cfg.apply(z)) zero = zero && v == 0;
          if (zero) out.push_back(mfiber::Move::from_dense(z, mfiber::MoveType::I).canonical());
        }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

/// Rank by floating-point elimination with partial pivoting; fine for the
/// small 0-1 matrices used here.
inline int float_rank(std::vector<std::vector<double>> m) {
  if (m.empty()) return 0;
  const std::size_t cols = m.front().size();
  int rank = 0;
  for (std::size_t c = 0; c < cols && rank < static_cast<int>(m.size()); ++c) {
    std::size_t best = rank;
    for (std::size_t r = rank; r < m.size(); ++r)
      if (std::abs(m[r][c]) > std::abs(m[best][c])) best = r;
    if (std::abs(m[best][c]) < 1e-9) continue;
    std::swap(m[best], m[rank]);
    for (std::size_t r = 0; r < m.size(); ++r) {
      if (r == static_cast<std::size_t>(rank)) continue;
      const double f = m[r][c] / m[rank][c];
      for (std::size_t k = c; k < cols; ++k) m[r][k] -= f * m[rank][k];
    }
    ++rank;
  }
  return rank;
}

/// Multinomial log-likelihood sum x log(m / n) up to a constant.
inline double multinomial_loglik(std::span<const std::int64_t> x, std::span<const double> m) {
  double n = 0.0;
  for (auto v : x) n += static_cast<double>(v);
  double s = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k)
    if (x[k] > 0) s += static_cast<double>(x[k]) * std::log(m[k] / n);
  return s;
}

}  // namespace oracle
