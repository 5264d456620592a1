#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "markov_fiber/configuration.hpp"
#include "markov_fiber/moves.hpp"
#include "markov_fiber/statistic.hpp"
#include "markov_fiber/table.hpp"

namespace mfiber {

struct ChainConfig {
  std::int64_t steps = 100'000;
  std::int64_t burn_in = 10'000;
  std::int64_t thin = 1;
  std::uint64_t seed = 1;
  /// Steps between fiber-preservation checks; 0 picks 1 in debug builds
  /// and 1000 otherwise.
  std::int64_t check_every = 0;
};

struct ChainResult {
  /// Statistic after each retained step (post burn-in, thinned).
  std::vector<double> samples;
  std::int64_t accepted = 0;
  /// Steps where x + s z left the orthant or the move was rejected.
  std::int64_t stayed = 0;
  double observed = 0.0;
  double p_value = 1.0;
  double standard_error = 0.0;
  std::uint64_t seed = 0;
  Table final_state{2, 2};

  double acceptance_rate() const;
};

/// Metropolis walk on the fiber of `start` with target proportional to
/// 1 / prod x_ij!. Each step draws z from `proposal` and a fair sign; a
/// proposal leaving the nonnegative orthant is a stay. Throws
/// std::invalid_argument for a bad config and std::runtime_error when the
/// statistic is not finite or the fiber check fails.
ChainResult walk(const Table& start, const Configuration& cfg, const MoveBasis& proposal,
                 const ChainConfig& config, Statistic statistic);

/// (#{s >= observed - 1e-12} + 1) / (n + 1).
double estimate_pvalue(std::span<const double> samples, double observed);

/// Batch-means standard error of the exceedance indicator stream, with
/// about sqrt(n) batches.
double batch_means_se(std::span<const double> samples, double observed);

struct PooledResult {
  std::vector<ChainResult> chains;
  double observed = 0.0;
  /// Mean of the per-chain estimates.
  double p_value = 1.0;
  /// sqrt(sum se_c^2) / k.
  double standard_error = 0.0;
};

/// Independent chains with seeds config.seed + c, c = 0..chains-1, run on
/// at most `max_worker_threads()` threads. Each chain gets its own copy of
/// the statistic.
PooledResult run_chains(const Table& start, const Configuration& cfg,
                        const MoveBasis& proposal, const ChainConfig& config,
                        const Statistic& statistic, int chains);

/// Hardware concurrency, capped by MARKOV_FIBER_THREADS when set.
int max_worker_threads();

}  // namespace mfiber
