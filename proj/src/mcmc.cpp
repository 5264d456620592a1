#include "markov_fiber/mcmc.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <stdexcept>
#include <string>
#include <thread>

#include "markov_fiber/log_factorial.hpp"

namespace mfiber {

namespace {

constexpr double kTieTolerance = 1e-12;

#ifdef NDEBUG
constexpr std::int64_t kDefaultCheckEvery = 1000;
#else
constexpr std::int64_t kDefaultCheckEvery = 1;
#endif

void check_config(const ChainConfig& c) {
  if (c.steps <= 0) throw std::invalid_argument("steps must be positive");
  if (c.burn_in < 0) throw std::invalid_argument("burn_in must be nonnegative");
  if (c.burn_in >= c.steps) throw std::invalid_argument("burn_in must be smaller than steps");
  if (c.thin <= 0) throw std::invalid_argument("thin must be positive");
  if (c.check_every < 0) throw std::invalid_argument("check_every must be nonnegative");
}

double evaluate(Statistic& statistic, const Table& x) {
  const double v = statistic(x);
  if (!std::isfinite(v)) {
    throw std::runtime_error("statistic returned a non-finite value (" + std::to_string(v) +
                             ")");
  }
  return v;
}

}  // namespace

double ChainResult::acceptance_rate() const {
  const auto n = accepted + stayed;
  return n == 0 ? 0.0 : static_cast<double>(accepted) / static_cast<double>(n);
}

double estimate_pvalue(std::span<const double> samples, double observed) {
  std::size_t hits = 0;
  for (double s : samples)
    if (s >= observed - kTieTolerance) ++hits;
  return static_cast<double>(hits + 1) / static_cast<double>(samples.size() + 1);
}

double batch_means_se(std::span<const double> samples, double observed) {
  const std::size_t n = samples.size();
  if (n < 4) return 0.0;
  const auto size = static_cast<std::size_t>(std::sqrt(static_cast<double>(n)));
  const std::size_t batches = n / size;
  std::vector<double> means(batches, 0.0);
  for (std::size_t b = 0; b < batches; ++b) {
    std::size_t hits = 0;
    for (std::size_t k = b * size; k < (b + 1) * size; ++k)
      if (samples[k] >= observed - kTieTolerance) ++hits;
    means[b] = static_cast<double>(hits) / static_cast<double>(size);
  }
  double mean = 0.0;
  for (double m : means) mean += m;
  mean /= static_cast<double>(batches);
  double var = 0.0;
  for (double m : means) var += (m - mean) * (m - mean);
  var /= static_cast<double>(batches - 1);
  return std::sqrt(var / static_cast<double>(batches));
}

ChainResult walk(const Table& start, const Configuration& cfg, const MoveBasis& proposal,
                 const ChainConfig& config, Statistic statistic) {
  check_config(config);
  if (start.rows() != cfg.rows() || start.cols() != cfg.cols()) {
    throw std::invalid_argument("start table does not match the configuration");
  }
  if (!statistic) throw std::invalid_argument("walk needs a statistic");
  const std::int64_t check_every = config.check_every ? config.check_every : kDefaultCheckEvery;

  ChainResult result;
  result.seed = config.seed;
  result.observed = evaluate(statistic, start);
  result.samples.reserve(static_cast<std::size_t>((config.steps - config.burn_in) / config.thin));

  const auto t = cfg.apply(start.counts());
  // Cells only move inside the fiber, so no count exceeds the table total.
  const LogFactorialTable lf(start.total());
  Table x = start;
  TableMutator cells(x);
  Rng rng(config.seed);
  std::bernoulli_distribution flip(0.5);
  std::uniform_real_distribution<double> unif(0.0, 1.0);

  double current = result.observed;
  bool dirty = false;
  for (std::int64_t step = 1; step <= config.steps; ++step) {
    const Move z = proposal.random_move(rng);
    const int sign = flip(rng) ? 1 : -1;
    bool feasible = true;
    double log_ratio = 0.0;
    for (const auto& e : z.entries()) {
      const std::int64_t before = cells[e.cell];
      const std::int64_t after = before + sign * e.coeff;
      if (after < 0) {
        feasible = false;
        break;
      }
      log_ratio += lf(before) - lf(after);
    }
    if (feasible && (log_ratio >= 0.0 || unif(rng) < std::exp(log_ratio))) {
      for (const auto& e : z.entries()) cells[e.cell] += sign * e.coeff;
      ++result.accepted;
      dirty = true;
    } else {
      ++result.stayed;
    }

    if (step % check_every == 0 && cfg.apply(x.counts()) != t) {
      throw std::runtime_error("fiber violated at step " + std::to_string(step));
    }
    if (step > config.burn_in && (step - config.burn_in) % config.thin == 0) {
      if (dirty) {
        current = evaluate(statistic, x);
        dirty = false;
      }
      result.samples.push_back(current);
    }
  }

  result.p_value = estimate_pvalue(result.samples, result.observed);
  result.standard_error = batch_means_se(result.samples, result.observed);
  result.final_state = x;
  return result;
}

int max_worker_threads() {
  int n = static_cast<int>(std::thread::hardware_concurrency());
  if (n <= 0) n = 1;
  if (const char* env = std::getenv("MARKOV_FIBER_THREADS")) {
    char* end = nullptr;
    const long cap = std::strtol(env, &end, 10);
    if (end != env && cap > 0) n = std::min<long>(n, cap);
  }
  return n;
}

PooledResult run_chains(const Table& start, const Configuration& cfg,
                        const MoveBasis& proposal, const ChainConfig& config,
                        const Statistic& statistic, int chains) {
  if (chains <= 0) throw std::invalid_argument("chains must be positive");
  check_config(config);

  PooledResult pooled;
  pooled.chains.resize(chains);
  std::atomic<int> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;

  auto worker = [&] {
    for (int c = next++; c < chains; c = next++) {
      try {
        ChainConfig cc = config;
        cc.seed = config.seed + static_cast<std::uint64_t>(c);
        pooled.chains[c] = walk(start, cfg, proposal, cc, statistic);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    }
  };

  const int threads = std::min(chains, max_worker_threads());
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (int k = 0; k < threads; ++k) pool.emplace_back(worker);
  }
  if (failure) std::rethrow_exception(failure);

  double p = 0.0;
  double se2 = 0.0;
  for (const auto& c : pooled.chains) {
    p += c.p_value;
    se2 += c.standard_error * c.standard_error;
  }
  pooled.observed = pooled.chains.front().observed;
  pooled.p_value = p / chains;
  pooled.standard_error = std::sqrt(se2) / chains;
  return pooled;
}

}  // namespace mfiber
