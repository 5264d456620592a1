#include <cmath>
#include <cstdlib>
#include <limits>

#include "doctest.h"
#include "markov_fiber/fiber.hpp"
#include "markov_fiber/fit.hpp"
#include "markov_fiber/mcmc.hpp"

using namespace mfiber;

TEST_CASE("add-one p-value estimator") {
  const std::vector<double> s{1.0, 2.0, 3.0};
  CHECK(estimate_pvalue(s, 10.0) == doctest::Approx(0.25));
  CHECK(estimate_pvalue(s, 1.0) == doctest::Approx(1.0));
  CHECK(estimate_pvalue(s, 2.0 + 5e-13) == doctest::Approx(0.75));
  CHECK(estimate_pvalue(std::vector<double>{}, 0.0) == 1.0);
}

TEST_CASE("batch means on independent indicators") {
  Rng rng(5);
  std::bernoulli_distribution b(0.3);
  std::vector<double> s(40'000);
  for (auto& v : s) v = b(rng) ? 1.0 : 0.0;
  const double se = batch_means_se(s, 0.5);
  CHECK(se == doctest::Approx(std::sqrt(0.3 * 0.7 / s.size())).epsilon(0.25));
}

TEST_CASE("2x2 walk visits both tables equally") {
  const auto m = ModelSpec::independence();
  const auto cfg = build_configuration(m, 2, 2);
  const auto basis = markov_basis(m, 2, 2);
  ChainConfig c;
  c.steps = 200'000;
  c.burn_in = 1000;
  c.seed = 3;
  const auto r = walk(Table::from_rows({{1, 0}, {0, 1}}), cfg, basis, c,
                      [](const Table& x) { return static_cast<double>(x(0, 0)); });
  double mean = 0.0;
  for (double v : r.samples) mean += v;
  mean /= r.samples.size();
  // Batch-means error of the occupancy indicator.
  const double se = batch_means_se(r.samples, 0.5);
  CHECK(std::abs(mean - 0.5) <= 3 * se + 1e-3);
  CHECK(r.accepted + r.stayed == c.steps);
}

TEST_CASE("stream length, reproducibility and fiber preservation") {
  const auto m = ModelSpec::change_point({Rectangle{0, 1, 0, 1}});
  const auto cfg = build_configuration(m, 3, 4);
  const auto basis = markov_basis(m, 3, 4);
  const auto start = Table::from_rows({{2, 1, 0, 3}, {0, 1, 2, 1}, {1, 1, 1, 0}});
  ChainConfig c;
  c.steps = 1000;
  c.burn_in = 100;
  c.thin = 7;
  c.seed = 42;
  c.check_every = 1;
  const auto stat = make_chi_square_statistic(m, 3, 4);
  const auto a = walk(start, cfg, basis, c, stat);
  const auto b = walk(start, cfg, basis, c, stat);
  CHECK(a.samples.size() == (1000 - 100) / 7);
  CHECK(a.samples == b.samples);
  CHECK(a.seed == 42);
  CHECK(cfg.apply(a.final_state.counts()) == cfg.apply(start.counts()));
  c.seed = 43;
  CHECK(walk(start, cfg, basis, c, stat).samples != a.samples);
}

TEST_CASE("invalid chain settings") {
  const auto m = ModelSpec::independence();
  const auto cfg = build_configuration(m, 2, 2);
  const auto basis = markov_basis(m, 2, 2);
  const auto start = Table::from_rows({{1, 2}, {3, 4}});
  auto stat = [](const Table&) { return 0.0; };
  ChainConfig c;
  c.steps = 10;
  c.burn_in = 10;
  CHECK_THROWS_AS(walk(start, cfg, basis, c, stat), std::invalid_argument);
  c.burn_in = 0;
  c.thin = 0;
  CHECK_THROWS_AS(walk(start, cfg, basis, c, stat), std::invalid_argument);
  c.thin = 1;
  CHECK_THROWS_AS(walk(start, cfg, basis, c,
                       [](const Table&) { return std::numeric_limits<double>::quiet_NaN(); }),
                  std::runtime_error);
  CHECK_THROWS_AS(walk(Table(3, 3), cfg, basis, c, stat), std::invalid_argument);
  CHECK_THROWS_AS(run_chains(start, cfg, basis, c, stat, 0), std::invalid_argument);
}

TEST_CASE("3x3 total-4 MCMC p-value matches the exact p-value") {
  const auto m = ModelSpec::independence();
  const auto cfg = build_configuration(m, 3, 3);
  const auto basis = markov_basis(m, 3, 3);
  const auto start = Table::from_rows({{2, 0, 0}, {0, 1, 0}, {0, 0, 1}});
  const auto stat = make_chi_square_statistic(m, 3, 3);
  const double exact = *exact_pvalue(start, cfg, stat);
  ChainConfig c;
  c.steps = 300'000;
  c.burn_in = 10'000;
  c.seed = 9;
  const auto r = walk(start, cfg, basis, c, stat);
  CHECK(std::abs(r.p_value - exact) <= 3 * r.standard_error);
  CHECK(r.standard_error > 0.0);
}

TEST_CASE("pooled chains") {
  const auto m = ModelSpec::independence();
  const auto cfg = build_configuration(m, 3, 3);
  const auto basis = markov_basis(m, 3, 3);
  const auto start = Table::from_rows({{2, 0, 1}, {0, 1, 0}, {1, 0, 1}});
  const auto stat = make_chi_square_statistic(m, 3, 3);
  ChainConfig c;
  c.steps = 20'000;
  c.burn_in = 1000;
  c.seed = 100;
  setenv("MARKOV_FIBER_THREADS", "1", 1);
  CHECK(max_worker_threads() == 1);
  const auto serial = run_chains(start, cfg, basis, c, stat, 3);
  setenv("MARKOV_FIBER_THREADS", "3", 1);
  const auto parallel = run_chains(start, cfg, basis, c, stat, 3);
  unsetenv("MARKOV_FIBER_THREADS");
  REQUIRE(serial.chains.size() == 3);
  double mean = 0.0, se2 = 0.0;
  for (int k = 0; k < 3; ++k) {
    CHECK(serial.chains[k].seed == 100u + k);
    CHECK(serial.chains[k].samples == parallel.chains[k].samples);
    mean += serial.chains[k].p_value / 3;
    se2 += serial.chains[k].standard_error * serial.chains[k].standard_error;
  }
  CHECK(serial.p_value == doctest::Approx(mean));
  CHECK(serial.standard_error == doctest::Approx(std::sqrt(se2) / 3));
  CHECK(serial.chains[0].samples != serial.chains[1].samples);
}
