#include <cmath>

#include "doctest.h"
#include "markov_fiber/datasets.hpp"
#include "markov_fiber/fit.hpp"
#include "oracles.hpp"

using namespace mfiber;

TEST_CASE("independence fit has the closed form") {
  const auto t = Table::from_rows({{3, 1, 4}, {1, 5, 9}});
  const auto f = ipf_fit(t, ModelSpec::independence());
  CHECK(f.converged);
  const auto r = t.row_sums();
  const auto c = t.col_sums();
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 3; ++j)
      CHECK(f(i, j) == doctest::Approx(double(r[i]) * c[j] / t.total()).epsilon(1e-9));
}

TEST_CASE("fitted margins match and the likelihood never decreases") {
  const auto t = datasets::gilby();
  const auto m = datasets::changepoint_gilby();
  const auto cfg = build_configuration(m, 8, 4);
  const auto f = ipf_fit(t, cfg);
  CHECK(f.converged);
  CHECK(f.max_discrepancy <= 1e-10);
  const auto fitted = cfg.apply(std::span<const double>(f.expected));
  const auto target = cfg.apply(t.counts());
  for (std::size_t r = 0; r < fitted.size(); ++r) CHECK(fitted[r] == doctest::Approx(target[r]));
  for (std::size_t k = 1; k < f.loglik_trace.size(); ++k)
    CHECK(f.loglik_trace[k] >= f.loglik_trace[k - 1] - 1e-9);
}

TEST_CASE("Gilby chi-square") {
  const auto t = datasets::gilby();
  const auto m = datasets::changepoint_gilby();
  const auto f = ipf_fit(t, m);
  const double chi2 = chi_square(t, f.expected);
  CHECK(std::abs(chi2 - 154) <= 1.0);
  CHECK(degrees_of_freedom(build_configuration(m, 8, 4)) == 19);
  CHECK(make_chi_square_statistic(m, 8, 4)(t) == doctest::Approx(chi2));
}

TEST_CASE("Victoria likelihood ratio") {
  const auto t = datasets::victoria();
  const double llr = llr_nested(t, datasets::common_blocks(), datasets::own_blocks());
  CHECK(std::abs(llr - 3.07) <= 0.02);
  // Independent check: twice the difference of multinomial log-likelihoods.
  const auto inner = ipf_fit(t, datasets::common_blocks());
  const auto outer = ipf_fit(t, datasets::own_blocks());
  const double oracle_llr = 2.0 * (oracle::multinomial_loglik(t.counts(), outer.expected) -
                                   oracle::multinomial_loglik(t.counts(), inner.expected));
  CHECK(llr == doctest::Approx(oracle_llr).epsilon(1e-9));
  auto stat = make_llr_statistic(datasets::common_blocks(), datasets::own_blocks(), 12, 12);
  CHECK(stat(t) == doctest::Approx(llr));
  CHECK(stat(t) == doctest::Approx(llr));  // memoized path
  CHECK_THROWS_AS(llr_nested(t, datasets::own_blocks(), datasets::common_blocks()), ModelError);
}

TEST_CASE("statistics edge cases") {
  const auto t = Table::from_rows({{2, 0}, {1, 3}});
  const std::vector<double> m{1.0, 0.0, 1.5, 2.5};
  CHECK(chi_square(t, m) == doctest::Approx(1.0 + 0.25 / 1.5 + 0.25 / 2.5));
  CHECK(g_square(t, m) ==
        doctest::Approx(2 * (2 * std::log(2.0) + std::log(1 / 1.5) + 3 * std::log(3 / 2.5))));
  const std::vector<double> bad{1.0, 1.0, 0.0, 2.0};
  CHECK(std::isinf(chi_square(t, bad)));
  CHECK_THROWS(log_likelihood_ratio(t, m, bad));
  CHECK_THROWS(chi_square(t, std::vector<double>{1.0}));
  // Perfect fit.
  const std::vector<double> exact{2, 0, 1, 3};
  CHECK(chi_square(t, exact) == 0.0);
  CHECK(g_square(t, exact) == 0.0);
}

TEST_CASE("zero margins give zero fitted cells") {
  const auto t = Table::from_rows({{0, 0, 0}, {1, 2, 3}, {4, 0, 1}});
  const auto f = ipf_fit(t, ModelSpec::independence());
  CHECK(f.converged);
  for (int j = 0; j < 3; ++j) CHECK(f(0, j) == 0.0);
}

TEST_CASE("chi-square upper tail") {
  CHECK(chi_square_upper_tail(2.0, 2) == doctest::Approx(std::exp(-1.0)));
  CHECK(chi_square_upper_tail(3.841458820694124, 1) == doctest::Approx(0.05).epsilon(1e-9));
  CHECK(chi_square_upper_tail(0.0, 3) == 1.0);
  CHECK_THROWS(chi_square_upper_tail(1.0, 0));
}
