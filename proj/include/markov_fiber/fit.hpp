#pragma once

#include <span>
#include <vector>

#include "markov_fiber/configuration.hpp"
#include "markov_fiber/models.hpp"
#include "markov_fiber/statistic.hpp"

namespace mfiber {

struct FitOptions {
  double tolerance = 1e-10;
  int max_iterations = 10'000;
};

/// Fitted cell means m of a log-linear model.
struct FitResult {
  int rows = 0;
  int cols = 0;
  std::vector<double> expected;
  /// Completed scaling cycles.
  int iterations = 0;
  /// max |A m - t| after the last cycle.
  double max_discrepancy = 0.0;
  bool converged = false;
  /// sum (x log m - m) after each cycle.
  std::vector<double> loglik_trace;

  double operator()(int i, int j) const { return expected[i * cols + j]; }
};

/// Iterative proportional scaling from the uniform table, cycling over the
/// rows of A (row sums, column sums, subtable terms) until every fitted
/// margin matches the observed one within `tolerance`.
FitResult ipf_fit(const Table& table, const ModelSpec& model, const FitOptions& options = {});
FitResult ipf_fit(const Table& table, const Configuration& cfg, const FitOptions& options = {});

/// Pearson statistic. A cell with m = 0 contributes 0 when x = 0 and makes
/// the result +infinity otherwise.
double chi_square(const Table& table, std::span<const double> expected);

/// 2 sum x log(x / m), with 0 log 0 = 0.
double g_square(const Table& table, std::span<const double> expected);

/// 2 sum x log(m_outer / m_inner), with zero cells contributing 0. Throws
/// when x > 0 meets m_outer = 0.
double log_likelihood_ratio(const Table& table, std::span<const double> inner_expected,
                            std::span<const double> outer_expected);

/// Fits both models and returns the nested log-likelihood ratio. Throws
/// when `inner` is not nested in `outer` or a fit fails to converge.
double llr_nested(const Table& table, const ModelSpec& inner, const ModelSpec& outer,
                  const FitOptions& options = {});

/// Upper tail of the chi-square distribution with `df` degrees of freedom.
double chi_square_upper_tail(double statistic, int df);

/// Statistics against the model fit of the evaluated table itself. Fits are
/// memoized by sufficient statistic, so a chain confined to one fiber fits
/// once (the chi-square and G^2 cases) or once per distinct outer
/// statistic (the nested ratio).
Statistic make_chi_square_statistic(const ModelSpec& model, int rows, int cols,
                                    const FitOptions& options = {});
Statistic make_g_square_statistic(const ModelSpec& model, int rows, int cols,
                                  const FitOptions& options = {});
Statistic make_llr_statistic(const ModelSpec& inner, const ModelSpec& outer, int rows,
                             int cols, const FitOptions& options = {});

}  // namespace mfiber
