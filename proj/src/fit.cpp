#include "markov_fiber/fit.hpp"

#include <algorithm>
#include <boost/math/special_functions/gamma.hpp>
#include <cmath>
#include <limits>
#include <map>
#include <stdexcept>

namespace mfiber {

namespace {

// Poisson log-likelihood up to a constant; each scaling step maximizes it
// along one constraint, so it never decreases across cycles.
double poisson_loglik(const Table& table, std::span<const double> m) {
  double s = 0.0;
  for (int c = 0; c < table.cell_count(); ++c) {
    s -= m[c];
    if (table[c] == 0) continue;
    if (m[c] <= 0.0) return -std::numeric_limits<double>::infinity();
    s += static_cast<double>(table[c]) * std::log(m[c]);
  }
  return s;
}

void check_size(const Table& table, std::span<const double> expected) {
  if (static_cast<int>(expected.size()) != table.cell_count()) {
    throw std::invalid_argument("expected table has the wrong number of cells");
  }
}

}  // namespace

FitResult ipf_fit(const Table& table, const Configuration& cfg, const FitOptions& options) {
  if (table.rows() != cfg.rows() || table.cols() != cfg.cols()) {
    throw std::invalid_argument("table dimensions do not match configuration");
  }
  const auto t = cfg.apply(table.counts());
  const int cells = table.cell_count();

  FitResult fit;
  fit.rows = table.rows();
  fit.cols = table.cols();
  fit.expected.assign(cells, static_cast<double>(table.total()) / cells);

  auto discrepancy = [&] {
    const auto fitted = cfg.apply(std::span<const double>(fit.expected));
    double d = 0.0;
    for (int r = 0; r < cfg.constraint_count(); ++r)
      d = std::max(d, std::abs(fitted[r] - static_cast<double>(t[r])));
    return d;
  };

  fit.max_discrepancy = discrepancy();
  if (fit.max_discrepancy <= options.tolerance) {
    fit.converged = true;
    fit.loglik_trace.push_back(poisson_loglik(table, fit.expected));
    return fit;
  }

  while (fit.iterations < options.max_iterations) {
    for (int r = 0; r < cfg.constraint_count(); ++r) {
      const auto support = cfg.support(r);
      double current = 0.0;
      for (int c : support) current += fit.expected[c];
      if (t[r] == 0) {
        for (int c : support) fit.expected[c] = 0.0;
      } else if (current > 0.0) {
        const double factor = static_cast<double>(t[r]) / current;
        for (int c : support) fit.expected[c] *= factor;
      }
    }
    ++fit.iterations;
    fit.loglik_trace.push_back(poisson_loglik(table, fit.expected));
    fit.max_discrepancy = discrepancy();
    if (fit.max_discrepancy <= options.tolerance) {
      fit.converged = true;
      break;
    }
  }
  return fit;
}

FitResult ipf_fit(const Table& table, const ModelSpec& model, const FitOptions& options) {
  return ipf_fit(table, build_configuration(model, table.rows(), table.cols()), options);
}

double chi_square(const Table& table, std::span<const double> expected) {
  check_size(table, expected);
  double s = 0.0;
  for (int c = 0; c < table.cell_count(); ++c) {
    const double x = static_cast<double>(table[c]);
    const double m = expected[c];
    if (m <= 0.0) {
      if (x > 0.0) return std::numeric_limits<double>::infinity();
      continue;
    }
    s += (x - m) * (x - m) / m;
  }
  return s;
}

double g_square(const Table& table, std::span<const double> expected) {
  check_size(table, expected);
  double s = 0.0;
  for (int c = 0; c < table.cell_count(); ++c) {
    const double x = static_cast<double>(table[c]);
    if (x == 0.0) continue;
    if (expected[c] <= 0.0) return std::numeric_limits<double>::infinity();
    s += x * std::log(x / expected[c]);
  }
  return 2.0 * s;
}

double log_likelihood_ratio(const Table& table, std::span<const double> inner_expected,
                            std::span<const double> outer_expected) {
  check_size(table, inner_expected);
  check_size(table, outer_expected);
  double s = 0.0;
  for (int c = 0; c < table.cell_count(); ++c) {
    if (table[c] == 0) continue;
    if (outer_expected[c] <= 0.0) {
      throw std::domain_error("positive cell has zero fitted mean under the outer model");
    }
    if (inner_expected[c] <= 0.0) {
      throw std::domain_error("positive cell has zero fitted mean under the inner model");
    }
    s += static_cast<double>(table[c]) * std::log(outer_expected[c] / inner_expected[c]);
  }
  return 2.0 * s;
}

double llr_nested(const Table& table, const ModelSpec& inner, const ModelSpec& outer,
                  const FitOptions& options) {
  if (!is_nested(inner, outer, table.rows(), table.cols())) {
    throw ModelError("llr_nested: inner model is not nested in the outer model");
  }
  const auto inner_fit = ipf_fit(table, inner, options);
  const auto outer_fit = ipf_fit(table, outer, options);
  if (!inner_fit.converged || !outer_fit.converged) {
    throw std::runtime_error("llr_nested: model fit did not converge");
  }
  return log_likelihood_ratio(table, inner_fit.expected, outer_fit.expected);
}

double chi_square_upper_tail(double statistic, int df) {
  if (df <= 0) throw std::invalid_argument("chi-square tail needs positive degrees of freedom");
  if (!(statistic > 0.0)) return 1.0;
  if (std::isinf(statistic)) return 0.0;
  return boost::math::gamma_q(0.5 * df, 0.5 * statistic);
}

namespace {

/// Fitted means memoized by the sufficient statistic of the fitted table.
class FitCache {
 public:
  FitCache(const ModelSpec& model, int rows, int cols, const FitOptions& options)
      : cfg_(build_configuration(model, rows, cols)), options_(options) {}

  const std::vector<double>& expected(const Table& table) {
    auto key = cfg_.apply(table.counts());
    auto it = cache_.find(key);
    if (it == cache_.end()) {
      it = cache_.emplace(std::move(key), ipf_fit(table, cfg_, options_).expected).first;
    }
    return it->second;
  }

 private:
  Configuration cfg_;
  FitOptions options_;
  std::map<SufficientStat, std::vector<double>> cache_;
};

}  // namespace

Statistic make_chi_square_statistic(const ModelSpec& model, int rows, int cols,
                                    const FitOptions& options) {
  return [cache = FitCache(model, rows, cols, options)](const Table& x) mutable {
    return chi_square(x, cache.expected(x));
  };
}

Statistic make_g_square_statistic(const ModelSpec& model, int rows, int cols,
                                  const FitOptions& options) {
  return [cache = FitCache(model, rows, cols, options)](const Table& x) mutable {
    return g_square(x, cache.expected(x));
  };
}

Statistic make_llr_statistic(const ModelSpec& inner, const ModelSpec& outer, int rows,
                             int cols, const FitOptions& options) {
  if (!is_nested(inner, outer, rows, cols)) {
    throw ModelError("llr statistic: inner model is not nested in the outer model");
  }
  return [inner_cache = FitCache(inner, rows, cols, options),
          outer_cache = FitCache(outer, rows, cols, options)](const Table& x) mutable {
    return log_likelihood_ratio(x, inner_cache.expected(x), outer_cache.expected(x));
  };
}

}  // namespace mfiber
