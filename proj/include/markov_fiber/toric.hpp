#pragma once

#include <compare>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "markov_fiber/models.hpp"
#include "markov_fiber/moves.hpp"

namespace mfiber {

/// Lexicographic order on the variables x_ij of an R x C grid with
/// x_RC > x_R,C-1 > ... > x_R1 > x_R-1,C > ... > x_11, i.e. variables rank
/// by their row-major cell index, the last cell being largest.
class LexOrder {
 public:
  LexOrder(int rows, int cols) : rows_(rows), cols_(cols) {}
  int rows() const { return rows_; }
  int cols() const { return cols_; }
  int variable_count() const { return rows_ * cols_; }
  /// Larger rank means larger variable.
  int rank(int cell) const { return cell; }
  /// The chain of variables from the largest down, one-based.
  std::string describe() const;

 private:
  int rows_;
  int cols_;
};

/// Exponent vector over the R*C variables.
class Monomial {
 public:
  Monomial() = default;
  explicit Monomial(int variables) : exps_(variables, 0) {}
  static Monomial from_exponents(std::vector<std::uint8_t> exps);

  int variable_count() const { return static_cast<int>(exps_.size()); }
  int operator[](int v) const { return exps_[v]; }
  int degree() const;
  bool divides(const Monomial& other) const;
  bool square_free() const;
  Monomial operator*(const Monomial& other) const;
  /// this / other; other must divide this.
  Monomial operator/(const Monomial& other) const;
  Monomial lcm(const Monomial& other) const;
  bool coprime(const Monomial& other) const;
  std::string to_string(int cols) const;

  /// Lex comparison under LexOrder: the highest variable decides first.
  friend std::strong_ordering operator<=>(const Monomial& a, const Monomial& b);
  friend bool operator==(const Monomial&, const Monomial&) = default;

 private:
  std::vector<std::uint8_t> exps_;
};

/// lead - trail with lead > trail.
struct Binomial {
  Monomial lead;
  Monomial trail;
  /// Monomials of the basic move (positive part, negative part).
  static Binomial from_move(const Move& z, int variables);
};

/// Polynomial with small integer coefficients, terms kept in descending
/// order.
class Polynomial {
 public:
  using Terms = std::map<Monomial, std::int64_t, std::greater<>>;

  Polynomial() = default;
  void add(const Monomial& m, std::int64_t coeff);
  bool is_zero() const { return terms_.empty(); }
  const Terms& terms() const { return terms_; }
  std::size_t size() const { return terms_.size(); }

 private:
  Terms terms_;
};

/// S-polynomial -(L/lead1) trail1 + (L/lead2) trail2, L = lcm of leads.
Polynomial s_polynomial(const Binomial& g1, const Binomial& g2);

struct Division {
  Polynomial remainder;
  int steps = 0;
  bool step_limit_hit = false;
};

/// Multivariate division of p by the binomials. Terms divisible by no lead
/// move to the remainder, so the remainder is fully reduced.
Division divide(Polynomial p, const std::vector<Binomial>& divisors, int step_limit = 10'000);

/// True iff the S-polynomial of g1, g2 divides to zero by G. Throws
/// std::runtime_error when the division exceeds `step_limit` steps.
bool s_poly_reduces(const Binomial& g1, const Binomial& g2, const std::vector<Binomial>& G,
                    int step_limit = 10'000);

/// Row and column relabeling that makes every rectangle of a change point
/// model share the upper-left corner. canonical row r is original row
/// row_permutation[r].
struct Canonicalization {
  std::vector<int> row_permutation;
  std::vector<int> col_permutation;
  ModelSpec model;
};

Canonicalization canonicalize(const ModelSpec& model, int rows, int cols);

/// One binomial per basic move of the canonical model, lead first.
std::vector<Binomial> generators(const ModelSpec& canonical_model, int rows, int cols);

struct GrobnerReport {
  int rows = 0;
  int cols = 0;
  Canonicalization canonical;
  std::string order;
  std::size_t generator_count = 0;
  std::size_t pairs_checked = 0;
  std::size_t pairs_reduced = 0;
  /// Failing pairs as generator indices, with a note.
  std::vector<std::string> failures;
  bool square_free = true;
  /// Every lead has the form x_ik x_jl with i < j and k < l.
  bool leads_main_diagonal = true;
  /// Degree-2 kernel moves found by brute force, and how many of them are
  /// +/- a generator.
  std::size_t degree2_kernel_moves = 0;
  std::size_t degree2_covered = 0;

  bool all_reduced() const { return pairs_reduced == pairs_checked; }
  bool passed() const {
    return all_reduced() && square_free && leads_main_diagonal &&
           degree2_covered == degree2_kernel_moves;
  }
};

/// Exhaustive S-pair certificate for a change point (or independence)
/// model. Throws ModelError for other families or grids beyond max_dim.
GrobnerReport verify_grobner(const ModelSpec& model, int rows, int cols, int max_dim = 5);

}  // namespace mfiber
