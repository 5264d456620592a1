#include "doctest.h"
#include "markov_fiber/configuration.hpp"
#include "markov_fiber/toric.hpp"

using namespace mfiber;

namespace {

Monomial mono(int vars, std::initializer_list<int> cells) {
  std::vector<std::uint8_t> e(vars, 0);
  for (int c : cells) ++e[c];
  return Monomial::from_exponents(e);
}

Binomial minor(int cols, int i, int j, int k, int l) {
  return Binomial::from_move(Move::basic(cols, {i, k}, {j, l}), 9);
}

}  // namespace

TEST_CASE("lex order ranks the last cell highest") {
  const LexOrder order(2, 2);
  CHECK(order.describe() == "x_2,2 > x_2,1 > x_1,2 > x_1,1");
  CHECK(mono(4, {3}) > mono(4, {2, 2, 1}));
  CHECK(mono(4, {0, 3}) > mono(4, {1, 2}));
  CHECK(mono(4, {1, 2}) < mono(4, {0, 3}));
}

TEST_CASE("monomial arithmetic") {
  const auto a = mono(4, {0, 1});
  const auto b = mono(4, {1, 2});
  CHECK(a.lcm(b) == mono(4, {0, 1, 2}));
  CHECK((a * b) / b == a);
  CHECK(a.divides(a * b));
  CHECK_FALSE(b.divides(a));
  CHECK_FALSE(a.coprime(b));
  CHECK((a * a).degree() == 4);
  CHECK_FALSE((a * a).square_free());
  CHECK_THROWS(a / b);
}

TEST_CASE("2x2 independence: one generator, vacuously a Groebner basis") {
  const auto r = verify_grobner(ModelSpec::independence(), 2, 2);
  CHECK(r.generator_count == 1);
  CHECK(r.passed());
  const auto g = generators(ModelSpec::independence(), 2, 2);
  CHECK(g.front().lead == mono(4, {0, 3}));
  CHECK(g.front().trail == mono(4, {1, 2}));
}

TEST_CASE("S-pairs of identical and coprime leads reduce") {
  const auto G = generators(ModelSpec::independence(), 3, 3);
  CHECK(s_poly_reduces(G[0], G[0], G));
  for (const auto& g : G)
    for (const auto& h : G)
      if (g.lead.coprime(h.lead)) CHECK(s_poly_reduces(g, h, G));
}

TEST_CASE("adjacent minors of a 3x3 table are not a Groebner basis") {
  const std::vector<Binomial> adjacent{minor(3, 0, 1, 0, 1), minor(3, 0, 1, 1, 2),
                                       minor(3, 1, 2, 0, 1), minor(3, 1, 2, 1, 2)};
  bool some_fail = false;
  for (const auto& g : adjacent)
    for (const auto& h : adjacent) some_fail = some_fail || !s_poly_reduces(g, h, adjacent);
  CHECK(some_fail);
}

TEST_CASE("division leaves a fully reduced remainder") {
  const auto G = generators(ModelSpec::independence(), 3, 3);
  Polynomial p;
  p.add(mono(9, {0, 4, 8}), 1);
  p.add(mono(9, {2, 4, 6}), -1);
  const auto d = divide(p, G);
  for (const auto& [m, c] : d.remainder.terms())
    for (const auto& g : G) CHECK_FALSE(g.lead.divides(m));
  // The step limit is reported.
  CHECK(divide(p, G, 0).step_limit_hit);
}

TEST_CASE("canonicalization moves rectangles to the upper-left corner") {
  const auto m = ModelSpec::change_point({Rectangle{2, 2, 1, 2}, Rectangle{1, 3, 1, 3}});
  const auto c = canonicalize(m, 4, 4);
  CHECK(c.model.rectangles[0] == Rectangle{0, 0, 0, 1});
  CHECK(c.model.rectangles[1] == Rectangle{0, 2, 0, 2});
  CHECK(c.row_permutation == std::vector<int>{2, 1, 3, 0});
  CHECK(c.col_permutation == std::vector<int>{1, 2, 3, 0});
  CHECK_THROWS_AS(canonicalize(ModelSpec::own_blocks({0, 1, 2}, {0, 1, 2}), 2, 2), ModelError);
}

TEST_CASE("3x3 with one 2x2 rectangle") {
  const auto m = ModelSpec::change_point({Rectangle{0, 1, 0, 1}});
  const auto r = verify_grobner(m, 3, 3);
  CHECK(r.passed());
  CHECK(r.generator_count == markov_basis(m, 3, 3).size());
  const auto cfg = build_configuration(m, 3, 3);
  for (const auto& g : generators(m, 3, 3)) {
    std::vector<std::int64_t> z(9, 0);
    for (int v = 0; v < 9; ++v) z[v] = g.lead[v] - g.trail[v];
    CHECK(is_kernel_move(cfg, Move::from_dense(z, MoveType::I)));
  }
}

TEST_CASE("4x4 doubly strict nesting passes under this order") {
  const auto m = ModelSpec::change_point({Rectangle{0, 1, 0, 1}, Rectangle{0, 2, 0, 2}});
  const auto r = verify_grobner(m, 4, 4);
  CHECK(r.passed());
  CHECK(r.square_free);
  CHECK(r.failures.empty());
  CHECK(r.degree2_covered == r.degree2_kernel_moves);
  CHECK_THROWS_AS(verify_grobner(m, 6, 6), ModelError);
}
