#include "markov_fiber/toric.hpp"

#include <algorithm>
#include <numeric>
#include <set>
#include <sstream>
#include <stdexcept>

#include "markov_fiber/configuration.hpp"

namespace mfiber {

std::string LexOrder::describe() const {
  std::ostringstream os;
  for (int cell = variable_count() - 1; cell >= 0; --cell) {
    os << "x_" << cell / cols_ + 1 << "," << cell % cols_ + 1;
    if (cell) os << " > ";
  }
  return os.str();
}

Monomial Monomial::from_exponents(std::vector<std::uint8_t> exps) {
  Monomial m;
  m.exps_ = std::move(exps);
  return m;
}

int Monomial::degree() const { return std::accumulate(exps_.begin(), exps_.end(), 0); }

bool Monomial::divides(const Monomial& other) const {
  for (std::size_t v = 0; v < exps_.size(); ++v)
    if (exps_[v] > other.exps_[v]) return false;
  return true;
}

bool Monomial::square_free() const {
  return std::all_of(exps_.begin(), exps_.end(), [](auto e) { return e <= 1; });
}

Monomial Monomial::operator*(const Monomial& other) const {
  Monomial m = *this;
  for (std::size_t v = 0; v < exps_.size(); ++v) {
    if (exps_[v] + other.exps_[v] > 255) throw std::overflow_error("monomial exponent overflow");
    m.exps_[v] = static_cast<std::uint8_t>(exps_[v] + other.exps_[v]);
  }
  return m;
}

Monomial Monomial::operator/(const Monomial& other) const {
  if (!other.divides(*this)) throw std::invalid_argument("monomial does not divide");
  Monomial m = *this;
  for (std::size_t v = 0; v < exps_.size(); ++v) m.exps_[v] -= other.exps_[v];
  return m;
}

Monomial Monomial::lcm(const Monomial& other) const {
  Monomial m = *this;
  for (std::size_t v = 0; v < exps_.size(); ++v) m.exps_[v] = std::max(exps_[v], other.exps_[v]);
  return m;
}

bool Monomial::coprime(const Monomial& other) const {
  for (std::size_t v = 0; v < exps_.size(); ++v)
    if (exps_[v] && other.exps_[v]) return false;
  return true;
}

std::string Monomial::to_string(int cols) const {
  std::string s;
  for (int v = variable_count() - 1; v >= 0; --v) {
    for (int e = 0; e < exps_[v]; ++e) {
      if (!s.empty()) s += "*";
      s += "x_" + std::to_string(v / cols + 1) + "," + std::to_string(v % cols + 1);
    }
  }
  return s.empty() ? "1" : s;
}

std::strong_ordering operator<=>(const Monomial& a, const Monomial& b) {
  if (a.exps_.size() != b.exps_.size()) return a.exps_.size() <=> b.exps_.size();
  for (std::size_t v = a.exps_.size(); v-- > 0;) {
    if (a.exps_[v] != b.exps_[v]) return a.exps_[v] <=> b.exps_[v];
  }
  return std::strong_ordering::equal;
}

Binomial Binomial::from_move(const Move& z, int variables) {
  std::vector<std::uint8_t> pos(variables, 0), neg(variables, 0);
  for (const auto& e : z.entries()) {
    if (e.coeff > 0) pos[e.cell] = static_cast<std::uint8_t>(e.coeff);
    else neg[e.cell] = static_cast<std::uint8_t>(-e.coeff);
  }
  auto p = Monomial::from_exponents(std::move(pos));
  auto n = Monomial::from_exponents(std::move(neg));
  if (p < n) std::swap(p, n);
  return {std::move(p), std::move(n)};
}

void Polynomial::add(const Monomial& m, std::int64_t coeff) {
  if (coeff == 0) return;
  auto [it, inserted] = terms_.try_emplace(m, coeff);
  if (!inserted) {
    it->second += coeff;
    if (it->second == 0) terms_.erase(it);
  }
}

Polynomial s_polynomial(const Binomial& g1, const Binomial& g2) {
  const Monomial l = g1.lead.lcm(g2.lead);
  Polynomial p;
  p.add((l / g1.lead) * g1.trail, -1);
  p.add((l / g2.lead) * g2.trail, 1);
  return p;
}

Division divide(Polynomial p, const std::vector<Binomial>& divisors, int step_limit) {
  Division d;
  Polynomial work = std::move(p);
  while (!work.is_zero()) {
    auto top = *work.terms().begin();
    const Binomial* hit = nullptr;
    for (const auto& g : divisors) {
      if (g.lead.divides(top.first)) {
        hit = &g;
        break;
      }
    }
    if (!hit) {
      d.remainder.add(top.first, top.second);
      work.add(top.first, -top.second);
      continue;
    }
    if (++d.steps > step_limit) {
      d.step_limit_hit = true;
      d.remainder = std::move(work);
      return d;
    }
    const Monomial q = top.first / hit->lead;
    work.add(top.first, -top.second);
    work.add(q * hit->trail, top.second);
  }
  return d;
}

bool s_poly_reduces(const Binomial& g1, const Binomial& g2, const std::vector<Binomial>& G,
                    int step_limit) {
  auto d = divide(s_polynomial(g1, g2), G, step_limit);
  if (d.step_limit_hit) {
    throw std::runtime_error("S-polynomial reduction exceeded " + std::to_string(step_limit) +
                             " steps");
  }
  return d.remainder.is_zero();
}

Canonicalization canonicalize(const ModelSpec& model, int rows, int cols) {
  if (model.family != ModelFamily::ChangePoint && model.family != ModelFamily::Independence) {
    throw ModelError("canonicalization needs a change point model");
  }
  require_valid(model, rows, cols);
  const int n = static_cast<int>(model.rectangles.size());
  std::vector<int> row_key(rows, n), col_key(cols, n);
  for (int s = n - 1; s >= 0; --s) {
    const auto& r = model.rectangles[s];
    for (int i = r.first_row; i <= r.last_row; ++i) row_key[i] = s;
    for (int j = r.first_col; j <= r.last_col; ++j) col_key[j] = s;
  }
  Canonicalization c;
  c.row_permutation.resize(rows);
  c.col_permutation.resize(cols);
  std::iota(c.row_permutation.begin(), c.row_permutation.end(), 0);
  std::iota(c.col_permutation.begin(), c.col_permutation.end(), 0);
  std::stable_sort(c.row_permutation.begin(), c.row_permutation.end(),
                   [&](int a, int b) { return row_key[a] < row_key[b]; });
  std::stable_sort(c.col_permutation.begin(), c.col_permutation.end(),
                   [&](int a, int b) { return col_key[a] < col_key[b]; });
  c.model = model;
  for (auto& r : c.model.rectangles) r = Rectangle{0, r.row_span() - 1, 0, r.col_span() - 1};
  return c;
}

std::vector<Binomial> generators(const ModelSpec& canonical_model, int rows, int cols) {
  BasisOptions opts;
  opts.force_enumeration = true;
  const auto basis = markov_basis(canonical_model, rows, cols, opts);
  std::vector<Binomial> G;
  for (const auto& z : basis.moves()) G.push_back(Binomial::from_move(z, rows * cols));
  return G;
}

namespace {

/// Every degree-2 kernel move, one orientation each, by brute force over
/// pairs of cell pairs.
std::vector<Move> degree2_kernel_moves(const Configuration& cfg) {
  const int cells = cfg.cell_count();
  std::vector<std::pair<int, int>> pairs;
  std::vector<std::vector<std::int64_t>> images;
  for (int a = 0; a < cells; ++a) {
    for (int b = a; b < cells; ++b) {
      std::vector<std::int64_t> x(cells, 0);
      ++x[a];
      ++x[b];
      pairs.emplace_back(a, b);
      images.push_back(cfg.apply(x));
    }
  }
  std::vector<Move> out;
  for (std::size_t p = 0; p < pairs.size(); ++p) {
    for (std::size_t q = p + 1; q < pairs.size(); ++q) {
      if (images[p] != images[q]) continue;
      auto [a, b] = pairs[p];
      auto [c, d] = pairs[q];
      if (a == c || a == d || b == c || b == d) continue;
      std::vector<std::int64_t> z(cells, 0);
      ++z[a];
      ++z[b];
      --z[c];
      --z[d];
      out.push_back(Move::from_dense(z, MoveType::I).canonical());
    }
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

}  // namespace

GrobnerReport verify_grobner(const ModelSpec& model, int rows, int cols, int max_dim) {
  if (rows > max_dim || cols > max_dim) {
    throw ModelError("grid " + std::to_string(rows) + "x" + std::to_string(cols) +
                     " exceeds the bound " + std::to_string(max_dim));
  }
  GrobnerReport report;
  report.rows = rows;
  report.cols = cols;
  report.canonical = canonicalize(model, rows, cols);
  const LexOrder order(rows, cols);
  report.order = order.describe();

  const auto G = generators(report.canonical.model, rows, cols);
  report.generator_count = G.size();
  for (const auto& g : G) {
    if (!g.lead.square_free()) report.square_free = false;
    std::vector<int> vars;
    for (int v = 0; v < g.lead.variable_count(); ++v)
      for (int e = 0; e < g.lead[v]; ++e) vars.push_back(v);
    if (vars.size() != 2 || !(vars[0] / cols < vars[1] / cols && vars[0] % cols < vars[1] % cols))
      report.leads_main_diagonal = false;
  }

  for (std::size_t a = 0; a < G.size(); ++a) {
    for (std::size_t b = a; b < G.size(); ++b) {
      ++report.pairs_checked;
      try {
        if (s_poly_reduces(G[a], G[b], G)) {
          ++report.pairs_reduced;
        } else {
          report.failures.push_back("(" + std::to_string(a) + "," + std::to_string(b) +
                                    "): nonzero remainder");
        }
      } catch (const std::runtime_error& e) {
        report.failures.push_back("(" + std::to_string(a) + "," + std::to_string(b) +
                                  "): " + e.what());
      }
    }
  }

  const auto cfg = build_configuration(report.canonical.model, rows, cols);
  std::set<std::pair<Monomial, Monomial>> gens;
  for (const auto& g : G) gens.emplace(g.lead, g.trail);
  for (const auto& z : degree2_kernel_moves(cfg)) {
    ++report.degree2_kernel_moves;
    const auto b = Binomial::from_move(z, rows * cols);
    if (gens.count({b.lead, b.trail})) ++report.degree2_covered;
  }
  return report;
}

}  // namespace mfiber
