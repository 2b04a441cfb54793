#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <array>
#include <functional>
#include <numeric>
#include <optional>
#include <random>

#include "oracles.hpp"
#include "pillars.hpp"
#include "ribbonbv/algebra_io.hpp"
#include "ribbonbv/graphsum.hpp"

using namespace ribbonbv;

namespace {

const std::string kFixtures = RIBBONBV_FIXTURES;

AlgebraSpec fixture(const std::string& name) { return load_algebra(kFixtures + "/" + name); }

RibbonGraph tripod(bool reversed = false) {
  RibbonGraph g;
  g.vertices = {reversed ? std::vector<int>{0, 2, 1} : std::vector<int>{0, 1, 2}};
  g.sigma = {0, 1, 2};
  g.leg_label = {1, 2, 3};
  return g;
}

RibbonGraph lollipop() {
  RibbonGraph g;
  g.vertices = {{0, 1, 2}};
  g.sigma = {0, 2, 1};
  g.leg_label = {1, 0, 0};
  return g;
}

/// Flag relabeling f -> perm[f] with rotated vertex lists and reversed vertex order.
RibbonGraph relabel(const RibbonGraph& g, const std::vector<int>& perm, int rotation) {
  RibbonGraph h;
  h.sigma.assign(g.sigma.size(), 0);
  h.leg_label.assign(g.leg_label.size(), 0);
  for (std::size_t f = 0; f < g.sigma.size(); ++f) {
    h.sigma[static_cast<std::size_t>(perm[f])] = perm[static_cast<std::size_t>(g.sigma[f])];
    h.leg_label[static_cast<std::size_t>(perm[f])] = g.leg_label[f];
  }
  for (const auto& v : g.vertices) {
    std::vector<int> w;
    for (int f : v) w.push_back(perm[static_cast<std::size_t>(f)]);
    std::rotate(w.begin(), w.begin() + rotation % static_cast<int>(w.size()), w.end());
    h.vertices.push_back(w);
  }
  std::reverse(h.vertices.begin(), h.vertices.end());
  return h;
}

/// A random cyclic algebra on two even and two odd generators with a random
/// graded-symmetric propagator and a random inclusion of B. The data need not
/// satisfy any relation: graph summation is compared with the exponential
/// formula as an identity of contractions.
struct RandomModel {
  AlgebraSpec spec;
  HomotopyData hom;
  BVSpace space_a;
  std::vector<std::uint8_t> parity_b{1, 0, 1, 0};
};

RandomModel random_model(unsigned seed, const std::map<int, int>& words_per_arity) {
  std::mt19937 rng(seed);
  auto rnd = [&](int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); };
  RandomModel r;
  auto basis = std::make_shared<GradedBasis>(std::vector<GradedBasis::Element>{
      {"e0", Parity::even}, {"o0", Parity::odd}, {"e1", Parity::even}, {"o1", Parity::odd}});
  r.spec.kind = AlgebraKind::a_infinity;
  r.spec.basis = basis;
  SparseTensor beta = make_beta_tensor(basis);
  beta.set({0, 1}, 1);
  beta.set({1, 0}, 1);
  beta.set({2, 3}, 1);
  beta.set({3, 2}, 1);
  r.spec.beta = beta;
  r.spec.I = RationalMatrix(4, 4);
  std::vector<std::uint8_t> par;
  for (int i = 0; i < 4; ++i) par.push_back(static_cast<std::uint8_t>(1 ^ bit(basis->parity(i))));
  for (const auto& [arity, count] : words_per_arity) {
    std::map<Word, Rational> coeff;
    for (int t = 0; t < count;) {
      Word w;
      int total = 0;
      for (int j = 0; j <= arity; ++j) {
        w.push_back(rnd(0, 3));
        total ^= par[static_cast<std::size_t>(w.back())];
      }
      if (total) continue;
      ++t;
      auto f = canonical_cyclic_form(w, par);
      if (f.sign) coeff[f.word] = rnd(-3, 3);
    }
    SparseTensor T = make_cyclic_tensor(basis, arity);
    Word idx(static_cast<std::size_t>(arity + 1), 0);
    std::function<void(std::size_t)> fill = [&](std::size_t p) {
      if (p == idx.size()) {
        auto f = canonical_cyclic_form(idx, par);
        auto it = coeff.find(f.word);
        if (f.sign && it != coeff.end() && sgn(it->second)) T.set(idx, f.sign * it->second);
        return;
      }
      for (int a = 0; a < 4; ++a) {
        idx[p] = a;
        fill(p + 1);
      }
    };
    fill(0);
    r.spec.cyclic[arity] = T;
  }
  RationalMatrix om(4, 4);
  for (int i = 0; i < 4; ++i)
    for (int j = i; j < 4; ++j) {
      if (par[static_cast<std::size_t>(i)] != par[static_cast<std::size_t>(j)]) continue;
      if (par[static_cast<std::size_t>(i)] && i == j) continue;
      Rational v = rnd(-2, 2);
      om(i, j) = v;
      om(j, i) = par[static_cast<std::size_t>(i)] ? Rational(-v) : v;
    }
  const RationalMatrix binv = bilinear_matrix(beta_inverse(beta));
  r.hom.H = om * inverse(binv);
  r.hom.P = RationalMatrix::identity(4);
  r.hom.inclusion = RationalMatrix(4, 4);
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b)
      if (a % 2 == b % 2) r.hom.inclusion(a, b) = rnd(-2, 2);
  r.hom.basis_B = std::make_shared<GradedBasis>(std::vector<GradedBasis::Element>{
      {"x", Parity::even}, {"y", Parity::odd}, {"z", Parity::even}, {"w", Parity::odd}});
  r.hom.beta_B = bilinear_matrix(beta);
  r.hom.I_B = RationalMatrix(4, 4);
  r.hom.projection = RationalMatrix(4, 4);
  r.space_a = algebra_space(r.spec);
  r.space_a.omega = om;
  return r;
}

void compare_with_exponential_formula(const RandomModel& m, ValencyMode mode, int max_letters, int chi_min) {
  Functional V = vertex_functional(cyclic_tensors(m.spec), m.space_a.parity);
  Functional expected = oracle::exp_formula_S(V, m.space_a, m.hom.inclusion, m.parity_b, max_letters, chi_min);
  SumOptions o;
  o.chi_min = chi_min;
  o.max_legs = max_letters;
  o.mode = mode;
  Functional got = sum_S(m.spec, m.hom, o).S;
  CHECK(got == expected);
}

}  // namespace

TEST_CASE("propagator of the four-dimensional fixture") {
  AlgebraSpec t4 = fixture("t4.alg");
  HomotopyData h = homotopy_for(t4);
  Propagator p = propagator(t4, h.H);
  CHECK(p.graded_symmetric);
  const int t = t4.basis->index_of("t");
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) CHECK((sgn(p.omega(i, j)) != 0) == (i == t && j == t));
  CHECK(propagator(t4, RationalMatrix(4, 4)).omega.is_zero());
}

TEST_CASE("propagators are graded symmetric on every fixture") {
  for (const char* name : {"t4.alg", "q2h.alg", "q3.alg", "mat2c.alg", "ainf_m3.alg"}) {
    CAPTURE(name);
    AlgebraSpec spec = fixture(name);
    HomotopyData h = homotopy_for(spec);
    Propagator p = propagator(spec, h.H);
    CHECK(p.graded_symmetric);
    BVSpace s = algebra_space(spec);
    for (int i = 0; i < spec.dimension(); ++i)
      for (int j = 0; j < spec.dimension(); ++j) {
        const int sign = s.parity[static_cast<std::size_t>(i)] & s.parity[static_cast<std::size_t>(j)] ? -1 : 1;
        CHECK(p.omega(i, j) == sign * p.omega(j, i));
      }
  }
}

TEST_CASE("tripod and lollipop on the four-dimensional fixture") {
  AlgebraSpec t4 = fixture("t4.alg");
  HomotopyData h = homotopy_for(t4);
  GraphEvaluator ev(t4, h);
  Functional both;
  for (bool rev : {false, true}) {
    GraphWeight w = w_gamma(tripod(rev), ev);
    CHECK(w.hbar_power == 0);
    REQUIRE(w.functional.size() == 1);
    const auto& [k, c] = *w.functional.terms().begin();
    CHECK(k.monomial == Monomial{{0, 0, 1}});
    CHECK(c == 1);
    both += w.functional;
  }
  // Both cyclic orders are one unlabeled graph, which the tree sum counts once.
  SumOptions trees;
  trees.max_legs = 3;
  Functional S = sum_S(t4, h, trees).S;
  CHECK(S == w_gamma(tripod(), ev).functional);
  CHECK(Rational(2) * S == both);
  GraphWeight l = w_gamma(lollipop(), ev);
  CHECK(l.hbar_power == 1);
  CHECK(l.functional.is_zero());
}

TEST_CASE("zero propagator leaves only single-vertex terms") {
  for (const char* name : {"t4.alg", "q3.alg", "mat2c.alg"}) {
    CAPTURE(name);
    AlgebraSpec spec = fixture(name);
    spec.I = RationalMatrix(spec.dimension(), spec.dimension());
    spec.H.reset();
    HomotopyData h = homotopy_for(spec);
    REQUIRE(h.H.is_zero());
    REQUIRE(h.dim_B() == spec.dimension());
    GraphEvaluator ev(spec, h);
    EnumerationOptions eo;
    eo.chi = 0;
    eo.legs = 2;
    long with_edges = 0;
    for_each_rooted_graph(eo, [&](const RibbonGraph& g) {
      if (g.num_edges() == 0) return;
      ++with_edges;
      CHECK(ev.contract(g).is_zero());
    });
    CHECK(with_edges > 0);
    SumOptions o;
    o.chi_min = -1;
    o.max_legs = 4;
    Functional S = sum_S(spec, h, o).S;
    Functional V = vertex_functional(cyclic_tensors(spec), ev.space_B().parity);
    CHECK(S == V);
  }
}

TEST_CASE("graph sums match the exponential formula on random cubic data") {
  for (unsigned seed = 1; seed <= 6; ++seed) {
    CAPTURE(seed);
    RandomModel m = random_model(seed, {{2, 4}});
    compare_with_exponential_formula(m, ValencyMode::trivalent, 3, -1);
  }
  RandomModel m = random_model(1, {{2, 4}});
  compare_with_exponential_formula(m, ValencyMode::trivalent, 4, -1);
}

TEST_CASE("graph sums match the exponential formula with quartic vertices") {
  for (unsigned seed = 1; seed <= 4; ++seed) {
    CAPTURE(seed);
    RandomModel m = random_model(seed, {{2, 3}, {3, 1}});
    compare_with_exponential_formula(m, ValencyMode::min3, 3, 0);
    compare_with_exponential_formula(m, ValencyMode::min3, 4, 1);
  }
}

TEST_CASE("graph weights are invariant under flag relabeling") {
  AlgebraSpec spec = fixture("q2h.alg");
  HomotopyData h = homotopy_for(spec);
  GraphEvaluator ev(spec, h);
  std::mt19937 rng(3);
  int nonzero = 0;
  for (int n = 1; n <= 4; ++n)
    for (const auto& [chi, group] : enumerate_graphs(-1, n, ValencyMode::trivalent, true))
      for (const auto& cg : group) {
        if (cg.graph.num_flags() > 10) continue;
        Functional base = ev.contract(cg.graph);
        if (!base.is_zero()) ++nonzero;
        for (int rep = 0; rep < 3; ++rep) {
          std::vector<int> perm(static_cast<std::size_t>(cg.graph.num_flags()));
          std::iota(perm.begin(), perm.end(), 0);
          std::shuffle(perm.begin(), perm.end(), rng);
          RibbonGraph r = relabel(cg.graph, perm, rep);
          r.check();
          CHECK(ev.contract(r) == base);
        }
      }
  CHECK(nonzero > 5);
}

TEST_CASE("every contribution sits at hbar power 1 - chi with one letter per leg") {
  AlgebraSpec spec = fixture("q2h.alg");
  HomotopyData h = homotopy_for(spec);
  GraphEvaluator ev(spec, h);
  for (int n = 1; n <= 4; ++n)
    for (const auto& [chi, group] : enumerate_graphs(-1, n, ValencyMode::trivalent, true))
      for (const auto& cg : group) {
        if (cg.graph.num_flags() > 10) continue;
        GraphWeight w = w_gamma(cg.graph, ev);
        BoundaryStructure b = boundary_cycles(cg.graph);
        CHECK(w.hbar_power == 1 - chi);
        CHECK(w.hbar_power == 2 * b.g + b.i - 1);
        for (const auto& [k, c] : w.functional.terms()) {
          CHECK(k.hbar == w.hbar_power);
          CHECK(letter_count(k.monomial) == n);
        }
      }
}

TEST_CASE("edge-variant identities") {
  for (const char* name : {"t4.alg", "q2h.alg", "q2i.alg"}) {
    CAPTURE(name);
    AlgebraSpec spec = fixture(name);
    GraphEvaluator ev(spec, homotopy_for(spec));
    pillars::Tally t = pillars::check(ev, -1, 4, 8);
    CHECK(t.graphs > 30);
    CHECK(t.telescoping_failures == 0);
    CHECK(t.leibniz_failures == 0);
    CHECK(t.flip_failures == 0);
    if (std::string(name) == "q2h.alg") CHECK(t.nonzero_flip_terms > 0);
    if (std::string(name) != "t4.alg") CHECK(t.nonzero_commutator_terms > 0);
    if (std::string(name) == "q2i.alg") CHECK(t.nonzero_leibniz_sides > 0);
  }
}

namespace {

/// The homotopy keeping the nonzero entries of the constructed one selected by
/// `mask` (row-major order), if it still satisfies the homotopy axioms.
std::optional<HomotopyData> partial_homotopy(const AlgebraSpec& spec, unsigned mask) {
  const HomotopyData full = homotopy_for(spec);
  const int d = spec.dimension();
  RationalMatrix H(d, d);
  int k = 0;
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j)
      if (sgn(full.H(i, j)) != 0) {
        if (mask >> k & 1) H(i, j) = full.H(i, j);
        ++k;
      }
  try {
    return validate_homotopy(spec, H);
  } catch (const HomotopyError&) {
    return std::nullopt;
  }
}

/// Residual sizes of S with I_B, with -I_B and with the I^vee term dropped.
std::array<std::size_t, 3> equivariant_residuals(const AlgebraSpec& spec, const HomotopyData& h) {
  SumOptions o;
  o.chi_min = 0;
  o.max_legs = 6;
  SumResult r = sum_S(spec, h, o);
  const BVSpace s = b_space(h);
  RationalMatrix neg = RationalMatrix(h.I_B.rows(), h.I_B.cols()) - h.I_B;
  return {bv_residual(r.S, r.truncation, h.I_B, s, 4, 1).nonzero.size(),
          bv_residual(r.S, r.truncation, neg, s, 4, 1).nonzero.size(),
          bv_residual(r.S, r.truncation, std::nullopt, s, 4, 1).nonzero.size()};
}

}  // namespace

TEST_CASE("equivariant master equation with a nonzero differential on B") {
  AlgebraSpec q2i = fixture("q2i.alg");
  HomotopyData h = homotopy_for(q2i);
  REQUIRE_FALSE(h.I_B.is_zero());
  auto res = equivariant_residuals(q2i, h);
  CHECK(res[0] == 0);
  CHECK(res[1] > 0);
  CHECK(res[2] > 0);
  // Partial homotopies of mat2c keep I_B != 0 with I_B^2 = 0.
  AlgebraSpec mat2c = fixture("mat2c.alg");
  int cases = 0;
  for (unsigned mask : {1u, 6u, 7u}) {
    CAPTURE(mask);
    auto part = partial_homotopy(mat2c, mask);
    REQUIRE(part.has_value());
    REQUIRE_FALSE(part->I_B.is_zero());
    res = equivariant_residuals(mat2c, *part);
    CHECK(res[0] == 0);
    CHECK(res[1] > 0);
    CHECK(res[2] > 0);
    ++cases;
  }
  CHECK(cases == 3);
}

TEST_CASE("parallel summation is deterministic") {
  AlgebraSpec spec = fixture("q3.alg");
  HomotopyData h = homotopy_for(spec);
  SumOptions o;
  o.chi_min = 0;
  o.max_legs = 4;
  SumResult one = sum_S(spec, h, o);
  o.jobs = 3;
  SumResult three = sum_S(spec, h, o);
  CHECK(one.S == three.S);
  CHECK(one.graphs == three.graphs);
  CHECK(one.truncation.max_letters == 4);
  CHECK(one.truncation.max_hbar == 1);
}

TEST_CASE("the two weightings agree") {
  AlgebraSpec spec = fixture("q2h.alg");
  HomotopyData h = homotopy_for(spec);
  SumOptions o;
  o.chi_min = -1;
  o.max_legs = 3;
  Functional a = sum_S(spec, h, o).S;
  o.weighting = Weighting::aut_inverse;
  CHECK(sum_S(spec, h, o).S == a);
}

TEST_CASE("a perturbed solution fails the master equation") {
  AlgebraSpec spec = fixture("q3.alg");
  HomotopyData h = homotopy_for(spec);
  SumOptions o;
  o.max_legs = 6;
  SumResult r = sum_S(spec, h, o);
  const BVSpace s = b_space(h);
  REQUIRE(bv_residual(r.S, r.truncation, h.I_B, s, 4, 0).pass());
  int detected = 0, tried = 0;
  for (const auto& [k, c] : r.S.terms()) {
    if (letter_count(k.monomial) != 3) continue;
    ++tried;
    Functional bad = r.S;
    bad.add_canonical(k, c);
    if (!bv_residual(bad, r.truncation, h.I_B, s, 4, 0).pass()) ++detected;
  }
  CHECK(tried > 0);
  CHECK(detected == tried);
}

TEST_CASE("doubled Massey algebra") {
  AlgebraSpec spec = double_algebra(fixture("massey.alg"));
  REQUIRE(validate(spec).pass());
  HomotopyData h = homotopy_for(spec);
  CHECK(h.dim_B() == 10);
  SumOptions o;
  o.max_legs = 4;
  SumResult trees = sum_S(spec, h, o);
  CHECK(trees.S.size() == 2);
  CHECK(trees.S.coefficient(0, {{0, 1, 2, 8}}) == 1);
  CHECK(trees.S.coefficient(0, {{0, 1, 2, 9}}) == 1);
  o.chi_min = 0;
  SumResult loops = sum_S(spec, h, o);
  CHECK(loops.S == trees.S);
  CHECK(bv_residual(loops.S, loops.truncation, h.I_B, b_space(h), 2, 1).pass());
}

TEST_CASE("minimal model of the doubled Massey algebra as an A-infinity input") {
  AlgebraSpec spec = fixture("ainf_m3.alg");
  REQUIRE(validate(spec).pass());
  REQUIRE(check_delta_m_zero(spec).pass());
  HomotopyData h = homotopy_for(spec);
  SumOptions o;
  o.chi_min = 0;
  o.max_legs = 5;
  o.mode = ValencyMode::min3;
  SumResult r = sum_S(spec, h, o);
  Functional V = vertex_functional(cyclic_tensors(spec), b_space(h).parity);
  CHECK(r.S == V);
  CHECK(bv_residual(r.S, r.truncation, h.I_B, b_space(h), 3, 1).pass());
}
