#include "ribbonbv/algebra.hpp"

#include <numeric>
#include <sstream>

namespace ribbonbv {

namespace {

std::uint8_t pbit(const GradedBasis& b, int i) { return static_cast<std::uint8_t>(bit(b.parity(i))); }

std::vector<Rational> zero_vector(int n) { return std::vector<Rational>(static_cast<std::size_t>(n)); }

std::string names_of(const GradedBasis& basis, const std::vector<int>& idx) {
  std::string s = "(";
  for (std::size_t k = 0; k < idx.size(); ++k) {
    if (k) s += ',';
    s += basis.name(idx[k]);
  }
  return s + ")";
}

std::string describe_term(const GradedBasis& basis, const Functional::Key& key, const Rational& c) {
  std::ostringstream os;
  os << format_rational(c) << " * ";
  for (const auto& w : key.monomial) os << names_of(basis, w);
  return os.str();
}

// Shifted-parity Koszul sign of moving the first r entries of idx to the end.
int rotation_sign(const GradedBasis& basis, const std::vector<int>& idx, std::size_t r) {
  int head = 0;
  int tail = 0;
  for (std::size_t k = 0; k < idx.size(); ++k) (k < r ? head : tail) ^= 1 ^ pbit(basis, idx[k]);
  return (head & tail) ? -1 : 1;
}

std::vector<int> rotate_left(const std::vector<int>& idx, std::size_t r) {
  std::vector<int> out(idx.begin() + static_cast<std::ptrdiff_t>(r), idx.end());
  out.insert(out.end(), idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(r));
  return out;
}

// (-1)^{sum_k (k-1) a_k} over the inputs of a raw product.
int lowering_sign(const GradedBasis& basis, const std::vector<int>& inputs) {
  int s = 0;
  for (std::size_t k = 0; k < inputs.size(); ++k)
    if (k % 2 == 1) s ^= pbit(basis, inputs[k]);
  return s ? -1 : 1;
}

// Dense binary product table: table[a][b][c] = coefficient of e_c in m_2(e_a, e_b).
using Table = std::vector<std::vector<std::vector<Rational>>>;

Table dense_product(const SparseTensor& m2, int dim) {
  Table t(static_cast<std::size_t>(dim), std::vector<std::vector<Rational>>(static_cast<std::size_t>(dim), zero_vector(dim)));
  for (const auto& [idx, v] : m2.entries()) t[static_cast<std::size_t>(idx[0])][static_cast<std::size_t>(idx[1])][static_cast<std::size_t>(idx[2])] += v;
  return t;
}

void fail(Check& c, std::vector<int> witness, std::string detail) {
  if (!c.pass) return;  // keep the first witness
  c.pass = false;
  c.witness = std::move(witness);
  c.detail = std::move(detail);
}

void beta_checks(const AlgebraSpec& spec, ValidationReport& r, bool& usable) {
  usable = false;
  Check present{"beta_present", true, {}, ""};
  if (!spec.beta) {
    fail(present, {}, "no scalar product declared");
    r.checks.push_back(present);
    return;
  }
  r.checks.push_back(present);
  const GradedBasis& basis = *spec.basis;
  Check odd{"beta_odd", true, {}, ""};
  for (const auto& [idx, v] : spec.beta->entries()) {
    if (basis.parity(idx[0]) == basis.parity(idx[1]))
      fail(odd, idx, "beta pairs equal parities at " + names_of(basis, idx));
  }
  r.checks.push_back(odd);
  Check sym{"beta_symmetric", true, {}, ""};
  for (const auto& [idx, v] : spec.beta->entries()) {
    if (spec.beta->get({idx[1], idx[0]}) != v)
      fail(sym, idx, "beta" + names_of(basis, idx) + " differs from its transpose");
  }
  r.checks.push_back(sym);
  Check nondeg{"beta_nondegenerate", true, {}, ""};
  auto rad = kernel(bilinear_matrix(*spec.beta));
  if (!rad.empty()) {
    std::vector<int> support;
    for (std::size_t i = 0; i < rad[0].size(); ++i)
      if (sgn(rad[0][i]) != 0) support.push_back(static_cast<int>(i));
    fail(nondeg, support, "radical vector supported on " + names_of(basis, support));
  }
  r.checks.push_back(nondeg);
  usable = odd.pass && nondeg.pass;
}

void parity_checks(const AlgebraSpec& spec, ValidationReport& r) {
  const GradedBasis& basis = *spec.basis;
  Check prod{"product_parity", true, {}, ""};
  for (const auto& [n, t] : spec.products) {
    for (const auto& [idx, v] : t.entries()) {
      int s = n & 1;
      for (int k = 0; k < n; ++k) s ^= pbit(basis, idx[static_cast<std::size_t>(k)]);
      if (s != pbit(basis, idx.back()))
        fail(prod, idx, "product[" + std::to_string(n) + "] entry " + names_of(basis, idx) + " has the wrong output parity");
    }
  }
  for (const auto& [n, t] : spec.cyclic) {
    for (const auto& [idx, v] : t.entries()) {
      int s = 0;
      for (int i : idx) s ^= 1 ^ pbit(basis, i);
      if (s) fail(prod, idx, "cyclic[" + std::to_string(n) + "] entry " + names_of(basis, idx) + " is odd");
    }
  }
  r.checks.push_back(prod);
  auto op_check = [&](const std::string& name, const RationalMatrix& m) {
    Check c{name, true, {}, ""};
    for (int i = 0; i < m.rows(); ++i)
      for (int j = 0; j < m.cols(); ++j)
        if (sgn(m(i, j)) != 0 && basis.parity(i) == basis.parity(j))
          fail(c, {j, i}, name + " maps " + basis.name(j) + " to " + basis.name(i) + " of the same parity");
    r.checks.push_back(c);
  };
  op_check("I_odd", spec.I);
  if (spec.H) op_check("H_odd", *spec.H);
}

void cyclic_invariance_check(const AlgebraSpec& spec, const std::map<int, SparseTensor>& cyc, ValidationReport& r) {
  const GradedBasis& basis = *spec.basis;
  Check c{"cyclic_invariance", true, {}, ""};
  for (const auto& [n, t] : cyc) {
    for (const auto& [idx, v] : t.entries()) {
      auto rot = rotate_left(idx, 1);
      Rational expected = v * rotation_sign(basis, idx, 1);
      if (t.get(rot) != expected)
        fail(c, idx, "m" + names_of(basis, idx) + " = " + format_rational(v) + " but m" + names_of(basis, rot) +
                         " = " + format_rational(t.get(rot)));
    }
  }
  r.checks.push_back(c);
}

void beta_invariance_check(const AlgebraSpec& spec, ValidationReport& r) {
  const GradedBasis& basis = *spec.basis;
  const int d = spec.dimension();
  RationalMatrix b = bilinear_matrix(*spec.beta);
  // beta(I a, b) + (-1)^a beta(a, I b)
  RationalMatrix lhs = spec.I.transpose() * b;
  RationalMatrix rhs = b * spec.I;
  Check c{"beta_invariance", true, {}, ""};
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) {
      Rational v = lhs(i, j) + (pbit(basis, i) ? Rational(-rhs(i, j)) : rhs(i, j));
      if (sgn(v) != 0) fail(c, {i, j}, "beta(I a, b) + (-1)^a beta(a, I b) = " + format_rational(v) + " at " + names_of(basis, {i, j}));
    }
  r.checks.push_back(c);
}

void functional_equation_check(const AlgebraSpec& spec, const std::map<int, SparseTensor>& cyc,
                               const std::string& name, ValidationReport& r) {
  BVSpace space = algebra_space(spec);
  Functional v = vertex_functional(cyc, space.parity);
  Functional eq = i_dual(v, spec.I, space);
  Functional half = bracket(v, v, space);
  half *= Rational(1, 2);
  eq += half;
  Check c{name, true, {}, ""};
  if (!eq.is_zero()) {
    const auto& [key, coeff] = *eq.terms().begin();
    std::vector<int> letters;
    for (const auto& w : key.monomial) letters.insert(letters.end(), w.begin(), w.end());
    fail(c, letters, "I^vee V + 1/2 {V, V} has the nonzero term " + describe_term(*spec.basis, key, coeff));
  }
  r.checks.push_back(c);
}

}  // namespace

SparseTensor make_product_tensor(const BasisPtr& basis, int arity) {
  std::vector<Slot> slots(static_cast<std::size_t>(arity), Slot{basis, Variance::covector, true});
  slots.push_back(Slot{basis, Variance::vector, false});
  return SparseTensor(std::move(slots));
}

SparseTensor make_cyclic_tensor(const BasisPtr& basis, int arity) {
  return SparseTensor(std::vector<Slot>(static_cast<std::size_t>(arity + 1), Slot{basis, Variance::covector, true}));
}

SparseTensor make_beta_tensor(const BasisPtr& basis) {
  return SparseTensor({Slot{basis, Variance::covector, false}, Slot{basis, Variance::covector, false}});
}

bool ValidationReport::pass() const {
  for (const auto& c : checks)
    if (!c.pass) return false;
  return true;
}

void ValidationReport::merge(const ValidationReport& other) {
  checks.insert(checks.end(), other.checks.begin(), other.checks.end());
}

const Check* ValidationReport::find(const std::string& name) const {
  for (const auto& c : checks)
    if (c.name == name) return &c;
  return nullptr;
}

SparseTensor cyclic_tensor_from_product(const SparseTensor& product, const SparseTensor& beta) {
  const int n = product.order() - 1;
  if (n < 2 || product.slots().back().variance != Variance::vector)
    throw ContractionError("cyclic_tensor_from_product: expected a raw product tensor");
  if (beta.order() != 2) throw ContractionError("cyclic_tensor_from_product: expected a 2-slot scalar product");
  const BasisPtr& basis = product.slots()[0].space;
  SparseTensor out = make_cyclic_tensor(basis, n);
  for (const auto& [idx, v] : product.entries()) {
    std::vector<int> inputs(idx.begin(), idx.end() - 1);
    const int c = idx.back();
    Rational sv = lowering_sign(*basis, inputs) > 0 ? v : Rational(-v);
    for (int d = 0; d < basis->dimension(); ++d) {
      Rational b = beta.get({c, d});
      if (sgn(b) == 0) continue;
      std::vector<int> key = inputs;
      key.push_back(d);
      out.add(key, sv * b);
    }
  }
  return out;
}

SparseTensor product_from_cyclic(const SparseTensor& cyclic, const SparseTensor& beta) {
  const int n = cyclic.order() - 1;
  const BasisPtr& basis = cyclic.slots()[0].space;
  RationalMatrix binv = inverse(bilinear_matrix(beta));
  SparseTensor out = make_product_tensor(basis, n);
  for (const auto& [idx, v] : cyclic.entries()) {
    std::vector<int> inputs(idx.begin(), idx.end() - 1);
    const int d = idx.back();
    Rational sv = lowering_sign(*basis, inputs) > 0 ? v : Rational(-v);
    for (int c = 0; c < basis->dimension(); ++c) {
      const Rational& w = binv(d, c);
      if (sgn(w) == 0) continue;
      std::vector<int> key = inputs;
      key.push_back(c);
      out.add(key, sv * w);
    }
  }
  return out;
}

std::map<int, SparseTensor> cyclic_tensors(const AlgebraSpec& spec) {
  std::map<int, SparseTensor> out = spec.cyclic;
  for (const auto& [n, t] : spec.products) {
    if (!spec.beta) throw ArgumentError("lowering a product requires a scalar product");
    SparseTensor low = cyclic_tensor_from_product(t, *spec.beta);
    auto it = out.find(n);
    if (it == out.end()) {
      out.emplace(n, std::move(low));
    } else {
      for (const auto& [idx, v] : low.entries()) it->second.add(idx, v);
    }
  }
  return out;
}

std::map<int, SparseTensor> raw_products(const AlgebraSpec& spec) {
  std::map<int, SparseTensor> out = spec.products;
  for (const auto& [n, t] : spec.cyclic) {
    if (!spec.beta) throw ArgumentError("raising a cyclic tensor requires a scalar product");
    SparseTensor raw = product_from_cyclic(t, *spec.beta);
    auto it = out.find(n);
    if (it == out.end()) {
      out.emplace(n, std::move(raw));
    } else {
      for (const auto& [idx, v] : raw.entries()) it->second.add(idx, v);
    }
  }
  return out;
}

BVSpace algebra_space(const AlgebraSpec& spec) {
  if (!spec.beta) throw ArgumentError("the algebra has no scalar product");
  BVSpace space;
  const GradedBasis& basis = *spec.basis;
  for (int i = 0; i < basis.dimension(); ++i) {
    space.parity.push_back(static_cast<std::uint8_t>(1 ^ pbit(basis, i)));
    space.names.push_back(basis.name(i));
  }
  space.omega = bilinear_matrix(beta_inverse(*spec.beta));
  return space;
}

Functional vertex_functional(const std::map<int, SparseTensor>& cyclic, const std::vector<std::uint8_t>& parity) {
  Functional v;
  for (const auto& [n, t] : cyclic) {
    const Rational weight(1, n + 1);
    for (const auto& [idx, c] : t.entries()) v.add(0, {Word(idx.begin(), idx.end())}, c * weight, parity);
  }
  return v;
}

ValidationReport validate_cyclic_dga(const AlgebraSpec& spec) {
  ValidationReport r;
  const GradedBasis& basis = *spec.basis;
  const int d = spec.dimension();
  bool usable = false;
  beta_checks(spec, r, usable);
  parity_checks(spec, r);
  Check arity{"arity", true, {}, ""};
  for (const auto& [n, t] : spec.products)
    if (n != 2 && !t.is_zero()) fail(arity, {n}, "associative algebra with a nonzero product of arity " + std::to_string(n));
  for (const auto& [n, t] : spec.cyclic)
    if (n != 2 && !t.is_zero()) fail(arity, {n}, "associative algebra with a nonzero product of arity " + std::to_string(n));
  r.checks.push_back(arity);
  if (!usable || !arity.pass) return r;

  auto cyc = cyclic_tensors(spec);
  cyclic_invariance_check(spec, cyc, r);

  auto raw = raw_products(spec);
  SparseTensor m2 = raw.count(2) ? raw.at(2) : make_product_tensor(spec.basis, 2);
  Table t = dense_product(m2, d);
  auto mul = [&](const std::vector<Rational>& x, const std::vector<Rational>& y) {
    std::vector<Rational> z = zero_vector(d);
    for (int a = 0; a < d; ++a) {
      if (sgn(x[static_cast<std::size_t>(a)]) == 0) continue;
      for (int b = 0; b < d; ++b) {
        if (sgn(y[static_cast<std::size_t>(b)]) == 0) continue;
        Rational xy = x[static_cast<std::size_t>(a)] * y[static_cast<std::size_t>(b)];
        for (int c = 0; c < d; ++c) z[static_cast<std::size_t>(c)] += xy * t[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)][static_cast<std::size_t>(c)];
      }
    }
    return z;
  };
  auto unit = [&](int i) {
    std::vector<Rational> e = zero_vector(d);
    e[static_cast<std::size_t>(i)] = 1;
    return e;
  };

  Check assoc{"associativity", true, {}, ""};
  for (int a = 0; a < d && assoc.pass; ++a)
    for (int b = 0; b < d && assoc.pass; ++b)
      for (int c = 0; c < d && assoc.pass; ++c) {
        auto lhs = mul(mul(unit(a), unit(b)), unit(c));
        auto rhs = mul(unit(a), mul(unit(b), unit(c)));
        if (lhs != rhs) fail(assoc, {a, b, c}, "(ab)c != a(bc) at " + names_of(basis, {a, b, c}));
      }
  r.checks.push_back(assoc);

  Check leib{"leibniz", true, {}, ""};
  for (int a = 0; a < d && leib.pass; ++a)
    for (int b = 0; b < d && leib.pass; ++b) {
      auto lhs = spec.I.apply(mul(unit(a), unit(b)));
      auto t1 = mul(spec.I.apply(unit(a)), unit(b));
      auto t2 = mul(unit(a), spec.I.apply(unit(b)));
      const bool odd_a = pbit(basis, a);
      for (int c = 0; c < d; ++c) {
        Rational v = lhs[static_cast<std::size_t>(c)] - t1[static_cast<std::size_t>(c)] -
                     (odd_a ? Rational(-t2[static_cast<std::size_t>(c)]) : t2[static_cast<std::size_t>(c)]);
        if (sgn(v) != 0) {
          fail(leib, {a, b}, "I(ab) != I(a)b + (-1)^a a I(b) at " + names_of(basis, {a, b}));
          break;
        }
      }
    }
  r.checks.push_back(leib);

  beta_invariance_check(spec, r);
  functional_equation_check(spec, cyc, "contracted_associativity", r);
  return r;
}

ValidationReport validate_a_infinity(const AlgebraSpec& spec) {
  ValidationReport r;
  bool usable = false;
  beta_checks(spec, r, usable);
  parity_checks(spec, r);
  if (!usable) return r;
  auto cyc = cyclic_tensors(spec);
  cyclic_invariance_check(spec, cyc, r);
  beta_invariance_check(spec, r);
  functional_equation_check(spec, cyc, "a_infinity_relations", r);
  return r;
}

ValidationReport validate(const AlgebraSpec& spec) {
  return spec.kind == AlgebraKind::associative ? validate_cyclic_dga(spec) : validate_a_infinity(spec);
}

ValidationReport check_delta_m_zero(const AlgebraSpec& spec) {
  ValidationReport r;
  BVSpace space = algebra_space(spec);
  for (const auto& [n, t] : cyclic_tensors(spec)) {
    Check c{"delta_m" + std::to_string(n), true, {}, ""};
    if (n + 1 >= 4) {
      Functional vn = vertex_functional({{n, t}}, space.parity);
      Functional dv = delta(vn, space);
      if (!dv.is_zero()) {
        const auto& [key, coeff] = *dv.terms().begin();
        std::vector<int> letters;
        for (const auto& w : key.monomial) letters.insert(letters.end(), w.begin(), w.end());
        fail(c, letters, "Delta m_" + std::to_string(n) + " has the nonzero term " + describe_term(*spec.basis, key, coeff));
      }
    }
    r.checks.push_back(c);
  }
  return r;
}

AlgebraSpec double_algebra(const AlgebraSpec& spec) {
  if (spec.beta) throw ArgumentError("double: the input already has a scalar product");
  if (!spec.cyclic.empty()) throw ArgumentError("double: cyclic tensors require a scalar product");
  const GradedBasis& basis = *spec.basis;
  const int d = basis.dimension();
  std::vector<GradedBasis::Element> elems = basis.elements();
  for (int i = 0; i < d; ++i) elems.push_back({basis.name(i) + "*", flip(basis.parity(i))});
  auto doubled = std::make_shared<const GradedBasis>(elems);

  AlgebraSpec out;
  out.kind = spec.kind;
  out.basis = doubled;
  SparseTensor beta = make_beta_tensor(doubled);
  for (int i = 0; i < d; ++i) {
    beta.set({i, d + i}, 1);
    beta.set({d + i, i}, 1);
  }
  out.beta = beta;

  // Lower each product against the dual letter, then fill in the cyclic
  // rotations so the dual letter appears in every position.
  for (const auto& [n, t] : spec.products) {
    SparseTensor cyc = make_cyclic_tensor(doubled, n);
    for (const auto& [idx, v] : t.entries()) {
      std::vector<int> inputs(idx.begin(), idx.end() - 1);
      std::vector<int> key = inputs;
      key.push_back(d + idx.back());
      Rational sv = lowering_sign(basis, inputs) > 0 ? v : Rational(-v);
      for (std::size_t r = 0; r < key.size(); ++r) {
        cyc.add(rotate_left(key, r), rotation_sign(*doubled, key, r) > 0 ? sv : Rational(-sv));
      }
    }
    out.cyclic.emplace(n, std::move(cyc));
  }

  auto extend = [&](const RationalMatrix& m, int dual_sign) {
    RationalMatrix e(2 * d, 2 * d);
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) {
        if (sgn(m(i, j)) == 0) continue;
        e(i, j) = m(i, j);
        // dual action on (Pi A)^dual: a_i^* -> sum_j s (-1)^{p_j} m(i, j) a_j^*
        Rational v = m(i, j);
        if (pbit(basis, j)) v = -v;
        if (dual_sign < 0) v = -v;
        e(d + j, d + i) = v;
      }
    return e;
  };
  out.I = extend(spec.I, -1);
  if (spec.H) out.H = extend(*spec.H, +1);
  return out;
}

}  // namespace ribbonbv
