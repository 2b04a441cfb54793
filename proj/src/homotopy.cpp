#include "ribbonbv/homotopy.hpp"

#include <sstream>

namespace ribbonbv {

namespace {

using Vec = std::vector<Rational>;

bool odd_at(const GradedBasis& b, int i) { return b.parity(i) == Parity::odd; }

// Basis of a graded subspace spanned by `span`, made of homogeneous vectors
// (parity components of the spanning set, lowest-index independent subset).
std::vector<Vec> homogeneous_basis(const std::vector<Vec>& span, const std::vector<bool>& odd, int dim) {
  std::vector<Vec> parts;
  for (const auto& v : span) {
    for (int p = 0; p < 2; ++p) {
      Vec part(static_cast<std::size_t>(dim));
      bool nonzero = false;
      for (int i = 0; i < dim; ++i) {
        if (odd[static_cast<std::size_t>(i)] == (p == 1) && sgn(v[static_cast<std::size_t>(i)]) != 0) {
          part[static_cast<std::size_t>(i)] = v[static_cast<std::size_t>(i)];
          nonzero = true;
        }
      }
      if (nonzero) parts.push_back(std::move(part));
    }
  }
  if (parts.empty()) return {};
  std::vector<Vec> out;
  for (int c : pivot_columns(from_columns(parts, dim))) out.push_back(parts[static_cast<std::size_t>(c)]);
  return out;
}

bool vector_odd(const Vec& v, const std::vector<bool>& odd) {
  for (std::size_t i = 0; i < v.size(); ++i)
    if (sgn(v[i]) != 0) return odd[i];
  return false;
}

// Vectors of `candidates` extending `base` to a basis of span(base, candidates), lowest index first.
std::vector<Vec> complement(const std::vector<Vec>& base, const std::vector<Vec>& candidates, int dim) {
  std::vector<Vec> all = base;
  all.insert(all.end(), candidates.begin(), candidates.end());
  std::vector<Vec> out;
  if (all.empty()) return out;
  for (int c : pivot_columns(from_columns(all, dim)))
    if (c >= static_cast<int>(base.size())) out.push_back(candidates[static_cast<std::size_t>(c) - base.size()]);
  return out;
}

Rational form(const RationalMatrix& g, const Vec& a, const Vec& b) {
  Rational s = 0;
  for (int i = 0; i < g.rows(); ++i) {
    if (sgn(a[static_cast<std::size_t>(i)]) == 0) continue;
    for (int j = 0; j < g.cols(); ++j) s += a[static_cast<std::size_t>(i)] * g(i, j) * b[static_cast<std::size_t>(j)];
  }
  return s;
}

RationalMatrix rows(const RationalMatrix& m, int from, int count) {
  RationalMatrix out(count, m.cols());
  for (int r = 0; r < count; ++r)
    for (int c = 0; c < m.cols(); ++c) out(r, c) = m(from + r, c);
  return out;
}

std::string entry_name(const GradedBasis& b, int i, int j) { return "(" + b.name(i) + "," + b.name(j) + ")"; }

}  // namespace

HomotopyData validate_homotopy(const AlgebraSpec& spec, const RationalMatrix& H) {
  if (!spec.beta) throw HomotopyError("the algebra has no scalar product");
  const GradedBasis& basis = *spec.basis;
  const int d = spec.dimension();
  if (H.rows() != d || H.cols() != d) throw HomotopyError("H has the wrong dimensions");
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j)
      if (sgn(H(i, j)) != 0 && basis.parity(i) == basis.parity(j))
        throw HomotopyError("H is not odd: it maps " + basis.name(j) + " to " + basis.name(i), {j, i});

  const RationalMatrix B = bilinear_matrix(*spec.beta);
  // beta(H a, b) - (-1)^a beta(a, H b)
  const RationalMatrix hb = H.transpose() * B;
  const RationalMatrix bh = B * H;
  for (int a = 0; a < d; ++a)
    for (int b = 0; b < d; ++b) {
      Rational v = hb(a, b) - (odd_at(basis, a) ? Rational(-bh(a, b)) : bh(a, b));
      if (sgn(v) != 0) throw HomotopyError("H is not self-adjoint at " + entry_name(basis, a, b), {a, b});
    }

  const RationalMatrix I2 = spec.I * spec.I;
  const RationalMatrix comm = H * I2 - I2 * H;
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j)
      if (sgn(comm(i, j)) != 0) throw HomotopyError("H does not commute with I^2 at " + entry_name(basis, i, j), {i, j});

  HomotopyData data;
  data.H = H;
  data.P = RationalMatrix::identity(d) - (spec.I * H + H * spec.I);
  const RationalMatrix p2 = data.P * data.P - data.P;
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j)
      if (sgn(p2(i, j)) != 0) throw HomotopyError("P = Id - [I, H] is not idempotent at " + entry_name(basis, i, j), {i, j});

  std::vector<Vec> cols;
  std::vector<GradedBasis::Element> names;
  for (int j : pivot_columns(data.P)) {
    cols.push_back(data.P.column(j));
    names.push_back({basis.name(j), basis.parity(j)});
  }
  const int db = static_cast<int>(cols.size());
  data.inclusion = db ? from_columns(cols, d) : RationalMatrix(d, 0);
  data.basis_B = std::make_shared<const GradedBasis>(names);
  if (db == 0) {
    data.projection = RationalMatrix(0, d);
    data.beta_B = RationalMatrix(0, 0);
    data.I_B = RationalMatrix(0, 0);
    return data;
  }
  const RationalMatrix ct = data.inclusion.transpose();
  data.projection = inverse(ct * data.inclusion) * ct * data.P;
  data.beta_B = ct * B * data.inclusion;
  try {
    (void)inverse(data.beta_B);
  } catch (const SingularError& e) {
    throw SingularError("beta restricted to B = im P is degenerate", e.radical);
  }
  data.I_B = data.projection * spec.I * data.inclusion;
  return data;
}

HomotopyData construct_homotopy(const AlgebraSpec& spec) {
  if (!spec.beta) throw HomotopyError("the algebra has no scalar product");
  const GradedBasis& basis = *spec.basis;
  const int d = spec.dimension();
  std::vector<bool> odd(static_cast<std::size_t>(d));
  for (int i = 0; i < d; ++i) odd[static_cast<std::size_t>(i)] = odd_at(basis, i);
  const RationalMatrix B = bilinear_matrix(*spec.beta);
  const RationalMatrix& I = spec.I;

  // A = K + C with K = ker I^2 and C its beta-orthogonal.
  std::vector<Vec> K = homogeneous_basis(kernel(I * I), odd, d);
  const int dk = static_cast<int>(K.size());
  RationalMatrix Kb = dk ? from_columns(K, d) : RationalMatrix(d, 0);
  RationalMatrix GK = Kb.transpose() * B * Kb;
  if (dk && rank(GK) < dk)
    throw HomotopyError("beta is degenerate on ker I^2; the splitting recipe does not apply, supply H explicitly");
  std::vector<Vec> C;
  if (dk) {
    C = homogeneous_basis(kernel(Kb.transpose() * B), odd, d);
  } else {
    for (int i = 0; i < d; ++i) {
      Vec e(static_cast<std::size_t>(d));
      e[static_cast<std::size_t>(i)] = 1;
      C.push_back(e);
    }
  }
  const int dc = static_cast<int>(C.size());
  std::vector<Vec> all = K;
  all.insert(all.end(), C.begin(), C.end());
  RationalMatrix M = from_columns(all, d);
  RationalMatrix Minv = inverse(M);
  RationalMatrix H(d, d);

  if (dc) {
    RationalMatrix Cb = from_columns(C, d);
    RationalMatrix Crows = rows(Minv, dk, dc);
    RationalMatrix IC = Crows * I * Cb;  // I on C in C coordinates
    H = H + Cb * (Rational(1, 2) * inverse(IC)) * Crows;
  }

  if (dk) {
    RationalMatrix Krows = rows(Minv, 0, dk);
    RationalMatrix IK = Krows * I * Kb;  // I on K, squares to zero
    std::vector<bool> kodd(static_cast<std::size_t>(dk));
    for (int i = 0; i < dk; ++i) kodd[static_cast<std::size_t>(i)] = vector_odd(K[static_cast<std::size_t>(i)], odd);

    std::vector<Vec> Z = homogeneous_basis(kernel(IK), kodd, dk);
    std::vector<Vec> Bd;
    for (int c : pivot_columns(IK)) Bd.push_back(IK.column(c));
    std::vector<Vec> R = complement(Bd, Z, dk);

    std::vector<Vec> Rperp;
    if (R.empty()) {
      for (int i = 0; i < dk; ++i) {
        Vec e(static_cast<std::size_t>(dk));
        e[static_cast<std::size_t>(i)] = 1;
        Rperp.push_back(e);
      }
    } else {
      RationalMatrix Rb = from_columns(R, dk);
      Rperp = homogeneous_basis(kernel(Rb.transpose() * GK), kodd, dk);
    }
    std::vector<Vec> W = complement(Bd, Rperp, dk);
    const std::size_t nw = W.size();

    // Make W isotropic by adding boundaries of matching parity.
    if (nw) {
      std::vector<std::pair<std::size_t, std::size_t>> unknowns;  // (boundary l, w k)
      for (std::size_t l = 0; l < Bd.size(); ++l)
        for (std::size_t k = 0; k < nw; ++k)
          if (vector_odd(Bd[l], kodd) == vector_odd(W[k], kodd)) unknowns.emplace_back(l, k);
      std::vector<std::pair<std::size_t, std::size_t>> eqs;
      for (std::size_t i = 0; i < nw; ++i)
        for (std::size_t j = i; j < nw; ++j) eqs.emplace_back(i, j);
      if (!unknowns.empty()) {
        RationalMatrix sys(static_cast<int>(eqs.size()), static_cast<int>(unknowns.size()));
        Vec rhs(eqs.size());
        for (std::size_t e = 0; e < eqs.size(); ++e) {
          auto [i, j] = eqs[e];
          rhs[e] = -form(GK, W[i], W[j]);
          for (std::size_t u = 0; u < unknowns.size(); ++u) {
            auto [l, k] = unknowns[u];
            Rational coeff = 0;
            if (k == j) coeff += form(GK, W[i], Bd[l]);
            if (k == i) coeff += form(GK, Bd[l], W[j]);
            sys(static_cast<int>(e), static_cast<int>(u)) = coeff;
          }
        }
        Vec x;
        if (!solve(sys, rhs, x)) throw HomotopyError("could not choose an isotropic complement on ker I^2");
        for (std::size_t u = 0; u < unknowns.size(); ++u) {
          auto [l, k] = unknowns[u];
          for (int r = 0; r < dk; ++r) W[k][static_cast<std::size_t>(r)] += x[u] * Bd[l][static_cast<std::size_t>(r)];
        }
      }
    }

    // Basis R | W | I W of K; H sends I w_k to w_k and kills R and W.
    std::vector<Vec> q = R;
    q.insert(q.end(), W.begin(), W.end());
    for (const auto& w : W) q.push_back(IK.apply(w));
    RationalMatrix Q = from_columns(q, dk);
    RationalMatrix D(dk, dk);
    const int nr = static_cast<int>(R.size());
    for (std::size_t k = 0; k < nw; ++k) D(nr + static_cast<int>(k), nr + static_cast<int>(nw + k)) = 1;
    RationalMatrix HK = Q * D * inverse(Q);
    H = H + Kb * HK * Krows;
  }
  return validate_homotopy(spec, H);
}

HomotopyData homotopy_for(const AlgebraSpec& spec) {
  return spec.H ? validate_homotopy(spec, *spec.H) : construct_homotopy(spec);
}

std::vector<Rational> projector_image(const HomotopyData& data, const std::vector<Rational>& v) {
  if (static_cast<int>(v.size()) != data.projection.cols()) throw ArgumentError("projector_image: wrong vector length");
  return data.projection.apply(v);
}

BVSpace b_space(const HomotopyData& data) {
  BVSpace space;
  const GradedBasis& b = *data.basis_B;
  for (int i = 0; i < b.dimension(); ++i) {
    space.parity.push_back(static_cast<std::uint8_t>(1 ^ bit(b.parity(i))));
    space.names.push_back(b.name(i));
  }
  space.omega = b.dimension() ? inverse(data.beta_B) : RationalMatrix(0, 0);
  return space;
}

}  // namespace ribbonbv
