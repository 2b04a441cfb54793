#include "ribbonbv/superlinear.hpp"

#include <algorithm>
#include <set>
#include <sstream>

namespace ribbonbv {

Rational parse_rational(const std::string& text) {
  std::string t;
  for (char c : text) {
    if (c != ' ' && c != '\t') t.push_back(c);
  }
  if (t.empty()) throw std::invalid_argument("empty rational");
  std::size_t i = (t[0] == '-' || t[0] == '+') ? 1 : 0;
  bool seen_slash = false;
  bool digit_before = false;
  bool digit_after = false;
  for (; i < t.size(); ++i) {
    if (t[i] == '/') {
      if (seen_slash) throw std::invalid_argument("malformed rational '" + text + "'");
      seen_slash = true;
    } else if (t[i] >= '0' && t[i] <= '9') {
      (seen_slash ? digit_after : digit_before) = true;
    } else {
      throw std::invalid_argument("malformed rational '" + text + "'");
    }
  }
  if (!digit_before || (seen_slash && !digit_after)) {
    throw std::invalid_argument("malformed rational '" + text + "'");
  }
  if (t[0] == '+') t.erase(0, 1);
  Rational q;
  if (q.set_str(t, 10) != 0) throw std::invalid_argument("malformed rational '" + text + "'");
  if (q.get_den() == 0) throw std::invalid_argument("zero denominator in '" + text + "'");
  q.canonicalize();
  return q;
}

std::string format_rational(const Rational& q) { return q.get_str(); }

const char* to_string(Parity p) { return p == Parity::even ? "even" : "odd"; }

GradedBasis::GradedBasis(std::vector<Element> elements) : elements_(std::move(elements)) {
  std::set<std::string> seen;
  for (const auto& e : elements_) {
    if (e.name.empty()) throw ArgumentError("basis element with empty name");
    if (!seen.insert(e.name).second) throw ArgumentError("duplicate basis name '" + e.name + "'");
  }
}

int GradedBasis::index_of(const std::string& name) const {
  for (std::size_t i = 0; i < elements_.size(); ++i) {
    if (elements_[i].name == name) return static_cast<int>(i);
  }
  return -1;
}

bool GradedBasis::operator==(const GradedBasis& other) const {
  if (elements_.size() != other.elements_.size()) return false;
  for (std::size_t i = 0; i < elements_.size(); ++i) {
    if (elements_[i].name != other.elements_[i].name ||
        elements_[i].parity != other.elements_[i].parity)
      return false;
  }
  return true;
}

namespace {

void check_permutation(std::span<const int> order) {
  std::vector<char> seen(order.size(), 0);
  for (int v : order) {
    if (v < 0 || static_cast<std::size_t>(v) >= order.size() || seen[static_cast<std::size_t>(v)])
      throw ArgumentError("koszul_sign: not a permutation");
    seen[static_cast<std::size_t>(v)] = 1;
  }
}

}  // namespace

int koszul_sign_bits(std::span<const int> order, std::span<const std::uint8_t> parities) {
  if (order.size() != parities.size()) throw ArgumentError("koszul_sign: length mismatch");
  check_permutation(order);
  int flips = 0;
  for (std::size_t a = 0; a < order.size(); ++a) {
    if (!parities[static_cast<std::size_t>(order[a])]) continue;
    for (std::size_t b = a + 1; b < order.size(); ++b) {
      if (order[b] < order[a] && parities[static_cast<std::size_t>(order[b])]) ++flips;
    }
  }
  return (flips & 1) ? -1 : 1;
}

int koszul_sign(std::span<const int> order, std::span<const Parity> parities) {
  std::vector<std::uint8_t> bits(parities.size());
  for (std::size_t i = 0; i < parities.size(); ++i) bits[i] = static_cast<std::uint8_t>(bit(parities[i]));
  return koszul_sign_bits(order, bits);
}

// ---------------------------------------------------------------------------

RationalMatrix::RationalMatrix(int rows, int cols)
    : rows_(rows), cols_(cols), data_(static_cast<std::size_t>(rows * cols)) {}

RationalMatrix RationalMatrix::identity(int n) {
  RationalMatrix m(n, n);
  for (int i = 0; i < n; ++i) m(i, i) = 1;
  return m;
}

std::vector<Rational> RationalMatrix::column(int c) const {
  std::vector<Rational> v(static_cast<std::size_t>(rows_));
  for (int r = 0; r < rows_; ++r) v[static_cast<std::size_t>(r)] = (*this)(r, c);
  return v;
}

void RationalMatrix::set_column(int c, const std::vector<Rational>& v) {
  for (int r = 0; r < rows_; ++r) (*this)(r, c) = v[static_cast<std::size_t>(r)];
}

RationalMatrix RationalMatrix::transpose() const {
  RationalMatrix t(cols_, rows_);
  for (int r = 0; r < rows_; ++r)
    for (int c = 0; c < cols_; ++c) t(c, r) = (*this)(r, c);
  return t;
}

bool RationalMatrix::is_zero() const {
  return std::all_of(data_.begin(), data_.end(), [](const Rational& q) { return sgn(q) == 0; });
}

bool RationalMatrix::operator==(const RationalMatrix& other) const {
  return rows_ == other.rows_ && cols_ == other.cols_ && data_ == other.data_;
}

RationalMatrix operator*(const RationalMatrix& a, const RationalMatrix& b) {
  if (a.cols() != b.rows()) throw ArgumentError("matrix product: shape mismatch");
  RationalMatrix c(a.rows(), b.cols());
  for (int i = 0; i < a.rows(); ++i)
    for (int k = 0; k < a.cols(); ++k) {
      if (sgn(a(i, k)) == 0) continue;
      for (int j = 0; j < b.cols(); ++j) {
        if (sgn(b(k, j)) != 0) c(i, j) += a(i, k) * b(k, j);
      }
    }
  return c;
}

RationalMatrix operator+(const RationalMatrix& a, const RationalMatrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) throw ArgumentError("matrix sum: shape mismatch");
  RationalMatrix c(a.rows(), a.cols());
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < a.cols(); ++j) c(i, j) = a(i, j) + b(i, j);
  return c;
}

RationalMatrix operator-(const RationalMatrix& a, const RationalMatrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) throw ArgumentError("matrix difference: shape mismatch");
  RationalMatrix c(a.rows(), a.cols());
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < a.cols(); ++j) c(i, j) = a(i, j) - b(i, j);
  return c;
}

RationalMatrix operator*(const Rational& s, const RationalMatrix& a) {
  RationalMatrix c(a.rows(), a.cols());
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < a.cols(); ++j) c(i, j) = s * a(i, j);
  return c;
}

std::vector<Rational> RationalMatrix::apply(const std::vector<Rational>& v) const {
  if (static_cast<int>(v.size()) != cols_) throw ArgumentError("matrix apply: shape mismatch");
  std::vector<Rational> out(static_cast<std::size_t>(rows_));
  for (int i = 0; i < rows_; ++i)
    for (int j = 0; j < cols_; ++j) {
      if (sgn((*this)(i, j)) != 0 && sgn(v[static_cast<std::size_t>(j)]) != 0)
        out[static_cast<std::size_t>(i)] += (*this)(i, j) * v[static_cast<std::size_t>(j)];
    }
  return out;
}

std::vector<int> row_reduce(RationalMatrix& m) {
  std::vector<int> pivots;
  int row = 0;
  for (int col = 0; col < m.cols() && row < m.rows(); ++col) {
    int pick = -1;
    for (int r = row; r < m.rows(); ++r) {
      if (sgn(m(r, col)) != 0) {
        pick = r;
        break;
      }
    }
    if (pick < 0) continue;
    if (pick != row) {
      for (int c = 0; c < m.cols(); ++c) std::swap(m(pick, c), m(row, c));
    }
    Rational inv = 1 / m(row, col);
    for (int c = col; c < m.cols(); ++c) m(row, c) *= inv;
    for (int r = 0; r < m.rows(); ++r) {
      if (r == row || sgn(m(r, col)) == 0) continue;
      Rational f = m(r, col);
      for (int c = col; c < m.cols(); ++c) m(r, c) -= f * m(row, c);
    }
    pivots.push_back(col);
    ++row;
  }
  return pivots;
}

int rank(RationalMatrix m) { return static_cast<int>(row_reduce(m).size()); }

std::vector<int> pivot_columns(const RationalMatrix& m) {
  RationalMatrix copy = m;
  return row_reduce(copy);
}

std::vector<std::vector<Rational>> kernel(const RationalMatrix& m) {
  RationalMatrix r = m;
  std::vector<int> pivots = row_reduce(r);
  std::vector<char> is_pivot(static_cast<std::size_t>(m.cols()), 0);
  for (int p : pivots) is_pivot[static_cast<std::size_t>(p)] = 1;
  std::vector<std::vector<Rational>> basis;
  for (int free = 0; free < m.cols(); ++free) {
    if (is_pivot[static_cast<std::size_t>(free)]) continue;
    std::vector<Rational> v(static_cast<std::size_t>(m.cols()));
    v[static_cast<std::size_t>(free)] = 1;
    for (std::size_t k = 0; k < pivots.size(); ++k) {
      v[static_cast<std::size_t>(pivots[k])] = -r(static_cast<int>(k), free);
    }
    basis.push_back(std::move(v));
  }
  return basis;
}

RationalMatrix inverse(const RationalMatrix& m) {
  if (m.rows() != m.cols()) throw ArgumentError("inverse of a non-square matrix");
  const int n = m.rows();
  RationalMatrix aug(n, 2 * n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) aug(i, j) = m(i, j);
    aug(i, n + i) = 1;
  }
  std::vector<int> pivots = row_reduce(aug);
  if (static_cast<int>(pivots.size()) < n || (n > 0 && pivots[static_cast<std::size_t>(n - 1)] >= n)) {
    throw SingularError("matrix is singular", kernel(m));
  }
  RationalMatrix inv(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) inv(i, j) = aug(i, n + j);
  return inv;
}

bool solve(const RationalMatrix& m, const std::vector<Rational>& b, std::vector<Rational>& x) {
  RationalMatrix aug(m.rows(), m.cols() + 1);
  for (int i = 0; i < m.rows(); ++i) {
    for (int j = 0; j < m.cols(); ++j) aug(i, j) = m(i, j);
    aug(i, m.cols()) = b[static_cast<std::size_t>(i)];
  }
  std::vector<int> pivots = row_reduce(aug);
  if (!pivots.empty() && pivots.back() == m.cols()) return false;
  x.assign(static_cast<std::size_t>(m.cols()), Rational(0));
  for (std::size_t k = 0; k < pivots.size(); ++k) {
    x[static_cast<std::size_t>(pivots[k])] = aug(static_cast<int>(k), m.cols());
  }
  return true;
}

RationalMatrix from_columns(const std::vector<std::vector<Rational>>& columns, int rows) {
  RationalMatrix m(rows, static_cast<int>(columns.size()));
  for (std::size_t c = 0; c < columns.size(); ++c) m.set_column(static_cast<int>(c), columns[c]);
  return m;
}

// ---------------------------------------------------------------------------

bool Slot::same_space(const Slot& other) const {
  return space == other.space || (space && other.space && *space == *other.space);
}

SparseTensor::SparseTensor(std::vector<Slot> slots) : slots_(std::move(slots)) {
  for (const auto& s : slots_) {
    if (!s.space) throw ArgumentError("tensor slot without a basis");
  }
}

void SparseTensor::check_index(const Index& idx) const {
  if (idx.size() != slots_.size()) throw ArgumentError("tensor index has wrong order");
  for (std::size_t k = 0; k < idx.size(); ++k) {
    if (idx[k] < 0 || idx[k] >= slots_[k].space->dimension())
      throw ArgumentError("tensor index out of range");
  }
}

Rational SparseTensor::get(const Index& idx) const {
  check_index(idx);
  auto it = entries_.find(idx);
  return it == entries_.end() ? Rational(0) : it->second;
}

void SparseTensor::set(const Index& idx, const Rational& value) {
  check_index(idx);
  if (sgn(value) == 0) {
    entries_.erase(idx);
  } else {
    entries_[idx] = value;
  }
}

void SparseTensor::add(const Index& idx, const Rational& value) {
  if (sgn(value) == 0) return;
  check_index(idx);
  auto [it, inserted] = entries_.try_emplace(idx, value);
  if (!inserted) {
    it->second += value;
    if (sgn(it->second) == 0) entries_.erase(it);
  }
}

Parity SparseTensor::parity_at(const Index& idx) const {
  Parity p = Parity::even;
  for (std::size_t k = 0; k < idx.size(); ++k) p = p + slots_[k].parity_of(idx[k]);
  return p;
}

bool SparseTensor::operator==(const SparseTensor& other) const {
  if (slots_.size() != other.slots_.size()) return false;
  for (std::size_t k = 0; k < slots_.size(); ++k) {
    if (!slots_[k].same_space(other.slots_[k]) || slots_[k].variance != other.slots_[k].variance ||
        slots_[k].shifted != other.slots_[k].shifted)
      return false;
  }
  return entries_ == other.entries_;
}

SparseTensor tensor_contract(const SparseTensor& t, const SparseTensor& u,
                             const std::vector<std::pair<int, int>>& pairs) {
  const int nt = t.order();
  const int nu = u.order();
  std::vector<char> used_t(static_cast<std::size_t>(nt), 0);
  std::vector<char> used_u(static_cast<std::size_t>(nu), 0);
  for (auto [a, b] : pairs) {
    if (a < 0 || a >= nt || b < 0 || b >= nu) throw ContractionError("contraction slot out of range");
    if (used_t[static_cast<std::size_t>(a)] || used_u[static_cast<std::size_t>(b)])
      throw ContractionError("slot contracted twice");
    used_t[static_cast<std::size_t>(a)] = used_u[static_cast<std::size_t>(b)] = 1;
    const Slot& sa = t.slots()[static_cast<std::size_t>(a)];
    const Slot& sb = u.slots()[static_cast<std::size_t>(b)];
    if (!sa.same_space(sb)) throw ContractionError("contracted slots live on different bases");
    if (sa.variance == sb.variance) throw ContractionError("contracted slots have equal variance");
    if (sa.shifted != sb.shifted) throw ContractionError("contracted slots disagree on the parity shift");
  }

  std::vector<Slot> out_slots;
  std::vector<int> keep_t;
  std::vector<int> keep_u;
  for (int k = 0; k < nt; ++k)
    if (!used_t[static_cast<std::size_t>(k)]) {
      keep_t.push_back(k);
      out_slots.push_back(t.slots()[static_cast<std::size_t>(k)]);
    }
  for (int k = 0; k < nu; ++k)
    if (!used_u[static_cast<std::size_t>(k)]) {
      keep_u.push_back(k);
      out_slots.push_back(u.slots()[static_cast<std::size_t>(k)]);
    }

  // Target arrangement of the composite (t slots, then u slots).
  std::vector<int> order;
  for (int k : keep_t) order.push_back(k);
  for (int k : keep_u) order.push_back(nt + k);
  for (auto [a, b] : pairs) {
    order.push_back(a);
    order.push_back(nt + b);
  }

  SparseTensor out(std::move(out_slots));
  std::vector<std::uint8_t> par(static_cast<std::size_t>(nt + nu));
  for (const auto& [ti, tv] : t.entries()) {
    for (const auto& [ui, uv] : u.entries()) {
      bool match = true;
      for (auto [a, b] : pairs) {
        if (ti[static_cast<std::size_t>(a)] != ui[static_cast<std::size_t>(b)]) {
          match = false;
          break;
        }
      }
      if (!match) continue;
      for (int k = 0; k < nt; ++k)
        par[static_cast<std::size_t>(k)] =
            static_cast<std::uint8_t>(bit(t.slots()[static_cast<std::size_t>(k)].parity_of(ti[static_cast<std::size_t>(k)])));
      for (int k = 0; k < nu; ++k)
        par[static_cast<std::size_t>(nt + k)] =
            static_cast<std::uint8_t>(bit(u.slots()[static_cast<std::size_t>(k)].parity_of(ui[static_cast<std::size_t>(k)])));
      int sign = koszul_sign_bits(order, par);
      SparseTensor::Index idx;
      for (int k : keep_t) idx.push_back(ti[static_cast<std::size_t>(k)]);
      for (int k : keep_u) idx.push_back(ui[static_cast<std::size_t>(k)]);
      out.add(idx, sign > 0 ? Rational(tv * uv) : Rational(-(tv * uv)));
    }
  }
  return out;
}

RationalMatrix bilinear_matrix(const SparseTensor& form) {
  if (form.order() != 2 || !form.slots()[0].same_space(form.slots()[1]))
    throw ArgumentError("expected a 2-slot tensor on a single basis");
  const int n = form.slots()[0].space->dimension();
  RationalMatrix m(n, n);
  for (const auto& [idx, v] : form.entries()) m(idx[0], idx[1]) = v;
  return m;
}

SparseTensor bilinear_tensor(const BasisPtr& basis, const RationalMatrix& m, Variance variance) {
  SparseTensor t({Slot{basis, variance, false}, Slot{basis, variance, false}});
  for (int i = 0; i < m.rows(); ++i)
    for (int j = 0; j < m.cols(); ++j) t.set({i, j}, m(i, j));
  return t;
}

SparseTensor beta_inverse(const SparseTensor& beta) {
  if (beta.order() != 2) throw ArgumentError("beta_inverse: expected a 2-slot form");
  for (const auto& s : beta.slots()) {
    if (s.variance != Variance::covector) throw ArgumentError("beta_inverse: expected covector slots");
  }
  const BasisPtr& basis = beta.slots()[0].space;
  for (const auto& [idx, v] : beta.entries()) {
    if (basis->parity(idx[0]) == basis->parity(idx[1]))
      throw ArgumentError("beta_inverse: form is not odd (pairs equal parities)");
  }
  RationalMatrix b = bilinear_matrix(beta);
  RationalMatrix inv;
  try {
    inv = inverse(b);
  } catch (const SingularError& e) {
    throw SingularError("scalar product is degenerate", e.radical);
  }
  SparseTensor out({Slot{basis, Variance::vector, false}, Slot{basis, Variance::vector, false}});
  for (int i = 0; i < inv.rows(); ++i)
    for (int j = 0; j < inv.cols(); ++j) out.set({i, j}, inv(i, j));
  return out;
}

SparseTensor operator_tensor(const BasisPtr& basis, const RationalMatrix& m) {
  SparseTensor t({Slot{basis, Variance::vector, false}, Slot{basis, Variance::covector, false}});
  for (int i = 0; i < m.rows(); ++i)
    for (int j = 0; j < m.cols(); ++j) t.set({i, j}, m(i, j));
  return t;
}

RationalMatrix operator_matrix(const SparseTensor& op) {
  if (op.order() != 2 || op.slots()[0].variance != Variance::vector ||
      op.slots()[1].variance != Variance::covector)
    throw ArgumentError("expected an operator tensor (vector, covector)");
  const int n = op.slots()[0].space->dimension();
  RationalMatrix m(n, op.slots()[1].space->dimension());
  for (const auto& [idx, v] : op.entries()) m(idx[0], idx[1]) = v;
  return m;
}

int operator_parity(const BasisPtr& basis, const RationalMatrix& m) {
  int parity = -1;
  for (int i = 0; i < m.rows(); ++i)
    for (int j = 0; j < m.cols(); ++j) {
      if (sgn(m(i, j)) == 0) continue;
      int p = bit(basis->parity(i) + basis->parity(j));
      if (parity >= 0 && p != parity) throw ArgumentError("operator is not parity-homogeneous");
      parity = p;
    }
  return parity;
}

}  // namespace ribbonbv
