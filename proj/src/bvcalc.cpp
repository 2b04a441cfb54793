#include "ribbonbv/bvcalc.hpp"

#include <algorithm>
#include <numeric>
#include <set>
#include <sstream>

namespace ribbonbv {

namespace {

int word_parity(const Word& w, const std::vector<std::uint8_t>& parity) {
  int p = 0;
  for (int l : w) p ^= parity[static_cast<std::size_t>(l)];
  return p;
}

bool cycle_less(const Word& a, const Word& b) {
  if (a.size() != b.size()) return a.size() < b.size();
  return a < b;
}

// Sign of moving the first `r` letters of `w` to its end.
int rotation_sign(const Word& w, std::size_t r, const std::vector<std::uint8_t>& parity) {
  int head = 0;
  int tail = 0;
  for (std::size_t i = 0; i < w.size(); ++i) (i < r ? head : tail) ^= parity[static_cast<std::size_t>(w[i])];
  return (head & tail) ? -1 : 1;
}

Word rotated(const Word& w, std::size_t r) {
  Word out(w.begin() + static_cast<std::ptrdiff_t>(r), w.end());
  out.insert(out.end(), w.begin(), w.begin() + static_cast<std::ptrdiff_t>(r));
  return out;
}

struct Flat {
  std::vector<int> letters;
  std::vector<int> cycle_of;
  std::vector<int> offset;  // start of each cycle in `letters`
  std::vector<int> length;
};

Flat flatten(const Monomial& m) {
  Flat f;
  for (std::size_t c = 0; c < m.size(); ++c) {
    f.offset.push_back(static_cast<int>(f.letters.size()));
    f.length.push_back(static_cast<int>(m[c].size()));
    for (int l : m[c]) {
      f.letters.push_back(l);
      f.cycle_of.push_back(static_cast<int>(c));
    }
  }
  return f;
}

// Positions of the arc that follows position `pos` inside its cycle, going
// around until just before `stop` (exclusive); `stop == pos` walks the whole rest.
void append_arc(const Flat& f, int pos, int stop, std::vector<int>& out) {
  const int c = f.cycle_of[static_cast<std::size_t>(pos)];
  const int start = f.offset[static_cast<std::size_t>(c)];
  const int len = f.length[static_cast<std::size_t>(c)];
  int k = pos - start;
  for (int step = 1; step < len; ++step) {
    int q = start + (k + step) % len;
    if (q == stop) break;
    out.push_back(q);
  }
}

}  // namespace

CyclicWordForm canonical_cyclic_form(const Word& letters, const std::vector<std::uint8_t>& parity) {
  if (letters.empty()) throw ArgumentError("canonical_cyclic_form: empty word");
  const std::size_t n = letters.size();
  std::size_t best = 0;
  Word best_word = letters;
  for (std::size_t r = 1; r < n; ++r) {
    Word a = rotated(letters, r);
    if (a < best_word) {
      best = r;
      best_word = std::move(a);
    }
  }
  // Smallest period: a rotation fixing the word must act by +1.
  for (std::size_t d = 1; d < n; ++d) {
    if (n % d != 0) continue;
    if (rotated(letters, d) == letters) {
      if (rotation_sign(letters, d, parity) < 0) return {Word{}, 0};
      break;
    }
  }
  return {rotated(letters, best), rotation_sign(letters, best, parity)};
}

MonomialForm canonicalize(std::vector<Word> cycles, const std::vector<std::uint8_t>& parity) {
  int sign = 1;
  for (auto& c : cycles) {
    if (c.empty()) return {Monomial{}, 0};
    CyclicWordForm form = canonical_cyclic_form(c, parity);
    if (form.sign == 0) return {Monomial{}, 0};
    sign *= form.sign;
    c = std::move(form.word);
  }
  std::vector<int> order(cycles.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    return cycle_less(cycles[static_cast<std::size_t>(a)], cycles[static_cast<std::size_t>(b)]);
  });
  std::vector<std::uint8_t> cpar(cycles.size());
  for (std::size_t i = 0; i < cycles.size(); ++i) cpar[i] = static_cast<std::uint8_t>(word_parity(cycles[i], parity));
  sign *= koszul_sign_bits(order, cpar);
  Monomial out;
  out.reserve(cycles.size());
  for (int i : order) out.push_back(std::move(cycles[static_cast<std::size_t>(i)]));
  for (std::size_t i = 1; i < out.size(); ++i) {
    if (out[i] == out[i - 1] && word_parity(out[i], parity)) return {Monomial{}, 0};
  }
  return {std::move(out), sign};
}

int letter_count(const Monomial& m) {
  int n = 0;
  for (const auto& w : m) n += static_cast<int>(w.size());
  return n;
}

int monomial_parity(const Monomial& m, const std::vector<std::uint8_t>& parity) {
  int p = 0;
  for (const auto& w : m) p ^= word_parity(w, parity);
  return p;
}

// ---------------------------------------------------------------------------

void Functional::add_canonical(const Key& key, const Rational& c) {
  if (sgn(c) == 0) return;
  auto [it, inserted] = terms_.try_emplace(key, c);
  if (!inserted) {
    it->second += c;
    if (sgn(it->second) == 0) terms_.erase(it);
  }
}

void Functional::add(int hbar, std::vector<Word> cycles, const Rational& c,
                     const std::vector<std::uint8_t>& parity) {
  if (sgn(c) == 0) return;
  MonomialForm form = canonicalize(std::move(cycles), parity);
  if (form.sign == 0) return;
  add_canonical(Key{hbar, std::move(form.monomial)}, form.sign > 0 ? c : Rational(-c));
}

Rational Functional::coefficient(int hbar, const Monomial& m) const {
  auto it = terms_.find(Key{hbar, m});
  return it == terms_.end() ? Rational(0) : it->second;
}

Functional& Functional::operator+=(const Functional& other) {
  for (const auto& [k, v] : other.terms_) add_canonical(k, v);
  return *this;
}

Functional& Functional::operator-=(const Functional& other) {
  for (const auto& [k, v] : other.terms_) add_canonical(k, -v);
  return *this;
}

Functional& Functional::operator*=(const Rational& s) {
  if (sgn(s) == 0) {
    terms_.clear();
    return *this;
  }
  for (auto& [k, v] : terms_) v *= s;
  return *this;
}

Functional Functional::hbar_shifted(int shift) const {
  Functional out;
  for (const auto& [k, v] : terms_) out.terms_.emplace(Key{k.hbar + shift, k.monomial}, v);
  return out;
}

Functional Functional::truncated(int max_letters_, int max_hbar) const {
  Functional out;
  for (const auto& [k, v] : terms_) {
    if (k.hbar <= max_hbar && letter_count(k.monomial) <= max_letters_) out.terms_.emplace(k, v);
  }
  return out;
}

int Functional::max_letters() const {
  int m = 0;
  for (const auto& [k, v] : terms_) m = std::max(m, letter_count(k.monomial));
  return m;
}

Functional product(const Functional& f, const Functional& g, const std::vector<std::uint8_t>& parity) {
  Functional out;
  for (const auto& [kf, vf] : f.terms()) {
    for (const auto& [kg, vg] : g.terms()) {
      std::vector<Word> cycles = kf.monomial;
      cycles.insert(cycles.end(), kg.monomial.begin(), kg.monomial.end());
      out.add(kf.hbar + kg.hbar, std::move(cycles), vf * vg, parity);
    }
  }
  return out;
}

namespace {

// Emits the term obtained by gluing flat positions p, q of a concatenated
// monomial: `order` lists p, q, then the letters of `cycles` in order.
void emit_glued(Functional& out, int hbar, const Flat& flat, const std::vector<int>& order,
                std::vector<Word> cycles, const Rational& coeff, const std::vector<std::uint8_t>& parity) {
  std::vector<std::uint8_t> par(flat.letters.size());
  for (std::size_t i = 0; i < flat.letters.size(); ++i) par[i] = parity[static_cast<std::size_t>(flat.letters[i])];
  int sign = koszul_sign_bits(order, par);
  out.add(hbar, std::move(cycles), sign > 0 ? coeff : Rational(-coeff), parity);
}

Word letters_at(const Flat& flat, const std::vector<int>& positions) {
  Word w;
  w.reserve(positions.size());
  for (int p : positions) w.push_back(flat.letters[static_cast<std::size_t>(p)]);
  return w;
}

// All gluings of one letter at position p with one at q (p < q) in `flat`.
// `cross_only` restricts to pairs where p lies in cycles [0, split) and q in
// cycles [split, ...).
void glue_pair(Functional& out, int hbar, const Flat& flat, int p, int q, const Rational& coeff,
               const std::vector<std::uint8_t>& parity) {
  const int cp = flat.cycle_of[static_cast<std::size_t>(p)];
  const int cq = flat.cycle_of[static_cast<std::size_t>(q)];
  std::vector<int> order{p, q};
  std::vector<Word> cycles;
  if (cp == cq) {
    const int len = flat.length[static_cast<std::size_t>(cp)];
    const int a = p - flat.offset[static_cast<std::size_t>(cp)];
    const int b = q - flat.offset[static_cast<std::size_t>(cp)];
    if (b == a + 1 || (a == 0 && b == len - 1)) return;
    std::vector<int> arc_b;
    std::vector<int> arc_d;
    append_arc(flat, p, q, arc_b);
    append_arc(flat, q, p, arc_d);
    order.insert(order.end(), arc_b.begin(), arc_b.end());
    order.insert(order.end(), arc_d.begin(), arc_d.end());
    cycles.push_back(letters_at(flat, arc_b));
    cycles.push_back(letters_at(flat, arc_d));
  } else {
    if (flat.length[static_cast<std::size_t>(cp)] == 1 && flat.length[static_cast<std::size_t>(cq)] == 1) return;
    std::vector<int> merged;
    append_arc(flat, p, p, merged);
    append_arc(flat, q, q, merged);
    order.insert(order.end(), merged.begin(), merged.end());
    cycles.push_back(letters_at(flat, merged));
  }
  for (std::size_t c = 0; c < flat.length.size(); ++c) {
    if (static_cast<int>(c) == cp || static_cast<int>(c) == cq) continue;
    std::vector<int> pos(static_cast<std::size_t>(flat.length[c]));
    std::iota(pos.begin(), pos.end(), flat.offset[c]);
    order.insert(order.end(), pos.begin(), pos.end());
    cycles.push_back(letters_at(flat, pos));
  }
  emit_glued(out, hbar, flat, order, std::move(cycles), coeff, parity);
}

}  // namespace

Functional delta(const Functional& f, const BVSpace& space) {
  Functional out;
  for (const auto& [key, c] : f.terms()) {
    Flat flat = flatten(key.monomial);
    const int n = static_cast<int>(flat.letters.size());
    for (int p = 0; p < n; ++p) {
      for (int q = p + 1; q < n; ++q) {
        const Rational& w = space.omega(flat.letters[static_cast<std::size_t>(p)], flat.letters[static_cast<std::size_t>(q)]);
        if (sgn(w) == 0) continue;
        glue_pair(out, key.hbar, flat, p, q, c * w, space.parity);
      }
    }
  }
  return out;
}

Functional bracket(const Functional& f, const Functional& g, const BVSpace& space) {
  Functional out;
  for (const auto& [kf, cf] : f.terms()) {
    const int sign_f = monomial_parity(kf.monomial, space.parity) ? -1 : 1;
    for (const auto& [kg, cg] : g.terms()) {
      Monomial joined = kf.monomial;
      joined.insert(joined.end(), kg.monomial.begin(), kg.monomial.end());
      Flat flat = flatten(joined);
      const int split = letter_count(kf.monomial);
      const int n = static_cast<int>(flat.letters.size());
      Rational base = cf * cg;
      if (sign_f < 0) base = -base;
      for (int p = 0; p < split; ++p) {
        for (int q = split; q < n; ++q) {
          const Rational& w = space.omega(flat.letters[static_cast<std::size_t>(p)], flat.letters[static_cast<std::size_t>(q)]);
          if (sgn(w) == 0) continue;
          glue_pair(out, kf.hbar + kg.hbar, flat, p, q, base * w, space.parity);
        }
      }
    }
  }
  return out;
}

Functional i_dual(const Functional& f, const RationalMatrix& op, const BVSpace& space) {
  Functional out;
  for (const auto& [key, c] : f.terms()) {
    int before = 0;  // parity of the letters preceding the current one
    for (std::size_t ci = 0; ci < key.monomial.size(); ++ci) {
      for (std::size_t li = 0; li < key.monomial[ci].size(); ++li) {
        const int letter = key.monomial[ci][li];
        for (int j = 0; j < space.size(); ++j) {
          const Rational& a = op(letter, j);
          if (sgn(a) == 0) continue;
          std::vector<Word> cycles = key.monomial;
          cycles[ci][li] = j;
          Rational coeff = c * a;
          if (!before) coeff = -coeff;
          out.add(key.hbar, std::move(cycles), coeff, space.parity);
        }
        before ^= space.parity[static_cast<std::size_t>(letter)];
      }
    }
  }
  return out;
}

Functional quadratic_term(const RationalMatrix& op, const RationalMatrix& beta, const BVSpace& space) {
  if (!(op * op).is_zero()) throw ArgumentError("quadratic_term: the operator does not square to zero on B");
  // beta(I e_a, e_b) placed on the cycle (a b); normalization fixed so that
  // the bracket with this term reproduces i_dual.
  RationalMatrix ib = op.transpose() * beta;
  Functional out;
  for (int a = 0; a < space.size(); ++a)
    for (int b = 0; b < space.size(); ++b) {
      if (sgn(ib(a, b)) == 0) continue;
      out.add(0, {Word{a, b}}, Rational(-ib(a, b) / 2), space.parity);
    }
  return out;
}

ResidualReport bv_residual(const Functional& s, const Truncation& truncation,
                           const std::optional<RationalMatrix>& op, const BVSpace& space,
                           int max_letters, int max_hbar) {
  if (max_letters < 0 || max_hbar < 0) throw WindowError("window bounds must be non-negative");
  if (!truncation.exact()) {
    const long need_letters = static_cast<long>(max_letters) + 2;
    if (truncation.max_letters < need_letters || truncation.max_hbar < max_hbar) {
      std::ostringstream msg;
      msg << "window (" << max_letters << ", " << max_hbar << ") needs S truncated at letters >= "
          << need_letters << " and hbar >= " << max_hbar << "; S has letters <= "
          << truncation.max_letters << ", hbar <= " << truncation.max_hbar;
      throw WindowError(msg.str());
    }
  }
  // Split S by letter count so only window-relevant products are formed.
  std::map<int, Functional> by_letters;
  for (const auto& [k, v] : s.terms()) {
    const int n = letter_count(k.monomial);
    if (n > max_letters + 2 || k.hbar > max_hbar) continue;
    by_letters[n].add_canonical(k, v);
  }
  // Every coefficient produced inside the window is examined, including the
  // ones that cancel in the sum.
  std::set<Functional::Key> touched;
  auto in_window = [&](const Functional::Key& k) {
    return k.hbar <= max_hbar && letter_count(k.monomial) <= max_letters;
  };
  Functional r;
  auto accumulate = [&](const Functional& piece) {
    for (const auto& [k, v] : piece.terms())
      if (in_window(k)) touched.insert(k);
    r += piece;
  };
  for (const auto& [n, part] : by_letters) {
    if (max_hbar >= 1) accumulate(delta(part.truncated(n, max_hbar - 1), space).hbar_shifted(1));
  }
  for (const auto& [na, fa] : by_letters) {
    for (const auto& [nb, fb] : by_letters) {
      if (na + nb - 2 > max_letters) continue;
      Functional half = bracket(fa, fb, space);
      half *= Rational(1, 2);
      accumulate(half);
    }
  }
  if (op) {
    for (const auto& [n, part] : by_letters) {
      if (n <= max_letters) accumulate(i_dual(part, *op, space));
    }
  }
  ResidualReport report;
  report.max_letters = max_letters;
  report.max_hbar = max_hbar;
  report.coefficients_examined = touched.size();
  for (const auto& [k, v] : r.terms()) {
    if (in_window(k)) report.nonzero.emplace_back(k, v);
  }
  return report;
}

std::string format_term(const Functional::Key& key, const Rational& c) {
  std::ostringstream os;
  os << "hbar=" << key.hbar << " cycles=[";
  for (std::size_t i = 0; i < key.monomial.size(); ++i) {
    if (i) os << ',';
    os << '[';
    for (std::size_t j = 0; j < key.monomial[i].size(); ++j) {
      if (j) os << ',';
      os << key.monomial[i][j];
    }
    os << ']';
  }
  os << "] coeff=" << format_rational(c);
  return os.str();
}

}  // namespace ribbonbv
