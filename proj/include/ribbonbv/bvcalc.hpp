#ifndef RIBBONBV_BVCALC_HPP
#define RIBBONBV_BVCALC_HPP

#include <compare>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ribbonbv/superlinear.hpp"

namespace ribbonbv {

/// Letters of a cyclic word are basis indices; the stored rotation is canonical.
using Word = std::vector<int>;
/// Product of cyclic words; cycles sorted by (length, letters).
using Monomial = std::vector<Word>;

/// The space of functionals on cyclic words over a shifted basis: letter
/// parities (already shifted) and the odd inverse pairing used to glue letters.
struct BVSpace {
  std::vector<std::uint8_t> parity;  // shifted parity of each letter
  RationalMatrix omega;              // omega(i, j): coefficient for gluing letters i, j
  std::vector<std::string> names;    // optional, for rendering

  int size() const { return static_cast<int>(parity.size()); }
};

/// Canonical rotation of a nonempty word. `sign` is 0 when the word vanishes
/// (a rotation symmetry acting by -1).
struct CyclicWordForm {
  Word word;
  int sign;
};
CyclicWordForm canonical_cyclic_form(const Word& letters, const std::vector<std::uint8_t>& parity);

struct MonomialForm {
  Monomial monomial;
  int sign;  // 0 when the product vanishes
};
/// Canonicalizes a product of cycles given in the stated order. Empty cycles
/// (legless boundaries) make the product vanish.
MonomialForm canonicalize(std::vector<Word> cycles, const std::vector<std::uint8_t>& parity);

int letter_count(const Monomial& m);
int monomial_parity(const Monomial& m, const std::vector<std::uint8_t>& parity);

/// Truncation bounds of a computed functional. `exact` means complete.
struct Truncation {
  static constexpr int unbounded = std::numeric_limits<int>::max();
  int max_letters = unbounded;
  int max_hbar = unbounded;
  bool exact() const { return max_letters == unbounded && max_hbar == unbounded; }
};

/// Element of the symmetric algebra of cyclic words, graded by powers of hbar.
class Functional {
 public:
  struct Key {
    int hbar;
    Monomial monomial;
    auto operator<=>(const Key&) const = default;
  };
  using Terms = std::map<Key, Rational>;

  void add(int hbar, std::vector<Word> cycles, const Rational& c,
           const std::vector<std::uint8_t>& parity);
  void add_canonical(const Key& key, const Rational& c);
  Rational coefficient(int hbar, const Monomial& m) const;

  const Terms& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  std::size_t size() const { return terms_.size(); }

  Functional& operator+=(const Functional& other);
  Functional& operator-=(const Functional& other);
  Functional& operator*=(const Rational& s);
  friend Functional operator+(Functional a, const Functional& b) { return a += b; }
  friend Functional operator-(Functional a, const Functional& b) { return a -= b; }
  friend Functional operator*(const Rational& s, Functional a) { return a *= s; }
  bool operator==(const Functional& other) const { return terms_ == other.terms_; }

  /// Multiplies by hbar^shift.
  Functional hbar_shifted(int shift) const;
  /// Keeps terms with at most `max_letters` letters and hbar power <= max_hbar.
  Functional truncated(int max_letters, int max_hbar) const;
  int max_letters() const;

 private:
  Terms terms_;
};

/// Monomial product F * G (concatenation of cycle lists, Koszul-signed).
Functional product(const Functional& f, const Functional& g, const std::vector<std::uint8_t>& parity);

/// The odd second-order operator: glue two letters with omega, splitting a
/// cycle or merging two. Cyclically adjacent pairs on one cycle and pairs of
/// two one-letter cycles do not contribute.
Functional delta(const Functional& f, const BVSpace& space);

/// Odd bracket: cross terms of delta(F G), normalized so that
/// delta(FG) = delta(F) G + (-1)^F F delta(G) + (-1)^F {F, G}.
Functional bracket(const Functional& f, const Functional& g, const BVSpace& space);

/// Action of an odd operator on functionals: each letter i becomes
/// -sum_j op(i, j) * letter j, with op(i, j) the coefficient of e_i in op(e_j),
/// and a Koszul sign for the letters passed. The overall sign is the one for
/// which I^vee W_Gamma equals the sum of the [I, H] edge variants.
Functional i_dual(const Functional& f, const RationalMatrix& op, const BVSpace& space);

/// The hbar^0 two-letter functional attached to a differential on B:
/// {S02, F} = I^vee F. Refuses when op^2 != 0.
Functional quadratic_term(const RationalMatrix& op, const RationalMatrix& beta, const BVSpace& space);

class WindowError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ResidualReport {
  int max_letters = 0;
  int max_hbar = 0;
  std::size_t coefficients_examined = 0;
  /// Nonzero coefficients of hbar*delta(S) + 1/2{S,S} + I^vee S inside the window;
  /// `coefficients_examined` counts every window coefficient any term produced.
  std::vector<std::pair<Functional::Key, Rational>> nonzero;
  bool pass() const { return nonzero.empty(); }
};

/// Evaluates the (equivariant) master equation inside a window. `op` may be
/// empty (zero matrix) when there is no residual derivation on B.
ResidualReport bv_residual(const Functional& s, const Truncation& truncation,
                           const std::optional<RationalMatrix>& op, const BVSpace& space,
                           int max_letters, int max_hbar);

/// Text record: `hbar=<k> cycles=[[a,b],[c]] coeff=<p/q>`.
std::string format_term(const Functional::Key& key, const Rational& c);

}  // namespace ribbonbv

#endif  // RIBBONBV_BVCALC_HPP
