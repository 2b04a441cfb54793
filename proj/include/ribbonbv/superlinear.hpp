#ifndef RIBBONBV_SUPERLINEAR_HPP
#define RIBBONBV_SUPERLINEAR_HPP

#include <cstdint>
#include <map>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <gmpxx.h>

namespace ribbonbv {

using Rational = mpq_class;

/// Parse "p/q", "p" or "-p/q" into an exact rational; throws std::invalid_argument.
Rational parse_rational(const std::string& text);
std::string format_rational(const Rational& q);

enum class Parity : std::uint8_t { even = 0, odd = 1 };

constexpr Parity operator+(Parity a, Parity b) {
  return static_cast<Parity>(static_cast<std::uint8_t>(a) ^ static_cast<std::uint8_t>(b));
}
constexpr Parity flip(Parity p) { return p + Parity::odd; }
constexpr int bit(Parity p) { return static_cast<int>(p); }
const char* to_string(Parity p);

class ArgumentError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class ContractionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Raised when a bilinear form or operator that must be invertible is not.
/// `radical` holds a basis of the kernel (coefficient vectors).
class SingularError : public std::runtime_error {
 public:
  SingularError(const std::string& what, std::vector<std::vector<Rational>> radical)
      : std::runtime_error(what), radical(std::move(radical)) {}
  std::vector<std::vector<Rational>> radical;
};

/// An ordered Z/2-graded basis. Order is canonical for all indexing.
class GradedBasis {
 public:
  struct Element {
    std::string name;
    Parity parity;
  };

  GradedBasis() = default;
  explicit GradedBasis(std::vector<Element> elements);

  int dimension() const { return static_cast<int>(elements_.size()); }
  const Element& operator[](int i) const { return elements_.at(static_cast<std::size_t>(i)); }
  Parity parity(int i) const { return (*this)[i].parity; }
  const std::string& name(int i) const { return (*this)[i].name; }
  /// -1 when absent.
  int index_of(const std::string& name) const;
  const std::vector<Element>& elements() const { return elements_; }

  bool operator==(const GradedBasis& other) const;

 private:
  std::vector<Element> elements_;
};

using BasisPtr = std::shared_ptr<const GradedBasis>;

/// Sign of the graded permutation that places the object at original slot
/// `order[k]` into position k. Each inverted pair of odd objects contributes -1.
int koszul_sign(std::span<const int> order, std::span<const Parity> parities);

/// Same, for parities given as 0/1 bits.
int koszul_sign_bits(std::span<const int> order, std::span<const std::uint8_t> parities);

// ---------------------------------------------------------------------------
// Dense exact matrices; used for the small linear algebra behind operators.

class RationalMatrix {
 public:
  RationalMatrix() = default;
  RationalMatrix(int rows, int cols);
  static RationalMatrix identity(int n);

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  Rational& operator()(int r, int c) { return data_[static_cast<std::size_t>(r * cols_ + c)]; }
  const Rational& operator()(int r, int c) const {
    return data_[static_cast<std::size_t>(r * cols_ + c)];
  }

  std::vector<Rational> column(int c) const;
  void set_column(int c, const std::vector<Rational>& v);
  RationalMatrix transpose() const;
  bool is_zero() const;
  bool operator==(const RationalMatrix& other) const;

  friend RationalMatrix operator*(const RationalMatrix& a, const RationalMatrix& b);
  friend RationalMatrix operator+(const RationalMatrix& a, const RationalMatrix& b);
  friend RationalMatrix operator-(const RationalMatrix& a, const RationalMatrix& b);
  friend RationalMatrix operator*(const Rational& s, const RationalMatrix& a);
  std::vector<Rational> apply(const std::vector<Rational>& v) const;

 private:
  int rows_ = 0;
  int cols_ = 0;
  std::vector<Rational> data_;
};

/// Reduced row echelon form; returns pivot columns (lowest index first).
std::vector<int> row_reduce(RationalMatrix& m);
int rank(RationalMatrix m);
/// Indices of the columns forming the lowest-index basis of the column space.
std::vector<int> pivot_columns(const RationalMatrix& m);
/// Basis of the null space, one vector per free column (ascending).
std::vector<std::vector<Rational>> kernel(const RationalMatrix& m);
/// Throws SingularError carrying the kernel when singular.
RationalMatrix inverse(const RationalMatrix& m);
/// Solve m x = b; returns false when inconsistent.
bool solve(const RationalMatrix& m, const std::vector<Rational>& b, std::vector<Rational>& x);
/// Matrix whose columns are the given vectors (all of length `rows`).
RationalMatrix from_columns(const std::vector<std::vector<Rational>>& columns, int rows);

// ---------------------------------------------------------------------------

enum class Variance : std::uint8_t { vector, covector };

struct Slot {
  BasisPtr space;
  Variance variance;
  bool shifted;  // Pi: flips the parity used in sign computations only

  Parity parity_of(int index) const {
    Parity p = space->parity(index);
    return shifted ? flip(p) : p;
  }
  bool same_space(const Slot& other) const;
};

/// Exact multilinear tensor with sparse storage. Zero entries are never stored.
class SparseTensor {
 public:
  using Index = std::vector<int>;

  SparseTensor() = default;
  explicit SparseTensor(std::vector<Slot> slots);

  int order() const { return static_cast<int>(slots_.size()); }
  const std::vector<Slot>& slots() const { return slots_; }
  const std::map<Index, Rational>& entries() const { return entries_; }
  bool is_zero() const { return entries_.empty(); }

  Rational get(const Index& idx) const;
  void set(const Index& idx, const Rational& value);
  void add(const Index& idx, const Rational& value);

  /// Parity of the basis tensor at `idx` (sum of slot parities).
  Parity parity_at(const Index& idx) const;

  bool operator==(const SparseTensor& other) const;

 private:
  void check_index(const Index& idx) const;

  std::vector<Slot> slots_;
  std::map<Index, Rational> entries_;
};

/// Contract slot pairs (slot of t, slot of u). Result slots: remaining slots of
/// t then remaining slots of u. The sign is the Koszul sign of moving every
/// contracted pair to the end (t-slot first) before evaluating.
SparseTensor tensor_contract(const SparseTensor& t, const SparseTensor& u,
                             const std::vector<std::pair<int, int>>& pairs);

/// Inverse of a nondegenerate odd 2-covector tensor as a 2-vector tensor.
SparseTensor beta_inverse(const SparseTensor& beta);

/// Operators are stored as (vector, covector) tensors: entry (i, j) is the
/// coefficient of e_i in Op(e_j).
SparseTensor operator_tensor(const BasisPtr& basis, const RationalMatrix& m);
RationalMatrix operator_matrix(const SparseTensor& op);
/// Square matrix of a 2-slot tensor over one basis.
RationalMatrix bilinear_matrix(const SparseTensor& form);
SparseTensor bilinear_tensor(const BasisPtr& basis, const RationalMatrix& m, Variance variance);

/// Parity of a homogeneous operator (-1 when zero, throws if inhomogeneous).
int operator_parity(const BasisPtr& basis, const RationalMatrix& m);

}  // namespace ribbonbv

#endif  // RIBBONBV_SUPERLINEAR_HPP
