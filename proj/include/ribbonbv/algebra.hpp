#ifndef RIBBONBV_ALGEBRA_HPP
#define RIBBONBV_ALGEBRA_HPP

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ribbonbv/bvcalc.hpp"
#include "ribbonbv/superlinear.hpp"

namespace ribbonbv {

enum class AlgebraKind { associative, a_infinity };

/// A declared algebra. Raw products m_n have n shifted covector slots and one
/// vector slot; cyclic forms have n+1 shifted covector slots. Either may be
/// given for an arity; both are summed after lowering.
struct AlgebraSpec {
  AlgebraKind kind = AlgebraKind::associative;
  BasisPtr basis;
  std::map<int, SparseTensor> products;
  std::map<int, SparseTensor> cyclic;
  std::optional<SparseTensor> beta;
  RationalMatrix I;
  std::optional<RationalMatrix> H;

  int dimension() const { return basis->dimension(); }
};

/// Empty raw product / cyclic tensors with the conventional slot signature.
SparseTensor make_product_tensor(const BasisPtr& basis, int arity);
SparseTensor make_cyclic_tensor(const BasisPtr& basis, int arity);
SparseTensor make_beta_tensor(const BasisPtr& basis);

struct Check {
  std::string name;
  bool pass = true;
  std::vector<int> witness;  // basis indices (or positions) of a counterexample
  std::string detail;
};

struct ValidationReport {
  std::vector<Check> checks;
  bool pass() const;
  void merge(const ValidationReport& other);
  const Check* find(const std::string& name) const;
};

/// m(a, b, c) = (-1)^{b} beta(m_2(a, b), c); for higher arities the lowering
/// sign is (-1)^{sum_k (k-1) a_k}.
SparseTensor cyclic_tensor_from_product(const SparseTensor& product, const SparseTensor& beta);

/// Inverse of the lowering: recovers the raw product from a cyclic tensor.
SparseTensor product_from_cyclic(const SparseTensor& cyclic, const SparseTensor& beta);

/// All cyclic tensors of the algebra keyed by arity n (tensor order n+1).
std::map<int, SparseTensor> cyclic_tensors(const AlgebraSpec& spec);
/// All raw products of the algebra keyed by arity.
std::map<int, SparseTensor> raw_products(const AlgebraSpec& spec);

/// Letters = basis of A with shifted parities, glued by beta^{-1}.
BVSpace algebra_space(const AlgebraSpec& spec);

/// V = sum_n 1/(n+1) sum m(i_0..i_n) cyc(i_0..i_n), at hbar power 0.
Functional vertex_functional(const std::map<int, SparseTensor>& cyclic, const std::vector<std::uint8_t>& parity);

ValidationReport validate_cyclic_dga(const AlgebraSpec& spec);
ValidationReport validate_a_infinity(const AlgebraSpec& spec);
/// Runs the validation matching `spec.kind`.
ValidationReport validate(const AlgebraSpec& spec);
ValidationReport check_delta_m_zero(const AlgebraSpec& spec);

/// A + (Pi A)^dual with the natural odd pairing. Raises on specs that already
/// carry a scalar product.
AlgebraSpec double_algebra(const AlgebraSpec& spec);

}  // namespace ribbonbv

#endif  // RIBBONBV_ALGEBRA_HPP
