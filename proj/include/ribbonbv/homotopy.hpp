#ifndef RIBBONBV_HOMOTOPY_HPP
#define RIBBONBV_HOMOTOPY_HPP

#include <stdexcept>
#include <string>
#include <vector>

#include "ribbonbv/algebra.hpp"
#include "ribbonbv/bvcalc.hpp"

namespace ribbonbv {

class HomotopyError : public std::runtime_error {
 public:
  HomotopyError(const std::string& what, std::vector<int> witness = {})
      : std::runtime_error(what), witness(std::move(witness)) {}
  std::vector<int> witness;
};

/// Homotopy H, idempotent P = Id - [I, H] and the image B = im P.
struct HomotopyData {
  RationalMatrix H;
  RationalMatrix P;
  /// dim A x dim B; columns are the B basis vectors (P applied to pivot basis vectors).
  RationalMatrix inclusion;
  /// dim B x dim A; coordinates of P(v) in the B basis.
  RationalMatrix projection;
  /// beta restricted to B.
  RationalMatrix beta_B;
  /// Residual derivation on B: projection * I * inclusion.
  RationalMatrix I_B;
  /// Basis of B; names derive from the pivot basis elements of A.
  BasisPtr basis_B;

  int dim_B() const { return inclusion.cols(); }
};

/// Verifies H (odd, self-adjoint, commuting with I^2, P idempotent) and
/// assembles B. Throws HomotopyError / SingularError on failure.
HomotopyData validate_homotopy(const AlgebraSpec& spec, const RationalMatrix& H);

/// Builds H from the splitting A = ker I^2 + (ker I^2)^perp.
HomotopyData construct_homotopy(const AlgebraSpec& spec);

/// Uses the declared H if present, otherwise constructs one.
HomotopyData homotopy_for(const AlgebraSpec& spec);

/// Coordinates of P(v) in the B basis.
std::vector<Rational> projector_image(const HomotopyData& data, const std::vector<Rational>& v);

/// The functional space on B (letters = B basis, shifted parities, glued by beta_B^{-1}).
BVSpace b_space(const HomotopyData& data);

}  // namespace ribbonbv

#endif  // RIBBONBV_HOMOTOPY_HPP
