#ifndef RIBBONBV_GRAPHSUM_HPP
#define RIBBONBV_GRAPHSUM_HPP

#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "ribbonbv/algebra.hpp"
#include "ribbonbv/bvcalc.hpp"
#include "ribbonbv/homotopy.hpp"
#include "ribbonbv/ribbon.hpp"

namespace ribbonbv {

/// Edge tensor on A: entry (i, j) glues the letter i at one flag with the
/// letter j at the other.
struct Propagator {
  RationalMatrix omega;
  /// True when omega(i, j) = (-1)^{s_i s_j} omega(j, i) for shifted parities s.
  bool graded_symmetric = true;
};

/// beta^dual with H applied to one slot: (H (x) 1) beta^{-1}.
Propagator propagator(const AlgebraSpec& spec, const RationalMatrix& H);

enum class EdgeKind { identity, commutator, projector };
const char* to_string(EdgeKind kind);

enum class Weighting { classes, aut_inverse };
const char* to_string(Weighting w);

struct GraphWeight {
  Functional functional;  // already at hbar power 1 - chi
  int hbar_power = 0;
};

/// Prepared contraction data for one algebra and homotopy.
class GraphEvaluator {
 public:
  GraphEvaluator(const AlgebraSpec& spec, const HomotopyData& hom);

  const BVSpace& space_B() const { return space_b_; }
  const HomotopyData& homotopy() const { return hom_; }
  const RationalMatrix& edge_tensor(EdgeKind kind) const;
  const Propagator& propagator() const { return prop_; }

  /// Sum over leg letters in B of the contracted graph, monomials read off
  /// the boundary cycles. Not divided by any symmetry factor. When
  /// `variant_flag` >= 0 the edge through that flag carries the tensor of
  /// `kind` instead of the propagator.
  Functional contract(const RibbonGraph& g, int variant_flag = -1, EdgeKind kind = EdgeKind::identity) const;

  /// True when every vertex valency has a cyclic tensor.
  bool supports(const RibbonGraph& g) const;

 private:
  struct Entry {
    std::vector<int> letters;
    Rational value;
  };
  const std::vector<Entry>& table(int valency, std::uint32_t leg_mask) const;

  int dim_a_;
  int dim_b_;
  std::vector<std::uint8_t> parity_;  // shifted parity of the extended alphabet A + B
  std::map<int, SparseTensor> cyclic_;
  HomotopyData hom_;
  Propagator prop_;
  RationalMatrix omega_id_;
  RationalMatrix omega_commutator_;
  RationalMatrix omega_projector_;
  BVSpace space_b_;
  mutable std::map<std::pair<int, std::uint32_t>, std::vector<Entry>> tables_;
  std::shared_ptr<std::mutex> tables_mu_ = std::make_shared<std::mutex>();
};

/// W_Gamma: contraction divided by the automorphism count of the graph with
/// leg labels forgotten; lands at hbar^{1 - chi}.
GraphWeight w_gamma(const RibbonGraph& g, const GraphEvaluator& ev);
/// Same contraction with the edge through flag `f` replaced according to `kind`.
GraphWeight edge_variant_w(const RibbonGraph& g, int f, EdgeKind kind, const GraphEvaluator& ev);

struct SumOptions {
  int chi_min = 1;
  int max_legs = 3;
  ValencyMode mode = ValencyMode::trivalent;
  Weighting weighting = Weighting::classes;
  int jobs = 1;
};

struct SumResult {
  Functional S;
  Truncation truncation;
  std::uint64_t graphs = 0;  // rooted graphs contracted
};

/// S = sum over connected graphs with legs on every boundary of
/// hbar^{1-chi} W_Gamma, for 1 <= n <= max_legs and chi >= chi_min.
SumResult sum_S(const AlgebraSpec& spec, const HomotopyData& hom, const SumOptions& opt);

}  // namespace ribbonbv

#endif  // RIBBONBV_GRAPHSUM_HPP
