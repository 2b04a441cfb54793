#ifndef RIBBONBV_RIBBON_HPP
#define RIBBONBV_RIBBON_HPP

#include <cstdint>
#include <functional>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace ribbonbv {

class MalformedGraph : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class ValencyMode { trivalent, min3 };

/// Flags are 0..F-1. Each vertex lists its flags in cyclic order; sigma is an
/// involution whose fixed points are the legs. `leg_label[f]` is the label
/// (1..n) of leg f and 0 for internal flags; an empty vector means unlabeled.
struct RibbonGraph {
  std::vector<std::vector<int>> vertices;
  std::vector<int> sigma;
  std::vector<int> leg_label;

  int num_flags() const { return static_cast<int>(sigma.size()); }
  int num_vertices() const { return static_cast<int>(vertices.size()); }
  int num_legs() const;
  int num_edges() const { return (num_flags() - num_legs()) / 2; }
  int chi() const { return num_vertices() - num_edges(); }
  bool is_leg(int f) const { return sigma[static_cast<std::size_t>(f)] == f; }
  /// Vertex index of each flag.
  std::vector<int> vertex_of() const;
  /// Successor of each flag in its vertex's cyclic order.
  std::vector<int> rho() const;
  /// Legs ordered by label (by flag index when unlabeled).
  std::vector<int> legs() const;

  /// Throws MalformedGraph on broken invariants (involution, partition,
  /// valency >= 3, connectivity, label bijection).
  void check() const;

  /// `V:[(f1,f2,f3),...] E:[(fa,fb),...] L:[f->label,...]`
  std::string encode() const;
};

/// Face tracing: the boundary walk is phi = rho o sigma.
struct BoundaryStructure {
  std::vector<std::vector<int>> flag_cycles;  // orbits of phi
  std::vector<std::vector<int>> leg_cycles;   // legs met along each orbit, in walk order
  int i = 0;
  int g = 0;
  int chi = 0;
  bool has_legless_boundary() const;
};

BoundaryStructure boundary_cycles(const RibbonGraph& g);

/// Vertex and edge counts allowed for connected graphs with `n` legs and
/// Euler characteristic `chi`. Trivalent ranges are exact.
struct EulerBounds {
  bool feasible = false;
  int vertices_min = 0;
  int vertices_max = 0;
  int edges_min = 0;
  int edges_max = 0;
  /// sum over vertices of (valency - 2) = n - 2 chi.
  int excess = 0;
};
EulerBounds euler_bounds(int chi, int n, ValencyMode mode);

struct CanonicalGraph {
  std::vector<int> code;
  RibbonGraph graph;  // relabeled so that flag order follows the code
  int automorphisms = 1;
};

/// Canonical relabeling by minimal breadth-first code over admissible roots
/// (the leg labeled 1, or every leg / every flag when there is none).
/// `automorphisms` counts label-preserving automorphisms.
CanonicalGraph canonicalize(const RibbonGraph& g);

/// Same with leg labels ignored.
CanonicalGraph canonicalize_unlabeled(const RibbonGraph& g);

struct EnumerationOptions {
  int chi = 1;
  int legs = 3;
  ValencyMode mode = ValencyMode::trivalent;
  bool require_legs_on_every_boundary = true;
  /// For min3: cap on vertex valency (0 = no cap beyond the Euler bound).
  int max_valency = 0;
};

/// Visits every connected graph with one distinguished leg (flag 0, label 1)
/// exactly once up to root-preserving isomorphism. Other legs are labeled
/// 2..n in flag order. Flags are in canonical breadth-first order.
void for_each_rooted_graph(const EnumerationOptions& opt, const std::function<void(const RibbonGraph&)>& visit);

std::uint64_t count_rooted_graphs(const EnumerationOptions& opt);

/// Number of isomorphism classes of leg-labeled graphs: (n-1)! per rooted graph.
std::uint64_t count_labeled_graphs(const EnumerationOptions& opt);

/// All leg-labeled isomorphism classes with chi >= chi_min and exactly n legs,
/// grouped by chi (descending) and sorted by canonical code within a group.
std::map<int, std::vector<CanonicalGraph>, std::greater<int>> enumerate_graphs(int chi_min, int n, ValencyMode mode,
                                                                               bool require_legs_on_every_boundary);

/// Contracts a non-loop edge (flag f and sigma f) into one vertex whose cyclic
/// order follows the two merged orders.
RibbonGraph contract_edge(const RibbonGraph& g, int f);

}  // namespace ribbonbv

#endif  // RIBBONBV_RIBBON_HPP
