#ifndef RIBBONBV_TESTS_PILLARS_HPP
#define RIBBONBV_TESTS_PILLARS_HPP

// Edge-variant identities checked graph by graph.

#include <map>
#include <vector>

#include "ribbonbv/graphsum.hpp"

namespace pillars {

struct Tally {
  long graphs = 0;
  long edges = 0;
  long telescoping_failures = 0;
  long leibniz_failures = 0;
  long flip_classes = 0;
  long flip_failures = 0;
  long nonzero_commutator_terms = 0;  // edge variants with [I, H] that did not vanish
  long nonzero_flip_terms = 0;        // identity variants that did not vanish
  long nonzero_leibniz_sides = 0;     // graphs with I^vee W_Gamma != 0
  bool pass() const { return telescoping_failures == 0 && leibniz_failures == 0 && flip_failures == 0; }
};

/// Runs every leg-labeled trivalent graph with chi >= chi_min, 1..max_legs legs
/// and at most `max_flags` flags, with the boundary filter both on and off.
/// Flip classes group (graph, edge) pairs by the graph obtained by contracting
/// the edge, which fixes the surface, the leg distribution and the cyclic order.
inline Tally check(const ribbonbv::GraphEvaluator& ev, int chi_min, int max_legs, int max_flags) {
  using namespace ribbonbv;
  Tally t;
  const BVSpace& sb = ev.space_B();
  const RationalMatrix& ib = ev.homotopy().I_B;
  for (int n = 1; n <= max_legs; ++n) {
    // A trivalent graph has 3 (n - 2 chi) flags; skip Euler characteristics over the cap.
    int lowest = chi_min;
    while (3 * (n - 2 * lowest) > max_flags) ++lowest;
    if (lowest > 1) continue;
    for (bool filter : {true, false}) {
      std::map<std::vector<int>, Functional> classes;
      for (const auto& [chi, group] : enumerate_graphs(lowest, n, ValencyMode::trivalent, filter))
        for (const auto& cg : group) {
          const RibbonGraph& g = cg.graph;
          if (g.num_flags() > max_flags) continue;
          ++t.graphs;
          const auto vof = g.vertex_of();
          Functional commutators;
          for (int f = 0; f < g.num_flags(); ++f) {
            const int s = g.sigma[static_cast<std::size_t>(f)];
            if (s <= f) continue;
            ++t.edges;
            Functional id = ev.contract(g, f, EdgeKind::identity);
            Functional ih = ev.contract(g, f, EdgeKind::commutator);
            Functional p = ev.contract(g, f, EdgeKind::projector);
            if (!(p == id - ih)) ++t.telescoping_failures;
            if (!ih.is_zero()) ++t.nonzero_commutator_terms;
            commutators += ih;
            if (vof[static_cast<std::size_t>(f)] != vof[static_cast<std::size_t>(s)]) {
              if (!id.is_zero()) ++t.nonzero_flip_terms;
              classes[canonicalize(contract_edge(g, f)).code] += id;
            }
          }
          const Functional lhs = i_dual(ev.contract(g), ib, sb);
          if (!lhs.is_zero()) ++t.nonzero_leibniz_sides;
          if (!(lhs == commutators)) ++t.leibniz_failures;
        }
      for (const auto& [code, sum] : classes) {
        ++t.flip_classes;
        if (!sum.is_zero()) ++t.flip_failures;
      }
    }
  }
  return t;
}

}  // namespace pillars

#endif  // RIBBONBV_TESTS_PILLARS_HPP
