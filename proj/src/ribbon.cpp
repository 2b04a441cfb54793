#include "ribbonbv/ribbon.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>

namespace ribbonbv {

int RibbonGraph::num_legs() const {
  int n = 0;
  for (int f = 0; f < num_flags(); ++f)
    if (is_leg(f)) ++n;
  return n;
}

std::vector<int> RibbonGraph::vertex_of() const {
  std::vector<int> out(sigma.size(), -1);
  for (std::size_t v = 0; v < vertices.size(); ++v)
    for (int f : vertices[v]) out[static_cast<std::size_t>(f)] = static_cast<int>(v);
  return out;
}

std::vector<int> RibbonGraph::rho() const {
  std::vector<int> out(sigma.size(), -1);
  for (const auto& vert : vertices)
    for (std::size_t k = 0; k < vert.size(); ++k) out[static_cast<std::size_t>(vert[k])] = vert[(k + 1) % vert.size()];
  return out;
}

std::vector<int> RibbonGraph::legs() const {
  std::vector<int> out;
  for (int f = 0; f < num_flags(); ++f)
    if (is_leg(f)) out.push_back(f);
  if (!leg_label.empty()) {
    std::sort(out.begin(), out.end(), [&](int a, int b) {
      return leg_label[static_cast<std::size_t>(a)] < leg_label[static_cast<std::size_t>(b)];
    });
  }
  return out;
}

void RibbonGraph::check() const {
  const int nf = num_flags();
  std::vector<int> seen(static_cast<std::size_t>(nf), 0);
  for (const auto& v : vertices) {
    if (v.size() < 3) throw MalformedGraph("vertex of valency below three");
    for (int f : v) {
      if (f < 0 || f >= nf) throw MalformedGraph("flag index out of range");
      if (seen[static_cast<std::size_t>(f)]++) throw MalformedGraph("flag listed at two vertices");
    }
  }
  for (int f = 0; f < nf; ++f) {
    if (!seen[static_cast<std::size_t>(f)]) throw MalformedGraph("flag not attached to a vertex");
    const int s = sigma[static_cast<std::size_t>(f)];
    if (s < 0 || s >= nf || sigma[static_cast<std::size_t>(s)] != f) throw MalformedGraph("sigma is not an involution");
  }
  if (!leg_label.empty()) {
    if (static_cast<int>(leg_label.size()) != nf) throw MalformedGraph("leg label vector has the wrong size");
    std::vector<int> labels;
    for (int f = 0; f < nf; ++f) {
      const int l = leg_label[static_cast<std::size_t>(f)];
      if (is_leg(f) != (l > 0)) throw MalformedGraph("leg labels must mark exactly the legs");
      if (l > 0) labels.push_back(l);
    }
    std::sort(labels.begin(), labels.end());
    for (std::size_t k = 0; k < labels.size(); ++k)
      if (labels[k] != static_cast<int>(k) + 1) throw MalformedGraph("leg labels are not 1..n");
  }
  if (nf == 0) throw MalformedGraph("empty graph");
  // connectivity
  const auto vof = vertex_of();
  std::vector<char> visited(vertices.size(), 0);
  std::vector<int> stack{0};
  visited[0] = 1;
  std::size_t count = 1;
  while (!stack.empty()) {
    int v = stack.back();
    stack.pop_back();
    for (int f : vertices[static_cast<std::size_t>(v)]) {
      int w = vof[static_cast<std::size_t>(sigma[static_cast<std::size_t>(f)])];
      if (!visited[static_cast<std::size_t>(w)]) {
        visited[static_cast<std::size_t>(w)] = 1;
        ++count;
        stack.push_back(w);
      }
    }
  }
  if (count != vertices.size()) throw MalformedGraph("graph is not connected");
}

std::string RibbonGraph::encode() const {
  std::ostringstream os;
  os << "V:[";
  for (std::size_t v = 0; v < vertices.size(); ++v) {
    if (v) os << ',';
    os << '(';
    for (std::size_t k = 0; k < vertices[v].size(); ++k) os << (k ? "," : "") << vertices[v][k];
    os << ')';
  }
  os << "] E:[";
  bool first = true;
  for (int f = 0; f < num_flags(); ++f) {
    const int s = sigma[static_cast<std::size_t>(f)];
    if (s <= f) continue;
    os << (first ? "" : ",") << '(' << f << ',' << s << ')';
    first = false;
  }
  os << "] L:[";
  first = true;
  for (int f : legs()) {
    os << (first ? "" : ",") << f << "->" << (leg_label.empty() ? 0 : leg_label[static_cast<std::size_t>(f)]);
    first = false;
  }
  os << ']';
  return os.str();
}

bool BoundaryStructure::has_legless_boundary() const {
  for (const auto& c : leg_cycles)
    if (c.empty()) return true;
  return false;
}

BoundaryStructure boundary_cycles(const RibbonGraph& g) {
  const int nf = g.num_flags();
  const auto rho = g.rho();
  BoundaryStructure out;
  std::vector<char> seen(static_cast<std::size_t>(nf), 0);
  for (int start = 0; start < nf; ++start) {
    if (seen[static_cast<std::size_t>(start)]) continue;
    std::vector<int> cycle;
    std::vector<int> legs;
    int f = start;
    do {
      seen[static_cast<std::size_t>(f)] = 1;
      cycle.push_back(f);
      if (g.is_leg(f)) legs.push_back(f);
      f = rho[static_cast<std::size_t>(g.sigma[static_cast<std::size_t>(f)])];
    } while (f != start);
    out.flag_cycles.push_back(std::move(cycle));
    out.leg_cycles.push_back(std::move(legs));
  }
  out.i = static_cast<int>(out.flag_cycles.size());
  out.chi = g.chi();
  const int twice_g = 2 - out.i - out.chi;
  if (twice_g < 0 || twice_g % 2 != 0) throw MalformedGraph("face tracing gives a non-integral or negative genus");
  out.g = twice_g / 2;
  return out;
}

EulerBounds euler_bounds(int chi, int n, ValencyMode mode) {
  EulerBounds b;
  b.excess = n - 2 * chi;
  if (n < 0) return b;
  if (mode == ValencyMode::trivalent) {
    const int v = n - 2 * chi;
    const int e = n - 3 * chi;
    if (v < 1 || e < 0) return b;
    b.feasible = true;
    b.vertices_min = b.vertices_max = v;
    b.edges_min = b.edges_max = e;
    return b;
  }
  const int vmax = b.excess;
  const int vmin = std::max(1, chi);
  if (vmax < vmin) return b;
  b.feasible = true;
  b.vertices_min = vmin;
  b.vertices_max = vmax;
  b.edges_min = vmin - chi;
  b.edges_max = vmax - chi;
  return b;
}

namespace {

struct Bfs {
  std::vector<int> code;
  std::vector<int> order;  // flags by new label
};

Bfs bfs_from(const RibbonGraph& g, const std::vector<int>& vof, const std::vector<int>& pos, int root, bool labeled) {
  const int nf = g.num_flags();
  Bfs out;
  std::vector<int> label(static_cast<std::size_t>(nf), -1);
  std::vector<char> visited(g.vertices.size(), 0);
  std::vector<int> blocks;  // first label of each visited vertex
  auto visit = [&](int flag) {
    const int v = vof[static_cast<std::size_t>(flag)];
    visited[static_cast<std::size_t>(v)] = 1;
    const auto& vert = g.vertices[static_cast<std::size_t>(v)];
    const std::size_t p = static_cast<std::size_t>(pos[static_cast<std::size_t>(flag)]);
    blocks.push_back(static_cast<int>(out.order.size()));
    for (std::size_t k = 0; k < vert.size(); ++k) {
      const int f = vert[(p + k) % vert.size()];
      label[static_cast<std::size_t>(f)] = static_cast<int>(out.order.size());
      out.order.push_back(f);
    }
  };
  visit(root);
  for (std::size_t idx = 0; idx < out.order.size(); ++idx) {
    const int f = out.order[idx];
    const int s = g.sigma[static_cast<std::size_t>(f)];
    if (s != f && !visited[static_cast<std::size_t>(vof[static_cast<std::size_t>(s)])]) visit(s);
  }
  if (static_cast<int>(out.order.size()) != nf) throw MalformedGraph("graph is not connected");
  blocks.push_back(nf);
  for (std::size_t b = 0; b + 1 < blocks.size(); ++b) {
    out.code.push_back(blocks[b + 1] - blocks[b]);
    for (int l = blocks[b]; l < blocks[b + 1]; ++l) {
      const int f = out.order[static_cast<std::size_t>(l)];
      const int s = g.sigma[static_cast<std::size_t>(f)];
      if (s == f) {
        out.code.push_back(labeled ? -g.leg_label[static_cast<std::size_t>(f)] : -1);
      } else {
        out.code.push_back(label[static_cast<std::size_t>(s)]);
      }
    }
  }
  return out;
}

CanonicalGraph canonical_impl(const RibbonGraph& g, bool labeled) {
  const auto vof = g.vertex_of();
  std::vector<int> pos(static_cast<std::size_t>(g.num_flags()), 0);
  for (const auto& vert : g.vertices)
    for (std::size_t k = 0; k < vert.size(); ++k) pos[static_cast<std::size_t>(vert[k])] = static_cast<int>(k);

  std::vector<int> roots;
  if (labeled && g.num_legs() > 0) {
    roots.push_back(g.legs().front());
  } else {
    for (int f = 0; f < g.num_flags(); ++f)
      if (g.is_leg(f)) roots.push_back(f);
    if (roots.empty()) {
      roots.resize(static_cast<std::size_t>(g.num_flags()));
      std::iota(roots.begin(), roots.end(), 0);
    }
  }
  Bfs best;
  int ties = 0;
  for (int r : roots) {
    Bfs b = bfs_from(g, vof, pos, r, labeled);
    if (ties == 0 || b.code < best.code) {
      best = std::move(b);
      ties = 1;
    } else if (b.code == best.code) {
      ++ties;
    }
  }
  CanonicalGraph out;
  out.code = best.code;
  out.automorphisms = ties;
  const int nf = g.num_flags();
  std::vector<int> label(static_cast<std::size_t>(nf));
  for (int l = 0; l < nf; ++l) label[static_cast<std::size_t>(best.order[static_cast<std::size_t>(l)])] = l;
  RibbonGraph& c = out.graph;
  c.sigma.assign(static_cast<std::size_t>(nf), 0);
  for (int f = 0; f < nf; ++f)
    c.sigma[static_cast<std::size_t>(label[static_cast<std::size_t>(f)])] = label[static_cast<std::size_t>(g.sigma[static_cast<std::size_t>(f)])];
  if (!g.leg_label.empty()) {
    c.leg_label.assign(static_cast<std::size_t>(nf), 0);
    for (int f = 0; f < nf; ++f) c.leg_label[static_cast<std::size_t>(label[static_cast<std::size_t>(f)])] = g.leg_label[static_cast<std::size_t>(f)];
  }
  // vertex blocks follow the code
  std::size_t at = 0;
  int next = 0;
  while (at < best.code.size()) {
    const int deg = best.code[at];
    std::vector<int> vert(static_cast<std::size_t>(deg));
    std::iota(vert.begin(), vert.end(), next);
    next += deg;
    c.vertices.push_back(std::move(vert));
    at += static_cast<std::size_t>(deg) + 1;
  }
  return out;
}

// Orderly generation of rooted graphs in breadth-first canonical labeling.
class RootedGenerator {
 public:
  RootedGenerator(const EnumerationOptions& opt, const std::function<void(const RibbonGraph&)>& visit)
      : opt_(opt), visit_(visit) {}

  void run() {
    if (opt_.legs < 1) return;
    const EulerBounds b = euler_bounds(opt_.chi, opt_.legs, opt_.mode);
    if (!b.feasible) return;
    for (int k : valencies(b.excess)) {
      open_vertex(k);
      budget_ = b.excess - (k - 2);
      open_ = k;
      legs_ = 0;
      step(0);
      close_vertex();
    }
  }

 private:
  std::vector<int> valencies(int budget) const {
    if (opt_.mode == ValencyMode::trivalent) return budget >= 1 ? std::vector<int>{3} : std::vector<int>{};
    std::vector<int> ks;
    for (int k = 3; k - 2 <= budget; ++k) {
      if (opt_.max_valency > 0 && k > opt_.max_valency) break;
      ks.push_back(k);
    }
    return ks;
  }

  void open_vertex(int k) {
    std::vector<int> vert;
    for (int i = 0; i < k; ++i) {
      vert.push_back(static_cast<int>(sigma_.size()));
      sigma_.push_back(-1);
    }
    vertices_.push_back(std::move(vert));
  }

  void close_vertex() {
    const std::size_t k = vertices_.back().size();
    sigma_.resize(sigma_.size() - k);
    vertices_.pop_back();
  }

  void step(int from) {
    int f = from;
    while (f < static_cast<int>(sigma_.size()) && sigma_[static_cast<std::size_t>(f)] >= 0) ++f;
    if (f == static_cast<int>(sigma_.size())) {
      if (legs_ == opt_.legs && budget_ == 0) emit();
      return;
    }
    const int slack = open_ + legs_ + budget_ - opt_.legs;
    if (slack < 0 || slack % 2 != 0) return;

    // leg
    if (legs_ < opt_.legs) {
      sigma_[static_cast<std::size_t>(f)] = f;
      ++legs_;
      --open_;
      step(f + 1);
      ++open_;
      --legs_;
      sigma_[static_cast<std::size_t>(f)] = -1;
    }
    if (f == 0) return;  // the root is always a leg
    // pair with a later open flag
    if (slack >= 2) {
      for (int g = f + 1; g < static_cast<int>(sigma_.size()); ++g) {
        if (sigma_[static_cast<std::size_t>(g)] >= 0) continue;
        sigma_[static_cast<std::size_t>(f)] = g;
        sigma_[static_cast<std::size_t>(g)] = f;
        open_ -= 2;
        step(f + 1);
        open_ += 2;
        sigma_[static_cast<std::size_t>(f)] = -1;
        sigma_[static_cast<std::size_t>(g)] = -1;
      }
    }
    // attach a new vertex
    for (int k : valencies(budget_)) {
      const int entry = static_cast<int>(sigma_.size());
      open_vertex(k);
      sigma_[static_cast<std::size_t>(f)] = entry;
      sigma_[static_cast<std::size_t>(entry)] = f;
      open_ += k - 2;
      budget_ -= k - 2;
      step(f + 1);
      budget_ += k - 2;
      open_ -= k - 2;
      sigma_[static_cast<std::size_t>(f)] = -1;
      close_vertex();
    }
  }

  void emit() {
    RibbonGraph g;
    g.vertices = vertices_;
    g.sigma = sigma_;
    g.leg_label.assign(sigma_.size(), 0);
    int next = 1;
    for (std::size_t f = 0; f < sigma_.size(); ++f)
      if (sigma_[f] == static_cast<int>(f)) g.leg_label[f] = next++;
    if (opt_.require_legs_on_every_boundary && boundary_cycles(g).has_legless_boundary()) return;
    visit_(g);
  }

  const EnumerationOptions& opt_;
  const std::function<void(const RibbonGraph&)>& visit_;
  std::vector<int> sigma_;
  std::vector<std::vector<int>> vertices_;
  int open_ = 0;
  int legs_ = 0;
  int budget_ = 0;
};

std::uint64_t factorial(int n) {
  std::uint64_t r = 1;
  for (int k = 2; k <= n; ++k) r *= static_cast<std::uint64_t>(k);
  return r;
}

}  // namespace

CanonicalGraph canonicalize(const RibbonGraph& g) { return canonical_impl(g, !g.leg_label.empty()); }

CanonicalGraph canonicalize_unlabeled(const RibbonGraph& g) { return canonical_impl(g, false); }

void for_each_rooted_graph(const EnumerationOptions& opt, const std::function<void(const RibbonGraph&)>& visit) {
  RootedGenerator gen(opt, visit);
  gen.run();
}

std::uint64_t count_rooted_graphs(const EnumerationOptions& opt) {
  std::uint64_t n = 0;
  for_each_rooted_graph(opt, [&](const RibbonGraph&) { ++n; });
  return n;
}

std::uint64_t count_labeled_graphs(const EnumerationOptions& opt) {
  return count_rooted_graphs(opt) * factorial(opt.legs - 1);
}

std::map<int, std::vector<CanonicalGraph>, std::greater<int>> enumerate_graphs(int chi_min, int n, ValencyMode mode,
                                                                               bool require_legs_on_every_boundary) {
  std::map<int, std::vector<CanonicalGraph>, std::greater<int>> out;
  if (n < 1) return out;
  for (int chi = 1; chi >= chi_min; --chi) {
    EnumerationOptions opt{chi, n, mode, require_legs_on_every_boundary, 0};
    std::vector<CanonicalGraph> group;
    for_each_rooted_graph(opt, [&](const RibbonGraph& g) {
      const std::vector<int> legs = g.legs();  // legs[0] is the root
      std::vector<int> perm(static_cast<std::size_t>(n - 1));
      std::iota(perm.begin(), perm.end(), 2);
      do {
        RibbonGraph h = g;
        for (std::size_t k = 1; k < legs.size(); ++k) h.leg_label[static_cast<std::size_t>(legs[k])] = perm[k - 1];
        group.push_back(canonicalize(h));
      } while (std::next_permutation(perm.begin(), perm.end()));
    });
    std::sort(group.begin(), group.end(), [](const CanonicalGraph& a, const CanonicalGraph& b) { return a.code < b.code; });
    if (!group.empty()) out.emplace(chi, std::move(group));
  }
  return out;
}

RibbonGraph contract_edge(const RibbonGraph& g, int f) {
  const int s = g.sigma[static_cast<std::size_t>(f)];
  if (s == f) throw MalformedGraph("contract_edge: flag is a leg");
  const auto vof = g.vertex_of();
  const int a = vof[static_cast<std::size_t>(f)];
  const int b = vof[static_cast<std::size_t>(s)];
  if (a == b) throw MalformedGraph("contract_edge: the edge is a loop");
  auto rotate_from = [&](int v, int flag) {
    const auto& vert = g.vertices[static_cast<std::size_t>(v)];
    std::size_t p = static_cast<std::size_t>(std::find(vert.begin(), vert.end(), flag) - vert.begin());
    std::vector<int> out;
    for (std::size_t k = 1; k < vert.size(); ++k) out.push_back(vert[(p + k) % vert.size()]);
    return out;
  };
  std::vector<int> merged = rotate_from(a, f);
  std::vector<int> tail = rotate_from(b, s);
  merged.insert(merged.end(), tail.begin(), tail.end());

  std::vector<int> renumber(static_cast<std::size_t>(g.num_flags()), -1);
  int next = 0;
  for (int x = 0; x < g.num_flags(); ++x)
    if (x != f && x != s) renumber[static_cast<std::size_t>(x)] = next++;
  RibbonGraph out;
  for (std::size_t v = 0; v < g.vertices.size(); ++v) {
    if (static_cast<int>(v) == b) continue;
    std::vector<int> vert;
    for (int x : static_cast<int>(v) == a ? merged : g.vertices[v]) vert.push_back(renumber[static_cast<std::size_t>(x)]);
    out.vertices.push_back(std::move(vert));
  }
  out.sigma.assign(static_cast<std::size_t>(next), 0);
  if (!g.leg_label.empty()) out.leg_label.assign(static_cast<std::size_t>(next), 0);
  for (int x = 0; x < g.num_flags(); ++x) {
    if (x == f || x == s) continue;
    out.sigma[static_cast<std::size_t>(renumber[static_cast<std::size_t>(x)])] = renumber[static_cast<std::size_t>(g.sigma[static_cast<std::size_t>(x)])];
    if (!g.leg_label.empty()) out.leg_label[static_cast<std::size_t>(renumber[static_cast<std::size_t>(x)])] = g.leg_label[static_cast<std::size_t>(x)];
  }
  return out;
}

}  // namespace ribbonbv
