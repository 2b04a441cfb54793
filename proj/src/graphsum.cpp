#include "ribbonbv/graphsum.hpp"

#include <bitset>
#include <condition_variable>
#include <deque>
#include <exception>
#include <functional>
#include <mutex>
#include <thread>

namespace ribbonbv {

namespace {

constexpr int kMaxFlags = 128;
using FlagSet = std::bitset<kMaxFlags>;

std::uint8_t shifted(const GradedBasis& b, int i) { return static_cast<std::uint8_t>(1 ^ bit(b.parity(i))); }

}  // namespace

Propagator propagator(const AlgebraSpec& spec, const RationalMatrix& H) {
  if (!spec.beta) throw ArgumentError("propagator: the algebra has no scalar product");
  Propagator p;
  p.omega = H * bilinear_matrix(beta_inverse(*spec.beta));
  const GradedBasis& basis = *spec.basis;
  for (int i = 0; i < p.omega.rows() && p.graded_symmetric; ++i)
    for (int j = 0; j < p.omega.cols(); ++j) {
      Rational swapped = p.omega(j, i);
      if (shifted(basis, i) & shifted(basis, j)) swapped = -swapped;
      if (p.omega(i, j) != swapped) {
        p.graded_symmetric = false;
        break;
      }
    }
  return p;
}

const char* to_string(EdgeKind kind) {
  switch (kind) {
    case EdgeKind::identity: return "Id";
    case EdgeKind::commutator: return "IH";
    case EdgeKind::projector: return "P";
  }
  return "?";
}

const char* to_string(Weighting w) { return w == Weighting::classes ? "classes" : "aut_inverse"; }

GraphEvaluator::GraphEvaluator(const AlgebraSpec& spec, const HomotopyData& hom)
    : dim_a_(spec.dimension()), dim_b_(hom.dim_B()), cyclic_(cyclic_tensors(spec)), hom_(hom) {
  const GradedBasis& a = *spec.basis;
  for (int i = 0; i < dim_a_; ++i) parity_.push_back(shifted(a, i));
  for (int b = 0; b < dim_b_; ++b) parity_.push_back(shifted(*hom.basis_B, b));
  prop_ = ribbonbv::propagator(spec, hom.H);
  if (!prop_.graded_symmetric) throw ArgumentError("the propagator is not graded symmetric");
  omega_id_ = bilinear_matrix(beta_inverse(*spec.beta));
  RationalMatrix comm = spec.I * hom.H + hom.H * spec.I;
  omega_commutator_ = comm * omega_id_;
  omega_projector_ = hom.P * omega_id_;
  space_b_ = b_space(hom);
}

const RationalMatrix& GraphEvaluator::edge_tensor(EdgeKind kind) const {
  switch (kind) {
    case EdgeKind::identity: return omega_id_;
    case EdgeKind::commutator: return omega_commutator_;
    case EdgeKind::projector: return omega_projector_;
  }
  return omega_id_;
}

bool GraphEvaluator::supports(const RibbonGraph& g) const {
  for (const auto& v : g.vertices)
    if (!cyclic_.count(static_cast<int>(v.size()) - 1)) return false;
  return true;
}

const std::vector<GraphEvaluator::Entry>& GraphEvaluator::table(int valency, std::uint32_t leg_mask) const {
  std::lock_guard<std::mutex> lock(*tables_mu_);
  auto key = std::make_pair(valency, leg_mask);
  auto it = tables_.find(key);
  if (it != tables_.end()) return it->second;
  std::map<std::vector<int>, Rational> acc;
  auto ct = cyclic_.find(valency - 1);
  if (ct != cyclic_.end()) {
    for (const auto& [idx, val] : ct->second.entries()) {
      // expand leg positions into B letters through the inclusion
      std::vector<std::pair<std::vector<int>, Rational>> partial{{{}, val}};
      for (int j = 0; j < valency; ++j) {
        const int a = idx[static_cast<std::size_t>(j)];
        std::vector<std::pair<std::vector<int>, Rational>> next;
        for (auto& [letters, v] : partial) {
          if (leg_mask >> j & 1u) {
            for (int b = 0; b < dim_b_; ++b) {
              const Rational& w = hom_.inclusion(a, b);
              if (sgn(w) == 0) continue;
              auto l2 = letters;
              l2.push_back(dim_a_ + b);
              next.emplace_back(std::move(l2), v * w);
            }
          } else {
            auto l2 = letters;
            l2.push_back(a);
            next.emplace_back(std::move(l2), v);
          }
        }
        partial = std::move(next);
      }
      for (auto& [letters, v] : partial) acc[letters] += v;
    }
  }
  std::vector<Entry> entries;
  for (auto& [letters, v] : acc)
    if (sgn(v) != 0) entries.push_back({letters, v});
  return tables_.emplace(key, std::move(entries)).first->second;
}

Functional GraphEvaluator::contract(const RibbonGraph& g, int variant_flag, EdgeKind kind) const {
  Functional out;
  const int nf = g.num_flags();
  if (nf > kMaxFlags) throw ArgumentError("graph has too many flags for the contraction engine");
  if (variant_flag >= 0 && g.is_leg(variant_flag)) throw ArgumentError("edge variant requested on a leg");
  const BoundaryStructure bs = boundary_cycles(g);
  if (bs.has_legless_boundary() || dim_b_ == 0) return out;
  const auto vof = g.vertex_of();

  // Initial flat order: vertices in order, flags in stored cyclic order.
  std::vector<int> init_pos(static_cast<std::size_t>(nf));
  {
    int p = 0;
    for (const auto& v : g.vertices)
      for (int f : v) init_pos[static_cast<std::size_t>(f)] = p++;
  }
  // Final order: the variant pair, the other edges, then boundary legs.
  struct EdgeRef {
    int first;
    int second;
    const RationalMatrix* tensor;
  };
  std::vector<EdgeRef> edges;
  if (variant_flag >= 0) {
    const int s = g.sigma[static_cast<std::size_t>(variant_flag)];
    edges.push_back({std::min(variant_flag, s), std::max(variant_flag, s), &edge_tensor(kind)});
  }
  for (int f = 0; f < nf; ++f) {
    const int s = g.sigma[static_cast<std::size_t>(f)];
    if (s <= f) continue;
    if (variant_flag >= 0 && (f == variant_flag || s == variant_flag)) continue;
    edges.push_back({f, s, &prop_.omega});
  }
  std::vector<int> final_order;
  for (const auto& e : edges) {
    final_order.push_back(e.first);
    final_order.push_back(e.second);
  }
  for (const auto& c : bs.leg_cycles) final_order.insert(final_order.end(), c.begin(), c.end());
  std::vector<FlagSet> inv(static_cast<std::size_t>(nf));
  for (std::size_t x = 0; x < final_order.size(); ++x)
    for (std::size_t y = x + 1; y < final_order.size(); ++y)
      if (init_pos[static_cast<std::size_t>(final_order[y])] < init_pos[static_cast<std::size_t>(final_order[x])])
        inv[static_cast<std::size_t>(final_order[x])].set(static_cast<std::size_t>(final_order[y]));

  // Edges completed when a vertex is assigned: those whose later endpoint (in vertex order) is there.
  const int nv = g.num_vertices();
  std::vector<std::vector<const EdgeRef*>> closes(static_cast<std::size_t>(nv));
  for (const auto& e : edges) {
    const int v = std::max(vof[static_cast<std::size_t>(e.first)], vof[static_cast<std::size_t>(e.second)]);
    closes[static_cast<std::size_t>(v)].push_back(&e);
  }
  std::vector<const std::vector<Entry>*> tabs(static_cast<std::size_t>(nv));
  for (int v = 0; v < nv; ++v) {
    const auto& vert = g.vertices[static_cast<std::size_t>(v)];
    std::uint32_t mask = 0;
    for (std::size_t j = 0; j < vert.size(); ++j)
      if (g.is_leg(vert[j])) mask |= 1u << j;
    tabs[static_cast<std::size_t>(v)] = &table(static_cast<int>(vert.size()), mask);
    if (tabs[static_cast<std::size_t>(v)]->empty()) return out;
  }

  std::vector<int> letter(static_cast<std::size_t>(nf), -1);
  std::vector<Rational> partial(static_cast<std::size_t>(nv + 1));
  partial[0] = 1;
  const std::vector<std::uint8_t>& par_b = space_b_.parity;

  // Depth-first assignment of vertex tensor entries.
  auto leaf = [&](const Rational& value) {
    FlagSet odd;
    for (int f = 0; f < nf; ++f)
      if (parity_[static_cast<std::size_t>(letter[static_cast<std::size_t>(f)])]) odd.set(static_cast<std::size_t>(f));
    int sign_bits = 0;
    for (int f = 0; f < nf; ++f)
      if (odd.test(static_cast<std::size_t>(f))) sign_bits ^= static_cast<int>((inv[static_cast<std::size_t>(f)] & odd).count() & 1u);
    std::vector<Word> cycles;
    for (const auto& c : bs.leg_cycles) {
      Word w;
      for (int f : c) w.push_back(letter[static_cast<std::size_t>(f)] - dim_a_);
      cycles.push_back(std::move(w));
    }
    out.add(0, std::move(cycles), sign_bits ? Rational(-value) : value, par_b);
  };

  std::function<void(int)> dfs = [&](int v) {
    if (v == nv) {
      leaf(partial[static_cast<std::size_t>(nv)]);
      return;
    }
    const auto& vert = g.vertices[static_cast<std::size_t>(v)];
    for (const Entry& e : *tabs[static_cast<std::size_t>(v)]) {
      for (std::size_t j = 0; j < vert.size(); ++j) letter[static_cast<std::size_t>(vert[j])] = e.letters[j];
      Rational value = partial[static_cast<std::size_t>(v)] * e.value;
      bool zero = false;
      for (const EdgeRef* ed : closes[static_cast<std::size_t>(v)]) {
        const Rational& w = (*ed->tensor)(letter[static_cast<std::size_t>(ed->first)], letter[static_cast<std::size_t>(ed->second)]);
        if (sgn(w) == 0) {
          zero = true;
          break;
        }
        value *= w;
      }
      if (zero) continue;
      partial[static_cast<std::size_t>(v + 1)] = std::move(value);
      dfs(v + 1);
    }
    for (int f : vert) letter[static_cast<std::size_t>(f)] = -1;
  };
  dfs(0);
  return out;
}

GraphWeight w_gamma(const RibbonGraph& g, const GraphEvaluator& ev) {
  if (!ev.supports(g)) throw ArgumentError("no product of the arity required by a vertex of the graph");
  GraphWeight w;
  w.hbar_power = 1 - g.chi();
  Functional c = ev.contract(g);
  c *= Rational(1, canonicalize_unlabeled(g).automorphisms);
  w.functional = c.hbar_shifted(w.hbar_power);
  return w;
}

GraphWeight edge_variant_w(const RibbonGraph& g, int f, EdgeKind kind, const GraphEvaluator& ev) {
  if (!ev.supports(g)) throw ArgumentError("no product of the arity required by a vertex of the graph");
  GraphWeight w;
  w.hbar_power = 1 - g.chi();
  Functional c = ev.contract(g, f, kind);
  c *= Rational(1, canonicalize_unlabeled(g).automorphisms);
  w.functional = c.hbar_shifted(w.hbar_power);
  return w;
}

namespace {

// Bounded producer/consumer queue of rooted graphs.
class GraphQueue {
 public:
  explicit GraphQueue(std::size_t capacity) : capacity_(capacity) {}

  void push(std::vector<RibbonGraph> batch) {
    std::unique_lock<std::mutex> lock(mu_);
    not_full_.wait(lock, [&] { return items_.size() < capacity_; });
    items_.push_back(std::move(batch));
    not_empty_.notify_one();
  }

  bool pop(std::vector<RibbonGraph>& batch) {
    std::unique_lock<std::mutex> lock(mu_);
    not_empty_.wait(lock, [&] { return !items_.empty() || closed_; });
    if (items_.empty()) return false;
    batch = std::move(items_.front());
    items_.pop_front();
    not_full_.notify_one();
    return true;
  }

  void close() {
    std::lock_guard<std::mutex> lock(mu_);
    closed_ = true;
    not_empty_.notify_all();
  }

 private:
  std::size_t capacity_;
  std::mutex mu_;
  std::condition_variable not_empty_;
  std::condition_variable not_full_;
  std::deque<std::vector<RibbonGraph>> items_;
  bool closed_ = false;
};

}  // namespace

SumResult sum_S(const AlgebraSpec& spec, const HomotopyData& hom, const SumOptions& opt) {
  if (opt.jobs < 1) throw ArgumentError("jobs must be at least 1");
  if (opt.chi_min > 1) throw ArgumentError("chi_min must be at most 1");
  if (opt.max_legs < 1) throw ArgumentError("max_legs must be at least 1");
  SumResult result;
  result.truncation.max_letters = opt.max_legs;
  result.truncation.max_hbar = 1 - opt.chi_min;
  if (hom.dim_B() == 0) return result;

  GraphEvaluator ev(spec, hom);
  int max_valency = 0;
  for (const auto& [n, t] : cyclic_tensors(spec))
    if (!t.is_zero()) max_valency = std::max(max_valency, n + 1);
  if (max_valency < 3) return result;
  if (opt.mode == ValencyMode::trivalent && !ev.supports(RibbonGraph{{{0, 1, 2}}, {0, 1, 2}, {}})) return result;

  std::vector<EnumerationOptions> runs;
  for (int chi = 1; chi >= opt.chi_min; --chi)
    for (int n = 1; n <= opt.max_legs; ++n) {
      EnumerationOptions eo;
      eo.chi = chi;
      eo.legs = n;
      eo.mode = opt.mode;
      eo.require_legs_on_every_boundary = true;
      if (opt.mode == ValencyMode::min3) eo.max_valency = max_valency;
      if (euler_bounds(chi, n, opt.mode).feasible) runs.push_back(eo);
    }

  // Rooted graphs with n legs stand for n leg-labeled classes each over n!
  // labelings, so each contributes C_Gamma / n.
  auto evaluate = [&](const RibbonGraph& g, Functional& acc) {
    if (!ev.supports(g)) return;
    Functional c = ev.contract(g);
    if (c.terms().empty()) return;
    c *= Rational(1, g.num_legs());
    acc += c.hbar_shifted(1 - g.chi());
  };

  if (opt.jobs == 1) {
    for (const auto& eo : runs)
      for_each_rooted_graph(eo, [&](const RibbonGraph& g) {
        ++result.graphs;
        evaluate(g, result.S);
      });
    return result;
  }

  constexpr std::size_t kBatch = 256;
  GraphQueue queue(static_cast<std::size_t>(4 * opt.jobs));
  std::vector<Functional> partial(static_cast<std::size_t>(opt.jobs));
  std::vector<std::thread> workers;
  std::mutex error_mu;
  std::exception_ptr error;
  for (int w = 0; w < opt.jobs; ++w)
    workers.emplace_back([&, w] {
      std::vector<RibbonGraph> batch;
      while (queue.pop(batch)) {
        try {
          for (const auto& g : batch) evaluate(g, partial[static_cast<std::size_t>(w)]);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mu);
          if (!error) error = std::current_exception();
        }
      }
    });
  std::vector<RibbonGraph> batch;
  try {
    for (const auto& eo : runs)
      for_each_rooted_graph(eo, [&](const RibbonGraph& g) {
        ++result.graphs;
        batch.push_back(g);
        if (batch.size() == kBatch) {
          queue.push(std::move(batch));
          batch.clear();
        }
      });
    if (!batch.empty()) queue.push(std::move(batch));
  } catch (...) {
    queue.close();
    for (auto& t : workers) t.join();
    throw;
  }
  queue.close();
  for (auto& t : workers) t.join();
  if (error) std::rethrow_exception(error);
  for (const auto& p : partial) result.S += p;
  return result;
}

}  // namespace ribbonbv
