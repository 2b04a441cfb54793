#ifndef RIBBONBV_TESTS_ORACLES_HPP
#define RIBBONBV_TESTS_ORACLES_HPP

// Independent reference computations used by the test suites.

#include <functional>
#include <map>
#include <numeric>
#include <utility>
#include <vector>

#include "ribbonbv/bvcalc.hpp"
#include "ribbonbv/ribbon.hpp"
#include "ribbonbv/superlinear.hpp"

namespace oracle {

using ribbonbv::Functional;
using ribbonbv::Rational;
using ribbonbv::Word;

/// hbar log P^* exp(hbar Delta_H) exp(V / hbar), restricted to at most
/// `max_letters` letters and hbar powers up to 1 - chi_min. `space` carries
/// the letters of A with the propagator as its gluing matrix; every vertex of
/// V must have at least three letters. `inclusion` is dim A x dim B.
inline Functional exp_formula_S(const Functional& V, const ribbonbv::BVSpace& space,
                                const ribbonbv::RationalMatrix& inclusion,
                                const std::vector<std::uint8_t>& parity_b, int max_letters, int chi_min) {
  const int N = max_letters;
  // A product term with p = hbar power and n letters can only feed the window
  // when p <= -chi_min + N - n, since every other factor has p_i >= -n_i.
  auto keep = [&](int p, int n) { return n <= N && p <= -chi_min + N - n; };
  Functional one_a;
  one_a.add(0, {}, 1, space.parity);
  Functional e = one_a;
  Functional vk = one_a;
  Rational kfact = 1;
  const int kmax = 2 * (N - chi_min) - 1;
  for (int k = 1; k <= kmax; ++k) {
    vk = ribbonbv::product(vk, V, space.parity);
    kfact *= k;
    Functional d = vk;
    Rational mfact = 1;
    for (int m = 0; m <= k + N - chi_min && !d.is_zero(); ++m) {
      if (m > 0) {
        d = ribbonbv::delta(d, space);
        mfact *= m;
      }
      for (const auto& [key, c] : d.terms())
        if (keep(m - k, ribbonbv::letter_count(key.monomial)))
          e.add_canonical({m - k, key.monomial}, c / (kfact * mfact));
    }
  }
  // Pull back along the inclusion: letter a becomes sum_b inclusion(a, b) b.
  Functional pe;
  const int dim_b = inclusion.cols();
  for (const auto& [key, c] : e.terms()) {
    std::vector<std::pair<std::vector<Word>, Rational>> acc{{{}, c}};
    for (const auto& w : key.monomial) {
      std::vector<std::pair<Word, Rational>> words{{{}, 1}};
      for (int a : w) {
        std::vector<std::pair<Word, Rational>> next;
        for (const auto& [ww, v] : words)
          for (int b = 0; b < dim_b; ++b) {
            const Rational& x = inclusion(a, b);
            if (sgn(x) == 0) continue;
            Word w2 = ww;
            w2.push_back(b);
            next.emplace_back(std::move(w2), v * x);
          }
        words = std::move(next);
      }
      std::vector<std::pair<std::vector<Word>, Rational>> next;
      for (const auto& [cycles, v] : acc)
        for (const auto& [ww, x] : words) {
          auto c2 = cycles;
          c2.push_back(ww);
          next.emplace_back(std::move(c2), v * x);
        }
      acc = std::move(next);
    }
    for (const auto& [cycles, v] : acc) pe.add(key.hbar, cycles, v, parity_b);
  }
  Functional one_b;
  one_b.add(0, {}, 1, parity_b);
  const Functional x = pe - one_b;
  auto keep_f = [&](const Functional& f) {
    Functional out;
    for (const auto& [key, c] : f.terms())
      if (keep(key.hbar, ribbonbv::letter_count(key.monomial))) out.add_canonical(key, c);
    return out;
  };
  Functional log, xj = one_b;
  for (int j = 1; j <= N; ++j) {
    xj = keep_f(ribbonbv::product(xj, x, parity_b));
    Functional t = xj;
    t *= Rational(j % 2 ? 1 : -1, j);
    log += t;
  }
  Functional s;
  for (const auto& [key, c] : log.terms())
    if (key.hbar + 1 <= 1 - chi_min && ribbonbv::letter_count(key.monomial) <= N)
      s.add_canonical({key.hbar + 1, key.monomial}, c);
  return s;
}

/// Every nonzero canonical monomial (hbar 0) with 1..max_letters letters over
/// an alphabet with the given shifted parities.
inline std::vector<ribbonbv::Monomial> basis_monomials(const std::vector<std::uint8_t>& parity, int max_letters) {
  const int d = static_cast<int>(parity.size());
  std::vector<Word> words;
  {
    std::map<Word, int> seen;
    Word w;
    std::function<void()> grow = [&]() {
      if (!w.empty()) {
        auto f = ribbonbv::canonical_cyclic_form(w, parity);
        if (f.sign != 0 && !seen.count(f.word)) {
          seen[f.word] = 1;
          words.push_back(f.word);
        }
      }
      if (static_cast<int>(w.size()) == max_letters) return;
      for (int a = 0; a < d; ++a) {
        w.push_back(a);
        grow();
        w.pop_back();
      }
    };
    grow();
  }
  std::map<ribbonbv::Monomial, int> seen;
  std::vector<ribbonbv::Monomial> out;
  std::vector<Word> cur;
  std::function<void(std::size_t, int)> pick = [&](std::size_t from, int letters) {
    if (!cur.empty()) {
      auto m = ribbonbv::canonicalize(cur, parity);
      if (m.sign != 0 && !seen.count(m.monomial)) {
        seen[m.monomial] = 1;
        out.push_back(m.monomial);
      }
    }
    for (std::size_t k = from; k < words.size(); ++k) {
      const int len = static_cast<int>(words[k].size());
      if (letters + len > max_letters) continue;
      cur.push_back(words[k]);
      pick(k, letters + len);
      cur.pop_back();
    }
  };
  pick(0, 0);
  return out;
}

struct GraphCensus {
  /// (chi, legs) -> number of leg-labeled isomorphism classes.
  std::map<std::pair<int, int>, std::uint64_t> classes;
};

/// Brute force over every vertex structure (a permutation rho of the flags
/// whose cycles are the cyclic orders) and every involution sigma on at most
/// `max_flags` flags. Connected leg-labeled graphs with at least one leg have
/// no automorphisms, so the relabeling group acts freely and each class
/// accounts for exactly F! / n! pairs (rho, sigma).
inline GraphCensus brute_force_census(int max_flags, bool trivalent, bool require_legs_on_every_boundary) {
  GraphCensus out;
  std::map<std::pair<int, int>, std::uint64_t> pairs_by_key;
  std::map<std::pair<int, int>, int> flags_of_key;
  for (int F = 3; F <= max_flags; ++F) {
    if (trivalent && F % 3 != 0) continue;
    std::vector<int> rho(static_cast<std::size_t>(F), -1);
    std::vector<int> sigma(static_cast<std::size_t>(F), -1);
    std::map<std::pair<int, int>, std::uint64_t> count;
    auto visit_sigma = [&](int vertices) {
      // Connectivity of the group generated by rho and sigma.
      std::vector<int> seen(static_cast<std::size_t>(F), 0), stack{0};
      seen[0] = 1;
      int reached = 1;
      while (!stack.empty()) {
        int f = stack.back();
        stack.pop_back();
        for (int g : {rho[static_cast<std::size_t>(f)], sigma[static_cast<std::size_t>(f)]})
          if (!seen[static_cast<std::size_t>(g)]) {
            seen[static_cast<std::size_t>(g)] = 1;
            ++reached;
            stack.push_back(g);
          }
      }
      if (reached != F) return;
      int legs = 0;
      for (int f = 0; f < F; ++f) legs += sigma[static_cast<std::size_t>(f)] == f;
      if (legs == 0) return;
      if (require_legs_on_every_boundary) {
        // Boundary walk phi = rho o sigma; every orbit must meet a leg.
        std::vector<int> done(static_cast<std::size_t>(F), 0);
        for (int f = 0; f < F; ++f) {
          if (done[static_cast<std::size_t>(f)]) continue;
          bool has_leg = false;
          int g = f;
          do {
            done[static_cast<std::size_t>(g)] = 1;
            has_leg = has_leg || sigma[static_cast<std::size_t>(g)] == g;
            g = rho[static_cast<std::size_t>(sigma[static_cast<std::size_t>(g)])];
          } while (g != f);
          if (!has_leg) return;
        }
      }
      const int edges = (F - legs) / 2;
      ++count[{vertices - edges, legs}];
    };
    std::function<void(int)> choose_sigma = [&](int vertices) {
      int f = 0;
      while (f < F && sigma[static_cast<std::size_t>(f)] >= 0) ++f;
      if (f == F) {
        visit_sigma(vertices);
        return;
      }
      sigma[static_cast<std::size_t>(f)] = f;
      choose_sigma(vertices);
      for (int g = f + 1; g < F; ++g) {
        if (sigma[static_cast<std::size_t>(g)] >= 0) continue;
        sigma[static_cast<std::size_t>(f)] = g;
        sigma[static_cast<std::size_t>(g)] = f;
        choose_sigma(vertices);
        sigma[static_cast<std::size_t>(g)] = -1;
      }
      sigma[static_cast<std::size_t>(f)] = -1;
    };
    // Cycles of rho: start at the smallest free flag, then an ordered choice of the rest.
    std::vector<int> cycle;
    std::function<void(int)> choose_rho = [&](int vertices) {
      int f = 0;
      while (f < F && rho[static_cast<std::size_t>(f)] >= 0) ++f;
      if (f == F) {
        choose_sigma(vertices);
        return;
      }
      int free_count = 0;
      for (int g = 0; g < F; ++g) free_count += rho[static_cast<std::size_t>(g)] < 0;
      std::vector<int> cyc{f};
      std::vector<char> used(static_cast<std::size_t>(F), 0);
      used[static_cast<std::size_t>(f)] = 1;
      std::function<void()> extend = [&]() {
        const int len = static_cast<int>(cyc.size());
        const int rest = free_count - len;
        const bool length_ok = trivalent ? len == 3 : len >= 3;
        if (length_ok && (rest == 0 || rest >= 3)) {
          for (int k = 0; k < len; ++k) rho[static_cast<std::size_t>(cyc[static_cast<std::size_t>(k)])] = cyc[static_cast<std::size_t>((k + 1) % len)];
          choose_rho(vertices + 1);
          for (int k = 0; k < len; ++k) rho[static_cast<std::size_t>(cyc[static_cast<std::size_t>(k)])] = -1;
        }
        if (trivalent && len == 3) return;
        for (int g = f + 1; g < F; ++g) {
          if (rho[static_cast<std::size_t>(g)] >= 0 || used[static_cast<std::size_t>(g)]) continue;
          used[static_cast<std::size_t>(g)] = 1;
          cyc.push_back(g);
          extend();
          cyc.pop_back();
          used[static_cast<std::size_t>(g)] = 0;
        }
      };
      extend();
    };
    choose_rho(0);
    std::uint64_t fact = 1;
    for (int k = 2; k <= F; ++k) fact *= static_cast<std::uint64_t>(k);
    for (const auto& [key, c] : count) {
      std::uint64_t nfact = 1;
      for (int k = 2; k <= key.second; ++k) nfact *= static_cast<std::uint64_t>(k);
      // c * n! / F! classes; the division is exact because the action is free.
      out.classes[key] += c * nfact / fact;
      if ((c * nfact) % fact != 0) out.classes[key] = static_cast<std::uint64_t>(-1);
    }
  }
  return out;
}

}  // namespace oracle

#endif  // RIBBONBV_TESTS_ORACLES_HPP
