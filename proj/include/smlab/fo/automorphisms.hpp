#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <map>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

#include "smlab/fo/formula.hpp"
#include "smlab/fo/structure.hpp"

namespace smlab::fo {

/// Exhaustive search is only offered up to this universe size.
inline constexpr std::size_t kMaxExhaustiveSize = 10;

using Permutation = std::vector<int>;

namespace detail {

// Backtracking over images of 0..n-1 in increasing order, so solutions come
// out in lexicographic order. Candidates are pruned by a per-element
// signature (marks, constants, degrees, loops).
class AutomorphismSearch {
 public:
  AutomorphismSearch(const FiniteStructure& m, std::map<int, int> pinned) : m_(m), pinned_(std::move(pinned)) {
    if (m.size > kMaxExhaustiveSize)
      throw std::length_error("automorphism search is exhaustive and limited to " + std::to_string(kMaxExhaustiveSize) +
                              " elements, got " + std::to_string(m.size));
    n_ = static_cast<int>(m.size);
    for (const auto& [name, pairs] : m.relations) {
      std::vector<std::uint8_t> adj(m.size * m.size, 0);
      for (const auto& [a, b] : pairs) adj[a * n_ + b] = 1;
      rels_.push_back(std::move(adj));
    }
    sig_.resize(m.size);
    for (int a = 0; a < n_; ++a) {
      auto& s = sig_[a];
      for (const auto& [name, elems] : m.marks) s.push_back(elems.count(a) ? 1 : 0);
      for (const auto& [name, c] : m.constants) s.push_back(c == a ? 1 : 0);
      for (const auto& adj : rels_) {
        int out = 0, in = 0;
        for (int b = 0; b < n_; ++b) out += adj[a * n_ + b], in += adj[b * n_ + a];
        s.push_back(out);
        s.push_back(in);
        s.push_back(adj[a * n_ + a]);
      }
    }
  }

  // Calls `visit` for each automorphism; stops early when it returns false.
  void run(const std::function<bool(const Permutation&)>& visit) {
    image_.assign(n_, -1);
    used_.assign(n_, false);
    stop_ = false;
    extend(0, visit);
  }

 private:
  bool consistent(int a, int fa) const {
    for (const auto& adj : rels_) {
      if (adj[a * n_ + a] != adj[fa * n_ + fa]) return false;
      for (int b = 0; b < a; ++b) {
        const int fb = image_[b];
        if (adj[a * n_ + b] != adj[fa * n_ + fb] || adj[b * n_ + a] != adj[fb * n_ + fa]) return false;
      }
    }
    return true;
  }

  void extend(int a, const std::function<bool(const Permutation&)>& visit) {
    if (stop_) return;
    if (a == n_) {
      if (!visit(image_)) stop_ = true;
      return;
    }
    auto pin = pinned_.find(a);
    for (int fa = 0; fa < n_ && !stop_; ++fa) {
      if (used_[fa] || sig_[a] != sig_[fa]) continue;
      if (pin != pinned_.end() && pin->second != fa) continue;
      if (!consistent(a, fa)) continue;
      image_[a] = fa;
      used_[fa] = true;
      extend(a + 1, visit);
      used_[fa] = false;
      image_[a] = -1;
    }
  }

  const FiniteStructure& m_;
  std::map<int, int> pinned_;
  int n_ = 0;
  std::vector<std::vector<std::uint8_t>> rels_;
  std::vector<std::vector<int>> sig_;
  Permutation image_;
  std::vector<bool> used_;
  bool stop_ = false;
};

}  // namespace detail

/// All automorphisms (relations, marks and constants preserved), in
/// lexicographic order of the image vectors.
inline std::vector<Permutation> automorphisms(const FiniteStructure& m) {
  std::vector<Permutation> out;
  detail::AutomorphismSearch(m, {}).run([&](const Permutation& p) {
    out.push_back(p);
    return true;
  });
  return out;
}

/// Orbit partition under the automorphisms fixing `fixed` pointwise. Blocks
/// are sorted and listed by smallest element.
inline std::vector<std::vector<int>> orbits_over(const FiniteStructure& m, const std::vector<int>& fixed) {
  std::map<int, int> pins;
  for (int a : fixed) {
    if (!m.in_range(a)) throw std::out_of_range("fixed element " + std::to_string(a) + " is outside the universe");
    pins[a] = a;
  }
  const int n = static_cast<int>(m.size);
  if (m.size > kMaxExhaustiveSize)
    throw std::length_error("orbit computation is exhaustive and limited to " + std::to_string(kMaxExhaustiveSize) + " elements");
  std::vector<int> block(n, -1);
  std::vector<std::vector<int>> out;
  for (int a = 0; a < n; ++a) {
    if (block[a] >= 0) continue;
    block[a] = static_cast<int>(out.size());
    out.push_back({a});
    for (int b = a + 1; b < n; ++b) {
      if (block[b] >= 0) continue;
      auto p = pins;
      if (p.count(a) && p[a] != b) continue;
      p[a] = b;
      bool found = false;
      detail::AutomorphismSearch(m, p).run([&](const Permutation&) {
        found = true;
        return false;
      });
      if (found) {
        block[b] = block[a];
        out.back().push_back(b);
      }
    }
  }
  return out;
}

struct ProbeViolation {
  std::size_t formula = 0;  // index into the family
  int element = 0;
  std::size_t count = 0;
};

struct ProbeReport {
  std::size_t threshold = 0;
  std::size_t universe = 0;
  std::vector<ProbeViolation> violations;

  bool ok() const { return violations.empty(); }
};

/// For every element a and family member f(x, y): |f(a, M)| must be at most
/// C or at least n - C. Violations are listed in (formula, element) order.
inline ProbeReport minimality_probe(const FiniteStructure& m, const std::vector<Formula>& family, std::size_t threshold) {
  if (threshold < 1) throw std::invalid_argument("minimality_probe: threshold must be at least 1");
  ProbeReport r{threshold, m.size, {}};
  for (std::size_t i = 0; i < family.size(); ++i)
    for (int a = 0; a < static_cast<int>(m.size); ++a) {
      const auto count = solutions(m, family[i], {{"x", a}}).size();
      if (count > threshold && count + threshold < m.size) r.violations.push_back({i, a, count});
    }
  return r;
}

}  // namespace smlab::fo
