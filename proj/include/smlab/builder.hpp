#pragma once

#include <algorithm>
#include <cstdlib>
#include <deque>
#include <functional>
#include <iterator>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <tuple>
#include <vector>

#include "smlab/checker.hpp"
#include "smlab/fo/structure.hpp"
#include "smlab/label_ops.hpp"
#include "smlab/label_structure.hpp"

namespace smlab {

class BuildError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Requirement {
  enum class Kind { realize_type, witness_count, grow_cofinite, close_composition };

  Kind kind = Kind::realize_type;
  int element = -1;
  std::string label;  // the type name for realize_type
  std::size_t target = 0;

  std::string str() const {
    switch (kind) {
      case Kind::realize_type: return "RealizeType(" + label + ")";
      case Kind::witness_count:
        return "WitnessCount(" + std::to_string(element) + ", " + label + ", " + std::to_string(target) + ")";
      case Kind::grow_cofinite: return "GrowCofinite(" + std::to_string(element) + ", " + label + ")";
      case Kind::close_composition: return "CloseComposition(" + std::to_string(element) + ")";
    }
    return "?";
  }
};

/// One finite stage. Relations are named by label id (explicit labels and
/// materialized family members); each element also carries a `type:<name>`
/// mark.
struct Approximation {
  int stage = 0;
  fo::FiniteStructure structure;
  std::vector<std::string> type_of;
  std::vector<int> born;  // stage at which each element appeared
  std::vector<Requirement> pending;
};

struct BuildResult {
  std::vector<Approximation> chain;
  std::vector<std::string> log;

  std::size_t universe_size() const { return chain.empty() ? 0 : chain.back().structure.size; }
};

inline std::string type_mark(const std::string& type) { return "type:" + type; }

/// Family members are built up to index max(stages, 1, largest index an
/// explicit label names).
inline long long member_bound(const LabelStructure& s, int stages) {
  long long bound = std::max(stages, 1);
  for (const auto& [key, f] : s.fibers)
    for (const auto& l : f.labels)
      for (const auto& part : dominated_descriptor(s, l.id).families)
        for (auto n : part.indices) bound = std::max<long long>(bound, std::llabs(n));
  return bound;
}

namespace detail {

class GenericBuilder {
 public:
  GenericBuilder(const LabelStructure& s, int stages) : s_(s), stages_(stages) {
    if (stages < 0) throw BuildError("stage count must be non-negative");
    if (!s.finite_types()) throw BuildError("the builder accepts structures with finitely many types only");
    const auto verdict = check_conditions(s);
    if (!verdict.overall) throw BuildError("structure is rejected by the checker; nothing to build");
    r0_ = *verdict.r0;
    collect_relations();
    count_atoms();
    tabulate_composition();
    size_finite_types();
    check_cofinite_counts();
  }

  BuildResult run() {
    BuildResult out;
    log_ = &out.log;
    for (const auto& t : s_.types) {
      const int e = new_element(t.name, 0);
      log(0, Requirement{Requirement::Kind::realize_type, -1, t.name, 0}.str() + " -> " + std::to_string(e));
    }
    out.chain.push_back(snapshot(0));
    for (int stage = 1; stage <= stages_; ++stage) {
      std::deque<Requirement> current;
      current.swap(pending_);
      generic_ = -1;
      for (const auto& r : current) {
        if (r.kind == Requirement::Kind::witness_count) satisfy(r, stage);
        else if (r.kind == Requirement::Kind::grow_cofinite) grow(r, stage);
      }
      out.chain.push_back(snapshot(stage));
    }
    return out;
  }

 private:
  // A relation of the built structure: an explicit label or a materialized
  // family member.
  struct Relation {
    std::string id, src, dst;
    bool finite = true;
    std::vector<bool> admits;  // per atom: atom <= this label
  };

  // A Finite-spec relation carrying its own witnesses (Moebius count > 0).
  struct Atom {
    int relation = -1;
    std::string id, src, dst;
    std::size_t count = 0;
    bool zero = false;
  };

  // --- setup ---------------------------------------------------------------

  void collect_relations() {
    for (const auto& [key, f] : s_.fibers)
      for (const auto& l : f.labels)
        for (const auto& part : dominated_descriptor(s_, l.id).families) {
          if (part.kind == FamilyPart::Kind::mixed)
            throw BuildError(l.id + ": dominates an infinite, co-infinite part of " + part.family);
          if (l.spec.is_finite() && part.kind != FamilyPart::Kind::finite)
            throw BuildError(l.id + ": Finite label dominates infinitely many members of " + part.family);
        }
    bound_ = member_bound(s_, stages_);
    const auto m = materialize(s_, bound_);
    for (const auto& [key, f] : m.fibers)
      for (const auto& l : f.labels) {
        if (l.spec.is_infinite_coinfinite()) throw BuildError(l.id + ": solution set is neither finite nor cofinite");
        relations_.push_back({l.id, l.src, l.dst, l.spec.is_finite(), {}});
        rel_index_[l.id] = static_cast<int>(relations_.size()) - 1;
      }
  }

  // c(u) = k_u - sum of c(v) over the Finite labels strictly below u.
  void count_atoms() {
    const auto m = materialize(s_, bound_);
    std::map<std::string, long long> memo;
    std::function<long long(const std::string&)> count = [&](const std::string& id) -> long long {
      if (auto it = memo.find(id); it != memo.end()) return it->second;
      const auto l = *m.label(id);
      long long c = static_cast<long long>(l.spec.count());
      const Fiber& f = *m.fiber(l.src, l.dst);
      for (const auto& [lo, hi] : f.dominates)
        if (hi == id) {
          const auto below = *m.label(lo);
          if (!below.spec.is_finite()) throw BuildError(id + ": Finite label dominates non-Finite " + lo);
          c -= count(lo);
        }
      if (c < 0) throw BuildError(id + ": declared count " + l.spec.str() + " is smaller than what it dominates");
      return memo[id] = c;
    };
    for (std::size_t r = 0; r < relations_.size(); ++r) {
      const auto& rel = relations_[r];
      if (!rel.finite) continue;
      const auto c = count(rel.id);
      if (c == 0) continue;
      const auto l = *m.label(rel.id);
      atoms_.push_back({static_cast<int>(r), rel.id, rel.src, rel.dst, static_cast<std::size_t>(c), l.sign == Sign::zero});
      atom_index_[rel.id] = static_cast<int>(atoms_.size()) - 1;
      if (l.sign == Sign::zero) zero_of_[rel.src] = static_cast<int>(atoms_.size()) - 1;
    }
    for (auto& rel : relations_) {
      rel.admits.assign(atoms_.size(), false);
      for (std::size_t a = 0; a < atoms_.size(); ++a)
        if (atoms_[a].src == rel.src && atoms_[a].dst == rel.dst) rel.admits[a] = dominated_by(s_, atoms_[a].id, rel.id);
    }
  }

  void tabulate_composition() {
    const std::size_t n = atoms_.size();
    comp_.assign(n, std::vector<int>(n, -1));
    inverse_.assign(n, -1);
    for (std::size_t u = 0; u < n; ++u)
      for (std::size_t v = 0; v < n; ++v) {
        if (atoms_[u].dst != atoms_[v].src) continue;
        const auto w = recorded_composition(s_, atoms_[u].id, atoms_[v].id);
        if (!w) continue;
        if (auto it = atom_index_.find(*w); it != atom_index_.end()) comp_[u][v] = it->second;
      }
    for (std::size_t u = 0; u < n; ++u) {
      auto z = zero_of_.find(atoms_[u].src);
      if (z == zero_of_.end()) continue;
      for (std::size_t v = 0; v < n && inverse_[u] < 0; ++v)
        if (atoms_[v].src == atoms_[u].dst && atoms_[v].dst == atoms_[u].src && comp_[u][v] == z->second)
          inverse_[u] = static_cast<int>(v);
    }
  }

  // A finite type has as many realizations as its loop fiber has atoms.
  void size_finite_types() {
    for (const auto& t : s_.types) {
      if (t.name == r0_) continue;
      std::size_t n = 0;
      for (const auto& a : atoms_)
        if (a.src == t.name && a.dst == t.name) n += a.count;
      type_size_[t.name] = std::max<std::size_t>(1, n);
    }
  }

  // A Cofinite(m) label misses the other types' realizations plus the
  // witnesses of the atoms it does not dominate; that must add up to m.
  void check_cofinite_counts() {
    for (const auto& rel : relations_) {
      if (rel.finite) continue;
      std::size_t missed = 0;
      for (const auto& [t, n] : type_size_)
        if (t != rel.dst) missed += n;
      if (rel.dst != r0_) throw BuildError(rel.id + ": Cofinite label into the finite type " + rel.dst);
      for (std::size_t a = 0; a < atoms_.size(); ++a)
        if (atoms_[a].src == rel.src && atoms_[a].dst == rel.dst && !rel.admits[a]) missed += atoms_[a].count;
      const auto declared = s_.label(rel.id)->spec.count();
      if (missed != declared)
        throw BuildError(rel.id + ": declared Cofinite(" + std::to_string(declared) + ") but the construction misses " +
                         std::to_string(missed) + " element(s)");
    }
  }

  // --- elements and atoms ----------------------------------------------------

  int new_element(const std::string& type, int stage) {
    const int e = static_cast<int>(type_.size());
    type_.push_back(type);
    born_.push_back(stage);
    out_.emplace_back();
    in_.emplace_back();
    filled_.emplace_back(atoms_.size(), 0);
    if (auto z = zero_of_.find(type); z != zero_of_.end()) assign(e, e, z->second);
    for (std::size_t a = 0; a < atoms_.size(); ++a)
      if (atoms_[a].src == type)
        pending_.push_back({Requirement::Kind::witness_count, e, atoms_[a].id, atoms_[a].count});
    for (const auto& rel : relations_)
      if (!rel.finite && rel.src == type) pending_.push_back({Requirement::Kind::grow_cofinite, e, rel.id, 0});
    return e;
  }

  void assign(int a, int b, int atom) {
    out_[a][b] = atom;
    in_[b][a] = atom;
    ++filled_[a][atom];
    undo_.push_back({a, b});
  }

  void rollback(std::size_t mark) {
    while (undo_.size() > mark) {
      auto [a, b] = undo_.back();
      undo_.pop_back();
      --filled_[a][out_[a].at(b)];
      out_[a].erase(b);
      in_[b].erase(a);
    }
  }

  // Sets atom(a, b) and everything composition forces from it. On conflict
  // returns false with a reason; the caller rolls back.
  bool close(int a, int b, int atom, std::string& why) {
    std::deque<std::tuple<int, int, int>> work{{a, b, atom}};
    while (!work.empty()) {
      auto [x, y, v] = work.front();
      work.pop_front();
      if (v < 0) continue;
      if (atoms_[v].zero && x != y) {
        why = "composition forces " + atoms_[v].id + " between distinct elements " + std::to_string(x) + ", " +
              std::to_string(y);
        return false;
      }
      if (auto it = out_[x].find(y); it != out_[x].end()) {
        if (it->second == v) continue;
        why = "elements " + std::to_string(x) + ", " + std::to_string(y) + " would carry both " + atoms_[it->second].id +
              " and " + atoms_[v].id;
        return false;
      }
      if (filled_[x][v] >= atoms_[v].count) {
        why = "element " + std::to_string(x) + " already has " + std::to_string(atoms_[v].count) + " " + atoms_[v].id +
              "-witness(es)";
        return false;
      }
      assign(x, y, v);
      for (const auto& [z, t] : out_[y]) work.emplace_back(x, z, comp_[v][t]);
      for (const auto& [e, t] : in_[x]) work.emplace_back(e, y, comp_[t][v]);
      if (inverse_[v] >= 0) work.emplace_back(y, x, inverse_[v]);
    }
    return true;
  }

  bool try_link(int a, int b, int atom, std::string& why) {
    const auto mark = undo_.size();
    if (close(a, b, atom, why)) {
      derived_ += undo_.size() - mark - 1;
      return true;
    }
    rollback(mark);
    return false;
  }

  // Witnesses that an existing atom chain pins down: if atom(e, a) = y and
  // y o u is the zero, the witness is e itself; if e has no room left for
  // y o u, the witness is one of e's existing (y o u)-witnesses.
  std::optional<std::set<int>> forced_witnesses(int a, int u) const {
    std::optional<std::set<int>> out;
    for (const auto& [e, y] : in_[a]) {
      const int w = comp_[y][u];
      if (w < 0) continue;
      std::set<int> allowed;
      if (atoms_[w].zero) {
        allowed.insert(e);
      } else if (filled_[e][w] >= atoms_[w].count) {
        for (const auto& [b, t] : out_[e])
          if (t == w) allowed.insert(b);
      } else {
        continue;
      }
      if (!out) {
        out = allowed;
      } else {
        std::set<int> both;
        std::set_intersection(out->begin(), out->end(), allowed.begin(), allowed.end(), std::inserter(both, both.end()));
        *out = both;
      }
    }
    return out;
  }

  [[noreturn]] void abort_build(int a, int u, const std::string& candidate, const std::string& why) const {
    throw BuildError("cannot witness (" + std::to_string(a) + ", " + atoms_[u].id + ", " + candidate + "): " + why);
  }

  void satisfy(const Requirement& r, int stage) {
    const int a = r.element;
    const int u = atom_index_.at(r.label);
    const auto& q = atoms_[u].dst;
    std::vector<std::string> picks;
    derived_ = 0;
    while (filled_[a][u] < atoms_[u].count) {
      std::string why;
      bool done = false;
      if (q != r0_) {
        for (int b = 0; b < static_cast<int>(type_.size()) && !done; ++b)
          if (type_[b] == q && !out_[a].count(b) && try_link(a, b, u, why)) {
            picks.push_back(std::to_string(b) + " reuse");
            done = true;
          }
        if (done) continue;
        if (static_cast<std::size_t>(std::count(type_.begin(), type_.end(), q)) >= type_size_.at(q))
          abort_build(a, u, "-", "all " + std::to_string(type_size_.at(q)) + " realizations of " + q + " are used up");
      } else if (auto forced = forced_witnesses(a, u)) {
        for (int b : *forced)
          if (type_[b] == q && !out_[a].count(b) && try_link(a, b, u, why)) {
            picks.push_back(std::to_string(b) + " forced");
            done = true;
            break;
          }
        if (!done) abort_build(a, u, "-", why.empty() ? "no consistent candidate among the forced witnesses" : why);
        continue;
      }
      const int b = new_element(q, stage);
      if (!try_link(a, b, u, why)) abort_build(a, u, std::to_string(b), why);
      picks.push_back(std::to_string(b) + " fresh");
    }
    std::string line = r.str() + " -> ";
    if (picks.empty()) line += "met";
    for (std::size_t i = 0; i < picks.size(); ++i) line += (i ? ", " : "") + picks[i];
    if (derived_ > 0) line += "; CloseComposition +" + std::to_string(derived_);
    log(stage, line);
  }

  // One fresh generic r0-element per stage serves every GrowCofinite
  // requirement; each requirement stays queued for the next stage.
  void grow(const Requirement& r, int stage) {
    if (generic_ < 0) generic_ = new_element(r0_, stage);
    log(stage, r.str() + " -> " + std::to_string(generic_));
    pending_.push_back(r);
  }

  void log(int stage, const std::string& line) { log_->push_back("stage " + std::to_string(stage) + ": " + line); }

  Approximation snapshot(int stage) const {
    Approximation ap;
    ap.stage = stage;
    ap.type_of = type_;
    ap.born = born_;
    ap.pending.assign(pending_.begin(), pending_.end());
    auto& m = ap.structure;
    const int n = static_cast<int>(type_.size());
    m.size = type_.size();
    for (const auto& t : s_.types) m.marks[type_mark(t.name)];
    for (int e = 0; e < n; ++e) m.marks[type_mark(type_[e])].insert(e);
    for (const auto& rel : relations_) {
      auto& pairs = m.relations[rel.id];
      for (int a = 0; a < n; ++a) {
        if (type_[a] != rel.src) continue;
        if (rel.finite) {
          for (const auto& [b, t] : out_[a])
            if (rel.admits[t]) pairs.emplace_hint(pairs.end(), a, b);
        } else {
          for (int b = 0; b < n; ++b) {
            if (type_[b] != rel.dst) continue;
            auto it = out_[a].find(b);
            if (it == out_[a].end() || rel.admits[it->second]) pairs.emplace_hint(pairs.end(), a, b);
          }
        }
      }
    }
    return ap;
  }

  const LabelStructure& s_;
  int stages_;
  long long bound_ = 1;
  std::string r0_;
  std::vector<Relation> relations_;
  std::map<std::string, int> rel_index_;
  std::vector<Atom> atoms_;
  std::map<std::string, int> atom_index_;
  std::map<std::string, int> zero_of_;  // type -> zero atom
  std::vector<std::vector<int>> comp_;
  std::vector<int> inverse_;
  std::map<std::string, std::size_t> type_size_;  // finite types only

  std::vector<std::string> type_;
  std::vector<int> born_;
  std::vector<std::map<int, int>> out_, in_;
  std::vector<std::vector<std::size_t>> filled_;
  std::vector<std::pair<int, int>> undo_;
  std::deque<Requirement> pending_;
  int generic_ = -1;
  std::size_t derived_ = 0;
  std::vector<std::string>* log_ = nullptr;
};

}  // namespace detail

/// Builds the chain A_0, ..., A_stages for a checker-approved structure with
/// finitely many types. Deterministic in (s, stages).
inline BuildResult build_approximation(const LabelStructure& s, int stages) {
  return detail::GenericBuilder(s, stages).run();
}

inline Json to_json(const BuildResult& r) {
  Json out;
  out["universe_size"] = r.universe_size();
  out["chain"] = Json::array();
  for (const auto& ap : r.chain) {
    Json j = fo::to_json(ap.structure);
    j["stage"] = ap.stage;
    j["born"] = ap.born;
    j["pending"] = ap.pending.size();
    out["chain"].push_back(j);
  }
  out["log"] = r.log;
  return out;
}

}  // namespace smlab
