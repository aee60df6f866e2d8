#pragma once

// Independent reference implementations used by the unit tests and the
// acceptance binary.

#include <algorithm>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "alm/lpcore.hpp"
#include "alm/modular.hpp"
#include "alm/semantics.hpp"

namespace oracle {

using namespace alm;


// Reference semantics, written independently of the library: S is an answer set
// iff groups hold, S is the least model of the reduct (free atoms in S as facts)
// and every constraint of the reduct is satisfied.
inline bool reference_answer_set(const GroundProgram& p, const std::vector<char>& in) {
  for (const auto& g : p.groups) {
    int c = 0;
    for (int a : g) c += in[a];
    if (c > 1) return false;
  }
  size_t n = p.size();
  std::vector<char> lm(n, 0);
  for (size_t a = 0; a < n; ++a)
    if (p.free[a] && in[a]) lm[a] = 1;
  bool changed = true;
  while (changed) {
    changed = false;
    for (const auto& r : p.rules) {
      if (r.head < 0 || lm[r.head]) continue;
      bool ok = std::none_of(r.neg.begin(), r.neg.end(), [&](int b) { return in[b]; }) &&
                std::all_of(r.pos.begin(), r.pos.end(), [&](int b) { return lm[b]; });
      if (ok) lm[r.head] = changed = 1;
    }
  }
  if (lm != in) return false;
  for (const auto& r : p.rules) {
    if (r.head >= 0) continue;
    bool body = std::none_of(r.neg.begin(), r.neg.end(), [&](int b) { return in[b]; }) &&
                std::all_of(r.pos.begin(), r.pos.end(), [&](int b) { return in[b]; });
    if (body) return false;
  }
  return true;
}

inline std::set<AnswerSet> reference_all(const GroundProgram& p) {
  std::set<AnswerSet> out;
  size_t n = p.size();
  for (unsigned long m = 0; m < (1ul << n); ++m) {
    std::vector<char> in(n, 0);
    AnswerSet s;
    for (size_t a = 0; a < n; ++a)
      if (m >> a & 1) {
        in[a] = 1;
        s.push_back((int)a);
      }
    if (reference_answer_set(p, in)) out.insert(s);
  }
  return out;
}

inline GroundProgram random_program(std::mt19937& rng, int max_atoms, bool with_cr) {
  GroundProgram p;
  int n = std::uniform_int_distribution<int>(1, max_atoms)(rng);
  for (int i = 0; i < n; ++i) p.atom("a" + std::to_string(i));
  auto pick = [&] { return std::uniform_int_distribution<int>(0, n - 1)(rng); };
  auto coin = [&](int pct) { return std::uniform_int_distribution<int>(0, 99)(rng) < pct; };
  int rules = std::uniform_int_distribution<int>(1, 2 * n)(rng);
  for (int r = 0; r < rules; ++r) {
    int head = coin(12) ? -1 : pick();
    std::vector<int> pos, neg;
    int np = std::uniform_int_distribution<int>(0, 2)(rng), nn = std::uniform_int_distribution<int>(0, 2)(rng);
    for (int i = 0; i < np; ++i) pos.push_back(pick());
    for (int i = 0; i < nn; ++i) neg.push_back(pick());
    if (head < 0 && pos.empty() && neg.empty()) pos.push_back(pick());
    p.add_rule(head, pos, neg);
  }
  if (coin(30)) {
    std::vector<int> g{pick(), pick()};
    if (g[0] != g[1]) p.add_group(g);
  }
  if (coin(20)) p.free[pick()] = 1;
  if (with_cr) {
    int k = std::uniform_int_distribution<int>(1, 3)(rng);
    for (int i = 0; i < k && (int)p.size() < 12; ++i) {
      std::vector<int> pos, neg;
      if (coin(50)) pos.push_back(pick());
      if (coin(30)) neg.push_back(pick());
      p.add_cr(pick(), pos, neg, "r" + std::to_string(i));
    }
  }
  return p;
}

inline std::set<AnswerSet> library_all(const GroundProgram& p) {
  Budget b;
  auto v = solve_all(p, {}, b);
  return {v.begin(), v.end()};
}


// ---------------------------------------------------------------- random theories

// Literal over one variable: fluent f or g, positive or strongly negated.
struct Lit {
  char fn;
  bool value;
  std::string text() const { return std::string(value ? "" : "-") + fn + "(X)"; }
};

struct RandomTheory {
  struct Law {
    int act;
    Lit head;
    std::vector<Lit> body;
  };
  std::vector<Law> laws;
  std::vector<std::pair<Lit, Lit>> constraints;  // false if both
  std::vector<Lit> definition;                   // h(X) if ...
  std::vector<std::pair<int, Lit>> impossible;   // impossible occurs(A) if instance(A, act), lit

  std::string source() const {
    std::ostringstream os;
    os << "system description r\n  theory r\n    module r\n      sort declarations\n        c :: universe\n"
       << "        act1, act2 :: actions\n      function declarations\n        fluents\n          basic\n"
       << "            f : c -> booleans\n            g : c -> booleans\n          defined\n"
       << "            h : c -> booleans\n      axioms\n";
    for (const auto& l : laws) {
      os << "        occurs(A) causes " << l.head.text() << " if instance(A, act" << l.act << ")";
      for (const auto& b : l.body) os << ", " << b.text();
      os << ".\n";
    }
    for (const auto& [a, b] : constraints) os << "        false if " << a.text() << ", " << b.text() << ".\n";
    if (!definition.empty()) {
      os << "        h(X) if ";
      for (size_t i = 0; i < definition.size(); ++i) os << (i ? ", " : "") << definition[i].text();
      os << ".\n";
    }
    for (const auto& [a, l] : impossible)
      os << "        impossible occurs(A) if instance(A, act" << a << "), " << l.text() << ".\n";
    os << "  structure r\n    instances\n      x1, x2 in c\n      a1 in act1\n      a2 in act2\n";
    return os.str();
  }
};

inline RandomTheory random_theory(std::mt19937& rng) {
  auto n = [&](int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); };
  auto lit = [&] { return Lit{n(0, 1) ? 'f' : 'g', n(0, 1) == 1}; };
  RandomTheory t;
  int laws = n(1, 4);
  for (int i = 0; i < laws; ++i) {
    RandomTheory::Law l{n(1, 2), lit(), {}};
    for (int k = n(0, 2); k > 0; --k) l.body.push_back(lit());
    t.laws.push_back(l);
  }
  for (int k = n(0, 1); k > 0; --k) t.constraints.push_back({lit(), lit()});
  if (n(0, 1))
    for (int k = n(1, 2); k > 0; --k) t.definition.push_back(lit());
  if (n(0, 2) == 0) t.impossible.push_back({n(1, 2), lit()});
  return t;
}

// Values of f and g per object; absent means undefined.
using Valuation = std::map<std::pair<char, int>, bool>;

inline bool lit_holds(const Valuation& v, const Lit& l, int x) {
  auto it = v.find({l.fn, x});
  return it != v.end() && it->second == l.value;
}

inline bool all_hold(const Valuation& v, const std::vector<Lit>& ls, int x) {
  for (const auto& l : ls)
    if (!lit_holds(v, l, x)) return false;
  return true;
}

inline bool consistent(const RandomTheory& t, const Valuation& v) {
  for (int x = 1; x <= 2; ++x)
    for (const auto& [a, b] : t.constraints)
      if (lit_holds(v, a, x) && lit_holds(v, b, x)) return false;
  return true;
}

// The fluent part of a state as printed, without domain atoms.
inline std::vector<std::string> render(const RandomTheory& t, const Valuation& v) {
  std::vector<std::string> out;
  for (const auto& [k, b] : v)
    out.push_back(std::string(1, k.first) + "(x" + std::to_string(k.second) + ")=" + (b ? "true" : "false"));
  for (int x = 1; x <= 2; ++x) {
    bool h = !t.definition.empty() && all_hold(v, t.definition, x);
    out.push_back("h(x" + std::to_string(x) + ")=" + (h ? "true" : "false"));
  }
  std::sort(out.begin(), out.end());
  return out;
}

inline std::vector<std::string> without_dom(std::vector<std::string> lines) {
  std::erase_if(lines, [](const std::string& s) { return s.rfind("dom_", 0) == 0; });
  return lines;
}

inline std::vector<Valuation> all_valuations() {
  std::vector<Valuation> out;
  for (int code = 0; code < 81; ++code) {
    Valuation v;
    int c = code;
    for (char fn : {'f', 'g'})
      for (int x = 1; x <= 2; ++x) {
        int d = c % 3;
        c /= 3;
        if (d < 2) v[{fn, x}] = d == 1;
      }
    out.push_back(v);
  }
  return out;
}

// Successor under a single action of sort act, or nothing.
inline std::optional<Valuation> step(const RandomTheory& t, const Valuation& v, int act) {
  for (const auto& [a, l] : t.impossible)
    if (a == act && (lit_holds(v, l, 1) || lit_holds(v, l, 2))) return std::nullopt;
  std::map<std::pair<char, int>, std::set<bool>> effects;
  for (const auto& law : t.laws)
    if (law.act == act)
      for (int x = 1; x <= 2; ++x)
        if (all_hold(v, law.body, x)) effects[{law.head.fn, x}].insert(law.head.value);
  Valuation next = v;
  for (const auto& [k, vals] : effects) {
    if (vals.size() > 1) return std::nullopt;
    next[k] = *vals.begin();
  }
  if (!consistent(t, next)) return std::nullopt;
  return next;
}

// Answer sets whose applied CR atoms are minimal (by cardinality or inclusion).
inline std::set<AnswerSet> reference_cr(const GroundProgram& p, CrMinimality mode) {
  std::set<AnswerSet> all = reference_all(p), out;
  auto applied = [&](const AnswerSet& s) {
    std::vector<int> a;
    for (int c : p.cr)
      if (std::binary_search(s.begin(), s.end(), c)) a.push_back(c);
    return a;
  };
  size_t best = SIZE_MAX;
  for (const auto& s : all) best = std::min(best, applied(s).size());
  for (const auto& s : all) {
    auto a = applied(s);
    if (mode == CrMinimality::Cardinality) {
      if (a.size() == best) out.insert(s);
      continue;
    }
    bool dominated = false;
    for (const auto& t : all) {
      auto b = applied(t);
      if (b != a && std::includes(a.begin(), a.end(), b.begin(), b.end())) dominated = true;
    }
    if (!dominated) out.insert(s);
  }
  return out;
}

// Is every group of the answer set respected, and are the applied CR atoms reported correctly?
inline bool cr_invariants(const GroundProgram& p, const std::vector<CrResult>& rs) {
  for (const auto& r : rs) {
    for (const auto& g : p.groups) {
      int c = 0;
      for (int a : g) c += std::binary_search(r.answer.begin(), r.answer.end(), a);
      if (c > 1) return false;
    }
    std::vector<int> a;
    for (int c : p.cr)
      if (std::binary_search(r.answer.begin(), r.answer.end(), c)) a.push_back(c);
    if (a != r.applied) return false;
  }
  return true;
}

struct TheoryCheck {
  bool states = false;       // same states, defined fluents at their fixpoint, constraints hold
  bool transitions = false;  // same single-action arcs, so inertia holds
  std::string detail;
};

// Compares the library's diagram for a random theory with the direct computation.
inline TheoryCheck check_random_theory(const RandomTheory& t, const std::vector<std::string>& lib_dirs) {
  TheoryCheck out;
  System sys = load_system(parse_file(t.source(), "<random>"), LoadOptions{lib_dirs});
  Budget b;
  PreModelSet pms = enumerate_premodels(sys.bat, sys.structure, b);
  if (pms.models.size() != 1) {
    out.detail = "expected one pre-model";
    return out;
  }
  const PreModel& m = pms.models[0];
  TransitionDiagram d = build_model(sys.bat, m, ActionSets::Singletons, b);

  std::map<std::vector<std::string>, Valuation> expected;
  for (const auto& v : all_valuations())
    if (consistent(t, v)) expected[render(t, v)] = v;
  std::set<std::vector<std::string>> got, want;
  for (const auto& s : d.states) got.insert(without_dom(state_lines(m, s)));
  for (const auto& [k, v] : expected) want.insert(k);
  out.states = got == want;

  std::set<std::tuple<std::vector<std::string>, std::string, std::vector<std::string>>> arcs, want_arcs;
  for (const auto& tr : d.transitions)
    arcs.insert({without_dom(state_lines(m, d.states[tr.from])), tr.actions.empty() ? "" : m.syms->str(tr.actions[0]),
                 without_dom(state_lines(m, d.states[tr.to]))});
  for (const auto& [k, v] : expected) {
    want_arcs.insert({k, "", k});
    for (int act : {1, 2})
      if (auto n = step(t, v, act)) want_arcs.insert({k, "a" + std::to_string(act), render(t, *n)});
  }
  out.transitions = arcs == want_arcs;
  if (!out.states) out.detail = std::to_string(got.size()) + " states, expected " + std::to_string(want.size());
  else if (!out.transitions)
    out.detail = std::to_string(arcs.size()) + " arcs, expected " + std::to_string(want_arcs.size());
  return out;
}

}  // namespace oracle
