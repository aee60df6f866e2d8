// One PASS/FAIL line per acceptance criterion, with measured values.

#include <json.hpp>

#include <chrono>
#include <cstdio>
#include <functional>
#include <iostream>
#include <set>
#include <sstream>

#include "alm/modular.hpp"
#include "alm/semantics.hpp"
#include "alm/tasks.hpp"
#include "corpus.hpp"
#include "oracles.hpp"

using namespace alm;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

struct Criterion {
  int id;
  const char* name;
  double limit_seconds;
  std::function<Outcome()> run;
};

// Criteria that are known not to reproduce; each has a ledger entry.
const std::set<int> kDocumentedDeviations = {7};

struct Loaded {
  System sys;
  PreModelSet pms;
};

Loaded load(const std::string& rel) {
  Loaded l;
  l.sys = load_system_file(corpus_path(rel), LoadOptions{{corpus_path("lib")}});
  Budget b;
  l.pms = enumerate_premodels(l.sys.bat, l.sys.structure, b);
  return l;
}

std::string join(const std::vector<std::string>& v, const char* sep = ", ") {
  std::string s;
  for (size_t i = 0; i < v.size(); ++i) s += (i ? sep : "") + v[i];
  return s;
}

// ---------------------------------------------------------------- 1 grammar

Outcome grammar() {
  const char* files[] = {"travel.alm",       "motion.alm",       "flat_motion.alm",
                         "professors.alm",   "t0.alm",           "n_w_f.alm",
                         "monkey.alm",       "cell_cycle_1.alm", "cell_cycle_2.alm",
                         "lib/commonsense_library.alm", "lib/commonsense_lib.alm", "lib/cell_cycle_lib.alm"};
  int parsed = 0, round_trip = 0;
  for (const char* f : files) {
    SourceFile a = parse_file(read_corpus(f), f);
    ++parsed;
    std::string text = print(a);
    SourceFile b = parse_file(text, "printed");
    if (a == b && print(b) == text) ++round_trip;
  }
  auto expected = nlohmann::json::parse(read_corpus("negative/expected.json"));
  int rejected = 0, located = 0;
  for (const auto& [file, e] : expected.items()) {
    try {
      Loaded l = load("negative/" + file);
    } catch (const Diagnostic& d) {
      ++rejected;
      if (d.span().origin && d.span().line == e["line"].get<int>() && d.span().col == e["col"].get<int>() &&
          d.message().find(e["message"].get<std::string>()) != std::string::npos)
        ++located;
    }
  }
  int n = (int)std::size(files);
  Outcome o;
  o.pass = parsed == n && round_trip == n && expected.size() == 50 && rejected == 50 && located == 50;
  o.detail = std::to_string(parsed) + "/" + std::to_string(n) + " parsed, " + std::to_string(round_trip) +
             " round-trip, negative " + std::to_string(rejected) + "/" + std::to_string(expected.size()) +
             " rejected, " + std::to_string(located) + " at the recorded location";
  return o;
}

// ---------------------------------------------------------------- 2 flattening

void rename_vars(Term& t, std::map<std::string, std::string>& names) {
  if (t.kind == TermKind::Var) {
    auto it = names.find(t.name);
    if (it == names.end()) it = names.emplace(t.name, "V" + std::to_string(names.size() + 1)).first;
    t.name = it->second;
  }
  for (auto& a : t.args) rename_vars(a, names);
}

void blank_vars(Term& t) {
  if (t.kind == TermKind::Var) t.name = "_";
  for (auto& a : t.args) blank_vars(a);
}

std::string shape(Literal l) {
  blank_vars(l.lhs);
  if (l.rhs) blank_vars(*l.rhs);
  return print(l);
}

std::string shape(const Term& t) {
  Term c = t;
  blank_vars(c);
  return print(c);
}

// Sides of = and != in a fixed order, body literals sorted by their variable-free
// shape, then variables renamed by first use.
std::string normal_axiom(Axiom a) {
  for (auto& l : a.body)
    if ((l.rel == Rel::Eq || l.rel == Rel::Neq) && l.rhs && shape(*l.rhs) < shape(l.lhs)) std::swap(l.lhs, *l.rhs);
  std::stable_sort(a.body.begin(), a.body.end(),
                   [](const Literal& x, const Literal& y) { return shape(x) < shape(y); });
  std::map<std::string, std::string> names;
  if (a.kind != AxiomKind::Rule) rename_vars(a.action, names);
  if (a.head) {
    rename_vars(a.head->lhs, names);
    if (a.head->rhs) rename_vars(*a.head->rhs, names);
  }
  for (auto& l : a.body) {
    rename_vars(l.lhs, names);
    if (l.rhs) rename_vars(*l.rhs, names);
  }
  return print(a);
}

struct Normal {
  std::set<std::pair<std::string, std::string>> links;
  std::multiset<std::string> functions, axioms;
  size_t statics = 0, fluents = 0;
};

Normal normal_module(const Module& m) {
  Normal n;
  ActionSignature sig = build_signature(m);
  n.links = sig.hierarchy.links();
  for (const auto& f : m.funcs) {
    FuncDecl d = f;
    d.span = {};
    Module one;
    one.funcs = {d};
    n.functions.insert(print(one));
    (f.cat == FnCat::Static ? n.statics : n.fluents) += 1;
  }
  for (const auto& a : m.axioms) n.axioms.insert(normal_axiom(a));
  return n;
}

Outcome flattening() {
  SourceFile lib = parse_file(read_corpus("motion.alm"), "motion.alm");
  Module flat = flatten(resolve_imports(lib.theory(), {}));
  SourceFile printed = parse_file(read_corpus("flat_motion.alm"), "flat_motion.alm");
  Module ref = flatten(resolve_imports(printed.theory(), {}));
  Normal a = normal_module(flat), b = normal_module(ref);
  Outcome o;
  o.pass = a.links == b.links && a.functions == b.functions && a.axioms == b.axioms;
  o.detail = std::to_string(a.links.size()) + " sort links, " + std::to_string(a.fluents) + "+" +
             std::to_string(a.statics) + " function declarations, " + std::to_string(a.axioms.size()) +
             " axioms; printed: " + std::to_string(b.links.size()) + ", " + std::to_string(b.fluents) + "+" +
             std::to_string(b.statics) + ", " + std::to_string(b.axioms.size());
  if (!o.pass) {
    for (const auto& x : a.axioms)
      if (!b.axioms.count(x)) o.detail += "; only flattened: " + x;
    for (const auto& x : b.axioms)
      if (!a.axioms.count(x)) o.detail += "; only printed: " + x;
  }
  return o;
}

// ---------------------------------------------------------------- 3 T0

// Is (s0, acts, s1) an answer set of P_M with s0 and the actions as facts at step 0?
bool transition_by_reduct(const BasicActionTheory& bat, const PreModel& m, const State& s0, const std::vector<int>& acts,
                          const State& s1) {
  auto pb = build_P_M(bat, m, 1, GroundMode::Reduced);
  const Symbols& sy = *m.syms;
  for (const auto& l : s0) pb->prog.add_fact(pb->fatom(l.fn, l.args, l.value, 0));
  for (int a : acts) pb->prog.add_fact(pb->fatom("occurs", {a}, sy.truth(true), 0));
  pb->finish();
  std::vector<int> cand;
  for (const auto& l : s0) cand.push_back(pb->fatom(l.fn, l.args, l.value, 0));
  for (const auto& l : s1) cand.push_back(pb->fatom(l.fn, l.args, l.value, 1));
  for (int a : m.extent("actions")) {
    bool on = std::find(acts.begin(), acts.end(), a) != acts.end();
    cand.push_back(pb->fatom("occurs", {a}, sy.truth(on), 0));
  }
  std::vector<char> in(pb->prog.size(), 0);
  for (int c : cand) in[c] = 1;
  return oracle::reference_answer_set(pb->prog, in);
}

Outcome t0() {
  Loaded l = load("t0.alm");
  const PreModel& m = l.pms.models.at(0);
  Budget b;
  TransitionDiagram d = build_model(l.sys.bat, m, ActionSets::Powerset, b);
  // printed states, with the membership of dom_f
  std::vector<std::vector<std::string>> printed = {
      {"dom_f(x)=true", "f(x)=y", "g(x)=y"}, {"dom_f(x)=true", "f(x)=z", "g(x)=y"},
      {"dom_f(x)=true", "f(x)=y", "g(x)=z"}, {"dom_f(x)=true", "f(x)=z", "g(x)=z"},
      {"dom_f(x)=false", "g(x)=y"},          {"dom_f(x)=false", "g(x)=z"}};
  auto essential = [&](const State& s) {
    std::vector<std::string> out;
    for (const auto& line : state_lines(m, s))
      if (line.rfind("f(", 0) == 0 || line.rfind("g(", 0) == 0 || line.rfind("dom_f(", 0) == 0) out.push_back(line);
    return out;
  };
  std::vector<int> paper_to_mine(printed.size(), -1);
  for (size_t i = 0; i < printed.size(); ++i)
    for (size_t k = 0; k < d.states.size(); ++k)
      if (essential(d.states[k]) == printed[i]) paper_to_mine[i] = (int)k;
  int matched = 0;
  for (int x : paper_to_mine) matched += x >= 0;

  auto sym = [&](const char* s) { return m.syms->find(Term::id(s)); };
  std::set<std::tuple<int, std::vector<int>, int>> arcs;
  for (const auto& t : d.transitions) arcs.insert({t.from, t.actions, t.to});
  struct Want {
    int from;
    const char* act;
    int to;
  };
  std::vector<Want> wanted = {{1, "b", 5}, {2, "a", 1}, {5, "a", 1}, {5, "b", 5}};
  int found = 0;
  if (matched == 6)
    for (const auto& w : wanted)
      found += arcs.count({paper_to_mine[w.from - 1], {sym(w.act)}, paper_to_mine[w.to - 1]});

  // every arc, and every non-arc, decided independently by the reduct check
  int agree = 0, checked = 0;
  std::vector<std::vector<int>> sets = {{}, {sym("a")}, {sym("b")}, {sym("a"), sym("b")}};
  for (auto& s : sets) std::sort(s.begin(), s.end());
  for (size_t i = 0; i < d.states.size(); ++i)
    for (const auto& acts : sets)
      for (size_t j = 0; j < d.states.size(); ++j) {
        ++checked;
        bool lib = arcs.count({(int)i, acts, (int)j}) > 0;
        bool ref = transition_by_reduct(l.sys.bat, m, d.states[i], acts, d.states[j]);
        agree += lib == ref;
        if (lib != ref && std::getenv("ALM_ACCEPTANCE_DEBUG"))
          std::cerr << join(state_lines(m, d.states[i])) << " --" << acts.size() << (acts.empty() ? "" : m.syms->str(acts[0])) << "--> "
                    << join(state_lines(m, d.states[j])) << " lib=" << lib << " ref=" << ref << "\n";
      }
  Outcome o;
  o.pass = d.states.size() == 6 && matched == 6 && found == 4 && agree == checked;
  o.detail = std::to_string(d.states.size()) + " states, " + std::to_string(matched) + "/6 match the printed ones, " +
             std::to_string(found) + "/4 printed transitions, " + std::to_string(agree) + "/" +
             std::to_string(checked) + " (state, action set, state) triples agree with the reduct check";
  return o;
}

// ---------------------------------------------------------------- 4 alice

Outcome alice() {
  Loaded l = load("professors.alm");
  std::vector<std::string> labels;
  for (const auto& m : l.pms.models) labels.push_back(m.label);
  std::sort(labels.begin(), labels.end());
  Outcome o;
  o.pass = labels == std::vector<std::string>{"alice:assistant", "alice:associate", "alice:full"};
  o.detail = std::to_string(labels.size()) + " models {" + join(labels) + "}";
  return o;
}

// ---------------------------------------------------------------- 5 travel

Outcome travel() {
  Loaded l = load("travel.alm");
  const PreModel& m = l.pms.models.at(0);
  Budget b;
  TransitionDiagram d = build_model(l.sys.bat, m, ActionSets::Singletons, b);
  std::map<std::vector<std::string>, int> index;
  for (size_t i = 0; i < d.states.size(); ++i) index[state_lines(m, d.states[i])] = (int)i;
  std::set<std::tuple<int, std::string, int>> arcs;
  for (const auto& t : d.transitions)
    if (t.actions.size() == 1) arcs.insert({t.from, m.syms->str(t.actions[0]), t.to});

  // the fragment: paris and rome connected, neither connected to new_york
  auto state_with = [&](const std::string& bob, const std::string& john) -> int {
    for (size_t i = 0; i < d.states.size(); ++i) {
      std::set<std::string> lines;
      for (const auto& x : state_lines(m, d.states[i])) lines.insert(x);
      if (lines.count("loc_in(bob)=" + bob) && lines.count("loc_in(john)=" + john) &&
          lines.count("connected(paris,rome)=true") && lines.count("connected(paris,new_york)=false") &&
          lines.count("connected(rome,new_york)=false"))
        return (int)i;
    }
    return -1;
  };
  const char* cities[] = {"paris", "rome"};
  int wanted = 0, found = 0;
  for (const char* bl : cities)
    for (const char* jl : cities) {
      int from = state_with(bl, jl);
      std::string bo = std::string(bl) == "paris" ? "rome" : "paris";
      std::string jo = std::string(jl) == "paris" ? "rome" : "paris";
      wanted += 2;
      if (from < 0) continue;
      found += arcs.count({from, "go(bob," + std::string(bl) + "," + bo + ")", state_with(bo, jl)});
      found += arcs.count({from, "go(john," + std::string(jl) + "," + jo + ")", state_with(bl, jo)});
    }
  // no move into new_york from an origin not connected to it
  int bad = 0;
  for (const auto& t : d.transitions)
    for (int a : t.actions) {
      const Term& act = m.syms->term(a);
      if (act.args.size() != 3 || compact(act.args[2]) != "new_york") continue;
      std::set<std::string> lines;
      for (const auto& x : state_lines(m, d.states[t.from])) lines.insert(x);
      if (lines.count("connected(" + compact(act.args[1]) + ",new_york)=false")) ++bad;
    }
  Outcome o;
  o.pass = found == wanted && bad == 0;
  o.detail = std::to_string(d.states.size()) + " states, " + std::to_string(d.transitions.size()) + " transitions; " +
             std::to_string(found) + "/" + std::to_string(wanted) + " fragment arcs; " + std::to_string(bad) +
             " moves into new_york from an unconnected origin";
  return o;
}

// ---------------------------------------------------------------- 6 projection

Outcome projection() {
  Loaded l = load("monkey.alm");
  const PreModel& m = l.pms.models.at(0);
  History h = load_history(corpus_path("monkey_gamma1.hist"));
  Budget b;
  ProjectionResult r = temporal_project(l.sys.bat, m, h, b);
  GroundLiteral g = resolve_literal(parse_literal("loc_in(monkey) = initial_box"), m);
  bool at1 = false;
  if (r.trajectories.size() == 1) at1 = holds(g, m, r.trajectories[0].states.at(1));
  bool entailed = entails_at(r.trajectories, m, g, 1);
  Outcome o;
  o.pass = r.trajectories.size() == 1 && at1 && entailed;
  o.detail = std::to_string(r.trajectories.size()) + " trajectory(ies); loc_in(monkey)=initial_box at step 1: " +
             (at1 ? "yes" : "no") + "; entailed: " + (entailed ? "yes" : "no");
  return o;
}

// ---------------------------------------------------------------- 7 planning

Outcome planning() {
  Loaded l = load("monkey.alm");
  const PreModel& m = l.pms.models.at(0);
  History h = load_history(corpus_path("monkey_gamma_mb.hist"));
  auto goal = load_goal(corpus_path("monkey.goal"));
  PlanOptions po;
  po.horizon = 6;
  Budget b;
  PlanResult r = plan(l.sys.bat, m, h, goal, po, b);
  auto text = [&](const Plan& p) {
    std::vector<std::string> acts;
    for (const auto& s : p)
      for (int a : s) acts.push_back(m.syms->str(a));
    return join(acts, " ");
  };
  std::set<std::string> plans;
  for (const auto& p : r.plans) plans.insert(text(p));
  const std::string first = "move(initial_box) grasp(box) carry(box,under_banana) release(box) climb(box) grasp(banana)";
  const std::string second = "move(initial_box) grasp(box) move(under_banana) release(box) climb(box) grasp(banana)";
  size_t valid = std::count(r.valid.begin(), r.valid.end(), 1);
  bool both = plans.count(first) && plans.count(second);
  Outcome o;
  o.pass = r.plans.size() == 2 && both && valid == r.plans.size();
  o.detail = std::to_string(r.plans.size()) + " minimal plans (expected 2); both printed plans present: " +
             (both ? "yes" : "no") + "; " + std::to_string(valid) + "/" + std::to_string(r.plans.size()) +
             " reach holding(monkey,banana) on re-execution";
  return o;
}

// ---------------------------------------------------------------- 8 well-foundedness

Outcome well_foundedness() {
  Loaded monkey = load("monkey.alm");
  Budget b1;
  WellFoundedReport wm = check_well_founded(monkey.sys.bat, monkey.pms.models, b1);
  Loaded nwf = load("n_w_f.alm");
  Budget b2;
  WellFoundedReport wn = check_well_founded(nwf.sys.bat, nwf.pms.models, b2);
  // n_w_f has no basic fluents, so its only basic part gives S_M itself
  auto sm = build_S_M(nwf.sys.bat, nwf.pms.models.at(0), GroundMode::Faithful);
  sm->finish();
  Budget b3;
  size_t answers = solve_all(sm->prog, {}, b3).size();
  Outcome o;
  o.pass = wm.verdict == WellFounded::Yes && wn.verdict == WellFounded::No && answers == 2;
  o.detail = std::string("monkey: ") + well_founded_name(wm.verdict) + "; n_w_f: " + well_founded_name(wn.verdict) +
             " with " + std::to_string(answers) + " answer sets of S_sigma";
  return o;
}

// ---------------------------------------------------------------- 9 solver

Outcome solver() {
  std::mt19937 rng(20240611);
  int agree = 0;
  for (int i = 0; i < 500; ++i) {
    GroundProgram p = oracle::random_program(rng, 12, false);
    Budget b;
    auto v = solve_all(p, {}, b);
    std::set<AnswerSet> got(v.begin(), v.end());
    agree += got == oracle::reference_all(p) && got.size() == v.size();
  }
  std::mt19937 rng2(77);
  int cr_ok = 0;
  for (int i = 0; i < 200; ++i) {
    GroundProgram p = oracle::random_program(rng2, 9, true);
    Budget b1, b2;
    auto card = solve_cr(p, CrMinimality::Cardinality, b1);
    auto sub = solve_cr(p, CrMinimality::Subset, b2);
    std::set<AnswerSet> gc, gs;
    for (const auto& r : card) gc.insert(r.answer);
    for (const auto& r : sub) gs.insert(r.answer);
    cr_ok += oracle::cr_invariants(p, card) && oracle::cr_invariants(p, sub) &&
             gc == oracle::reference_cr(p, CrMinimality::Cardinality) &&
             gs == oracle::reference_cr(p, CrMinimality::Subset);
  }
  Outcome o;
  o.pass = agree == 500 && cr_ok == 200;
  o.detail = std::to_string(agree) + "/500 programs agree with the reduct oracle; " + std::to_string(cr_ok) +
             "/200 CR programs minimal and consistent";
  return o;
}

// ---------------------------------------------------------------- 10 inertia and CWA

Outcome inertia() {
  std::mt19937 rng(424242);
  int states = 0, arcs = 0;
  std::string first_failure;
  for (int i = 0; i < 100; ++i) {
    oracle::RandomTheory t = oracle::random_theory(rng);
    oracle::TheoryCheck c = oracle::check_random_theory(t, {corpus_path("lib")});
    states += c.states;
    arcs += c.transitions;
    if ((!c.states || !c.transitions) && first_failure.empty()) first_failure = "; theory " + std::to_string(i) + ": " + c.detail;
  }
  Outcome o;
  o.pass = states == 100 && arcs == 100;
  o.detail = std::to_string(states) + "/100 theories: states, definitions and constraints agree; " +
             std::to_string(arcs) + "/100: transitions (inertia) agree" + first_failure;
  return o;
}

// ---------------------------------------------------------------- 11 cell cycle

Outcome cell_cycle() {
  Loaded l = load("cell_cycle_2.alm");
  const PreModel& m = l.pms.models.at(0);
  auto lit = [&](const char* s) { return resolve_literal(parse_literal(s), m); };
  History full = load_history(corpus_path("cell_cycle_full.hist"));
  Budget b1;
  ProjectionResult a = temporal_project(l.sys.bat, m, full, b1);
  bool full_ok = !a.trajectories.empty() && entails_at(a.trajectories, m, lit("num(cell, sample) = 2"), full.horizon) &&
                 entails_at(a.trajectories, m, lit("num(nucleus, cell) = 1"), full.horizon);
  History q = load_history(corpus_path("cell_cycle_12_9.hist"));
  Budget b2;
  ProjectionResult c = temporal_project(l.sys.bat, m, q, b2);
  bool q_ok = q.horizon == 2 && !c.trajectories.empty() && entails_at(c.trajectories, m, lit("num(cell, sample) = 1"), q.horizon) &&
              entails_at(c.trajectories, m, lit("num(nucleus, cell) = 2"), q.horizon);
  Outcome o;
  o.pass = full_ok && q_ok;
  o.detail = std::string("full cycle ends with 2 cells of 1 nucleus: ") + (full_ok ? "yes" : "no") +
             "; without cytokinesis 1 cell with 2 nuclei: " + (q_ok ? "yes" : "no");
  return o;
}

}  // namespace

int main() {
  std::vector<Criterion> all = {
      {1, "grammar conformance", 1, grammar},
      {2, "flattening of motion", 1, flattening},
      {3, "T0 states and transitions", 5, t0},
      {4, "underspecified hierarchy", 1, alice},
      {5, "travel diagram", 10, travel},
      {6, "temporal projection", 5, projection},
      {7, "monkey planning", 60, planning},
      {8, "well-foundedness", 5, well_foundedness},
      {9, "solver properties", 120, solver},
      {10, "inertia and closed-world properties", 120, inertia},
      {11, "cell cycle projection", 10, cell_cycle},
  };
  int undocumented = 0;
  for (const auto& c : all) {
    auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o.detail = std::string("error: ") + e.what();
    }
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    bool in_time = secs < c.limit_seconds;
    bool pass = o.pass && in_time;
    char timing[64];
    std::snprintf(timing, sizeof timing, "%.2fs (limit %gs)", secs, c.limit_seconds);
    std::cout << (pass ? "PASS" : "FAIL") << " [" << c.id << "] " << c.name << ": " << o.detail << "; " << timing;
    if (!pass && kDocumentedDeviations.count(c.id)) std::cout << " [documented deviation]";
    std::cout << "\n";
    if (!pass && !kDocumentedDeviations.count(c.id)) ++undocumented;
  }
  return undocumented == 0 ? 0 : 1;
}
