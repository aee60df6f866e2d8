#include "alm/semantics.hpp"

#include <algorithm>
#include <functional>
#include <set>

namespace alm {

namespace {

void for_each_tuple(const PreModel& m, const std::vector<std::string>& sorts,
                    const std::function<void(const std::vector<int>&)>& f) {
  std::vector<int> args;
  std::function<void(size_t)> rec = [&](size_t i) {
    if (i == sorts.size()) {
      f(args);
      return;
    }
    for (int x : m.extent(sorts[i])) {
      args.push_back(x);
      rec(i + 1);
      args.pop_back();
    }
  };
  rec(0);
}

GroundContext context(const ActionSignature& sig, const PreModel& m, GroundMode mode) {
  if (mode == GroundMode::Reduced) return GroundContext{sig, m, [](const Function& f) { return f.is_static(); }};
  return GroundContext{sig, m, [&sig](const Function& f) {
                         if (f.hierarchy()) return true;
                         // the domain of a defined fluent is everything
                         return f.is_dom() && sig.fn(f.dom_of).fluent() && !sig.fn(f.dom_of).basic_fluent();
                       }};
}

bool user_basic_fluent(const Function& f) { return f.kind == FnKind::BasicFluent && !f.is_dom(); }

// Facts and closed-world rules for statics, used by faithful grounding.
void add_static_layer(const ActionSignature& sig, const PreModel& m, ProgramBuilder& pb, ProgramStats& st) {
  for (const auto& [fn, tab] : m.values) {
    const Function& f = sig.fn(fn);
    if (f.kind != FnKind::Attribute && f.kind != FnKind::BasicStatic) continue;
    for (const auto& [args, v] : tab) {
      pb.prog.add_fact(pb.fatom(fn, args, v));
      ++st.facts;
    }
  }
  for (const auto& name : sig.order) {
    const Function& f = sig.functions.at(name);
    if (f.kind != FnKind::DefinedStatic) continue;
    if (f.is_dom() && sig.fn(f.dom_of).fluent()) continue;
    for_each_tuple(m, f.args, [&](const std::vector<int>& args) {
      int t = pb.fatom(f.name, args, m.syms->truth(true));
      pb.prog.add_rule(pb.fatom(f.name, args, m.syms->truth(false)), {}, {t});
      ++st.cwa_rules;
    });
  }
}

void add_fluent_cwa(const ActionSignature& sig, const PreModel& m, ProgramBuilder& pb, int step, ProgramStats& st) {
  for (const auto& name : sig.order) {
    const Function& f = sig.functions.at(name);
    if (f.kind != FnKind::DefinedFluent) continue;
    for_each_tuple(m, f.args, [&](const std::vector<int>& args) {
      int t = pb.fatom(f.name, args, m.syms->truth(true), step);
      pb.prog.add_rule(pb.fatom(f.name, args, m.syms->truth(false), step), {}, {t});
      ++st.cwa_rules;
    });
  }
}

bool state_rule(const NRule& r) { return r.kind == StmtKind::StateConstraint || r.kind == StmtKind::Definition; }

NRule with_occurs(const NRule& r) {
  NRule c = r;
  BodyItem occ;
  occ.kind = BodyItem::Kind::Pos;
  occ.atom = FAtom{"occurs", {*r.action}, Term::id("true")};
  c.body.insert(c.body.begin(), occ);
  return c;
}

}  // namespace

bool timed(const Function& f) { return f.fluent() || f.kind == FnKind::Occurs; }

std::string lit_text(const PreModel& m, const FluentLit& l) {
  std::string s = l.fn;
  if (!l.args.empty()) {
    s += "(";
    for (size_t i = 0; i < l.args.size(); ++i) s += (i ? "," : "") + m.syms->str(l.args[i]);
    s += ")";
  }
  return s + "=" + m.syms->str(l.value);
}

std::vector<std::string> state_lines(const PreModel& m, const State& s) {
  std::vector<std::string> out;
  for (const auto& l : s) out.push_back(lit_text(m, l));
  std::sort(out.begin(), out.end());
  return out;
}

std::unique_ptr<ProgramBuilder> build_S_M(const BasicActionTheory& bat, const PreModel& m, GroundMode mode,
                                          ProgramStats* stats) {
  ProgramStats local;
  ProgramStats& st = stats ? *stats : local;
  auto pb = std::make_unique<ProgramBuilder>(m);
  GroundContext ctx = context(bat.sig, m, mode);
  if (mode == GroundMode::Faithful) add_static_layer(bat.sig, m, *pb, st);
  auto untimed = [](const FAtom&, bool) { return -1; };
  for (const auto& r : bat.rules) {
    if (!state_rule(r)) continue;
    if (mode == GroundMode::Reduced && static_rule(r, bat.sig)) continue;
    st.axiom_rules += pb->add_rules(r, ctx, untimed);
  }
  add_fluent_cwa(bat.sig, m, *pb, -1, st);
  return pb;
}

std::unique_ptr<ProgramBuilder> build_P_M(const BasicActionTheory& bat, const PreModel& m, int horizon,
                                          GroundMode mode, ProgramStats* stats) {
  ProgramStats local;
  ProgramStats& st = stats ? *stats : local;
  const ActionSignature& sig = bat.sig;
  const Symbols& sy = *m.syms;
  auto pb = std::make_unique<ProgramBuilder>(m);
  GroundContext ctx = context(sig, m, mode);
  if (mode == GroundMode::Faithful) {
    add_static_layer(sig, m, *pb, st);
    for (const auto& r : bat.rules)
      if (state_rule(r) && static_rule(r, sig)) st.axiom_rules += pb->add_rules(r, ctx, [](const FAtom&, bool) { return -1; });
  }
  for (int i = 0; i <= horizon; ++i) {
    auto at = [&](const FAtom& a, bool) { return timed(sig.fn(a.fn)) ? i : -1; };
    for (const auto& r : bat.rules)
      if (state_rule(r) && !static_rule(r, sig)) st.axiom_rules += pb->add_rules(r, ctx, at);
    add_fluent_cwa(sig, m, *pb, i, st);
  }
  for (int i = 0; i < horizon; ++i) {
    auto at = [&](const FAtom& a, bool head) { return timed(sig.fn(a.fn)) ? (head ? i + 1 : i) : -1; };
    auto now = [&](const FAtom& a, bool) { return timed(sig.fn(a.fn)) ? i : -1; };
    for (const auto& r : bat.rules) {
      if (r.kind == StmtKind::CausalLaw) st.axiom_rules += pb->add_rules(with_occurs(r), ctx, at);
      else if (r.kind == StmtKind::Executability) st.axiom_rules += pb->add_rules(r, ctx, now);
    }
    for (int a : m.extent("actions")) {
      int t = pb->fatom("occurs", {a}, sy.truth(true), i);
      pb->prog.add_rule(pb->fatom("occurs", {a}, sy.truth(false), i), {}, {t});
      ++st.cwa_rules;
    }
    // inertia
    for (const auto& name : sig.order) {
      const Function& f = sig.functions.at(name);
      if (!user_basic_fluent(f)) continue;
      const auto& values = m.extent(f.range);
      for_each_tuple(m, f.args, [&](const std::vector<int>& args) {
        int dom_next = -1;
        if (!f.args.empty()) {
          std::string d = "dom_" + f.name;
          for (bool b : {true, false}) {
            int now_a = pb->fatom(d, args, sy.truth(b), i);
            int next = pb->fatom(d, args, sy.truth(b), i + 1);
            int other = pb->fatom(d, args, sy.truth(!b), i + 1);
            pb->prog.add_rule(next, {now_a}, {other});
            ++st.inertia_rules;
          }
          dom_next = pb->fatom(d, args, sy.truth(true), i + 1);
        }
        for (int v : values) {
          std::vector<int> pos;
          if (dom_next >= 0) pos.push_back(dom_next);
          pos.push_back(pb->fatom(f.name, args, v, i));
          std::vector<int> neg;
          for (int w : values)
            if (w != v) neg.push_back(pb->fatom(f.name, args, w, i + 1));
          pb->prog.add_rule(pb->fatom(f.name, args, v, i + 1), pos, neg);
          ++st.inertia_rules;
        }
      });
    }
  }
  return pb;
}

State project_state(const ProgramBuilder& pb, const AnswerSet& a, int step) {
  const ActionSignature& sig = *pb.model().sig;
  State s;
  for (int id : a) {
    if (id >= (int)pb.keys.size()) continue;
    const AtomKey& k = pb.keys[id];
    if (k.fn.empty() || k.step != step) continue;
    const Function& f = sig.fn(k.fn);
    if (!f.fluent()) continue;
    s.push_back(FluentLit{k.fn, k.args, k.value});
  }
  std::sort(s.begin(), s.end());
  return s;
}

namespace {

// Adds, for each basic fluent tuple, a free choice of exactly one value or
// (for non-nullary functions) undefinedness. Returns the option atoms.
std::vector<int> add_basic_choices(const ActionSignature& sig, const PreModel& m, ProgramBuilder& pb, int step) {
  std::vector<int> all;
  for (const auto& name : sig.order) {
    const Function& f = sig.functions.at(name);
    if (!user_basic_fluent(f)) continue;
    for_each_tuple(m, f.args, [&](const std::vector<int>& args) {
      std::vector<int> opts;
      for (int v : m.extent(f.range)) opts.push_back(pb.fatom(f.name, args, v, step));
      if (!f.args.empty()) opts.push_back(pb.fatom("dom_" + f.name, args, m.syms->truth(false), step));
      for (int o : opts) pb.prog.free[o] = 1;
      pb.prog.add_group(opts);
      pb.prog.add_constraint({}, opts);
      all.insert(all.end(), opts.begin(), opts.end());
    });
  }
  std::sort(all.begin(), all.end());
  return all;
}

}  // namespace

StateSearch enumerate_states(const BasicActionTheory& bat, const PreModel& m, Budget& budget, GroundMode mode) {
  auto pb = build_S_M(bat, m, mode);
  std::vector<int> options = add_basic_choices(bat.sig, m, *pb, -1);
  pb->finish();
  std::map<std::vector<int>, std::pair<int, AnswerSet>> by_basic;
  solve(pb->prog, {}, budget, [&](const AnswerSet& a) {
    std::vector<int> basic;
    std::set_intersection(a.begin(), a.end(), options.begin(), options.end(), std::back_inserter(basic));
    auto& e = by_basic[basic];
    if (e.first++ == 0) e.second = a;
    return true;
  });
  StateSearch out;
  for (const auto& [basic, e] : by_basic) {
    if (e.first == 1) out.states.push_back(project_state(*pb, e.second, -1));
    else ++out.ambiguous;
  }
  std::sort(out.states.begin(), out.states.end(),
            [&](const State& x, const State& y) { return state_lines(m, x) < state_lines(m, y); });
  return out;
}

// ---------------------------------------------------------------- transitions

TransitionSystem::TransitionSystem(const BasicActionTheory& bat, const PreModel& m) : bat_(bat), m_(m) {
  pm_ = build_P_M(bat, m, 1, GroundMode::Reduced);
  const ActionSignature& sig = bat.sig;
  for (const auto& name : sig.order) {
    const Function& f = sig.functions.at(name);
    if (!user_basic_fluent(f)) continue;
    for_each_tuple(m, f.args, [&](const std::vector<int>& args) {
      for (int v : m.extent(f.range)) {
        int a = pm_->fatom(f.name, args, v, 0);
        step0_.push_back(a);
        step0_index_[lit_text(m, FluentLit{f.name, args, v})] = a;
      }
      if (!f.args.empty())
        for (bool b : {true, false}) {
          int a = pm_->fatom("dom_" + f.name, args, m.syms->truth(b), 0);
          step0_.push_back(a);
          step0_index_[lit_text(m, FluentLit{"dom_" + f.name, args, m.syms->truth(b)})] = a;
        }
    });
  }
  for (int a : m.extent("actions")) occurs0_[a] = pm_->fatom("occurs", {a}, m.syms->truth(true), 0);
  for (int a : step0_) pm_->prog.free[a] = 1;
  for (auto& [act, a] : occurs0_) pm_->prog.free[a] = 1;
  pm_->finish();
}

const std::vector<State>& TransitionSystem::states(Budget& budget) {
  if (!states_) {
    states_ = enumerate_states(bat_, m_, budget).states;
    for (size_t i = 0; i < states_->size(); ++i) state_ids_[(*states_)[i]] = (int)i;
  }
  return *states_;
}

bool TransitionSystem::is_state(const State& s, Budget& budget) {
  if (states_) return state_ids_.count(s) > 0;
  auto it = checked_.find(s);
  if (it != checked_.end()) return it->second;
  if (!sm_) {
    sm_ = build_S_M(bat_, m_, GroundMode::Reduced);
    for (int a : add_basic_choices(bat_.sig, m_, *sm_, -1)) {
      const AtomKey& k = sm_->keys[a];
      sm_index_[lit_text(m_, FluentLit{k.fn, k.args, k.value})] = a;
    }
    sm_->finish();
  }
  SolveOptions so;
  std::set<int> on;
  for (const auto& l : s) {
    auto jt = sm_index_.find(lit_text(m_, l));
    if (jt != sm_index_.end()) on.insert(jt->second);
  }
  for (const auto& [text, a] : sm_index_) (on.count(a) ? so.assume_true : so.assume_false).push_back(a);
  so.limit = 2;
  auto answers = solve_all(sm_->prog, so, budget);
  bool ok = answers.size() == 1 && project_state(*sm_, answers[0], -1) == s;
  checked_[s] = ok;
  return ok;
}

std::vector<int> TransitionSystem::actions() const { return m_.extent("actions"); }

std::vector<State> TransitionSystem::successors(const State& s0, const std::vector<int>& actions, Budget& budget) {
  SolveOptions so;
  std::set<int> on;
  for (const auto& l : s0) {
    auto it = step0_index_.find(lit_text(m_, l));
    if (it != step0_index_.end()) on.insert(it->second);
  }
  for (int a : step0_) (on.count(a) ? so.assume_true : so.assume_false).push_back(a);
  for (auto& [act, a] : occurs0_)
    (std::find(actions.begin(), actions.end(), act) != actions.end() ? so.assume_true : so.assume_false).push_back(a);
  std::set<State> out;
  solve(pm_->prog, so, budget, [&](const AnswerSet& a) {
    State s1 = project_state(*pm_, a, 1);
    if (is_state(s1, budget)) out.insert(std::move(s1));
    return true;
  });
  return {out.begin(), out.end()};
}

TransitionDiagram build_model(const BasicActionTheory& bat, const PreModel& m, ActionSets mode, Budget& budget) {
  TransitionSystem ts(bat, m);
  TransitionDiagram d;
  d.model = &m;
  d.states = ts.states(budget);
  std::map<State, int> ids;
  for (size_t i = 0; i < d.states.size(); ++i) ids[d.states[i]] = (int)i;
  std::vector<int> acts = ts.actions();
  std::vector<std::vector<int>> sets{{}};
  if (mode == ActionSets::Singletons) {
    for (int a : acts) sets.push_back({a});
  } else {
    if (acts.size() > 20) throw Diagnostic(Diagnostic::Kind::Budget, Span{}, "powerset of " + std::to_string(acts.size()) + " actions is too large");
    for (unsigned long mask = 1; mask < (1ul << acts.size()); ++mask) {
      std::vector<int> s;
      for (size_t i = 0; i < acts.size(); ++i)
        if (mask >> i & 1) s.push_back(acts[i]);
      sets.push_back(std::move(s));
    }
  }
  for (auto& s : sets) std::sort(s.begin(), s.end(), [&](int x, int y) { return m.syms->str(x) < m.syms->str(y); });
  for (size_t i = 0; i < d.states.size(); ++i)
    for (const auto& s : sets)
      for (const auto& s1 : ts.successors(d.states[i], s, budget))
        d.transitions.push_back(Transition{(int)i, s, ids.at(s1)});
  return d;
}

std::string transition_text(const TransitionDiagram& d, const Transition& t) {
  std::string a;
  for (int x : t.actions) a += (a.empty() ? "" : ",") + d.model->syms->str(x);
  return "sigma_" + std::to_string(t.from + 1) + " --{" + a + "}--> sigma_" + std::to_string(t.to + 1);
}

std::vector<std::string> diagram_lines(const TransitionDiagram& d) {
  std::vector<std::string> out;
  for (size_t i = 0; i < d.states.size(); ++i) {
    out.push_back("sigma_" + std::to_string(i + 1) + ":");
    for (const auto& l : state_lines(*d.model, d.states[i])) out.push_back("  " + l);
  }
  for (const auto& t : d.transitions) out.push_back(transition_text(d, t));
  return out;
}

// ---------------------------------------------------------------- satisfaction

namespace {

struct View {
  const PreModel& m;
  std::map<std::pair<std::string, std::vector<int>>, int> fluents;

  View(const PreModel& model, const State& s) : m(model) {
    for (const auto& l : s) fluents[{l.fn, l.args}] = l.value;
  }

  int value(const std::string& fn, const std::vector<int>& args) const {
    const Function& f = m.sig->fn(fn);
    if (f.fluent()) {
      auto it = fluents.find({fn, args});
      return it == fluents.end() ? -1 : it->second;
    }
    return m.eval_static(fn, args);
  }

  bool atom_holds(const FAtom& a, const Binding& b) const {
    std::vector<int> args;
    for (const auto& t : a.args) {
      int v = eval_term(t, b, m);
      if (v < 0) return false;
      args.push_back(v);
    }
    int want = eval_term(a.value, b, m);
    int v = value(a.fn, args);
    return want >= 0 && v == want;
  }

  bool body_holds(const NRule& r, const Binding& b, bool skip_occurs) const {
    for (const auto& it : r.body) {
      if (it.kind == BodyItem::Kind::Cmp) {
        int l = eval_term(it.lhs, b, m), rr = eval_term(it.rhs, b, m);
        if (l < 0 || rr < 0 || !compare(it.rel, l, rr, *m.syms)) return false;
        continue;
      }
      if (skip_occurs && it.atom.fn == "occurs") continue;
      bool h = atom_holds(it.atom, b);
      if ((it.kind == BodyItem::Kind::Pos) != h) return false;
    }
    return true;
  }
};

std::string binding_text(const PreModel& m, const Binding& b) {
  std::string s;
  for (const auto& [v, x] : b)
    if (v.find('#') == std::string::npos) s += (s.empty() ? "" : ", ") + v + "=" + m.syms->str(x);
  return "{" + s + "}";
}

}  // namespace

bool satisfies(const TransitionDiagram& d, const BasicActionTheory& bat, const NRule& r, std::string* cex) {
  const PreModel& m = *d.model;
  GroundContext ctx = context(bat.sig, m, GroundMode::Reduced);
  std::vector<Binding> inst;
  ground_rule(r, ctx, [&](const Binding& b) { inst.push_back(b); });
  auto fail = [&](const std::string& why) {
    if (cex) *cex = why;
    return false;
  };
  if (r.kind == StmtKind::StateConstraint || r.kind == StmtKind::Definition) {
    for (size_t i = 0; i < d.states.size(); ++i) {
      View v(m, d.states[i]);
      for (const auto& b : inst)
        if (v.body_holds(r, b, false) && !(r.head && v.atom_holds(*r.head, b)))
          return fail("sigma_" + std::to_string(i + 1) + " violates the instance " + binding_text(m, b));
      if (r.kind != StmtKind::Definition || !r.head) continue;
      // a true defined atom needs a definition whose body holds
      std::set<std::vector<int>> supported;
      for (const auto& other : bat.rules) {
        if (other.kind != StmtKind::Definition || !other.head || other.head->fn != r.head->fn) continue;
        ground_rule(other, ctx, [&](const Binding& b) {
          if (!v.body_holds(other, b, false)) return;
          std::vector<int> args;
          for (const auto& t : other.head->args) args.push_back(eval_term(t, b, m));
          supported.insert(args);
        });
      }
      const Function& f = bat.sig.fn(r.head->fn);
      bool bad = false;
      std::string which;
      for_each_tuple(m, f.args, [&](const std::vector<int>& args) {
        if (bad) return;
        if (v.value(f.name, args) == m.syms->truth(true) && !supported.count(args)) {
          bad = true;
          which = lit_text(m, FluentLit{f.name, args, m.syms->truth(true)});
        }
      });
      if (bad) return fail("sigma_" + std::to_string(i + 1) + " has " + which + " without a definition supporting it");
    }
    return true;
  }
  for (const auto& t : d.transitions) {
    View v0(m, d.states[t.from]), v1(m, d.states[t.to]);
    for (const auto& b : inst) {
      int act = eval_term(*r.action, b, m);
      if (std::find(t.actions.begin(), t.actions.end(), act) == t.actions.end()) continue;
      if (!v0.body_holds(r, b, true)) continue;
      if (r.kind == StmtKind::Executability)
        return fail(transition_text(d, t) + " executes an impossible action " + binding_text(m, b));
      if (!v1.atom_holds(*r.head, b))
        return fail(transition_text(d, t) + " misses the effect of " + binding_text(m, b));
    }
  }
  return true;
}

bool entails(const std::vector<TransitionDiagram>& models, const BasicActionTheory& bat, const NRule& r) {
  for (const auto& d : models)
    if (!satisfies(d, bat, r)) return false;
  return true;
}

// ---------------------------------------------------------------- well-foundedness

const char* well_founded_name(WellFounded w) {
  switch (w) {
    case WellFounded::Yes: return "well-founded";
    case WellFounded::No: return "not well-founded";
    case WellFounded::Unknown: return "unknown";
  }
  return "";
}

bool definitions_stratified(const BasicActionTheory& bat, std::string* cycle) {
  const ActionSignature& sig = bat.sig;
  auto tracked = [&](const Function& f) { return f.defined() && !f.hierarchy() && !f.is_dom(); };
  std::map<std::string, std::set<std::pair<std::string, bool>>> edges;  // head -> (body, negative)
  for (const auto& r : bat.rules) {
    if (r.kind != StmtKind::Definition || !r.head || !tracked(sig.fn(r.head->fn))) continue;
    for (const auto& it : r.body) {
      if (it.kind == BodyItem::Kind::Cmp) continue;
      const Function& g = sig.fn(it.atom.fn);
      if (!tracked(g)) continue;
      bool negative = it.kind == BodyItem::Kind::Not ||
                      (it.atom.value.kind == TermKind::Id && it.atom.value.name == "false");
      edges[r.head->fn].insert({g.name, negative});
    }
  }
  auto reaches = [&](const std::string& from, const std::string& to, std::vector<std::string>& path) {
    std::set<std::string> seen;
    std::function<bool(const std::string&)> dfs = [&](const std::string& x) {
      path.push_back(x);
      if (x == to) return true;
      if (seen.insert(x).second)
        for (const auto& [y, neg] : edges[x])
          if (dfs(y)) return true;
      path.pop_back();
      return false;
    };
    return dfs(from);
  };
  for (const auto& [h, es] : edges)
    for (const auto& [g, neg] : es) {
      std::vector<std::string> path;
      if (neg && reaches(g, h, path)) {
        if (cycle) {
          *cycle = h;
          for (const auto& p : path) *cycle += " -> " + p;
        }
        return false;
      }
    }
  return true;
}

WellFoundedReport check_well_founded(const BasicActionTheory& bat, const std::vector<PreModel>& models,
                                     Budget& budget) {
  WellFoundedReport rep;
  std::string cycle;
  rep.stratified = definitions_stratified(bat, &cycle);
  if (rep.stratified) {
    rep.verdict = WellFounded::Yes;
    rep.detail = "definitions are stratified";
    return rep;
  }
  rep.detail = "negative dependency cycle " + cycle;
  try {
    for (const auto& m : models) {
      StateSearch s = enumerate_states(bat, m, budget);
      if (s.ambiguous > 0) {
        rep.verdict = WellFounded::No;
        rep.detail += "; " + std::to_string(s.ambiguous) + " interpretation(s) have several answer sets";
        return rep;
      }
    }
    rep.verdict = WellFounded::Yes;
    rep.detail += "; every interpretation has at most one answer set";
  } catch (const Diagnostic& d) {
    if (d.kind() != Diagnostic::Kind::Budget) throw;
    rep.verdict = WellFounded::Unknown;
    rep.detail += "; budget exhausted";
  }
  return rep;
}

}  // namespace alm
