#include "alm/tasks.hpp"

#include <algorithm>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>

namespace alm {

namespace {

struct Chunk {
  std::string text;  // padded so that spans point into the file
  bool negated = false;
};

// Splits a fact file into `.`-terminated statements outside parentheses.
std::vector<Chunk> split_statements(const std::string& src, const std::string& origin) {
  std::string s = src;
  for (size_t i = 0; i < s.size(); ++i)
    if (s[i] == '%')
      while (i < s.size() && s[i] != '\n') s[i++] = ' ';
  std::vector<Chunk> out;
  int depth = 0;
  size_t start = 0;
  int line = 1, col = 1, start_line = 1, start_col = 1;
  bool empty = true;
  for (size_t i = 0; i < s.size(); ++i) {
    char c = s[i];
    if (empty && !std::isspace((unsigned char)c)) {
      empty = false;
      start = i;
      start_line = line;
      start_col = col;
    }
    if (c == '(') ++depth;
    if (c == ')') --depth;
    if (c == '.' && depth == 0 && !empty) {
      Chunk ch;
      std::string body = s.substr(start, i - start);
      if (!body.empty() && body[0] == '-') {
        ch.negated = true;
        body[0] = ' ';
      }
      ch.text = std::string(start_line - 1, '\n') + std::string(start_col - 1, ' ') + body;
      out.push_back(std::move(ch));
      empty = true;
    }
    if (c == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  if (!empty) {
    Span sp{std::make_shared<const std::string>(origin), start_line, start_col};
    fail_input(sp, "statement is not terminated by '.'");
  }
  return out;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail_input(Span{std::make_shared<const std::string>(path), 0, 0}, "cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int step_of(const Term& t, bool allow_var) {
  if (t.kind == TermKind::Int && t.ival >= 0) return (int)t.ival;
  if (allow_var && t.kind == TermKind::Var) return -1;
  fail_input(t.span, "step must be a non-negative integer");
}

std::vector<int> resolve_args(const Term& t, const PreModel& m) {
  std::vector<int> args;
  for (const auto& a : t.args) {
    int v = eval_term(a, {}, m);
    if (v < 0) fail_semantic(a.span.line ? a.span : t.span, "unknown object " + print(a));
    args.push_back(v);
  }
  return args;
}

const Function& fluent_of(const Term& t, const PreModel& m) {
  if (t.kind != TermKind::Func && t.kind != TermKind::Id) fail_semantic(t.span, "expected a fluent term");
  const Function* f = m.sig->find(t.name);
  if (!f) fail_semantic(t.span, "unknown function " + t.name);
  if (!f->fluent()) fail_semantic(t.span, t.name + " is not a fluent");
  if (f->arity() != t.args.size())
    fail_semantic(t.span, t.name + " expects " + std::to_string(f->arity()) + " argument(s)");
  return *f;
}

FluentLit resolve_fluent(const Term& t, const Term& value, const PreModel& m) {
  const Function& f = fluent_of(t, m);
  std::vector<int> args = resolve_args(t, m);
  for (size_t i = 0; i < args.size(); ++i)
    if (!m.member(f.args[i], args[i]))
      fail_semantic(t.span, m.syms->str(args[i]) + " is not in sort " + f.args[i]);
  int v = eval_term(value, {}, m);
  if (v < 0 || !m.member(f.range, v)) fail_semantic(value.span.line ? value.span : t.span, print(value) + " is not a value of " + f.name);
  return FluentLit{f.name, args, v};
}

bool user_basic_fluent(const Function& f) { return f.kind == FnKind::BasicFluent && !f.is_dom(); }

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

std::string tuple_text(const PreModel& m, const std::string& fn, const std::vector<int>& args) {
  std::string s = fn;
  if (!args.empty()) {
    s += "(";
    for (size_t i = 0; i < args.size(); ++i) s += (i ? "," : "") + m.syms->str(args[i]);
    s += ")";
  }
  return s;
}

Trajectory trajectory_of(const ProgramBuilder& pb, const AnswerSet& a, int n) {
  Trajectory t;
  for (int i = 0; i <= n; ++i) t.states.push_back(project_state(pb, a, i));
  t.actions.assign(n, {});
  int yes = pb.model().syms->truth(true);
  for (int id : a) {
    if (id >= (int)pb.keys.size()) continue;
    const AtomKey& k = pb.keys[id];
    if (k.fn == "occurs" && k.value == yes && k.step >= 0 && k.step < n) t.actions[k.step].push_back(k.args[0]);
  }
  for (auto& s : t.actions) std::sort(s.begin(), s.end(), [&](int x, int y) {
      return pb.model().syms->str(x) < pb.model().syms->str(y);
    });
  return t;
}

std::string set_text(const PreModel& m, const std::vector<int>& acts) {
  std::string s;
  for (int a : acts) s += (s.empty() ? "" : ",") + m.syms->str(a);
  return "{" + s + "}";
}

}  // namespace

History parse_history(const std::string& src, const std::string& origin) {
  History h;
  for (const auto& ch : split_statements(src, origin)) {
    Term t = parse_term(ch.text, origin);
    if (t.kind != TermKind::Func) fail_input(t.span, "expected observed(...) or happened(...)");
    if (t.name == "observed" && t.args.size() == 3 && !ch.negated) {
      Observation o{t.args[0], t.args[1], step_of(t.args[2], false), t.span};
      h.horizon = std::max(h.horizon, o.step);
      h.observed.push_back(std::move(o));
    } else if (t.name == "happened" && t.args.size() == 2) {
      Happening e{t.args[0], step_of(t.args[1], ch.negated), ch.negated, t.span};
      if (e.step >= 0) h.horizon = std::max(h.horizon, e.step + 1);
      h.happened.push_back(std::move(e));
    } else {
      fail_input(t.span, "expected observed(f, v, i), happened(a, i) or -happened(a, i)");
    }
  }
  return h;
}

History load_history(const std::string& path) { return parse_history(read_file(path), path); }

std::vector<Literal> parse_goal(const std::string& src, const std::string& origin) {
  std::vector<Literal> out;
  for (const auto& ch : split_statements(src, origin)) {
    Literal l = parse_literal(ch.text, origin);
    if (ch.negated) {
      if (l.neg || l.rel != Rel::None) fail_input(l.span, "misplaced '-' in goal literal");
      l.neg = true;
    }
    out.push_back(std::move(l));
  }
  return out;
}

std::vector<Literal> load_goal(const std::string& path) { return parse_goal(read_file(path), path); }

GroundLiteral resolve_literal(const Literal& l, const PreModel& m) {
  GroundLiteral g;
  if (l.rel == Rel::None) {
    const Function& f = fluent_of(l.lhs, m);
    if (f.range != "booleans") fail_semantic(l.span, f.name + " is not boolean; give a value");
    g.lit = resolve_fluent(l.lhs, Term::id(l.neg ? "false" : "true"), m);
    return g;
  }
  if (l.neg) fail_semantic(l.span, "'-' cannot be combined with a comparison");
  if (l.rel != Rel::Eq && l.rel != Rel::Neq) fail_semantic(l.span, "goal literals use = or !=");
  g.lit = resolve_fluent(l.lhs, *l.rhs, m);
  g.neq = l.rel == Rel::Neq;
  return g;
}

bool holds(const GroundLiteral& g, const PreModel&, const State& s) {
  for (const auto& l : s)
    if (l.fn == g.lit.fn && l.args == g.lit.args) return g.neq ? l.value != g.lit.value : l.value == g.lit.value;
  return false;
}

std::string literal_text(const PreModel& m, const GroundLiteral& g) {
  std::string s = lit_text(m, g.lit);
  if (g.neq) s.replace(s.rfind('='), 1, "!=");
  return s;
}

std::vector<std::string> missing_initial(const BasicActionTheory& bat, const PreModel& m, const History& h) {
  std::set<std::pair<std::string, std::vector<int>>> seen;
  for (const auto& o : h.observed)
    if (o.step == 0) {
      const Function& f = fluent_of(o.fluent, m);
      seen.insert({f.name, resolve_args(o.fluent, m)});
    }
  std::vector<std::string> out;
  for (const auto& name : bat.sig.order) {
    const Function& f = bat.sig.functions.at(name);
    if (!user_basic_fluent(f)) continue;
    for_each_tuple(m, f.args, [&](const std::vector<int>& args) {
      if (!seen.count({f.name, args})) out.push_back(tuple_text(m, f.name, args));
    });
  }
  return out;
}

std::unique_ptr<ProgramBuilder> build_projection_program(const BasicActionTheory& bat, const PreModel& m,
                                                         const History& h, int n, const TaskOptions& opt,
                                                         size_t* history_rules) {
  auto pb = build_P_M(bat, m, n, GroundMode::Reduced);
  size_t count = 0;
  const Symbols& sy = *m.syms;
  for (const auto& o : h.observed) {
    if (o.step > n) fail_semantic(o.span, "observation at step " + std::to_string(o.step) + " beyond horizon " + std::to_string(n));
    FluentLit l = resolve_fluent(o.fluent, o.value, m);
    const Function& f = bat.sig.fn(l.fn);
    if (o.step == 0) {
      pb->prog.add_fact(pb->fatom(l.fn, l.args, l.value, 0));
      ++count;
      continue;
    }
    // reality check
    for (int w : m.extent(f.range)) {
      if (w == l.value) continue;
      std::vector<int> body;
      if (user_basic_fluent(f) && !l.args.empty()) body.push_back(pb->fatom("dom_" + f.name, l.args, sy.truth(true), o.step));
      body.push_back(pb->fatom(l.fn, l.args, w, o.step));
      pb->prog.add_constraint(body);
      ++count;
    }
  }
  for (const auto& e : h.happened) {
    int a = eval_term(e.action, {}, m);
    if (a < 0 || !m.member("actions", a)) fail_semantic(e.span, print(e.action) + " is not an action");
    if (e.step >= n) fail_semantic(e.span, "occurrence at step " + std::to_string(e.step) + " beyond horizon " + std::to_string(n));
    std::vector<int> steps;
    if (e.step >= 0) steps.push_back(e.step);
    else
      for (int i = 0; i < n; ++i) steps.push_back(i);
    for (int i : steps) {
      int occ = pb->fatom("occurs", {a}, sy.truth(true), i);
      if (e.negated) pb->prog.add_constraint({occ});
      else pb->prog.add_fact(occ);
      ++count;
    }
  }
  if (opt.close_initial_booleans)
    for (const auto& name : bat.sig.order) {
      const Function& f = bat.sig.functions.at(name);
      if (!user_basic_fluent(f) || f.range != "booleans") continue;
      for_each_tuple(m, f.args, [&](const std::vector<int>& args) {
        int t = pb->fatom(f.name, args, sy.truth(true), 0);
        pb->prog.add_rule(pb->fatom(f.name, args, sy.truth(false), 0), {}, {t});
        ++count;
      });
    }
  if (history_rules) *history_rules = count;
  return pb;
}

ProjectionResult temporal_project(const BasicActionTheory& bat, const PreModel& m, const History& h, Budget& budget,
                                  const TaskOptions& opt) {
  ProjectionResult res;
  res.missing = missing_initial(bat, m, h);
  int n = h.horizon;
  auto pb = build_projection_program(bat, m, h, n, opt);
  pb->finish();
  std::set<std::vector<std::string>> seen;
  solve(pb->prog, {}, budget, [&](const AnswerSet& a) {
    Trajectory t = trajectory_of(*pb, a, n);
    std::vector<std::string> key = trajectory_lines(m, t);
    if (seen.insert(key).second) res.trajectories.push_back(std::move(t));
    return true;
  });
  std::sort(res.trajectories.begin(), res.trajectories.end(), [&](const Trajectory& x, const Trajectory& y) {
    return trajectory_lines(m, x) < trajectory_lines(m, y);
  });
  if (res.missing.empty() && !opt.close_initial_booleans) {
    TransitionSystem ts(bat, m);
    res.verified = true;
    for (const auto& t : res.trajectories) {
      if (!ts.is_state(t.states[0], budget)) res.verified = false;
      for (int i = 0; i < n && res.verified; ++i) {
        auto next = ts.successors(t.states[i], t.actions[i], budget);
        res.verified = std::find(next.begin(), next.end(), t.states[i + 1]) != next.end();
      }
    }
  }
  return res;
}

bool entails_at(const std::vector<Trajectory>& models, const PreModel& m, const GroundLiteral& l, int step) {
  for (const auto& t : models) {
    if (step < 0 || step >= (int)t.states.size()) return false;
    if (!holds(l, m, t.states[step])) return false;
  }
  return true;
}

std::unique_ptr<ProgramBuilder> build_planning_program(const BasicActionTheory& bat, const PreModel& m,
                                                       const History& h, const std::vector<GroundLiteral>& g,
                                                       const PlanOptions& opt) {
  const int n = opt.horizon;
  if (n < 0) fail_semantic(Span{}, "horizon must be non-negative");
  for (const auto& e : h.happened)
    if (!e.negated && e.step >= n) fail_semantic(e.span, "history extends beyond the planning horizon");
  if (g.empty()) fail_semantic(Span{}, "empty goal");
  auto pb = build_projection_program(bat, m, h, n, opt.task);
  const Symbols& sy = *m.syms;
  GroundProgram& p = pb->prog;
  int success = pb->aux("success");
  for (int i = 0; i <= n; ++i) {
    // one goal rule per choice of witness for each != literal
    std::vector<std::vector<int>> alts;
    for (const auto& gl : g) {
      std::vector<int> a;
      if (!gl.neq) a.push_back(pb->fatom(gl.lit.fn, gl.lit.args, gl.lit.value, i));
      else
        for (int w : m.extent(bat.sig.fn(gl.lit.fn).range))
          if (w != gl.lit.value) a.push_back(pb->fatom(gl.lit.fn, gl.lit.args, w, i));
      alts.push_back(std::move(a));
    }
    int gi = pb->aux("goal(" + std::to_string(i) + ")");
    std::vector<int> body;
    std::function<void(size_t)> rec = [&](size_t k) {
      if (k == alts.size()) {
        p.add_rule(gi, body);
        return;
      }
      for (int a : alts[k]) {
        body.push_back(a);
        rec(k + 1);
        body.pop_back();
      }
    };
    rec(0);
    p.add_rule(success, {gi});
  }
  p.add_constraint({}, {success});
  std::vector<int> smtg;
  for (int i = 0; i < n; ++i) {
    int s = pb->aux("smtg_happened(" + std::to_string(i) + ")");
    smtg.push_back(s);
    std::vector<int> step_occ;
    for (int a : m.extent("actions")) {
      int occ = pb->fatom("occurs", {a}, sy.truth(true), i);
      p.add_cr(occ, {}, {}, "occurs(" + sy.str(a) + "," + std::to_string(i) + ") +- .");
      p.add_rule(s, {occ});
      step_occ.push_back(occ);
    }
    if (opt.action_sets == ActionSets::Singletons) p.add_group(step_occ);
  }
  for (int i = 0; i + 1 < n; ++i) p.add_constraint({smtg[i + 1]}, {smtg[i]});
  // prefer occurrences in branching: they decide everything else
  for (int c : p.cr) p.priority[c] = -1;
  pb->finish();
  return pb;
}

PlanResult plan(const BasicActionTheory& bat, const PreModel& m, const History& h, const std::vector<Literal>& goal,
                const PlanOptions& opt, Budget& budget) {
  PlanResult res;
  const int n = opt.horizon;
  res.missing = missing_initial(bat, m, h);
  std::vector<GroundLiteral> g;
  for (const auto& l : goal) g.push_back(resolve_literal(l, m));
  auto pb = build_planning_program(bat, m, h, g, opt);
  GroundProgram& p = pb->prog;
  const Symbols& sy = *m.syms;

  std::set<std::vector<std::string>> seen;
  for (const auto& r : solve_cr(p, opt.minimality, budget)) {
    Trajectory t = trajectory_of(*pb, r.answer, n);
    Plan pl = t.actions;
    while (!pl.empty() && pl.back().empty()) pl.pop_back();
    if (seen.insert(plan_lines(m, pl)).second) res.plans.push_back(std::move(pl));
  }
  std::sort(res.plans.begin(), res.plans.end(),
            [&](const Plan& x, const Plan& y) { return plan_lines(m, x) < plan_lines(m, y); });
  if (opt.most_specific) res.plans = most_specific_plans(res.plans, m);
  if (res.plans.empty()) res.note = "horizon-exhausted: no plan of length at most " + std::to_string(n);

  // re-execute each plan as a history and check the goal is reached
  for (const auto& pl : res.plans) {
    History h2 = h;
    for (size_t i = 0; i < pl.size(); ++i)
      for (int a : pl[i]) {
        bool known = false;
        for (const auto& e : h.happened) known |= !e.negated && e.step == (int)i && eval_term(e.action, {}, m) == a;
        if (!known) h2.happened.push_back(Happening{sy.term(a), (int)i, false, Span{}});
      }
    h2.horizon = n;
    auto pr = temporal_project(bat, m, h2, budget, opt.task);
    bool ok = !pr.trajectories.empty();
    for (const auto& t : pr.trajectories) {
      bool reached = false;
      for (const auto& s : t.states) {
        bool all = true;
        for (const auto& gl : g) all &= holds(gl, m, s);
        reached |= all;
      }
      ok &= reached;
    }
    res.valid.push_back(ok);
  }
  return res;
}

std::vector<Plan> most_specific_plans(const std::vector<Plan>& plans, const PreModel& m) {
  const Hierarchy& h = m.sig->hierarchy;
  auto sorts = [&](int a) {
    auto it = m.is_a.find(a);
    return it == m.is_a.end() ? std::set<std::string>{} : it->second;
  };
  // a is at least as specific as b, strictly when `strict` is set
  auto finer = [&](int a, int b, bool& strict) {
    if (a == b) return true;
    for (const auto& x : sorts(a))
      for (const auto& y : sorts(b))
        if (h.subsort(x, y)) {
          strict = true;
          return true;
        }
    return false;
  };
  auto dominates = [&](const Plan& p, const Plan& q) {
    if (p.size() != q.size()) return false;
    bool strict = false;
    for (size_t i = 0; i < p.size(); ++i) {
      if (p[i].size() != q[i].size()) return false;
      for (size_t j = 0; j < p[i].size(); ++j)
        if (!finer(p[i][j], q[i][j], strict)) return false;
    }
    return strict;
  };
  std::vector<Plan> out;
  for (const auto& q : plans) {
    bool beaten = false;
    for (const auto& p : plans) beaten |= dominates(p, q);
    if (!beaten) out.push_back(q);
  }
  return out;
}

std::vector<std::string> plan_lines(const PreModel& m, const Plan& p) {
  std::vector<std::string> out;
  for (size_t i = 0; i < p.size(); ++i) out.push_back("step " + std::to_string(i) + ": " + set_text(m, p[i]));
  return out;
}

std::vector<std::string> trajectory_lines(const PreModel& m, const Trajectory& t) {
  std::vector<std::string> out;
  for (size_t i = 0; i < t.states.size(); ++i) {
    out.push_back("sigma_" + std::to_string(i) + ":");
    for (const auto& l : state_lines(m, t.states[i])) out.push_back("  " + l);
    if (i < t.actions.size()) out.push_back("a_" + std::to_string(i) + ": " + set_text(m, t.actions[i]));
  }
  return out;
}

}  // namespace alm
