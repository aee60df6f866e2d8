#include "alm/bat.hpp"

#include <algorithm>
#include <functional>
#include <set>
#include <sstream>

namespace alm {

const char* stmt_kind_name(StmtKind k) {
  switch (k) {
    case StmtKind::CausalLaw: return "dynamic causal law";
    case StmtKind::StateConstraint: return "state constraint";
    case StmtKind::Definition: return "definition";
    case StmtKind::Executability: return "executability condition";
  }
  return "?";
}

bool is_function_term(const Term& t, const ActionSignature& sig) {
  if (t.kind == TermKind::Id) {
    const Function* f = sig.find(t.name);
    return f && f->arity() == 0;
  }
  if (t.kind == TermKind::Func) return sig.find(t.name) && !sig.constant_family(t.name);
  return false;
}

namespace {

Term true_term() { return Term::id("true"); }
Term false_term() { return Term::id("false"); }

std::vector<Term> fn_args(const Term& t) { return t.kind == TermKind::Func ? t.args : std::vector<Term>{}; }

struct Checker {
  const ActionSignature& sig;
  std::vector<std::string>* warnings;

  const Function* fn(const Term& t) const { return is_function_term(t, sig) ? sig.find(t.name) : nullptr; }

  // Checks a term used outside function-argument position.
  void value_term(const Term& t, bool allow_fn, StmtKind kind, std::vector<const Function*>& used) {
    switch (t.kind) {
      case TermKind::Var:
      case TermKind::Int: return;
      case TermKind::Arith:
        value_term(t.args[0], allow_fn, kind, used);
        value_term(t.args[1], allow_fn, kind, used);
        return;
      case TermKind::Id:
      case TermKind::Func: break;
    }
    const Function* f = fn(t);
    if (!f) {
      if (t.kind == TermKind::Func) {
        if (!sig.constant_family(t.name)) fail_semantic(t.span, "unknown function " + t.name);
        for (const auto& a : t.args) arg_term(a);
      }
      return;
    }
    if (!allow_fn) fail_semantic(t.span, "function term " + print(t) + " not allowed here");
    auto args = fn_args(t);
    if (args.size() != f->arity())
      fail_semantic(t.span, f->name + " expects " + std::to_string(f->arity()) + " argument(s)");
    for (const auto& a : args) arg_term(a);
    if (f->kind == FnKind::Occurs && kind != StmtKind::Executability)
      fail_semantic(t.span, "occurs may only appear in executability conditions");
    used.push_back(f);
  }

  void arg_term(const Term& t) {
    if (t.kind == TermKind::Arith) {
      arg_term(t.args[0]);
      arg_term(t.args[1]);
      return;
    }
    if (is_function_term(t, sig)) fail_semantic(t.span, "nested function term " + print(t));
    if (t.kind == TermKind::Func) {
      if (!sig.constant_family(t.name)) fail_semantic(t.span, "unknown function " + t.name);
      for (const auto& a : t.args) arg_term(a);
    }
  }

  std::vector<const Function*> literal(const Literal& l, StmtKind kind) {
    std::vector<const Function*> used;
    if (l.neg || l.rel == Rel::None) {
      const Function* f = fn(l.lhs);
      if (!f && (l.lhs.kind == TermKind::Func || l.lhs.kind == TermKind::Id) && !sig.find(l.lhs.name))
        fail_semantic(l.lhs.span.line ? l.lhs.span : l.span, "unknown function " + l.lhs.name);
      if (!f) fail_semantic(l.span, "expected a boolean function in " + print(l));
      if (f->range != "booleans") fail_semantic(l.span, f->name + " is not boolean-valued");
      value_term(l.lhs, true, kind, used);
      return used;
    }
    value_term(l.lhs, true, kind, used);
    value_term(*l.rhs, true, kind, used);
    return used;
  }

  Statement classify(const Axiom& a) {
    Statement s;
    s.axiom = a;
    std::vector<const Function*> body_fns;
    auto body_kind = [&](StmtKind k) {
      for (const auto& l : a.body) {
        auto u = literal(l, k);
        body_fns.insert(body_fns.end(), u.begin(), u.end());
      }
    };
    switch (a.kind) {
      case AxiomKind::Causal: {
        s.kind = StmtKind::CausalLaw;
        if (!sig.action_sort(a.guard)) fail_semantic(a.span, a.guard + " is not an action sort");
        const Literal& h = *a.head;
        const Function* f = fn(h.lhs);
        if (!f) fail_semantic(h.span, "head of a dynamic causal law must be a fluent literal");
        if (f->is_dom()) {
          if (!h.neg) fail_semantic(h.span, "dom head in dynamic law: only -" + f->name + " may be caused");
        } else if (f->kind != FnKind::BasicFluent) {
          fail_semantic(h.span, "head of a dynamic causal law must be a basic fluent, " + f->name + " is a " +
                                    kind_name(f->kind));
        }
        head_shape(h, *f);
        std::vector<const Function*> hu;
        value_term(h.lhs, true, s.kind, hu);
        if (h.rhs) value_term(*h.rhs, true, s.kind, hu);
        body_kind(s.kind);
        break;
      }
      case AxiomKind::Executability:
        s.kind = StmtKind::Executability;
        if (!sig.action_sort(a.guard)) fail_semantic(a.span, a.guard + " is not an action sort");
        body_kind(s.kind);
        break;
      case AxiomKind::Rule: {
        if (!a.head) {
          s.kind = StmtKind::StateConstraint;
          body_kind(s.kind);
          break;
        }
        const Literal& h = *a.head;
        const Function* f = fn(h.lhs);
        if (!f) fail_semantic(h.span, "head must be a function literal");
        if (f->kind == FnKind::Occurs) fail_semantic(h.span, "occurs cannot be the head of a rule");
        if (f->kind == FnKind::Special) fail_semantic(h.span, "special function " + f->name + " cannot be a head");
        if (f->is_dom() && f->kind != FnKind::BasicFluent)
          fail_semantic(h.span, f->name + " is defined by the standard axioms and cannot be a head");
        head_shape(h, *f);
        if (f->defined()) {
          s.kind = StmtKind::Definition;
          bool positive = !h.neg && (h.rel == Rel::None || (h.rhs && h.rhs->kind == TermKind::Id && h.rhs->name == "true"));
          if (!positive) fail_semantic(h.span, "definition of " + f->name + " must have a positive head");
        } else {
          s.kind = StmtKind::StateConstraint;
        }
        std::vector<const Function*> hu;
        value_term(h.lhs, true, s.kind, hu);
        if (h.rhs) value_term(*h.rhs, true, s.kind, hu);
        body_kind(s.kind);
        if (s.kind == StmtKind::Definition && f->kind == FnKind::DefinedStatic)
          for (const Function* g : body_fns)
            if (g->fluent() || g->basic_fluent())
              fail_semantic(a.span, "definition of static " + f->name + " uses fluent " + g->name);
        if (s.kind == StmtKind::StateConstraint && f->is_static() && warnings)
          for (const Function* g : body_fns)
            if (g->fluent()) {
              warnings->push_back(a.span.str() + ": warning: static head " + f->name + " with fluent " + g->name +
                                  " in the body");
              break;
            }
        break;
      }
    }
    return s;
  }

  void head_shape(const Literal& h, const Function& f) {
    if (h.rel != Rel::None && h.rel != Rel::Eq) fail_semantic(h.span, "head must have the form f(t) = v");
    if ((h.neg || h.rel == Rel::None) && f.range != "booleans")
      fail_semantic(h.span, f.name + " is not boolean-valued");
  }
};

Axiom make_rule(std::optional<Literal> head, std::vector<Literal> body) {
  Axiom a;
  a.kind = AxiomKind::Rule;
  a.head = std::move(head);
  a.body = std::move(body);
  return a;
}

Literal lit(Term lhs) {
  Literal l;
  l.lhs = std::move(lhs);
  return l;
}

Literal lit(Term lhs, Term rhs) {
  Literal l;
  l.lhs = std::move(lhs);
  l.rel = Rel::Eq;
  l.rhs = std::move(rhs);
  return l;
}

Literal neg(Term lhs) {
  Literal l;
  l.lhs = std::move(lhs);
  l.neg = true;
  return l;
}

std::vector<Term> vars_for(size_t n) {
  std::vector<Term> v;
  for (size_t i = 0; i < n; ++i) v.push_back(Term::var("X" + std::to_string(i)));
  return v;
}

Term mk_apply(const std::string& f, std::vector<Term> args) {
  if (args.empty()) return Term::id(f);
  return Term::func(f, std::move(args));
}

}  // namespace

std::vector<Statement> validate_statements(const Module& m, const ActionSignature& sig,
                                           std::vector<std::string>* warnings) {
  Checker c{sig, warnings};
  std::vector<Statement> out;
  for (const auto& a : m.axioms) out.push_back(c.classify(a));
  return out;
}

std::optional<Statement> desugar_total(const Function& f) {
  if (!f.total) return std::nullopt;
  Statement s;
  s.kind = StmtKind::StateConstraint;
  s.origin = Statement::Origin::Total;
  s.axiom = make_rule(std::nullopt, {neg(mk_apply("dom_" + f.name, vars_for(f.arity())))});
  s.axiom.span = f.span;
  return s;
}

std::vector<Statement> inject_standard_axioms(const ActionSignature& sig) {
  std::vector<Statement> out;
  std::vector<const Function*> fs = sig.user_functions();
  std::sort(fs.begin(), fs.end(), [](const Function* a, const Function* b) { return a->name < b->name; });
  for (const Function* f : fs) {
    if (f->arity() == 0) continue;
    Statement s;
    s.origin = Statement::Origin::Standard;
    s.kind = f->basic_fluent() ? StmtKind::StateConstraint : StmtKind::Definition;
    auto xs = vars_for(f->arity());
    s.axiom = make_rule(lit(mk_apply("dom_" + f->name, xs)), {lit(mk_apply(f->name, xs), Term::var("Y"))});
    s.axiom.span = f->span;
    out.push_back(std::move(s));
  }
  auto def = [&](Literal head, std::vector<Literal> body) {
    Statement s;
    s.origin = Statement::Origin::Hierarchy;
    s.kind = StmtKind::Definition;
    s.axiom = make_rule(std::move(head), std::move(body));
    out.push_back(std::move(s));
  };
  Term O = Term::var("O"), C = Term::var("C"), C1 = Term::var("C1"), C2 = Term::var("C2"), C3 = Term::var("C3");
  def(lit(Term::func("instance", {O, C})), {lit(Term::func("is_a", {O, C}))});
  def(lit(Term::func("instance", {O, C2})), {lit(Term::func("instance", {O, C1})), lit(Term::func("subsort", {C1, C2}))});
  def(lit(Term::func("subsort", {C1, C2})), {lit(Term::func("link", {C1, C2}))});
  def(lit(Term::func("subsort", {C1, C2})), {lit(Term::func("link", {C1, C3})), lit(Term::func("subsort", {C3, C2}))});
  def(lit(Term::func("has_child", {C2})), {lit(Term::func("link", {C1, C2}))});
  def(lit(Term::func("has_parent", {C1})), {lit(Term::func("link", {C1, C2}))});
  def(lit(Term::func("source", {C})), {neg(Term::func("has_child", {C}))});
  def(lit(Term::func("sink", {C})), {neg(Term::func("has_parent", {C}))});
  return out;
}

// ---------------------------------------------------------------- normalization

namespace {

struct Normalizer {
  const ActionSignature& sig;
  NRule& r;
  int fresh = 0;

  Term new_var() { return Term::var("V#" + std::to_string(++fresh)); }

  FAtom atom_of(const Term& ft, Term value) {
    FAtom a;
    a.fn = ft.name;
    a.args = fn_args(ft);
    for (auto& x : a.args) x = plain(x);
    a.value = std::move(value);
    return a;
  }

  void push_pos(FAtom a) {
    BodyItem b;
    b.kind = BodyItem::Kind::Pos;
    b.atom = std::move(a);
    r.body.push_back(std::move(b));
  }

  void push_cmp(Rel rel, Term l, Term rr) {
    BodyItem b;
    b.kind = BodyItem::Kind::Cmp;
    b.rel = rel;
    b.lhs = std::move(l);
    b.rhs = std::move(rr);
    r.body.push_back(std::move(b));
  }

  // Replaces function terms by fresh variables bound in the body.
  Term plain(const Term& t) {
    if (is_function_term(t, sig)) {
      Term v = new_var();
      push_pos(atom_of(t, v));
      return v;
    }
    if (t.kind == TermKind::Arith) return Term::arith(t.name, plain(t.args[0]), plain(t.args[1]), t.span);
    return t;
  }

  void body_literal(const Literal& l) {
    if (l.neg) {
      push_pos(atom_of(l.lhs, false_term()));
      return;
    }
    if (l.rel == Rel::None) {
      push_pos(atom_of(l.lhs, true_term()));
      return;
    }
    bool lf = is_function_term(l.lhs, sig), rf = is_function_term(*l.rhs, sig);
    auto simple = [](const Term& t) { return t.kind != TermKind::Arith; };
    if (l.rel == Rel::Eq && lf && !rf && simple(*l.rhs)) {
      push_pos(atom_of(l.lhs, *l.rhs));
      return;
    }
    if (l.rel == Rel::Eq && rf && !lf && simple(l.lhs)) {
      push_pos(atom_of(*l.rhs, l.lhs));
      return;
    }
    if (l.rel == Rel::Eq && lf && rf) {
      Term v = new_var();
      push_pos(atom_of(l.lhs, v));
      push_pos(atom_of(*l.rhs, v));
      return;
    }
    Term a = plain(l.lhs);
    Term b = plain(*l.rhs);
    push_cmp(l.rel, std::move(a), std::move(b));
  }

  FAtom head(const Literal& h) {
    if (h.neg) return atom_of(h.lhs, false_term());
    if (h.rel == Rel::None) return atom_of(h.lhs, true_term());
    const Term& v = *h.rhs;
    if (is_function_term(v, sig) || v.kind == TermKind::Arith) {
      Term x = plain(v);
      if (x.kind == TermKind::Arith) {
        Term y = new_var();
        push_cmp(Rel::Eq, y, x);
        x = y;
      }
      return atom_of(h.lhs, x);
    }
    return atom_of(h.lhs, v);
  }
};

}  // namespace

NRule normalize(const Statement& s, const ActionSignature& sig) {
  NRule r;
  r.kind = s.kind;
  r.span = s.axiom.span;
  Normalizer n{sig, r};
  const Axiom& a = s.axiom;
  if (s.kind == StmtKind::CausalLaw || s.kind == StmtKind::Executability) {
    r.action = a.action;
    FAtom g;
    g.fn = "instance";
    g.args = {a.action, Term::id(a.guard)};
    g.value = true_term();
    n.push_pos(g);
  }
  std::optional<FAtom> head;
  if (s.kind == StmtKind::Executability) {
    FAtom h;
    h.fn = "occurs";
    h.args = {a.action};
    h.value = false_term();
    head = h;
  } else if (a.head) {
    head = n.head(*a.head);
  }
  for (const auto& l : a.body) n.body_literal(l);
  r.head = std::move(head);
  return r;
}

std::string print(const FAtom& a) {
  std::string s = a.fn;
  if (!a.args.empty()) {
    s += "(";
    for (size_t i = 0; i < a.args.size(); ++i) s += (i ? "," : "") + print(a.args[i]);
    s += ")";
  }
  return s + "=" + print(a.value);
}

std::string print(const NRule& r) {
  std::string s = r.head ? print(*r.head) : "";
  s += " :-";
  for (size_t i = 0; i < r.body.size(); ++i) {
    const BodyItem& b = r.body[i];
    s += i ? ", " : " ";
    if (b.kind == BodyItem::Kind::Cmp) s += print(b.lhs) + rel_text(b.rel) + print(b.rhs);
    else s += (b.kind == BodyItem::Kind::Not ? "not " : "") + print(b.atom);
  }
  return s + ".";
}

std::map<std::string, std::vector<std::string>> sort_of_variables(const NRule& r, const ActionSignature& sig) {
  std::map<std::string, std::set<std::string>> sorts;
  std::set<std::string> in_arith, all;
  std::function<void(const Term&, bool)> collect = [&](const Term& t, bool arith) {
    if (t.kind == TermKind::Var) {
      all.insert(t.name);
      if (arith) in_arith.insert(t.name);
    }
    for (const auto& a : t.args) collect(a, arith || t.kind == TermKind::Arith);
  };
  auto atom = [&](const FAtom& a) {
    const Function* f = sig.find(a.fn);
    for (const auto& t : a.args) collect(t, false);
    collect(a.value, false);
    if (!f) return;
    bool inst = (a.fn == "instance" || a.fn == "is_a") && a.args.size() == 2 && a.args[1].kind == TermKind::Id &&
                a.value.kind == TermKind::Id && a.value.name == "true";
    for (size_t i = 0; i < a.args.size() && i < f->args.size(); ++i)
      if (a.args[i].kind == TermKind::Var) {
        if (inst && i == 0) sorts[a.args[0].name].insert(a.args[1].name);
        else if (!(inst && i == 0) && f->args[i] != "universe") sorts[a.args[i].name].insert(f->args[i]);
      }
    if (a.value.kind == TermKind::Var && f->range != "universe") sorts[a.value.name].insert(f->range);
  };
  if (r.head) atom(*r.head);
  for (const auto& b : r.body) {
    if (b.kind == BodyItem::Kind::Cmp) {
      collect(b.lhs, false);
      collect(b.rhs, false);
    } else {
      atom(b.atom);
    }
  }
  std::map<std::string, std::vector<std::string>> out;
  for (const auto& v : all) {
    auto& s = sorts[v];
    if (in_arith.count(v))
      for (const auto& c : s)
        if (!sig.ranges.count(c) && c != "universe" && c != "nodes")
          fail_semantic(r.span, "variable " + v + " of sort " + c + " used in arithmetic");
    if (s.empty()) out[v] = {"universe"};
    else out[v] = std::vector<std::string>(s.begin(), s.end());
  }
  return out;
}

BasicActionTheory assemble_bat(const Module& flat, long long natural_bound) {
  BasicActionTheory bat;
  bat.name = flat.name;
  bat.module = flat;
  bat.sig = build_signature(flat, natural_bound);
  bat.statements = validate_statements(flat, bat.sig, &bat.warnings);
  for (const auto& n : bat.sig.order) {
    const Function& f = bat.sig.functions.at(n);
    if (auto s = desugar_total(f)) bat.statements.push_back(*s);
  }
  for (auto& s : inject_standard_axioms(bat.sig)) bat.statements.push_back(std::move(s));
  for (size_t i = 0; i < bat.statements.size(); ++i) {
    if (bat.statements[i].origin == Statement::Origin::Hierarchy) continue;
    NRule r = normalize(bat.statements[i], bat.sig);
    r.stmt = (int)i;
    sort_of_variables(r, bat.sig);  // typing errors surface here
    bat.rules.push_back(std::move(r));
  }
  return bat;
}

std::string print(const BasicActionTheory& bat) {
  Module m = bat.module;
  m.depends.clear();
  m.axioms.clear();
  for (const auto& s : bat.statements) m.axioms.push_back(s.axiom);
  return print(m);
}

}  // namespace alm
