#include "alm/modular.hpp"

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <set>
#include <sstream>

namespace alm {

std::vector<std::string> library_search_path(const std::vector<std::string>& explicit_dirs) {
  std::vector<std::string> out = explicit_dirs;
  if (const char* env = std::getenv("ALM_LIBRARY_PATH")) {
    std::stringstream ss(env);
    std::string d;
    while (std::getline(ss, d, ':'))
      if (!d.empty()) out.push_back(d);
  }
  return out;
}

// ---------------------------------------------------------------- imports

namespace {

struct ImportResolver {
  const std::vector<std::string>& path;
  std::map<std::string, Theory> cache;
  std::set<std::string> loading;

  const Theory& library(const Import& im) {
    auto it = cache.find(im.library);
    if (it != cache.end()) return it->second;
    if (loading.count(im.library)) fail_semantic(im.span, "import cycle through library " + im.library);
    std::string file;
    for (const auto& d : path) {
      auto p = std::filesystem::path(d) / (im.library + ".alm");
      if (std::filesystem::exists(p)) {
        file = p.string();
        break;
      }
    }
    if (file.empty()) {
      std::string dirs;
      for (const auto& d : path) dirs += (dirs.empty() ? "" : ":") + d;
      fail_input(im.span, "library " + im.library + " not found in search path [" + dirs + "]");
    }
    SourceFile f = parse_path(file);
    if (f.is_system()) fail_input(im.span, "library " + im.library + " holds a system description, not a theory");
    loading.insert(im.library);
    Theory t = resolve(f.theory());
    loading.erase(im.library);
    return cache.emplace(im.library, std::move(t)).first->second;
  }

  static void append(Theory& out, const Module& m, const Span& where) {
    for (const auto& it : out.items) {
      const Module& o = std::get<Module>(it);
      if (o.name == m.name) {
        if (o == m) return;
        fail_semantic(where, "module " + m.name + " clashes with an existing module of the same name");
      }
    }
    out.items.push_back(m);
  }

  void import_into(Theory& out, const Import& im) {
    const Theory& lib = library(im);
    if (!im.theory.empty() && !lib.name.empty() && im.theory != lib.name)
      fail_semantic(im.span, "library " + im.library + " defines theory " + lib.name + ", not " + im.theory);
    if (im.whole_theory) {
      for (const auto& it : lib.items) append(out, std::get<Module>(it), im.span);
      return;
    }
    std::map<std::string, const Module*> by_name;
    for (const auto& it : lib.items) by_name[std::get<Module>(it).name] = &std::get<Module>(it);
    std::vector<std::string> want{im.module};
    std::set<std::string> seen;
    std::vector<const Module*> picked;
    while (!want.empty()) {
      std::string n = want.back();
      want.pop_back();
      if (!seen.insert(n).second) continue;
      auto it = by_name.find(n);
      if (it == by_name.end()) fail_semantic(im.span, "library " + im.library + " has no module " + n);
      picked.push_back(it->second);
      for (const auto& d : it->second->depends) want.push_back(d);
    }
    // library order
    for (const auto& it : lib.items)
      for (const Module* m : picked)
        if (m == &std::get<Module>(it)) append(out, *m, im.span);
  }

  Theory resolve(const Theory& t) {
    if (t.replaced_by) {
      Theory out;
      out.name = t.replaced_by->theory;
      out.span = t.span;
      Import im = *t.replaced_by;
      im.whole_theory = true;
      import_into(out, im);
      return out;
    }
    Theory out;
    out.name = t.name;
    out.span = t.span;
    for (const auto& it : t.items) {
      if (const auto* m = std::get_if<Module>(&it)) append(out, *m, m->span);
      else import_into(out, std::get<Import>(it));
    }
    return out;
  }
};

std::vector<const Module*> modules_of(const Theory& t) {
  std::vector<const Module*> out;
  for (const auto& it : t.items) {
    if (!std::holds_alternative<Module>(it)) fail_semantic(t.span, "unresolved import in theory " + t.name);
    out.push_back(&std::get<Module>(it));
  }
  return out;
}

const std::set<std::string> kPredefinedSorts = {"universe", "actions", "booleans", "natural_numbers",
                                                "positive_natural_numbers", "integers"};

void collect_names(const Term& t, std::set<std::string>& out) {
  if (t.kind == TermKind::Func || t.kind == TermKind::Id) out.insert(t.name);
  for (const auto& a : t.args) collect_names(a, out);
}

// Topological order of modules: dependencies first, otherwise source order.
std::vector<const Module*> ordered_modules(const Theory& t) {
  auto mods = modules_of(t);
  std::map<std::string, const Module*> by_name;
  for (const Module* m : mods) by_name[m->name] = m;
  std::vector<const Module*> out;
  std::map<std::string, int> mark;
  std::function<void(const Module*)> visit = [&](const Module* m) {
    if (mark[m->name] == 2) return;
    if (mark[m->name] == 1) fail_semantic(m->span, "module dependency cycle through " + m->name);
    mark[m->name] = 1;
    for (const auto& d : m->depends) {
      auto it = by_name.find(d);
      if (it == by_name.end()) fail_semantic(m->span, "module " + m->name + " depends on unknown module " + d);
      visit(it->second);
    }
    mark[m->name] = 2;
    out.push_back(m);
  };
  for (const Module* m : mods) visit(m);
  return out;
}

}  // namespace

Theory resolve_imports(const Theory& t, const std::vector<std::string>& search_path) {
  ImportResolver r{search_path, {}, {}};
  return r.resolve(t);
}

// ---------------------------------------------------------------- coherence

void check_coherence(const Theory& t) {
  auto mods = modules_of(t);
  std::set<std::string> names;
  for (const Module* m : mods)
    if (!names.insert(m->name).second) fail_semantic(m->span, "module " + m->name + " declared twice");
  ordered_modules(t);  // dependency names and acyclicity

  // symbol -> (module, declaration text)
  std::map<std::string, std::pair<std::string, std::string>> sort_decl, fn_decl, const_decl;
  std::map<std::string, std::set<std::string>> owner_sorts, owner_fns, owner_consts;
  auto declare = [&](std::map<std::string, std::pair<std::string, std::string>>& tab, const std::string& sym,
                     const std::string& mod, const std::string& text, const Span& where) {
    auto it = tab.find(sym);
    if (it != tab.end() && it->second.second != text) {
      if (it->second.first == mod) fail_semantic(where, sym + " is declared twice in module " + mod);
      fail_semantic(where, "modules " + it->second.first + " and " + mod + " contain different declarations of " + sym);
    }
    if (it == tab.end()) tab[sym] = {mod, text};
  };
  for (const Module* m : mods) {
    for (const auto& sd : m->sorts)
      for (const auto& s : sd.sorts) {
        std::set<std::string> ps;
        for (const auto& p : sd.parents) ps.insert(print(p));
        std::string text;
        for (const auto& p : ps) text += p + ",";
        declare(sort_decl, s, m->name, text, sd.span);
        owner_sorts[m->name].insert(s);
        for (const auto& a : sd.attrs) {
          Module tmp;
          SortDecl one;
          one.sorts = {s};
          one.attrs = {a};
          tmp.sorts = {one};
          declare(fn_decl, a.name + "@" + s, m->name, print(tmp), a.span);
          owner_fns[m->name].insert(a.name);
        }
      }
    for (const auto& f : m->funcs) {
      Module tmp;
      tmp.funcs = {f};
      declare(fn_decl, f.name, m->name, print(tmp), f.span);
      owner_fns[m->name].insert(f.name);
    }
    for (const auto& c : m->consts) {
      Module tmp;
      tmp.consts = {c};
      declare(const_decl, c.name, m->name, print(tmp), c.span);
      owner_consts[m->name].insert(c.name);
    }
  }
  std::set<std::string> all_sorts, all_fns;
  for (const auto& [s, _] : sort_decl) all_sorts.insert(s);
  for (const auto& [m, fs] : owner_fns) all_fns.insert(fs.begin(), fs.end());
  std::map<std::string, const Module*> by_name;
  for (const Module* m : mods) by_name[m->name] = m;

  for (const Module* m : mods) {
    std::set<std::string> closure, sorts, fns;
    std::vector<std::string> todo{m->name};
    while (!todo.empty()) {
      std::string n = todo.back();
      todo.pop_back();
      if (!closure.insert(n).second) continue;
      for (const auto& d : by_name[n]->depends) todo.push_back(d);
    }
    for (const auto& n : closure) {
      sorts.insert(owner_sorts[n].begin(), owner_sorts[n].end());
      fns.insert(owner_fns[n].begin(), owner_fns[n].end());
    }
    auto sort_used = [&](const std::string& s, const Span& where) {
      if (kPredefinedSorts.count(s) || sorts.count(s)) return;
      if (all_sorts.count(s))
        fail_semantic(where, "module " + m->name + " uses sort " + s + " declared in a module it does not depend on");
    };
    auto ref_used = [&](const SortRef& r) {
      if (!r.is_range()) sort_used(r.name, r.span);
    };
    for (const auto& sd : m->sorts) {
      for (const auto& p : sd.parents) ref_used(p);
      for (const auto& a : sd.attrs) {
        for (const auto& r : a.args) ref_used(r);
        ref_used(a.range);
      }
    }
    for (const auto& f : m->funcs) {
      for (const auto& r : f.args) ref_used(r);
      ref_used(f.range);
    }
    for (const auto& c : m->consts)
      for (const auto& s : c.sorts) sort_used(s, c.span);
    for (const auto& a : m->axioms) {
      std::set<std::string> used;
      if (a.head) {
        collect_names(a.head->lhs, used);
        if (a.head->rhs) collect_names(*a.head->rhs, used);
      }
      for (const auto& l : a.body) {
        collect_names(l.lhs, used);
        if (l.rhs) collect_names(*l.rhs, used);
      }
      if (!a.guard.empty()) sort_used(a.guard, a.span);
      for (const auto& u : used) {
        std::string base = u.rfind("dom_", 0) == 0 ? u.substr(4) : u;
        if (all_fns.count(base) && !fns.count(base))
          fail_semantic(a.span, "module " + m->name + " uses function " + base +
                                    " declared in a module it does not depend on");
      }
    }
  }
}

// ---------------------------------------------------------------- flattening

Module flatten(const Theory& t) {
  check_coherence(t);
  Module out;
  out.name = t.name.empty() ? "main" : t.name;
  out.span = t.span;
  auto push_unique = [](auto& vec, const auto& x) {
    if (std::find(vec.begin(), vec.end(), x) == vec.end()) vec.push_back(x);
  };
  for (const Module* m : ordered_modules(t)) {
    for (const auto& s : m->sorts) push_unique(out.sorts, s);
    for (const auto& c : m->consts) push_unique(out.consts, c);
    for (const auto& f : m->funcs) push_unique(out.funcs, f);
    for (const auto& a : m->axioms) push_unique(out.axioms, a);
  }
  return out;
}

// ---------------------------------------------------------------- structures

namespace {

Term subst(const Term& t, const std::map<std::string, Term>& s) {
  if (t.kind == TermKind::Var) {
    auto it = s.find(t.name);
    return it == s.end() ? t : it->second;
  }
  Term o = t;
  for (auto& a : o.args) a = subst(a, s);
  return o;
}

void vars_of(const Term& t, std::set<std::string>& out) {
  if (t.kind == TermKind::Var) out.insert(t.name);
  for (const auto& a : t.args) vars_of(a, out);
}

// Evaluates arithmetic in a ground term.
std::optional<Term> fold(const Term& t) {
  if (t.kind != TermKind::Arith) {
    if (t.kind == TermKind::Func) {
      Term o = t;
      for (auto& a : o.args) {
        auto f = fold(a);
        if (!f) return std::nullopt;
        a = *f;
      }
      return o;
    }
    if (t.kind == TermKind::Var) return std::nullopt;
    return t;
  }
  auto l = fold(t.args[0]), r = fold(t.args[1]);
  if (!l || !r || l->kind != TermKind::Int || r->kind != TermKind::Int) return std::nullopt;
  long long x = l->ival, y = r->ival;
  if (t.name == "+") return Term::integer(x + y);
  if (t.name == "-") return Term::integer(x - y);
  if (t.name == "*") return Term::integer(x * y);
  if (y == 0) return std::nullopt;
  if (t.name == "/") return Term::integer(x / y);
  return Term::integer(((x % y) + y) % y);
}

struct Expander {
  const ActionSignature& sig;
  std::map<std::string, ExpandedObject> objects;
  std::map<std::string, Term> denote;

  bool add(const Term& name, const std::string& sort, const std::vector<AttrDef>& attrs, const Span& span) {
    if (!sig.hierarchy.has_sort(sort)) fail_semantic(span, "unknown sort " + sort);
    std::string key = compact(name);
    bool changed = false;
    auto it = objects.find(key);
    if (it == objects.end()) {
      ExpandedObject o;
      o.name = name;
      o.name.span = Span{};
      o.span = span;
      it = objects.emplace(key, std::move(o)).first;
      changed = true;
    }
    ExpandedObject& o = it->second;
    if (std::find(o.sorts.begin(), o.sorts.end(), sort) == o.sorts.end()) {
      o.sorts.push_back(sort);
      changed = true;
    }
    for (const auto& a : attrs) {
      bool found = false;
      for (const auto& b : o.attrs)
        if (b.name == a.name && b.args == a.args) {
          if (!(b.value == a.value))
            fail_semantic(a.span, "attribute " + a.name + " of " + key + " assigned twice with different values");
          found = true;
        }
      if (!found) {
        o.attrs.push_back(a);
        changed = true;
      }
    }
    return changed;
  }

  std::vector<Term> declared_extent(const std::string& sort) const {
    std::vector<Term> out;
    if (auto it = sig.ranges.find(sort); it != sig.ranges.end()) {
      if (!it->second.hi_attr.empty()) return out;
      for (long long v = it->second.lo; v <= it->second.hi; ++v) out.push_back(Term::integer(v));
      return out;
    }
    if (sig.hierarchy.below_or_equal("booleans", sort)) {
      out.push_back(Term::id("false"));
      out.push_back(Term::id("true"));
    }
    for (const auto& [k, o] : objects)
      for (const auto& s : o.sorts)
        if (sort == "universe" || sig.hierarchy.below_or_equal(s, sort)) {
          out.push_back(o.name);
          break;
        }
    return out;
  }

  bool where_holds(const std::vector<Literal>& where, const std::map<std::string, Term>& sub) const {
    for (const auto& l : where) {
      if ((l.rel == Rel::None || l.neg) && l.lhs.kind == TermKind::Func && l.lhs.name == "instance" &&
          l.lhs.args.size() == 2) {
        auto o = fold(subst(l.lhs.args[0], sub));
        const Term& c = l.lhs.args[1];
        if (!o || c.kind != TermKind::Id) fail_semantic(l.span, "instance needs an object and a sort");
        bool in = false;
        for (const auto& x : declared_extent(c.name)) in |= compact(x) == compact(*o);
        if (in == l.neg) return false;
        continue;
      }
      if (l.rel == Rel::None || l.neg)
        fail_semantic(l.span, "where clauses may only use instance(...) and comparisons");
      auto a = fold(subst(l.lhs, sub)), b = fold(subst(*l.rhs, sub));
      if (!a || !b) fail_semantic(l.span, "where clause with unbound or non-numeric terms");
      if (is_function_term(*a, sig) || is_function_term(*b, sig))
        fail_semantic(l.span, "where clauses cannot refer to functions");
      bool ok;
      if (l.rel == Rel::Eq) ok = compact(*a) == compact(*b);
      else if (l.rel == Rel::Neq) ok = compact(*a) != compact(*b);
      else {
        if (a->kind != TermKind::Int || b->kind != TermKind::Int) return false;
        long long x = a->ival, y = b->ival;
        ok = l.rel == Rel::Lt ? x < y : l.rel == Rel::Le ? x <= y : l.rel == Rel::Gt ? x > y : x >= y;
      }
      if (!ok) return false;
    }
    return true;
  }

  AttrDef ground_attr(const AttrDef& a, const std::map<std::string, Term>& sub) {
    AttrDef g = a;
    for (auto& x : g.args) {
      auto f = fold(subst(x, sub));
      if (!f) fail_semantic(a.span, "unbound variable in attribute " + a.name);
      x = *f;
      x.span = Span{};
    }
    auto v = fold(subst(a.value, sub));
    if (!v) fail_semantic(a.span, "unbound variable in attribute " + a.name);
    g.value = *v;
    g.value.span = Span{};
    return g;
  }

  bool expand_schema(const InstanceDecl& in) {
    std::set<std::string> vs;
    for (const auto& o : in.objects) vars_of(o, vs);
    std::map<std::string, std::set<std::string>> types;
    for (const auto& l : in.where)
      if (!l.neg && l.rel == Rel::None && l.lhs.kind == TermKind::Func && l.lhs.name == "instance" &&
          l.lhs.args.size() == 2 && l.lhs.args[0].kind == TermKind::Var && l.lhs.args[1].kind == TermKind::Id)
        types[l.lhs.args[0].name].insert(l.lhs.args[1].name);
    for (const auto& a : in.attrs) {
      const Function* f = sig.find(a.name);
      if (!f || f->kind != FnKind::Attribute) fail_semantic(a.span, a.name + " is not an attribute");
      if (a.value.kind == TermKind::Var) types[a.value.name].insert(f->range);
      for (size_t i = 0; i < a.args.size() && i + 1 < f->args.size(); ++i)
        if (a.args[i].kind == TermKind::Var) types[a.args[i].name].insert(f->args[i + 1]);
    }
    for (const auto& l : in.where) {
      vars_of(l.lhs, vs);
      if (l.rhs) vars_of(*l.rhs, vs);
    }
    std::vector<std::string> order(vs.begin(), vs.end());
    std::vector<std::vector<Term>> doms;
    for (const auto& v : order) {
      std::vector<Term> d;
      if (!types.count(v)) {
        d = declared_extent("universe");
      } else {
        bool first = true;
        for (const auto& s : types[v]) {
          if (!sig.known_sort(s)) fail_semantic(in.span, "unknown sort " + s);
          auto e = declared_extent(s);
          if (first) d = e;
          else {
            std::vector<Term> keep;
            for (const auto& x : d)
              for (const auto& y : e)
                if (compact(x) == compact(y)) {
                  keep.push_back(x);
                  break;
                }
            d.swap(keep);
          }
          first = false;
        }
      }
      doms.push_back(std::move(d));
    }
    bool changed = false;
    std::map<std::string, Term> sub;
    std::function<void(size_t)> rec = [&](size_t i) {
      if (i == order.size()) {
        if (!where_holds(in.where, sub)) return;
        std::vector<AttrDef> attrs;
        for (const auto& a : in.attrs) attrs.push_back(ground_attr(a, sub));
        for (const auto& o : in.objects) {
          auto g = fold(subst(o, sub));
          if (!g) fail_semantic(in.span, "instance name does not evaluate");
          changed |= add(*g, in.sort, attrs, in.span);
        }
        return;
      }
      for (const auto& x : doms[i]) {
        sub[order[i]] = x;
        rec(i + 1);
      }
      sub.erase(order[i]);
    };
    rec(0);
    return changed;
  }

  bool expand_families() {
    bool changed = false;
    for (const auto& c : sig.constants) {
      if (c.params.empty()) continue;
      std::vector<std::vector<Term>> doms;
      for (const auto& p : c.params) doms.push_back(declared_extent(range_name(p)));
      std::vector<Term> args;
      std::function<void(size_t)> rec = [&](size_t i) {
        if (i == doms.size()) {
          Term t = Term::func(c.name, args);
          for (const auto& s : c.sorts) changed |= add(t, s, {}, c.span);
          return;
        }
        for (const auto& x : doms[i]) {
          args.push_back(x);
          rec(i + 1);
          args.pop_back();
        }
      };
      rec(0);
    }
    return changed;
  }
};

}  // namespace

StructureSpec expand_instance_schemas(const Structure& s, const ActionSignature& sig) {
  Expander ex{sig, {}, {}};
  for (const auto& c : s.consts) {
    bool declared = false;
    for (const auto& d : sig.constants) declared |= d.name == c.name.name && d.params.size() == c.name.args.size();
    if (!declared) fail_semantic(c.span, compact(c.name) + " is not a declared object constant");
    auto v = fold(c.value);
    if (!v) fail_semantic(c.span, "constant value must be ground");
    ex.denote[compact(c.name)] = *v;
  }
  for (const auto& c : sig.constants)
    if (c.params.empty() && !ex.denote.count(c.name))
      for (const auto& srt : c.sorts) ex.add(Term::id(c.name), srt, {}, c.span);
  std::vector<const InstanceDecl*> schemas;
  for (const auto& in : s.instances) {
    bool ground = true;
    for (const auto& o : in.objects) ground &= o.ground();
    if (!ground || !in.where.empty()) {
      schemas.push_back(&in);
      continue;
    }
    std::vector<AttrDef> attrs;
    for (const auto& a : in.attrs) {
      const Function* f = sig.find(a.name);
      if (!f || f->kind != FnKind::Attribute) fail_semantic(a.span, a.name + " is not an attribute");
      attrs.push_back(ex.ground_attr(a, {}));
    }
    for (const auto& o : in.objects) {
      if (ex.denote.count(compact(o))) fail_semantic(in.span, compact(o) + " is renamed by the structure constants");
      ex.add(o, in.sort, attrs, in.span);
    }
  }
  for (int round = 0; round < 16; ++round) {
    bool changed = ex.expand_families();
    for (const InstanceDecl* in : schemas) changed |= ex.expand_schema(*in);
    if (!changed) break;
  }
  for (const auto& c : s.consts) {
    const Term& v = ex.denote[compact(c.name)];
    if (v.kind != TermKind::Int && !ex.objects.count(compact(v)))
      fail_semantic(c.span, "value " + compact(v) + " of constant " + compact(c.name) + " is not an object of the structure");
  }
  StructureSpec spec;
  for (auto& [k, o] : ex.objects) spec.objects.push_back(std::move(o));
  spec.constants = std::move(ex.denote);
  spec.statics = s.statics;
  return spec;
}

// ---------------------------------------------------------------- pre-models

namespace {

struct Placement {
  const ExpandedObject* obj;
  std::set<std::string> fixed;
  std::vector<std::vector<std::string>> choices;
};

Placement place(const ExpandedObject& o, const ActionSignature& sig) {
  Placement p{&o, {}, {}};
  const Hierarchy& h = sig.hierarchy;
  for (const auto& s : o.sorts) {
    bool general = false;
    for (const auto& t : o.sorts) general |= h.subsort(t, s);
    if (general) continue;
    if (h.source(s) || sig.action_sort(s)) {
      p.fixed.insert(s);
      continue;
    }
    auto below = h.sources_below(s);
    if (below.empty()) fail_semantic(o.span, "sort " + s + " of " + compact(o.name) + " has no source below it");
    p.choices.push_back(below);
  }
  return p;
}

// Ground object names mentioned by a `values of statics` clause.
void object_terms(const Term& t, const ActionSignature& sig, std::vector<Term>& out) {
  if (!t.ground() || t.kind == TermKind::Int) return;
  if (t.kind == TermKind::Arith || is_function_term(t, sig)) {
    for (const auto& a : t.args) object_terms(a, sig, out);
    return;
  }
  out.push_back(t);
}

void check_static_objects(const StaticDef& d, const ActionSignature& sig, const PreModel& m) {
  std::vector<Term> objs;
  for (const Literal* l : [&] {
         std::vector<const Literal*> v{&d.head};
         for (const auto& b : d.body) v.push_back(&b);
         return v;
       }()) {
    for (const auto& a : l->lhs.args) object_terms(a, sig, objs);
    if (l->rhs) object_terms(*l->rhs, sig, objs);
  }
  for (const auto& o : objs)
    if (eval_term(o, {}, m) < 0) fail_semantic(o.span.line ? o.span : d.span, "unknown object " + compact(o));
}

}  // namespace

PreModelSet enumerate_premodels(const BasicActionTheory& bat, const Structure& s, Budget& budget) {
  const ActionSignature& sig = bat.sig;
  StructureSpec spec = expand_instance_schemas(s, sig);
  std::vector<Placement> places;
  for (const auto& o : spec.objects) places.push_back(place(o, sig));

  // structure statics as rules
  std::vector<NRule> structure_rules;
  for (const auto& d : spec.statics) {
    Statement st;
    st.kind = StmtKind::StateConstraint;
    st.axiom.kind = AxiomKind::Rule;
    st.axiom.head = d.head;
    st.axiom.body = d.body;
    st.axiom.span = d.span;
    Module tmp;
    tmp.axioms = {st.axiom};
    Statement checked = validate_statements(tmp, sig).front();
    const Function& hf = sig.fn(d.head.lhs.name);
    if (!hf.is_static() || hf.kind == FnKind::Special || hf.kind == FnKind::Attribute)
      fail_semantic(d.span, "values of statics may only define statics, not " + hf.name);
    NRule r = normalize(checked, sig);
    if (!static_rule(r, sig)) fail_semantic(d.span, "static value definitions cannot mention fluents");
    structure_rules.push_back(std::move(r));
  }

  // odometer over the open placement choices
  std::vector<std::pair<size_t, size_t>> slots;  // (object, choice)
  for (size_t i = 0; i < places.size(); ++i)
    for (size_t j = 0; j < places[i].choices.size(); ++j) slots.push_back({i, j});
  std::vector<size_t> digit(slots.size(), 0);

  PreModelSet out;
  for (;;) {
    budget.tick();
    PreModel m;
    m.sig = &sig;
    m.syms = std::make_shared<Symbols>();
    Symbols& sy = *m.syms;
    sy.truth(false);
    sy.truth(true);
    for (const auto& c : sig.hierarchy.sorts()) sy.intern(Term::id(c));
    std::vector<int> obj_ids;
    std::string label;
    for (size_t i = 0; i < places.size(); ++i) {
      int id = sy.intern(places[i].obj->name);
      obj_ids.push_back(id);
      m.is_a[id] = places[i].fixed;
    }
    for (size_t k = 0; k < slots.size(); ++k) {
      auto [i, j] = slots[k];
      const std::string& c = places[i].choices[j][digit[k]];
      m.is_a[obj_ids[i]].insert(c);
      label += (label.empty() ? "" : ", ") + compact(places[i].obj->name) + ":" + c;
    }
    m.label = label;
    for (const auto& [name, v] : spec.constants) m.denote[name] = sy.intern(v);

    // extents
    std::set<int> universe;
    for (const auto& c : sig.hierarchy.sorts()) {
      std::set<int> e;
      for (const auto& [o, cs] : m.is_a)
        for (const auto& s2 : cs)
          if (sig.hierarchy.below_or_equal(s2, c)) e.insert(o);
      if (sig.hierarchy.below_or_equal("booleans", c)) {
        e.insert(sy.truth(false));
        e.insert(sy.truth(true));
      }
      m.extents[c] = std::vector<int>(e.begin(), e.end());
      universe.insert(e.begin(), e.end());
    }
    for (const auto& [name, r] : sig.ranges) {
      if (!r.hi_attr.empty()) continue;
      std::vector<int> e;
      for (long long v = r.lo; v <= r.hi; ++v) e.push_back(sy.integer(v));
      std::sort(e.begin(), e.end());
      universe.insert(e.begin(), e.end());
      m.extents[name] = std::move(e);
    }
    // attribute values
    for (size_t i = 0; i < places.size(); ++i)
      for (const auto& a : places[i].obj->attrs) {
        const Function& f = sig.fn(a.name);
        std::vector<int> args{obj_ids[i]};
        for (const auto& x : a.args) args.push_back(eval_term(x, {}, m) >= 0 ? eval_term(x, {}, m) : sy.intern(x));
        int v = eval_term(a.value, {}, m);
        if (v < 0) {
          if (a.value.kind == TermKind::Int) v = sy.intern(a.value);
          else fail_semantic(a.span, "value " + compact(a.value) + " of attribute " + a.name + " is not an object");
        }
        if (args.size() != f.arity())
          fail_semantic(a.span, "attribute " + a.name + " expects " + std::to_string(f.arity() - 1) + " argument(s)");
        bool owner_ok = false;
        for (const auto& c : m.is_a[obj_ids[i]]) owner_ok |= sig.hierarchy.below_or_equal(c, f.args[0]);
        if (!owner_ok) fail_semantic(a.span, compact(places[i].obj->name) + " has no attribute " + a.name);
        if (f.range != "universe" && sig.known_sort(f.range) && !sig.ranges.count(f.range) && !m.member(f.range, v))
          fail_semantic(a.span, "value " + sy.str(v) + " of attribute " + a.name + " is outside sort " + f.range);
        if (sig.ranges.count(f.range) && sig.ranges.at(f.range).hi_attr.empty() && !m.member(f.range, v))
          fail_semantic(a.span, "value " + sy.str(v) + " of attribute " + a.name + " is outside sort " + f.range);
        auto& tab = m.values[a.name];
        tab[args] = v;
      }
    // symbolic ranges: union over owners, per-owner bound checked
    for (const auto& [name, r] : sig.ranges) {
      if (r.hi_attr.empty()) continue;
      std::set<int> e;
      std::map<int, long long> bound;
      for (const auto& [args, v] : m.values[r.hi_attr]) {
        if (!sy.is_int(v)) continue;
        bound[args[0]] = sy.ival(v);
        for (long long x = r.lo; x <= sy.ival(v); ++x) e.insert(sy.integer(x));
      }
      m.extents[name] = std::vector<int>(e.begin(), e.end());
      universe.insert(e.begin(), e.end());
      for (const auto& fname : sig.order) {
        const Function& f = sig.functions.at(fname);
        if (f.kind != FnKind::Attribute) continue;
        for (size_t k = 1; k < f.args.size(); ++k) {
          if (f.args[k] != name) continue;
          for (const auto& [args, v] : m.values[f.name]) {
            auto b = bound.find(args[0]);
            long long x = sy.is_int(args[k]) ? sy.ival(args[k]) : r.lo - 1;
            if (b == bound.end() || x < r.lo || x > b->second)
              fail_semantic(s.span, f.name + "(" + sy.str(args[0]) + "," + sy.str(args[k]) +
                                        ") is outside the range bounded by " + r.hi_attr);
          }
        }
      }
    }
    for (auto it = m.values.begin(); it != m.values.end();)
      it = it->second.empty() ? m.values.erase(it) : std::next(it);
    m.extents["universe"] = std::vector<int>(universe.begin(), universe.end());
    std::vector<int> nodes;
    for (const auto& c : sig.hierarchy.sorts()) nodes.push_back(sy.find(Term::id(c)));
    std::sort(nodes.begin(), nodes.end());
    m.extents["nodes"] = nodes;
    for (auto& [k, v] : m.extents) std::sort(v.begin(), v.end());

    for (const auto& d : spec.statics) check_static_objects(d, sig, m);
    // statics: a program over static atoms that must have exactly one answer set
    ProgramBuilder pb(m);
    GroundContext ctx{sig, m, [](const Function& f) { return f.hierarchy(); }};
    for (const auto& [fn, tab] : m.values)
      for (const auto& [args, v] : tab) pb.prog.add_fact(pb.fatom(fn, args, v));
    auto untimed = [](const FAtom&, bool) { return -1; };
    for (const auto& r : bat.rules)
      if ((r.kind == StmtKind::StateConstraint || r.kind == StmtKind::Definition) && static_rule(r, sig))
        pb.add_rules(r, ctx, untimed);
    for (const auto& r : structure_rules) pb.add_rules(r, ctx, untimed);
    for (const auto& fname : sig.order) {
      const Function& f = sig.functions.at(fname);
      if (f.kind != FnKind::DefinedStatic) continue;
      if (f.is_dom() && sig.fn(f.dom_of).fluent()) continue;
      std::vector<int> args;
      std::function<void(size_t)> rec = [&](size_t i) {
        if (i == f.args.size()) {
          int t = pb.fatom(f.name, args, sy.truth(true));
          int fa = pb.fatom(f.name, args, sy.truth(false));
          pb.prog.add_rule(fa, {}, {t});
          return;
        }
        for (int x : m.extent(f.args[i])) {
          args.push_back(x);
          rec(i + 1);
          args.pop_back();
        }
      };
      rec(0);
    }
    pb.finish();
    SolveOptions so;
    so.limit = 2;
    auto answers = solve_all(pb.prog, so, budget);
    if (answers.empty()) {
      out.pruned.push_back(label.empty() ? "the structure violates a static constraint"
                                         : "placement {" + label + "} violates a static constraint");
    } else if (answers.size() > 1) {
      fail_semantic(s.span, "the structure does not determine the values of its statics");
    } else {
      for (int a : answers[0]) {
        const AtomKey& k = pb.keys[a];
        if (k.fn.empty() || sig.fn(k.fn).is_dom()) continue;
        m.values[k.fn][k.args] = k.value;
      }
      out.models.push_back(std::move(m));
    }

    size_t k = 0;
    for (; k < slots.size(); ++k) {
      auto [i, j] = slots[k];
      if (++digit[k] < places[i].choices[j].size()) break;
      digit[k] = 0;
    }
    if (k == slots.size()) break;
  }
  return out;
}

// ---------------------------------------------------------------- loading

System load_system(const SourceFile& f, const LoadOptions& opt) {
  if (!f.is_system()) fail_input(f.theory().span, "expected a system description, found a theory");
  const SystemDescription& sd = f.system();
  System sys;
  sys.name = sd.name;
  sys.theory = resolve_imports(sd.theory, library_search_path(opt.lib_dirs));
  Module flat = flatten(sys.theory);
  sys.bat = assemble_bat(flat, opt.natural_bound);
  if (sd.structure) sys.structure = *sd.structure;
  return sys;
}

System load_system_file(const std::string& path, const LoadOptions& opt) {
  LoadOptions o = opt;
  auto dir = std::filesystem::path(path).parent_path();
  o.lib_dirs.push_back(dir.empty() ? "." : dir.string());
  return load_system(parse_path(path), o);
}

}  // namespace alm
