#include "alm/model.hpp"

#include <algorithm>

namespace alm {

std::string compact(const Term& t) {
  switch (t.kind) {
    case TermKind::Var:
    case TermKind::Id: return t.name;
    case TermKind::Int: return std::to_string(t.ival);
    case TermKind::Arith: return compact(t.args[0]) + t.name + compact(t.args[1]);
    case TermKind::Func: {
      std::string s = t.name + "(";
      for (size_t i = 0; i < t.args.size(); ++i) s += (i ? "," : "") + compact(t.args[i]);
      return s + ")";
    }
  }
  return "";
}

int Symbols::intern(const Term& t) {
  std::string k = compact(t);
  auto it = index_.find(k);
  if (it != index_.end()) return it->second;
  int id = (int)terms_.size();
  Term c = t;
  c.span = Span{};
  terms_.push_back(std::move(c));
  strs_.push_back(k);
  index_.emplace(std::move(k), id);
  return id;
}

int Symbols::find(const Term& t) const {
  auto it = index_.find(compact(t));
  return it == index_.end() ? -1 : it->second;
}

const std::vector<int>& PreModel::extent(const std::string& sort) const {
  static const std::vector<int> empty;
  auto it = extents.find(sort);
  return it == extents.end() ? empty : it->second;
}

bool PreModel::member(const std::string& sort, int id) const {
  const auto& e = extent(sort);
  return std::binary_search(e.begin(), e.end(), id);
}

int PreModel::eval_static(const std::string& fn, const std::vector<int>& args) const {
  const Function& f = sig->fn(fn);
  auto truth = [&](bool b) { return syms->truth(b); };
  auto sort_arg = [&](size_t i) -> std::string {
    const Term& t = syms->term(args[i]);
    if (t.kind != TermKind::Id || !sig->hierarchy.has_sort(t.name)) return "";
    return t.name;
  };
  if (f.hierarchy()) {
    const Hierarchy& h = sig->hierarchy;
    if (fn == "instance") {
      std::string c = sort_arg(1);
      return truth(!c.empty() && member(c, args[0]));
    }
    if (fn == "is_a") {
      std::string c = sort_arg(1);
      auto it = is_a.find(args[0]);
      return truth(!c.empty() && it != is_a.end() && it->second.count(c));
    }
    std::string a = sort_arg(0);
    if (a.empty()) return truth(false);
    if (fn == "link" || fn == "subsort") {
      std::string b = sort_arg(1);
      if (b.empty()) return truth(false);
      return truth(fn == "link" ? h.link(a, b) : h.subsort(a, b));
    }
    if (fn == "has_child") return truth(!h.children(a).empty());
    if (fn == "has_parent") return truth(!h.parents(a).empty());
    if (fn == "source") return truth(h.source(a));
    if (fn == "sink") return truth(h.sink(a));
    return -1;
  }
  if (f.is_dom()) {
    const Function& g = sig->fn(f.dom_of);
    if (g.fluent()) return truth(true);
    if (g.defined()) return truth(true);
    auto it = values.find(g.name);
    return truth(it != values.end() && it->second.count(args));
  }
  auto it = values.find(fn);
  if (it != values.end()) {
    auto jt = it->second.find(args);
    if (jt != it->second.end()) return jt->second;
  }
  if (f.defined()) return truth(false);
  return -1;
}

std::vector<std::string> PreModel::hierarchy_dump() const {
  std::vector<std::string> out = hierarchy_facts(sig->hierarchy);
  for (const auto& [o, cs] : is_a)
    for (const auto& c : cs) out.push_back("is_a(" + syms->str(o) + "," + c + ").");
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<std::string> PreModel::statics_dump() const {
  std::vector<std::string> out;
  for (const auto& [fn, tab] : values)
    for (const auto& [args, v] : tab) {
      std::string s = fn;
      if (!args.empty()) {
        s += "(";
        for (size_t i = 0; i < args.size(); ++i) s += (i ? "," : "") + syms->str(args[i]);
        s += ")";
      }
      out.push_back(s + "=" + syms->str(v));
    }
  std::sort(out.begin(), out.end());
  return out;
}

int eval_term(const Term& t, const Binding& b, const PreModel& m) {
  switch (t.kind) {
    case TermKind::Var: {
      auto it = b.find(t.name);
      return it == b.end() ? -1 : it->second;
    }
    case TermKind::Int: return m.syms->integer(t.ival);
    case TermKind::Id: {
      auto it = m.denote.find(t.name);
      if (it != m.denote.end()) return it->second;
      return m.syms->find(t);
    }
    case TermKind::Func: {
      Term g = Term::func(t.name, {});
      for (const auto& a : t.args) {
        int v = eval_term(a, b, m);
        if (v < 0) return -1;
        g.args.push_back(m.syms->term(v));
      }
      return m.syms->find(g);
    }
    case TermKind::Arith: {
      int l = eval_term(t.args[0], b, m), r = eval_term(t.args[1], b, m);
      if (l < 0 || r < 0 || !m.syms->is_int(l) || !m.syms->is_int(r)) return -1;
      long long x = m.syms->ival(l), y = m.syms->ival(r), z = 0;
      if (t.name == "+") z = x + y;
      else if (t.name == "-") z = x - y;
      else if (t.name == "*") z = x * y;
      else if (t.name == "/" || t.name == "mod") {
        if (y == 0) return -1;
        z = t.name == "/" ? x / y : ((x % y) + y) % y;
      } else {
        return -1;
      }
      return m.syms->integer(z);
    }
  }
  return -1;
}

bool compare(Rel rel, int a, int b, const Symbols& s) {
  if (rel == Rel::Eq) return a == b;
  if (rel == Rel::Neq) return a != b;
  if (!s.is_int(a) || !s.is_int(b)) return false;
  long long x = s.ival(a), y = s.ival(b);
  switch (rel) {
    case Rel::Lt: return x < y;
    case Rel::Le: return x <= y;
    case Rel::Gt: return x > y;
    case Rel::Ge: return x >= y;
    default: return false;
  }
}

namespace {

struct RuleGrounder {
  const NRule& r;
  const GroundContext& ctx;
  const std::function<void(const Binding&)>& emit;
  std::vector<std::string> vars;
  std::vector<std::vector<int>> dom;
  std::vector<char> evaluable;  // per body item
  Binding b;

  RuleGrounder(const NRule& rule, const GroundContext& c, const std::function<void(const Binding&)>& e)
      : r(rule), ctx(c), emit(e) {
    for (const auto& [v, sorts] : sort_of_variables(r, ctx.sig)) {
      vars.push_back(v);
      std::vector<int> d = ctx.m.extent(sorts[0]);
      for (size_t i = 1; i < sorts.size(); ++i) {
        std::vector<int> keep;
        for (int x : d)
          if (ctx.m.member(sorts[i], x)) keep.push_back(x);
        d.swap(keep);
      }
      dom.push_back(std::move(d));
    }
    for (const auto& it : r.body)
      evaluable.push_back(it.kind == BodyItem::Kind::Cmp || ctx.evaluable(ctx.sig.fn(it.atom.fn)));
  }

  int var_index(const std::string& v) const {
    return (int)(std::lower_bound(vars.begin(), vars.end(), v) - vars.begin());
  }

  bool in_domain(const std::string& v, int x) const {
    const auto& d = dom[var_index(v)];
    return std::binary_search(d.begin(), d.end(), x);
  }

  static bool lone_unbound(const Term& t, const Binding& b) { return t.kind == TermKind::Var && !b.count(t.name); }

  // 1: settled true, 0: cannot decide yet, -1: false.
  int try_item(size_t i, std::vector<std::string>& bound_here) {
    const BodyItem& it = r.body[i];
    const PreModel& m = ctx.m;
    if (it.kind == BodyItem::Kind::Cmp) {
      int l = eval_term(it.lhs, b, m), rr = eval_term(it.rhs, b, m);
      if (l >= 0 && rr >= 0) return compare(it.rel, l, rr, *m.syms) ? 1 : -1;
      if (it.rel != Rel::Eq) return 0;
      if (l < 0 && rr >= 0 && lone_unbound(it.lhs, b)) return bind(it.lhs.name, rr, bound_here);
      if (rr < 0 && l >= 0 && lone_unbound(it.rhs, b)) return bind(it.rhs.name, l, bound_here);
      return 0;
    }
    std::vector<int> args;
    for (const auto& a : it.atom.args) {
      int v = eval_term(a, b, m);
      if (v < 0) return 0;
      args.push_back(v);
    }
    int val = m.eval_static(it.atom.fn, args);
    bool truth = false;
    int want = eval_term(it.atom.value, b, m);
    if (want >= 0) {
      truth = val >= 0 && val == want;
    } else if (lone_unbound(it.atom.value, b)) {
      if (val < 0) truth = false;
      else if (it.kind == BodyItem::Kind::Pos) return bind(it.atom.value.name, val, bound_here);
      else return 0;
    } else {
      return 0;
    }
    if (it.kind == BodyItem::Kind::Not) truth = !truth;
    return truth ? 1 : -1;
  }

  int bind(const std::string& v, int x, std::vector<std::string>& bound_here) {
    if (!in_domain(v, x)) return -1;
    b[v] = x;
    bound_here.push_back(v);
    return 1;
  }

  void rec(std::vector<char> done) {
    std::vector<std::string> bound_here;
    bool ok = true;
    for (bool progress = true; progress && ok;) {
      progress = false;
      for (size_t i = 0; i < r.body.size() && ok; ++i) {
        if (done[i] || !evaluable[i]) continue;
        int res = try_item(i, bound_here);
        if (res < 0) ok = false;
        else if (res > 0) {
          done[i] = 1;
          progress = true;
        }
      }
    }
    if (ok) {
      int pick = -1;
      for (size_t i = 0; i < vars.size(); ++i)
        if (!b.count(vars[i]) && (pick < 0 || dom[i].size() < dom[pick].size())) pick = (int)i;
      if (pick < 0) {
        bool all = true;
        for (size_t i = 0; i < r.body.size(); ++i) all &= !evaluable[i] || done[i];
        if (all) emit(b);
      } else {
        for (int x : dom[pick]) {
          b[vars[pick]] = x;
          rec(done);
        }
        b.erase(vars[pick]);
      }
    }
    for (const auto& v : bound_here) b.erase(v);
  }
};

}  // namespace

void ground_rule(const NRule& r, const GroundContext& ctx, const std::function<void(const Binding&)>& emit) {
  RuleGrounder g(r, ctx, emit);
  g.rec(std::vector<char>(r.body.size(), 0));
}

std::string ProgramBuilder::atom_text(const AtomKey& k) const {
  std::string s = k.fn;
  if (!k.args.empty() || k.step >= 0) {
    s += "(";
    for (size_t i = 0; i < k.args.size(); ++i) s += (i ? "," : "") + m_.syms->str(k.args[i]);
    if (k.step >= 0) s += (k.args.empty() ? "" : ",") + std::to_string(k.step);
    s += ")";
  }
  return s;
}

int ProgramBuilder::fatom(const std::string& fn, const std::vector<int>& args, int value, int step) {
  AtomKey k{fn, args, value, step};
  std::string g = atom_text(k);
  std::string name = g + "=" + m_.syms->str(value);
  size_t before = prog.size();
  int id = prog.atom(name);
  if (prog.size() > before) {
    keys.resize(id);
    keys.push_back(std::move(k));
    groups_[g].push_back(id);
  }
  return id;
}

int ProgramBuilder::aux(const std::string& name) {
  size_t before = prog.size();
  int id = prog.atom(name);
  if (prog.size() > before) keys.resize(id + 1);
  return id;
}

int ProgramBuilder::atom_of(const FAtom& a, const Binding& b, int step) {
  std::vector<int> args;
  for (const auto& t : a.args) {
    int v = eval_term(t, b, m_);
    if (v < 0) return -1;
    args.push_back(v);
  }
  int v = eval_term(a.value, b, m_);
  if (v < 0) return -1;
  return fatom(a.fn, args, v, step);
}

size_t ProgramBuilder::add_rules(const NRule& r, const GroundContext& ctx,
                                 const std::function<int(const FAtom&, bool)>& step_of) {
  size_t n = 0;
  bool head_eval = r.head && ctx.evaluable(ctx.sig.fn(r.head->fn));
  ground_rule(r, ctx, [&](const Binding& b) {
    int head = -1;
    if (r.head) {
      if (head_eval) {
        std::vector<int> args;
        for (const auto& t : r.head->args) {
          int v = eval_term(t, b, m_);
          if (v < 0) return;
          args.push_back(v);
        }
        int want = eval_term(r.head->value, b, m_);
        if (want < 0) return;
        if (m_.eval_static(r.head->fn, args) == want) return;  // already true in the pre-model
      } else {
        head = atom_of(*r.head, b, step_of(*r.head, true));
        if (head < 0) return;
      }
    }
    std::vector<int> pos, neg;
    for (const auto& it : r.body) {
      if (it.kind == BodyItem::Kind::Cmp || ctx.evaluable(ctx.sig.fn(it.atom.fn))) continue;
      int a = atom_of(it.atom, b, step_of(it.atom, false));
      if (a < 0) {
        if (it.kind == BodyItem::Kind::Pos) return;  // can never hold
        continue;
      }
      (it.kind == BodyItem::Kind::Pos ? pos : neg).push_back(a);
    }
    prog.add_rule(head, std::move(pos), std::move(neg));
    ++n;
  });
  return n;
}

void ProgramBuilder::finish() {
  for (auto& [g, members] : groups_) prog.add_group(members);
}

bool static_rule(const NRule& r, const ActionSignature& sig) {
  if (r.head && !sig.fn(r.head->fn).is_static()) return false;
  for (const auto& it : r.body)
    if (it.kind != BodyItem::Kind::Cmp && !sig.fn(it.atom.fn).is_static()) return false;
  return true;
}

}  // namespace alm
