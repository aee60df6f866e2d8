#include "alm/ontology.hpp"

#include <algorithm>
#include <functional>

namespace alm {

const char* kind_name(FnKind k) {
  switch (k) {
    case FnKind::Attribute: return "attribute";
    case FnKind::BasicStatic: return "basic static";
    case FnKind::DefinedStatic: return "defined static";
    case FnKind::BasicFluent: return "basic fluent";
    case FnKind::DefinedFluent: return "defined fluent";
    case FnKind::Special: return "special";
    case FnKind::Occurs: return "occurs";
  }
  return "?";
}

void Hierarchy::add_link(const std::string& child, const std::string& parent) {
  sorts_.insert(child);
  sorts_.insert(parent);
  links_.insert({child, parent});
}

std::vector<std::string> Hierarchy::parents(const std::string& c) const {
  std::vector<std::string> out;
  for (auto it = links_.lower_bound({c, ""}); it != links_.end() && it->first == c; ++it) out.push_back(it->second);
  return out;
}

std::vector<std::string> Hierarchy::children(const std::string& c) const {
  std::vector<std::string> out;
  for (const auto& [a, b] : links_)
    if (b == c) out.push_back(a);
  return out;
}

bool Hierarchy::subsort(const std::string& a, const std::string& b) const {
  auto it = up_.find(a);
  return it != up_.end() && it->second.count(b) > 0;
}

std::vector<std::string> Hierarchy::sources_below(const std::string& c) const {
  std::vector<std::string> out;
  for (const auto& s : sorts_)
    if (source(s) && below_or_equal(s, c)) out.push_back(s);
  return out;
}

std::vector<std::string> Hierarchy::topological() const {
  // parents before children, ties by name
  std::map<std::string, int> pending;
  for (const auto& s : sorts_) pending[s] = (int)parents(s).size();
  std::vector<std::string> out;
  std::set<std::string> ready;
  for (const auto& [s, n] : pending)
    if (n == 0) ready.insert(s);
  while (!ready.empty()) {
    std::string s = *ready.begin();
    ready.erase(ready.begin());
    out.push_back(s);
    for (const auto& c : children(s))
      if (--pending[c] == 0) ready.insert(c);
  }
  return out;
}

void Hierarchy::close(const Span& where) {
  std::map<std::string, int> mark;
  std::vector<std::string> path;
  std::function<void(const std::string&)> visit = [&](const std::string& s) {
    mark[s] = 1;
    path.push_back(s);
    std::set<std::string> up;
    for (const auto& p : parents(s)) {
      if (mark[p] == 1) {
        std::string cyc;
        auto it = std::find(path.begin(), path.end(), p);
        for (; it != path.end(); ++it) cyc += *it + " -> ";
        fail_semantic(where, "cycle in sort hierarchy: " + cyc + p);
      }
      if (mark[p] == 0) visit(p);
      up.insert(p);
      up.insert(up_[p].begin(), up_[p].end());
    }
    up_[s] = std::move(up);
    path.pop_back();
    mark[s] = 2;
  };
  for (const auto& s : sorts_)
    if (mark[s] == 0) visit(s);
  for (const auto& s : sorts_)
    if (s != "universe" && parents(s).empty())
      fail_semantic(where, "sort " + s + " is not linked to universe");
}

const Function* ActionSignature::find(const std::string& name) const {
  auto it = functions.find(name);
  return it == functions.end() ? nullptr : &it->second;
}

const Function& ActionSignature::fn(const std::string& name) const {
  const Function* f = find(name);
  if (!f) throw std::out_of_range("unknown function " + name);
  return *f;
}

bool ActionSignature::constant_family(const std::string& name) const {
  for (const auto& c : constants)
    if (c.name == name && !c.params.empty()) return true;
  return false;
}

std::vector<const Function*> ActionSignature::user_functions() const {
  std::vector<const Function*> out;
  for (const auto& n : order) {
    const Function& f = functions.at(n);
    if (f.kind != FnKind::Special && f.kind != FnKind::Occurs && !f.is_dom()) out.push_back(&f);
  }
  return out;
}

std::string range_name(const SortRef& r) {
  if (!r.is_range()) return r.name;
  return "[" + print(*r.lo) + ".." + print(*r.hi) + "]";
}

namespace {

const std::set<std::string> kNumberSorts = {"natural_numbers", "positive_natural_numbers", "integers"};

struct Builder {
  ActionSignature sig;
  const Module& m;
  std::set<std::string> declared;

  explicit Builder(const Module& mod) : m(mod) {}

  std::string sort_ref(const SortRef& r, const std::string& owner = "") {
    if (!r.is_range()) {
      if (kNumberSorts.count(r.name)) {
        RangeSort rs{r.name, 0, sig.natural_bound, ""};
        if (r.name == "positive_natural_numbers") rs.lo = 1;
        if (r.name == "integers") rs.lo = -sig.natural_bound;
        sig.ranges[r.name] = rs;
        return r.name;
      }
      if (!sig.hierarchy.has_sort(r.name)) fail_semantic(r.span, "unknown sort " + r.name);
      return r.name;
    }
    RangeSort rs;
    rs.name = range_name(r);
    auto bound = [&](const Term& t, long long& out) {
      if (t.kind == TermKind::Int) {
        out = t.ival;
      } else if (t.kind == TermKind::Id && &t == &*r.hi && !owner.empty()) {
        rs.hi_attr = t.name;
      } else {
        fail_semantic(r.span, "range bound must be an integer or an attribute of the owning sort");
      }
    };
    bound(*r.lo, rs.lo);
    bound(*r.hi, rs.hi);
    if (rs.hi_attr.empty() && rs.hi < rs.lo) fail_semantic(r.span, "empty range " + rs.name);
    sig.ranges[rs.name] = rs;
    return rs.name;
  }

  void add_function(Function f) {
    auto it = sig.functions.find(f.name);
    if (it != sig.functions.end()) {
      Function& g = it->second;
      bool same_tail = g.kind == f.kind && g.range == f.range && g.args.size() == f.args.size() &&
                       std::equal(g.args.begin() + (f.kind == FnKind::Attribute ? 1 : 0), g.args.end(),
                                  f.args.begin() + (f.kind == FnKind::Attribute ? 1 : 0));
      if (!same_tail || g.total != f.total)
        fail_semantic(f.span, "function " + f.name + " re-declared with a different signature");
      if (f.kind == FnKind::Attribute && g.owner != f.owner) {
        // same attribute on several sorts: owned by their closest common ancestor
        g.owner = common_ancestor(g.owner, f.owner);
        g.args[0] = g.owner;
      }
      return;
    }
    sig.order.push_back(f.name);
    sig.functions.emplace(f.name, std::move(f));
  }

  std::string common_ancestor(const std::string& a, const std::string& b) {
    Hierarchy h = sig.hierarchy;
    h.close(m.span);
    std::string best = "universe";
    for (const auto& s : h.topological())
      if (h.below_or_equal(a, s) && h.below_or_equal(b, s) && h.subsort(s, best)) best = s;
    return best;
  }

  void run() {
    Hierarchy& h = sig.hierarchy;
    h.add_sort("universe");
    for (const auto& sd : m.sorts)
      for (const auto& s : sd.sorts) {
        if (s == "universe") fail_semantic(sd.span, "universe cannot be declared");
        if (kNumberSorts.count(s)) fail_semantic(sd.span, "predefined sort " + s + " cannot be declared");
        declared.insert(s);
      }
    for (const auto& sd : m.sorts)
      for (const auto& s : sd.sorts)
        for (const auto& p : sd.parents) {
          if (p.is_range() || kNumberSorts.count(p.name))
            fail_semantic(p.span, "sort " + s + " cannot specialize a numeric sort");
          if (p.name == s) fail_semantic(p.span, "sort " + s + " specializes itself");
          h.add_link(s, p.name);
        }
    // predefined sorts keep their default place unless the theory placed them
    for (const char* pre : {"actions", "booleans"})
      if (!declared.count(pre)) h.add_link(pre, "universe");
    // sorts mentioned only as parents
    for (const auto& s : std::set<std::string>(h.sorts()))
      if (s != "universe" && !declared.count(s) && h.parents(s).empty()) h.add_link(s, "universe");
    h.close(m.span);

    for (const auto& sd : m.sorts)
      for (const auto& s : sd.sorts)
        for (const auto& a : sd.attrs) {
          Function f;
          f.name = a.name;
          f.kind = FnKind::Attribute;
          f.owner = s;
          f.span = a.span;
          f.args.push_back(s);
          for (const auto& r : a.args) f.args.push_back(sort_ref(r, s));
          f.range = sort_ref(a.range, s);
          add_function(std::move(f));
        }
    for (const auto& fd : m.funcs) {
      Function f;
      f.name = fd.name;
      f.span = fd.span;
      f.total = fd.total;
      if (fd.cat == FnCat::Static) f.kind = fd.defined ? FnKind::DefinedStatic : FnKind::BasicStatic;
      else f.kind = fd.defined ? FnKind::DefinedFluent : FnKind::BasicFluent;
      for (const auto& r : fd.args) f.args.push_back(sort_ref(r));
      f.range = sort_ref(fd.range);
      if (fd.defined && f.range != "booleans")
        fail_semantic(fd.span, "defined function " + f.name + " must be boolean");
      if (fd.total && f.args.empty())
        fail_semantic(fd.span, "total is meaningless for 0-ary function " + f.name);
      if (f.name == "occurs" || f.name.rfind("dom_", 0) == 0)
        fail_semantic(fd.span, "function name " + f.name + " is reserved");
      add_function(std::move(f));
    }
    for (const auto& c : m.consts) {
      for (const auto& s : c.sorts)
        if (!h.has_sort(s)) fail_semantic(c.span, "unknown sort " + s);
      for (const auto& p : c.params) sort_ref(p);
      if (sig.find(c.name)) fail_semantic(c.span, c.name + " is both a function and an object constant");
      sig.constants.push_back(c);
    }

    std::vector<std::string> users = sig.order;
    for (const auto& n : users) {
      const Function& f = sig.functions.at(n);
      if (f.arity() == 0) continue;
      Function d;
      d.name = "dom_" + f.name;
      d.kind = f.kind == FnKind::BasicFluent ? FnKind::BasicFluent : FnKind::DefinedStatic;
      d.args = f.args;
      d.range = "booleans";
      d.dom_of = f.name;
      d.span = f.span;
      sig.order.push_back(d.name);
      sig.functions.emplace(d.name, std::move(d));
    }
    auto special = [&](const std::string& name, std::vector<std::string> args) {
      Function f;
      f.name = name;
      f.kind = FnKind::Special;
      f.args = std::move(args);
      f.range = "booleans";
      sig.order.push_back(name);
      sig.functions.emplace(name, std::move(f));
    };
    special("instance", {"universe", "nodes"});
    special("is_a", {"universe", "nodes"});
    special("link", {"nodes", "nodes"});
    special("subsort", {"nodes", "nodes"});
    special("has_child", {"nodes"});
    special("has_parent", {"nodes"});
    special("source", {"nodes"});
    special("sink", {"nodes"});
    Function occ;
    occ.name = "occurs";
    occ.kind = FnKind::Occurs;
    occ.args = {"actions"};
    occ.range = "booleans";
    sig.order.push_back("occurs");
    sig.functions.emplace("occurs", std::move(occ));
  }
};

}  // namespace

ActionSignature build_signature(const Module& flat, long long natural_bound) {
  Builder b(flat);
  b.sig.natural_bound = natural_bound;
  b.run();
  return std::move(b.sig);
}

std::vector<std::string> hierarchy_facts(const Hierarchy& h) {
  std::vector<std::string> out;
  for (const auto& [a, b] : h.links()) out.push_back("link(" + a + "," + b + ").");
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace alm
