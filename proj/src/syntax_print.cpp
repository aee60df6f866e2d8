#include <sstream>

#include "alm/syntax.hpp"

namespace alm {

std::string rel_text(Rel r) {
  switch (r) {
    case Rel::Eq: return "=";
    case Rel::Neq: return "!=";
    case Rel::Lt: return "<";
    case Rel::Le: return "<=";
    case Rel::Gt: return ">";
    case Rel::Ge: return ">=";
    case Rel::None: break;
  }
  return "";
}

std::string print(const Term& t) {
  switch (t.kind) {
    case TermKind::Var:
    case TermKind::Id: return t.name;
    case TermKind::Int: return std::to_string(t.ival);
    case TermKind::Arith: return print(t.args[0]) + " " + t.name + " " + print(t.args[1]);
    case TermKind::Func: {
      std::string s = t.name + "(";
      for (size_t i = 0; i < t.args.size(); ++i) s += (i ? ", " : "") + print(t.args[i]);
      return s + ")";
    }
  }
  return "";
}

std::string SortRef::str() const { return print(*this); }

std::string print(const SortRef& s) {
  if (!s.is_range()) return s.name;
  return "[" + print(*s.lo) + ".." + print(*s.hi) + "]";
}

std::string print(const Literal& l) {
  if (l.neg) return "-" + print(l.lhs);
  if (l.rel == Rel::None) return print(l.lhs);
  return print(l.lhs) + " " + rel_text(l.rel) + " " + print(*l.rhs);
}

namespace {

std::string join_lits(const std::vector<Literal>& ls) {
  std::string s;
  for (size_t i = 0; i < ls.size(); ++i) s += (i ? ", " : "") + print(ls[i]);
  return s;
}

std::string signature(const std::vector<SortRef>& args, const SortRef& range) {
  std::string s;
  for (size_t i = 0; i < args.size(); ++i) s += (i ? " * " : "") + print(args[i]);
  if (!args.empty()) s += " -> ";
  return s + print(range);
}

std::string print_import(const Import& im) {
  if (im.whole_theory) return "import " + im.theory + " from " + im.library;
  if (im.theory.empty()) return "import module " + im.module + " from " + im.library;
  return "import " + im.theory + "." + im.module + " from " + im.library;
}

void indent(std::ostringstream& os, int n) { os << std::string(n * 2, ' '); }

void print_module(std::ostringstream& os, const Module& m, int d) {
  indent(os, d);
  os << "module " << m.name << "\n";
  if (!m.depends.empty()) {
    indent(os, d + 1);
    os << "depends on ";
    for (size_t i = 0; i < m.depends.size(); ++i) os << (i ? ", " : "") << m.depends[i];
    os << "\n";
  }
  if (!m.sorts.empty()) {
    indent(os, d + 1);
    os << "sort declarations\n";
    for (const auto& s : m.sorts) {
      indent(os, d + 2);
      for (size_t i = 0; i < s.sorts.size(); ++i) os << (i ? ", " : "") << s.sorts[i];
      os << " :: ";
      for (size_t i = 0; i < s.parents.size(); ++i) os << (i ? ", " : "") << print(s.parents[i]);
      os << "\n";
      if (!s.attrs.empty()) {
        indent(os, d + 3);
        os << "attributes\n";
        for (const auto& a : s.attrs) {
          indent(os, d + 4);
          os << a.name << " : " << signature(a.args, a.range) << "\n";
        }
      }
    }
  }
  if (!m.consts.empty()) {
    indent(os, d + 1);
    os << "object constants\n";
    for (const auto& c : m.consts) {
      indent(os, d + 2);
      os << c.name;
      if (!c.params.empty()) {
        os << "(";
        for (size_t i = 0; i < c.params.size(); ++i) os << (i ? ", " : "") << print(c.params[i]);
        os << ")";
      }
      os << " : ";
      for (size_t i = 0; i < c.sorts.size(); ++i) os << (i ? ", " : "") << c.sorts[i];
      os << "\n";
    }
  }
  if (!m.funcs.empty()) {
    indent(os, d + 1);
    os << "function declarations\n";
    int cat = -1, def = -1;
    for (const auto& f : m.funcs) {
      if ((int)f.cat != cat) {
        cat = (int)f.cat;
        def = -1;
        indent(os, d + 2);
        os << (f.cat == FnCat::Static ? "statics" : "fluents") << "\n";
      }
      if ((int)f.defined != def) {
        def = (int)f.defined;
        indent(os, d + 3);
        os << (f.defined ? "defined" : "basic") << "\n";
      }
      indent(os, d + 4);
      os << (f.total ? "total " : "") << f.name << " : " << signature(f.args, f.range) << "\n";
    }
  }
  if (!m.axioms.empty()) {
    indent(os, d + 1);
    os << "axioms\n";
    for (const auto& a : m.axioms) {
      indent(os, d + 2);
      os << print(a) << "\n";
    }
  }
}

void print_theory(std::ostringstream& os, const Theory& t, int d) {
  indent(os, d);
  if (t.replaced_by) {
    os << print_import(*t.replaced_by) << "\n";
    return;
  }
  os << "theory" << (t.name.empty() ? "" : " " + t.name) << "\n";
  for (const auto& it : t.items) {
    if (const auto* im = std::get_if<Import>(&it)) {
      indent(os, d + 1);
      os << print_import(*im) << "\n";
    } else {
      print_module(os, std::get<Module>(it), d + 1);
    }
  }
}

void print_structure(std::ostringstream& os, const Structure& s, int d) {
  indent(os, d);
  os << "structure" << (s.name.empty() ? "" : " " + s.name) << "\n";
  if (!s.consts.empty()) {
    indent(os, d + 1);
    os << "constants\n";
    for (const auto& c : s.consts) {
      indent(os, d + 2);
      os << print(c.name) << " = " << print(c.value) << "\n";
    }
  }
  if (!s.instances.empty()) {
    indent(os, d + 1);
    os << "instances\n";
    for (const auto& in : s.instances) {
      indent(os, d + 2);
      for (size_t i = 0; i < in.objects.size(); ++i) os << (i ? ", " : "") << print(in.objects[i]);
      os << " in " << in.sort;
      if (!in.where.empty()) os << " where " << join_lits(in.where);
      os << "\n";
      for (const auto& a : in.attrs) {
        indent(os, d + 3);
        os << a.name;
        if (!a.args.empty()) {
          os << "(";
          for (size_t i = 0; i < a.args.size(); ++i) os << (i ? ", " : "") << print(a.args[i]);
          os << ")";
        }
        os << " = " << print(a.value) << "\n";
      }
    }
  }
  if (!s.statics.empty()) {
    indent(os, d + 1);
    os << "values of statics\n";
    for (const auto& v : s.statics) {
      indent(os, d + 2);
      os << print(v.head);
      if (!v.body.empty()) os << " if " << join_lits(v.body);
      os << ".\n";
    }
  }
}

}  // namespace

std::string print(const Axiom& a) {
  std::string guard = "instance(" + print(a.action) + ", " + a.guard + ")";
  std::string rest = a.body.empty() ? "" : ", " + join_lits(a.body);
  switch (a.kind) {
    case AxiomKind::Causal:
      return "occurs(" + print(a.action) + ") causes " + print(*a.head) + " if " + guard + rest + ".";
    case AxiomKind::Executability:
      return "impossible occurs(" + print(a.action) + ") if " + guard + rest + ".";
    case AxiomKind::Rule:
      break;
  }
  std::string head = a.head ? print(*a.head) : "false";
  if (a.body.empty()) return head + ".";
  return head + " if " + join_lits(a.body) + ".";
}

std::string print(const Module& m) {
  std::ostringstream os;
  print_module(os, m, 0);
  return os.str();
}

std::string print(const Theory& t) {
  std::ostringstream os;
  print_theory(os, t, 0);
  return os.str();
}

std::string print(const Structure& s) {
  std::ostringstream os;
  print_structure(os, s, 0);
  return os.str();
}

std::string print(const SystemDescription& sd) {
  std::ostringstream os;
  os << "system description " << sd.name << "\n";
  print_theory(os, sd.theory, 1);
  if (sd.structure) print_structure(os, *sd.structure, 1);
  return os.str();
}

std::string print(const SourceFile& f) { return f.is_system() ? print(f.system()) : print(f.theory()); }

}  // namespace alm
