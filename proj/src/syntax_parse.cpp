#include <set>

#include "alm/syntax.hpp"

namespace alm {

Term Term::var(std::string n, Span s) {
  Term t;
  t.kind = TermKind::Var;
  t.name = std::move(n);
  t.span = std::move(s);
  return t;
}

Term Term::id(std::string n, Span s) {
  Term t;
  t.kind = TermKind::Id;
  t.name = std::move(n);
  t.span = std::move(s);
  return t;
}

Term Term::integer(long long v, Span s) {
  Term t;
  t.kind = TermKind::Int;
  t.ival = v;
  t.span = std::move(s);
  return t;
}

Term Term::func(std::string n, std::vector<Term> a, Span s) {
  Term t;
  t.kind = TermKind::Func;
  t.name = std::move(n);
  t.args = std::move(a);
  t.span = std::move(s);
  return t;
}

Term Term::arith(std::string op, Term l, Term r, Span s) {
  Term t;
  t.kind = TermKind::Arith;
  t.name = std::move(op);
  t.args = {std::move(l), std::move(r)};
  t.span = std::move(s);
  return t;
}

bool Term::ground() const {
  if (kind == TermKind::Var) return false;
  for (const auto& a : args)
    if (!a.ground()) return false;
  return true;
}

namespace {

// Words that cannot name user sorts, constants or functions. `object`, `on`
// and `of` only act as keywords inside their multi-word headers.
const std::set<std::string>& reserved() {
  static const std::set<std::string> r = {
      "theory", "module", "depends", "sort", "declarations", "attributes", "constants", "function",
      "statics", "fluents", "basic", "defined", "total", "axioms", "causes", "if", "impossible",
      "imposible", "structure", "instances", "in", "where", "values", "system", "description",
      "import", "from", "mod", "occurs", "instance", "false", "true", "system_description", "fluent"};
  return r;
}

class Parser {
 public:
  explicit Parser(std::vector<Token> toks) : t_(std::move(toks)) {}

  SourceFile file() {
    SourceFile f;
    if (is_word("system") || is_word("system_description")) {
      f.body = system_description();
    } else if (is_word("theory")) {
      f.body = theory();
    } else {
      error("expected `system description` or `theory`");
    }
    expect_end();
    return f;
  }

  Term whole_term() {
    Term t = term();
    expect_end();
    return t;
  }

  Literal whole_literal() {
    Literal l = literal();
    accept(Tok::Dot);
    expect_end();
    return l;
  }

  Axiom whole_axiom() {
    Axiom a = axiom();
    expect_end();
    return a;
  }

 private:
  std::vector<Token> t_;
  size_t p_ = 0;

  const Token& cur() const { return t_[p_]; }
  const Token& peek(size_t k = 1) const { return t_[std::min(p_ + k, t_.size() - 1)]; }
  bool at(Tok k) const { return cur().kind == k; }
  bool is_word(const char* w, size_t k = 0) const {
    const Token& x = peek(k);
    return x.kind == Tok::Ident && x.text == w;
  }

  [[noreturn]] void error(const std::string& msg) const {
    std::string got = cur().kind == Tok::End ? "end of input" : "'" + cur().text + "'";
    fail_input(cur().span, msg + ", found " + got);
  }

  Token take() { return t_[p_ < t_.size() - 1 ? p_++ : p_]; }

  bool accept(Tok k) {
    if (at(k)) {
      ++p_;
      return true;
    }
    return false;
  }

  bool accept_word(const char* w) {
    if (is_word(w)) {
      ++p_;
      return true;
    }
    return false;
  }

  Token expect(Tok k, const char* what) {
    if (!at(k)) error(std::string("expected ") + what);
    return take();
  }

  void expect_word(const char* w) {
    if (!accept_word(w)) error(std::string("expected `") + w + "`");
  }

  void expect_end() {
    if (at(Tok::Var)) error("names of sorts, functions and objects must start with a lowercase letter");
    if (!at(Tok::End)) error("unexpected token after the last complete declaration");
  }

  // A user-chosen name (sort, constant, function, module ...).
  std::string name(const char* what) {
    if (!at(Tok::Ident)) error(std::string("expected ") + what);
    if (reserved().count(cur().text)) error(std::string("reserved word cannot be used as ") + what);
    return take().text;
  }

  // ------------------------------------------------------------ headers

  bool at_section_start() const {
    if (at(Tok::End)) return true;
    if (cur().kind != Tok::Ident) return false;
    const std::string& w = cur().text;
    if (w == "object" && is_word("constants", 1)) return true;
    if (w == "fluent" && is_word("declarations", 1)) return true;
    static const std::set<std::string> heads = {"sort", "function", "axioms", "module", "import",
                                                "structure", "constants", "instances", "values",
                                                "theory", "system", "system_description"};
    return heads.count(w) > 0;
  }

  SystemDescription system_description() {
    SystemDescription sd;
    sd.span = cur().span;
    if (!accept_word("system_description")) {
      expect_word("system");
      expect_word("description");
    }
    sd.name = name("system description name");
    if (accept(Tok::LParen)) {
      bool neg = accept(Tok::Minus);
      Token v = expect(Tok::Int, "integer");
      expect(Tok::RParen, "`)`");
      sd.name += "(" + std::string(neg ? "-" : "") + v.text + ")";
    }
    if (is_word("import")) {
      Span s = cur().span;
      Import im = import_directive();
      if (!im.whole_theory) fail_input(s, "a system description can only import a whole theory here");
      sd.theory.replaced_by = im;
      sd.theory.span = s;
    } else if (is_word("theory")) {
      sd.theory = theory();
    } else {
      error("expected `theory` or `import`");
    }
    if (is_word("structure")) sd.structure = structure();
    return sd;
  }

  Import import_directive() {
    Import im;
    im.span = cur().span;
    expect_word("import");
    if (accept_word("module")) {
      im.module = name("module name");
    } else {
      bool theory_kw = accept_word("theory");
      std::string first = name("theory name");
      if (!theory_kw && accept(Tok::Dot)) {
        im.theory = first;
        im.module = name("module name");
      } else {
        im.whole_theory = true;
        im.theory = first;
      }
    }
    expect_word("from");
    im.library = name("library name");
    return im;
  }

  Theory theory() {
    Theory th;
    th.span = cur().span;
    expect_word("theory");
    if (at(Tok::Ident) && !is_word("module") && !is_word("import")) th.name = name("theory name");
    while (is_word("module") || is_word("import")) {
      if (is_word("import"))
        th.items.emplace_back(import_directive());
      else
        th.items.emplace_back(module());
    }
    if (th.items.empty()) error("expected `module` or `import` in theory");
    return th;
  }

  // ------------------------------------------------------------ modules

  Module module() {
    Module m;
    m.span = cur().span;
    expect_word("module");
    m.name = name("module name");
    if (accept_word("depends")) {
      expect_word("on");
      m.depends.push_back(name("module name"));
      while (accept(Tok::Comma)) m.depends.push_back(name("module name"));
    }
    for (;;) {
      if (is_word("sort") && is_word("declarations", 1)) {
        p_ += 2;
        sort_decls(m);
      } else if (is_word("object") && is_word("constants", 1)) {
        p_ += 2;
        const_decls(m);
      } else if (is_word("function") && is_word("declarations", 1)) {
        p_ += 2;
        func_blocks(m, false);
      } else if (is_word("fluent") && is_word("declarations", 1)) {
        p_ += 2;
        func_blocks(m, true);
      } else if (accept_word("axioms")) {
        while (!at_section_start()) m.axioms.push_back(axiom());
      } else {
        break;
      }
    }
    return m;
  }

  SortRef sort_ref() {
    SortRef s;
    s.span = cur().span;
    if (accept(Tok::LBrack)) {
      s.lo = bound();
      expect(Tok::DotDot, "`..`");
      s.hi = bound();
      expect(Tok::RBrack, "`]`");
      return s;
    }
    if (!at(Tok::Ident)) error("expected sort name");
    s.name = take().text;
    return s;
  }

  Term bound() {
    Span s = cur().span;
    if (accept(Tok::Minus)) return Term::integer(-expect(Tok::Int, "integer").ival, s);
    if (at(Tok::Int)) return Term::integer(take().ival, s);
    if (at(Tok::Ident)) return Term::id(take().text, s);
    error("expected range bound");
  }

  void sort_decls(Module& m) {
    while (at(Tok::Ident) && !at_section_start()) {
      SortDecl d;
      d.span = cur().span;
      d.sorts.push_back(name("sort name"));
      while (accept(Tok::Comma)) d.sorts.push_back(name("sort name"));
      expect(Tok::DColon, "`::`");
      d.parents.push_back(sort_ref());
      while (accept(Tok::Comma)) d.parents.push_back(sort_ref());
      if (accept_word("attributes")) {
        while (at(Tok::Ident) && peek().kind == Tok::Colon) d.attrs.push_back(attr_decl());
        if (d.attrs.empty()) error("expected attribute declaration");
      }
      m.sorts.push_back(std::move(d));
    }
  }

  AttrDecl attr_decl() {
    AttrDecl a;
    a.span = cur().span;
    a.name = name("attribute name");
    expect(Tok::Colon, "`:`");
    signature(a.args, a.range);
    return a;
  }

  // `s1 × ... × sn -> s` or a bare range sort.
  void signature(std::vector<SortRef>& args, SortRef& range) {
    SortRef first = sort_ref();
    if (at(Tok::Times) || at(Tok::Arrow)) {
      args.push_back(first);
      while (accept(Tok::Times)) args.push_back(sort_ref());
      expect(Tok::Arrow, "`->`");
      range = sort_ref();
    } else {
      range = first;
    }
  }

  void const_decls(Module& m) {
    while (at(Tok::Ident) && !at_section_start()) {
      ConstDecl c;
      c.span = cur().span;
      c.name = name("constant name");
      if (accept(Tok::LParen)) {
        c.params.push_back(sort_ref());
        while (accept(Tok::Comma)) c.params.push_back(sort_ref());
        expect(Tok::RParen, "`)`");
      }
      expect(Tok::Colon, "`:`");
      c.sorts.push_back(name("sort name"));
      while (accept(Tok::Comma)) c.sorts.push_back(name("sort name"));
      m.consts.push_back(std::move(c));
    }
  }

  void func_blocks(Module& m, bool fluents_only) {
    for (;;) {
      FnCat cat;
      if (fluents_only) {
        cat = FnCat::Fluent;
      } else if (accept_word("statics")) {
        cat = FnCat::Static;
      } else if (accept_word("fluents")) {
        cat = FnCat::Fluent;
      } else {
        return;
      }
      bool any = false;
      for (;;) {
        bool defined;
        if (accept_word("basic")) {
          defined = false;
        } else if (accept_word("defined")) {
          defined = true;
        } else {
          break;
        }
        any = true;
        while ((at(Tok::Ident) && (peek().kind == Tok::Colon || is_word("total"))) && !is_word("basic") &&
               !is_word("defined")) {
          FuncDecl f;
          f.span = cur().span;
          f.cat = cat;
          f.defined = defined;
          f.total = accept_word("total");
          f.name = name("function name");
          expect(Tok::Colon, "`:`");
          signature(f.args, f.range);
          m.funcs.push_back(std::move(f));
        }
      }
      if (!any) error("expected `basic` or `defined`");
      if (fluents_only) return;
    }
  }

  // ------------------------------------------------------------ axioms

  std::string action_var(Term& out) {
    Span s = cur().span;
    if (!is_word("occurs")) error("expected `occurs`");
    take();
    expect(Tok::LParen, "`(`");
    out = term();
    expect(Tok::RParen, "`)`");
    if (out.kind != TermKind::Var) fail_input(s, "the action in `occurs(...)` must be a variable");
    return out.name;
  }

  void guard(Axiom& a) {
    expect_word("if");
    Span s = cur().span;
    Literal g = literal();
    if (g.neg || g.rel != Rel::None || g.lhs.kind != TermKind::Func || g.lhs.name != "instance" ||
        g.lhs.args.size() != 2 || !(g.lhs.args[0] == a.action) || g.lhs.args[1].kind != TermKind::Id)
      fail_input(s, "body must start with instance(" + a.action.name + ", <sort>)");
    a.guard = g.lhs.args[1].name;
    while (accept(Tok::Comma)) a.body.push_back(literal());
  }

  Axiom axiom() {
    Axiom a;
    a.span = cur().span;
    if (is_word("impossible") || is_word("imposible")) {
      take();
      a.kind = AxiomKind::Executability;
      action_var(a.action);
      guard(a);
    } else if (is_word("occurs") && peek().kind == Tok::LParen) {
      a.kind = AxiomKind::Causal;
      action_var(a.action);
      expect_word("causes");
      a.head = literal();
      guard(a);
    } else if (is_word("false") && is_word("if", 1)) {
      take();
      a.kind = AxiomKind::Rule;
      body(a.body);
    } else {
      a.kind = AxiomKind::Rule;
      a.head = literal();
      if (is_word("if")) body(a.body);
    }
    expect(Tok::Dot, "`.`");
    return a;
  }

  void body(std::vector<Literal>& out) {
    expect_word("if");
    out.push_back(literal());
    while (accept(Tok::Comma)) out.push_back(literal());
  }

  Literal literal() {
    Literal l;
    l.span = cur().span;
    if (at(Tok::Minus) && peek().kind == Tok::Ident) {
      take();
      l.neg = true;
      l.lhs = term();
      if (l.lhs.kind != TermKind::Func && l.lhs.kind != TermKind::Id)
        fail_input(l.span, "only function terms can be negated");
      return l;
    }
    l.lhs = term();
    Rel r = Rel::None;
    switch (cur().kind) {
      case Tok::Eq: r = Rel::Eq; break;
      case Tok::Neq: r = Rel::Neq; break;
      case Tok::Lt: r = Rel::Lt; break;
      case Tok::Le: r = Rel::Le; break;
      case Tok::Gt: r = Rel::Gt; break;
      case Tok::Ge: r = Rel::Ge; break;
      default: break;
    }
    if (r != Rel::None) {
      take();
      l.rel = r;
      l.rhs = term();
    } else if (l.lhs.kind != TermKind::Func && l.lhs.kind != TermKind::Id) {
      fail_input(l.span, "expected a relation after term");
    }
    return l;
  }

  Term primary() {
    Span s = cur().span;
    if (at(Tok::Var)) return Term::var(take().text, s);
    if (at(Tok::Int)) return Term::integer(take().ival, s);
    if (at(Tok::Minus) && peek().kind == Tok::Int) {
      take();
      return Term::integer(-take().ival, s);
    }
    if (at(Tok::Ident)) {
      std::string n = take().text;
      if (n == "if" || n == "causes" || n == "where" || n == "in") fail_input(s, "expected term, found '" + n + "'");
      if (accept(Tok::LParen)) {
        std::vector<Term> args;
        args.push_back(term());
        while (accept(Tok::Comma)) args.push_back(term());
        expect(Tok::RParen, "`)` or `,`");
        return Term::func(n, std::move(args), s);
      }
      return Term::id(n, s);
    }
    error("expected term");
  }

  Term term() {
    Span s = cur().span;
    Term l = primary();
    std::string op;
    switch (cur().kind) {
      case Tok::Plus: op = "+"; break;
      case Tok::Minus: op = "-"; break;
      case Tok::Times: op = "*"; break;
      case Tok::Slash: op = "/"; break;
      default:
        if (is_word("mod")) op = "mod";
        break;
    }
    if (op.empty()) return l;
    take();
    Term r = primary();
    if (l.kind == TermKind::Func || r.kind == TermKind::Func)
      fail_input(s, "arithmetic operands must be basic terms");
    return Term::arith(op, std::move(l), std::move(r), s);
  }

  // ------------------------------------------------------------ structures

  Structure structure() {
    Structure st;
    st.span = cur().span;
    expect_word("structure");
    if (at(Tok::Var))
      st.name = take().text;
    else if (at(Tok::Ident) && !at_section_start())
      st.name = name("structure name");
    for (;;) {
      if (accept_word("constants") || (is_word("object") && is_word("constants", 1) && (p_ += 2))) {
        while (!at_section_start()) {
          ConstDef c;
          c.span = cur().span;
          c.name = term();
          if (c.name.kind != TermKind::Id && c.name.kind != TermKind::Func)
            fail_input(c.span, "expected constant name");
          expect(Tok::Eq, "`=`");
          c.value = term();
          st.consts.push_back(std::move(c));
        }
      } else if (accept_word("instances")) {
        while (!at_section_start()) st.instances.push_back(instance_decl());
      } else if (accept_word("values")) {
        expect_word("of");
        expect_word("statics");
        while (!at_section_start()) {
          StaticDef d;
          d.span = cur().span;
          d.head = literal();
          if (is_word("if")) body(d.body);
          expect(Tok::Dot, "`.`");
          st.statics.push_back(std::move(d));
        }
      } else {
        break;
      }
    }
    return st;
  }

  InstanceDecl instance_decl() {
    InstanceDecl d;
    d.span = cur().span;
    d.objects.push_back(object_name());
    while (accept(Tok::Comma)) d.objects.push_back(object_name());
    expect_word("in");
    d.sort = name("sort name");
    if (accept_word("where")) {
      d.where.push_back(literal());
      while (accept(Tok::Comma)) d.where.push_back(literal());
    }
    // attribute definitions run until the next `obj in` / `obj, obj in` entry
    while (at(Tok::Ident) && !at_section_start() && !starts_instance()) {
      AttrDef a;
      a.span = cur().span;
      Term lhs = term();
      if (lhs.kind == TermKind::Func) {
        a.name = lhs.name;
        a.args = lhs.args;
      } else if (lhs.kind == TermKind::Id) {
        a.name = lhs.name;
      } else {
        fail_input(a.span, "expected attribute name");
      }
      expect(Tok::Eq, "`=` in attribute definition");
      a.value = term();
      d.attrs.push_back(std::move(a));
    }
    return d;
  }

  // Looks ahead past a term: is the next thing `in` or `,`?
  bool starts_instance() const {
    size_t k = 0;
    if (peek(k).kind != Tok::Ident) return false;
    ++k;
    if (peek(k).kind == Tok::LParen) {
      int depth = 0;
      for (;; ++k) {
        Tok kk = peek(k).kind;
        if (kk == Tok::End) return false;
        if (kk == Tok::LParen) ++depth;
        if (kk == Tok::RParen && --depth == 0) {
          ++k;
          break;
        }
      }
    }
    return is_word("in", k) || peek(k).kind == Tok::Comma;
  }

  Term object_name() {
    Span s = cur().span;
    Term t = term();
    if (t.kind != TermKind::Id && t.kind != TermKind::Func) fail_input(s, "expected object name");
    if (t.kind == TermKind::Id && reserved().count(t.name)) fail_input(s, "reserved word cannot name an object");
    return t;
  }
};

}  // namespace

SourceFile parse_file(const std::string& src, const std::string& origin) {
  Parser p(lex(src, origin));
  return p.file();
}

Term parse_term(const std::string& src, const std::string& origin) {
  Parser p(lex(src, origin));
  return p.whole_term();
}

Literal parse_literal(const std::string& src, const std::string& origin) {
  Parser p(lex(src, origin));
  return p.whole_literal();
}

Axiom parse_axiom(const std::string& src, const std::string& origin) {
  Parser p(lex(src, origin));
  return p.whole_axiom();
}

}  // namespace alm
