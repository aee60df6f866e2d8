#pragma once

#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace alm {

struct Span {
  std::shared_ptr<const std::string> origin;
  int line = 0;
  int col = 0;

  std::string str() const;
  // Locations never take part in structural equality.
  bool operator==(const Span&) const { return true; }
};

// Raised for lexical, syntactic and (by later stages) semantic problems that
// carry a source location.
class Diagnostic : public std::runtime_error {
 public:
  enum class Kind { Input, Semantic, Budget };

  Diagnostic(Kind kind, Span span, const std::string& msg);

  Kind kind() const { return kind_; }
  const Span& span() const { return span_; }
  const std::string& message() const { return msg_; }

 private:
  Kind kind_;
  Span span_;
  std::string msg_;
};

[[noreturn]] void fail_input(const Span& s, const std::string& msg);
[[noreturn]] void fail_semantic(const Span& s, const std::string& msg);

// ---------------------------------------------------------------- tokens

enum class Tok {
  Ident,     // lowercase-initial
  Var,       // uppercase-initial
  Int,
  Keyword,
  LParen,
  RParen,
  LBrack,
  RBrack,
  Comma,
  Dot,
  DotDot,
  Colon,
  DColon,
  Arrow,
  Times,    // × or *
  Plus,
  Minus,    // - or ¬
  Slash,
  Eq,
  Neq,
  Lt,
  Le,
  Gt,
  Ge,
  End
};

struct Token {
  Tok kind = Tok::End;
  std::string text;
  long long ival = 0;
  Span span;
};

std::vector<Token> lex(const std::string& src, const std::string& origin);

// ---------------------------------------------------------------- AST

enum class TermKind { Var, Id, Int, Func, Arith };

struct Term {
  TermKind kind = TermKind::Id;
  std::string name;  // variable / identifier / functor; arithmetic operator
  long long ival = 0;
  std::vector<Term> args;
  Span span;

  static Term var(std::string n, Span s = {});
  static Term id(std::string n, Span s = {});
  static Term integer(long long v, Span s = {});
  static Term func(std::string n, std::vector<Term> a, Span s = {});
  static Term arith(std::string op, Term l, Term r, Span s = {});

  bool is_basic() const { return kind != TermKind::Func && kind != TermKind::Arith; }
  bool ground() const;
  bool operator==(const Term&) const = default;
};

enum class Rel { None, Eq, Neq, Lt, Le, Gt, Ge };

// `lhs` alone (boolean shorthand), `-lhs`, or `lhs rel rhs`.
struct Literal {
  Term lhs;
  Rel rel = Rel::None;
  std::optional<Term> rhs;
  bool neg = false;
  Span span;
  bool operator==(const Literal&) const = default;
};

enum class AxiomKind { Causal, Rule, Executability };

struct Axiom {
  AxiomKind kind = AxiomKind::Rule;
  // Causal / Executability: occurs(action) ... instance(action, guard)
  Term action;
  std::string guard;
  std::optional<Literal> head;  // Rule: nullopt means `false`
  std::vector<Literal> body;
  Span span;
  bool operator==(const Axiom&) const = default;
};

// A sort reference: a name, or an integer range whose bounds may be symbolic.
struct SortRef {
  std::string name;  // empty for ranges
  std::optional<Term> lo, hi;
  Span span;

  bool is_range() const { return lo.has_value(); }
  std::string str() const;
  bool operator==(const SortRef&) const = default;
};

struct AttrDecl {
  std::string name;
  std::vector<SortRef> args;
  SortRef range;
  Span span;
  bool operator==(const AttrDecl&) const = default;
};

struct SortDecl {
  std::vector<std::string> sorts;
  std::vector<SortRef> parents;
  std::vector<AttrDecl> attrs;
  Span span;
  bool operator==(const SortDecl&) const = default;
};

struct ConstDecl {
  std::string name;
  std::vector<SortRef> params;  // families: top(elevations) : points
  std::vector<std::string> sorts;
  Span span;
  bool operator==(const ConstDecl&) const = default;
};

enum class FnCat { Static, Fluent };

struct FuncDecl {
  std::string name;
  FnCat cat = FnCat::Static;
  bool defined = false;
  bool total = false;
  std::vector<SortRef> args;
  SortRef range;
  Span span;
  bool operator==(const FuncDecl&) const = default;
};

struct Import {
  bool whole_theory = false;
  std::string theory;  // may be empty for `import module M from L`
  std::string module;
  std::string library;
  Span span;
  bool operator==(const Import&) const = default;
};

struct Module {
  std::string name;
  std::vector<std::string> depends;
  std::vector<SortDecl> sorts;
  std::vector<ConstDecl> consts;
  std::vector<FuncDecl> funcs;
  std::vector<Axiom> axioms;
  Span span;
  bool operator==(const Module&) const = default;
};

using TheoryItem = std::variant<Module, Import>;

struct Theory {
  std::string name;  // may be empty
  std::optional<Import> replaced_by;  // `import T from L` in place of a theory
  std::vector<TheoryItem> items;
  Span span;
  bool operator==(const Theory&) const = default;
};

struct AttrDef {
  std::string name;
  std::vector<Term> args;
  Term value;
  Span span;
  bool operator==(const AttrDef&) const = default;
};

struct InstanceDecl {
  std::vector<Term> objects;
  std::string sort;
  std::vector<Literal> where;
  std::vector<AttrDef> attrs;
  Span span;
  bool operator==(const InstanceDecl&) const = default;
};

struct ConstDef {
  Term name;
  Term value;
  Span span;
  bool operator==(const ConstDef&) const = default;
};

struct StaticDef {
  Literal head;
  std::vector<Literal> body;
  Span span;
  bool operator==(const StaticDef&) const = default;
};

struct Structure {
  std::string name;
  std::vector<ConstDef> consts;
  std::vector<InstanceDecl> instances;
  std::vector<StaticDef> statics;
  Span span;
  bool operator==(const Structure&) const = default;
};

struct SystemDescription {
  std::string name;
  Theory theory;
  std::optional<Structure> structure;
  Span span;
  bool operator==(const SystemDescription&) const = default;
};

// A parsed file: a system description or a library theory.
struct SourceFile {
  std::variant<SystemDescription, Theory> body;

  bool is_system() const { return body.index() == 0; }
  const SystemDescription& system() const { return std::get<0>(body); }
  const Theory& theory() const { return std::get<1>(body); }
  bool operator==(const SourceFile&) const = default;
};

SourceFile parse_file(const std::string& src, const std::string& origin);
SourceFile parse_path(const std::string& path);

// Parsing of free-standing fragments (histories, goals, tests).
Term parse_term(const std::string& src, const std::string& origin = "<term>");
Literal parse_literal(const std::string& src, const std::string& origin = "<literal>");
Axiom parse_axiom(const std::string& src, const std::string& origin = "<axiom>");

// ---------------------------------------------------------------- printing

std::string print(const Term& t);
std::string print(const Literal& l);
std::string print(const Axiom& a);
std::string print(const SortRef& s);
std::string print(const Module& m);
std::string print(const Theory& t);
std::string print(const Structure& s);
std::string print(const SystemDescription& sd);
std::string print(const SourceFile& f);

std::string rel_text(Rel r);

}  // namespace alm
