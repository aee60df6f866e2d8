#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "alm/ontology.hpp"
#include "alm/syntax.hpp"

namespace alm {

enum class StmtKind { CausalLaw, StateConstraint, Definition, Executability };

const char* stmt_kind_name(StmtKind k);

struct Statement {
  enum class Origin { User, Total, Standard, Hierarchy };
  StmtKind kind = StmtKind::StateConstraint;
  Origin origin = Origin::User;
  Axiom axiom;
};

// f(args) = value, every term basic (variables, objects, arithmetic).
struct FAtom {
  std::string fn;
  std::vector<Term> args;
  Term value;
};

struct BodyItem {
  enum class Kind { Pos, Not, Cmp };
  Kind kind = Kind::Pos;
  FAtom atom;         // Pos / Not
  Rel rel = Rel::Eq;  // Cmp
  Term lhs, rhs;
};

// A statement with every literal reduced to functional atoms and comparisons.
struct NRule {
  StmtKind kind = StmtKind::StateConstraint;
  std::optional<FAtom> head;  // Executability: occurs(action) = false
  std::optional<Term> action;
  std::vector<BodyItem> body;
  Span span;
  int stmt = -1;
};

struct BasicActionTheory {
  std::string name;
  Module module;  // the flattened source
  ActionSignature sig;
  std::vector<Statement> statements;
  std::vector<NRule> rules;  // normalized statements, hierarchy clauses excluded
  std::vector<std::string> warnings;
};

// Classifies and checks every axiom of `m` against `sig`; throws the first error.
std::vector<Statement> validate_statements(const Module& m, const ActionSignature& sig,
                                           std::vector<std::string>* warnings = nullptr);

std::optional<Statement> desugar_total(const Function& f);
std::vector<Statement> inject_standard_axioms(const ActionSignature& sig);
BasicActionTheory assemble_bat(const Module& flat, long long natural_bound = kDefaultNaturalBound);

NRule normalize(const Statement& s, const ActionSignature& sig);
std::string print(const NRule& r);
std::string print(const FAtom& a);

// Sorts constraining each variable; unconstrained variables get `universe`.
std::map<std::string, std::vector<std::string>> sort_of_variables(const NRule& r, const ActionSignature& sig);

// Is `t` a function term (as opposed to an object constant) under `sig`?
bool is_function_term(const Term& t, const ActionSignature& sig);

// The BAT as surface syntax (a single module).
std::string print(const BasicActionTheory& bat);

}  // namespace alm
