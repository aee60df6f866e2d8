#pragma once

#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

#include "alm/bat.hpp"
#include "alm/lpcore.hpp"

namespace alm {

// Interned ground terms: objects, sort names, booleans and integers.
class Symbols {
 public:
  int intern(const Term& t);
  int find(const Term& t) const;
  int integer(long long v) { return intern(Term::integer(v)); }
  int truth(bool b) { return intern(Term::id(b ? "true" : "false")); }
  int truth(bool b) const { return find(Term::id(b ? "true" : "false")); }
  const Term& term(int id) const { return terms_[id]; }
  const std::string& str(int id) const { return strs_[id]; }
  bool is_int(int id) const { return terms_[id].kind == TermKind::Int; }
  long long ival(int id) const { return terms_[id].ival; }
  size_t size() const { return terms_.size(); }

 private:
  std::vector<Term> terms_;
  std::vector<std::string> strs_;
  std::unordered_map<std::string, int> index_;
};

// Compact text of a ground term: f(a,b).
std::string compact(const Term& t);

// A static interpretation: universe, sort extents, placements, constants and
// the values of attributes and statics.
struct PreModel {
  std::shared_ptr<Symbols> syms;
  const ActionSignature* sig = nullptr;
  std::map<std::string, std::vector<int>> extents;  // sorted ids; includes "universe" and "nodes"
  std::map<int, std::set<std::string>> is_a;        // object -> source sorts
  std::map<std::string, int> denote;                // object constants renamed by the structure
  std::map<std::string, std::map<std::vector<int>, int>> values;  // static/attribute tables
  std::string label;                                // placement summary

  const std::vector<int>& extent(const std::string& sort) const;
  bool member(const std::string& sort, int id) const;
  // Value of a static function (including specials and dom_f); -1 if undefined.
  int eval_static(const std::string& fn, const std::vector<int>& args) const;
  // Lines `link(c1,c2).` and `is_a(o,c).`, sorted.
  std::vector<std::string> hierarchy_dump() const;
  std::vector<std::string> statics_dump() const;
};

using Binding = std::map<std::string, int>;

struct GroundContext {
  const ActionSignature& sig;
  const PreModel& m;
  std::function<bool(const Function&)> evaluable;
};

// Evaluates a basic term; -1 when it does not denote an element.
int eval_term(const Term& t, const Binding& b, const PreModel& m);

// Comparison of two elements; order relations hold only between integers.
bool compare(Rel rel, int a, int b, const Symbols& s);

// Enumerates the properly typed instances of a rule whose evaluable literals hold.
void ground_rule(const NRule& r, const GroundContext& ctx, const std::function<void(const Binding&)>& emit);

// A functional atom f(args[,step]) = value; `fn` is empty for auxiliary atoms.
struct AtomKey {
  std::string fn;
  std::vector<int> args;
  int value = -1;
  int step = -1;
};

// Builds a ground program over functional atoms with at-most-one groups.
class ProgramBuilder {
 public:
  explicit ProgramBuilder(const PreModel& m) : m_(m) {}

  GroundProgram prog;
  std::vector<AtomKey> keys;  // indexed by atom id

  int fatom(const std::string& fn, const std::vector<int>& args, int value, int step = -1);
  int aux(const std::string& name);
  // Evaluates the atom's terms under `b`; -1 if some term denotes nothing.
  int atom_of(const FAtom& a, const Binding& b, int step);
  // Adds the ground instances of `r`. `step_of(atom, is_head)` gives each atom's step (-1: untimed).
  size_t add_rules(const NRule& r, const GroundContext& ctx,
                   const std::function<int(const FAtom&, bool)>& step_of);
  void finish();  // emits the at-most-one groups
  const PreModel& model() const { return m_; }
  std::string atom_text(const AtomKey& k) const;

 private:
  const PreModel& m_;
  std::map<std::string, std::vector<int>> groups_;
};

// Is every function in the rule static?
bool static_rule(const NRule& r, const ActionSignature& sig);

}  // namespace alm
