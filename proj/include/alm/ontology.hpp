#pragma once

#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "alm/syntax.hpp"

namespace alm {

// Bound used for the predefined natural-number sorts.
inline constexpr long long kDefaultNaturalBound = 16;

enum class FnKind { Attribute, BasicStatic, DefinedStatic, BasicFluent, DefinedFluent, Special, Occurs };

const char* kind_name(FnKind k);

struct Function {
  std::string name;
  FnKind kind = FnKind::BasicStatic;
  bool total = false;
  std::vector<std::string> args;  // sort names; ranges use their canonical text
  std::string range;
  std::string owner;   // attributes: the sort that declares it
  std::string dom_of;  // dom_f: the name of f
  Span span;

  size_t arity() const { return args.size(); }
  bool fluent() const { return kind == FnKind::BasicFluent || kind == FnKind::DefinedFluent; }
  bool defined() const {
    return kind == FnKind::DefinedStatic || kind == FnKind::DefinedFluent || kind == FnKind::Special;
  }
  bool basic_fluent() const { return kind == FnKind::BasicFluent; }
  // Everything that is fixed by a pre-model.
  bool is_static() const { return !fluent() && kind != FnKind::Occurs; }
  bool hierarchy() const { return kind == FnKind::Special && dom_of.empty(); }
  bool is_dom() const { return !dom_of.empty(); }
};

// Integer range sort; `hi_attr` names a 0-ary attribute for symbolic bounds.
struct RangeSort {
  std::string name;
  long long lo = 0, hi = 0;
  std::string hi_attr;
};

class Hierarchy {
 public:
  void add_sort(const std::string& s) { sorts_.insert(s); }
  void add_link(const std::string& child, const std::string& parent);
  bool has_sort(const std::string& s) const { return sorts_.count(s) > 0; }

  const std::set<std::string>& sorts() const { return sorts_; }
  const std::set<std::pair<std::string, std::string>>& links() const { return links_; }

  // Builds the closure tables; throws on cycles or a second sink.
  void close(const Span& where);

  std::vector<std::string> parents(const std::string& c) const;
  std::vector<std::string> children(const std::string& c) const;
  bool link(const std::string& a, const std::string& b) const { return links_.count({a, b}) > 0; }
  bool subsort(const std::string& a, const std::string& b) const;  // irreflexive
  bool below_or_equal(const std::string& a, const std::string& b) const { return a == b || subsort(a, b); }
  bool source(const std::string& c) const { return has_sort(c) && children(c).empty(); }
  bool sink(const std::string& c) const { return has_sort(c) && parents(c).empty(); }
  std::vector<std::string> sources_below(const std::string& c) const;
  std::vector<std::string> topological() const;

 private:
  std::set<std::string> sorts_;
  std::set<std::pair<std::string, std::string>> links_;
  std::map<std::string, std::set<std::string>> up_;  // strict ancestors
};

struct ActionSignature {
  Hierarchy hierarchy;
  std::map<std::string, Function> functions;
  std::vector<std::string> order;  // declaration order, specials last
  std::vector<ConstDecl> constants;
  std::map<std::string, RangeSort> ranges;
  long long natural_bound = kDefaultNaturalBound;

  const Function* find(const std::string& name) const;
  const Function& fn(const std::string& name) const;
  bool known_sort(const std::string& s) const { return hierarchy.has_sort(s) || ranges.count(s); }
  bool action_sort(const std::string& s) const { return hierarchy.below_or_equal(s, "actions"); }
  bool constant_family(const std::string& name) const;
  std::vector<const Function*> user_functions() const;
};

std::string range_name(const SortRef& r);

// Builds the signature of a unimodule theory.
ActionSignature build_signature(const Module& flat, long long natural_bound = kDefaultNaturalBound);

// Sorted `link(c1,c2).` lines for sort-to-sort links.
std::vector<std::string> hierarchy_facts(const Hierarchy& h);

}  // namespace alm
