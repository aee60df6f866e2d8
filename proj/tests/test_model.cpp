#include <set>

#include "alm/bat.hpp"
#include "alm/modular.hpp"
#include "alm/ontology.hpp"
#include "corpus.hpp"
#include "doctest.h"

using namespace alm;

namespace {

Module flat_of(const std::string& rel) {
  SourceFile f = parse_file(read_corpus(rel), rel);
  const Theory& t = f.is_system() ? f.system().theory : f.theory();
  return flatten(resolve_imports(t, {corpus_path("lib"), corpus_path("")}));
}

Module module_of(const std::string& text) {
  SourceFile f = parse_file(text, "<test>");
  return flatten(resolve_imports(f.theory(), {}));
}

template <class F>
Diagnostic::Kind error_kind(F&& f) {
  try {
    f();
  } catch (const Diagnostic& d) {
    return d.kind();
  }
  FAIL("no diagnostic");
  return Diagnostic::Kind::Input;
}

std::set<std::string> fn_names(const ActionSignature& s) {
  std::set<std::string> out;
  for (const auto& [n, f] : s.functions) out.insert(n + ":" + kind_name(f.kind));
  return out;
}

}  // namespace

TEST_CASE("hierarchy closure and queries") {
  Hierarchy h;
  for (const char* s : {"universe", "things", "agents", "points"}) h.add_sort(s);
  h.add_link("things", "universe");
  h.add_link("agents", "things");
  h.add_link("points", "universe");
  h.close({});
  CHECK(h.subsort("agents", "universe"));
  CHECK_FALSE(h.subsort("agents", "agents"));
  CHECK(h.below_or_equal("agents", "agents"));
  CHECK(h.source("agents"));
  CHECK(h.sink("universe"));
  CHECK(h.sources_below("universe") == std::vector<std::string>{"agents", "points"});
  auto topo = h.topological();
  CHECK(std::find(topo.begin(), topo.end(), "universe") < std::find(topo.begin(), topo.end(), "agents"));
}

TEST_CASE("hierarchy cycles are rejected") {
  Hierarchy h;
  for (const char* s : {"universe", "a", "b"}) h.add_sort(s);
  h.add_link("a", "universe");
  h.add_link("a", "b");
  h.add_link("b", "a");
  CHECK(error_kind([&] { h.close({}); }) == Diagnostic::Kind::Semantic);
}

TEST_CASE("signature of the motion theory") {
  ActionSignature s = build_signature(flat_of("motion.alm"));
  CHECK(s.fn("loc_in").kind == FnKind::BasicFluent);
  CHECK(s.fn("loc_in").total);
  CHECK(s.fn("actor").kind == FnKind::Attribute);
  CHECK(s.fn("actor").owner == "move");
  CHECK(s.fn("dom_loc_in").is_dom());
  CHECK(s.fn("instance").hierarchy());
  CHECK(s.action_sort("carry"));
  CHECK_FALSE(s.action_sort("things"));
}

TEST_CASE("flattening the two-module theory matches the single-module one") {
  ActionSignature a = build_signature(flat_of("motion.alm"));
  ActionSignature b = build_signature(flat_of("flat_motion.alm"));
  CHECK(fn_names(a) == fn_names(b));
  CHECK(a.hierarchy.links() == b.hierarchy.links());
  BasicActionTheory ba = assemble_bat(flat_of("motion.alm"));
  BasicActionTheory bb = assemble_bat(flat_of("flat_motion.alm"));
  CHECK(ba.statements.size() == bb.statements.size());
}

TEST_CASE("flattening is idempotent") {
  Module m = flat_of("motion.alm");
  Theory t;
  t.name = "again";
  t.items.push_back(m);
  Module again = flatten(t);
  again.name = m.name;
  CHECK(print(again) == print(m));
}

TEST_CASE("statement classification") {
  BasicActionTheory bat = assemble_bat(flat_of("motion.alm"));
  std::map<StmtKind, int> user;
  for (const auto& s : bat.statements)
    if (s.origin == Statement::Origin::User) ++user[s.kind];
  CHECK(user[StmtKind::CausalLaw] >= 1);
  CHECK(user[StmtKind::Executability] >= 1);
  CHECK(user[StmtKind::StateConstraint] + user[StmtKind::Definition] >= 1);
  // total loc_in: an axiom forcing it to be defined
  bool total = false;
  for (const auto& s : bat.statements) total |= s.origin == Statement::Origin::Total;
  CHECK(total);
  // every normalized rule prints and keeps its kind
  for (const auto& r : bat.rules) CHECK_FALSE(print(r).empty());
}

TEST_CASE("invalid statements are located") {
  const char* head = "theory t\n  module m\n    sort declarations\n      c :: universe\n"
                     "    function declarations\n      fluents\n        basic\n          f : c -> booleans\n"
                     "      statics\n        basic\n          s : c -> booleans\n    axioms\n";
  // a static may not be the head of a causal law
  std::string src = std::string(head) + "      occurs(A) causes s(X) if instance(A, actions).\n";
  try {
    assemble_bat(module_of(src));
    FAIL("expected an error");
  } catch (const Diagnostic& d) {
    CHECK(d.kind() == Diagnostic::Kind::Semantic);
    CHECK(d.span().line == 13);
  }
  // unknown function
  src = std::string(head) + "      false if nope(X).\n";
  CHECK(error_kind([&] { assemble_bat(module_of(src)); }) == Diagnostic::Kind::Semantic);
}

TEST_CASE("coherence violations") {
  SUBCASE("conflicting declarations") {
    std::string src = "theory t\n  module a\n    sort declarations\n      c :: universe\n"
                      "    function declarations\n      fluents\n        basic\n          f : c -> booleans\n"
                      "  module b\n    depends on a\n    function declarations\n      fluents\n        basic\n"
                      "          f : c -> c\n";
    SourceFile f = parse_file(src, "<t>");
    CHECK(error_kind([&] { check_coherence(resolve_imports(f.theory(), {})); }) == Diagnostic::Kind::Semantic);
  }
  SUBCASE("dependency on an unknown module") {
    std::string src = "theory t\n  module a\n    depends on zzz\n    sort declarations\n      c :: universe\n";
    SourceFile f = parse_file(src, "<t>");
    CHECK(error_kind([&] { check_coherence(resolve_imports(f.theory(), {})); }) == Diagnostic::Kind::Semantic);
  }
  SUBCASE("missing library") {
    std::string src = "theory t\n  import motion from nowhere\n";
    SourceFile f = parse_file(src, "<t>");
    CHECK(error_kind([&] { resolve_imports(f.theory(), {corpus_path("lib")}); }) == Diagnostic::Kind::Input);
  }
}

TEST_CASE("library search path") {
  setenv("ALM_LIBRARY_PATH", "/x:/y", 1);
  auto p = library_search_path({"/a"});
  CHECK(p == std::vector<std::string>{"/a", "/x", "/y"});
  unsetenv("ALM_LIBRARY_PATH");
  CHECK(library_search_path({}).empty());
}

TEST_CASE("module import pulls in its dependencies") {
  System s = load_system_file(corpus_path("cell_cycle_2.alm"), LoadOptions{{corpus_path("lib")}});
  CHECK(s.bat.sig.find("component") != nullptr);
  CHECK(s.bat.sig.find("num") != nullptr);
}

TEST_CASE("pre-models of the travel and monkey structures") {
  for (const char* f : {"travel.alm", "monkey.alm", "cell_cycle_2.alm"}) {
    CAPTURE(f);
    System s = load_system_file(corpus_path(f), LoadOptions{{corpus_path("lib")}});
    Budget b;
    PreModelSet p = enumerate_premodels(s.bat, s.structure, b);
    CHECK(p.models.size() == 1);
    const PreModel& m = p.models[0];
    CHECK(!m.extent("actions").empty());
    for (int a : m.extent("actions")) CHECK(m.member("universe", a));
  }
}

TEST_CASE("instance schemas expand over the structure") {
  System s = load_system_file(corpus_path("monkey.alm"), LoadOptions{{corpus_path("lib")}});
  StructureSpec spec = expand_instance_schemas(s.structure, s.bat.sig);
  std::set<std::string> names;
  for (const auto& o : spec.objects) names.insert(print(o.name));
  CHECK(names.count("move(initial_box)"));
  CHECK(names.count("climb(box)"));
}
