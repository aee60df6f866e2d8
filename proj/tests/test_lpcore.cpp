#include <algorithm>
#include <random>
#include <set>

#include "alm/lpcore.hpp"
#include "alm/syntax.hpp"
#include "doctest.h"
#include "oracles.hpp"

using namespace alm;
using namespace oracle;

TEST_CASE("solver agrees with the reference semantics on random programs") {
  std::mt19937 rng(20240611);
  for (int i = 0; i < 500; ++i) {
    GroundProgram p = random_program(rng, 12, false);
    CAPTURE(i);
    CAPTURE(export_text(p));
    std::set<AnswerSet> expected = reference_all(p);
    auto got = library_all(p);
    CHECK(got == expected);
    Budget b;
    CHECK(solve_all(p, {}, b).size() == got.size());  // no duplicates
  }
}

TEST_CASE("CR minimisation agrees with filtering all answer sets") {
  std::mt19937 rng(77);
  for (int i = 0; i < 200; ++i) {
    GroundProgram p = random_program(rng, 9, true);
    CAPTURE(i);
    CAPTURE(export_text(p));
    std::set<AnswerSet> card = reference_cr(p, CrMinimality::Cardinality);
    std::set<AnswerSet> subset = reference_cr(p, CrMinimality::Subset);
    Budget b1, b2;
    std::set<AnswerSet> got_card, got_subset;
    auto rs = solve_cr(p, CrMinimality::Cardinality, b1);
    CHECK(cr_invariants(p, rs));
    for (const auto& r : rs) got_card.insert(r.answer);
    for (const auto& r : solve_cr(p, CrMinimality::Subset, b2)) got_subset.insert(r.answer);
    CHECK(got_card == card);
    CHECK(got_subset == subset);
  }
}

TEST_CASE("library checker matches the reference on enumerated candidates") {
  std::mt19937 rng(5);
  for (int i = 0; i < 100; ++i) {
    GroundProgram p = random_program(rng, 8, i % 2 == 1);
    std::set<AnswerSet> bf;
    for (const auto& s : brute_force_answer_sets(p)) bf.insert(s);
    CHECK(bf == reference_all(p));
  }
}

TEST_CASE("classic programs") {
  SUBCASE("even loop has two answer sets") {
    GroundProgram p;
    int a = p.atom("a"), b = p.atom("b");
    p.add_rule(a, {}, {b});
    p.add_rule(b, {}, {a});
    CHECK(library_all(p) == std::set<AnswerSet>{{a}, {b}});
  }
  SUBCASE("odd loop has none") {
    GroundProgram p;
    int a = p.atom("a");
    p.add_rule(a, {}, {a});
    CHECK(library_all(p).empty());
  }
  SUBCASE("positive loop is unfounded") {
    GroundProgram p;
    int a = p.atom("a"), b = p.atom("b");
    p.add_rule(a, {b});
    p.add_rule(b, {a});
    CHECK(library_all(p) == std::set<AnswerSet>{{}});
  }
  SUBCASE("groups forbid two values") {
    GroundProgram p;
    int a = p.atom("f=1"), b = p.atom("f=2");
    p.add_fact(a);
    p.add_fact(b);
    p.add_group({a, b});
    CHECK(library_all(p).empty());
  }
  SUBCASE("assumptions and limits") {
    GroundProgram p;
    int a = p.atom("a"), b = p.atom("b");
    p.add_rule(a, {}, {b});
    p.add_rule(b, {}, {a});
    Budget bud;
    SolveOptions o;
    o.assume_true = {b};
    CHECK(solve_all(p, o, bud) == std::vector<AnswerSet>{{b}});
    SolveOptions l;
    l.limit = 1;
    CHECK(solve_all(p, l, bud).size() == 1);
  }
  SUBCASE("CR rule restores consistency") {
    GroundProgram p;
    int a = p.atom("a"), b = p.atom("b");
    p.add_constraint({}, {a});
    p.add_cr(a, {}, {b}, "a <+ not b");
    Budget bud;
    auto r = solve_cr(p, CrMinimality::Cardinality, bud);
    REQUIRE(r.size() == 1);
    CHECK(r[0].applied.size() == 1);
    CHECK(export_text(p).find("#minimize") != std::string::npos);
  }
}

TEST_CASE("node budget is enforced") {
  GroundProgram p;
  for (int i = 0; i < 14; ++i) {
    int a = p.atom("a" + std::to_string(i)), b = p.atom("b" + std::to_string(i));
    p.add_rule(a, {}, {b});
    p.add_rule(b, {}, {a});
  }
  Budget b;
  b.max_nodes = 50;
  try {
    solve_all(p, {}, b);
    FAIL("expected a budget error");
  } catch (const Diagnostic& d) {
    CHECK(d.kind() == Diagnostic::Kind::Budget);
  }
}
