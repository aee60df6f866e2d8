#include "alm/syntax.hpp"
#include "corpus.hpp"
#include "doctest.h"

using namespace alm;

namespace {

const char* kCorpus[] = {"travel.alm",        "motion.alm",         "flat_motion.alm",
                         "professors.alm",    "t0.alm",             "n_w_f.alm",
                         "monkey.alm",        "cell_cycle_1.alm",   "cell_cycle_2.alm",
                         "lib/commonsense_library.alm", "lib/commonsense_lib.alm",
                         "lib/cell_cycle_lib.alm"};

}  // namespace

TEST_CASE("corpus files parse and print back to the same tree") {
  for (const char* f : kCorpus) {
    CAPTURE(f);
    SourceFile a = parse_file(read_corpus(f), f);
    std::string text = print(a);
    SourceFile b = parse_file(text, "printed");
    CHECK(a == b);
    CHECK(print(b) == text);
  }
}

TEST_CASE("literal forms") {
  Literal l = parse_literal("-connected(O, D)");
  CHECK(l.neg);
  CHECK(l.lhs.name == "connected");
  l = parse_literal("loc_in(A) \xE2\x89\xA0 origin(X)");
  CHECK(l.rel == Rel::Neq);
  CHECK(l.rhs->kind == TermKind::Func);
  l = parse_literal("N1 * 2 = N2");
  CHECK(l.lhs.kind == TermKind::Arith);
  CHECK(l.lhs.name == "*");
  l = parse_literal("X = -3");
  CHECK(l.rhs->ival == -3);
  CHECK(print(parse_literal("\xC2\xAC holding(A, C)")) == "-holding(A, C)");
}

TEST_CASE("axiom kinds") {
  Axiom a = parse_axiom("occurs(X) causes loc_in(A) = D if instance(X, move), actor(X) = A, dest(X) = D.");
  CHECK(a.kind == AxiomKind::Causal);
  CHECK(a.guard == "move");
  CHECK(a.body.size() == 2);
  a = parse_axiom("imposible occurs(X) if instance(X, move), is_held(A).");
  CHECK(a.kind == AxiomKind::Executability);
  a = parse_axiom("false if -dom_g(X), instance(X, c2).");
  CHECK(!a.head);
  a = parse_axiom("num(P, P) = 0.");
  CHECK(a.head);
  CHECK(a.body.empty());
}

TEST_CASE("structure details survive parsing") {
  SourceFile f = parse_file(read_corpus("monkey.alm"), "monkey.alm");
  const auto& st = *f.system().structure;
  CHECK(st.instances.size() == 8);
  CHECK(st.instances[3].objects[0].name == "move");
  CHECK(st.instances[3].where.size() == 1);
  CHECK(st.instances[3].attrs.size() == 2);
  CHECK(st.statics.size() == 3);
  CHECK(st.statics[2].head.neg);
  SourceFile c = parse_file(read_corpus("cell_cycle_2.alm"), "cc2");
  CHECK(c.system().name == "cell_cycle(2)");
  CHECK(c.system().theory.name.empty());
  CHECK(c.system().structure->instances[3].attrs[1].args.size() == 1);
}

TEST_CASE("errors carry locations") {
  try {
    parse_file("theory t\n  module m\n    axioms\n      f(X) if .\n", "bad.alm");
    FAIL("expected an error");
  } catch (const Diagnostic& d) {
    CHECK(d.span().line == 4);
    CHECK(d.span().col == 15);
    CHECK(d.kind() == Diagnostic::Kind::Input);
  }
}
