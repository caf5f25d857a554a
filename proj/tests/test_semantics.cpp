#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <fstream>
#include <random>
#include <set>
#include <sstream>
#include <string>

#include "bprepair/parser.h"
#include "bprepair/semantics.h"
#include "doctest.h"
#include "progen.h"
#include "refexec.h"

using namespace bp;

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  REQUIRE(in.good());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Program parse_ok(const std::string& text) {
  ParseResult r = parse_program(text);
  REQUIRE_MESSAGE(r.program.has_value(), r.diags.format_all());
  return *r.program;
}

TransitionGraph graph_ok(const Program& p) {
  DiagnosticSink sink;
  auto g = build_graph(p, sink);
  REQUIRE_MESSAGE(g.has_value(), sink.format_all());
  return *g;
}

const std::string kRepairedFig1 =
    "decl b0, b1, b2;\n"
    "main()\n"
    "begin\n"
    "  l1: if (b0 | b1 | !b2) goto l2 else goto l5;\n"
    "  l2: if (b0 | b1 | b2) goto l3 else goto l0;\n"
    "  l3: b0, b1, b2 := *, *, *;\n"
    "  l4: goto l2;\n"
    "  l0: goto l7;\n"
    "  l5: if (b1) goto l6 else goto l7;\n"
    "  l6: b0, b1, b2 := *, *, *;\n"
    "  l7: assert (!b0);\n"
    "end\n";

}  // namespace

TEST_CASE("scope packs globals first and locals after") {
  Program p = parse_ok(
      "decl g0, g1;\nmain()\nbegin\n  call f(g0);\nend\nf(x)\nbegin\n  decl t;\n  skip;\nend\n");
  Scope main_sc = Scope::for_proc(p, 0);
  CHECK(main_sc.vars == std::vector<std::string>{"g0", "g1"});
  Scope f_sc = Scope::for_proc(p, 1);
  CHECK(f_sc.vars == std::vector<std::string>{"g0", "g1", "x", "t"});
  CHECK(f_sc.index.at("x") == 2);
  CHECK(f_sc.bit(0b0100, "x"));
  CHECK_FALSE(f_sc.bit(0b0100, "t"));
}

TEST_CASE("packed evaluation matches the environment evaluator") {
  Program p = parse_ok("decl a, b, c;\nmain()\nbegin\n  skip;\nend\n");
  Scope sc = Scope::for_proc(p, 0);
  std::mt19937 rng(9300);
  for (int trial = 0; trial < 100; ++trial) {
    ExprPtr e = testsup::random_expr(rng, sc.vars, 3);
    for (uint64_t val = 0; val < 8; ++val) {
      Env env = testsup::unpack_env(sc.vars, val);
      CHECK(eval_bits(e, val, sc) == eval(e, env));
    }
  }
}

TEST_CASE("possible_bits covers star and choose") {
  Program p = parse_ok("decl a, b;\nmain()\nbegin\n  skip;\nend\n");
  Scope sc = Scope::for_proc(p, 0);
  auto as_set = [](const std::vector<bool>& v) { return std::set<bool>(v.begin(), v.end()); };
  CHECK(as_set(possible_bits(mk_star(), 0, sc)) == std::set<bool>{false, true});
  CHECK(as_set(possible_bits(mk_var("a"), 1, sc)) == std::set<bool>{true});
  // choose(a, b): a decides, then b, else free
  CHECK(as_set(possible_bits(mk_choose(mk_var("a"), mk_var("b")), 0b01, sc)) ==
        std::set<bool>{true});
  CHECK(as_set(possible_bits(mk_choose(mk_var("a"), mk_var("b")), 0b10, sc)) ==
        std::set<bool>{false});
  CHECK(as_set(possible_bits(mk_choose(mk_var("a"), mk_var("b")), 0b00, sc)) ==
        std::set<bool>{false, true});
  CHECK(val_to_string(0b01, sc).find("a") != std::string::npos);
}

TEST_CASE("branching example violates its assertion") {
  Program p = parse_ok(slurp(std::string(FIXTURES_DIR) + "/fig1.bp"));
  TransitionGraph g = graph_ok(p);
  Verdict v = check_partial_correctness(g);
  CHECK(v.kind == VerdictKind::ErrorReached);
  REQUIRE_FALSE(v.trace.empty());
  // the witness is a connected run from the entry into the error node
  CHECK(v.trace.front().node == g.entry[0]);
  CHECK(v.trace.back().node == g.err);
  for (size_t i = 0; i + 1 < v.trace.size(); ++i) {
    bool connected = false;
    for (int ei : g.nodes[v.trace[i].node].out) connected |= g.edges[ei].to == v.trace[i + 1].node;
    CHECK(connected);
  }
  CHECK(format_trace(g, v).find("l7") != std::string::npos);
}

TEST_CASE("the guarded rewrite of the example is partially correct") {
  Program p = parse_ok(kRepairedFig1);
  TransitionGraph g = graph_ok(p);
  CHECK(check_partial_correctness(g).kind == VerdictKind::PartiallyCorrect);
}

TEST_CASE("single runs depend on the chosen initial valuation") {
  Program p = parse_ok(slurp(std::string(FIXTURES_DIR) + "/fig1.bp"));
  TransitionGraph g = graph_ok(p);
  // all variables false: the b2 branch goes to l5, b1 false skips to the
  // assertion, and !b0 holds
  CHECK(run_from(g, 0b000).kind == VerdictKind::PartiallyCorrect);
  // b0 set: the same route now violates the assertion
  CHECK(run_from(g, 0b001).kind == VerdictKind::ErrorReached);
  // b2 set: the star loop can scramble everything, so an error is reachable
  CHECK(run_from(g, 0b100).kind == VerdictKind::ErrorReached);
}

TEST_CASE("trivial verdicts") {
  CHECK(check_partial_correctness(graph_ok(parse_ok(
            "decl a;\nmain()\nbegin\n  assert (a | !a);\nend\n")))
            .kind == VerdictKind::PartiallyCorrect);
  CHECK(check_partial_correctness(graph_ok(parse_ok(
            "decl a;\nmain()\nbegin\n  assert (a & !a);\nend\n")))
            .kind == VerdictKind::ErrorReached);
}

TEST_CASE("blocked assume prunes by default and reports under strict mode") {
  Program p = parse_ok("decl a;\nmain()\nbegin\n  assume (a & !a);\n  assert (a & !a);\nend\n");
  TransitionGraph g = graph_ok(p);
  CHECK(check_partial_correctness(g).kind == VerdictKind::PartiallyCorrect);
  ExecOptions strict;
  strict.strict_stuck = true;
  Verdict v = check_partial_correctness(g, strict);
  CHECK(v.kind == VerdictKind::StuckReached);
  CHECK_FALSE(v.trace.empty());
}

TEST_CASE("exhausting the configuration budget is inconclusive") {
  Program p = parse_ok(
      "decl a, b, c;\nmain()\nbegin\n  w: while (a | !a) do\n    a, b := *, c;\n    skip;\n  od;\nend\n");
  TransitionGraph g = graph_ok(p);
  ExecOptions opt;
  opt.max_configs = 1;
  CHECK(check_partial_correctness(g, opt).kind == VerdictKind::BoundExceeded);
}

TEST_CASE("calls bind formals and propagate global effects") {
  // the callee flips the global; correctness depends on the assert
  CHECK(check_partial_correctness(graph_ok(parse_ok(
            "decl g;\nmain()\nbegin\n  call set(true);\n  assert (g);\nend\n"
            "set(x)\nbegin\n  g := x;\nend\n")))
            .kind == VerdictKind::PartiallyCorrect);
  CHECK(check_partial_correctness(graph_ok(parse_ok(
            "decl g;\nmain()\nbegin\n  call set(true);\n  assert (!g);\nend\n"
            "set(x)\nbegin\n  g := x;\nend\n")))
            .kind == VerdictKind::ErrorReached);
  // a failing assert inside the callee is still an error
  CHECK(check_partial_correctness(graph_ok(parse_ok(
            "decl g;\nmain()\nbegin\n  call f(!g);\nend\n"
            "f(x)\nbegin\n  assert (x = g);\nend\n")))
            .kind == VerdictKind::ErrorReached);
}

TEST_CASE("runaway recursion exhausts the stack bound") {
  Program p = parse_ok(
      "decl g;\nmain()\nbegin\n  call r();\nend\nr()\nbegin\n  call r();\nend\n");
  TransitionGraph g = graph_ok(p);
  CHECK(check_partial_correctness(g).kind == VerdictKind::BoundExceeded);
  // bounded recursion that bottoms out is fine
  Program q = parse_ok(
      "decl a, b;\nmain()\nbegin\n  call down(true);\n  assert (!a | b);\nend\n"
      "down(x)\nbegin\n  i: if (a) then\n    a := false;\n    call down(x);\n  fi;\n  b := x;\nend\n");
  TransitionGraph gq = graph_ok(q);
  CHECK(check_partial_correctness(gq).kind == VerdictKind::PartiallyCorrect);
}

TEST_CASE("exploration agrees with the reference executor on random programs") {
  std::mt19937 rng(9301);
  testsup::GenOptions opt;
  ExecOptions plain;
  ExecOptions strict;
  strict.strict_stuck = true;
  int errors = 0, stucks = 0;
  for (int trial = 0; trial < 100; ++trial) {
    Program p = testsup::random_correct_program(rng, opt);
    // a few random edits produce a mix of correct and broken programs
    int edits = static_cast<int>(rng() % 3);
    for (int k = 0; k < edits; ++k) p = testsup::mutate(p, rng);
    TransitionGraph g = graph_ok(p);
    testsup::RefResult rr = testsup::ref_explore(g);
    REQUIRE_FALSE(rr.unsupported);

    Verdict v = check_partial_correctness(g, plain);
    VerdictKind want = rr.error_reached ? VerdictKind::ErrorReached
                                        : VerdictKind::PartiallyCorrect;
    CHECK_MESSAGE(v.kind == want, print_statement(p.procedures[0].body[0].stmt));

    Verdict vs = check_partial_correctness(g, strict);
    VerdictKind want_strict = rr.error_reached  ? VerdictKind::ErrorReached
                              : rr.stuck_reached ? VerdictKind::StuckReached
                                                 : VerdictKind::PartiallyCorrect;
    CHECK(vs.kind == want_strict);
    errors += rr.error_reached;
    stucks += rr.stuck_reached;
  }
  // the mix actually exercises both outcomes
  CHECK(errors > 5);
  CHECK(errors < 100);
}

TEST_CASE("verdicts are deterministic") {
  Program p = parse_ok(slurp(std::string(FIXTURES_DIR) + "/fig1.bp"));
  TransitionGraph g = graph_ok(p);
  Verdict a = check_partial_correctness(g);
  Verdict b = check_partial_correctness(g);
  CHECK(a.kind == b.kind);
  REQUIRE(a.trace.size() == b.trace.size());
  for (size_t i = 0; i < a.trace.size(); ++i) {
    CHECK(a.trace[i].node == b.trace[i].node);
    CHECK(a.trace[i].val == b.trace[i].val);
  }
}
