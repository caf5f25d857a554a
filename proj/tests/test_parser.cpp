#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <fstream>
#include <random>
#include <sstream>
#include <string>

#include "bprepair/parser.h"
#include "bprepair/printer.h"
#include "doctest.h"
#include "progen.h"

using namespace bp;

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  REQUIRE_MESSAGE(in.good(), ("cannot open " + path));
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Program parse_ok(const std::string& text) {
  ParseResult r = parse_program(text);
  REQUIRE_MESSAGE(r.program.has_value(), r.diags.format_all());
  return *r.program;
}

bool has_code(const ParseResult& r, DiagCode code) {
  for (const auto& d : r.diags.items)
    if (d.code == code) return true;
  return false;
}

const LabeledStatement& stmt_at(const Program& p, const std::string& label) {
  const LabeledStatement* found = nullptr;
  for_each_statement(p, [&](const LabeledStatement& ls) {
    if (ls.label == label) found = &ls;
  });
  REQUIRE_MESSAGE(found != nullptr, ("no statement labeled " + label));
  return *found;
}

}  // namespace

TEST_CASE("branching example parses into the expected shape") {
  Program p = parse_ok(slurp(std::string(FIXTURES_DIR) + "/fig1.bp"));
  REQUIRE(p.procedures.size() == 1);
  CHECK(p.procedures[0].name == "main");
  REQUIRE(p.globals.size() == 3);
  CHECK(p.globals[0].name == "b0");
  CHECK(p.globals[2].name == "b2");
  CHECK(count_statements(p) == 8);
  CHECK(p.inscope(0) == std::vector<std::string>{"b0", "b1", "b2"});

  const auto& l1 = stmt_at(p, "l1").stmt;
  CHECK(l1.kind == StmtKind::IfJump);
  CHECK(l1.labels == std::vector<std::string>{"l2", "l5"});
  CHECK(expr_to_string(l1.guard) == "b2");

  const auto& l2 = stmt_at(p, "l2").stmt;
  CHECK(l2.kind == StmtKind::IfJump);
  CHECK(l2.guard->kind == ExprKind::Star);

  const auto& l3 = stmt_at(p, "l3").stmt;
  CHECK(l3.kind == StmtKind::Assign);
  CHECK(l3.targets == std::vector<std::string>{"b0", "b1", "b2"});
  REQUIRE(l3.rhs.size() == 3);
  for (const auto& e : l3.rhs) CHECK(e->kind == ExprKind::Star);

  const auto& l4 = stmt_at(p, "l4").stmt;
  CHECK(l4.kind == StmtKind::Goto);
  CHECK(l4.labels == std::vector<std::string>{"l2"});

  const auto& l7 = stmt_at(p, "l7").stmt;
  CHECK(l7.kind == StmtKind::Assert);
  CHECK(expr_to_string(l7.guard) == "!b0");
}

TEST_CASE("minimal program and auto labels") {
  Program p = parse_ok("decl b0;\nmain()\nbegin\n  skip;\nend\n");
  REQUIRE(p.procedures.size() == 1);
  REQUIRE(p.procedures[0].body.size() == 1);
  const auto& ls = p.procedures[0].body[0];
  CHECK(ls.stmt.kind == StmtKind::Skip);
  CHECK(ls.auto_label);
  CHECK(ls.label == "l_auto_1");
}

TEST_CASE("auto labels never collide with explicit ones") {
  Program p = parse_ok(
      "decl b0;\nmain()\nbegin\n  l_auto_1: skip;\n  skip;\n  skip;\nend\n");
  const auto& body = p.procedures[0].body;
  REQUIRE(body.size() == 3);
  CHECK_FALSE(body[0].auto_label);
  CHECK(body[1].label == "l_auto_2");
  CHECK(body[2].label == "l_auto_3");
}

TEST_CASE("structured statements parse with nested bodies") {
  Program p = parse_ok(
      "decl a, b;\n"
      "main()\n"
      "begin\n"
      "  s1: if (a) then\n"
      "    s2: b := true;\n"
      "  else\n"
      "    s3: b := false;\n"
      "  fi;\n"
      "  s4: while (b) do\n"
      "    s5: b := *;\n"
      "    s6: skip;\n"
      "  od;\n"
      "  s7: assert (a => b | !b);\n"
      "end\n");
  const auto& s1 = stmt_at(p, "s1").stmt;
  CHECK(s1.kind == StmtKind::If);
  REQUIRE(s1.then_body.size() == 1);
  REQUIRE(s1.else_body.size() == 1);
  CHECK(s1.then_body[0].label == "s2");
  const auto& s4 = stmt_at(p, "s4").stmt;
  CHECK(s4.kind == StmtKind::While);
  REQUIRE(s4.then_body.size() == 2);
  CHECK(s4.then_body[1].stmt.kind == StmtKind::Skip);
  CHECK(count_statements(p) == 7);
}

TEST_CASE("two-way goto and calls parse") {
  Program p = parse_ok(
      "decl g;\n"
      "main()\n"
      "begin\n"
      "  a: goto b or c;\n"
      "  b: call helper(g, !g);\n"
      "  c: return;\n"
      "end\n"
      "\n"
      "helper(x, y)\n"
      "begin\n"
      "  h: g := x = y;\n"
      "end\n");
  const auto& a = stmt_at(p, "a").stmt;
  CHECK(a.kind == StmtKind::Goto);
  CHECK(a.labels == std::vector<std::string>{"b", "c"});
  const auto& b = stmt_at(p, "b").stmt;
  CHECK(b.kind == StmtKind::Call);
  CHECK(b.callee == "helper");
  REQUIRE(b.rhs.size() == 2);
  CHECK(p.procedures[1].formals == std::vector<std::string>{"x", "y"});
  // main is always procedure 0
  CHECK(p.procedure_index("main") == 0);
}

TEST_CASE("print then parse is the identity") {
  Program p = parse_ok(slurp(std::string(FIXTURES_DIR) + "/fig1.bp"));
  std::string once = print_program(p);
  Program p2 = parse_ok(once);
  CHECK(program_equal(p, p2));
  CHECK(print_program(p2) == once);
}

TEST_CASE("random programs survive the round trip") {
  std::mt19937 rng(9100);
  testsup::GenOptions opt;
  for (int trial = 0; trial < 100; ++trial) {
    Program p = testsup::random_correct_program(rng, opt);
    std::string text = print_program(p);
    ParseResult r = parse_program(text);
    REQUIRE_MESSAGE(r.program.has_value(), (text + "\n" + r.diags.format_all()));
    CHECK_MESSAGE(program_equal(p, *r.program), text);
    CHECK(print_program(*r.program) == text);
  }
}

TEST_CASE("validation rejects bad programs with stable codes") {
  auto expect = [&](const std::string& text, DiagCode code) {
    ParseResult r = parse_program(text);
    CHECK_FALSE(r.program.has_value());
    CHECK_MESSAGE(has_code(r, code), ("expected " + std::string(diag_code_name(code)) +
                                      " in:\n" + r.diags.format_all()));
  };
  expect("decl a, a;\nmain()\nbegin\n  skip;\nend\n", DiagCode::DuplicateVariable);
  expect("decl a;\nmain()\nbegin\n  x: skip;\n  x: skip;\nend\n", DiagCode::DuplicateLabel);
  expect("decl a;\nmain()\nbegin\n  skip;\nend\nmain()\nbegin\n  skip;\nend\n",
         DiagCode::DuplicateProcedure);
  expect("decl a;\nf(x, x)\nbegin\n  skip;\nend\nmain()\nbegin\n  skip;\nend\n",
         DiagCode::DuplicateFormal);
  expect("decl a;\nf()\nbegin\n  skip;\nend\n", DiagCode::MissingMain);
  expect("decl a;\nmain()\nbegin\n  call main();\nend\n", DiagCode::MainCalled);
  expect("decl a;\nmain()\nbegin\n  call nope();\nend\n", DiagCode::UnknownProcedure);
  expect("decl a;\nmain()\nbegin\n  call f(a, a);\nend\nf(x)\nbegin\n  skip;\nend\n",
         DiagCode::ArityMismatch);
  expect("decl a;\nmain()\nbegin\n  assert (*);\nend\n", DiagCode::NondeterministicAssertGuard);
  expect("decl a;\nmain()\nbegin\n  assume (choose(a, !a));\nend\n",
         DiagCode::NondeterministicAssumeGuard);
  expect("decl a;\nmain()\nbegin\n  call f(*);\nend\nf(x)\nbegin\n  skip;\nend\n",
         DiagCode::NondeterministicCallArg);
  expect("decl a;\nmain()\nbegin\n  a := choose(*, a);\nend\n",
         DiagCode::NondeterministicChooseArg);
  expect("decl a;\nmain()\nbegin\n  goto nowhere;\nend\n", DiagCode::UnknownLabel);
  expect("decl a;\nmain()\nbegin\n  a := b;\nend\n", DiagCode::UnboundVariable);
  expect("decl a;\nmain()\nbegin\n  w: while (a) do\n    a := false;\n  od;\nend\n",
         DiagCode::WhileBodyMustEndInSkip);
  expect("decl a;\nmain()\nbegin\n  a :=\nend\n", DiagCode::SyntaxError);
}

TEST_CASE("branch guards may be star but their operands may not") {
  // `if (*)` is the idiomatic nondeterministic branch
  Program p = parse_ok("decl a;\nmain()\nbegin\n  x: if (*) goto y else goto z;\n  y: skip;\n  z: skip;\nend\n");
  CHECK(stmt_at(p, "x").stmt.guard->kind == ExprKind::Star);
  ParseResult bad = parse_program("decl a;\nmain()\nbegin\n  x: if (a & *) goto y else goto y;\n  y: skip;\nend\n");
  CHECK_FALSE(bad.program.has_value());
  CHECK(has_code(bad, DiagCode::NondeterministicAssumeGuard));
  // star buried inside an assignment operand is also out
  ParseResult bad2 = parse_program("decl a;\nmain()\nbegin\n  a := a & *;\nend\n");
  CHECK_FALSE(bad2.program.has_value());
  CHECK(has_code(bad2, DiagCode::NondeterministicOperand));
}

TEST_CASE("assignment arity must line up") {
  ParseResult r = parse_program("decl a, b;\nmain()\nbegin\n  a, b := true;\nend\n");
  CHECK_FALSE(r.program.has_value());
}

TEST_CASE("diagnostics carry position and code text") {
  ParseResult r = parse_program("decl a;\nmain()\nbegin\n  goto nowhere;\nend\n", "prog.bp");
  REQUIRE_FALSE(r.diags.items.empty());
  const Diagnostic& d = r.diags.items[0];
  CHECK(d.file == "prog.bp");
  CHECK(d.line == 4);
  std::string line = d.format();
  CHECK(line.find("prog.bp:4:") != std::string::npos);
  CHECK(line.find("UnknownLabel") != std::string::npos);
}
