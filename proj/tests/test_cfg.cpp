#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <algorithm>
#include <fstream>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "bprepair/cfg.h"
#include "bprepair/parser.h"
#include "doctest.h"
#include "progen.h"

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

// path rendered as space separated node names, starting at its from node
std::string path_names(const TransitionGraph& g, const VerificationPath& p) {
  std::string s = g.nodes[p.from].name;
  for (int ei : p.edges) s += " " + g.nodes[g.edges[ei].to].name;
  return s;
}

// Checks the defining properties of a cut-set:
//  (a) procedure entries and exits are in,
//  (b) both endpoints of call edges and assert pass edges are in,
//  (c) the subgraph on the remaining nodes is acyclic,
//  (d) no non-mandatory member can be dropped without breaking (c).
void check_cutset_properties(const TransitionGraph& g, const std::vector<int>& cutset) {
  std::set<int> cs(cutset.begin(), cutset.end());
  CHECK(std::is_sorted(cutset.begin(), cutset.end()));

  std::set<int> mandatory;
  for (int n : g.entry) mandatory.insert(n);
  for (int n : g.exits) mandatory.insert(n);
  for (const auto& e : g.edges)
    if (e.act.kind == ActKind::Call || e.act.kind == ActKind::AssertPass) {
      mandatory.insert(e.from);
      mandatory.insert(e.to);
    }
  for (int n : mandatory) CHECK_MESSAGE(cs.count(n), ("mandatory node missing: " + g.nodes[n].name));

  // acyclic once cutpoints are removed: iterative DFS with colors
  auto acyclic_without = [&](const std::set<int>& removed) {
    std::vector<int> color(g.nodes.size(), 0);  // 0 new, 1 on stack, 2 done
    for (size_t start = 0; start < g.nodes.size(); ++start) {
      if (removed.count(static_cast<int>(start)) || color[start]) continue;
      std::vector<std::pair<int, size_t>> stack{{static_cast<int>(start), 0}};
      color[start] = 1;
      while (!stack.empty()) {
        auto& [n, i] = stack.back();
        if (i >= g.nodes[n].out.size()) {
          color[n] = 2;
          stack.pop_back();
          continue;
        }
        int to = g.edges[g.nodes[n].out[i++]].to;
        if (removed.count(to)) continue;
        if (color[to] == 1) return false;
        if (color[to] == 0) {
          color[to] = 1;
          stack.push_back({to, 0});
        }
      }
    }
    return true;
  };
  CHECK(acyclic_without(cs));

  for (int c : cutset) {
    if (mandatory.count(c)) continue;
    std::set<int> fewer = cs;
    fewer.erase(c);
    CHECK_MESSAGE(!acyclic_without(fewer),
                  ("cutpoint " + g.nodes[c].name + " is redundant"));
  }
}

// independent segment enumeration: walk out of every cutpoint, never through
// an interior cutpoint, never across an assert fail edge
std::multiset<std::string> dfs_segments(const TransitionGraph& g, const std::vector<int>& cutset) {
  std::set<int> cs(cutset.begin(), cutset.end());
  std::multiset<std::string> out;
  for (int c : cutset) {
    std::vector<std::pair<int, std::vector<int>>> stack{{c, {}}};
    while (!stack.empty()) {
      auto [n, seq] = stack.back();
      stack.pop_back();
      for (int ei : g.nodes[n].out) {
        const Edge& e = g.edges[ei];
        if (e.act.kind == ActKind::AssertFail) continue;
        std::vector<int> seq2 = seq;
        seq2.push_back(ei);
        if (cs.count(e.to)) {
          std::string key = std::to_string(c) + ">" + std::to_string(e.to) + ":";
          for (int k : seq2) key += std::to_string(k) + ",";
          out.insert(key);
        } else {
          stack.push_back({e.to, seq2});
        }
      }
    }
  }
  return out;
}

std::multiset<std::string> segment_keys(const std::vector<VerificationPath>& paths) {
  std::multiset<std::string> out;
  for (const auto& p : paths) {
    std::string key = std::to_string(p.from) + ">" + std::to_string(p.to) + ":";
    for (int k : p.edges) key += std::to_string(k) + ",";
    out.insert(key);
  }
  return out;
}

}  // namespace

TEST_CASE("branching example graph has the frozen shape") {
  Program p = parse_ok(slurp(std::string(FIXTURES_DIR) + "/fig1.bp"));
  TransitionGraph g = graph_ok(p);
  CHECK(g.nodes.size() == 10);
  CHECK(g.edges.size() == 12);
  // statement nodes in textual order, then main's exit, then the error node
  std::vector<std::string> names;
  for (const auto& n : g.nodes) names.push_back(n.name);
  CHECK(names == std::vector<std::string>{"l1", "l2", "l3", "l4", "l0", "l5", "l6", "l7",
                                          "exit_main", "err"});
  CHECK(g.entry == std::vector<int>{0});
  CHECK(g.exits == std::vector<int>{8});
  CHECK(g.err == 9);
  CHECK(g.nodes[8].is_exit);
  CHECK(g.nodes[9].is_err);
  CHECK(g.nodes[9].out.empty());

  // the b2 branch splits into guarded assume edges
  int l1 = g.node_by_name("l1");
  REQUIRE(g.nodes[l1].out.size() == 2);
  const Edge& et = g.edges[g.nodes[l1].out[0]];
  const Edge& ef = g.edges[g.nodes[l1].out[1]];
  CHECK(et.act.kind == ActKind::Assume);
  CHECK(et.tside);
  CHECK(expr_to_string(et.act.guard) == "b2");
  CHECK(g.nodes[et.to].name == "l2");
  CHECK(ef.act.kind == ActKind::Assume);
  CHECK_FALSE(ef.tside);
  CHECK(expr_to_string(ef.act.guard) == "!b2");
  CHECK(g.nodes[ef.to].name == "l5");

  // assignment and goto edges
  int l3 = g.node_by_name("l3");
  REQUIRE(g.nodes[l3].out.size() == 1);
  CHECK(g.edges[g.nodes[l3].out[0]].act.kind == ActKind::Assign);
  CHECK(g.edges[g.nodes[l3].out[0]].act.stmt != nullptr);
  int l4 = g.node_by_name("l4");
  CHECK(g.edges[g.nodes[l4].out[0]].act.kind == ActKind::Skip);
  CHECK(g.edges[g.nodes[l4].out[0]].to == g.node_by_name("l2"));

  // the assertion splits into a pass edge and a fail edge into err
  int l7 = g.node_by_name("l7");
  REQUIRE(g.nodes[l7].out.size() == 2);
  const Edge& pass = g.edges[g.nodes[l7].out[0]];
  const Edge& fail = g.edges[g.nodes[l7].out[1]];
  CHECK(pass.act.kind == ActKind::AssertPass);
  CHECK(pass.to == 8);
  CHECK(expr_to_string(pass.act.guard) == "!b0");
  CHECK(fail.act.kind == ActKind::AssertFail);
  CHECK(fail.to == 9);
}

TEST_CASE("node count is statements plus exits plus the error node") {
  std::mt19937 rng(9200);
  testsup::GenOptions opt;
  for (int trial = 0; trial < 50; ++trial) {
    Program p = testsup::random_correct_program(rng, opt);
    TransitionGraph g = graph_ok(p);
    CHECK(g.nodes.size() == count_statements(p) + p.procedures.size() + 1);
    CHECK(g.program == &p);
  }
}

TEST_CASE("branching example cut-set is entry, loop header, assert, exit") {
  Program p = parse_ok(slurp(std::string(FIXTURES_DIR) + "/fig1.bp"));
  TransitionGraph g = graph_ok(p);
  std::vector<int> cutset = compute_cutset(g);
  std::vector<std::string> names;
  for (int n : cutset) names.push_back(g.nodes[n].name);
  CHECK(names == std::vector<std::string>{"l1", "l2", "l7", "exit_main"});
  check_cutset_properties(g, cutset);
}

TEST_CASE("acyclic assert-free program needs only entry and exit") {
  Program p = parse_ok("decl a;\nmain()\nbegin\n  s1: a := true;\n  s2: skip;\nend\n");
  TransitionGraph g = graph_ok(p);
  std::vector<int> cutset = compute_cutset(g);
  REQUIRE(cutset.size() == 2);
  CHECK(cutset[0] == g.entry[0]);
  CHECK(cutset[1] == g.exits[0]);
}

TEST_CASE("cut-sets of random programs satisfy the defining properties") {
  std::mt19937 rng(9201);
  testsup::GenOptions opt;
  for (int trial = 0; trial < 50; ++trial) {
    Program p = testsup::random_correct_program(rng, opt);
    TransitionGraph g = graph_ok(p);
    check_cutset_properties(g, compute_cutset(g));
  }
}

TEST_CASE("branching example verification paths are the frozen six") {
  Program p = parse_ok(slurp(std::string(FIXTURES_DIR) + "/fig1.bp"));
  TransitionGraph g = graph_ok(p);
  std::vector<int> cutset = compute_cutset(g);
  DiagnosticSink sink;
  std::vector<VerificationPath> paths = enumerate_verification_paths(g, cutset, sink);
  CHECK_FALSE(sink.has_errors());
  std::multiset<std::string> got;
  for (const auto& vp : paths) got.insert(path_names(g, vp));
  std::multiset<std::string> want{
      "l1 l2",
      "l1 l5 l6 l7",
      "l1 l5 l7",
      "l2 l3 l4 l2",
      "l2 l0 l7",
      "l7 exit_main",
  };
  CHECK(got == want);
  // a path knows its endpoints
  for (const auto& vp : paths) {
    CHECK(vp.from == g.edges[vp.edges.front()].from);
    CHECK(vp.to == g.edges[vp.edges.back()].to);
    CHECK_FALSE(path_to_string(g, vp).empty());
  }
}

TEST_CASE("path enumeration agrees with a direct search") {
  std::mt19937 rng(9202);
  testsup::GenOptions opt;
  for (int trial = 0; trial < 30; ++trial) {
    Program p = testsup::random_correct_program(rng, opt);
    TransitionGraph g = graph_ok(p);
    std::vector<int> cutset = compute_cutset(g);
    DiagnosticSink sink;
    std::vector<VerificationPath> paths = enumerate_verification_paths(g, cutset, sink);
    REQUIRE_FALSE(sink.has_errors());
    CHECK(segment_keys(paths) == dfs_segments(g, cutset));

    // every edge except assert failures lies on some path
    std::set<int> covered;
    for (const auto& vp : paths)
      for (int ei : vp.edges) covered.insert(ei);
    for (size_t ei = 0; ei < g.edges.size(); ++ei) {
      if (g.edges[ei].act.kind == ActKind::AssertFail) continue;
      CHECK_MESSAGE(covered.count(static_cast<int>(ei)),
                    ("uncovered edge " + g.edge_label(g.edges[ei]) + " in\n" + g.dot()));
    }
  }
}

TEST_CASE("path explosion trips the cap diagnostic") {
  Program p = parse_ok(slurp(std::string(FIXTURES_DIR) + "/fig1.bp"));
  TransitionGraph g = graph_ok(p);
  std::vector<int> cutset = compute_cutset(g);
  DiagnosticSink sink;
  enumerate_verification_paths(g, cutset, sink, 1);
  bool saw = false;
  for (const auto& d : sink.items) saw |= d.code == DiagCode::PathCapExceeded;
  CHECK(saw);
}

TEST_CASE("unreachable statements are rejected at graph construction") {
  Program p = parse_ok("decl a;\nmain()\nbegin\n  x: goto z;\n  y: skip;\n  z: skip;\nend\n");
  DiagnosticSink sink;
  auto g = build_graph(p, sink);
  CHECK_FALSE(g.has_value());
  bool saw = false;
  for (const auto& d : sink.items) saw |= d.code == DiagCode::NodeOffEntryExitPath;
  CHECK(saw);
}

TEST_CASE("two-way goto produces two skip edges") {
  Program p = parse_ok(
      "decl a;\nmain()\nbegin\n  x: goto y or z;\n  y: skip;\n  z: skip;\nend\n");
  TransitionGraph g = graph_ok(p);
  int x = g.node_by_name("x");
  REQUIRE(g.nodes[x].out.size() == 2);
  std::set<std::string> dests;
  for (int ei : g.nodes[x].out) {
    CHECK(g.edges[ei].act.kind == ActKind::Skip);
    dests.insert(g.nodes[g.edges[ei].to].name);
  }
  CHECK(dests == std::set<std::string>{"y", "z"});
}

TEST_CASE("dot rendering names every node") {
  Program p = parse_ok(slurp(std::string(FIXTURES_DIR) + "/fig1.bp"));
  TransitionGraph g = graph_ok(p);
  std::string dot = g.dot();
  CHECK(dot.find("digraph") != std::string::npos);
  for (const auto& n : g.nodes) CHECK(dot.find(n.name) != std::string::npos);
}
