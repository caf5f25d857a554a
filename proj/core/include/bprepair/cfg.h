#pragma once

#include <optional>
#include <string>
#include <vector>

#include "bprepair/ast.h"
#include "bprepair/diagnostics.h"

namespace bp {

// What taking an edge does. Skip/Return/goto edges carry no label. Branch
// statements put assume edges on both sides; assert statements get a pass
// edge (guard holds) and a fail edge into the error node (guard fails).
enum class ActKind { Skip, Assume, Assign, Call, Return, AssertPass, AssertFail };

struct EdgeAction {
  ActKind kind = ActKind::Skip;
  ExprPtr guard;                    // Assume / AssertPass / AssertFail: the guard g
  const Statement* stmt = nullptr;  // Assign / Call
};

struct Edge {
  int from = -1, to = -1;
  EdgeAction act;
  bool from_branch = false;  // edge leaves an if/while statement
  bool tside = false;        // true successor of a branch (or the only assume edge)
};

struct Node {
  int id = -1;
  std::string name;  // statement label, "exit_<proc>", or "err"
  int proc = -1;     // owning procedure index; -1 for err
  const LabeledStatement* stmt = nullptr;  // null for exit and err nodes
  bool is_exit = false, is_err = false;
  std::vector<int> out, in;  // edge indices, in creation order
};

// One graph for the whole program: per procedure its statement nodes in
// textual order followed by its exit node, then the shared error node.
// Holds pointers into the Program; keep it alive.
struct TransitionGraph {
  const Program* program = nullptr;
  std::vector<Node> nodes;
  std::vector<Edge> edges;
  std::vector<int> entry;  // per procedure: node of its first statement
  std::vector<int> exits;  // per procedure: its exit node
  int err = -1;

  int node_by_name(const std::string& name) const;
  std::string edge_label(const Edge& e) const;  // human readable, "" for skips
  std::string dot() const;
};

// Build the graph; on structural errors (a node not on any entry-to-exit
// path) reports NodeOffEntryExitPath and returns nullopt.
std::optional<TransitionGraph> build_graph(const Program& p, DiagnosticSink& sink,
                                           const std::string& filename = "<input>");

// Cut-set: procedure entries and exits, both endpoints of call edges and of
// assert pass edges, plus enough extra nodes that every cycle contains one.
// Extra nodes are loop headers when the graph is reducible; a smallest-id
// fallback breaks irreducible cycles. Non-required extras are dropped again
// when the remaining set still cuts every cycle. Sorted by node id.
std::vector<int> compute_cutset(const TransitionGraph& g);

// A path between adjacent cutpoints: no interior cutpoints, assert fail
// edges never taken. Edges are edge indices into the graph.
struct VerificationPath {
  int from = -1, to = -1;
  std::vector<int> edges;
};

std::vector<VerificationPath> enumerate_verification_paths(const TransitionGraph& g,
                                                           const std::vector<int>& cutset,
                                                           DiagnosticSink& sink,
                                                           size_t cap_per_pair = 10000);

std::string path_to_string(const TransitionGraph& g, const VerificationPath& p);

}  // namespace bp
