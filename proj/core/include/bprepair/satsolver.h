#pragma once

#include <cstdint>
#include <vector>

namespace bp {

// Literals are nonzero ints: +v for variable v, -v for its negation.
// Variables are 1-based and come from new_var().
using Lit = int;

// Conflict-driven clause-learning solver: two watched literals, first-UIP
// learning, activity-ordered decisions with saved phases (false first),
// geometric restarts. Deterministic for a fixed clause sequence.
class SatSolver {
 public:
  int new_var();
  int num_vars() const { return static_cast<int>(assign_.size()); }
  void add_clause(std::vector<Lit> lits);
  bool okay() const { return ok_; }

  // Solve under the given assumption literals (tried before any decision).
  bool solve(const std::vector<Lit>& assumptions = {});
  bool value(int var) const;  // model value after a satisfiable solve

  uint64_t conflicts() const { return conflicts_; }
  size_t num_clauses() const { return clauses_.size(); }

 private:
  enum : uint8_t { Undef = 0, True = 1, False = 2 };
  struct Watcher {
    int clause;
    int blocker;  // internal literal
  };

  // internal literal: 2*var + sign (var 0-based)
  static int ilit(Lit l) { return 2 * (std::abs(l) - 1) + (l < 0 ? 1 : 0); }
  static int neg(int l) { return l ^ 1; }
  static int var_of(int l) { return l >> 1; }

  uint8_t lit_value(int l) const {
    uint8_t v = assign_[var_of(l)];
    if (v == Undef) return Undef;
    return ((v == True) != (l & 1)) ? True : False;
  }

  void enqueue(int l, int reason);
  int propagate();  // returns conflicting clause index or -1
  void analyze(int confl, std::vector<int>& learnt, int& bt_level);
  void backtrack(int level);
  void new_decision_level() { trail_lim_.push_back(static_cast<int>(trail_.size())); }
  int decision_level() const { return static_cast<int>(trail_lim_.size()); }
  void bump(int v);
  void attach(int ci);
  int pick_branch();

  // indexed max-heap over variable activity
  void heap_insert(int v);
  void heap_sift_up(int i);
  void heap_sift_down(int i);
  bool heap_less(int a, int b) const;  // a below b

  bool ok_ = true;
  std::vector<std::vector<int>> clauses_;
  std::vector<std::vector<Watcher>> watches_;  // per internal literal
  std::vector<uint8_t> assign_;                // per var
  std::vector<uint8_t> phase_;                 // saved polarity, 1 = negative
  std::vector<int> level_, reason_;
  std::vector<int> trail_, trail_lim_;
  size_t qhead_ = 0;

  std::vector<double> activity_;
  double var_inc_ = 1.0;
  std::vector<int> heap_, heap_pos_;  // heap of vars; -1 pos = absent

  std::vector<uint8_t> model_;
  std::vector<char> seen_;
  uint64_t conflicts_ = 0;
};

}  // namespace bp
