#include "bprepair/satsolver.h"

#include <algorithm>
#include <cmath>

namespace bp {

int SatSolver::new_var() {
  assign_.push_back(Undef);
  phase_.push_back(1);  // try false first
  level_.push_back(0);
  reason_.push_back(-1);
  activity_.push_back(0.0);
  heap_pos_.push_back(-1);
  seen_.push_back(0);
  watches_.emplace_back();
  watches_.emplace_back();
  int v = num_vars() - 1;
  heap_insert(v);
  return v + 1;
}

void SatSolver::add_clause(std::vector<Lit> lits) {
  if (!ok_) return;
  std::vector<int> c;
  c.reserve(lits.size());
  for (Lit l : lits) c.push_back(ilit(l));
  std::sort(c.begin(), c.end());
  c.erase(std::unique(c.begin(), c.end()), c.end());
  std::vector<int> kept;
  for (size_t i = 0; i < c.size(); ++i) {
    if (i + 1 < c.size() && c[i + 1] == neg(c[i])) return;  // tautology
    uint8_t v = lit_value(c[i]);
    if (v == True && level_[var_of(c[i])] == 0) return;  // already satisfied
    if (v == False && level_[var_of(c[i])] == 0) continue;  // dead literal
    kept.push_back(c[i]);
  }
  if (kept.empty()) {
    ok_ = false;
    return;
  }
  if (kept.size() == 1) {
    if (lit_value(kept[0]) == False)
      ok_ = false;
    else if (lit_value(kept[0]) == Undef)
      enqueue(kept[0], -1);
    if (ok_ && propagate() != -1) ok_ = false;
    return;
  }
  clauses_.push_back(std::move(kept));
  attach(static_cast<int>(clauses_.size()) - 1);
}

void SatSolver::attach(int ci) {
  const auto& c = clauses_[ci];
  watches_[neg(c[0])].push_back({ci, c[1]});
  watches_[neg(c[1])].push_back({ci, c[0]});
}

void SatSolver::enqueue(int l, int reason) {
  int v = var_of(l);
  assign_[v] = (l & 1) ? False : True;
  level_[v] = decision_level();
  reason_[v] = reason;
  trail_.push_back(l);
}

int SatSolver::propagate() {
  while (qhead_ < trail_.size()) {
    int p = trail_[qhead_++];  // p is true; scan watchers of p's negation list
    auto& ws = watches_[p];
    size_t i = 0, j = 0;
    for (; i < ws.size();) {
      Watcher w = ws[i];
      if (lit_value(w.blocker) == True) {
        ws[j++] = ws[i++];
        continue;
      }
      auto& c = clauses_[w.clause];
      int false_lit = neg(p);
      if (c[0] == false_lit) std::swap(c[0], c[1]);
      // c[1] is the false literal now
      if (lit_value(c[0]) == True) {
        ws[j++] = {w.clause, c[0]};
        ++i;
        continue;
      }
      bool moved = false;
      for (size_t k = 2; k < c.size(); ++k) {
        if (lit_value(c[k]) != False) {
          std::swap(c[1], c[k]);
          watches_[neg(c[1])].push_back({w.clause, c[0]});
          moved = true;
          break;
        }
      }
      if (moved) {
        ++i;
        continue;
      }
      // unit or conflicting
      ws[j++] = ws[i++];
      if (lit_value(c[0]) == False) {
        while (i < ws.size()) ws[j++] = ws[i++];
        ws.resize(j);
        qhead_ = trail_.size();
        return w.clause;
      }
      enqueue(c[0], w.clause);
    }
    ws.resize(j);
  }
  return -1;
}

void SatSolver::bump(int v) {
  activity_[v] += var_inc_;
  if (activity_[v] > 1e100) {
    for (auto& a : activity_) a *= 1e-100;
    var_inc_ *= 1e-100;
  }
  if (heap_pos_[v] >= 0) heap_sift_up(heap_pos_[v]);
}

void SatSolver::analyze(int confl, std::vector<int>& learnt, int& bt_level) {
  learnt.assign(1, 0);  // slot for the asserting literal
  int path = 0, p = -1;  // p: trail-form literal last resolved on
  int idx = static_cast<int>(trail_.size()) - 1;
  do {
    const auto& c = clauses_[confl];
    // A reason clause has its propagated literal (p) at position 0.
    for (size_t qi = (p == -1 ? 0 : 1); qi < c.size(); ++qi) {
      int q = c[qi];
      int v = var_of(q);
      if (!seen_[v] && level_[v] > 0) {
        seen_[v] = 1;
        bump(v);
        if (level_[v] >= decision_level())
          ++path;
        else
          learnt.push_back(q);
      }
    }
    while (!seen_[var_of(trail_[idx])]) --idx;
    p = trail_[idx];
    seen_[var_of(p)] = 0;
    --idx;
    --path;
    confl = reason_[var_of(p)];
  } while (path > 0);
  learnt[0] = neg(p);

  bt_level = 0;
  if (learnt.size() > 1) {
    size_t max_i = 1;
    for (size_t i = 2; i < learnt.size(); ++i)
      if (level_[var_of(learnt[i])] > level_[var_of(learnt[max_i])]) max_i = i;
    std::swap(learnt[1], learnt[max_i]);
    bt_level = level_[var_of(learnt[1])];
  }
  for (size_t i = 1; i < learnt.size(); ++i) seen_[var_of(learnt[i])] = 0;
}

void SatSolver::backtrack(int target) {
  if (decision_level() <= target) return;
  int bound = trail_lim_[target];
  for (int i = static_cast<int>(trail_.size()) - 1; i >= bound; --i) {
    int v = var_of(trail_[i]);
    phase_[v] = trail_[i] & 1;
    assign_[v] = Undef;
    if (heap_pos_[v] < 0) heap_insert(v);
  }
  trail_.resize(bound);
  trail_lim_.resize(target);
  qhead_ = trail_.size();
}

bool SatSolver::heap_less(int a, int b) const {
  // a smaller priority than b; ties to the lower index for determinism
  if (activity_[a] != activity_[b]) return activity_[a] < activity_[b];
  return a > b;
}

void SatSolver::heap_insert(int v) {
  heap_pos_[v] = static_cast<int>(heap_.size());
  heap_.push_back(v);
  heap_sift_up(heap_pos_[v]);
}

void SatSolver::heap_sift_up(int i) {
  int v = heap_[i];
  while (i > 0) {
    int parent = (i - 1) / 2;
    if (!heap_less(heap_[parent], v)) break;
    heap_[i] = heap_[parent];
    heap_pos_[heap_[i]] = i;
    i = parent;
  }
  heap_[i] = v;
  heap_pos_[v] = i;
}

void SatSolver::heap_sift_down(int i) {
  int v = heap_[i];
  int n = static_cast<int>(heap_.size());
  for (;;) {
    int child = 2 * i + 1;
    if (child >= n) break;
    if (child + 1 < n && heap_less(heap_[child], heap_[child + 1])) ++child;
    if (!heap_less(v, heap_[child])) break;
    heap_[i] = heap_[child];
    heap_pos_[heap_[i]] = i;
    i = child;
  }
  heap_[i] = v;
  heap_pos_[v] = i;
}

int SatSolver::pick_branch() {
  while (!heap_.empty()) {
    int v = heap_[0];
    int last = heap_.back();
    heap_.pop_back();
    heap_pos_[v] = -1;
    if (!heap_.empty() && v != last) {
      heap_[0] = last;
      heap_pos_[last] = 0;
      heap_sift_down(0);
    }
    if (assign_[v] == Undef) return v;
  }
  return -1;
}

bool SatSolver::solve(const std::vector<Lit>& assumptions) {
  if (!ok_) return false;
  backtrack(0);
  if (propagate() != -1) {
    ok_ = false;
    return false;
  }
  uint64_t restart_budget = 100;
  uint64_t since_restart = 0;

  for (;;) {
    int confl = propagate();
    if (confl != -1) {
      ++conflicts_;
      ++since_restart;
      if (decision_level() == 0) {
        ok_ = false;
        return false;
      }
      // Decision levels up to assumptions.size() hold only assumptions, so a
      // conflict there means unsatisfiable under these assumptions (the
      // formula itself may still be fine).
      if (decision_level() <= static_cast<int>(assumptions.size())) {
        backtrack(0);
        return false;
      }
      std::vector<int> learnt;
      int bt;
      analyze(confl, learnt, bt);
      backtrack(bt);
      var_inc_ /= 0.95;
      if (learnt.size() == 1) {
        if (lit_value(learnt[0]) == False) {
          ok_ = false;
          return false;
        }
        if (lit_value(learnt[0]) == Undef) enqueue(learnt[0], -1);
      } else {
        clauses_.push_back(learnt);
        attach(static_cast<int>(clauses_.size()) - 1);
        enqueue(learnt[0], static_cast<int>(clauses_.size()) - 1);
      }
      continue;
    }

    if (since_restart >= restart_budget) {
      since_restart = 0;
      restart_budget = restart_budget + restart_budget / 2;
      backtrack(0);
      continue;
    }

    // apply pending assumptions, one decision level each
    if (decision_level() < static_cast<int>(assumptions.size())) {
      int a = ilit(assumptions[decision_level()]);
      uint8_t v = lit_value(a);
      if (v == False) {
        backtrack(0);
        return false;
      }
      new_decision_level();
      if (v == Undef) enqueue(a, -1);
      continue;
    }

    int v = pick_branch();
    if (v < 0) {
      model_.assign(assign_.begin(), assign_.end());
      backtrack(0);
      return true;
    }
    new_decision_level();
    enqueue(2 * v + (phase_[v] ? 1 : 0), -1);
  }
}

bool SatSolver::value(int var) const { return model_[var - 1] == True; }

}  // namespace bp
