#pragma once

#include <string>
#include <unordered_map>
#include <vector>

#include "ttt/game.hpp"

namespace ttt {

struct TerminalStateError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct IllegalMoveError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct TableIoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Exact game value for the mover: +1 win, 0 tie, -1 loss. rank 1 is the best
// move; value ties are broken row-major so ranks form a permutation of 1..n.
struct MoveEval {
  Coord move;
  int value = 0;
  int rank = 0;
};

struct SolvedEntry {
  GameState state;  // canonical (mover is X)
  int value = 0;    // game value for the mover under perfect play
  std::vector<MoveEval> moves;
};

// Full-strength minimax table over every reachable non-terminal canonical
// state. Entries are stored in first-visit breadth-first order from the empty
// board, which fixes a deterministic state ordering for sampling.
class SolvedTable {
 public:
  static SolvedTable solve_all();

  const std::vector<SolvedEntry>& entries() const { return entries_; }
  // Reachable canonical states including terminals.
  int reachable_states() const { return reachable_; }

  const SolvedEntry* find(const GameState& s) const;  // canonicalizes; nullptr if terminal/unknown

  // Moves ranked best-first. Throws TerminalStateError on terminal input.
  const std::vector<MoveEval>& rank_moves(const GameState& s) const;

  // Game value for the mover of s; terminal states are scored directly.
  int state_value(const GameState& s) const;

  // 1 - (avg_rank - 1) / (n - 1), with average ranks over value ties; 1.0 when
  // n == 1. Throws IllegalMoveError if m is not legal in s.
  double optimality_percentile(const GameState& s, const Coord& m) const;

  void save(const std::string& path) const;
  static SolvedTable load(const std::string& path);

 private:
  std::vector<SolvedEntry> entries_;
  std::unordered_map<std::uint32_t, int> index_;
  int reachable_ = 0;

  void build_index();
};

}  // namespace ttt
