#include <doctest.h>

#include <algorithm>
#include <set>
#include <string>

#include "ttt/oracle.hpp"
#include "ttt/rng.hpp"

using namespace ttt;

namespace {

// Independent enumeration: raw states from the standard opening, no
// canonicalization, no sharing with the library's solver internals.
void walk_raw(const GameState& s, std::set<std::string>& seen) {
  const std::string repr = board_string(s) + (s.to_move == Player::X ? "X" : "O");
  if (!seen.insert(repr).second) return;
  for (const Coord& m : legal_moves(s)) walk_raw(apply_move(s, m), seen);
}

// Plain recursive minimax on raw states, memo-free: the reference value for
// the player to move.
int plain_minimax(const GameState& s) {
  switch (outcome_of(s)) {
    case Outcome::Tie: return 0;
    case Outcome::XWins: return s.to_move == Player::X ? 1 : -1;
    case Outcome::OWins: return s.to_move == Player::O ? 1 : -1;
    default: break;
  }
  int best = -2;
  for (const Coord& m : legal_moves(s)) best = std::max(best, -plain_minimax(apply_move(s, m)));
  return best;
}

const SolvedTable& table() {
  static SolvedTable t = SolvedTable::solve_all();
  return t;
}

}  // namespace

TEST_CASE("solver state counts match an independent raw enumeration") {
  std::set<std::string> raw;
  walk_raw(GameState{}, raw);
  int raw_nonterminal = 0;
  std::set<std::string> canonical_nonterminal;
  for (const std::string& repr : raw) {
    const GameState s =
        from_board_string(repr.substr(0, 9), repr[9] == 'X' ? Player::X : Player::O);
    if (!is_terminal(s)) {
      ++raw_nonterminal;
      const GameState c = canonicalize(s);
      canonical_nonterminal.insert(board_string(c));
    }
  }

  CHECK(raw.size() == 5478);
  CHECK(raw_nonterminal == 4520);
  CHECK(table().reachable_states() == 5478);
  CHECK(table().entries().size() == 4520);

  // The table's canonical states are exactly the canonical images of the raw
  // reachable non-terminal states.
  CHECK(canonical_nonterminal.size() == 4520);
  for (const SolvedEntry& e : table().entries()) {
    CHECK(canonical_nonterminal.count(board_string(e.state)) == 1);
  }
}

TEST_CASE("move values and ranks agree with memo-free minimax on sampled states") {
  const auto& entries = table().entries();
  Rng rng(20240817);
  for (int trial = 0; trial < 40; ++trial) {
    const SolvedEntry& e = entries[static_cast<size_t>(rng.next_below(
        static_cast<int>(entries.size())))];
    REQUIRE(!e.moves.empty());
    CHECK(e.value == plain_minimax(e.state));
    for (const MoveEval& me : e.moves) {
      CHECK(me.value == -plain_minimax(apply_move(e.state, me.move)));
    }
    // Ranks: 1..n, non-increasing values, value ties in row-major order.
    for (size_t i = 0; i < e.moves.size(); ++i) {
      CHECK(e.moves[i].rank == static_cast<int>(i) + 1);
      if (i > 0) {
        CHECK(e.moves[i - 1].value >= e.moves[i].value);
        if (e.moves[i - 1].value == e.moves[i].value) {
          CHECK(coord_less(e.moves[i - 1].move, e.moves[i].move));
        }
      }
    }
  }
}

TEST_CASE("the empty board is a draw and every opening scores percentile 0.5") {
  CHECK(table().state_value(GameState{}) == 0);
  // All nine openings draw under perfect play, so they tie at average rank 5.
  for (const MoveEval& me : table().rank_moves(GameState{})) {
    CHECK(me.value == 0);
    CHECK(table().optimality_percentile(GameState{}, me.move) == doctest::Approx(0.5));
  }
}

TEST_CASE("optimality percentile matches a direct recomputation from values") {
  const auto& entries = table().entries();
  Rng rng(77);
  for (int trial = 0; trial < 60; ++trial) {
    const SolvedEntry& e = entries[static_cast<size_t>(rng.next_below(
        static_cast<int>(entries.size())))];
    const size_t n = e.moves.size();
    for (const MoveEval& me : e.moves) {
      double rank_sum = 0.0;
      int tied = 0;
      for (const MoveEval& other : e.moves) {
        if (other.value == me.value) {
          rank_sum += other.rank;
          ++tied;
        }
      }
      const double expected =
          n == 1 ? 1.0 : 1.0 - (rank_sum / tied - 1.0) / (static_cast<double>(n) - 1.0);
      CHECK(table().optimality_percentile(e.state, me.move) == doctest::Approx(expected).epsilon(1e-12));
      CHECK(table().optimality_percentile(e.state, me.move) >= 0.0);
      CHECK(table().optimality_percentile(e.state, me.move) <= 1.0);
    }
  }
}

TEST_CASE("percentile extremes: a forced win ranks 1.0 and errors on illegal moves") {
  // X to move, X X _ / O O _ / _ _ _: (0,2) wins outright.
  const GameState s = from_board_string("110220000", Player::X);
  CHECK(table().optimality_percentile(s, Coord{0, 2}) == doctest::Approx(1.0));
  CHECK(table().state_value(s) == 1);
  CHECK(table().rank_moves(s).front().move == Coord{0, 2});
  CHECK_THROWS_AS(table().optimality_percentile(s, Coord{0, 0}), IllegalMoveError);
  CHECK_THROWS_AS(table().rank_moves(from_board_string("111220000", Player::O)),
                  TerminalStateError);
}

TEST_CASE("terminal states are scored directly") {
  CHECK(table().state_value(from_board_string("111220000", Player::O)) == -1);  // X just won
  CHECK(table().state_value(from_board_string("121212212", Player::X)) == 0);   // tie
}

TEST_CASE("perfect self-play from the empty board is a draw") {
  GameState s;
  while (!is_terminal(s)) s = apply_move(s, table().rank_moves(s).front().move);
  CHECK(outcome_of(s) == Outcome::Tie);
}

TEST_CASE("rank_moves canonicalizes, so either mover labeling works") {
  // Same position described with O to move: best move must transfer.
  const GameState as_o = from_board_string("220110000", Player::O);
  const GameState canon = canonicalize(as_o);
  CHECK(table().rank_moves(as_o).front().move == table().rank_moves(canon).front().move);
  CHECK(table().rank_moves(as_o).front().move == Coord{0, 2});
}

TEST_CASE("save and load round-trip the table exactly") {
  const std::string path = "/tmp/ttt_oracle_roundtrip.json";
  table().save(path);
  const SolvedTable loaded = SolvedTable::load(path);

  CHECK(loaded.reachable_states() == table().reachable_states());
  REQUIRE(loaded.entries().size() == table().entries().size());
  for (size_t i = 0; i < loaded.entries().size(); ++i) {
    const SolvedEntry& a = table().entries()[i];
    const SolvedEntry& b = loaded.entries()[i];
    CHECK(a.state == b.state);  // entry order is part of the format
    CHECK(a.value == b.value);
    REQUIRE(a.moves.size() == b.moves.size());
    for (size_t j = 0; j < a.moves.size(); ++j) {
      CHECK(a.moves[j].move == b.moves[j].move);
      CHECK(a.moves[j].value == b.moves[j].value);
      CHECK(a.moves[j].rank == b.moves[j].rank);
    }
  }
  CHECK_THROWS_AS(SolvedTable::load("/tmp/ttt_no_such_table.json"), TableIoError);
}
