#pragma once

#include <array>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace ttt {

enum class Mark : int { Empty = 0, X = 1, O = 2 };
enum class Player : int { X = 1, O = 2 };
enum class Outcome { Ongoing, XWins, OWins, Tie };

// (x, y) = (row, column), both 0-indexed.
struct Coord {
  int x = 0;
  int y = 0;

  friend bool operator==(const Coord&, const Coord&) = default;
};

// Row-major ordering, used everywhere a deterministic move order is needed.
inline bool coord_less(const Coord& a, const Coord& b) {
  return a.x != b.x ? a.x < b.x : a.y < b.y;
}

inline int cell_index(const Coord& c) { return c.x * 3 + c.y; }
inline Coord coord_of(int index) { return Coord{index / 3, index % 3}; }

inline Mark mark_of(Player p) { return p == Player::X ? Mark::X : Mark::O; }
inline Player other(Player p) { return p == Player::X ? Player::O : Player::X; }

struct GameState {
  std::array<Mark, 9> cells{};  // row-major, all Empty by default
  Player to_move = Player::X;

  Mark at(const Coord& c) const { return cells[cell_index(c)]; }
  friend bool operator==(const GameState&, const GameState&) = default;
};

struct OccupiedCellError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct GameOverError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct BoardParseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

Outcome outcome_of(const GameState& s);
bool is_terminal(const GameState& s);

// Empty cells in row-major order; empty iff the state is terminal.
std::vector<Coord> legal_moves(const GameState& s);

// Places the mover's mark and flips to_move. Throws OccupiedCellError /
// GameOverError; never mutates its input.
GameState apply_move(const GameState& s, const Coord& m);

// Relabels marks so the player to move is always X. Idempotent. Board
// positions are unchanged, so move coordinates remain valid.
GameState canonicalize(const GameState& s);

// Row-major 9-vector over {0, 1, 2}. Callers canonicalize first so that the
// encoding is mover-invariant.
std::array<double, 9> flatten(const GameState& s);

// Three lines of " | "-separated cells, "_" for empty, no trailing newline:
//   X | O | X
//   O | X | _
//   _ | _ | O
std::string render_board(const GameState& s);

// Inverse of render_board; the mover is not part of the rendering and must be
// supplied. Throws BoardParseError on malformed text.
GameState parse_board(const std::string& text, Player to_move);

// Nine chars over '0'/'1'/'2', row-major ("000000000" is the empty board).
std::string board_string(const GameState& s);
GameState from_board_string(const std::string& nine, Player to_move);

// Compact unique key (2 bits per cell + mover bit) for hash maps.
std::uint32_t state_key(const GameState& s);

}  // namespace ttt
