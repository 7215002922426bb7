#include "ttt/game.hpp"

#include <sstream>

namespace ttt {

namespace {

constexpr int kLines[8][3] = {
    {0, 1, 2}, {3, 4, 5}, {6, 7, 8},  // rows
    {0, 3, 6}, {1, 4, 7}, {2, 5, 8},  // columns
    {0, 4, 8}, {2, 4, 6},             // diagonals
};

char mark_char(Mark m) {
  switch (m) {
    case Mark::X: return 'X';
    case Mark::O: return 'O';
    default: return '_';
  }
}

}  // namespace

Outcome outcome_of(const GameState& s) {
  for (const auto& line : kLines) {
    Mark a = s.cells[line[0]];
    if (a != Mark::Empty && a == s.cells[line[1]] && a == s.cells[line[2]]) {
      return a == Mark::X ? Outcome::XWins : Outcome::OWins;
    }
  }
  for (Mark m : s.cells) {
    if (m == Mark::Empty) return Outcome::Ongoing;
  }
  return Outcome::Tie;
}

bool is_terminal(const GameState& s) { return outcome_of(s) != Outcome::Ongoing; }

std::vector<Coord> legal_moves(const GameState& s) {
  if (is_terminal(s)) return {};
  std::vector<Coord> moves;
  moves.reserve(9);
  for (int i = 0; i < 9; ++i) {
    if (s.cells[i] == Mark::Empty) moves.push_back(coord_of(i));
  }
  return moves;
}

GameState apply_move(const GameState& s, const Coord& m) {
  if (is_terminal(s)) throw GameOverError("apply_move: game is already over");
  if (m.x < 0 || m.x > 2 || m.y < 0 || m.y > 2) {
    throw OccupiedCellError("apply_move: coordinate off the board");
  }
  if (s.at(m) != Mark::Empty) throw OccupiedCellError("apply_move: cell is occupied");
  GameState next = s;
  next.cells[cell_index(m)] = mark_of(s.to_move);
  next.to_move = other(s.to_move);
  return next;
}

GameState canonicalize(const GameState& s) {
  if (s.to_move == Player::X) return s;
  GameState c = s;
  for (Mark& m : c.cells) {
    if (m == Mark::X) m = Mark::O;
    else if (m == Mark::O) m = Mark::X;
  }
  c.to_move = Player::X;
  return c;
}

std::array<double, 9> flatten(const GameState& s) {
  std::array<double, 9> v{};
  for (int i = 0; i < 9; ++i) v[i] = static_cast<double>(static_cast<int>(s.cells[i]));
  return v;
}

std::string render_board(const GameState& s) {
  std::string out;
  for (int r = 0; r < 3; ++r) {
    if (r > 0) out += '\n';
    for (int c = 0; c < 3; ++c) {
      if (c > 0) out += " | ";
      out += mark_char(s.cells[r * 3 + c]);
    }
  }
  return out;
}

GameState parse_board(const std::string& text, Player to_move) {
  GameState s;
  s.to_move = to_move;
  std::istringstream in(text);
  std::string line;
  for (int r = 0; r < 3; ++r) {
    if (!std::getline(in, line)) throw BoardParseError("parse_board: expected 3 lines");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    int col = 0;
    for (size_t i = 0; i < line.size() && col < 3; ++i) {
      char ch = line[i];
      if (ch == ' ' || ch == '|') continue;
      Mark m;
      if (ch == 'X') m = Mark::X;
      else if (ch == 'O') m = Mark::O;
      else if (ch == '_') m = Mark::Empty;
      else throw BoardParseError(std::string("parse_board: unexpected character '") + ch + "'");
      s.cells[r * 3 + col] = m;
      ++col;
    }
    if (col != 3) throw BoardParseError("parse_board: expected 3 cells per line");
  }
  return s;
}

std::string board_string(const GameState& s) {
  std::string out(9, '0');
  for (int i = 0; i < 9; ++i) out[i] = static_cast<char>('0' + static_cast<int>(s.cells[i]));
  return out;
}

GameState from_board_string(const std::string& nine, Player to_move) {
  if (nine.size() != 9) throw BoardParseError("from_board_string: expected 9 characters");
  GameState s;
  s.to_move = to_move;
  for (int i = 0; i < 9; ++i) {
    char ch = nine[i];
    if (ch < '0' || ch > '2') throw BoardParseError("from_board_string: expected digits 0-2");
    s.cells[i] = static_cast<Mark>(ch - '0');
  }
  return s;
}

std::uint32_t state_key(const GameState& s) {
  std::uint32_t key = 0;
  for (int i = 0; i < 9; ++i) key = key * 3u + static_cast<std::uint32_t>(s.cells[i]);
  return key * 2u + (s.to_move == Player::X ? 0u : 1u);
}

}  // namespace ttt
