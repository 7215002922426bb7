#include "ttt/oracle.hpp"

#include <algorithm>
#include <deque>
#include <fstream>

#include <nlohmann/json.hpp>

namespace ttt {

namespace {

// Value of a terminal state from the perspective of its mover. In legal play
// the winner is always the player who just moved, so a decided game is a loss
// for the mover, but the general form keeps the function total.
int terminal_value(const GameState& s, Outcome o) {
  switch (o) {
    case Outcome::Tie: return 0;
    case Outcome::XWins: return s.to_move == Player::X ? 1 : -1;
    case Outcome::OWins: return s.to_move == Player::O ? 1 : -1;
    default: throw TerminalStateError("terminal_value: state is not terminal");
  }
}

// Negamax over canonical states with memoization.
int negamax(const GameState& canonical, std::unordered_map<std::uint32_t, int>& memo) {
  Outcome o = outcome_of(canonical);
  if (o != Outcome::Ongoing) return terminal_value(canonical, o);
  std::uint32_t key = state_key(canonical);
  auto it = memo.find(key);
  if (it != memo.end()) return it->second;
  int best = -2;
  for (const Coord& m : legal_moves(canonical)) {
    int v = -negamax(canonicalize(apply_move(canonical, m)), memo);
    best = std::max(best, v);
  }
  memo.emplace(key, best);
  return best;
}

}  // namespace

SolvedTable SolvedTable::solve_all() {
  SolvedTable table;
  std::unordered_map<std::uint32_t, int> memo;

  GameState root;  // empty board, X to move: already canonical
  std::deque<GameState> queue{root};
  std::unordered_map<std::uint32_t, bool> seen{{state_key(root), true}};

  while (!queue.empty()) {
    GameState s = queue.front();
    queue.pop_front();
    ++table.reachable_;
    if (is_terminal(s)) continue;

    SolvedEntry entry;
    entry.state = s;
    for (const Coord& m : legal_moves(s)) {
      GameState child = canonicalize(apply_move(s, m));
      entry.moves.push_back(MoveEval{m, -negamax(child, memo), 0});
      std::uint32_t key = state_key(child);
      if (!seen.count(key)) {
        seen.emplace(key, true);
        queue.push_back(child);
      }
    }
    // legal_moves is row-major, so a stable sort by value keeps ties row-major.
    std::stable_sort(entry.moves.begin(), entry.moves.end(),
                     [](const MoveEval& a, const MoveEval& b) { return a.value > b.value; });
    for (size_t i = 0; i < entry.moves.size(); ++i) entry.moves[i].rank = static_cast<int>(i) + 1;
    entry.value = entry.moves.front().value;
    table.entries_.push_back(std::move(entry));
  }

  table.build_index();
  return table;
}

void SolvedTable::build_index() {
  index_.clear();
  index_.reserve(entries_.size());
  for (size_t i = 0; i < entries_.size(); ++i) {
    index_.emplace(state_key(entries_[i].state), static_cast<int>(i));
  }
}

const SolvedEntry* SolvedTable::find(const GameState& s) const {
  auto it = index_.find(state_key(canonicalize(s)));
  return it == index_.end() ? nullptr : &entries_[it->second];
}

const std::vector<MoveEval>& SolvedTable::rank_moves(const GameState& s) const {
  if (is_terminal(s)) throw TerminalStateError("rank_moves: state is terminal");
  const SolvedEntry* e = find(s);
  if (e == nullptr) throw TableIoError("rank_moves: state missing from table");
  return e->moves;
}

int SolvedTable::state_value(const GameState& s) const {
  Outcome o = outcome_of(s);
  if (o != Outcome::Ongoing) return terminal_value(s, o);
  const SolvedEntry* e = find(s);
  if (e == nullptr) throw TableIoError("state_value: state missing from table");
  return e->value;
}

double SolvedTable::optimality_percentile(const GameState& s, const Coord& m) const {
  const std::vector<MoveEval>& moves = rank_moves(s);
  const MoveEval* chosen = nullptr;
  for (const MoveEval& me : moves) {
    if (me.move == m) {
      chosen = &me;
      break;
    }
  }
  if (chosen == nullptr) throw IllegalMoveError("optimality_percentile: move is not legal here");
  size_t n = moves.size();
  if (n == 1) return 1.0;
  double rank_sum = 0;
  int tied = 0;
  for (const MoveEval& me : moves) {
    if (me.value == chosen->value) {
      rank_sum += me.rank;
      ++tied;
    }
  }
  double avg_rank = rank_sum / tied;
  return 1.0 - (avg_rank - 1.0) / (static_cast<double>(n) - 1.0);
}

void SolvedTable::save(const std::string& path) const {
  nlohmann::ordered_json doc;
  doc["format"] = "ttt-solved-v1";
  doc["reachable_states"] = reachable_;
  nlohmann::ordered_json entries = nlohmann::ordered_json::array();
  for (const SolvedEntry& e : entries_) {
    nlohmann::ordered_json je;
    je["state"] = board_string(e.state) + (e.state.to_move == Player::X ? "X" : "O");
    je["value"] = e.value;
    nlohmann::ordered_json moves = nlohmann::ordered_json::array();
    for (const MoveEval& m : e.moves) {
      moves.push_back({{"move", {m.move.x, m.move.y}}, {"value", m.value}, {"rank", m.rank}});
    }
    je["moves"] = std::move(moves);
    entries.push_back(std::move(je));
  }
  doc["entries"] = std::move(entries);

  std::ofstream out(path, std::ios::binary);
  if (!out) throw TableIoError("save: cannot open " + path);
  out << doc.dump(2) << '\n';
  if (!out) throw TableIoError("save: write failed for " + path);
}

SolvedTable SolvedTable::load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw TableIoError("load: cannot open " + path);
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    throw TableIoError(std::string("load: bad JSON: ") + e.what());
  }
  if (doc.value("format", "") != "ttt-solved-v1") throw TableIoError("load: unknown format");

  SolvedTable table;
  table.reachable_ = doc.at("reachable_states").get<int>();
  for (const auto& je : doc.at("entries")) {
    SolvedEntry e;
    std::string key = je.at("state").get<std::string>();
    if (key.size() != 10) throw TableIoError("load: bad state key");
    e.state = from_board_string(key.substr(0, 9), key[9] == 'X' ? Player::X : Player::O);
    e.value = je.at("value").get<int>();
    for (const auto& jm : je.at("moves")) {
      MoveEval m;
      m.move = Coord{jm.at("move")[0].get<int>(), jm.at("move")[1].get<int>()};
      m.value = jm.at("value").get<int>();
      m.rank = jm.at("rank").get<int>();
      e.moves.push_back(m);
    }
    table.entries_.push_back(std::move(e));
  }
  table.build_index();
  return table;
}

}  // namespace ttt
