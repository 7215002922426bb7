#include <cmath>

#include "ttt/retrieval.hpp"

namespace ttt {

namespace {

// Section headings reproduce the reference transcript byte-for-byte,
// including the trailing spaces and the spelling of "CORRISPONDING".
constexpr const char* kExamplesHeading = "EXAMPLES OF BOARDS AND \nCORRISPONDING OPTIMAL MOVES:\n";
constexpr const char* kStateHeading = "CURRENT GAME STATE: \n";

std::string coord_text(const Coord& c) {
  return "(" + std::to_string(c.x) + "," + std::to_string(c.y) + ")";
}

std::string render_prompt(const GameState& query,
                          const std::vector<RetrievedExample>& examples) {
  std::string out;
  if (!examples.empty()) {
    out += kExamplesHeading;
    for (size_t i = 0; i < examples.size(); ++i) {
      out += "\nExample " + std::to_string(i + 1) + ": \n";
      out += "Board:\n";
      out += render_board(examples[i].state);
      out += "\nOptimal move: " + coord_text(examples[i].move) + "\n";
    }
    out += "\n";
  }
  out += kStateHeading;
  out += "You are playing Tic-Tac-Toe as X.\n";
  out += "The opponent is O.\n";
  out += "Current board (3x3, _ for empty):\n";
  out += render_board(query);
  out += "\n\nEmpty positions (x,y): \n";
  const std::vector<Coord> empties = legal_moves(query);
  for (size_t i = 0; i < empties.size(); ++i) {
    if (i > 0) out += ", ";
    out += coord_text(empties[i]);
  }
  out += "\n\nYou are X.\n";
  out += "Your next move in (x,y) format is:";
  return out;
}

}  // namespace

int estimate_tokens(const std::string& text) {
  int words = 0;
  bool in_word = false;
  for (char ch : text) {
    bool space = ch == ' ' || ch == '\n' || ch == '\t' || ch == '\r';
    if (!space && !in_word) ++words;
    in_word = !space;
  }
  return static_cast<int>(std::ceil(words * 1.3));
}

PromptContext build_prompt(const GameState& query, std::vector<RetrievedExample> examples,
                           const RetrievalConfig& cfg) {
  PromptContext ctx;
  ctx.query = query;
  ctx.examples = std::move(examples);
  ctx.text = render_prompt(query, ctx.examples);
  ctx.token_estimate = estimate_tokens(ctx.text);

  // Least similar examples go first; retrieve() returns similarity-descending
  // order, so dropping from the back keeps the strongest matches.
  while (ctx.token_estimate > cfg.token_budget && !ctx.examples.empty()) {
    ctx.examples.pop_back();
    ctx.text = render_prompt(query, ctx.examples);
    ctx.token_estimate = estimate_tokens(ctx.text);
  }
  if (ctx.token_estimate > cfg.token_budget) {
    throw BudgetTooSmall("build_prompt: bare prompt needs " + std::to_string(ctx.token_estimate) +
                         " tokens, budget is " + std::to_string(cfg.token_budget));
  }
  return ctx;
}

GameState extract_query_state(const std::string& prompt) {
  const std::string marker = "Current board (3x3, _ for empty):\n";
  size_t pos = prompt.find(marker);
  if (pos == std::string::npos) {
    throw BoardParseError("extract_query_state: board section not found");
  }
  size_t start = pos + marker.size();
  // Three rendered board lines follow the marker.
  size_t end = start;
  for (int lines = 0; lines < 3; ++lines) {
    end = prompt.find('\n', end);
    if (end == std::string::npos) {
      end = prompt.size();
      break;
    }
    if (lines < 2) ++end;
  }
  return parse_board(prompt.substr(start, end - start), Player::X);
}

}  // namespace ttt
