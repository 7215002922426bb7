#pragma once

#include <string>
#include <vector>

#include "ttt/embedder.hpp"
#include "ttt/game.hpp"
#include "ttt/oracle.hpp"

namespace ttt {

struct BudgetTooSmall : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct DbIoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct RetrievalConfig {
  int k0 = 2;              // base example count
  double scale = 3.0;      // entropy multiplier
  int k_max = 10;          // cap on retrieved examples
  int token_budget = 512;  // prompt budget, estimated tokens
  double db_fraction = 0.2;
  std::uint64_t db_seed = 42;
};

struct DbEntry {
  GameState state;  // canonical
  Coord move;       // oracle best move for the state
  std::vector<double> embedding;
};

struct RetrievedExample {
  GameState state;
  Coord move;
  double similarity = 0.0;
};

// Embedded example store. Entry order is fixed by the sampling pass and acts
// as the tie-break for equal similarities.
class VectorDb {
 public:
  VectorDb() = default;
  explicit VectorDb(std::vector<DbEntry> entries) : entries_(std::move(entries)) {}

  size_t size() const { return entries_.size(); }
  const std::vector<DbEntry>& entries() const { return entries_; }

  void save(const std::string& path) const;   // JSON lines, one entry per line
  static VectorDb load(const std::string& path);

 private:
  std::vector<DbEntry> entries_;
};

// Embeds ceil(fraction * N) states sampled without replacement from the
// dataset order, seeded by cfg.db_seed. Deterministic membership and order.
VectorDb build_db(const std::vector<TrainExample>& dataset, const EncoderParams& params,
                  const RetrievalConfig& cfg);

// 0 when either vector has zero norm.
double cosine_sim(const std::vector<double>& a, const std::vector<double>& b);

// k = min(k_max, ceil(k0 + scale * H_q)), floored at min(k0, db_size) and
// capped at db_size. Monotone non-decreasing in H_q.
int adaptive_k(double h_q, const RetrievalConfig& cfg, size_t db_size);

// Top adaptive_k entries by cosine similarity to the encoded query state,
// most similar first; equal similarities keep insertion order.
std::vector<RetrievedExample> retrieve(const GameState& query, double h_q,
                                       const EncoderParams& params, const VectorDb& db,
                                       const RetrievalConfig& cfg);

struct PromptContext {
  std::vector<RetrievedExample> examples;  // similarity-descending
  GameState query;
  std::string text;
  int token_estimate = 0;
};

// Renders the full prompt. Drops the least similar examples until the
// estimate fits cfg.token_budget; throws BudgetTooSmall if even the bare
// prompt does not fit.
PromptContext build_prompt(const GameState& query, std::vector<RetrievedExample> examples,
                           const RetrievalConfig& cfg);

// Whitespace-delimited word count times 1.3, rounded up.
int estimate_tokens(const std::string& text);

// Recovers the query state from a rendered prompt (the scripted backend uses
// this to decide its reply). Throws BoardParseError if the section is absent.
GameState extract_query_state(const std::string& prompt);

}  // namespace ttt
