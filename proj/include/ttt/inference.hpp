#pragma once

#include <atomic>
#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "ttt/game.hpp"
#include "ttt/rng.hpp"

namespace ttt {

struct NegativeProbability : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct EmptyTrace : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct BackendUnavailable : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct MalformedResponse : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct NoCoordinateFound : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct CoordinateOutOfRange : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct GenParams {
  double temperature = 0.1;
  double top_p = 1.0;
  int top_k = 0;        // 0 disables top-k truncation
  int beams = 2;
  int max_tokens = 10;
  int logprob_depth = 20;  // K alternatives reported per token
  // Sampling stream: backends must be deterministic given (prompt, seed,
  // attempt), independent of call interleaving. attempt distinguishes the
  // one permitted regeneration from the original call.
  std::uint64_t seed = 0;
  int attempt = 0;
};

// One emitted token plus the probability mass the backend reported for it.
// When the distribution is truncated to the top K alternatives, `residual`
// carries the unreported remainder and the entropy is the lower bound that
// treats the remainder as a single outcome.
struct TokenInfo {
  std::string token;
  std::vector<std::pair<std::string, double>> alternatives;  // (token, probability)
  bool truncated = false;
  double residual = 0.0;
  double entropy = 0.0;  // nats
};

struct TokenTrace {
  std::string text;
  std::vector<TokenInfo> tokens;
  std::vector<std::pair<std::string, std::string>> metadata;  // e.g. beams not honored
};

// Shannon entropy in nats; 0 * log 0 = 0. Throws NegativeProbability.
double token_entropy(const std::vector<double>& probs);

// Entropy of a truncated distribution: the residual mass enters as one
// pseudo-outcome, giving a lower bound on the true entropy.
double token_entropy_topk(const std::vector<double>& top_probs, double residual);

// Arithmetic mean of per-token entropies. Throws EmptyTrace.
double step_entropy(const TokenTrace& trace);

// Builds a TokenInfo from a full distribution; the chosen index names the
// emitted token.
TokenInfo make_token(const std::vector<std::pair<std::string, double>>& dist, size_t chosen);

// Completion backend. generate() is the single entry point and counts every
// call, probes and retries included.
class Backend {
 public:
  virtual ~Backend() = default;

  TokenTrace generate(const std::string& prompt, const GenParams& params) {
    query_count_.fetch_add(1, std::memory_order_relaxed);
    return do_generate(prompt, params);
  }

  std::uint64_t query_count() const { return query_count_.load(std::memory_order_relaxed); }

 private:
  virtual TokenTrace do_generate(const std::string& prompt, const GenParams& params) = 0;
  std::atomic<std::uint64_t> query_count_{0};
};

// First "(a,b)" integer pair in the text, tolerating whitespace inside the
// parentheses. Throws NoCoordinateFound / CoordinateOutOfRange.
Coord parse_move(const std::string& text);

struct MoveAttempt {
  Coord move;
  std::vector<TokenTrace> traces;  // one per generate call (1 or 2)
  bool used_fallback = false;
  // Step entropy of the trace that produced the move; for a fallback, of the
  // last generation.
  double entropy = 0.0;
};

// Generation protocol: generate once; on an unparseable or illegal move,
// regenerate exactly once; if still invalid, fall back to a uniformly random
// legal move. Both generations count as queries.
MoveAttempt move_with_retry(const std::string& prompt, const GameState& state,
                            const GenParams& params, Backend& backend, Rng& fallback_rng);

}  // namespace ttt
