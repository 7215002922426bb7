#pragma once

#include <functional>
#include <optional>

#include "ttt/inference.hpp"
#include "ttt/oracle.hpp"

namespace ttt {

// What a scripted policy sees for one generate() call.
struct ScriptedRequest {
  std::string prompt;
  GenParams params;
  std::optional<GameState> state;  // query state parsed from the prompt, if present
  std::uint64_t rng_seed = 0;      // deterministic per (backend seed, prompt, params)
};

using ScriptedPolicy = std::function<TokenTrace(const ScriptedRequest&)>;

// Deterministic test double for a completion endpoint. Output depends only on
// (seed, prompt, params.seed, params.attempt), never on call order, so
// interleaved games cannot perturb each other.
class ScriptedBackend : public Backend {
 public:
  ScriptedBackend(ScriptedPolicy policy, std::uint64_t seed)
      : policy_(std::move(policy)), seed_(seed) {}

 private:
  TokenTrace do_generate(const std::string& prompt, const GenParams& params) override;

  ScriptedPolicy policy_;
  std::uint64_t seed_;
};

// Single-token trace "(x,y)" whose token entropy equals target_entropy (in
// nats, clamped to [0, ln 9]); the distribution spreads residual probability
// evenly over the other eight cells.
TokenTrace make_move_trace(const Coord& move, double target_entropy);

// Solves p_chosen vs the rest so a (1 - eps, eps/(n-1), ...) distribution over
// n outcomes has the given entropy; returns eps. Exposed for tests.
double entropy_mix_epsilon(int n, double target_entropy);

// Always plays the first legal cell in row-major order.
ScriptedPolicy first_legal_policy(double entropy = 0.0);

// Always plays the oracle's rank-1 move.
ScriptedPolicy oracle_policy(const SolvedTable& table, double entropy = 0.0);

// Plays a seeded-random legal move and reports entropy
//   scale * (1 - optimality percentile of that move) + uniform(-noise, +noise)
// clamped to be non-negative. With scale = 1 this mirrors move quality
// directly; larger scales push more steps over the branching thresholds.
ScriptedPolicy entropy_mirror_policy(const SolvedTable& table, double scale = 1.0,
                                     double noise = 0.05);

// Emits the same text on every call (for protocol tests).
ScriptedPolicy fixed_text_policy(std::string text, double entropy = 0.0);

// Emits junk on attempt 0 and delegates to `valid` on the retry.
ScriptedPolicy invalid_then_policy(ScriptedPolicy valid);

// Emits junk on every attempt, forcing the random-move fallback.
ScriptedPolicy always_invalid_policy();

}  // namespace ttt
