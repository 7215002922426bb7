#pragma once

#include <vector>

#include "ttt/inference.hpp"
#include "ttt/retrieval.hpp"

namespace ttt {

enum class ReasonerMode { Direct, SingleCot, MultiCot, TreeCot, EntropyGuided };

// Maps a step entropy to a branch count: branches[j] applies on
// [thresholds[j], thresholds[j+1]), the last interval extending to infinity.
struct ThresholdSchedule {
  std::vector<double> thresholds{0.0, 0.5, 1.0};
  std::vector<int> branches{1, 2, 3};

  int branches_for(double step_entropy) const;
  void validate() const;  // throws std::invalid_argument
};

struct ReasonerConfig {
  int n_paths = 3;      // parallel rollouts for MultiCot
  int branch_cap = 3;   // candidate moves per mover node in TreeCot
  int retained_k = 10;  // paths kept after each expansion level
  ThresholdSchedule schedule;
  bool first_move_exempt = true;  // the agent's first decision skips CoT
  GenParams gen;
};

// Builds the prompt for each state a reasoning step touches. An
// implementation may spend backend queries of its own (the adaptive-context
// provider probes for entropy once per decision via begin_decision).
class ContextProvider {
 public:
  virtual ~ContextProvider() = default;
  virtual void begin_decision(const GameState& /*root*/, Backend& /*backend*/) {}
  virtual std::string prompt_for(const GameState& canonical, Backend& backend) = 0;
};

// Zero-example prompts.
class NoContextProvider : public ContextProvider {
 public:
  NoContextProvider() = default;
  explicit NoContextProvider(RetrievalConfig cfg) : cfg_(cfg) {}
  std::string prompt_for(const GameState& canonical, Backend&) override {
    return build_prompt(canonical, {}, cfg_).text;
  }

 private:
  RetrievalConfig cfg_;
};

// One simulated line of play. steps[i].state is the position before
// steps[i].move; consecutive states are connected by apply_move.
struct CotStep {
  GameState state;
  Coord move;
};

struct CotPath {
  std::vector<CotStep> steps;
  std::vector<double> step_entropies;  // one per generated step
  double mean_entropy = 0.0;
  GameState final_state;
  bool truncated = false;  // stopped at the 9-ply horizon instead of a terminal
  int fallbacks = 0;
};

struct DecisionResult {
  Coord move;
  double entropy = 0.0;  // step entropy of the first generation at the root
  int queries = 0;       // generate calls spent on this decision, probes included
  int fallbacks = 0;
  int max_live_paths = 1;  // peak retained-path count (for the k bound)
};

// One generation round at the state.
DecisionResult direct_move(const GameState& state, ContextProvider& context, Backend& backend,
                           const ReasonerConfig& cfg, std::uint64_t seed);

// Alternates generated moves for both sides until a terminal state or the
// 9-ply horizon.
CotPath rollout_path(const GameState& state, ContextProvider& context, Backend& backend,
                     const ReasonerConfig& cfg, std::uint64_t path_seed);

DecisionResult single_cot(const GameState& state, ContextProvider& context, Backend& backend,
                          const ReasonerConfig& cfg, std::uint64_t seed);

// n_paths rollouts; majority vote on the first action, ties broken by the
// lowest mean path entropy, then row-major.
DecisionResult multi_cot(const GameState& state, ContextProvider& context, Backend& backend,
                         const ReasonerConfig& cfg, std::uint64_t seed);

// Expands up to branch_cap generated candidates per mover node and every
// legal reply per opponent node, pruning to retained_k paths by mean step
// entropy after each level. Among surviving terminal paths, wins beat ties
// beat losses; lower mean entropy, then the row-major first action, settle
// the rest.
DecisionResult tree_cot(const GameState& state, ContextProvider& context, Backend& backend,
                        const ReasonerConfig& cfg, std::uint64_t seed);

// Probe-generates at each mover step and widens to schedule(entropy)
// branches, capped by the number of legal moves; opponent steps continue each
// path with a single generation. Pruning and final selection follow tree_cot.
// turn_index 0 with first_move_exempt returns the direct move.
DecisionResult entropy_guided_cot(const GameState& state, ContextProvider& context,
                                  Backend& backend, const ReasonerConfig& cfg, int turn_index,
                                  std::uint64_t seed);

// Mode dispatch. first_move_exempt short-circuits every CoT mode to the
// direct move on the agent's first decision of a game.
DecisionResult decide_move(ReasonerMode mode, const GameState& state, int turn_index,
                           ContextProvider& context, Backend& backend, const ReasonerConfig& cfg,
                           std::uint64_t seed);

}  // namespace ttt
