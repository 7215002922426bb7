#pragma once

#include <array>
#include <memory>
#include <string>
#include <vector>

#include "ttt/opponent.hpp"
#include "ttt/reasoner.hpp"
#include "ttt/stats.hpp"

namespace ttt {

struct IoFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class ContextMode { None, FixedSize, EntropyGuided };

struct MatchConfig {
  ContextMode context = ContextMode::None;
  int fixed_k = 4;  // examples per prompt when context == FixedSize
  ReasonerMode cot = ReasonerMode::Direct;
  int games = 100;
  std::uint64_t seed = 42;
  SkillPolicy opponent;
  ReasonerConfig reasoner;
  RetrievalConfig retrieval;
};

struct GameRecord {
  int index = 0;
  std::uint64_t seed = 0;
  Player starting_player = Player::X;
  std::vector<std::pair<Player, Coord>> moves;
  int score = 0;  // +1 agent win, 0 tie, -1 loss (the agent is always X)
  int queries = 0;
  int fallbacks = 0;
  std::vector<double> decision_entropies;
};

struct TournamentReport {
  MatchConfig config;
  int wins = 0;
  int ties = 0;
  int losses = 0;
  double s_percent = 0.0;      // 100 * (wins - losses) / games
  double mean_queries = 0.0;   // exact; presentation rounds separately
  int total_fallbacks = 0;
  std::vector<GameRecord> games;
};

// Everything a match needs beyond the configuration. The solved table is
// always required (opponent play and percentiles); the embedder and example
// store only for retrieval-backed context modes.
struct Components {
  const SolvedTable* table = nullptr;
  const EncoderParams* embedder = nullptr;
  const VectorDb* db = nullptr;
  Backend* backend = nullptr;
};

// Serves a constant number of nearest examples regardless of entropy.
class FixedContextProvider : public ContextProvider {
 public:
  FixedContextProvider(const VectorDb& db, const EncoderParams& params, RetrievalConfig cfg,
                       int k);
  std::string prompt_for(const GameState& canonical, Backend& backend) override;

 private:
  const VectorDb& db_;
  const EncoderParams& params_;
  RetrievalConfig cfg_;  // k0/k_max pinned to k, scale zeroed
};

// Probes once per decision with a zero-example prompt; the probe's step
// entropy drives adaptive_k for every prompt in that decision. The probe is a
// real generation and counts as a query.
class EntropyContextProvider : public ContextProvider {
 public:
  EntropyContextProvider(const VectorDb& db, const EncoderParams& params, RetrievalConfig cfg,
                         GenParams probe_params, std::uint64_t seed);
  void begin_decision(const GameState& root, Backend& backend) override;
  std::string prompt_for(const GameState& canonical, Backend& backend) override;

  double last_probe_entropy() const { return h_q_; }

 private:
  const VectorDb& db_;
  const EncoderParams& params_;
  RetrievalConfig cfg_;
  GenParams probe_params_;
  std::uint64_t seed_;
  std::uint64_t decisions_ = 0;
  double h_q_ = 0.0;
};

std::unique_ptr<ContextProvider> make_context_provider(const MatchConfig& cfg,
                                                       const Components& comp,
                                                       std::uint64_t game_seed);

// One full game: random starting player from the game seed, the agent as X,
// the ranked opponent as O, strict alternation until the outcome is decided.
GameRecord play_game(const MatchConfig& cfg, const Components& comp, int game_index);

TournamentReport run_tournament(const MatchConfig& cfg, const Components& comp);

enum class OptimalityCluster { Suboptimal, Moderate, NearOptimal };

struct StudyRecord {
  GameState state;
  Coord move;
  double entropy = 0.0;
  double percentile = 0.0;
  OptimalityCluster cluster = OptimalityCluster::Moderate;
};

struct EntropyStudy {
  int requested = 0;
  std::vector<StudyRecord> records;
  CorrelationResult spearman;
  CorrelationResult kendall;
  std::array<int, 3> cluster_counts{0, 0, 0};
};

// Samples non-terminal states, takes one direct (no-context, no-CoT) move
// per state, and correlates step entropy against the chosen move's
// optimality percentile. Percentile terciles at 1/3 and 2/3 define the
// clusters.
EntropyStudy entropy_study(int count, std::uint64_t seed, const Components& comp,
                           const RetrievalConfig& retrieval, const GenParams& gen);

// Deterministic serialization: fixed field order, shortest-round-trip floats.
// Reruns with identical inputs produce byte-identical files.
void write_tournament_json(const TournamentReport& report, const std::string& path);
void write_tournament_csv(const TournamentReport& report, const std::string& path);
void write_study_json(const EntropyStudy& study, std::uint64_t seed, const std::string& path);
void write_study_csv(const EntropyStudy& study, const std::string& path);

const char* to_string(ContextMode m);
const char* to_string(ReasonerMode m);
const char* to_string(RankOrientation o);
const char* to_string(OptimalityCluster c);

}  // namespace ttt
