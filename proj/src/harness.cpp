#include "ttt/harness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <sstream>

#include <nlohmann/json.hpp>

#include "ttt/oracle.hpp"

namespace ttt {
namespace {

using ordered_json = nlohmann::ordered_json;

// Per-game salt layout. Every random stream a game touches is derived from
// its game seed with a distinct salt, so streams never alias and games are
// independent of execution order.
constexpr std::uint64_t kGameSalt = 0x47414D45;      // per-game seed from the master seed
constexpr std::uint64_t kStartSalt = 0;              // starting-player bit
constexpr std::uint64_t kOpponentSalt = 1;           // opponent sampling stream
constexpr std::uint64_t kDecisionSalt = 3;           // (3, decision index) per agent decision
constexpr std::uint64_t kProviderSalt = 4;           // context-probe stream
constexpr std::uint64_t kStudySampleSalt = 0x53545544;  // state subsampling in the study

const char* player_tag(Player p) { return p == Player::X ? "X" : "O"; }

std::string coord_str(const Coord& c) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "(%d,%d)", c.x, c.y);
  return buf;
}

// Shortest round-trip decimal form, shared by the JSON and CSV writers so the
// two artifacts always show identical numbers.
std::string num_str(double v) { return ordered_json(v).dump(); }

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoFailure("cannot open for writing: " + path);
  out << text;
  if (!out) throw IoFailure("write failed: " + path);
}

ordered_json config_json(const MatchConfig& cfg) {
  ordered_json j;
  j["context"] = to_string(cfg.context);
  if (cfg.context == ContextMode::FixedSize) j["fixed_k"] = cfg.fixed_k;
  j["cot"] = to_string(cfg.cot);
  j["games"] = cfg.games;
  j["seed"] = cfg.seed;
  j["opponent"] = {{"skill", cfg.opponent.skill},
                   {"orientation", to_string(cfg.opponent.orientation)}};
  j["reasoner"] = {{"n_paths", cfg.reasoner.n_paths},
                   {"branch_cap", cfg.reasoner.branch_cap},
                   {"retained_k", cfg.reasoner.retained_k},
                   {"thresholds", cfg.reasoner.schedule.thresholds},
                   {"branches", cfg.reasoner.schedule.branches},
                   {"first_move_exempt", cfg.reasoner.first_move_exempt}};
  j["gen"] = {{"temperature", cfg.reasoner.gen.temperature},
              {"top_p", cfg.reasoner.gen.top_p},
              {"top_k", cfg.reasoner.gen.top_k},
              {"beams", cfg.reasoner.gen.beams},
              {"max_tokens", cfg.reasoner.gen.max_tokens},
              {"logprob_depth", cfg.reasoner.gen.logprob_depth}};
  j["retrieval"] = {{"k0", cfg.retrieval.k0},
                    {"scale", cfg.retrieval.scale},
                    {"k_max", cfg.retrieval.k_max},
                    {"token_budget", cfg.retrieval.token_budget},
                    {"db_fraction", cfg.retrieval.db_fraction},
                    {"db_seed", cfg.retrieval.db_seed}};
  return j;
}

}  // namespace

FixedContextProvider::FixedContextProvider(const VectorDb& db, const EncoderParams& params,
                                           RetrievalConfig cfg, int k)
    : db_(db), params_(params), cfg_(cfg) {
  if (k < 0) throw std::invalid_argument("fixed context size must be non-negative");
  cfg_.k0 = k;
  cfg_.k_max = k;
  cfg_.scale = 0.0;
}

std::string FixedContextProvider::prompt_for(const GameState& canonical, Backend&) {
  auto examples = retrieve(canonical, 0.0, params_, db_, cfg_);
  return build_prompt(canonical, std::move(examples), cfg_).text;
}

EntropyContextProvider::EntropyContextProvider(const VectorDb& db, const EncoderParams& params,
                                               RetrievalConfig cfg, GenParams probe_params,
                                               std::uint64_t seed)
    : db_(db), params_(params), cfg_(cfg), probe_params_(probe_params), seed_(seed) {}

void EntropyContextProvider::begin_decision(const GameState& root, Backend& backend) {
  const GameState canonical = canonicalize(root);
  const std::string probe_prompt = build_prompt(canonical, {}, cfg_).text;
  GenParams p = probe_params_;
  p.seed = mix_seed(seed_, decisions_);
  p.attempt = 0;
  ++decisions_;
  h_q_ = step_entropy(backend.generate(probe_prompt, p));
}

std::string EntropyContextProvider::prompt_for(const GameState& canonical, Backend& backend) {
  (void)backend;
  auto examples = retrieve(canonical, h_q_, params_, db_, cfg_);
  return build_prompt(canonical, std::move(examples), cfg_).text;
}

std::unique_ptr<ContextProvider> make_context_provider(const MatchConfig& cfg,
                                                       const Components& comp,
                                                       std::uint64_t game_seed) {
  switch (cfg.context) {
    case ContextMode::None:
      return std::make_unique<NoContextProvider>(cfg.retrieval);
    case ContextMode::FixedSize:
      if (!comp.db || !comp.embedder)
        throw std::invalid_argument("fixed context mode needs an example store and encoder");
      return std::make_unique<FixedContextProvider>(*comp.db, *comp.embedder, cfg.retrieval,
                                                    cfg.fixed_k);
    case ContextMode::EntropyGuided:
      if (!comp.db || !comp.embedder)
        throw std::invalid_argument("entropy context mode needs an example store and encoder");
      return std::make_unique<EntropyContextProvider>(*comp.db, *comp.embedder, cfg.retrieval,
                                                      cfg.reasoner.gen,
                                                      mix_seed(game_seed, kProviderSalt));
  }
  throw std::invalid_argument("unknown context mode");
}

GameRecord play_game(const MatchConfig& cfg, const Components& comp, int game_index) {
  if (!comp.table || !comp.backend)
    throw std::invalid_argument("play_game needs a solved table and a backend");

  GameRecord rec;
  rec.index = game_index;
  rec.seed = mix_seed(cfg.seed, kGameSalt, static_cast<std::uint64_t>(game_index));
  rec.starting_player = (mix_seed(rec.seed, kStartSalt) & 1u) ? Player::O : Player::X;

  GameState state;
  state.to_move = rec.starting_player;
  Rng opponent_rng(mix_seed(rec.seed, kOpponentSalt));
  auto provider = make_context_provider(cfg, comp, rec.seed);

  const std::uint64_t queries_before = comp.backend->query_count();
  int decision = 0;
  while (outcome_of(state) == Outcome::Ongoing) {
    if (state.to_move == Player::X) {
      const DecisionResult r =
          decide_move(cfg.cot, state, decision, *provider, *comp.backend, cfg.reasoner,
                      mix_seed(rec.seed, kDecisionSalt, static_cast<std::uint64_t>(decision)));
      rec.decision_entropies.push_back(r.entropy);
      rec.fallbacks += r.fallbacks;
      rec.moves.emplace_back(Player::X, r.move);
      state = apply_move(state, r.move);
      ++decision;
    } else {
      const Coord m = sample_move(state, cfg.opponent, *comp.table, opponent_rng);
      rec.moves.emplace_back(Player::O, m);
      state = apply_move(state, m);
    }
  }
  rec.queries = static_cast<int>(comp.backend->query_count() - queries_before);

  switch (outcome_of(state)) {
    case Outcome::XWins: rec.score = 1; break;
    case Outcome::OWins: rec.score = -1; break;
    default: rec.score = 0; break;
  }
  return rec;
}

TournamentReport run_tournament(const MatchConfig& cfg, const Components& comp) {
  if (cfg.games < 1) throw std::invalid_argument("a tournament needs at least one game");

  TournamentReport report;
  report.config = cfg;
  long long total_queries = 0;
  for (int i = 0; i < cfg.games; ++i) {
    GameRecord rec = play_game(cfg, comp, i);
    if (rec.score > 0)
      ++report.wins;
    else if (rec.score < 0)
      ++report.losses;
    else
      ++report.ties;
    total_queries += rec.queries;
    report.total_fallbacks += rec.fallbacks;
    report.games.push_back(std::move(rec));
  }
  report.s_percent = 100.0 * (report.wins - report.losses) / cfg.games;
  report.mean_queries = static_cast<double>(total_queries) / cfg.games;
  return report;
}

EntropyStudy entropy_study(int count, std::uint64_t seed, const Components& comp,
                           const RetrievalConfig& retrieval, const GenParams& gen) {
  if (!comp.table || !comp.backend)
    throw std::invalid_argument("entropy_study needs a solved table and a backend");
  if (count < 1) throw std::invalid_argument("entropy_study needs at least one state");

  const auto& entries = comp.table->entries();
  const size_t take = std::min(static_cast<size_t>(count), entries.size());

  // Sample without replacement: the first `take` draws of a seeded partial
  // Fisher-Yates over the table's stable enumeration order.
  std::vector<size_t> order(entries.size());
  std::iota(order.begin(), order.end(), size_t{0});
  Rng shuffle_rng(mix_seed(seed, kStudySampleSalt));
  for (size_t i = 0; i < take; ++i) {
    const size_t j = i + static_cast<size_t>(shuffle_rng.next_below(
                             static_cast<int>(order.size() - i)));
    std::swap(order[i], order[j]);
  }

  EntropyStudy study;
  study.requested = count;
  NoContextProvider context(retrieval);
  ReasonerConfig rc;
  rc.gen = gen;

  std::vector<double> entropies, percentiles;
  entropies.reserve(take);
  percentiles.reserve(take);
  for (size_t i = 0; i < take; ++i) {
    const GameState& state = entries[order[i]].state;
    const DecisionResult r =
        direct_move(state, context, *comp.backend, rc,
                    mix_seed(seed, kDecisionSalt, static_cast<std::uint64_t>(i)));
    StudyRecord rec;
    rec.state = state;
    rec.move = r.move;
    rec.entropy = r.entropy;
    rec.percentile = comp.table->optimality_percentile(state, r.move);
    rec.cluster = rec.percentile < 1.0 / 3.0   ? OptimalityCluster::Suboptimal
                  : rec.percentile < 2.0 / 3.0 ? OptimalityCluster::Moderate
                                               : OptimalityCluster::NearOptimal;
    ++study.cluster_counts[static_cast<int>(rec.cluster)];
    entropies.push_back(rec.entropy);
    percentiles.push_back(rec.percentile);
    study.records.push_back(std::move(rec));
  }

  study.spearman = spearman(entropies, percentiles);
  study.kendall = kendall(entropies, percentiles);
  return study;
}

void write_tournament_json(const TournamentReport& report, const std::string& path) {
  ordered_json j;
  j["format"] = "ttt-report-v1";
  j["config"] = config_json(report.config);

  char s_disp[32];
  std::snprintf(s_disp, sizeof s_disp, "%+.1f%%", report.s_percent);
  ordered_json summary;
  summary["wins"] = report.wins;
  summary["ties"] = report.ties;
  summary["losses"] = report.losses;
  summary["s_percent"] = report.s_percent;
  summary["s_display"] = s_disp;
  summary["mean_queries"] = report.mean_queries;
  summary["mean_queries_display"] = static_cast<long long>(std::llround(report.mean_queries));
  summary["total_fallbacks"] = report.total_fallbacks;
  j["summary"] = std::move(summary);

  ordered_json games = ordered_json::array();
  for (const auto& g : report.games) {
    ordered_json rec;
    rec["index"] = g.index;
    rec["seed"] = g.seed;
    rec["starting_player"] = player_tag(g.starting_player);
    rec["score"] = g.score;
    rec["queries"] = g.queries;
    rec["fallbacks"] = g.fallbacks;
    ordered_json moves = ordered_json::array();
    for (const auto& [player, move] : g.moves)
      moves.push_back(std::string(player_tag(player)) + coord_str(move));
    rec["moves"] = std::move(moves);
    rec["decision_entropies"] = g.decision_entropies;
    games.push_back(std::move(rec));
  }
  j["games"] = std::move(games);

  write_text_file(path, j.dump(2) + "\n");
}

void write_tournament_csv(const TournamentReport& report, const std::string& path) {
  std::ostringstream out;
  out << "game,seed,starting_player,score,queries,fallbacks,moves\n";
  for (const auto& g : report.games) {
    out << g.index << ',' << g.seed << ',' << player_tag(g.starting_player) << ',' << g.score
        << ',' << g.queries << ',' << g.fallbacks << ',';
    for (size_t i = 0; i < g.moves.size(); ++i) {
      if (i) out << ';';
      out << player_tag(g.moves[i].first) << coord_str(g.moves[i].second);
    }
    out << '\n';
  }
  write_text_file(path, out.str());
}

void write_study_json(const EntropyStudy& study, std::uint64_t seed, const std::string& path) {
  ordered_json j;
  j["format"] = "ttt-entropy-study-v1";
  j["seed"] = seed;
  j["requested"] = study.requested;
  j["evaluated"] = study.records.size();

  ordered_json corr;
  corr["spearman_rho"] = study.spearman.stat;
  corr["spearman_p"] = study.spearman.p;
  corr["kendall_tau"] = study.kendall.stat;
  corr["kendall_p"] = study.kendall.p;
  corr["degenerate"] = study.spearman.degenerate || study.kendall.degenerate;
  corr["p_value_methods"] = {
      {"spearman", "two-sided t approximation, df = n - 2"},
      {"kendall", "two-sided normal approximation with tie-corrected variance"}};
  j["correlation"] = std::move(corr);

  j["clusters"] = {{"suboptimal", study.cluster_counts[0]},
                   {"moderate", study.cluster_counts[1]},
                   {"near_optimal", study.cluster_counts[2]},
                   {"boundaries", {1.0 / 3.0, 2.0 / 3.0}}};

  ordered_json records = ordered_json::array();
  for (const auto& r : study.records) {
    ordered_json rec;
    rec["board"] = board_string(r.state);
    rec["mover"] = "X";  // table entries are canonical
    rec["move"] = {r.move.x, r.move.y};
    rec["entropy"] = r.entropy;
    rec["percentile"] = r.percentile;
    rec["cluster"] = to_string(r.cluster);
    records.push_back(std::move(rec));
  }
  j["records"] = std::move(records);

  write_text_file(path, j.dump(2) + "\n");
}

void write_study_csv(const EntropyStudy& study, const std::string& path) {
  std::ostringstream out;
  out << "board,mover,move_x,move_y,entropy,percentile,cluster\n";
  for (const auto& r : study.records) {
    out << board_string(r.state) << ",X," << r.move.x << ',' << r.move.y << ','
        << num_str(r.entropy) << ',' << num_str(r.percentile) << ',' << to_string(r.cluster)
        << '\n';
  }
  write_text_file(path, out.str());
}

const char* to_string(ContextMode m) {
  switch (m) {
    case ContextMode::None: return "none";
    case ContextMode::FixedSize: return "fixed";
    case ContextMode::EntropyGuided: return "entropy";
  }
  return "?";
}

const char* to_string(ReasonerMode m) {
  switch (m) {
    case ReasonerMode::Direct: return "none";
    case ReasonerMode::SingleCot: return "single";
    case ReasonerMode::MultiCot: return "multi";
    case ReasonerMode::TreeCot: return "tree";
    case ReasonerMode::EntropyGuided: return "entropy";
  }
  return "?";
}

const char* to_string(RankOrientation o) {
  return o == RankOrientation::StrengthAligned ? "strength-aligned" : "literal";
}

const char* to_string(OptimalityCluster c) {
  switch (c) {
    case OptimalityCluster::Suboptimal: return "suboptimal";
    case OptimalityCluster::Moderate: return "moderate";
    case OptimalityCluster::NearOptimal: return "near_optimal";
  }
  return "?";
}

}  // namespace ttt
