#include "ttt/reasoner.hpp"

#include <algorithm>
#include <map>
#include <stdexcept>

namespace ttt {

namespace {

constexpr std::uint64_t kFallbackSalt = 0xFA11BACCULL;
constexpr std::uint64_t kRootBranch = 1;

double mean_of(const std::vector<double>& v) {
  if (v.empty()) return 0.0;
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

// One generation round: prompt, retry protocol, seeded fallback.
MoveAttempt generate_move(const GameState& canonical, ContextProvider& context, Backend& backend,
                          const GenParams& base, std::uint64_t call_seed) {
  std::string prompt = context.prompt_for(canonical, backend);
  GenParams params = base;
  params.seed = call_seed;
  Rng fallback(mix_seed(call_seed, kFallbackSalt));
  return move_with_retry(prompt, canonical, params, backend, fallback);
}

struct Branch {
  CotPath path;
  std::uint64_t id = kRootBranch;
};

bool branch_done(const Branch& b) { return is_terminal(b.path.final_state) || b.path.truncated; }

// Outcome class for the player who was to move at the root: win 2, tie 1
// (horizon truncation counts as a tie), loss 0.
int outcome_class(const CotPath& path, Player root_player) {
  if (path.truncated) return 1;
  switch (outcome_of(path.final_state)) {
    case Outcome::Tie: return 1;
    case Outcome::XWins: return root_player == Player::X ? 2 : 0;
    case Outcome::OWins: return root_player == Player::O ? 2 : 0;
    default: return 1;
  }
}

void refresh_mean(Branch& b) { b.path.mean_entropy = mean_of(b.path.step_entropies); }

// Keeps the retained_k most certain paths (lowest mean step entropy). The
// sort is stable, so equal means keep their expansion order.
void prune(std::vector<Branch>& pool, int retained_k) {
  if (static_cast<int>(pool.size()) <= retained_k) return;
  std::stable_sort(pool.begin(), pool.end(), [](const Branch& a, const Branch& b) {
    return a.path.mean_entropy < b.path.mean_entropy;
  });
  pool.resize(static_cast<size_t>(retained_k));
}

Branch extend(const Branch& parent, const GameState& state, const Coord& move,
              const double* entropy, int fallbacks, std::uint64_t child_ordinal) {
  Branch child = parent;
  child.path.steps.push_back(CotStep{state, move});
  if (entropy != nullptr) child.path.step_entropies.push_back(*entropy);
  child.path.fallbacks += fallbacks;
  child.path.final_state = apply_move(state, move);
  if (!is_terminal(child.path.final_state) && child.path.steps.size() >= 9) {
    child.path.truncated = true;
  }
  refresh_mean(child);
  child.id = mix_seed(parent.id, 1000 + child_ordinal);
  return child;
}

// Shared final selection: best outcome class, then lowest mean entropy, then
// row-major first action.
const Branch& select_branch(const std::vector<Branch>& pool, Player root_player) {
  const Branch* best = &pool.front();
  for (const Branch& b : pool) {
    int oc_b = outcome_class(b.path, root_player);
    int oc_best = outcome_class(best->path, root_player);
    if (oc_b != oc_best) {
      if (oc_b > oc_best) best = &b;
      continue;
    }
    if (b.path.mean_entropy != best->path.mean_entropy) {
      if (b.path.mean_entropy < best->path.mean_entropy) best = &b;
      continue;
    }
    if (coord_less(b.path.steps.front().move, best->path.steps.front().move)) best = &b;
  }
  return *best;
}

int count_queries(Backend& backend, std::uint64_t since) {
  return static_cast<int>(backend.query_count() - since);
}

}  // namespace

int ThresholdSchedule::branches_for(double step_entropy) const {
  int out = branches.front();
  for (size_t j = 0; j < thresholds.size(); ++j) {
    if (step_entropy >= thresholds[j]) out = branches[j];
  }
  return out;
}

void ThresholdSchedule::validate() const {
  if (thresholds.empty() || thresholds.size() != branches.size()) {
    throw std::invalid_argument("schedule: need one branch count per threshold");
  }
  if (thresholds.front() != 0.0) throw std::invalid_argument("schedule: first threshold must be 0");
  for (size_t i = 1; i < thresholds.size(); ++i) {
    if (thresholds[i] <= thresholds[i - 1]) {
      throw std::invalid_argument("schedule: thresholds must increase strictly");
    }
  }
  for (int n : branches) {
    if (n < 1) throw std::invalid_argument("schedule: branch counts must be positive");
  }
}

DecisionResult direct_move(const GameState& state, ContextProvider& context, Backend& backend,
                           const ReasonerConfig& cfg, std::uint64_t seed) {
  std::uint64_t q0 = backend.query_count();
  context.begin_decision(state, backend);
  MoveAttempt att = generate_move(canonicalize(state), context, backend, cfg.gen,
                                  mix_seed(seed, kRootBranch, 0, 0));
  DecisionResult r;
  r.move = att.move;
  r.entropy = att.entropy;
  r.fallbacks = att.used_fallback ? 1 : 0;
  r.queries = count_queries(backend, q0);
  return r;
}

CotPath rollout_path(const GameState& state, ContextProvider& context, Backend& backend,
                     const ReasonerConfig& cfg, std::uint64_t path_seed) {
  CotPath path;
  GameState cur = state;
  int step = 0;
  while (!is_terminal(cur) && step < 9) {
    MoveAttempt att = generate_move(canonicalize(cur), context, backend, cfg.gen,
                                    mix_seed(path_seed, static_cast<std::uint64_t>(step)));
    // Canonicalization only relabels marks, so the move applies to cur as-is.
    path.steps.push_back(CotStep{cur, att.move});
    path.step_entropies.push_back(att.entropy);
    if (att.used_fallback) ++path.fallbacks;
    cur = apply_move(cur, att.move);
    ++step;
  }
  path.final_state = cur;
  path.truncated = !is_terminal(cur);
  path.mean_entropy = mean_of(path.step_entropies);
  return path;
}

DecisionResult single_cot(const GameState& state, ContextProvider& context, Backend& backend,
                          const ReasonerConfig& cfg, std::uint64_t seed) {
  std::uint64_t q0 = backend.query_count();
  context.begin_decision(state, backend);
  CotPath path = rollout_path(state, context, backend, cfg, mix_seed(seed, kRootBranch));
  DecisionResult r;
  r.move = path.steps.front().move;
  r.entropy = path.step_entropies.front();
  r.fallbacks = path.fallbacks;
  r.queries = count_queries(backend, q0);
  return r;
}

DecisionResult multi_cot(const GameState& state, ContextProvider& context, Backend& backend,
                         const ReasonerConfig& cfg, std::uint64_t seed) {
  std::uint64_t q0 = backend.query_count();
  context.begin_decision(state, backend);

  std::vector<CotPath> paths;
  paths.reserve(static_cast<size_t>(cfg.n_paths));
  for (int j = 0; j < cfg.n_paths; ++j) {
    paths.push_back(
        rollout_path(state, context, backend, cfg, mix_seed(seed, kRootBranch, 100 + j)));
  }

  // Vote over first actions; Coord keys ordered row-major so equal-entropy
  // ties resolve to the lowest coordinate.
  std::map<int, std::pair<int, double>> votes;  // cell -> (count, entropy sum)
  for (const CotPath& p : paths) {
    auto& v = votes[cell_index(p.steps.front().move)];
    v.first += 1;
    v.second += p.mean_entropy;
  }
  int best_cell = -1;
  int best_count = 0;
  double best_mean = 0.0;
  for (const auto& [cell, v] : votes) {
    double mean = v.second / v.first;
    bool take = v.first > best_count ||
                (v.first == best_count && mean < best_mean);  // row-major via map order
    if (best_cell < 0 || take) {
      best_cell = cell;
      best_count = v.first;
      best_mean = mean;
    }
  }

  DecisionResult r;
  r.move = coord_of(best_cell);
  r.entropy = paths.front().step_entropies.front();
  for (const CotPath& p : paths) r.fallbacks += p.fallbacks;
  r.max_live_paths = cfg.n_paths;
  r.queries = count_queries(backend, q0);
  return r;
}

DecisionResult tree_cot(const GameState& state, ContextProvider& context, Backend& backend,
                        const ReasonerConfig& cfg, std::uint64_t seed) {
  std::uint64_t q0 = backend.query_count();
  context.begin_decision(state, backend);
  const Player root_player = state.to_move;

  Branch root;
  root.path.final_state = state;
  std::vector<Branch> pool{root};

  DecisionResult r;
  bool root_entropy_set = false;
  int level = 0;
  while (std::any_of(pool.begin(), pool.end(), [](const Branch& b) { return !branch_done(b); })) {
    std::vector<Branch> next;
    for (const Branch& b : pool) {
      if (branch_done(b)) {
        next.push_back(b);
        continue;
      }
      const GameState& s = b.path.final_state;
      GameState canon = canonicalize(s);
      if (s.to_move == root_player) {
        // Mover node: up to branch_cap generated candidates, deduplicated.
        int draws = std::min(cfg.branch_cap, static_cast<int>(legal_moves(s).size()));
        std::vector<Coord> seen;
        for (int c = 0; c < draws; ++c) {
          MoveAttempt att = generate_move(
              canon, context, backend, cfg.gen,
              mix_seed(seed, b.id, static_cast<std::uint64_t>(level), static_cast<std::uint64_t>(c)));
          if (!root_entropy_set) {
            r.entropy = att.entropy;
            root_entropy_set = true;
          }
          if (std::find(seen.begin(), seen.end(), att.move) != seen.end()) continue;
          seen.push_back(att.move);
          next.push_back(extend(b, s, att.move, &att.entropy, att.used_fallback ? 1 : 0,
                                static_cast<std::uint64_t>(c)));
        }
      } else {
        // Opponent node: every legal reply, simulated by the engine; no
        // generation and no entropy contribution.
        std::vector<Coord> replies = legal_moves(s);
        for (size_t m = 0; m < replies.size(); ++m) {
          next.push_back(extend(b, s, replies[m], nullptr, 0, m));
        }
      }
    }
    prune(next, cfg.retained_k);
    pool = std::move(next);
    r.max_live_paths = std::max(r.max_live_paths, static_cast<int>(pool.size()));
    ++level;
  }

  const Branch& best = select_branch(pool, root_player);
  r.move = best.path.steps.front().move;
  for (const Branch& b : pool) r.fallbacks += b.path.fallbacks;
  r.queries = count_queries(backend, q0);
  return r;
}

DecisionResult entropy_guided_cot(const GameState& state, ContextProvider& context,
                                  Backend& backend, const ReasonerConfig& cfg, int turn_index,
                                  std::uint64_t seed) {
  if (turn_index == 0 && cfg.first_move_exempt) {
    // First decision of a game: near-symmetric board, no branching value.
    return direct_move(state, context, backend, cfg, seed);
  }

  std::uint64_t q0 = backend.query_count();
  context.begin_decision(state, backend);
  const Player root_player = state.to_move;

  Branch root;
  root.path.final_state = state;
  std::vector<Branch> pool{root};

  DecisionResult r;
  bool root_entropy_set = false;
  int level = 0;
  while (std::any_of(pool.begin(), pool.end(), [](const Branch& b) { return !branch_done(b); })) {
    std::vector<Branch> next;
    for (const Branch& b : pool) {
      if (branch_done(b)) {
        next.push_back(b);
        continue;
      }
      const GameState& s = b.path.final_state;
      GameState canon = canonicalize(s);
      auto call_seed = [&](int c) {
        return mix_seed(seed, b.id, static_cast<std::uint64_t>(level),
                        static_cast<std::uint64_t>(c));
      };
      if (s.to_move == root_player) {
        // The probe generation supplies the step entropy for the branching
        // decision and doubles as the first candidate.
        MoveAttempt probe = generate_move(canon, context, backend, cfg.gen, call_seed(0));
        if (!root_entropy_set) {
          r.entropy = probe.entropy;
          root_entropy_set = true;
        }
        int n = std::min(cfg.schedule.branches_for(probe.entropy),
                         static_cast<int>(legal_moves(s).size()));
        std::vector<Coord> seen{probe.move};
        next.push_back(extend(b, s, probe.move, &probe.entropy, probe.used_fallback ? 1 : 0, 0));
        for (int c = 1; c < n; ++c) {
          MoveAttempt att = generate_move(canon, context, backend, cfg.gen, call_seed(c));
          if (std::find(seen.begin(), seen.end(), att.move) != seen.end()) continue;
          seen.push_back(att.move);
          next.push_back(extend(b, s, att.move, &att.entropy, att.used_fallback ? 1 : 0,
                                static_cast<std::uint64_t>(c)));
        }
      } else {
        // Opponent step: simulated by the backend, one continuation per path.
        MoveAttempt att = generate_move(canon, context, backend, cfg.gen, call_seed(0));
        next.push_back(extend(b, s, att.move, &att.entropy, att.used_fallback ? 1 : 0, 0));
      }
    }
    prune(next, cfg.retained_k);
    pool = std::move(next);
    r.max_live_paths = std::max(r.max_live_paths, static_cast<int>(pool.size()));
    ++level;
  }

  const Branch& best = select_branch(pool, root_player);
  r.move = best.path.steps.front().move;
  for (const Branch& b : pool) r.fallbacks += b.path.fallbacks;
  r.queries = count_queries(backend, q0);
  return r;
}

DecisionResult decide_move(ReasonerMode mode, const GameState& state, int turn_index,
                           ContextProvider& context, Backend& backend, const ReasonerConfig& cfg,
                           std::uint64_t seed) {
  bool exempt = turn_index == 0 && cfg.first_move_exempt;
  switch (mode) {
    case ReasonerMode::Direct:
      return direct_move(state, context, backend, cfg, seed);
    case ReasonerMode::SingleCot:
      return exempt ? direct_move(state, context, backend, cfg, seed)
                    : single_cot(state, context, backend, cfg, seed);
    case ReasonerMode::MultiCot:
      return exempt ? direct_move(state, context, backend, cfg, seed)
                    : multi_cot(state, context, backend, cfg, seed);
    case ReasonerMode::TreeCot:
      return exempt ? direct_move(state, context, backend, cfg, seed)
                    : tree_cot(state, context, backend, cfg, seed);
    case ReasonerMode::EntropyGuided:
      return entropy_guided_cot(state, context, backend, cfg, turn_index, seed);
  }
  throw std::invalid_argument("decide_move: unknown mode");
}

}  // namespace ttt
