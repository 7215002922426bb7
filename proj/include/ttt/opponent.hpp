#pragma once

#include <vector>

#include "ttt/oracle.hpp"
#include "ttt/rng.hpp"

namespace ttt {

// How the skill parameter maps onto move ranks. Literal feeds ranks to the
// weight kernel as-is (rank 1 = best), so high skill favours low-value moves;
// StrengthAligned reverses ranks first so skill -> 1 approaches perfect play.
// StrengthAligned is the default.
enum class RankOrientation { Literal, StrengthAligned };

struct SkillPolicy {
  double skill = 0.95;  // alpha in [0, 1]
  RankOrientation orientation = RankOrientation::StrengthAligned;
};

// Probability over the mover's legal moves, indexed in rank order (same order
// as SolvedTable::rank_moves). Non-negative, sums to 1.
std::vector<double> move_distribution(const GameState& s, const SkillPolicy& policy,
                                      const SolvedTable& table);

// Samples from move_distribution. Deterministic given the rng state.
Coord sample_move(const GameState& s, const SkillPolicy& policy, const SolvedTable& table,
                  Rng& rng);

}  // namespace ttt
