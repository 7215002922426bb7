#include "ttt/opponent.hpp"

#include <cmath>
#include <cstdlib>

namespace ttt {

std::vector<double> move_distribution(const GameState& s, const SkillPolicy& policy,
                                      const SolvedTable& table) {
  const std::vector<MoveEval>& moves = table.rank_moves(s);
  const size_t n = moves.size();
  if (n == 1) return {1.0};

  const double alpha = policy.skill;
  const double nn = static_cast<double>(n);

  // Working rank: reversed under StrengthAligned so the kernel peak lands on
  // strong moves as alpha grows.
  auto working_rank = [&](size_t i) {
    double r = static_cast<double>(moves[i].rank);
    return policy.orientation == RankOrientation::StrengthAligned ? nn - r + 1.0 : r;
  };

  std::vector<double> w(n, 0.0);

  // alpha = 1 with reversed ranks means full strength: the triangular kernel
  // alone still leaks weight onto weaker moves, so this boundary is pinned to
  // the top-ranked move exactly.
  if (policy.orientation == RankOrientation::StrengthAligned && alpha == 1.0) {
    for (size_t i = 0; i < n; ++i) {
      if (working_rank(i) == nn) w[i] = 1.0;
    }
    return w;
  }

  const double peak = alpha * nn;
  double sum = 0.0;
  for (size_t i = 0; i < n; ++i) {
    w[i] = std::max(0.0, 1.0 - std::abs(working_rank(i) - peak) / (nn - 1.0));
    sum += w[i];
  }

  if (sum == 0.0) {
    // Possible only at the extreme corner (e.g. n = 2, alpha = 0, where the
    // nearest rank is a full kernel-width from the peak). Degenerate onto the
    // working rank closest to the peak, matching the alpha -> 0+ limit.
    size_t best = 0;
    double best_dist = std::abs(working_rank(0) - peak);
    for (size_t i = 1; i < n; ++i) {
      double d = std::abs(working_rank(i) - peak);
      if (d < best_dist) {
        best_dist = d;
        best = i;
      }
    }
    w[best] = 1.0;
    return w;
  }

  for (double& x : w) x /= sum;
  return w;
}

Coord sample_move(const GameState& s, const SkillPolicy& policy, const SolvedTable& table,
                  Rng& rng) {
  const std::vector<MoveEval>& moves = table.rank_moves(s);
  std::vector<double> p = move_distribution(s, policy, table);
  double u = rng.next_double();
  double acc = 0.0;
  for (size_t i = 0; i < p.size(); ++i) {
    acc += p[i];
    if (u < acc) return moves[i].move;
  }
  return moves.back().move;  // guard against rounding at u ~ 1
}

}  // namespace ttt
