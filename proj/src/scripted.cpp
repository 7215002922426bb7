#include "ttt/scripted.hpp"

#include <algorithm>
#include <cmath>

#include "ttt/retrieval.hpp"

namespace ttt {

namespace {

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 0xCBF29CE484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001B3ULL;
  }
  return h;
}

double mix_entropy(double eps, int n) {
  // Entropy of (1 - eps, eps/(n-1), ..., eps/(n-1)).
  auto plogp = [](double p) { return p > 0.0 ? p * std::log(p) : 0.0; };
  return -plogp(1.0 - eps) - (n - 1) * plogp(eps / (n - 1));
}

}  // namespace

double entropy_mix_epsilon(int n, double target_entropy) {
  const double max_h = std::log(static_cast<double>(n));
  double target = std::clamp(target_entropy, 0.0, max_h);
  if (target <= 0.0) return 0.0;
  // mix_entropy is strictly increasing in eps on [0, (n-1)/n].
  double lo = 0.0, hi = (n - 1.0) / n;
  for (int iter = 0; iter < 200; ++iter) {
    double mid = 0.5 * (lo + hi);
    if (mix_entropy(mid, n) < target) lo = mid;
    else hi = mid;
  }
  return 0.5 * (lo + hi);
}

TokenTrace make_move_trace(const Coord& move, double target_entropy) {
  const int n = 9;
  double eps = entropy_mix_epsilon(n, target_entropy);
  std::vector<std::pair<std::string, double>> dist;
  dist.reserve(n);
  size_t chosen = 0;
  for (int i = 0; i < n; ++i) {
    Coord c = coord_of(i);
    std::string tok = "(" + std::to_string(c.x) + "," + std::to_string(c.y) + ")";
    double p = c == move ? 1.0 - eps : eps / (n - 1);
    if (c == move) chosen = dist.size();
    dist.emplace_back(std::move(tok), p);
  }
  TokenTrace trace;
  trace.tokens.push_back(make_token(dist, chosen));
  trace.text = trace.tokens.back().token;
  trace.metadata.emplace_back("beams", "not supported by scripted backend");
  return trace;
}

TokenTrace ScriptedBackend::do_generate(const std::string& prompt, const GenParams& params) {
  ScriptedRequest req;
  req.prompt = prompt;
  req.params = params;
  try {
    req.state = extract_query_state(prompt);
  } catch (const BoardParseError&) {
    req.state = std::nullopt;
  }
  req.rng_seed = mix_seed(seed_, fnv1a(prompt), params.seed,
                          static_cast<std::uint64_t>(params.attempt));
  return policy_(req);
}

ScriptedPolicy first_legal_policy(double entropy) {
  return [entropy](const ScriptedRequest& req) {
    if (!req.state) return make_move_trace(Coord{0, 0}, entropy);
    std::vector<Coord> legal = legal_moves(*req.state);
    Coord m = legal.empty() ? Coord{0, 0} : legal.front();
    return make_move_trace(m, entropy);
  };
}

ScriptedPolicy oracle_policy(const SolvedTable& table, double entropy) {
  return [&table, entropy](const ScriptedRequest& req) {
    if (!req.state || is_terminal(*req.state)) return make_move_trace(Coord{0, 0}, entropy);
    return make_move_trace(table.rank_moves(*req.state).front().move, entropy);
  };
}

ScriptedPolicy entropy_mirror_policy(const SolvedTable& table, double scale, double noise) {
  return [&table, scale, noise](const ScriptedRequest& req) {
    if (!req.state || is_terminal(*req.state)) return make_move_trace(Coord{0, 0}, 0.0);
    Rng rng(req.rng_seed);
    std::vector<Coord> legal = legal_moves(*req.state);
    Coord m = legal[static_cast<size_t>(rng.next_below(static_cast<int>(legal.size())))];
    double pct = table.optimality_percentile(*req.state, m);
    double h = scale * (1.0 - pct) + rng.next_in(-noise, noise);
    return make_move_trace(m, std::max(0.0, h));
  };
}

ScriptedPolicy fixed_text_policy(std::string text, double entropy) {
  return [text = std::move(text), entropy](const ScriptedRequest&) {
    TokenTrace trace;
    trace.tokens.push_back(make_token({{text, 1.0}}, 0));
    trace.tokens.back().entropy = entropy;  // reported uncertainty, independent of the text
    trace.text = text;
    return trace;
  };
}

ScriptedPolicy invalid_then_policy(ScriptedPolicy valid) {
  return [valid = std::move(valid)](const ScriptedRequest& req) {
    if (req.params.attempt == 0) {
      TokenTrace trace;
      trace.tokens.push_back(make_token({{"pass", 1.0}}, 0));
      trace.text = "pass";
      return trace;
    }
    return valid(req);
  };
}

ScriptedPolicy always_invalid_policy() {
  return [](const ScriptedRequest&) {
    TokenTrace trace;
    trace.tokens.push_back(make_token({{"no move comes to mind", 1.0}}, 0));
    trace.text = "no move comes to mind";
    return trace;
  };
}

}  // namespace ttt
