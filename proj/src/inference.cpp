#include "ttt/inference.hpp"

#include <cctype>
#include <cmath>

namespace ttt {

namespace {

double plogp(double p) {
  if (p < 0.0) throw NegativeProbability("entropy: negative probability");
  return p == 0.0 ? 0.0 : p * std::log(p);
}

}  // namespace

double token_entropy(const std::vector<double>& probs) {
  double h = 0.0;
  for (double p : probs) h -= plogp(p);
  return h;
}

double token_entropy_topk(const std::vector<double>& top_probs, double residual) {
  return token_entropy(top_probs) - plogp(residual);
}

double step_entropy(const TokenTrace& trace) {
  if (trace.tokens.empty()) throw EmptyTrace("step_entropy: trace has no tokens");
  double sum = 0.0;
  for (const TokenInfo& t : trace.tokens) sum += t.entropy;
  return sum / static_cast<double>(trace.tokens.size());
}

TokenInfo make_token(const std::vector<std::pair<std::string, double>>& dist, size_t chosen) {
  TokenInfo info;
  info.token = dist.at(chosen).first;
  info.alternatives = dist;
  std::vector<double> probs;
  probs.reserve(dist.size());
  for (const auto& [_, p] : dist) probs.push_back(p);
  info.entropy = token_entropy(probs);
  return info;
}

Coord parse_move(const std::string& text) {
  // Scan for "(", optional spaces, integer, optional spaces, ",", ... ")".
  for (size_t i = 0; i < text.size(); ++i) {
    if (text[i] != '(') continue;
    size_t p = i + 1;
    auto skip_ws = [&] {
      while (p < text.size() && (text[p] == ' ' || text[p] == '\t')) ++p;
    };
    auto read_int = [&](long& out) {
      size_t start = p;
      if (p < text.size() && (text[p] == '-' || text[p] == '+')) ++p;
      size_t digits = p;
      while (p < text.size() && std::isdigit(static_cast<unsigned char>(text[p]))) ++p;
      if (p == digits) {
        p = start;
        return false;
      }
      out = std::strtol(text.substr(start, p - start).c_str(), nullptr, 10);
      return true;
    };
    long a = 0, b = 0;
    skip_ws();
    if (!read_int(a)) continue;
    skip_ws();
    if (p >= text.size() || text[p] != ',') continue;
    ++p;
    skip_ws();
    if (!read_int(b)) continue;
    skip_ws();
    if (p >= text.size() || text[p] != ')') continue;
    if (a < 0 || a > 2 || b < 0 || b > 2) {
      throw CoordinateOutOfRange("parse_move: (" + std::to_string(a) + "," + std::to_string(b) +
                                 ") is off the board");
    }
    return Coord{static_cast<int>(a), static_cast<int>(b)};
  }
  throw NoCoordinateFound("parse_move: no (a,b) pair in \"" + text + "\"");
}

MoveAttempt move_with_retry(const std::string& prompt, const GameState& state,
                            const GenParams& params, Backend& backend, Rng& fallback_rng) {
  const std::vector<Coord> legal = legal_moves(state);
  MoveAttempt result;

  GenParams attempt_params = params;
  for (int attempt = 0; attempt < 2; ++attempt) {
    attempt_params.attempt = attempt;
    attempt_params.seed = attempt == 0 ? params.seed : mix_seed(params.seed, 0x52455452u);
    TokenTrace trace = backend.generate(prompt, attempt_params);
    result.traces.push_back(trace);
    try {
      Coord m = parse_move(trace.text);
      bool is_legal = false;
      for (const Coord& c : legal) {
        if (c == m) {
          is_legal = true;
          break;
        }
      }
      if (is_legal) {
        result.move = m;
        result.entropy = step_entropy(trace);
        return result;
      }
    } catch (const NoCoordinateFound&) {
    } catch (const CoordinateOutOfRange&) {
    }
  }

  result.used_fallback = true;
  result.move = legal.at(static_cast<size_t>(fallback_rng.next_below(static_cast<int>(legal.size()))));
  result.entropy = step_entropy(result.traces.back());
  return result;
}

}  // namespace ttt
