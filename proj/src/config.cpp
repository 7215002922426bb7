#include "ttt/config.hpp"

#include <algorithm>
#include <cctype>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace ttt {
namespace {

std::string trim(const std::string& s) {
  size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

[[noreturn]] void bad_value(const std::string& key, const std::string& value) {
  throw ConfigError("bad value for " + key + ": '" + value + "'");
}

double parse_double(const std::string& key, const std::string& value) {
  try {
    size_t pos = 0;
    const double d = std::stod(value, &pos);
    if (pos != value.size()) bad_value(key, value);
    return d;
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception&) {
    bad_value(key, value);
  }
}

long long parse_int(const std::string& key, const std::string& value) {
  try {
    size_t pos = 0;
    const long long n = std::stoll(value, &pos);
    if (pos != value.size()) bad_value(key, value);
    return n;
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception&) {
    bad_value(key, value);
  }
}

std::uint64_t parse_u64(const std::string& key, const std::string& value) {
  try {
    size_t pos = 0;
    const unsigned long long n = std::stoull(value, &pos);
    if (pos != value.size()) bad_value(key, value);
    return n;
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception&) {
    bad_value(key, value);
  }
}

bool parse_bool(const std::string& key, const std::string& value) {
  std::string v = value;
  std::transform(v.begin(), v.end(), v.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  bad_value(key, value);
}

std::vector<std::string> split_list(const std::string& value) {
  std::vector<std::string> parts;
  std::string item;
  std::istringstream in(value);
  while (std::getline(in, item, ',')) parts.push_back(trim(item));
  return parts;
}

}  // namespace

RankOrientation orientation_from_string(const std::string& s) {
  if (s == "strength-aligned") return RankOrientation::StrengthAligned;
  if (s == "literal") return RankOrientation::Literal;
  throw ConfigError("unknown rank orientation '" + s +
                    "' (expected strength-aligned or literal)");
}

ContextMode context_mode_from_string(const std::string& s, int* fixed_k) {
  if (s == "none") return ContextMode::None;
  if (s == "entropy") return ContextMode::EntropyGuided;
  if (s.rfind("fixed", 0) == 0) {
    if (s.size() > 5) {
      if (s[5] != ':') throw ConfigError("unknown context mode '" + s + "'");
      const long long k = parse_int("context", s.substr(6));
      if (k < 0) throw ConfigError("fixed context size must be non-negative");
      if (fixed_k) *fixed_k = static_cast<int>(k);
    }
    return ContextMode::FixedSize;
  }
  throw ConfigError("unknown context mode '" + s + "' (expected none, fixed:K, or entropy)");
}

ReasonerMode reasoner_mode_from_string(const std::string& s) {
  if (s == "none") return ReasonerMode::Direct;
  if (s == "single") return ReasonerMode::SingleCot;
  if (s == "multi") return ReasonerMode::MultiCot;
  if (s == "tree") return ReasonerMode::TreeCot;
  if (s == "entropy") return ReasonerMode::EntropyGuided;
  throw ConfigError("unknown reasoning mode '" + s +
                    "' (expected none, single, multi, tree, or entropy)");
}

void apply_config_line(AppConfig& cfg, const std::string& key, const std::string& value) {
  if (key == "opponent.skill") {
    const double a = parse_double(key, value);
    if (a < 0.0 || a > 1.0) throw ConfigError("opponent.skill must lie in [0, 1]");
    cfg.opponent.skill = a;
  } else if (key == "opponent.orientation") {
    cfg.opponent.orientation = orientation_from_string(value);
  } else if (key == "embedder.hidden_dim") {
    cfg.embedder.hidden_dim = static_cast<int>(parse_int(key, value));
  } else if (key == "embedder.latent_dim") {
    cfg.embedder.latent_dim = static_cast<int>(parse_int(key, value));
  } else if (key == "embedder.margin") {
    cfg.embedder.margin = parse_double(key, value);
  } else if (key == "embedder.lambda") {
    cfg.embedder.lambda = parse_double(key, value);
  } else if (key == "embedder.learning_rate") {
    cfg.embedder.learning_rate = parse_double(key, value);
  } else if (key == "embedder.epochs") {
    cfg.embedder.epochs = static_cast<int>(parse_int(key, value));
  } else if (key == "embedder.pair_batch") {
    cfg.embedder.pair_batch = static_cast<int>(parse_int(key, value));
  } else if (key == "embedder.seed") {
    cfg.embedder.seed = parse_u64(key, value);
  } else if (key == "retrieval.k0") {
    cfg.retrieval.k0 = static_cast<int>(parse_int(key, value));
  } else if (key == "retrieval.scale") {
    cfg.retrieval.scale = parse_double(key, value);
  } else if (key == "retrieval.k_max") {
    cfg.retrieval.k_max = static_cast<int>(parse_int(key, value));
  } else if (key == "retrieval.token_budget") {
    cfg.retrieval.token_budget = static_cast<int>(parse_int(key, value));
  } else if (key == "retrieval.db_fraction") {
    const double f = parse_double(key, value);
    if (f < 0.0 || f > 1.0) throw ConfigError("retrieval.db_fraction must lie in [0, 1]");
    cfg.retrieval.db_fraction = f;
  } else if (key == "retrieval.db_seed") {
    cfg.retrieval.db_seed = parse_u64(key, value);
  } else if (key == "gen.temperature") {
    cfg.reasoner.gen.temperature = parse_double(key, value);
  } else if (key == "gen.top_p") {
    cfg.reasoner.gen.top_p = parse_double(key, value);
  } else if (key == "gen.top_k") {
    cfg.reasoner.gen.top_k = static_cast<int>(parse_int(key, value));
  } else if (key == "gen.beams") {
    cfg.reasoner.gen.beams = static_cast<int>(parse_int(key, value));
  } else if (key == "gen.max_tokens") {
    cfg.reasoner.gen.max_tokens = static_cast<int>(parse_int(key, value));
  } else if (key == "gen.logprob_depth") {
    cfg.reasoner.gen.logprob_depth = static_cast<int>(parse_int(key, value));
  } else if (key == "reasoner.n_paths") {
    cfg.reasoner.n_paths = static_cast<int>(parse_int(key, value));
  } else if (key == "reasoner.branch_cap") {
    cfg.reasoner.branch_cap = static_cast<int>(parse_int(key, value));
  } else if (key == "reasoner.retained_k") {
    cfg.reasoner.retained_k = static_cast<int>(parse_int(key, value));
  } else if (key == "reasoner.thresholds") {
    std::vector<double> xs;
    for (const auto& part : split_list(value)) xs.push_back(parse_double(key, part));
    cfg.reasoner.schedule.thresholds = std::move(xs);
    cfg.reasoner.schedule.validate();
  } else if (key == "reasoner.branches") {
    std::vector<int> ns;
    for (const auto& part : split_list(value)) ns.push_back(static_cast<int>(parse_int(key, part)));
    cfg.reasoner.schedule.branches = std::move(ns);
    cfg.reasoner.schedule.validate();
  } else if (key == "reasoner.first_move_exempt") {
    cfg.reasoner.first_move_exempt = parse_bool(key, value);
  } else if (key == "harness.games") {
    const long long n = parse_int(key, value);
    if (n < 1) throw ConfigError("harness.games must be at least 1");
    cfg.games = static_cast<int>(n);
  } else if (key == "harness.seed") {
    cfg.seed = parse_u64(key, value);
  } else if (key == "backend.kind") {
    if (value != "scripted" && value != "http")
      throw ConfigError("backend.kind must be scripted or http");
    cfg.backend_kind = value;
  } else if (key == "backend.policy") {
    cfg.backend_policy = value;
  } else if (key == "backend.url") {
    cfg.backend_url = value;
  } else {
    throw ConfigError("unknown config key '" + key + "'");
  }
}

AppConfig parse_config_text(const std::string& text) {
  AppConfig cfg;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const size_t hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("line " + std::to_string(line_no) + ": expected key = value");
    apply_config_line(cfg, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
  return cfg;
}

AppConfig load_config_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open config file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  try {
    return parse_config_text(buf.str());
  } catch (const ConfigError& e) {
    throw ConfigError(path + ": " + e.what());
  }
}

void apply_env_overrides(AppConfig& cfg) {
  if (const char* url = std::getenv("TTT_BACKEND_URL"); url && *url) cfg.backend_url = url;
}

}  // namespace ttt
