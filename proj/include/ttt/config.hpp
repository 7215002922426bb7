#pragma once

#include <stdexcept>
#include <string>

#include "ttt/embedder.hpp"
#include "ttt/harness.hpp"

namespace ttt {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Every tunable in one place, preloaded with the defaults the test suite and
// CLI share. A key=value file overrides fields; unknown keys are errors so
// typos never silently fall back to defaults.
struct AppConfig {
  SkillPolicy opponent;
  TrainConfig embedder;
  RetrievalConfig retrieval;
  ReasonerConfig reasoner;  // carries the generation parameters
  int games = 100;
  std::uint64_t seed = 42;
  std::string backend_kind = "scripted";  // "scripted" | "http"
  // Named policy for the scripted backend: oracle | first-legal |
  // zero-entropy | entropy-mirror | uncertain | invalid-then-legal |
  // always-invalid.
  std::string backend_policy = "uncertain";
  std::string backend_url = "http://127.0.0.1:8080/v1/completions";
};

// One "section.key = value" assignment. Throws ConfigError on unknown keys or
// unparseable values.
void apply_config_line(AppConfig& cfg, const std::string& key, const std::string& value);

// Parses key=value text ('#' comments, blank lines ignored).
AppConfig parse_config_text(const std::string& text);

AppConfig load_config_file(const std::string& path);

// TTT_BACKEND_URL, when set, replaces backend.url.
void apply_env_overrides(AppConfig& cfg);

RankOrientation orientation_from_string(const std::string& s);  // ConfigError on bad input
ContextMode context_mode_from_string(const std::string& s, int* fixed_k);  // "fixed:K" form
ReasonerMode reasoner_mode_from_string(const std::string& s);

}  // namespace ttt
