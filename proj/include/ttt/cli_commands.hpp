#pragma once

#include <memory>
#include <string>
#include <vector>

#include "ttt/config.hpp"
#include "ttt/scripted.hpp"

namespace ttt {

// One training example per solved state: the canonical board labelled with
// its rank-1 move.
std::vector<TrainExample> dataset_from_table(const SolvedTable& table);

// Resolves AppConfig::backend_policy names to scripted policies. Throws
// ConfigError on unknown names.
ScriptedPolicy make_named_policy(const std::string& name, const SolvedTable& table);

// Scripted or HTTP backend per cfg.backend_kind.
std::unique_ptr<Backend> make_backend(const AppConfig& cfg, const SolvedTable& table);

// Entropy scale of the "uncertain" scripted policy: high enough that a useful
// share of steps crosses the upper branching thresholds.
extern const double kUncertainPolicyScale;

// Command bodies shared by the CLI binary and the test suite. Each returns a
// process exit code (0 = success) and reports progress on stdout.

// Solve the full game and save the table.
int run_solve(const std::string& out_path);

// Train the contrastive autoencoder on the solved dataset and save weights.
// table_path empty -> solve in memory.
int run_train_embedder(const AppConfig& cfg, const std::string& table_path,
                       const std::string& out_path);

// Embed a seeded sample of the dataset into an example store and save it.
// table_path/weights_path empty -> solve/train in memory.
int run_build_db(const AppConfig& cfg, const std::string& table_path,
                 const std::string& weights_path, const std::string& out_path);

struct PlayPaths {
  std::string table;    // empty -> solve in memory
  std::string weights;  // empty -> train in memory (when context needs it)
  std::string db;       // empty -> build in memory (when context needs it)
  std::string out_prefix = "report";
};

// Run a tournament and write <out_prefix>.json / <out_prefix>.csv.
int run_play(const AppConfig& cfg, const std::string& context_spec, const std::string& cot_spec,
             const PlayPaths& paths);

// Run the entropy-vs-optimality study and write <out_prefix>.json / .csv.
int run_analyze_entropy(const AppConfig& cfg, int states, const std::string& table_path,
                        const std::string& out_prefix);

// Re-emit a saved report (tournament or study JSON) as "json" or "csv".
int run_report(const std::string& in_path, const std::string& out_path,
               const std::string& format);

}  // namespace ttt
