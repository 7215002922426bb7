// Command-line front end: solving, training, store building, tournaments,
// the entropy study, and report conversion.

#include <cstdio>
#include <exception>
#include <string>

#include <CLI11.hpp>

#include "ttt/cli_commands.hpp"

namespace {

// Loads the optional config file, then lets the environment adjust it.
ttt::AppConfig make_config(const std::string& config_path) {
  ttt::AppConfig cfg =
      config_path.empty() ? ttt::AppConfig{} : ttt::load_config_file(config_path);
  ttt::apply_env_overrides(cfg);
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Tic-Tac-Toe agent benchmark: entropy-guided reasoning and retrieval"};
  app.require_subcommand(1);

  std::string config_path;
  app.add_option("--config", config_path, "key=value config file (see README)");

  // solve
  auto* solve = app.add_subcommand("solve", "solve the game and save the move-ranking table");
  std::string solve_out = "solved.json";
  solve->add_option("--out", solve_out, "output path");

  // train-embedder
  auto* train = app.add_subcommand("train-embedder", "train the board autoencoder");
  std::string train_table, train_out = "weights.txt";
  train->add_option("--table", train_table, "solved table path (default: solve in memory)");
  train->add_option("--out", train_out, "weights output path");

  // build-db
  auto* build = app.add_subcommand("build-db", "embed a seeded sample into the example store");
  std::string db_table, db_weights, db_out = "db.jsonl";
  double db_fraction = -1.0;
  std::uint64_t db_seed = 0;
  bool db_seed_set = false;
  build->add_option("--table", db_table, "solved table path (default: solve in memory)");
  build->add_option("--weights", db_weights, "encoder weights path (default: train in memory)");
  build->add_option("--fraction", db_fraction, "fraction of states to embed (default 0.2)");
  build->add_option("--seed", db_seed, "sampling seed (default 42)")
      ->each([&](const std::string&) { db_seed_set = true; });
  build->add_option("--out", db_out, "store output path");

  // play
  auto* play = app.add_subcommand("play", "run a seeded tournament against the ranked opponent");
  std::string play_context = "none", play_cot = "none";
  ttt::PlayPaths paths;
  int play_games = -1;
  std::uint64_t play_seed = 0;
  bool play_seed_set = false;
  play->add_option("--context", play_context, "none | fixed:K | entropy");
  play->add_option("--cot", play_cot, "none | single | multi | tree | entropy");
  play->add_option("--games", play_games, "games to play (default 100)");
  play->add_option("--seed", play_seed, "master seed (default 42)")
      ->each([&](const std::string&) { play_seed_set = true; });
  play->add_option("--table", paths.table, "solved table path (default: solve in memory)");
  play->add_option("--weights", paths.weights, "encoder weights path (default: train in memory)");
  play->add_option("--db", paths.db, "example store path (default: build in memory)");
  play->add_option("--out", paths.out_prefix, "report path prefix (default 'report')");

  // analyze-entropy
  auto* analyze =
      app.add_subcommand("analyze-entropy", "correlate answer entropy with move optimality");
  int states = 500;
  std::string an_table, an_out = "entropy_study";
  std::uint64_t an_seed = 0;
  bool an_seed_set = false;
  analyze->add_option("--states", states, "states to sample (default 500)");
  analyze->add_option("--seed", an_seed, "sampling seed (default 42)")
      ->each([&](const std::string&) { an_seed_set = true; });
  analyze->add_option("--table", an_table, "solved table path (default: solve in memory)");
  analyze->add_option("--out", an_out, "report path prefix");

  // report
  auto* report = app.add_subcommand("report", "re-emit a saved report as json or csv");
  std::string rep_in, rep_out, rep_format = "csv";
  report->add_option("--in", rep_in, "input report JSON")->required();
  report->add_option("--out", rep_out, "output path")->required();
  report->add_option("--format", rep_format, "json | csv");

  CLI11_PARSE(app, argc, argv);

  try {
    ttt::AppConfig cfg = make_config(config_path);

    if (solve->parsed()) return ttt::run_solve(solve_out);
    if (train->parsed()) return ttt::run_train_embedder(cfg, train_table, train_out);
    if (build->parsed()) {
      if (db_fraction >= 0.0) cfg.retrieval.db_fraction = db_fraction;
      if (db_seed_set) cfg.retrieval.db_seed = db_seed;
      return ttt::run_build_db(cfg, db_table, db_weights, db_out);
    }
    if (play->parsed()) {
      if (play_games > 0) cfg.games = play_games;
      if (play_seed_set) cfg.seed = play_seed;
      return ttt::run_play(cfg, play_context, play_cot, paths);
    }
    if (analyze->parsed()) {
      if (an_seed_set) cfg.seed = an_seed;
      return ttt::run_analyze_entropy(cfg, states, an_table, an_out);
    }
    if (report->parsed()) return ttt::run_report(rep_in, rep_out, rep_format);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
