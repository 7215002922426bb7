#include "ttt/cli_commands.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "ttt/backend_http.hpp"

namespace ttt {
namespace {

using ordered_json = nlohmann::ordered_json;

ordered_json read_json_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoFailure("cannot open: " + path);
  try {
    return ordered_json::parse(in);
  } catch (const std::exception& e) {
    throw IoFailure(path + ": " + e.what());
  }
}

OptimalityCluster cluster_from_string(const std::string& s) {
  if (s == "suboptimal") return OptimalityCluster::Suboptimal;
  if (s == "moderate") return OptimalityCluster::Moderate;
  if (s == "near_optimal") return OptimalityCluster::NearOptimal;
  throw IoFailure("unknown cluster label '" + s + "'");
}

}  // namespace

const double kUncertainPolicyScale = 1.6;

std::vector<TrainExample> dataset_from_table(const SolvedTable& table) {
  std::vector<TrainExample> dataset;
  dataset.reserve(table.entries().size());
  for (const auto& entry : table.entries())
    dataset.push_back(TrainExample{entry.state, entry.moves.front().move});
  return dataset;
}

ScriptedPolicy make_named_policy(const std::string& name, const SolvedTable& table) {
  if (name == "oracle") return oracle_policy(table);
  if (name == "first-legal") return first_legal_policy();
  if (name == "zero-entropy") return first_legal_policy(0.0);
  if (name == "entropy-mirror") return entropy_mirror_policy(table, 1.0, 0.05);
  if (name == "uncertain") return entropy_mirror_policy(table, kUncertainPolicyScale, 0.05);
  if (name == "invalid-then-legal") return invalid_then_policy(first_legal_policy());
  if (name == "always-invalid") return always_invalid_policy();
  throw ConfigError("unknown scripted policy '" + name + "'");
}

std::unique_ptr<Backend> make_backend(const AppConfig& cfg, const SolvedTable& table) {
  if (cfg.backend_kind == "http") return std::make_unique<HttpCompletionBackend>(cfg.backend_url);
  return std::make_unique<ScriptedBackend>(make_named_policy(cfg.backend_policy, table),
                                           cfg.seed);
}

int run_solve(const std::string& out_path) {
  SolvedTable table = SolvedTable::solve_all();
  table.save(out_path);
  std::printf("solved: %d reachable states, %zu non-terminal entries -> %s\n",
              table.reachable_states(), table.entries().size(), out_path.c_str());
  return 0;
}

int run_train_embedder(const AppConfig& cfg, const std::string& table_path,
                       const std::string& out_path) {
  SolvedTable table =
      table_path.empty() ? SolvedTable::solve_all() : SolvedTable::load(table_path);
  const TrainResult result = train(dataset_from_table(table), cfg.embedder);
  save_params(result.params, out_path);
  std::printf("trained %d epochs: loss %.6f -> %.6f, weights -> %s\n", cfg.embedder.epochs,
              result.loss_curve.front(), result.loss_curve.back(), out_path.c_str());
  return 0;
}

int run_build_db(const AppConfig& cfg, const std::string& table_path,
                 const std::string& weights_path, const std::string& out_path) {
  SolvedTable table =
      table_path.empty() ? SolvedTable::solve_all() : SolvedTable::load(table_path);
  const std::vector<TrainExample> dataset = dataset_from_table(table);
  const EncoderParams params =
      weights_path.empty() ? train(dataset, cfg.embedder).params : load_params(weights_path);
  const VectorDb db = build_db(dataset, params, cfg.retrieval);
  db.save(out_path);
  std::printf("embedded %zu of %zu states -> %s\n", db.size(), dataset.size(), out_path.c_str());
  return 0;
}

int run_play(const AppConfig& cfg, const std::string& context_spec, const std::string& cot_spec,
             const PlayPaths& paths) {
  MatchConfig mc;
  mc.context = context_mode_from_string(context_spec, &mc.fixed_k);
  mc.cot = reasoner_mode_from_string(cot_spec);
  mc.games = cfg.games;
  mc.seed = cfg.seed;
  mc.opponent = cfg.opponent;
  mc.reasoner = cfg.reasoner;
  mc.retrieval = cfg.retrieval;

  SolvedTable table =
      paths.table.empty() ? SolvedTable::solve_all() : SolvedTable::load(paths.table);

  EncoderParams params;
  VectorDb db;
  const bool needs_context = mc.context != ContextMode::None;
  if (needs_context) {
    const std::vector<TrainExample> dataset = dataset_from_table(table);
    params = paths.weights.empty() ? train(dataset, cfg.embedder).params
                                   : load_params(paths.weights);
    db = paths.db.empty() ? build_db(dataset, params, cfg.retrieval) : VectorDb::load(paths.db);
  }

  const std::unique_ptr<Backend> backend = make_backend(cfg, table);
  Components comp;
  comp.table = &table;
  comp.embedder = needs_context ? &params : nullptr;
  comp.db = needs_context ? &db : nullptr;
  comp.backend = backend.get();

  const TournamentReport report = run_tournament(mc, comp);
  write_tournament_json(report, paths.out_prefix + ".json");
  write_tournament_csv(report, paths.out_prefix + ".csv");
  std::printf("%d games (context=%s, cot=%s): W/T/L = %d/%d/%d, S = %+.1f%%, "
              "mean queries/game = %.0f (exact %.3f)\n",
              mc.games, to_string(mc.context), to_string(mc.cot), report.wins, report.ties,
              report.losses, report.s_percent, report.mean_queries, report.mean_queries);
  std::printf("reports -> %s.json, %s.csv\n", paths.out_prefix.c_str(),
              paths.out_prefix.c_str());
  return 0;
}

int run_analyze_entropy(const AppConfig& cfg, int states, const std::string& table_path,
                        const std::string& out_prefix) {
  SolvedTable table =
      table_path.empty() ? SolvedTable::solve_all() : SolvedTable::load(table_path);
  const std::unique_ptr<Backend> backend = make_backend(cfg, table);
  Components comp;
  comp.table = &table;
  comp.backend = backend.get();

  const EntropyStudy study =
      entropy_study(states, cfg.seed, comp, cfg.retrieval, cfg.reasoner.gen);
  write_study_json(study, cfg.seed, out_prefix + ".json");
  write_study_csv(study, out_prefix + ".csv");
  std::printf("%zu states: spearman rho = %.4f (p = %.3g), kendall tau = %.4f (p = %.3g)\n",
              study.records.size(), study.spearman.stat, study.spearman.p, study.kendall.stat,
              study.kendall.p);
  std::printf("clusters suboptimal/moderate/near-optimal = %d/%d/%d\n", study.cluster_counts[0],
              study.cluster_counts[1], study.cluster_counts[2]);
  std::printf("reports -> %s.json, %s.csv\n", out_prefix.c_str(), out_prefix.c_str());
  return 0;
}

int run_report(const std::string& in_path, const std::string& out_path,
               const std::string& format) {
  if (format != "json" && format != "csv")
    throw ConfigError("report format must be json or csv");
  const ordered_json j = read_json_file(in_path);
  const std::string kind = j.value("format", "");

  if (kind == "ttt-report-v1") {
    if (format == "json") {
      std::ofstream out(out_path, std::ios::binary);
      if (!out) throw IoFailure("cannot open for writing: " + out_path);
      out << j.dump(2) << "\n";
    } else {
      TournamentReport report;
      for (const auto& g : j.at("games")) {
        GameRecord rec;
        rec.index = g.at("index").get<int>();
        rec.seed = g.at("seed").get<std::uint64_t>();
        rec.starting_player =
            g.at("starting_player").get<std::string>() == "O" ? Player::O : Player::X;
        rec.score = g.at("score").get<int>();
        rec.queries = g.at("queries").get<int>();
        rec.fallbacks = g.at("fallbacks").get<int>();
        for (const auto& m : g.at("moves")) {
          const std::string s = m.get<std::string>();
          rec.moves.emplace_back(s.front() == 'O' ? Player::O : Player::X, parse_move(s));
        }
        report.games.push_back(std::move(rec));
      }
      write_tournament_csv(report, out_path);
    }
  } else if (kind == "ttt-entropy-study-v1") {
    if (format == "json") {
      std::ofstream out(out_path, std::ios::binary);
      if (!out) throw IoFailure("cannot open for writing: " + out_path);
      out << j.dump(2) << "\n";
    } else {
      EntropyStudy study;
      study.requested = j.value("requested", 0);
      for (const auto& r : j.at("records")) {
        StudyRecord rec;
        rec.state = from_board_string(r.at("board").get<std::string>(), Player::X);
        rec.move = Coord{r.at("move").at(0).get<int>(), r.at("move").at(1).get<int>()};
        rec.entropy = r.at("entropy").get<double>();
        rec.percentile = r.at("percentile").get<double>();
        rec.cluster = cluster_from_string(r.at("cluster").get<std::string>());
        ++study.cluster_counts[static_cast<int>(rec.cluster)];
        study.records.push_back(std::move(rec));
      }
      write_study_csv(study, out_path);
    }
  } else {
    throw IoFailure(in_path + ": unrecognized report format '" + kind + "'");
  }
  std::printf("%s -> %s (%s)\n", in_path.c_str(), out_path.c_str(), format.c_str());
  return 0;
}

}  // namespace ttt
