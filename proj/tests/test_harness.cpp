#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "ttt/config.hpp"
#include "ttt/harness.hpp"
#include "ttt/scripted.hpp"

using namespace ttt;

namespace {

const SolvedTable& table() {
  static SolvedTable t = SolvedTable::solve_all();
  return t;
}

struct RetrievalFixture {
  EncoderParams params;
  VectorDb db;
};

const RetrievalFixture& fixture() {
  static RetrievalFixture f = [] {
    RetrievalFixture out;
    TrainConfig tc;
    Rng rng(tc.seed);
    out.params = init_params(tc, rng);  // untrained: provider mechanics only
    std::vector<TrainExample> data;
    for (const SolvedEntry& e : table().entries()) {
      data.push_back(TrainExample{e.state, e.moves.front().move});
    }
    RetrievalConfig rc;
    rc.db_fraction = 0.01;  // 46 entries
    out.db = build_db(data, out.params, rc);
    return out;
  }();
  return f;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

int count_occurrences(const std::string& text, const std::string& needle) {
  int n = 0;
  for (size_t pos = text.find(needle); pos != std::string::npos;
       pos = text.find(needle, pos + needle.size())) {
    ++n;
  }
  return n;
}

double pearson(const std::vector<double>& a, const std::vector<double>& b) {
  double ma = 0.0, mb = 0.0;
  for (size_t i = 0; i < a.size(); ++i) {
    ma += a[i];
    mb += b[i];
  }
  ma /= static_cast<double>(a.size());
  mb /= static_cast<double>(b.size());
  double sab = 0.0, saa = 0.0, sbb = 0.0;
  for (size_t i = 0; i < a.size(); ++i) {
    sab += (a[i] - ma) * (b[i] - mb);
    saa += (a[i] - ma) * (a[i] - ma);
    sbb += (b[i] - mb) * (b[i] - mb);
  }
  return sab / std::sqrt(saa * sbb);
}

}  // namespace

// ---------------------------------------------------------------------------
// Statistics
// ---------------------------------------------------------------------------

TEST_CASE("average_ranks assigns mean ranks to ties") {
  CHECK(average_ranks({10, 20, 30}) == std::vector<double>{1, 2, 3});
  CHECK(average_ranks({30, 10, 20}) == std::vector<double>{3, 1, 2});
  CHECK(average_ranks({5, 5, 7}) == std::vector<double>{1.5, 1.5, 3});
  CHECK(average_ranks({3, 1, 3, 3}) == std::vector<double>{3, 1, 3, 3});
  CHECK(average_ranks({2, 2, 2}) == std::vector<double>{2, 2, 2});
}

TEST_CASE("spearman endpoints and degenerate conventions") {
  CorrelationResult up = spearman({1, 2, 3, 4, 5}, {1, 4, 9, 16, 25});
  CHECK(up.stat == doctest::Approx(1.0));
  CHECK(up.p == 0.0);
  CHECK(!up.degenerate);

  CorrelationResult down = spearman({1, 2, 3, 4, 5}, {25, 16, 9, 4, 1});
  CHECK(down.stat == doctest::Approx(-1.0));
  CHECK(down.p == 0.0);

  CorrelationResult flat = spearman({1, 1, 1, 1}, {1, 2, 3, 4});
  CHECK(flat.stat == 0.0);
  CHECK(flat.p == 1.0);
  CHECK(flat.degenerate);

  // Two points always correlate perfectly; the p-value conveys no evidence.
  CorrelationResult pair = spearman({1, 2}, {5, 9});
  CHECK(pair.stat == doctest::Approx(1.0));
  CHECK(pair.p == 1.0);
  CHECK(!pair.degenerate);
}

TEST_CASE("spearman matches an independent rank/t recomputation on noisy data") {
  Rng rng(808);
  std::vector<double> x, y;
  for (int i = 0; i < 50; ++i) {
    double v = rng.next_double();
    x.push_back(v);
    y.push_back(-0.8 * v + 0.4 * rng.next_double());
  }
  CorrelationResult got = spearman(x, y);

  const std::vector<double> rx = average_ranks(x);
  const std::vector<double> ry = average_ranks(y);
  const double rho = pearson(rx, ry);
  CHECK(got.stat == doctest::Approx(rho).epsilon(1e-12));
  const double n = static_cast<double>(x.size());
  const double t = rho * std::sqrt((n - 2.0) / (1.0 - rho * rho));
  CHECK(got.p == doctest::Approx(student_t_two_sided(t, n - 2.0)).epsilon(1e-10));
  CHECK(got.stat < -0.4);  // the construction is strongly decreasing
  CHECK(got.p < 1e-3);
}

TEST_CASE("kendall matches a brute-force tau-b with ties") {
  auto brute_tau = [](const std::vector<double>& x, const std::vector<double>& y) {
    long long c = 0, d = 0, tx = 0, ty = 0;
    const size_t n = x.size();
    for (size_t i = 0; i < n; ++i) {
      for (size_t j = i + 1; j < n; ++j) {
        const double dx = x[i] - x[j];
        const double dy = y[i] - y[j];
        if (dx == 0.0 && dy == 0.0) {
          ++tx;
          ++ty;
        } else if (dx == 0.0) {
          ++tx;
        } else if (dy == 0.0) {
          ++ty;
        } else if ((dx > 0.0) == (dy > 0.0)) {
          ++c;
        } else {
          ++d;
        }
      }
    }
    const double n0 = static_cast<double>(n) * (n - 1) / 2.0;
    return (c - d) / std::sqrt((n0 - tx) * (n0 - ty));
  };

  Rng rng(4242);
  for (int trial = 0; trial < 8; ++trial) {
    std::vector<double> x, y;
    for (int i = 0; i < 40; ++i) {
      // Coarse grid so ties actually occur.
      x.push_back(static_cast<double>(rng.next_below(6)));
      y.push_back(0.5 * x.back() + static_cast<double>(rng.next_below(4)));
    }
    CorrelationResult got = kendall(x, y);
    CHECK(got.stat == doctest::Approx(brute_tau(x, y)).epsilon(1e-12));
    CHECK(got.p > 0.0);
    CHECK(got.p <= 1.0);
  }

  CHECK(kendall({1, 2, 3}, {2, 3, 9}).stat == doctest::Approx(1.0));
  CHECK(kendall({1, 2, 3}, {9, 3, 2}).stat == doctest::Approx(-1.0));
  CHECK(kendall({4, 4, 4}, {1, 2, 3}).degenerate);
  // A longer perfect sequence is stronger evidence: p must shrink.
  std::vector<double> shorter{1, 2, 3, 4, 5}, longer{1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
  CHECK(kendall(longer, longer).p < kendall(shorter, shorter).p);
}

TEST_CASE("incomplete_beta agrees with the binomial closed form at integer arguments") {
  // I_x(a, b) = P(Bin(a+b-1, x) >= a) for integer a, b.
  auto binom_tail = [](int a, int b, double x) {
    const int n = a + b - 1;
    auto choose = [](int n_, int k_) {
      double r = 1.0;
      for (int i = 1; i <= k_; ++i) r = r * (n_ - k_ + i) / i;
      return r;
    };
    double sum = 0.0;
    for (int j = a; j <= n; ++j) {
      sum += choose(n, j) * std::pow(x, j) * std::pow(1.0 - x, n - j);
    }
    return sum;
  };
  for (double x : {0.05, 0.3, 0.5, 0.8, 0.95}) {
    CHECK(incomplete_beta(2, 3, x) == doctest::Approx(binom_tail(2, 3, x)).epsilon(1e-12));
    CHECK(incomplete_beta(5, 2, x) == doctest::Approx(binom_tail(5, 2, x)).epsilon(1e-12));
    CHECK(incomplete_beta(1, 1, x) == doctest::Approx(x).epsilon(1e-12));
  }
  CHECK(incomplete_beta(2.5, 1.5, 0.0) == 0.0);
  CHECK(incomplete_beta(2.5, 1.5, 1.0) == 1.0);
  // Symmetry identity at non-integer arguments.
  CHECK(incomplete_beta(1.5, 2.5, 0.37) ==
        doctest::Approx(1.0 - incomplete_beta(2.5, 1.5, 0.63)).epsilon(1e-12));
}

TEST_CASE("student_t_two_sided closed forms and shape") {
  CHECK(student_t_two_sided(0.0, 7.0) == doctest::Approx(1.0).epsilon(1e-12));
  // nu = 1 is a Cauchy: P(|T| > 1) = 1/2.
  CHECK(student_t_two_sided(1.0, 1.0) == doctest::Approx(0.5).epsilon(1e-10));
  // nu = 2 closed form: 1 - t / sqrt(t^2 + 2).
  CHECK(student_t_two_sided(1.0, 2.0) ==
        doctest::Approx(1.0 - 1.0 / std::sqrt(3.0)).epsilon(1e-10));
  CHECK(student_t_two_sided(-3.0, 5.0) == doctest::Approx(student_t_two_sided(3.0, 5.0)));
  CHECK(student_t_two_sided(2.0, 10.0) < student_t_two_sided(1.0, 10.0));
  CHECK(student_t_two_sided(50.0, 10.0) < 1e-8);
}

// ---------------------------------------------------------------------------
// Game harness
// ---------------------------------------------------------------------------

TEST_CASE("play_game is deterministic and structurally valid") {
  MatchConfig cfg;
  cfg.games = 1;
  cfg.seed = 42;
  ScriptedBackend b1(entropy_mirror_policy(table(), 1.0, 0.05), 42);
  ScriptedBackend b2(entropy_mirror_policy(table(), 1.0, 0.05), 42);
  Components c1{&table(), nullptr, nullptr, &b1};
  Components c2{&table(), nullptr, nullptr, &b2};

  for (int index : {0, 3}) {
    GameRecord r1 = play_game(cfg, c1, index);
    GameRecord r2 = play_game(cfg, c2, index);
    CHECK(r1.seed == r2.seed);
    CHECK(r1.starting_player == r2.starting_player);
    CHECK(r1.moves == r2.moves);
    CHECK(r1.score == r2.score);
    CHECK(r1.queries == r2.queries);
    CHECK(r1.decision_entropies == r2.decision_entropies);

    // Replay: alternation from the recorded starting player to the recorded
    // outcome.
    GameState s;
    s.to_move = r1.starting_player;
    REQUIRE(!r1.moves.empty());
    CHECK(r1.moves.front().first == r1.starting_player);
    for (const auto& [player, move] : r1.moves) {
      CHECK(player == s.to_move);
      s = apply_move(s, move);
    }
    CHECK(is_terminal(s));
    const Outcome o = outcome_of(s);
    const int score = o == Outcome::XWins ? 1 : o == Outcome::OWins ? -1 : 0;
    CHECK(r1.score == score);

    // One recorded entropy per agent decision; the agent plays X.
    size_t agent_moves = 0;
    for (const auto& [player, move] : r1.moves) {
      if (player == Player::X) ++agent_moves;
    }
    CHECK(r1.decision_entropies.size() == agent_moves);
    CHECK(r1.queries >= static_cast<int>(agent_moves));
    CHECK(r1.fallbacks >= 0);
  }

  // Different game indices use different seeds.
  CHECK(play_game(cfg, c1, 0).seed != play_game(cfg, c1, 1).seed);
}

TEST_CASE("a perfect agent against a full-strength opponent always ties") {
  MatchConfig cfg;
  cfg.games = 20;
  cfg.opponent.skill = 1.0;
  cfg.opponent.orientation = RankOrientation::StrengthAligned;
  ScriptedBackend backend(oracle_policy(table()), 42);
  Components comp{&table(), nullptr, nullptr, &backend};
  TournamentReport rep = run_tournament(cfg, comp);
  CHECK(rep.ties == 20);
  CHECK(rep.wins == 0);
  CHECK(rep.losses == 0);
  CHECK(rep.s_percent == 0.0);
}

TEST_CASE("a weak agent loses to a full-strength opponent") {
  MatchConfig cfg;
  cfg.games = 20;
  cfg.opponent.skill = 1.0;
  ScriptedBackend backend(first_legal_policy(), 42);
  Components comp{&table(), nullptr, nullptr, &backend};
  TournamentReport rep = run_tournament(cfg, comp);
  CHECK(rep.losses > rep.wins);
  CHECK(rep.s_percent < 0.0);
}

TEST_CASE("run_tournament aggregates its game records exactly") {
  MatchConfig cfg;
  cfg.games = 40;
  cfg.seed = 7;
  cfg.opponent.skill = 0.7;
  ScriptedBackend backend(entropy_mirror_policy(table(), 1.0, 0.05), 42);
  Components comp{&table(), nullptr, nullptr, &backend};
  TournamentReport rep = run_tournament(cfg, comp);

  REQUIRE(rep.games.size() == 40);
  int wins = 0, ties = 0, losses = 0, fallbacks = 0;
  long long queries = 0;
  std::set<std::uint64_t> seeds;
  bool saw_x_start = false, saw_o_start = false;
  for (size_t i = 0; i < rep.games.size(); ++i) {
    const GameRecord& g = rep.games[i];
    CHECK(g.index == static_cast<int>(i));
    seeds.insert(g.seed);
    wins += g.score > 0;
    ties += g.score == 0;
    losses += g.score < 0;
    fallbacks += g.fallbacks;
    queries += g.queries;
    saw_x_start = saw_x_start || g.starting_player == Player::X;
    saw_o_start = saw_o_start || g.starting_player == Player::O;
  }
  CHECK(rep.wins == wins);
  CHECK(rep.ties == ties);
  CHECK(rep.losses == losses);
  CHECK(rep.wins + rep.ties + rep.losses == cfg.games);
  CHECK(rep.total_fallbacks == fallbacks);
  CHECK(rep.s_percent == doctest::Approx(100.0 * (wins - losses) / 40.0).epsilon(1e-12));
  CHECK(rep.mean_queries ==
        doctest::Approx(static_cast<double>(queries) / 40.0).epsilon(1e-12));
  CHECK(seeds.size() == 40);  // per-game seeds are distinct
  CHECK(saw_x_start);
  CHECK(saw_o_start);
}

TEST_CASE("context provider factory and prompt example counts") {
  const RetrievalFixture& f = fixture();
  RetrievalConfig rc;
  rc.db_fraction = 0.01;
  const GameState probe_state = from_board_string("120210000", Player::X);

  SUBCASE("fixed provider serves exactly K examples and never queries") {
    ScriptedBackend backend(first_legal_policy(), 42);
    FixedContextProvider provider(f.db, f.params, rc, 3);
    provider.begin_decision(probe_state, backend);
    const std::string prompt = provider.prompt_for(probe_state, backend);
    CHECK(count_occurrences(prompt, "\nExample ") == 3);
    CHECK(backend.query_count() == 0);
  }

  SUBCASE("entropy provider probes once per decision and scales its examples") {
    // Probe entropy 1.2 -> k = ceil(2 + 3 * 1.2) = 6.
    ScriptedBackend backend(first_legal_policy(1.2), 42);
    GenParams gen;
    EntropyContextProvider provider(f.db, f.params, rc, gen, 99);
    provider.begin_decision(probe_state, backend);
    CHECK(backend.query_count() == 1);
    CHECK(provider.last_probe_entropy() == doctest::Approx(1.2).epsilon(1e-9));
    const std::string prompt = provider.prompt_for(probe_state, backend);
    CHECK(count_occurrences(prompt, "\nExample ") == 6);
    CHECK(backend.query_count() == 1);  // rendering does not query

    // A certain probe shrinks the context to the base k0 = 2.
    ScriptedBackend calm(first_legal_policy(0.0), 42);
    EntropyContextProvider calm_provider(f.db, f.params, rc, gen, 99);
    calm_provider.begin_decision(probe_state, calm);
    CHECK(count_occurrences(calm_provider.prompt_for(probe_state, calm), "\nExample ") == 2);
  }

  SUBCASE("factory wires the configured mode") {
    MatchConfig cfg;
    cfg.context = ContextMode::FixedSize;
    cfg.fixed_k = 2;
    cfg.retrieval = rc;
    ScriptedBackend backend(first_legal_policy(), 42);
    Components comp{&table(), &f.params, &f.db, &backend};
    auto provider = make_context_provider(cfg, comp, 5);
    const std::string prompt = provider->prompt_for(probe_state, backend);
    CHECK(count_occurrences(prompt, "\nExample ") == 2);

    cfg.context = ContextMode::None;
    auto none = make_context_provider(cfg, comp, 5);
    CHECK(count_occurrences(none->prompt_for(probe_state, backend), "\nExample ") == 0);
  }
}

TEST_CASE("retrieval-backed tournaments count probe queries") {
  const RetrievalFixture& f = fixture();
  MatchConfig plain;
  plain.games = 5;
  plain.cot = ReasonerMode::Direct;
  MatchConfig entropy = plain;
  entropy.context = ContextMode::EntropyGuided;
  entropy.retrieval.db_fraction = 0.01;

  ScriptedBackend b1(first_legal_policy(0.8), 42);
  ScriptedBackend b2(first_legal_policy(0.8), 42);
  Components c_plain{&table(), nullptr, nullptr, &b1};
  Components c_entropy{&table(), &f.params, &f.db, &b2};

  TournamentReport rp = run_tournament(plain, c_plain);
  TournamentReport re = run_tournament(entropy, c_entropy);
  // Same policy, same seeds: identical move sequences, but each decision pays
  // one extra probe query in the adaptive-context run.
  for (size_t i = 0; i < 5; ++i) {
    CHECK(rp.games[i].moves == re.games[i].moves);
    CHECK(re.games[i].queries == 2 * rp.games[i].queries);
  }
}

// ---------------------------------------------------------------------------
// Entropy study
// ---------------------------------------------------------------------------

TEST_CASE("entropy_study samples, clusters, and correlates") {
  ScriptedBackend backend(entropy_mirror_policy(table(), 1.0, 0.05), 42);
  Components comp{&table(), nullptr, nullptr, &backend};
  RetrievalConfig rc;
  GenParams gen;
  EntropyStudy study = entropy_study(60, 11, comp, rc, gen);

  CHECK(study.requested == 60);
  REQUIRE(study.records.size() == 60);
  int counts[3] = {0, 0, 0};
  for (const StudyRecord& r : study.records) {
    CHECK(r.percentile >= 0.0);
    CHECK(r.percentile <= 1.0);
    CHECK(r.entropy >= 0.0);
    CHECK(!is_terminal(r.state));
    // The cluster matches the percentile terciles.
    const OptimalityCluster expect = r.percentile < 1.0 / 3.0 ? OptimalityCluster::Suboptimal
                                     : r.percentile < 2.0 / 3.0 ? OptimalityCluster::Moderate
                                                                : OptimalityCluster::NearOptimal;
    CHECK(r.cluster == expect);
    counts[static_cast<int>(r.cluster)]++;
    // The sampled move is legal in the sampled state.
    bool legal = false;
    for (const Coord& m : legal_moves(r.state)) legal = legal || m == r.move;
    CHECK(legal);
  }
  CHECK(study.cluster_counts[0] == counts[0]);
  CHECK(study.cluster_counts[1] == counts[1]);
  CHECK(study.cluster_counts[2] == counts[2]);
  CHECK(counts[0] + counts[1] + counts[2] == 60);

  // The mirror backend reports high entropy on poor moves, so the
  // correlation must come out negative and significant even at n = 60.
  CHECK(!study.spearman.degenerate);
  CHECK(study.spearman.stat < -0.3);
  CHECK(study.spearman.p < 0.05);
  CHECK(study.kendall.stat < 0.0);

  // Same seed, same study.
  ScriptedBackend b2(entropy_mirror_policy(table(), 1.0, 0.05), 42);
  Components c2{&table(), nullptr, nullptr, &b2};
  EntropyStudy again = entropy_study(60, 11, c2, rc, gen);
  REQUIRE(again.records.size() == study.records.size());
  for (size_t i = 0; i < study.records.size(); ++i) {
    CHECK(again.records[i].state == study.records[i].state);
    CHECK(again.records[i].entropy == study.records[i].entropy);
  }
}

TEST_CASE("entropy_study with constant entropies reports the degenerate convention") {
  ScriptedBackend backend(first_legal_policy(0.0), 42);
  Components comp{&table(), nullptr, nullptr, &backend};
  EntropyStudy study = entropy_study(30, 5, comp, RetrievalConfig{}, GenParams{});
  CHECK(study.spearman.degenerate);
  CHECK(study.spearman.stat == 0.0);
  CHECK(study.spearman.p == 1.0);
  CHECK(study.kendall.degenerate);
}

// ---------------------------------------------------------------------------
// Configuration
// ---------------------------------------------------------------------------

TEST_CASE("config text parsing applies every section") {
  const std::string text = R"(
# commented line, then a blank one

opponent.skill = 0.5
opponent.orientation = literal
embedder.epochs = 10          # trailing comment
retrieval.k0 = 4
retrieval.db_fraction = 0.3
gen.temperature = 0.7
reasoner.n_paths = 5
reasoner.thresholds = 0, 0.6, 1.2
reasoner.branches = 1, 2, 4
reasoner.first_move_exempt = false
harness.games = 12
harness.seed = 99
backend.kind = scripted
backend.policy = oracle
)";
  AppConfig cfg = parse_config_text(text);
  CHECK(cfg.opponent.skill == 0.5);
  CHECK(cfg.opponent.orientation == RankOrientation::Literal);
  CHECK(cfg.embedder.epochs == 10);
  CHECK(cfg.retrieval.k0 == 4);
  CHECK(cfg.retrieval.db_fraction == 0.3);
  CHECK(cfg.reasoner.gen.temperature == 0.7);
  CHECK(cfg.reasoner.n_paths == 5);
  CHECK(cfg.reasoner.schedule.thresholds == std::vector<double>{0.0, 0.6, 1.2});
  CHECK(cfg.reasoner.schedule.branches == std::vector<int>{1, 2, 4});
  CHECK(!cfg.reasoner.first_move_exempt);
  CHECK(cfg.games == 12);
  CHECK(cfg.seed == 99);
  CHECK(cfg.backend_policy == "oracle");

  // Untouched fields keep their defaults.
  CHECK(cfg.retrieval.k_max == 10);
  CHECK(cfg.backend_kind == "scripted");
}

TEST_CASE("config errors: unknown keys, bad values, broken schedules") {
  AppConfig cfg;
  CHECK_THROWS_AS(apply_config_line(cfg, "opponent.skil", "0.5"), ConfigError);
  CHECK_THROWS_AS(apply_config_line(cfg, "opponent.skill", "1.5"), ConfigError);
  CHECK_THROWS_AS(apply_config_line(cfg, "opponent.skill", "abc"), ConfigError);
  CHECK_THROWS_AS(apply_config_line(cfg, "harness.games", "0"), ConfigError);
  CHECK_THROWS_AS(apply_config_line(cfg, "retrieval.db_fraction", "2"), ConfigError);
  CHECK_THROWS_AS(apply_config_line(cfg, "backend.kind", "telepathy"), ConfigError);
  CHECK_THROWS_AS(apply_config_line(cfg, "reasoner.first_move_exempt", "maybe"), ConfigError);
  // Schedule edits are validated immediately, so a length mismatch throws.
  CHECK_THROWS_AS(apply_config_line(cfg, "reasoner.thresholds", "0, 0.5, 1.0, 1.5"),
                  std::invalid_argument);
  CHECK_THROWS_AS(parse_config_text("this line has no equals sign"), ConfigError);
  CHECK_THROWS_AS(load_config_file("/tmp/ttt_no_such_config.cfg"), ConfigError);
}

TEST_CASE("mode string parsing for CLI flags") {
  int k = -1;
  CHECK(context_mode_from_string("none", &k) == ContextMode::None);
  CHECK(context_mode_from_string("entropy", &k) == ContextMode::EntropyGuided);
  CHECK(context_mode_from_string("fixed", &k) == ContextMode::FixedSize);
  CHECK(k == -1);  // bare "fixed" leaves K alone
  CHECK(context_mode_from_string("fixed:6", &k) == ContextMode::FixedSize);
  CHECK(k == 6);
  CHECK_THROWS_AS(context_mode_from_string("fixed=6", &k), ConfigError);
  CHECK_THROWS_AS(context_mode_from_string("adaptive", &k), ConfigError);

  CHECK(reasoner_mode_from_string("none") == ReasonerMode::Direct);
  CHECK(reasoner_mode_from_string("single") == ReasonerMode::SingleCot);
  CHECK(reasoner_mode_from_string("multi") == ReasonerMode::MultiCot);
  CHECK(reasoner_mode_from_string("tree") == ReasonerMode::TreeCot);
  CHECK(reasoner_mode_from_string("entropy") == ReasonerMode::EntropyGuided);
  CHECK_THROWS_AS(reasoner_mode_from_string("beam"), ConfigError);

  CHECK(orientation_from_string("literal") == RankOrientation::Literal);
  CHECK(orientation_from_string("strength-aligned") == RankOrientation::StrengthAligned);
  CHECK_THROWS_AS(orientation_from_string("reversed"), ConfigError);
}

TEST_CASE("environment override replaces the backend url") {
  AppConfig cfg;
  const std::string original = cfg.backend_url;
  unsetenv("TTT_BACKEND_URL");
  apply_env_overrides(cfg);
  CHECK(cfg.backend_url == original);
  setenv("TTT_BACKEND_URL", "http://example.test:9999/v1", 1);
  apply_env_overrides(cfg);
  CHECK(cfg.backend_url == "http://example.test:9999/v1");
  unsetenv("TTT_BACKEND_URL");
}

// ---------------------------------------------------------------------------
// Report files
// ---------------------------------------------------------------------------

TEST_CASE("tournament reports serialize deterministically with faithful fields") {
  MatchConfig cfg;
  cfg.games = 3;
  cfg.seed = 42;
  ScriptedBackend backend(first_legal_policy(0.3), 42);
  Components comp{&table(), nullptr, nullptr, &backend};
  TournamentReport rep = run_tournament(cfg, comp);

  const std::string j1 = "/tmp/ttt_rep_a.json";
  const std::string j2 = "/tmp/ttt_rep_b.json";
  write_tournament_json(rep, j1);
  write_tournament_json(rep, j2);
  CHECK(read_file(j1) == read_file(j2));

  nlohmann::json doc = nlohmann::json::parse(read_file(j1));
  CHECK(doc.at("format") == "ttt-report-v1");
  CHECK(doc.at("config").at("context") == "none");
  CHECK(doc.at("config").at("cot") == "none");
  CHECK(doc.at("config").at("games") == 3);
  CHECK(doc.at("config").at("opponent").at("orientation") == "strength-aligned");
  CHECK(doc.at("summary").at("wins").get<int>() == rep.wins);
  CHECK(doc.at("summary").at("ties").get<int>() == rep.ties);
  CHECK(doc.at("summary").at("losses").get<int>() == rep.losses);
  CHECK(doc.at("summary").at("s_percent").get<double>() == rep.s_percent);
  CHECK(doc.at("summary").at("mean_queries").get<double>() == rep.mean_queries);
  REQUIRE(doc.at("games").size() == 3);
  CHECK(doc.at("games")[0].at("moves").size() == rep.games[0].moves.size());

  const std::string c1 = "/tmp/ttt_rep_a.csv";
  const std::string c2 = "/tmp/ttt_rep_b.csv";
  write_tournament_csv(rep, c1);
  write_tournament_csv(rep, c2);
  const std::string csv = read_file(c1);
  CHECK(csv == read_file(c2));
  CHECK(csv.rfind("game,seed,starting_player,score,queries,fallbacks,moves\n", 0) == 0);
  CHECK(count_occurrences(csv, "\n") == 4);  // header + one line per game
}

TEST_CASE("study reports serialize deterministically with faithful fields") {
  ScriptedBackend backend(entropy_mirror_policy(table(), 1.0, 0.05), 42);
  Components comp{&table(), nullptr, nullptr, &backend};
  EntropyStudy study = entropy_study(25, 3, comp, RetrievalConfig{}, GenParams{});

  const std::string j1 = "/tmp/ttt_study_a.json";
  const std::string j2 = "/tmp/ttt_study_b.json";
  write_study_json(study, 3, j1);
  write_study_json(study, 3, j2);
  CHECK(read_file(j1) == read_file(j2));

  nlohmann::json doc = nlohmann::json::parse(read_file(j1));
  CHECK(doc.at("format") == "ttt-entropy-study-v1");
  CHECK(doc.at("seed") == 3);
  CHECK(doc.at("requested") == 25);
  CHECK(doc.at("evaluated") == 25);
  CHECK(doc.at("correlation").at("spearman_rho").get<double>() == study.spearman.stat);
  CHECK(doc.at("correlation").at("p_value_methods").contains("spearman"));
  CHECK(doc.at("clusters").at("suboptimal").get<int>() == study.cluster_counts[0]);
  REQUIRE(doc.at("records").size() == 25);
  CHECK(doc.at("records")[0].at("mover") == "X");

  const std::string c1 = "/tmp/ttt_study_a.csv";
  write_study_csv(study, c1);
  const std::string csv = read_file(c1);
  CHECK(csv.rfind("board,mover,move_x,move_y,entropy,percentile,cluster\n", 0) == 0);
  CHECK(count_occurrences(csv, "\n") == 26);
}

TEST_CASE("enum names used across reports and flags") {
  CHECK(std::string(to_string(ContextMode::None)) == "none");
  CHECK(std::string(to_string(ContextMode::FixedSize)) == "fixed");
  CHECK(std::string(to_string(ContextMode::EntropyGuided)) == "entropy");
  CHECK(std::string(to_string(ReasonerMode::Direct)) == "none");
  CHECK(std::string(to_string(ReasonerMode::SingleCot)) == "single");
  CHECK(std::string(to_string(ReasonerMode::MultiCot)) == "multi");
  CHECK(std::string(to_string(ReasonerMode::TreeCot)) == "tree");
  CHECK(std::string(to_string(ReasonerMode::EntropyGuided)) == "entropy");
  CHECK(std::string(to_string(RankOrientation::StrengthAligned)) == "strength-aligned");
  CHECK(std::string(to_string(RankOrientation::Literal)) == "literal");
  CHECK(std::string(to_string(OptimalityCluster::Suboptimal)) == "suboptimal");
  CHECK(std::string(to_string(OptimalityCluster::Moderate)) == "moderate");
  CHECK(std::string(to_string(OptimalityCluster::NearOptimal)) == "near_optimal");
}
