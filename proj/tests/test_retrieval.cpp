#include <doctest.h>

#include <algorithm>
#include <string>
#include <vector>

#include "ttt/retrieval.hpp"
#include "ttt/rng.hpp"

using namespace ttt;

namespace {

const SolvedTable& table() {
  static SolvedTable t = SolvedTable::solve_all();
  return t;
}

std::vector<TrainExample> full_dataset() {
  std::vector<TrainExample> d;
  d.reserve(table().entries().size());
  for (const SolvedEntry& e : table().entries()) {
    d.push_back(TrainExample{e.state, e.moves.front().move});
  }
  return d;
}

EncoderParams test_params() {
  TrainConfig cfg;
  Rng rng(cfg.seed);
  return init_params(cfg, rng);  // untrained weights: retrieval mechanics only
}

}  // namespace

TEST_CASE("adaptive_k frozen values at the default configuration") {
  RetrievalConfig cfg;  // k0=2, scale=3, k_max=10
  const size_t big_db = 904;
  CHECK(adaptive_k(0.0, cfg, big_db) == 2);
  CHECK(adaptive_k(0.1, cfg, big_db) == 3);   // ceil(2.3)
  CHECK(adaptive_k(1.2, cfg, big_db) == 6);   // ceil(5.6)
  CHECK(adaptive_k(2.0, cfg, big_db) == 8);   // exact integer, no bump
  CHECK(adaptive_k(5.0, cfg, big_db) == 10);  // capped at k_max
  // Floors and caps from the database size.
  CHECK(adaptive_k(0.0, cfg, 1) == 1);
  CHECK(adaptive_k(9.0, cfg, 3) == 3);
  CHECK(adaptive_k(0.0, cfg, 0) == 0);
  // Monotone non-decreasing in entropy.
  int prev = 0;
  for (int i = 0; i <= 40; ++i) {
    int k = adaptive_k(0.1 * i, cfg, big_db);
    CHECK(k >= prev);
    prev = k;
  }
}

TEST_CASE("cosine similarity frozen values and the zero-norm rule") {
  CHECK(cosine_sim({1, 0}, {1, 0}) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(cosine_sim({1, 0}, {0, 1}) == doctest::Approx(0.0));
  CHECK(cosine_sim({1, 2}, {2, 1}) == doctest::Approx(0.8).epsilon(1e-15));
  CHECK(cosine_sim({1, 1}, {-1, -1}) == doctest::Approx(-1.0).epsilon(1e-15));
  CHECK(cosine_sim({0, 0}, {1, 2}) == 0.0);
  CHECK(cosine_sim({1, 2}, {0, 0}) == 0.0);
}

TEST_CASE("build_db takes ceil(fraction * N) states, deterministically") {
  const std::vector<TrainExample> data = full_dataset();
  const EncoderParams params = test_params();
  RetrievalConfig cfg;  // db_fraction = 0.2, db_seed = 42

  VectorDb db = build_db(data, params, cfg);
  CHECK(db.size() == 904);  // ceil(0.2 * 4520)

  SUBCASE("same seed reproduces membership and order; embeddings match encode") {
    VectorDb again = build_db(data, params, cfg);
    REQUIRE(again.size() == db.size());
    for (size_t i = 0; i < db.size(); ++i) {
      CHECK(db.entries()[i].state == again.entries()[i].state);
      CHECK(db.entries()[i].move == again.entries()[i].move);
      CHECK(db.entries()[i].embedding == again.entries()[i].embedding);
      CHECK(db.entries()[i].embedding == encode(params, flatten(db.entries()[i].state)));
    }
    // No state appears twice: sampling is without replacement.
    std::vector<std::string> keys;
    for (const DbEntry& e : db.entries()) keys.push_back(board_string(e.state));
    std::sort(keys.begin(), keys.end());
    CHECK(std::adjacent_find(keys.begin(), keys.end()) == keys.end());
  }

  SUBCASE("a different seed yields a different sample order") {
    RetrievalConfig other = cfg;
    other.db_seed = 7;
    VectorDb alt = build_db(data, params, other);
    REQUIRE(alt.size() == db.size());
    bool any_difference = false;
    for (size_t i = 0; i < db.size() && !any_difference; ++i) {
      any_difference = !(db.entries()[i].state == alt.entries()[i].state);
    }
    CHECK(any_difference);
  }

  SUBCASE("fraction 1 embeds the whole dataset as a permutation") {
    RetrievalConfig all = cfg;
    all.db_fraction = 1.0;
    VectorDb whole = build_db(data, params, all);
    CHECK(whole.size() == data.size());
    std::vector<std::string> keys;
    for (const DbEntry& e : whole.entries()) keys.push_back(board_string(e.state));
    std::sort(keys.begin(), keys.end());
    CHECK(std::adjacent_find(keys.begin(), keys.end()) == keys.end());
  }
}

TEST_CASE("retrieve matches a brute-force top-k with stable ties") {
  const std::vector<TrainExample> data = full_dataset();
  const EncoderParams params = test_params();
  RetrievalConfig cfg;
  cfg.db_fraction = 0.01;  // 46 entries: small enough to check by hand
  VectorDb db = build_db(data, params, cfg);
  REQUIRE(db.size() == 46);

  const GameState query = from_board_string("120210000", Player::X);
  for (double h : {0.0, 0.9, 2.5}) {
    const std::vector<RetrievedExample> got = retrieve(query, h, params, db, cfg);

    // Independent computation: score, stable sort descending, cut at k.
    const std::vector<double> qz = encode(params, flatten(canonicalize(query)));
    std::vector<std::pair<double, size_t>> scored;
    for (size_t i = 0; i < db.size(); ++i) {
      scored.emplace_back(cosine_sim(qz, db.entries()[i].embedding), i);
    }
    std::stable_sort(scored.begin(), scored.end(),
                     [](const auto& a, const auto& b) { return a.first > b.first; });
    const int k = adaptive_k(h, cfg, db.size());

    REQUIRE(got.size() == static_cast<size_t>(k));
    for (int i = 0; i < k; ++i) {
      CHECK(got[i].state == db.entries()[scored[i].second].state);
      CHECK(got[i].move == db.entries()[scored[i].second].move);
      CHECK(got[i].similarity == scored[i].first);
      if (i > 0) CHECK(got[i - 1].similarity >= got[i].similarity);
    }
  }
}

TEST_CASE("equal similarities keep insertion order") {
  // Three entries sharing one embedding direction: all tie against any query.
  const EncoderParams params = test_params();
  std::vector<double> shared = encode(params, flatten(GameState{}));
  std::vector<DbEntry> entries;
  const char* boards[] = {"100000000", "010000000", "001000000"};
  for (const char* b : boards) {
    DbEntry e;
    e.state = from_board_string(b, Player::O);
    e.move = Coord{2, 2};
    e.embedding = shared;
    entries.push_back(e);
  }
  VectorDb db{std::move(entries)};
  RetrievalConfig cfg;
  const std::vector<RetrievedExample> got = retrieve(GameState{}, 5.0, params, db, cfg);
  REQUIRE(got.size() == 3);
  CHECK(board_string(got[0].state) == "100000000");
  CHECK(board_string(got[1].state) == "010000000");
  CHECK(board_string(got[2].state) == "001000000");
}

TEST_CASE("token estimation is ceil(words * 1.3)") {
  CHECK(estimate_tokens("a b c") == 4);
  CHECK(estimate_tokens("") == 0);
  CHECK(estimate_tokens("   ") == 0);
  CHECK(estimate_tokens("one") == 2);                    // ceil(1.3)
  CHECK(estimate_tokens("one\ntwo\tthree  four") == 6);  // ceil(5.2)
  CHECK(estimate_tokens("exactly ten words here so the count lands on integers") == 13);
}

TEST_CASE("prompt rendering reproduces the reference transcript byte for byte") {
  RetrievedExample ex;
  ex.state = from_board_string("121210002", Player::X);
  ex.move = Coord{2, 2};
  ex.similarity = 0.9;

  const GameState query = from_board_string("201012000", Player::X);
  RetrievalConfig cfg;
  cfg.token_budget = 10000;
  const PromptContext ctx = build_prompt(query, {ex}, cfg);

  const std::string expected =
      std::string("EXAMPLES OF BOARDS AND \n") + "CORRISPONDING OPTIMAL MOVES:\n" +
      "\n" + "Example 1: \n" + "Board:\n" +
      "X | O | X\n" + "O | X | _\n" + "_ | _ | O" +
      "\nOptimal move: (2,2)\n" +
      "\n" + "CURRENT GAME STATE: \n" +
      "You are playing Tic-Tac-Toe as X.\n" +
      "The opponent is O.\n" +
      "Current board (3x3, _ for empty):\n" +
      "O | _ | X\n" + "_ | X | O\n" + "_ | _ | _" +
      "\n\nEmpty positions (x,y): \n" +
      "(0,1), (1,0), (2,0), (2,1), (2,2)" +
      "\n\nYou are X.\n" +
      "Your next move in (x,y) format is:";
  CHECK(ctx.text == expected);
  CHECK(ctx.token_estimate == estimate_tokens(expected));

  // Without examples the heading block disappears entirely.
  const PromptContext bare = build_prompt(query, {}, cfg);
  CHECK(bare.text.rfind("CURRENT GAME STATE: \n", 0) == 0);
  CHECK(bare.examples.empty());
}

TEST_CASE("the token budget drops the least similar examples first") {
  const GameState query = from_board_string("201012000", Player::X);
  std::vector<RetrievedExample> examples;
  const char* boards[] = {"121210002", "100020000", "120000000"};
  for (int i = 0; i < 3; ++i) {
    RetrievedExample ex;
    ex.state = from_board_string(boards[i], Player::X);
    ex.move = table().rank_moves(ex.state).front().move;
    ex.similarity = 0.9 - 0.1 * i;  // descending, as retrieve() returns
    examples.push_back(ex);
  }

  RetrievalConfig wide;
  wide.token_budget = 10000;
  const int t3 = build_prompt(query, examples, wide).token_estimate;
  const int t2 = build_prompt(query, {examples[0], examples[1]}, wide).token_estimate;
  const int t0 = build_prompt(query, {}, wide).token_estimate;
  REQUIRE(t2 < t3);
  REQUIRE(t0 < t2);

  RetrievalConfig tight = wide;
  tight.token_budget = t3 - 1;  // forces at least one drop
  const PromptContext ctx = build_prompt(query, examples, tight);
  CHECK(ctx.examples.size() < 3);
  CHECK(ctx.token_estimate <= tight.token_budget);
  // Survivors are the most similar prefix.
  for (size_t i = 0; i < ctx.examples.size(); ++i) {
    CHECK(ctx.examples[i].state == examples[i].state);
  }
  // Exactly at the full estimate, nothing is dropped.
  RetrievalConfig exact = wide;
  exact.token_budget = t3;
  CHECK(build_prompt(query, examples, exact).examples.size() == 3);

  RetrievalConfig impossible = wide;
  impossible.token_budget = t0 - 1;
  CHECK_THROWS_AS(build_prompt(query, examples, impossible), BudgetTooSmall);
}

TEST_CASE("extract_query_state recovers the rendered query board") {
  const GameState query = from_board_string("201012000", Player::X);
  RetrievalConfig cfg;
  const PromptContext ctx = build_prompt(query, {}, cfg);
  CHECK(extract_query_state(ctx.text) == query);

  // Also with examples present: the marker selects the query section.
  RetrievedExample ex;
  ex.state = from_board_string("121210002", Player::X);
  ex.move = Coord{2, 2};
  const PromptContext with_ex = build_prompt(query, {ex}, cfg);
  CHECK(extract_query_state(with_ex.text) == query);

  CHECK_THROWS_AS(extract_query_state("no board here"), BoardParseError);
}

TEST_CASE("vector db save/load round-trips exactly") {
  const std::vector<TrainExample> data = full_dataset();
  const EncoderParams params = test_params();
  RetrievalConfig cfg;
  cfg.db_fraction = 0.005;  // 23 entries
  VectorDb db = build_db(data, params, cfg);

  const std::string path = "/tmp/ttt_db_roundtrip.jsonl";
  db.save(path);
  VectorDb loaded = VectorDb::load(path);
  REQUIRE(loaded.size() == db.size());
  for (size_t i = 0; i < db.size(); ++i) {
    CHECK(loaded.entries()[i].state == db.entries()[i].state);
    CHECK(loaded.entries()[i].move == db.entries()[i].move);
    CHECK(loaded.entries()[i].embedding == db.entries()[i].embedding);
  }
  CHECK_THROWS_AS(VectorDb::load("/tmp/ttt_no_such_db.jsonl"), DbIoError);
}
