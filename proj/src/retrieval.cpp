#include "ttt/retrieval.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include <nlohmann/json.hpp>

#include "ttt/rng.hpp"

namespace ttt {

VectorDb build_db(const std::vector<TrainExample>& dataset, const EncoderParams& params,
                  const RetrievalConfig& cfg) {
  const size_t n = dataset.size();
  size_t take = static_cast<size_t>(
      std::ceil(cfg.db_fraction * static_cast<double>(n)));
  take = std::min(take, n);

  // Partial Fisher-Yates: the first `take` draws define membership and order.
  std::vector<size_t> idx(n);
  for (size_t i = 0; i < n; ++i) idx[i] = i;
  Rng rng(cfg.db_seed);
  std::vector<DbEntry> entries;
  entries.reserve(take);
  for (size_t i = 0; i < take; ++i) {
    size_t j = i + static_cast<size_t>(rng.next_below(static_cast<int>(n - i)));
    std::swap(idx[i], idx[j]);
    const TrainExample& ex = dataset[idx[i]];
    DbEntry e;
    e.state = ex.state;
    e.move = ex.best_move;
    e.embedding = encode(params, flatten(ex.state));
    entries.push_back(std::move(e));
  }
  return VectorDb(std::move(entries));
}

double cosine_sim(const std::vector<double>& a, const std::vector<double>& b) {
  double dot = 0.0, na = 0.0, nb = 0.0;
  for (size_t i = 0; i < a.size() && i < b.size(); ++i) {
    dot += a[i] * b[i];
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  if (na == 0.0 || nb == 0.0) return 0.0;
  return dot / (std::sqrt(na) * std::sqrt(nb));
}

int adaptive_k(double h_q, const RetrievalConfig& cfg, size_t db_size) {
  int k = static_cast<int>(std::ceil(cfg.k0 + cfg.scale * h_q));
  k = std::min(k, cfg.k_max);
  k = std::max(k, std::min(cfg.k0, static_cast<int>(db_size)));
  k = std::min(k, static_cast<int>(db_size));
  return k;
}

std::vector<RetrievedExample> retrieve(const GameState& query, double h_q,
                                       const EncoderParams& params, const VectorDb& db,
                                       const RetrievalConfig& cfg) {
  int k = adaptive_k(h_q, cfg, db.size());
  std::vector<double> qz = encode(params, flatten(canonicalize(query)));

  std::vector<std::pair<double, size_t>> scored;  // (similarity, insertion index)
  scored.reserve(db.size());
  for (size_t i = 0; i < db.size(); ++i) {
    scored.emplace_back(cosine_sim(qz, db.entries()[i].embedding), i);
  }
  std::stable_sort(scored.begin(), scored.end(),
                   [](const auto& a, const auto& b) { return a.first > b.first; });

  std::vector<RetrievedExample> out;
  out.reserve(static_cast<size_t>(k));
  for (int i = 0; i < k && i < static_cast<int>(scored.size()); ++i) {
    const DbEntry& e = db.entries()[scored[i].second];
    out.push_back(RetrievedExample{e.state, e.move, scored[i].first});
  }
  return out;
}

void VectorDb::save(const std::string& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DbIoError("save: cannot open " + path);
  for (const DbEntry& e : entries_) {
    nlohmann::ordered_json j;
    j["board"] = board_string(e.state);
    j["mover"] = e.state.to_move == Player::X ? "X" : "O";
    j["move"] = {e.move.x, e.move.y};
    nlohmann::ordered_json emb = nlohmann::ordered_json::array();
    for (double v : e.embedding) emb.push_back(v);
    j["embedding"] = std::move(emb);
    out << j.dump() << '\n';
  }
  if (!out) throw DbIoError("save: write failed for " + path);
}

VectorDb VectorDb::load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DbIoError("load: cannot open " + path);
  std::vector<DbEntry> entries;
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw DbIoError("load: bad JSON at line " + std::to_string(line_no) + ": " + e.what());
    }
    DbEntry e;
    e.state = from_board_string(j.at("board").get<std::string>(),
                                j.at("mover").get<std::string>() == "X" ? Player::X : Player::O);
    e.move = Coord{j.at("move")[0].get<int>(), j.at("move")[1].get<int>()};
    e.embedding = j.at("embedding").get<std::vector<double>>();
    entries.push_back(std::move(e));
  }
  return VectorDb(std::move(entries));
}

}  // namespace ttt
