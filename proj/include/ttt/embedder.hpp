#pragma once

#include <array>
#include <string>
#include <vector>

#include "ttt/game.hpp"
#include "ttt/rng.hpp"

namespace ttt {

struct DivergenceDetected : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct WeightsIoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Dense row-major matrix, sized for this model (largest layer is 16x9).
struct Mat {
  int rows = 0;
  int cols = 0;
  std::vector<double> v;

  Mat() = default;
  Mat(int r, int c) : rows(r), cols(c), v(static_cast<size_t>(r) * c, 0.0) {}
  double& at(int r, int c) { return v[static_cast<size_t>(r) * cols + c]; }
  double at(int r, int c) const { return v[static_cast<size_t>(r) * cols + c]; }
};

// Autoencoder over flattened boards: 9 -> hidden (tanh) -> latent (linear)
// -> hidden (tanh) -> 9 (linear). Weights w1/w2 encode, w3/w4 decode.
struct EncoderParams {
  Mat w1, w3;                  // hidden x input, hidden x latent
  Mat w2, w4;                  // latent x hidden, input x hidden
  std::vector<double> b1, b2, b3, b4;

  int input_dim() const { return w1.cols; }
  int hidden_dim() const { return w1.rows; }
  int latent_dim() const { return w2.rows; }
};

struct TrainConfig {
  int hidden_dim = 16;
  int latent_dim = 8;
  // Margin and weight sized so the trained latent space separates move
  // classes (held-out different-move / same-move distance ratio >= 1.2, the
  // release gate) with real headroom; smaller values train a good
  // reconstructor whose classes barely separate.
  double margin = 3.0;          // tau: target separation for different-move pairs
  double lambda = 2.0;          // contrastive weight in the total loss
  double learning_rate = 0.01;
  int epochs = 3000;
  int pair_batch = 256;         // pairs sampled per epoch, half same-move
  std::uint64_t seed = 42;
};

// A contrastive training pair of flattened canonical boards.
struct BoardPair {
  std::array<double, 9> a{};
  std::array<double, 9> b{};
  bool same_move = false;
};

// A canonical non-terminal state labelled with its best move.
struct TrainExample {
  GameState state;
  Coord best_move;
};

struct TrainResult {
  EncoderParams params;
  std::vector<double> loss_curve;  // total loss at the start of each epoch
};

// Weights ~ U(-0.5, 0.5) / sqrt(fan_in), biases zero, drawn in a fixed order
// from cfg.seed so retraining is bit-identical.
EncoderParams init_params(const TrainConfig& cfg, Rng& rng);

std::vector<double> encode(const EncoderParams& p, const std::array<double, 9>& x);
std::array<double, 9> decode(const EncoderParams& p, const std::vector<double>& z);

// Contrastive term for one pair of latent vectors: ||zi - zj||^2 when
// same_move, max(0, margin - ||zi - zj||)^2 otherwise.
double contrastive_term(const std::vector<double>& zi, const std::vector<double>& zj,
                        bool same_move, double margin);

// Mean squared reconstruction error over the batch's boards plus lambda times
// the mean contrastive term over its pairs.
double loss_total(const EncoderParams& p, const std::vector<BoardPair>& batch,
                  const TrainConfig& cfg);

// Analytic gradient of loss_total in the same shapes as the parameters.
EncoderParams grad(const EncoderParams& p, const std::vector<BoardPair>& batch,
                   const TrainConfig& cfg);

// Full-batch gradient descent: one step per epoch on a freshly sampled pair
// batch (equal counts of same- and different-move pairs). Deterministic given
// cfg.seed; throws DivergenceDetected if the loss stops being finite.
TrainResult train(const std::vector<TrainExample>& dataset, const TrainConfig& cfg);

void save_params(const EncoderParams& p, const std::string& path);
EncoderParams load_params(const std::string& path);

}  // namespace ttt
