#include "ttt/embedder.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace ttt {

namespace {

std::vector<double> affine(const Mat& w, const std::vector<double>& b,
                           const double* x) {
  std::vector<double> out(static_cast<size_t>(w.rows));
  for (int r = 0; r < w.rows; ++r) {
    double acc = b[r];
    for (int c = 0; c < w.cols; ++c) acc += w.at(r, c) * x[c];
    out[r] = acc;
  }
  return out;
}

std::vector<double> tanh_vec(const std::vector<double>& v) {
  std::vector<double> out(v.size());
  for (size_t i = 0; i < v.size(); ++i) out[i] = std::tanh(v[i]);
  return out;
}

// Activations for one board, kept for the backward pass.
struct Forward {
  std::vector<double> x;   // input copy
  std::vector<double> a1;  // tanh(w1 x + b1)
  std::vector<double> z;   // w2 a1 + b2
  std::vector<double> a2;  // tanh(w3 z + b3)
  std::vector<double> xh;  // w4 a2 + b4
};

Forward run_forward(const EncoderParams& p, const std::array<double, 9>& x) {
  Forward f;
  f.x.assign(x.begin(), x.end());
  f.a1 = tanh_vec(affine(p.w1, p.b1, f.x.data()));
  f.z = affine(p.w2, p.b2, f.a1.data());
  f.a2 = tanh_vec(affine(p.w3, p.b3, f.z.data()));
  f.xh = affine(p.w4, p.b4, f.a2.data());
  return f;
}

void add_outer(Mat& g, const std::vector<double>& d, const std::vector<double>& x,
               double scale) {
  for (int r = 0; r < g.rows; ++r) {
    for (int c = 0; c < g.cols; ++c) g.at(r, c) += scale * d[r] * x[c];
  }
}

void add_vec(std::vector<double>& g, const std::vector<double>& d, double scale) {
  for (size_t i = 0; i < g.size(); ++i) g[i] += scale * d[i];
}

std::vector<double> matT_vec(const Mat& w, const std::vector<double>& d) {
  std::vector<double> out(static_cast<size_t>(w.cols), 0.0);
  for (int r = 0; r < w.rows; ++r) {
    for (int c = 0; c < w.cols; ++c) out[c] += w.at(r, c) * d[r];
  }
  return out;
}

// Backpropagates a gradient on the latent vector through the encoder half.
void backprop_encoder(const EncoderParams& p, const Forward& f,
                      const std::vector<double>& dz, double scale, EncoderParams& g) {
  add_outer(g.w2, dz, f.a1, scale);
  add_vec(g.b2, dz, scale);
  std::vector<double> da1 = matT_vec(p.w2, dz);
  for (size_t i = 0; i < da1.size(); ++i) da1[i] *= 1.0 - f.a1[i] * f.a1[i];
  add_outer(g.w1, da1, f.x, scale);
  add_vec(g.b1, da1, scale);
}

// Backpropagates the reconstruction error of one board through the full net.
void backprop_reconstruction(const EncoderParams& p, const Forward& f, double scale,
                             EncoderParams& g) {
  std::vector<double> d(f.xh.size());
  for (size_t i = 0; i < d.size(); ++i) d[i] = 2.0 * (f.xh[i] - f.x[i]);

  add_outer(g.w4, d, f.a2, scale);
  add_vec(g.b4, d, scale);
  std::vector<double> dh2 = matT_vec(p.w4, d);
  for (size_t i = 0; i < dh2.size(); ++i) dh2[i] *= 1.0 - f.a2[i] * f.a2[i];
  add_outer(g.w3, dh2, f.z, scale);
  add_vec(g.b3, dh2, scale);
  std::vector<double> dz = matT_vec(p.w3, dh2);
  backprop_encoder(p, f, dz, scale, g);
}

double sq_dist(const std::vector<double>& a, const std::vector<double>& b) {
  double acc = 0.0;
  for (size_t i = 0; i < a.size(); ++i) {
    double d = a[i] - b[i];
    acc += d * d;
  }
  return acc;
}

EncoderParams zero_like(const EncoderParams& p) {
  EncoderParams g;
  g.w1 = Mat(p.w1.rows, p.w1.cols);
  g.w2 = Mat(p.w2.rows, p.w2.cols);
  g.w3 = Mat(p.w3.rows, p.w3.cols);
  g.w4 = Mat(p.w4.rows, p.w4.cols);
  g.b1.assign(p.b1.size(), 0.0);
  g.b2.assign(p.b2.size(), 0.0);
  g.b3.assign(p.b3.size(), 0.0);
  g.b4.assign(p.b4.size(), 0.0);
  return g;
}

Mat init_mat(int rows, int cols, Rng& rng) {
  Mat m(rows, cols);
  double scale = 1.0 / std::sqrt(static_cast<double>(cols));
  for (double& v : m.v) v = rng.next_in(-0.5, 0.5) * scale;
  return m;
}

}  // namespace

EncoderParams init_params(const TrainConfig& cfg, Rng& rng) {
  EncoderParams p;
  p.w1 = init_mat(cfg.hidden_dim, 9, rng);
  p.w2 = init_mat(cfg.latent_dim, cfg.hidden_dim, rng);
  p.w3 = init_mat(cfg.hidden_dim, cfg.latent_dim, rng);
  p.w4 = init_mat(9, cfg.hidden_dim, rng);
  p.b1.assign(cfg.hidden_dim, 0.0);
  p.b2.assign(cfg.latent_dim, 0.0);
  p.b3.assign(cfg.hidden_dim, 0.0);
  p.b4.assign(9, 0.0);
  return p;
}

std::vector<double> encode(const EncoderParams& p, const std::array<double, 9>& x) {
  std::vector<double> xv(x.begin(), x.end());
  std::vector<double> a1 = tanh_vec(affine(p.w1, p.b1, xv.data()));
  return affine(p.w2, p.b2, a1.data());
}

std::array<double, 9> decode(const EncoderParams& p, const std::vector<double>& z) {
  std::vector<double> a2 = tanh_vec(affine(p.w3, p.b3, z.data()));
  std::vector<double> xh = affine(p.w4, p.b4, a2.data());
  std::array<double, 9> out{};
  for (int i = 0; i < 9; ++i) out[i] = xh[i];
  return out;
}

double contrastive_term(const std::vector<double>& zi, const std::vector<double>& zj,
                        bool same_move, double margin) {
  double d2 = sq_dist(zi, zj);
  if (same_move) return d2;
  double gap = margin - std::sqrt(d2);
  return gap > 0.0 ? gap * gap : 0.0;
}

double loss_total(const EncoderParams& p, const std::vector<BoardPair>& batch,
                  const TrainConfig& cfg) {
  if (batch.empty()) return 0.0;
  double rec = 0.0;
  double con = 0.0;
  for (const BoardPair& pair : batch) {
    Forward fa = run_forward(p, pair.a);
    Forward fb = run_forward(p, pair.b);
    rec += sq_dist(fa.xh, fa.x) + sq_dist(fb.xh, fb.x);
    con += contrastive_term(fa.z, fb.z, pair.same_move, cfg.margin);
  }
  rec /= static_cast<double>(2 * batch.size());
  con /= static_cast<double>(batch.size());
  return rec + cfg.lambda * con;
}

EncoderParams grad(const EncoderParams& p, const std::vector<BoardPair>& batch,
                   const TrainConfig& cfg) {
  EncoderParams g = zero_like(p);
  if (batch.empty()) return g;
  const double rec_scale = 1.0 / static_cast<double>(2 * batch.size());
  const double con_scale = cfg.lambda / static_cast<double>(batch.size());

  for (const BoardPair& pair : batch) {
    Forward fa = run_forward(p, pair.a);
    Forward fb = run_forward(p, pair.b);
    backprop_reconstruction(p, fa, rec_scale, g);
    backprop_reconstruction(p, fb, rec_scale, g);

    std::vector<double> diff(fa.z.size());
    for (size_t i = 0; i < diff.size(); ++i) diff[i] = fa.z[i] - fb.z[i];
    double dist = std::sqrt(sq_dist(fa.z, fb.z));

    std::vector<double> dzi(diff.size(), 0.0);
    if (pair.same_move) {
      for (size_t i = 0; i < diff.size(); ++i) dzi[i] = 2.0 * diff[i];
    } else if (dist < cfg.margin && dist > 0.0) {
      // Hinge active. At dist == margin and at coincident latents the
      // subgradient is taken as zero.
      double coef = -2.0 * (cfg.margin - dist) / dist;
      for (size_t i = 0; i < diff.size(); ++i) dzi[i] = coef * diff[i];
    }

    bool nonzero = false;
    for (double v : dzi) {
      if (v != 0.0) {
        nonzero = true;
        break;
      }
    }
    if (nonzero) {
      backprop_encoder(p, fa, dzi, con_scale, g);
      for (double& v : dzi) v = -v;
      backprop_encoder(p, fb, dzi, con_scale, g);
    }
  }
  return g;
}

namespace {

// Buckets dataset indices by best-move cell and samples pairs uniformly:
// same-move pairs uniformly over all such pairs, different-move pairs by
// rejection on two uniform draws.
class PairSampler {
 public:
  PairSampler(const std::vector<TrainExample>& dataset)
      : dataset_(dataset) {
    for (size_t i = 0; i < dataset.size(); ++i) {
      buckets_[cell_index(dataset[i].best_move)].push_back(static_cast<int>(i));
    }
    for (int b = 0; b < 9; ++b) {
      double c = static_cast<double>(buckets_[b].size());
      pair_weight_[b] = c * (c - 1.0);
      total_weight_ += pair_weight_[b];
    }
  }

  BoardPair same_pair(Rng& rng) const {
    if (total_weight_ <= 0.0) {
      throw std::invalid_argument("pair sampling needs a move class with at least 2 states");
    }
    double u = rng.next_double() * total_weight_;
    int bucket = 8;
    double acc = 0.0;
    for (int b = 0; b < 9; ++b) {
      acc += pair_weight_[b];
      if (u < acc) {
        bucket = b;
        break;
      }
    }
    const std::vector<int>& ids = buckets_[bucket];
    int i = rng.next_below(static_cast<int>(ids.size()));
    int j = rng.next_below(static_cast<int>(ids.size() - 1));
    if (j >= i) ++j;
    return make_pair(ids[i], ids[j], true);
  }

  BoardPair diff_pair(Rng& rng) const {
    int i = rng.next_below(static_cast<int>(dataset_.size()));
    for (int tries = 0; tries < 1000; ++tries) {
      int j = rng.next_below(static_cast<int>(dataset_.size()));
      if (!(dataset_[i].best_move == dataset_[j].best_move)) return make_pair(i, j, false);
    }
    throw std::invalid_argument("pair sampling needs at least two move classes");
  }

 private:
  BoardPair make_pair(int i, int j, bool same) const {
    BoardPair p;
    p.a = flatten(dataset_[i].state);
    p.b = flatten(dataset_[j].state);
    p.same_move = same;
    return p;
  }

  const std::vector<TrainExample>& dataset_;
  std::array<std::vector<int>, 9> buckets_{};
  std::array<double, 9> pair_weight_{};
  double total_weight_ = 0.0;
};

}  // namespace

TrainResult train(const std::vector<TrainExample>& dataset, const TrainConfig& cfg) {
  if (dataset.empty()) throw std::invalid_argument("train: empty dataset");
  Rng rng(cfg.seed);
  TrainResult result;
  result.params = init_params(cfg, rng);
  PairSampler sampler(dataset);

  const int n_same = cfg.pair_batch / 2;
  const int n_diff = cfg.pair_batch - n_same;

  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    std::vector<BoardPair> batch;
    batch.reserve(cfg.pair_batch);
    for (int i = 0; i < n_same; ++i) batch.push_back(sampler.same_pair(rng));
    for (int i = 0; i < n_diff; ++i) batch.push_back(sampler.diff_pair(rng));

    double loss = loss_total(result.params, batch, cfg);
    result.loss_curve.push_back(loss);
    if (!std::isfinite(loss)) {
      throw DivergenceDetected("train: loss became non-finite at epoch " + std::to_string(epoch));
    }

    EncoderParams g = grad(result.params, batch, cfg);
    auto step_mat = [&](Mat& w, const Mat& gw) {
      for (size_t i = 0; i < w.v.size(); ++i) w.v[i] -= cfg.learning_rate * gw.v[i];
    };
    auto step_vec = [&](std::vector<double>& b, const std::vector<double>& gb) {
      for (size_t i = 0; i < b.size(); ++i) b[i] -= cfg.learning_rate * gb[i];
    };
    step_mat(result.params.w1, g.w1);
    step_mat(result.params.w2, g.w2);
    step_mat(result.params.w3, g.w3);
    step_mat(result.params.w4, g.w4);
    step_vec(result.params.b1, g.b1);
    step_vec(result.params.b2, g.b2);
    step_vec(result.params.b3, g.b3);
    step_vec(result.params.b4, g.b4);
  }
  return result;
}

namespace {

std::string fmt_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void write_mat(std::ostream& out, const char* name, const Mat& m) {
  out << name << ' ' << m.rows << ' ' << m.cols << '\n';
  for (int r = 0; r < m.rows; ++r) {
    for (int c = 0; c < m.cols; ++c) {
      if (c > 0) out << ' ';
      out << fmt_double(m.at(r, c));
    }
    out << '\n';
  }
}

void write_vec(std::ostream& out, const char* name, const std::vector<double>& v) {
  out << name << ' ' << v.size() << '\n';
  for (size_t i = 0; i < v.size(); ++i) {
    if (i > 0) out << ' ';
    out << fmt_double(v[i]);
  }
  out << '\n';
}

Mat read_mat(std::istream& in, const std::string& expect) {
  std::string name;
  int rows = 0, cols = 0;
  if (!(in >> name >> rows >> cols) || name != expect || rows <= 0 || cols <= 0) {
    throw WeightsIoError("weights: bad matrix header, expected " + expect);
  }
  Mat m(rows, cols);
  for (double& v : m.v) {
    if (!(in >> v)) throw WeightsIoError("weights: truncated matrix " + expect);
  }
  return m;
}

std::vector<double> read_vec(std::istream& in, const std::string& expect) {
  std::string name;
  int n = 0;
  if (!(in >> name >> n) || name != expect || n <= 0) {
    throw WeightsIoError("weights: bad vector header, expected " + expect);
  }
  std::vector<double> v(static_cast<size_t>(n));
  for (double& x : v) {
    if (!(in >> x)) throw WeightsIoError("weights: truncated vector " + expect);
  }
  return v;
}

}  // namespace

void save_params(const EncoderParams& p, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw WeightsIoError("save_params: cannot open " + path);
  out << "ttt-embedder 1\n";
  out << "dims " << p.input_dim() << ' ' << p.hidden_dim() << ' ' << p.latent_dim() << '\n';
  write_mat(out, "w1", p.w1);
  write_vec(out, "b1", p.b1);
  write_mat(out, "w2", p.w2);
  write_vec(out, "b2", p.b2);
  write_mat(out, "w3", p.w3);
  write_vec(out, "b3", p.b3);
  write_mat(out, "w4", p.w4);
  write_vec(out, "b4", p.b4);
  if (!out) throw WeightsIoError("save_params: write failed for " + path);
}

EncoderParams load_params(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw WeightsIoError("load_params: cannot open " + path);
  std::string magic;
  int version = 0;
  if (!(in >> magic >> version) || magic != "ttt-embedder" || version != 1) {
    throw WeightsIoError("load_params: unknown format");
  }
  std::string dims;
  int di = 0, dh = 0, dl = 0;
  if (!(in >> dims >> di >> dh >> dl) || dims != "dims") {
    throw WeightsIoError("load_params: bad dims line");
  }
  EncoderParams p;
  p.w1 = read_mat(in, "w1");
  p.b1 = read_vec(in, "b1");
  p.w2 = read_mat(in, "w2");
  p.b2 = read_vec(in, "b2");
  p.w3 = read_mat(in, "w3");
  p.b3 = read_vec(in, "b3");
  p.w4 = read_mat(in, "w4");
  p.b4 = read_vec(in, "b4");
  if (p.w1.cols != di || p.w1.rows != dh || p.w2.rows != dl) {
    throw WeightsIoError("load_params: dims do not match matrices");
  }
  return p;
}

}  // namespace ttt
