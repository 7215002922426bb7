#include "ttt/stats.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace ttt {

std::vector<double> average_ranks(const std::vector<double>& values) {
  const size_t n = values.size();
  std::vector<size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](size_t a, size_t b) { return values[a] < values[b]; });

  std::vector<double> ranks(n, 0.0);
  size_t i = 0;
  while (i < n) {
    size_t j = i;
    while (j + 1 < n && values[order[j + 1]] == values[order[i]]) ++j;
    double avg = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
    for (size_t k = i; k <= j; ++k) ranks[order[k]] = avg;
    i = j + 1;
  }
  return ranks;
}

namespace {

double log_gamma(double x) { return std::lgamma(x); }

double beta_cf(double a, double b, double x) {
  // Lentz's continued fraction for the incomplete beta function.
  const int max_iter = 300;
  const double eps = 1e-15;
  const double tiny = 1e-300;
  double qab = a + b, qap = a + 1.0, qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::abs(d) < tiny) d = tiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= max_iter; ++m) {
    int m2 = 2 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < tiny) d = tiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < tiny) d = tiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) < eps) break;
  }
  return h;
}

double mean_of(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

bool constant(const std::vector<double>& v) {
  for (double x : v) {
    if (x != v.front()) return false;
  }
  return true;
}

}  // namespace

double incomplete_beta(double a, double b, double x) {
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  double ln_front = log_gamma(a + b) - log_gamma(a) - log_gamma(b) + a * std::log(x) +
                    b * std::log(1.0 - x);
  double front = std::exp(ln_front);
  if (x < (a + 1.0) / (a + b + 2.0)) return front * beta_cf(a, b, x) / a;
  return 1.0 - front * beta_cf(b, a, 1.0 - x) / b;
}

double student_t_two_sided(double t, double nu) {
  if (!std::isfinite(t)) return 0.0;
  return incomplete_beta(nu / 2.0, 0.5, nu / (nu + t * t));
}

CorrelationResult spearman(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size()) throw std::invalid_argument("spearman: length mismatch");
  const size_t n = x.size();
  if (n < 2 || constant(x) || constant(y)) return {0.0, 1.0, true};

  std::vector<double> rx = average_ranks(x);
  std::vector<double> ry = average_ranks(y);
  double mx = mean_of(rx), my = mean_of(ry);
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (size_t i = 0; i < n; ++i) {
    double dx = rx[i] - mx, dy = ry[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx == 0.0 || syy == 0.0) return {0.0, 1.0, true};

  double rho = sxy / std::sqrt(sxx * syy);
  rho = std::clamp(rho, -1.0, 1.0);

  if (n == 2) return {rho, 1.0, false};
  double denom = 1.0 - rho * rho;
  double p;
  if (denom <= 0.0) {
    p = 0.0;  // |rho| = 1: t diverges
  } else {
    double t = rho * std::sqrt((static_cast<double>(n) - 2.0) / denom);
    p = student_t_two_sided(t, static_cast<double>(n) - 2.0);
  }
  return {rho, p, false};
}

CorrelationResult kendall(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size()) throw std::invalid_argument("kendall: length mismatch");
  const size_t n = x.size();
  if (n < 2 || constant(x) || constant(y)) return {0.0, 1.0, true};

  // Pair scan: concordant minus discordant, with tie counts for the
  // tau-b normalization.
  long long s = 0;
  long long ties_x = 0, ties_y = 0, ties_both = 0;
  for (size_t i = 0; i < n; ++i) {
    for (size_t j = i + 1; j < n; ++j) {
      double dx = x[i] - x[j];
      double dy = y[i] - y[j];
      if (dx == 0.0 && dy == 0.0) {
        ++ties_both;
      } else if (dx == 0.0) {
        ++ties_x;
      } else if (dy == 0.0) {
        ++ties_y;
      } else {
        s += (dx > 0.0) == (dy > 0.0) ? 1 : -1;
      }
    }
  }

  double n0 = static_cast<double>(n) * (n - 1) / 2.0;
  double n1 = static_cast<double>(ties_x + ties_both);
  double n2 = static_cast<double>(ties_y + ties_both);
  double denom = std::sqrt((n0 - n1) * (n0 - n2));
  if (denom == 0.0) return {0.0, 1.0, true};
  double tau = std::clamp(static_cast<double>(s) / denom, -1.0, 1.0);

  // Tie-corrected variance of S (normal approximation). Tie group sizes per
  // distinct value are recovered from sorted copies.
  auto tie_sums = [](std::vector<double> v) {
    std::sort(v.begin(), v.end());
    double t1 = 0.0, t2 = 0.0, t3 = 0.0;  // sum t(t-1), t(t-1)(t-2), t(t-1)(2t+5)
    size_t i = 0;
    while (i < v.size()) {
      size_t j = i;
      while (j + 1 < v.size() && v[j + 1] == v[i]) ++j;
      double t = static_cast<double>(j - i + 1);
      t1 += t * (t - 1.0);
      t2 += t * (t - 1.0) * (t - 2.0);
      t3 += t * (t - 1.0) * (2.0 * t + 5.0);
      i = j + 1;
    }
    return std::array<double, 3>{t1, t2, t3};
  };
  auto [xt1, xt2, xt3] = tie_sums(x);
  auto [yt1, yt2, yt3] = tie_sums(y);

  double nn = static_cast<double>(n);
  double var = (nn * (nn - 1.0) * (2.0 * nn + 5.0) - xt3 - yt3) / 18.0 +
               xt1 * yt1 / (2.0 * nn * (nn - 1.0)) +
               xt2 * yt2 / (9.0 * nn * (nn - 1.0) * (nn - 2.0));
  double p = 1.0;
  if (var > 0.0) {
    double z = static_cast<double>(s) / std::sqrt(var);
    p = std::erfc(std::abs(z) / std::sqrt(2.0));
  }
  return {tau, p, false};
}

}  // namespace ttt
