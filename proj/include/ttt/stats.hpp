#pragma once

#include <vector>

namespace ttt {

struct CorrelationResult {
  double stat = 0.0;  // rho or tau
  double p = 1.0;     // two-sided
  bool degenerate = false;
};

// Average ranks (1-based); tied values share the mean of their rank range.
std::vector<double> average_ranks(const std::vector<double>& values);

// Spearman rho on average ranks. Two-sided p from the t approximation with
// n - 2 degrees of freedom. Zero rank variance in either input yields the
// degenerate convention (0, 1).
CorrelationResult spearman(const std::vector<double>& x, const std::vector<double>& y);

// Kendall tau-b with tie correction. Two-sided p from the normal
// approximation of the concordance statistic, tie-corrected variance.
// Degenerate inputs yield (0, 1).
CorrelationResult kendall(const std::vector<double>& x, const std::vector<double>& y);

// Regularized incomplete beta function I_x(a, b) (continued fraction),
// exposed because the t-distribution tail is computed through it.
double incomplete_beta(double a, double b, double x);

// Two-sided tail probability of Student's t with nu degrees of freedom.
double student_t_two_sided(double t, double nu);

}  // namespace ttt
