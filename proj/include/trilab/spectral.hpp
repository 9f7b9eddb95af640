#pragma once

#include <vector>

#include <Eigen/Dense>

namespace trilab {

// Eigenvalues of a symmetric matrix, sorted non-increasing.
std::vector<double> eigenvalues_desc(const Eigen::MatrixXd& sym);

// Singular values, sorted non-increasing.  For symmetric input these are
// the absolute eigenvalues, which makes them an independent cross-check on
// the eigensolver.
std::vector<double> singular_values_desc(const Eigen::MatrixXd& a);

struct SupResult {
  double value = 0.0;
  Eigen::MatrixXd optimizer;  // feasible point attaining the value
};

// sup <A, M> over rank <= k matrices in the Frobenius unit ball.
// Equals the l2 norm of the top k singular values.
SupResult sup_rank_k(const Eigen::MatrixXd& a, int k);

// Same with M additionally positive semidefinite (A symmetric).  Equals
// the l2 norm of the positive parts of the top k eigenvalues; the zero
// matrix is feasible, so the value is never negative.
SupResult sup_rank_k_psd(const Eigen::MatrixXd& sym, int k);

// Piecewise cubic that grows linearly past the kink at sqrt(cap):
//   0 for x <= 0, x^3 on [0, sqrt(cap)], 3*cap*x - 2*cap^(3/2) beyond.
// C1 at both joints.
double capped_cubic_upper(double x, double cap);

// Mirror image -capped_cubic_upper(-x, cap), active on the negative axis.
double capped_cubic_lower(double x, double cap);

// Sum of the two branches: x^3 on [-sqrt(cap), sqrt(cap)], linear outside.
double capped_cubic_sum(double x, double cap);

// (1/n) sum_i g(lambda_i / sqrt(n)) with g the two-sided capped cubic.
double spectral_cubic_statistic(const std::vector<double>& eigenvalues, double cap);

// Partition of a spectrum at a threshold: entries <= threshold are
// "extreme" (deep lower tail), the rest are "bulk".  Cube sums are returned
// because the cubic trace splits additively this way.
struct SpectrumSplit {
  std::vector<double> bulk;
  std::vector<double> extreme;
  double bulk_cube_sum = 0.0;
  double extreme_cube_sum = 0.0;
};

SpectrumSplit split_spectrum(const std::vector<double>& eigenvalues, double threshold);

// For a non-increasing, nonnegative sequence: if the tail cubes
// sum_{i>=2} a_i^3 dominate eps * a_1^3, then
// (sum a_i^2) >= (1+eps)^(1/3) * (sum a_i^3)^(2/3).
// Both sides are evaluated so callers can assert the implication.
struct CubeTailComparison {
  bool premise = false;      // tail cube mass >= eps * a_1^3
  bool conclusion = false;   // l2^2 >= (1+eps)^(1/3) * l3^2
  double l2_squared = 0.0;
  double l3_squared = 0.0;   // (sum a_i^3)^(2/3)
  double required_factor = 0.0;  // (1+eps)^(1/3)
};

CubeTailComparison cube_tail_comparison(const std::vector<double>& seq, double eps);

}  // namespace trilab
