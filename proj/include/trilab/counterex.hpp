#pragma once

#include <array>
#include <vector>

#include <Eigen/Dense>

#include "trilab/dist.hpp"

namespace trilab {

// Three-block test configuration used to show the small-tilt quadratic
// bound is not sharp for skewed entry laws.  Block weights m_i and tilt
// points b_i are explicit functions of (eps, delta); alpha and beta are
// pinned by the two normalization constraints
//   sum_i t_i = t      with t_i = alpha beta m_i b_i cgf'(b_i),
//   alpha^2 beta sum_i m_i b_i^2 = 2,
// which have the unique solution below.
struct CounterexampleParams {
  double eps = 0.0;
  double delta = 0.0;
  std::array<double, 3> m_values{};  // (1/eps^2, 2 eps/delta^3, eps^4/delta^6)
  std::array<double, 3> b_values{};  // (eps, -delta, delta^2/eps)
  std::array<double, 3> t_split{};
  double t_total = 0.0;
  double alpha = 0.0;
  double beta = 0.0;
  double rate_value = 0.0;  // candidate rate constant of the construction
  double baseline = 0.0;    // 1 / (2 Var), the quadratic-approximation rate
  double eta = 0.0;         // 1 - rate_value / baseline; > 0 beats the baseline
};

CounterexampleParams make_counterexample_params(const EdgeDistribution& dist, double eps,
                                                double delta, double t = 1.0);

// (sum m_i b_i^2) * (sum m_i conj(cgf'(b_i))) / (sum m_i b_i cgf'(b_i))^2
// with conj the Legendre transform, evaluated through the conjugacy
// identity conj(cgf'(x)) = x cgf'(x) - cgf(x).  A dip below 1/(2 Var)
// requires E xi^3 < 0; the expression itself is defined regardless.
double rate_expression(const EdgeDistribution& dist, double eps, double delta);

struct EtaRow {
  double eps = 0.0;
  double delta = 0.0;
  double rate_value = 0.0;
  double baseline = 0.0;
  double eta = 0.0;
};

struct EtaSearchResult {
  double best_eps = 0.0;
  double best_delta = 0.0;
  double best_eta = 0.0;
  std::vector<EtaRow> rows;       // every evaluated grid point, grid order
  std::int64_t skipped = 0;       // grid points outside the admissible domain
};

// Product grid search maximizing eta.  Pairs whose tilt points leave the
// admissible domain are skipped and counted.
EtaSearchResult search_eta(const EdgeDistribution& dist, const std::vector<double>& eps_grid,
                           const std::vector<double>& delta_grid);

// The default grid honors the order of limits (small delta, then much
// smaller eps): delta log-spaced in [1e-2, 0.3], eps log-spaced in
// [1e-4, delta^2] per delta.
EtaSearchResult default_eta_search(const EdgeDistribution& dist);

// Rank-1 positive semidefinite realization of the construction: a vector
// with sqrt(alpha eps / 2) on the large part and -sqrt(alpha/2) delta /
// sqrt(eps) on the small part, sizes round(sqrt(2 beta)/eps) and
// round(sqrt(2 beta) eps^2/delta^3).  With exact (unrounded) sizes the
// outer product has unit Frobenius norm.
struct PsdPlant {
  Eigen::VectorXd direction;
  Eigen::MatrixXd matrix;  // direction * direction^T
  int part_large = 0;
  int part_small = 0;
};

PsdPlant psd_plant(double eps, double delta, double alpha, double beta);

// Numeric verification of the two expansion lemmas behind the search:
// the conjugacy identity on a grid, and the cubic Taylor expansion of
// conj(cgf'(eps)) = (Var/2) eps^2 + (E xi^3/3) eps^3 + O(eps^4).
struct TaylorChecksReport {
  double max_identity_error = 0.0;   // sup |conj(cgf'(x)) - (x cgf'(x) - cgf(x))|
  double quadratic_coefficient = 0.0;  // symmetrized ratio at eps = 1e-2
  double quadratic_exact = 0.0;        // Var / 2
  double residual_slope = 0.0;   // log-log slope of the post-cubic remainder
  double third_order_fd = 0.0;   // ((conj)'''(0) cgf''(0)^3 + 3 cgf'''(0)) / 6
  double third_order_exact = 0.0;  // E xi^3 / 3
};

TaylorChecksReport taylor_lemma_checks(const EdgeDistribution& dist);

}  // namespace trilab
