#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "trilab/dist.hpp"

namespace trilab {

enum class GraphModel { gnp, gnm };

// Parameters of the planted-block change of measure targeting a triangle
// deficit of t (density units) at edge density p on n vertices.
//
// The scale target is T = t^(2/3) n^2: a single all-s block of size ell has
// top singular value s (ell - 1), so ell and the per-entry tilt are chosen
// to make that exactly sqrt(T).  When the optimal tilt direction degenerates
// (p <= 1/2 puts the rate minimizer at 0) a large block with a small spread
// tilt is used instead.
struct PlantedConfig {
  int n = 0;
  double p = 0.0;
  double t = 0.0;
  double scale_target = 0.0;      // T = t^(2/3) n^2
  double s_star = 0.0;            // minimizer of legendre(s)/s^2 over s > 0
  double s_effective = 0.0;       // per-entry tilt actually planted
  int ell = 0;                    // block size; 0 for the empty plant at t = 0
  Eigen::VectorXd v;              // planted unit-direction, |v|^2 = ell/(ell-1)
  double tilted_edge_prob = 0.0;  // edge probability inside the block
};

// Throws when the block cannot fit (ell > n) or the direction-norm
// tolerance |v|^2 <= 1.05 fails (needs ell >= 21, hence n >= 21, unless the
// optimal-tilt route gives a large block).
PlantedConfig make_planted_config(int n, double p, double t);

// Block-diagonal matrix with constant `tilt` entries and zero diagonal in
// blocks of the given sizes.  Singular values are tilt * (size - 1) per
// block (plus |tilt| repeated); sum of sizes must not exceed n.
Eigen::MatrixXd planted_matrix(int n, const std::vector<int>& block_sizes, double tilt);

enum class Estimator { naive, tilted };

struct TailEstimate {
  double log_prob = 0.0;
  double stderr_log = 0.0;  // delta method on the weighted-hit mean
  std::int64_t n_samples = 0;
  Estimator estimator = Estimator::naive;
  double theoretical_exponent = 0.0;  // predicted magnitude of -log_prob
  double effective_sample_size = 0.0;
  double max_abs_log_weight = 0.0;  // 0 exactly when the change of measure is off
  bool degenerate = false;          // no hits, or all weight mass collapsed
  // G(n,m) runs report a bracket: the tilted estimate transfers to the
  // edge-count-conditioned model up to the probability of hitting the exact
  // edge count, so the lower end is log_prob + ln P(Bin(N, p) = m).
  std::optional<double> log_prob_lower;
};

// Deficit level t sitting at the given upper tail mass of the unconditioned
// deficit distribution (deficit = pilot mean density - sample density).
// Used to calibrate t so the target event has a prescribed probability.
double deficit_quantile(GraphModel model, int n, double m_or_p, double quantile,
                        std::int64_t n_samples, std::uint64_t seed, int threads = 1);

// P(triangle density <= reference - t) by plain rejection counting.  The
// reference is the empirical mean of the triangle density over a pilot run
// (the exact-mean correction is O(1/n) and matters at n ~ 30).
TailEstimate naive_tail_estimate(GraphModel model, int n, double m_or_p, double t,
                                 std::int64_t n_samples, std::uint64_t seed, int threads = 1);

// Same tail probability by importance sampling: edges inside the planted
// block are drawn with the tilted probability and reweighted by the exact
// likelihood ratio.  Unbiased for G(n,p); bracketed for G(n,m).
TailEstimate tilted_tail_estimate(GraphModel model, int n, double m_or_p, double t,
                                  std::int64_t n_samples, std::uint64_t seed, int threads = 1);

struct CramerCheck {
  double empirical = 0.0;  // (1/m) ln P(sum of m copies > m s), exactly
  double limit = 0.0;      // -legendre(s)
  double gap = 0.0;        // |empirical - limit|
};

// Exact tail via composition enumeration over the finite support (binomial
// sums fall out as the two-atom case).  s must lie in the open hull.
CramerCheck cramer_check(const EdgeDistribution& dist, std::int64_t m, double s);

// | ln P(H = s) - ln P(B = s) | for H hypergeometric(population, successes,
// trials) and B binomial(trials, successes/population), both pmfs evaluated
// in exact rational arithmetic, so identical distributions give exactly 0.
double hypergeo_binom_gap(std::int64_t population, std::int64_t successes,
                          std::int64_t trials, std::int64_t s_value);

struct Quartiles {
  double q25 = 0.0;
  double median = 0.0;
  double q75 = 0.0;
};

// Distributional diagnostics of graphs conditioned (by rejection) on a
// large triangle deficit.  Shares are per accepted sample, relative to the
// sample's own deficit: share(x) = -x / (deficit * n^3).
struct StructureReport {
  std::int64_t pilot_samples = 0;
  std::int64_t rejection_samples = 0;
  std::int64_t accepted = 0;
  double threshold_deficit = 0.0;  // calibrated from the pilot quantile
  double spectral_cap = 0.0;       // extreme/bulk split at -sqrt(cap * n)
  bool degenerate = false;         // nothing accepted
  Quartiles min_eigenvalue_share;     // cube of the smallest eigenvalue
  Quartiles second_eigenvalue_share;  // cube of the second smallest
  Quartiles extreme_share;            // cube sum below the split
  Quartiles bulk_share;               // cube sum above the split
  Quartiles degree_statistic;         // sum (d_i - p n)^2 / (threshold n^3)
};

// quantile is the target tail mass of the conditioning event (e.g. 1e-3
// accepts roughly the worst 0.1% of pilot deficits).
StructureReport conditional_structure_report(GraphModel model, int n, double m_or_p,
                                             double quantile, std::int64_t n_samples,
                                             std::uint64_t seed, int threads = 1,
                                             double spectral_cap = 0.8);

// ln C(n, k) via lgamma.
double log_binomial_coefficient(std::int64_t n, std::int64_t k);

// ln P(Bin(n, p) = k)
double log_binomial_pmf(std::int64_t n, std::int64_t k, double p);

}  // namespace trilab
