#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "trilab/dist.hpp"

namespace trilab {

struct NetConfig {
  std::size_t max_elements = 1000000;  // refuse nets predicted to exceed this
  int initial_draws_per_dim = 4000;
  int patch_draws = 10000;
  int max_patch_rounds = 40;
  // Patch rounds add centers for targets farther than margin * eps, leaving
  // headroom so the final certificate at the full eps passes.
  double patch_margin = 0.96;
};

struct EuclideanNet {
  int dimension = 0;
  double eps = 0.0;
  std::vector<Eigen::VectorXd> points;
};

// Covering net of the unit Euclidean ball: every point of the ball lies
// within eps of some net point.  Randomized greedy packing plus patch
// rounds; deterministic given the seed.  eps in (0, 1].
EuclideanNet euclidean_net(int d, double eps, std::uint64_t seed, const NetConfig& cfg = {});

enum class NetFlavor { rank_k, psd_rank_k };

// Net of the rank-constrained Frobenius unit ball, stored through its
// factor net: rank_k elements are X Y^T over ordered factor pairs,
// psd_rank_k elements are X X^T.  Elements are materialized on demand
// because the pair count is quadratic in the factor count.
class MatrixNet {
 public:
  static MatrixNet from_factors(int n, int k, double eps, NetFlavor flavor,
                                std::vector<Eigen::MatrixXd> factors);

  int order() const { return n_; }
  int rank_bound() const { return k_; }
  double eps() const { return eps_; }
  NetFlavor flavor() const { return flavor_; }

  std::size_t factor_count() const { return factors_.size(); }
  std::size_t size() const;
  Eigen::MatrixXd element(std::size_t index) const;

  const std::vector<Eigen::MatrixXd>& factors() const { return factors_; }

 private:
  int n_ = 0, k_ = 0;
  double eps_ = 0.0;
  NetFlavor flavor_ = NetFlavor::rank_k;
  std::vector<Eigen::MatrixXd> factors_;  // n x k, Frobenius norm <= radius
};

// Constructs the factor net (an eps/2-net of the factor ball for k = 1,
// proportionally finer for larger k) and wraps it per flavor.  Throws when
// the predicted element count exceeds cfg.max_elements.
MatrixNet rank_k_net(int n, int k, double eps, std::uint64_t seed, const NetConfig& cfg = {});
MatrixNet psd_rank_k_net(int n, int k, double eps, std::uint64_t seed, const NetConfig& cfg = {});

struct CoveringReport {
  std::size_t draws = 0;
  double max_distance = 0.0;  // worst nearest-net distance seen
  double eps = 0.0;
  bool covered = false;  // max_distance <= eps
};

// Monte Carlo covering certificates: sample targets from the covered set,
// record the worst nearest-net distance.  Parallel over draws with a
// deterministic reduction; results do not depend on the thread count.
CoveringReport verify_euclidean_covering(const EuclideanNet& net, std::size_t draws,
                                         std::uint64_t seed, int threads = 1);
CoveringReport verify_matrix_covering(const MatrixNet& net, std::size_t draws,
                                      std::uint64_t seed, int threads = 1);

// Upper bound on the distance from target to the nearest net element,
// computed through the factor decomposition (cheap).  The certificate uses
// this; it can only overestimate, never underestimate.
double nearest_element_distance_bound(const MatrixNet& net, const Eigen::MatrixXd& target);

// Exact nearest distance by scanning every element; for small nets and
// cross-checks only.
double nearest_element_distance_exact(const MatrixNet& net, const Eigen::MatrixXd& target);

// max_N <A, N> over net elements.  Requires net.eps < 1/2: combined with
// the covering property this dominates the true rank-constrained supremum
// after division by (1 - 2 eps).
double net_supremum(const Eigen::MatrixXd& a, const MatrixNet& net);

// ln P(<A, M> > t) <= -(t^2/2) * L+ for any fixed entrywise-nonnegative M
// in the Frobenius unit ball, where A has i.i.d. centered entries and
// L+ = inf_{s>0} legendre(s)/s^2.  t > 0.
double hoeffding_tail_log_bound(const EdgeDistribution& dist, double t);

// Entries need not be identically distributed: the usable constant is the
// worst (smallest) one-sided rate constant among the entry laws.
double hoeffding_tail_log_bound(const std::vector<EdgeDistribution>& laws, double t);

struct UnionBoundConfig {
  double constant = 1.0;  // the undetermined absolute constant in the entropy term
};

// ln P(sup over rank<=k unit-ball M of <A, M> > t), by union bound over a
// net with the scale-balancing choice eps = nk/(t^2 L):
//   -t^2 L / 2 + C n k ln(t^2 L / (n k)).
// Requires t^2 L > 2 n k.  Passing eps > 0 instead evaluates the
// pre-optimization form -((1-2 eps) t)^2 L / 2 + C n k ln(3/eps).
double union_upper_log_bound(const EdgeDistribution& dist, int n, int k, double t,
                             double eps = 0.0, const UnionBoundConfig& cfg = {});

// Variant with an explicit spectral threshold K:
//   -t^2 L / 2 + C (t^2 / K) ln K,  K > 1.
double union_upper_log_bound_threshold(const EdgeDistribution& dist, double t, double cap,
                                       const UnionBoundConfig& cfg = {});

// Row-major text dump, 17 significant digits per entry, one row per line.
std::string dump_matrix_text(const Eigen::MatrixXd& m);

}  // namespace trilab
