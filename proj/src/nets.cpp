#include "trilab/nets.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "trilab/csv.hpp"
#include "trilab/parallel.hpp"
#include "trilab/rng.hpp"

namespace trilab {

namespace {

Eigen::VectorXd uniform_ball_point(int d, Rng& rng) {
  Eigen::VectorXd x(d);
  for (int i = 0; i < d; ++i) x(i) = rng.gaussian();
  const double norm = x.norm();
  if (norm == 0.0) return Eigen::VectorXd::Zero(d);
  const double radius = std::pow(rng.uniform01(), 1.0 / d);
  return x * (radius / norm);
}

double nearest_point_distance(const std::vector<Eigen::VectorXd>& points,
                              const Eigen::VectorXd& target) {
  double best = std::numeric_limits<double>::infinity();
  for (const auto& p : points) {
    best = std::min(best, (p - target).norm());
  }
  return best;
}

}  // namespace

EuclideanNet euclidean_net(int d, double eps, std::uint64_t seed, const NetConfig& cfg) {
  if (d < 1) throw std::invalid_argument("euclidean_net: dimension must be positive");
  if (!(eps > 0.0 && eps <= 1.0)) throw std::invalid_argument("euclidean_net: eps must lie in (0,1]");

  Rng rng(seed);
  EuclideanNet net;
  net.dimension = d;
  net.eps = eps;
  net.points.push_back(Eigen::VectorXd::Zero(d));

  const auto guard = [&net, &cfg] {
    if (net.points.size() > cfg.max_elements) {
      throw std::runtime_error("euclidean_net: size guard exceeded");
    }
  };

  // Greedy packing: keep candidates that are eps-separated from everything
  // kept so far.  A maximal eps-packing is an eps-cover.
  const std::int64_t initial = static_cast<std::int64_t>(cfg.initial_draws_per_dim) * d;
  for (std::int64_t i = 0; i < initial; ++i) {
    const Eigen::VectorXd cand = uniform_ball_point(d, rng);
    if (nearest_point_distance(net.points, cand) > eps) {
      net.points.push_back(cand);
      guard();
    }
  }

  // Patch rounds close residual holes: any sampled target farther than
  // margin * eps from the net becomes a net point itself.  Stop after a
  // round with no additions.
  for (int round = 0; round < cfg.max_patch_rounds; ++round) {
    int added = 0;
    for (int i = 0; i < cfg.patch_draws; ++i) {
      const Eigen::VectorXd target = uniform_ball_point(d, rng);
      if (nearest_point_distance(net.points, target) > cfg.patch_margin * eps) {
        net.points.push_back(target);
        guard();
        ++added;
      }
    }
    if (added == 0) break;
  }
  return net;
}

CoveringReport verify_euclidean_covering(const EuclideanNet& net, std::size_t draws,
                                         std::uint64_t seed, int threads) {
  std::vector<double> dist(draws, 0.0);
  parallel_for(static_cast<std::int64_t>(draws), threads, [&](std::int64_t i) {
    auto rng = Rng::for_replica(seed, static_cast<std::uint64_t>(i));
    const Eigen::VectorXd target = uniform_ball_point(net.dimension, rng);
    dist[static_cast<std::size_t>(i)] = nearest_point_distance(net.points, target);
  });
  CoveringReport rep;
  rep.draws = draws;
  rep.eps = net.eps;
  rep.max_distance = dist.empty() ? 0.0 : *std::max_element(dist.begin(), dist.end());
  rep.covered = rep.max_distance <= net.eps;
  return rep;
}

MatrixNet MatrixNet::from_factors(int n, int k, double eps, NetFlavor flavor,
                                  std::vector<Eigen::MatrixXd> factors) {
  if (k < 1 || k > n) throw std::invalid_argument("MatrixNet: need 1 <= k <= n");
  for (const auto& f : factors) {
    if (f.rows() != n || f.cols() != k) {
      throw std::invalid_argument("MatrixNet: factor shape mismatch");
    }
  }
  MatrixNet net;
  net.n_ = n;
  net.k_ = k;
  net.eps_ = eps;
  net.flavor_ = flavor;
  net.factors_ = std::move(factors);
  return net;
}

std::size_t MatrixNet::size() const {
  return flavor_ == NetFlavor::rank_k ? factors_.size() * factors_.size() : factors_.size();
}

namespace {

// Keep elements inside the Frobenius unit ball: factors of radius above 1
// (used for k >= 2) can push products slightly outside.
Eigen::MatrixXd clamp_to_unit_ball(Eigen::MatrixXd m) {
  const double norm = m.norm();
  if (norm > 1.0) m /= norm;
  return m;
}

}  // namespace

Eigen::MatrixXd MatrixNet::element(std::size_t index) const {
  if (index >= size()) throw std::out_of_range("MatrixNet::element");
  if (flavor_ == NetFlavor::rank_k) {
    const std::size_t i = index / factors_.size();
    const std::size_t j = index % factors_.size();
    return clamp_to_unit_ball(factors_[i] * factors_[j].transpose());
  }
  return clamp_to_unit_ball(factors_[index] * factors_[index].transpose());
}

namespace {

std::vector<Eigen::MatrixXd> build_factor_net(int n, int k, std::uint64_t seed,
                                              const NetConfig& cfg, double radius,
                                              double resolution) {
  const int d = n * k;
  const EuclideanNet unit = euclidean_net(d, resolution / radius, seed, cfg);
  std::vector<Eigen::MatrixXd> factors;
  factors.reserve(unit.points.size());
  for (const auto& p : unit.points) {
    Eigen::MatrixXd f(n, k);
    for (int c = 0; c < k; ++c) {
      for (int r = 0; r < n; ++r) f(r, c) = radius * p(c * n + r);
    }
    factors.push_back(std::move(f));
  }
  return factors;
}

MatrixNet make_matrix_net(int n, int k, double eps, std::uint64_t seed, const NetConfig& cfg,
                          NetFlavor flavor) {
  if (k < 1 || k > n) throw std::invalid_argument("rank_k_net: need 1 <= k <= n");
  if (!(eps > 0.0 && eps < 1.0)) throw std::invalid_argument("rank_k_net: eps must lie in (0,1)");
  // Factors at resolution eps/2, so |xy^T - ab^T| <= |x-a| + |y-b| <= eps
  // for k = 1.  Balanced factors of a unit-Frobenius rank-k matrix can
  // reach Frobenius norm k^(1/4), hence the enlarged ball for k >= 2; the
  // covering certificate revalidates every constructed net.
  const double radius = (k == 1) ? 1.0 : std::pow(static_cast<double>(k), 0.25);
  const double resolution = eps / 2.0;
  auto factors = build_factor_net(n, k, seed, cfg, radius, resolution);
  const std::size_t f = factors.size();
  const std::size_t predicted = (flavor == NetFlavor::rank_k) ? f * f : f;
  if (predicted > cfg.max_elements) {
    throw std::runtime_error("rank_k_net: predicted element count exceeds the size guard");
  }
  return MatrixNet::from_factors(n, k, eps, flavor, std::move(factors));
}

}  // namespace

MatrixNet rank_k_net(int n, int k, double eps, std::uint64_t seed, const NetConfig& cfg) {
  return make_matrix_net(n, k, eps, seed, cfg, NetFlavor::rank_k);
}

MatrixNet psd_rank_k_net(int n, int k, double eps, std::uint64_t seed, const NetConfig& cfg) {
  return make_matrix_net(n, k, eps, seed, cfg, NetFlavor::psd_rank_k);
}

namespace {

// Indices of the `count` factors closest to `target` in Frobenius distance.
std::vector<std::size_t> nearest_factor_indices(const std::vector<Eigen::MatrixXd>& factors,
                                                const Eigen::MatrixXd& target,
                                                std::size_t count) {
  std::vector<std::pair<double, std::size_t>> scored;
  scored.reserve(factors.size());
  for (std::size_t i = 0; i < factors.size(); ++i) {
    scored.emplace_back((factors[i] - target).norm(), i);
  }
  count = std::min(count, scored.size());
  std::partial_sort(scored.begin(), scored.begin() + count, scored.end());
  std::vector<std::size_t> out(count);
  for (std::size_t i = 0; i < count; ++i) out[i] = scored[i].second;
  return out;
}

}  // namespace

double nearest_element_distance_bound(const MatrixNet& net, const Eigen::MatrixXd& target) {
  const int k = net.rank_bound();
  Eigen::BDCSVD<Eigen::MatrixXd> svd(target, Eigen::ComputeThinU | Eigen::ComputeThinV);
  // Balanced split: both factors carry sqrt of the singular values, so each
  // stays inside the factor ball used at construction time.
  Eigen::MatrixXd a(net.order(), k), b(net.order(), k);
  for (int i = 0; i < k; ++i) {
    const double root = std::sqrt(svd.singularValues()(i));
    a.col(i) = root * svd.matrixU().col(i);
    b.col(i) = root * svd.matrixV().col(i);
  }
  constexpr std::size_t kCandidates = 8;
  double best = std::numeric_limits<double>::infinity();
  if (net.flavor() == NetFlavor::rank_k) {
    const auto ca = nearest_factor_indices(net.factors(), a, kCandidates);
    const auto cb = nearest_factor_indices(net.factors(), b, kCandidates);
    for (std::size_t i : ca) {
      for (std::size_t j : cb) {
        const Eigen::MatrixXd m =
            clamp_to_unit_ball(net.factors()[i] * net.factors()[j].transpose());
        best = std::min(best, (m - target).norm());
      }
    }
  } else {
    const auto ca = nearest_factor_indices(net.factors(), a, kCandidates * 4);
    for (std::size_t i : ca) {
      const Eigen::MatrixXd m =
          clamp_to_unit_ball(net.factors()[i] * net.factors()[i].transpose());
      best = std::min(best, (m - target).norm());
    }
  }
  return best;
}

double nearest_element_distance_exact(const MatrixNet& net, const Eigen::MatrixXd& target) {
  double best = std::numeric_limits<double>::infinity();
  const std::size_t total = net.size();
  for (std::size_t i = 0; i < total; ++i) {
    best = std::min(best, (net.element(i) - target).norm());
  }
  return best;
}

CoveringReport verify_matrix_covering(const MatrixNet& net, std::size_t draws,
                                      std::uint64_t seed, int threads) {
  const int n = net.order();
  const int k = net.rank_bound();
  std::vector<double> dist(draws, 0.0);
  parallel_for(static_cast<std::int64_t>(draws), threads, [&](std::int64_t idx) {
    auto rng = Rng::for_replica(seed, static_cast<std::uint64_t>(idx));
    Eigen::MatrixXd x(n, k), y(n, k);
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < k; ++j) {
        x(i, j) = rng.gaussian();
        y(i, j) = rng.gaussian();
      }
    }
    Eigen::MatrixXd target = (net.flavor() == NetFlavor::rank_k)
                                 ? Eigen::MatrixXd(x * y.transpose())
                                 : Eigen::MatrixXd(x * x.transpose());
    const double norm = target.norm();
    if (norm > 0.0) target /= norm;  // unit-Frobenius targets are the hard case
    dist[static_cast<std::size_t>(idx)] = nearest_element_distance_bound(net, target);
  });
  CoveringReport rep;
  rep.draws = draws;
  rep.eps = net.eps();
  rep.max_distance = dist.empty() ? 0.0 : *std::max_element(dist.begin(), dist.end());
  rep.covered = rep.max_distance <= net.eps();
  return rep;
}

double net_supremum(const Eigen::MatrixXd& a, const MatrixNet& net) {
  if (!(net.eps() < 0.5)) {
    throw std::invalid_argument("net_supremum: needs eps < 1/2 for the approximation factor");
  }
  if (a.rows() != net.order() || a.cols() != net.order()) {
    throw std::invalid_argument("net_supremum: dimension mismatch");
  }
  const auto& factors = net.factors();
  const std::size_t f = factors.size();
  double best = -std::numeric_limits<double>::infinity();
  if (net.flavor() == NetFlavor::psd_rank_k) {
    for (std::size_t i = 0; i < f; ++i) {
      // <A, XX^T> = <A^T X, X>
      const double raw = (factors[i].cwiseProduct(a.transpose() * factors[i])).sum();
      const double norm = (factors[i] * factors[i].transpose()).norm();
      best = std::max(best, norm > 1.0 ? raw / norm : raw);
    }
    return best;
  }
  // <A, X Y^T> = <A^T X, Y>; precompute A^T X and the Gram matrices so the
  // quadratic pair loop stays cheap.
  std::vector<Eigen::MatrixXd> lifted(f), gram(f);
  for (std::size_t i = 0; i < f; ++i) {
    lifted[i] = a.transpose() * factors[i];
    gram[i] = factors[i].transpose() * factors[i];
  }
  for (std::size_t i = 0; i < f; ++i) {
    for (std::size_t j = 0; j < f; ++j) {
      const double raw = (lifted[i].cwiseProduct(factors[j])).sum();
      // |X Y^T|_F^2 = <X^T X, Y^T Y>
      const double normsq = (gram[i].cwiseProduct(gram[j])).sum();
      const double value = normsq > 1.0 ? raw / std::sqrt(normsq) : raw;
      best = std::max(best, value);
    }
  }
  return best;
}

double hoeffding_tail_log_bound(const EdgeDistribution& dist, double t) {
  if (!(t > 0.0)) throw std::invalid_argument("hoeffding_tail_log_bound: t must be positive");
  return -0.5 * t * t * rate_constant_positive(dist).rate_constant;
}

double hoeffding_tail_log_bound(const std::vector<EdgeDistribution>& laws, double t) {
  if (laws.empty()) throw std::invalid_argument("hoeffding_tail_log_bound: no entry laws");
  if (!(t > 0.0)) throw std::invalid_argument("hoeffding_tail_log_bound: t must be positive");
  double worst = std::numeric_limits<double>::infinity();
  for (const auto& law : laws) {
    worst = std::min(worst, rate_constant_positive(law).rate_constant);
  }
  return -0.5 * t * t * worst;
}

double union_upper_log_bound(const EdgeDistribution& dist, int n, int k, double t, double eps,
                             const UnionBoundConfig& cfg) {
  if (n < 1 || k < 1 || k > n) throw std::invalid_argument("union_upper_log_bound: bad n, k");
  if (!(t > 0.0)) throw std::invalid_argument("union_upper_log_bound: t must be positive");
  const double rate = rate_constant(dist).rate_constant;
  const double nk = static_cast<double>(n) * k;
  if (eps > 0.0) {
    if (!(eps < 0.5)) throw std::invalid_argument("union_upper_log_bound: eps must be below 1/2");
    const double shrunk = (1.0 - 2.0 * eps) * t;
    return -0.5 * shrunk * shrunk * rate + cfg.constant * nk * std::log(3.0 / eps);
  }
  if (!(t * t * rate > 2.0 * nk)) {
    throw std::invalid_argument("union_upper_log_bound: requires t^2 L > 2 n k");
  }
  return -0.5 * t * t * rate + cfg.constant * nk * std::log(t * t * rate / nk);
}

double union_upper_log_bound_threshold(const EdgeDistribution& dist, double t, double cap,
                                       const UnionBoundConfig& cfg) {
  if (!(t > 0.0)) throw std::invalid_argument("union_upper_log_bound_threshold: t must be positive");
  if (!(cap > 1.0)) throw std::invalid_argument("union_upper_log_bound_threshold: cap must exceed 1");
  const double rate = rate_constant(dist).rate_constant;
  return -0.5 * t * t * rate + cfg.constant * (t * t / cap) * std::log(cap);
}

std::string dump_matrix_text(const Eigen::MatrixXd& m) {
  std::string out;
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (j) out += ' ';
      out += format_double(m(i, j));
    }
    out += '\n';
  }
  return out;
}

}  // namespace trilab
