// Integration gate: every release-blocking property on one line each.
// Each check pins its numeric tolerance and a wall-clock budget; a run
// prints PASS/FAIL per line and exits nonzero if anything failed.

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <functional>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include <Eigen/Dense>

#include "trilab/counterex.hpp"
#include "trilab/dist.hpp"
#include "trilab/graphs.hpp"
#include "trilab/nets.hpp"
#include "trilab/rare.hpp"
#include "trilab/rng.hpp"
#include "trilab/spectral.hpp"

using namespace trilab;
using Eigen::MatrixXd;

namespace {

int worker_threads() {
  unsigned hw = std::thread::hardware_concurrency();
  return static_cast<int>(std::clamp(hw, 1u, 8u));
}

void require(bool cond, const std::string& msg) {
  if (!cond) throw std::runtime_error(msg);
}

std::string fmt(const char* pattern, double a, double b = 0.0, double c = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof(buf), pattern, a, b, c);
  return buf;
}

MatrixXd random_symmetric(int n, Rng& rng) {
  MatrixXd a(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) {
      a(i, j) = rng.gaussian();
      a(j, i) = a(i, j);
    }
  return a;
}

EdgeDistribution random_centered_law(Rng& rng) {
  const int k = 2 + static_cast<int>(rng.below(4));
  std::vector<Atom> atoms(k);
  double mass = 0.0;
  for (auto& a : atoms) {
    a.value = rng.gaussian();
    a.prob = 0.1 + rng.uniform01();
    mass += a.prob;
  }
  double mean = 0.0;
  for (auto& a : atoms) {
    a.prob /= mass;
    mean += a.prob * a.value;
  }
  for (auto& a : atoms) a.value -= mean;
  return EdgeDistribution::from_atoms(atoms);
}

// --------------------------------------------------------------- checks

void check_rate_closed_form() {
  for (int i = 1; i <= 19; ++i) {
    const double q = 0.05 * i;
    RateFunctionResult r = rate_constant(EdgeDistribution::centered_bernoulli(q));
    const double closed =
        std::abs(1.0 - 2.0 * q) < 1e-12 ? 2.0 : std::log((1.0 - q) / q) / (1.0 - 2.0 * q);
    require(std::abs(r.rate_constant - closed) <= 1e-8,
            fmt("rate mismatch at q=%.2f: err=%.3g", q, std::abs(r.rate_constant - closed)));
    require(std::abs(r.minimizer - (1.0 - 2.0 * q)) <= 1e-6,
            fmt("minimizer mismatch at q=%.2f: err=%.3g", q,
                std::abs(r.minimizer - (1.0 - 2.0 * q))));
  }
}

void check_duality_product() {
  Rng rng(2024);
  for (int rep = 0; rep < 20; ++rep) {
    EdgeDistribution law = random_centered_law(rng);
    RateFunctionResult r = rate_constant(law);
    require(r.duality_residual <= 1e-6,
            fmt("duality residual %.3g on law %d", r.duality_residual, double(rep)));
  }
}

void check_centering_identity() {
  for (int i = 0; i < 1000; ++i) {
    Rng rng = Rng::for_replica(3, static_cast<std::uint64_t>(i));
    const int n = 3 + static_cast<int>(rng.below(28));
    const std::int64_t pairs = std::int64_t(n) * (n - 1) / 2;
    const std::int64_t b = 1 + static_cast<std::int64_t>(rng.below(99));
    const std::int64_t a = static_cast<std::int64_t>(rng.below(static_cast<std::uint64_t>(b) + 1));
    Graph g = (i % 2 == 0)
                  ? Graph::sample_gnm(n, static_cast<std::int64_t>(rng.below(pairs + 1)), rng)
                  : Graph::sample_gnp(n, double(a) / double(b), rng);
    CenteringIdentity id = centering_identity(g, a, b);
    require(id.residual == 0, "identity residual nonzero at graph " + std::to_string(i));
    CenteringIdentity own = centering_identity(g, 2 * g.edge_count(), std::int64_t(n) * (n - 1));
    require(own.residual == 0, "own-density residual nonzero at graph " + std::to_string(i));
    CenteringInequality ineq = centering_inequality(g);
    require(ineq.inequality_holds, "inequality violated at graph " + std::to_string(i));
    require(ineq.degree_condition_holds, "degree condition failed at graph " + std::to_string(i));
  }
}

void check_iid_sum_limit() {
  const auto law = EdgeDistribution::centered_bernoulli(0.3);
  std::vector<double> gaps;
  for (std::int64_t m : {250, 500, 1000, 2000, 4000, 8000})
    gaps.push_back(cramer_check(law, m, 0.2).gap);
  require(gaps[3] <= 0.01, fmt("gap at m=2000 is %.4g > 0.01", gaps[3]));
  for (std::size_t i = 1; i < gaps.size(); ++i)
    require(gaps[i] <= gaps[i - 1] + 1e-15,
            fmt("gap grew between doublings: %.4g -> %.4g", gaps[i - 1], gaps[i]));
}

void check_hypergeo_gap_decay() {
  require(hypergeo_binom_gap(200, 100, 1, 1) == 0.0, "single-draw gap nonzero (200,100)");
  require(hypergeo_binom_gap(200, 100, 1, 0) == 0.0, "single-draw gap nonzero at value 0");
  require(hypergeo_binom_gap(30, 10, 1, 1) == 0.0, "single-draw gap nonzero (30,10)");

  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  int count = 0;
  for (std::int64_t pop : {200, 400, 800, 1600, 3200}) {
    const double gap = hypergeo_binom_gap(pop, pop / 2, 20, 10);
    require(gap > 0.0, "expected positive gap at r=20");
    const double x = std::log(double(pop)), y = std::log(gap);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++count;
  }
  const double slope = (count * sxy - sx * sy) / (count * sxx - sx * sx);
  require(slope >= -1.3 && slope <= -0.7, fmt("log-log slope %.3f outside [-1.3,-0.7]", slope));
}

void check_net_machinery() {
  const int threads = worker_threads();
  NetConfig roomy;
  roomy.max_elements = 10000000;

  // deeper patch sampling than the certificate's 1e4 probes, so the
  // builder closes gaps before the independent check looks for them
  NetConfig thorough = roomy;
  thorough.initial_draws_per_dim = 20000;
  thorough.patch_draws = 200000;
  thorough.max_patch_rounds = 200;

  for (int d = 1; d <= 6; ++d) {
    EuclideanNet net = euclidean_net(d, 0.5, 100 + d, thorough);
    CoveringReport rep = verify_euclidean_covering(net, 10000, 200 + d, threads);
    require(rep.covered, fmt("euclidean net d=%.0f uncovered: %.4g > 0.5", d, rep.max_distance));
  }
  for (int n = 2; n <= 4; ++n) {
    MatrixNet net = rank_k_net(n, 1, 0.5, 300 + n, roomy);
    CoveringReport rep = verify_matrix_covering(net, 10000, 400 + n, threads);
    require(rep.covered, fmt("rank-1 net n=%.0f uncovered: %.4g > 0.5", n, rep.max_distance));
    MatrixNet psd = psd_rank_k_net(n, 1, 0.5, 500 + n, roomy);
    CoveringReport prep = verify_matrix_covering(psd, 10000, 600 + n, threads);
    require(prep.covered, fmt("psd net n=%.0f uncovered: %.4g > 0.5", n, prep.max_distance));
  }

  // sup over the rank-1 ball never exceeds the net supremum inflated by
  // 1/(1-2 eps)
  const double eps = 0.25;
  MatrixNet net2 = rank_k_net(2, 1, eps, 700, roomy);
  MatrixNet net3 = rank_k_net(3, 1, eps, 701, roomy);
  Rng rng(702);
  for (int rep = 0; rep < 100; ++rep) {
    const bool small = rep % 2 == 0;
    MatrixXd a = random_symmetric(small ? 2 : 3, rng);
    const double truth = sup_rank_k(a, 1).value;
    const double net_sup = net_supremum(a, small ? net2 : net3);
    require(truth <= net_sup / (1.0 - 2.0 * eps) + 1e-9,
            fmt("net inequality violated: truth %.6g vs inflated %.6g", truth,
                net_sup / (1.0 - 2.0 * eps)));
  }
}

void check_psd_sup_formula() {
  Rng rng(7);
  for (int rep = 0; rep < 100; ++rep) {
    const int n = 2 + static_cast<int>(rng.below(11));
    const int k = 1 + static_cast<int>(rng.below(std::min(3, n)));
    MatrixXd a = random_symmetric(n, rng);
    std::vector<double> ev = eigenvalues_desc(a);
    double sum = 0.0;
    for (int i = 0; i < k && i < n; ++i) sum += std::max(ev[i], 0.0) * std::max(ev[i], 0.0);
    const double formula = std::sqrt(sum);
    const double sup = sup_rank_k_psd(a, k).value;
    require(std::abs(sup - formula) <= 1e-8,
            fmt("psd sup mismatch: %.10g vs %.10g", sup, formula));
  }
}

void check_scalar_tail_domination() {
  Rng rng(8);
  for (double q : {0.3, 0.5, 0.7}) {
    const auto law = EdgeDistribution::centered_bernoulli(q);
    const double rate_two_sided = rate_constant(law).rate_constant;
    for (int trial = 0; trial < 5; ++trial) {
      // symmetric M supported on 10 unordered pairs (20 entries), unit
      // Frobenius norm; <A,M> = sum over pairs of 2 w_e xi_e
      std::array<double, 10> w{};
      double norm2 = 0.0;
      for (auto& x : w) {
        x = 0.1 + std::abs(rng.gaussian());
        norm2 += 2.0 * x * x;
      }
      for (auto& x : w) x /= std::sqrt(norm2);

      for (double t = 0.1; t <= 2.51; t += 0.2) {
        double tail = 0.0;
        for (int pattern = 0; pattern < (1 << 10); ++pattern) {
          double value = 0.0, prob = 1.0;
          for (int e = 0; e < 10; ++e) {
            if (pattern & (1 << e)) {
              value += 2.0 * w[e] * (1.0 - q);
              prob *= q;
            } else {
              value -= 2.0 * w[e] * q;
              prob *= 1.0 - q;
            }
          }
          if (value > t) tail += prob;
        }
        if (tail <= 0.0) continue;
        const double log_tail = std::log(tail);
        require(log_tail <= -0.5 * t * t * rate_two_sided + 1e-12,
                fmt("exact tail beats two-sided bound at q=%.1f t=%.2f", q, t));
        require(log_tail <= hoeffding_tail_log_bound(law, t) + 1e-12,
                fmt("exact tail beats one-sided bound at q=%.1f t=%.2f", q, t));
      }
    }
  }
}

void check_rate_dip_search() {
  EtaSearchResult high = default_eta_search(EdgeDistribution::centered_bernoulli(0.75));
  require(high.best_eta > 0.0, fmt("no dip at q=0.75: best eta %.3g", high.best_eta));
  EtaSearchResult half = default_eta_search(EdgeDistribution::centered_bernoulli(0.5));
  require(half.best_eta <= 1e-3, fmt("unexpected dip at q=0.5: %.3g", half.best_eta));
  for (double q : {0.5, 0.75, 0.3}) {
    const double baseline = 1.0 / (2.0 * q * (1.0 - q));
    const double value = rate_expression(EdgeDistribution::centered_bernoulli(q), 1e-6, 1e-2);
    require(std::abs(value - baseline) <= 1e-4,
            fmt("small-eps limit off at q=%.2f: err %.3g", q, std::abs(value - baseline)));
  }
}

void check_tilted_estimator() {
  const int threads = worker_threads();
  const double t = deficit_quantile(GraphModel::gnp, 30, 0.5, 1e-2, 4000, 91, threads);
  TailEstimate naive = naive_tail_estimate(GraphModel::gnp, 30, 0.5, t, 20000, 90, threads);
  TailEstimate tilted = tilted_tail_estimate(GraphModel::gnp, 30, 0.5, t, 20000, 90, threads);
  require(!naive.degenerate && !tilted.degenerate, "estimator degenerated");
  const double diff = std::abs(naive.log_prob - tilted.log_prob);
  const double band = 3.0 * std::sqrt(naive.stderr_log * naive.stderr_log +
                                      tilted.stderr_log * tilted.stderr_log);
  require(diff <= band, fmt("estimates disagree: |%.4g| > %.4g", diff, band));

  TailEstimate empty_naive = naive_tail_estimate(GraphModel::gnp, 30, 0.5, 0.0, 2000, 77);
  TailEstimate empty_tilt = tilted_tail_estimate(GraphModel::gnp, 30, 0.5, 0.0, 2000, 77);
  require(empty_tilt.max_abs_log_weight == 0.0, "empty plant produced reweighting");
  require(empty_tilt.log_prob == empty_naive.log_prob,
          "empty plant diverged from plain counting");
}

void check_conditioned_structure() {
  const int threads = worker_threads();
  StructureReport r =
      conditional_structure_report(GraphModel::gnp, 30, 0.5, 1e-3, 20000, 11, threads, 0.8);
  require(!r.degenerate, "no accepted samples");
  require(r.min_eigenvalue_share.median > r.second_eigenvalue_share.median,
          fmt("bottom eigenvalue share %.4g not above second %.4g",
              r.min_eigenvalue_share.median, r.second_eigenvalue_share.median));
  require(r.extreme_share.median > r.bulk_share.median,
          fmt("extreme share %.4g not above bulk %.4g", r.extreme_share.median,
              r.bulk_share.median));
}

void check_cube_tail_property() {
  Rng rng(12);
  for (int rep = 0; rep < 100000; ++rep) {
    const int len = 2 + static_cast<int>(rng.below(29));
    std::vector<double> seq(len);
    for (auto& x : seq) x = std::abs(rng.gaussian());
    std::sort(seq.begin(), seq.end(), std::greater<double>());
    const double eps = 2.0 * rng.uniform01() + 1e-9;
    CubeTailComparison c = cube_tail_comparison(seq, eps);
    if (c.premise)
      require(c.conclusion, fmt("implication failed at sequence %d (eps %.3f)", double(rep), eps));
  }
}

// -------------------------------------------------------------- harness

struct Criterion {
  const char* name;
  double limit_seconds;
  std::function<void()> run;
};

}  // namespace

int main() {
  const std::vector<Criterion> criteria = {
      {"bernoulli rate constant matches closed form", 1.0, check_rate_closed_form},
      {"rate/subgaussian duality product equals one", 5.0, check_duality_product},
      {"centering identity exact, inequality holds", 30.0, check_centering_identity},
      {"iid-sum tail approaches its limit exponent", 5.0, check_iid_sum_limit},
      {"hypergeometric-binomial gap decays like 1/N", 10.0, check_hypergeo_gap_decay},
      {"covering nets certify and dominate the sup", 120.0, check_net_machinery},
      {"psd rank-k sup equals the eigenvalue formula", 30.0, check_psd_sup_formula},
      {"scalar tail bound dominates exact tails", 60.0, check_scalar_tail_domination},
      {"three-block rate dips below the baseline", 60.0, check_rate_dip_search},
      {"tilted and naive tail estimates agree", 300.0, check_tilted_estimator},
      {"conditioned spectra localize the deficit", 600.0, check_conditioned_structure},
      {"cube-tail premise forces the l2/l3 gap", 10.0, check_cube_tail_property},
  };

  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto& c = criteria[i];
    const auto start = std::chrono::steady_clock::now();
    std::string reason;
    try {
      c.run();
    } catch (const std::exception& e) {
      reason = e.what();
    }
    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (reason.empty() && seconds > c.limit_seconds)
      reason = fmt("runtime %.1fs exceeds %.0fs budget", seconds, c.limit_seconds);
    if (reason.empty()) {
      std::printf("PASS %2zu %-46s (%.2fs)\n", i + 1, c.name, seconds);
    } else {
      std::printf("FAIL %2zu %-46s (%.2fs): %s\n", i + 1, c.name, seconds, reason.c_str());
      ++failures;
    }
  }
  return failures == 0 ? 0 : 1;
}
