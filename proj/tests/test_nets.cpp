#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "trilab/dist.hpp"
#include "trilab/nets.hpp"
#include "trilab/rng.hpp"
#include "trilab/spectral.hpp"

using Eigen::MatrixXd;
using Eigen::VectorXd;
using trilab::EdgeDistribution;

TEST_CASE("euclidean net covers the interval") {
  const auto net = trilab::euclidean_net(1, 0.5, 101);
  // deterministic scan of [-1, 1]
  double worst = 0.0;
  for (int i = 0; i <= 1000; ++i) {
    const double x = -1.0 + 2.0 * i / 1000.0;
    double best = 1e300;
    for (const auto& p : net.points) best = std::min(best, std::abs(p(0) - x));
    worst = std::max(worst, best);
  }
  CHECK(worst <= 0.5);

  const auto rep = trilab::verify_euclidean_covering(net, 5000, 555);
  CHECK(rep.covered);
  CHECK(rep.max_distance <= 0.5);

  // the degenerate eps = 1 case: a single point at the origin suffices
  trilab::EuclideanNet origin;
  origin.dimension = 1;
  origin.eps = 1.0;
  origin.points.push_back(VectorXd::Zero(1));
  CHECK(trilab::verify_euclidean_covering(origin, 5000, 556).covered);

  CHECK_THROWS_AS(trilab::euclidean_net(0, 0.5, 1), std::invalid_argument);
  CHECK_THROWS_AS(trilab::euclidean_net(2, 0.0, 1), std::invalid_argument);
  CHECK_THROWS_AS(trilab::euclidean_net(2, 1.5, 1), std::invalid_argument);
}

TEST_CASE("euclidean nets cover in higher dimension") {
  for (int d : {3, 6}) {
    const auto net = trilab::euclidean_net(d, 0.5, 200 + d);
    const auto rep = trilab::verify_euclidean_covering(net, 2000, 900 + d);
    CAPTURE(d);
    CAPTURE(net.points.size());
    CHECK(rep.covered);
  }
}

TEST_CASE("covering verifier flags a broken net") {
  trilab::EuclideanNet bogus;
  bogus.dimension = 2;
  bogus.eps = 0.9;
  bogus.points.push_back(VectorXd::Zero(2));
  const auto rep = trilab::verify_euclidean_covering(bogus, 10000, 77);
  CHECK_FALSE(rep.covered);
  CHECK(rep.max_distance > 0.9);

  auto broken = trilab::MatrixNet::from_factors(
      2, 1, 0.9, trilab::NetFlavor::psd_rank_k, {MatrixXd::Zero(2, 1)});
  const auto mrep = trilab::verify_matrix_covering(broken, 2000, 78);
  CHECK_FALSE(mrep.covered);
  CHECK(mrep.max_distance > 0.9);
}

TEST_CASE("verification result is independent of thread count") {
  const auto net = trilab::euclidean_net(3, 0.5, 31);
  const auto serial = trilab::verify_euclidean_covering(net, 3000, 41, 1);
  const auto parallel = trilab::verify_euclidean_covering(net, 3000, 41, 4);
  CHECK(serial.max_distance == parallel.max_distance);
}

TEST_CASE("rank-1 matrix nets satisfy the element invariants") {
  const auto net = trilab::rank_k_net(2, 1, 0.5, 7);
  CHECK(net.size() == net.factor_count() * net.factor_count());
  for (std::size_t i = 0; i < net.size(); ++i) {
    const MatrixXd m = net.element(i);
    CHECK(m.norm() <= 1.0 + 1e-8);
    const auto sv = trilab::singular_values_desc(m);
    for (std::size_t r = 1; r < sv.size(); ++r) CHECK(sv[r] <= 1e-8);
  }

  const auto psd = trilab::psd_rank_k_net(2, 1, 0.5, 7);
  CHECK(psd.size() == psd.factor_count());
  for (std::size_t i = 0; i < psd.size(); ++i) {
    const MatrixXd m = psd.element(i);
    CHECK(m.norm() <= 1.0 + 1e-8);
    CHECK((m - m.transpose()).norm() <= 1e-12);
    const auto eigs = trilab::eigenvalues_desc(m);
    CHECK(eigs.back() >= -1e-8);
  }
}

TEST_CASE("matrix nets cover random unit-Frobenius targets") {
  const auto net = trilab::rank_k_net(2, 1, 0.5, 7);
  const auto rep = trilab::verify_matrix_covering(net, 5000, 99);
  CHECK(rep.covered);

  const auto psd = trilab::psd_rank_k_net(2, 1, 0.5, 7);
  const auto prep = trilab::verify_matrix_covering(psd, 5000, 98);
  CHECK(prep.covered);
}

TEST_CASE("factor-route distance never undercuts the exact nearest distance") {
  const auto net = trilab::rank_k_net(2, 1, 0.5, 13);
  auto rng = trilab::Rng(14);
  for (int rep = 0; rep < 50; ++rep) {
    MatrixXd x(2, 1), y(2, 1);
    x << rng.gaussian(), rng.gaussian();
    y << rng.gaussian(), rng.gaussian();
    MatrixXd t = x * y.transpose();
    t /= t.norm();
    const double fast = trilab::nearest_element_distance_bound(net, t);
    const double exact = trilab::nearest_element_distance_exact(net, t);
    CHECK(exact <= fast + 1e-12);
    CHECK(fast <= net.eps());
  }
}

TEST_CASE("rank-2 nets cover and satisfy invariants on a tiny instance") {
  trilab::NetConfig cfg;
  cfg.max_elements = 40000000;
  const auto net = trilab::rank_k_net(2, 2, 0.9, 21, cfg);
  auto rng = trilab::Rng(22);
  for (int rep = 0; rep < 200; ++rep) {
    const MatrixXd m = net.element(rng.below(net.size()));
    CHECK(m.norm() <= 1.0 + 1e-8);
  }
  const auto rep = trilab::verify_matrix_covering(net, 500, 23);
  CHECK(rep.covered);
}

TEST_CASE("net size guard") {
  trilab::NetConfig tiny;
  tiny.max_elements = 100;
  CHECK_THROWS_AS(trilab::rank_k_net(3, 1, 0.4, 5, tiny), std::runtime_error);
}

TEST_CASE("net supremum dominates the rank-constrained supremum") {
  trilab::NetConfig roomy;
  roomy.max_elements = 10000000;
  // triangle adjacency: eigenvalues 2, -1, -1
  MatrixXd k3 = MatrixXd::Ones(3, 3) - MatrixXd::Identity(3, 3);
  const auto net = trilab::rank_k_net(3, 1, 0.25, 3, roomy);
  const double sup = trilab::net_supremum(k3, net);
  CHECK(sup / (1.0 - 2.0 * 0.25) >= 2.0 - 1e-9);
  CHECK(sup <= 2.0 + 1e-9);  // max over the ball is sigma_1

  auto rng = trilab::Rng(6);
  const auto net4 = trilab::rank_k_net(2, 1, 0.25, 4);
  for (int rep = 0; rep < 20; ++rep) {
    MatrixXd a(2, 2);
    a(0, 0) = rng.gaussian();
    a(1, 1) = rng.gaussian();
    a(0, 1) = a(1, 0) = rng.gaussian();
    const double truth = trilab::sup_rank_k(a, 1).value;
    const double sup_net = trilab::net_supremum(a, net4);
    CHECK(truth <= sup_net / (1.0 - 2.0 * 0.25) + 1e-9);
    CHECK(sup_net <= truth + 1e-9);
  }

  auto loose = trilab::MatrixNet::from_factors(2, 1, 0.6, trilab::NetFlavor::rank_k,
                                               {MatrixXd::Zero(2, 1)});
  CHECK_THROWS_AS(trilab::net_supremum(MatrixXd::Identity(2, 2), loose),
                  std::invalid_argument);
}

TEST_CASE("psd net supremum respects the psd rank-constrained supremum") {
  auto rng = trilab::Rng(8);
  const auto net = trilab::psd_rank_k_net(3, 1, 0.2, 9);
  for (int rep = 0; rep < 20; ++rep) {
    MatrixXd a(3, 3);
    for (int i = 0; i < 3; ++i) {
      for (int j = i; j < 3; ++j) {
        a(i, j) = rng.gaussian();
        a(j, i) = a(i, j);
      }
    }
    const double truth = trilab::sup_rank_k_psd(a, 1).value;
    const double sup_net = trilab::net_supremum(a, net);
    CHECK(sup_net <= truth + 1e-9);
    // net elements get within eps of the optimizer, so the value gap is at
    // most eps * |A|_F even before the 1/(1-2eps) inflation
    CHECK(truth <= sup_net + net.eps() * a.norm() + 1e-9);
  }
}

TEST_CASE("hoeffding log bound") {
  const auto half = EdgeDistribution::centered_bernoulli(0.5);
  CHECK(trilab::hoeffding_tail_log_bound(half, 3.0) == doctest::Approx(-9.0).epsilon(1e-9));
  CHECK(std::abs(trilab::hoeffding_tail_log_bound(half, 1e-9)) < 1e-17);
  CHECK_THROWS_AS(trilab::hoeffding_tail_log_bound(half, 0.0), std::invalid_argument);

  // inhomogeneous: the weakest entry law decides
  const auto d3 = EdgeDistribution::centered_bernoulli(0.3);
  const auto d7 = EdgeDistribution::centered_bernoulli(0.7);
  const double l3 = trilab::rate_constant_positive(d3).rate_constant;
  const double l7 = trilab::rate_constant_positive(d7).rate_constant;
  const double mixed = trilab::hoeffding_tail_log_bound({d3, d7}, 2.0);
  CHECK(mixed == doctest::Approx(-2.0 * std::min(l3, l7)).epsilon(1e-12));
  CHECK(trilab::hoeffding_tail_log_bound({half}, 3.0) ==
        doctest::Approx(trilab::hoeffding_tail_log_bound(half, 3.0)));
}

TEST_CASE("hoeffding bound dominates exact enumerable tails") {
  // <A, M> with M supported on `pairs` symmetric entries of equal weight:
  // the sum is binomial and the tail is exactly enumerable.
  for (double q : {0.3, 0.5, 0.7}) {
    const auto law = EdgeDistribution::centered_bernoulli(q);
    for (int pairs : {1, 4, 9}) {
      const double w = 1.0 / std::sqrt(2.0 * pairs);  // unit Frobenius norm
      const double coef = 2.0 * w;
      for (double t : {0.2, 0.5, 1.0, 1.5}) {
        // P(coef * sum_i xi_i >= t), xi in {1-q w.p. q, -q w.p. 1-q}
        double tail = 0.0;
        for (int j = 0; j <= pairs; ++j) {
          const double value = coef * (j * (1.0 - q) - (pairs - j) * q);
          if (value > t) {
            double logpmf = std::lgamma(pairs + 1.0) - std::lgamma(j + 1.0) -
                            std::lgamma(pairs - j + 1.0) + j * std::log(q) +
                            (pairs - j) * std::log(1.0 - q);
            tail += std::exp(logpmf);
          }
        }
        const double bound = trilab::hoeffding_tail_log_bound(law, t);
        if (tail > 0.0) {
          CAPTURE(q);
          CAPTURE(pairs);
          CAPTURE(t);
          CHECK(std::log(tail) <= bound + 1e-12);
        }
      }
    }
  }
}

TEST_CASE("union bound formula and monotonicity") {
  const auto half = EdgeDistribution::centered_bernoulli(0.5);
  // q = 1/2: L = 2; at n = 30, k = 1, t = 60 the leading term is -3600
  const double v = trilab::union_upper_log_bound(half, 30, 1, 60.0);
  CHECK(v == doctest::Approx(-3600.0 + 30.0 * std::log(7200.0 / 30.0)).epsilon(1e-12));

  trilab::UnionBoundConfig c0;
  c0.constant = 0.0;
  CHECK(trilab::union_upper_log_bound(half, 30, 1, 120.0, 0.0, c0) ==
        doctest::Approx(4.0 * trilab::union_upper_log_bound(half, 30, 1, 60.0, 0.0, c0)));

  double prev = 0.0;
  bool first = true;
  for (double t : {6.0, 10.0, 20.0, 40.0, 80.0, 160.0}) {
    const double cur = trilab::union_upper_log_bound(half, 30, 1, t);
    if (!first) CHECK(cur < prev);
    prev = cur;
    first = false;
  }

  CHECK_THROWS_AS(trilab::union_upper_log_bound(half, 30, 1, 5.0), std::invalid_argument);

  // pre-optimization form at explicit eps
  const double at_eps = trilab::union_upper_log_bound(half, 30, 1, 60.0, 0.25);
  CHECK(at_eps == doctest::Approx(-0.5 * 30.0 * 30.0 * 2.0 + 30.0 * std::log(12.0)).epsilon(1e-12));
  CHECK_THROWS_AS(trilab::union_upper_log_bound(half, 30, 1, 60.0, 0.6), std::invalid_argument);
}

TEST_CASE("threshold variant approaches the leading term as the cap grows") {
  const auto half = EdgeDistribution::centered_bernoulli(0.5);
  const double t = 50.0;
  const double lead = -0.5 * t * t * 2.0;
  double prev_rel = 1e300;
  for (double cap : {10.0, 100.0, 1000.0}) {
    const double v = trilab::union_upper_log_bound_threshold(half, t, cap);
    const double rel = std::abs(v - lead) / std::abs(lead);
    CHECK(rel < prev_rel);
    prev_rel = rel;
  }
  CHECK(prev_rel < 0.01);
  CHECK_THROWS_AS(trilab::union_upper_log_bound_threshold(half, t, 1.0), std::invalid_argument);
}

TEST_CASE("matrix text dump") {
  MatrixXd m(2, 2);
  m << 1.5, -0.25, 1.0 / 3.0, 0.0;
  const std::string text = trilab::dump_matrix_text(m);
  CHECK(text == "1.5 -0.25\n0.33333333333333331 0\n");
  CHECK(trilab::dump_matrix_text(m) == text);
}
