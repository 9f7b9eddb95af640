#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "trilab/graphs.hpp"
#include "trilab/rng.hpp"
#include "trilab/spectral.hpp"

using Eigen::MatrixXd;

namespace {

MatrixXd random_symmetric(int n, trilab::Rng& rng) {
  MatrixXd a(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = i; j < n; ++j) {
      a(i, j) = rng.gaussian();
      a(j, i) = a(i, j);
    }
  }
  return a;
}

}  // namespace

TEST_CASE("eigenvalues are sorted and match singular values in magnitude") {
  auto rng = trilab::Rng(1);
  const MatrixXd a = random_symmetric(9, rng);
  const auto eig = trilab::eigenvalues_desc(a);
  REQUIRE(eig.size() == 9);
  CHECK(std::is_sorted(eig.rbegin(), eig.rend()));

  auto abs_eig = eig;
  for (auto& x : abs_eig) x = std::abs(x);
  std::sort(abs_eig.rbegin(), abs_eig.rend());
  const auto sv = trilab::singular_values_desc(a);
  REQUIRE(sv.size() == 9);
  for (int i = 0; i < 9; ++i) {
    CHECK(sv[i] == doctest::Approx(abs_eig[i]).epsilon(1e-10));
  }

  // trace and Frobenius invariants
  double sum = 0.0, sumsq = 0.0;
  for (double x : eig) {
    sum += x;
    sumsq += x * x;
  }
  CHECK(sum == doctest::Approx(a.trace()).epsilon(1e-10));
  CHECK(sumsq == doctest::Approx(a.squaredNorm()).epsilon(1e-10));
}

TEST_CASE("rank-constrained linear sups on a diagonal matrix") {
  MatrixXd a = MatrixXd::Zero(3, 3);
  a(0, 0) = 3.0;
  a(1, 1) = 1.0;
  a(2, 2) = -2.0;

  CHECK(trilab::sup_rank_k(a, 1).value == doctest::Approx(3.0));
  CHECK(trilab::sup_rank_k(a, 2).value == doctest::Approx(std::sqrt(13.0)));
  CHECK(trilab::sup_rank_k(a, 3).value == doctest::Approx(std::sqrt(14.0)));

  CHECK(trilab::sup_rank_k_psd(a, 1).value == doctest::Approx(3.0));
  CHECK(trilab::sup_rank_k_psd(a, 2).value == doctest::Approx(std::sqrt(10.0)));
  CHECK(trilab::sup_rank_k_psd(a, 3).value == doctest::Approx(std::sqrt(10.0)));

  // negative definite: the zero matrix is the best feasible point
  CHECK(trilab::sup_rank_k_psd(-MatrixXd::Identity(4, 4), 2).value == 0.0);

  CHECK_THROWS_AS(trilab::sup_rank_k(a, 0), std::invalid_argument);
  CHECK_THROWS_AS(trilab::sup_rank_k_psd(a, 4), std::invalid_argument);
}

TEST_CASE("sup optimizers are feasible and attain the reported value") {
  auto rng = trilab::Rng(2);
  for (int rep = 0; rep < 15; ++rep) {
    const int n = 4 + static_cast<int>(rng.below(9));
    const int k = 1 + static_cast<int>(rng.below(3));
    const MatrixXd a = random_symmetric(n, rng);

    const auto plain = trilab::sup_rank_k(a, k);
    CHECK((a.transpose() * plain.optimizer).trace() ==
          doctest::Approx(plain.value).epsilon(1e-10));
    CHECK(plain.optimizer.norm() <= 1.0 + 1e-10);
    const auto plain_sv = trilab::singular_values_desc(plain.optimizer);
    for (std::size_t i = k; i < plain_sv.size(); ++i) CHECK(plain_sv[i] <= 1e-10);

    const auto psd = trilab::sup_rank_k_psd(a, k);
    CHECK((a.transpose() * psd.optimizer).trace() ==
          doctest::Approx(psd.value).epsilon(1e-10));
    CHECK(psd.optimizer.norm() <= 1.0 + 1e-10);
    const auto psd_eigs = trilab::eigenvalues_desc(psd.optimizer);
    CHECK(psd_eigs.back() >= -1e-10);

    // PSD restriction can only shrink the sup.
    CHECK(psd.value <= plain.value + 1e-10);

    // Random feasible points never beat the reported sup.
    for (int probe = 0; probe < 20; ++probe) {
      MatrixXd x(n, k);
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < k; ++j) x(i, j) = rng.gaussian();
      MatrixXd m = x * x.transpose();
      m /= m.norm();
      CHECK((a.transpose() * m).trace() <= psd.value + 1e-9);
      CHECK((a.transpose() * m).trace() <= plain.value + 1e-9);
    }
  }
}

TEST_CASE("positive semidefinite input makes both sups coincide") {
  auto rng = trilab::Rng(3);
  MatrixXd b(6, 3);
  for (int i = 0; i < 6; ++i)
    for (int j = 0; j < 3; ++j) b(i, j) = rng.gaussian();
  const MatrixXd a = b * b.transpose();
  for (int k = 1; k <= 4; ++k) {
    CHECK(trilab::sup_rank_k(a, k).value ==
          doctest::Approx(trilab::sup_rank_k_psd(a, k).value).epsilon(1e-10));
  }
}

TEST_CASE("capped cubic branches") {
  const double cap = 2.0;
  const double kink = std::sqrt(cap);

  CHECK(trilab::capped_cubic_upper(-1.0, cap) == 0.0);
  CHECK(trilab::capped_cubic_upper(0.5, cap) == doctest::Approx(0.125));
  CHECK(trilab::capped_cubic_upper(kink, cap) == doctest::Approx(cap * kink));
  CHECK(trilab::capped_cubic_upper(3.0, cap) ==
        doctest::Approx(3.0 * cap * 3.0 - 2.0 * cap * kink));

  // continuity and C1 across both joints
  for (double x0 : {0.0, kink}) {
    const double h = 1e-7;
    const double left = trilab::capped_cubic_upper(x0 - h, cap);
    const double right = trilab::capped_cubic_upper(x0 + h, cap);
    CHECK(std::abs(right - left) <= 1e-5);
    const double dl = (trilab::capped_cubic_upper(x0 - h, cap) -
                       trilab::capped_cubic_upper(x0 - 3 * h, cap)) / (2 * h);
    const double dr = (trilab::capped_cubic_upper(x0 + 3 * h, cap) -
                       trilab::capped_cubic_upper(x0 + h, cap)) / (2 * h);
    CHECK(std::abs(dr - dl) <= 1e-4);
  }

  // mirror symmetry and the combined branch
  CHECK(trilab::capped_cubic_lower(-0.5, cap) == doctest::Approx(-0.125));
  CHECK(trilab::capped_cubic_lower(0.5, cap) == 0.0);
  for (double x : {-3.0, -1.0, -0.2, 0.0, 0.7, 2.5}) {
    CHECK(trilab::capped_cubic_sum(x, cap) ==
          doctest::Approx(-trilab::capped_cubic_sum(-x, cap)).epsilon(1e-12));
    if (std::abs(x) <= kink) {
      CHECK(trilab::capped_cubic_sum(x, cap) == doctest::Approx(x * x * x));
    } else {
      CHECK(std::abs(trilab::capped_cubic_sum(x, cap)) < std::abs(x * x * x));
    }
  }

  CHECK_THROWS_AS(trilab::capped_cubic_upper(1.0, 0.0), std::invalid_argument);
}

TEST_CASE("spectral cubic statistic") {
  // All eigenvalues within the cap: the statistic is the normalized cube sum.
  const std::vector<double> eigs{2.0, -1.0, -1.0};  // triangle graph
  const double n = 3.0;
  const double direct = (std::pow(2.0 / std::sqrt(n), 3) + 2 * std::pow(-1.0 / std::sqrt(n), 3)) / n;
  CHECK(trilab::spectral_cubic_statistic(eigs, 100.0) == doctest::Approx(direct).epsilon(1e-12));

  // tr A^3 = 6 triangles for the complete graph on 3 vertices
  CHECK(direct * n * std::pow(n, 1.5) == doctest::Approx(6.0).epsilon(1e-12));

  // A tiny cap linearizes large entries and shrinks the statistic.
  CHECK(std::abs(trilab::spectral_cubic_statistic(eigs, 0.01)) <
        std::abs(trilab::spectral_cubic_statistic(eigs, 100.0)));
}

TEST_CASE("spectrum split partitions the cube sum") {
  auto rng = trilab::Rng(4);
  const MatrixXd a = random_symmetric(12, rng);
  const auto eigs = trilab::eigenvalues_desc(a);
  const auto split = trilab::split_spectrum(eigs, -1.0);
  CHECK(split.bulk.size() + split.extreme.size() == eigs.size());
  for (double x : split.extreme) CHECK(x <= -1.0);
  for (double x : split.bulk) CHECK(x > -1.0);
  double cube = 0.0;
  for (double x : eigs) cube += x * x * x;
  CHECK(split.bulk_cube_sum + split.extreme_cube_sum == doctest::Approx(cube).epsilon(1e-12));
}

TEST_CASE("tail cube mass forces extra l2 over l3 mass") {
  // Equality case: two equal entries with eps = 1.
  const auto eq = trilab::cube_tail_comparison({1.0, 1.0}, 1.0);
  CHECK(eq.premise);
  CHECK(eq.conclusion);
  CHECK(eq.l2_squared == doctest::Approx(eq.required_factor * eq.l3_squared).epsilon(1e-12));

  // Premise fails for a lone spike; no claim is made then.
  const auto spike = trilab::cube_tail_comparison({1.0, 0.1}, 0.5);
  CHECK_FALSE(spike.premise);

  auto rng = trilab::Rng(5);
  int premise_hits = 0;
  for (int rep = 0; rep < 10000; ++rep) {
    const int len = 2 + static_cast<int>(rng.below(8));
    std::vector<double> seq(len);
    for (auto& x : seq) x = rng.uniform01();
    std::sort(seq.rbegin(), seq.rend());
    const double eps = rng.uniform01() * 2.0;
    const auto cmp = trilab::cube_tail_comparison(seq, eps);
    if (cmp.premise) {
      ++premise_hits;
      CHECK(cmp.conclusion);
    }
  }
  CHECK(premise_hits > 1000);  // the check must not be vacuous

  CHECK_THROWS_AS(trilab::cube_tail_comparison({0.5, 1.0}, 0.1), std::invalid_argument);
  CHECK_THROWS_AS(trilab::cube_tail_comparison({1.0, -0.5}, 0.1), std::invalid_argument);
}
