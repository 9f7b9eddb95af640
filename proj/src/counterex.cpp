#include "trilab/counterex.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

namespace trilab {

namespace {

std::array<double, 3> block_weights(double eps, double delta) {
  return {1.0 / (eps * eps), 2.0 * eps / (delta * delta * delta),
          std::pow(eps, 4) / std::pow(delta, 6)};
}

std::array<double, 3> tilt_points(double eps, double delta) {
  return {eps, -delta, delta * delta / eps};
}

void validate_shape(double eps, double delta) {
  if (!(eps > 0.0) || !(delta > 0.0)) {
    throw std::invalid_argument("counterexample: eps and delta must be positive");
  }
}

// conj(cgf'(b)) via the conjugacy identity.  For finite-support laws the
// tilted mean never leaves the open hull, and at large b the identity
// saturates exactly to -ln(top atom mass), so the only true domain failure
// is floating-point overflow of the construction itself.
double conjugate_at_tilt(const EdgeDistribution& dist, double b) {
  const double u = dist.cgf_derivative(b);
  const double value = b * u - dist.cgf(b);
  if (!std::isfinite(value)) {
    throw std::domain_error("counterexample: tilt point overflows the conjugate");
  }
  return value;
}

// Inverse of cgf' by bracketed bisection; cgf' is strictly increasing.
double tilt_for_mean(const EdgeDistribution& dist, double y) {
  double lo = -1.0, hi = 1.0;
  int guard = 0;
  while (dist.cgf_derivative(lo) > y && guard++ < 60) lo *= 2.0;
  guard = 0;
  while (dist.cgf_derivative(hi) < y && guard++ < 60) hi *= 2.0;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (dist.cgf_derivative(mid) < y) {
      lo = mid;
    } else {
      hi = mid;
    }
    if (hi - lo <= 1e-16 * (1.0 + std::abs(hi))) break;
  }
  return 0.5 * (lo + hi);
}

double fit_loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= static_cast<double>(x.size());
  my /= static_cast<double>(x.size());
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    num += (x[i] - mx) * (y[i] - my);
    den += (x[i] - mx) * (x[i] - mx);
  }
  return num / den;
}

std::vector<double> log_grid(double lo, double hi, int count) {
  std::vector<double> g(count);
  const double llo = std::log(lo), lhi = std::log(hi);
  for (int i = 0; i < count; ++i) {
    const double f = count == 1 ? 0.0 : static_cast<double>(i) / (count - 1);
    g[i] = std::exp(llo + f * (lhi - llo));
  }
  return g;
}

}  // namespace

double rate_expression(const EdgeDistribution& dist, double eps, double delta) {
  validate_shape(eps, delta);
  const auto m = block_weights(eps, delta);
  const auto b = tilt_points(eps, delta);
  double sum_mb2 = 0.0, sum_conj = 0.0, sum_mb_mean = 0.0;
  for (int i = 0; i < 3; ++i) {
    sum_mb2 += m[i] * b[i] * b[i];
    sum_conj += m[i] * conjugate_at_tilt(dist, b[i]);
    sum_mb_mean += m[i] * b[i] * dist.cgf_derivative(b[i]);
  }
  const double rate = sum_mb2 * sum_conj / (sum_mb_mean * sum_mb_mean);
  if (!std::isfinite(rate)) {
    throw std::domain_error("counterexample: rate expression overflows");
  }
  return rate;
}

CounterexampleParams make_counterexample_params(const EdgeDistribution& dist, double eps,
                                                double delta, double t) {
  validate_shape(eps, delta);
  if (!(t > 0.0)) throw std::invalid_argument("counterexample: t must be positive");
  CounterexampleParams out;
  out.eps = eps;
  out.delta = delta;
  out.t_total = t;
  out.m_values = block_weights(eps, delta);
  out.b_values = tilt_points(eps, delta);

  double sum_mb2 = 0.0, sum_mb_mean = 0.0;
  std::array<double, 3> tilted_mean{};
  for (int i = 0; i < 3; ++i) {
    tilted_mean[i] = dist.cgf_derivative(out.b_values[i]);
    sum_mb2 += out.m_values[i] * out.b_values[i] * out.b_values[i];
    sum_mb_mean += out.m_values[i] * out.b_values[i] * tilted_mean[i];
  }
  out.alpha = 2.0 * sum_mb_mean / (t * sum_mb2);
  out.beta = t * t * sum_mb2 / (2.0 * sum_mb_mean * sum_mb_mean);
  for (int i = 0; i < 3; ++i) {
    out.t_split[i] =
        out.alpha * out.beta * out.m_values[i] * out.b_values[i] * tilted_mean[i];
  }
  out.rate_value = rate_expression(dist, eps, delta);
  out.baseline = 1.0 / (2.0 * dist.variance());
  out.eta = 1.0 - out.rate_value / out.baseline;
  return out;
}

EtaSearchResult search_eta(const EdgeDistribution& dist, const std::vector<double>& eps_grid,
                           const std::vector<double>& delta_grid) {
  if (eps_grid.empty() || delta_grid.empty()) {
    throw std::invalid_argument("counterexample search: empty grid");
  }
  const double baseline = 1.0 / (2.0 * dist.variance());
  EtaSearchResult out;
  out.best_eta = -std::numeric_limits<double>::infinity();
  for (double delta : delta_grid) {
    for (double eps : eps_grid) {
      double rate;
      try {
        rate = rate_expression(dist, eps, delta);
      } catch (const std::domain_error&) {
        ++out.skipped;
        continue;
      }
      const double eta = 1.0 - rate / baseline;
      out.rows.push_back({eps, delta, rate, baseline, eta});
      if (eta > out.best_eta) {
        out.best_eta = eta;
        out.best_eps = eps;
        out.best_delta = delta;
      }
    }
  }
  if (out.rows.empty()) {
    throw std::domain_error("counterexample search: no admissible grid point");
  }
  return out;
}

EtaSearchResult default_eta_search(const EdgeDistribution& dist) {
  const double baseline = 1.0 / (2.0 * dist.variance());
  EtaSearchResult out;
  out.best_eta = -std::numeric_limits<double>::infinity();
  for (double delta : log_grid(1e-2, 0.3, 12)) {
    for (double eps : log_grid(1e-4, delta * delta, 10)) {
      double rate;
      try {
        rate = rate_expression(dist, eps, delta);
      } catch (const std::domain_error&) {
        ++out.skipped;
        continue;
      }
      const double eta = 1.0 - rate / baseline;
      out.rows.push_back({eps, delta, rate, baseline, eta});
      if (eta > out.best_eta) {
        out.best_eta = eta;
        out.best_eps = eps;
        out.best_delta = delta;
      }
    }
  }
  if (out.rows.empty()) {
    throw std::domain_error("counterexample search: no admissible grid point");
  }
  return out;
}

PsdPlant psd_plant(double eps, double delta, double alpha, double beta) {
  validate_shape(eps, delta);
  if (!(alpha > 0.0) || !(beta > 0.0)) {
    throw std::invalid_argument("psd plant: alpha and beta must be positive");
  }
  const double root = std::sqrt(2.0 * beta);
  const long large = std::lround(root / eps);
  const long small = std::lround(root * eps * eps / (delta * delta * delta));
  if (large < 1 || small < 1) {
    throw std::invalid_argument("psd plant: multiplicity rounds to an empty part");
  }
  if (large + small > 20000) {
    throw std::invalid_argument("psd plant: parts too large to materialize");
  }
  PsdPlant out;
  out.part_large = static_cast<int>(large);
  out.part_small = static_cast<int>(small);
  const int n = out.part_large + out.part_small;
  out.direction = Eigen::VectorXd(n);
  const double scale = std::sqrt(alpha / 2.0);
  for (int i = 0; i < out.part_large; ++i) out.direction[i] = scale * std::sqrt(eps);
  for (int i = out.part_large; i < n; ++i) {
    out.direction[i] = -scale * delta / std::sqrt(eps);
  }
  out.matrix = out.direction * out.direction.transpose();
  return out;
}

TaylorChecksReport taylor_lemma_checks(const EdgeDistribution& dist) {
  TaylorChecksReport rep;
  const double k2 = dist.variance();
  const double k3 = dist.third_moment();

  for (int i = 0; i <= 30; ++i) {
    const double x = -3.0 + 6.0 * static_cast<double>(i) / 30.0;
    const double u = dist.cgf_derivative(x);
    const auto direct = dist.legendre(u);
    if (!direct.has_value()) continue;  // float-saturated tilt, nothing to compare
    const double via_identity = x * u - dist.cgf(x);
    rep.max_identity_error =
        std::max(rep.max_identity_error, std::abs(direct.value() - via_identity));
  }

  auto conj_of_mean = [&](double x) { return x * dist.cgf_derivative(x) - dist.cgf(x); };

  // Even part at eps = 1e-2 strips the cubic term from the ratio.
  const double e0 = 1e-2;
  rep.quadratic_coefficient = (conj_of_mean(e0) + conj_of_mean(-e0)) / (2.0 * e0 * e0);
  rep.quadratic_exact = 0.5 * k2;

  std::vector<double> lx, ly;
  for (double e : log_grid(1e-3, 1e-1, 17)) {
    const double resid =
        std::abs(conj_of_mean(e) - 0.5 * k2 * e * e - (k3 / 3.0) * e * e * e);
    if (resid <= 0.0) continue;
    lx.push_back(std::log(e));
    ly.push_back(std::log(resid));
  }
  rep.residual_slope = fit_loglog_slope(lx, ly);

  // (conj)'''(0) from Richardson-extrapolated central differences of
  // (conj)''(y) = 1 / cgf''(x(y)).
  auto conj_second = [&](double y) {
    return 1.0 / dist.cgf_second_derivative(tilt_for_mean(dist, y));
  };
  const double h = 1e-3;
  auto central = [&](double step) {
    return (conj_second(step) - conj_second(-step)) / (2.0 * step);
  };
  const double third = (4.0 * central(h / 2.0) - central(h)) / 3.0;
  rep.third_order_fd = (third * k2 * k2 * k2 + 3.0 * k3) / 6.0;
  rep.third_order_exact = k3 / 3.0;
  return rep;
}

}  // namespace trilab
