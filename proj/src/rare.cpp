#include "trilab/rare.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <utility>
#include <vector>

#include <boost/multiprecision/cpp_bin_float.hpp>
#include <boost/multiprecision/cpp_int.hpp>

#include "trilab/graphs.hpp"
#include "trilab/parallel.hpp"
#include "trilab/rng.hpp"
#include "trilab/spectral.hpp"

namespace trilab {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::int64_t pair_count(int n) { return static_cast<std::int64_t>(n) * (n - 1) / 2; }

std::int64_t triple_count(int n) {
  return static_cast<std::int64_t>(n) * (n - 1) * (n - 2) / 6;
}

// Edge density of the model: p itself for G(n,p), m / C(n,2) for G(n,m).
double resolve_density(GraphModel model, int n, double m_or_p, std::int64_t* m_out) {
  if (model == GraphModel::gnp) {
    if (!(m_or_p > 0.0 && m_or_p < 1.0)) {
      throw std::invalid_argument("tail estimate: p must lie in (0,1)");
    }
    if (m_out != nullptr) *m_out = -1;
    return m_or_p;
  }
  const double rounded = std::nearbyint(m_or_p);
  if (!(std::abs(m_or_p - rounded) <= 1e-9)) {
    throw std::invalid_argument("tail estimate: m must be an integer");
  }
  const std::int64_t m = static_cast<std::int64_t>(rounded);
  const std::int64_t total = pair_count(n);
  if (m <= 0 || m >= total) {
    throw std::invalid_argument("tail estimate: m must lie strictly between 0 and C(n,2)");
  }
  if (m_out != nullptr) *m_out = m;
  return static_cast<double>(m) / static_cast<double>(total);
}

// Replica index space: [0, pilot) calibrates the density reference,
// [pilot, pilot + n_samples) runs the estimator.  Sharing the pilot between
// the naive and tilted runs of one seed makes them target the same event.
std::int64_t pilot_size(std::int64_t n_samples) {
  return std::min(n_samples, std::clamp(n_samples / 4, std::int64_t{1000}, std::int64_t{20000}));
}

double triangle_density(const Graph& g) {
  return static_cast<double>(g.triangle_count()) / static_cast<double>(triple_count(g.order()));
}

Graph sample_model(GraphModel model, int n, double p, std::int64_t m, Rng& rng) {
  return model == GraphModel::gnp ? Graph::sample_gnp(n, p, rng)
                                  : Graph::sample_gnm(n, m, rng);
}

// Mean triangle density over `count` unconditioned draws.
double pilot_reference(GraphModel model, int n, double p, std::int64_t m,
                       std::int64_t count, std::uint64_t seed, int threads) {
  std::vector<double> tau(count);
  parallel_for(count, threads, [&](std::int64_t i) {
    Rng rng = Rng::for_replica(seed, static_cast<std::uint64_t>(i));
    const Graph g = sample_model(model, n, p, m, rng);
    tau[static_cast<std::size_t>(i)] = triangle_density(g);
  });
  return pairwise_sum(tau) / static_cast<double>(count);
}

// G(n,p) with edges inside the leading block of `ell` vertices drawn at
// p_block instead.  Returns the number of block edges actually present,
// which determines the likelihood ratio.
Graph sample_block_tilted(int n, int ell, double p_block, double p, Rng& rng,
                          std::int64_t* block_edges) {
  Graph g(n);
  std::int64_t present = 0;
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      const bool in_block = j < ell;  // i < j, so j < ell implies both ends
      if (rng.uniform01() < (in_block ? p_block : p)) {
        g.add_edge(i, j);
        if (in_block) ++present;
      }
    }
  }
  *block_edges = present;
  return g;
}

double interpolated_quantile(const std::vector<double>& sorted, double pos01) {
  if (sorted.empty()) return 0.0;
  if (sorted.size() == 1) return sorted.front();
  const double pos = pos01 * static_cast<double>(sorted.size() - 1);
  const std::size_t lo = static_cast<std::size_t>(pos);
  if (lo + 1 >= sorted.size()) return sorted.back();
  const double frac = pos - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[lo + 1] - sorted[lo]);
}

Quartiles make_quartiles(std::vector<double> values) {
  std::sort(values.begin(), values.end());
  Quartiles q;
  q.q25 = interpolated_quantile(values, 0.25);
  q.median = interpolated_quantile(values, 0.50);
  q.q75 = interpolated_quantile(values, 0.75);
  return q;
}

using boost::multiprecision::cpp_int;

cpp_int big_binomial(std::int64_t n, std::int64_t k) {
  if (k < 0 || k > n) return 0;
  k = std::min(k, n - k);
  cpp_int res = 1;
  for (std::int64_t i = 1; i <= k; ++i) {
    res *= n - k + i;
    res /= i;  // exact: res is C(n-k+i, i) * i! / i! at each step
  }
  return res;
}

}  // namespace

PlantedConfig make_planted_config(int n, double p, double t) {
  if (n < 1) throw std::invalid_argument("planted config: n must be positive");
  if (!(p > 0.0 && p < 1.0)) throw std::invalid_argument("planted config: p must lie in (0,1)");
  if (!(t >= 0.0 && t < p * p * p)) {
    throw std::invalid_argument("planted config: t must lie in [0, p^3)");
  }
  PlantedConfig cfg;
  cfg.n = n;
  cfg.p = p;
  cfg.t = t;
  cfg.v = Eigen::VectorXd::Zero(n);
  if (t == 0.0) {
    cfg.tilted_edge_prob = p;
    return cfg;
  }
  const double target = std::pow(t, 2.0 / 3.0) * static_cast<double>(n) * static_cast<double>(n);
  cfg.scale_target = target;
  const auto law = EdgeDistribution::centered_bernoulli(1.0 - p);
  cfg.s_star = rate_constant_positive(law).minimizer;

  // Optimal-tilt block size; the norm constraint |v|^2 = ell/(ell-1) <= 1.05
  // forces ell >= 21, and when the minimizer sits at 0 (p <= 1/2) the block
  // is capped well below n so part of the graph stays untilted.
  std::int64_t ell;
  if (cfg.s_star > 1e-9) {
    const double raw = std::ceil(1.0 + std::sqrt(target) / cfg.s_star);
    ell = raw < 1e18 ? static_cast<std::int64_t>(raw) : std::numeric_limits<std::int64_t>::max();
  } else {
    ell = std::numeric_limits<std::int64_t>::max();
  }
  if (ell > n) ell = std::max<std::int64_t>(21, (2 * static_cast<std::int64_t>(n) + 2) / 3);
  ell = std::max<std::int64_t>(ell, 21);
  if (ell > n) {
    throw std::invalid_argument("planted config: block does not fit (need n >= 21)");
  }
  cfg.ell = static_cast<int>(ell);
  cfg.s_effective = std::sqrt(target) / static_cast<double>(ell - 1);

  const double coord = std::sqrt(cfg.s_effective) * std::pow(target, -0.25);
  for (int i = 0; i < cfg.ell; ++i) cfg.v[i] = coord;
  const double norm2 = cfg.v.squaredNorm();
  if (norm2 > 1.05 + 1e-12) {
    throw std::invalid_argument("planted config: direction norm exceeds tolerance");
  }

  // Exponential tilt of the centered edge law at s_effective, expressed as
  // the new edge probability: p' = p / (p + (1-p) e^s).
  cfg.tilted_edge_prob = p / (p + (1.0 - p) * std::exp(cfg.s_effective));
  return cfg;
}

Eigen::MatrixXd planted_matrix(int n, const std::vector<int>& block_sizes, double tilt) {
  if (n < 0) throw std::invalid_argument("planted matrix: n must be nonnegative");
  std::int64_t used = 0;
  for (int sz : block_sizes) {
    if (sz < 1) throw std::invalid_argument("planted matrix: block sizes must be positive");
    used += sz;
  }
  if (used > n) throw std::invalid_argument("planted matrix: blocks exceed n");
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
  int offset = 0;
  for (int sz : block_sizes) {
    for (int i = offset; i < offset + sz; ++i) {
      for (int j = offset; j < offset + sz; ++j) {
        if (i != j) m(i, j) = tilt;
      }
    }
    offset += sz;
  }
  return m;
}

namespace {

TailEstimate run_tail_estimate(GraphModel model, int n, double m_or_p, double t,
                               std::int64_t n_samples, std::uint64_t seed, int threads,
                               Estimator kind) {
  if (n < 3) throw std::invalid_argument("tail estimate: n must be at least 3");
  if (n_samples < 2) throw std::invalid_argument("tail estimate: need at least 2 samples");
  if (threads < 1) throw std::invalid_argument("tail estimate: threads must be positive");
  std::int64_t m = -1;
  const double p = resolve_density(model, n, m_or_p, &m);
  if (!(t >= 0.0 && t < p * p * p)) {
    throw std::invalid_argument("tail estimate: t must lie in [0, p^3)");
  }

  const std::int64_t pilot = pilot_size(n_samples);
  const double tau_ref = pilot_reference(model, n, p, m, pilot, seed, threads);

  int ell = 0;
  double p_block = p;
  double log_present = 0.0;  // ln(p / p') per block edge present
  double log_absent = 0.0;   // ln((1-p) / (1-p')) per block edge absent
  if (kind == Estimator::tilted) {
    const PlantedConfig cfg = make_planted_config(n, p, t);
    ell = cfg.ell;
    p_block = cfg.tilted_edge_prob;
    if (p_block != p) {
      log_present = std::log(p / p_block);
      log_absent = std::log((1.0 - p) / (1.0 - p_block));
    }
  }
  const std::int64_t block_pairs = pair_count(ell);
  const bool tilt_active = ell > 0 && (log_present != 0.0 || log_absent != 0.0);

  std::vector<double> wh(n_samples), wh2(n_samples), wabs(n_samples);
  parallel_for(n_samples, threads, [&](std::int64_t i) {
    Rng rng = Rng::for_replica(seed, static_cast<std::uint64_t>(pilot + i));
    double w = 1.0, labs = 0.0;
    Graph g(1);
    if (tilt_active) {
      std::int64_t present = 0;
      g = sample_block_tilted(n, ell, p_block, p, rng, &present);
      const double lw = static_cast<double>(present) * log_present +
                        static_cast<double>(block_pairs - present) * log_absent;
      w = std::exp(lw);
      labs = std::abs(lw);
    } else {
      g = sample_model(model, n, p, m, rng);
    }
    const bool hit = triangle_density(g) <= tau_ref - t;
    const double x = hit ? w : 0.0;
    wh[static_cast<std::size_t>(i)] = x;
    wh2[static_cast<std::size_t>(i)] = x * x;
    wabs[static_cast<std::size_t>(i)] = labs;
  });

  const double total = pairwise_sum(wh);
  const double total2 = pairwise_sum(wh2);
  const double mu = total / static_cast<double>(n_samples);
  const double m2 = total2 / static_cast<double>(n_samples);

  TailEstimate out;
  out.n_samples = n_samples;
  out.estimator = kind;
  out.theoretical_exponent = t > 0.0 ? triangle_exponent(p, t, n).exponent : 0.0;
  out.max_abs_log_weight = *std::max_element(wabs.begin(), wabs.end());
  out.effective_sample_size = total2 > 0.0 ? total * total / total2 : 0.0;
  if (!(mu > 0.0) || !std::isfinite(mu)) {
    out.degenerate = true;
    out.log_prob = -kInf;
    return out;
  }
  out.log_prob = std::log(mu);
  const double var =
      std::max(0.0, m2 - mu * mu) * static_cast<double>(n_samples) /
      static_cast<double>(n_samples - 1);
  out.stderr_log = std::sqrt(var / static_cast<double>(n_samples)) / mu;
  if (model == GraphModel::gnm && kind == Estimator::tilted) {
    out.log_prob_lower = out.log_prob + log_binomial_pmf(pair_count(n), m, p);
  }
  return out;
}

}  // namespace

TailEstimate naive_tail_estimate(GraphModel model, int n, double m_or_p, double t,
                                 std::int64_t n_samples, std::uint64_t seed, int threads) {
  return run_tail_estimate(model, n, m_or_p, t, n_samples, seed, threads, Estimator::naive);
}

TailEstimate tilted_tail_estimate(GraphModel model, int n, double m_or_p, double t,
                                  std::int64_t n_samples, std::uint64_t seed, int threads) {
  return run_tail_estimate(model, n, m_or_p, t, n_samples, seed, threads, Estimator::tilted);
}

double deficit_quantile(GraphModel model, int n, double m_or_p, double quantile,
                        std::int64_t n_samples, std::uint64_t seed, int threads) {
  if (n < 3) throw std::invalid_argument("deficit quantile: n must be at least 3");
  if (!(quantile > 0.0 && quantile < 1.0)) {
    throw std::invalid_argument("deficit quantile: quantile must lie in (0,1)");
  }
  if (n_samples < 2) throw std::invalid_argument("deficit quantile: need at least 2 samples");
  std::int64_t m = -1;
  const double p = resolve_density(model, n, m_or_p, &m);
  std::vector<double> tau(n_samples);
  parallel_for(n_samples, threads, [&](std::int64_t i) {
    Rng rng = Rng::for_replica(seed, static_cast<std::uint64_t>(i));
    const Graph g = sample_model(model, n, p, m, rng);
    tau[static_cast<std::size_t>(i)] = triangle_density(g);
  });
  const double ref = pairwise_sum(tau) / static_cast<double>(n_samples);
  std::vector<double> deficit(tau.size());
  for (std::size_t i = 0; i < tau.size(); ++i) deficit[i] = ref - tau[i];
  std::sort(deficit.begin(), deficit.end());
  return interpolated_quantile(deficit, 1.0 - quantile);
}

CramerCheck cramer_check(const EdgeDistribution& dist, std::int64_t m, double s) {
  if (m < 1) throw std::invalid_argument("cramer check: m must be positive");
  const auto rate = dist.legendre(s);
  if (!rate.has_value()) {
    throw std::invalid_argument("cramer check: s lies outside the open support hull");
  }
  const auto& atoms = dist.atoms();
  const int k = static_cast<int>(atoms.size());
  const double log_terms = log_binomial_coefficient(m + k - 1, k - 1);
  if (log_terms > std::log(2.1e7)) {
    throw std::invalid_argument("cramer check: support too large for exact enumeration");
  }

  // Exact tail: walk every composition (c_1, ..., c_k) of m over the atoms
  // and log-sum-exp the multinomial masses whose total value exceeds m*s.
  // The tolerance only guards float noise; consecutive sums differ by atom
  // gaps, many orders of magnitude larger.
  const double threshold = static_cast<double>(m) * s;
  const double tol = 1e-9 * (1.0 + std::abs(threshold));
  const double lg_m = std::lgamma(static_cast<double>(m) + 1.0);
  double acc = -kInf;
  auto add = [&acc](double x) {
    if (x == -kInf) return;
    if (x > acc) {
      acc = x + std::log1p(acc == -kInf ? 0.0 : std::exp(acc - x));
    } else {
      acc += std::log1p(std::exp(x - acc));
    }
  };
  // recurse over atom counts; `rem` copies left to distribute
  auto walk = [&](auto&& self, int idx, std::int64_t rem, double value, double lp) -> void {
    if (idx == k - 1) {
      const double v = value + static_cast<double>(rem) * atoms[idx].value;
      if (v > threshold + tol) {
        add(lp + static_cast<double>(rem) * std::log(atoms[idx].prob) -
            std::lgamma(static_cast<double>(rem) + 1.0));
      }
      return;
    }
    for (std::int64_t c = 0; c <= rem; ++c) {
      self(self, idx + 1, rem - c,
           value + static_cast<double>(c) * atoms[idx].value,
           lp + static_cast<double>(c) * std::log(atoms[idx].prob) -
               std::lgamma(static_cast<double>(c) + 1.0));
    }
  };
  walk(walk, 0, m, 0.0, lg_m);

  CramerCheck out;
  out.empirical = acc / static_cast<double>(m);
  out.limit = -rate.value();
  out.gap = std::abs(out.empirical - out.limit);
  return out;
}

double hypergeo_binom_gap(std::int64_t population, std::int64_t successes,
                          std::int64_t trials, std::int64_t s_value) {
  if (population < 1) throw std::invalid_argument("hypergeo gap: population must be positive");
  if (successes < 0 || successes > population) {
    throw std::invalid_argument("hypergeo gap: successes out of range");
  }
  if (trials < 1 || trials > population) {
    throw std::invalid_argument("hypergeo gap: trials out of range");
  }
  if (s_value < 0 || s_value > trials) {
    throw std::invalid_argument("hypergeo gap: value out of range");
  }
  if (s_value > successes || trials - s_value > population - successes) {
    throw std::invalid_argument("hypergeo gap: zero-probability value");
  }

  // Both pmfs as exact rationals; identical distributions (trials = 1, or
  // degenerate populations) then give a gap of exactly zero.
  using boost::multiprecision::pow;
  const cpp_int h_num = big_binomial(successes, s_value) *
                        big_binomial(population - successes, trials - s_value) *
                        pow(cpp_int(population), static_cast<unsigned>(trials));
  const cpp_int h_den = big_binomial(population, trials) * big_binomial(trials, s_value) *
                        pow(cpp_int(successes), static_cast<unsigned>(s_value)) *
                        pow(cpp_int(population - successes),
                            static_cast<unsigned>(trials - s_value));
  if (h_num == h_den) return 0.0;
  using Float = boost::multiprecision::cpp_bin_float_50;
  const Float diff = log(Float(h_num)) - log(Float(h_den));
  return std::abs(diff.convert_to<double>());
}

StructureReport conditional_structure_report(GraphModel model, int n, double m_or_p,
                                             double quantile, std::int64_t n_samples,
                                             std::uint64_t seed, int threads,
                                             double spectral_cap) {
  if (n < 3) throw std::invalid_argument("structure report: n must be at least 3");
  if (!(quantile > 0.0 && quantile <= 1.0)) {
    throw std::invalid_argument("structure report: quantile must lie in (0,1]");
  }
  if (n_samples < 2) throw std::invalid_argument("structure report: need at least 2 samples");
  if (!(spectral_cap > 0.0)) {
    throw std::invalid_argument("structure report: spectral cap must be positive");
  }
  std::int64_t m = -1;
  const double p = resolve_density(model, n, m_or_p, &m);
  const double n3 = std::pow(static_cast<double>(n), 3.0);

  // Phase 1: unconditioned deficits calibrate the acceptance threshold.
  std::vector<double> tau(n_samples);
  parallel_for(n_samples, threads, [&](std::int64_t i) {
    Rng rng = Rng::for_replica(seed, static_cast<std::uint64_t>(i));
    const Graph g = sample_model(model, n, p, m, rng);
    tau[static_cast<std::size_t>(i)] = triangle_density(g);
  });
  const double tau_ref = pairwise_sum(tau) / static_cast<double>(n_samples);
  std::vector<double> deficits(tau.size());
  for (std::size_t i = 0; i < tau.size(); ++i) deficits[i] = tau_ref - tau[i];
  std::sort(deficits.begin(), deficits.end());
  const double threshold = interpolated_quantile(deficits, 1.0 - quantile);

  StructureReport report;
  report.pilot_samples = n_samples;
  report.rejection_samples = n_samples;
  report.threshold_deficit = threshold;
  report.spectral_cap = spectral_cap;

  // Phase 2: fresh replicas, keep those at or beyond the threshold.
  const double split_at = -std::sqrt(spectral_cap * static_cast<double>(n));
  const double degree_denom = std::max(threshold, 1e-12) * n3;
  const double mean_degree = p * static_cast<double>(n);
  struct Row {
    double min_share, second_share, extreme_share, bulk_share, degree_stat;
  };
  std::vector<char> accepted(n_samples, 0);
  std::vector<Row> rows(n_samples);
  parallel_for(n_samples, threads, [&](std::int64_t i) {
    Rng rng = Rng::for_replica(seed, static_cast<std::uint64_t>(n_samples + i));
    const Graph g = sample_model(model, n, p, m, rng);
    const double deficit = tau_ref - triangle_density(g);
    if (!(deficit >= threshold && deficit > 0.0)) return;
    accepted[static_cast<std::size_t>(i)] = 1;
    const auto ev = eigenvalues_desc(g.centered_adjacency(p));
    const double denom = deficit * n3;
    const auto split = split_spectrum(ev, split_at);
    Row row;
    const double low = ev.back();
    const double second = ev[ev.size() - 2];
    row.min_share = -(low * low * low) / denom;
    row.second_share = -(second * second * second) / denom;
    row.extreme_share = -split.extreme_cube_sum / denom;
    row.bulk_share = -split.bulk_cube_sum / denom;
    double dev2 = 0.0;
    for (std::int64_t d : g.degrees()) {
      const double dd = static_cast<double>(d) - mean_degree;
      dev2 += dd * dd;
    }
    row.degree_stat = dev2 / degree_denom;
    rows[static_cast<std::size_t>(i)] = row;
  });

  std::vector<double> mins, seconds, extremes, bulks, degs;
  for (std::int64_t i = 0; i < n_samples; ++i) {
    if (!accepted[static_cast<std::size_t>(i)]) continue;
    const Row& row = rows[static_cast<std::size_t>(i)];
    mins.push_back(row.min_share);
    seconds.push_back(row.second_share);
    extremes.push_back(row.extreme_share);
    bulks.push_back(row.bulk_share);
    degs.push_back(row.degree_stat);
  }
  report.accepted = static_cast<std::int64_t>(mins.size());
  if (report.accepted == 0) {
    report.degenerate = true;
    return report;
  }
  report.min_eigenvalue_share = make_quartiles(std::move(mins));
  report.second_eigenvalue_share = make_quartiles(std::move(seconds));
  report.extreme_share = make_quartiles(std::move(extremes));
  report.bulk_share = make_quartiles(std::move(bulks));
  report.degree_statistic = make_quartiles(std::move(degs));
  return report;
}

double log_binomial_coefficient(std::int64_t n, std::int64_t k) {
  if (n < 0 || k < 0 || k > n) {
    throw std::invalid_argument("log binomial: need 0 <= k <= n");
  }
  return std::lgamma(static_cast<double>(n) + 1.0) -
         std::lgamma(static_cast<double>(k) + 1.0) -
         std::lgamma(static_cast<double>(n - k) + 1.0);
}

double log_binomial_pmf(std::int64_t n, std::int64_t k, double p) {
  if (!(p > 0.0 && p < 1.0)) throw std::invalid_argument("log binomial pmf: p must lie in (0,1)");
  return log_binomial_coefficient(n, k) + static_cast<double>(k) * std::log(p) +
         static_cast<double>(n - k) * std::log1p(-p);
}

}  // namespace trilab
