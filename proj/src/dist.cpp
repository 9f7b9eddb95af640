#include "trilab/dist.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <utility>

namespace trilab {
namespace {

constexpr double kProbSumTol = 1e-12;
constexpr double kMeanTol = 1e-12;

// Golden-section minimization; f must be unimodal on [a, b] for the result
// to be the true minimum, otherwise it still returns some local minimum.
template <typename F>
std::pair<double, double> golden_min(F&& f, double a, double b, double tol) {
  const double invphi = (std::sqrt(5.0) - 1.0) / 2.0;
  double x1 = b - invphi * (b - a);
  double x2 = a + invphi * (b - a);
  double f1 = f(x1);
  double f2 = f(x2);
  for (int iter = 0; iter < 300 && (b - a) > tol; ++iter) {
    if (f1 <= f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - invphi * (b - a);
      f1 = f(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + invphi * (b - a);
      f2 = f(x2);
    }
  }
  double xm = 0.5 * (a + b);
  double fm = f(xm);
  if (f1 < fm) {
    xm = x1;
    fm = f1;
  }
  if (f2 < fm) {
    xm = x2;
    fm = f2;
  }
  return {xm, fm};
}

}  // namespace

EdgeDistribution EdgeDistribution::centered_bernoulli(double q) {
  if (!(q > 0.0 && q < 1.0)) {
    throw std::invalid_argument("centered_bernoulli: q must lie in (0,1)");
  }
  EdgeDistribution d;
  d.atoms_ = {{-q, 1.0 - q}, {1.0 - q, q}};
  d.bernoulli_ = true;
  d.q_ = q;
  d.finalize_moments();
  return d;
}

EdgeDistribution EdgeDistribution::from_atoms(std::vector<Atom> atoms) {
  if (atoms.size() < 2) {
    throw std::invalid_argument("from_atoms: need at least two atoms");
  }
  std::sort(atoms.begin(), atoms.end(),
            [](const Atom& a, const Atom& b) { return a.value < b.value; });
  double scale = std::max(std::abs(atoms.front().value), std::abs(atoms.back().value));
  std::vector<Atom> merged;
  for (const Atom& a : atoms) {
    if (!(a.prob > 0.0)) {
      throw std::invalid_argument("from_atoms: probabilities must be positive");
    }
    if (!merged.empty() && a.value - merged.back().value <= 1e-12 * std::max(1.0, scale)) {
      merged.back().prob += a.prob;
    } else {
      merged.push_back(a);
    }
  }
  if (merged.size() < 2) {
    throw std::invalid_argument("from_atoms: need at least two distinct values");
  }
  double psum = 0.0;
  double mean = 0.0;
  for (const Atom& a : merged) {
    psum += a.prob;
    mean += a.prob * a.value;
  }
  if (std::abs(psum - 1.0) > kProbSumTol) {
    throw std::invalid_argument("from_atoms: probabilities must sum to 1");
  }
  if (std::abs(mean) > kMeanTol * std::max(1.0, scale)) {
    throw std::invalid_argument("from_atoms: law must have zero mean");
  }
  EdgeDistribution d;
  d.atoms_ = std::move(merged);
  d.finalize_moments();
  return d;
}

void EdgeDistribution::finalize_moments() {
  double m2 = 0.0, m3 = 0.0, m4 = 0.0;
  for (const Atom& a : atoms_) {
    const double v2 = a.value * a.value;
    m2 += a.prob * v2;
    m3 += a.prob * v2 * a.value;
    m4 += a.prob * v2 * v2;
  }
  k2_ = m2;
  k3_ = m3;
  k4_ = m4 - 3.0 * m2 * m2;
}

double EdgeDistribution::bernoulli_q() const {
  if (!bernoulli_) {
    throw std::logic_error("bernoulli_q: not a centered Bernoulli law");
  }
  return q_;
}

double EdgeDistribution::cgf(double s) const {
  double smax = -std::numeric_limits<double>::infinity();
  for (const Atom& a : atoms_) smax = std::max(smax, s * a.value);
  if (smax <= 30.0) {
    // E exp(sX) = 1 + sum p_i expm1(s v_i); the sum is O(s^2) near 0 because
    // the law is centered, so log1p keeps full relative accuracy.
    double acc = 0.0;
    for (const Atom& a : atoms_) acc += a.prob * std::expm1(s * a.value);
    return std::log1p(acc);
  }
  double acc = 0.0;
  for (const Atom& a : atoms_) acc += a.prob * std::exp(s * a.value - smax);
  return smax + std::log(acc);
}

double EdgeDistribution::cgf_derivative(double s) const {
  double smax = -std::numeric_limits<double>::infinity();
  for (const Atom& a : atoms_) smax = std::max(smax, s * a.value);
  if (smax <= 30.0) {
    // Numerator uses sum p_i v_i = 0: sum p_i v_i exp(s v_i) equals
    // sum p_i v_i expm1(s v_i), which is O(s) instead of a difference of
    // O(1) terms.
    double num = 0.0;
    double den = 0.0;
    for (const Atom& a : atoms_) {
      const double e = std::expm1(s * a.value);
      num += a.prob * a.value * e;
      den += a.prob * e;
    }
    return num / (1.0 + den);
  }
  double num = 0.0, den = 0.0;
  for (const Atom& a : atoms_) {
    const double w = a.prob * std::exp(s * a.value - smax);
    num += w * a.value;
    den += w;
  }
  return num / den;
}

double EdgeDistribution::cgf_second_derivative(double s) const {
  double smax = -std::numeric_limits<double>::infinity();
  for (const Atom& a : atoms_) smax = std::max(smax, s * a.value);
  double den = 0.0, mean = 0.0;
  for (const Atom& a : atoms_) {
    const double w = a.prob * std::exp(s * a.value - smax);
    den += w;
    mean += w * a.value;
  }
  mean /= den;
  double var = 0.0;
  for (const Atom& a : atoms_) {
    const double w = a.prob * std::exp(s * a.value - smax);
    const double c = a.value - mean;
    var += w * c * c;
  }
  return var / den;
}

double EdgeDistribution::cgf_third_derivative(double s) const {
  double smax = -std::numeric_limits<double>::infinity();
  for (const Atom& a : atoms_) smax = std::max(smax, s * a.value);
  double den = 0.0, mean = 0.0;
  for (const Atom& a : atoms_) {
    const double w = a.prob * std::exp(s * a.value - smax);
    den += w;
    mean += w * a.value;
  }
  mean /= den;
  double m3 = 0.0;
  for (const Atom& a : atoms_) {
    const double w = a.prob * std::exp(s * a.value - smax);
    const double c = a.value - mean;
    m3 += w * c * c * c;
  }
  return m3 / den;
}

namespace {

// Relative entropy D(r || q) between Bernoulli parameters, divided by
// (r - q)^2.  The direct formula loses all precision for small |r - q|
// (both log terms are O(u) and cancel to an O(u^2) result), so a power
// series in u = r - q takes over there:
//   D(q+u, q) / u^2 = sum_{k>=0} u^k / ((k+1)(k+2)) *
//                     ((-1)^k / q^{k+1} + 1 / (1-q)^{k+1}).
double bernoulli_divergence_ratio(double q, double u) {
  const double band = 0.08 * std::min(q, 1.0 - q);
  if (std::abs(u) <= band) {
    double acc = 0.0;
    double upow = 1.0;
    double qpow = 1.0 / q;
    double ppow = 1.0 / (1.0 - q);
    double sign = 1.0;
    int tiny_streak = 0;
    for (int k = 0; k < 80; ++k) {
      const double term = upow / ((k + 1.0) * (k + 2.0)) * (sign * qpow + ppow);
      acc += term;
      // Odd terms vanish identically for q = 1/2, so insist on two
      // negligible terms in a row before truncating.
      tiny_streak = (std::abs(term) < 1e-17 * std::abs(acc)) ? tiny_streak + 1 : 0;
      if (tiny_streak >= 2) break;
      upow *= u;
      qpow /= q;
      ppow /= (1.0 - q);
      sign = -sign;
    }
    return acc;
  }
  const double r = q + u;
  const double d = r * std::log1p(u / q) + (1.0 - r) * std::log1p(-u / (1.0 - q));
  return d / (u * u);
}

}  // namespace

double EdgeDistribution::legendre_ratio(double u) const {
  if (bernoulli_) {
    return bernoulli_divergence_ratio(q_, u);
  }
  const double sigma = std::sqrt(k2_);
  if (std::abs(u) <= 1e-4 * sigma) {
    // Quartic expansion of the conjugate around 0 in terms of cumulants.
    const double c0 = 1.0 / (2.0 * k2_);
    const double c1 = -k3_ / (6.0 * k2_ * k2_ * k2_);
    const double c2 = k3_ * k3_ / (8.0 * std::pow(k2_, 5)) - k4_ / (24.0 * std::pow(k2_, 4));
    return c0 + c1 * u + c2 * u * u;
  }
  // Solve cgf'(x) = u by bisection (cgf' is strictly increasing), then
  // evaluate the conjugate at the stationary point; first-order error in x
  // only perturbs the value at second order.
  double lo = 0.0, hi = 0.0;
  if (u > 0.0) {
    hi = 1.0;
    while (cgf_derivative(hi) < u && hi < 1e8) hi *= 2.0;
  } else {
    lo = -1.0;
    while (cgf_derivative(lo) > u && lo > -1e8) lo *= 2.0;
  }
  for (int iter = 0; iter < 200; ++iter) {
    const double mid = 0.5 * (lo + hi);
    if (mid == lo || mid == hi) break;
    if (cgf_derivative(mid) < u) {
      lo = mid;
    } else {
      hi = mid;
    }
    if (hi - lo <= 1e-15 * (std::abs(lo) + std::abs(hi) + 1.0)) break;
  }
  const double x = 0.5 * (lo + hi);
  return (x * u - cgf(x)) / (u * u);
}

std::optional<double> EdgeDistribution::legendre(double u) const {
  if (!(u > min_value() && u < max_value())) {
    if (u == 0.0) return 0.0;
    return std::nullopt;
  }
  if (u == 0.0) return 0.0;
  return legendre_ratio(u) * u * u;
}

double EdgeDistribution::cgf_ratio(double s) const {
  double vscale = std::max(std::abs(min_value()), std::abs(max_value()));
  if (std::abs(s) * vscale <= 1e-4) {
    // cgf(s)/s^2 = k2/2 + k3 s/6 + k4 s^2/24 + O(s^3)
    return 0.5 * k2_ + k3_ * s / 6.0 + k4_ * s * s / 24.0;
  }
  return cgf(s) / (s * s);
}

RateFunctionResult rate_constant(const EdgeDistribution& dist) {
  const double vmin = dist.min_value();
  const double vmax = dist.max_value();
  const double width = vmax - vmin;
  const double lo = vmin + 1e-9 * width;
  const double hi = vmax - 1e-9 * width;

  const auto ratio = [&dist](double u) { return dist.legendre_ratio(u); };

  const int kGrid = 2001;
  double best_u = 0.0;
  double best_v = std::numeric_limits<double>::infinity();
  int best_i = -1;
  for (int i = 0; i < kGrid; ++i) {
    const double u = lo + (hi - lo) * i / (kGrid - 1.0);
    const double v = ratio(u);
    if (v < best_v) {
      best_v = v;
      best_u = u;
      best_i = i;
    }
  }
  {
    const double a = lo + (hi - lo) * std::max(0, best_i - 1) / (kGrid - 1.0);
    const double b = lo + (hi - lo) * std::min(kGrid - 1, best_i + 1) / (kGrid - 1.0);
    auto [xu, xv] = golden_min(ratio, a, b, 1e-10 * width);
    if (xv < best_v) {
      best_v = xv;
      best_u = xu;
    }
  }
  // Exact candidates: the s -> 0 limit and the two hull endpoints, where the
  // conjugate equals -ln(mass at the endpoint).
  if (const double limit0 = ratio(0.0); limit0 < best_v) {
    best_v = limit0;
    best_u = 0.0;
  }
  if (const double at_max = -std::log(dist.max_value_prob()) / (vmax * vmax); at_max < best_v) {
    best_v = at_max;
    best_u = vmax;
  }
  if (const double at_min = -std::log(dist.min_value_prob()) / (vmin * vmin); at_min < best_v) {
    best_v = at_min;
    best_u = vmin;
  }

  // sup_s cgf(s)/s^2 with an adaptive range: keep widening until the argmax
  // sits well inside the window.
  const auto neg_cgf_ratio = [&dist](double s) { return -dist.cgf_ratio(s); };
  double range = 8.0 / std::max(1.0, std::max(std::abs(vmin), std::abs(vmax)));
  double sup_s = 0.0;
  double sup_v = -std::numeric_limits<double>::infinity();
  for (int round = 0; round < 12; ++round) {
    sup_v = -std::numeric_limits<double>::infinity();
    int arg_i = 0;
    for (int i = 0; i < kGrid; ++i) {
      const double s = -range + 2.0 * range * i / (kGrid - 1.0);
      const double v = dist.cgf_ratio(s);
      if (v > sup_v) {
        sup_v = v;
        sup_s = s;
        arg_i = i;
      }
    }
    if (std::abs(sup_s) < 0.8 * range || range > 1e7) {
      const double step = 2.0 * range / (kGrid - 1.0);
      const double a = -range + step * std::max(0, arg_i - 1);
      const double b = -range + step * std::min(kGrid - 1, arg_i + 1);
      auto [xs, xv] = golden_min(neg_cgf_ratio, a, b, 1e-10 * range);
      if (-xv > sup_v) {
        sup_v = -xv;
        sup_s = xs;
      }
      break;
    }
    range *= 4.0;
  }
  if (const double limit0 = dist.cgf_ratio(0.0); limit0 > sup_v) {
    sup_v = limit0;
    sup_s = 0.0;
  }

  RateFunctionResult out;
  out.rate_constant = best_v;
  out.minimizer = best_u;
  out.subg_constant = sup_v;
  out.duality_residual = std::abs(4.0 * sup_v * best_v - 1.0);
  return out;
}

PositiveRateResult rate_constant_positive(const EdgeDistribution& dist) {
  const double vmax = dist.max_value();
  const double width = vmax - dist.min_value();
  const double lo = 1e-6 * width;
  const double hi = vmax - 1e-9 * width;

  const auto ratio = [&dist](double u) { return dist.legendre_ratio(u); };

  PositiveRateResult out;
  out.rate_constant = ratio(0.0);  // s -> 0+ limit, 1 / (2 Var)
  out.minimizer = 0.0;

  if (hi <= lo) return out;
  const int kGrid = 2001;
  double best_u = lo;
  double best_v = std::numeric_limits<double>::infinity();
  int best_i = 0;
  for (int i = 0; i < kGrid; ++i) {
    const double u = lo + (hi - lo) * i / (kGrid - 1.0);
    const double v = ratio(u);
    if (v < best_v) {
      best_v = v;
      best_u = u;
      best_i = i;
    }
  }
  {
    const double a = lo + (hi - lo) * std::max(0, best_i - 1) / (kGrid - 1.0);
    const double b = lo + (hi - lo) * std::min(kGrid - 1, best_i + 1) / (kGrid - 1.0);
    auto [xu, xv] = golden_min(ratio, a, b, 1e-10 * width);
    if (xv < best_v) {
      best_v = xv;
      best_u = xu;
    }
  }
  if (const double at_max = -std::log(dist.max_value_prob()) / (vmax * vmax); at_max < best_v) {
    best_v = at_max;
    best_u = vmax;
  }
  if (best_v < out.rate_constant) {
    out.rate_constant = best_v;
    out.minimizer = best_u;
  }
  return out;
}

TriangleExponent triangle_exponent(double p, double t, int n) {
  if (!(p > 0.0 && p < 1.0)) {
    throw std::invalid_argument("triangle_exponent: p must lie in (0,1)");
  }
  if (!(t >= 0.0)) {
    throw std::invalid_argument("triangle_exponent: t must be nonnegative");
  }
  if (n < 1) {
    throw std::invalid_argument("triangle_exponent: n must be positive");
  }
  const auto dist = EdgeDistribution::centered_bernoulli(1.0 - p);
  const auto rate = rate_constant(dist);
  TriangleExponent out;
  out.upper_coefficient = rate.rate_constant;
  out.exponent = 0.5 * rate.rate_constant * std::pow(t, 2.0 / 3.0) *
                 static_cast<double>(n) * static_cast<double>(n);
  if (p <= 0.5 + 1e-12) {
    out.lower_coefficient = 1.0 / (2.0 * p * (1.0 - p));
  }
  return out;
}

}  // namespace trilab
