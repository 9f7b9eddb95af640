#pragma once

#include <optional>
#include <vector>

namespace trilab {

struct Atom {
  double value = 0.0;
  double prob = 0.0;
};

// Finite-support, mean-zero law of a single centered edge variable.
//
// The centered Bernoulli(q) law takes value 1-q with probability q and -q
// with probability 1-q; it gets a dedicated flag because several downstream
// quantities have closed forms for it.
class EdgeDistribution {
 public:
  static EdgeDistribution centered_bernoulli(double q);

  // General finite-support constructor.  Probabilities must be positive and
  // sum to 1 (1e-12), the mean must vanish (1e-12), and at least two
  // distinct values are required.  Duplicate values are merged.
  static EdgeDistribution from_atoms(std::vector<Atom> atoms);

  // Log moment generating function ln E exp(s*X).  Stable for small |s|
  // (expm1/log1p path on the centered atoms) and large |s| (max-shifted).
  double cgf(double s) const;

  // First derivative of cgf: the mean under the exponential tilt at s.
  double cgf_derivative(double s) const;

  // Second/third derivatives: central moments under the tilt at s.
  double cgf_second_derivative(double s) const;
  double cgf_third_derivative(double s) const;

  // Convex conjugate sup_x { x*u - cgf(x) }.  Returns nullopt (the
  // +infinity sentinel) when u lies outside the open support hull.
  std::optional<double> legendre(double u) const;

  double variance() const { return k2_; }
  double third_moment() const { return k3_; }          // E X^3
  double fourth_cumulant() const { return k4_; }       // E X^4 - 3 (E X^2)^2

  double min_value() const { return atoms_.front().value; }
  double max_value() const { return atoms_.back().value; }
  double min_value_prob() const { return atoms_.front().prob; }
  double max_value_prob() const { return atoms_.back().prob; }

  bool is_bernoulli() const { return bernoulli_; }
  double bernoulli_q() const;

  const std::vector<Atom>& atoms() const { return atoms_; }

  // legendre(u) / u^2 with the removable singularity at u = 0 filled by
  // continuity (1 / (2 Var)); series-based near 0 so the optimizers see a
  // smooth function.  Requires u in the open hull or u == 0.
  double legendre_ratio(double u) const;

  // cgf(s) / s^2, value at 0 filled by continuity (Var / 2).
  double cgf_ratio(double s) const;

 private:
  EdgeDistribution() = default;
  void finalize_moments();

  std::vector<Atom> atoms_;  // sorted by value
  bool bernoulli_ = false;
  double q_ = 0.0;
  double k2_ = 0.0, k3_ = 0.0, k4_ = 0.0;
};

// Output of the variational rate computation for one entry law.
struct RateFunctionResult {
  double rate_constant = 0.0;     // inf_s legendre(s) / s^2
  double minimizer = 0.0;         // argmin of the ratio (0 when the inf is the s->0 limit)
  double subg_constant = 0.0;     // sup_s cgf(s) / s^2
  double duality_residual = 0.0;  // |4 * subg_constant * rate_constant - 1|
};

RateFunctionResult rate_constant(const EdgeDistribution& dist);

// Same infimum restricted to s > 0 (with the s->0 limit as a candidate);
// used by the one-sided tail bounds.
struct PositiveRateResult {
  double rate_constant = 0.0;
  double minimizer = 0.0;
};

PositiveRateResult rate_constant_positive(const EdgeDistribution& dist);

// Predicted log-probability scale of a lower-tail triangle deviation of
// relative size t in a density-p random graph on n vertices.
struct TriangleExponent {
  double exponent = 0.0;           // (upper_coefficient / 2) * t^(2/3) * n^2
  double upper_coefficient = 0.0;  // rate constant of the centered Bernoulli(1-p) law
  std::optional<double> lower_coefficient;  // 1 / (2 p (1-p)), present for p <= 1/2
};

TriangleExponent triangle_exponent(double p, double t, int n);

}  // namespace trilab
