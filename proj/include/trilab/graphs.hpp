#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <boost/multiprecision/cpp_int.hpp>

#include "trilab/rng.hpp"

namespace trilab {

using BigInt = boost::multiprecision::cpp_int;

// Simple labelled graph stored as a dense symmetric 0/1 adjacency table.
// Sizes stay small (hundreds of vertices), so O(n^2) storage and O(n^3)
// triangle counting are fine.
class Graph {
 public:
  explicit Graph(int n);

  static Graph sample_gnp(int n, double p, Rng& rng);
  static Graph sample_gnm(int n, std::int64_t m, Rng& rng);

  int order() const { return n_; }
  std::int64_t edge_count() const { return edges_; }

  bool has_edge(int u, int v) const { return adj_[idx(u, v)] != 0; }
  void add_edge(int u, int v);
  void remove_edge(int u, int v);

  std::vector<std::int64_t> degrees() const;
  std::int64_t triangle_count() const;

  // tr A^3 = 6 * (number of triangles)
  std::int64_t adjacency_cube_trace() const { return 6 * triangle_count(); }

  Eigen::MatrixXd adjacency_matrix() const;

  // A - p J + p I: subtract p from every off-diagonal entry, keep the
  // diagonal at zero.
  Eigen::MatrixXd centered_adjacency(double p) const;

  // Canonical text form: "n m" header, then one "u v" line per edge with
  // u < v, sorted lexicographically.  parse(serialize(g)) == g bit for bit.
  std::string serialize() const;
  static Graph parse(const std::string& text);

  bool operator==(const Graph& other) const {
    return n_ == other.n_ && adj_ == other.adj_;
  }

 private:
  std::size_t idx(int u, int v) const;

  int n_ = 0;
  std::int64_t edges_ = 0;
  std::vector<std::uint8_t> adj_;  // row-major n*n, symmetric, zero diagonal
};

// Exact check of the cubic-trace centering identity at rational density
// p = a/b.  Everything is scaled by b^3 so both sides are integers:
//
//   b^3 tr[(A - pJ + pI)^3]
//     = b^3 tr A^3 - a^3 n^3 + a^3 n + 6 m a (n a - 2 a + b) b
//       + 3 a^3 n (n-1) - 3 a b^2 sum_i d_i^2
//
// residual = lhs - rhs, identically zero for every graph.
struct CenteringIdentity {
  BigInt lhs;       // tr[(bA - aJ + aI)^3], i.e. b^3 times the centered trace
  BigInt rhs;       // the right-hand side above, same scaling
  BigInt residual;  // lhs - rhs
};

CenteringIdentity centering_identity(const Graph& g, std::int64_t a, std::int64_t b);

// At the G(n,m) density p = 2m / (n(n-1)), dropping the degree-variance
// term of the identity gives an upper bound:
//
//   tr[(A - pJ + pI)^3] <= tr A^3 - p^3 n^3 + p^3 n + 6 m p
//
// which holds if and only if n sum d_i^2 >= 4 m^2 (Cauchy-Schwarz on the
// degree sequence, so always).  Both sides are reported exactly, scaled by
// b^3 with b = n(n-1).
struct CenteringInequality {
  BigInt lhs;  // b^3 tr[(A - pJ + pI)^3]
  BigInt rhs;  // b^3 (tr A^3 - p^3 n^3 + p^3 n + 6 m p)
  bool inequality_holds = false;
  bool degree_condition_holds = false;  // n sum d_i^2 >= 4 m^2
};

CenteringInequality centering_inequality(const Graph& g);

// Exact squared distance of the degree sequence from regularity at the
// graph's own density: sum_i (d_i - 2m/n)^2 = sum d_i^2 - 4 m^2 / n,
// returned as a rational (numerator, denominator n).
struct DegreeVariance {
  BigInt numerator;    // n sum d_i^2 - 4 m^2
  std::int64_t denominator = 1;  // n
};

DegreeVariance degree_variance(const Graph& g);

}  // namespace trilab
