#include "trilab/graphs.hpp"

#include <algorithm>
#include <sstream>
#include <stdexcept>

namespace trilab {

Graph::Graph(int n) : n_(n) {
  if (n < 1) throw std::invalid_argument("Graph: order must be positive");
  adj_.assign(static_cast<std::size_t>(n) * n, 0);
}

std::size_t Graph::idx(int u, int v) const {
  if (u < 0 || v < 0 || u >= n_ || v >= n_) {
    throw std::out_of_range("Graph: vertex out of range");
  }
  return static_cast<std::size_t>(u) * n_ + v;
}

void Graph::add_edge(int u, int v) {
  if (u == v) throw std::invalid_argument("Graph: no self loops");
  if (adj_[idx(u, v)]) throw std::invalid_argument("Graph: duplicate edge");
  adj_[idx(u, v)] = 1;
  adj_[idx(v, u)] = 1;
  ++edges_;
}

void Graph::remove_edge(int u, int v) {
  if (u == v || !adj_[idx(u, v)]) throw std::invalid_argument("Graph: edge not present");
  adj_[idx(u, v)] = 0;
  adj_[idx(v, u)] = 0;
  --edges_;
}

Graph Graph::sample_gnp(int n, double p, Rng& rng) {
  if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("sample_gnp: p must lie in [0,1]");
  Graph g(n);
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      if (rng.uniform01() < p) g.add_edge(i, j);
    }
  }
  return g;
}

Graph Graph::sample_gnm(int n, std::int64_t m, Rng& rng) {
  const std::int64_t total = static_cast<std::int64_t>(n) * (n - 1) / 2;
  if (m < 0 || m > total) throw std::invalid_argument("sample_gnm: bad edge count");
  std::vector<std::pair<int, int>> pairs;
  pairs.reserve(total);
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) pairs.emplace_back(i, j);
  }
  // Partial Fisher-Yates: the first m slots become a uniform m-subset.
  Graph g(n);
  for (std::int64_t k = 0; k < m; ++k) {
    const std::int64_t j = k + static_cast<std::int64_t>(rng.below(total - k));
    std::swap(pairs[k], pairs[j]);
    g.add_edge(pairs[k].first, pairs[k].second);
  }
  return g;
}

std::vector<std::int64_t> Graph::degrees() const {
  std::vector<std::int64_t> d(n_, 0);
  for (int i = 0; i < n_; ++i) {
    std::int64_t acc = 0;
    for (int j = 0; j < n_; ++j) acc += adj_[static_cast<std::size_t>(i) * n_ + j];
    d[i] = acc;
  }
  return d;
}

std::int64_t Graph::triangle_count() const {
  std::int64_t count = 0;
  for (int i = 0; i < n_; ++i) {
    for (int j = i + 1; j < n_; ++j) {
      if (!adj_[static_cast<std::size_t>(i) * n_ + j]) continue;
      for (int k = j + 1; k < n_; ++k) {
        if (adj_[static_cast<std::size_t>(i) * n_ + k] &&
            adj_[static_cast<std::size_t>(j) * n_ + k]) {
          ++count;
        }
      }
    }
  }
  return count;
}

Eigen::MatrixXd Graph::adjacency_matrix() const {
  Eigen::MatrixXd a(n_, n_);
  for (int i = 0; i < n_; ++i) {
    for (int j = 0; j < n_; ++j) {
      a(i, j) = adj_[static_cast<std::size_t>(i) * n_ + j];
    }
  }
  return a;
}

Eigen::MatrixXd Graph::centered_adjacency(double p) const {
  Eigen::MatrixXd a(n_, n_);
  for (int i = 0; i < n_; ++i) {
    for (int j = 0; j < n_; ++j) {
      a(i, j) = (i == j) ? 0.0 : adj_[static_cast<std::size_t>(i) * n_ + j] - p;
    }
  }
  return a;
}

std::string Graph::serialize() const {
  std::ostringstream out;
  out << n_ << ' ' << edges_ << '\n';
  for (int i = 0; i < n_; ++i) {
    for (int j = i + 1; j < n_; ++j) {
      if (adj_[static_cast<std::size_t>(i) * n_ + j]) out << i << ' ' << j << '\n';
    }
  }
  return out.str();
}

Graph Graph::parse(const std::string& text) {
  std::istringstream in(text);
  int n = 0;
  std::int64_t m = 0;
  if (!(in >> n >> m)) throw std::invalid_argument("Graph::parse: missing header");
  Graph g(n);
  for (std::int64_t e = 0; e < m; ++e) {
    int u = 0, v = 0;
    if (!(in >> u >> v)) throw std::invalid_argument("Graph::parse: truncated edge list");
    g.add_edge(u, v);
  }
  int extra = 0;
  if (in >> extra) throw std::invalid_argument("Graph::parse: trailing data");
  return g;
}

namespace {

// tr(B^3) for a symmetric integer matrix with zero diagonal, exactly.
BigInt cube_trace(const std::vector<std::vector<std::int64_t>>& b) {
  const int n = static_cast<int>(b.size());
  std::vector<std::vector<BigInt>> sq(n, std::vector<BigInt>(n));
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      BigInt acc = 0;
      for (int k = 0; k < n; ++k) acc += BigInt(b[i][k]) * b[k][j];
      sq[i][j] = std::move(acc);
    }
  }
  BigInt tr = 0;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) tr += sq[i][j] * b[j][i];
  }
  return tr;
}

std::vector<std::vector<std::int64_t>> scaled_centered_matrix(const Graph& g,
                                                              std::int64_t a,
                                                              std::int64_t b) {
  const int n = g.order();
  std::vector<std::vector<std::int64_t>> mat(n, std::vector<std::int64_t>(n, 0));
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (i == j) continue;
      mat[i][j] = (g.has_edge(i, j) ? b : 0) - a;
    }
  }
  return mat;
}

}  // namespace

CenteringIdentity centering_identity(const Graph& g, std::int64_t a, std::int64_t b) {
  if (b < 1 || a < 0 || a > b) {
    throw std::invalid_argument("centering_identity: need 0 <= a <= b, b >= 1");
  }
  const int n = g.order();
  const std::int64_t m = g.edge_count();
  BigInt sum_d2 = 0;
  for (std::int64_t d : g.degrees()) sum_d2 += BigInt(d) * d;

  CenteringIdentity out;
  out.lhs = cube_trace(scaled_centered_matrix(g, a, b));

  const BigInt A = a, B = b, N = n, M = m;
  out.rhs = B * B * B * g.adjacency_cube_trace()  //
            - A * A * A * N * N * N               //
            + A * A * A * N                       //
            + 6 * M * A * (N * A - 2 * A + B) * B //
            + 3 * A * A * A * N * (N - 1)         //
            - 3 * A * B * B * sum_d2;
  out.residual = out.lhs - out.rhs;
  return out;
}

CenteringInequality centering_inequality(const Graph& g) {
  const int n = g.order();
  if (n < 2) throw std::invalid_argument("centering_inequality: need at least two vertices");
  const std::int64_t m = g.edge_count();
  const std::int64_t a = 2 * m;          // p = 2m / (n(n-1))
  const std::int64_t b = static_cast<std::int64_t>(n) * (n - 1);

  BigInt sum_d2 = 0;
  for (std::int64_t d : g.degrees()) sum_d2 += BigInt(d) * d;

  CenteringInequality out;
  out.lhs = cube_trace(scaled_centered_matrix(g, a, b));
  const BigInt A = a, B = b, N = n, M = m;
  out.rhs = B * B * B * g.adjacency_cube_trace()  //
            - A * A * A * N * N * N               //
            + A * A * A * N                       //
            + 6 * M * A * B * B;
  out.inequality_holds = out.lhs <= out.rhs;
  out.degree_condition_holds = N * sum_d2 >= 4 * M * M;
  return out;
}

DegreeVariance degree_variance(const Graph& g) {
  BigInt sum_d2 = 0;
  for (std::int64_t d : g.degrees()) sum_d2 += BigInt(d) * d;
  const BigInt m = g.edge_count();
  DegreeVariance out;
  out.numerator = BigInt(g.order()) * sum_d2 - 4 * m * m;
  out.denominator = g.order();
  return out;
}

}  // namespace trilab
