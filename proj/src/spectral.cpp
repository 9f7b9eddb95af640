#include "trilab/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace trilab {

namespace {

void require_symmetric(const Eigen::MatrixXd& a) {
  if (a.rows() != a.cols()) throw std::invalid_argument("matrix must be square");
  if ((a - a.transpose()).cwiseAbs().maxCoeff() > 1e-9 * (1.0 + a.cwiseAbs().maxCoeff())) {
    throw std::invalid_argument("matrix must be symmetric");
  }
}

}  // namespace

std::vector<double> eigenvalues_desc(const Eigen::MatrixXd& sym) {
  require_symmetric(sym);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sym);
  if (es.info() != Eigen::Success) throw std::runtime_error("eigensolver failed");
  const auto& asc = es.eigenvalues();
  std::vector<double> out(asc.size());
  for (int i = 0; i < asc.size(); ++i) out[i] = asc(asc.size() - 1 - i);
  return out;
}

std::vector<double> singular_values_desc(const Eigen::MatrixXd& a) {
  Eigen::BDCSVD<Eigen::MatrixXd> svd(a);
  const auto& sv = svd.singularValues();
  return std::vector<double>(sv.data(), sv.data() + sv.size());
}

SupResult sup_rank_k(const Eigen::MatrixXd& a, int k) {
  if (k < 1 || k > std::min(a.rows(), a.cols())) {
    throw std::invalid_argument("sup_rank_k: bad rank bound");
  }
  Eigen::BDCSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& sv = svd.singularValues();
  double sumsq = 0.0;
  for (int i = 0; i < k; ++i) sumsq += sv(i) * sv(i);
  SupResult out;
  out.value = std::sqrt(sumsq);
  out.optimizer = Eigen::MatrixXd::Zero(a.rows(), a.cols());
  if (out.value > 0.0) {
    for (int i = 0; i < k; ++i) {
      out.optimizer += (sv(i) / out.value) * svd.matrixU().col(i) * svd.matrixV().col(i).transpose();
    }
  }
  return out;
}

SupResult sup_rank_k_psd(const Eigen::MatrixXd& sym, int k) {
  require_symmetric(sym);
  if (k < 1 || k > sym.rows()) throw std::invalid_argument("sup_rank_k_psd: bad rank bound");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sym);
  if (es.info() != Eigen::Success) throw std::runtime_error("eigensolver failed");
  const int n = static_cast<int>(sym.rows());
  // Eigen returns ascending order; the top of the spectrum sits at the end.
  double sumsq = 0.0;
  for (int i = 0; i < k; ++i) {
    const double lam = es.eigenvalues()(n - 1 - i);
    if (lam > 0.0) sumsq += lam * lam;
  }
  SupResult out;
  out.value = std::sqrt(sumsq);
  out.optimizer = Eigen::MatrixXd::Zero(n, n);
  if (out.value > 0.0) {
    for (int i = 0; i < k; ++i) {
      const double lam = es.eigenvalues()(n - 1 - i);
      if (lam > 0.0) {
        const auto v = es.eigenvectors().col(n - 1 - i);
        out.optimizer += (lam / out.value) * v * v.transpose();
      }
    }
  }
  return out;
}

double capped_cubic_upper(double x, double cap) {
  if (!(cap > 0.0)) throw std::invalid_argument("capped_cubic: cap must be positive");
  if (x <= 0.0) return 0.0;
  const double kink = std::sqrt(cap);
  if (x <= kink) return x * x * x;
  return 3.0 * cap * x - 2.0 * cap * kink;
}

double capped_cubic_lower(double x, double cap) { return -capped_cubic_upper(-x, cap); }

double capped_cubic_sum(double x, double cap) {
  return capped_cubic_upper(x, cap) + capped_cubic_lower(x, cap);
}

double spectral_cubic_statistic(const std::vector<double>& eigenvalues, double cap) {
  const double n = static_cast<double>(eigenvalues.size());
  if (eigenvalues.empty()) return 0.0;
  const double scale = std::sqrt(n);
  double acc = 0.0;
  for (double lam : eigenvalues) acc += capped_cubic_sum(lam / scale, cap);
  return acc / n;
}

SpectrumSplit split_spectrum(const std::vector<double>& eigenvalues, double threshold) {
  SpectrumSplit out;
  for (double lam : eigenvalues) {
    const double cube = lam * lam * lam;
    if (lam <= threshold) {
      out.extreme.push_back(lam);
      out.extreme_cube_sum += cube;
    } else {
      out.bulk.push_back(lam);
      out.bulk_cube_sum += cube;
    }
  }
  return out;
}

CubeTailComparison cube_tail_comparison(const std::vector<double>& seq, double eps) {
  if (eps < 0.0) throw std::invalid_argument("cube_tail_comparison: eps must be nonnegative");
  for (std::size_t i = 0; i < seq.size(); ++i) {
    if (seq[i] < 0.0) throw std::invalid_argument("cube_tail_comparison: entries must be nonnegative");
    if (i > 0 && seq[i] > seq[i - 1] + 1e-15) {
      throw std::invalid_argument("cube_tail_comparison: sequence must be non-increasing");
    }
  }
  CubeTailComparison out;
  if (seq.empty()) return out;
  double l2 = 0.0, l3 = 0.0, tail3 = 0.0;
  for (std::size_t i = 0; i < seq.size(); ++i) {
    l2 += seq[i] * seq[i];
    const double c = seq[i] * seq[i] * seq[i];
    l3 += c;
    if (i > 0) tail3 += c;
  }
  const double head3 = seq[0] * seq[0] * seq[0];
  out.premise = tail3 >= eps * head3;
  out.l2_squared = l2;
  out.l3_squared = std::pow(l3, 2.0 / 3.0);
  out.required_factor = std::cbrt(1.0 + eps);
  // a hair of slack so borderline-equality cases are not reported as
  // violations purely through rounding
  out.conclusion = l2 >= out.required_factor * out.l3_squared * (1.0 - 1e-12);
  return out;
}

}  // namespace trilab
