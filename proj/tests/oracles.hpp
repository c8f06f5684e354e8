#pragma once

// Independent reference implementations used to check the library.

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <random>
#include <utility>
#include <vector>

namespace lgtest {

using EdgeList = std::vector<std::pair<std::size_t, std::size_t>>;

// Dense I - D^-1/2 A D^-1/2; isolated vertices keep L_ii = 1.
inline Eigen::MatrixXd normalized_laplacian(std::size_t n, const EdgeList& edges) {
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
  for (auto [u, v] : edges) a(u, v) = a(v, u) = 1.0;
  Eigen::VectorXd d = a.rowwise().sum();
  Eigen::MatrixXd l = Eigen::MatrixXd::Identity(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (a(i, j) != 0) l(i, j) -= 1.0 / std::sqrt(d(i) * d(j));
  return l;
}

// R through the spectral decomposition L = V diag(lambda) V'.
inline double rayleigh_eigen(std::size_t n, const EdgeList& edges, const std::vector<double>& x) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(normalized_laplacian(n, edges));
  Eigen::Map<const Eigen::VectorXd> xv(x.data(), static_cast<Eigen::Index>(n));
  const Eigen::VectorXd coeff = es.eigenvectors().transpose() * xv;
  return (coeff.array().square() * es.eigenvalues().array()).sum() / xv.squaredNorm();
}

inline double rayleigh_dense(std::size_t n, const EdgeList& edges, const std::vector<double>& x) {
  Eigen::Map<const Eigen::VectorXd> xv(x.data(), static_cast<Eigen::Index>(n));
  return xv.dot(normalized_laplacian(n, edges) * xv) / xv.squaredNorm();
}

inline EdgeList random_graph(std::size_t n, double density, std::mt19937_64& rng) {
  std::bernoulli_distribution keep(density);
  EdgeList edges;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      if (keep(rng)) edges.emplace_back(i, j);
  return edges;
}

// Path 0-1-..-(n-1) plus random chords: always connected.
inline EdgeList random_connected_graph(std::size_t n, double density, std::mt19937_64& rng) {
  EdgeList edges;
  for (std::size_t i = 0; i + 1 < n; ++i) edges.emplace_back(i, i + 1);
  std::bernoulli_distribution keep(density);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 2; j < n; ++j)
      if (keep(rng)) edges.emplace_back(i, j);
  return edges;
}

// U of a by pairwise comparison, ties counting 1/2.
inline double u_pairwise(const std::vector<double>& a, const std::vector<double>& b) {
  double u = 0;
  for (double x : a)
    for (double y : b) u += x > y ? 1.0 : (x == y ? 0.5 : 0.0);
  return u;
}

struct EnumeratedU {
  double u_obs = 0;
  double p_less = 0, p_greater = 0;
};

// Null distribution of U by enumerating every split of the pooled sample.
inline EnumeratedU enumerate_u(const std::vector<double>& a, const std::vector<double>& b) {
  std::vector<double> pooled(a);
  pooled.insert(pooled.end(), b.begin(), b.end());
  const std::size_t n = a.size(), total = pooled.size();
  EnumeratedU out;
  out.u_obs = u_pairwise(a, b);
  std::vector<bool> pick(total, false);
  std::fill(pick.begin(), pick.begin() + static_cast<long>(n), true);
  std::size_t count = 0, le = 0, ge = 0;
  do {
    std::vector<double> x, y;
    for (std::size_t i = 0; i < total; ++i) (pick[i] ? x : y).push_back(pooled[i]);
    const double u = u_pairwise(x, y);
    ++count;
    if (u <= out.u_obs + 1e-9) ++le;
    if (u >= out.u_obs - 1e-9) ++ge;
  } while (std::prev_permutation(pick.begin(), pick.end()));
  out.p_less = static_cast<double>(le) / static_cast<double>(count);
  out.p_greater = static_cast<double>(ge) / static_cast<double>(count);
  return out;
}

// Exact permutation p by brute force over all relabelings, using the dense oracle.
inline double exhaustive_p_oracle(std::size_t n, const EdgeList& edges, std::vector<double> x) {
  const double r_obs = rayleigh_dense(n, edges, x);
  std::vector<std::size_t> perm(n);
  for (std::size_t i = 0; i < n; ++i) perm[i] = i;
  std::size_t count = 0, le = 0;
  do {
    std::vector<double> y(n);
    for (std::size_t i = 0; i < n; ++i) y[i] = x[perm[i]];
    ++count;
    if (rayleigh_dense(n, edges, y) <= r_obs + 1e-12 * std::max(1.0, std::abs(r_obs))) ++le;
  } while (std::next_permutation(perm.begin(), perm.end()));
  return static_cast<double>(le) / static_cast<double>(count);
}

// One-sample Kolmogorov-Smirnov statistic against Uniform(0, 1).
inline double ks_uniform(std::vector<double> sample) {
  std::sort(sample.begin(), sample.end());
  const double n = static_cast<double>(sample.size());
  double d = 0;
  for (std::size_t i = 0; i < sample.size(); ++i) {
    const double f = sample[i];
    d = std::max({d, (static_cast<double>(i) + 1) / n - f, f - static_cast<double>(i) / n});
  }
  return d;
}

}  // namespace lgtest
