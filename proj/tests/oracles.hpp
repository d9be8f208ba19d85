#pragma once

// Plain-loop evaluators used as test oracles. Nothing here calls the
// library's numerical routines; only the restart initialiser is shared so
// reference runs start from the same state as the library.

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <random>
#include <vector>

#include "modclust/modclust.hpp"

namespace oracle {

using Dense = std::vector<std::vector<double>>;
using Codes = std::vector<std::vector<int>>;

inline Dense to_dense(const modclust::Matrix& m) {
  Dense out(static_cast<std::size_t>(m.rows()), std::vector<double>(static_cast<std::size_t>(m.cols())));
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) out[i][j] = m(i, j);
  return out;
}

inline modclust::Matrix to_matrix(const Dense& d) {
  modclust::Matrix m(static_cast<Eigen::Index>(d.size()),
                     static_cast<Eigen::Index>(d.empty() ? 0 : d[0].size()));
  for (std::size_t i = 0; i < d.size(); ++i)
    for (std::size_t j = 0; j < d[i].size(); ++j) m(i, j) = d[i][j];
  return m;
}

inline modclust::RowMatrix to_rows(const Dense& d) {
  modclust::RowMatrix m(static_cast<Eigen::Index>(d.size()), static_cast<Eigen::Index>(d[0].size()));
  for (std::size_t i = 0; i < d.size(); ++i)
    for (std::size_t j = 0; j < d[i].size(); ++j) m(i, j) = d[i][j];
  return m;
}

inline modclust::CodeMatrix to_codes(const Codes& c) {
  modclust::CodeMatrix m(static_cast<Eigen::Index>(c.size()), static_cast<Eigen::Index>(c[0].size()));
  for (std::size_t i = 0; i < c.size(); ++i)
    for (std::size_t j = 0; j < c[i].size(); ++j) m(i, j) = c[i][j];
  return m;
}

inline double max_abs_diff(const Dense& a, const Dense& b) {
  double worst = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < a[i].size(); ++j) worst = std::max(worst, std::abs(a[i][j] - b[i][j]));
  return worst;
}

// Random symmetric adjacency with zero diagonal and at least one edge.
inline Dense random_adjacency(std::size_t n, double density, bool weighted, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  Dense a(n, std::vector<double>(n, 0.0));
  bool any = false;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (unit(rng) < density) {
        const double w = weighted ? 0.1 + 4.9 * unit(rng) : 1.0;
        a[i][j] = a[j][i] = w;
        any = true;
      }
    }
  }
  if (!any && n >= 2) a[0][1] = a[1][0] = 1.0;
  return a;
}

inline Dense random_membership(std::size_t n, std::size_t c, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unit(0.01, 1.0);
  Dense u(n, std::vector<double>(c));
  for (auto& row : u) {
    double s = 0.0;
    for (auto& v : row) s += (v = unit(rng));
    for (auto& v : row) v /= s;
  }
  return u;
}

inline Dense modularity_matrix(const Dense& a) {
  const std::size_t n = a.size();
  std::vector<double> w(n, 0.0);
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) w[i] += a[i][j];
    total += w[i];
  }
  Dense b(n, std::vector<double>(n));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) b[i][j] = a[i][j] - w[i] * w[j] / total;
  return b;
}

inline double fuzzy_modularity(const Dense& b, const Dense& u) {
  double q = 0.0;
  for (std::size_t n = 0; n < b.size(); ++n)
    for (std::size_t m = 0; m < b.size(); ++m) {
      if (m == n) continue;
      for (std::size_t c = 0; c < u[n].size(); ++c) q += b[n][m] * u[n][c] * u[m][c];
    }
  return q;
}

inline double sq_dist(const std::vector<double>& x, const std::vector<double>& y) {
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) s += (x[i] - y[i]) * (x[i] - y[i]);
  return s;
}

inline double hamming(const std::vector<int>& x, const std::vector<int>& y) {
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) s += x[i] != y[i] ? 1.0 : 0.0;
  return s;
}

// d[n][c] for a prototype list.
inline Dense medoid_dist(const Dense& x, const std::vector<std::size_t>& medoids) {
  Dense d(x.size(), std::vector<double>(medoids.size()));
  for (std::size_t n = 0; n < x.size(); ++n)
    for (std::size_t c = 0; c < medoids.size(); ++c) d[n][c] = sq_dist(x[n], x[medoids[c]]);
  return d;
}

inline Dense mode_dist(const Codes& x, const Codes& modes) {
  Dense d(x.size(), std::vector<double>(modes.size()));
  for (std::size_t n = 0; n < x.size(); ++n)
    for (std::size_t c = 0; c < modes.size(); ++c) {
      const double h = hamming(x[n], modes[c]);
      d[n][c] = h * h;
    }
  return d;
}

// J = dw * sum u d + p sum u log u - (gamma / 2) sum_{n != m} u b u
inline double objective(const Dense& d, const Dense& u, const Dense* b, double dw, double gamma,
                        double p) {
  double fit = 0.0, ent = 0.0;
  for (std::size_t n = 0; n < u.size(); ++n)
    for (std::size_t c = 0; c < u[n].size(); ++c) {
      fit += u[n][c] * d[n][c];
      if (u[n][c] > 0.0) ent += u[n][c] * std::log(u[n][c]);
    }
  const double q = b ? fuzzy_modularity(*b, u) : 0.0;
  return dw * fit + p * ent - 0.5 * gamma * q;
}

// Closed-form membership sweep:
// u_nc ~ exp(-(1/p)[dw d_nc - gamma sum_{m != n} b_nm u_prev_mc]).
inline Dense membership_sweep(const Dense& d, const Dense* b, const Dense& u_prev, double dw,
                              double gamma, double p) {
  const std::size_t n_units = d.size(), k = d[0].size();
  Dense u(n_units, std::vector<double>(k));
  for (std::size_t n = 0; n < n_units; ++n) {
    std::vector<double> e(k);
    for (std::size_t c = 0; c < k; ++c) {
      double field = 0.0;
      if (b)
        for (std::size_t m = 0; m < n_units; ++m)
          if (m != n) field += (*b)[n][m] * u_prev[m][c];
      e[c] = -(dw * d[n][c] - gamma * field) / p;
    }
    const double top = *std::max_element(e.begin(), e.end());
    double s = 0.0;
    for (std::size_t c = 0; c < k; ++c) s += (u[n][c] = std::exp(e[c] - top));
    for (std::size_t c = 0; c < k; ++c) u[n][c] /= s;
  }
  return u;
}

inline double l1_diff(const Dense& a, const Dense& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < a[i].size(); ++j) s += std::abs(a[i][j] - b[i][j]);
  return s;
}

inline std::size_t row_argmax(const std::vector<double>& row) {
  std::size_t best = 0;
  for (std::size_t c = 1; c < row.size(); ++c)
    if (row[c] > row[best]) best = c;
  return best;
}

// Medoid step: for each cluster the argmax member minimising sum_n u_nc d(n, q).
// Clusters with no members keep their previous medoid; later clusters skip
// units already claimed.
inline std::vector<std::size_t> medoid_step(const Dense& x, const Dense& u,
                                            const std::vector<std::size_t>& prev) {
  const std::size_t n_units = x.size(), k = prev.size();
  std::vector<std::vector<std::size_t>> members(k);
  for (std::size_t n = 0; n < n_units; ++n) members[row_argmax(u[n])].push_back(n);
  std::vector<std::size_t> out(k, n_units);
  std::vector<bool> taken(n_units, false);
  for (std::size_t c = 0; c < k; ++c)
    if (members[c].empty()) {
      out[c] = prev[c];
      taken[prev[c]] = true;
    }
  for (std::size_t c = 0; c < k; ++c) {
    if (!members[c].empty()) {
      double best = std::numeric_limits<double>::infinity();
      for (std::size_t q : members[c]) {
        if (taken[q]) continue;
        double cost = 0.0;
        for (std::size_t n = 0; n < n_units; ++n) cost += u[n][c] * sq_dist(x[n], x[q]);
        if (cost < best) {
          best = cost;
          out[c] = q;
        }
      }
      if (out[c] != n_units) taken[out[c]] = true;
    }
  }
  for (std::size_t c = 0; c < k; ++c)
    if (out[c] == n_units) throw std::runtime_error("oracle medoid step: no free member");
  return out;
}

inline Codes mode_step(const Codes& x, const std::vector<int>& sizes, const Dense& u) {
  const std::size_t k = u[0].size(), n_attrs = sizes.size();
  Codes modes(k, std::vector<int>(n_attrs, 0));
  for (std::size_t c = 0; c < k; ++c)
    for (std::size_t i = 0; i < n_attrs; ++i) {
      std::vector<double> weight(static_cast<std::size_t>(sizes[i]), 0.0);
      for (std::size_t n = 0; n < x.size(); ++n) weight[static_cast<std::size_t>(x[n][i])] += u[n][c];
      modes[c][i] = static_cast<int>(row_argmax(weight));
    }
  return modes;
}

struct ReferenceFit {
  Dense u;
  std::vector<std::size_t> medoids;
  Codes modes;
  int iterations = 0;
  bool converged = false;
};

// Plain entropic fuzzy C-medoids (no network term).
inline ReferenceFit entropic_c_medoids(const Dense& x, std::size_t k, double p, int max_iter,
                                       double tol, std::uint64_t seed) {
  const auto start = modclust::restart_start(x.size(), k, seed, 0);
  ReferenceFit fit;
  fit.u = to_dense(start.membership);
  fit.medoids = start.medoids;
  while (fit.iterations < max_iter) {
    fit.medoids = medoid_step(x, fit.u, fit.medoids);
    Dense next = membership_sweep(medoid_dist(x, fit.medoids), nullptr, fit.u, 1.0, 0.0, p);
    const double change = l1_diff(next, fit.u);
    fit.u = std::move(next);
    ++fit.iterations;
    if (change < tol) {
      fit.converged = true;
      break;
    }
  }
  return fit;
}

// Plain entropic fuzzy C-modes (no network term), modes updated first.
inline ReferenceFit entropic_c_modes(const Codes& x, const std::vector<int>& sizes, std::size_t k,
                                     double p, int max_iter, double tol, std::uint64_t seed) {
  const auto start = modclust::restart_start(x.size(), k, seed, 0);
  ReferenceFit fit;
  fit.u = to_dense(start.membership);
  while (fit.iterations < max_iter) {
    fit.modes = mode_step(x, sizes, fit.u);
    Dense next = membership_sweep(mode_dist(x, fit.modes), nullptr, fit.u, 1.0, 0.0, p);
    const double change = l1_diff(next, fit.u);
    fit.u = std::move(next);
    ++fit.iterations;
    if (change < tol) {
      fit.converged = true;
      break;
    }
  }
  return fit;
}

// Fixed point of the membership sweep for fixed prototype distances,
// iterated from the uniform partition.
inline Dense membership_fixed_point(const Dense& d, const Dense& b, double dw, double gamma,
                                    double p, double tol = 1e-13, int max_iter = 100000) {
  const std::size_t k = d[0].size();
  Dense u(d.size(), std::vector<double>(k, 1.0 / static_cast<double>(k)));
  for (int it = 0; it < max_iter; ++it) {
    Dense next = membership_sweep(d, &b, u, dw, gamma, p);
    const double change = l1_diff(next, u);
    u = std::move(next);
    if (change < tol) break;
  }
  return u;
}

// Spectral radius of b with its diagonal zeroed. For p above gamma times
// this value the membership subproblem is strictly convex.
inline double offdiag_spectral_radius(const Dense& b) {
  modclust::Matrix m = to_matrix(b);
  m.diagonal().setZero();
  const Eigen::SelfAdjointEigenSolver<modclust::Matrix> es(m, Eigen::EigenvaluesOnly);
  return es.eigenvalues().cwiseAbs().maxCoeff();
}

struct ExhaustiveBest {
  double objective = std::numeric_limits<double>::infinity();
  std::vector<std::size_t> medoids;
  Codes modes;
};

// Every ordered pair of distinct medoids, each scored at its fixed-point
// membership.
inline ExhaustiveBest exhaustive_medoid_pairs(const Dense& x, const Dense& b, double gamma, double p) {
  ExhaustiveBest best;
  for (std::size_t q1 = 0; q1 < x.size(); ++q1)
    for (std::size_t q2 = 0; q2 < x.size(); ++q2) {
      if (q1 == q2) continue;
      const auto d = medoid_dist(x, {q1, q2});
      const double j = objective(d, membership_fixed_point(d, b, 1.0 - gamma, gamma, p), &b, 1.0 - gamma, gamma, p);
      if (j < best.objective) best = {j, {q1, q2}, {}};
    }
  return best;
}

// Every pair of mode vectors over the given domain sizes.
inline ExhaustiveBest exhaustive_mode_pairs(const Codes& x, const std::vector<int>& sizes, const Dense& b,
                                            double gamma, double p) {
  Codes all{{}};
  for (int k : sizes) {
    Codes next;
    for (const auto& prefix : all)
      for (int v = 0; v < k; ++v) {
        next.push_back(prefix);
        next.back().push_back(v);
      }
    all = std::move(next);
  }
  ExhaustiveBest best;
  for (const auto& m1 : all)
    for (const auto& m2 : all) {
      const Codes modes{m1, m2};
      const auto d = mode_dist(x, modes);
      const double j = objective(d, membership_fixed_point(d, b, 1.0 - gamma, gamma, p), &b, 1.0 - gamma, gamma, p);
      if (j < best.objective) best = {j, {}, modes};
    }
  return best;
}

}  // namespace oracle
