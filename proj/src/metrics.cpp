// Copyright 2026 The snbr Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "snbr/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include <Eigen/Dense>

#include "snbr/error.hpp"
#include "snbr/recourse.hpp"

namespace snbr {

namespace {

void stacked_map(const GameSpec& game, const Profile& x, int nodes, Vec& out) {
  out.resize(x.size());
  std::size_t off = 0;
  for (std::size_t i = 0; i < game.size(); ++i) {
    const Vec g = expected_gradient(game, i, x, nodes);
    std::copy(g.begin(), g.end(), out.begin() + static_cast<std::ptrdiff_t>(off));
    off += g.size();
  }
}

void project_profile(const GameSpec& game, Profile& x) {
  for (std::size_t i = 0; i < game.size(); ++i) project_inplace(game.players[i].set, x.block(i));
}

struct Moments {
  double mean = 0.0;
  double se = 0.0;
};

Moments moments(const std::vector<double>& v) {
  Moments m;
  const double n = static_cast<double>(v.size());
  for (double x : v) m.mean += x;
  m.mean /= n;
  if (v.size() > 1) {
    double ss = 0.0;
    for (double x : v) ss += (x - m.mean) * (x - m.mean);
    m.se = std::sqrt(ss / (n - 1.0) / n);
  }
  return m;
}

std::size_t common_length(const std::vector<TrajectoryRecord>& records) {
  if (records.empty()) throw_invalid("metrics need at least one trajectory");
  std::size_t len = records.front().x.size();
  for (const auto& r : records) len = std::min(len, r.x.size());
  return len;
}

}  // namespace

Vec expected_gradient(const GameSpec& game, std::size_t i, const Profile& x, int nodes) {
  Vec g = det_grad(game, i, x);
  const PlayerSpec& p = game.players[i];
  if (p.recourse) {
    const Vec s = expected_subgradient(*p.recourse, x.block(i), nodes);
    Vec c(p.dim, 0.0);
    if (p.recourse->cost_grad) p.recourse->cost_grad(x.block(i), c);
    for (std::size_t l = 0; l < p.dim; ++l) g[l] += s[l] + c[l];
  }
  return g;
}

Vec exact_best_response(const GameSpec& game, std::size_t i, const Profile& y, double tol,
                        int nodes) {
  const PlayerSpec& p = game.players.at(i);
  const double mu = game.mu;
  const double step = 1.0 / (p.lipschitz + mu);
  const double scale = (p.lipschitz + mu) / mu;
  Profile z = y;
  const auto anchor = y.block(i);
  Vec next(p.dim);
  for (int it = 0; it < 1000000; ++it) {
    const Vec g = expected_gradient(game, i, z, nodes);
    auto zi = z.block(i);
    double delta = 0.0;
    for (std::size_t l = 0; l < p.dim; ++l) {
      const double v = zi[l] - step * (g[l] + mu * (zi[l] - anchor[l]));
      next[l] = std::clamp(v, p.set.lower[l], p.set.upper[l]);
      delta += (next[l] - zi[l]) * (next[l] - zi[l]);
    }
    std::copy(next.begin(), next.end(), zi.begin());
    if (std::sqrt(delta) * scale <= tol) return next;
  }
  throw NumericFailure("exact best response did not converge", 0.0);
}

Profile best_response_map(const GameSpec& game, const Profile& y, double tol, int nodes) {
  Profile out = y;
  for (std::size_t i = 0; i < game.size(); ++i) {
    const Vec z = exact_best_response(game, i, y, tol, nodes);
    std::copy(z.begin(), z.end(), out.block(i).begin());
  }
  return out;
}

StackedGradientResult stacked_projected_gradient(const GameSpec& game, const Profile& x0,
                                                 double tol, int max_iter, int nodes) {
  StackedGradientResult res;
  const std::size_t n = game.total_dim();
  Profile mid = game.lower_profile();
  for (std::size_t i = 0; i < game.size(); ++i) {
    auto b = mid.block(i);
    for (std::size_t l = 0; l < b.size(); ++l)
      b[l] = 0.5 * (game.players[i].set.lower[l] + game.players[i].set.upper[l]);
  }
  Eigen::MatrixXd jac(n, n);
  const double h = 1e-5;
  Vec fp, fm;
  for (std::size_t c = 0; c < n; ++c) {
    Profile xp = mid, xm = mid;
    xp.flat()[c] += h;
    xm.flat()[c] -= h;
    stacked_map(game, xp, nodes, fp);
    stacked_map(game, xm, nodes, fm);
    for (std::size_t r = 0; r < n; ++r)
      jac(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = (fp[r] - fm[r]) / (2 * h);
  }
  const Eigen::MatrixXd sym = 0.5 * (jac + jac.transpose());
  res.modulus = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(sym).eigenvalues().minCoeff();
  res.lipschitz = Eigen::JacobiSVD<Eigen::MatrixXd>(jac).singularValues()(0);
  res.x = x0;
  if (!(res.modulus > 1e-8)) return res;
  res.applicable = true;
  const double gamma = res.modulus / (res.lipschitz * res.lipschitz);
  Vec f;
  for (int it = 0; it < max_iter; ++it) {
    stacked_map(game, res.x, nodes, f);
    Profile next = res.x;
    auto flat = next.flat();
    for (std::size_t l = 0; l < n; ++l) flat[l] -= gamma * f[l];
    project_profile(game, next);
    const double gap = distance(next, res.x) / gamma;
    res.x = std::move(next);
    res.iterations = it + 1;
    if (gap <= tol) return res;
  }
  throw NumericFailure("stacked projected gradient did not converge", distance(res.x, x0));
}

ReferenceEquilibrium reference_equilibrium(const GameSpec& game, const Profile& x0,
                                           bool cross_check) {
  game.validate();
  ReferenceEquilibrium ref;
  ref.method = "exact-best-response";
  Profile x = x0;
  int it = 0;
  for (; it < 100000; ++it) {
    Profile next = best_response_map(game, x, 1e-13);
    const double change = distance(next, x);
    x = std::move(next);
    if (change <= 1e-13) break;
  }
  if (it == 100000) throw NumericFailure("best-response iteration did not converge", 0.0);
  ref.iterations = it + 1;
  ref.x = x;
  ref.residual = distance(best_response_map(game, x, 1e-13), x);
  bool recourse = false;
  for (const auto& p : game.players) recourse = recourse || p.recourse != nullptr;
  if (recourse) {
    double err = 0.0;
    for (std::size_t i = 0; i < game.size(); ++i) {
      if (!game.players[i].recourse) continue;
      const Vec a = expected_subgradient(*game.players[i].recourse, x.block(i), 64);
      const Vec b = expected_subgradient(*game.players[i].recourse, x.block(i), 128);
      for (std::size_t l = 0; l < a.size(); ++l) err = std::max(err, std::abs(a[l] - b[l]));
    }
    ref.quadrature_error = err;
  }
  if (cross_check) {
    const StackedGradientResult s = stacked_projected_gradient(game, x0);
    if (s.applicable) ref.cross_check_gap = distance(s.x, x);
  }
  return ref;
}

double RunMetrics::sg_max(std::size_t k) const {
  double m = 0.0;
  for (double v : sg_mean.at(k)) m = std::max(m, v);
  return m;
}

std::vector<double> compute_u_k(const std::vector<TrajectoryRecord>& records, const Profile& xstar) {
  return compute_metrics(records, xstar).u;
}

std::vector<double> compute_inf_metric(const std::vector<TrajectoryRecord>& records,
                                       const Profile& xstar) {
  return compute_metrics(records, xstar).inf;
}

std::vector<double> compute_variance(const std::vector<TrajectoryRecord>& records) {
  const std::size_t len = common_length(records);
  const std::size_t m = records.size();
  std::vector<double> out(len, 0.0);
  if (m < 2) return out;
  for (std::size_t k = 0; k < len; ++k) {
    const std::size_t dim = records.front().x[k].size();
    Vec mean(dim, 0.0);
    for (const auto& r : records) {
      const auto f = r.x[k].flat();
      for (std::size_t l = 0; l < dim; ++l) mean[l] += f[l];
    }
    for (double& v : mean) v /= static_cast<double>(m);
    double ss = 0.0;
    for (const auto& r : records) {
      const auto f = r.x[k].flat();
      for (std::size_t l = 0; l < dim; ++l) ss += (f[l] - mean[l]) * (f[l] - mean[l]);
    }
    out[k] = ss / static_cast<double>(m - 1);
  }
  return out;
}

RunMetrics compute_metrics(const std::vector<TrajectoryRecord>& records, const Profile& xstar) {
  const std::size_t len = common_length(records);
  const std::size_t m = records.size();
  const std::size_t n = xstar.players();
  RunMetrics out;
  out.trajectories = m;
  out.variance = compute_variance(records);
  std::vector<double> stacked(m);
  std::vector<std::vector<double>> blocks(n, std::vector<double>(m));
  for (std::size_t k = 0; k < len; ++k) {
    std::vector<double> sg(n, 0.0);
    double comm = 0.0;
    for (std::size_t t = 0; t < m; ++t) {
      const auto& r = records[t];
      double s2 = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        const double e = block_distance(r.x[k], xstar, i);
        blocks[i][t] = e;
        s2 += e * e;
        sg[i] += static_cast<double>(r.sg_cum[k][i]);
      }
      stacked[t] = std::sqrt(s2);
      comm += static_cast<double>(r.comm_rounds[k]);
    }
    const Moments u = moments(stacked);
    out.u.push_back(u.mean);
    out.u_se.push_back(u.se);
    std::vector<double> bm(n);
    double best = -1.0, best_se = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const Moments b = moments(blocks[i]);
      bm[i] = b.mean;
      if (b.mean > best) {
        best = b.mean;
        best_se = b.se;
      }
    }
    out.inf.push_back(best);
    out.inf_se.push_back(best_se);
    out.block_mean.push_back(std::move(bm));
    for (double& v : sg) v /= static_cast<double>(m);
    out.sg_mean.push_back(std::move(sg));
    out.comm_rounds.push_back(comm / static_cast<double>(m));
  }
  return out;
}

std::vector<double> epsilon_grid(double u0, double eps_min, std::size_t points) {
  if (points < 2) throw_invalid("epsilon grid needs at least two points");
  const double top = 0.5 * u0;
  if (!(eps_min > 0.0) || !(top > eps_min)) throw_invalid("epsilon grid: need u0/2 > eps_min > 0");
  std::vector<double> eps(points);
  const double ratio = std::log(eps_min / top) / static_cast<double>(points - 1);
  for (std::size_t j = 0; j < points; ++j) eps[j] = top * std::exp(ratio * static_cast<double>(j));
  eps.back() = eps_min;
  return eps;
}

std::vector<std::optional<double>> k_of_epsilon(const std::vector<double>& u,
                                                const std::vector<double>& counts,
                                                const std::vector<double>& eps) {
  if (u.size() != counts.size()) throw_invalid("k_of_epsilon: series length mismatch");
  std::vector<std::optional<double>> out(eps.size());
  for (std::size_t j = 0; j < eps.size(); ++j) {
    for (std::size_t k = 0; k < u.size(); ++k) {
      if (u[k] < eps[j]) {
        out[j] = counts[k];
        break;
      }
    }
  }
  return out;
}

std::vector<double> sg_max_series(const RunMetrics& metrics) {
  std::vector<double> out(metrics.size());
  for (std::size_t k = 0; k < out.size(); ++k) out[k] = metrics.sg_max(k);
  return out;
}

InverseSquareFit fit_inverse_square(const std::vector<double>& eps,
                                    const std::vector<std::optional<double>>& k) {
  if (eps.size() != k.size()) throw_invalid("fit_inverse_square: length mismatch");
  std::vector<double> xs, ys;
  for (std::size_t j = 0; j < eps.size(); ++j) {
    if (!k[j]) continue;
    if (!(eps[j] > 0.0)) throw_invalid("fit_inverse_square: epsilon must be positive");
    xs.push_back(1.0 / (eps[j] * eps[j]));
    ys.push_back(*k[j]);
  }
  if (xs.size() < 3) throw_invalid("fit_inverse_square: at least three points are required");
  const double n = static_cast<double>(xs.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t j = 0; j < xs.size(); ++j) {
    mx += xs[j];
    my += ys[j];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t j = 0; j < xs.size(); ++j) {
    sxx += (xs[j] - mx) * (xs[j] - mx);
    sxy += (xs[j] - mx) * (ys[j] - my);
    syy += (ys[j] - my) * (ys[j] - my);
  }
  if (!(sxx > 0.0)) throw_invalid("fit_inverse_square: degenerate epsilon grid");
  InverseSquareFit f;
  f.points = xs.size();
  f.coefficient = sxy / sxx;
  f.intercept = my - f.coefficient * mx;
  double ss_res = 0.0;
  for (std::size_t j = 0; j < xs.size(); ++j) {
    const double r = ys[j] - f.coefficient * xs[j] - f.intercept;
    ss_res += r * r;
  }
  f.r2 = syy > 0.0 ? 1.0 - ss_res / syy : 1.0;
  return f;
}

double LogLinearFit::ratio() const { return std::exp(slope); }

LogLinearFit log_linear_fit(const std::vector<double>& series, std::size_t begin, std::size_t end) {
  if (end > series.size() || end < begin + 3) throw_invalid("log_linear_fit: need three points");
  std::vector<double> xs, ys;
  for (std::size_t k = begin; k < end; ++k) {
    if (!(series[k] > 0.0)) throw_invalid("log_linear_fit: series must be positive");
    xs.push_back(static_cast<double>(k));
    ys.push_back(std::log(series[k]));
  }
  const double n = static_cast<double>(xs.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t j = 0; j < xs.size(); ++j) {
    mx += xs[j];
    my += ys[j];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t j = 0; j < xs.size(); ++j) {
    sxx += (xs[j] - mx) * (xs[j] - mx);
    sxy += (xs[j] - mx) * (ys[j] - my);
    syy += (ys[j] - my) * (ys[j] - my);
  }
  LogLinearFit f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  double ss_res = 0.0;
  for (std::size_t j = 0; j < xs.size(); ++j) {
    const double r = ys[j] - f.slope * xs[j] - f.intercept;
    ss_res += r * r;
  }
  f.r2 = syy > 0.0 ? 1.0 - ss_res / syy : 1.0;
  return f;
}

double geometric_weight_constant(double c, double q) {
  if (!(c > 0.0 && c < q && q < 1.0)) throw_invalid("geometric_weight_constant requires 0 < c < q < 1");
  return 1.0 / (std::numbers::e * std::log(q / c));
}

}  // namespace snbr
