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

#include "snbr/contraction.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Dense>

#include "snbr/error.hpp"

namespace snbr {

namespace {

constexpr double kPowerTol = 1e-12;
constexpr int kPowerMaxIter = 100000;
constexpr double kTieTol = 1e-12;

void require_square_nonnegative(const Matrix& m) {
  const std::size_t n = m.size();
  if (n == 0) throw_invalid("matrix is empty");
  for (const auto& row : m) {
    if (row.size() != n) throw_invalid("matrix is not square");
    for (double v : row)
      if (!(v >= 0.0) || !std::isfinite(v)) throw_invalid("matrix must be finite and nonnegative");
  }
}

Vec mat_vec(const Matrix& m, const Vec& v) {
  Vec out(m.size(), 0.0);
  for (std::size_t i = 0; i < m.size(); ++i)
    for (std::size_t j = 0; j < v.size(); ++j) out[i] += m[i][j] * v[j];
  return out;
}

Matrix gram(const Matrix& m) {
  const std::size_t n = m.size();
  Matrix g(n, Vec(n, 0.0));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t r = 0; r < n; ++r) g[i][j] += m[r][i] * m[r][j];
  return g;
}

struct PowerResult {
  double value;
  int iterations;
};

// Power iteration for the Perron root of a nonnegative matrix. The ratio
// bounds min/max (Mv)_i / v_i bracket the root for positive v.
PowerResult perron_root(const Matrix& m) {
  const std::size_t n = m.size();
  Vec v(n, 1.0 / std::sqrt(static_cast<double>(n)));
  double estimate = 0.0;
  for (int it = 1; it <= kPowerMaxIter; ++it) {
    Vec w = mat_vec(m, v);
    double lo = std::numeric_limits<double>::infinity();
    double hi = 0.0;
    bool positive = true;
    for (std::size_t i = 0; i < n; ++i) {
      if (v[i] <= 0.0) {
        positive = false;
        break;
      }
      const double r = w[i] / v[i];
      lo = std::min(lo, r);
      hi = std::max(hi, r);
    }
    double norm = 0.0;
    for (double x : w) norm += x * x;
    norm = std::sqrt(norm);
    if (norm == 0.0) return {0.0, it};
    if (positive) {
      estimate = hi;
      if (hi - lo <= kPowerTol * hi) return {hi, it};
    } else {
      estimate = norm;
    }
    for (std::size_t i = 0; i < n; ++i) v[i] = w[i] / norm;
  }
  throw NumericFailure("power iteration did not converge", estimate);
}

}  // namespace

void CurvatureBounds::validate() const {
  const std::size_t n = zeta_min.size();
  if (n == 0) throw_invalid("curvature bounds are empty");
  if (zeta_offmax.size() != n) throw_invalid("zeta_offmax has wrong row count");
  for (std::size_t i = 0; i < n; ++i) {
    if (!(zeta_min[i] >= 0.0)) throw_invalid("zeta_min must be nonnegative");
    if (zeta_offmax[i].size() != n) throw_invalid("zeta_offmax is not square");
    for (std::size_t j = 0; j < n; ++j) {
      if (!(zeta_offmax[i][j] >= 0.0)) throw_invalid("zeta_offmax must be nonnegative");
      if (i == j && zeta_offmax[i][j] != 0.0) throw_invalid("zeta_offmax diagonal must be zero");
    }
  }
}

Matrix build_gamma(const CurvatureBounds& bounds, double mu) {
  if (!(mu > 0.0)) throw_invalid("build_gamma: mu must be positive");
  bounds.validate();
  const std::size_t n = bounds.size();
  Matrix g(n, Vec(n, 0.0));
  for (std::size_t i = 0; i < n; ++i) {
    const double denom = mu + bounds.zeta_min[i];
    for (std::size_t j = 0; j < n; ++j)
      g[i][j] = (i == j) ? mu / denom : bounds.zeta_offmax[i][j] / denom;
  }
  return g;
}

double norm_inf(const Matrix& m) {
  require_square_nonnegative(m);
  double best = 0.0;
  for (const auto& row : m) {
    double s = 0.0;
    for (double v : row) s += std::abs(v);
    best = std::max(best, s);
  }
  return best;
}

double norm_2(const Matrix& m) {
  require_square_nonnegative(m);
  try {
    return std::sqrt(perron_root(gram(m)).value);
  } catch (const NumericFailure& e) {
    throw NumericFailure(e.what(), std::sqrt(e.estimate()));
  }
}

double spectral_radius(const Matrix& m) {
  require_square_nonnegative(m);
  return perron_root(m).value;
}

void check_assumptions(ContractionReport& report, const CurvatureBounds& bounds) {
  auto below_one = [&](double v) {
    if (std::abs(v - 1.0) <= kTieTol) report.near_one = true;
    return v < 1.0 - kTieTol;
  };
  report.ok_2norm = below_one(report.a2);
  report.ok_infnorm = below_one(report.a_inf);
  bool dom = true;
  for (std::size_t i = 0; i < bounds.size(); ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < bounds.size(); ++j)
      if (j != i) s += bounds.zeta_offmax[i][j];
    if (!(bounds.zeta_min[i] > s)) dom = false;
  }
  report.ok_diag_dom = dom;
  if (dom && !report.ok_infnorm && !report.near_one)
    throw Error(ErrorCode::kNumericFailure, "diagonal dominance without infinity-norm contraction");
}

ContractionReport contraction_report(const CurvatureBounds& bounds, double mu) {
  ContractionReport r;
  r.gamma = build_gamma(bounds, mu);
  r.a_inf = norm_inf(r.gamma);
  const PowerResult two = perron_root(gram(r.gamma));
  r.a2 = std::sqrt(two.value);
  r.power_iterations_2norm = two.iterations;
  const PowerResult sr = perron_root(r.gamma);
  r.rho = sr.value;
  r.power_iterations_rho = sr.iterations;
  check_assumptions(r, bounds);
  return r;
}

CurvatureBounds estimate_curvature(const GameSpec& game, std::size_t samples, std::uint64_t seed) {
  game.validate();
  const std::size_t n = game.size();
  CurvatureBounds b;
  b.zeta_min.assign(n, std::numeric_limits<double>::infinity());
  b.zeta_offmax.assign(n, Vec(n, 0.0));
  SampleStream rng(seed, {0, StreamTag::kAuxiliary, 0, 0});
  const std::vector<std::size_t> dims = game.dims();
  const double h = 1e-6;
  for (std::size_t s = 0; s < std::max<std::size_t>(samples, 1); ++s) {
    Profile x(dims);
    for (std::size_t i = 0; i < n; ++i) {
      const auto& box = game.players[i].set;
      auto blk = x.block(i);
      for (std::size_t l = 0; l < blk.size(); ++l)
        blk[l] = box.lower[l] + (box.upper[l] - box.lower[l]) * rng.uniform();
    }
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t ni = dims[i];
      for (std::size_t j = 0; j < n; ++j) {
        const std::size_t nj = dims[j];
        Eigen::MatrixXd hess(ni, nj);
        for (std::size_t c = 0; c < nj; ++c) {
          Profile xp = x;
          Profile xm = x;
          xp.block(j)[c] += h;
          xm.block(j)[c] -= h;
          const Vec gp = det_grad(game, i, xp);
          const Vec gm = det_grad(game, i, xm);
          for (std::size_t r = 0; r < ni; ++r) hess(r, c) = (gp[r] - gm[r]) / (2.0 * h);
        }
        if (i == j) {
          const Eigen::MatrixXd sym = 0.5 * (hess + hess.transpose());
          Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sym);
          b.zeta_min[i] = std::min(b.zeta_min[i], std::max(0.0, es.eigenvalues().minCoeff()));
        } else {
          Eigen::JacobiSVD<Eigen::MatrixXd> svd(hess);
          b.zeta_offmax[i][j] = std::max(b.zeta_offmax[i][j], svd.singularValues()(0));
        }
      }
    }
  }
  return b;
}

nlohmann::json to_json(const ContractionReport& report) {
  return nlohmann::json{{"gamma", report.gamma},
                        {"a2", report.a2},
                        {"a_inf", report.a_inf},
                        {"rho", report.rho},
                        {"ok_2norm", report.ok_2norm},
                        {"ok_infnorm", report.ok_infnorm},
                        {"ok_diag_dom", report.ok_diag_dom},
                        {"near_one", report.near_one}};
}

}  // namespace snbr
