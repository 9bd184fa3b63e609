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

#include "snbr/builders.hpp"

#include <algorithm>
#include <cmath>

#include "snbr/error.hpp"
#include "snbr/recourse.hpp"

namespace snbr {

namespace {

void require_finite(const Vec& v, const char* what) {
  for (double x : v)
    if (!std::isfinite(x)) throw_invalid(std::string(what) + " must be finite");
}

// f_i = rho_i x_i^T R x_i - nu^T x_i + E[(x_i - x^0)^T phi sum_j (x_j - x^0)]
class PortfolioOracle final : public PlayerOracle {
 public:
  PortfolioOracle(const PortfolioConfig& cfg, double rho)
      : cfg_(cfg), rho_(rho), phi_mean_(0.5 * (cfg.phi_low + cfg.phi_high)) {}

  std::size_t noise_dim() const override { return cfg_.assets; }

  void det_grad(std::size_t i, std::span<const double> z, const Profile& y,
                std::span<double> out) const override {
    for (std::size_t l = 0; l < cfg_.assets; ++l)
      out[l] = coordinate(i, l, z, y, phi_mean_);
  }

  void stoch_grad(std::size_t i, std::span<const double> z, const Profile& y,
                  std::span<const double> noise, std::span<double> out) const override {
    for (std::size_t l = 0; l < cfg_.assets; ++l) {
      const double phi = cfg_.phi_low + (cfg_.phi_high - cfg_.phi_low) * noise[l];
      out[l] = coordinate(i, l, z, y, phi);
    }
  }

 private:
  double coordinate(std::size_t i, std::size_t l, std::span<const double> z, const Profile& y,
                    double phi) const {
    double total = z[l] - cfg_.holdings;
    for (std::size_t j = 0; j < y.players(); ++j)
      if (j != i) total += y.block(j)[l] - cfg_.holdings;
    return 2.0 * rho_ * cfg_.risk_diag[l] * z[l] - cfg_.nu[l] + phi * total +
           phi * (z[l] - cfg_.holdings);
  }

  PortfolioConfig cfg_;
  double rho_;
  double phi_mean_;
};

// First stage of the capacity game: C_i'(x_i) - a + b sum_j x_j + b x_i.
class CapacityOracle final : public PlayerOracle {
 public:
  CapacityOracle(double a, double b, double eta) : a_(a), b_(b), eta_(eta) {}

  std::size_t noise_dim() const override { return 0; }

  void det_grad(std::size_t i, std::span<const double> z, const Profile& y,
                std::span<double> out) const override {
    double total = z[0];
    for (std::size_t j = 0; j < y.players(); ++j)
      if (j != i) total += y.block(j)[0];
    out[0] = eta_ * z[0] - a_ + b_ * total + b_ * z[0];
  }

  void stoch_grad(std::size_t i, std::span<const double> z, const Profile& y,
                  std::span<const double>, std::span<double> out) const override {
    det_grad(i, z, y, out);
  }

 private:
  double a_, b_, eta_;
};

}  // namespace

Vec portfolio_rho(const PortfolioConfig& cfg) {
  if (!cfg.rho.empty()) return cfg.rho;
  Vec rho(cfg.players);
  for (std::size_t i = 0; i < cfg.players; ++i)
    rho[i] = 3.0 + static_cast<double>(i + 1) / static_cast<double>(cfg.players);
  return rho;
}

Vec capacity_caps(const CapacityConfig& cfg) {
  if (!cfg.cap.empty()) return cfg.cap;
  Vec caps(cfg.players);
  for (std::size_t i = 0; i < cfg.players; ++i)
    caps[i] = 0.3 + 0.1 * std::sqrt(static_cast<double>(i + 1));
  return caps;
}

Vec capacity_eta(const CapacityConfig& cfg) {
  if (!cfg.eta.empty()) return cfg.eta;
  return Vec(cfg.players, (static_cast<double>(cfg.players) - 2.5) * cfg.b);
}

BuiltGame build_portfolio(const PortfolioConfig& cfg, double mu) {
  if (cfg.players < 1 || cfg.assets < 1) throw_invalid("portfolio: players and assets must be positive");
  if (cfg.nu.size() != cfg.assets || cfg.risk_diag.size() != cfg.assets)
    throw_invalid("portfolio: nu and risk_diag need one entry per asset");
  if (!(cfg.phi_low > 0.0 && cfg.phi_high >= cfg.phi_low))
    throw_invalid("portfolio: phi support must be positive");
  if (!(cfg.cap > 0.0) || !std::isfinite(cfg.cap)) throw_invalid("portfolio: cap must be positive");
  require_finite(cfg.nu, "portfolio nu");
  require_finite(cfg.risk_diag, "portfolio risk_diag");
  for (double r : cfg.risk_diag)
    if (!(r > 0.0)) throw_invalid("portfolio: risk_diag must be positive");
  const Vec rho = portfolio_rho(cfg);
  if (rho.size() != cfg.players) throw_invalid("portfolio: rho needs one entry per player");
  require_finite(rho, "portfolio rho");
  if (!std::isfinite(cfg.holdings) || cfg.holdings < 0.0 || cfg.holdings > cfg.cap)
    throw_invalid("portfolio: holdings must lie in [0, cap]");

  const std::size_t n = cfg.players;
  const double phi_mean = 0.5 * (cfg.phi_low + cfg.phi_high);
  const double r_min = *std::min_element(cfg.risk_diag.begin(), cfg.risk_diag.end());
  const double r_max = *std::max_element(cfg.risk_diag.begin(), cfg.risk_diag.end());

  BuiltGame out;
  out.game.name = "portfolio";
  out.game.mu = mu;
  out.curvature.zeta_min.resize(n);
  out.curvature.zeta_offmax.assign(n, Vec(n, 0.0));
  const double others_hi = static_cast<double>(n - 1) * (cfg.cap - cfg.holdings);
  const double others_lo = -static_cast<double>(n - 1) * cfg.holdings;
  for (std::size_t i = 0; i < n; ++i) {
    PlayerSpec p;
    p.dim = cfg.assets;
    p.set = BoxSet(Vec(cfg.assets, 0.0), Vec(cfg.assets, cfg.cap));
    p.oracle = std::make_shared<PortfolioOracle>(cfg, rho[i]);
    // The sampled gradient is affine in (z_l, rival sum, phi_l), so its
    // coordinatewise maximum modulus is attained at a vertex.
    double m2 = 0.0;
    for (std::size_t l = 0; l < cfg.assets; ++l) {
      double best = 0.0;
      for (double z : {0.0, cfg.cap})
        for (double others : {others_lo, others_hi})
          for (double phi : {cfg.phi_low, cfg.phi_high}) {
            const double own = z - cfg.holdings;
            const double g = 2.0 * rho[i] * cfg.risk_diag[l] * z - cfg.nu[l] +
                             phi * (own + others) + phi * own;
            best = std::max(best, std::abs(g));
          }
      m2 += best * best;
    }
    p.grad_bound = std::sqrt(m2);
    p.lipschitz = 2.0 * rho[i] * r_max + 2.0 * phi_mean;
    out.game.players.push_back(std::move(p));
    out.curvature.zeta_min[i] = 2.0 * rho[i] * r_min + 2.0 * phi_mean;
    for (std::size_t j = 0; j < n; ++j)
      if (j != i) out.curvature.zeta_offmax[i][j] = phi_mean;
    const double rhs = static_cast<double>(n - 1) * phi_mean;
    if (!(out.curvature.zeta_min[i] > rhs)) {
      out.condition_ok = false;
      out.warnings.push_back("portfolio: lambda_min(2 rho_i R + 2 Phi) <= (N - 1) ||Phi|| for player " +
                             std::to_string(i + 1));
    }
  }
  out.game.validate();
  return out;
}

BuiltGame build_capacity(const CapacityConfig& cfg, double mu) {
  if (cfg.players < 1) throw_invalid("capacity: at least one player is required");
  if (!(cfg.b > 0.0) || !std::isfinite(cfg.a)) throw_invalid("capacity: b must be positive and a finite");
  const Vec caps = capacity_caps(cfg);
  const Vec eta = capacity_eta(cfg);
  if (caps.size() != cfg.players || eta.size() != cfg.players)
    throw_invalid("capacity: cap and eta need one entry per player");
  for (double c : caps)
    if (!(c >= 0.0) || !std::isfinite(c)) throw_invalid("capacity: caps must be nonnegative");
  for (double e : eta)
    if (!(e > 0.0) || !std::isfinite(e)) throw_invalid("capacity: eta must be positive");

  std::shared_ptr<const RecourseProblem> recourse;
  if (cfg.recourse) recourse = make_capacity_recourse(cfg.d_low, cfg.d_high, cfg.h_low, cfg.h_high);

  const std::size_t n = cfg.players;
  double cap_sum = 0.0;
  for (double c : caps) cap_sum += c;
  BuiltGame out;
  out.game.name = "capacity";
  out.game.mu = mu;
  out.curvature.zeta_min.resize(n);
  out.curvature.zeta_offmax.assign(n, Vec(n, 0.0));
  for (std::size_t i = 0; i < n; ++i) {
    PlayerSpec p;
    p.dim = 1;
    p.set = BoxSet({0.0}, {caps[i]});
    p.oracle = std::make_shared<CapacityOracle>(cfg.a, cfg.b, eta[i]);
    double best = 0.0;
    for (double z : {0.0, caps[i]})
      for (double others : {0.0, cap_sum - caps[i]})
        best = std::max(best, std::abs(eta[i] * z - cfg.a + cfg.b * (z + others) + cfg.b * z));
    p.grad_bound = best;
    p.lipschitz = eta[i] + 2.0 * cfg.b + (cfg.recourse ? cfg.h_high : 0.0);
    p.recourse = recourse;
    out.game.players.push_back(std::move(p));
    out.curvature.zeta_min[i] = eta[i] + 2.0 * cfg.b;
    for (std::size_t j = 0; j < n; ++j)
      if (j != i) out.curvature.zeta_offmax[i][j] = cfg.b;
  }
  const double eta_min = *std::min_element(eta.begin(), eta.end());
  if (!(eta_min > (static_cast<double>(n) - 3.0) * cfg.b)) {
    out.condition_ok = false;
    out.warnings.push_back("capacity: min eta_i <= (N - 3) b");
  }
  out.game.validate();
  return out;
}

}  // namespace snbr
