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

#ifndef SNBR_TESTS_FIXTURES_HPP_
#define SNBR_TESTS_FIXTURES_HPP_

#include <algorithm>
#include <cmath>
#include <memory>
#include <vector>

#include "snbr/game.hpp"

namespace snbr::testing {

// f_i(x) = 0.5 * ||x_i - c_i||^2 + coupling * x_i^T sum_{j != i} x_j, with
// gradient noise amplitude * (2u - 1) per coordinate.
class QuadraticOracle final : public PlayerOracle {
 public:
  QuadraticOracle(Vec target, double coupling, double amplitude)
      : target_(std::move(target)), coupling_(coupling), amplitude_(amplitude) {}

  std::size_t noise_dim() const override { return amplitude_ > 0.0 ? target_.size() : 0; }

  void det_grad(std::size_t i, std::span<const double> z, const Profile& y,
                std::span<double> out) const override {
    for (std::size_t l = 0; l < z.size(); ++l) {
      double others = 0.0;
      for (std::size_t j = 0; j < y.players(); ++j)
        if (j != i) others += y.block(j)[l];
      out[l] = z[l] - target_[l] + coupling_ * others;
    }
  }

  void stoch_grad(std::size_t i, std::span<const double> z, const Profile& y,
                  std::span<const double> noise, std::span<double> out) const override {
    det_grad(i, z, y, out);
    if (amplitude_ > 0.0)
      for (std::size_t l = 0; l < z.size(); ++l) out[l] += amplitude_ * (2.0 * noise[l] - 1.0);
  }

 private:
  Vec target_;
  double coupling_;
  double amplitude_;
};

// One block per target, box [lo, hi]^dim, gradient bound from the box vertices.
inline GameSpec quadratic_game(const std::vector<Vec>& targets, double lo, double hi, double mu,
                               double coupling = 0.0, double amplitude = 0.0) {
  GameSpec g;
  g.name = "quadratic";
  g.mu = mu;
  const double n = static_cast<double>(targets.size());
  for (const auto& c : targets) {
    PlayerSpec p;
    p.dim = c.size();
    p.set = BoxSet(Vec(c.size(), lo), Vec(c.size(), hi));
    p.oracle = std::make_shared<QuadraticOracle>(c, coupling, amplitude);
    double m2 = 0.0;
    for (double t : c) {
      const double span = std::max(std::abs(hi - t), std::abs(lo - t));
      const double rival = std::abs(coupling) * (n - 1.0) * std::max(std::abs(lo), std::abs(hi));
      const double m = span + rival + amplitude;
      m2 += m * m;
    }
    p.grad_bound = std::sqrt(m2);
    p.lipschitz = 1.0;
    g.players.push_back(std::move(p));
  }
  return g;
}

inline Profile make_profile(const std::vector<Vec>& blocks) {
  std::vector<std::size_t> dims;
  for (const auto& b : blocks) dims.push_back(b.size());
  Profile x(dims);
  for (std::size_t i = 0; i < blocks.size(); ++i)
    std::copy(blocks[i].begin(), blocks[i].end(), x.block(i).begin());
  return x;
}

}  // namespace snbr::testing

#endif  // SNBR_TESTS_FIXTURES_HPP_
