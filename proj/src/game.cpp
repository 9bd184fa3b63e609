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

#include "snbr/game.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "snbr/error.hpp"

namespace snbr {

namespace {

std::uint32_t lo32(std::uint64_t v) { return static_cast<std::uint32_t>(v); }
std::uint32_t hi32(std::uint64_t v) { return static_cast<std::uint32_t>(v >> 32); }

}  // namespace

BoxSet::BoxSet(Vec lo, Vec up) : lower(std::move(lo)), upper(std::move(up)) {
  if (lower.size() != upper.size()) throw_invalid("box bounds differ in length");
  for (std::size_t j = 0; j < lower.size(); ++j) {
    if (!std::isfinite(lower[j]) || !std::isfinite(upper[j]))
      throw_invalid("box bounds must be finite");
    if (lower[j] > upper[j]) throw_invalid("box lower bound exceeds upper bound");
  }
}

bool BoxSet::contains(std::span<const double> x) const {
  if (x.size() != dim()) return false;
  for (std::size_t j = 0; j < x.size(); ++j)
    if (!(x[j] >= lower[j] && x[j] <= upper[j])) return false;
  return true;
}

Vec project(const BoxSet& set, std::span<const double> point) {
  if (point.size() != set.dim()) throw_invalid("projection: dimension mismatch");
  Vec out(point.begin(), point.end());
  project_inplace(set, out);
  return out;
}

void project_inplace(const BoxSet& set, std::span<double> point) {
  if (point.size() != set.dim()) throw_invalid("projection: dimension mismatch");
  for (std::size_t j = 0; j < point.size(); ++j)
    point[j] = std::clamp(point[j], set.lower[j], set.upper[j]);
}

double diameter(const BoxSet& set) {
  double s = 0.0;
  for (std::size_t j = 0; j < set.dim(); ++j) {
    const double w = set.upper[j] - set.lower[j];
    s += w * w;
  }
  return std::sqrt(s);
}

Profile::Profile(const std::vector<std::size_t>& dims, double fill) {
  offsets_.assign(dims.size() + 1, 0);
  for (std::size_t i = 0; i < dims.size(); ++i) offsets_[i + 1] = offsets_[i] + dims[i];
  data_.assign(offsets_.back(), fill);
}

double distance(const Profile& x, const Profile& y) {
  if (x.size() != y.size()) throw_invalid("distance: profile sizes differ");
  double s = 0.0;
  auto a = x.flat();
  auto b = y.flat();
  for (std::size_t j = 0; j < a.size(); ++j) s += (a[j] - b[j]) * (a[j] - b[j]);
  return std::sqrt(s);
}

double block_distance(const Profile& x, const Profile& y, std::size_t i) {
  auto a = x.block(i);
  auto b = y.block(i);
  double s = 0.0;
  for (std::size_t j = 0; j < a.size(); ++j) s += (a[j] - b[j]) * (a[j] - b[j]);
  return std::sqrt(s);
}

SampleStream::SampleStream(std::uint64_t seed, const StreamKey& key) : seed_(seed), key_(key) {
  std::seed_seq seq{lo32(seed),
                    hi32(seed),
                    lo32(key.trajectory),
                    hi32(key.trajectory),
                    static_cast<std::uint32_t>(key.tag),
                    lo32(key.player),
                    hi32(key.player),
                    lo32(key.k),
                    hi32(key.k)};
  engine_.seed(seq);
}

void SampleStream::fill_uniform(std::span<double> out) {
  for (double& v : out) v = uniform();
}

std::uint64_t SampleStream::below(std::uint64_t n) {
  if (n == 0) throw_invalid("below: empty range");
  // Rejection sampling removes modulo bias.
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                              std::numeric_limits<std::uint64_t>::max() % n;
  std::uint64_t v;
  do {
    v = engine_();
  } while (v >= limit);
  return v % n;
}

std::vector<std::size_t> GameSpec::dims() const {
  std::vector<std::size_t> d;
  d.reserve(players.size());
  for (const auto& p : players) d.push_back(p.dim);
  return d;
}

std::size_t GameSpec::total_dim() const {
  std::size_t n = 0;
  for (const auto& p : players) n += p.dim;
  return n;
}

void GameSpec::validate() const {
  if (players.empty()) throw_invalid("game has no players");
  if (!(mu > 0.0) || !std::isfinite(mu)) throw_invalid("proximal weight mu must be positive");
  for (std::size_t i = 0; i < players.size(); ++i) {
    const auto& p = players[i];
    if (p.dim == 0) throw_invalid("player dimension must be positive");
    if (p.set.dim() != p.dim) throw_invalid("player box does not match its dimension");
    if (!p.oracle) throw_invalid("player has no gradient oracle");
    if (!(p.grad_bound >= 0.0)) throw_invalid("gradient bound must be nonnegative");
    if (!(p.lipschitz > 0.0)) throw_invalid("Lipschitz constant must be positive");
  }
}

Profile GameSpec::lower_profile() const {
  Profile x(dims());
  for (std::size_t i = 0; i < players.size(); ++i) {
    auto b = x.block(i);
    std::copy(players[i].set.lower.begin(), players[i].set.lower.end(), b.begin());
  }
  return x;
}

bool GameSpec::feasible(const Profile& x) const {
  if (x.players() != players.size()) return false;
  for (std::size_t i = 0; i < players.size(); ++i)
    if (!players[i].set.contains(x.block(i))) return false;
  return true;
}

Vec det_grad(const GameSpec& game, std::size_t i, const Profile& x) {
  const auto& p = game.players.at(i);
  Vec g(p.dim);
  p.oracle->det_grad(i, x.block(i), x, g);
  return g;
}

Vec sample_stoch_grad(const GameSpec& game, std::size_t i, const Profile& x,
                      SampleStream& stream) {
  const auto& p = game.players.at(i);
  Vec noise(p.oracle->noise_dim());
  stream.fill_uniform(noise);
  Vec g(p.dim);
  p.oracle->stoch_grad(i, x.block(i), x, noise, g);
  return g;
}

}  // namespace snbr
