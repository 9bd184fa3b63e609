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

// Players, box strategy sets, strategy profiles and first-order oracles.

#ifndef SNBR_GAME_HPP_
#define SNBR_GAME_HPP_

#include <cstddef>
#include <cstdint>
#include <memory>
#include <random>
#include <span>
#include <string>
#include <vector>

namespace snbr {

using Vec = std::vector<double>;

// Axis-aligned box [lower, upper] in R^n.
struct BoxSet {
  Vec lower;
  Vec upper;

  BoxSet() = default;
  BoxSet(Vec lo, Vec up);

  std::size_t dim() const { return lower.size(); }
  bool contains(std::span<const double> x) const;
};

Vec project(const BoxSet& set, std::span<const double> point);
void project_inplace(const BoxSet& set, std::span<double> point);
double diameter(const BoxSet& set);

// Dense strategy profile with a block index table.
class Profile {
 public:
  Profile() = default;
  explicit Profile(const std::vector<std::size_t>& dims, double fill = 0.0);

  std::size_t players() const { return offsets_.empty() ? 0 : offsets_.size() - 1; }
  std::size_t size() const { return data_.size(); }
  std::size_t block_dim(std::size_t i) const { return offsets_[i + 1] - offsets_[i]; }

  std::span<double> block(std::size_t i) {
    return {data_.data() + offsets_[i], block_dim(i)};
  }
  std::span<const double> block(std::size_t i) const {
    return {data_.data() + offsets_[i], block_dim(i)};
  }
  std::span<double> flat() { return data_; }
  std::span<const double> flat() const { return data_; }
  const std::vector<std::size_t>& offsets() const { return offsets_; }

  bool operator==(const Profile& other) const = default;

 private:
  Vec data_;
  std::vector<std::size_t> offsets_;
};

// Stacked Euclidean distance ||x - y||.
double distance(const Profile& x, const Profile& y);
// Blockwise distance ||x_i - y_i||.
double block_distance(const Profile& x, const Profile& y, std::size_t i);

// Purposes a stream can serve; part of the stream key.
enum class StreamTag : std::uint64_t {
  kGradient = 1,
  kActivation = 2,
  kDelay = 3,
  kUpdateSets = 4,
  kAuxiliary = 5,
};

struct StreamKey {
  std::uint64_t trajectory = 0;
  StreamTag tag = StreamTag::kGradient;
  std::uint64_t player = 0;
  std::uint64_t k = 0;
};

// Keyed pseudo-random stream. The inner iteration index t is the cursor
// position: step t of a subproblem consumes the t-th group of draws.
class SampleStream {
 public:
  SampleStream(std::uint64_t seed, const StreamKey& key);

  std::uint64_t next() { return engine_(); }
  // Uniform double on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  void fill_uniform(std::span<double> out);
  // Uniform integer on {0, ..., n-1}; n must be positive.
  std::uint64_t below(std::uint64_t n);

  std::uint64_t seed() const { return seed_; }
  const StreamKey& key() const { return key_; }

 private:
  std::uint64_t seed_;
  StreamKey key_;
  std::mt19937_64 engine_;
};

// Gradient oracle of one player. `i` is the player's index, `z` the candidate
// own block and `y` supplies the rival blocks (block i of y is ignored).
class PlayerOracle {
 public:
  virtual ~PlayerOracle() = default;
  // Number of uniform draws consumed by one stochastic gradient sample.
  virtual std::size_t noise_dim() const = 0;
  virtual void det_grad(std::size_t i, std::span<const double> z, const Profile& y,
                        std::span<double> out) const = 0;
  virtual void stoch_grad(std::size_t i, std::span<const double> z, const Profile& y,
                          std::span<const double> noise, std::span<double> out) const = 0;
};

struct RecourseProblem;

struct PlayerSpec {
  std::size_t dim = 0;
  BoxSet set;
  std::shared_ptr<const PlayerOracle> oracle;
  // M_i: bound on the second moment of the sampled gradient.
  double grad_bound = 0.0;
  // Lipschitz constant of the own-block gradient (deterministic part plus
  // expected recourse), used by the reference solvers.
  double lipschitz = 1.0;
  std::shared_ptr<const RecourseProblem> recourse;
};

struct GameSpec {
  std::string name;
  std::vector<PlayerSpec> players;
  double mu = 1.0;

  std::size_t size() const { return players.size(); }
  std::vector<std::size_t> dims() const;
  std::size_t total_dim() const;
  // Throws invalid-argument on inconsistent fields.
  void validate() const;
  Profile lower_profile() const;
  bool feasible(const Profile& x) const;
};

Vec det_grad(const GameSpec& game, std::size_t i, const Profile& x);
// One draw of the sampled gradient at the own block of `x`.
Vec sample_stoch_grad(const GameSpec& game, std::size_t i, const Profile& x,
                      SampleStream& stream);

}  // namespace snbr

#endif  // SNBR_GAME_HPP_
