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

#include "snbr/schemes.hpp"

#include <algorithm>
#include <cmath>

#include "snbr/error.hpp"
#include "snbr/recourse.hpp"

namespace snbr {

namespace {

TrajectoryRecord start_record(const GameSpec& game, const Profile& x0) {
  game.validate();
  if (!game.feasible(x0)) throw_invalid("initial profile is infeasible");
  TrajectoryRecord rec;
  const std::size_t n = game.size();
  rec.x.push_back(x0);
  rec.beta.emplace_back(n, 0);
  rec.sg_cum.emplace_back(n, 0);
  rec.comm_rounds.push_back(0);
  return rec;
}

void close_iteration(TrajectoryRecord& rec, Profile next, std::vector<std::uint64_t> beta,
                     std::vector<std::uint64_t> sg, std::vector<std::size_t> updated) {
  rec.x.push_back(std::move(next));
  rec.beta.push_back(std::move(beta));
  rec.sg_cum.push_back(std::move(sg));
  rec.comm_rounds.push_back(rec.comm_rounds.back() + 1);
  rec.updated.push_back(std::move(updated));
}

void mark_aborted(TrajectoryRecord& rec, const Error& e) {
  if (e.code() != ErrorCode::kStepCeiling) throw e;
  rec.aborted = true;
  rec.error = e.what();
}

SampleStream gradient_stream(const SchemeConfig& c, std::size_t trajectory, std::size_t i,
                             std::size_t k) {
  return SampleStream(c.seed, {trajectory, StreamTag::kGradient, i, k});
}

}  // namespace

const char* scheme_kind_name(SchemeKind kind) {
  switch (kind) {
    case SchemeKind::kSynchronous: return "synchronous";
    case SchemeKind::kRandomized: return "randomized";
    case SchemeKind::kPoissonClock: return "poisson";
    case SchemeKind::kAsynchronous: return "asynchronous";
    case SchemeKind::kCyclic: return "cyclic";
  }
  return "unknown";
}

void SchemeConfig::validate(std::size_t players) const {
  if (kind == SchemeKind::kRandomized) {
    if (p.size() != players) throw_invalid("randomized scheme needs one probability per player");
    for (double v : p)
      if (!(v > 0.0 && v <= 1.0)) throw_invalid("activation probabilities must lie in (0,1]");
  }
  if (kind == SchemeKind::kPoissonClock) {
    if (rates.size() != players) throw_invalid("Poisson clock needs one rate per player");
    for (double v : rates)
      if (!(v > 0.0) || !std::isfinite(v)) throw_invalid("clock rates must be positive");
  }
  if (b1 < 1) throw_invalid("B1 must be at least 1");
  if (kind == SchemeKind::kAsynchronous && !(update_prob > 0.0 && update_prob <= 1.0))
    throw_invalid("update probability must lie in (0,1]");
  if (trajectories < 1) throw_invalid("at least one trajectory is required");
}

DelayBuffer::DelayBuffer(std::size_t b2, const Profile& x0) : b2_(b2), ring_(b2 + 1, x0) {}

void DelayBuffer::push(const Profile& x) {
  ++k_;
  ring_[k_ % ring_.size()] = x;
}

const Profile& DelayBuffer::at_age(std::size_t age) const {
  const std::uint64_t a = std::min<std::uint64_t>(age, k_);
  return ring_[(k_ - a) % ring_.size()];
}

Profile delayed_view(const DelayBuffer& buffer, std::size_t i, std::span<const std::size_t> tau) {
  const Profile& now = buffer.at_age(0);
  if (tau.size() != now.players()) throw_invalid("delayed_view: one delay per player required");
  Profile view = now;
  for (std::size_t j = 0; j < tau.size(); ++j) {
    if (tau[j] > buffer.bound()) throw_invalid("delayed_view: delay exceeds B2");
    if (j == i) continue;
    auto src = buffer.at_age(tau[j]).block(j);
    std::copy(src.begin(), src.end(), view.block(j).begin());
  }
  return view;
}

void validate_update_sets(const UpdateSets& sets, std::size_t players, std::size_t b1) {
  if (b1 < 1) throw_invalid("B1 must be at least 1");
  for (const auto& s : sets)
    for (std::size_t i : s)
      if (i >= players) throw_invalid("update set names an unknown player");
  for (std::size_t start = 0; start + b1 <= sets.size(); start += b1) {
    std::vector<bool> seen(players, false);
    for (std::size_t k = start; k < start + b1; ++k)
      for (std::size_t i : sets[k]) seen[i] = true;
    if (std::find(seen.begin(), seen.end(), false) != seen.end())
      throw_invalid("update sets violate the B1 window requirement at iteration " +
                    std::to_string(start));
  }
}

UpdateSets generate_update_sets(const SchemeConfig& c, std::size_t players) {
  UpdateSets sets(c.iterations);
  if (c.kind == SchemeKind::kCyclic) {
    for (std::size_t k = 0; k < c.iterations; ++k) sets[k] = {k % players};
    return sets;
  }
  if (!c.update_sets.empty()) {
    if (c.update_sets.size() < c.iterations) throw_invalid("explicit update sets are too short");
    sets.assign(c.update_sets.begin(), c.update_sets.begin() + c.iterations);
    for (auto& s : sets) std::sort(s.begin(), s.end());
    validate_update_sets(sets, players, c.b1);
    return sets;
  }
  if (c.b1 == 1) {
    for (auto& s : sets) {
      s.resize(players);
      for (std::size_t i = 0; i < players; ++i) s[i] = i;
    }
    return sets;
  }
  SampleStream rng(c.seed, {0, StreamTag::kUpdateSets, 0, 0});
  std::vector<bool> seen(players, false);
  for (std::size_t k = 0; k < c.iterations; ++k) {
    std::vector<bool> in(players, false);
    for (std::size_t i = 0; i < players; ++i) in[i] = rng.uniform() < c.update_prob;
    const bool window_end = (k + 1) % c.b1 == 0 || k + 1 == c.iterations;
    for (std::size_t i = 0; i < players; ++i) {
      if (window_end && !seen[i] && !in[i]) in[i] = true;
      if (in[i]) {
        seen[i] = true;
        sets[k].push_back(i);
      }
    }
    if (window_end) seen.assign(players, false);
  }
  validate_update_sets(sets, players, c.b1);
  return sets;
}

UpdateSets scheme_update_sets(const SchemeConfig& config, std::size_t players) {
  if (config.kind == SchemeKind::kAsynchronous || config.kind == SchemeKind::kCyclic)
    return generate_update_sets(config, players);
  return {};
}

Vec inner_solve(const GameSpec& game, std::size_t i, const Profile& anchor,
                std::span<const double> start, std::uint64_t steps, SampleStream& stream) {
  if (game.players.at(i).recourse) return sa_solve_recourse(game, i, anchor, start, steps, stream);
  return sa_solve(game, i, anchor, start, steps, stream);
}

TrajectoryRecord run_synchronous(const GameSpec& game, const SchemeConfig& config,
                                 const InnerSchedule& schedule, std::size_t trajectory,
                                 const Profile& x0) {
  TrajectoryRecord rec = start_record(game, x0);
  const std::size_t n = game.size();
  try {
    for (std::size_t k = 0; k < config.iterations; ++k) {
      const Profile& x = rec.x.back();
      Profile next = x;
      auto beta = rec.beta.back();
      auto sg = rec.sg_cum.back();
      std::vector<std::size_t> updated;
      for (std::size_t i = 0; i < n; ++i) {
        const std::uint64_t j = steps_for(schedule, i, k, beta[i]);
        SampleStream stream = gradient_stream(config, trajectory, i, k);
        const Vec z = inner_solve(game, i, x, x.block(i), j, stream);
        std::copy(z.begin(), z.end(), next.block(i).begin());
        sg[i] += j - 1;
        ++beta[i];
        updated.push_back(i);
      }
      close_iteration(rec, std::move(next), std::move(beta), std::move(sg), std::move(updated));
    }
  } catch (const Error& e) {
    mark_aborted(rec, e);
  }
  return rec;
}

TrajectoryRecord run_randomized(const GameSpec& game, const SchemeConfig& config,
                                const InnerSchedule& schedule, std::size_t trajectory,
                                const Profile& x0) {
  config.validate(game.size());
  TrajectoryRecord rec = start_record(game, x0);
  const std::size_t n = game.size();
  const bool poisson = config.kind == SchemeKind::kPoissonClock;
  double rate_sum = 0.0;
  for (double r : config.rates) rate_sum += r;
  try {
    for (std::size_t k = 0; k < config.iterations; ++k) {
      SampleStream act(config.seed, {trajectory, StreamTag::kActivation, 0, k});
      std::vector<bool> chi(n, false);
      if (poisson) {
        const double u = act.uniform() * rate_sum;
        double acc = 0.0;
        std::size_t pick = n - 1;
        for (std::size_t i = 0; i < n; ++i) {
          acc += config.rates[i];
          if (u < acc) {
            pick = i;
            break;
          }
        }
        chi[pick] = true;
      } else {
        for (std::size_t i = 0; i < n; ++i) chi[i] = act.uniform() < config.p[i];
      }
      const Profile& x = rec.x.back();
      Profile next = x;
      auto beta = rec.beta.back();
      auto sg = rec.sg_cum.back();
      std::vector<std::size_t> updated;
      for (std::size_t i = 0; i < n; ++i) {
        if (!chi[i]) continue;
        const std::uint64_t j = steps_for(schedule, i, k, beta[i]);
        SampleStream stream = gradient_stream(config, trajectory, i, k);
        const Vec z = inner_solve(game, i, x, x.block(i), j, stream);
        std::copy(z.begin(), z.end(), next.block(i).begin());
        sg[i] += j - 1;
        ++beta[i];
        updated.push_back(i);
      }
      close_iteration(rec, std::move(next), std::move(beta), std::move(sg), std::move(updated));
    }
  } catch (const Error& e) {
    mark_aborted(rec, e);
  }
  return rec;
}

TrajectoryRecord run_asynchronous(const GameSpec& game, const SchemeConfig& config,
                                  const InnerSchedule& schedule, const UpdateSets& sets,
                                  std::size_t trajectory, const Profile& x0) {
  TrajectoryRecord rec = start_record(game, x0);
  const std::size_t n = game.size();
  if (sets.size() < config.iterations) throw_invalid("not enough update sets for the run");
  DelayBuffer buffer(config.b2, x0);
  std::vector<std::size_t> tau(n, 0);
  try {
    for (std::size_t k = 0; k < config.iterations; ++k) {
      SampleStream delays(config.seed, {trajectory, StreamTag::kDelay, 0, k});
      const Profile& x = rec.x.back();
      Profile next = x;
      auto beta = rec.beta.back();
      auto sg = rec.sg_cum.back();
      std::vector<std::size_t> updated;
      for (std::size_t i : sets[k]) {
        for (std::size_t j = 0; j < n; ++j) {
          if (j == i) {
            tau[j] = 0;
          } else if (config.delay == DelayMode::kFixed) {
            tau[j] = config.b2;
          } else {
            tau[j] = static_cast<std::size_t>(delays.below(config.b2 + 1));
          }
        }
        const Profile view = delayed_view(buffer, i, tau);
        const std::uint64_t j = steps_for(schedule, i, k, beta[i]);
        SampleStream stream = gradient_stream(config, trajectory, i, k);
        const Vec z = inner_solve(game, i, view, x.block(i), j, stream);
        std::copy(z.begin(), z.end(), next.block(i).begin());
        sg[i] += j - 1;
        ++beta[i];
        updated.push_back(i);
      }
      buffer.push(next);
      close_iteration(rec, std::move(next), std::move(beta), std::move(sg), std::move(updated));
    }
  } catch (const Error& e) {
    mark_aborted(rec, e);
  }
  return rec;
}

TrajectoryRecord run_scheme(const GameSpec& game, const SchemeConfig& config,
                            const InnerSchedule& schedule, const UpdateSets& sets,
                            std::size_t trajectory, const Profile& x0) {
  switch (config.kind) {
    case SchemeKind::kSynchronous:
      return run_synchronous(game, config, schedule, trajectory, x0);
    case SchemeKind::kRandomized:
    case SchemeKind::kPoissonClock:
      return run_randomized(game, config, schedule, trajectory, x0);
    case SchemeKind::kAsynchronous:
    case SchemeKind::kCyclic:
      return run_asynchronous(game, config, schedule, sets, trajectory, x0);
  }
  throw_invalid("unknown scheme kind");
}

TrajectoryRecord run_sg_baseline(const GameSpec& game, std::size_t rounds, double modulus,
                                 std::uint64_t seed, std::size_t trajectory, const Profile& x0) {
  if (!(modulus > 0.0)) throw_invalid("SG baseline modulus must be positive");
  TrajectoryRecord rec = start_record(game, x0);
  const std::size_t n = game.size();
  for (std::size_t k = 0; k < rounds; ++k) {
    const Profile& x = rec.x.back();
    Profile next = x;
    auto beta = rec.beta.back();
    auto sg = rec.sg_cum.back();
    std::vector<std::size_t> updated;
    const double gamma = 1.0 / (modulus * static_cast<double>(k + 1));
    for (std::size_t i = 0; i < n; ++i) {
      const PlayerSpec& p = game.players[i];
      SampleStream stream(seed, {trajectory, StreamTag::kGradient, i, k});
      Vec g = sample_stoch_grad(game, i, x, stream);
      if (p.recourse) {
        const RecourseProblem& r = *p.recourse;
        Vec u(r.sample_dim()), omega(r.sample_dim());
        stream.fill_uniform(u);
        r.map_sample(u, omega);
        const Vec s = recourse_subgradient(r, x.block(i), omega);
        Vec c(p.dim, 0.0);
        if (r.cost_grad) r.cost_grad(x.block(i), c);
        for (std::size_t l = 0; l < p.dim; ++l) g[l] += s[l] + c[l];
      }
      auto blk = next.block(i);
      const auto cur = x.block(i);
      for (std::size_t l = 0; l < p.dim; ++l)
        blk[l] = std::clamp(cur[l] - gamma * g[l], p.set.lower[l], p.set.upper[l]);
      sg[i] += 1;
      ++beta[i];
      updated.push_back(i);
    }
    close_iteration(rec, std::move(next), std::move(beta), std::move(sg), std::move(updated));
  }
  return rec;
}

}  // namespace snbr
