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

#include "snbr/sa.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "snbr/error.hpp"
#include "snbr/recourse.hpp"

namespace snbr {

namespace {

bool geometric(ScheduleKind kind) {
  return kind == ScheduleKind::kSynchronous || kind == ScheduleKind::kRandomized ||
         kind == ScheduleKind::kAsynchronous || kind == ScheduleKind::kCyclic ||
         kind == ScheduleKind::kProtocol;
}

std::uint64_t ceil_checked(double value, const InnerSchedule& s) {
  if (!std::isfinite(value) || value > static_cast<double>(s.ceiling))
    throw Error(ErrorCode::kStepCeiling,
                "inner step count exceeds ceiling of " + std::to_string(s.ceiling));
  return std::max<std::uint64_t>(1, static_cast<std::uint64_t>(std::ceil(value)));
}

double q_of(const InnerSchedule& s, std::size_t i) {
  if (i >= s.q.size()) throw_invalid("schedule has no Q constant for player " + std::to_string(i));
  return s.q[i];
}

}  // namespace

const char* schedule_kind_name(ScheduleKind kind) {
  switch (kind) {
    case ScheduleKind::kSynchronous: return "synchronous";
    case ScheduleKind::kRandomized: return "randomized";
    case ScheduleKind::kAsynchronous: return "asynchronous";
    case ScheduleKind::kCyclic: return "cyclic";
    case ScheduleKind::kPolynomialUnsummable: return "polynomial";
    case ScheduleKind::kFixed: return "fixed";
    case ScheduleKind::kProtocol: return "protocol";
  }
  return "unknown";
}

void InnerSchedule::validate() const {
  if (geometric(kind) && !(eta > 0.0 && eta < 1.0)) throw_invalid("schedule eta must lie in (0,1)");
  for (double v : q)
    if (!(v > 0.0) || !std::isfinite(v)) throw_invalid("Q constants must be positive");
  if (kind == ScheduleKind::kCyclic && players == 0) throw_invalid("cyclic schedule needs N");
  if (kind == ScheduleKind::kFixed && count == 0) throw_invalid("fixed schedule needs count >= 1");
  if (kind == ScheduleKind::kPolynomialUnsummable && !(exponent > 0.0))
    throw_invalid("polynomial exponent must be positive");
  if (kind == ScheduleKind::kProtocol && (!(power > 0.0) || offset < 0.0))
    throw_invalid("protocol schedule needs power > 0 and offset >= 0");
  if (ceiling == 0) throw_invalid("step ceiling must be positive");
}

double q_constant_smooth(double grad_bound, double mu, double diam) {
  return 2.0 * grad_bound * grad_bound / (mu * mu) + 2.0 * diam * diam;
}

double q_constant_recourse(double ms, double mc, double grad_bound, double mu, double diam) {
  return 4.0 * (ms * ms + mc * mc + grad_bound * grad_bound) / (mu * mu) + 4.0 * diam * diam;
}

Vec q_constants(const GameSpec& game) {
  Vec q;
  q.reserve(game.size());
  for (const auto& p : game.players) {
    const double d = diameter(p.set);
    if (p.recourse)
      q.push_back(q_constant_recourse(p.recourse->ms, p.recourse->mc, p.grad_bound, game.mu, d));
    else
      q.push_back(q_constant_smooth(p.grad_bound, game.mu, d));
  }
  return q;
}

std::uint64_t steps_for(const InnerSchedule& s, std::size_t i, std::uint64_t k,
                        std::uint64_t beta) {
  const double kd = static_cast<double>(k);
  const double bd = static_cast<double>(beta);
  switch (s.kind) {
    case ScheduleKind::kSynchronous:
    case ScheduleKind::kAsynchronous:
      return ceil_checked(q_of(s, i) / std::pow(s.eta, 2.0 * (kd + 1.0)), s);
    case ScheduleKind::kRandomized:
      return ceil_checked(q_of(s, i) / std::pow(s.eta, 2.0 * (bd + 1.0)), s);
    case ScheduleKind::kCyclic:
      return ceil_checked(
          q_of(s, i) / std::pow(s.eta, 2.0 + 2.0 * kd / static_cast<double>(s.players)), s);
    case ScheduleKind::kPolynomialUnsummable:
      return ceil_checked(std::pow(kd, s.exponent), s);
    case ScheduleKind::kFixed:
      return ceil_checked(static_cast<double>(s.count), s);
    case ScheduleKind::kProtocol: {
      const double m = (s.use_beta ? bd : kd) + s.offset;
      return ceil_checked(std::pow(s.eta, -s.power * m), s);
    }
  }
  throw_invalid("unknown schedule kind");
}

double accuracy_for(const InnerSchedule& s, std::size_t i, std::uint64_t k, std::uint64_t beta) {
  const double kd = static_cast<double>(k);
  const double bd = static_cast<double>(beta);
  switch (s.kind) {
    case ScheduleKind::kSynchronous:
      return std::pow(s.eta, kd + 1.0);
    case ScheduleKind::kRandomized:
      return std::pow(s.eta, bd + 1.0);
    case ScheduleKind::kAsynchronous:
      return std::pow(s.eta, bd);
    case ScheduleKind::kCyclic: {
      const double n = static_cast<double>(s.players);
      return std::pow(s.eta, std::ceil((kd + 1.0) / n));
    }
    case ScheduleKind::kPolynomialUnsummable:
    case ScheduleKind::kFixed:
    case ScheduleKind::kProtocol:
      return std::sqrt(q_of(s, i) / static_cast<double>(steps_for(s, i, k, beta)));
  }
  throw_invalid("unknown schedule kind");
}

Vec sa_solve(const GameSpec& game, std::size_t i, const Profile& anchor,
             std::span<const double> start, std::uint64_t steps, SampleStream& stream) {
  const PlayerSpec& p = game.players.at(i);
  if (steps < 1) throw_invalid("sa_solve: steps must be at least 1");
  if (!p.set.contains(start)) throw_invalid("sa_solve: infeasible start");
  const auto y = anchor.block(i);
  const double mu = game.mu;
  Vec z(start.begin(), start.end());
  Vec g(p.dim);
  Vec noise(p.oracle->noise_dim());
  for (std::uint64_t t = 1; t < steps; ++t) {
    stream.fill_uniform(noise);
    p.oracle->stoch_grad(i, z, anchor, noise, g);
    const double gamma = 1.0 / (mu * static_cast<double>(t + 1));
    for (std::size_t l = 0; l < z.size(); ++l) {
      const double step = z[l] - gamma * (g[l] + mu * (z[l] - y[l]));
      z[l] = std::clamp(step, p.set.lower[l], p.set.upper[l]);
    }
  }
  return z;
}

}  // namespace snbr
