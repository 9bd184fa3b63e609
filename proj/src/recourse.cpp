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

#include "snbr/recourse.hpp"

#include <algorithm>
#include <cmath>

#include <boost/math/quadrature/gauss.hpp>

#include "snbr/error.hpp"

namespace snbr {

namespace {

struct Rule {
  std::vector<double> x;  // nodes on [-1, 1]
  std::vector<double> w;
};

template <unsigned N>
Rule make_rule() {
  using G = boost::math::quadrature::gauss<double, N>;
  const auto& a = G::abscissa();
  const auto& w = G::weights();
  Rule r;
  for (std::size_t k = 0; k < a.size(); ++k) {
    if (a[k] == 0.0) {
      r.x.push_back(0.0);
      r.w.push_back(w[k]);
    } else {
      r.x.push_back(a[k]);
      r.w.push_back(w[k]);
      r.x.push_back(-a[k]);
      r.w.push_back(w[k]);
    }
  }
  return r;
}

const Rule& rule(int nodes) {
  static const Rule r64 = make_rule<64>();
  static const Rule r128 = make_rule<128>();
  if (nodes == 64) return r64;
  if (nodes == 128) return r128;
  throw_invalid("quadrature supports 64 or 128 nodes");
}

Eigen::VectorXd rhs(const ScenarioData& s, std::span<const double> x) {
  Eigen::Map<const Eigen::VectorXd> xv(x.data(), static_cast<Eigen::Index>(x.size()));
  return s.h - s.T * xv;
}

void check_scenario(const ScenarioData& s, std::size_t dim) {
  const auto m = s.W.rows();
  if (s.T.rows() != m || s.T.cols() != static_cast<Eigen::Index>(dim) || s.h.size() != m ||
      s.d.size() != s.W.cols())
    throw_invalid("scenario data has inconsistent dimensions");
  if (s.H.size() > 0 && (s.H.rows() != s.W.cols() || s.H.cols() != s.W.cols()))
    throw_invalid("scenario H has wrong shape");
}

[[noreturn]] void scenario_failure(SolveStatus st) {
  if (st == SolveStatus::kInfeasible)
    throw Error(ErrorCode::kInfeasible, "second stage infeasible: recourse is not complete");
  if (st == SolveStatus::kUnbounded)
    throw Error(ErrorCode::kUnbounded, "second stage unbounded: dual feasible set is empty");
  throw Error(ErrorCode::kIterLimit, "second stage solve hit its iteration limit");
}

SolveOutcome solve_primal_qp(const ScenarioData& s, std::span<const double> x) {
  const auto nq = s.W.cols();
  QuadraticProgram qp;
  qp.H = s.H;
  qp.d = s.d;
  qp.A_eq = s.W;
  qp.b_eq = rhs(s, x);
  qp.G = -Eigen::MatrixXd::Identity(nq, nq);
  qp.g = Eigen::VectorXd::Zero(nq);
  return qp_active_set(qp);
}

void subgradient_into(const RecourseProblem& p, std::span<const double> x,
                      std::span<const double> omega, std::span<double> out) {
  if (p.kind == RecourseKind::kCapacity) {
    const double d = omega[0];
    const double h = omega[1];
    out[0] = (x[0] < d / h) ? d - h * x[0] : 0.0;
    return;
  }
  const ScenarioData s = p.scenario(omega);
  check_scenario(s, p.dim);
  Eigen::VectorXd pi;
  if (p.kind == RecourseKind::kLinear || s.H.size() == 0) {
    LinearProgram lp{s.d, s.W, rhs(s, x)};
    SolveOutcome o = simplex_solve(lp);
    if (o.status != SolveStatus::kOptimal) scenario_failure(o.status);
    pi = o.dual;
  } else {
    SolveOutcome o = qp_active_set(dorn_dual(s, x));
    if (o.status != SolveStatus::kOptimal) scenario_failure(o.status);
    pi = o.primal.tail(s.W.rows());
  }
  const Eigen::VectorXd sg = -s.T.transpose() * pi;
  for (std::size_t l = 0; l < out.size(); ++l) out[l] = sg(static_cast<Eigen::Index>(l));
}

template <typename F>
void for_each_node(const RecourseProblem& p, int nodes, F&& f) {
  const Rule& r = rule(nodes);
  const std::size_t dims = p.sample_dim();
  const std::size_t per = r.x.size();
  double total = 1.0;
  for (std::size_t k = 0; k < dims; ++k) total *= static_cast<double>(per);
  if (total > 5e6) throw_invalid("quadrature grid too large for the recourse support");
  std::vector<std::size_t> idx(dims, 0);
  Vec omega(dims);
  while (true) {
    double weight = 1.0;
    for (std::size_t k = 0; k < dims; ++k) {
      const auto& f_k = p.support[k];
      omega[k] = 0.5 * (f_k.lo + f_k.hi) + 0.5 * (f_k.hi - f_k.lo) * r.x[idx[k]];
      weight *= 0.5 * r.w[idx[k]];  // density 1/(hi-lo) times Jacobian (hi-lo)/2
    }
    f(std::span<const double>(omega), weight);
    std::size_t k = 0;
    while (k < dims && ++idx[k] == per) idx[k++] = 0;
    if (k == dims) break;
  }
}

}  // namespace

void RecourseProblem::map_sample(std::span<const double> u, std::span<double> omega) const {
  for (std::size_t k = 0; k < support.size(); ++k)
    omega[k] = support[k].lo + (support[k].hi - support[k].lo) * u[k];
}

std::shared_ptr<RecourseProblem> make_capacity_recourse(double d_lo, double d_hi, double h_lo,
                                                        double h_hi) {
  if (!(d_lo > 0.0 && d_hi >= d_lo)) throw_invalid("capacity recourse: d support must be positive");
  if (!(h_lo > 0.0 && h_hi >= h_lo)) throw_invalid("capacity recourse: h support must be positive");
  auto p = std::make_shared<RecourseProblem>();
  p->kind = RecourseKind::kCapacity;
  p->dim = 1;
  p->support = {{d_lo, d_hi}, {h_lo, h_hi}};
  p->ms = d_hi;
  return p;
}

double recourse_value(const RecourseProblem& p, std::span<const double> x,
                      std::span<const double> omega) {
  if (x.size() != p.dim) throw_invalid("recourse_value: dimension mismatch");
  if (p.kind == RecourseKind::kCapacity) return scalar_box_qp(omega[0], omega[1], x[0]).value;
  const ScenarioData s = p.scenario(omega);
  check_scenario(s, p.dim);
  if (p.kind == RecourseKind::kLinear || s.H.size() == 0) {
    SolveOutcome o = simplex_solve({s.d, s.W, rhs(s, x)});
    if (o.status != SolveStatus::kOptimal) scenario_failure(o.status);
    return o.objective;
  }
  SolveOutcome o = solve_primal_qp(s, x);
  if (o.status != SolveStatus::kOptimal) scenario_failure(o.status);
  return o.objective;
}

Vec recourse_subgradient(const RecourseProblem& p, std::span<const double> x,
                         std::span<const double> omega) {
  if (x.size() != p.dim) throw_invalid("recourse_subgradient: dimension mismatch");
  Vec out(p.dim);
  subgradient_into(p, x, omega, out);
  return out;
}

QuadraticProgram dorn_dual(const ScenarioData& s, std::span<const double> x) {
  check_scenario(s, x.size());
  const auto nq = s.W.cols();
  const auto m = s.W.rows();
  const Eigen::MatrixXd h = s.H.size() > 0 ? s.H : Eigen::MatrixXd::Zero(nq, nq);
  QuadraticProgram qp;
  qp.sense = Sense::kMax;
  qp.H = Eigen::MatrixXd::Zero(nq + m, nq + m);
  qp.H.topLeftCorner(nq, nq) = h;
  qp.d = Eigen::VectorXd::Zero(nq + m);
  qp.d.tail(m) = rhs(s, x);
  qp.G.resize(nq, nq + m);
  qp.G << -h, s.W.transpose();
  qp.g = s.d;
  return qp;
}

QuadraticProgram capacity_dual(double d, double h, double x) {
  if (!(h > 0.0)) throw_invalid("capacity_dual: h must be positive");
  QuadraticProgram qp;
  qp.H = Eigen::MatrixXd::Zero(2, 2);
  qp.H(0, 0) = h;
  qp.d = Eigen::Vector2d(0.0, x);
  qp.G.resize(2, 2);
  qp.G << -h, -1.0, 0.0, -1.0;
  qp.g = Eigen::Vector2d(-d, 0.0);
  return qp;
}

Vec expected_subgradient(const RecourseProblem& p, std::span<const double> x, int nodes) {
  Vec acc(p.dim, 0.0);
  Vec s(p.dim);
  for_each_node(p, nodes, [&](std::span<const double> omega, double w) {
    subgradient_into(p, x, omega, s);
    for (std::size_t l = 0; l < p.dim; ++l) acc[l] += w * s[l];
  });
  return acc;
}

double expected_value(const RecourseProblem& p, std::span<const double> x, int nodes) {
  double acc = 0.0;
  for_each_node(p, nodes,
                [&](std::span<const double> omega, double w) { acc += w * recourse_value(p, x, omega); });
  return acc;
}

Vec sa_solve_recourse(const GameSpec& game, std::size_t i, const Profile& anchor,
                      std::span<const double> start, std::uint64_t steps, SampleStream& stream) {
  const PlayerSpec& p = game.players.at(i);
  if (!p.recourse) throw_invalid("sa_solve_recourse: player has no recourse attachment");
  if (steps < 1) throw_invalid("sa_solve_recourse: steps must be at least 1");
  if (!p.set.contains(start)) throw_invalid("sa_solve_recourse: infeasible start");
  const RecourseProblem& rec = *p.recourse;
  const auto y = anchor.block(i);
  const double mu = game.mu;
  Vec z(start.begin(), start.end());
  Vec g(p.dim), s(p.dim), c(p.dim, 0.0);
  Vec noise(p.oracle->noise_dim());
  Vec u(rec.sample_dim()), omega(rec.sample_dim());
  for (std::uint64_t t = 1; t < steps; ++t) {
    stream.fill_uniform(noise);
    stream.fill_uniform(u);
    rec.map_sample(u, omega);
    p.oracle->stoch_grad(i, z, anchor, noise, g);
    subgradient_into(rec, z, omega, s);
    if (rec.cost_grad) rec.cost_grad(z, c);
    const double gamma = 1.0 / (mu * static_cast<double>(t + 1));
    for (std::size_t l = 0; l < z.size(); ++l) {
      const double step = z[l] - gamma * (c[l] + g[l] + mu * (z[l] - y[l]) + s[l]);
      z[l] = std::clamp(step, p.set.lower[l], p.set.upper[l]);
    }
  }
  return z;
}

}  // namespace snbr
