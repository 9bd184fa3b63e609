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

#include "snbr/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "snbr/error.hpp"
#include "snbr/metrics.hpp"

namespace snbr {

namespace {

void require(bool ok, const std::string& what) {
  if (!ok) throw_invalid(what);
}

void require_unit(double v, const char* name) {
  require(v > 0.0 && v < 1.0, std::string(name) + " must lie in (0, 1)");
}

double q_of(const BoundInputs& in, std::size_t i) {
  require(i < in.q_const.size(), "no Q constant for the requested player");
  return in.q_const[i];
}

void require_eps(double eps) { require(eps > 0.0 && std::isfinite(eps), "epsilon must be positive"); }

// leading * (1/eps_bar)^exponent + ceil(ln(1/eps_bar) / ln(1/q)), tail clamped at 0.
BoundValue geometric_sum_bound(const std::string& name, double leading, double exponent,
                               double q, double eps_bar) {
  BoundValue b;
  b.name = name;
  const double inv = 1.0 / eps_bar;
  const double head = leading * std::pow(inv, exponent);
  const double tail = std::max(0.0, std::ceil(std::log(inv) / std::log(1.0 / q)));
  b.value = head + tail;
  b.constants["leading"] = leading;
  b.constants["exponent"] = exponent;
  b.constants["eps_bar"] = eps_bar;
  b.constants["head"] = head;
  b.constants["tail"] = tail;
  b.constants["q"] = q;
  return b;
}

std::size_t ceil_div(std::size_t a, std::size_t b) { return (a + b - 1) / b; }

}  // namespace

void BoundInputs::validate() const {
  require(players >= 1, "at least one player is required");
  require(mu > 0.0, "mu must be positive");
  require(c0 >= 0.0 && std::isfinite(c0), "C must be finite and nonnegative");
  require(b1 >= 1, "B1 must be at least 1");
  for (double v : q_const) require(v > 0.0 && std::isfinite(v), "Q constants must be positive");
  for (double v : p) require(v > 0.0 && v <= 1.0, "activation probabilities must lie in (0, 1]");
}

double Envelope::at(std::size_t k) const { return scale * std::pow(q, static_cast<double>(k)); }

double AsyncEnvelope::first(std::size_t k) const {
  return (c0 + static_cast<double>(k)) * std::pow(rho, static_cast<double>(k / b1));
}

double select_q(double c, const std::optional<double>& q) {
  require(c > 0.0 && c < 1.0, "the contraction constant c must lie in (0, 1)");
  if (!q) return 0.5 * (c + 1.0);
  require(*q > c && *q < 1.0, "q must lie in (c, 1)");
  return *q;
}

Envelope sync_envelope(const BoundInputs& in) {
  in.validate();
  require_unit(in.a, "a = ||Gamma||_2 (contraction in the 2-norm)");
  require_unit(in.eta, "eta");
  const double c = std::max(in.a, in.eta);
  const double q = select_q(c, in.q);
  const double d = geometric_weight_constant(c, q);
  Envelope e;
  e.q = q;
  e.scale = std::sqrt(static_cast<double>(in.players)) * (in.c0 + d);
  e.constants = {{"c", c}, {"q", q}, {"D", d}, {"C", in.c0}};
  return e;
}

RandomizedConstants randomized_constants(const BoundInputs& in) {
  in.validate();
  require(in.p.size() == in.players, "one activation probability per player is required");
  require_unit(in.a, "a = ||Gamma||_2 (contraction in the 2-norm)");
  require_unit(in.eta, "eta");
  RandomizedConstants r;
  r.p_min = *std::min_element(in.p.begin(), in.p.end());
  r.p_max = *std::max_element(in.p.begin(), in.p.end());
  r.a_tilde = std::sqrt(1.0 - r.p_min * (1.0 - in.a * in.a));
  r.eta_tilde = std::sqrt(1.0 - r.p_min * (1.0 - in.eta * in.eta));
  r.eta0_tilde = 1.0 / std::sqrt(r.p_max * (1.0 / (in.eta * in.eta) - 1.0) + 1.0);
  r.c_tilde = std::max(r.a_tilde, r.eta_tilde);
  double s = 0.0;
  for (double v : in.p) s += 1.0 / (static_cast<double>(in.players) * v);
  r.big_c_tilde = in.c0 * std::sqrt(s);
  return r;
}

Envelope randomized_envelope(const BoundInputs& in) {
  const RandomizedConstants r = randomized_constants(in);
  const double q = select_q(r.c_tilde, in.q);
  const double d = geometric_weight_constant(r.c_tilde, q);
  const double d_tilde = d * in.eta / r.eta_tilde;
  Envelope e;
  e.q = q;
  e.scale = std::sqrt(static_cast<double>(in.players) * r.p_max) * (r.big_c_tilde + d_tilde);
  e.constants = {{"a_tilde", r.a_tilde},   {"eta_tilde", r.eta_tilde}, {"eta0_tilde", r.eta0_tilde},
                 {"c_tilde", r.c_tilde},   {"q_tilde", q},             {"D", d},
                 {"C_tilde", r.big_c_tilde}, {"D_tilde", d_tilde},     {"p_max", r.p_max},
                 {"p_min", r.p_min}};
  return e;
}

AsyncEnvelope async_envelope(const BoundInputs& in) {
  in.validate();
  require_unit(in.a_inf, "a_inf = ||Gamma||_inf (contraction in the inf-norm)");
  require_unit(in.eta, "eta");
  AsyncEnvelope e;
  e.c0 = in.c0;
  e.b1 = in.b1;
  e.n0 = ceil_div(in.b2, in.b1);
  e.rho = std::pow(std::max(in.a_inf, in.eta), 1.0 / static_cast<double>(e.n0 + 1));
  const double b1 = static_cast<double>(in.b1);
  const double c = std::pow(e.rho, 1.0 / b1);
  const double q = select_q(c, in.q);
  const double d = geometric_weight_constant(c, q);
  e.second.q = q;
  e.second.scale = std::pow(e.rho, -(b1 - 1.0) / b1) * (in.c0 + d);
  e.second.constants = {{"rho", e.rho}, {"n0", static_cast<double>(e.n0)}, {"c", c},
                        {"q", q},       {"D", d},                         {"C", in.c0}};
  return e;
}

BoundValue sync_complexity(const BoundInputs& in, std::size_t i, double eps) {
  const Envelope e = sync_envelope(in);
  require_eps(eps);
  const double le2 = std::log(1.0 / (in.eta * in.eta));
  const double leading = q_of(in, i) / (std::pow(in.eta, 4) * le2);
  const double eps_bar = eps / e.scale;
  BoundValue b = geometric_sum_bound("synchronous", leading, le2 / std::log(1.0 / e.q), e.q, eps_bar);
  b.constants.insert(e.constants.begin(), e.constants.end());
  return b;
}

BoundValue sync_complexity_delta(const BoundInputs& in, std::size_t i, double eps) {
  require(in.delta > 0.0, "delta must be positive");
  BoundInputs r = in;
  r.eta = in.a;
  require_unit(in.a, "a = ||Gamma||_2 (contraction in the 2-norm)");
  const double la = std::log(1.0 / in.a);
  const double delta0 = in.delta * la / (1.0 + in.delta / 2.0);
  r.q = in.a * std::exp(delta0 / 2.0);
  BoundValue b = sync_complexity(r, i, eps);
  b.name = "synchronous-delta";
  b.constants["delta"] = in.delta;
  b.constants["delta0"] = delta0;
  return b;
}

BoundValue sync_complexity_fixed_eta(const BoundInputs& in, std::size_t i, double eps) {
  in.validate();
  require_unit(in.a, "a = ||Gamma||_2 (contraction in the 2-norm)");
  require(in.eta > in.a && in.eta < 1.0, "eta must lie in (a, 1)");
  require_eps(eps);
  const double scale =
      std::sqrt(static_cast<double>(in.players)) * (in.c0 + in.eta / (in.eta - in.a));
  const double le2 = std::log(1.0 / (in.eta * in.eta));
  const double leading = q_of(in, i) / (std::pow(in.eta, 4) * le2);
  BoundValue b = geometric_sum_bound("synchronous-fixed-eta", leading, 2.0, in.eta, eps / scale);
  b.constants["scale"] = scale;
  return b;
}

BoundValue probabilistic_complexity(const BoundInputs& in, std::size_t i, double eps) {
  require(in.confidence > 0.0 && in.confidence < 1.0, "confidence level must lie in (0, 1)");
  BoundValue b = sync_complexity_delta(in, i, eps * in.confidence);
  b.name = "synchronous-probabilistic";
  b.constants["confidence"] = in.confidence;
  return b;
}

BoundValue randomized_complexity(const BoundInputs& in, std::size_t i, double eps) {
  const Envelope e = randomized_envelope(in);
  require_eps(eps);
  const RandomizedConstants r = randomized_constants(in);
  const double l0 = std::log(1.0 / (r.eta0_tilde * r.eta0_tilde));
  const double leading =
      in.p[i] * q_of(in, i) / (in.eta * in.eta * r.eta0_tilde * r.eta0_tilde * l0);
  BoundValue b = geometric_sum_bound("randomized", leading, l0 / std::log(1.0 / e.q), e.q,
                                     eps / e.scale);
  b.constants.insert(e.constants.begin(), e.constants.end());
  return b;
}

BoundValue randomized_complexity_delta(const BoundInputs& in, std::size_t i, double eps) {
  require(in.delta > 0.0, "delta must be positive");
  BoundInputs r = in;
  r.eta = in.a;
  r.q.reset();
  const RandomizedConstants rc = randomized_constants(r);
  const double s = std::log(1.0 / rc.eta_tilde);
  const double t = std::log(1.0 / rc.eta0_tilde);
  const double delta0 = in.delta * s / (t / s + in.delta / 2.0);
  r.q = rc.eta_tilde * std::exp(delta0 / 2.0);
  BoundValue b = randomized_complexity(r, i, eps);
  b.name = "randomized-delta";
  b.constants["delta"] = in.delta;
  b.constants["delta0"] = delta0;
  return b;
}

BoundValue async_complexity(const BoundInputs& in, std::size_t i, double eps) {
  const AsyncEnvelope e = async_envelope(in);
  require_eps(eps);
  const double le2 = std::log(1.0 / (in.eta * in.eta));
  const double leading = q_of(in, i) / (std::pow(in.eta, 4) * le2);
  const double q = e.second.q;
  const double b1 = static_cast<double>(in.b1);
  const double eps_hat = eps / (in.c0 + e.second.constants.at("D")) * std::pow(e.rho, (b1 - 1.0) / b1);
  BoundValue b = geometric_sum_bound("asynchronous", leading, le2 / std::log(1.0 / q), q, eps_hat);
  b.constants.insert(e.second.constants.begin(), e.second.constants.end());
  return b;
}

BoundValue async_complexity_delta(const BoundInputs& in, std::size_t i, double eps) {
  require(in.delta > 0.0, "delta must be positive");
  require_unit(in.a_inf, "a_inf = ||Gamma||_inf (contraction in the inf-norm)");
  BoundInputs r = in;
  r.eta = in.a_inf;
  const std::size_t n0 = ceil_div(in.b2, in.b1);
  const double np = static_cast<double>(in.b1 * (1 + n0));
  const double le = std::log(1.0 / r.eta);
  const double delta0 = in.delta * le / (np + in.delta / 2.0);
  r.q = std::pow(r.eta, 1.0 / np) * std::exp(delta0 / (2.0 * np));
  BoundValue b = async_complexity(r, i, eps);
  b.name = "asynchronous-delta";
  b.constants["delta"] = in.delta;
  b.constants["delta0"] = delta0;
  b.constants["n_prime"] = np;
  return b;
}

BoundValue cyclic_complexity(const BoundInputs& in, std::size_t i, double eps) {
  in.validate();
  require_unit(in.a_inf, "a_inf = ||Gamma||_inf (contraction in the inf-norm)");
  require_unit(in.eta, "eta");
  require_eps(eps);
  const std::size_t n = in.players;
  const double nd = static_cast<double>(n);
  const std::size_t n0 = ceil_div(in.b2, n);
  const double rho = std::pow(std::max(in.a_inf, in.eta), 1.0 / static_cast<double>(n0 + 1));
  const double c = std::pow(rho, 1.0 / nd);
  const double q = select_q(c, in.q);
  const double d = geometric_weight_constant(c, q);
  const double eps_t = eps / (in.c0 + d) * std::pow(rho, (nd - 1.0) / nd);
  const double eta_t = std::pow(in.eta, 1.0 / nd);
  const double lt2 = std::log(1.0 / (eta_t * eta_t));
  const double leading = q_of(in, i) / (eta_t * eta_t * in.eta * in.eta * lt2);
  BoundValue b = geometric_sum_bound("cyclic", leading, lt2 / std::log(1.0 / q), q, eps_t);
  b.constants["rho"] = rho;
  b.constants["n0"] = static_cast<double>(n0);
  b.constants["c"] = c;
  b.constants["D"] = d;
  b.constants["eta_tilde"] = eta_t;
  return b;
}

BoundValue cyclic_complexity_delta(const BoundInputs& in, std::size_t i, double eps) {
  require(in.delta > 0.0, "delta must be positive");
  require_unit(in.a_inf, "a_inf = ||Gamma||_inf (contraction in the inf-norm)");
  BoundInputs r = in;
  r.eta = in.a_inf;
  const std::size_t n0 = ceil_div(in.b2, in.players);
  const double m = static_cast<double>(in.players * (1 + n0));
  const double le = std::log(1.0 / r.eta);
  const double delta0 = in.delta * le / (1.0 + static_cast<double>(n0) + in.delta / 2.0);
  r.q = std::pow(r.eta, 1.0 / m) * std::exp(delta0 / (2.0 * m));
  BoundValue b = cyclic_complexity(r, i, eps);
  b.name = "cyclic-delta";
  b.constants["delta"] = in.delta;
  b.constants["delta0"] = delta0;
  return b;
}

std::vector<DominanceRow> dominance_report(const std::vector<double>& empirical,
                                           const std::vector<double>& se,
                                           const std::function<double(std::size_t)>& bound,
                                           double sigmas) {
  std::vector<DominanceRow> rows;
  for (std::size_t k = 0; k < empirical.size(); ++k) {
    DominanceRow r;
    r.k = k;
    r.empirical = empirical[k];
    r.se = k < se.size() ? se[k] : 0.0;
    r.bound = bound(k);
    r.dominated = r.empirical - sigmas * r.se <= r.bound;
    rows.push_back(r);
  }
  return rows;
}

nlohmann::json to_json(const BoundValue& b) {
  nlohmann::json j;
  j["name"] = b.name;
  j["value"] = b.value;
  j["constants"] = b.constants;
  return j;
}

nlohmann::json to_json(const Envelope& e) {
  return {{"scale", e.scale}, {"q", e.q}, {"constants", e.constants}};
}

nlohmann::json to_json(const std::vector<DominanceRow>& rows) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& r : rows)
    arr.push_back({{"k", r.k},
                   {"empirical", r.empirical},
                   {"se", r.se},
                   {"bound", r.bound},
                   {"dominated", r.dominated}});
  return arr;
}

}  // namespace snbr
