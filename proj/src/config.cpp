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

#include "snbr/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <yaml-cpp/yaml.h>

#include "snbr/error.hpp"

namespace snbr {

namespace {

[[noreturn]] void parse_error(const std::string& what) { throw Error(ErrorCode::kParse, what); }

// Typed access to one mapping node; rejects keys outside `allowed`.
class Section {
 public:
  Section(const YAML::Node& node, std::string path, std::set<std::string> allowed)
      : node_(node.IsDefined() ? node : YAML::Node()), path_(std::move(path)) {
    if (node_.IsNull()) return;
    if (!node_.IsMap()) parse_error(path_ + ": expected a mapping");
    for (const auto& kv : node_) {
      const std::string key = kv.first.as<std::string>();
      if (!allowed.count(key)) parse_error(path_ + ": unknown key '" + key + "'");
    }
  }

  bool has(const std::string& key) const {
    return node_.IsMap() && node_[key].IsDefined() && !node_[key].IsNull();
  }
  YAML::Node child(const std::string& key) const {
    if (!node_.IsMap()) return YAML::Node();
    const YAML::Node c = node_[key];
    return c.IsDefined() ? c : YAML::Node();
  }
  std::string where(const std::string& key) const { return path_ + "." + key; }

  template <typename T>
  void get(const std::string& key, T& out) const {
    if (!has(key)) return;
    try {
      out = node_[key].as<T>();
    } catch (const YAML::Exception&) {
      parse_error(where(key) + ": wrong type");
    }
  }

  template <typename T>
  void get_optional(const std::string& key, std::optional<T>& out) const {
    if (!has(key)) return;
    T v{};
    get(key, v);
    out = v;
  }

 private:
  YAML::Node node_;
  std::string path_;
};

template <typename E, std::size_t M>
E parse_enum(const Section& s, const std::string& key, E fallback,
             const std::pair<const char*, E> (&table)[M]) {
  if (!s.has(key)) return fallback;
  std::string name;
  s.get(key, name);
  for (const auto& [n, v] : table)
    if (name == n) return v;
  parse_error(s.where(key) + ": unknown value '" + name + "'");
}

template <typename E, std::size_t M>
const char* enum_name(E value, const std::pair<const char*, E> (&table)[M]) {
  for (const auto& [n, v] : table)
    if (v == value) return n;
  return "unknown";
}

constexpr std::pair<const char*, GameKind> kGameKinds[] = {{"portfolio", GameKind::kPortfolio},
                                                            {"capacity", GameKind::kCapacity}};
constexpr std::pair<const char*, SchemeKind> kSchemeKinds[] = {
    {"synchronous", SchemeKind::kSynchronous},   {"randomized", SchemeKind::kRandomized},
    {"poisson", SchemeKind::kPoissonClock},      {"asynchronous", SchemeKind::kAsynchronous},
    {"cyclic", SchemeKind::kCyclic}};
constexpr std::pair<const char*, ScheduleKind> kScheduleKinds[] = {
    {"synchronous", ScheduleKind::kSynchronous},
    {"randomized", ScheduleKind::kRandomized},
    {"asynchronous", ScheduleKind::kAsynchronous},
    {"cyclic", ScheduleKind::kCyclic},
    {"polynomial", ScheduleKind::kPolynomialUnsummable},
    {"fixed", ScheduleKind::kFixed},
    {"protocol", ScheduleKind::kProtocol}};
constexpr std::pair<const char*, DelayMode> kDelayModes[] = {{"uniform", DelayMode::kUniform},
                                                              {"fixed", DelayMode::kFixed}};
constexpr std::pair<const char*, EtaNorm> kEtaNorms[] = {
    {"a2", EtaNorm::kTwo}, {"a_inf", EtaNorm::kInf}, {"rho", EtaNorm::kSpectral}};

void read_portfolio(const Section& s, PortfolioConfig& c) {
  s.get("players", c.players);
  s.get("assets", c.assets);
  s.get("nu", c.nu);
  s.get("risk_diag", c.risk_diag);
  s.get("phi_low", c.phi_low);
  s.get("phi_high", c.phi_high);
  s.get("rho", c.rho);
  s.get("cap", c.cap);
  s.get("holdings", c.holdings);
}

void read_capacity(const Section& s, CapacityConfig& c) {
  s.get("players", c.players);
  s.get("a", c.a);
  s.get("b", c.b);
  s.get("cap", c.cap);
  s.get("eta", c.eta);
  s.get("d_low", c.d_low);
  s.get("d_high", c.d_high);
  s.get("h_low", c.h_low);
  s.get("h_high", c.h_high);
  s.get("recourse", c.recourse);
}

}  // namespace

const char* game_kind_name(GameKind kind) { return enum_name(kind, kGameKinds); }

void ExperimentConfig::validate() const {
  if (!(game.mu > 0.0)) throw_invalid("game.mu must be positive");
  const std::size_t n =
      game.kind == GameKind::kPortfolio ? game.portfolio.players : game.capacity.players;
  if (n < 1) throw_invalid("the game needs at least one player");
  if (!scheme.p.empty() && scheme.p.size() != n)
    throw_invalid("scheme.p needs one entry per player");
  if (!scheme.rates.empty() && scheme.rates.size() != n)
    throw_invalid("scheme.rates needs one entry per player");
  if (scheme.b1 < 1) throw_invalid("scheme.b1 must be at least 1");
  if (inner.eta && inner.kappa) throw_invalid("inner: give either eta or kappa, not both");
  if (inner.eta && !(*inner.eta > 0.0 && *inner.eta < 1.0))
    throw_invalid("inner.eta must lie in (0, 1)");
  if (inner.kappa && !(*inner.kappa > 0.0)) throw_invalid("inner.kappa must be positive");
  if (run.trajectories < 1) throw_invalid("run.trajectories must be at least 1");
  if (!(run.eps_stop > 0.0)) throw_invalid("run.eps_stop must be positive");
  if (run.eps_points < 3) throw_invalid("run.eps_points must be at least 3");
}

ExperimentConfig parse_config(const std::string& text) {
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::Exception& e) {
    parse_error(std::string("malformed YAML: ") + e.what());
  }
  ExperimentConfig c;
  Section top(root, "config", {"game", "scheme", "inner", "run"});

  Section game(top.child("game"), "game", {"kind", "mu", "portfolio", "capacity"});
  c.game.kind = parse_enum(game, "kind", c.game.kind, kGameKinds);
  game.get("mu", c.game.mu);
  read_portfolio(Section(game.child("portfolio"), "game.portfolio",
                         {"players", "assets", "nu", "risk_diag", "phi_low", "phi_high", "rho",
                          "cap", "holdings"}),
                 c.game.portfolio);
  read_capacity(Section(game.child("capacity"), "game.capacity",
                        {"players", "a", "b", "cap", "eta", "d_low", "d_high", "h_low", "h_high",
                         "recourse"}),
                c.game.capacity);

  Section scheme(top.child("scheme"), "scheme",
                 {"kind", "iterations", "p", "rates", "b1", "b2", "update_prob", "delay",
                  "update_sets"});
  c.scheme.kind = parse_enum(scheme, "kind", c.scheme.kind, kSchemeKinds);
  scheme.get("iterations", c.scheme.iterations);
  scheme.get("p", c.scheme.p);
  scheme.get("rates", c.scheme.rates);
  scheme.get("b1", c.scheme.b1);
  scheme.get("b2", c.scheme.b2);
  scheme.get("update_prob", c.scheme.update_prob);
  c.scheme.delay = parse_enum(scheme, "delay", c.scheme.delay, kDelayModes);
  scheme.get("update_sets", c.scheme.update_sets);

  Section inner(top.child("inner"), "inner",
                {"schedule", "eta", "kappa", "eta_norm", "exponent", "count", "power", "offset",
                 "use_beta", "ceiling"});
  c.inner.schedule = parse_enum(inner, "schedule", c.inner.schedule, kScheduleKinds);
  inner.get_optional("eta", c.inner.eta);
  inner.get_optional("kappa", c.inner.kappa);
  c.inner.eta_norm = parse_enum(inner, "eta_norm", c.inner.eta_norm, kEtaNorms);
  inner.get("exponent", c.inner.exponent);
  inner.get("count", c.inner.count);
  inner.get("power", c.inner.power);
  inner.get("offset", c.inner.offset);
  inner.get("use_beta", c.inner.use_beta);
  inner.get("ceiling", c.inner.ceiling);

  Section run(top.child("run"), "run",
              {"trajectories", "seed", "eps_stop", "eps_points", "bound_audit",
               "write_trajectories", "sg_rounds"});
  run.get("trajectories", c.run.trajectories);
  run.get("seed", c.run.seed);
  run.get("eps_stop", c.run.eps_stop);
  run.get("eps_points", c.run.eps_points);
  run.get("bound_audit", c.run.bound_audit);
  run.get("write_trajectories", c.run.write_trajectories);
  run.get("sg_rounds", c.run.sg_rounds);

  try {
    c.validate();
  } catch (const Error& e) {
    parse_error(e.what());
  }
  return c;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot read config file " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string serialize_config(const ExperimentConfig& c) {
  YAML::Emitter out;
  out.SetDoublePrecision(17);
  out << YAML::BeginMap;

  out << YAML::Key << "game" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "kind" << YAML::Value << game_kind_name(c.game.kind);
  out << YAML::Key << "mu" << YAML::Value << c.game.mu;
  const auto& p = c.game.portfolio;
  out << YAML::Key << "portfolio" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "players" << YAML::Value << p.players;
  out << YAML::Key << "assets" << YAML::Value << p.assets;
  out << YAML::Key << "nu" << YAML::Value << YAML::Flow << p.nu;
  out << YAML::Key << "risk_diag" << YAML::Value << YAML::Flow << p.risk_diag;
  out << YAML::Key << "phi_low" << YAML::Value << p.phi_low;
  out << YAML::Key << "phi_high" << YAML::Value << p.phi_high;
  out << YAML::Key << "rho" << YAML::Value << YAML::Flow << p.rho;
  out << YAML::Key << "cap" << YAML::Value << p.cap;
  out << YAML::Key << "holdings" << YAML::Value << p.holdings;
  out << YAML::EndMap;
  const auto& q = c.game.capacity;
  out << YAML::Key << "capacity" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "players" << YAML::Value << q.players;
  out << YAML::Key << "a" << YAML::Value << q.a;
  out << YAML::Key << "b" << YAML::Value << q.b;
  out << YAML::Key << "cap" << YAML::Value << YAML::Flow << q.cap;
  out << YAML::Key << "eta" << YAML::Value << YAML::Flow << q.eta;
  out << YAML::Key << "d_low" << YAML::Value << q.d_low;
  out << YAML::Key << "d_high" << YAML::Value << q.d_high;
  out << YAML::Key << "h_low" << YAML::Value << q.h_low;
  out << YAML::Key << "h_high" << YAML::Value << q.h_high;
  out << YAML::Key << "recourse" << YAML::Value << q.recourse;
  out << YAML::EndMap;
  out << YAML::EndMap;

  const auto& s = c.scheme;
  out << YAML::Key << "scheme" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "kind" << YAML::Value << enum_name(s.kind, kSchemeKinds);
  out << YAML::Key << "iterations" << YAML::Value << s.iterations;
  out << YAML::Key << "p" << YAML::Value << YAML::Flow << s.p;
  out << YAML::Key << "rates" << YAML::Value << YAML::Flow << s.rates;
  out << YAML::Key << "b1" << YAML::Value << s.b1;
  out << YAML::Key << "b2" << YAML::Value << s.b2;
  out << YAML::Key << "update_prob" << YAML::Value << s.update_prob;
  out << YAML::Key << "delay" << YAML::Value << enum_name(s.delay, kDelayModes);
  out << YAML::Key << "update_sets" << YAML::Value << YAML::Flow << s.update_sets;
  out << YAML::EndMap;

  const auto& in = c.inner;
  out << YAML::Key << "inner" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "schedule" << YAML::Value << enum_name(in.schedule, kScheduleKinds);
  if (in.eta) out << YAML::Key << "eta" << YAML::Value << *in.eta;
  if (in.kappa) out << YAML::Key << "kappa" << YAML::Value << *in.kappa;
  out << YAML::Key << "eta_norm" << YAML::Value << enum_name(in.eta_norm, kEtaNorms);
  out << YAML::Key << "exponent" << YAML::Value << in.exponent;
  out << YAML::Key << "count" << YAML::Value << in.count;
  out << YAML::Key << "power" << YAML::Value << in.power;
  out << YAML::Key << "offset" << YAML::Value << in.offset;
  out << YAML::Key << "use_beta" << YAML::Value << in.use_beta;
  out << YAML::Key << "ceiling" << YAML::Value << in.ceiling;
  out << YAML::EndMap;

  const auto& r = c.run;
  out << YAML::Key << "run" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "trajectories" << YAML::Value << r.trajectories;
  out << YAML::Key << "seed" << YAML::Value << r.seed;
  out << YAML::Key << "eps_stop" << YAML::Value << r.eps_stop;
  out << YAML::Key << "eps_points" << YAML::Value << r.eps_points;
  out << YAML::Key << "bound_audit" << YAML::Value << r.bound_audit;
  out << YAML::Key << "write_trajectories" << YAML::Value << r.write_trajectories;
  out << YAML::Key << "sg_rounds" << YAML::Value << r.sg_rounds;
  out << YAML::EndMap;

  out << YAML::EndMap;
  return std::string(out.c_str()) + "\n";
}

}  // namespace snbr
