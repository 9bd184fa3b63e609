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

#include "snbr/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <numeric>
#include <sstream>

#include "snbr/error.hpp"
#include "snbr/sa.hpp"

namespace snbr {

namespace {

using nlohmann::json;

bool needs_inf_norm(SchemeKind kind) {
  return kind == SchemeKind::kAsynchronous || kind == SchemeKind::kCyclic;
}

json optional_json(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::kIo, "cannot write " + path.string());
  out << text;
  if (!out) throw Error(ErrorCode::kIo, "write failed for " + path.string());
}

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string cell;
  std::stringstream ss(line);
  while (std::getline(ss, cell, sep)) out.push_back(cell);
  if (!line.empty() && line.back() == sep) out.emplace_back();
  return out;
}

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  std::ptrdiff_t column(const std::string& name) const {
    auto it = std::find(header.begin(), header.end(), name);
    return it == header.end() ? -1 : it - header.begin();
  }
};

Table read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot read " + path);
  Table t;
  std::string line;
  if (!std::getline(in, line)) throw Error(ErrorCode::kParse, path + ": empty file");
  t.header = split(line, ',');
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    t.rows.push_back(split(line, ','));
  }
  return t;
}

std::optional<double> cell_value(const Table& t, std::size_t row, std::ptrdiff_t col) {
  if (col < 0 || static_cast<std::size_t>(col) >= t.rows[row].size()) return std::nullopt;
  const std::string& s = t.rows[row][static_cast<std::size_t>(col)];
  if (s.empty()) return std::nullopt;
  try {
    return std::stod(s);
  } catch (const std::exception&) {
    throw Error(ErrorCode::kParse, "not a number: '" + s + "'");
  }
}

double initial_block_error(const Profile& x0, const Profile& xstar) {
  double c = 0.0;
  for (std::size_t i = 0; i < x0.players(); ++i) c = std::max(c, block_distance(x0, xstar, i));
  return c;
}

// Scheme-dependent complexity bound for player i at accuracy eps.
BoundValue complexity_for(SchemeKind kind, const BoundInputs& in, std::size_t i, double eps) {
  switch (kind) {
    case SchemeKind::kSynchronous: return sync_complexity(in, i, eps);
    case SchemeKind::kRandomized:
    case SchemeKind::kPoissonClock: return randomized_complexity(in, i, eps);
    case SchemeKind::kAsynchronous: return async_complexity(in, i, eps);
    case SchemeKind::kCyclic: return cyclic_complexity(in, i, eps);
  }
  throw_invalid("unknown scheme kind");
}

ScheduleKind certified_schedule(SchemeKind kind) {
  switch (kind) {
    case SchemeKind::kSynchronous: return ScheduleKind::kSynchronous;
    case SchemeKind::kRandomized:
    case SchemeKind::kPoissonClock: return ScheduleKind::kRandomized;
    case SchemeKind::kAsynchronous: return ScheduleKind::kAsynchronous;
    case SchemeKind::kCyclic: return ScheduleKind::kCyclic;
  }
  return ScheduleKind::kSynchronous;
}

}  // namespace

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

double selected_norm(const ContractionReport& report, EtaNorm norm) {
  switch (norm) {
    case EtaNorm::kTwo: return report.a2;
    case EtaNorm::kInf: return report.a_inf;
    case EtaNorm::kSpectral: return report.rho;
  }
  return report.a2;
}

Experiment prepare_experiment(const ExperimentConfig& config) {
  config.validate();
  Experiment e;
  e.config = config;
  e.built = config.game.kind == GameKind::kPortfolio
                ? build_portfolio(config.game.portfolio, config.game.mu)
                : build_capacity(config.game.capacity, config.game.mu);
  const GameSpec& game = e.built.game;
  const std::size_t n = game.size();
  e.contraction = contraction_report(e.built.curvature, game.mu);

  e.scheme = config.scheme;
  e.scheme.trajectories = config.run.trajectories;
  e.scheme.seed = config.run.seed;
  if (e.scheme.kind == SchemeKind::kRandomized && e.scheme.p.empty())
    e.scheme.p.assign(n, 1.0 / static_cast<double>(n));
  if (e.scheme.kind == SchemeKind::kPoissonClock && e.scheme.rates.empty())
    e.scheme.rates.assign(n, 1.0);
  e.scheme.validate(n);

  const double norm = selected_norm(e.contraction, config.inner.eta_norm);
  double eta = norm;
  if (config.inner.eta) eta = *config.inner.eta;
  else if (config.inner.kappa) eta = std::pow(norm, *config.inner.kappa / 2.0);

  InnerSchedule& s = e.schedule;
  s.kind = config.inner.schedule;
  s.eta = eta;
  s.q = q_constants(game);
  s.players = n;
  s.exponent = config.inner.exponent;
  s.count = config.inner.count;
  s.power = config.inner.power;
  s.offset = config.inner.offset;
  s.use_beta = config.inner.use_beta;
  s.ceiling = config.inner.ceiling;

  const bool inf = needs_inf_norm(e.scheme.kind);
  const bool norm_ok = inf ? e.contraction.ok_infnorm : e.contraction.ok_2norm;
  const bool eta_ok = eta > 0.0 && eta < 1.0;
  e.preflight_ok = norm_ok && eta_ok;
  if (!norm_ok)
    e.preflight_message = inf ? "||Gamma||_inf >= 1: the delayed scheme is not certified"
                              : "||Gamma||_2 >= 1: the proximal best-response map is not a contraction";
  else if (!eta_ok)
    e.preflight_message = "resolved eta lies outside (0, 1)";
  else
    e.preflight_message = "ok";

  if (e.preflight_ok) s.validate();
  e.update_sets = scheme_update_sets(e.scheme, n);
  return e;
}

json preflight_json(const Experiment& e) {
  json j = to_json(e.contraction);
  j["game"] = e.game().name;
  j["players"] = e.game().size();
  j["mu"] = e.game().mu;
  j["scheme"] = scheme_kind_name(e.scheme.kind);
  j["eta"] = e.schedule.eta;
  j["schedule"] = schedule_kind_name(e.schedule.kind);
  j["q_constants"] = e.schedule.q;
  j["zeta_min"] = e.built.curvature.zeta_min;
  j["zeta_offmax"] = e.built.curvature.zeta_offmax;
  j["builder_condition_ok"] = e.built.condition_ok;
  j["warnings"] = e.built.warnings;
  j["ok"] = e.preflight_ok;
  j["message"] = e.preflight_message;
  return j;
}

BoundInputs bound_inputs(const Experiment& e, const Profile& x0, const Profile& xstar) {
  BoundInputs in;
  in.a = e.contraction.a2;
  in.a_inf = e.contraction.a_inf;
  in.eta = e.schedule.eta;
  in.mu = e.game().mu;
  in.players = e.game().size();
  in.c0 = initial_block_error(x0, xstar);
  in.b1 = e.scheme.b1;
  in.b2 = e.scheme.b2;
  in.q_const = e.schedule.q;
  if (e.scheme.kind == SchemeKind::kRandomized) {
    in.p = e.scheme.p;
  } else if (e.scheme.kind == SchemeKind::kPoissonClock) {
    const double total = std::accumulate(e.scheme.rates.begin(), e.scheme.rates.end(), 0.0);
    for (double r : e.scheme.rates) in.p.push_back(r / total);
  }
  return in;
}

ExperimentResult run_experiment(const Experiment& e, bool force) {
  if (!e.preflight_ok && !force) throw Error(ErrorCode::kPreflight, e.preflight_message);
  e.schedule.validate();
  const GameSpec& game = e.game();
  ExperimentResult r;
  r.x0 = game.lower_profile();
  r.reference = reference_equilibrium(game, r.x0);
  r.records.reserve(e.scheme.trajectories);
  for (std::size_t t = 0; t < e.scheme.trajectories; ++t)
    r.records.push_back(run_scheme(game, e.scheme, e.schedule, e.update_sets, t, r.x0));
  r.metrics = compute_metrics(r.records, r.reference.x);
  const double u0 = r.metrics.u.empty() ? 0.0 : r.metrics.u.front();
  if (0.5 * u0 > e.config.run.eps_stop) {
    r.eps = epsilon_grid(u0, e.config.run.eps_stop, e.config.run.eps_points);
    std::vector<double> ks(r.metrics.size());
    std::iota(ks.begin(), ks.end(), 0.0);
    r.k_of_eps = k_of_epsilon(r.metrics.u, ks, r.eps);
    r.sg_of_eps = k_of_epsilon(r.metrics.u, sg_max_series(r.metrics), r.eps);
  }
  if (e.config.run.bound_audit) r.bounds = bound_audit(e, r);
  return r;
}

json bound_audit(const Experiment& e, const ExperimentResult& r) {
  json j;
  const SchemeKind kind = e.scheme.kind;
  j["scheme"] = scheme_kind_name(kind);
  j["schedule"] = schedule_kind_name(e.schedule.kind);
  j["schedule_certified"] = e.schedule.kind == certified_schedule(kind);
  const BoundInputs in = bound_inputs(e, r.x0, r.reference.x);
  j["inputs"] = {{"a", in.a},           {"a_inf", in.a_inf}, {"eta", in.eta},
                 {"mu", in.mu},         {"players", in.players}, {"C", in.c0},
                 {"b1", in.b1},         {"b2", in.b2},       {"p", in.p},
                 {"Q", in.q_const}};

  const bool inf = needs_inf_norm(kind);
  const auto& series = inf ? r.metrics.inf : r.metrics.u;
  const auto& se = inf ? r.metrics.inf_se : r.metrics.u_se;
  j["metric"] = inf ? "inf_metric" : "u_k";
  try {
    std::function<double(std::size_t)> bound;
    if (kind == SchemeKind::kSynchronous) {
      const Envelope env = sync_envelope(in);
      j["envelope"] = to_json(env);
      bound = [env](std::size_t k) { return env.at(k); };
    } else if (!inf) {
      const Envelope env = randomized_envelope(in);
      j["envelope"] = to_json(env);
      bound = [env](std::size_t k) { return env.at(k); };
    } else {
      BoundInputs ain = in;
      if (kind == SchemeKind::kCyclic) ain.b1 = in.players;
      const AsyncEnvelope env = async_envelope(ain);
      j["envelope"] = to_json(env.second);
      j["envelope"]["rho"] = env.rho;
      j["envelope"]["n0"] = env.n0;
      std::vector<double> first;
      for (std::size_t k = 0; k < series.size(); ++k) first.push_back(env.first(k));
      j["first_envelope"] = first;
      bound = [env](std::size_t k) { return env.second.at(k); };
    }
    const auto rows = dominance_report(series, se, bound);
    j["dominance"] = to_json(rows);
    j["all_dominated"] =
        std::all_of(rows.begin(), rows.end(), [](const DominanceRow& d) { return d.dominated; });
  } catch (const Error& err) {
    j["envelope_error"] = err.what();
  }

  json complexity = json::array();
  for (std::size_t g = 0; g < r.eps.size(); ++g) {
    json row{{"eps", r.eps[g]}, {"empirical_k", optional_json(r.k_of_eps[g])},
             {"empirical_sg", optional_json(r.sg_of_eps[g])}};
    try {
      double worst = 0.0;
      json per = json::array();
      for (std::size_t i = 0; i < in.players; ++i) {
        const BoundValue b = complexity_for(kind, in, i, r.eps[g]);
        worst = std::max(worst, b.value);
        per.push_back(b.value);
      }
      row["bound"] = worst;
      row["per_player"] = per;
    } catch (const Error& err) {
      row["bound"] = nullptr;
      row["error"] = err.what();
    }
    complexity.push_back(row);
  }
  j["complexity"] = complexity;
  return j;
}

json theoretical_bounds(const Experiment& e) {
  ExperimentResult r;
  r.x0 = e.game().lower_profile();
  r.reference = reference_equilibrium(e.game(), r.x0, false);
  const double u0 = distance(r.x0, r.reference.x);
  if (0.5 * u0 > e.config.run.eps_stop) {
    r.eps = epsilon_grid(u0, e.config.run.eps_stop, e.config.run.eps_points);
    r.k_of_eps.assign(r.eps.size(), std::nullopt);
    r.sg_of_eps.assign(r.eps.size(), std::nullopt);
  }
  json j = bound_audit(e, r);
  j.erase("dominance");
  j.erase("all_dominated");
  j.erase("first_envelope");
  if (j.contains("envelope") && !j.contains("envelope_error")) {
    const double scale = j["envelope"]["scale"].get<double>();
    const double q = j["envelope"]["q"].get<double>();
    std::vector<double> env;
    for (std::size_t k = 0; k <= e.scheme.iterations; ++k)
      env.push_back(scale * std::pow(q, static_cast<double>(k)));
    j["envelope_series"] = env;
  }
  return j;
}

json manifest_json(const Experiment& e, const ExperimentResult& r) {
  json j;
  j["version"] = SNBR_VERSION;
  j["config_yaml"] = serialize_config(e.config);
  j["seed"] = e.scheme.seed;
  j["trajectories"] = e.scheme.trajectories;
  j["iterations"] = e.scheme.iterations;
  j["scheme"] = scheme_kind_name(e.scheme.kind);
  j["p"] = e.scheme.p;
  j["rates"] = e.scheme.rates;
  j["update_sets"] = e.update_sets;
  j["schedule"] = {{"kind", schedule_kind_name(e.schedule.kind)},
                   {"eta", e.schedule.eta},
                   {"Q", e.schedule.q},
                   {"exponent", e.schedule.exponent},
                   {"count", e.schedule.count},
                   {"power", e.schedule.power},
                   {"offset", e.schedule.offset},
                   {"use_beta", e.schedule.use_beta},
                   {"ceiling", e.schedule.ceiling}};
  j["x0"] = Vec(r.x0.flat().begin(), r.x0.flat().end());
  j["reference"] = {{"x", Vec(r.reference.x.flat().begin(), r.reference.x.flat().end())},
                    {"method", r.reference.method},
                    {"residual", r.reference.residual},
                    {"cross_check_gap", r.reference.cross_check_gap},
                    {"quadrature_error", r.reference.quadrature_error},
                    {"iterations", r.reference.iterations}};
  std::size_t aborted = 0;
  json errors = json::array();
  for (const auto& rec : r.records) {
    if (!rec.aborted) continue;
    ++aborted;
    errors.push_back(rec.error);
  }
  j["aborted_trajectories"] = aborted;
  j["abort_messages"] = errors;
  j["common_length"] = r.metrics.size();
  return j;
}

std::string metrics_csv(const ExperimentResult& r) {
  const RunMetrics& m = r.metrics;
  const std::size_t n = r.x0.players();
  std::ostringstream out;
  out << "k,u_k,inf_metric,variance";
  for (std::size_t i = 0; i < n; ++i) out << ",sg_cum_p" << (i + 1);
  out << ",comm_rounds,u_se\n";
  for (std::size_t k = 0; k < m.size(); ++k) {
    out << k << ',' << format_double(m.u[k]) << ',' << format_double(m.inf[k]) << ','
        << format_double(m.variance[k]);
    for (std::size_t i = 0; i < n; ++i) out << ',' << format_double(m.sg_mean[k][i]);
    out << ',' << format_double(m.comm_rounds[k]) << ',' << format_double(m.u_se[k]) << '\n';
  }
  return out.str();
}

std::string k_of_eps_csv(const ExperimentResult& r) {
  std::ostringstream out;
  out << "eps,k,sg_max\n";
  for (std::size_t g = 0; g < r.eps.size(); ++g) {
    out << format_double(r.eps[g]) << ',';
    if (r.k_of_eps[g]) out << format_double(*r.k_of_eps[g]);
    out << ',';
    if (r.sg_of_eps[g]) out << format_double(*r.sg_of_eps[g]);
    out << '\n';
  }
  return out.str();
}

std::string trajectory_csv(const TrajectoryRecord& rec, const Profile& xstar) {
  const std::size_t n = xstar.players();
  std::size_t width = 0;
  for (std::size_t i = 0; i < n; ++i) width = std::max(width, xstar.block_dim(i));
  std::ostringstream out;
  out << "k,player,err_2,err_block,sg_cum,beta";
  for (std::size_t l = 0; l < width; ++l) out << ",x_" << (l + 1);
  out << '\n';
  for (std::size_t k = 0; k < rec.x.size(); ++k) {
    const double err2 = distance(rec.x[k], xstar);
    for (std::size_t i = 0; i < n; ++i) {
      out << k << ',' << (i + 1) << ',' << format_double(err2) << ','
          << format_double(block_distance(rec.x[k], xstar, i)) << ',' << rec.sg_cum[k][i] << ','
          << rec.beta[k][i];
      const auto b = rec.x[k].block(i);
      for (std::size_t l = 0; l < width; ++l) {
        out << ',';
        if (l < b.size()) out << format_double(b[l]);
      }
      out << '\n';
    }
  }
  return out.str();
}

void write_outputs(const Experiment& e, const ExperimentResult& r, const std::string& dir) {
  namespace fs = std::filesystem;
  const fs::path root(dir);
  std::error_code ec;
  fs::create_directories(root, ec);
  if (ec) throw Error(ErrorCode::kIo, "cannot create " + dir + ": " + ec.message());
  write_file(root / "preflight.json", preflight_json(e).dump(2) + "\n");
  if (e.config.run.write_trajectories) {
    fs::create_directories(root / "trajectories", ec);
    if (ec) throw Error(ErrorCode::kIo, "cannot create trajectories directory: " + ec.message());
    for (std::size_t t = 0; t < r.records.size(); ++t) {
      char name[32];
      std::snprintf(name, sizeof name, "traj_%04zu.csv", t);
      write_file(root / "trajectories" / name, trajectory_csv(r.records[t], r.reference.x));
    }
  }
  write_file(root / "metrics.csv", metrics_csv(r));
  write_file(root / "k_of_eps.csv", k_of_eps_csv(r));
  if (e.config.run.bound_audit) write_file(root / "bounds.json", r.bounds.dump(2) + "\n");
  write_file(root / "manifest.json", manifest_json(e, r).dump(2) + "\n");
}

Comparison compare_with_sg(const Experiment& e, const ExperimentResult& sync) {
  const GameSpec& game = e.game();
  Comparison c;
  c.synchronous = sync.metrics;
  const auto& cb = e.built.curvature;
  double modulus = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < cb.size(); ++i) {
    double off = 0.0;
    for (std::size_t j = 0; j < cb.size(); ++j) off += cb.zeta_offmax[i][j];
    modulus = std::min(modulus, cb.zeta_min[i] - off);
  }
  if (!(modulus > 0.0)) {
    const StackedGradientResult s = stacked_projected_gradient(game, sync.x0);
    modulus = s.applicable ? s.modulus : game.mu;
  }
  c.baseline_modulus = modulus;
  c.rounds = e.config.run.sg_rounds;
  if (c.rounds == 0 && sync.metrics.size() > 0)
    c.rounds = static_cast<std::size_t>(std::llround(sync.metrics.sg_max(sync.metrics.size() - 1)));
  std::vector<TrajectoryRecord> base;
  for (std::size_t t = 0; t < e.scheme.trajectories; ++t)
    base.push_back(run_sg_baseline(game, c.rounds, modulus, e.scheme.seed, t, sync.x0));
  for (const auto& rec : sync.records)
    for (std::size_t k = 0; k < rec.comm_rounds.size(); ++k)
      if (rec.comm_rounds[k] != k) c.sync_rounds_equal_iterations = false;
  for (const auto& rec : base)
    for (std::size_t k = 0; k < rec.comm_rounds.size(); ++k)
      for (std::uint64_t s : rec.sg_cum[k])
        if (s != rec.comm_rounds[k]) c.baseline_rounds_equal_steps = false;
  c.baseline = compute_metrics(base, sync.reference.x);
  return c;
}

json to_json(const Comparison& c) {
  auto summary = [](const RunMetrics& m) {
    json j;
    if (m.size() == 0) return j;
    const std::size_t last = m.size() - 1;
    j["final_u"] = m.u[last];
    j["comm_rounds"] = m.comm_rounds[last];
    j["sg_steps_per_player"] = m.sg_max(last);
    return j;
  };
  return json{{"synchronous", summary(c.synchronous)},
              {"sg_baseline", summary(c.baseline)},
              {"baseline_modulus", c.baseline_modulus},
              {"rounds", c.rounds},
              {"sync_rounds_equal_iterations", c.sync_rounds_equal_iterations},
              {"baseline_rounds_equal_steps", c.baseline_rounds_equal_steps}};
}

CsvFit fit_csv(const std::string& path) {
  const Table t = read_csv(path);
  CsvFit f;
  const auto eps_col = t.column("eps");
  if (eps_col >= 0) {
    f.source = "k_of_eps";
    auto col = t.column("sg_max");
    if (col < 0) col = t.column("k");
    std::vector<double> eps;
    std::vector<std::optional<double>> ks;
    for (std::size_t r = 0; r < t.rows.size(); ++r) {
      const auto e = cell_value(t, r, eps_col);
      if (!e) continue;
      eps.push_back(*e);
      ks.push_back(cell_value(t, r, col));
    }
    f.inverse_square = fit_inverse_square(eps, ks);
    return f;
  }
  const auto u_col = t.column("u_k");
  if (u_col < 0) throw Error(ErrorCode::kParse, path + ": expected a metrics or k_of_eps table");
  f.source = "metrics";
  std::vector<double> u, sg;
  std::vector<std::ptrdiff_t> sg_cols;
  for (std::size_t c = 0; c < t.header.size(); ++c)
    if (t.header[c].rfind("sg_cum_p", 0) == 0) sg_cols.push_back(static_cast<std::ptrdiff_t>(c));
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    const auto v = cell_value(t, r, u_col);
    if (!v) break;
    u.push_back(*v);
    double m = 0.0;
    for (auto c : sg_cols) m = std::max(m, cell_value(t, r, c).value_or(0.0));
    sg.push_back(m);
  }
  std::size_t end = u.size();
  for (std::size_t k = 0; k < u.size(); ++k)
    if (!(u[k] > 0.0)) {
      end = k;
      break;
    }
  if (end >= 4) f.log_linear = log_linear_fit(u, 1, end);
  const auto eps = epsilon_grid(u.at(0));
  f.inverse_square = fit_inverse_square(eps, k_of_epsilon(u, sg, eps));
  return f;
}

json to_json(const CsvFit& f) {
  json j{{"source", f.source},
         {"inverse_square",
          {{"coefficient", f.inverse_square.coefficient},
           {"intercept", f.inverse_square.intercept},
           {"r2", f.inverse_square.r2},
           {"points", f.inverse_square.points}}}};
  if (f.log_linear)
    j["log_linear"] = {{"slope", f.log_linear->slope},
                       {"intercept", f.log_linear->intercept},
                       {"r2", f.log_linear->r2},
                       {"ratio", f.log_linear->ratio()}};
  return j;
}

}  // namespace snbr
