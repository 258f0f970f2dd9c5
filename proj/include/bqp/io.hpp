// Copyright 2026 The pelletflow Authors
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//
// JSON schema (version 1) for instances, scenario models, and sampled
// scenarios, plus the report/trace/manifest writers used by the CLI.

#ifndef BQP_IO_HPP
#define BQP_IO_HPP

#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "bqp/instance.hpp"
#include "bqp/pha.hpp"
#include "bqp/rng.hpp"
#include "bqp/saa.hpp"
#include "bqp/scenario_gen.hpp"
#include "bqp/sched.hpp"

namespace bqp {

using nlohmann::json;

inline constexpr int kSchemaVersion = 1;

struct InstanceFile {
  Instance instance;
  ScenarioModelSpec scenario_model;
  bool has_model = false;
  std::vector<Scenario> scenarios;  // optional pre-sampled set
};

namespace detail {

inline void require_key(const json& j, const std::string& key, const std::string& where) {
  if (!j.contains(key))
    throw std::invalid_argument("instance file: missing \"" + key + "\" in " + where);
}

template <class T>
std::vector<T> vec_field(const json& j, const std::string& key, std::size_t want,
                         const std::string& where) {
  require_key(j, key, where);
  auto v = j.at(key).get<std::vector<T>>();
  if (v.size() != want)
    throw std::invalid_argument("instance file: \"" + key + "\" has " +
                                std::to_string(v.size()) + " entries, expected " +
                                std::to_string(want));
  return v;
}

}  // namespace detail

inline json scenario_model_to_json(const ScenarioModelSpec& spec) {
  return json{{"supply_mean", spec.supply_mean},
              {"supply_cv", spec.supply_cv},
              {"alpha_lo", spec.alpha_lo},
              {"alpha_hi", spec.alpha_hi},
              {"ash_min", spec.ash_min},
              {"ash_mode", spec.ash_mode},
              {"ash_max", spec.ash_max},
              {"moist_min", spec.moist_min},
              {"moist_mode", spec.moist_mode},
              {"moist_max", spec.moist_max},
              {"preheat_prob", spec.preheat_prob},
              {"ash_breaks", spec.ash_breaks},
              {"smear_width", spec.smear_width},
              {"ash_mult", spec.ash_mult},
              {"moist_mult", spec.moist_mult}};
}

inline ScenarioModelSpec scenario_model_from_json(const json& j) {
  ScenarioModelSpec spec;
  detail::require_key(j, "supply_mean", "scenario_model");
  spec.supply_mean = j.at("supply_mean").get<std::vector<double>>();
  spec.supply_cv = j.value("supply_cv", spec.supply_cv);
  spec.alpha_lo = j.value("alpha_lo", spec.alpha_lo);
  spec.alpha_hi = j.value("alpha_hi", spec.alpha_hi);
  spec.ash_min = j.value("ash_min", spec.ash_min);
  spec.ash_mode = j.value("ash_mode", spec.ash_mode);
  spec.ash_max = j.value("ash_max", spec.ash_max);
  spec.moist_min = j.value("moist_min", spec.moist_min);
  spec.moist_mode = j.value("moist_mode", spec.moist_mode);
  spec.moist_max = j.value("moist_max", spec.moist_max);
  spec.preheat_prob = j.value("preheat_prob", spec.preheat_prob);
  spec.ash_breaks = j.value("ash_breaks", spec.ash_breaks);
  spec.smear_width = j.value("smear_width", spec.smear_width);
  spec.ash_mult = j.value("ash_mult", spec.ash_mult);
  spec.moist_mult = j.value("moist_mult", spec.moist_mult);
  return spec;
}

inline json scenario_to_json(const Scenario& s) {
  return json{{"prob", s.prob},         {"supply", s.supply},
              {"dml", s.dml},           {"ash_frac", s.ash_frac},
              {"ash_pct", s.ash_pct},   {"moisture", s.moisture},
              {"preheat", s.preheat}};
}

inline Scenario scenario_from_json(const json& j) {
  Scenario s;
  s.prob = j.value("prob", 1.0);
  detail::require_key(j, "supply", "scenario");
  s.supply = j.at("supply").get<std::vector<double>>();
  detail::require_key(j, "dml", "scenario");
  s.dml = j.at("dml").get<std::vector<double>>();
  detail::require_key(j, "ash_frac", "scenario");
  s.ash_frac = j.at("ash_frac").get<std::vector<double>>();
  s.ash_pct = j.value("ash_pct", std::vector<double>{});
  s.moisture = j.value("moisture", std::vector<double>{});
  s.preheat = j.value("preheat", std::vector<double>{});
  return s;
}

inline json instance_to_json(const InstanceFile& f) {
  const Instance& in = f.instance;
  json sets{{"biomass", in.nb},
            {"suppliers", in.ni},
            {"depot_sites", in.nj},
            {"capacity_levels", in.nc},
            {"pellets", in.np},
            {"ash_ranges", in.nr},
            {"periods", in.nt},
            {"pellets_us", in.pellets_us},
            {"pellets_eu", in.pellets_eu},
            {"pellet_ash", in.pellet_ash},
            {"pellet_biomass", in.pellet_biomass}};
  json params{{"invest", in.invest},
              {"harvest", in.harvest},
              {"transport", in.transport},
              {"store_supply", in.store_supply},
              {"store_depot", in.store_depot},
              {"inspect", in.inspect},
              {"production", in.production},
              {"ash_adjust", in.ash_adjust},
              {"moisture_cost", in.moisture_cost},
              {"shortage", in.shortage},
              {"demand", in.demand},
              {"conversion", in.conversion},
              {"depot_cap", in.depot_cap},
              {"supply_store_cap", in.supply_store_cap},
              {"depot_store_cap", in.depot_store_cap},
              {"loading_loss", in.loading_loss},
              {"transit_loss", in.transit_loss},
              {"transport_loss_enabled", in.transport_loss_enabled}};
  json out{{"bqp_version", kSchemaVersion}, {"sets", sets}, {"parameters", params}};
  if (f.has_model) out["scenario_model"] = scenario_model_to_json(f.scenario_model);
  if (!f.scenarios.empty()) {
    json arr = json::array();
    for (const auto& s : f.scenarios) arr.push_back(scenario_to_json(s));
    out["scenarios"] = arr;
  }
  return out;
}

inline InstanceFile instance_from_json(const json& j) {
  detail::require_key(j, "bqp_version", "root");
  if (j.at("bqp_version").get<int>() != kSchemaVersion)
    throw std::invalid_argument("instance file: unsupported bqp_version");
  detail::require_key(j, "sets", "root");
  detail::require_key(j, "parameters", "root");
  const json& sets = j.at("sets");
  const json& par = j.at("parameters");

  InstanceFile f;
  Instance& in = f.instance;
  for (const char* k : {"biomass", "suppliers", "depot_sites", "capacity_levels",
                        "pellets", "ash_ranges", "periods"})
    detail::require_key(sets, k, "sets");
  in.nb = sets.at("biomass").get<int>();
  in.ni = sets.at("suppliers").get<int>();
  in.nj = sets.at("depot_sites").get<int>();
  in.nc = sets.at("capacity_levels").get<int>();
  in.np = sets.at("pellets").get<int>();
  in.nr = sets.at("ash_ranges").get<int>();
  in.nt = sets.at("periods").get<int>();
  if (in.nb < 1 || in.ni < 1 || in.nj < 1 || in.nc < 1 || in.np < 1 || in.nr < 1 ||
      in.nt < 1)
    throw std::invalid_argument("instance file: all set sizes must be >= 1");
  in.pellets_us = sets.value("pellets_us", std::vector<int>{});
  in.pellets_eu = sets.value("pellets_eu", std::vector<int>{});
  detail::require_key(sets, "pellet_ash", "sets");
  in.pellet_ash = sets.at("pellet_ash").get<std::vector<std::vector<int>>>();
  detail::require_key(sets, "pellet_biomass", "sets");
  in.pellet_biomass = sets.at("pellet_biomass").get<std::vector<std::vector<int>>>();

  const std::size_t nb = in.nb, ni = in.ni, nj = in.nj, nc = in.nc, np = in.np,
                    nr = in.nr, nt = in.nt;
  const std::size_t layers = in.layers();
  in.invest = detail::vec_field<double>(par, "invest", nc * nj, "parameters");
  in.harvest = detail::vec_field<double>(par, "harvest", nb * ni * nt, "parameters");
  // Transport is accepted in two shapes: per harvest-age layer, or per period
  // (age-constant), which is expanded to layers here.
  {
    detail::require_key(par, "transport", "parameters");
    auto v = par.at("transport").get<std::vector<double>>();
    if (v.size() == nb * ni * nj * layers) {
      in.transport = std::move(v);
    } else if (v.size() == nb * ni * nj * nt) {
      in.transport.resize(nb * ni * nj * layers);
      for (std::size_t x = 0; x < nb * ni * nj; ++x)
        for (int t = 0; t < in.nt; ++t)
          for (int tau = 0; tau <= t; ++tau)
            in.transport[x * layers + Instance::layer_index(tau, t)] = v[x * nt + t];
    } else {
      throw std::invalid_argument(
          "instance file: \"transport\" must have |B||I||J||T| (age-constant) or "
          "|B||I||J|T(T+1)/2 (layered) entries");
    }
  }
  in.store_supply = detail::vec_field<double>(par, "store_supply", nb * ni * nt, "parameters");
  in.store_depot = detail::vec_field<double>(par, "store_depot", nb * nj * nt, "parameters");
  in.inspect = detail::vec_field<double>(par, "inspect", nb * nj * nr * nt, "parameters");
  in.production = detail::vec_field<double>(par, "production", np * nj * nt, "parameters");
  in.ash_adjust =
      detail::vec_field<double>(par, "ash_adjust", nb * nj * nr * nr * nt, "parameters");
  in.moisture_cost =
      detail::vec_field<double>(par, "moisture_cost", nb * nj * nr * nt, "parameters");
  in.shortage = detail::vec_field<double>(par, "shortage", np * nt, "parameters");
  in.demand = detail::vec_field<double>(par, "demand", np * nt, "parameters");
  in.conversion = detail::vec_field<double>(par, "conversion", nb * nr * np, "parameters");
  in.depot_cap = detail::vec_field<double>(par, "depot_cap", nc * nj, "parameters");
  in.supply_store_cap =
      detail::vec_field<double>(par, "supply_store_cap", nb * ni, "parameters");
  in.depot_store_cap =
      detail::vec_field<double>(par, "depot_store_cap", nb * nc * nj, "parameters");
  in.loading_loss = par.value("loading_loss", std::vector<double>{});
  in.transit_loss = par.value("transit_loss", std::vector<double>{});
  in.transport_loss_enabled = par.value("transport_loss_enabled", false);

  if (j.contains("scenario_model")) {
    f.scenario_model = scenario_model_from_json(j.at("scenario_model"));
    f.has_model = true;
  }
  if (j.contains("scenarios"))
    for (const auto& sj : j.at("scenarios")) f.scenarios.push_back(scenario_from_json(sj));
  return f;
}

inline void save_instance_file(const std::string& path, const InstanceFile& f) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << instance_to_json(f).dump(2) << "\n";
}

inline InstanceFile load_instance_file(const std::string& path) {
  std::ifstream input(path);
  if (!input) throw std::runtime_error("cannot read " + path);
  json j;
  input >> j;
  return instance_from_json(j);
}

// ---------------------------------------------------------------------------
// Report and trace writers.

inline json first_stage_to_json(const std::vector<std::uint8_t>& y, int nc, int nj) {
  json open = json::array();
  for (int c = 0; c < nc; ++c)
    for (int j = 0; j < nj; ++j)
      if (y[c * nj + j]) open.push_back(json{{"capacity_level", c}, {"site", j}});
  json bits = json::array();
  for (auto b : y) bits.push_back(static_cast<int>(b));
  return json{{"open", open}, {"y", bits}};
}

inline json pha_trace_to_json(const std::vector<PhaIterRecord>& trace,
                              bool include_timing = true) {
  json arr = json::array();
  for (const auto& r : trace) {
    json rec{{"iter", r.iter},
             {"consensus_residual", r.consensus_residual},
             {"bound", r.bound},
             {"incumbent", r.incumbent},
             {"fixed_count", r.fixed_count},
             {"rho_pen", r.rho_pen},
             {"multiplier_residual", r.multiplier_residual}};
    if (include_timing) rec["wall_ms"] = r.wall_ms;
    arr.push_back(rec);
  }
  return arr;
}

/// With include_timing=false the output is a pure function of (instance,
/// config, seed) and can be compared bitwise across runs and worker counts.
inline json saa_report_to_json(const SaaReport& rep, int nc, int nj,
                               bool include_timing = true) {
  json reps = json::array();
  for (const auto& r : rep.replications) {
    json rj{{"index", r.index},
            {"seed", r.seed},
            {"objective", r.objective},
            {"iterations", r.iterations},
            {"y", first_stage_to_json(r.y.y, nc, nj)["y"]}};
    if (include_timing) rj["wall_ms"] = r.wall_ms;
    reps.push_back(rj);
  }
  json out{{"lower_bound", rep.lower_bound},
           {"lower_se", rep.lower_se},
           {"upper_bound", rep.upper_bound},
           {"upper_se", rep.upper_se},
           {"gap", rep.gap},
           {"se_reliable", rep.se_reliable},
           {"best", first_stage_to_json(rep.best_y.y, nc, nj)},
           {"candidate_values", rep.candidate_values},
           {"replications", reps}};
  if (include_timing) out["wall_ms"] = rep.wall_ms;
  return out;
}

inline std::string gantt_csv(const SchedulerTrace& tr) {
  std::ostringstream out;
  out << "task,worker,start_ms,end_ms\n";
  for (const auto& e : tr.entries)
    out << e.task << "," << e.worker << "," << e.start_ms << "," << e.end_ms << "\n";
  return out.str();
}

// ---------------------------------------------------------------------------
// Run manifest: content hashes of every input plus the command line, written
// once per output directory so results can be traced back to their inputs.

struct RunManifest {
  std::string command;
  std::uint64_t seed = 0;
  std::vector<std::pair<std::string, std::string>> inputs;   // (path, hash hex)
  std::vector<std::string> outputs;
};

inline std::string content_hash_hex(const std::string& bytes) {
  std::uint64_t h = fnv1a64(std::string_view(bytes.data(), bytes.size()));
  std::ostringstream out;
  out << std::hex << h;
  return out.str();
}

inline std::string file_hash_hex(const std::string& path) {
  std::ifstream input(path, std::ios::binary);
  if (!input) throw std::runtime_error("cannot hash " + path);
  std::ostringstream buf;
  buf << input.rdbuf();
  return content_hash_hex(buf.str());
}

inline json manifest_to_json(const RunManifest& m) {
  json inputs = json::array();
  for (const auto& [path, hash] : m.inputs)
    inputs.push_back(json{{"path", path}, {"fnv1a64", hash}});
  return json{{"bqp_version", kSchemaVersion},
              {"command", m.command},
              {"seed", m.seed},
              {"inputs", inputs},
              {"outputs", m.outputs}};
}

inline void write_manifest(const std::string& path, const RunManifest& m) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << manifest_to_json(m).dump(2) << "\n";
}

}  // namespace bqp

#endif  // BQP_IO_HPP
