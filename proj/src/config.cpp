// Copyright 2026 The covsim Authors
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

#include "covsim/config.hpp"

#include <cstdio>
#include <fstream>
#include <set>
#include <type_traits>

namespace covsim {

namespace {

using nlohmann::json;

// Reads keys from one JSON object and rejects any key it was not asked for.
class StrictObject {
 public:
  StrictObject(const json& obj, std::string path) : obj_(obj), path_(std::move(path)) {
    if (!obj_.is_object()) throw InputError("'" + path_ + "' must be an object");
  }

  const json* find(const std::string& key) {
    auto it = obj_.find(key);
    if (it == obj_.end()) return nullptr;
    seen_.insert(key);
    return &*it;
  }

  template <class T>
  void read(const std::string& key, T& out) {
    const json* v = find(key);
    if (!v) return;
    if constexpr (std::is_same_v<T, bool>) {
      if (!v->is_boolean()) fail(key, "a boolean");
      out = v->get<bool>();
    } else if constexpr (std::is_integral_v<T>) {
      if (!v->is_number_integer()) fail(key, "an integer");
      if constexpr (std::is_unsigned_v<T>) {
        if (v->is_number_unsigned()) {
          out = v->get<T>();
        } else {
          if (v->get<std::int64_t>() < 0) fail(key, "a non-negative integer");
          out = static_cast<T>(v->get<std::int64_t>());
        }
      } else {
        out = static_cast<T>(v->get<std::int64_t>());
      }
    } else if constexpr (std::is_floating_point_v<T>) {
      if (!v->is_number()) fail(key, "a number");
      out = v->get<double>();
    } else {
      if (!v->is_string()) fail(key, "a string");
      out = v->get<std::string>();
    }
  }

  StrictObject child(const std::string& key) {
    const json* v = find(key);
    static const json empty = json::object();
    return StrictObject(v ? *v : empty, path_.empty() ? key : path_ + "." + key);
  }
  bool has(const std::string& key) const { return obj_.contains(key); }

  void finish() const {
    for (const auto& item : obj_.items()) {
      if (!seen_.count(item.key())) {
        throw InputError("unknown config key '" + qualified(item.key()) + "'");
      }
    }
  }

 private:
  [[noreturn]] void fail(const std::string& key, const char* what) const {
    throw InputError("config key '" + qualified(key) + "' must be " + what);
  }
  std::string qualified(const std::string& key) const {
    return path_.empty() ? key : path_ + "." + key;
  }

  const json& obj_;
  std::string path_;
  std::set<std::string> seen_;
};

WeightFn parse_weights(const std::string& s) {
  if (s == "uniform") return WeightFn::kUniform;
  if (s == "random") return WeightFn::kRandom;
  throw InputError("city.grid.weights must be 'uniform' or 'random'");
}

}  // namespace

void RunConfig::validate() const {
  params.validate();
  lbt.validate();
  trigger.validate();
  if (agents < 1) throw InputError("invalid parameter: agents must be >= 1");
  if (runs < 1) throw InputError("invalid parameter: runs must be >= 1");
  if (intervention == Intervention::kLockdownFixed && !trigger.lockdown_days) {
    throw InputError("lockdown-fixed needs trigger.lockdown_days");
  }
  if (const auto* c = std::get_if<ClusteredSeeding>(&seeding); c && c->count < 0) {
    throw InputError("invalid parameter: seeding.count must be >= 0");
  }
  if (const auto* u = std::get_if<UniformSeeding>(&seeding)) {
    if (u->trials < 0 || !(u->prob >= 0.0 && u->prob <= 1.0)) {
      throw InputError("invalid parameter: uniform seeding needs trials >= 0, prob in [0,1]");
    }
  }
  auto unit = [](double x) { return x >= 0.0 && x <= 1.0; };
  if (const auto* r = std::get_if<UniformReporting>(&reporting); r && !unit(r->rho)) {
    throw InputError("invalid parameter: reporting.rho must lie in [0,1]");
  }
  if (const auto* r = std::get_if<NonuniformReporting>(&reporting)) {
    if (!unit(r->fraction) || !unit(r->low) || !unit(r->high)) {
      throw InputError("invalid parameter: nonuniform reporting values must lie in [0,1]");
    }
  }
}

RunConfig config_from_json(const json& doc, const std::filesystem::path& base_dir) {
  RunConfig cfg;
  StrictObject root(doc, "");

  {
    StrictObject city = root.child("city");
    if (city.has("file") && city.has("grid")) {
      throw InputError("city must give either 'file' or 'grid', not both");
    }
    if (city.has("file")) {
      std::string file;
      city.read("file", file);
      std::filesystem::path p(file);
      cfg.city.file = p.is_relative() && !base_dir.empty() ? base_dir / p : p;
    } else {
      StrictObject grid = city.child("grid");
      std::string weights = cfg.city.grid.weights == WeightFn::kRandom ? "random" : "uniform";
      grid.read("rows", cfg.city.grid.rows);
      grid.read("cols", cfg.city.grid.cols);
      grid.read("weights", weights);
      grid.read("seed", cfg.city.grid.seed);
      grid.read("destinations", cfg.city.grid.destinations);
      grid.read("no_visit", cfg.city.grid.no_visit);
      cfg.city.grid.weights = parse_weights(weights);
      grid.finish();
    }
    city.finish();
  }

  root.read("agents", cfg.agents);
  root.read("days", cfg.params.horizon);
  root.read("budget", cfg.params.budget);
  {
    StrictObject p = root.child("params");
    p.read("p", cfg.params.p);
    p.read("t_ei", cfg.params.t_ei);
    p.read("t_ir", cfg.params.t_ir);
    p.read("t_si", cfg.params.t_si);
    p.read("t_is", cfg.params.t_is);
    p.read("k_nr", cfg.params.k_nr);
    p.read("k_nf", cfg.params.k_nf);
    p.read("k_wr", cfg.params.k_wr);
    p.read("k_wf", cfg.params.k_wf);
    p.read("fn_rate", cfg.params.fn_rate);
    p.finish();
  }
  {
    std::string policy(to_string(cfg.policy));
    root.read("policy", policy);
    cfg.policy = parse_policy(policy);
  }
  {
    StrictObject lbt = root.child("lbt");
    lbt.read("alpha_loc", cfg.lbt.alpha_loc);
    lbt.read("alpha_vis", cfg.lbt.alpha_vis);
    lbt.read("beta", cfg.lbt.beta);
    lbt.read("epsilon", cfg.lbt.epsilon);
    lbt.read("floor", cfg.lbt.floor);
    lbt.finish();
  }
  {
    std::string intervention(to_string(cfg.intervention));
    root.read("intervention", intervention);
    cfg.intervention = parse_intervention(intervention);
  }
  {
    StrictObject trig = root.child("trigger");
    trig.read("tau", cfg.trigger.tau);
    trig.read("chord", cfg.trigger.chord);
    trig.read("window", cfg.trigger.window);
    trig.read("quarantine_days", cfg.trigger.quarantine_days);
    if (const json* v = trig.find("lockdown_days"); v && v->is_null()) {
      cfg.trigger.lockdown_days.reset();
    } else if (v) {
      int days = 0;
      trig.read("lockdown_days", days);
      cfg.trigger.lockdown_days = days;
    }
    trig.finish();
  }
  {
    StrictObject seed = root.child("seeding");
    std::string type = "clustered";
    seed.read("type", type);
    if (type == "clustered") {
      ClusteredSeeding c;
      seed.read("locality", c.locality);
      seed.read("count", c.count);
      cfg.seeding = c;
    } else if (type == "uniform") {
      UniformSeeding u;
      seed.read("trials", u.trials);
      seed.read("prob", u.prob);
      cfg.seeding = u;
    } else {
      throw InputError("seeding.type must be 'clustered' or 'uniform'");
    }
    seed.finish();
  }
  {
    StrictObject rep = root.child("reporting");
    std::string type = "uniform";
    rep.read("type", type);
    if (type == "uniform") {
      UniformReporting u;
      rep.read("rho", u.rho);
      cfg.reporting = u;
    } else if (type == "nonuniform") {
      NonuniformReporting n;
      rep.read("fraction", n.fraction);
      rep.read("low", n.low);
      rep.read("high", n.high);
      rep.read("seed", n.seed);
      cfg.reporting = n;
    } else {
      throw InputError("reporting.type must be 'uniform' or 'nonuniform'");
    }
    rep.finish();
  }
  root.read("seed", cfg.master_seed);
  root.read("runs", cfg.runs);
  root.finish();

  cfg.validate();
  return cfg;
}

RunConfig load_config(const std::filesystem::path& path,
                      std::span<const std::string> overrides) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open config file " + path.string());
  json doc;
  try {
    in >> doc;
  } catch (const json::exception& e) {
    throw InputError("config parse error in " + path.string() + ": " + e.what());
  }
  for (const auto& o : overrides) apply_override(doc, o);
  return config_from_json(doc, path.parent_path());
}

json config_to_json(const RunConfig& cfg) {
  json doc;
  if (cfg.city.file) {
    doc["city"] = {{"file", cfg.city.file->string()}};
  } else {
    const auto& g = cfg.city.grid;
    doc["city"] = {{"grid",
                    {{"rows", g.rows},
                     {"cols", g.cols},
                     {"weights", g.weights == WeightFn::kRandom ? "random" : "uniform"},
                     {"seed", g.seed},
                     {"destinations", g.destinations},
                     {"no_visit", g.no_visit}}}};
  }
  doc["agents"] = cfg.agents;
  doc["days"] = cfg.params.horizon;
  doc["budget"] = cfg.params.budget;
  const auto& p = cfg.params;
  doc["params"] = {{"p", p.p},       {"t_ei", p.t_ei}, {"t_ir", p.t_ir},
                   {"t_si", p.t_si}, {"t_is", p.t_is}, {"k_nr", p.k_nr},
                   {"k_nf", p.k_nf}, {"k_wr", p.k_wr}, {"k_wf", p.k_wf},
                   {"fn_rate", p.fn_rate}};
  doc["policy"] = std::string(to_string(cfg.policy));
  doc["lbt"] = {{"alpha_loc", cfg.lbt.alpha_loc}, {"alpha_vis", cfg.lbt.alpha_vis},
                {"beta", cfg.lbt.beta},           {"epsilon", cfg.lbt.epsilon},
                {"floor", cfg.lbt.floor}};
  doc["intervention"] = std::string(to_string(cfg.intervention));
  doc["trigger"] = {{"tau", cfg.trigger.tau},
                    {"chord", cfg.trigger.chord},
                    {"window", cfg.trigger.window},
                    {"quarantine_days", cfg.trigger.quarantine_days},
                    {"lockdown_days", cfg.trigger.lockdown_days
                                          ? json(*cfg.trigger.lockdown_days)
                                          : json(nullptr)}};
  if (const auto* c = std::get_if<ClusteredSeeding>(&cfg.seeding)) {
    doc["seeding"] = {{"type", "clustered"}, {"locality", c->locality}, {"count", c->count}};
  } else {
    const auto& u = std::get<UniformSeeding>(cfg.seeding);
    doc["seeding"] = {{"type", "uniform"}, {"trials", u.trials}, {"prob", u.prob}};
  }
  if (const auto* u = std::get_if<UniformReporting>(&cfg.reporting)) {
    doc["reporting"] = {{"type", "uniform"}, {"rho", u->rho}};
  } else {
    const auto& n = std::get<NonuniformReporting>(cfg.reporting);
    doc["reporting"] = {{"type", "nonuniform"}, {"fraction", n.fraction},
                        {"low", n.low},         {"high", n.high},
                        {"seed", n.seed}};
  }
  doc["seed"] = cfg.master_seed;
  doc["runs"] = cfg.runs;
  return doc;
}

void apply_override(json& doc, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0) {
    throw InputError("override must look like key=value: '" + assignment + "'");
  }
  const std::string path = assignment.substr(0, eq);
  const std::string text = assignment.substr(eq + 1);
  json value = json::parse(text, nullptr, /*allow_exceptions=*/false);
  if (value.is_discarded()) value = text;

  json* node = &doc;
  std::size_t start = 0;
  while (true) {
    const auto dot = path.find('.', start);
    const std::string key = path.substr(start, dot - start);
    if (key.empty()) throw InputError("bad override path '" + path + "'");
    if (!node->is_object()) throw InputError("override path '" + path + "' crosses a non-object");
    if (dot == std::string::npos) {
      (*node)[key] = value;
      return;
    }
    node = &(*node)[key];
    if (node->is_null()) *node = json::object();
    start = dot + 1;
  }
}

std::string config_hash(const RunConfig& config) {
  const std::string text = config_to_json(config).dump();
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace covsim
