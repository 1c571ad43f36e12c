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

#include "covsim/city.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <string>
#include <unordered_map>

#include <spdlog/spdlog.h>

#include "covsim/rng.hpp"

namespace covsim {

LocalityId CityModel::index_of(std::int64_t id) const {
  for (std::size_t i = 0; i < localities.size(); ++i) {
    if (localities[i].id == id) return static_cast<LocalityId>(i);
  }
  throw InputError("unknown locality id " + std::to_string(id));
}

void validate_city(const CityModel& city) {
  const std::size_t n = city.size();
  if (n == 0) throw InputError("city has no localities");
  if (city.adjacency.size() != n) throw InputError("adjacency size mismatch");

  double total = 0.0;
  for (const auto& loc : city.localities) {
    if (!std::isfinite(loc.population) || loc.population < 0.0) {
      throw InputError("negative population for locality " +
                       std::to_string(loc.id));
    }
    total += loc.population;
  }
  if (!(total > 0.0)) throw InputError("population weights sum to zero");

  for (std::size_t l = 0; l < n; ++l) {
    const auto& adj = city.adjacency[l];
    if (!std::is_sorted(adj.begin(), adj.end()) ||
        std::adjacent_find(adj.begin(), adj.end()) != adj.end()) {
      throw InputError("adjacency list not sorted/unique");
    }
    if (!std::binary_search(adj.begin(), adj.end(), LocalityId(l))) {
      throw InputError("locality not adjacent to itself");
    }
    for (LocalityId m : adj) {
      if (m >= n) throw InputError("adjacency references unknown locality");
      const auto& back = city.adjacency[m];
      if (!std::binary_search(back.begin(), back.end(), LocalityId(l))) {
        throw InputError("asymmetric adjacency");
      }
    }
  }

  for (LocalityId d : city.destinations) {
    if (d >= n) throw InputError("destination references unknown locality");
  }
  if (city.od.rows() != n || city.od.cols() != city.destinations.size() + 1) {
    throw InputError("od_matrix shape mismatch");
  }
  for (std::size_t r = 0; r < n; ++r) {
    double sum = 0.0;
    for (double v : city.od.row(r)) {
      if (!std::isfinite(v) || v < 0.0 || v > 1.0) {
        throw InputError("od_matrix entry outside [0,1]");
      }
      sum += v;
    }
    if (std::abs(sum - 1.0) > 1e-9) throw InputError("row-sum violation");
  }
}

namespace {

const nlohmann::json& member(const nlohmann::json& obj, const char* key) {
  auto it = obj.find(key);
  if (it == obj.end()) throw InputError(std::string("missing key '") + key + "'");
  return *it;
}

}  // namespace

CityModel parse_city(const nlohmann::json& doc) {
  if (!doc.is_object()) throw InputError("city document must be an object");
  CityModel city;
  std::unordered_map<std::int64_t, LocalityId> index;
  std::vector<std::vector<std::int64_t>> raw_adjacent;

  try {
    const auto& locs = member(doc, "localities");
    if (!locs.is_array() || locs.empty()) {
      throw InputError("'localities' must be a non-empty array");
    }
    for (const auto& entry : locs) {
      Locality loc;
      loc.id = member(entry, "id").get<std::int64_t>();
      loc.population = member(entry, "population").get<double>();
      if (!index.emplace(loc.id, LocalityId(city.localities.size())).second) {
        throw InputError("duplicate locality id " + std::to_string(loc.id));
      }
      city.localities.push_back(loc);
      std::vector<std::int64_t> adj;
      if (auto it = entry.find("adjacent"); it != entry.end()) {
        adj = it->get<std::vector<std::int64_t>>();
      }
      raw_adjacent.push_back(std::move(adj));
    }

    auto lookup = [&](std::int64_t id) {
      auto it = index.find(id);
      if (it == index.end()) {
        throw InputError("unknown locality id " + std::to_string(id));
      }
      return it->second;
    };

    const std::size_t n = city.localities.size();
    city.adjacency.assign(n, {});
    bool asymmetric = false;
    std::vector<std::vector<LocalityId>> declared(n);
    for (std::size_t l = 0; l < n; ++l) {
      for (auto id : raw_adjacent[l]) declared[l].push_back(lookup(id));
      std::sort(declared[l].begin(), declared[l].end());
    }
    for (std::size_t l = 0; l < n; ++l) {
      city.adjacency[l].push_back(LocalityId(l));
      for (LocalityId m : declared[l]) {
        city.adjacency[l].push_back(m);
        city.adjacency[m].push_back(LocalityId(l));
        if (m != l &&
            !std::binary_search(declared[m].begin(), declared[m].end(),
                                LocalityId(l))) {
          asymmetric = true;
        }
      }
    }
    for (auto& adj : city.adjacency) {
      std::sort(adj.begin(), adj.end());
      adj.erase(std::unique(adj.begin(), adj.end()), adj.end());
    }
    if (asymmetric) {
      spdlog::warn("city adjacency is not symmetric; using symmetric closure");
    }

    for (auto id : member(doc, "destinations").get<std::vector<std::int64_t>>()) {
      city.destinations.push_back(lookup(id));
    }

    const auto& rows = member(doc, "od_matrix");
    if (!rows.is_array() || rows.size() != n) {
      throw InputError("od_matrix must have one row per locality");
    }
    const std::size_t cols = city.destinations.size() + 1;
    city.od = ODMatrix(n, cols);
    for (std::size_t r = 0; r < n; ++r) {
      auto row = rows[r].get<std::vector<double>>();
      if (row.size() != cols) {
        throw InputError("od_matrix row " + std::to_string(r) + " has " +
                         std::to_string(row.size()) + " entries, expected " +
                         std::to_string(cols));
      }
      double sum = 0.0;
      for (double v : row) {
        if (!std::isfinite(v) || v < 0.0 || v > 1.0) {
          throw InputError("od_matrix entry outside [0,1] in row " +
                           std::to_string(r));
        }
        sum += v;
      }
      if (std::abs(sum - 1.0) > 1e-6) {
        std::ostringstream msg;
        msg << "row-sum violation: od_matrix row " << r << " sums to " << sum;
        throw InputError(msg.str());
      }
      for (std::size_t c = 0; c < cols; ++c) city.od.at(r, c) = row[c] / sum;
    }
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("city parse error: ") + e.what());
  }

  validate_city(city);
  return city;
}

CityModel load_city(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open city file " + path.string());
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    throw InputError("city parse error in " + path.string() + ": " + e.what());
  }
  return parse_city(doc);
}

nlohmann::json city_to_json(const CityModel& city) {
  nlohmann::json doc;
  auto& locs = doc["localities"] = nlohmann::json::array();
  for (std::size_t l = 0; l < city.size(); ++l) {
    nlohmann::json adj = nlohmann::json::array();
    for (LocalityId m : city.adjacency[l]) {
      if (m != l) adj.push_back(city.localities[m].id);
    }
    locs.push_back({{"id", city.localities[l].id},
                    {"population", city.localities[l].population},
                    {"adjacent", std::move(adj)}});
  }
  auto& dests = doc["destinations"] = nlohmann::json::array();
  for (LocalityId d : city.destinations) dests.push_back(city.localities[d].id);
  auto& rows = doc["od_matrix"] = nlohmann::json::array();
  for (std::size_t r = 0; r < city.od.rows(); ++r) {
    auto row = city.od.row(r);
    rows.push_back(std::vector<double>(row.begin(), row.end()));
  }
  return doc;
}

void save_city(const CityModel& city, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << city_to_json(city).dump(1) << '\n';
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

CityModel generate_grid_city(const GridSpec& spec) {
  if (spec.rows < 1 || spec.cols < 1) {
    throw InputError("grid rows and cols must be >= 1");
  }
  if (spec.destinations < 0 || !(spec.no_visit >= 0.0 && spec.no_visit <= 1.0)) {
    throw InputError("invalid grid destinations/no_visit");
  }
  const std::size_t n = std::size_t(spec.rows) * std::size_t(spec.cols);
  const RandomStreams streams(spec.seed);
  CityModel city;
  city.localities.resize(n);
  city.adjacency.resize(n);
  for (std::size_t l = 0; l < n; ++l) {
    city.localities[l].id = static_cast<std::int64_t>(l);
    if (spec.weights == WeightFn::kUniform) {
      city.localities[l].population = 1.0;
    } else {
      auto rng = streams.stream(Stream::kCityWeights, 0, l);
      city.localities[l].population = 0.2 + 1.6 * uniform01(rng);
    }
    const int r = int(l) / spec.cols;
    const int c = int(l) % spec.cols;
    auto& adj = city.adjacency[l];
    if (r > 0) adj.push_back(LocalityId(l - spec.cols));
    if (c > 0) adj.push_back(LocalityId(l - 1));
    adj.push_back(LocalityId(l));
    if (c + 1 < spec.cols) adj.push_back(LocalityId(l + 1));
    if (r + 1 < spec.rows) adj.push_back(LocalityId(l + spec.cols));
  }

  std::vector<LocalityId> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](LocalityId a, LocalityId b) {
    return city.localities[a].population > city.localities[b].population;
  });
  const std::size_t k = std::min<std::size_t>(spec.destinations, n);
  city.destinations.assign(order.begin(), order.begin() + k);
  std::sort(city.destinations.begin(), city.destinations.end());

  city.od = ODMatrix(n, k + 1);
  for (std::size_t l = 0; l < n; ++l) {
    if (k == 0) {
      city.od.at(l, 0) = 1.0;
      continue;
    }
    std::vector<double> attraction(k);
    for (std::size_t d = 0; d < k; ++d) {
      const LocalityId dest = city.destinations[d];
      const int dist = std::abs(int(l) / spec.cols - int(dest) / spec.cols) +
                       std::abs(int(l) % spec.cols - int(dest) % spec.cols);
      attraction[d] = city.localities[dest].population / (1.0 + dist);
    }
    const double total = std::accumulate(attraction.begin(), attraction.end(), 0.0);
    double visit_mass = 0.0;
    for (std::size_t d = 0; d < k; ++d) {
      city.od.at(l, d) = (1.0 - spec.no_visit) * attraction[d] / total;
      visit_mass += city.od.at(l, d);
    }
    city.od.at(l, k) = std::max(0.0, 1.0 - visit_mass);
  }
  validate_city(city);
  return city;
}

std::vector<std::size_t> apportion(std::span<const double> weights,
                                   std::size_t n) {
  const double total = std::accumulate(weights.begin(), weights.end(), 0.0);
  std::vector<std::size_t> counts(weights.size(), 0);
  if (weights.empty() || !(total > 0.0)) return counts;
  std::vector<double> remainder(weights.size());
  std::size_t assigned = 0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    const double quota = double(n) * weights[i] / total;
    counts[i] = static_cast<std::size_t>(std::floor(quota));
    remainder[i] = quota - double(counts[i]);
    assigned += counts[i];
  }
  // Floating error can push the floor sum past n by one on pathological
  // inputs; trim from the smallest remainders.
  std::vector<std::size_t> order(weights.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return remainder[a] > remainder[b];
  });
  for (std::size_t j = 0; assigned < n; j = (j + 1) % order.size()) {
    ++counts[order[j]];
    ++assigned;
  }
  for (std::size_t j = order.size(); assigned > n;) {
    j = (j == 0 ? order.size() : j) - 1;
    if (counts[order[j]] > 0) {
      --counts[order[j]];
      --assigned;
    }
  }
  return counts;
}

namespace {

// Floyd's algorithm: k distinct values from [0, m), in draw order.
std::vector<std::uint64_t> sample_distinct(CounterRng& rng, std::uint64_t m,
                                           std::uint64_t k) {
  std::vector<std::uint64_t> chosen;
  chosen.reserve(k);
  for (std::uint64_t j = m - k; j < m; ++j) {
    const std::uint64_t t = uniform_below(rng, j + 1);
    if (std::find(chosen.begin(), chosen.end(), t) == chosen.end()) {
      chosen.push_back(t);
    } else {
      chosen.push_back(j);
    }
  }
  return chosen;
}

// Samples `k` contacts for agent `self` from the ascending `pool` (which may
// contain `self`), appending both directions of each edge.
// Returns false if the pool was too small.
bool sample_contacts(std::span<const AgentId> pool, AgentId self, int k,
                     CounterRng rng, std::vector<std::uint64_t>& edges) {
  const auto self_it = std::lower_bound(pool.begin(), pool.end(), self);
  const bool contains_self = self_it != pool.end() && *self_it == self;
  const std::size_t self_pos = std::size_t(self_it - pool.begin());
  const std::uint64_t m = pool.size() - (contains_self ? 1 : 0);
  const std::uint64_t take = std::min<std::uint64_t>(m, std::uint64_t(k));
  for (std::uint64_t idx : sample_distinct(rng, m, take)) {
    if (contains_self && idx >= self_pos) ++idx;
    const AgentId other = pool[idx];
    edges.push_back((std::uint64_t(self) << 32) | other);
    edges.push_back((std::uint64_t(other) << 32) | self);
  }
  return take == std::uint64_t(k);
}

ContactLists to_csr(std::vector<std::uint64_t>& edges, std::size_t n) {
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
  ContactLists lists;
  lists.offsets.assign(n + 1, 0);
  lists.targets.resize(edges.size());
  for (std::size_t e = 0; e < edges.size(); ++e) {
    ++lists.offsets[(edges[e] >> 32) + 1];
    lists.targets[e] = static_cast<AgentId>(edges[e] & 0xffffffffULL);
  }
  std::partial_sum(lists.offsets.begin(), lists.offsets.end(),
                   lists.offsets.begin());
  return lists;
}

}  // namespace

std::span<const AgentId> AgentRoster::residents(LocalityId l) const {
  // Agents are numbered in locality order: residents of l are the id range
  // [offset_l, offset_{l+1}).
  const std::size_t begin = locality_offsets_.at(l);
  const std::size_t end = locality_offsets_.at(l + 1);
  return std::span<const AgentId>(resident_ids_).subspan(begin, end - begin);
}

std::span<const AgentId> AgentRoster::visitors(DestinationId d) const {
  const std::size_t begin = visit_offsets_.at(d);
  const std::size_t end = visit_offsets_.at(d + 1);
  return std::span<const AgentId>(by_visit_).subspan(begin, end - begin);
}

std::span<const AgentId> AgentRoster::neighborhood_pool(LocalityId l) const {
  const std::size_t begin = pool_offsets_.at(l);
  const std::size_t end = pool_offsets_.at(l + 1);
  return std::span<const AgentId>(pools_).subspan(begin, end - begin);
}

AgentRoster build_roster(const CityModel& city, std::size_t n,
                         const SimParams& params, std::uint64_t seed) {
  if (n < 1) throw InputError("agent count must be >= 1");
  if (n > std::size_t(0xfffffffe)) throw InputError("agent count too large");
  const RandomStreams streams(seed);
  const std::size_t nloc = city.size();
  const std::size_t ndest = city.destinations.size();

  std::vector<double> weights(nloc);
  for (std::size_t l = 0; l < nloc; ++l) weights[l] = city.localities[l].population;
  const auto counts = apportion(weights, n);

  AgentRoster roster;
  roster.agents_.resize(n);
  roster.resident_ids_.resize(n);
  std::iota(roster.resident_ids_.begin(), roster.resident_ids_.end(), AgentId(0));
  roster.locality_offsets_.assign(nloc + 1, 0);
  std::partial_sum(counts.begin(), counts.end(), roster.locality_offsets_.begin() + 1);

  std::vector<std::size_t> visit_counts(ndest, 0);
  for (std::size_t l = 0; l < nloc; ++l) {
    const auto row = city.od.row(l);
    std::vector<double> cdf(row.size());
    std::partial_sum(row.begin(), row.end(), cdf.begin());
    std::size_t last_positive = row.size() - 1;
    while (last_positive > 0 && row[last_positive] <= 0.0) --last_positive;

    for (std::size_t i = roster.locality_offsets_[l]; i < roster.locality_offsets_[l + 1]; ++i) {
      Agent& a = roster.agents_[i];
      a.id = AgentId(i);
      a.home = LocalityId(l);
      auto rng = streams.stream(Stream::kVisitPlace, 0, i);
      const double u = uniform01(rng);
      std::size_t col = std::size_t(std::upper_bound(cdf.begin(), cdf.end(), u) - cdf.begin());
      if (col >= row.size()) col = last_positive;
      if (col < ndest) {
        a.visit_place = DestinationId(col);
        ++visit_counts[col];
      }
    }
  }

  roster.visit_offsets_.assign(ndest + 1, 0);
  std::partial_sum(visit_counts.begin(), visit_counts.end(), roster.visit_offsets_.begin() + 1);
  roster.by_visit_.resize(roster.visit_offsets_.back());
  {
    std::vector<std::size_t> cursor(roster.visit_offsets_.begin(), roster.visit_offsets_.end() - 1);
    for (const Agent& a : roster.agents_) {
      if (a.visit_place) roster.by_visit_[cursor[*a.visit_place]++] = a.id;
    }
  }

  roster.pool_offsets_.assign(nloc + 1, 0);
  for (std::size_t l = 0; l < nloc; ++l) {
    std::size_t size = 0;
    for (LocalityId m : city.adjacency[l]) size += counts[m];
    roster.pool_offsets_[l + 1] = roster.pool_offsets_[l] + size;
  }
  roster.pools_.reserve(roster.pool_offsets_.back());
  for (std::size_t l = 0; l < nloc; ++l) {
    for (LocalityId m : city.adjacency[l]) {
      for (std::size_t i = roster.locality_offsets_[m]; i < roster.locality_offsets_[m + 1]; ++i) {
        roster.pools_.push_back(AgentId(i));
      }
    }
  }

  std::vector<std::uint64_t> edges;
  edges.reserve(2 * n * std::size_t(params.k_nf));
  std::size_t short_neighborhood = 0;
  for (const Agent& a : roster.agents_) {
    if (!sample_contacts(roster.neighborhood_pool(a.home), a.id, params.k_nf,
                         streams.stream(Stream::kNeighborhoodContacts, 0, a.id), edges)) {
      ++short_neighborhood;
    }
  }
  roster.neighborhood_contacts_ = to_csr(edges, n);

  edges.clear();
  std::size_t short_workplace = 0;
  for (const Agent& a : roster.agents_) {
    if (!a.visit_place) continue;
    if (!sample_contacts(roster.visitors(*a.visit_place), a.id, params.k_wf,
                         streams.stream(Stream::kWorkplaceContacts, 0, a.id), edges)) {
      ++short_workplace;
    }
  }
  roster.workplace_contacts_ = to_csr(edges, n);

  if (short_neighborhood > 0) {
    spdlog::warn("{} agents have fewer than {} neighborhood candidates; took all available",
                 short_neighborhood, params.k_nf);
  }
  if (short_workplace > 0) {
    spdlog::warn("{} agents have fewer than {} workplace candidates; took all available",
                 short_workplace, params.k_wf);
  }
  return roster;
}

std::vector<AgentId> neighborhood_residents(const AgentRoster& roster,
                                            const CityModel& city,
                                            LocalityId l) {
  if (l >= city.size() || l >= roster.locality_count()) {
    throw std::out_of_range("unknown locality " + std::to_string(l));
  }
  std::vector<AgentId> out;
  for (LocalityId m : city.adjacency[l]) {
    auto r = roster.residents(m);
    out.insert(out.end(), r.begin(), r.end());
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace covsim
