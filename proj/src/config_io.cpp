#include "btcsim/config_io.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"

namespace btcsim {

using nlohmann::json;

namespace {

void reject_unknown(const json& obj, const std::set<std::string>& allowed, const std::string& where) {
  if (!obj.is_object()) throw ConfigError(where + " must be an object");
  for (const auto& item : obj.items()) {
    if (!allowed.contains(item.key())) throw ConfigError("unknown key '" + item.key() + "' in " + where);
  }
}

template <class T>
void read(const json& obj, const char* key, T& out) {
  if (!obj.contains(key)) return;
  try {
    out = obj.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("bad value for '") + key + "': " + e.what());
  }
}

}  // namespace

ScenarioConfig config_from_json(const std::string& text, const ScenarioConfig& base) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  reject_unknown(doc,
                 {"difficulty", "hashrate", "pools", "peers", "depth", "victim", "bounds", "replications", "seed"},
                 "config");
  ScenarioConfig c = base;
  read(doc, "difficulty", c.rates.difficulty);
  read(doc, "hashrate", c.rates.network_hashrate);
  if (doc.contains("pools")) {
    const json& pools = doc["pools"];
    if (!pools.is_array()) throw ConfigError("pools must be an array");
    c.pools.clear();
    for (const json& p : pools) {
      reject_unknown(p, {"share", "malicious"}, "pool");
      if (!p.contains("share")) throw ConfigError("pool without share");
      PoolSpec spec;
      read(p, "share", spec.share);
      read(p, "malicious", spec.malicious);
      c.pools.push_back(spec);
    }
  }
  if (doc.contains("peers")) {
    const json& peers = doc["peers"];
    reject_unknown(peers, {"honest", "malicious"}, "peers");
    read(peers, "honest", c.honest_peers);
    read(peers, "malicious", c.malicious_peers);
  }
  read(doc, "depth", c.confirmation_depth);
  read(doc, "victim", c.victim);
  if (doc.contains("bounds")) {
    const json& b = doc["bounds"];
    reject_unknown(b, {"max_events", "max_blocks", "max_transactions"}, "bounds");
    read(b, "max_events", c.bounds.max_events);
    read(b, "max_blocks", c.bounds.max_blocks);
    read(b, "max_transactions", c.bounds.max_transactions);
  }
  read(doc, "replications", c.replications);
  read(doc, "seed", c.seed);
  return c;
}

ScenarioConfig load_config(const std::string& path, const ScenarioConfig& base) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return config_from_json(buf.str(), base);
}

std::string config_to_json(const ScenarioConfig& c) {
  json pools = json::array();
  for (const auto& p : c.pools) pools.push_back({{"share", p.share}, {"malicious", p.malicious}});
  json doc = {
      {"difficulty", c.rates.difficulty},
      {"hashrate", c.rates.network_hashrate},
      {"pools", pools},
      {"peers", {{"honest", c.honest_peers}, {"malicious", c.malicious_peers}}},
      {"depth", c.confirmation_depth},
      {"victim", c.victim},
      {"bounds",
       {{"max_events", c.bounds.max_events},
        {"max_blocks", c.bounds.max_blocks},
        {"max_transactions", c.bounds.max_transactions}}},
      {"replications", c.replications},
      {"seed", c.seed},
  };
  return doc.dump(2);
}

}  // namespace btcsim
