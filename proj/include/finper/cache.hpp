#pragma once

// Versioned on-disk cache for character tables.  Each file stores the exact
// table together with its modular certificate data and an fnv checksum of the
// payload; loads re-verify the checksum and the structural invariants before
// handing the table back.

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "finper/chartable.hpp"

namespace finper {

using Json = nlohmann::ordered_json;

inline constexpr int kCacheVersion = 1;

inline Json cyc_to_json(const Cyc& v) {
  Json a = Json::array();
  for (const Cyc::Term& t : v.terms()) a.push_back(Json::array({t.num, t.den, rat_str(t.c)}));
  return a;
}

inline Cyc cyc_from_json(const Json& a) {
  Cyc v;
  for (const Json& e : a) v += Cyc::root(e.at(0).get<long>(), e.at(1).get<long>(), Rat(e.at(2).get<std::string>()));
  return v;
}

inline std::string cache_slug(const std::string& name) {
  std::string s;
  for (char c : name) s.push_back(std::isalnum(static_cast<unsigned char>(c)) ? c : '_');
  return s;
}

inline std::string chartable_cache_path(const std::string& dir, const std::string& group_name, uint64_t seed) {
  return dir + "/chartable-" + cache_slug(group_name) + "-s" + std::to_string(seed) + "-v" +
         std::to_string(kCacheVersion) + ".json";
}

inline Json chartable_payload(const CharTable& T) {
  Json p;
  p["version"] = kCacheVersion;
  p["group"] = T.G->name;
  p["order"] = T.G->size();
  p["classes"] = T.G->num_classes();
  p["degrees"] = T.degrees;
  p["ell"] = T.ell;
  p["unity_order"] = T.unity_order;
  p["zroot"] = T.zroot;
  Json chars = Json::array();
  for (const auto& row : T.chars) {
    Json r = Json::array();
    for (const Cyc& v : row) r.push_back(cyc_to_json(v));
    chars.push_back(std::move(r));
  }
  p["chars"] = std::move(chars);
  p["chars_mod"] = T.chars_mod;
  return p;
}

inline uint64_t payload_checksum(const Json& p) {
  std::string s = p.dump();
  return fnv1a(s.data(), s.size());
}

inline void save_chartable(const std::string& path, const CharTable& T) {
  Json p = chartable_payload(T);
  Json file;
  file["checksum"] = payload_checksum(p);
  file["payload"] = std::move(p);
  std::filesystem::create_directories(std::filesystem::path(path).parent_path());
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write cache file " + path);
  out << file.dump(1) << "\n";
}

// Returns false when the file is absent; throws on corruption or mismatch
// with the live group.
inline bool load_chartable(const std::string& path, const Group& G, CharTable& out) {
  std::ifstream in(path);
  if (!in) return false;
  Json file;
  try {
    in >> file;
  } catch (const std::exception& e) {
    throw std::runtime_error("cache file " + path + " is not valid JSON: " + e.what());
  }
  if (!file.contains("checksum") || !file.contains("payload"))
    throw std::runtime_error("cache file " + path + " is missing fields");
  const Json& p = file["payload"];
  if (payload_checksum(p) != file["checksum"].get<uint64_t>())
    throw std::runtime_error("cache file " + path + " failed its checksum");
  if (p.at("version").get<int>() != kCacheVersion) throw std::runtime_error("cache file " + path + " has a stale version");
  if (p.at("group").get<std::string>() != G.name || p.at("order").get<long>() != G.size() ||
      p.at("classes").get<long>() != G.num_classes())
    throw std::runtime_error("cache file " + path + " does not match the group " + G.name);
  CharTable T;
  T.G = &G;
  T.degrees = p.at("degrees").get<std::vector<long>>();
  T.ell = p.at("ell").get<uint64_t>();
  T.unity_order = p.at("unity_order").get<long>();
  T.zroot = p.at("zroot").get<uint64_t>();
  for (const Json& r : p.at("chars")) {
    std::vector<Cyc> row;
    for (const Json& v : r) row.push_back(cyc_from_json(v));
    T.chars.push_back(std::move(row));
  }
  T.chars_mod = p.at("chars_mod").get<std::vector<std::vector<uint64_t>>>();
  // structural re-validation
  if (static_cast<long>(T.chars.size()) != static_cast<long>(T.degrees.size()))
    throw std::runtime_error("cache file " + path + " has inconsistent shapes");
  long sq = 0;
  for (size_t i = 0; i < T.chars.size(); ++i) {
    if (static_cast<long>(T.chars[i].size()) != G.num_classes())
      throw std::runtime_error("cache file " + path + " has inconsistent shapes");
    if (!(T.chars[i][static_cast<size_t>(G.id_class)] == Cyc(T.degrees[i])))
      throw std::runtime_error("cache file " + path + " has a degree mismatch");
    sq += T.degrees[i] * T.degrees[i];
  }
  if (sq != G.size()) throw std::runtime_error("cache file " + path + " fails the degree-sum identity");
  out = std::move(T);
  return true;
}

}  // namespace finper
