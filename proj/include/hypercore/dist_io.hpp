#pragma once

#include <fstream>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "hypercore/census.hpp"

// Distribution file format: {"s": int, "total": number, "weights":
// {code-hex: weight}}. Codes are hex-encoded so the keys stay plain ASCII
// regardless of the code alphabet.

namespace hypercore {

inline std::string hex_encode(const std::string& raw) {
  static const char* digits = "0123456789abcdef";
  std::string out;
  out.reserve(raw.size() * 2);
  for (unsigned char ch : raw) {
    out += digits[ch >> 4];
    out += digits[ch & 0x0f];
  }
  return out;
}

inline std::string hex_decode(const std::string& hex) {
  if (hex.size() % 2 != 0) throw std::runtime_error("hex_decode: odd length");
  auto nib = [](char c) -> int {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    if (c >= 'A' && c <= 'F') return c - 'A' + 10;
    throw std::runtime_error("hex_decode: bad digit");
  };
  std::string out;
  out.reserve(hex.size() / 2);
  for (std::size_t i = 0; i < hex.size(); i += 2)
    out += (char)((nib(hex[i]) << 4) | nib(hex[i + 1]));
  return out;
}

inline nlohmann::json distribution_to_json(const NeighborhoodDistribution& dist) {
  nlohmann::json weights = nlohmann::json::object();
  for (const auto& [code, w] : dist.weights) weights[hex_encode(code)] = w;
  return nlohmann::json{{"s", dist.s}, {"total", dist.total}, {"weights", weights}};
}

inline NeighborhoodDistribution distribution_from_json(const nlohmann::json& j) {
  NeighborhoodDistribution dist;
  dist.s = j.at("s").get<int>();
  dist.total = j.at("total").get<double>();
  for (const auto& [key, w] : j.at("weights").items())
    dist.weights[hex_decode(key)] = w.get<double>();
  return dist;
}

inline void write_distribution_file(const std::string& path,
                                    const NeighborhoodDistribution& dist) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open " + path + " for writing");
  os << distribution_to_json(dist).dump(2) << '\n';
}

inline NeighborhoodDistribution read_distribution_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open " + path);
  nlohmann::json j;
  is >> j;
  return distribution_from_json(j);
}

inline nlohmann::json report_to_json(const ComparisonReport& rep) {
  nlohmann::json top = nlohmann::json::array();
  for (const auto& d : rep.top_discrepancies)
    top.push_back({{"code", hex_encode(d.code)}, {"mass_a", d.mass_a}, {"mass_b", d.mass_b}});
  return nlohmann::json{
      {"tv", rep.tv}, {"n_classes", rep.n_classes}, {"top_discrepancies", top}};
}

}  // namespace hypercore
