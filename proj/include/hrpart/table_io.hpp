#pragma once

#include <json.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>

#include "exact.hpp"

namespace hrpart {

inline constexpr int table_format_version = 1;

// {"format": "hrpart.partition_table", "version": 1, "max_n": N,
//  "values": ["1", "1", "2", ...]}
inline nlohmann::json table_to_json(const partition_table& table) {
  nlohmann::json values = nlohmann::json::array();
  for (const auto& v : table.values()) values.push_back(v.str());
  return {{"format", "hrpart.partition_table"},
          {"version", table_format_version},
          {"max_n", table.max_n()},
          {"values", std::move(values)}};
}

inline partition_table table_from_json(const nlohmann::json& j) {
  try {
    if (j.at("format").get<std::string>() != "hrpart.partition_table") {
      throw config_error("not a partition table document");
    }
    if (j.at("version").get<int>() != table_format_version) {
      throw config_error("unsupported partition table version");
    }
    auto max_n = j.at("max_n").get<std::size_t>();
    const auto& values = j.at("values");
    if (values.size() != max_n + 1) throw config_error("partition table length does not match max_n");
    std::vector<bigint> out;
    out.reserve(values.size());
    for (const auto& v : values) out.push_back(parse_bigint(v.get<std::string>()));
    return partition_table(std::move(out));
  } catch (const nlohmann::json::exception& e) {
    throw config_error(std::string("malformed partition table: ") + e.what());
  }
}

inline void save_table(const partition_table& table, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw io_error("cannot write " + path.string());
  out << table_to_json(table).dump() << '\n';
  if (!out) throw io_error("write failed for " + path.string());
}

inline partition_table load_table(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw io_error("cannot read " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw config_error("malformed partition table " + path.string() + ": " + e.what());
  }
  return table_from_json(j);
}

// On-disk cache keyed by max_n: <dir>/partition_table_<max_n>.json.
class table_cache {
 public:
  explicit table_cache(std::optional<std::filesystem::path> dir) : dir_(std::move(dir)) {}

  static table_cache from_environment() {
    if (const char* env = std::getenv("HRPART_CACHE_DIR"); env != nullptr && *env != '\0') {
      return table_cache(std::filesystem::path(env));
    }
    return table_cache(std::nullopt);
  }

  std::optional<std::filesystem::path> path_for(std::size_t max_n) const {
    if (!dir_) return std::nullopt;
    return *dir_ / ("partition_table_" + std::to_string(max_n) + ".json");
  }

  partition_table get(std::size_t max_n) const {
    auto path = path_for(max_n);
    if (path && std::filesystem::exists(*path)) {
      auto table = load_table(*path);
      if (table.max_n() == max_n) return table;
    }
    auto table = build_table(max_n);
    if (path) {
      std::filesystem::create_directories(*dir_);
      // Readers never observe a partially written file.
      auto tmp = *path;
      tmp += ".tmp";
      save_table(table, tmp);
      std::filesystem::rename(tmp, *path);
    }
    return table;
  }

 private:
  std::optional<std::filesystem::path> dir_;
};

}  // namespace hrpart
