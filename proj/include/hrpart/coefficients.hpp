#pragma once

#include <json.hpp>

#include <algorithm>
#include <array>
#include <cctype>
#include <filesystem>
#include <fstream>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "errors.hpp"
#include "real.hpp"

namespace hrpart {

enum class estimator_kind { rh, rh1, rh2, rd3, f3, rh3, rh4, rh0 };

enum class provenance { published, refit };

inline constexpr std::array<estimator_kind, 8> all_estimator_kinds = {
    estimator_kind::rh,  estimator_kind::rh1, estimator_kind::rh2, estimator_kind::rd3,
    estimator_kind::f3,  estimator_kind::rh3, estimator_kind::rh4, estimator_kind::rh0};

inline std::string_view to_string(estimator_kind kind) {
  switch (kind) {
    case estimator_kind::rh: return "rh";
    case estimator_kind::rh1: return "rh1";
    case estimator_kind::rh2: return "rh2";
    case estimator_kind::rd3: return "rd3";
    case estimator_kind::f3: return "f3";
    case estimator_kind::rh3: return "rh3";
    case estimator_kind::rh4: return "rh4";
    case estimator_kind::rh0: return "rh0";
  }
  throw config_error("unknown estimator kind");
}

inline std::string_view to_string(provenance p) { return p == provenance::published ? "published" : "refit"; }

inline std::string lowercase(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

inline estimator_kind parse_estimator_kind(std::string_view text) {
  auto name = lowercase(text);
  for (auto kind : all_estimator_kinds) {
    if (to_string(kind) == name) return kind;
  }
  throw config_error("unknown estimator kind '" + std::string(text) + "'");
}

inline provenance parse_provenance(std::string_view text) {
  auto name = lowercase(text);
  if (name == "published") return provenance::published;
  if (name == "refit") return provenance::refit;
  throw config_error("unknown provenance '" + std::string(text) + "'");
}

// Coefficient names each estimator needs, in display order.
inline std::span<const std::string_view> required_coefficients(estimator_kind kind) {
  static constexpr std::array<std::string_view, 0> none{};
  static constexpr std::array<std::string_view, 3> rh1{"a1", "b1", "c1"};
  static constexpr std::array<std::string_view, 3> rh2{"a2", "b2", "c2"};
  static constexpr std::array<std::string_view, 2> rd3{"a3", "b3"};
  static constexpr std::array<std::string_view, 4> f3{"a1", "b1", "c1", "d1"};
  static constexpr std::array<std::string_view, 5> rh3{"t0", "a2", "b2", "c2", "d2"};
  static constexpr std::array<std::string_view, 4> rh4{"a3", "b3", "c3", "d3"};
  static constexpr std::array<std::string_view, 6> rh0{"odd_scale",  "odd_shift",  "odd_offset",
                                                       "even_scale", "even_shift", "even_offset"};
  switch (kind) {
    case estimator_kind::rh: return none;
    case estimator_kind::rh1: return rh1;
    case estimator_kind::rh2: return rh2;
    case estimator_kind::rd3: return rd3;
    case estimator_kind::f3: return f3;
    case estimator_kind::rh3: return rh3;
    case estimator_kind::rh4: return rh4;
    case estimator_kind::rh0: return rh0;
  }
  throw config_error("unknown estimator kind");
}

// Named constants of one estimator. Values are kept both as the decimal text
// they were given in and as parsed reals.
class coefficient_set {
 public:
  coefficient_set(estimator_kind kind, provenance origin,
                  const std::vector<std::pair<std::string, std::string>>& decimals)
      : kind_(kind), origin_(origin) {
    for (const auto& [name, text] : decimals) {
      if (decimals_.count(name) != 0) throw config_error("duplicate coefficient '" + name + "'");
      decimals_.emplace(name, text);
      values_.emplace(name, parse_real(text));
    }
    validate();
  }

  static coefficient_set from_values(estimator_kind kind, provenance origin,
                                     const std::vector<std::pair<std::string, real>>& values) {
    std::vector<std::pair<std::string, std::string>> decimals;
    for (const auto& [name, v] : values) decimals.emplace_back(name, format_real(v, 0));
    return coefficient_set(kind, origin, decimals);
  }

  estimator_kind kind() const { return kind_; }
  provenance origin() const { return origin_; }

  const real& get(std::string_view name) const {
    auto it = values_.find(std::string(name));
    if (it == values_.end()) {
      throw config_error("coefficient '" + std::string(name) + "' missing for " +
                         std::string(to_string(kind_)));
    }
    return it->second;
  }

  const std::string& decimal(std::string_view name) const {
    auto it = decimals_.find(std::string(name));
    if (it == decimals_.end()) throw config_error("coefficient '" + std::string(name) + "' missing");
    return it->second;
  }

  const std::map<std::string, real>& values() const { return values_; }

  void require_kind(estimator_kind expected) const {
    if (kind_ != expected) {
      throw config_error("coefficient set for " + std::string(to_string(kind_)) + " used as " +
                         std::string(to_string(expected)));
    }
  }

  friend bool operator==(const coefficient_set& a, const coefficient_set& b) {
    return a.kind_ == b.kind_ && a.origin_ == b.origin_ && a.values_ == b.values_;
  }

 private:
  void validate() const {
    auto names = required_coefficients(kind_);
    if (names.size() != values_.size()) {
      throw config_error(std::string(to_string(kind_)) + " needs exactly " +
                         std::to_string(names.size()) + " coefficients");
    }
    for (auto name : names) {
      if (values_.count(std::string(name)) == 0) {
        throw config_error(std::string(to_string(kind_)) + " is missing coefficient '" +
                           std::string(name) + "'");
      }
    }
  }

  estimator_kind kind_;
  provenance origin_;
  std::map<std::string, std::string> decimals_;
  std::map<std::string, real> values_;
};

// Published constants of every estimator.
inline coefficient_set published_coefficients(estimator_kind kind) {
  using P = std::vector<std::pair<std::string, std::string>>;
  switch (kind) {
    case estimator_kind::rh: return {kind, provenance::published, P{}};
    case estimator_kind::rh1:
      return {kind, provenance::published,
              P{{"a1", "-0.02651010067"}, {"b1", "-0.3456324524"}, {"c1", "4.8444724"}}};
    case estimator_kind::rh2:
      return {kind, provenance::published,
              P{{"a2", "0.4432884566"}, {"b2", "0.1325096085"}, {"c2", "0.274078"}}};
    case estimator_kind::rd3:
      return {kind, provenance::published, P{{"a3", "5.062307637"}, {"b3", "-75.65700620"}}};
    case estimator_kind::f3:
      return {kind, provenance::published,
              P{{"a1", "8.383485427"},
                {"b1", "130.0792015"},
                {"c1", "-1.197477259e5"},
                {"d1", "4.188653689e7"}}};
    case estimator_kind::rh3:
      return {kind, provenance::published,
              P{{"t0", "0.3594143172"},
                {"a2", "1.039888529"},
                {"b2", "-0.3305606395"},
                {"c2", "0.6134039843"},
                {"d2", "-0.8582793693"}}};
    case estimator_kind::rh4:
      return {kind, provenance::published,
              P{{"a3", "2.893270736"},
                {"b3", "0.4164546941"},
                {"c3", "-0.08501098214"},
                {"d3", "-0.4621004962"}}};
    case estimator_kind::rh0:
      return {kind, provenance::published,
              P{{"odd_scale", "0.4527092482"},
                {"odd_shift", "4.35278"},
                {"odd_offset", "-0.05498719946"},
                {"even_scale", "0.4412187317"},
                {"even_shift", "-2.01699"},
                {"even_offset", "0.2102618735"}}};
  }
  throw config_error("unknown estimator kind");
}

inline nlohmann::json to_json(const coefficient_set& set) {
  nlohmann::json coeffs = nlohmann::json::object();
  for (auto name : required_coefficients(set.kind())) {
    coeffs[std::string(name)] = set.decimal(name);
  }
  return {{"kind", std::string(to_string(set.kind()))},
          {"provenance", std::string(to_string(set.origin()))},
          {"coefficients", std::move(coeffs)}};
}

inline coefficient_set coefficient_set_from_json(const nlohmann::json& j) {
  try {
    auto kind = parse_estimator_kind(j.at("kind").get<std::string>());
    auto origin = parse_provenance(j.value("provenance", std::string("refit")));
    std::vector<std::pair<std::string, std::string>> decimals;
    for (const auto& [name, value] : j.at("coefficients").items()) {
      if (!value.is_string()) {
        throw config_error("coefficient '" + name + "' must be a decimal string");
      }
      decimals.emplace_back(name, value.get<std::string>());
    }
    return {kind, origin, decimals};
  } catch (const nlohmann::json::exception& e) {
    throw config_error(std::string("malformed coefficient set: ") + e.what());
  }
}

// One coefficient set per estimator kind. Immutable after construction.
class coefficient_registry {
 public:
  coefficient_registry() = default;

  explicit coefficient_registry(const std::vector<coefficient_set>& sets) {
    for (const auto& s : sets) {
      if (!sets_.emplace(s.kind(), s).second) {
        throw config_error("duplicate coefficient set for " + std::string(to_string(s.kind())));
      }
    }
  }

  static coefficient_registry published_defaults() {
    std::vector<coefficient_set> sets;
    for (auto kind : all_estimator_kinds) sets.push_back(published_coefficients(kind));
    return coefficient_registry(sets);
  }

  const coefficient_set& get(estimator_kind kind) const {
    auto it = sets_.find(kind);
    if (it == sets_.end()) {
      throw config_error("no coefficients registered for " + std::string(to_string(kind)));
    }
    return it->second;
  }

  bool contains(estimator_kind kind) const { return sets_.count(kind) != 0; }

  // Copy of this registry with `overrides` replacing same-kind entries.
  coefficient_registry with(const std::vector<coefficient_set>& overrides) const {
    coefficient_registry out = *this;
    for (const auto& s : overrides) out.sets_.insert_or_assign(s.kind(), s);
    return out;
  }

  const std::map<estimator_kind, coefficient_set>& sets() const { return sets_; }

 private:
  std::map<estimator_kind, coefficient_set> sets_;
};

inline nlohmann::json to_json(const coefficient_registry& registry) {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& [kind, set] : registry.sets()) out.push_back(to_json(set));
  return out;
}

// Accepts a single {kind, provenance, coefficients} object or an array of them.
inline std::vector<coefficient_set> coefficient_sets_from_json(const nlohmann::json& j) {
  std::vector<coefficient_set> sets;
  if (j.is_array()) {
    for (const auto& item : j) sets.push_back(coefficient_set_from_json(item));
  } else {
    sets.push_back(coefficient_set_from_json(j));
  }
  return sets;
}

inline std::vector<coefficient_set> load_coefficient_sets(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw io_error("cannot read " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw config_error("malformed coefficient file " + path.string() + ": " + e.what());
  }
  return coefficient_sets_from_json(j);
}

}  // namespace hrpart
