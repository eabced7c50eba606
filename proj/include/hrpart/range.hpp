#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "errors.hpp"

namespace hrpart {

// Inclusive arithmetic range start, start+step, ... <= stop.
struct n_range {
  std::int64_t start = 1;
  std::int64_t stop = 1;
  std::int64_t step = 1;

  void validate() const {
    if (step < 1) throw config_error("range step must be >= 1");
    if (start > stop) {
      throw config_error("empty range " + std::to_string(start) + ":" + std::to_string(stop));
    }
  }

  std::vector<std::int64_t> values() const {
    validate();
    std::vector<std::int64_t> out;
    for (std::int64_t n = start; n <= stop; n += step) out.push_back(n);
    return out;
  }

  std::int64_t last() const { return start + (stop - start) / step * step; }

  std::string str() const {
    return std::to_string(start) + ":" + std::to_string(stop) + ":" + std::to_string(step);
  }

  friend bool operator==(const n_range&, const n_range&) = default;
};

// "a:b" or "a:b:s"; a single "n" means n:n.
inline n_range parse_range(std::string_view text) {
  std::vector<std::int64_t> parts;
  std::size_t pos = 0;
  while (true) {
    auto next = text.find(':', pos);
    auto piece = text.substr(pos, next == std::string_view::npos ? std::string_view::npos : next - pos);
    if (piece.empty()) throw config_error("bad range '" + std::string(text) + "'");
    std::size_t used = 0;
    std::int64_t v = 0;
    try {
      v = std::stoll(std::string(piece), &used);
    } catch (const std::exception&) {
      throw config_error("bad range '" + std::string(text) + "'");
    }
    if (used != piece.size()) throw config_error("bad range '" + std::string(text) + "'");
    parts.push_back(v);
    if (next == std::string_view::npos) break;
    pos = next + 1;
  }
  n_range r;
  if (parts.size() == 1) {
    r = {parts[0], parts[0], 1};
  } else if (parts.size() == 2) {
    r = {parts[0], parts[1], 1};
  } else if (parts.size() == 3) {
    r = {parts[0], parts[1], parts[2]};
  } else {
    throw config_error("bad range '" + std::string(text) + "'");
  }
  r.validate();
  return r;
}

}  // namespace hrpart
