#pragma once

#include <cstdint>
#include <string>

#include <json.hpp>

#include "pitch2d/errors.hpp"

namespace pitch2d::detail {

// Insertion-ordered JSON so emitted documents follow the documented key
// order.
using Json = nlohmann::ordered_json;

inline const Json& require(const Json& j, const char* key, std::size_t line = 0) {
  const auto it = j.find(key);
  if (it == j.end()) {
    const std::string msg = std::string("missing field '") + key + "'";
    if (line > 0) throw ParseError(msg, line);
    throw ParseError(msg);
  }
  return *it;
}

inline double require_number(const Json& j, const char* key, std::size_t line = 0) {
  const Json& v = require(j, key, line);
  if (!v.is_number()) {
    const std::string msg = std::string("field '") + key + "' is not a number";
    if (line > 0) throw ParseError(msg, line);
    throw ParseError(msg);
  }
  return v.get<double>();
}

inline std::int64_t require_integer(const Json& j, const char* key, std::size_t line = 0) {
  const Json& v = require(j, key, line);
  if (!v.is_number_integer()) {
    const std::string msg = std::string("field '") + key + "' is not an integer";
    if (line > 0) throw ParseError(msg, line);
    throw ParseError(msg);
  }
  return v.get<std::int64_t>();
}

inline Json parse_document(const std::string& text, std::size_t line = 0) {
  try {
    return Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    if (line > 0) throw ParseError(e.what(), line);
    throw ParseError(e.what());
  }
}

}  // namespace pitch2d::detail
