#pragma once

// Line-delimited JSON helpers shared by every on-disk record format.

#include <functional>
#include <string>

#include <json.hpp>

#include "acr/errors.hpp"

namespace acr {

// Writes content to path atomically: temp file in the same directory, then
// rename over the target.
void atomic_write(const std::string& path, const std::string& content);

// Calls fn(record, line_number) for each non-empty line. Parse failures are
// rethrown as ParseError with the line number attached.
void for_each_jsonl(const std::string& path,
                    const std::function<void(const nlohmann::json&, long)>& fn);

// Fetches a required field, raising ParseError naming the field and line.
template <typename T>
T require_field(const nlohmann::json& rec, const char* field, long line) {
    if (!rec.contains(field)) {
        throw ParseError(std::string("missing field \"") + field + "\" at line " +
                             std::to_string(line),
                         rec.dump(), line);
    }
    try {
        return rec.at(field).get<T>();
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("bad value for field \"") + field + "\" at line " +
                             std::to_string(line) + ": " + e.what(),
                         rec.dump(), line);
    }
}

}  // namespace acr
