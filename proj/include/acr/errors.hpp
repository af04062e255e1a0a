#pragma once

#include <stdexcept>
#include <string>

namespace acr {

// Bad or inconsistent configuration (caught at load/validate time).
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// A model backend failed after retries. Carries the item that was being
// processed so pipeline callers can report which chunk/QA died.
class BackendError : public std::runtime_error {
public:
    BackendError(const std::string& what, std::string item_id = {})
        : std::runtime_error(what), item_id_(std::move(item_id)) {}

    const std::string& item_id() const { return item_id_; }

private:
    std::string item_id_;
};

// Malformed input file or response payload. Keeps the offending payload
// (or line number) for diagnostics.
class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& what, std::string payload = {}, long line = -1)
        : std::runtime_error(what), payload_(std::move(payload)), line_(line) {}

    const std::string& payload() const { return payload_; }
    long line() const { return line_; }

private:
    std::string payload_;
    long line_;
};

// Stage datasets must be mined with the adapter produced by the previous
// stage; a hash mismatch means the curriculum order was violated.
class CurriculumOrderError : public std::runtime_error {
public:
    explicit CurriculumOrderError(const std::string& what) : std::runtime_error(what) {}
};

// An I/O failure (missing file, unwritable path).
class IoError : public std::runtime_error {
public:
    explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace acr
