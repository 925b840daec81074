#pragma once

#include <stdexcept>
#include <string>

namespace structembed {

/// Thrown when a diagnostic or materialization request exceeds its size cap.
class resource_limit_error : public std::runtime_error {
public:
    explicit resource_limit_error(const std::string& what) : std::runtime_error(what) {}
};

/// Thrown on malformed input files; carries the 1-based line number.
class data_error : public std::runtime_error {
public:
    data_error(const std::string& what, long line) : std::runtime_error(what), line_(line) {}
    long line() const noexcept { return line_; }

private:
    long line_;
};

}  // namespace structembed
