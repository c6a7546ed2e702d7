#pragma once

#include <stdexcept>
#include <string>

namespace litpipe {

/// Error carrying a machine-readable code (e.g. "provider-unreachable")
/// alongside a human readable detail. The code is what the HTTP service
/// reports in its `error` field.
class Error : public std::runtime_error {
public:
    Error(std::string code, const std::string& detail)
        : std::runtime_error(code + ": " + detail), code_(std::move(code)), detail_(detail) {}

    const std::string& code() const noexcept { return code_; }
    const std::string& detail() const noexcept { return detail_; }

private:
    std::string code_;
    std::string detail_;
};

}  // namespace litpipe
