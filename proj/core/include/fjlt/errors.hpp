#pragma once

#include <stdexcept>
#include <string>

namespace fjlt {

// Argument errors are reported as std::invalid_argument throughout the
// library. ResourceError covers requests that are well-formed but would
// exceed a configured memory or work cap.
class ResourceError : public std::runtime_error {
public:
    explicit ResourceError(const std::string& what) : std::runtime_error(what) {}
};

class FormatError : public std::runtime_error {
public:
    explicit FormatError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace fjlt
