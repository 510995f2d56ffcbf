#pragma once

// Error taxonomy mapped to process exit codes by the CLI:
//   ConfigError -> 2, IoError -> 3, EndpointError -> 4.

#include <stdexcept>
#include <string>

namespace lcif {

struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

struct IoError : std::runtime_error {
    explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

struct EndpointError : std::runtime_error {
    explicit EndpointError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace lcif
