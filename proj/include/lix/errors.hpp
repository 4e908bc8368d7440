#pragma once

#include <stdexcept>
#include <string>

namespace lix {

// A repair window did not contain the true rank. This means a certificate
// was wrong and the engine must not fall back silently.
struct integrity_error : std::runtime_error {
    explicit integrity_error(const std::string& what) : std::runtime_error(what) {}
};

// A profile sandwich or replayed witness violated its stated bound.
struct certificate_error : std::runtime_error {
    explicit certificate_error(const std::string& what) : std::runtime_error(what) {}
};

// Bad CLI/config values (radix bits out of range, unknown workload kind, ...).
struct config_error : std::runtime_error {
    explicit config_error(const std::string& what) : std::runtime_error(what) {}
};

// Dataset file problems: size mismatch, digest mismatch, malformed header.
struct data_error : std::runtime_error {
    explicit data_error(const std::string& what) : std::runtime_error(what) {}
};

} // namespace lix
