#pragma once

#include <stdexcept>
#include <string>

namespace probekit {

// Malformed input (bad pcap magic, unparseable record line). CLI exit 1.
struct FormatError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Invalid configuration or scenario (bad flag combination, schema
// violation). CLI exit 2.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Internal consistency check failed (verify subcommand). CLI exit 3.
struct ConsistencyError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace probekit
