#pragma once

#include <stdexcept>
#include <string>

namespace sbench {

/// Invalid benchmark configuration (bad decomposition, bad lane count, ...).
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Message arrived out of protocol (wrong step, unexpected frame).
struct ProtocolError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Transport-level failure (peer gone, socket error, channel closed).
struct TransportError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace sbench
