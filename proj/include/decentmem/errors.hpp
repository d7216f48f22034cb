#pragma once

#include <stdexcept>
#include <string>

namespace decentmem {

// Embedding dimension disagreement between a query and a stored vector,
// or between a remote response and the configured dimension.
struct DimensionError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Inserting a piece whose id already exists in the agent's pools.
struct DuplicateIdError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Store file does not exist or cannot be opened.
struct StoreFileError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Store file exists but a record is truncated or not parseable.
struct StoreFormatError : std::runtime_error {
    StoreFormatError(const std::string& msg, long record)
        : std::runtime_error(msg), record_number(record) {}
    long record_number = -1;
};

// Judge output with no parseable evaluation object.
struct EvalParseError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Configuration file failed validation; message names the field.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// HTTP client error kinds.
struct TransportError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct EndpointError : std::runtime_error {
    EndpointError(const std::string& msg, int http_status)
        : std::runtime_error(msg), status(http_status) {}
    int status = 0;
};
struct MalformedResponseError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Power iteration hit its cap without meeting tolerance.
struct ConvergenceError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

} // namespace decentmem
