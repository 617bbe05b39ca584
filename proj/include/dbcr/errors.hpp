// Exception types shared across the library.
#pragma once

#include <stdexcept>
#include <string>

namespace dbcr {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Malformed or unsupported raster bytes.
struct DecodeError : Error {
    using Error::Error;
};

// A grid or parameter set violates a geometric precondition.
struct DimensionError : Error {
    using Error::Error;
};

// Code maps that cannot be fused (mismatched dimensions or directions).
struct FusionError : Error {
    using Error::Error;
};

// Vectors produced under different configurations (or with different
// lengths) may never be compared.
struct ComparabilityError : Error {
    using Error::Error;
};

// Dataset enumeration failed (unreadable root, unparsable labels, ...).
struct IngestError : Error {
    using Error::Error;
};

// Index file is not in the expected binary format.
struct IndexFormatError : Error {
    using Error::Error;
};

// Bad key/value configuration file or invalid parameter value.
struct ConfigError : Error {
    using Error::Error;
};

struct IoError : Error {
    using Error::Error;
};

} // namespace dbcr
