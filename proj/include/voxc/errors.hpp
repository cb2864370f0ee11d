#ifndef VOXC_ERRORS_HPP
#define VOXC_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace voxc {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Tensor/layer shape mismatches. Messages name the offending axis.
struct DimensionError : Error {
    using Error::Error;
};

struct ArgumentError : Error {
    using Error::Error;
};

// Operation called out of sequence (e.g. backward before forward) or with
// stale companion state (optimizer buffers that do not match the parameters).
struct StateError : Error {
    using Error::Error;
};

// Malformed byte stream or text input. Messages carry a byte offset where
// one is known.
struct FormatError : Error {
    using Error::Error;
};

struct VersionError : FormatError {
    using FormatError::FormatError;
};

struct TruncationError : FormatError {
    using FormatError::FormatError;
};

struct IndexError : Error {
    using Error::Error;
};

struct DegenerateGeometryError : Error {
    using Error::Error;
};

// Geometry outside the voxelization domain [-0.5, 0.5]^3.
struct VoxelDomainError : Error {
    using Error::Error;
};

// Grid resolution other than the one an operation requires.
struct ResolutionError : Error {
    using Error::Error;
};

// Checkpoint/model variant mismatch.
struct CheckpointError : Error {
    using Error::Error;
};

// Optimization failure (non-finite loss).
struct TrainingError : Error {
    using Error::Error;
};

}  // namespace voxc

#endif  // VOXC_ERRORS_HPP
