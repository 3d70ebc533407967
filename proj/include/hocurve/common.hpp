#pragma once

#include <cstddef>
#include <functional>
#include <limits>
#include <stdexcept>
#include <string>

#include <Eigen/Core>

namespace hocurve {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

/// Base type of every error raised by this library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Requested polynomial degree outside the supported range.
class UnsupportedDegreeError : public Error {
 public:
  using Error::Error;
};

/// Structurally invalid input (mesh, model, classification, arguments).
class InvalidInputError : public Error {
 public:
  using Error::Error;
};

/// Malformed input file; carries the source line when known.
class ParseError : public Error {
 public:
  using Error::Error;
  ParseError(const std::string& path, long line, const std::string& what)
      : Error(path + ":" + std::to_string(line) + ": " + what) {}
};

/// Reference to an entity (mark, surface id, node id) that does not exist.
class LookupError : public Error {
 public:
  using Error::Error;
};

/// Boundary node whose incident virtual surfaces admit no unique target.
class ClassificationError : public Error {
 public:
  using Error::Error;
};

/// Sentinel for invalid distortion values (non-positive Jacobian
/// determinant). Orders above every finite value and poisons any
/// objective value it enters.
inline constexpr double kInvalid = std::numeric_limits<double>::max();

inline bool is_invalid(double v) { return v >= kInvalid; }

/// Worker count: HOCURVE_THREADS if set, else hardware concurrency.
int thread_count();

/// Chunk width of parallel_for; reducers size per-chunk partial slots with
/// it (slot index = begin / kParallelChunk).
inline constexpr std::size_t kParallelChunk = 128;

/// Runs body(begin, end) over fixed-size chunks of [0, n). Chunk boundaries
/// do not depend on the worker count, so callers that write per-chunk or
/// per-index slots get thread-count-independent results.
void parallel_for(std::size_t n, const std::function<void(std::size_t, std::size_t)>& body);

/// Shortest text form that parses back to the identical double (%.17g).
std::string format_double(double v);

}  // namespace hocurve
