#pragma once

#include <cmath>
#include <stdexcept>
#include <string>

namespace ksmooth {

/// Planar point or displacement, coordinates in meters.
struct Point2 {
  double x = 0.0;
  double y = 0.0;

  constexpr Point2 operator+(Point2 o) const { return {x + o.x, y + o.y}; }
  constexpr Point2 operator-(Point2 o) const { return {x - o.x, y - o.y}; }
  constexpr Point2 operator*(double s) const { return {x * s, y * s}; }
  constexpr bool operator==(const Point2&) const = default;
};

constexpr double dot(Point2 a, Point2 b) { return a.x * b.x + a.y * b.y; }
constexpr double cross(Point2 a, Point2 b) { return a.x * b.y - a.y * b.x; }
inline double norm(Point2 a) { return std::hypot(a.x, a.y); }
constexpr double norm2(Point2 a) { return a.x * a.x + a.y * a.y; }

/// Twice the signed area of (a, b, c); positive for counter-clockwise.
constexpr double orient(Point2 a, Point2 b, Point2 c) { return cross(b - a, c - a); }

inline constexpr double kPi = 3.14159265358979323846;

enum class ErrorKind {
  InvalidRegion,
  NonTerminatingRefinement,
  DegenerateTriangle,
  UnsupportedShape,
  RejectionStall,
  NonFiniteIntegrand,
  InsufficientSamples,
  DegreeBelowFloor,
  GridMismatch,
  QuadratureDominates,
  EmptyBall,
  SchemaError,
  InvariantViolation,
  InvalidArgument,
};

const char* to_string(ErrorKind kind);

/// True for the numeric-guard family (CLI exit code 3); the rest are validation errors.
bool is_numeric_guard(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

/// Raised when the degree function falls below the context's floor at `where`.
class DegreeBelowFloorError : public Error {
 public:
  DegreeBelowFloorError(Point2 where, double degree, double floor);
  Point2 where() const noexcept { return where_; }
  double degree() const noexcept { return degree_; }

 private:
  Point2 where_;
  double degree_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) { throw Error(kind, what); }

}  // namespace ksmooth

namespace ksmooth {

/// Writes `contents` to `path` through a sibling temp file and rename.
void write_file_atomic(const std::string& path, const std::string& contents);
std::string read_file(const std::string& path);

}  // namespace ksmooth
