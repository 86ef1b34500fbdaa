#include "ksmooth/common.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

namespace ksmooth {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidRegion: return "InvalidRegion";
    case ErrorKind::NonTerminatingRefinement: return "NonTerminatingRefinement";
    case ErrorKind::DegenerateTriangle: return "DegenerateTriangle";
    case ErrorKind::UnsupportedShape: return "UnsupportedShape";
    case ErrorKind::RejectionStall: return "RejectionStall";
    case ErrorKind::NonFiniteIntegrand: return "NonFiniteIntegrand";
    case ErrorKind::InsufficientSamples: return "InsufficientSamples";
    case ErrorKind::DegreeBelowFloor: return "DegreeBelowFloor";
    case ErrorKind::GridMismatch: return "GridMismatch";
    case ErrorKind::QuadratureDominates: return "QuadratureDominates";
    case ErrorKind::EmptyBall: return "EmptyBall";
    case ErrorKind::SchemaError: return "SchemaError";
    case ErrorKind::InvariantViolation: return "InvariantViolation";
    case ErrorKind::InvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

bool is_numeric_guard(ErrorKind kind) {
  return kind == ErrorKind::DegreeBelowFloor || kind == ErrorKind::NonFiniteIntegrand ||
         kind == ErrorKind::QuadratureDominates;
}

namespace {
std::string degree_message(Point2 where, double degree, double floor) {
  std::ostringstream os;
  os.precision(17);
  os << "degree " << degree << " below floor " << floor << " at (" << where.x << ", " << where.y
     << ")";
  return os.str();
}
}  // namespace

DegreeBelowFloorError::DegreeBelowFloorError(Point2 where, double degree, double floor)
    : Error(ErrorKind::DegreeBelowFloor, degree_message(where, degree, floor)),
      where_(where),
      degree_(degree) {}

void write_file_atomic(const std::string& path, const std::string& contents) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  if (target.has_parent_path()) fs::create_directories(target.parent_path());
  fs::path tmp = target;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) fail(ErrorKind::InvalidArgument, "cannot write " + tmp.string());
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    if (!out) fail(ErrorKind::InvalidArgument, "write failed for " + tmp.string());
  }
  fs::rename(tmp, target);
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::InvalidArgument, "cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace ksmooth
