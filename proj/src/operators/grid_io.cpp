#include <cstring>
#include <sstream>

#include "ksmooth/operators.hpp"

namespace ksmooth {
namespace {

constexpr char kMagic[8] = {'K', 'S', 'G', 'R', 'I', 'D', '0', '1'};

template <class T>
void put(std::string& out, const T& v) {
  out.append(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <class T>
T take(const std::string& s, std::size_t& pos) {
  if (pos + sizeof(T) > s.size()) fail(ErrorKind::SchemaError, "grid file is truncated");
  T v;
  std::memcpy(&v, s.data() + pos, sizeof(T));
  pos += sizeof(T);
  return v;
}

}  // namespace

void write_grid_csv(const std::string& path, const GridValues& g) {
  std::ostringstream os;
  os.precision(17);
  os << "x,y,inside";
  for (std::size_t c = 0; c < g.dim; ++c) os << ",v_" << (c + 1);
  os << '\n';
  for (std::size_t k = 0; k < g.grid.size(); ++k) {
    const Point2 p = g.grid.point(k);
    os << p.x << ',' << p.y << ',' << int(g.grid.inside(k));
    for (std::size_t c = 0; c < g.dim; ++c) os << ',' << g.at(k)[c];
    os << '\n';
  }
  write_file_atomic(path, os.str());
}

std::string grid_to_bytes(const GridValues& g) {
  std::string out(kMagic, sizeof kMagic);
  put<std::uint64_t>(out, g.grid.nx());
  put<std::uint64_t>(out, g.grid.ny());
  put<std::uint64_t>(out, g.dim);
  const Rect& r = g.grid.extent();
  for (double v : {r.lo.x, r.lo.y, r.hi.x, r.hi.y}) put(out, v);
  out.append(reinterpret_cast<const char*>(g.grid.mask().data()), g.grid.mask().size());
  out.append(reinterpret_cast<const char*>(g.values.data()), g.values.size() * sizeof(double));
  return out;
}

GridValues grid_from_bytes(const std::string& bytes) {
  if (bytes.size() < sizeof kMagic || std::memcmp(bytes.data(), kMagic, sizeof kMagic) != 0)
    fail(ErrorKind::SchemaError, "not a grid file");
  std::size_t pos = sizeof kMagic;
  const auto nx = take<std::uint64_t>(bytes, pos);
  const auto ny = take<std::uint64_t>(bytes, pos);
  const auto dim = take<std::uint64_t>(bytes, pos);
  Rect r;
  r.lo.x = take<double>(bytes, pos);
  r.lo.y = take<double>(bytes, pos);
  r.hi.x = take<double>(bytes, pos);
  r.hi.y = take<double>(bytes, pos);
  const std::size_t n = nx * ny;
  if (nx == 0 || ny == 0 || bytes.size() - pos != n + n * dim * sizeof(double))
    fail(ErrorKind::SchemaError, "grid file size does not match its header");
  std::vector<std::uint8_t> mask(bytes.begin() + pos, bytes.begin() + pos + n);
  pos += n;
  GridValues g(EvaluationGrid(r, nx, ny, std::move(mask)), dim);
  std::memcpy(g.values.data(), bytes.data() + pos, n * dim * sizeof(double));
  return g;
}

void write_grid_binary(const std::string& path, const GridValues& g) { write_file_atomic(path, grid_to_bytes(g)); }

}  // namespace ksmooth
