#include <cstring>

#include "ksmooth/quadrature.hpp"

namespace ksmooth {
namespace {

constexpr char kMagic[8] = {'K', 'S', 'R', 'U', 'L', 'E', '0', '1'};

class Writer {
 public:
  template <class T>
  void put(const T& v) {
    const char* p = reinterpret_cast<const char*>(&v);
    out.append(p, sizeof(T));
  }
  std::string out;
};

class Reader {
 public:
  explicit Reader(const std::string& s) : s_(s) {}
  template <class T>
  T get() {
    if (pos_ + sizeof(T) > s_.size()) fail(ErrorKind::SchemaError, "rule file is truncated");
    T v;
    std::memcpy(&v, s_.data() + pos_, sizeof(T));
    pos_ += sizeof(T);
    return v;
  }
  std::string get_string(std::size_t n) {
    if (pos_ + n > s_.size()) fail(ErrorKind::SchemaError, "rule file is truncated");
    std::string r = s_.substr(pos_, n);
    pos_ += n;
    return r;
  }
  bool done() const { return pos_ == s_.size(); }

 private:
  const std::string& s_;
  std::size_t pos_ = 0;
};

}  // namespace

std::string rule_to_bytes(const QuadratureRule& rule) {
  Writer w;
  w.out.append(kMagic, sizeof kMagic);
  const auto& p = rule.provenance;
  w.put(static_cast<std::uint8_t>(p.kind));
  w.put(p.min_angle);
  w.put(p.max_area);
  w.put(p.seed);
  w.put(p.trials);
  w.put(p.box.lo.x);
  w.put(p.box.lo.y);
  w.put(p.box.hi.x);
  w.put(p.box.hi.y);
  w.put(static_cast<std::uint32_t>(p.rng.size()));
  w.out += p.rng;
  w.put(rule.region_area);
  w.put(static_cast<std::uint64_t>(rule.size()));
  for (std::size_t j = 0; j < rule.size(); ++j) {
    w.put(rule.nodes[j].x);
    w.put(rule.nodes[j].y);
    w.put(rule.weights[j]);
  }
  return std::move(w.out);
}

QuadratureRule rule_from_bytes(const std::string& bytes) {
  if (bytes.size() < sizeof kMagic || std::memcmp(bytes.data(), kMagic, sizeof kMagic) != 0)
    fail(ErrorKind::SchemaError, "not a quadrature rule file");
  Reader r(bytes);
  r.get_string(sizeof kMagic);
  QuadratureRule rule;
  auto& p = rule.provenance;
  const auto kind = r.get<std::uint8_t>();
  if (kind > 1) fail(ErrorKind::SchemaError, "unknown rule kind");
  p.kind = static_cast<RuleKind>(kind);
  p.min_angle = r.get<double>();
  p.max_area = r.get<double>();
  p.seed = r.get<std::uint64_t>();
  p.trials = r.get<std::uint64_t>();
  p.box.lo.x = r.get<double>();
  p.box.lo.y = r.get<double>();
  p.box.hi.x = r.get<double>();
  p.box.hi.y = r.get<double>();
  p.rng = r.get_string(r.get<std::uint32_t>());
  rule.region_area = r.get<double>();
  const auto n = r.get<std::uint64_t>();
  if (n > bytes.size() / (3 * sizeof(double))) fail(ErrorKind::SchemaError, "rule node count is corrupt");
  rule.nodes.resize(n);
  rule.weights.resize(n);
  for (std::size_t j = 0; j < n; ++j) {
    rule.nodes[j].x = r.get<double>();
    rule.nodes[j].y = r.get<double>();
    rule.weights[j] = r.get<double>();
  }
  if (!r.done()) fail(ErrorKind::SchemaError, "trailing bytes in rule file");
  return rule;
}

void save_rule(const std::string& path, const QuadratureRule& rule) {
  write_file_atomic(path, rule_to_bytes(rule));
}

QuadratureRule load_rule(const std::string& path) { return rule_from_bytes(read_file(path)); }

}  // namespace ksmooth
