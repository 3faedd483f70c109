#include <array>
#include <bit>
#include <charconv>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <map>
#include <sstream>
#include <string>
#include <string_view>

#include "hullas/error.hpp"
#include "hullas/geometry.hpp"

namespace hullas::geometry {

namespace {

constexpr std::size_t kHeaderBytes = 80;
constexpr std::size_t kFacetBytes = 50;

static_assert(std::endian::native == std::endian::little,
              "binary STL I/O assumes a little-endian host");

/// Welds vertices whose coordinates compare equal. -0.0 and +0.0 collapse.
class VertexWelder {
 public:
  std::uint32_t add(const Vec3& v) {
    const std::array<double, 3> key{v.x() + 0.0, v.y() + 0.0, v.z() + 0.0};
    auto [it, inserted] = index_.try_emplace(key, static_cast<std::uint32_t>(vertices_.size()));
    if (inserted) vertices_.emplace_back(key[0], key[1], key[2]);
    return it->second;
  }

  std::vector<Vec3> take() { return std::move(vertices_); }

 private:
  std::map<std::array<double, 3>, std::uint32_t> index_;
  std::vector<Vec3> vertices_;
};

TriMesh build_mesh(VertexWelder& welder, std::vector<Triangle> triangles,
                   const std::vector<std::size_t>& facet_offsets) {
  for (std::size_t i = 0; i < triangles.size(); ++i) {
    const auto& t = triangles[i];
    if (t[0] == t[1] || t[1] == t[2] || t[0] == t[2]) {
      throw ParseError("facet " + std::to_string(i) + " is degenerate after vertex welding",
                       facet_offsets[i]);
    }
  }
  return TriMesh(welder.take(), std::move(triangles));
}

float read_f32(const char* p) {
  float f;
  std::memcpy(&f, p, sizeof f);
  return f;
}

TriMesh parse_binary(std::span<const char> bytes) {
  std::uint32_t count = 0;
  std::memcpy(&count, bytes.data() + kHeaderBytes, sizeof count);
  const std::size_t expected = kHeaderBytes + 4 + std::size_t{count} * kFacetBytes;
  if (bytes.size() != expected) {
    throw ParseError("binary STL declares " + std::to_string(count) + " facets (" +
                         std::to_string(expected) + " bytes) but the file has " +
                         std::to_string(bytes.size()) + " bytes",
                     kHeaderBytes);
  }
  VertexWelder welder;
  std::vector<Triangle> triangles;
  std::vector<std::size_t> offsets;
  triangles.reserve(count);
  offsets.reserve(count);
  for (std::uint32_t f = 0; f < count; ++f) {
    const std::size_t base = kHeaderBytes + 4 + std::size_t{f} * kFacetBytes;
    Triangle t{};
    for (int k = 0; k < 3; ++k) {
      const char* p = bytes.data() + base + 12 + 12 * k;
      const Vec3 v(read_f32(p), read_f32(p + 4), read_f32(p + 8));
      if (!v.allFinite()) {
        throw ParseError("non-finite vertex coordinate in facet " + std::to_string(f), base + 12 + 12 * k);
      }
      t[k] = welder.add(v);
    }
    triangles.push_back(t);
    offsets.push_back(base);
  }
  return build_mesh(welder, std::move(triangles), offsets);
}

class AsciiTokenizer {
 public:
  explicit AsciiTokenizer(std::span<const char> bytes)
      : text_(bytes.data(), bytes.size()) {}

  bool done() {
    skip_space();
    return pos_ >= text_.size();
  }

  std::size_t offset() const { return pos_; }

  std::string_view next() {
    skip_space();
    if (pos_ >= text_.size()) throw ParseError("unexpected end of ASCII STL", pos_);
    const std::size_t start = pos_;
    while (pos_ < text_.size() && !is_space(text_[pos_])) ++pos_;
    return text_.substr(start, pos_ - start);
  }

  void expect(std::string_view word) {
    const std::size_t at = (skip_space(), pos_);
    auto tok = next();
    if (tok != word) {
      throw ParseError("expected '" + std::string(word) + "' but found '" + std::string(tok) + "'", at);
    }
  }

  double number() {
    const std::size_t at = (skip_space(), pos_);
    auto tok = next();
    double value = 0.0;
    auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), value);
    if (ec != std::errc() || ptr != tok.data() + tok.size()) {
      throw ParseError("invalid number '" + std::string(tok) + "'", at);
    }
    return value;
  }

  void skip_line() {
    while (pos_ < text_.size() && text_[pos_] != '\n') ++pos_;
  }

 private:
  static bool is_space(char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\n'; }
  void skip_space() {
    while (pos_ < text_.size() && is_space(text_[pos_])) ++pos_;
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

TriMesh parse_ascii(std::span<const char> bytes) {
  AsciiTokenizer tok(bytes);
  tok.expect("solid");
  tok.skip_line();  // solid name is free text

  VertexWelder welder;
  std::vector<Triangle> triangles;
  std::vector<std::size_t> offsets;
  while (true) {
    const std::size_t at = (tok.done(), tok.offset());
    auto word = tok.next();
    if (word == "endsolid") break;
    if (word != "facet") {
      throw ParseError("expected 'facet' or 'endsolid' but found '" + std::string(word) + "'", at);
    }
    tok.expect("normal");
    for (int k = 0; k < 3; ++k) tok.number();
    tok.expect("outer");
    tok.expect("loop");
    Triangle t{};
    for (int k = 0; k < 3; ++k) {
      tok.expect("vertex");
      const std::size_t vat = tok.offset();
      const double x = tok.number();
      const double y = tok.number();
      const double z = tok.number();
      const Vec3 v(x, y, z);
      if (!v.allFinite()) throw ParseError("non-finite vertex coordinate", vat);
      t[k] = welder.add(v);
    }
    tok.expect("endloop");
    tok.expect("endfacet");
    triangles.push_back(t);
    offsets.push_back(at);
  }
  return build_mesh(welder, std::move(triangles), offsets);
}

bool looks_binary(std::span<const char> bytes) {
  if (bytes.size() < kHeaderBytes + 4) return false;
  std::uint32_t count = 0;
  std::memcpy(&count, bytes.data() + kHeaderBytes, sizeof count);
  return bytes.size() == kHeaderBytes + 4 + std::size_t{count} * kFacetBytes;
}

bool starts_with_solid(std::span<const char> bytes) {
  std::size_t i = 0;
  while (i < bytes.size() && (bytes[i] == ' ' || bytes[i] == '\t' || bytes[i] == '\r' || bytes[i] == '\n')) ++i;
  return bytes.size() - i >= 5 && std::string_view(bytes.data() + i, 5) == "solid";
}

void put_f32(std::ostream& out, double value) {
  const float f = static_cast<float>(value);
  char buf[4];
  std::memcpy(buf, &f, 4);
  out.write(buf, 4);
}

Vec3 unit_normal(const TriMesh& mesh, std::size_t i) {
  Vec3 n = mesh.area_vector(i);
  const double len = n.norm();
  return len > 0.0 ? Vec3(n / len) : Vec3::Zero();
}

}  // namespace

TriMesh parse_stl(std::span<const char> bytes) {
  if (bytes.empty()) throw ParseError("empty STL file", 0);
  // A binary file may legally start with "solid"; an exact size match wins.
  if (looks_binary(bytes)) return parse_binary(bytes);
  if (starts_with_solid(bytes)) return parse_ascii(bytes);
  if (bytes.size() < kHeaderBytes + 4) {
    throw ParseError("file too short for a binary STL header", bytes.size());
  }
  return parse_binary(bytes);  // reports the size mismatch
}

TriMesh read_stl(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open STL file '" + path.string() + "'");
  std::vector<char> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return parse_stl(bytes);
}

void write_stl(const TriMesh& mesh, const std::filesystem::path& path, bool binary) {
  std::ofstream out(path, binary ? std::ios::binary : std::ios::out);
  if (!out) throw ValidationError("cannot write STL file '" + path.string() + "'");

  const auto& verts = mesh.vertices();
  if (binary) {
    std::array<char, kHeaderBytes> header{};
    constexpr std::string_view tag = "hullas binary STL";
    std::copy(tag.begin(), tag.end(), header.begin());
    out.write(header.data(), header.size());
    const auto count = static_cast<std::uint32_t>(mesh.triangle_count());
    char buf[4];
    std::memcpy(buf, &count, 4);
    out.write(buf, 4);
    for (std::size_t i = 0; i < mesh.triangle_count(); ++i) {
      const Vec3 n = unit_normal(mesh, i);
      for (int k = 0; k < 3; ++k) put_f32(out, n[k]);
      for (auto idx : mesh.triangles()[i]) {
        for (int k = 0; k < 3; ++k) put_f32(out, verts[idx][k]);
      }
      const char attribute[2] = {0, 0};
      out.write(attribute, 2);
    }
  } else {
    out << "solid hullas\n" << std::scientific << std::setprecision(9);
    for (std::size_t i = 0; i < mesh.triangle_count(); ++i) {
      const Vec3 n = unit_normal(mesh, i);
      out << "  facet normal " << n.x() << ' ' << n.y() << ' ' << n.z() << "\n    outer loop\n";
      for (auto idx : mesh.triangles()[i]) {
        const Vec3& v = verts[idx];
        out << "      vertex " << v.x() << ' ' << v.y() << ' ' << v.z() << '\n';
      }
      out << "    endloop\n  endfacet\n";
    }
    out << "endsolid hullas\n";
  }
  if (!out) throw ValidationError("failed while writing STL file '" + path.string() + "'");
}

}  // namespace hullas::geometry
