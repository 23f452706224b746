#include "cuboidkit/mesh_io.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

#include "cuboidkit/errors.hpp"

namespace cuboidkit {
namespace {

bool parse_double(const std::string& token, double& out) {
  const char* first = token.data();
  const char* last = token.data() + token.size();
  auto [ptr, ec] = std::from_chars(first, last, out);
  return ec == std::errc() && ptr == last;
}

// OBJ face references look like "7", "7/1", "7//3" or "7/1/3".
bool parse_face_index(const std::string& token, long& out) {
  const auto slash = token.find('/');
  const std::string head = token.substr(0, slash);
  if (head.empty()) return false;
  auto [ptr, ec] = std::from_chars(head.data(), head.data() + head.size(), out);
  return ec == std::errc() && ptr == head.data() + head.size() && out != 0;
}

}  // namespace

TriangleMesh parse_obj(std::istream& in) {
  TriangleMesh mesh;
  std::string line;
  std::size_t line_no = 0;
  std::size_t face_no = 0;
  std::vector<std::pair<std::vector<long>, std::size_t>> faces;

  while (std::getline(in, line)) {
    ++line_no;
    std::istringstream ls(line);
    std::string tag;
    if (!(ls >> tag)) continue;
    if (tag == "v") {
      Vec3 p;
      std::string tok;
      for (int axis = 0; axis < 3; ++axis) {
        if (!(ls >> tok) || !parse_double(tok, p[axis])) {
          throw ParseError("malformed vertex record", line_no);
        }
      }
      mesh.vertices.push_back(p);
    } else if (tag == "f") {
      std::vector<long> refs;
      std::string tok;
      while (ls >> tok) {
        long idx = 0;
        if (!parse_face_index(tok, idx)) throw ParseError("malformed face record", line_no);
        // Relative indices refer to vertices read so far.
        if (idx < 0) idx = static_cast<long>(mesh.vertices.size()) + idx + 1;
        refs.push_back(idx);
      }
      if (refs.size() < 3) throw ParseError("face with fewer than 3 vertices", line_no);
      faces.emplace_back(std::move(refs), line_no);
    }
  }

  const long nv = static_cast<long>(mesh.vertices.size());
  for (const auto& [refs, where] : faces) {
    ++face_no;
    for (long idx : refs) {
      if (idx < 1 || idx > nv) {
        throw IndexError("face " + std::to_string(face_no) + " (line " + std::to_string(where) +
                         ") references vertex " + std::to_string(idx) + " but only " +
                         std::to_string(nv) + " vertices exist");
      }
    }
    for (std::size_t k = 1; k + 1 < refs.size(); ++k) {
      mesh.triangles.push_back({static_cast<std::uint32_t>(refs[0] - 1),
                                static_cast<std::uint32_t>(refs[k] - 1),
                                static_cast<std::uint32_t>(refs[k + 1] - 1)});
    }
  }
  if (mesh.triangles.empty()) throw ParseError("mesh has no faces", line_no);
  return mesh;
}

TriangleMesh load_obj(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path.string());
  return parse_obj(in);
}

void write_obj(std::ostream& out, const TriangleMesh& mesh) {
  out.precision(17);
  for (const auto& v : mesh.vertices) out << "v " << v.x << ' ' << v.y << ' ' << v.z << '\n';
  for (const auto& t : mesh.triangles) {
    out << "f " << t[0] + 1 << ' ' << t[1] + 1 << ' ' << t[2] + 1 << '\n';
  }
}

Aabb bounds(const TriangleMesh& mesh) {
  if (mesh.vertices.empty()) throw DegenerateGeometryError("mesh has no vertices");
  Aabb box{mesh.vertices.front(), mesh.vertices.front()};
  for (const auto& v : mesh.vertices) {
    for (int a = 0; a < 3; ++a) {
      box.min[a] = std::min(box.min[a], v[a]);
      box.max[a] = std::max(box.max[a], v[a]);
    }
  }
  return box;
}

NormalizedMesh normalize(const TriangleMesh& mesh) {
  const Aabb box = bounds(mesh);
  const Vec3 ext = box.extent();
  const double largest = std::max({ext.x, ext.y, ext.z});
  if (!(largest > 0.0)) throw DegenerateGeometryError("mesh has zero extent on every axis");

  NormalizationRecord rec;
  rec.scale = 1.0 / largest;
  rec.offset = Vec3{0.5, 0.5, 0.5} - box.center() * rec.scale;

  NormalizedMesh out{mesh, rec};
  for (auto& v : out.mesh.vertices) {
    v = (v - box.center()) * rec.scale + Vec3{0.5, 0.5, 0.5};
  }
  return out;
}

}  // namespace cuboidkit
