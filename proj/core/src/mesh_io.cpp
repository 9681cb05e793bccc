#include "t4d/mesh_io.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <fstream>
#include <nlohmann/json.hpp>
#include <sstream>
#include <vector>

#include "t4d/errors.hpp"

namespace fs = std::filesystem;

namespace t4d {

namespace {

using json = nlohmann::json;

[[noreturn]] void parse_fail(const fs::path& path, size_t line,
                             const std::string& what) {
  throw ValidationError(path.string() + ":" + std::to_string(line) + ": " + what);
}

std::string fmt9(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.9g", v);
  return buf;
}

void append_polygon(std::vector<std::array<int, 3>>& tris,
                    const std::vector<int>& poly, bool triangulate,
                    const fs::path& path, size_t line) {
  if (poly.size() < 3) parse_fail(path, line, "face with fewer than 3 vertices");
  if (poly.size() > 3 && !triangulate) {
    parse_fail(path, line,
               "non-triangle face (enable polygon triangulation to fan-split)");
  }
  for (size_t i = 2; i < poly.size(); ++i) {
    tris.push_back({poly[0], poly[static_cast<int>(i) - 1], poly[i]});
  }
}

Mesh finalize(std::vector<std::array<double, 3>>&& verts,
              std::vector<std::array<int, 3>>&& tris, const fs::path& path) {
  Mesh mesh;
  mesh.vertices.resize(static_cast<Eigen::Index>(verts.size()), 3);
  for (size_t i = 0; i < verts.size(); ++i) {
    mesh.vertices(static_cast<Eigen::Index>(i), 0) = verts[i][0];
    mesh.vertices(static_cast<Eigen::Index>(i), 1) = verts[i][1];
    mesh.vertices(static_cast<Eigen::Index>(i), 2) = verts[i][2];
  }
  mesh.faces.resize(static_cast<Eigen::Index>(tris.size()), 3);
  for (size_t i = 0; i < tris.size(); ++i) {
    mesh.faces(static_cast<Eigen::Index>(i), 0) = tris[i][0];
    mesh.faces(static_cast<Eigen::Index>(i), 1) = tris[i][1];
    mesh.faces(static_cast<Eigen::Index>(i), 2) = tris[i][2];
  }
  require_valid(mesh, path.string());
  return mesh;
}

Mesh load_obj(const fs::path& path, const LoadOptions& options) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open " + path.string());

  std::vector<std::array<double, 3>> verts;
  std::vector<std::array<int, 3>> tris;
  std::string line;
  size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::istringstream ls(line);
    std::string tag;
    if (!(ls >> tag)) continue;
    if (tag == "v") {
      std::array<double, 3> p{};
      if (!(ls >> p[0] >> p[1] >> p[2])) {
        parse_fail(path, lineno, "malformed vertex line");
      }
      verts.push_back(p);
    } else if (tag == "f") {
      std::vector<int> poly;
      std::string token;
      while (ls >> token) {
        // "i", "i/t", "i/t/n", "i//n" all carry the vertex index first.
        size_t slash = token.find('/');
        std::string head = token.substr(0, slash);
        int idx = 0;
        try {
          idx = std::stoi(head);
        } catch (const std::exception&) {
          parse_fail(path, lineno, "malformed face index '" + token + "'");
        }
        if (idx <= 0) {
          parse_fail(path, lineno, "face indices must be positive and 1-based");
        }
        poly.push_back(idx - 1);
      }
      append_polygon(tris, poly, options.triangulate_polygons, path, lineno);
    }
    // all other tags ignored
  }
  return finalize(std::move(verts), std::move(tris), path);
}

Mesh load_ply(const fs::path& path, const LoadOptions& options) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open " + path.string());

  std::string line;
  size_t lineno = 0;
  auto next_line = [&]() -> bool {
    while (std::getline(in, line)) {
      ++lineno;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (!line.empty()) return true;
    }
    return false;
  };

  if (!next_line() || line != "ply") parse_fail(path, lineno, "missing 'ply' magic");

  long vertex_count = -1, face_count = -1;
  // Property layout of the vertex element; x/y/z positions within the row.
  std::vector<std::string> vertex_props;
  std::string current_element;
  bool header_done = false;
  while (next_line()) {
    std::istringstream ls(line);
    std::string tag;
    ls >> tag;
    if (tag == "comment" || tag == "obj_info") continue;
    if (tag == "format") {
      std::string kind;
      ls >> kind;
      if (kind != "ascii") {
        throw ValidationError(path.string() +
                              ": binary PLY is not supported, re-export as ascii");
      }
    } else if (tag == "element") {
      std::string name;
      long count = 0;
      ls >> name >> count;
      current_element = name;
      if (name == "vertex") vertex_count = count;
      else if (name == "face") face_count = count;
    } else if (tag == "property") {
      if (current_element == "vertex") {
        std::string type, name;
        ls >> type >> name;
        if (type == "list") parse_fail(path, lineno, "list property on vertex element");
        vertex_props.push_back(name);
      }
    } else if (tag == "end_header") {
      header_done = true;
      break;
    }
  }
  if (!header_done) parse_fail(path, lineno, "unterminated PLY header");
  if (vertex_count < 0) parse_fail(path, lineno, "missing vertex element");
  if (face_count < 0) parse_fail(path, lineno, "missing face element");

  int ix = -1, iy = -1, iz = -1;
  for (size_t i = 0; i < vertex_props.size(); ++i) {
    if (vertex_props[i] == "x") ix = static_cast<int>(i);
    if (vertex_props[i] == "y") iy = static_cast<int>(i);
    if (vertex_props[i] == "z") iz = static_cast<int>(i);
  }
  if (ix < 0 || iy < 0 || iz < 0) {
    throw ValidationError(path.string() + ": vertex element lacks x y z properties");
  }

  std::vector<std::array<double, 3>> verts;
  verts.reserve(static_cast<size_t>(vertex_count));
  for (long v = 0; v < vertex_count; ++v) {
    if (!next_line()) parse_fail(path, lineno, "unexpected end of vertex data");
    std::istringstream ls(line);
    std::vector<double> row(vertex_props.size());
    for (double& value : row) {
      if (!(ls >> value)) parse_fail(path, lineno, "malformed vertex row");
    }
    verts.push_back({row[ix], row[iy], row[iz]});
  }

  std::vector<std::array<int, 3>> tris;
  tris.reserve(static_cast<size_t>(face_count));
  for (long f = 0; f < face_count; ++f) {
    if (!next_line()) parse_fail(path, lineno, "unexpected end of face data");
    std::istringstream ls(line);
    int n = 0;
    if (!(ls >> n) || n < 3) parse_fail(path, lineno, "malformed face row");
    std::vector<int> poly(n);
    for (int& idx : poly) {
      if (!(ls >> idx)) parse_fail(path, lineno, "malformed face row");
    }
    append_polygon(tris, poly, options.triangulate_polygons, path, lineno);
  }
  return finalize(std::move(verts), std::move(tris), path);
}

MeshFormat detect_format(const fs::path& path) {
  std::string ext = path.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  if (ext == ".obj") return MeshFormat::Obj;
  if (ext == ".ply") return MeshFormat::PlyAscii;
  throw ValidationError("cannot infer mesh format from '" + path.string() +
                        "' (expected .obj or .ply)");
}

}  // namespace

Mesh load_mesh(const fs::path& path, const LoadOptions& options) {
  MeshFormat fmt = options.format;
  if (fmt == MeshFormat::Auto) fmt = detect_format(path);
  return fmt == MeshFormat::Obj ? load_obj(path, options) : load_ply(path, options);
}

void save_mesh(const fs::path& path, const Mesh& mesh, MeshFormat format) {
  if (format == MeshFormat::Auto) format = detect_format(path);
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot write " + path.string());

  if (format == MeshFormat::Obj) {
    for (int v = 0; v < mesh.vertex_count(); ++v) {
      out << "v " << fmt9(mesh.vertices(v, 0)) << ' ' << fmt9(mesh.vertices(v, 1))
          << ' ' << fmt9(mesh.vertices(v, 2)) << '\n';
    }
    for (int f = 0; f < mesh.face_count(); ++f) {
      out << "f " << mesh.faces(f, 0) + 1 << ' ' << mesh.faces(f, 1) + 1 << ' '
          << mesh.faces(f, 2) + 1 << '\n';
    }
  } else {
    out << "ply\nformat ascii 1.0\n";
    out << "element vertex " << mesh.vertex_count() << "\n";
    out << "property float x\nproperty float y\nproperty float z\n";
    out << "element face " << mesh.face_count() << "\n";
    out << "property list uchar int vertex_indices\nend_header\n";
    for (int v = 0; v < mesh.vertex_count(); ++v) {
      out << fmt9(mesh.vertices(v, 0)) << ' ' << fmt9(mesh.vertices(v, 1)) << ' '
          << fmt9(mesh.vertices(v, 2)) << '\n';
    }
    for (int f = 0; f < mesh.face_count(); ++f) {
      out << "3 " << mesh.faces(f, 0) << ' ' << mesh.faces(f, 1) << ' '
          << mesh.faces(f, 2) << '\n';
    }
  }
  if (!out) throw ValidationError("write failed for " + path.string());
}

bool natural_less(const std::string& a, const std::string& b) {
  size_t i = 0, j = 0;
  while (i < a.size() && j < b.size()) {
    const bool da = std::isdigit(static_cast<unsigned char>(a[i]));
    const bool db = std::isdigit(static_cast<unsigned char>(b[j]));
    if (da && db) {
      size_t ia = i, jb = j;
      while (ia < a.size() && std::isdigit(static_cast<unsigned char>(a[ia]))) ++ia;
      while (jb < b.size() && std::isdigit(static_cast<unsigned char>(b[jb]))) ++jb;
      // strip leading zeros, compare by length then lexically
      size_t sa = i, sb = j;
      while (sa + 1 < ia && a[sa] == '0') ++sa;
      while (sb + 1 < jb && b[sb] == '0') ++sb;
      const size_t la = ia - sa, lb = jb - sb;
      if (la != lb) return la < lb;
      const int cmp = a.compare(sa, la, b, sb, lb);
      if (cmp != 0) return cmp < 0;
      i = ia;
      j = jb;
    } else {
      if (a[i] != b[j]) return a[i] < b[j];
      ++i;
      ++j;
    }
  }
  return (a.size() - i) < (b.size() - j);
}

bool glob_match(const std::string& pattern, const std::string& name) {
  // * and ? only; sufficient for frame file patterns.
  size_t p = 0, n = 0, star = std::string::npos, mark = 0;
  while (n < name.size()) {
    if (p < pattern.size() && (pattern[p] == '?' || pattern[p] == name[n])) {
      ++p;
      ++n;
    } else if (p < pattern.size() && pattern[p] == '*') {
      star = p++;
      mark = n;
    } else if (star != std::string::npos) {
      p = star + 1;
      n = ++mark;
    } else {
      return false;
    }
  }
  while (p < pattern.size() && pattern[p] == '*') ++p;
  return p == pattern.size();
}

MeshSequence load_sequence(const fs::path& dir, const std::string& pattern,
                           double fps, const LoadOptions& options) {
  if (!fs::is_directory(dir)) {
    throw ValidationError("not a directory: " + dir.string());
  }
  std::vector<std::string> names;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (!entry.is_regular_file()) continue;
    const std::string name = entry.path().filename().string();
    if (glob_match(pattern, name)) names.push_back(name);
  }
  if (names.empty()) {
    throw ValidationError("no files matching '" + pattern + "' in " + dir.string());
  }
  std::sort(names.begin(), names.end(), natural_less);

  std::vector<Mesh> frames;
  frames.reserve(names.size());
  for (const std::string& name : names) {
    frames.push_back(load_mesh(dir / name, options));
  }
  return make_sequence(std::move(frames), fps);
}

void save_sequence(const fs::path& dir, const MeshSequence& seq,
                   const std::string& stem, MeshFormat format) {
  fs::create_directories(dir);
  const char* ext = (format == MeshFormat::PlyAscii) ? ".ply" : ".obj";
  for (int j = 0; j < seq.frame_count(); ++j) {
    char suffix[16];
    std::snprintf(suffix, sizeof(suffix), "_%05d", j);
    save_mesh(dir / (stem + suffix + ext), seq.frames[j], format);
  }
}

VertexMask load_mask(const fs::path& path, int vertex_count) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open " + path.string());
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ValidationError(path.string() + ": " + e.what());
  }
  if (!j.contains("label") || !j.contains("indices")) {
    throw ValidationError(path.string() + ": mask needs 'label' and 'indices'");
  }
  try {
    return make_mask(j["indices"].get<std::vector<int>>(),
                     j["label"].get<std::string>(), vertex_count);
  } catch (const json::exception& e) {
    throw ValidationError(path.string() + ": " + e.what());
  }
}

void save_mask(const fs::path& path, const VertexMask& mask) {
  json j;
  j["label"] = mask.label;
  j["indices"] = mask.indices;
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot write " + path.string());
  out << j.dump(2) << '\n';
}

LipLandmarkSet load_lip_landmarks(const fs::path& path, int vertex_count) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open " + path.string());
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ValidationError(path.string() + ": " + e.what());
  }
  if (!j.contains("upper") || !j.contains("lower")) {
    throw ValidationError(path.string() + ": lip landmarks need 'upper' and 'lower'");
  }
  auto triple = [&](const char* key) -> std::array<int, 3> {
    const auto list = j[key].get<std::vector<int>>();
    if (list.size() != 3) {
      throw ValidationError(path.string() + ": '" + key + "' must list 3 indices");
    }
    return {list[0], list[1], list[2]};
  };
  return make_lip_landmarks(triple("upper"), triple("lower"), vertex_count);
}

void save_lip_landmarks(const fs::path& path, const LipLandmarkSet& lips) {
  json j;
  j["upper"] = lips.upper;
  j["lower"] = lips.lower;
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot write " + path.string());
  out << j.dump(2) << '\n';
}

}  // namespace t4d
