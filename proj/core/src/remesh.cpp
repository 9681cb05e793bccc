#include <Eigen/Geometry>
#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <map>
#include <queue>
#include <set>
#include <vector>

#include "t4d/errors.hpp"
#include "t4d/sequence_tools.hpp"

namespace t4d {

namespace {

using Edge = std::pair<int, int>;

Edge make_edge(int a, int b) { return a < b ? Edge{a, b} : Edge{b, a}; }

std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

double jitter01(std::uint64_t seed, const Edge& e) {
  const std::uint64_t h =
      mix64(seed ^ mix64((static_cast<std::uint64_t>(e.first) << 32) |
                         static_cast<std::uint64_t>(e.second)));
  return static_cast<double>(h >> 11) * 0x1.0p-53;
}

// xorshift-based bounded index; deterministic across standard libraries,
// unlike std::uniform_int_distribution
int bounded_index(std::uint64_t& state, int n) {
  state = mix64(state);
  return static_cast<int>(state % static_cast<std::uint64_t>(n));
}

struct WorkMesh {
  std::vector<Vec3> positions;
  std::vector<std::array<int, 3>> faces;
  std::vector<bool> face_alive;
  std::vector<bool> vertex_alive;
  std::vector<std::vector<int>> vertex_faces;  // may hold stale entries

  int alive_vertices = 0;

  void init(const std::vector<Vec3>& pos, const std::vector<std::array<int, 3>>& fcs) {
    positions = pos;
    faces = fcs;
    face_alive.assign(faces.size(), true);
    vertex_alive.assign(positions.size(), true);
    alive_vertices = static_cast<int>(positions.size());
    vertex_faces.assign(positions.size(), {});
    for (size_t f = 0; f < faces.size(); ++f) {
      for (int c = 0; c < 3; ++c) {
        vertex_faces[static_cast<size_t>(faces[f][static_cast<size_t>(c)])]
            .push_back(static_cast<int>(f));
      }
    }
  }

  bool face_has(int f, int v) const {
    const auto& tri = faces[static_cast<size_t>(f)];
    return tri[0] == v || tri[1] == v || tri[2] == v;
  }

  // live faces containing vertex v, deduplicated
  std::vector<int> live_faces(int v) {
    auto& list = vertex_faces[static_cast<size_t>(v)];
    std::sort(list.begin(), list.end());
    list.erase(std::unique(list.begin(), list.end()), list.end());
    std::vector<int> out;
    for (int f : list) {
      if (face_alive[static_cast<size_t>(f)] && face_has(f, v)) out.push_back(f);
    }
    list = out;
    return out;
  }

  double tri_area(const std::array<int, 3>& tri) const {
    const Vec3& a = positions[static_cast<size_t>(tri[0])];
    const Vec3& b = positions[static_cast<size_t>(tri[1])];
    const Vec3& c = positions[static_cast<size_t>(tri[2])];
    return 0.5 * (b - a).cross(c - a).norm();
  }
};

std::vector<int> sorted_neighbors(WorkMesh& m, int v) {
  std::set<int> out;
  for (int f : m.live_faces(v)) {
    for (int c = 0; c < 3; ++c) {
      const int u = m.faces[static_cast<size_t>(f)][static_cast<size_t>(c)];
      if (u != v) out.insert(u);
    }
  }
  return {out.begin(), out.end()};
}

// conforming red-green split: every face is retriangulated against the set
// of split edges so midpoints never hang
void subdivide_faces(std::vector<Vec3>& positions,
                     std::vector<std::array<int, 3>>& faces,
                     const std::vector<char>& selected, int& subdivided) {
  std::map<Edge, int> midpoint;
  auto midpoint_of = [&](int a, int b) {
    const Edge e = make_edge(a, b);
    auto it = midpoint.find(e);
    if (it != midpoint.end()) return it->second;
    const int id = static_cast<int>(positions.size());
    positions.push_back(0.5 * (positions[static_cast<size_t>(a)] +
                               positions[static_cast<size_t>(b)]));
    midpoint.emplace(e, id);
    return id;
  };

  std::set<Edge> split_edges;
  for (size_t f = 0; f < faces.size(); ++f) {
    if (!selected[f]) continue;
    const auto& tri = faces[f];
    for (int c = 0; c < 3; ++c) {
      split_edges.insert(make_edge(tri[static_cast<size_t>(c)],
                                   tri[static_cast<size_t>((c + 1) % 3)]));
    }
  }

  std::vector<std::array<int, 3>> out;
  out.reserve(faces.size() * 2);
  for (size_t f = 0; f < faces.size(); ++f) {
    const auto& tri = faces[f];
    bool split[3];
    int n_split = 0;
    for (int c = 0; c < 3; ++c) {
      split[c] = split_edges.count(make_edge(tri[static_cast<size_t>(c)],
                                             tri[static_cast<size_t>((c + 1) % 3)])) > 0;
      n_split += split[c] ? 1 : 0;
    }
    if (selected[f]) ++subdivided;

    if (n_split == 0) {
      out.push_back(tri);
      continue;
    }
    // rotate so that edge (v0, v1) is split
    int rot = 0;
    if (n_split == 1) {
      rot = split[0] ? 0 : (split[1] ? 1 : 2);
    } else if (n_split == 2) {
      // rotate so the unsplit edge is (v2, v0)
      rot = !split[0] ? 1 : (!split[1] ? 2 : 0);
    }
    const int v0 = tri[static_cast<size_t>(rot)];
    const int v1 = tri[static_cast<size_t>((rot + 1) % 3)];
    const int v2 = tri[static_cast<size_t>((rot + 2) % 3)];

    if (n_split == 1) {
      const int m01 = midpoint_of(v0, v1);
      out.push_back({v0, m01, v2});
      out.push_back({m01, v1, v2});
    } else if (n_split == 2) {
      const int m01 = midpoint_of(v0, v1);
      const int m12 = midpoint_of(v1, v2);
      out.push_back({m01, v1, m12});
      // split the remaining quad along its shorter diagonal
      const double d0 = (positions[static_cast<size_t>(v0)] -
                         positions[static_cast<size_t>(m12)]).squaredNorm();
      const double d1 = (positions[static_cast<size_t>(m01)] -
                         positions[static_cast<size_t>(v2)]).squaredNorm();
      if (d0 <= d1) {
        out.push_back({v0, m01, m12});
        out.push_back({v0, m12, v2});
      } else {
        out.push_back({v0, m01, v2});
        out.push_back({m01, m12, v2});
      }
    } else {
      const int m01 = midpoint_of(v0, v1);
      const int m12 = midpoint_of(v1, v2);
      const int m20 = midpoint_of(v2, v0);
      out.push_back({v0, m01, m20});
      out.push_back({m01, v1, m12});
      out.push_back({m20, m12, v2});
      out.push_back({m01, m12, m20});
    }
  }
  faces = std::move(out);
}

struct Candidate {
  double key;
  Edge edge;
  std::uint64_t version;
  bool operator>(const Candidate& other) const {
    if (key != other.key) return key > other.key;
    return edge > other.edge;
  }
};

}  // namespace

RemeshResult remesh_random(const Mesh& mesh, const RemeshOptions& options) {
  require_valid(mesh, "remesh_random");
  if (options.up_fraction < 0.0 || options.up_fraction > 1.0) {
    throw ValidationError("remesh_random: up_fraction must be in [0, 1]");
  }
  if (!(options.down_target_ratio > 0.0) || options.down_target_ratio > 1.0) {
    throw ValidationError("remesh_random: down_target_ratio must be in (0, 1]");
  }

  const int v_original = mesh.vertex_count();
  const double max_edge = max_edge_length(mesh);
  // collapses longer than this are rejected to keep the surface near the
  // original; supports the Hausdorff <= 2 * max original edge guarantee
  const double collapse_cap = 1.5 * max_edge;

  std::vector<Vec3> positions;
  positions.reserve(static_cast<size_t>(v_original));
  for (int i = 0; i < v_original; ++i) positions.push_back(mesh.vertex(i));
  std::vector<std::array<int, 3>> faces;
  faces.reserve(static_cast<size_t>(mesh.face_count()));
  for (int f = 0; f < mesh.face_count(); ++f) {
    faces.push_back({mesh.faces(f, 0), mesh.faces(f, 1), mesh.faces(f, 2)});
  }

  RemeshResult result;
  std::uint64_t rng = mix64(options.seed ^ 0x7a3c9b15d4e2f081ULL);

  // phase 1: random conforming subdivision
  const int n_pick =
      static_cast<int>(std::llround(options.up_fraction * mesh.face_count()));
  if (n_pick > 0) {
    std::vector<int> ids(faces.size());
    for (size_t i = 0; i < ids.size(); ++i) ids[i] = static_cast<int>(i);
    for (int i = static_cast<int>(ids.size()) - 1; i > 0; --i) {
      std::swap(ids[static_cast<size_t>(i)],
                ids[static_cast<size_t>(bounded_index(rng, i + 1))]);
    }
    std::vector<char> selected(faces.size(), 0);
    for (int i = 0; i < n_pick; ++i) selected[static_cast<size_t>(ids[i])] = 1;
    subdivide_faces(positions, faces, selected, result.subdivided_faces);
  }

  // phase 2: seeded shortest-edge collapses
  WorkMesh work;
  work.init(positions, faces);

  const int target_v = std::max(
      4, static_cast<int>(std::floor(options.down_target_ratio * v_original)));

  std::map<Edge, std::uint64_t> edge_version;
  std::priority_queue<Candidate, std::vector<Candidate>, std::greater<Candidate>> queue;

  auto edge_key = [&](const Edge& e) {
    const double len = (work.positions[static_cast<size_t>(e.first)] -
                        work.positions[static_cast<size_t>(e.second)]).norm();
    return len * (1.0 + 0.25 * jitter01(options.seed, e));
  };
  auto push_edge = [&](const Edge& e) {
    const std::uint64_t version = ++edge_version[e];
    queue.push({edge_key(e), e, version});
  };

  {
    std::set<Edge> edges;
    for (const auto& tri : work.faces) {
      for (int c = 0; c < 3; ++c) {
        edges.insert(make_edge(tri[static_cast<size_t>(c)],
                               tri[static_cast<size_t>((c + 1) % 3)]));
      }
    }
    for (const Edge& e : edges) push_edge(e);
  }

  auto shared_faces_of = [&](int a, int b) {
    std::vector<int> shared;
    for (int f : work.live_faces(a)) {
      if (work.face_has(f, b)) shared.push_back(f);
    }
    return shared;
  };

  auto is_boundary_vertex = [&](int v) {
    // a vertex is boundary iff one of its incident edges has a single face
    std::map<int, int> counts;
    for (int f : work.live_faces(v)) {
      for (int c = 0; c < 3; ++c) {
        const int u = work.faces[static_cast<size_t>(f)][static_cast<size_t>(c)];
        if (u != v) counts[u] += 1;
      }
    }
    for (const auto& [u, n] : counts) {
      if (n == 1) return true;
    }
    return false;
  };

  while (work.alive_vertices > target_v && !queue.empty()) {
    const Candidate cand = queue.top();
    queue.pop();
    const auto [a, b] = cand.edge;
    auto version_it = edge_version.find(cand.edge);
    if (version_it == edge_version.end() || version_it->second != cand.version) {
      continue;  // stale entry
    }
    if (!work.vertex_alive[static_cast<size_t>(a)] ||
        !work.vertex_alive[static_cast<size_t>(b)]) {
      continue;
    }
    const std::vector<int> shared = shared_faces_of(a, b);
    if (shared.empty()) continue;  // edge no longer exists
    if (shared.size() > 2) continue;

    const double len = (work.positions[static_cast<size_t>(a)] -
                        work.positions[static_cast<size_t>(b)]).norm();
    if (len > collapse_cap) continue;

    // link condition: common neighbors must be exactly the vertices
    // opposite the shared faces
    const std::vector<int> na = sorted_neighbors(work, a);
    const std::vector<int> nb = sorted_neighbors(work, b);
    std::vector<int> common;
    std::set_intersection(na.begin(), na.end(), nb.begin(), nb.end(),
                          std::back_inserter(common));
    std::set<int> opposite;
    for (int f : shared) {
      for (int c = 0; c < 3; ++c) {
        const int u = work.faces[static_cast<size_t>(f)][static_cast<size_t>(c)];
        if (u != a && u != b) opposite.insert(u);
      }
    }
    if (common.size() != opposite.size() ||
        !std::equal(common.begin(), common.end(), opposite.begin())) {
      continue;
    }
    // an interior edge between two boundary vertices would pinch the surface
    if (shared.size() == 2 && is_boundary_vertex(a) && is_boundary_vertex(b)) {
      continue;
    }

    // geometric guard: no surviving face may become (near-)degenerate
    const Vec3 midpoint = 0.5 * (work.positions[static_cast<size_t>(a)] +
                                 work.positions[static_cast<size_t>(b)]);
    const Vec3 old_a = work.positions[static_cast<size_t>(a)];
    work.positions[static_cast<size_t>(a)] = midpoint;
    bool ok = true;
    auto check_faces = [&](int v) {
      for (int f : work.live_faces(v)) {
        if (work.face_has(f, a) && work.face_has(f, b)) continue;  // dies
        std::array<int, 3> tri = work.faces[static_cast<size_t>(f)];
        for (auto& idx : tri) {
          if (idx == b) idx = a;
        }
        if (work.tri_area(tri) <= 100.0 * kZeroAreaTolerance) {
          ok = false;
          return;
        }
      }
    };
    check_faces(a);
    if (ok) check_faces(b);
    if (!ok) {
      work.positions[static_cast<size_t>(a)] = old_a;
      continue;
    }

    // commit
    for (int f : work.live_faces(b)) {
      if (work.face_has(f, a)) {
        work.face_alive[static_cast<size_t>(f)] = false;
        continue;
      }
      auto& tri = work.faces[static_cast<size_t>(f)];
      for (auto& idx : tri) {
        if (idx == b) idx = a;
      }
      work.vertex_faces[static_cast<size_t>(a)].push_back(f);
    }
    work.vertex_alive[static_cast<size_t>(b)] = false;
    work.alive_vertices -= 1;
    result.collapsed_edges += 1;
    edge_version.erase(cand.edge);

    // re-key every edge of the faces around the kept vertex; their lengths
    // or link sets may have changed
    std::set<Edge> affected;
    for (int f : work.live_faces(a)) {
      const auto& tri = work.faces[static_cast<size_t>(f)];
      for (int c = 0; c < 3; ++c) {
        affected.insert(make_edge(tri[static_cast<size_t>(c)],
                                  tri[static_cast<size_t>((c + 1) % 3)]));
      }
    }
    for (const Edge& e : affected) push_edge(e);
  }
  result.reached_target = work.alive_vertices <= target_v;

  // compact
  std::vector<int> remap(work.positions.size(), -1);
  Mesh out;
  {
    int next = 0;
    for (size_t i = 0; i < work.positions.size(); ++i) {
      if (work.vertex_alive[i]) remap[i] = next++;
    }
    out.vertices.resize(next, 3);
    for (size_t i = 0; i < work.positions.size(); ++i) {
      if (remap[i] >= 0) out.vertices.row(remap[i]) = work.positions[i].transpose();
    }
    std::vector<std::array<int, 3>> kept;
    for (size_t f = 0; f < work.faces.size(); ++f) {
      if (!work.face_alive[f]) continue;
      kept.push_back({remap[static_cast<size_t>(work.faces[f][0])],
                      remap[static_cast<size_t>(work.faces[f][1])],
                      remap[static_cast<size_t>(work.faces[f][2])]});
    }
    out.faces.resize(static_cast<Eigen::Index>(kept.size()), 3);
    for (size_t f = 0; f < kept.size(); ++f) {
      out.faces(static_cast<Eigen::Index>(f), 0) = kept[f][0];
      out.faces(static_cast<Eigen::Index>(f), 1) = kept[f][1];
      out.faces(static_cast<Eigen::Index>(f), 2) = kept[f][2];
    }
  }
  // drop vertices that lost all faces during collapses
  {
    std::vector<bool> used(static_cast<size_t>(out.vertex_count()), false);
    for (int f = 0; f < out.face_count(); ++f) {
      for (int c = 0; c < 3; ++c) used[static_cast<size_t>(out.faces(f, c))] = true;
    }
    std::vector<int> remap2(static_cast<size_t>(out.vertex_count()), -1);
    int next = 0;
    for (int i = 0; i < out.vertex_count(); ++i) {
      if (used[static_cast<size_t>(i)]) remap2[static_cast<size_t>(i)] = next++;
    }
    if (next != out.vertex_count()) {
      VertexMatrix verts(next, 3);
      for (int i = 0; i < out.vertex_count(); ++i) {
        if (remap2[static_cast<size_t>(i)] >= 0) {
          verts.row(remap2[static_cast<size_t>(i)]) = out.vertices.row(i);
        }
      }
      out.vertices = verts;
      for (int f = 0; f < out.face_count(); ++f) {
        for (int c = 0; c < 3; ++c) {
          out.faces(f, c) = remap2[static_cast<size_t>(out.faces(f, c))];
        }
      }
    }
  }

  require_valid(out, "remesh_random output");
  result.mesh = std::move(out);
  return result;
}

}  // namespace t4d
