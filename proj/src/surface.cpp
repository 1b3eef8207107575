#include "fsplit/surface.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>
#include <map>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <unordered_map>

namespace fsplit {
namespace {

struct RawMesh {
  std::vector<Vec3> vertices;
  std::vector<std::array<int, 3>> triangles;
  std::vector<Vec3> normals;  // per vertex, may be empty
};

[[noreturn]] void parse_fail(const std::string& path, size_t line,
                             const std::string& what) {
  throw std::runtime_error(path + ":" + std::to_string(line) + ": " + what);
}

// --- OBJ ------------------------------------------------------------------

RawMesh read_obj(const std::string& path, std::istream& in) {
  RawMesh mesh;
  std::vector<Vec3> vn;
  std::vector<int> vertex_normal_id;
  std::string line;
  size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::istringstream ls(line);
    std::string tag;
    if (!(ls >> tag) || tag[0] == '#') continue;
    if (tag == "v") {
      Vec3 p;
      if (!(ls >> p.x() >> p.y() >> p.z()))
        parse_fail(path, lineno, "malformed vertex record");
      mesh.vertices.push_back(p);
      vertex_normal_id.push_back(-1);
    } else if (tag == "vn") {
      Vec3 n;
      if (!(ls >> n.x() >> n.y() >> n.z()))
        parse_fail(path, lineno, "malformed normal record");
      vn.push_back(n);
    } else if (tag == "f") {
      std::vector<int> vids;
      std::vector<int> nids;
      std::string corner;
      while (ls >> corner) {
        // v, v/vt, v//vn or v/vt/vn
        int v = 0, n = -1;
        size_t s1 = corner.find('/');
        try {
          v = std::stoi(corner.substr(0, s1));
          if (s1 != std::string::npos) {
            size_t s2 = corner.find('/', s1 + 1);
            if (s2 != std::string::npos && s2 + 1 < corner.size())
              n = std::stoi(corner.substr(s2 + 1));
          }
        } catch (const std::exception&) {
          parse_fail(path, lineno, "malformed face corner '" + corner + "'");
        }
        if (v < 0) v = static_cast<int>(mesh.vertices.size()) + v + 1;
        if (v < 1 || v > static_cast<int>(mesh.vertices.size()))
          parse_fail(path, lineno, "face references missing vertex");
        vids.push_back(v - 1);
        nids.push_back(n - 1);
      }
      if (vids.size() < 3) parse_fail(path, lineno, "face with < 3 corners");
      for (size_t k = 0; k < vids.size(); ++k) {
        int n = nids[k];
        if (n >= 0) {
          if (n >= static_cast<int>(vn.size()))
            parse_fail(path, lineno, "face references missing normal");
          vertex_normal_id[vids[k]] = n;
        }
      }
      for (size_t k = 2; k < vids.size(); ++k)  // fan triangulation
        mesh.triangles.push_back({vids[0], vids[k - 1], vids[k]});
    }
  }
  if (!vn.empty()) {
    bool all = !mesh.vertices.empty();
    for (int id : vertex_normal_id) all = all && id >= 0;
    if (all) {
      mesh.normals.reserve(mesh.vertices.size());
      for (int id : vertex_normal_id) mesh.normals.push_back(vn[id]);
    }
  }
  return mesh;
}

// --- STL ------------------------------------------------------------------

RawMesh read_stl_ascii(const std::string& path, std::istream& in) {
  RawMesh mesh;
  std::string tok;
  size_t lineno = 1;
  std::vector<Vec3> tri;
  std::string line;
  while (std::getline(in, line)) {
    ++lineno;
    std::istringstream ls(line);
    if (!(ls >> tok)) continue;
    if (tok == "vertex") {
      Vec3 p;
      if (!(ls >> p.x() >> p.y() >> p.z()))
        parse_fail(path, lineno, "malformed STL vertex");
      tri.push_back(p);
      if (tri.size() == 3) {
        int base = static_cast<int>(mesh.vertices.size());
        mesh.vertices.insert(mesh.vertices.end(), tri.begin(), tri.end());
        mesh.triangles.push_back({base, base + 1, base + 2});
        tri.clear();
      }
    }
  }
  if (!tri.empty()) parse_fail(path, lineno, "truncated facet");
  return mesh;
}

RawMesh read_stl_binary(const std::string& path, std::istream& in) {
  char header[80];
  in.read(header, 80);
  uint32_t count = 0;
  in.read(reinterpret_cast<char*>(&count), 4);
  if (!in) parse_fail(path, 0, "truncated binary STL header");
  RawMesh mesh;
  mesh.vertices.reserve(count * 3);
  mesh.triangles.reserve(count);
  for (uint32_t t = 0; t < count; ++t) {
    float buf[12];
    in.read(reinterpret_cast<char*>(buf), sizeof(buf));
    uint16_t attr = 0;
    in.read(reinterpret_cast<char*>(&attr), 2);
    if (!in)
      parse_fail(path, 0, "truncated binary STL at facet " + std::to_string(t));
    int base = static_cast<int>(mesh.vertices.size());
    for (int k = 0; k < 3; ++k)
      mesh.vertices.emplace_back(buf[3 + 3 * k], buf[4 + 3 * k],
                                 buf[5 + 3 * k]);
    mesh.triangles.push_back({base, base + 1, base + 2});
  }
  return mesh;
}

RawMesh read_stl(const std::string& path, std::istream& in) {
  // "solid" prefix is not reliable; sniff for ASCII keywords in the head.
  char head[512] = {0};
  in.read(head, sizeof(head) - 1);
  size_t got = static_cast<size_t>(in.gcount());
  in.clear();
  in.seekg(0);
  std::string prefix(head, got);
  bool ascii = prefix.rfind("solid", 0) == 0 &&
               prefix.find("facet") != std::string::npos;
  return ascii ? read_stl_ascii(path, in) : read_stl_binary(path, in);
}

// --- PLY (ASCII) ----------------------------------------------------------

RawMesh read_ply(const std::string& path, std::istream& in) {
  std::string line;
  size_t lineno = 0;
  auto next_line = [&]() {
    if (!std::getline(in, line)) parse_fail(path, lineno, "unexpected EOF");
    ++lineno;
  };
  next_line();
  if (line.rfind("ply", 0) != 0) parse_fail(path, lineno, "missing ply magic");

  size_t n_vertices = 0, n_faces = 0;
  std::vector<std::string> vertex_props;
  std::string current_element;
  while (true) {
    next_line();
    std::istringstream ls(line);
    std::string tag;
    ls >> tag;
    if (tag == "end_header") break;
    if (tag == "format") {
      std::string fmt;
      ls >> fmt;
      if (fmt != "ascii") parse_fail(path, lineno, "only ASCII PLY supported");
    } else if (tag == "element") {
      std::string name;
      size_t count;
      ls >> name >> count;
      current_element = name;
      if (name == "vertex") n_vertices = count;
      if (name == "face") n_faces = count;
    } else if (tag == "property" && current_element == "vertex") {
      std::string type, name;
      ls >> type;
      if (type == "list") parse_fail(path, lineno, "list property on vertex");
      ls >> name;
      vertex_props.push_back(name);
    }
  }

  auto prop_index = [&](const std::string& name) {
    auto it = std::find(vertex_props.begin(), vertex_props.end(), name);
    return it == vertex_props.end()
               ? -1
               : static_cast<int>(it - vertex_props.begin());
  };
  int ix = prop_index("x"), iy = prop_index("y"), iz = prop_index("z");
  int inx = prop_index("nx"), iny = prop_index("ny"), inz = prop_index("nz");
  if (ix < 0 || iy < 0 || iz < 0)
    parse_fail(path, lineno, "vertex element lacks x/y/z");
  bool has_normals = inx >= 0 && iny >= 0 && inz >= 0;

  RawMesh mesh;
  mesh.vertices.reserve(n_vertices);
  std::vector<double> row(vertex_props.size());
  for (size_t v = 0; v < n_vertices; ++v) {
    next_line();
    std::istringstream ls(line);
    for (double& x : row)
      if (!(ls >> x)) parse_fail(path, lineno, "short vertex row");
    mesh.vertices.emplace_back(row[ix], row[iy], row[iz]);
    if (has_normals) mesh.normals.emplace_back(row[inx], row[iny], row[inz]);
  }
  for (size_t f = 0; f < n_faces; ++f) {
    next_line();
    std::istringstream ls(line);
    size_t n;
    if (!(ls >> n) || n < 3) parse_fail(path, lineno, "bad face row");
    std::vector<int> ids(n);
    for (size_t k = 0; k < n; ++k) {
      if (!(ls >> ids[k]) || ids[k] < 0 ||
          ids[k] >= static_cast<int>(mesh.vertices.size()))
        parse_fail(path, lineno, "face references missing vertex");
    }
    for (size_t k = 2; k < n; ++k)
      mesh.triangles.push_back({ids[0], ids[k - 1], ids[k]});
  }
  return mesh;
}

struct Vec3Key {
  double x, y, z;
  bool operator==(const Vec3Key& o) const {
    return x == o.x && y == o.y && z == o.z;
  }
};

struct Vec3KeyHash {
  size_t operator()(const Vec3Key& k) const {
    auto h = [](double v) {
      uint64_t bits;
      std::memcpy(&bits, &v, sizeof(bits));
      return std::hash<uint64_t>{}(bits);
    };
    size_t seed = h(k.x);
    seed ^= h(k.y) + 0x9e3779b97f4a7c15ull + (seed << 6) + (seed >> 2);
    seed ^= h(k.z) + 0x9e3779b97f4a7c15ull + (seed << 6) + (seed >> 2);
    return seed;
  }
};

// Merges bitwise-identical vertices (binary STL repeats each vertex per
// facet). Keeps first-seen order so ids stay stable.
void deduplicate(RawMesh& mesh) {
  std::unordered_map<Vec3Key, int, Vec3KeyHash> seen;
  std::vector<int> remap(mesh.vertices.size());
  std::vector<Vec3> verts;
  std::vector<Vec3> normals;
  verts.reserve(mesh.vertices.size());
  for (size_t i = 0; i < mesh.vertices.size(); ++i) {
    const Vec3& p = mesh.vertices[i];
    Vec3Key key{p.x(), p.y(), p.z()};
    auto [it, inserted] = seen.emplace(key, static_cast<int>(verts.size()));
    if (inserted) {
      verts.push_back(p);
      if (!mesh.normals.empty()) normals.push_back(mesh.normals[i]);
    }
    remap[i] = it->second;
  }
  for (auto& tri : mesh.triangles)
    tri = {remap[tri[0]], remap[tri[1]], remap[tri[2]]};
  mesh.vertices = std::move(verts);
  mesh.normals = std::move(normals);
}

}  // namespace

SurfaceModel::SurfaceModel(std::vector<Vec3> vertices,
                           std::vector<std::array<int, 3>> triangles,
                           std::vector<Vec3> normals)
    : vertices_(std::move(vertices)),
      triangles_(std::move(triangles)),
      normals_(std::move(normals)) {
  if (triangles_.empty())
    throw std::runtime_error("degenerate mesh: no triangles");
  const int n = static_cast<int>(vertices_.size());
  for (const auto& tri : triangles_)
    for (int id : tri)
      if (id < 0 || id >= n)
        throw std::runtime_error("triangle references invalid vertex index");

  Vec3 centroid = Vec3::Zero();
  for (const Vec3& v : vertices_) centroid += v;
  centroid /= static_cast<double>(n);
  for (Vec3& v : vertices_) v -= centroid;

  if (normals_.empty()) {
    normals_.assign(vertices_.size(), Vec3::Zero());
    for (const auto& tri : triangles_) {
      const Vec3 a = vertices_[tri[0]];
      const Vec3 face = (vertices_[tri[1]] - a).cross(vertices_[tri[2]] - a);
      for (int id : tri) normals_[id] += face;  // |face| = 2*area weighting
    }
  }
  for (Vec3& nrm : normals_) {
    double len = nrm.norm();
    nrm = len > 1e-14 ? Vec3(nrm / len) : Vec3::UnitZ();
  }

  bbox_.min = bbox_.max = vertices_.front();
  for (const Vec3& v : vertices_) {
    bbox_.min = bbox_.min.cwiseMin(v);
    bbox_.max = bbox_.max.cwiseMax(v);
  }
  build_index();
}

void SurfaceModel::build_index() {
  order_.resize(vertices_.size());
  std::iota(order_.begin(), order_.end(), 0);
  nodes_.clear();
  nodes_.reserve(2 * vertices_.size() / 8 + 8);

  constexpr int kLeafSize = 16;
  struct Task {
    int node, begin, end;
  };
  nodes_.push_back({});
  std::vector<Task> stack{{0, 0, static_cast<int>(order_.size())}};
  while (!stack.empty()) {
    auto [node, begin, end] = stack.back();
    stack.pop_back();
    if (end - begin <= kLeafSize) {
      nodes_[node] = KdNode{-1, 0.0, -1, -1, begin, end};
      continue;
    }
    Vec3 lo = vertices_[order_[begin]], hi = lo;
    for (int i = begin; i < end; ++i) {
      lo = lo.cwiseMin(vertices_[order_[i]]);
      hi = hi.cwiseMax(vertices_[order_[i]]);
    }
    int axis;
    (hi - lo).maxCoeff(&axis);
    int mid = (begin + end) / 2;
    std::nth_element(order_.begin() + begin, order_.begin() + mid,
                     order_.begin() + end, [&](int a, int b) {
                       if (vertices_[a][axis] != vertices_[b][axis])
                         return vertices_[a][axis] < vertices_[b][axis];
                       return a < b;
                     });
    int left = static_cast<int>(nodes_.size());
    nodes_.push_back({});
    nodes_.push_back({});
    nodes_[node] = KdNode{axis, vertices_[order_[mid]][axis], left, left + 1,
                          0, 0};
    stack.push_back({left, begin, mid});
    stack.push_back({left + 1, mid, end});
  }
}

void SurfaceModel::query(int node, const Vec3& p, double& best_d2,
                         int& best_id) const {
  const KdNode& nd = nodes_[node];
  if (nd.axis < 0) {
    for (int i = nd.begin; i < nd.end; ++i) {
      const int id = order_[i];
      const double d2 = (vertices_[id] - p).squaredNorm();
      if (d2 < best_d2 || (d2 == best_d2 && id < best_id)) {
        best_d2 = d2;
        best_id = id;
      }
    }
    return;
  }
  const double delta = p[nd.axis] - nd.split;
  const int near = delta < 0 ? nd.left : nd.right;
  const int far = delta < 0 ? nd.right : nd.left;
  query(near, p, best_d2, best_id);
  if (delta * delta <= best_d2) query(far, p, best_d2, best_id);
}

SurfacePoint SurfaceModel::nearest_neighbor(const Vec3& p) const {
  double best_d2 = std::numeric_limits<double>::infinity();
  int best_id = static_cast<int>(vertices_.size());
  query(0, p, best_d2, best_id);
  return point(best_id);
}

SurfaceModel load_mesh(const std::string& path, double scale) {
  auto dot = path.find_last_of('.');
  std::string ext = dot == std::string::npos ? "" : path.substr(dot + 1);
  std::transform(ext.begin(), ext.end(), ext.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  MeshFormat fmt;
  if (ext == "obj")
    fmt = MeshFormat::kObj;
  else if (ext == "stl")
    fmt = MeshFormat::kStl;
  else if (ext == "ply")
    fmt = MeshFormat::kPly;
  else
    throw std::runtime_error(path + ": unknown mesh extension '" + ext + "'");
  return load_mesh(path, fmt, scale);
}

SurfaceModel load_mesh(const std::string& path, MeshFormat format,
                       double scale) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error(path + ": cannot open file");
  RawMesh raw;
  switch (format) {
    case MeshFormat::kObj:
      raw = read_obj(path, in);
      break;
    case MeshFormat::kStl:
      raw = read_stl(path, in);
      break;
    case MeshFormat::kPly:
      raw = read_ply(path, in);
      break;
  }
  deduplicate(raw);
  if (scale != 1.0)
    for (Vec3& v : raw.vertices) v *= scale;
  return SurfaceModel(std::move(raw.vertices), std::move(raw.triangles),
                      std::move(raw.normals));
}

std::vector<Vec3> downsample(const SurfaceModel& model, double cell) {
  if (!(cell > 0.0)) throw std::invalid_argument("downsample: cell must be > 0");
  struct Acc {
    Vec3 sum = Vec3::Zero();
    int count = 0;
  };
  const Vec3 origin = model.bbox().min;
  std::map<std::array<int64_t, 3>, Acc> cells;
  for (const Vec3& v : model.vertices()) {
    const Vec3 g = (v - origin) / cell;
    std::array<int64_t, 3> key{static_cast<int64_t>(std::floor(g.x())),
                               static_cast<int64_t>(std::floor(g.y())),
                               static_cast<int64_t>(std::floor(g.z()))};
    auto& acc = cells[key];
    acc.sum += v;
    acc.count++;
  }
  std::vector<Vec3> out;
  out.reserve(cells.size());
  for (const auto& [key, acc] : cells) out.push_back(acc.sum / acc.count);
  return out;
}

void write_obj(const std::string& path, const std::vector<Vec3>& vertices,
               const std::vector<std::array<int, 3>>& triangles) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error(path + ": cannot open for writing");
  char buf[128];
  for (const Vec3& v : vertices) {
    std::snprintf(buf, sizeof(buf), "v %.17g %.17g %.17g\n", v.x(), v.y(),
                  v.z());
    out << buf;
  }
  for (const auto& t : triangles)
    out << "f " << t[0] + 1 << ' ' << t[1] + 1 << ' ' << t[2] + 1 << '\n';
}

}  // namespace fsplit
