#include <algorithm>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <vector>

#include "hocurve/io.hpp"

namespace hocurve {

namespace {

// MSH element type codes for the shapes this project handles
int tet_type_for_degree(int q) {
  switch (q) {
    case 1: return 4;
    case 2: return 11;
    case 3: return 29;
    case 4: return 30;
  }
  throw UnsupportedDegreeError("tetrahedron degree " + std::to_string(q));
}

int tri_type_for_degree(int q) {
  switch (q) {
    case 1: return 2;
    case 2: return 9;
    case 3: return 21;
    case 4: return 23;
  }
  throw UnsupportedDegreeError("triangle degree " + std::to_string(q));
}

// degree from the type code, or 0 if the code is not a tri/tet; is_tet set accordingly
int shape_degree(int type, bool& is_tet) {
  switch (type) {
    case 2: is_tet = false; return 1;
    case 9: is_tet = false; return 2;
    case 21: is_tet = false; return 3;
    case 23: is_tet = false; return 4;
    case 4: is_tet = true; return 1;
    case 11: is_tet = true; return 2;
    case 29: is_tet = true; return 3;
    case 30: is_tet = true; return 4;
  }
  return 0;
}

bool skippable_type(int type) {
  // points and lines of any degree carry no tet-mesh information
  return type == 15 || type == 1 || type == 8 || type == 26 || type == 27 || type == 28;
}

int tri_nodes(int q) { return (q + 1) * (q + 2) / 2; }
int tet_nodes(int q) { return (q + 1) * (q + 2) * (q + 3) / 6; }

// line-oriented reader that keeps the current line number for diagnostics
class Cursor {
 public:
  explicit Cursor(const std::string& path) : path_(path), in_(path) {
    if (!in_) throw Error("cannot open " + path);
  }

  // next non-empty line, stripped of trailing CR; false at EOF
  bool next() {
    while (std::getline(in_, line_)) {
      ++line_no_;
      while (!line_.empty() && (line_.back() == '\r' || line_.back() == ' ')) line_.pop_back();
      if (!line_.empty()) return true;
    }
    return false;
  }

  const std::string& line() const { return line_; }
  long line_no() const { return line_no_; }

  [[noreturn]] void fail(const std::string& msg) const { throw ParseError(path_, line_no_, msg); }

  std::string must_next(const char* what) {
    if (!next()) fail(std::string("unexpected end of file, expected ") + what);
    return line_;
  }

  // whitespace-separated fields of the current line
  std::vector<std::string> fields() const {
    std::vector<std::string> out;
    std::istringstream ss(line_);
    std::string tok;
    while (ss >> tok) out.push_back(tok);
    return out;
  }

  long to_long(const std::string& tok) const {
    try {
      std::size_t used = 0;
      long v = std::stol(tok, &used);
      if (used != tok.size()) fail("malformed integer '" + tok + "'");
      return v;
    } catch (const ParseError&) {
      throw;
    } catch (const std::exception&) {
      fail("malformed integer '" + tok + "'");
    }
  }

  double to_double(const std::string& tok) const {
    try {
      std::size_t used = 0;
      double v = std::stod(tok, &used);
      if (used != tok.size()) fail("malformed number '" + tok + "'");
      return v;
    } catch (const ParseError&) {
      throw;
    } catch (const std::exception&) {
      fail("malformed number '" + tok + "'");
    }
  }

  void skip_section(const std::string& name) {
    const std::string end = "$End" + name.substr(1);
    while (next())
      if (line_ == end) return;
    fail("missing " + end);
  }

 private:
  std::string path_;
  std::ifstream in_;
  std::string line_;
  long line_no_ = 0;
};

struct RawElem {
  int type = 0;
  int mark = 0;  // resolved physical tag (or entity tag fallback)
  std::vector<int> nodes;  // indices into RawMesh::coords
  long line = 0;
};

struct RawMesh {
  std::vector<Vec3> coords;  // file order
  std::vector<RawElem> tris, tets;
};

// shared MSH 4.1 / 2.2 parse; `linear_only` rejects high-order tri/tet types
RawMesh parse_msh(const std::string& path, bool linear_only) {
  Cursor c(path);
  c.must_next("$MeshFormat");
  if (c.line() != "$MeshFormat") c.fail("expected $MeshFormat");
  c.must_next("format line");
  auto fmt = c.fields();
  if (fmt.size() < 3) c.fail("malformed format line");
  const double version = c.to_double(fmt[0]);
  if (c.to_long(fmt[1]) != 0) c.fail("binary MSH is not supported");
  const bool v41 = version >= 4.0;
  if (!v41 && std::abs(version - 2.2) > 0.05)
    c.fail("unsupported MSH version " + fmt[0]);
  c.must_next("$EndMeshFormat");
  if (c.line() != "$EndMeshFormat") c.fail("expected $EndMeshFormat");

  RawMesh raw;
  std::map<long, int> tag_to_index;          // node tag -> coords index
  std::map<std::pair<int, long>, int> phys;  // (entity dim, entity tag) -> first physical tag
  std::vector<long> node_tag_line;           // diagnostic: line each node tag was defined on
  bool seen_nodes = false, seen_elems = false;

  auto resolve_nodes = [&](const std::vector<std::string>& toks, std::size_t first, int n,
                           std::vector<int>& out) {
    out.resize(n);
    for (int k = 0; k < n; ++k) {
      const long tag = c.to_long(toks[first + k]);
      auto it = tag_to_index.find(tag);
      if (it == tag_to_index.end())
        c.fail("element references undefined node " + std::to_string(tag));
      out[k] = it->second;
    }
  };

  auto classify_elem = [&](int type, long line, const std::vector<std::string>& toks,
                           std::size_t first, int mark) {
    bool is_tet = false;
    const int q = shape_degree(type, is_tet);
    if (q == 0) {
      if (skippable_type(type)) return;
      c.fail("unsupported element type " + std::to_string(type));
    }
    if (linear_only && q > 1)
      c.fail("high-order element type " + std::to_string(type) +
             " in a file expected to be linear");
    const int n = is_tet ? tet_nodes(q) : tri_nodes(q);
    if (static_cast<int>(toks.size()) - static_cast<int>(first) != n)
      c.fail("element type " + std::to_string(type) + " needs " + std::to_string(n) + " nodes, got " +
             std::to_string(toks.size() - first));
    RawElem e;
    e.type = type;
    e.mark = mark;
    e.line = line;
    resolve_nodes(toks, first, n, e.nodes);
    (is_tet ? raw.tets : raw.tris).push_back(std::move(e));
  };

  while (c.next()) {
    const std::string section = c.line();
    if (section == "$Entities" && v41) {
      auto hdr = c.fields();
      c.must_next("entity counts");
      auto counts = c.fields();
      if (counts.size() < 4) c.fail("malformed $Entities header");
      const long np = c.to_long(counts[0]), nc = c.to_long(counts[1]);
      const long ns = c.to_long(counts[2]), nv = c.to_long(counts[3]);
      (void)hdr;
      for (long i = 0; i < np; ++i) {
        c.must_next("point entity");
        auto t = c.fields();
        if (t.size() < 5) c.fail("malformed point entity");
        const long nphys = c.to_long(t[4]);
        if (nphys > 0 && static_cast<long>(t.size()) >= 5 + 1)
          phys[{0, c.to_long(t[0])}] = static_cast<int>(c.to_long(t[5]));
      }
      auto bounded_entity = [&](int dim) {
        c.must_next("entity");
        auto t = c.fields();
        if (t.size() < 8) c.fail("malformed entity record");
        const long nphys = c.to_long(t[7]);
        if (nphys > 0 && static_cast<long>(t.size()) >= 8 + 1)
          phys[{dim, c.to_long(t[0])}] = static_cast<int>(c.to_long(t[8]));
      };
      for (long i = 0; i < nc; ++i) bounded_entity(1);
      for (long i = 0; i < ns; ++i) bounded_entity(2);
      for (long i = 0; i < nv; ++i) bounded_entity(3);
      c.must_next("$EndEntities");
      if (c.line() != "$EndEntities") c.fail("expected $EndEntities");
    } else if (section == "$Nodes") {
      seen_nodes = true;
      if (v41) {
        c.must_next("node counts");
        auto hdr = c.fields();
        if (hdr.size() < 4) c.fail("malformed $Nodes header");
        const long nblocks = c.to_long(hdr[0]);
        for (long b = 0; b < nblocks; ++b) {
          c.must_next("node block header");
          auto bh = c.fields();
          if (bh.size() < 4) c.fail("malformed node block header");
          const long n = c.to_long(bh[3]);
          std::vector<long> tags(n);
          for (long k = 0; k < n; ++k) {
            c.must_next("node tag");
            tags[k] = c.to_long(c.fields()[0]);
          }
          for (long k = 0; k < n; ++k) {
            c.must_next("node coordinates");
            auto t = c.fields();
            if (t.size() < 3) c.fail("malformed node coordinates");
            if (!tag_to_index.emplace(tags[k], static_cast<int>(raw.coords.size())).second)
              c.fail("duplicate node tag " + std::to_string(tags[k]));
            raw.coords.emplace_back(c.to_double(t[0]), c.to_double(t[1]), c.to_double(t[2]));
            node_tag_line.push_back(c.line_no());
          }
        }
      } else {
        c.must_next("node count");
        const long n = c.to_long(c.fields()[0]);
        for (long k = 0; k < n; ++k) {
          c.must_next("node record");
          auto t = c.fields();
          if (t.size() < 4) c.fail("malformed node record");
          const long tag = c.to_long(t[0]);
          if (!tag_to_index.emplace(tag, static_cast<int>(raw.coords.size())).second)
            c.fail("duplicate node tag " + std::to_string(tag));
          raw.coords.emplace_back(c.to_double(t[1]), c.to_double(t[2]), c.to_double(t[3]));
          node_tag_line.push_back(c.line_no());
        }
      }
      c.must_next("$EndNodes");
      if (c.line() != "$EndNodes") c.fail("expected $EndNodes");
    } else if (section == "$Elements") {
      seen_elems = true;
      if (!seen_nodes) c.fail("$Elements before $Nodes");
      if (v41) {
        c.must_next("element counts");
        auto hdr = c.fields();
        if (hdr.size() < 4) c.fail("malformed $Elements header");
        const long nblocks = c.to_long(hdr[0]);
        for (long b = 0; b < nblocks; ++b) {
          c.must_next("element block header");
          auto bh = c.fields();
          if (bh.size() < 4) c.fail("malformed element block header");
          const int dim = static_cast<int>(c.to_long(bh[0]));
          const long entity = c.to_long(bh[1]);
          const int type = static_cast<int>(c.to_long(bh[2]));
          const long n = c.to_long(bh[3]);
          auto it = phys.find({dim, entity});
          const int mark = it != phys.end() ? it->second : static_cast<int>(entity);
          for (long k = 0; k < n; ++k) {
            c.must_next("element record");
            auto t = c.fields();
            if (t.empty()) c.fail("malformed element record");
            classify_elem(type, c.line_no(), t, 1, mark);
          }
        }
      } else {
        c.must_next("element count");
        const long n = c.to_long(c.fields()[0]);
        for (long k = 0; k < n; ++k) {
          c.must_next("element record");
          auto t = c.fields();
          if (t.size() < 3) c.fail("malformed element record");
          const int type = static_cast<int>(c.to_long(t[1]));
          const long ntags = c.to_long(t[2]);
          if (static_cast<long>(t.size()) < 3 + ntags) c.fail("malformed element tags");
          int mark = 0;
          if (ntags >= 1) mark = static_cast<int>(c.to_long(t[3]));
          if (mark == 0 && ntags >= 2) mark = static_cast<int>(c.to_long(t[4]));
          classify_elem(type, c.line_no(), t, 3 + ntags, mark);
        }
      }
      c.must_next("$EndElements");
      if (c.line() != "$EndElements") c.fail("expected $EndElements");
    } else if (!section.empty() && section[0] == '$') {
      c.skip_section(section);
    } else {
      c.fail("unexpected content outside a section");
    }
  }
  if (!seen_nodes) throw ParseError(path, 0, "file has no $Nodes section");
  if (!seen_elems) throw ParseError(path, 0, "file has no $Elements section");
  if (raw.tets.empty()) throw ParseError(path, 0, "file contains no tetrahedra");

  // every node must take part in the mesh; strays would pollute the bounding box
  std::vector<char> used(raw.coords.size(), 0);
  for (const auto* bucket : {&raw.tris, &raw.tets})
    for (const auto& e : *bucket)
      for (int idx : e.nodes) used[idx] = 1;
  for (std::size_t i = 0; i < used.size(); ++i)
    if (!used[i])
      throw ParseError(path, node_tag_line[i], "node is not referenced by any element");
  return raw;
}

}  // namespace

LinearMesh read_linear_mesh(const std::string& path) {
  RawMesh raw = parse_msh(path, /*linear_only=*/true);
  LinearMesh mesh;
  mesh.vertices = std::move(raw.coords);
  mesh.tets.reserve(raw.tets.size());
  for (const auto& e : raw.tets) mesh.tets.push_back({e.nodes[0], e.nodes[1], e.nodes[2], e.nodes[3]});
  mesh.boundary.reserve(raw.tris.size());
  for (const auto& e : raw.tris)
    mesh.boundary.push_back({{e.nodes[0], e.nodes[1], e.nodes[2]}, e.mark});
  validate(mesh);
  return mesh;
}

HighOrderMesh read_curved_mesh(const std::string& path) {
  RawMesh raw = parse_msh(path, /*linear_only=*/false);

  bool is_tet = false;
  const int degree = shape_degree(raw.tets.front().type, is_tet);
  for (const auto& e : raw.tets)
    if (e.type != raw.tets.front().type)
      throw ParseError(path, e.line, "mixed tetrahedron degrees in one file");
  for (const auto& e : raw.tris) {
    bool tri_is_tet = false;
    if (shape_degree(e.type, tri_is_tet) != degree)
      throw ParseError(path, e.line, "boundary triangle degree differs from the tetrahedra");
  }

  if (degree == 1) {
    LinearMesh lin;
    lin.vertices = std::move(raw.coords);
    for (const auto& e : raw.tets) lin.tets.push_back({e.nodes[0], e.nodes[1], e.nodes[2], e.nodes[3]});
    for (const auto& e : raw.tris) lin.boundary.push_back({{e.nodes[0], e.nodes[1], e.nodes[2]}, e.mark});
    validate(lin);
    return from_linear(lin);
  }

  // corner nodes define the straight reference configuration; the writer
  // numbers them before all high-order nodes, and readers rely on that
  int max_corner = -1;
  for (const auto& e : raw.tets) max_corner = std::max({max_corner, e.nodes[0], e.nodes[1], e.nodes[2], e.nodes[3]});
  const int nv = max_corner + 1;
  std::vector<char> is_corner(raw.coords.size(), 0);
  for (const auto& e : raw.tets)
    for (int k = 0; k < 4; ++k) is_corner[e.nodes[k]] = 1;
  for (int i = 0; i < nv; ++i)
    if (!is_corner[i])
      throw ParseError(path, 0, "corner nodes must be numbered before high-order nodes");

  LinearMesh lin;
  lin.vertices.assign(raw.coords.begin(), raw.coords.begin() + nv);
  for (const auto& e : raw.tets) lin.tets.push_back({e.nodes[0], e.nodes[1], e.nodes[2], e.nodes[3]});
  for (const auto& e : raw.tris) lin.boundary.push_back({{e.nodes[0], e.nodes[1], e.nodes[2]}, e.mark});
  validate(lin);

  HighOrderMesh mesh;
  mesh.degree = degree;
  mesh.nodes = std::move(raw.coords);
  mesh.initial_vertices = lin.vertices;
  mesh.vertex_count = nv;
  mesh.ell_c = characteristic_length(lin);
  mesh.elems.reserve(raw.tets.size());
  for (auto& e : raw.tets) mesh.elems.push_back(std::move(e.nodes));

  // recover the adjacent tet of each boundary triangle from its corner triple
  std::map<std::array<int, 3>, int> face_owner;
  for (int t = 0; t < static_cast<int>(mesh.elems.size()); ++t)
    for (const auto& f : kTetFaces) {
      std::array<int, 3> key{mesh.elems[t][f[0]], mesh.elems[t][f[1]], mesh.elems[t][f[2]]};
      std::sort(key.begin(), key.end());
      face_owner[key] = t;
    }
  mesh.boundary.reserve(raw.tris.size());
  for (auto& e : raw.tris) {
    std::array<int, 3> key{e.nodes[0], e.nodes[1], e.nodes[2]};
    std::sort(key.begin(), key.end());
    auto it = face_owner.find(key);
    if (it == face_owner.end())
      throw ParseError(path, e.line, "boundary triangle does not match any tetrahedron face");
    HighOrderMesh::BFace f;
    f.nodes = std::move(e.nodes);
    f.mark = e.mark;
    f.adjacent_elem = it->second;
    mesh.boundary.push_back(std::move(f));
  }
  return mesh;
}

void write_curved_mesh(const HighOrderMesh& mesh, const std::string& path,
                       const BoundaryClassification* classification) {
  const int q = mesh.degree;
  const int tet_type = tet_type_for_degree(q);
  const int tri_type = tri_type_for_degree(q);

  std::set<int> marks;
  for (const auto& f : mesh.boundary) marks.insert(f.mark);
  const int class_base = (marks.empty() ? 0 : *marks.rbegin()) + 1;
  auto class_tag = [&](int mark) {
    switch (classification->classify(mark)) {
      case BoundaryClassification::Class::Wall: return class_base;
      case BoundaryClassification::Class::Symmetry: return class_base + 1;
      case BoundaryClassification::Class::Farfield: return class_base + 2;
    }
    return class_base;
  };

  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path);
  out << "$MeshFormat\n4.1 0 8\n$EndMeshFormat\n";

  out << "$PhysicalNames\n" << marks.size() + (classification ? 3 : 0) << "\n";
  for (int m : marks) out << "2 " << m << " \"mark_" << m << "\"\n";
  if (classification) {
    out << "2 " << class_base << " \"wall\"\n";
    out << "2 " << class_base + 1 << " \"symmetry\"\n";
    out << "2 " << class_base + 2 << " \"farfield\"\n";
  }
  out << "$EndPhysicalNames\n";

  // per-mark bounding boxes for the entity records
  std::map<int, std::pair<Vec3, Vec3>> mark_box;
  auto grow = [](std::pair<Vec3, Vec3>& box, const Vec3& x) {
    box.first = box.first.cwiseMin(x);
    box.second = box.second.cwiseMax(x);
  };
  for (const auto& f : mesh.boundary) {
    auto [it, fresh] = mark_box.try_emplace(f.mark, mesh.nodes[f.nodes[0]], mesh.nodes[f.nodes[0]]);
    for (int nid : f.nodes) grow(it->second, mesh.nodes[nid]);
  }
  std::pair<Vec3, Vec3> all{mesh.nodes.front(), mesh.nodes.front()};
  for (const auto& x : mesh.nodes) grow(all, x);
  auto put_box = [&](const std::pair<Vec3, Vec3>& b) {
    for (int k = 0; k < 3; ++k) out << format_double(b.first[k]) << " ";
    for (int k = 0; k < 3; ++k) out << format_double(b.second[k]) << " ";
  };

  out << "$Entities\n0 0 " << marks.size() << " 1\n";
  for (int m : marks) {
    out << m << " ";
    put_box(mark_box.at(m));
    if (classification)
      out << "2 " << m << " " << class_tag(m);
    else
      out << "1 " << m;
    out << " 0\n";
  }
  out << "1 ";
  put_box(all);
  out << "0 0\n$EndEntities\n";

  const std::size_t nn = mesh.nodes.size();
  out << "$Nodes\n1 " << nn << " 1 " << nn << "\n";
  out << "3 1 0 " << nn << "\n";
  for (std::size_t i = 0; i < nn; ++i) out << i + 1 << "\n";
  for (const auto& x : mesh.nodes)
    out << format_double(x.x()) << " " << format_double(x.y()) << " " << format_double(x.z()) << "\n";
  out << "$EndNodes\n";

  // boundary triangles in stored order (one block per run of equal marks,
  // so an unsorted boundary keeps its order through a round trip), then tets
  std::vector<std::pair<int, long>> runs;  // mark, count
  for (const auto& f : mesh.boundary) {
    if (runs.empty() || runs.back().first != f.mark) runs.push_back({f.mark, 0});
    ++runs.back().second;
  }
  const long total = static_cast<long>(mesh.boundary.size() + mesh.elems.size());
  out << "$Elements\n" << runs.size() + 1 << " " << total << " 1 " << total << "\n";
  long tag = 1;
  std::size_t fi = 0;
  for (const auto& [mark, count] : runs) {
    out << "2 " << mark << " " << tri_type << " " << count << "\n";
    for (long k = 0; k < count; ++k, ++fi) {
      out << tag++;
      for (int nid : mesh.boundary[fi].nodes) out << " " << nid + 1;
      out << "\n";
    }
  }
  out << "3 1 " << tet_type << " " << mesh.elems.size() << "\n";
  for (const auto& elem : mesh.elems) {
    out << tag++;
    for (int nid : elem) out << " " << nid + 1;
    out << "\n";
  }
  out << "$EndElements\n";
  if (!out) throw Error("write failed for " + path);
}

}  // namespace hocurve
