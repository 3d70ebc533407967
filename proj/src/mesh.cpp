#include "hocurve/mesh.hpp"

#include <algorithm>
#include <map>
#include <set>

namespace hocurve {

namespace {

Mat3 linear_jacobian(const Vec3& a, const Vec3& b, const Vec3& c, const Vec3& d) {
  Mat3 J;
  J.col(0) = b - a;
  J.col(1) = c - a;
  J.col(2) = d - a;
  return J;
}

std::array<int, 3> sorted3(std::array<int, 3> f) {
  std::sort(f.begin(), f.end());
  return f;
}

// Position of a face-interior lattice node among the face's interior nodes,
// keyed by the weights (s, t) on the 2nd and 3rd sorted-face vertex.
int face_lattice_index(int degree, int s, int t) {
  return (s - 1) * (degree - 1) - s * (s - 1) / 2 + (t - 1);
}

int edge_interior_count(int degree) { return degree - 1; }
int face_interior_count(int degree) { return (degree - 1) * (degree - 2) / 2; }
int cell_interior_count(int degree) { return (degree - 1) * (degree - 2) * (degree - 3) / 6; }

// Global node numbering for a given degree over fixed linear connectivity:
// vertices, then edge entities (sorted pairs, ascending), then face entities
// (sorted triples, ascending), then per-element interiors.
struct EntityNumbering {
  int degree;
  int nv;
  std::map<std::array<int, 2>, int> edge_id;
  std::map<std::array<int, 3>, int> face_id;
  int edge_base, face_base, interior_base, interior_per_elem;

  EntityNumbering(int degree_, int nv_, const std::vector<std::vector<int>>& elems) : degree(degree_), nv(nv_) {
    for (const auto& el : elems) {
      for (const auto& e : kTetEdges) {
        std::array<int, 2> key{el[e[0]], el[e[1]]};
        if (key[0] > key[1]) std::swap(key[0], key[1]);
        edge_id.emplace(key, 0);
      }
      for (const auto& f : kTetFaces) face_id.emplace(sorted3({el[f[0]], el[f[1]], el[f[2]]}), 0);
    }
    int c = 0;
    for (auto& [k, v] : edge_id) v = c++;
    c = 0;
    for (auto& [k, v] : face_id) v = c++;
    edge_base = nv;
    face_base = edge_base + static_cast<int>(edge_id.size()) * edge_interior_count(degree);
    interior_base = face_base + static_cast<int>(face_id.size()) * face_interior_count(degree);
    interior_per_elem = cell_interior_count(degree);
  }

  int total(int nelems) const { return interior_base + nelems * interior_per_elem; }

  int edge_node(int gu, int gv, int weight_on_v) const {
    // weight_on_v = lattice weight on vertex gv; canonical direction runs
    // from the smaller to the larger global id
    int u = gu, v = gv, j = weight_on_v;
    if (u > v) {
      std::swap(u, v);
      j = degree - j;
    }
    return edge_base + edge_id.at({u, v}) * edge_interior_count(degree) + (j - 1);
  }

  int face_node(std::array<int, 3> g, std::array<int, 3> w) const {
    // g: global vertex ids of the face corners, w: lattice weights on them
    for (int a = 0; a < 3; ++a)
      for (int b = a + 1; b < 3; ++b)
        if (g[a] > g[b]) {
          std::swap(g[a], g[b]);
          std::swap(w[a], w[b]);
        }
    return face_base + face_id.at(g) * face_interior_count(degree) + face_lattice_index(degree, w[1], w[2]);
  }
};

// Fills the canonical node-id list of one tet at the numbering's degree.
std::vector<int> tet_connectivity(const EntityNumbering& num, const ReferenceSimplex& ref,
                                  const std::array<int, 4>& gv, int elem_index) {
  std::vector<int> ids(ref.node_count);
  int interior_seen = 0;
  for (int i = 0; i < ref.node_count; ++i) {
    const auto& mi = ref.multi_index[i];
    int support[4], ns = 0;
    for (int k = 0; k < 4; ++k)
      if (mi[k] > 0) support[ns++] = k;
    if (ns == 1) {
      ids[i] = gv[support[0]];
    } else if (ns == 2) {
      ids[i] = num.edge_node(gv[support[0]], gv[support[1]], mi[support[1]]);
    } else if (ns == 3) {
      ids[i] = num.face_node({gv[support[0]], gv[support[1]], gv[support[2]]},
                             {mi[support[0]], mi[support[1]], mi[support[2]]});
    } else {
      ids[i] = num.interior_base + elem_index * num.interior_per_elem + interior_seen++;
    }
  }
  return ids;
}

std::vector<int> tri_connectivity(const EntityNumbering& num, const ReferenceSimplex& tri,
                                  const std::array<int, 3>& gv) {
  std::vector<int> ids(tri.node_count);
  for (int i = 0; i < tri.node_count; ++i) {
    const auto& mi = tri.multi_index[i];
    int support[3], ns = 0;
    for (int k = 0; k < 3; ++k)
      if (mi[k] > 0) support[ns++] = k;
    if (ns == 1) {
      ids[i] = gv[support[0]];
    } else if (ns == 2) {
      ids[i] = num.edge_node(gv[support[0]], gv[support[1]], mi[support[1]]);
    } else {
      ids[i] = num.face_node({gv[0], gv[1], gv[2]}, {mi[0], mi[1], mi[2]});
    }
  }
  return ids;
}

}  // namespace

void validate(const LinearMesh& mesh) {
  const int nv = static_cast<int>(mesh.vertices.size());
  if (mesh.tets.empty()) throw InvalidInputError("mesh has no tetrahedra");
  for (std::size_t e = 0; e < mesh.tets.size(); ++e) {
    for (int v : mesh.tets[e])
      if (v < 0 || v >= nv)
        throw InvalidInputError("tet " + std::to_string(e) + " references vertex " + std::to_string(v) +
                                " out of range");
    const auto& t = mesh.tets[e];
    double det = linear_jacobian(mesh.vertices[t[0]], mesh.vertices[t[1]], mesh.vertices[t[2]],
                                 mesh.vertices[t[3]])
                     .determinant();
    if (!(det > 0.0))
      throw InvalidInputError("tet " + std::to_string(e) + " is degenerate or negatively oriented (det=" +
                              std::to_string(det) + ")");
  }
  std::map<std::array<int, 3>, int> face_count;
  for (const auto& t : mesh.tets)
    for (const auto& f : kTetFaces) face_count[sorted3({t[f[0]], t[f[1]], t[f[2]]})]++;
  std::set<std::array<int, 3>> seen;
  for (std::size_t b = 0; b < mesh.boundary.size(); ++b) {
    const auto& f = mesh.boundary[b];
    if (f.mark < 0) throw InvalidInputError("boundary face " + std::to_string(b) + " has negative mark");
    for (int v : f.v)
      if (v < 0 || v >= nv) throw InvalidInputError("boundary face " + std::to_string(b) + " vertex out of range");
    auto key = sorted3(f.v);
    auto it = face_count.find(key);
    if (it == face_count.end())
      throw InvalidInputError("boundary face " + std::to_string(b) + " is not a face of any tetrahedron");
    if (it->second != 1)
      throw InvalidInputError("boundary face " + std::to_string(b) + " is shared by " +
                              std::to_string(it->second) + " tetrahedra");
    if (!seen.insert(key).second)
      throw InvalidInputError("boundary face " + std::to_string(b) + " listed twice");
  }
  for (const auto& [key, count] : face_count)
    if (count == 1 && !seen.count(key))
      throw InvalidInputError("unmarked boundary face (" + std::to_string(key[0]) + " " +
                              std::to_string(key[1]) + " " + std::to_string(key[2]) + ")");
}

double characteristic_length(const LinearMesh& mesh) {
  Vec3 lo = Vec3::Constant(std::numeric_limits<double>::infinity());
  Vec3 hi = -lo;
  for (const auto& v : mesh.vertices) {
    lo = lo.cwiseMin(v);
    hi = hi.cwiseMax(v);
  }
  return (hi - lo).norm();
}

const ReferenceSimplex& shared_reference(int dim, int degree) {
  static const auto cache = [] {
    std::map<std::pair<int, int>, ReferenceSimplex> m;
    for (int d = 2; d <= 3; ++d)
      for (int q = 1; q <= 4; ++q) m.emplace(std::make_pair(d, q), build_reference(d, q));
    return m;
  }();
  auto it = cache.find({dim, degree});
  if (it == cache.end()) {
    build_reference(dim, degree);  // raises the precise error
    throw UnsupportedDegreeError("degree out of range");
  }
  return it->second;
}

HighOrderMesh from_linear(const LinearMesh& mesh) {
  validate(mesh);
  HighOrderMesh ho;
  ho.degree = 1;
  ho.nodes = mesh.vertices;
  ho.initial_vertices = mesh.vertices;
  ho.vertex_count = static_cast<int>(mesh.vertices.size());
  ho.ell_c = characteristic_length(mesh);
  ho.elems.reserve(mesh.tets.size());
  for (const auto& t : mesh.tets) ho.elems.push_back({t[0], t[1], t[2], t[3]});
  std::map<std::array<int, 3>, int> owner;
  for (std::size_t e = 0; e < mesh.tets.size(); ++e) {
    const auto& t = mesh.tets[e];
    for (const auto& f : kTetFaces) {
      auto key = sorted3({t[f[0]], t[f[1]], t[f[2]]});
      auto it = owner.find(key);
      owner[key] = (it == owner.end()) ? static_cast<int>(e) : -1;
    }
  }
  for (const auto& f : mesh.boundary) {
    HighOrderMesh::BFace bf;
    bf.nodes = {f.v[0], f.v[1], f.v[2]};
    bf.mark = f.mark;
    bf.adjacent_elem = owner.at(sorted3(f.v));
    ho.boundary.push_back(std::move(bf));
  }
  return ho;
}

HighOrderMesh elevate_degree(const HighOrderMesh& mesh) {
  const int p = mesh.degree + 1;
  if (p > 4) throw UnsupportedDegreeError("degree elevation beyond 4 is not supported");
  const ReferenceSimplex& old_ref = shared_reference(3, mesh.degree);
  const ReferenceSimplex& new_ref = shared_reference(3, p);
  const ReferenceSimplex& new_tri = shared_reference(2, p);

  HighOrderMesh out;
  out.degree = p;
  out.initial_vertices = mesh.initial_vertices;
  out.vertex_count = mesh.vertex_count;
  out.ell_c = mesh.ell_c;

  EntityNumbering num(p, mesh.vertex_count, mesh.elems);
  out.nodes.assign(num.total(static_cast<int>(mesh.elems.size())), Vec3::Zero());
  std::vector<char> filled(out.nodes.size(), 0);

  // tabulate the old basis at the new lattice once
  TabulatedBasis tab = tabulate_basis(old_ref, new_ref.nodes_bary);

  out.elems.resize(mesh.elems.size());
  for (std::size_t e = 0; e < mesh.elems.size(); ++e) {
    std::array<int, 4> gv{mesh.elems[e][0], mesh.elems[e][1], mesh.elems[e][2], mesh.elems[e][3]};
    out.elems[e] = tet_connectivity(num, new_ref, gv, static_cast<int>(e));
    for (int i = 0; i < new_ref.node_count; ++i) {
      int id = out.elems[e][i];
      if (filled[id]) continue;
      Vec3 x = Vec3::Zero();
      for (int j = 0; j < old_ref.node_count; ++j) x += tab.N(i, j) * mesh.nodes[mesh.elems[e][j]];
      out.nodes[id] = x;
      filled[id] = 1;
    }
  }
  out.boundary.reserve(mesh.boundary.size());
  for (const auto& bf : mesh.boundary) {
    HighOrderMesh::BFace nf;
    nf.mark = bf.mark;
    nf.adjacent_elem = bf.adjacent_elem;
    nf.nodes = tri_connectivity(num, new_tri, {bf.nodes[0], bf.nodes[1], bf.nodes[2]});
    out.boundary.push_back(std::move(nf));
  }
  return out;
}

Mat3 initial_jacobian(const HighOrderMesh& mesh, int elem) {
  const auto& el = mesh.elems[elem];
  return linear_jacobian(mesh.initial_vertices[el[0]], mesh.initial_vertices[el[1]],
                         mesh.initial_vertices[el[2]], mesh.initial_vertices[el[3]]);
}

Mat3 element_jacobian(const HighOrderMesh& mesh, int elem, const double* bary) {
  const ReferenceSimplex& ref = shared_reference(3, mesh.degree);
  Mat3 JI = initial_jacobian(mesh, elem);
  double det = JI.determinant();
  if (!(det > 0.0)) throw InvalidInputError("initial element " + std::to_string(elem) + " is degenerate");
  std::vector<double> vals(ref.node_count), grads(ref.node_count * 3);
  ref.eval(bary, vals.data(), grads.data());
  Mat3 JP = Mat3::Zero();
  const auto& el = mesh.elems[elem];
  for (int i = 0; i < ref.node_count; ++i) {
    const Vec3& x = mesh.nodes[el[i]];
    for (int a = 0; a < 3; ++a)
      for (int b = 0; b < 3; ++b) JP(a, b) += x[a] * grads[i * 3 + b];
  }
  return JP * JI.inverse();
}

Vec3 element_point(const HighOrderMesh& mesh, int elem, const double* bary) {
  const ReferenceSimplex& ref = shared_reference(3, mesh.degree);
  std::vector<double> vals(ref.node_count);
  ref.eval(bary, vals.data(), nullptr);
  Vec3 x = Vec3::Zero();
  for (int i = 0; i < ref.node_count; ++i) x += vals[i] * mesh.nodes[mesh.elems[elem][i]];
  return x;
}

Vec3 face_point(const HighOrderMesh& mesh, const HighOrderMesh::BFace& face, const double* bary) {
  const ReferenceSimplex& tri = shared_reference(2, mesh.degree);
  std::vector<double> vals(tri.node_count);
  tri.eval(bary, vals.data(), nullptr);
  Vec3 x = Vec3::Zero();
  for (int i = 0; i < tri.node_count; ++i) x += vals[i] * mesh.nodes[face.nodes[i]];
  return x;
}

BoundaryClassification::Class BoundaryClassification::classify(int mark) const {
  auto has = [mark](const std::vector<int>& v) { return std::find(v.begin(), v.end(), mark) != v.end(); };
  if (has(wall)) return Class::Wall;
  if (has(symmetry)) return Class::Symmetry;
  if (has(farfield)) return Class::Farfield;
  throw LookupError("mark " + std::to_string(mark) + " missing from boundary classification");
}

void BoundaryClassification::validate_against(const HighOrderMesh& mesh) const {
  std::set<int> all;
  for (const auto* v : {&wall, &symmetry, &farfield})
    for (int m : *v)
      if (!all.insert(m).second)
        throw InvalidInputError("mark " + std::to_string(m) + " appears in two classification classes");
  for (const auto& f : mesh.boundary)
    if (!all.count(f.mark)) throw LookupError("mesh mark " + std::to_string(f.mark) + " is not classified");
}

}  // namespace hocurve
