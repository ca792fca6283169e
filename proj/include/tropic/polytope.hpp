// Polytopes with exact rational vertices: facet and face enumeration by
// brute-force hyperplane search (desk scale: rank <= 6, a few dozen points),
// lattice point enumeration, normalized volumes, reflexivity. Lattice
// polytopes are the Vec-vertex special case; dual cells of the tropical
// machinery arrive with rational vertices.
#pragma once

#include <algorithm>
#include <map>
#include <set>
#include <vector>

#include "tropic/linalg.hpp"

namespace tropic {

// Inequality <normal, x> >= offset with primitive integer normal.
struct Halfspace {
  Vec normal;
  Rat offset;
  bool operator==(const Halfspace& o) const { return normal == o.normal && offset == o.offset; }
  bool operator<(const Halfspace& o) const {
    if (normal != o.normal) return normal < o.normal;
    return offset < o.offset;
  }
};

struct Polytope {
  std::vector<QVec> verts;            // irredundant, sorted
  std::vector<Halfspace> facets;      // facet inequalities of the affine hull piece
  std::vector<Halfspace> span_eqs;    // equalities cutting out the affine hull
  int dim = -1;                       // affine dimension; -1 = empty
  Lattice tag = Lattice::N;

  int rank() const { return verts.empty() ? 0 : verts[0].rank(); }
  bool empty() const { return verts.empty(); }
  bool is_lattice() const {
    for (const auto& v : verts)
      for (const auto& e : v.x)
        if (e.get_den() != 1) return false;
    return true;
  }
  std::vector<Vec> lattice_verts() const {
    std::vector<Vec> out;
    for (const auto& v : verts) {
      Vec w(std::vector<Int>(v.rank()), tag);
      for (int i = 0; i < v.rank(); ++i) w.x[i] = Int(v.x[i]);
      out.push_back(std::move(w));
    }
    return out;
  }
  bool contains(const QVec& p) const {
    for (const auto& h : span_eqs)
      if (dot(h.normal, p) != h.offset) return false;
    for (const auto& h : facets)
      if (dot(h.normal, p) < h.offset) return false;
    return true;
  }
  bool strictly_contains(const QVec& p) const {  // relative interior
    for (const auto& h : span_eqs)
      if (dot(h.normal, p) != h.offset) return false;
    for (const auto& h : facets)
      if (dot(h.normal, p) <= h.offset) return false;
    return true;
  }
  QVec barycenter() const {
    QVec b(rank(), tag);
    for (const auto& v : verts) b = b + v;
    return b * Rat(1, static_cast<long>(verts.size()));
  }
  bool operator==(const Polytope& o) const { return verts == o.verts; }
};

namespace detail {

inline QVec to_qvec(const Vec& v) { return QVec(v); }

// Primitive integer normal of the hyperplane through the given affinely
// independent points inside the affine subspace spanned by `dirs` (directions
// of the polytope's hull). Returns nullopt when the points do not span a
// hyperplane of that subspace.
inline std::optional<std::pair<Vec, Rat>> hyperplane_through(
    const std::vector<QVec>& pts, const std::vector<QRow>& hull_kernel, int rank) {
  // normal a satisfies <a, p_i - p_0> = 0 plus the hull's own equalities are
  // quotiented out by adding them as extra constraints on a? No: we want a
  // within the dual of the hull directions; enforce <a, k> = 0 for nothing --
  // instead require a orthogonal to nothing and quotient later. Simplest:
  // solve <a, p_i - p_0> = 0 and <a, d> = 0 for d in a basis complementary to
  // the hull: we instead ask a to be orthogonal to the hull's orthogonal
  // complement, i.e. a lies in span of hull directions' dual... For facet use
  // we only need SOME normal whose restriction to the hull cuts the facet;
  // normals differing by hull-equalities give the same restriction. To make
  // them canonical we additionally force <a, k> = 0 for each kernel direction
  // k of the hull's direction span.
  QMat sys;
  for (size_t i = 1; i < pts.size(); ++i) {
    QRow row(rank);
    for (int j = 0; j < rank; ++j) row[j] = pts[i].x[j] - pts[0].x[j];
    sys.push_back(std::move(row));
  }
  for (const QRow& k : hull_kernel) sys.push_back(k);
  std::vector<QRow> ker = qmat_kernel(sys);
  if (ker.size() != 1) return std::nullopt;
  Int lcm_d = 1;
  for (const Rat& e : ker[0]) lcm_d = lcm(lcm_d, e.get_den());
  Vec a(std::vector<Int>(rank), Lattice::M);
  for (int j = 0; j < rank; ++j) a.x[j] = Int(ker[0][j] * Rat(lcm_d));
  a = primitive_part(a);
  Rat b = dot(a, pts[0]);
  return std::make_pair(a, b);
}

}  // namespace detail

// Build a polytope from an arbitrary rational point list: dedupes, computes
// facets and the irredundant vertex set.
inline Polytope make_polytope(std::vector<QVec> pts, Lattice tag = Lattice::N) {
  Polytope p;
  p.tag = tag;
  if (pts.empty()) return p;
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  int rank = pts[0].rank();

  // direction span of the affine hull
  QMat dirs;
  for (size_t i = 1; i < pts.size(); ++i) {
    QRow row(rank);
    for (int j = 0; j < rank; ++j) row[j] = pts[i].x[j] - pts[0].x[j];
    dirs.push_back(std::move(row));
  }
  std::vector<QRow> hull_kernel = qmat_kernel(dirs.empty() ? QMat{QRow(rank, Rat(0))} : dirs);
  p.dim = rank - static_cast<int>(hull_kernel.size());
  // hull equalities (canonical primitive normals from the kernel directions)
  for (const QRow& k : hull_kernel) {
    Int lcm_d = 1;
    for (const Rat& e : k) lcm_d = lcm(lcm_d, e.get_den());
    Vec a(std::vector<Int>(rank), Lattice::M);
    for (int j = 0; j < rank; ++j) a.x[j] = Int(k[j] * Rat(lcm_d));
    a = primitive_part(a);
    p.span_eqs.push_back({a, dot(a, pts[0])});
  }

  if (p.dim == 0) {
    p.verts = {pts[0]};
    return p;
  }

  // facet enumeration: hyperplanes through dim-subsets with all points on one
  // side. Collect inequalities oriented inward.
  std::set<Halfspace> facet_set;
  int npts = static_cast<int>(pts.size());
  // iterate over all dim-subsets via std::prev_permutation on the mask
  std::vector<bool> mask(npts, false);
  std::fill(mask.begin(), mask.begin() + p.dim, true);
  do {
    std::vector<QVec> sub;
    for (int i = 0; i < npts; ++i)
      if (mask[i]) sub.push_back(pts[i]);
    auto h = detail::hyperplane_through(sub, hull_kernel, rank);
    if (!h) continue;
    auto [a, b] = *h;
    int lo = 0, hi = 0;
    for (const QVec& q : pts) {
      int s = cmp(dot(a, q), b);
      if (s < 0) ++lo;
      if (s > 0) ++hi;
    }
    if (lo && hi) continue;  // not supporting
    if (lo) { a = -a; b = -b; }  // flip to inward
    facet_set.insert({a, b});
  } while (std::prev_permutation(mask.begin(), mask.end()));
  p.facets.assign(facet_set.begin(), facet_set.end());

  // vertices: points whose active facet normals span the full direction space
  for (const QVec& q : pts) {
    QMat active;
    for (const auto& h : p.facets)
      if (dot(h.normal, q) == h.offset) {
        QRow row(rank);
        for (int j = 0; j < rank; ++j) row[j] = Rat(h.normal.x[j]);
        active.push_back(std::move(row));
      }
    for (const auto& h : p.span_eqs) {
      QRow row(rank);
      for (int j = 0; j < rank; ++j) row[j] = Rat(h.normal.x[j]);
      active.push_back(std::move(row));
    }
    if (!active.empty() && qmat_rank(active) == rank) p.verts.push_back(q);
  }
  return p;
}

inline Polytope make_polytope(const std::vector<Vec>& pts, Lattice tag = Lattice::N) {
  std::vector<QVec> q;
  q.reserve(pts.size());
  for (const Vec& v : pts) q.emplace_back(v);
  return make_polytope(std::move(q), tag);
}

// All faces as vertex-index subsets (including the polytope itself, excluding
// the empty face), via intersection closure of facet vertex sets.
inline std::vector<std::vector<int>> face_vertex_sets(const Polytope& p) {
  int nv = static_cast<int>(p.verts.size());
  std::vector<std::set<int>> facet_sets;
  for (const auto& h : p.facets) {
    std::set<int> s;
    for (int i = 0; i < nv; ++i)
      if (dot(h.normal, p.verts[i]) == h.offset) s.insert(i);
    facet_sets.push_back(std::move(s));
  }
  std::set<std::set<int>> faces;
  std::set<int> all;
  for (int i = 0; i < nv; ++i) all.insert(i);
  faces.insert(all);
  std::vector<std::set<int>> frontier = {all};
  while (!frontier.empty()) {
    std::vector<std::set<int>> next;
    for (const auto& f : frontier)
      for (const auto& fs : facet_sets) {
        std::set<int> inter;
        std::set_intersection(f.begin(), f.end(), fs.begin(), fs.end(),
                              std::inserter(inter, inter.begin()));
        if (inter.empty() || inter == f) continue;
        if (faces.insert(inter).second) next.push_back(inter);
      }
    frontier = std::move(next);
  }
  std::vector<std::vector<int>> out;
  for (const auto& f : faces) out.emplace_back(f.begin(), f.end());
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
    return a.size() != b.size() ? a.size() < b.size() : a < b;
  });
  return out;
}

// Integer points of a lattice-bounded rational polytope (brute force over the
// bounding box).
inline std::vector<Vec> lattice_points(const Polytope& p, bool interior_only = false) {
  std::vector<Vec> out;
  if (p.empty()) return out;
  int rank = p.rank();
  std::vector<long> lo(rank), hi(rank);
  for (int j = 0; j < rank; ++j) {
    Rat mn = p.verts[0].x[j], mx = mn;
    for (const auto& v : p.verts) {
      mn = std::min(mn, v.x[j]);
      mx = std::max(mx, v.x[j]);
    }
    mpz_class fl, ce;
    mpz_fdiv_q(fl.get_mpz_t(), mn.get_num().get_mpz_t(), mn.get_den().get_mpz_t());
    mpz_cdiv_q(ce.get_mpz_t(), mx.get_num().get_mpz_t(), mx.get_den().get_mpz_t());
    lo[j] = fl.get_si();
    hi[j] = ce.get_si();
  }
  std::vector<long> cur = lo;
  while (true) {
    QVec q(rank, p.tag);
    Vec v(std::vector<Int>(rank), p.tag);
    for (int j = 0; j < rank; ++j) {
      q.x[j] = Rat(cur[j]);
      v.x[j] = cur[j];
    }
    if (interior_only ? p.strictly_contains(q) : p.contains(q)) out.push_back(v);
    int j = 0;
    while (j < rank && cur[j] == hi[j]) cur[j++] = lo[j];
    if (j == rank) break;
    ++cur[j];
  }
  std::sort(out.begin(), out.end());
  return out;
}

namespace detail {

// Coordinates of points relative to pts[0] in a saturated basis of the span of
// their differences; output is full-dimensional of the face's dimension.
inline std::vector<QVec> saturated_affine_coords(const std::vector<QVec>& pts, Lattice tag) {
  int rank = pts[0].rank();
  std::vector<Vec> dirs;
  for (size_t i = 1; i < pts.size(); ++i) {
    QVec d = pts[i] - pts[0];
    Int lcm_d = 1;
    for (const Rat& e : d.x) lcm_d = lcm(lcm_d, e.get_den());
    Vec w(std::vector<Int>(rank), tag);
    for (int j = 0; j < rank; ++j) w.x[j] = Int(d.x[j] * Rat(lcm_d));
    if (!w.zero()) dirs.push_back(std::move(w));
  }
  std::vector<Vec> basis = saturated_span_basis(dirs, tag);
  int k = static_cast<int>(basis.size());
  std::vector<QVec> out;
  if (k == 0) {
    for (size_t i = 0; i < pts.size(); ++i) out.emplace_back(0, tag);
    return out;
  }
  QMat bt(rank, QRow(k));
  for (int j = 0; j < k; ++j)
    for (int i = 0; i < rank; ++i) bt[i][j] = Rat(basis[j].x[i]);
  for (const QVec& pt : pts) {
    QRow rhs(rank);
    for (int i = 0; i < rank; ++i) rhs[i] = pt.x[i] - pts[0].x[i];
    auto sol = qmat_solve(bt, rhs);
    QVec c(k, tag);
    for (int j = 0; j < k; ++j) c.x[j] = (*sol)[j];
    out.push_back(std::move(c));
  }
  return out;
}

inline Rat volume_fulldim(const std::vector<QVec>& verts, Lattice tag) {
  int k = verts.empty() ? 0 : verts[0].rank();
  if (verts.empty()) return 0;
  if (k == 0) return 1;  // point convention
  if (k == 1) {
    Rat mn = verts[0].x[0], mx = mn;
    for (const auto& v : verts) {
      mn = std::min(mn, v.x[0]);
      mx = std::max(mx, v.x[0]);
    }
    return mx - mn;
  }
  Polytope p = make_polytope(verts, tag);
  const QVec& apex = p.verts[0];
  Rat vol = 0;
  for (const auto& h : p.facets) {
    Rat height = dot(h.normal, apex) - h.offset;  // lattice distance, normal primitive
    if (is_zero(height)) continue;
    std::vector<QVec> face_pts;
    for (const auto& v : p.verts)
      if (dot(h.normal, v) == h.offset) face_pts.push_back(v);
    Rat face_vol = volume_fulldim(saturated_affine_coords(face_pts, tag), tag);
    vol += abs(height) * face_vol;
  }
  return vol / k;
}

}  // namespace detail

// Normalized Euclidean volume with respect to the saturated lattice of the
// affine span: primitive segment -> 1, fundamental cell -> 1, standard
// k-simplex -> 1/k!, point -> 1.
inline Rat lattice_volume(const Polytope& p) {
  if (p.empty()) return 0;
  if (p.dim == 0) return 1;
  return detail::volume_fulldim(detail::saturated_affine_coords(p.verts, p.tag), p.tag);
}

// Reflexivity of a full-dimensional lattice polytope with 0 interior: all
// facets at lattice distance 1 from the origin.
inline bool is_reflexive(const Polytope& p) {
  if (p.dim != p.rank() || !p.is_lattice()) return false;
  QVec origin(p.rank(), p.tag);
  if (!p.strictly_contains(origin)) return false;
  for (const auto& h : p.facets)
    if (h.offset != Rat(-1)) return false;
  return true;
}

inline Polytope minkowski_sum(const Polytope& a, const Polytope& b) {
  std::vector<QVec> pts;
  for (const auto& u : a.verts)
    for (const auto& v : b.verts) pts.push_back(u + v);
  return make_polytope(std::move(pts), a.tag);
}

}  // namespace tropic
