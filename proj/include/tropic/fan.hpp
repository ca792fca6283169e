// Fans of rational polyhedral cones in M, keyed by ray indices: star fans of
// the dual subdivision, normal fans of polytopes, quotient fans. Support
// functions in min-convention (phi(m) = inf <m, n> over the polytope), so nef
// support functions satisfy phi <= (local linear extension) everywhere and a
// polytope is recovered as {n : <m, n> >= phi(m) for all rays m}.
#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <vector>

#include "tropic/polytope.hpp"

namespace tropic {

struct Cone {
  std::vector<int> rays;  // sorted ray indices; for simplicial cones dim == size
  int dim = 0;

  bool operator==(const Cone& o) const { return rays == o.rays; }
  bool operator<(const Cone& o) const { return rays < o.rays; }
  bool has_face(const Cone& f) const {
    return std::includes(rays.begin(), rays.end(), f.rays.begin(), f.rays.end());
  }
};

struct Fan {
  int rank = 0;
  Lattice tag = Lattice::M;
  std::vector<Vec> rays;                  // primitive generators
  std::vector<std::vector<Cone>> cones;   // grouped by dimension, cones[0] = {zero cone}
  bool complete = false, simplicial = false, unimodular = false;

  int nrays() const { return static_cast<int>(rays.size()); }
  const std::vector<Cone>& at(int dim) const { return cones[dim]; }

  std::optional<std::pair<int, int>> find(const std::vector<int>& ray_set) const {
    for (int d = 0; d <= rank; ++d)
      for (size_t i = 0; i < cones[d].size(); ++i)
        if (cones[d][i].rays == ray_set) return std::make_pair(d, static_cast<int>(i));
    return std::nullopt;
  }
  int ray_id(const Vec& r) const {
    for (int i = 0; i < nrays(); ++i)
      if (rays[i] == r) return i;
    return -1;
  }
  std::vector<Vec> cone_rays(const Cone& c) const {
    std::vector<Vec> out;
    for (int i : c.rays) out.push_back(rays[i]);
    return out;
  }
  // supersets of f among dimension-d cones
  std::vector<int> cofaces(const Cone& f, int d) const {
    std::vector<int> out;
    for (size_t i = 0; i < cones[d].size(); ++i)
      if (cones[d][i].has_face(f)) out.push_back(static_cast<int>(i));
    return out;
  }
};

namespace detail {

inline void classify_fan(Fan& f) {
  int n = f.rank;
  f.simplicial = true;
  f.unimodular = true;
  for (int d = 1; d <= n; ++d)
    for (const Cone& c : f.cones[d]) {
      if (static_cast<int>(c.rays.size()) != c.dim) { f.simplicial = false; continue; }
      auto gens = f.cone_rays(c);
      SmithForm s = smith_form(imat_from_rows(gens));
      if (s.rank != c.dim) f.simplicial = false;
      for (const Int& e : s.diag)
        if (e != 1) f.unimodular = false;
    }
  if (!f.simplicial) f.unimodular = false;
  // completeness for pure simplicial fans: every wall bounds exactly two
  // maximal cones (plus existence of maximal cones)
  f.complete = f.simplicial && !f.cones[n].empty();
  if (f.complete && n >= 1)
    for (const Cone& w : f.cones[n - 1])
      if (f.cofaces(w, n).size() != 2) { f.complete = false; break; }
}

}  // namespace detail

// Build a simplicial fan from maximal cones given as ray-index sets; faces are
// generated by taking subsets.
inline Fan fan_from_maximal(std::vector<Vec> rays, const std::vector<std::vector<int>>& maximal,
                            int rank) {
  Fan f;
  f.rank = rank;
  f.rays = std::move(rays);
  f.cones.assign(rank + 1, {});
  std::set<std::vector<int>> seen;
  auto add = [&](std::vector<int> rs) {
    std::sort(rs.begin(), rs.end());
    if (!seen.insert(rs).second) return;
    Cone c{rs, static_cast<int>(rs.size())};
    f.cones[c.dim].push_back(std::move(c));
  };
  add({});
  for (const auto& m : maximal) {
    int k = static_cast<int>(m.size());
    for (unsigned mask = 1; mask < (1u << k); ++mask) {
      std::vector<int> sub;
      for (int i = 0; i < k; ++i)
        if (mask & (1u << i)) sub.push_back(m[i]);
      add(std::move(sub));
    }
  }
  for (auto& level : f.cones) std::sort(level.begin(), level.end());
  detail::classify_fan(f);
  return f;
}

struct SupportFunction {
  const Fan* fan = nullptr;
  std::vector<Rat> vals;  // per ray, phi(primitive generator)
};

// Unique u in N_Q with <r, u> = phi(r) on the rays of a full-dimensional
// simplicial cone.
inline QVec linear_extension(const SupportFunction& sf, const Cone& maximal) {
  const Fan& f = *sf.fan;
  QMat a;
  QRow b;
  for (int rid : maximal.rays) {
    QRow row(f.rank);
    for (int j = 0; j < f.rank; ++j) row[j] = Rat(f.rays[rid].x[j]);
    a.push_back(std::move(row));
    b.push_back(sf.vals[rid]);
  }
  auto sol = qmat_solve(a, b);
  QVec u(f.rank, Lattice::N);
  for (int j = 0; j < f.rank; ++j) u.x[j] = (*sol)[j];
  return u;
}

// (nef, ample): convexity of the support function across every wall, in the
// inf-convention (local linear extension dominates phi on the opposite ray).
inline std::pair<bool, bool> is_nef_ample(const SupportFunction& sf) {
  const Fan& f = *sf.fan;
  int n = f.rank;
  bool nef = true, ample = true;
  for (const Cone& wall : f.at(n - 1)) {
    auto adj = f.cofaces(wall, n);
    if (adj.size() != 2) continue;
    for (int flip = 0; flip < 2; ++flip) {
      const Cone& c1 = f.at(n)[adj[flip]];
      const Cone& c2 = f.at(n)[adj[1 - flip]];
      int opposite = -1;
      for (int rid : c2.rays)
        if (!std::binary_search(wall.rays.begin(), wall.rays.end(), rid)) opposite = rid;
      QVec u = linear_extension(sf, c1);
      Rat ext = dot(f.rays[opposite], u);
      if (ext < sf.vals[opposite]) { nef = false; ample = false; }
      if (ext == sf.vals[opposite]) ample = false;
    }
  }
  return {nef, ample && nef};
}

// P = {n : <m, n> >= phi(m) for all rays m}; exact vertex per maximal cone.
// Throws when phi is not convex (some vertex violates an inequality).
inline Polytope polytope_from_support(const SupportFunction& sf) {
  const Fan& f = *sf.fan;
  std::vector<QVec> verts;
  for (const Cone& c : f.at(f.rank)) {
    QVec v = linear_extension(sf, c);
    for (int rid = 0; rid < f.nrays(); ++rid)
      if (dot(f.rays[rid], v) < sf.vals[rid])
        throw std::domain_error("support function is not convex");
    verts.push_back(std::move(v));
  }
  return make_polytope(std::move(verts),
                       f.tag == Lattice::M ? Lattice::N : Lattice::M);
}

inline SupportFunction support_of(const Fan& fan, const Polytope& p) {
  SupportFunction sf;
  sf.fan = &fan;
  for (const Vec& r : fan.rays) {
    Rat mn = dot(r, p.verts[0]);
    for (const auto& v : p.verts) mn = std::min(mn, dot(r, v));
    sf.vals.push_back(mn);
  }
  return sf;
}

// Does the fan refine the normal fan of P? Every maximal cone must fit inside
// a single vertex's normal cone, i.e. some vertex attains the support value on
// all of its rays simultaneously.
inline bool refines_normal_fan(const Fan& fan, const Polytope& p) {
  SupportFunction sf = support_of(fan, p);
  for (const Cone& c : fan.at(fan.rank)) {
    bool ok = false;
    for (const auto& v : p.verts) {
      bool all = true;
      for (int rid : c.rays)
        if (dot(fan.rays[rid], v) != sf.vals[rid]) { all = false; break; }
      if (all) { ok = true; break; }
    }
    if (!ok) return false;
  }
  return true;
}

// P_S: the face of P cut out by the minimal normal-fan cone containing c,
// computed as the argmin face of a relative-interior point of c.
inline Polytope face_for_cone(const Polytope& p, const Fan& fan, const Cone& c) {
  if (!refines_normal_fan(fan, p)) throw std::domain_error("fan does not refine normal fan");
  Vec x(std::vector<Int>(fan.rank, 0), fan.tag);
  for (int rid : c.rays) x = x + fan.rays[rid];
  Rat mn = dot(x, p.verts[0]);
  for (const auto& v : p.verts) mn = std::min(mn, dot(x, v));
  std::vector<QVec> face;
  for (const auto& v : p.verts)
    if (dot(x, v) == mn) face.push_back(v);
  return make_polytope(std::move(face), p.tag);
}

// Complete fan of a full-dimensional polytope; rays are the primitive inner
// facet normals, the cone of a face is spanned by the normals of the facets
// containing it. Non-simplicial cones keep their full generator lists.
inline Fan normal_fan(const Polytope& p) {
  if (p.dim != p.rank()) throw std::domain_error("normal fan requires full dimension");
  Fan f;
  f.rank = p.rank();
  f.tag = p.tag == Lattice::N ? Lattice::M : Lattice::N;
  for (const auto& h : p.facets) {
    Vec r = h.normal;
    r.tag = f.tag;
    f.rays.push_back(std::move(r));
  }
  f.cones.assign(f.rank + 1, {});
  for (const auto& face : face_vertex_sets(p)) {
    std::vector<int> rs;
    for (size_t i = 0; i < p.facets.size(); ++i) {
      bool active = true;
      for (int vi : face)
        if (dot(p.facets[i].normal, p.verts[vi]) != p.facets[i].offset) { active = false; break; }
      if (active) rs.push_back(static_cast<int>(i));
    }
    std::vector<QVec> fverts;
    for (int vi : face) fverts.push_back(p.verts[vi]);
    int fdim = make_polytope(fverts, p.tag).dim;
    Cone c{rs, f.rank - fdim};
    f.cones[c.dim].push_back(std::move(c));
  }
  Cone zero{{}, 0};
  f.cones[0] = {zero};
  for (auto& level : f.cones) {
    std::sort(level.begin(), level.end());
    level.erase(std::unique(level.begin(), level.end()), level.end());
  }
  detail::classify_fan(f);
  f.complete = true;  // normal fan of a full-dimensional polytope
  return f;
}

// Images of the cones containing edge_ray under the projection along it.
// star_cells, when given, must each contain the ray.
inline Fan quotient_fan(const Fan& fan, const Vec& edge_ray,
                        const std::vector<Cone>* star_cells = nullptr) {
  int rid = fan.ray_id(edge_ray);
  if (rid < 0) throw std::invalid_argument("edge ray is not a ray of the fan");
  std::vector<Cone> star;
  if (star_cells) {
    for (const Cone& c : *star_cells) {
      if (!std::binary_search(c.rays.begin(), c.rays.end(), rid))
        throw std::invalid_argument("listed cone does not contain the edge ray");
      star.push_back(c);
    }
  } else {
    for (int d = 1; d <= fan.rank; ++d)
      for (const Cone& c : fan.at(d))
        if (std::binary_search(c.rays.begin(), c.rays.end(), rid)) star.push_back(c);
  }
  QuotientMap qm(fan.rays[rid]);
  Fan out;
  out.rank = fan.rank - 1;
  out.tag = fan.tag;
  out.cones.assign(out.rank + 1, {});
  std::map<Vec, int> ray_ids;
  std::set<std::vector<int>> seen;
  seen.insert({});
  out.cones[0].push_back(Cone{{}, 0});
  for (const Cone& c : star) {
    std::vector<int> rs;
    for (int r : c.rays) {
      if (r == rid) continue;
      Vec img = primitive_part(qm.apply(fan.rays[r]));
      auto [it, fresh] = ray_ids.try_emplace(img, static_cast<int>(out.rays.size()));
      if (fresh) out.rays.push_back(img);
      rs.push_back(it->second);
    }
    std::sort(rs.begin(), rs.end());
    if (!seen.insert(rs).second) continue;
    out.cones[rs.size()].push_back(Cone{rs, static_cast<int>(rs.size())});
  }
  for (auto& level : out.cones) std::sort(level.begin(), level.end());
  detail::classify_fan(out);
  return out;
}

}  // namespace tropic
