// Intersection numbers of tropical cycles attached to two interior centers:
// the cup-product formula on a common star or quotient fan, and the
// independent geometric path that enumerates intersection points with their
// multiplicities. Both paths must agree.
#pragma once

#include "tropic/tropical.hpp"

namespace tropic {

// Weight induced on the quotient fan along an edge ray: each quotient cone is
// the image of a unique source cone containing the ray and inherits its value.
inline IWeight quotient_weight(const Fan& quot, const QuotientMap& qm, const Fan& src,
                               int edge_ray_id, const IWeight& a) {
  IWeight out = IWeight::zero(quot, a.codim);
  int dim = a.dim();
  for (size_t i = 0; i < src.at(dim).size(); ++i) {
    const Cone& c = src.at(dim)[i];
    if (!std::binary_search(c.rays.begin(), c.rays.end(), edge_ray_id)) continue;
    std::vector<int> img;
    for (int r : c.rays) {
      if (r == edge_ray_id) continue;
      int qid = quot.ray_id(primitive_part(qm.apply(src.rays[r])));
      if (qid < 0) throw std::logic_error("projected ray missing from quotient fan");
      img.push_back(qid);
    }
    std::sort(img.begin(), img.end());
    auto loc = quot.find(img);
    if (!loc || loc->first != dim - 1)
      throw std::logic_error("projected cone missing from quotient fan");
    out.vals[loc->second] = a.vals[i];
  }
  return out;
}

namespace detail {

inline void check_pair_setup(const TropicalInput& in, const StarFan& st1, const IWeight& a1,
                             const StarFan& st2, const IWeight& a2) {
  int d = in.rank - 1;
  if (a1.fan != &st1.fan || a2.fan != &st2.fan)
    throw std::invalid_argument("weights must live on the given star fans");
  if (a1.codim + a2.codim != d)
    throw std::invalid_argument("weight codimensions must sum to the hypersurface dimension");
  if (!st1.fan.complete || !st2.fan.complete)
    throw std::invalid_argument("intersection needs interior centers");
  if (!balance_check(a1) || !balance_check(a2))
    throw std::invalid_argument("weights must be balanced");
}

inline bool is_edge(const Subdivision& sub, const StarFan& st1, const StarFan& st2) {
  std::vector<int> e{st1.center_index, st2.center_index};
  std::sort(e.begin(), e.end());
  return sub.faces.count(e) == 1;
}

}  // namespace detail

// Intersection number of the cycles of a1 (at st1's center) and a2 (at st2's
// center): equal centers pair through psi of the cup product; centers spanning
// an edge of the triangulation pair through the degree of the cup product of
// the induced weights on the quotient fan along the edge; otherwise the
// supports are disjoint and the number is zero.
inline Int tropical_intersection(const TropicalInput& in, const Subdivision& sub,
                                 const StarFan& st1, const IWeight& a1,
                                 const StarFan& st2, const IWeight& a2,
                                 std::uint64_t seed = 2026) {
  detail::check_pair_setup(in, st1, a1, st2, a2);
  int d = in.rank - 1;
  if (st1.center == st2.center) {
    GenericVector m0 = find_generic(st1.fan, seed);
    Int s = psi(cup(a1, a2, m0));
    return d % 2 == 0 ? s : -s;
  }
  if (!detail::is_edge(sub, st1, st2)) return 0;

  Vec edge1 = st2.center - st1.center;  // ray of st1's fan toward st2
  int rid1 = st1.fan.ray_id(edge1);
  int rid2 = st2.fan.ray_id(st1.center - st2.center);
  if (rid1 < 0 || rid2 < 0) throw std::logic_error("edge ray missing from star fan");
  Fan quot = quotient_fan(st1.fan, edge1);
  QuotientMap qm(edge1);  // shared coordinates for both projections
  IWeight b1 = quotient_weight(quot, qm, st1.fan, rid1, a1);
  IWeight b2 = quotient_weight(quot, qm, st2.fan, rid2, a2);
  GenericVector m0 = find_generic(quot, seed);
  Int s = degree(cup(b1, b2, m0));
  return d % 2 == 0 ? -s : s;
}

struct IntersectionPoint {
  std::vector<int> sigma;    // ray ids in the enumeration fan
  std::vector<int> sigma_p;
  Int mult;
};

struct Enumeration {
  std::vector<IntersectionPoint> points;
  Int total;
};

// Geometric oracle: enumerate the intersection points of the two cycles after
// displacing the second by a certified generic vector, with the sign-and-index
// multiplicity of each point. Equal centers: pairs of cones of dimensions
// (q+1, d+1-q) in the common star fan sharing exactly one ray and meeting
// after displacement. Adjacent centers: the same in st2's fan with the shared
// ray fixed to the edge, evaluating a1 on the corresponding cone of st1's fan
// through the shared triangulation cell. m0 must be certified on the fan being
// enumerated (the common fan, resp. st2's fan).
inline Enumeration intersection_enumerate(const TropicalInput& in, const Subdivision& sub,
                                          const StarFan& st1, const IWeight& a1,
                                          const StarFan& st2, const IWeight& a2,
                                          const GenericVector& m0) {
  detail::check_pair_setup(in, st1, a1, st2, a2);
  if (!m0.certified) throw std::invalid_argument("enumeration requires a certified generic vector");
  int d = in.rank - 1;
  int q = a2.codim;
  Enumeration out;
  out.total = 0;

  if (st1.center == st2.center) {
    const Fan& f = st1.fan;
    for (size_t i = 0; i < f.at(q + 1).size(); ++i)
      for (size_t j = 0; j < f.at(d + 1 - q).size(); ++j) {
        const Cone& s = f.at(q + 1)[i];
        const Cone& sp = f.at(d + 1 - q)[j];
        auto sh = detail::shared_rays(s, sp);
        if (sh.size() != 1) continue;  // larger overlaps are infeasible for certified m0
        if (!detail::displacement_solve(f, s, sp, sh, m0.m0).feasible) continue;
        Int idx = *sublattice_index(f.cone_rays(s), f.cone_rays(sp));
        Int mult = a1.vals[i] * a2.vals[j] * idx;
        if (d % 2 != 0) mult = -mult;
        out.total += mult;
        out.points.push_back({s.rays, sp.rays, mult});
      }
    return out;
  }

  if (!detail::is_edge(sub, st1, st2)) return out;

  const Fan& f = st2.fan;
  int rho = f.ray_id(st1.center - st2.center);
  if (rho < 0) throw std::logic_error("edge ray missing from star fan");
  for (size_t i = 0; i < f.at(q + 1).size(); ++i)
    for (size_t j = 0; j < f.at(d + 1 - q).size(); ++j) {
      const Cone& s = f.at(q + 1)[i];
      const Cone& sp = f.at(d + 1 - q)[j];
      auto sh = detail::shared_rays(s, sp);
      if (sh != std::vector<int>{rho}) continue;
      if (!detail::displacement_solve(f, s, sp, sh, m0.m0).feasible) continue;
      // a1 is evaluated on the cone of st1's fan over the same triangulation cell
      auto cell = st2.cone_cell.find(s.rays);
      if (cell == st2.cone_cell.end()) throw std::logic_error("cone without cell");
      auto c1 = cone_for_cell(st1, cell->second);
      if (!c1) throw std::logic_error("shared cell missing from the other star");
      Int idx = *sublattice_index(f.cone_rays(s), f.cone_rays(sp));
      Int mult = a1.at(*c1) * a2.vals[j] * idx;
      if (d % 2 == 0) mult = -mult;
      out.total += mult;
      out.points.push_back({s.rays, sp.rays, mult});
    }
  return out;
}

}  // namespace tropic
