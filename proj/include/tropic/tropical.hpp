// Tropical hypersurface data: a lattice polytope with marked points, a height
// function inducing a regular unimodular triangulation, star fans at interior
// lattice points, dual cells, and the polyhedral cycles carried by Minkowski
// weights on a star fan.
#pragma once

#include <stdexcept>

#include "tropic/fan.hpp"
#include "tropic/weight.hpp"

namespace tropic {

enum class TropicalErr {
  bad_input,             // malformed data: sizes, zero coefficients, degenerate hull
  points_not_saturated,  // marked points miss lattice points of their hull
  lambda_not_convex,     // heights admit no strictly convex piecewise-linear extension
  not_triangulation,     // induced subdivision has non-simplex cells
  not_unimodular,        // a cell has lattice volume above the minimum
  cells_mismatch,        // supplied triangulation differs from the induced one
  no_interior_point,
};

struct TropicalError : std::runtime_error {
  TropicalErr code;
  TropicalError(TropicalErr c, const std::string& msg) : std::runtime_error(msg), code(c) {}
};

struct TropicalInput {
  int rank = 0;                  // ambient lattice rank
  std::vector<Vec> points;       // marked lattice points, pairwise distinct
  std::vector<Rat> heights;      // one per point
  std::vector<CRat> coeffs;      // one per point, nonzero
  std::optional<std::vector<std::vector<int>>> cells;  // optional asserted triangulation
};

struct Subdivision {
  std::vector<std::vector<int>> cells;   // maximal cells, sorted point-index lists
  std::set<std::vector<int>> faces;      // subset closure of the cells
};

namespace detail {

// Affine function (u, beta) matching the heights on a full-dimensional point
// subset; nullopt when the subset is affinely dependent.
inline std::optional<std::pair<QVec, Rat>> affine_through(const TropicalInput& in,
                                                          const std::vector<int>& subset) {
  int n = in.rank;
  QMat m;
  QRow rhs;
  for (int idx : subset) {
    QRow row(n + 1);
    for (int j = 0; j < n; ++j) row[j] = Rat(in.points[idx].x[j]);
    row[n] = 1;
    m.push_back(std::move(row));
    rhs.push_back(in.heights[idx]);
  }
  if (is_zero(qmat_det(m))) return std::nullopt;
  auto sol = qmat_solve(m, rhs);
  QVec u(n, Lattice::N);
  for (int j = 0; j < n; ++j) u.x[j] = (*sol)[j];
  return std::make_pair(std::move(u), (*sol)[n]);
}

}  // namespace detail

// Checks the input and returns the regular subdivision induced by the heights,
// which must be a unimodular triangulation with vertex set exactly the marked
// points. When the input asserts a triangulation, it must agree.
inline Subdivision validate(const TropicalInput& in) {
  int n = in.rank;
  size_t npts = in.points.size();
  if (n < 1 || npts < static_cast<size_t>(n) + 1 || in.heights.size() != npts ||
      in.coeffs.size() != npts)
    throw TropicalError(TropicalErr::bad_input, "inconsistent point/height/coefficient data");
  for (const CRat& c : in.coeffs)
    if (is_zero(c.re) && is_zero(c.im))
      throw TropicalError(TropicalErr::bad_input, "zero coefficient");
  std::vector<QVec> qpts;
  for (const Vec& p : in.points) {
    if (p.tag != Lattice::M || static_cast<int>(p.x.size()) != n)
      throw TropicalError(TropicalErr::bad_input, "points must be rank-n vectors in M");
    qpts.emplace_back(p);
  }
  Polytope hull = make_polytope(qpts, Lattice::M);
  if (hull.dim != n)
    throw TropicalError(TropicalErr::bad_input, "point configuration is not full-dimensional");
  std::vector<Vec> sorted_pts = in.points;
  std::sort(sorted_pts.begin(), sorted_pts.end());
  if (std::adjacent_find(sorted_pts.begin(), sorted_pts.end()) != sorted_pts.end())
    throw TropicalError(TropicalErr::bad_input, "duplicate marked points");
  if (sorted_pts != lattice_points(hull))
    throw TropicalError(TropicalErr::points_not_saturated,
                        "marked points must be all lattice points of their hull");

  // Cells of the regular subdivision that are simplices: (n+1)-subsets whose
  // interpolating affine function is strictly below the heights elsewhere.
  std::vector<std::vector<int>> accepted;
  std::vector<int> subset(n + 1);
  std::vector<bool> pick(npts, false);
  std::fill(pick.begin(), pick.begin() + n + 1, true);
  do {
    int k = 0;
    for (size_t i = 0; i < npts; ++i)
      if (pick[i]) subset[k++] = static_cast<int>(i);
    auto aff = detail::affine_through(in, subset);
    if (!aff) continue;
    bool strict = true;
    for (size_t i = 0; i < npts && strict; ++i) {
      if (pick[i]) continue;
      Rat val = dot(QVec(in.points[i]), aff->first) + aff->second;
      if (!(val < in.heights[i])) strict = false;
    }
    if (strict) accepted.push_back(subset);
  } while (std::prev_permutation(pick.begin(), pick.end()));

  if (accepted.empty())
    throw TropicalError(TropicalErr::lambda_not_convex,
                        "heights do not induce a triangulation with simplex cells");

  Rat covered = 0;
  for (const auto& cell : accepted) {
    std::vector<Vec> gens;
    for (int i = 1; i <= n; ++i) gens.push_back(in.points[cell[i]] - in.points[cell[0]]);
    Int det = 0;
    {
      QMat m(n, QRow(n));
      for (int r = 0; r < n; ++r)
        for (int c = 0; c < n; ++c) m[r][c] = Rat(gens[r].x[c]);
      Rat d = qmat_det(m);
      det = abs(d.get_num());
    }
    if (det != 1)
      throw TropicalError(TropicalErr::not_unimodular, "cell with lattice volume above 1");
    covered += Rat(1);
  }
  Rat total = lattice_volume(hull);
  Int nfact = 1;
  for (int i = 2; i <= n; ++i) nfact *= i;
  if (covered != total * Rat(nfact))
    throw TropicalError(TropicalErr::not_triangulation,
                        "induced subdivision has non-simplex cells");

  std::sort(accepted.begin(), accepted.end());
  if (in.cells) {
    std::vector<std::vector<int>> given = *in.cells;
    for (auto& c : given) std::sort(c.begin(), c.end());
    std::sort(given.begin(), given.end());
    if (given != accepted)
      throw TropicalError(TropicalErr::cells_mismatch,
                          "supplied triangulation differs from the induced one");
  }

  Subdivision sub;
  sub.cells = accepted;
  for (const auto& cell : sub.cells) {
    int k = static_cast<int>(cell.size());
    for (unsigned mask = 1; mask < (1u << k); ++mask) {
      std::vector<int> face;
      for (int i = 0; i < k; ++i)
        if (mask & (1u << i)) face.push_back(cell[i]);
      sub.faces.insert(std::move(face));
    }
  }
  return sub;
}

// Interior lattice points of the hull, the admissible star-fan centers.
inline std::vector<Vec> interior_points(const TropicalInput& in) {
  std::vector<QVec> qpts;
  for (const Vec& p : in.points) qpts.emplace_back(p);
  auto pts = lattice_points(make_polytope(qpts, Lattice::M), /*interior_only=*/true);
  if (pts.empty())
    throw TropicalError(TropicalErr::no_interior_point, "hull has no interior lattice point");
  return pts;
}

// Star fan at a marked point: one cone per triangulation face containing the
// point, generated by the displacements to the face's other vertices. Keeps
// the correspondence between cones and faces.
struct StarFan {
  Fan fan;            // in M; complete iff the center is interior
  Vec center;
  int center_index = -1;
  std::vector<int> ray_point;  // marked-point index generating each ray
  std::map<std::vector<int>, std::vector<int>> cone_cell;  // cone rays -> face of T
};

inline StarFan fan_at(const TropicalInput& in, const Subdivision& sub, const Vec& w) {
  StarFan st;
  st.center = w;
  for (size_t i = 0; i < in.points.size(); ++i)
    if (in.points[i] == w) st.center_index = static_cast<int>(i);
  if (st.center_index < 0)
    throw std::invalid_argument("star center must be a marked point");

  std::map<int, int> point_ray;  // marked point -> ray id, in point-index order
  std::set<int> neighbors;
  for (const auto& cell : sub.cells)
    if (std::binary_search(cell.begin(), cell.end(), st.center_index))
      for (int p : cell)
        if (p != st.center_index) neighbors.insert(p);
  std::vector<Vec> rays;
  for (int p : neighbors) {
    point_ray[p] = static_cast<int>(rays.size());
    rays.push_back(in.points[p] - w);
    st.ray_point.push_back(p);
  }
  std::vector<std::vector<int>> maximal;
  for (const auto& cell : sub.cells) {
    if (!std::binary_search(cell.begin(), cell.end(), st.center_index)) continue;
    std::vector<int> rs;
    for (int p : cell)
      if (p != st.center_index) rs.push_back(point_ray[p]);
    maximal.push_back(std::move(rs));
  }
  st.fan = fan_from_maximal(std::move(rays), maximal, in.rank);
  for (const auto& level : st.fan.cones)
    for (const Cone& c : level) {
      std::vector<int> cell{st.center_index};
      for (int r : c.rays) cell.push_back(st.ray_point[r]);
      std::sort(cell.begin(), cell.end());
      st.cone_cell[c.rays] = std::move(cell);
    }
  return st;
}

inline std::optional<Cone> cone_for_cell(const StarFan& st, std::vector<int> cell) {
  std::sort(cell.begin(), cell.end());
  for (const auto& [rays, c] : st.cone_cell)
    if (c == cell) return Cone{rays, static_cast<int>(rays.size())};
  return std::nullopt;
}

// Dual cell of an interior center: the polytope in N whose normal fan is the
// star fan, cut out by <m - w, n> >= height(w) - height(m) over the rays.
inline Polytope dual_cell(const TropicalInput& in, const StarFan& st) {
  if (!st.fan.complete)
    throw std::invalid_argument("dual cell needs an interior center");
  SupportFunction sf;
  sf.fan = &st.fan;
  for (int p : st.ray_point)
    sf.vals.push_back(in.heights[st.center_index] - in.heights[p]);
  return polytope_from_support(sf);
}

// Flags of simplicial cones sigma_1 < ... < sigma_{q+1} with dim sigma_i = i,
// in lexicographic order of their ray-index chains.
struct Flag {
  std::vector<std::vector<int>> chain;  // ray-id sets, sizes 1..q+1

  // generator rays: e_1 spans sigma_1, e_i is new in sigma_i
  std::vector<int> gens() const {
    std::vector<int> g{chain[0][0]};
    for (size_t i = 1; i < chain.size(); ++i)
      for (int r : chain[i])
        if (!std::binary_search(chain[i - 1].begin(), chain[i - 1].end(), r)) g.push_back(r);
    return g;
  }
};

inline std::vector<Flag> flags(const Fan& f, int q) {
  if (q + 1 > f.rank) throw std::invalid_argument("flag length exceeds fan rank");
  std::vector<Flag> out;
  std::vector<std::vector<int>> chain;
  auto extend = [&](auto&& self, int depth) -> void {
    if (depth == q + 1) {
      out.push_back(Flag{chain});
      return;
    }
    Cone base{chain.empty() ? std::vector<int>{} : chain.back(), depth};
    for (int ci : f.cofaces(base, depth + 1)) {
      chain.push_back(f.at(depth + 1)[ci].rays);
      self(self, depth + 1);
      chain.pop_back();
    }
  };
  extend(extend, 0);
  return out;
}

// Multivector attached to a flag: contraction of the wedge of its generator
// rays against the volume form.
inline MultiVector flag_frame(const Fan& f, const Flag& fl, const VolumeForm& vol) {
  std::vector<Vec> gens;
  for (int r : fl.gens()) gens.push_back(f.rays[r]);
  return contract_volume(wedge(gens, f.rank, f.tag), vol);
}

// Weighted polyhedral cycle: one simplex of barycenters per flag, carrying the
// weight of its top cone times the flag frame.
struct CycleTerm {
  Flag flag;
  MultiVector frame;  // weight(top cone) * flag_frame
};

struct TropicalCycle {
  int q = 0;
  std::vector<CycleTerm> terms;              // zero frames omitted
  std::map<std::vector<int>, QVec> bary;     // cone rays -> dual-face barycenter
};

inline TropicalCycle cycle_from_weight(const StarFan& st, const Polytope& dual,
                                       const IWeight& a, const VolumeForm& vol) {
  if (a.fan != &st.fan) throw std::invalid_argument("weight lives on a different fan");
  if (auto bad = balance_violation(a))
    throw std::invalid_argument("weight is not balanced");
  TropicalCycle cyc;
  cyc.q = a.dim() - 1;
  for (const Flag& fl : flags(st.fan, cyc.q)) {
    const Int& w = a.at(Cone{fl.chain.back(), cyc.q + 1});
    MultiVector mv = flag_frame(st.fan, fl, vol) * w;
    for (const auto& rs : fl.chain)
      if (!cyc.bary.count(rs)) {
        Cone c{rs, static_cast<int>(rs.size())};
        cyc.bary[rs] = face_for_cone(dual, st.fan, c).barycenter();
      }
    if (!mv.c.empty()) cyc.terms.push_back({fl, std::move(mv)});
  }
  return cyc;
}

// Formal boundary: signed sum over vertex-omitted barycenter simplices, keyed
// by the remaining cone chain. Empty exactly when the weight is balanced.
inline std::map<std::vector<std::vector<int>>, MultiVector> cycle_boundary(
    const StarFan& st, const IWeight& a, const VolumeForm& vol) {
  std::map<std::vector<std::vector<int>>, MultiVector> out;
  int q = a.dim() - 1;
  for (const Flag& fl : flags(st.fan, q)) {
    const Int& w = a.at(Cone{fl.chain.back(), q + 1});
    if (is_zero(w)) continue;
    MultiVector mv = flag_frame(st.fan, fl, vol) * w;
    for (int omit = 0; omit <= q; ++omit) {
      std::vector<std::vector<int>> key;
      for (int i = 0; i <= q; ++i)
        if (i != omit) key.push_back(fl.chain[i]);
      MultiVector signed_mv = (omit % 2 == 0) ? mv : -mv;
      auto it = out.find(key);
      if (it == out.end())
        out.emplace(std::move(key), std::move(signed_mv));
      else
        it->second = it->second + signed_mv;
    }
  }
  for (auto it = out.begin(); it != out.end();)
    it = it->second.c.empty() ? out.erase(it) : std::next(it);
  return out;
}

}  // namespace tropic
