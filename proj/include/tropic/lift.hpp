// Combinatorial lift complexes: chains of product cells (flag simplex) x
// (polytope face) with lattice orientations, the product boundary operator
// with verified vanishing on polytope chains, fiber-volume profiles that
// certify the leading behaviour of a K-class lift, the sign relation between
// lift and tropical intersection numbers, and JSON/OBJ export.
#pragma once

#include <json.hpp>
#include <sstream>

#include "tropic/intersection.hpp"
#include "tropic/kclass.hpp"

namespace tropic {

// Primitive generator of the top wedge of the tangent lattice of a lattice
// polytope with the given vertices, sign-normalized on its first coefficient.
// A point gets the scalar 1.
inline MultiVector canonical_frame(const std::vector<Vec>& verts, int rank) {
  if (verts.size() <= 1) return MultiVector::scalar(rank, 1, Lattice::N);
  std::vector<Vec> dirs;
  for (size_t i = 1; i < verts.size(); ++i) dirs.push_back(verts[i] - verts[0]);
  std::vector<Vec> basis = saturated_span_basis(dirs, Lattice::N);
  MultiVector f = wedge(basis, rank, Lattice::N);
  if (sgn(f.c.begin()->second) < 0) f = -f;
  return f;
}

// s with a = s * b for proportional multivectors; sign is all callers need,
// but the full check guards against non-proportional input.
inline Int frame_ratio(const MultiVector& a, const MultiVector& b) {
  if (a.degree != b.degree || b.c.empty())
    throw std::invalid_argument("frame comparison needs matching nonzero multivectors");
  const auto& [mask, lead] = *b.c.begin();
  auto it = a.c.find(mask);
  if (it == a.c.end() || !is_zero(Int(it->second % lead)))
    throw std::logic_error("frames are not proportional");
  Int s = it->second / lead;
  if (!((b * s) == a)) throw std::logic_error("frames are not proportional");
  return s;
}

struct ProductCell {
  std::vector<std::vector<int>> base;  // cone ray-sets indexing the simplex vertices
  std::vector<Vec> fiber;              // sorted lattice vertices of the fiber face
};

inline bool operator<(const ProductCell& a, const ProductCell& b) {
  if (a.base != b.base) return a.base < b.base;
  return a.fiber < b.fiber;
}

struct OrientedCoeff {
  MultiVector frame;  // canonical fiber orientation
  Int coeff = 0;      // multiple of that orientation
};

// Formal sum of product cells. With mod_lattice set, fibers are identified up
// to lattice translation (chains living in the quotient torus).
struct CellChain {
  const Fan* fan = nullptr;
  bool mod_lattice = false;
  std::map<ProductCell, OrientedCoeff> cells;

  bool empty() const { return cells.empty(); }
};

namespace detail {

inline std::vector<Vec> fiber_vertices(const Polytope& p, bool mod_lattice) {
  if (!p.is_lattice()) throw std::invalid_argument("fiber faces must be lattice polytopes");
  std::vector<Vec> v = p.lattice_verts();
  std::sort(v.begin(), v.end());
  if (mod_lattice) {
    Vec shift = v[0];
    for (auto& w : v) w = w - shift;
  }
  return v;
}

inline void add_cell(CellChain& ch, std::vector<std::vector<int>> base, const Polytope& fiber,
                     const MultiVector& orientation, const Int& coeff) {
  if (is_zero(coeff)) return;
  std::vector<Vec> verts = fiber_vertices(fiber, ch.mod_lattice);
  MultiVector canon = canonical_frame(verts, ch.fan->rank);
  Int c = coeff * frame_ratio(orientation, canon);
  auto [it, fresh] = ch.cells.try_emplace(ProductCell{std::move(base), std::move(verts)},
                                          OrientedCoeff{canon, c});
  if (!fresh) {
    it->second.coeff += c;
    if (is_zero(it->second.coeff)) ch.cells.erase(it);
  }
}

}  // namespace detail

// Chain of the lattice polytope P over the fan: for every flag whose top cone
// picks a face of P of complementary dimension, the product of the flag
// simplex with that face, oriented by the flag frame and weighted (-1)^q.
inline CellChain cycle_from_polytope(const Fan& f, const VolumeForm& vol, const Polytope& p,
                                     bool mod_lattice = false) {
  if (!refines_normal_fan(f, p))
    throw std::domain_error("fan does not refine the normal fan of the polytope");
  CellChain ch;
  ch.fan = &f;
  ch.mod_lattice = mod_lattice;
  int d = f.rank - 1;
  for (int q = 0; q <= d; ++q)
    for (const Flag& fl : flags(f, q)) {
      Polytope face = face_for_cone(p, f, Cone{fl.chain.back(), q + 1});
      if (face.dim != d - q) continue;
      detail::add_cell(ch, fl.chain, face, flag_frame(f, fl, vol),
                       q % 2 == 0 ? Int(1) : Int(-1));
    }
  return ch;
}

// Chain of a K-class in anti-nef terms: sum of the polytope chains of the
// inverse (nef) bundles, in the quotient torus.
inline CellChain chain_from_kclass(const KClass& x, const VolumeForm& vol) {
  const Fan& f = *x.fan;
  CellChain ch;
  ch.fan = &f;
  ch.mod_lattice = true;
  for (const auto& [key, mult] : x.terms) {
    if (!is_anti_nef_divisor(ToricDivisor{&f, key}))
      throw std::invalid_argument("chain construction needs anti-nef terms; decompose first");
    SupportFunction sf;
    sf.fan = &f;
    for (const Int& c : key) sf.vals.push_back(Rat(c));  // support of the inverse bundle
    Polytope p = polytope_from_support(sf);
    CellChain one = cycle_from_polytope(f, vol, p, /*mod_lattice=*/true);
    for (const auto& [cell, oc] : one.cells) {
      auto [it, fresh] = ch.cells.try_emplace(cell, OrientedCoeff{oc.frame, oc.coeff * mult});
      if (!fresh) {
        it->second.coeff += oc.coeff * mult;
        if (is_zero(it->second.coeff)) ch.cells.erase(it);
      }
    }
  }
  return ch;
}

// Oriented facets of a fiber: each facet with the orientation induced by the
// outward-normal-first convention relative to the given fiber orientation.
inline std::vector<std::pair<Polytope, Int>> fiber_boundary(const Polytope& p,
                                                            const MultiVector& orientation) {
  std::vector<std::pair<Polytope, Int>> out;
  if (p.dim < 1) return out;
  QVec center = p.barycenter();
  for (const auto& h : p.facets) {
    std::vector<QVec> fv;
    for (const auto& v : p.verts)
      if (dot(h.normal, v) == h.offset) fv.push_back(v);
    Polytope face = make_polytope(fv, p.tag);
    // outward direction inside the tangent space of p
    QVec diff = face.barycenter() - center;
    Int den = 1;
    for (const Rat& c : diff.x) den = lcm(den, c.get_den());
    Vec u(std::vector<Int>(diff.rank()), Lattice::N);
    for (int i = 0; i < diff.rank(); ++i) {
      Rat scaled = diff.x[i] * Rat(den);
      u.x[i] = scaled.get_num();
    }
    MultiVector g = canonical_frame(detail::fiber_vertices(face, false), diff.rank());
    Int s = sgn(frame_ratio(wedge(MultiVector::from_vector(u), g), orientation));
    out.emplace_back(std::move(face), s);
  }
  return out;
}

// Product boundary: simplicial boundary of the base (facets by omitting one
// simplex vertex) plus (-1)^{dim base} times the oriented fiber boundary.
inline CellChain chain_boundary(const CellChain& ch) {
  CellChain out;
  out.fan = ch.fan;
  out.mod_lattice = ch.mod_lattice;
  for (const auto& [cell, oc] : ch.cells) {
    int qb = static_cast<int>(cell.base.size()) - 1;
    if (qb >= 1)
      for (int i = 0; i <= qb; ++i) {
        std::vector<std::vector<int>> facet;
        for (int j = 0; j <= qb; ++j)
          if (j != i) facet.push_back(cell.base[j]);
        Int c = (i % 2 == 0) ? oc.coeff : -oc.coeff;
        auto [it, fresh] =
            out.cells.try_emplace(ProductCell{std::move(facet), cell.fiber},
                                  OrientedCoeff{oc.frame, c});
        if (!fresh) {
          it->second.coeff += c;
          if (is_zero(it->second.coeff)) out.cells.erase(it);
        }
      }
    std::vector<QVec> qv;
    for (const Vec& v : cell.fiber) qv.emplace_back(v);
    Polytope fiber = make_polytope(qv, Lattice::N);
    Int fsign = (qb % 2 == 0) ? oc.coeff : -oc.coeff;
    for (auto& [face, s] : fiber_boundary(fiber, oc.frame)) {
      MultiVector g = canonical_frame(detail::fiber_vertices(face, false), ch.fan->rank);
      detail::add_cell(out, cell.base, face, g, fsign * s);
    }
  }
  return out;
}

struct CycleCheck {
  bool ok = false;
  CellChain residual;
};

inline CycleCheck assert_cycle(const CellChain& ch) {
  CycleCheck r;
  r.residual = chain_boundary(ch);
  r.ok = r.residual.empty();
  return r;
}

// Per-cone signed fiber volumes of an anti-nef expression of E: for the top
// cone sigma of dimension q+1, (-1)^{d-q} sum_j l_j vol(P_{j,sigma}) over the
// terms whose face has dimension d-q. This equals the codim (d-q) Chern
// component of E evaluated at sigma; it vanishes for q > d-k and reproduces
// (-1)^{d+1-k} a_E at q = d-k.
struct FiberProfile {
  int k = 0;
  IWeight leading;                                     // a_E
  std::vector<std::map<std::vector<int>, Rat>> values; // index q: cone rays -> value
  std::vector<std::vector<std::vector<int>>> support;  // flags of the carrying skeleton
};

inline FiberProfile lift_profile(const KClass& e, const GenericVector& m0) {
  const Fan& f = *e.fan;
  int d = f.rank - 1;
  auto [k, a] = leading_index_and_weight(e, m0);
  KClass dec = e;
  for (const auto& [key, mult] : e.terms)
    if (!is_anti_nef_divisor(ToricDivisor{&f, key})) {
      dec = anti_nef_decompose(e);
      break;
    }
  std::vector<std::pair<Polytope, Int>> polys;
  for (const auto& [key, mult] : dec.terms) {
    SupportFunction sf;
    sf.fan = &f;
    for (const Int& c : key) sf.vals.push_back(Rat(c));
    polys.emplace_back(polytope_from_support(sf), mult);
  }
  FiberProfile out;
  out.k = k;
  out.leading = a;
  out.values.resize(d + 1);
  for (int q = 0; q <= d; ++q) {
    for (const Cone& sigma : f.at(q + 1)) {
      Rat val = 0;
      for (const auto& [p, mult] : polys) {
        Polytope face = face_for_cone(p, f, sigma);
        if (face.dim != d - q) continue;
        val += Rat(mult) * lattice_volume(face);
      }
      if ((d - q) % 2 != 0) val = -val;
      out.values[q][sigma.rays] = val;
      if (q > d - k && !is_zero(val))
        throw std::logic_error("fiber profile fails to vanish above the leading level");
      if (q == d - k) {
        Rat want = Rat(a.at(sigma));
        if ((d + 1 - k) % 2 != 0) want = -want;
        if (val != want)
          throw std::logic_error("fiber profile disagrees with the leading weight");
      }
    }
  }
  for (const Flag& fl : flags(f, d - k))
    if (!is_zero(a.at(Cone{fl.chain.back(), d - k + 1}))) out.support.push_back(fl.chain);
  return out;
}

// Intersection number of lifts: the tropical number with the global sign
// (-1)^{d(d+1)/2 + d - q}, q the dimension of the first cycle's flags.
inline Int lift_intersection(const TropicalInput& in, const Subdivision& sub,
                             const StarFan& st1, const IWeight& a1,
                             const StarFan& st2, const IWeight& a2,
                             std::uint64_t seed = 2026) {
  int d = in.rank - 1;
  int q = d - a1.codim;
  Int t = tropical_intersection(in, sub, st1, a1, st2, a2, seed);
  int s = (d * (d + 1)) / 2 + d - q;
  return s % 2 == 0 ? t : -t;
}

enum class ExportFormat { json, obj };

// Serialized cell complex: JSON lists every cell with exact integer fiber
// vertices, base cone chains, orientation frames, and coefficients; OBJ embeds
// the base simplices via supplied barycenter coordinates (rank <= 3 only).
inline std::string export_complex(const CellChain& ch, ExportFormat fmt,
                                  const std::map<std::vector<int>, QVec>* bary = nullptr) {
  if (fmt == ExportFormat::json) {
    nlohmann::json cells = nlohmann::json::array();
    for (const auto& [cell, oc] : ch.cells) {
      nlohmann::json jc;
      jc["base"] = cell.base;
      nlohmann::json fib = nlohmann::json::array();
      for (const Vec& v : cell.fiber) {
        nlohmann::json coords = nlohmann::json::array();
        for (const Int& x : v.x) coords.push_back(x.get_str());
        fib.push_back(coords);
      }
      jc["fiber"] = fib;
      nlohmann::json frame = nlohmann::json::array();
      for (const auto& [mask, c] : oc.frame.c) {
        nlohmann::json term;
        nlohmann::json idx = nlohmann::json::array();
        for (int i = 0; i < oc.frame.rank; ++i)
          if (mask & (1u << i)) idx.push_back(i);
        term["indices"] = idx;
        term["coeff"] = c.get_str();
        frame.push_back(term);
      }
      jc["orientation"] = frame;
      jc["coefficient"] = oc.coeff.get_str();
      cells.push_back(jc);
    }
    nlohmann::json root;
    root["schema"] = "tropic-cell-complex/1";
    root["mod_lattice"] = ch.mod_lattice;
    root["cells"] = cells;
    return root.dump(2) + "\n";
  }
  if (ch.fan->rank > 3)
    throw std::invalid_argument("OBJ export only supports rank up to 3");
  if (!bary) throw std::invalid_argument("OBJ export needs base coordinates");
  std::ostringstream os;
  os << "# cell complex, " << ch.cells.size() << " cells\n";
  int next = 1;
  for (const auto& [cell, oc] : ch.cells) {
    os << "# cell coeff " << oc.coeff.get_str() << " fiber-verts " << cell.fiber.size() << "\n";
    std::vector<int> ids;
    for (const auto& rays : cell.base) {
      const QVec& b = bary->at(rays);
      os << "v";
      for (int i = 0; i < b.rank(); ++i) os << " " << b.x[i].get_d();
      for (int i = b.rank(); i < 3; ++i) os << " 0";
      os << "\n";
      ids.push_back(next++);
    }
    if (ids.size() == 1) os << "p " << ids[0] << "\n";
    if (ids.size() == 2) os << "l " << ids[0] << " " << ids[1] << "\n";
    if (ids.size() == 3) os << "f " << ids[0] << " " << ids[1] << " " << ids[2] << "\n";
  }
  return os.str();
}

}  // namespace tropic
