// Exterior algebra over the rank-(d+1) lattices. Multivectors are sparse maps
// from basis subsets (bitmasks over {0..d}) to integers. The volume form is a
// sign choice on the full subset; contract_volume realizes the pairing
// X |-> <front ^ X, vol(N)> as an element of the opposite lattice's wedge.
#pragma once

#include <bit>
#include <cstdint>
#include <map>

#include "tropic/linalg.hpp"

namespace tropic {

namespace detail {
// Sign of merging two disjoint ascending index sets s, t into ascending order:
// (-1)^{# pairs (i in s, j in t) with i > j}.
inline int shuffle_sign(std::uint32_t s, std::uint32_t t) {
  int inversions = 0;
  for (std::uint32_t rest = s; rest; rest &= rest - 1) {
    std::uint32_t low = rest & ~(rest - 1);
    inversions += std::popcount(t & (low - 1));
  }
  return inversions % 2 == 0 ? 1 : -1;
}
}  // namespace detail

struct MultiVector {
  int rank = 0;
  int degree = 0;
  Lattice tag = Lattice::M;
  std::map<std::uint32_t, Int> c;  // nonzero coefficients only

  MultiVector() = default;
  MultiVector(int rank_, int degree_, Lattice tag_) : rank(rank_), degree(degree_), tag(tag_) {}

  static MultiVector scalar(int rank, const Int& value, Lattice tag) {
    MultiVector m(rank, 0, tag);
    if (!is_zero(value)) m.c[0] = value;
    return m;
  }
  static MultiVector from_vector(const Vec& v) {
    MultiVector m(v.rank(), 1, v.tag);
    for (int i = 0; i < v.rank(); ++i)
      if (!is_zero(v.x[i])) m.c[1u << i] = v.x[i];
    return m;
  }

  bool zero() const { return c.empty(); }
  bool operator==(const MultiVector& o) const {
    return rank == o.rank && degree == o.degree && c == o.c;
  }

  void add_term(std::uint32_t mask, const Int& coeff) {
    if (is_zero(coeff)) return;
    Int& slot = c[mask];
    slot += coeff;
    if (is_zero(slot)) c.erase(mask);
  }

  MultiVector operator+(const MultiVector& o) const {
    MultiVector r = *this;
    for (const auto& [m, v] : o.c) r.add_term(m, v);
    return r;
  }
  MultiVector operator-() const {
    MultiVector r = *this;
    for (auto& [m, v] : r.c) v = -v;
    return r;
  }
  MultiVector operator-(const MultiVector& o) const { return *this + (-o); }
  MultiVector operator*(const Int& s) const {
    MultiVector r(rank, degree, tag);
    for (const auto& [m, v] : c) r.add_term(m, v * s);
    return r;
  }
};

inline MultiVector wedge(const MultiVector& a, const MultiVector& b) {
  if (a.tag != b.tag) throw std::invalid_argument("wedge across different lattices");
  if (a.degree + b.degree > a.rank) throw std::invalid_argument("degree exceeds rank");
  MultiVector r(a.rank, a.degree + b.degree, a.tag);
  for (const auto& [s, av] : a.c)
    for (const auto& [t, bv] : b.c) {
      if (s & t) continue;
      r.add_term(s | t, av * bv * detail::shuffle_sign(s, t));
    }
  return r;
}

inline MultiVector wedge(const std::vector<Vec>& vs, int rank, Lattice tag) {
  MultiVector r = MultiVector::scalar(rank, 1, tag);
  for (const Vec& v : vs) r = wedge(r, MultiVector::from_vector(v));
  return r;
}

struct VolumeForm {
  int rank = 0;
  int sign = 1;  // value on e_0 ^ ... ^ e_{rank-1} of the standard dual basis
};

// front in /\^k M  ->  the element g of /\^{rank-k} N with
// g(X) = <front ^ X, vol(N)> for X in /\^{rank-k} M (dual-basis coordinates).
inline MultiVector contract_volume(const MultiVector& front, const VolumeForm& vol) {
  if (front.tag != Lattice::M)
    throw std::invalid_argument("contract_volume expects an M-side multivector");
  std::uint32_t full = (front.rank >= 32) ? ~0u : ((1u << front.rank) - 1);
  MultiVector g(front.rank, front.rank - front.degree, Lattice::N);
  for (const auto& [s, v] : front.c) {
    std::uint32_t t = full & ~s;
    g.add_term(t, v * detail::shuffle_sign(s, t) * vol.sign);
  }
  return g;
}

// Dual pairing of equal-degree multivectors on M and N, with
// <m1^...^mk, n1*^...^nk*> = det(<m_i, n_j>): diagonal in dual bases.
inline Int mv_pair(const MultiVector& a, const MultiVector& b) {
  if (a.degree != b.degree) throw std::invalid_argument("pairing degree mismatch");
  if (a.tag == b.tag) throw std::invalid_argument("pairing needs opposite lattices");
  Int s = 0;
  for (const auto& [m, v] : a.c) {
    auto it = b.c.find(m);
    if (it != b.c.end()) s += v * it->second;
  }
  return s;
}

}  // namespace tropic
