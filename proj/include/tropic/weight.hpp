// Minkowski weights on complete simplicial fans and the fan displacement cup
// product. A codimension-k weight assigns a coefficient to every cone of
// dimension rank-k; balancing makes it a Chow cohomology class. Coefficients
// are templated: exact integers for the core theory, rationals for Chern
// characters, complex doubles for the period pipeline.
#pragma once

#include <complex>
#include <random>

#include "tropic/fan.hpp"
#include "tropic/multivector.hpp"

namespace tropic {

namespace detail {
inline Int scale_coeff(const Int& v, const Int& s) { return v * s; }
inline Rat scale_coeff(const Rat& v, const Int& s) { return v * Rat(s); }
inline Cplx scale_coeff(const Cplx& v, const Int& s) { return v * s.get_d(); }
inline bool coeff_zero(const Int& v) { return is_zero(v); }
inline bool coeff_zero(const Rat& v) { return is_zero(v); }
inline bool coeff_zero(const Cplx& v) { return v == Cplx(0.0, 0.0); }
}  // namespace detail

template <class T>
struct Weight {
  const Fan* fan = nullptr;
  int codim = 0;
  std::vector<T> vals;  // indexed parallel to fan->at(dim())

  int dim() const { return fan->rank - codim; }

  static Weight zero(const Fan& f, int codim) {
    Weight w;
    w.fan = &f;
    w.codim = codim;
    w.vals.assign(f.at(f.rank - codim).size(), T(0));
    return w;
  }
  static Weight ones(const Fan& f, int codim) {
    Weight w = zero(f, codim);
    std::fill(w.vals.begin(), w.vals.end(), T(1));
    return w;
  }

  bool is_zero_weight() const {
    for (const T& v : vals)
      if (!detail::coeff_zero(v)) return false;
    return true;
  }
  Weight operator+(const Weight& o) const {
    Weight r = *this;
    for (size_t i = 0; i < vals.size(); ++i) r.vals[i] = r.vals[i] + o.vals[i];
    return r;
  }
  Weight operator-() const {
    Weight r = *this;
    for (auto& v : r.vals) v = -v;
    return r;
  }
  Weight operator-(const Weight& o) const { return *this + (-o); }
  template <class S>
  Weight scaled(const S& s) const {
    Weight r = *this;
    for (auto& v : r.vals) v = v * s;
    return r;
  }
  bool operator==(const Weight& o) const {
    return fan == o.fan && codim == o.codim && vals == o.vals;
  }

  const T& at(const Cone& c) const {
    auto loc = fan->find(c.rays);
    return vals[loc->second];
  }
};

using IWeight = Weight<Int>;
using QWeight = Weight<Rat>;
using CWeight = Weight<Cplx>;

// For tau in Sigma(dim-1): sum of a(sigma) * (extra ray of sigma over tau)
// must lie in the linear span of tau. Returns the first violating tau, or
// nullopt when balanced. Exact coefficient rings only.
template <class T>
inline std::optional<Cone> balance_violation(const Weight<T>& a) {
  const Fan& f = *a.fan;
  int dim = a.dim();
  if (dim == 0) return std::nullopt;
  for (const Cone& tau : f.at(dim - 1)) {
    std::vector<T> sums(f.rank, T(0));
    for (int ci : f.cofaces(tau, dim)) {
      const Cone& sigma = f.at(dim)[ci];
      const T& v = a.vals[ci];
      for (int rid : sigma.rays) {
        if (std::binary_search(tau.rays.begin(), tau.rays.end(), rid)) continue;
        for (int j = 0; j < f.rank; ++j) sums[j] = sums[j] + detail::scale_coeff(v, f.rays[rid].x[j]);
      }
    }
    // membership in span(tau): solve over the tau ray matrix
    QMat m(f.rank, QRow(tau.rays.size()));
    QRow rhs(f.rank);
    for (size_t k = 0; k < tau.rays.size(); ++k)
      for (int j = 0; j < f.rank; ++j) m[j][k] = Rat(f.rays[tau.rays[k]].x[j]);
    for (int j = 0; j < f.rank; ++j) rhs[j] = Rat(sums[j]);
    if (!qmat_solve(m, rhs).has_value()) return tau;
  }
  return std::nullopt;
}

template <class T>
inline bool balance_check(const Weight<T>& a) {
  return !balance_violation(a).has_value();
}

// Approximate balancing for complex coefficients (used after tensoring exact
// classes with transcendental scalars): residual of the span-projection below
// tol relative to the sum's magnitude.
inline bool balance_check_approx(const CWeight& a, double tol = 1e-10) {
  const Fan& f = *a.fan;
  int dim = a.dim();
  if (dim == 0) return true;
  for (const Cone& tau : f.at(dim - 1)) {
    std::vector<Cplx> sums(f.rank, Cplx(0, 0));
    double mag = 0;
    for (int ci : f.cofaces(tau, dim)) {
      const Cone& sigma = f.at(dim)[ci];
      for (int rid : sigma.rays) {
        if (std::binary_search(tau.rays.begin(), tau.rays.end(), rid)) continue;
        for (int j = 0; j < f.rank; ++j) sums[j] += a.vals[ci] * f.rays[rid].x[j].get_d();
      }
      mag += std::abs(a.vals[ci]);
    }
    // project out span(tau) using a rational annihilator basis
    QMat m;
    for (int rid : tau.rays) {
      QRow row(f.rank);
      for (int j = 0; j < f.rank; ++j) row[j] = Rat(f.rays[rid].x[j]);
      m.push_back(std::move(row));
    }
    double resid = 0;
    for (const QRow& y : qmat_kernel(m)) {
      Cplx r(0, 0);
      double ynorm = 0;
      for (int j = 0; j < f.rank; ++j) {
        r += sums[j] * y[j].get_d();
        ynorm += y[j].get_d() * y[j].get_d();
      }
      resid = std::max(resid, std::abs(r) / std::sqrt(ynorm));
    }
    if (resid > tol * std::max(1.0, mag)) return false;
  }
  return true;
}

struct GenericVector {
  QVec m0;
  bool certified = false;
  std::uint64_t seed = 0;
};

namespace detail {

struct PairSolve {
  bool feasible = false;
  bool generic = true;  // false when m0 fails transversality for this pair
};

// Decide sigma ∩ (m0 + sigma') != {} for simplicial cones whose shared face
// is exactly cone(shared rays): square system
//   [extras(sigma) | -extras(sigma') | shared] x = m0,
// feasible iff the extras coordinates are strictly positive (shared ones are
// free: they appear on both sides of m0 = p - p'). A singular matrix means the
// pair spans a proper subspace; then the pair is infeasible provided m0 lies
// outside that span (otherwise m0 is not generic).
inline PairSolve displacement_solve(const Fan& f, const Cone& c1, const Cone& c2,
                                    const std::vector<int>& shared, const QVec& m0) {
  int n = f.rank;
  std::vector<int> cols;  // ray ids with orientation; extras first
  std::vector<int> sign;
  int extras = 0;
  for (int r : c1.rays)
    if (!std::binary_search(shared.begin(), shared.end(), r)) {
      cols.push_back(r);
      sign.push_back(1);
      ++extras;
    }
  for (int r : c2.rays)
    if (!std::binary_search(shared.begin(), shared.end(), r)) {
      cols.push_back(r);
      sign.push_back(-1);
      ++extras;
    }
  for (int r : shared) {
    cols.push_back(r);
    sign.push_back(1);
  }
  PairSolve out;
  if (static_cast<int>(cols.size()) != n) {  // shared face larger than required
    out.feasible = false;
    return out;
  }
  QMat m(n, QRow(n));
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) m[i][j] = Rat(sign[j] * f.rays[cols[j]].x[i]);
  if (is_zero(qmat_det(m))) {
    // proper subspace: infeasible iff m0 avoids it
    QRow rhs(n);
    for (int i = 0; i < n; ++i) rhs[i] = m0.x[i];
    if (qmat_solve(m, rhs).has_value()) out.generic = false;
    out.feasible = false;
    return out;
  }
  QRow rhs(n);
  for (int i = 0; i < n; ++i) rhs[i] = m0.x[i];
  auto sol = qmat_solve(m, rhs);
  bool pos = true;
  for (int j = 0; j < n; ++j) {
    if (is_zero((*sol)[j])) out.generic = false;
    if (j < extras && sgn((*sol)[j]) <= 0) pos = false;
  }
  out.feasible = pos;
  return out;
}

inline std::vector<int> shared_rays(const Cone& a, const Cone& b) {
  std::vector<int> s;
  std::set_intersection(a.rays.begin(), a.rays.end(), b.rays.begin(), b.rays.end(),
                        std::back_inserter(s));
  return s;
}

}  // namespace detail

// Transversality certificate, two parts. (1) m0 avoids the span of every cone
// pair generating a proper subspace, so any such pair misses the displaced
// cone entirely. (2) Every pair whose shared face has exactly the
// complementary dimension (dim a + dim b - shared = rank) yields a nonsingular
// displacement system whose solution has no vanishing coordinate.
inline bool certify_generic(const Fan& f, const QVec& m0) {
  int n = f.rank;
  QRow rhs(n);
  for (int i = 0; i < n; ++i) rhs[i] = m0.x[i];
  for (int da = 1; da <= n; ++da)
    for (int db = da; db <= n; ++db)
      for (const Cone& c1 : f.at(da))
        for (const Cone& c2 : f.at(db)) {
          auto sh = detail::shared_rays(c1, c2);
          std::vector<int> all = c1.rays;
          for (int r : c2.rays)
            if (!std::binary_search(c1.rays.begin(), c1.rays.end(), r)) all.push_back(r);
          QMat cols(n, QRow(all.size()));
          for (size_t j = 0; j < all.size(); ++j)
            for (int i = 0; i < n; ++i) cols[i][j] = Rat(f.rays[all[j]].x[i]);
          if (qmat_rank(cols) < n) {
            QMat aug = cols;
            for (int i = 0; i < n; ++i) aug[i].push_back(rhs[i]);
            if (qmat_rank(aug) == qmat_rank(cols)) return false;  // m0 in the span
            continue;
          }
          if (static_cast<int>(sh.size()) != da + db - n) continue;
          if (!detail::displacement_solve(f, c1, c2, sh, m0).generic) return false;
          if (!detail::displacement_solve(f, c2, c1, sh, m0).generic) return false;
        }
  return true;
}

// Deterministic seeded search for a certified generic displacement vector.
inline GenericVector find_generic(const Fan& f, std::uint64_t seed = 2026,
                                  int budget = 200) {
  std::mt19937_64 rng(seed);
  for (int attempt = 0; attempt < budget; ++attempt) {
    int range = 3 + attempt / 10;
    std::uniform_int_distribution<int> d(-range, range);
    QVec m0(f.rank, f.tag);
    bool nonzero = false;
    for (int i = 0; i < f.rank; ++i) {
      m0.x[i] = Rat(d(rng));
      if (!is_zero(m0.x[i])) nonzero = true;
    }
    if (!nonzero) continue;
    if (certify_generic(f, m0)) return {m0, true, seed};
  }
  throw std::runtime_error("generic vector search exhausted budget of " +
                           std::to_string(budget) + " samples");
}

// Fan displacement rule: (a ∪ b)(rho) sums a(sigma) b(sigma') [M : Z sigma + Z sigma']
// over pairs of complementary-dimension cofaces of rho meeting after the
// generic shift.
template <class T>
inline Weight<T> cup(const Weight<T>& a, const Weight<T>& b, const GenericVector& m0) {
  if (a.fan != b.fan) throw std::invalid_argument("cup of weights on different fans");
  if (!m0.certified) throw std::invalid_argument("cup requires a certified generic vector");
  const Fan& f = *a.fan;
  int n = f.rank;
  if (a.codim + b.codim > n) throw std::invalid_argument("cup exceeds top codimension");
  Weight<T> out = Weight<T>::zero(f, a.codim + b.codim);
  int dr = out.dim(), da = a.dim(), db = b.dim();
  for (size_t ri = 0; ri < f.at(dr).size(); ++ri) {
    const Cone& rho = f.at(dr)[ri];
    T acc(0);
    for (int i : f.cofaces(rho, da))
      for (int j : f.cofaces(rho, db)) {
        const Cone& c1 = f.at(da)[i];
        const Cone& c2 = f.at(db)[j];
        if (detail::shared_rays(c1, c2) != rho.rays) continue;
        auto ps = detail::displacement_solve(f, c1, c2, rho.rays, m0.m0);
        if (!ps.feasible) continue;
        auto idx = sublattice_index(f.cone_rays(c1), f.cone_rays(c2));
        acc = acc + detail::scale_coeff(T(a.vals[i] * b.vals[j]), *idx);
      }
    out.vals[ri] = acc;
  }
  return out;
}

template <class T>
inline T psi(const Weight<T>& a) {
  if (a.dim() != 1) throw std::invalid_argument("psi expects a codimension-d weight");
  T s(0);
  for (const T& v : a.vals) s = s + v;
  return s;
}

template <class T>
inline T degree(const Weight<T>& a) {
  if (a.dim() != 0) throw std::invalid_argument("degree expects a top-codimension weight");
  return a.vals.at(0);
}

// Lattice basis of the group of balanced codim-k weights: integer kernel of
// the stacked balancing conditions (one block per wall tau, rows indexed by an
// annihilator basis of span(tau)).
inline std::vector<IWeight> balanced_weight_basis(const Fan& f, int codim) {
  int dim = f.rank - codim;
  int ncones = static_cast<int>(f.at(dim).size());
  IMat sys;
  if (dim > 0) {
    for (const Cone& tau : f.at(dim - 1)) {
      QMat tau_rows;
      for (int rid : tau.rays) {
        QRow row(f.rank);
        for (int j = 0; j < f.rank; ++j) row[j] = Rat(f.rays[rid].x[j]);
        tau_rows.push_back(std::move(row));
      }
      if (tau_rows.empty()) tau_rows.push_back(QRow(f.rank, Rat(0)));
      for (const QRow& y : qmat_kernel(tau_rows)) {
        Int lcm_d = 1;
        for (const Rat& e : y) lcm_d = lcm(lcm_d, e.get_den());
        IRow row(ncones, Int(0));
        for (int ci : f.cofaces(tau, dim)) {
          const Cone& sigma = f.at(dim)[ci];
          for (int rid : sigma.rays) {
            if (std::binary_search(tau.rays.begin(), tau.rays.end(), rid)) continue;
            Int c = 0;
            for (int j = 0; j < f.rank; ++j) c += Int(y[j] * Rat(lcm_d)) * f.rays[rid].x[j];
            row[ci] += c;
          }
        }
        sys.push_back(std::move(row));
      }
    }
  }
  if (sys.empty()) sys.push_back(IRow(ncones, Int(0)));
  std::vector<IWeight> basis;
  for (const Vec& k : integer_kernel(sys, f.tag)) {
    IWeight w = IWeight::zero(f, codim);
    w.vals = k.x;
    basis.push_back(std::move(w));
  }
  return basis;
}

}  // namespace tropic
