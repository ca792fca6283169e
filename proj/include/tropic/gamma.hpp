// Leading asymptotics of period integrals as polynomials in L = log t:
// complex graded classes on star fans, the Gamma-class expansion, phase
// factors from leading coefficients, and the degree extraction that turns the
// cohomological formula into a log-polynomial. The only inexact arithmetic in
// the library lives here: transcendental constants and complex doubles enter
// at the last step, after all combinatorial inputs are computed exactly.
#pragma once

#include <cmath>

#include "tropic/kclass.hpp"
#include "tropic/tropical.hpp"

namespace tropic {

// gamma and zeta(2..7) as double literals; enough for rank <= 7
constexpr double kEulerGamma = 0.5772156649015329;
constexpr double kZeta[8] = {0, 0,
                             1.6449340668482264, 1.2020569031595943,
                             1.0823232337111382, 1.0369277551433699,
                             1.0173430619844491, 1.0083492773819228};

// Polynomial in L = log t with complex coefficients, degrees 0..rank; the
// marker records that the asymptotic formula carries an O(t^eps) remainder.
struct LogPolynomial {
  std::vector<Cplx> coeff;
  bool epsilon_marker = true;

  static LogPolynomial zero(int rank) { return {std::vector<Cplx>(rank + 1, Cplx(0)), true}; }

  Cplx eval(double t) const {
    double l = std::log(t);
    Cplx acc(0);
    double p = 1;
    for (const Cplx& c : coeff) {
      acc += c * p;
      p *= l;
    }
    return acc;
  }
};

// Graded class with complex coefficients, codims 0..rank.
struct CGraded {
  const Fan* fan = nullptr;
  std::vector<CWeight> comp;

  static CGraded zero(const Fan& f) {
    CGraded g;
    g.fan = &f;
    for (int c = 0; c <= f.rank; ++c) g.comp.push_back(CWeight::zero(f, c));
    return g;
  }
  static CGraded one(const Fan& f) {
    CGraded g = zero(f);
    g.comp[0] = CWeight::ones(f, 0);
    return g;
  }

  CGraded operator+(const CGraded& o) const {
    CGraded r = *this;
    for (size_t c = 0; c < comp.size(); ++c) r.comp[c] = r.comp[c] + o.comp[c];
    return r;
  }
  CGraded scaled(const Cplx& s) const {
    CGraded r = *this;
    for (auto& w : r.comp) w = w.scaled(s);
    return r;
  }
};

inline CWeight to_complex(const QWeight& w) {
  CWeight c = CWeight::zero(*w.fan, w.codim);
  for (size_t i = 0; i < w.vals.size(); ++i) c.vals[i] = Cplx(w.vals[i].get_d());
  return c;
}

inline CGraded to_complex(const GradedClass& g) {
  CGraded c = CGraded::zero(*g.fan);
  for (size_t i = 0; i < g.comp.size(); ++i) c.comp[i] = to_complex(g.comp[i]);
  return c;
}

inline CGraded cg_mul(const CGraded& x, const CGraded& y, const GenericVector& m0) {
  CGraded r = CGraded::zero(*x.fan);
  int n = x.fan->rank;
  for (int i = 0; i <= n; ++i)
    for (int j = 0; i + j <= n; ++j) {
      if (x.comp[i].is_zero_weight() || y.comp[j].is_zero_weight()) continue;
      r.comp[i + j] = r.comp[i + j] + cup(x.comp[i], y.comp[j], m0);
    }
  return r;
}

// exp of a class with vanishing codim-0 part (nilpotent, so the sum is finite)
inline CGraded cg_exp(const CGraded& x, const GenericVector& m0) {
  if (!x.comp[0].is_zero_weight())
    throw std::invalid_argument("exponential needs a vanishing scalar part");
  CGraded r = CGraded::one(*x.fan);
  CGraded p = CGraded::one(*x.fan);
  double fact = 1;
  for (int j = 1; j <= x.fan->rank; ++j) {
    p = cg_mul(p, x, m0);
    fact *= j;
    r = r + p.scaled(Cplx(1.0 / fact));
  }
  return r;
}

// Gamma class of the fan: prod_rays Gamma(1 + D_r) / Gamma(1 + sum D_r),
// via Gamma(1+x) = exp(-gamma x + sum_{k>=2} (-1)^k zeta(k) x^k / k). The
// codim-1 part cancels exactly, so the expansion starts in codim 2. Powers of
// the divisor classes are computed exactly; the zeta scalars enter once.
inline CGraded gamma_class(const Fan& f, const GenericVector& m0) {
  if (f.rank + 1 >= 8) throw std::invalid_argument("zeta table too small for this rank");
  std::vector<QWeight> divs;
  QWeight sigma = QWeight::zero(f, 1);
  for (int r = 0; r < f.nrays(); ++r) {
    divs.push_back(to_rational(divisor_weight(ToricDivisor::ray(f, r))));
    sigma = sigma + divs.back();
  }
  CGraded arg = CGraded::zero(f);
  std::vector<QWeight> pows = divs;
  QWeight spow = sigma;
  for (int k = 2; k <= f.rank; ++k) {
    for (auto& p : pows) p = cup(p, divs[&p - &pows[0]], m0);
    spow = cup(spow, sigma, m0);
    QWeight diff = spow.scaled(Rat(-1));
    for (const auto& p : pows) diff = diff + p;
    double c = kZeta[k] / k;
    if (k % 2 != 0) c = -c;
    arg.comp[k] = to_complex(diff).scaled(Cplx(c));
  }
  return cg_exp(arg, m0);
}

// Barycentric decomposition of an interior point of l * Delta: the minimal
// cell tau_v of the triangulation with v in l * tau_v, and the positive
// integers p_m with v = sum p_m * m, sum p_m = l.
struct VDecomposition {
  std::vector<int> tau;     // sorted marked-point indices of tau_v
  std::map<int, Int> p;     // point index -> coefficient, all in (0, l]
};

inline VDecomposition decompose_v(const TropicalInput& in, const Subdivision& sub, int l,
                                  const Vec& v) {
  if (l < 1) throw std::invalid_argument("the pole order l must be at least 1");
  std::vector<QVec> qpts;
  for (const Vec& p : in.points) qpts.emplace_back(p);
  Polytope delta = make_polytope(qpts, Lattice::M);
  for (const auto& h : delta.facets)
    if (Rat(dot(h.normal, v)) <= Rat(l) * h.offset)
      throw std::invalid_argument("point is not interior to the scaled polytope");

  for (const auto& face : sub.faces) {
    // solve v = sum p_i m_i, sum p_i = l over the face's vertices
    int n = in.rank;
    QMat m(n + 1, QRow(face.size()));
    QRow rhs(n + 1);
    for (size_t j = 0; j < face.size(); ++j) {
      for (int i = 0; i < n; ++i) m[i][j] = Rat(in.points[face[j]].x[i]);
      m[n][j] = 1;
    }
    for (int i = 0; i < n; ++i) rhs[i] = Rat(v.x[i]);
    rhs[n] = Rat(l);
    auto sol = qmat_solve(m, rhs);
    if (!sol) continue;
    bool strict = true;
    for (const Rat& c : *sol)
      if (sgn(c) <= 0) strict = false;
    if (!strict) continue;
    VDecomposition out;
    out.tau = face;
    for (size_t j = 0; j < face.size(); ++j) {
      if ((*sol)[j].get_den() != 1 || (*sol)[j] > Rat(l))
        throw std::logic_error("barycentric coefficients must be integers in (0, l]");
      out.p[face[j]] = (*sol)[j].get_num();
    }
    return out;
  }
  throw std::logic_error("no cell of the triangulation contains the point");
}

// Is conv({w} union tau) a cell of the triangulation?
inline bool tau_membership(const Subdivision& sub, int w_index, const std::vector<int>& tau) {
  std::vector<int> u = tau;
  if (!std::binary_search(u.begin(), u.end(), w_index)) {
    u.push_back(w_index);
    std::sort(u.begin(), u.end());
  }
  return sub.faces.count(u) == 1;
}

// Branch of arg(-c_m / c_w) per marked point adjacent to the center; empty
// means the principal value everywhere.
struct BranchChoice {
  std::map<int, double> arg;  // point index -> chosen argument
};

struct PeriodInput {
  int l = 1;
  Vec v;
  BranchChoice branch;
  KClass E;  // on the star fan of the center
};

// Leading asymptotic of the period integral for the form indexed by (l, v)
// over the lift attached to E at the star's center, as a polynomial in
// L = log t. When conv({w} union tau_v) is not a cell, the leading term
// vanishes and only the remainder marker survives.
inline LogPolynomial period_asymptotic(const TropicalInput& in, const Subdivision& sub,
                                       const StarFan& st, const PeriodInput& pi,
                                       const GenericVector& m0) {
  const Fan& f = st.fan;
  if (!f.complete) throw std::invalid_argument("period formulas need an interior center");
  if (pi.E.fan != &f) throw std::invalid_argument("the K-class must live on the star fan");
  int rank = f.rank, d = rank - 1;

  VDecomposition dec = decompose_v(in, sub, pi.l, pi.v);
  if (!tau_membership(sub, st.center_index, dec.tau)) return LogPolynomial::zero(rank);

  Int p_w = 0;
  if (auto it = dec.p.find(st.center_index); it != dec.p.end()) p_w = it->second;

  std::vector<QWeight> divs;
  QWeight sigma = QWeight::zero(f, 1);
  QWeight omega = QWeight::zero(f, 1);
  for (int r = 0; r < f.nrays(); ++r) {
    divs.push_back(to_rational(divisor_weight(ToricDivisor::ray(f, r))));
    sigma = sigma + divs.back();
    Rat dl = in.heights[st.ray_point[r]] - in.heights[st.center_index];
    omega = omega + divs.back().scaled(dl);
  }

  // E_{v,w}: product over points of tau_v adjacent to the center, then the
  // sigma factors for the center itself; all rational
  GradedClass evw = GradedClass::one(f);
  auto linear_factor = [&](const QWeight& dw, const Int& shift) {
    GradedClass g = GradedClass::zero(f);
    g.comp[0] = QWeight::ones(f, 0).scaled(Rat(shift));
    g.comp[1] = dw;
    return g;
  };
  for (int r = 0; r < f.nrays(); ++r) {
    auto it = dec.p.find(st.ray_point[r]);
    if (it == dec.p.end()) continue;
    for (Int i = 0; i < it->second; ++i) evw = graded_mul(evw, linear_factor(divs[r], i), m0);
  }
  for (Int i = 0; i < p_w; ++i)
    evw = graded_mul(evw, linear_factor(sigma, -i), m0);

  // phase: exp(-sum_m D_m log(-c_m / c_w)) with the chosen branch
  CRat cw = in.coeffs[st.center_index];
  CGraded phase_arg = CGraded::zero(f);
  for (int r = 0; r < f.nrays(); ++r) {
    CRat z = -(in.coeffs[st.ray_point[r]] / cw);
    Cplx zc = z.approx();
    double mod = std::abs(zc);
    double a;
    if (auto it = pi.branch.arg.find(st.ray_point[r]); it != pi.branch.arg.end()) {
      a = it->second;
      if (std::abs(std::exp(Cplx(0, a)) - zc / mod) > 1e-12)
        throw std::invalid_argument("branch argument inconsistent with the coefficient");
    } else {
      a = std::arg(zc);
    }
    Cplx log_z(std::log(mod), a);
    phase_arg.comp[1] = phase_arg.comp[1] + to_complex(divs[r]).scaled(-log_z);
  }

  CGraded total = gamma_class(f, m0);
  total = cg_mul(total, to_complex(evw), m0);
  GradedClass ch = chern(pi.E, m0);
  CGraded chc = CGraded::zero(f);
  const Cplx two_pi_i(0, 2 * M_PI);
  Cplx tp = 1;
  for (int c = 0; c <= rank; ++c) {
    chc.comp[c] = to_complex(ch.comp[c]).scaled(tp);
    tp *= two_pi_i;
  }
  total = cg_mul(total, chc, m0);
  total = cg_mul(total, cg_exp(phase_arg, m0), m0);

  // t^{-omega} = exp(-L omega): the coefficient of L^j pairs (-omega)^j / j!
  // against the codim (rank - j) part of the rest
  double pre = 1;
  for (int i = 2; i < pi.l; ++i) pre *= i;
  pre = 1 / pre;
  if ((d + mpz_get_si(p_w.get_mpz_t())) % 2 != 0) pre = -pre;

  LogPolynomial out = LogPolynomial::zero(rank);
  QWeight opow = QWeight::ones(f, 0);
  double fact = 1;
  for (int j = 0; j <= rank; ++j) {
    if (j > 0) {
      opow = cup(opow, omega, m0);
      fact *= j;
    }
    const CWeight& rest = total.comp[rank - j];
    if (rest.is_zero_weight()) continue;
    CWeight top = cup(to_complex(opow), rest, m0);
    Cplx val = top.vals[0] * (pre / fact);
    if (j % 2 != 0) val = -val;
    out.coeff[j] = val;
  }
  return out;
}

// Calabi-Yau specialization: reflexive polytope, center at the origin, l = 1,
// v = 0, and E the structure sheaf of a complete intersection of nef divisors.
inline LogPolynomial cy_period(const TropicalInput& in, const Subdivision& sub,
                               const StarFan& st, const std::vector<ToricDivisor>& nef_divisors,
                               const GenericVector& m0) {
  std::vector<QVec> qpts;
  for (const Vec& p : in.points) qpts.emplace_back(p);
  if (!is_reflexive(make_polytope(qpts, Lattice::M)))
    throw std::domain_error("the Newton polytope is not reflexive");
  Vec origin(std::vector<Int>(in.rank, 0), Lattice::M);
  if (!(st.center == origin))
    throw std::invalid_argument("the Calabi-Yau specialization needs the star at the origin");
  PeriodInput pi;
  pi.l = 1;
  pi.v = origin;
  pi.E = structure_sheaf_class(st.fan, nef_divisors);
  return period_asymptotic(in, sub, st, pi, m0);
}

}  // namespace tropic
