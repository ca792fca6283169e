// Divisor and K-group calculus on the smooth projective toric variety of a
// complete unimodular fan: toric divisors and their codim-1 Minkowski weights,
// formal K-classes of line bundles, Chern characters as graded rational
// weights, anti-nef decompositions, structure sheaves of ample complete
// intersections, and the inverse construction turning a balanced weight into a
// K-class with prescribed leading Chern component.
#pragma once

#include "tropic/weight.hpp"

namespace tropic {

struct ToricDivisor {
  const Fan* fan = nullptr;
  std::vector<Int> coeff;  // per ray

  static ToricDivisor zero(const Fan& f) { return {&f, std::vector<Int>(f.nrays(), 0)}; }
  static ToricDivisor ray(const Fan& f, int rid) {
    ToricDivisor d = zero(f);
    d.coeff[rid] = 1;
    return d;
  }
  // div of the character n: coefficient <r, n> on each ray r
  static ToricDivisor principal(const Fan& f, const Vec& n) {
    ToricDivisor d = zero(f);
    for (int r = 0; r < f.nrays(); ++r) d.coeff[r] = dot(f.rays[r], n);
    return d;
  }

  ToricDivisor operator+(const ToricDivisor& o) const {
    ToricDivisor r = *this;
    for (size_t i = 0; i < coeff.size(); ++i) r.coeff[i] += o.coeff[i];
    return r;
  }
  ToricDivisor operator-() const {
    ToricDivisor r = *this;
    for (auto& c : r.coeff) c = -c;
    return r;
  }
  ToricDivisor operator-(const ToricDivisor& o) const { return *this + (-o); }
  ToricDivisor scaled(const Int& s) const {
    ToricDivisor r = *this;
    for (auto& c : r.coeff) c *= s;
    return r;
  }
};

// Support function of O(D) in the min-convention: phi(r) = -coeff[r].
inline SupportFunction divisor_support(const ToricDivisor& d) {
  SupportFunction sf;
  sf.fan = d.fan;
  for (const Int& c : d.coeff) sf.vals.push_back(Rat(-c));
  return sf;
}

inline bool is_nef_divisor(const ToricDivisor& d) { return is_nef_ample(divisor_support(d)).first; }
inline bool is_ample_divisor(const ToricDivisor& d) {
  return is_nef_ample(divisor_support(d)).second;
}
inline bool is_anti_nef_divisor(const ToricDivisor& d) { return is_nef_divisor(-d); }

// Codim-1 Minkowski weight of [D]: on each wall tau, linearize the divisor
// coefficients over one adjacent maximal cone and evaluate the correction on
// the opposite ray. Unimodularity makes the linearization integral.
inline IWeight divisor_weight(const ToricDivisor& d) {
  const Fan& f = *d.fan;
  if (!f.complete || !f.unimodular)
    throw std::invalid_argument("divisor weights need a complete unimodular fan");
  int n = f.rank;
  IWeight w = IWeight::zero(f, 1);
  for (size_t t = 0; t < f.at(n - 1).size(); ++t) {
    const Cone& tau = f.at(n - 1)[t];
    auto adj = f.cofaces(tau, n);
    const Cone& sigma = f.at(n)[adj[0]];
    QMat m;
    QRow rhs;
    for (int rid : sigma.rays) {
      QRow row(n);
      for (int j = 0; j < n; ++j) row[j] = Rat(f.rays[rid].x[j]);
      m.push_back(std::move(row));
      rhs.push_back(Rat(d.coeff[rid]));
    }
    auto u = qmat_solve(m, rhs);
    const Cone& other = f.at(n)[adj[1]];
    int opp = -1;
    for (int rid : other.rays)
      if (!std::binary_search(tau.rays.begin(), tau.rays.end(), rid)) opp = rid;
    Rat val = Rat(d.coeff[opp]);
    for (int j = 0; j < n; ++j) val -= Rat(f.rays[opp].x[j]) * (*u)[j];
    if (val.get_den() != 1) throw std::logic_error("non-integral wall weight");
    w.vals[t] = val.get_num();
  }
  return w;
}

// Formal integer combination of line bundles, keyed by divisor coefficients.
struct KClass {
  const Fan* fan = nullptr;
  std::map<std::vector<Int>, Int> terms;

  static KClass zero(const Fan& f) { return {&f, {}}; }
  static KClass unit(const Fan& f) {
    KClass x = zero(f);
    x.terms[std::vector<Int>(f.nrays(), 0)] = 1;
    return x;
  }
  static KClass line_bundle(const ToricDivisor& d, const Int& mult = 1) {
    KClass x = zero(*d.fan);
    x.add(d.coeff, mult);
    return x;
  }

  void add(const std::vector<Int>& key, const Int& mult) {
    if (is_zero(mult)) return;
    Int& slot = terms[key];
    slot += mult;
    if (is_zero(slot)) terms.erase(key);
  }
  KClass operator+(const KClass& o) const {
    KClass r = *this;
    for (const auto& [k, m] : o.terms) r.add(k, m);
    return r;
  }
  KClass operator-() const {
    KClass r = *this;
    for (auto& [k, m] : r.terms) m = -m;
    return r;
  }
  KClass operator-(const KClass& o) const { return *this + (-o); }
  KClass scaled(const Int& s) const {
    KClass r = zero(*fan);
    for (const auto& [k, m] : terms) r.add(k, m * s);
    return r;
  }
  bool operator==(const KClass& o) const { return fan == o.fan && terms == o.terms; }
};

inline KClass kmul(const KClass& a, const KClass& b) {
  KClass r = KClass::zero(*a.fan);
  for (const auto& [ka, ma] : a.terms)
    for (const auto& [kb, mb] : b.terms) {
      std::vector<Int> k = ka;
      for (size_t i = 0; i < k.size(); ++i) k[i] += kb[i];
      r.add(k, ma * mb);
    }
  return r;
}

inline KClass kpow(const KClass& a, int e) {
  KClass r = KClass::unit(*a.fan);
  for (int i = 0; i < e; ++i) r = kmul(r, a);
  return r;
}

// Rational Chow class graded by codimension 0..rank; the unit is the
// fundamental weight (all-ones in codim 0).
struct GradedClass {
  const Fan* fan = nullptr;
  std::vector<QWeight> comp;

  static GradedClass zero(const Fan& f) {
    GradedClass g;
    g.fan = &f;
    for (int c = 0; c <= f.rank; ++c) g.comp.push_back(QWeight::zero(f, c));
    return g;
  }
  static GradedClass one(const Fan& f) {
    GradedClass g = zero(f);
    g.comp[0] = QWeight::ones(f, 0);
    return g;
  }

  bool is_zero_class() const {
    for (const auto& w : comp)
      if (!w.is_zero_weight()) return false;
    return true;
  }
  GradedClass operator+(const GradedClass& o) const {
    GradedClass r = *this;
    for (size_t c = 0; c < comp.size(); ++c) r.comp[c] = r.comp[c] + o.comp[c];
    return r;
  }
  GradedClass operator-(const GradedClass& o) const {
    GradedClass r = *this;
    for (size_t c = 0; c < comp.size(); ++c) r.comp[c] = r.comp[c] - o.comp[c];
    return r;
  }
  GradedClass scaled(const Rat& s) const {
    GradedClass r = *this;
    for (auto& w : r.comp) w = w.scaled(s);
    return r;
  }
  bool operator==(const GradedClass& o) const { return fan == o.fan && comp == o.comp; }
};

inline GradedClass graded_mul(const GradedClass& x, const GradedClass& y,
                              const GenericVector& m0) {
  GradedClass r = GradedClass::zero(*x.fan);
  int n = x.fan->rank;
  for (int i = 0; i <= n; ++i)
    for (int j = 0; i + j <= n; ++j) {
      if (x.comp[i].is_zero_weight() || y.comp[j].is_zero_weight()) continue;
      r.comp[i + j] = r.comp[i + j] + cup(x.comp[i], y.comp[j], m0);
    }
  return r;
}

inline QWeight to_rational(const IWeight& w) {
  QWeight q = QWeight::zero(*w.fan, w.codim);
  for (size_t i = 0; i < w.vals.size(); ++i) q.vals[i] = Rat(w.vals[i]);
  return q;
}

// exp([D]) truncated at codim rank, extended linearly over the K-class.
inline GradedClass chern(const KClass& x, const GenericVector& m0) {
  const Fan& f = *x.fan;
  GradedClass total = GradedClass::zero(f);
  for (const auto& [key, mult] : x.terms) {
    ToricDivisor d{&f, key};
    QWeight dw = to_rational(divisor_weight(d));
    GradedClass e = GradedClass::one(f).scaled(Rat(mult));
    QWeight pow = QWeight::ones(f, 0);
    Int fact = 1;
    for (int c = 1; c <= f.rank; ++c) {
      pow = cup(pow, dw, m0);
      fact *= c;
      e.comp[c] = pow.scaled(Rat(mult) / Rat(fact));
    }
    total = total + e;
  }
  return total;
}

// Deterministic ample search: the all-ones divisor first, then coefficient
// vectors by increasing sup-norm in lexicographic order.
inline ToricDivisor find_ample(const Fan& f, int max_norm = 3) {
  ToricDivisor ones = ToricDivisor::zero(f);
  for (auto& c : ones.coeff) c = 1;
  if (is_ample_divisor(ones)) return ones;
  int k = f.nrays();
  for (int s = 1; s <= max_norm; ++s) {
    std::vector<int> v(k, -s);
    while (true) {
      int sup = 0;
      for (int c : v) sup = std::max(sup, std::abs(c));
      if (sup == s) {
        ToricDivisor d = ToricDivisor::zero(f);
        for (int i = 0; i < k; ++i) d.coeff[i] = v[i];
        if (is_ample_divisor(d)) return d;
      }
      int i = k - 1;
      while (i >= 0 && v[i] == s) v[i--] = -s;
      if (i < 0) break;
      ++v[i];
    }
  }
  throw std::runtime_error("no ample divisor found up to sup-norm " + std::to_string(max_norm));
}

// Rewrite every line bundle [L] as [N] * (sum_{i=0}^{rank}(1-[M])^i)^n with M
// a fixed anti-ample bundle and N = L + n*M anti-nef; valid in K-theory since
// ch((1-[M])^{rank+1}) vanishes. All output bundles are anti-nef.
inline KClass anti_nef_decompose(const KClass& x, const ToricDivisor& anti_ample) {
  const Fan& f = *x.fan;
  if (!is_ample_divisor(-anti_ample))
    throw std::invalid_argument("reference divisor must be anti-ample");
  KClass m = KClass::line_bundle(anti_ample);
  KClass geo = KClass::zero(f);  // sum_{i=0}^{rank} (1-[M])^i
  KClass one_minus_m = KClass::unit(f) - m;
  KClass p = KClass::unit(f);
  for (int i = 0; i <= f.rank; ++i) {
    geo = geo + p;
    p = kmul(p, one_minus_m);
  }
  KClass out = KClass::zero(f);
  for (const auto& [key, mult] : x.terms) {
    ToricDivisor l{&f, key};
    int n = 0;
    while (!is_anti_nef_divisor(l + anti_ample.scaled(n))) ++n;
    KClass term = KClass::line_bundle(l + anti_ample.scaled(n), mult);
    for (int i = 0; i < n; ++i) term = kmul(term, geo);
    out = out + term;
  }
  for (const auto& [key, mult] : out.terms)
    if (!is_anti_nef_divisor(ToricDivisor{&f, key}))
      throw std::logic_error("decomposition produced a bundle that is not anti-nef");
  return out;
}

inline KClass anti_nef_decompose(const KClass& x) {
  return anti_nef_decompose(x, -find_ample(*x.fan));
}

// [O of the intersection of general sections of the given nef bundles]:
// inclusion-exclusion over subsets.
inline KClass structure_sheaf_class(const Fan& f, const std::vector<ToricDivisor>& divisors,
                                    bool require_ample = false) {
  for (const auto& d : divisors) {
    if (require_ample && !is_ample_divisor(d))
      throw std::invalid_argument("structure sheaf construction expects ample divisors");
    if (!require_ample && !is_nef_divisor(d))
      throw std::invalid_argument("structure sheaf construction expects nef divisors");
  }
  size_t s = divisors.size();
  KClass out = KClass::zero(f);
  for (unsigned mask = 0; mask < (1u << s); ++mask) {
    ToricDivisor sum = ToricDivisor::zero(f);
    int bits = 0;
    for (size_t i = 0; i < s; ++i)
      if (mask & (1u << i)) {
        sum = sum + divisors[i];
        ++bits;
      }
    out.add((-sum).coeff, bits % 2 == 0 ? 1 : -1);
  }
  return out;
}

// Leading index k = min({d} union {k' : ch_{k'} != 0}) and the integral weight
// a = (-1)^{d+1-k} ch_k, with d = rank - 1.
inline std::pair<int, IWeight> leading_index_and_weight(const KClass& x,
                                                        const GenericVector& m0) {
  const Fan& f = *x.fan;
  int d = f.rank - 1;
  GradedClass ch = chern(x, m0);
  int k = d;
  for (int c = 0; c <= f.rank; ++c)
    if (!ch.comp[c].is_zero_weight()) {
      k = std::min(k, c);
      break;
    }
  IWeight a = IWeight::zero(f, k);
  for (size_t i = 0; i < a.vals.size(); ++i) {
    Rat v = ch.comp[k].vals[i];
    if (v.get_den() != 1)
      throw std::logic_error("leading Chern component is not integral");
    a.vals[i] = v.get_num();
    if ((d + 1 - k) % 2 != 0) a.vals[i] = -a.vals[i];
  }
  return {k, a};
}

// Integral solution of A x = b via Smith normal form; nullopt when infeasible.
inline std::optional<IRow> integer_solve(const IMat& a, const IRow& b) {
  size_t rows = a.size(), cols = a.empty() ? 0 : a[0].size();
  SmithForm s = smith_form(a);
  IRow y(rows, Int(0));
  for (size_t i = 0; i < rows; ++i)
    for (size_t j = 0; j < rows; ++j) y[i] += s.u[i][j] * b[j];
  IRow xp(cols, Int(0));
  for (size_t i = 0; i < rows; ++i) {
    Int di = (i < cols) ? s.d[i][i] : Int(0);
    if (is_zero(di)) {
      if (!is_zero(y[i])) return std::nullopt;
    } else {
      if (!is_zero(Int(y[i] % di))) return std::nullopt;
      xp[i] = y[i] / di;
    }
  }
  IRow x(cols, Int(0));
  for (size_t i = 0; i < cols; ++i)
    for (size_t j = 0; j < cols; ++j) x[i] += s.v[i][j] * xp[j];
  return x;
}

// Inverse construction: produce a K-class whose leading index is a.codim and
// whose leading weight is a. Steps: express a as an integer combination of
// products of ray divisor classes over cones of dimension a.codim, split each
// ray divisor into a difference of amples against a reference ample divisor,
// expand, and sum signed structure sheaves of ample complete intersections.
inline KClass weight_to_kclass(const IWeight& a, const GenericVector& m0) {
  const Fan& f = *a.fan;
  int d = f.rank - 1;
  int p = a.codim;  // = d - q
  if (a.is_zero_weight()) throw std::invalid_argument("zero weight has no leading lift");
  if (!balance_check(a)) throw std::invalid_argument("weight must be balanced");

  // products of ray divisor weights per dimension-p cone
  std::vector<IWeight> strata;
  for (const Cone& sigma : f.at(p)) {
    IWeight w = IWeight::ones(f, 0);
    for (int rid : sigma.rays) w = cup(w, divisor_weight(ToricDivisor::ray(f, rid)), m0);
    strata.push_back(std::move(w));
  }
  size_t ncones = strata.size(), neq = a.vals.size();
  IMat sys(neq, IRow(ncones, Int(0)));
  IRow rhs(neq);
  for (size_t e = 0; e < neq; ++e) {
    for (size_t c = 0; c < ncones; ++c) sys[e][c] = strata[c].vals[e];
    rhs[e] = a.vals[e];
  }
  auto sol = integer_solve(sys, rhs);
  if (!sol) throw std::runtime_error("weight is not an integer combination of strata classes");

  ToricDivisor d0 = find_ample(f);
  KClass out = KClass::zero(f);
  int q = d - p;
  Int outer_sign = (q + 1) % 2 == 0 ? 1 : -1;
  for (size_t c = 0; c < ncones; ++c) {
    if (is_zero((*sol)[c])) continue;
    const Cone& sigma = f.at(p)[c];
    // split each ray divisor D = (D + l*D0) - l*D0 with both parts ample
    std::vector<ToricDivisor> plus, minus;
    for (int rid : sigma.rays) {
      ToricDivisor dr = ToricDivisor::ray(f, rid);
      Int l = 1;
      while (!is_ample_divisor(dr + d0.scaled(l))) ++l;
      plus.push_back(dr + d0.scaled(l));
      minus.push_back(d0.scaled(l));
    }
    for (unsigned mask = 0; mask < (1u << p); ++mask) {
      std::vector<ToricDivisor> pick;
      int bits = 0;
      for (int i = 0; i < p; ++i) {
        if (mask & (1u << i)) {
          pick.push_back(minus[i]);
          ++bits;
        } else {
          pick.push_back(plus[i]);
        }
      }
      Int sign = bits % 2 == 0 ? 1 : -1;
      out = out + structure_sheaf_class(f, pick, /*require_ample=*/true)
                      .scaled(outer_sign * sign * (*sol)[c]);
    }
  }

  auto [k, lead] = leading_index_and_weight(out, m0);
  if (k != p || !(lead == a))
    throw std::logic_error("inverse construction failed to round-trip the weight");
  return out;
}

}  // namespace tropic
