// Exact linear algebra over Z and Q at desk scale (rank <= 6, handfuls of
// vectors): Gaussian elimination, Smith normal form, sublattice indices,
// primitive-vector completion and quotient projections, saturated bases of
// spans. Dense, no pivot tricks; correctness over speed.
#pragma once

#include <algorithm>
#include <cassert>
#include <numeric>
#include <optional>
#include <utility>
#include <vector>

#include "tropic/arith.hpp"

namespace tropic {

enum class Lattice { M, N };

struct Vec {
  std::vector<Int> x;
  Lattice tag = Lattice::M;

  Vec() = default;
  explicit Vec(std::vector<Int> v, Lattice t = Lattice::M) : x(std::move(v)), tag(t) {}
  Vec(std::initializer_list<long> v, Lattice t = Lattice::M) : tag(t) {
    for (long e : v) x.emplace_back(e);
  }

  int rank() const { return static_cast<int>(x.size()); }
  bool zero() const {
    return std::all_of(x.begin(), x.end(), [](const Int& e) { return is_zero(e); });
  }
  bool operator==(const Vec& o) const { return x == o.x; }
  bool operator<(const Vec& o) const {
    return std::lexicographical_compare(x.begin(), x.end(), o.x.begin(), o.x.end());
  }

  Vec operator+(const Vec& o) const {
    Vec r = *this;
    for (int i = 0; i < rank(); ++i) r.x[i] += o.x[i];
    return r;
  }
  Vec operator-(const Vec& o) const {
    Vec r = *this;
    for (int i = 0; i < rank(); ++i) r.x[i] -= o.x[i];
    return r;
  }
  Vec operator-() const {
    Vec r = *this;
    for (auto& e : r.x) e = -e;
    return r;
  }
  Vec operator*(const Int& s) const {
    Vec r = *this;
    for (auto& e : r.x) e *= s;
    return r;
  }
};

struct QVec {
  std::vector<Rat> x;
  Lattice tag = Lattice::M;

  QVec() = default;
  explicit QVec(std::vector<Rat> v, Lattice t = Lattice::M) : x(std::move(v)), tag(t) {}
  explicit QVec(const Vec& v) : tag(v.tag) {
    for (const Int& e : v.x) x.emplace_back(e);
  }
  QVec(int n, Lattice t) : x(n), tag(t) {}

  int rank() const { return static_cast<int>(x.size()); }
  bool zero() const {
    return std::all_of(x.begin(), x.end(), [](const Rat& e) { return is_zero(e); });
  }
  bool operator==(const QVec& o) const { return x == o.x; }
  bool operator<(const QVec& o) const {
    return std::lexicographical_compare(x.begin(), x.end(), o.x.begin(), o.x.end());
  }

  QVec operator+(const QVec& o) const {
    QVec r = *this;
    for (int i = 0; i < rank(); ++i) r.x[i] += o.x[i];
    return r;
  }
  QVec operator-(const QVec& o) const {
    QVec r = *this;
    for (int i = 0; i < rank(); ++i) r.x[i] -= o.x[i];
    return r;
  }
  QVec operator*(const Rat& s) const {
    QVec r = *this;
    for (auto& e : r.x) e *= s;
    return r;
  }
};

inline Rat dot(const QVec& a, const QVec& b) {
  Rat s = 0;
  for (int i = 0; i < a.rank(); ++i) s += a.x[i] * b.x[i];
  return s;
}
inline Int dot(const Vec& a, const Vec& b) {
  Int s = 0;
  for (int i = 0; i < a.rank(); ++i) s += a.x[i] * b.x[i];
  return s;
}
inline Rat dot(const Vec& a, const QVec& b) {
  Rat s = 0;
  for (int i = 0; i < a.rank(); ++i) s += Rat(a.x[i]) * b.x[i];
  return s;
}

inline Int content(const Vec& v) {
  Int g = 0;
  for (const Int& e : v.x) g = gcd(g, e);
  return g;
}

inline bool is_primitive(const Vec& v) { return content(v) == 1; }

// v / content(v); zero vector stays zero.
inline Vec primitive_part(const Vec& v) {
  Int g = content(v);
  if (is_zero(g)) return v;
  Vec r = v;
  for (auto& e : r.x) e /= g;
  return r;
}

// ---------------------------------------------------------------------------
// Rational matrices (rows of QVec-like std::vector<Rat>).

using QRow = std::vector<Rat>;
using QMat = std::vector<QRow>;  // row major

inline QMat qmat_from_columns(const std::vector<QVec>& cols) {
  if (cols.empty()) return {};
  QMat m(cols[0].rank(), QRow(cols.size()));
  for (size_t j = 0; j < cols.size(); ++j)
    for (int i = 0; i < cols[j].rank(); ++i) m[i][j] = cols[j].x[i];
  return m;
}

inline QMat qmat_from_columns(const std::vector<Vec>& cols) {
  std::vector<QVec> q;
  q.reserve(cols.size());
  for (const Vec& v : cols) q.emplace_back(v);
  return qmat_from_columns(q);
}

inline Rat qmat_det(QMat m) {
  int n = static_cast<int>(m.size());
  Rat det = 1;
  for (int col = 0; col < n; ++col) {
    int piv = -1;
    for (int r = col; r < n; ++r)
      if (!is_zero(m[r][col])) { piv = r; break; }
    if (piv < 0) return 0;
    if (piv != col) { std::swap(m[piv], m[col]); det = -det; }
    det *= m[col][col];
    Rat inv = 1 / m[col][col];
    for (int r = col + 1; r < n; ++r) {
      if (is_zero(m[r][col])) continue;
      Rat f = m[r][col] * inv;
      for (int c = col; c < n; ++c) m[r][c] -= f * m[col][c];
    }
  }
  return det;
}

// Reduced row echelon; returns pivot column per row-rank entry.
inline std::vector<int> qmat_rref(QMat& m) {
  std::vector<int> pivots;
  if (m.empty()) return pivots;
  int rows = static_cast<int>(m.size()), cols = static_cast<int>(m[0].size());
  int r = 0;
  for (int c = 0; c < cols && r < rows; ++c) {
    int piv = -1;
    for (int i = r; i < rows; ++i)
      if (!is_zero(m[i][c])) { piv = i; break; }
    if (piv < 0) continue;
    std::swap(m[piv], m[r]);
    Rat inv = 1 / m[r][c];
    for (int j = c; j < cols; ++j) m[r][j] *= inv;
    for (int i = 0; i < rows; ++i) {
      if (i == r || is_zero(m[i][c])) continue;
      Rat f = m[i][c];
      for (int j = c; j < cols; ++j) m[i][j] -= f * m[r][j];
    }
    pivots.push_back(c);
    ++r;
  }
  return pivots;
}

inline int qmat_rank(QMat m) { return static_cast<int>(qmat_rref(m).size()); }

// Solve A x = b; empty optional when inconsistent. Underdetermined systems get
// the particular solution with free variables set to 0.
inline std::optional<QRow> qmat_solve(QMat a, QRow b) {
  int rows = static_cast<int>(a.size());
  int cols = rows ? static_cast<int>(a[0].size()) : 0;
  for (int i = 0; i < rows; ++i) a[i].push_back(b[i]);
  QMat aug = a;
  std::vector<int> pivots = qmat_rref(aug);
  for (int i = static_cast<int>(pivots.size()); i < rows; ++i)
    if (!is_zero(aug[i][cols])) return std::nullopt;
  // a pivot in the augmented column means inconsistent
  if (!pivots.empty() && pivots.back() == cols) return std::nullopt;
  QRow x(cols, Rat(0));
  for (size_t i = 0; i < pivots.size(); ++i) x[pivots[i]] = aug[i][cols];
  return x;
}

// Basis of the right kernel {x : A x = 0} over Q.
inline std::vector<QRow> qmat_kernel(QMat a) {
  if (a.empty()) return {};
  int cols = static_cast<int>(a[0].size());
  std::vector<int> pivots = qmat_rref(a);
  std::vector<bool> is_piv(cols, false);
  for (int p : pivots) is_piv[p] = true;
  std::vector<QRow> basis;
  for (int free = 0; free < cols; ++free) {
    if (is_piv[free]) continue;
    QRow v(cols, Rat(0));
    v[free] = 1;
    for (size_t i = 0; i < pivots.size(); ++i) v[pivots[i]] = -a[i][free];
    basis.push_back(std::move(v));
  }
  return basis;
}

// ---------------------------------------------------------------------------
// Integer matrices and Smith normal form.

using IRow = std::vector<Int>;
using IMat = std::vector<IRow>;

inline IMat imat_from_rows(const std::vector<Vec>& rows) {
  IMat m;
  m.reserve(rows.size());
  for (const Vec& v : rows) m.push_back(v.x);
  return m;
}

struct SmithForm {
  IMat d;       // diagonal form, same shape as input
  IMat u, v;    // unimodular: u * a * v = d
  int rank = 0;
  std::vector<Int> diag;  // nonzero invariant factors d_1 | d_2 | ...
};

// Textbook Smith normal form with transform tracking. Sizes here are tiny, so
// no effort is spent on coefficient growth.
inline SmithForm smith_form(IMat a) {
  int rows = static_cast<int>(a.size());
  int cols = rows ? static_cast<int>(a[0].size()) : 0;
  SmithForm s;
  s.u.assign(rows, IRow(rows, 0));
  s.v.assign(cols, IRow(cols, 0));
  for (int i = 0; i < rows; ++i) s.u[i][i] = 1;
  for (int i = 0; i < cols; ++i) s.v[i][i] = 1;

  auto row_op = [&](int i, int j, const Int& f) {  // row_i -= f * row_j
    for (int c = 0; c < cols; ++c) a[i][c] -= f * a[j][c];
    for (int c = 0; c < rows; ++c) s.u[i][c] -= f * s.u[j][c];
  };
  auto col_op = [&](int i, int j, const Int& f) {  // col_i -= f * col_j
    for (int r = 0; r < rows; ++r) a[r][i] -= f * a[r][j];
    for (int r = 0; r < cols; ++r) s.v[r][i] -= f * s.v[r][j];
  };
  auto row_swap = [&](int i, int j) { std::swap(a[i], a[j]); std::swap(s.u[i], s.u[j]); };
  auto col_swap = [&](int i, int j) {
    for (int r = 0; r < rows; ++r) std::swap(a[r][i], a[r][j]);
    for (int r = 0; r < cols; ++r) std::swap(s.v[r][i], s.v[r][j]);
  };

  int t = 0;
  while (t < rows && t < cols) {
    // find a nonzero pivot in the trailing block
    int pr = -1, pc = -1;
    for (int r = t; r < rows && pr < 0; ++r)
      for (int c = t; c < cols; ++c)
        if (!is_zero(a[r][c])) { pr = r; pc = c; break; }
    if (pr < 0) break;
    row_swap(t, pr);
    col_swap(t, pc);
    // clear row and column t by gcd descent
    bool dirty = true;
    while (dirty) {
      dirty = false;
      for (int r = t + 1; r < rows; ++r) {
        if (is_zero(a[r][t])) continue;
        if (!is_zero(Int(a[r][t] % a[t][t]))) {
          Int q = a[r][t] / a[t][t];
          row_op(r, t, q);
          row_swap(t, r);
          dirty = true;
        } else {
          row_op(r, t, a[r][t] / a[t][t]);
        }
      }
      for (int c = t + 1; c < cols; ++c) {
        if (is_zero(a[t][c])) continue;
        if (!is_zero(Int(a[t][c] % a[t][t]))) {
          Int q = a[t][c] / a[t][t];
          col_op(c, t, q);
          col_swap(t, c);
          dirty = true;
        } else {
          col_op(c, t, a[t][c] / a[t][t]);
        }
      }
    }
    ++t;
  }
  // note: diagonal entries are not reduced to the divisibility chain; every
  // consumer here only needs the diagonal itself (index products, kernels,
  // diagonal solves)
  for (int i = 0; i < t; ++i)
    if (sgn(a[i][i]) < 0) {
      for (int c = 0; c < cols; ++c) a[i][c] = -a[i][c];
      for (int c = 0; c < rows; ++c) s.u[i][c] = -s.u[i][c];
    }
  s.d = std::move(a);
  for (int i = 0; i < t; ++i)
    if (!is_zero(s.d[i][i])) s.diag.push_back(s.d[i][i]);
  s.rank = static_cast<int>(s.diag.size());
  return s;
}

// [Z^n : Z<gens>]; empty optional encodes the infinity marker (span not full
// rank).
inline std::optional<Int> sublattice_index(const std::vector<Vec>& gens) {
  if (gens.empty()) return std::nullopt;
  int n = gens[0].rank();
  SmithForm s = smith_form(imat_from_rows(gens));
  if (s.rank < n) return std::nullopt;
  Int idx = 1;
  for (const Int& d : s.diag) idx *= d;
  return idx;
}

inline std::optional<Int> sublattice_index(const std::vector<Vec>& gens_a,
                                           const std::vector<Vec>& gens_b) {
  std::vector<Vec> all = gens_a;
  all.insert(all.end(), gens_b.begin(), gens_b.end());
  return sublattice_index(all);
}

// Saturated basis of the integer kernel {x : A x = 0, x integral}; rows of A.
inline std::vector<Vec> integer_kernel(const IMat& a, Lattice tag = Lattice::M) {
  if (a.empty()) return {};
  int cols = static_cast<int>(a[0].size());
  SmithForm s = smith_form(a);
  std::vector<Vec> basis;
  for (int j = s.rank; j < cols; ++j) {
    Vec v(std::vector<Int>(cols), tag);
    for (int i = 0; i < cols; ++i) v.x[i] = s.v[i][j];
    basis.push_back(std::move(v));
  }
  return basis;
}

// Saturated lattice basis of span(vectors) inside Z^n: the integer kernel of
// the rational kernel. Result size = rank of the span.
inline std::vector<Vec> saturated_span_basis(const std::vector<Vec>& vectors,
                                             Lattice tag = Lattice::M) {
  if (vectors.empty()) return {};
  int n = vectors[0].rank();
  QMat m;
  for (const Vec& v : vectors) {
    QRow r;
    for (const Int& e : v.x) r.emplace_back(e);
    m.push_back(std::move(r));
  }
  std::vector<QRow> ker = qmat_kernel(m);  // orthogonal complement directions
  if (ker.empty()) {
    // full span: standard basis
    std::vector<Vec> basis;
    for (int i = 0; i < n; ++i) {
      Vec e(std::vector<Int>(n, 0), tag);
      e.x[i] = 1;
      basis.push_back(std::move(e));
    }
    return basis;
  }
  IMat g;
  for (QRow& k : ker) {
    // clear denominators
    Int lcm_d = 1;
    for (const Rat& e : k) lcm_d = lcm(lcm_d, e.get_den());
    IRow row;
    for (const Rat& e : k) row.push_back(Int(e * Rat(lcm_d)));
    g.push_back(std::move(row));
  }
  return integer_kernel(g, tag);
}

// Unimodular U with U * ray = e_0 (ray primitive). Deterministic gcd sweep.
inline IMat primitive_completion(const Vec& ray) {
  int n = ray.rank();
  IMat u(n, IRow(n, 0));
  for (int i = 0; i < n; ++i) u[i][i] = 1;
  std::vector<Int> r = ray.x;
  for (int i = 1; i < n; ++i) {
    if (is_zero(r[i])) continue;
    Int g, s, t;
    mpz_gcdext(g.get_mpz_t(), s.get_mpz_t(), t.get_mpz_t(), r[0].get_mpz_t(),
               r[i].get_mpz_t());
    Int a = r[0] / g, b = r[i] / g;
    // rows 0 and i: [s t; -b a], det = s*a + t*b = 1
    for (int c = 0; c < n; ++c) {
      Int u0 = s * u[0][c] + t * u[i][c];
      Int ui = -b * u[0][c] + a * u[i][c];
      u[0][c] = u0;
      u[i][c] = ui;
    }
    r[i] = 0;
    r[0] = g;
  }
  if (r[0] == -1) {  // flip row 0 so the image is +e_0
    for (int c = 0; c < n; ++c) u[0][c] = -u[0][c];
    r[0] = 1;
  }
  if (r[0] != 1) throw std::invalid_argument("quotient projection needs a primitive ray");
  return u;
}

// Coordinates on M / Z*ray: the last n-1 coordinates of U v.
struct QuotientMap {
  IMat u;  // completion matrix of the ray
  int rank;

  explicit QuotientMap(const Vec& ray) : u(primitive_completion(ray)), rank(ray.rank()) {}

  Vec apply(const Vec& v) const {
    Vec out(std::vector<Int>(rank - 1), v.tag);
    for (int i = 1; i < rank; ++i) {
      Int s = 0;
      for (int j = 0; j < rank; ++j) s += u[i][j] * v.x[j];
      out.x[i - 1] = s;
    }
    return out;
  }
  QVec apply(const QVec& v) const {
    QVec out(rank - 1, v.tag);
    for (int i = 1; i < rank; ++i) {
      Rat s = 0;
      for (int j = 0; j < rank; ++j) s += Rat(u[i][j]) * v.x[j];
      out.x[i - 1] = s;
    }
    return out;
  }
};

inline Vec quotient_project(const Vec& v, const Vec& ray) {
  return QuotientMap(ray).apply(v);
}

}  // namespace tropic
