#include <doctest.h>

#include <random>

#include "tropic/linalg.hpp"
#include "tropic/multivector.hpp"

using namespace tropic;

// K3 fixture conventions used across the suite: rank 3, basis e1,e2,e3 of M,
// e0 = -e1-e2-e3, vol(N) = e1* ^ e2* ^ e3* (sign +1 on the standard basis).
namespace {
const Vec E0{-1, -1, -1}, E1{1, 0, 0}, E2{0, 1, 0}, E3{0, 0, 1};
const VolumeForm VOL3{3, 1};

MultiVector nstar(int rank, std::initializer_list<std::pair<int, long>> terms) {
  MultiVector m(rank, 0, Lattice::N);
  bool first = true;
  for (auto [i, v] : terms) {
    if (first) m.degree = 1;
    first = false;
    m.add_term(1u << i, Int(v));
  }
  m.degree = 1;
  return m;
}
}  // namespace

TEST_CASE("wedge basics") {
  auto e1 = MultiVector::from_vector(E1);
  auto e2 = MultiVector::from_vector(E2);

  auto w = wedge(e1, e2);
  CHECK(w.degree == 2);
  CHECK(w.c.size() == 1);
  CHECK(w.c.at((1u << 0) | (1u << 1)) == 1);

  CHECK(wedge(e1, e1).zero());
  CHECK(wedge(e2, e1) == -w);

  // expand (e0 ^ e1) by multilinearity: (-e1-e2-e3)^e1 = e1^e2 + e1^e3
  auto w01 = wedge(MultiVector::from_vector(E0), e1);
  CHECK(w01.c.size() == 2);
  CHECK(w01.c.at(0b011) == 1);
  CHECK(w01.c.at(0b101) == 1);

  CHECK_THROWS(wedge(w, wedge(e1, e2)));  // degree 4 in rank 3
}

TEST_CASE("contract_volume reproduces the K3 f(S_i) values") {
  // f(S_i) = <e0 ^ e_i ^ . , vol(N)>
  auto f = [&](const Vec& ei) {
    return contract_volume(wedge({E0, ei}, 3, Lattice::M), VOL3);
  };
  CHECK(f(E1) == nstar(3, {{1, -1}, {2, 1}}));   // -e2* + e3*
  CHECK(f(E2) == nstar(3, {{2, -1}, {0, 1}}));   // -e3* + e1*
  CHECK(f(E3) == nstar(3, {{0, -1}, {1, 1}}));   // -e1* + e2*

  // full-rank wedge gives the determinant as a degree-0 multivector
  auto det = contract_volume(wedge({E0, E1, E2}, 3, Lattice::M), VOL3);
  CHECK(det.degree == 0);
  CHECK(det.c.at(0) == -1);  // det[-e-e-e; e1; e2] has e3-row -1
}

TEST_CASE("contract_volume is the pairing adjoint on random inputs") {
  std::mt19937_64 rng(7);
  std::uniform_int_distribution<int> coef(-4, 4);
  int n = 4;
  VolumeForm vol{n, 1};
  for (int trial = 0; trial < 60; ++trial) {
    int k = 1 + static_cast<int>(rng() % static_cast<unsigned>(n - 1));
    auto rand_vec = [&] {
      std::vector<Int> v;
      for (int i = 0; i < n; ++i) v.emplace_back(coef(rng));
      return Vec(v, Lattice::M);
    };
    std::vector<Vec> front_vs, back_vs;
    for (int i = 0; i < k; ++i) front_vs.push_back(rand_vec());
    for (int i = 0; i < n - k; ++i) back_vs.push_back(rand_vec());
    auto front = wedge(front_vs, n, Lattice::M);
    auto back = wedge(back_vs, n, Lattice::M);
    Int direct = 0;
    {
      auto full = wedge(front, back);
      if (auto it = full.c.find((1u << n) - 1); it != full.c.end()) direct = it->second;
    }
    // mv_pair(back, contract_volume(front)) must equal <front ^ back, vol>
    CHECK(mv_pair(back, contract_volume(front, vol)) == direct);
  }
}

TEST_CASE("flag transposition flips the contraction sign") {
  // f(S[i]) = -f(S): swapping two adjacent generators in the front wedge
  std::mt19937_64 rng(11);
  std::uniform_int_distribution<int> coef(-3, 3);
  for (int trial = 0; trial < 40; ++trial) {
    std::vector<Vec> vs;
    for (int i = 0; i < 3; ++i) {
      std::vector<Int> v;
      for (int j = 0; j < 4; ++j) v.emplace_back(coef(rng));
      vs.emplace_back(v, Lattice::M);
    }
    VolumeForm vol{4, 1};
    auto fwd = contract_volume(wedge(vs, 4, Lattice::M), vol);
    std::swap(vs[1], vs[2]);
    auto swapped = contract_volume(wedge(vs, 4, Lattice::M), vol);
    CHECK(swapped == -fwd);
  }
}

TEST_CASE("smith normal form and sublattice indices") {
  CHECK(sublattice_index({E1, E2, E3}).value() == 1);
  // K3 cup pair (sigma = cone(e0,e1), sigma' = cone(e0,e3)): index 1
  CHECK(sublattice_index({E0, E1}, {E0, E3}).value() == 1);
  // {2e1, e2, e3}: index 2
  CHECK(sublattice_index({E1 * Int(2), E2, E3}).value() == 2);
  // not full rank -> infinity marker
  CHECK(!sublattice_index({E1, E2}).has_value());
  CHECK(!sublattice_index({E1, E1 * Int(5)}).has_value());

  SUBCASE("invariance under unimodular regeneration") {
    std::mt19937_64 rng(3);
    std::uniform_int_distribution<int> coef(-3, 3);
    std::vector<Vec> gens = {Vec{2, 0, 1}, Vec{0, 3, 1}, Vec{1, 1, 1}};
    auto base = sublattice_index(gens);
    for (int trial = 0; trial < 20; ++trial) {
      // elementary transformation: add a multiple of one generator to another
      int i = static_cast<int>(rng() % 3), j = static_cast<int>(rng() % 3);
      if (i == j) continue;
      gens[i] = gens[i] + gens[j] * Int(coef(rng));
      CHECK(sublattice_index(gens) == base);
    }
  }
}

TEST_CASE("integer kernel is saturated") {
  // kernel of (2 4): contains (2,-1), saturated basis must generate it
  IMat a = {{Int(2), Int(4)}};
  auto ker = integer_kernel(a);
  REQUIRE(ker.size() == 1);
  CHECK(is_primitive(ker[0]));
  CHECK(ker[0].x[0] * 2 + ker[0].x[1] * 4 == 0);
}

TEST_CASE("quotient projection") {
  // kernel ray maps to zero
  CHECK(quotient_project(E1, E1).zero());
  // translates of the ray project equally
  Vec v{3, -2, 5};
  CHECK(quotient_project(v + E1 * Int(7), E1) == quotient_project(v, E1));
  // S2 fixture: e2 along ray e1 lands on a quotient basis vector
  Vec img = quotient_project(E2, E1);
  CHECK(img.rank() == 2);
  CHECK(is_primitive(img));
  // a non-primitive ray is rejected
  CHECK_THROWS(quotient_project(v, E1 * Int(2)));

  SUBCASE("projection is surjective with saturated image") {
    // the images of the standard basis span the full quotient Z^2
    std::vector<Vec> imgs = {quotient_project(E1, Vec{1, 1, 1}),
                             quotient_project(E2, Vec{1, 1, 1}),
                             quotient_project(E3, Vec{1, 1, 1})};
    SmithForm s = smith_form(imat_from_rows(imgs));
    REQUIRE(s.rank == 2);
    CHECK(s.diag[0] == 1);
    CHECK(s.diag[1] == 1);
  }
}

TEST_CASE("rational solve and kernel") {
  QMat a = {{Rat(1), Rat(2)}, {Rat(3), Rat(4)}};
  auto x = qmat_solve(a, {Rat(5), Rat(6)});
  REQUIRE(x.has_value());
  CHECK((*x)[0] == Rat(-4));
  CHECK((*x)[1] == Rat(9, 2));

  CHECK(!qmat_solve({{Rat(1), Rat(1)}, {Rat(2), Rat(2)}}, {Rat(0), Rat(1)}).has_value());
  CHECK(qmat_det(QMat{{Rat(1), Rat(2)}, {Rat(3), Rat(4)}}) == Rat(-2));

  auto ker = qmat_kernel({{Rat(1), Rat(2), Rat(3)}});
  CHECK(ker.size() == 2);
  for (const auto& k : ker) CHECK(k[0] + 2 * k[1] + 3 * k[2] == 0);
}
