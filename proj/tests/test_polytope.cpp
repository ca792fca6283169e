#include <doctest.h>

#include "tropic/fan.hpp"

using namespace tropic;

namespace {

QVec qv(std::initializer_list<long> v, Lattice t = Lattice::N) {
  QVec q(static_cast<int>(v.size()), t);
  int i = 0;
  for (long e : v) q.x[i++] = Rat(e);
  return q;
}

// fan of P^3: rays e0 = -e1-e2-e3, e1, e2, e3; maximal cones = 3-subsets
Fan p3_fan() {
  std::vector<Vec> rays = {Vec{-1, -1, -1}, Vec{1, 0, 0}, Vec{0, 1, 0}, Vec{0, 0, 1}};
  return fan_from_maximal(rays, {{0, 1, 2}, {0, 1, 3}, {0, 2, 3}, {1, 2, 3}}, 3);
}

// fan of P^1 x P^1 x P^1: octants
Fan cube_fan() {
  std::vector<Vec> rays = {Vec{1, 0, 0}, Vec{-1, 0, 0}, Vec{0, 1, 0},
                           Vec{0, -1, 0}, Vec{0, 0, 1}, Vec{0, 0, -1}};
  std::vector<std::vector<int>> mx;
  for (int a : {0, 1})
    for (int b : {2, 3})
      for (int c : {4, 5}) mx.push_back({a, b, c});
  return fan_from_maximal(rays, mx, 3);
}

}  // namespace

TEST_CASE("polytope construction and volumes") {
  // segment, triangle, point volumes in the normalized lattice measure
  Polytope seg = make_polytope({qv({0, 1, 0}), qv({0, 0, 1})});
  CHECK(seg.dim == 1);
  CHECK(lattice_volume(seg) == 1);

  Polytope tri = make_polytope({qv({1, 0, 0}), qv({0, 1, 0}), qv({0, 0, 1})});
  CHECK(tri.dim == 2);
  CHECK(lattice_volume(tri) == Rat(1, 2));

  Polytope pt = make_polytope({qv({3, 1, 4})});
  CHECK(pt.dim == 0);
  CHECK(lattice_volume(pt) == 1);

  Polytope simplex = make_polytope({qv({0, 0, 0}), qv({1, 0, 0}), qv({0, 1, 0}), qv({0, 0, 1})});
  CHECK(simplex.dim == 3);
  CHECK(lattice_volume(simplex) == Rat(1, 6));
  CHECK(simplex.facets.size() == 4);

  // non-extreme points are dropped
  Polytope seg2 = make_polytope({qv({0, 0, 0}), qv({1, 1, 0}), qv({2, 2, 0})});
  CHECK(seg2.verts.size() == 2);
  CHECK(lattice_volume(seg2) == 2);

  Polytope cube = make_polytope({qv({0, 0, 0}), qv({1, 0, 0}), qv({0, 1, 0}), qv({0, 0, 1}),
                                 qv({1, 1, 0}), qv({1, 0, 1}), qv({0, 1, 1}), qv({1, 1, 1})});
  CHECK(lattice_volume(cube) == 1);
}

TEST_CASE("lattice points and reflexivity") {
  // K3 Newton polytope: conv(e1, e2, e3, -e1-e2-e3) in M
  Polytope delta = make_polytope(
      {qv({1, 0, 0}, Lattice::M), qv({0, 1, 0}, Lattice::M), qv({0, 0, 1}, Lattice::M),
       qv({-1, -1, -1}, Lattice::M)},
      Lattice::M);
  auto pts = lattice_points(delta);
  CHECK(pts.size() == 5);  // four vertices plus the origin
  auto interior = lattice_points(delta, true);
  REQUIRE(interior.size() == 1);
  CHECK(interior[0].zero());
  CHECK(is_reflexive(delta));

  Polytope shifted = make_polytope({qv({2, 0, 0}, Lattice::M), qv({-1, 0, 0}, Lattice::M),
                                    qv({0, 1, 0}, Lattice::M), qv({0, -1, 0}, Lattice::M),
                                    qv({0, 0, 1}, Lattice::M), qv({0, 0, -1}, Lattice::M)},
                                   Lattice::M);
  auto w = lattice_points(shifted, true);
  CHECK(w.size() == 2);  // 0 and e1
  CHECK(!is_reflexive(shifted));  // the 2e1 facets are further out
}

TEST_CASE("normal fan") {
  Polytope p2 = make_polytope({qv({0, 0, 0}), qv({1, 0, 0}), qv({0, 1, 0}), qv({0, 0, 1})});
  Fan nf = normal_fan(p2);
  CHECK(nf.rank == 3);
  CHECK(nf.complete);
  CHECK(nf.simplicial);
  CHECK(nf.unimodular);
  CHECK(nf.nrays() == 4);
  CHECK(nf.ray_id(Vec{-1, -1, -1}) >= 0);
  CHECK(nf.ray_id(Vec{1, 0, 0}) >= 0);
  CHECK(nf.at(3).size() == 4);

  // not full dimensional -> rejected
  CHECK_THROWS(normal_fan(make_polytope({qv({0, 0, 0})})));
  CHECK_THROWS(normal_fan(make_polytope({qv({0, 0, 0}), qv({1, 0, 0})})));

  // unit square in rank 2
  Polytope sq = make_polytope({QVec(std::vector<Rat>{Rat(0), Rat(0)}, Lattice::N),
                               QVec(std::vector<Rat>{Rat(1), Rat(0)}, Lattice::N),
                               QVec(std::vector<Rat>{Rat(0), Rat(1)}, Lattice::N),
                               QVec(std::vector<Rat>{Rat(1), Rat(1)}, Lattice::N)});
  Fan sqf = normal_fan(sq);
  CHECK(sqf.nrays() == 4);
  CHECK(sqf.at(2).size() == 4);
  CHECK(sqf.complete);
  CHECK(sqf.unimodular);
}

TEST_CASE("support functions, nef and ample") {
  Fan f = p3_fan();
  int e0 = f.ray_id(Vec{-1, -1, -1});

  SupportFunction o1{&f, {Rat(0), Rat(0), Rat(0), Rat(0)}};
  o1.vals[e0] = Rat(-1);  // O(1) in min-convention
  auto [nef1, ample1] = is_nef_ample(o1);
  CHECK(nef1);
  CHECK(ample1);

  SupportFunction zero{&f, {Rat(0), Rat(0), Rat(0), Rat(0)}};
  auto [nef0, ample0] = is_nef_ample(zero);
  CHECK(nef0);
  CHECK(!ample0);

  SupportFunction neg{&f, {Rat(0), Rat(0), Rat(0), Rat(0)}};
  neg.vals[e0] = Rat(1);  // negated ample
  auto [nefn, amplen] = is_nef_ample(neg);
  CHECK(!nefn);
  CHECK(!amplen);

  SUBCASE("polytope round trip") {
    Polytope p = polytope_from_support(o1);
    CHECK(p.verts.size() == 4);
    CHECK(p.contains(qv({0, 0, 0})));
    CHECK(p.contains(qv({1, 0, 0})));
    CHECK(lattice_volume(p) == Rat(1, 6));

    Polytope origin = polytope_from_support(zero);
    CHECK(origin.dim == 0);
    CHECK(origin.verts[0].zero());

    CHECK_THROWS(polytope_from_support(neg));

    // support values round trip
    SupportFunction back = support_of(f, p);
    CHECK(back.vals == o1.vals);

    // sum of support functions gives the Minkowski sum
    SupportFunction twice{&f, o1.vals};
    for (auto& v : twice.vals) v *= 2;
    CHECK(polytope_from_support(twice) == minkowski_sum(p, p));
  }

  SUBCASE("refinement and face extraction") {
    Polytope p = polytope_from_support(o1);
    CHECK(refines_normal_fan(f, p));
    CHECK(refines_normal_fan(f, polytope_from_support(zero)));

    // c = cone(e0, e1) -> segment conv(e2*, e3*)
    int e1 = f.ray_id(Vec{1, 0, 0});
    std::vector<int> rs = {e0, e1};
    std::sort(rs.begin(), rs.end());
    Polytope seg = face_for_cone(p, f, Cone{rs, 2});
    CHECK(seg.dim == 1);
    CHECK(seg.verts == std::vector<QVec>{qv({0, 0, 1}), qv({0, 1, 0})});

    // c = cone(e0) -> triangle conv(e1*, e2*, e3*)
    Polytope tri = face_for_cone(p, f, Cone{{e0}, 1});
    CHECK(tri.dim == 2);
    CHECK(tri.verts.size() == 3);

    // c = {0} -> P itself
    Polytope whole = face_for_cone(p, f, Cone{{}, 0});
    CHECK(whole == p);

    // a polytope whose normal fan the cube fan does not refine
    Fan cf = cube_fan();
    CHECK(!refines_normal_fan(cf, p));
  }
}

TEST_CASE("quotient fan") {
  // quotient of the cube fan along e1 -> fan of P^1 x P^1
  Fan cf = cube_fan();
  Fan q = quotient_fan(cf, Vec{1, 0, 0});
  CHECK(q.rank == 2);
  CHECK(q.nrays() == 4);
  CHECK(q.at(2).size() == 4);
  CHECK(q.complete);
  CHECK(q.unimodular);

  // quotient of the P^3 fan along any ray -> fan of P^2
  Fan p3 = p3_fan();
  Fan qp = quotient_fan(p3, Vec{1, 0, 0});
  CHECK(qp.rank == 2);
  CHECK(qp.nrays() == 3);
  CHECK(qp.at(2).size() == 3);
  CHECK(qp.complete);
  CHECK(qp.unimodular);

  CHECK_THROWS(quotient_fan(p3, Vec{1, 1, 0}));  // not a ray
}
