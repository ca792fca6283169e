#include <doctest.h>

#include <random>

#include "tropic/lift.hpp"

using namespace tropic;

namespace {

const CRat ONE{Rat(1), Rat(0)};

Fan p3_fan() {
  std::vector<Vec> rays = {
      Vec({-1, -1, -1}, Lattice::M),
      Vec({1, 0, 0}, Lattice::M),
      Vec({0, 1, 0}, Lattice::M),
      Vec({0, 0, 1}, Lattice::M),
  };
  return fan_from_maximal(rays, {{0, 1, 2}, {0, 1, 3}, {0, 2, 3}, {1, 2, 3}}, 3);
}

Fan p2_fan() {
  std::vector<Vec> rays = {
      Vec({-1, -1}, Lattice::M),
      Vec({1, 0}, Lattice::M),
      Vec({0, 1}, Lattice::M),
  };
  return fan_from_maximal(rays, {{0, 1}, {0, 2}, {1, 2}}, 2);
}

Fan cube_fan() {
  std::vector<Vec> rays;
  for (int s : {1, -1})
    for (int i = 0; i < 3; ++i) {
      Vec r({0, 0, 0}, Lattice::M);
      r.x[i] = s;
      rays.push_back(r);
    }
  std::vector<std::vector<int>> maximal;
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b)
      for (int c = 0; c < 2; ++c) maximal.push_back({3 * a, 3 * b + 1, 3 * c + 2});
  return fan_from_maximal(rays, maximal, 3);
}

Polytope divisor_polytope(const ToricDivisor& d) {
  return polytope_from_support(divisor_support(d));
}

KClass random_kclass(const Fan& f, std::mt19937_64& rng, int nterms) {
  std::uniform_int_distribution<int> coeff(-2, 2);
  KClass x = KClass::zero(f);
  for (int t = 0; t < nterms; ++t) {
    std::vector<Int> key;
    for (int r = 0; r < f.nrays(); ++r) key.push_back(coeff(rng));
    x.add(key, coeff(rng));
  }
  return x;
}

ToricDivisor random_nef(const Fan& f, std::mt19937_64& rng) {
  std::uniform_int_distribution<int> c(0, 2);
  ToricDivisor d = find_ample(f).scaled(1 + c(rng));
  for (int r = 0; r < f.nrays(); ++r) {
    ToricDivisor ray = ToricDivisor::ray(f, r);
    if (is_nef_divisor(ray)) d = d + ray.scaled(c(rng));
  }
  return d;
}

TropicalInput quartic_input() {
  TropicalInput in;
  in.rank = 3;
  in.points = {
      Vec({-1, -1, -1}, Lattice::M), Vec({1, 0, 0}, Lattice::M),
      Vec({0, 1, 0}, Lattice::M),    Vec({0, 0, 1}, Lattice::M),
      Vec({0, 0, 0}, Lattice::M),
  };
  in.heights = {Rat(1), Rat(0), Rat(0), Rat(0), Rat(0)};
  in.coeffs.assign(5, ONE);
  return in;
}

TropicalInput bipyramid_input() {
  TropicalInput in;
  in.rank = 3;
  in.points = {
      Vec({2, 0, 0}, Lattice::M),  Vec({-1, 0, 0}, Lattice::M),
      Vec({0, 1, 0}, Lattice::M),  Vec({0, -1, 0}, Lattice::M),
      Vec({0, 0, 1}, Lattice::M),  Vec({0, 0, -1}, Lattice::M),
      Vec({0, 0, 0}, Lattice::M),  Vec({1, 0, 0}, Lattice::M),
  };
  in.heights = {Rat(3), Rat(1), Rat(1), Rat(1), Rat(1), Rat(1), Rat(0), Rat(1)};
  in.coeffs.assign(8, ONE);
  return in;
}

IWeight plane_weight(const Fan& f, int i, int j) {
  IWeight w = IWeight::zero(f, 1);
  for (size_t c = 0; c < f.at(2).size(); ++c) {
    bool in_plane = true;
    for (int rid : f.at(2)[c].rays)
      for (int k = 0; k < 3; ++k)
        if (k != i && k != j && !is_zero(f.rays[rid].x[k])) in_plane = false;
    if (in_plane) w.vals[c] = 1;
  }
  return w;
}

int base_dim_count(const CellChain& ch, size_t len) {
  int n = 0;
  for (const auto& [cell, oc] : ch.cells)
    if (cell.base.size() == len) ++n;
  return n;
}

}  // namespace

TEST_CASE("chain of the unit simplex over the projective-space fan") {
  Fan f = p3_fan();
  VolumeForm vol{3, 1};
  Polytope p = divisor_polytope(ToricDivisor::ray(f, 0));  // conv(0, e1*, e2*, e3*)
  CellChain c = cycle_from_polytope(f, vol, p);
  CHECK(base_dim_count(c, 1) == 4);   // facet fibers over the rays
  CHECK(base_dim_count(c, 2) == 12);  // edge fibers over ray-in-wall flags
  CHECK(base_dim_count(c, 3) == 24);  // vertex fibers over full flags
  CHECK(c.cells.size() == 40);
  CHECK(assert_cycle(c).ok);

  // a point polytope only contributes full flags, and is still a cycle
  Polytope pt = divisor_polytope(ToricDivisor::zero(f));
  CellChain cpt = cycle_from_polytope(f, vol, pt);
  CHECK(cpt.cells.size() == 24);
  CHECK(base_dim_count(cpt, 3) == 24);
  CHECK(assert_cycle(cpt).ok);

  // the fan must refine the normal fan of the polytope
  std::vector<QVec> skew;
  skew.emplace_back(std::vector<Rat>{Rat(0), Rat(0), Rat(0)}, Lattice::N);
  skew.emplace_back(std::vector<Rat>{Rat(1), Rat(1), Rat(0)}, Lattice::N);
  skew.emplace_back(std::vector<Rat>{Rat(0), Rat(1), Rat(1)}, Lattice::N);
  skew.emplace_back(std::vector<Rat>{Rat(1), Rat(0), Rat(2)}, Lattice::N);
  CHECK_THROWS_AS(cycle_from_polytope(f, vol, make_polytope(skew, Lattice::N)),
                  std::domain_error);
}

TEST_CASE("facet orientations of a top fiber match the extended flag frames") {
  Fan f = p3_fan();
  VolumeForm vol{3, 1};
  Polytope p = divisor_polytope(ToricDivisor::ray(f, 0));
  Flag s0{{{0}}};
  Polytope top = face_for_cone(p, f, Cone{{0}, 1});  // conv(e1*, e2*, e3*)
  REQUIRE(top.dim == 2);

  CellChain one;
  one.fan = &f;
  detail::add_cell(one, s0.chain, top, flag_frame(f, s0, vol), 1);
  CellChain b = chain_boundary(one);
  REQUIRE(b.cells.size() == 3);

  // each boundary facet is the fiber of an extended flag, with coefficient -1
  // relative to that flag's own frame
  for (int i = 1; i <= 3; ++i) {
    Flag si{{{0}, {0, i}}};
    Polytope fiber = face_for_cone(p, f, Cone{{0, i}, 2});
    REQUIRE(fiber.dim == 1);
    std::vector<Vec> verts = fiber.lattice_verts();
    std::sort(verts.begin(), verts.end());
    auto it = b.cells.find(ProductCell{s0.chain, verts});
    REQUIRE(it != b.cells.end());
    Int rel = it->second.coeff * frame_ratio(it->second.frame, flag_frame(f, si, vol));
    CHECK(rel == -1);
  }
}

TEST_CASE("chain of an ideal-type K-class in the quotient torus") {
  Fan f = p3_fan();
  VolumeForm vol{3, 1};
  ToricDivisor h = ToricDivisor::ray(f, 0);
  KClass e = KClass::unit(f) - KClass::line_bundle(-h);

  CellChain c = chain_from_kclass(e, vol);
  CHECK(c.mod_lattice);
  // point fibers of the two polytopes cancel; edge and facet fibers survive
  CHECK(base_dim_count(c, 3) == 0);
  CHECK(base_dim_count(c, 2) == 12);
  CHECK(base_dim_count(c, 1) == 4);
  CHECK(c.cells.size() == 16);
  CHECK(assert_cycle(c).ok);

  // edge fibers over the flags through the first ray are the opposite edges of
  // the triangle fiber, with unit lattice length
  for (int i = 1; i <= 3; ++i) {
    bool found = false;
    for (const auto& [cell, oc] : c.cells)
      if (cell.base == std::vector<std::vector<int>>{{0}, {0, i}}) {
        found = true;
        CHECK(cell.fiber.size() == 2);
        CHECK(is_primitive(cell.fiber[1] - cell.fiber[0]));
      }
    CHECK(found);
  }

  // non-anti-nef terms are rejected
  CHECK_THROWS_AS(chain_from_kclass(KClass::line_bundle(h), vol), std::invalid_argument);
}

TEST_CASE("boundary vanishes on random nef polytope chains") {
  std::mt19937_64 rng(4242);
  for (const Fan& f : {p3_fan(), cube_fan(), p2_fan()}) {
    VolumeForm vol{f.rank, 1};
    for (int trial = 0; trial < 7; ++trial) {
      CAPTURE(f.rank);
      CAPTURE(trial);
      Polytope p = divisor_polytope(random_nef(f, rng));
      CellChain c = cycle_from_polytope(f, vol, p);
      CHECK(assert_cycle(c).ok);
    }
  }

  // degenerate polytope: a slab divisor on the cube fan
  Fan cf = cube_fan();
  VolumeForm vol{3, 1};
  Polytope slab = divisor_polytope(ToricDivisor::ray(cf, 0));
  REQUIRE(slab.dim == 1);
  CHECK(assert_cycle(cycle_from_polytope(cf, vol, slab)).ok);
}

TEST_CASE("deleting a cell breaks the cycle and the residual reports it") {
  Fan f = p3_fan();
  VolumeForm vol{3, 1};
  CellChain c = cycle_from_polytope(f, vol, divisor_polytope(ToricDivisor::ray(f, 0)));
  c.cells.erase(c.cells.begin());
  CycleCheck chk = assert_cycle(c);
  CHECK(!chk.ok);
  CHECK(!chk.residual.cells.empty());
  // the boundary of a boundary is always zero
  CHECK(chain_boundary(chk.residual).empty());
}

TEST_CASE("fiber profile equals the Chern component weights") {
  std::mt19937_64 rng(99);
  for (const Fan& f : {p3_fan(), cube_fan(), p2_fan()}) {
    GenericVector m0 = find_generic(f, 2026);
    int d = f.rank - 1;
    for (int trial = 0; trial < 5; ++trial) {
      CAPTURE(f.rank);
      CAPTURE(trial);
      KClass e = random_kclass(f, rng, 3);
      FiberProfile pr;
      REQUIRE_NOTHROW(pr = lift_profile(e, m0));
      GradedClass ch = chern(e, m0);
      for (int q = 0; q <= d; ++q)
        for (const Cone& sigma : f.at(q + 1))
          CHECK(pr.values[q].at(sigma.rays) == ch.comp[d - q].at(sigma));
    }
  }
}

TEST_CASE("fiber profile of structure-sheaf classes") {
  Fan f = p3_fan();
  GenericVector m0 = find_generic(f, 2026);

  FiberProfile unit = lift_profile(KClass::unit(f), m0);
  CHECK(unit.k == 0);
  for (const auto& [rays, v] : unit.values[2]) CHECK(v == 1);
  for (const auto& [rays, v] : unit.values[1]) CHECK(v == 0);
  for (const auto& [rays, v] : unit.values[0]) CHECK(v == 0);
  CHECK(unit.support.size() == 24);  // every full flag carries the class

  ToricDivisor h = ToricDivisor::ray(f, 0);
  KClass e = KClass::unit(f) - KClass::line_bundle(-h);
  FiberProfile pr = lift_profile(e, m0);
  CHECK(pr.k == 1);
  CHECK(pr.leading == IWeight::ones(f, 1));
  for (const auto& [rays, v] : pr.values[2]) CHECK(v == 0);  // above the leading level
  for (const auto& [rays, v] : pr.values[1]) CHECK(v == 1);
  CHECK(pr.support.size() == 12);

  FiberProfile zero = lift_profile(KClass::zero(f), m0);
  CHECK(zero.k == 2);
  CHECK(zero.leading.is_zero_weight());
  CHECK(zero.support.empty());
  for (const auto& row : zero.values)
    for (const auto& [rays, v] : row) CHECK(v == 0);

  // an ample line bundle is decomposed internally before profiling
  FiberProfile amp = lift_profile(KClass::line_bundle(h), m0);
  CHECK(amp.k == 0);
  for (const auto& [rays, v] : amp.values[2]) CHECK(v == 1);
}

TEST_CASE("lift intersection numbers carry the global sign") {
  {
    TropicalInput in = quartic_input();
    Subdivision sub = validate(in);
    StarFan st = fan_at(in, sub, Vec({0, 0, 0}, Lattice::M));
    IWeight a0 = IWeight::ones(st.fan, 1);
    CHECK(lift_intersection(in, sub, st, a0, st, a0) == 4);
  }
  {
    TropicalInput in = bipyramid_input();
    Subdivision sub = validate(in);
    StarFan st1 = fan_at(in, sub, Vec({1, 0, 0}, Lattice::M));
    StarFan st2 = fan_at(in, sub, Vec({0, 0, 0}, Lattice::M));
    IWeight a1 = plane_weight(st1.fan, 0, 2);
    IWeight a2 = plane_weight(st2.fan, 0, 1);
    CHECK(lift_intersection(in, sub, st1, a1, st2, a2) == -1);
  }
}

TEST_CASE("export: JSON round-trip and OBJ embedding") {
  Fan f = p3_fan();
  VolumeForm vol{3, 1};
  ToricDivisor h = ToricDivisor::ray(f, 0);
  CellChain c = chain_from_kclass(KClass::unit(f) - KClass::line_bundle(-h), vol);

  std::string js = export_complex(c, ExportFormat::json);
  auto parsed = nlohmann::json::parse(js);
  CHECK(parsed["schema"] == "tropic-cell-complex/1");
  CHECK(parsed["mod_lattice"] == true);
  REQUIRE(parsed["cells"].size() == 16);
  for (const auto& cell : parsed["cells"]) {
    Int coeff(cell["coefficient"].get<std::string>());
    CHECK((coeff == 1 || coeff == -1));
    CHECK(!cell["orientation"].empty());
  }

  CHECK_THROWS_AS(export_complex(c, ExportFormat::obj), std::invalid_argument);
  std::map<std::vector<int>, QVec> bary;
  for (const auto& [cell, oc] : c.cells)
    for (const auto& rays : cell.base) {
      QVec b(3, Lattice::M);
      for (int rid : rays)
        for (int i = 0; i < 3; ++i) b.x[i] += Rat(f.rays[rid].x[i]) / Rat(int(rays.size()));
      bary[rays] = b;
    }
  std::string obj = export_complex(c, ExportFormat::obj, &bary);
  CHECK(obj.find("\nl ") != std::string::npos);  // wall flags embed as segments
  CHECK(obj.find("\np ") != std::string::npos);  // ray flags embed as points
}
