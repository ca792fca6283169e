#include <doctest.h>

#include <cstdio>
#include <fstream>
#include <sstream>

#include "tropic/cli.hpp"

using namespace tropic;

namespace {

const std::string kFixtures = FIXTURE_DIR;

std::string slurp(const std::string& path) {
  std::ifstream f(path);
  REQUIRE(f.good());
  std::ostringstream os;
  os << f.rdbuf();
  return os.str();
}

struct CliResult {
  int code;
  std::string out, err;
  Json payload;  // empty unless code == 0 or the command emitted an envelope
};

CliResult run(std::vector<std::string> args) {
  std::ostringstream out, err;
  int code = run_cli(std::move(args), out, err);
  CliResult r{code, out.str(), err.str(), Json()};
  if (!r.out.empty() && r.out[0] == '{') r.payload = Json::parse(r.out);
  return r;
}

std::string write_temp(const std::string& name, const std::string& content) {
  std::string path = name;
  std::ofstream(path) << content;
  return path;
}

}  // namespace

TEST_CASE("instance loading: canonical round-trip on all fixtures") {
  for (const char* name : {"k3.json", "s2.json", "p2-curve.json"}) {
    CAPTURE(name);
    std::string path = kFixtures + "/" + name;
    InstanceFile inst = load_instance(path);
    CHECK(save_instance(inst) == slurp(path));
    CHECK_NOTHROW(validate(inst.input));
  }
  InstanceFile k3 = load_instance(kFixtures + "/k3.json");
  CHECK(k3.input.rank == 3);
  CHECK(k3.input.points.size() == 5);
  CHECK(k3.input.coeffs[4].re == Rat(-1));
}

TEST_CASE("instance schema errors carry JSON-pointer paths") {
  Json good = Json::parse(slurp(kFixtures + "/p2-curve.json"));

  Json bad = good;
  bad["lambda"][0] = "1/0";
  CHECK_THROWS_WITH_AS(parse_instance(bad), doctest::Contains("/lambda/0"), SchemaError);

  bad = good;
  bad.erase("points");
  CHECK_THROWS_WITH_AS(parse_instance(bad), doctest::Contains("/points"), SchemaError);

  bad = good;
  bad["schema"] = "something-else";
  CHECK_THROWS_AS(parse_instance(bad), SchemaError);

  bad = good;
  bad["coefficients"][0] = Json::object({{"abs", "2"}, {"arg_times_pi", "1/3"}});
  CHECK_THROWS_WITH_AS(parse_instance(bad), doctest::Contains("/coefficients/0"), SchemaError);
}

TEST_CASE("coefficient forms: decimal strings and exact polar values") {
  Json j = Json::parse(slurp(kFixtures + "/p2-curve.json"));
  j["lambda"][0] = "0.25";
  j["coefficients"][1] = Json::object({{"abs", "2"}, {"arg_times_pi", "1"}});
  j["coefficients"][2] = Json::object({{"abs", "3"}, {"arg_times_pi", "-1/2"}});
  InstanceFile inst = parse_instance(j);
  CHECK(inst.input.heights[0] == Rat(1, 4));
  CHECK(inst.input.coeffs[1].re == Rat(-2));
  CHECK(inst.input.coeffs[1].im == Rat(0));
  CHECK(inst.input.coeffs[2].re == Rat(0));
  CHECK(inst.input.coeffs[2].im == Rat(-3));
  // polar coefficients land in the branch table
  CHECK(inst.branch_arg_times_pi.at(1) == Rat(1));
  CHECK(inst.branch_arg_times_pi.at(2) == Rat(-1, 2));
}

TEST_CASE("cli: intersection commands reproduce the fixture numbers") {
  std::string k3 = kFixtures + "/k3.json";
  CliResult r = run({"intersect", k3, "--w1", "0,0,0", "--w2", "0,0,0"});
  REQUIRE(r.code == 0);
  CHECK(r.payload["payload"]["value"] == "4");
  CHECK(r.payload["payload"]["lift_value"] == "4");
  CHECK(r.payload["command"] == "intersect");
  CHECK(r.payload["seed"] == 2026);

  CliResult e = run({"enumerate-intersections", k3, "--w1", "0,0,0", "--w2", "0,0,0"});
  REQUIRE(e.code == 0);
  CHECK(e.payload["payload"]["total"] == "4");
  CHECK(e.payload["payload"]["points"].size() == 4);
}

TEST_CASE("cli: determinism and seed handling") {
  std::string k3 = kFixtures + "/k3.json";
  CliResult a = run({"cup", k3, "--w", "0,0,0"});
  CliResult b = run({"cup", k3, "--w", "0,0,0"});
  REQUIRE(a.code == 0);
  REQUIRE(b.code == 0);
  CHECK(a.payload["payload"] == b.payload["payload"]);
  CHECK(a.payload["instance"] == b.payload["instance"]);

  CliResult c = run({"cup", k3, "--w", "0,0,0", "--seed", "7"});
  REQUIRE(c.code == 0);
  CHECK(c.payload["seed"] == 7);
  // the cup product itself is independent of the generic vector
  CHECK(c.payload["payload"]["cup"] == a.payload["payload"]["cup"]);
}

TEST_CASE("cli: balance reports the violating cone with exit code 5") {
  std::string k3 = kFixtures + "/k3.json";
  std::string wfile = write_temp("bad_weight.json",
                                 R"({"codim": 1, "vals": {"0,1": "1"}})");
  CliResult r = run({"balance", k3, "--w", "0,0,0", "--weight", wfile});
  CHECK(r.code == kBalance);
  REQUIRE(!r.payload.is_null());
  CHECK(r.payload["payload"]["balanced"] == false);
  CHECK(!r.payload["payload"]["violating_cone"].empty());
  std::remove(wfile.c_str());

  CliResult ok = run({"balance", k3, "--w", "0,0,0", "--weight", "ones"});
  CHECK(ok.code == 0);
  CHECK(ok.payload["payload"]["balanced"] == true);
}

TEST_CASE("cli: K-theory pipeline commands") {
  std::string k3 = kFixtures + "/k3.json";
  CliResult ch = run({"chern", k3, "--w", "0,0,0", "--E", "O-O(-1)"});
  REQUIRE(ch.code == 0);
  REQUIRE(ch.payload["payload"]["chern"]["components"].size() == 4);
  // codim-1 component is the all-ones weight
  for (const auto& [key, val] : ch.payload["payload"]["chern"]["components"][1]["vals"].items())
    CHECK(val == "1");

  CliResult dec = run({"decompose", k3, "--w", "0,0,0", "--E", "O-O(-1)"});
  REQUIRE(dec.code == 0);
  for (const auto& term : dec.payload["payload"]["anti_nef"]["terms"])
    for (const auto& c : term["coeff"]) CHECK(c.get<int>() <= 0);

  CliResult w2k = run({"weight-to-k", k3, "--w", "0,0,0", "--weight", "ones", "--codim", "1"});
  REQUIRE(w2k.code == 0);
  CHECK(w2k.payload["payload"]["leading_index"] == 1);
  for (const auto& [key, val] : w2k.payload["payload"]["leading_weight"]["vals"].items())
    CHECK(val == "1");

  CliResult pr = run({"profile", k3, "--w", "0,0,0", "--E", "O-O(-1)"});
  REQUIRE(pr.code == 0);
  CHECK(pr.payload["payload"]["leading_index"] == 1);
  CHECK(pr.payload["payload"]["support_flags"].size() == 12);
  for (const auto& [key, val] : pr.payload["payload"]["values_by_q"][2].items())
    CHECK(val == "0");
}

TEST_CASE("cli: lift, export, and period") {
  std::string k3 = kFixtures + "/k3.json";
  CliResult lift = run({"lift", k3, "--w", "0,0,0", "--E", "O-O(-1)"});
  REQUIRE(lift.code == 0);
  CHECK(lift.payload["payload"]["cells"] == 16);
  CHECK(lift.payload["payload"]["closed"] == true);
  CHECK(lift.payload["payload"]["complex"]["cells"].size() == 16);

  CliResult pol = run({"lift", k3, "--w", "0,0,0", "--polytope", "1,0,0,0"});
  REQUIRE(pol.code == 0);
  CHECK(pol.payload["payload"]["cells"] == 40);
  CHECK(pol.payload["payload"]["closed"] == true);

  CliResult obj = run({"export", k3, "--w", "0,0,0", "--E", "O-O(-1)", "--format", "obj"});
  REQUIRE(obj.code == 0);
  std::string content = obj.payload["payload"]["content"].get<std::string>();
  CHECK(content.find("\nl ") != std::string::npos);

  CliResult per = run({"period", k3, "--w", "0,0,0", "--l", "1", "--E", "O",
                       "--eval-at-t", "1/100"});
  REQUIRE(per.code == 0);
  const Json& coeff = per.payload["payload"]["period"]["coeff_of_L_power"];
  REQUIRE(coeff.size() == 4);
  // known closed form: -2 L^2 + 4 pi^2
  CHECK(coeff[2][0].get<double>() == doctest::Approx(-2.0));
  CHECK(coeff[0][0].get<double>() == doctest::Approx(4 * 3.14159265358979 * 3.14159265358979));
  CHECK(per.payload["payload"]["period"]["epsilon_marker"] == true);
  CHECK(per.payload["payload"].contains("value_at_t"));
}

TEST_CASE("cli: error classes map to distinct exit codes") {
  std::string k3 = kFixtures + "/k3.json";
  CHECK(run({"no-such-command", k3}).code == kUsage);
  CHECK(run({"validate"}).code == kUsage);
  CHECK(run({"validate", "does-not-exist.json"}).code == kSchema);

  std::string bad = write_temp("bad_instance.json", R"({"schema": "tropic-instance/1"})");
  CHECK(run({"validate", bad}).code == kSchema);
  std::remove(bad.c_str());

  // heights that break the unimodular-triangulation requirement
  Json j = Json::parse(slurp(kFixtures + "/p2-curve.json"));
  j["lambda"] = Json::array({"0", "0", "0", "0"});
  std::string flat = write_temp("flat_instance.json", j.dump(2) + "\n");
  CHECK(run({"validate", flat}).code == kValidation);
  std::remove(flat.c_str());

  // star center that is not a marked point
  CHECK(run({"fans", k3, "--w", "5,5,5"}).code == kDomain);
}
