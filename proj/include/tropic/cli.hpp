// Subcommand dispatcher for the command-line driver. Every subcommand loads a
// JSON instance, runs one pipeline stage, and prints a deterministic result
// envelope. Exit codes: 0 success, 1 internal error, 2 usage, 3 schema error,
// 4 instance validation error, 5 balancing violation, 6 domain/precondition
// error.
#pragma once

#include <CLI11.hpp>

#include <chrono>
#include <cstdlib>

#include "tropic/io.hpp"

namespace tropic {

enum ExitCode {
  kOk = 0,
  kInternal = 1,
  kUsage = 2,
  kSchema = 3,
  kValidation = 4,
  kBalance = 5,
  kDomain = 6,
};

struct BalanceError : std::runtime_error {
  Cone cone;
  BalanceError(Cone c, const std::string& msg) : std::runtime_error(msg), cone(std::move(c)) {}
};

namespace clidetail {

inline std::vector<int> parse_int_list(const std::string& s) {
  std::vector<int> out;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    try {
      out.push_back(std::stoi(tok));
    } catch (const std::exception&) {
      throw std::invalid_argument("expected comma-separated integers: " + s);
    }
  }
  return out;
}

inline Vec parse_point(const std::string& s, int rank) {
  std::vector<int> xs = parse_int_list(s);
  if (static_cast<int>(xs.size()) != rank)
    throw std::invalid_argument("expected " + std::to_string(rank) + " coordinates: " + s);
  std::vector<Int> x(xs.begin(), xs.end());
  return Vec(std::move(x), Lattice::M);
}

inline IWeight weight_from_spec(const Fan& f, const std::string& spec, int codim) {
  if (spec == "ones") return IWeight::ones(f, codim);
  std::ifstream file(spec);
  if (!file) throw SchemaError("/", "cannot open weight file " + spec);
  Json j;
  try {
    j = Json::parse(file);
  } catch (const nlohmann::json::parse_error& e) {
    throw SchemaError("/", std::string("invalid JSON in ") + spec + ": " + e.what());
  }
  return parse_weight(f, j, codim);
}

inline KClass kclass_from_spec(const Fan& f, const std::string& spec) {
  if (spec == "O") return KClass::unit(f);
  if (spec == "zero") return KClass::zero(f);
  if (spec == "O-O(-1)") {
    // prefer a single ample ray divisor (a hyperplane class); otherwise use
    // the preferred ample divisor of the fan
    for (int r = 0; r < f.nrays(); ++r)
      if (is_ample_divisor(ToricDivisor::ray(f, r)))
        return KClass::unit(f) - KClass::line_bundle(-ToricDivisor::ray(f, r));
    return KClass::unit(f) - KClass::line_bundle(-find_ample(f));
  }
  std::ifstream file(spec);
  if (!file) throw SchemaError("/", "cannot open K-class file " + spec);
  Json j;
  try {
    j = Json::parse(file);
  } catch (const nlohmann::json::parse_error& e) {
    throw SchemaError("/", std::string("invalid JSON in ") + spec + ": " + e.what());
  }
  return parse_kclass_json(f, j);
}

inline IWeight balanced_or_throw(IWeight a, const std::string& label) {
  if (auto bad = balance_violation(a))
    throw BalanceError(*bad, label + " violates balancing at cone {" + cone_key(bad->rays) + "}");
  return a;
}

inline Json frame_terms(const MultiVector& mv) {
  Json out = Json::array();
  for (const auto& [mask, c] : mv.c) {
    Json term;
    Json idx = Json::array();
    for (int i = 0; i < mv.rank; ++i)
      if (mask & (1u << i)) idx.push_back(i);
    term["indices"] = idx;
    term["coeff"] = c.get_str();
    out.push_back(term);
  }
  return out;
}

inline Json qvec_json(const QVec& v) {
  Json out = Json::array();
  for (const Rat& c : v.x) out.push_back(format_rat(c));
  return out;
}

inline KClass anti_nef_terms(const KClass& e) {
  for (const auto& [key, mult] : e.terms)
    if (!is_anti_nef_divisor(ToricDivisor{e.fan, key})) return anti_nef_decompose(e);
  return e;
}

}  // namespace clidetail

inline int run_cli(std::vector<std::string> args, std::ostream& out, std::ostream& err) {
  using namespace clidetail;
  CLI::App app{"exact tropical cycles, K-class lifts, and period asymptotics"};
  app.require_subcommand(1);

  std::string path, w = "", w1 = "", w2 = "", a1spec = "ones", a2spec = "ones";
  std::string espec = "O", weightspec = "ones", polytope = "", format = "json", outpath = "";
  std::string eval_at_t = "", vspec = "";
  int codim = 1, codim1 = 1, codim2 = 1, l = 1;
  std::uint64_t seed = 2026;
  bool seed_given = false;
  if (const char* env = std::getenv("TROPIC_SEED")) seed = std::strtoull(env, nullptr, 10);

  auto add_common = [&](CLI::App* sc) {
    sc->add_option("instance", path, "instance JSON file")->required();
    sc->add_option("--seed", seed, "generic-vector seed")->each([&](const std::string&) {
      seed_given = true;
    });
    return sc;
  };
  (void)seed_given;

  CLI::App* c_validate = add_common(app.add_subcommand("validate", "check the instance"));
  CLI::App* c_fans = add_common(app.add_subcommand("fans", "star fan at a marked point"));
  c_fans->add_option("--w", w, "star center");
  CLI::App* c_cycle = add_common(app.add_subcommand("cycle", "tropical cycle of a weight"));
  c_cycle->add_option("--w", w);
  c_cycle->add_option("--weight", weightspec, "weight file or 'ones'");
  c_cycle->add_option("--codim", codim);
  CLI::App* c_balance = add_common(app.add_subcommand("balance", "balancing check"));
  c_balance->add_option("--w", w);
  c_balance->add_option("--weight", weightspec);
  c_balance->add_option("--codim", codim);
  CLI::App* c_cup = add_common(app.add_subcommand("cup", "cup product of two weights"));
  c_cup->add_option("--w", w);
  c_cup->add_option("--a1", a1spec);
  c_cup->add_option("--a2", a2spec);
  c_cup->add_option("--codim1", codim1);
  c_cup->add_option("--codim2", codim2);
  CLI::App* c_int = add_common(app.add_subcommand("intersect", "intersection number"));
  c_int->add_option("--w1", w1)->required();
  c_int->add_option("--w2", w2)->required();
  c_int->add_option("--a1", a1spec);
  c_int->add_option("--a2", a2spec);
  c_int->add_option("--codim1", codim1);
  c_int->add_option("--codim2", codim2);
  CLI::App* c_enum =
      add_common(app.add_subcommand("enumerate-intersections", "intersection points"));
  c_enum->add_option("--w1", w1)->required();
  c_enum->add_option("--w2", w2)->required();
  c_enum->add_option("--a1", a1spec);
  c_enum->add_option("--a2", a2spec);
  c_enum->add_option("--codim1", codim1);
  c_enum->add_option("--codim2", codim2);
  CLI::App* c_chern = add_common(app.add_subcommand("chern", "Chern character of a K-class"));
  c_chern->add_option("--w", w);
  c_chern->add_option("--E", espec);
  CLI::App* c_dec = add_common(app.add_subcommand("decompose", "anti-nef decomposition"));
  c_dec->add_option("--w", w);
  c_dec->add_option("--E", espec);
  CLI::App* c_w2k = add_common(app.add_subcommand("weight-to-k", "K-class from a weight"));
  c_w2k->add_option("--w", w);
  c_w2k->add_option("--weight", weightspec);
  c_w2k->add_option("--codim", codim);
  CLI::App* c_lift = add_common(app.add_subcommand("lift", "cell chain of a K-class or polytope"));
  c_lift->add_option("--w", w);
  c_lift->add_option("--E", espec);
  c_lift->add_option("--polytope", polytope, "nef divisor coefficients, one per ray");
  CLI::App* c_prof = add_common(app.add_subcommand("profile", "fiber-volume profile"));
  c_prof->add_option("--w", w);
  c_prof->add_option("--E", espec);
  CLI::App* c_per = add_common(app.add_subcommand("period", "period asymptotics in L = log t"));
  c_per->add_option("--w", w);
  c_per->add_option("--v", vspec);
  c_per->add_option("--l", l);
  c_per->add_option("--E", espec);
  c_per->add_option("--eval-at-t", eval_at_t, "also evaluate the polynomial at t");
  CLI::App* c_exp = add_common(app.add_subcommand("export", "serialize a lift complex"));
  c_exp->add_option("--w", w);
  c_exp->add_option("--E", espec);
  c_exp->add_option("--polytope", polytope);
  c_exp->add_option("--format", format)->check(CLI::IsMember({"json", "obj"}));
  c_exp->add_option("--out", outpath);

  std::reverse(args.begin(), args.end());
  try {
    app.parse(std::move(args));
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err) == 0 ? kOk : kUsage;
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kUsage;
  }

  auto t0 = std::chrono::steady_clock::now();
  ResultEnvelope env;
  env.seed = seed;
  try {
    InstanceFile inst = load_instance(path);
    TropicalInput& in = inst.input;
    env.instance = instance_hash(inst);
    Subdivision sub = validate(in);
    Vec origin(std::vector<Int>(in.rank, 0), Lattice::M);
    auto center = [&](const std::string& s) { return s.empty() ? origin : parse_point(s, in.rank); };
    VolumeForm vol{in.rank, 1};

    if (*c_validate) {
      env.command = "validate";
      Json cells = Json::array();
      for (const auto& c : sub.cells) cells.push_back(c);
      Json ipts = Json::array();
      try {
        for (const Vec& p : interior_points(in)) {
          Json v = Json::array();
          for (const Int& c : p.x) v.push_back(c.get_si());
          ipts.push_back(v);
        }
      } catch (const TropicalError&) {
        // a valid instance may still have an interior-point-free hull
      }
      env.payload["rank"] = in.rank;
      env.payload["points"] = in.points.size();
      env.payload["cells"] = cells;
      env.payload["interior_points"] = ipts;
    } else if (*c_fans) {
      env.command = "fans";
      StarFan st = fan_at(in, sub, center(w));
      Json rays = Json::array();
      for (const Vec& r : st.fan.rays) {
        Json v = Json::array();
        for (const Int& c : r.x) v.push_back(c.get_si());
        rays.push_back(v);
      }
      Json per_dim = Json::array();
      for (int d = 0; d <= st.fan.rank; ++d) per_dim.push_back(st.fan.at(d).size());
      env.payload["rays"] = rays;
      env.payload["cones_per_dim"] = per_dim;
      env.payload["complete"] = st.fan.complete;
      env.payload["unimodular"] = st.fan.unimodular;
    } else if (*c_cycle) {
      env.command = "cycle";
      StarFan st = fan_at(in, sub, center(w));
      IWeight a = balanced_or_throw(weight_from_spec(st.fan, weightspec, codim), "the weight");
      TropicalCycle cyc = cycle_from_weight(st, dual_cell(in, st), a, vol);
      Json terms = Json::array();
      for (const CycleTerm& t : cyc.terms) {
        Json jt;
        jt["flag"] = t.flag.chain;
        jt["frame"] = frame_terms(t.frame);
        terms.push_back(jt);
      }
      Json bary = Json::object();
      for (const auto& [rays, b] : cyc.bary) bary[cone_key(rays)] = qvec_json(b);
      env.payload["q"] = cyc.q;
      env.payload["terms"] = terms;
      env.payload["barycenters"] = bary;
    } else if (*c_balance) {
      env.command = "balance";
      StarFan st = fan_at(in, sub, center(w));
      IWeight a = weight_from_spec(st.fan, weightspec, codim);
      if (auto bad = balance_violation(a)) {
        env.payload["balanced"] = false;
        env.payload["violating_cone"] = bad->rays;
        auto ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0);
        env.timing_ms = ms.count();
        out << envelope_json(env).dump(2) << "\n";
        return kBalance;
      }
      env.payload["balanced"] = true;
    } else if (*c_cup) {
      env.command = "cup";
      StarFan st = fan_at(in, sub, center(w));
      IWeight x1 = balanced_or_throw(weight_from_spec(st.fan, a1spec, codim1), "--a1");
      IWeight x2 = balanced_or_throw(weight_from_spec(st.fan, a2spec, codim2), "--a2");
      GenericVector m0 = find_generic(st.fan, seed);
      IWeight c = cup(x1, x2, m0);
      env.payload["cup"] = weight_json(c);
      env.payload["balanced"] = balance_check(c);
      if (c.codim == st.fan.rank) env.payload["degree"] = degree(c).get_str();
    } else if (*c_int || *c_enum) {
      Vec v1 = center(w1), v2 = center(w2);
      StarFan st1 = fan_at(in, sub, v1);
      StarFan st2_store;
      if (!(v1 == v2)) st2_store = fan_at(in, sub, v2);
      StarFan& st2 = (v1 == v2) ? st1 : st2_store;
      IWeight x1 = balanced_or_throw(weight_from_spec(st1.fan, a1spec, codim1), "--a1");
      IWeight x2 = balanced_or_throw(weight_from_spec(st2.fan, a2spec, codim2), "--a2");
      if (*c_int) {
        env.command = "intersect";
        env.payload["value"] = tropical_intersection(in, sub, st1, x1, st2, x2, seed).get_str();
        env.payload["lift_value"] = lift_intersection(in, sub, st1, x1, st2, x2, seed).get_str();
      } else {
        env.command = "enumerate-intersections";
        GenericVector m0 = find_generic(st2.fan, seed);
        Enumeration e = intersection_enumerate(in, sub, st1, x1, st2, x2, m0);
        Json pts = Json::array();
        for (const IntersectionPoint& p : e.points) {
          Json jp;
          jp["sigma"] = p.sigma;
          jp["sigma_prime"] = p.sigma_p;
          jp["mult"] = p.mult.get_str();
          pts.push_back(jp);
        }
        env.payload["points"] = pts;
        env.payload["total"] = e.total.get_str();
      }
    } else if (*c_chern) {
      env.command = "chern";
      StarFan st = fan_at(in, sub, center(w));
      GenericVector m0 = find_generic(st.fan, seed);
      env.payload["chern"] = graded_json(chern(kclass_from_spec(st.fan, espec), m0));
    } else if (*c_dec) {
      env.command = "decompose";
      StarFan st = fan_at(in, sub, center(w));
      KClass d = anti_nef_decompose(kclass_from_spec(st.fan, espec));
      env.payload["anti_nef"] = kclass_json(d);
    } else if (*c_w2k) {
      env.command = "weight-to-k";
      StarFan st = fan_at(in, sub, center(w));
      IWeight a = balanced_or_throw(weight_from_spec(st.fan, weightspec, codim), "the weight");
      GenericVector m0 = find_generic(st.fan, seed);
      KClass x = weight_to_kclass(a, m0);
      auto [k, lead] = leading_index_and_weight(x, m0);
      env.payload["kclass"] = kclass_json(x);
      env.payload["leading_index"] = k;
      env.payload["leading_weight"] = weight_json(lead);
    } else if (*c_lift || *c_exp) {
      StarFan st = fan_at(in, sub, center(w));
      CellChain chain;
      if (!polytope.empty()) {
        std::vector<int> cs = parse_int_list(polytope);
        if (static_cast<int>(cs.size()) != st.fan.nrays())
          throw std::invalid_argument("--polytope needs one coefficient per ray");
        ToricDivisor d{&st.fan, std::vector<Int>(cs.begin(), cs.end())};
        if (!is_nef_divisor(d)) throw std::domain_error("--polytope divisor is not nef");
        chain = cycle_from_polytope(st.fan, vol, polytope_from_support(divisor_support(d)));
      } else {
        chain = chain_from_kclass(anti_nef_terms(kclass_from_spec(st.fan, espec)), vol);
      }
      if (*c_lift) {
        env.command = "lift";
        env.payload["cells"] = chain.cells.size();
        env.payload["closed"] = assert_cycle(chain).ok;
        env.payload["complex"] = Json::parse(export_complex(chain, ExportFormat::json));
      } else {
        env.command = "export";
        std::string content;
        if (format == "json") {
          content = export_complex(chain, ExportFormat::json);
        } else {
          Polytope dual = dual_cell(in, st);
          std::map<std::vector<int>, QVec> bary;
          for (const auto& [cell, oc] : chain.cells)
            for (const auto& rays : cell.base)
              if (!bary.count(rays))
                bary[rays] =
                    face_for_cone(dual, st.fan, Cone{rays, static_cast<int>(rays.size())})
                        .barycenter();
          content = export_complex(chain, ExportFormat::obj, &bary);
        }
        if (!outpath.empty()) {
          std::ofstream f(outpath, std::ios::binary);
          if (!f) throw std::runtime_error("cannot write " + outpath);
          f << content;
          env.payload["path"] = outpath;
          env.payload["bytes"] = content.size();
        } else {
          env.payload["content"] = content;
        }
      }
    } else if (*c_prof) {
      env.command = "profile";
      StarFan st = fan_at(in, sub, center(w));
      GenericVector m0 = find_generic(st.fan, seed);
      FiberProfile pr = lift_profile(kclass_from_spec(st.fan, espec), m0);
      env.payload["leading_index"] = pr.k;
      env.payload["leading_weight"] = weight_json(pr.leading);
      Json values = Json::array();
      for (const auto& row : pr.values) {
        Json jr = Json::object();
        for (const auto& [rays, v] : row) jr[cone_key(rays)] = format_rat(v);
        values.push_back(jr);
      }
      env.payload["values_by_q"] = values;
      Json supp = Json::array();
      for (const auto& chain : pr.support) supp.push_back(chain);
      env.payload["support_flags"] = supp;
    } else if (*c_per) {
      env.command = "period";
      StarFan st = fan_at(in, sub, center(w));
      GenericVector m0 = find_generic(st.fan, seed);
      PeriodInput pi;
      pi.l = l;
      pi.v = vspec.empty() ? origin : parse_point(vspec, in.rank);
      pi.E = kclass_from_spec(st.fan, espec);
      for (const auto& [idx, turn] : inst.branch_arg_times_pi)
        pi.branch.arg[idx] = turn.get_d() * 3.14159265358979323846;
      LogPolynomial p = period_asymptotic(in, sub, st, pi, m0);
      env.payload["period"] = logpoly_json(p);
      if (!eval_at_t.empty()) {
        double t = parse_rat(eval_at_t).get_d();
        if (!(t > 0)) throw std::domain_error("--eval-at-t needs t > 0");
        Cplx val = p.eval(t);
        env.payload["value_at_t"] = Json::array({val.real(), val.imag()});
      }
    }
  } catch (const SchemaError& e) {
    err << "schema error: " << e.what() << "\n";
    return kSchema;
  } catch (const TropicalError& e) {
    err << "validation error: " << e.what() << "\n";
    return kValidation;
  } catch (const BalanceError& e) {
    err << "balance error: " << e.what() << "\n";
    return kBalance;
  } catch (const std::domain_error& e) {
    err << "domain error: " << e.what() << "\n";
    return kDomain;
  } catch (const std::invalid_argument& e) {
    err << "domain error: " << e.what() << "\n";
    return kDomain;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kInternal;
  }

  auto ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0);
  env.timing_ms = ms.count();
  out << envelope_json(env).dump(2) << "\n";
  return kOk;
}

}  // namespace tropic
