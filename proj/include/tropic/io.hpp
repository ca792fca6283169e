// JSON instance files, canonical serialization, and result envelopes for the
// command-line driver. Rationals travel as "p/q" strings (or decimal strings
// on input); complex coefficients as ["re","im"] pairs or exact polar form
// {"abs", "arg_times_pi"}. Serialization is canonical: loading a canonical
// file and saving it again is byte-identical.
#pragma once

#include <json.hpp>

#include <fstream>
#include <iomanip>
#include <sstream>

#include "tropic/lift.hpp"
#include "tropic/gamma.hpp"

namespace tropic {

using Json = nlohmann::ordered_json;

struct SchemaError : std::runtime_error {
  std::string pointer;  // JSON-pointer-style location of the offending value
  SchemaError(std::string ptr, const std::string& msg)
      : std::runtime_error(ptr + ": " + msg), pointer(std::move(ptr)) {}
};

struct InstanceFile {
  TropicalInput input;
  std::map<int, Rat> branch_arg_times_pi;  // optional branch table, per point
};

namespace iodetail {

// "p/q", integer, or decimal string -> exact rational
inline Rat parse_rat_ext(const std::string& s, const std::string& ptr) {
  try {
    auto dot = s.find('.');
    if (dot == std::string::npos) return parse_rat(s);
    std::string digits = s.substr(0, dot) + s.substr(dot + 1);
    bool neg = !digits.empty() && (digits[0] == '-' || digits[0] == '+');
    std::string sign = neg ? digits.substr(0, 1) : "";
    if (neg) digits = digits.substr(1);
    // strip leading zeros so the integer parser cannot mistake them for octal
    size_t nz = digits.find_first_not_of('0');
    digits = (nz == std::string::npos) ? "0" : digits.substr(nz);
    std::string den = "1" + std::string(s.size() - dot - 1, '0');
    return parse_rat(sign + digits + "/" + den);
  } catch (const std::exception& e) {
    throw SchemaError(ptr, e.what());
  }
}

inline std::string need_string(const Json& j, const std::string& ptr) {
  if (!j.is_string()) throw SchemaError(ptr, "expected a string");
  return j.get<std::string>();
}

// exact rectangular value of abs * exp(i pi q); only half-integer turns have
// rational rectangular coordinates
inline CRat polar_crat(const Rat& abs, const Rat& turn, const std::string& ptr) {
  // reduce the turn count mod 2
  Rat t = turn - Rat(2) * Rat(Int(turn.get_num() / turn.get_den() / 2));
  while (t < 0) t += 2;
  while (t >= 2) t -= 2;
  if (t == Rat(0)) return CRat(abs, Rat(0));
  if (t == Rat(1, 2)) return CRat(Rat(0), abs);
  if (t == Rat(1)) return CRat(-abs, Rat(0));
  if (t == Rat(3, 2)) return CRat(Rat(0), -abs);
  throw SchemaError(ptr, "polar form needs arg_times_pi in (1/2)Z for an exact value");
}

}  // namespace iodetail

inline InstanceFile parse_instance(const Json& j) {
  using iodetail::need_string;
  using iodetail::parse_rat_ext;
  InstanceFile out;
  if (!j.is_object()) throw SchemaError("/", "instance must be a JSON object");
  if (j.value("schema", "") != "tropic-instance/1")
    throw SchemaError("/schema", "expected \"tropic-instance/1\"");
  if (!j.contains("rank") || !j["rank"].is_number_integer())
    throw SchemaError("/rank", "expected an integer");
  out.input.rank = j["rank"].get<int>();

  if (!j.contains("points") || !j["points"].is_array())
    throw SchemaError("/points", "expected an array of integer vectors");
  for (size_t i = 0; i < j["points"].size(); ++i) {
    const Json& p = j["points"][i];
    std::string ptr = "/points/" + std::to_string(i);
    if (!p.is_array() || p.size() != static_cast<size_t>(out.input.rank))
      throw SchemaError(ptr, "expected an integer vector of length rank");
    std::vector<Int> x;
    for (const Json& c : p) {
      if (!c.is_number_integer()) throw SchemaError(ptr, "coordinates must be integers");
      x.emplace_back(c.get<long>());
    }
    out.input.points.emplace_back(std::move(x), Lattice::M);
  }

  if (!j.contains("lambda") || !j["lambda"].is_array() ||
      j["lambda"].size() != j["points"].size())
    throw SchemaError("/lambda", "expected one height string per point");
  for (size_t i = 0; i < j["lambda"].size(); ++i) {
    std::string ptr = "/lambda/" + std::to_string(i);
    out.input.heights.push_back(parse_rat_ext(need_string(j["lambda"][i], ptr), ptr));
  }

  if (!j.contains("coefficients") || !j["coefficients"].is_array() ||
      j["coefficients"].size() != j["points"].size())
    throw SchemaError("/coefficients", "expected one coefficient per point");
  for (size_t i = 0; i < j["coefficients"].size(); ++i) {
    const Json& c = j["coefficients"][i];
    std::string ptr = "/coefficients/" + std::to_string(i);
    if (c.is_array() && c.size() == 2) {
      out.input.coeffs.emplace_back(parse_rat_ext(need_string(c[0], ptr + "/0"), ptr + "/0"),
                                    parse_rat_ext(need_string(c[1], ptr + "/1"), ptr + "/1"));
    } else if (c.is_object() && c.contains("abs") && c.contains("arg_times_pi")) {
      Rat abs = parse_rat_ext(need_string(c["abs"], ptr + "/abs"), ptr + "/abs");
      Rat turn = parse_rat_ext(need_string(c["arg_times_pi"], ptr + "/arg_times_pi"),
                               ptr + "/arg_times_pi");
      out.input.coeffs.push_back(iodetail::polar_crat(abs, turn, ptr));
      out.branch_arg_times_pi[static_cast<int>(i)] = turn;
    } else {
      throw SchemaError(ptr, "expected [re, im] or {abs, arg_times_pi}");
    }
  }

  if (j.contains("triangulation")) {
    if (!j["triangulation"].is_array())
      throw SchemaError("/triangulation", "expected an array of index arrays");
    std::vector<std::vector<int>> cells;
    for (size_t i = 0; i < j["triangulation"].size(); ++i) {
      const Json& cell = j["triangulation"][i];
      std::string ptr = "/triangulation/" + std::to_string(i);
      if (!cell.is_array()) throw SchemaError(ptr, "expected an index array");
      std::vector<int> ids;
      for (const Json& v : cell) {
        if (!v.is_number_integer() || v.get<long>() < 0 ||
            v.get<size_t>() >= out.input.points.size())
          throw SchemaError(ptr, "point index out of range");
        ids.push_back(v.get<int>());
      }
      std::sort(ids.begin(), ids.end());
      cells.push_back(std::move(ids));
    }
    out.input.cells = std::move(cells);
  }

  if (j.contains("branch")) {
    if (!j["branch"].is_object())
      throw SchemaError("/branch", "expected an object mapping point index to arg/pi");
    for (const auto& [key, val] : j["branch"].items()) {
      std::string ptr = "/branch/" + key;
      int idx;
      try {
        idx = std::stoi(key);
      } catch (const std::exception&) {
        throw SchemaError(ptr, "keys must be point indices");
      }
      if (idx < 0 || static_cast<size_t>(idx) >= out.input.points.size())
        throw SchemaError(ptr, "point index out of range");
      out.branch_arg_times_pi[idx] = parse_rat_ext(need_string(val, ptr), ptr);
    }
  }
  return out;
}

inline Json instance_json(const InstanceFile& inst) {
  Json j;
  j["schema"] = "tropic-instance/1";
  j["rank"] = inst.input.rank;
  Json pts = Json::array();
  for (const Vec& p : inst.input.points) {
    Json v = Json::array();
    for (const Int& c : p.x) v.push_back(c.get_si());
    pts.push_back(v);
  }
  j["points"] = pts;
  Json lam = Json::array();
  for (const Rat& h : inst.input.heights) lam.push_back(format_rat(h));
  j["lambda"] = lam;
  Json co = Json::array();
  for (const CRat& c : inst.input.coeffs)
    co.push_back(Json::array({format_rat(c.re), format_rat(c.im)}));
  j["coefficients"] = co;
  if (inst.input.cells) j["triangulation"] = *inst.input.cells;
  if (!inst.branch_arg_times_pi.empty()) {
    Json b = Json::object();
    for (const auto& [idx, turn] : inst.branch_arg_times_pi)
      b[std::to_string(idx)] = format_rat(turn);
    j["branch"] = b;
  }
  return j;
}

inline std::string save_instance(const InstanceFile& inst) {
  return instance_json(inst).dump(2) + "\n";
}

inline InstanceFile load_instance(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw SchemaError("/", "cannot open " + path);
  Json j;
  try {
    j = Json::parse(f);
  } catch (const nlohmann::json::parse_error& e) {
    throw SchemaError("/", std::string("invalid JSON: ") + e.what());
  }
  return parse_instance(j);
}

inline std::string instance_hash(const InstanceFile& inst) {
  std::ostringstream os;
  os << std::hex << std::setfill('0') << std::setw(16) << fnv1a(save_instance(inst));
  return os.str();
}

// ---- result serialization ----------------------------------------------

inline std::string cone_key(const std::vector<int>& rays) {
  std::string s;
  for (size_t i = 0; i < rays.size(); ++i)
    s += (i ? "," : "") + std::to_string(rays[i]);
  return s;
}

inline std::vector<int> parse_cone_key(const std::string& s, const std::string& ptr) {
  std::vector<int> out;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    try {
      out.push_back(std::stoi(tok));
    } catch (const std::exception&) {
      throw SchemaError(ptr, "expected comma-separated ray indices");
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

template <class T>
inline Json weight_json(const Weight<T>& a) {
  Json j;
  j["codim"] = a.codim;
  Json vals = Json::object();
  const Fan& f = *a.fan;
  for (size_t i = 0; i < a.vals.size(); ++i) {
    std::string key = cone_key(f.at(a.dim())[i].rays);
    if constexpr (std::is_same_v<T, Int>)
      vals[key] = a.vals[i].get_str();
    else if constexpr (std::is_same_v<T, Rat>)
      vals[key] = format_rat(a.vals[i]);
    else
      vals[key] = Json::array({a.vals[i].real(), a.vals[i].imag()});
  }
  j["vals"] = vals;
  return j;
}

inline IWeight parse_weight(const Fan& f, const Json& j, int default_codim) {
  int codim = j.value("codim", default_codim);
  IWeight a = IWeight::zero(f, codim);
  if (!j.contains("vals") || !j["vals"].is_object())
    throw SchemaError("/vals", "expected an object mapping ray sets to integers");
  for (const auto& [key, val] : j["vals"].items()) {
    std::vector<int> rays = parse_cone_key(key, "/vals/" + key);
    auto loc = f.find(rays);
    if (!loc || loc->first != a.dim())
      throw SchemaError("/vals/" + key, "not a cone of the expected dimension");
    if (val.is_string())
      a.vals[loc->second] = Int(val.get<std::string>());
    else if (val.is_number_integer())
      a.vals[loc->second] = Int(val.get<long>());
    else
      throw SchemaError("/vals/" + key, "expected an integer");
  }
  return a;
}

inline Json kclass_json(const KClass& x) {
  Json terms = Json::array();
  for (const auto& [key, mult] : x.terms) {
    Json t;
    Json coeff = Json::array();
    for (const Int& c : key) coeff.push_back(c.get_si());
    t["coeff"] = coeff;
    t["mult"] = mult.get_str();
    terms.push_back(t);
  }
  Json j;
  j["terms"] = terms;
  return j;
}

inline KClass parse_kclass_json(const Fan& f, const Json& j) {
  KClass x = KClass::zero(f);
  if (!j.contains("terms") || !j["terms"].is_array())
    throw SchemaError("/terms", "expected an array of {coeff, mult}");
  for (size_t i = 0; i < j["terms"].size(); ++i) {
    const Json& t = j["terms"][i];
    std::string ptr = "/terms/" + std::to_string(i);
    if (!t.contains("coeff") || !t["coeff"].is_array() ||
        t["coeff"].size() != static_cast<size_t>(f.nrays()))
      throw SchemaError(ptr + "/coeff", "expected one divisor coefficient per ray");
    std::vector<Int> key;
    for (const Json& c : t["coeff"]) key.emplace_back(c.get<long>());
    Int mult = t["mult"].is_string() ? Int(t["mult"].get<std::string>())
                                     : Int(t["mult"].get<long>());
    x.add(key, mult);
  }
  return x;
}

inline Json graded_json(const GradedClass& g) {
  Json comps = Json::array();
  for (const QWeight& w : g.comp) comps.push_back(weight_json(w));
  Json j;
  j["components"] = comps;
  return j;
}

inline Json logpoly_json(const LogPolynomial& p) {
  Json coeff = Json::array();
  for (const Cplx& c : p.coeff) coeff.push_back(Json::array({c.real(), c.imag()}));
  Json j;
  j["coeff_of_L_power"] = coeff;
  j["epsilon_marker"] = p.epsilon_marker;
  return j;
}

struct ResultEnvelope {
  std::string command;
  std::string instance;  // canonical-content hash
  std::uint64_t seed = 0;
  Json payload;
  double timing_ms = 0;
};

inline Json envelope_json(const ResultEnvelope& e) {
  Json j;
  j["command"] = e.command;
  j["instance"] = e.instance;
  j["seed"] = e.seed;
  j["payload"] = e.payload;
  j["timing_ms"] = e.timing_ms;
  return j;
}

}  // namespace tropic
