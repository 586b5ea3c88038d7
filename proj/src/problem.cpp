#include "bcsynth/problem.hpp"

#include <json.hpp>

#include <fstream>
#include <set>
#include <sstream>

#include "bcsynth/parse.hpp"

namespace bcsynth {

using nlohmann::json;

namespace {

[[noreturn]] void field_error(const std::string& field, const std::string& msg) {
  throw ProblemError("problem field '" + field + "': " + msg);
}

// JSON numbers round-trip through their shortest decimal rendering, so 0.01
// becomes the exact rational 1/100 rather than the nearest binary double.
Rat rat_from_json(const json& j, const std::string& field) {
  try {
    if (j.is_string()) return parse_rational(j.get<std::string>());
    if (j.is_number_integer()) return Rat(BigInt(j.get<long long>()));
    if (j.is_number()) return parse_rational(j.dump());
  } catch (const std::exception& e) {
    field_error(field, e.what());
  }
  field_error(field, "expected a number or numeric string");
}

std::vector<std::string> string_list(const json& j, const std::string& field) {
  if (j.is_string()) return {j.get<std::string>()};
  if (j.is_array()) {
    std::vector<std::string> out;
    for (const auto& e : j) {
      if (!e.is_string()) field_error(field, "expected strings");
      out.push_back(e.get<std::string>());
    }
    return out;
  }
  field_error(field, "expected a string or list of strings");
}

const json& require(const json& j, const std::string& key) {
  auto it = j.find(key);
  if (it == j.end()) field_error(key, "missing");
  return *it;
}

}  // namespace

ProblemSpec parse_problem_json(const std::string& text, const std::string& name) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw ProblemError(std::string("invalid JSON: ") + e.what());
  }
  if (!j.is_object()) throw ProblemError("problem file must be a JSON object");

  ProblemSpec spec;
  spec.name = name;

  std::vector<std::string> var_names;
  for (const auto& v : require(j, "vars")) var_names.push_back(v.get<std::string>());
  if (var_names.empty()) field_error("vars", "at least one variable required");
  std::set<std::string> uniq(var_names.begin(), var_names.end());
  if (uniq.size() != var_names.size()) field_error("vars", "duplicate variable name");
  spec.vars = make_vars(var_names);

  const auto& field = require(j, "field");
  if (!field.is_array() || field.size() != var_names.size())
    field_error("field", "expected one component per variable");
  spec.field.vars = spec.vars;
  for (const auto& comp : field) {
    try {
      spec.field.components.push_back(parse_poly(comp.get<std::string>(), spec.vars));
    } catch (const ParseError& e) {
      field_error("field", e.what());
    }
  }

  try {
    spec.init = parse_poly_list(string_list(require(j, "init"), "init"), spec.vars);
    spec.unsafe = parse_poly_list(string_list(require(j, "unsafe"), "unsafe"), spec.vars);
  } catch (const ParseError& e) {
    throw ProblemError(std::string("init/unsafe: ") + e.what());
  }
  if (spec.init.empty()) field_error("init", "at least one polynomial required");
  if (spec.unsafe.empty()) field_error("unsafe", "at least one polynomial required");

  const auto& box = require(j, "domain_box");
  if (!box.is_array() || box.size() != var_names.size())
    field_error("domain_box", "expected one [lo, hi] pair per variable");
  for (const auto& iv : box) {
    if (!iv.is_array() || iv.size() != 2) field_error("domain_box", "expected [lo, hi]");
    Interval r{iv[0].get<double>(), iv[1].get<double>()};
    if (!(r.lo <= r.hi)) field_error("domain_box", "lo must be <= hi");
    spec.domain_box.push_back(r);
  }

  const auto& tp = require(j, "template");
  std::string mode = require(tp, "mode").get<std::string>();
  if (mode == "full") {
    spec.tmpl.mode = TemplateConfig::Mode::FullDegree;
    spec.tmpl.degree = require(tp, "degree").get<unsigned>();
  } else if (mode == "explicit") {
    spec.tmpl.mode = TemplateConfig::Mode::Explicit;
    spec.tmpl.poly_text = require(tp, "poly").get<std::string>();
  } else {
    field_error("template.mode", "expected 'full' or 'explicit'");
  }

  spec.lie_order = require(j, "lie_order").get<unsigned>();
  if (spec.lie_order < 1) field_error("lie_order", "must be >= 1");
  spec.multiplier_degree = require(j, "multiplier_degree").get<unsigned>();
  spec.sos_degree = require(j, "sos_degree").get<unsigned>();
  if (spec.sos_degree % 2 != 0) field_error("sos_degree", "must be even");
  if (auto it = j.find("sos_degree_overrides"); it != j.end()) {
    for (const auto& [k, v] : it->items()) {
      if (k != "initial" && k != "consecution" && k != "separation")
        field_error("sos_degree_overrides", "unknown key '" + k + "'");
      spec.sos_degree_overrides[k] = v.get<unsigned>();
    }
  }

  spec.sep_margin = rat_from_json(require(j, "sep_margin"), "sep_margin");
  if (spec.sep_margin <= 0) field_error("sep_margin", "must be > 0");

  std::string enc = require(j, "encoding").get<std::string>();
  if (enc == "sufficient")
    spec.encoding = Encoding::Sufficient;
  else if (enc == "necessary")
    spec.encoding = Encoding::Necessary;
  else
    field_error("encoding", "expected 'sufficient' or 'necessary'");

  if (auto it = j.find("ball_radius"); it != j.end()) {
    spec.ball_radius = rat_from_json(*it, "ball_radius");
    if (*spec.ball_radius <= 0) field_error("ball_radius", "must be > 0");
  }
  if (spec.encoding == Encoding::Necessary && !spec.ball_radius)
    field_error("ball_radius", "required for the necessary encoding");

  const auto& bounds = require(j, "bounds");
  spec.l_a = require(bounds, "l_a").get<double>();
  spec.l_s = require(bounds, "l_s").get<double>();
  if (spec.l_a <= 0 || spec.l_s <= 0) field_error("bounds", "l_a and l_s must be > 0");

  if (auto it = j.find("strict_order"); it != j.end()) spec.strict_order = it->get<bool>();

  const auto& dcp = require(j, "dcp");
  spec.dcp.delta = require(dcp, "delta").get<double>();
  if (spec.dcp.delta >= 0) field_error("dcp.delta", "must be < 0");
  spec.dcp.conv_tol = require(dcp, "conv_tol").get<double>();
  if (spec.dcp.conv_tol < 0) field_error("dcp.conv_tol", "must be >= 0");
  spec.dcp.max_iter = require(dcp, "max_iter").get<int>();
  if (spec.dcp.max_iter < 1) field_error("dcp.max_iter", "must be >= 1");
  if (auto it = dcp.find("init_c"); it != dcp.end()) spec.dcp.init_c = it->get<double>();
  if (auto it = dcp.find("lambda_tol"); it != dcp.end()) spec.dcp.lambda_tol = it->get<double>();

  const auto& bnb = require(j, "bnb");
  spec.bnb.eta = require(bnb, "eta").get<double>();
  if (spec.bnb.eta <= 0) field_error("bnb.eta", "must be > 0");
  spec.bnb.samples = require(bnb, "samples").get<int>();
  spec.bnb.max_depth = require(bnb, "max_depth").get<int>();
  if (auto it = bnb.find("workers"); it != bnb.end()) spec.bnb.workers = it->get<int>();

  return spec;
}

ProblemSpec load_problem(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ProblemError("cannot open problem file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  std::string stem = path;
  if (auto slash = stem.find_last_of('/'); slash != std::string::npos)
    stem = stem.substr(slash + 1);
  if (auto dot = stem.find_last_of('.'); dot != std::string::npos) stem = stem.substr(0, dot);
  return parse_problem_json(buf.str(), stem);
}

std::string problem_to_json(const ProblemSpec& spec) {
  json j;
  j["vars"] = *spec.vars;
  std::vector<std::string> field;
  for (const auto& c : spec.field.components) field.push_back(c.str());
  j["field"] = field;
  auto polys = [](const std::vector<Poly>& ps) {
    std::vector<std::string> out;
    for (const auto& p : ps) out.push_back(p.str());
    return out;
  };
  j["init"] = polys(spec.init);
  j["unsafe"] = polys(spec.unsafe);
  std::vector<std::vector<double>> box;
  for (const auto& iv : spec.domain_box) box.push_back({iv.lo, iv.hi});
  j["domain_box"] = box;
  if (spec.tmpl.mode == TemplateConfig::Mode::FullDegree)
    j["template"] = {{"mode", "full"}, {"degree", spec.tmpl.degree}};
  else
    j["template"] = {{"mode", "explicit"}, {"poly", spec.tmpl.poly_text}};
  j["lie_order"] = spec.lie_order;
  j["multiplier_degree"] = spec.multiplier_degree;
  j["sos_degree"] = spec.sos_degree;
  if (!spec.sos_degree_overrides.empty()) j["sos_degree_overrides"] = spec.sos_degree_overrides;
  j["sep_margin"] = to_string(spec.sep_margin);
  j["encoding"] = spec.encoding == Encoding::Sufficient ? "sufficient" : "necessary";
  if (spec.ball_radius) j["ball_radius"] = to_string(*spec.ball_radius);
  j["bounds"] = {{"l_a", spec.l_a}, {"l_s", spec.l_s}};
  if (spec.strict_order) j["strict_order"] = true;
  json dcp = {{"delta", spec.dcp.delta},
              {"conv_tol", spec.dcp.conv_tol},
              {"max_iter", spec.dcp.max_iter}};
  if (spec.dcp.init_c) dcp["init_c"] = *spec.dcp.init_c;
  j["dcp"] = dcp;
  j["bnb"] = {{"eta", spec.bnb.eta},
              {"samples", spec.bnb.samples},
              {"max_depth", spec.bnb.max_depth}};
  if (spec.bnb.workers != 1) j["bnb"]["workers"] = spec.bnb.workers;
  return j.dump(2);
}

ParamPoly instantiate_template(const TemplateConfig& cfg, const VarList& vars,
                               ParamTable& table) {
  if (cfg.mode == TemplateConfig::Mode::FullDegree) {
    ParamPoly p(vars);
    auto basis = monomial_basis(vars->size(), cfg.degree);
    for (std::size_t k = 0; k < basis.size(); ++k) {
      int idx = table.add_a("a" + std::to_string(k));
      p.add_term(basis[k], ParamExpr::param(ParamGroup::A, idx));
    }
    return p;
  }
  return parse_template(cfg.poly_text, vars, table);
}

Poly substitute_params(const ParamPoly& p, const ParamTable& table,
                       const std::map<std::string, Rat>& values) {
  std::vector<Rat> a(table.a_count(), Rat(0));
  std::vector<bool> assigned(table.a_count(), false);
  for (const auto& [name, val] : values) {
    auto idx = table.find_a(name);
    if (!idx) throw ProblemError("unknown parameter '" + name + "'");
    a[*idx] = val;
    assigned[*idx] = true;
  }
  for (const auto& [m, e] : p.terms()) {
    for (const auto& [i, c] : e.a_lin)
      if (!assigned[i]) throw ProblemError("missing parameter '" + table.a_names[i] + "'");
    (void)m;
  }
  std::vector<Rat> s;
  return p.substitute(a, s);
}

}  // namespace bcsynth
