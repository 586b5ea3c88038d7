#include "bcsynth/sos.hpp"

#include <algorithm>
#include <sstream>

namespace bcsynth {

Eigen::MatrixXd BilinearMatrixForm::eval(const Eigen::VectorXd& a,
                                         const Eigen::VectorXd& s) const {
  Eigen::MatrixXd out = F;
  for (const auto& [i, Hi] : H) out += a[i] * Hi;
  for (const auto& [j, Gj] : G) out += s[j] * Gj;
  for (const auto& [ij, Fm] : Fij) out += a[ij.first] * s[ij.second] * Fm;
  return out;
}

GramForm gram_decompose(const ParamPoly& h, std::vector<Monomial> basis, ParamTable& table,
                        int form_index, const std::string& origin) {
  const int p = static_cast<int>(basis.size());
  GramForm form;
  form.origin = origin;
  form.basis = std::move(basis);
  form.h = h;
  form.q.assign(static_cast<std::size_t>(p) * p, ParamExpr{});

  // All pairings b_i * b_j (i <= j) producing each representable monomial.
  std::map<Monomial, std::vector<std::pair<int, int>>, GrevlexGreater> pairs;
  for (int i = 0; i < p; ++i)
    for (int j = i; j < p; ++j) pairs[form.basis[i] * form.basis[j]].push_back({i, j});
  // Diagonal pairing first: monomials that are perfect squares of a basis
  // entry carry their mass on the diagonal.
  for (auto& [mono, plist] : pairs) {
    std::stable_sort(plist.begin(), plist.end(),
                     [](const auto& x, const auto& y) {
                       const bool dx = x.first == x.second, dy = y.first == y.second;
                       if (dx != dy) return dx;
                       return x < y;
                     });
    (void)mono;
  }

  for (const auto& [mono, coef] : h.terms()) {
    if (!pairs.count(mono))
      throw EncodeError("degree budget too small: monomial " + std::to_string(mono.degree()) +
                        " exceeds basis in form '" + origin + "'");
    (void)coef;
  }

  auto deposit = [&](const std::pair<int, int>& ij, const ParamExpr& w) {
    if (ij.first == ij.second) {
      form.at(ij.first, ij.second) += w;
    } else {
      ParamExpr half = w.scaled(Rat(1, 2));
      form.at(ij.first, ij.second) += half;
      form.at(ij.second, ij.first) += half;
    }
  };

  int aux_count = 0;
  for (const auto& [mono, plist] : pairs) {
    auto it = h.terms().find(mono);
    if (it != h.terms().end()) deposit(plist.front(), it->second);
    // Null-space directions: move weight between alternative pairings.
    for (std::size_t k = 1; k < plist.size(); ++k) {
      int idx = table.add_s("q" + std::to_string(form_index) + "_" + std::to_string(aux_count++),
                            SRole::aux_null_space, form_index);
      ParamExpr t = ParamExpr::param(ParamGroup::S, idx);
      deposit(plist[k], t);
      deposit(plist.front(), -t);
    }
  }
  return form;
}

ParamPoly gram_reconstruct(const GramForm& form, const VarList& vars) {
  ParamPoly acc(vars);
  const int p = form.p();
  for (int i = 0; i < p; ++i)
    for (int j = 0; j < p; ++j)
      acc.add_term(form.basis[i] * form.basis[j], form.at(i, j));
  return acc;
}

BilinearMatrixForm flatten_bilinear(const GramForm& form, int m, int n) {
  const int p = form.p();
  BilinearMatrixForm out;
  out.p = p;
  out.m = m;
  out.n = n;
  out.origin = form.origin;
  out.F = Eigen::MatrixXd::Zero(p, p);
  auto slot = [&](auto& store, auto key) -> Eigen::MatrixXd& {
    auto it = store.find(key);
    if (it == store.end()) it = store.emplace(key, Eigen::MatrixXd::Zero(p, p)).first;
    return it->second;
  };
  for (int i = 0; i < p; ++i)
    for (int j = 0; j < p; ++j) {
      // Constraint matrix is the negated Gram; doubles appear only here.
      const ParamExpr& e = form.at(i, j);
      if (e.c != 0) out.F(i, j) = -to_double(e.c);
      for (const auto& [ai, v] : e.a_lin) slot(out.H, ai)(i, j) = -to_double(v);
      for (const auto& [sj, v] : e.s_lin) slot(out.G, sj)(i, j) = -to_double(v);
      for (const auto& [ij, v] : e.cross) slot(out.Fij, ij)(i, j) = -to_double(v);
    }
  return out;
}

namespace {

unsigned param_poly_degree(const ParamPoly& p) {
  return p.is_zero() ? 0 : p.terms().begin()->first.degree();
}

struct Builder {
  const ProblemSpec& spec;
  ConstraintSystem sys;
  Rat eps;

  explicit Builder(const ProblemSpec& s) : spec(s) {
    sys.vars = s.vars;
    sys.encoding = s.encoding;
    eps = s.sep_margin;
  }

  SosMultiplier make_sos_multiplier(const std::string& name, int form) {
    SosMultiplier mult;
    mult.name = name;
    mult.form = form;
    mult.basis = monomial_basis(spec.vars->size(), (spec.multiplier_degree + 1) / 2);
    const int p = mult.p();
    ParamPoly poly(spec.vars);
    for (int i = 0; i < p; ++i)
      for (int j = i; j < p; ++j) {
        std::string pname = name + "_" + std::to_string(i) + "_" + std::to_string(j);
        SRole role = (i == 0 && j == 0) ? SRole::multiplier_constant : SRole::gram_entry;
        int idx = sys.params.add_s(pname, role, form);
        mult.entry_s.push_back(idx);
        ParamExpr e = ParamExpr::param(ParamGroup::S, idx, i == j ? Rat(1) : Rat(2));
        poly.add_term(mult.basis[i] * mult.basis[j], e);
      }
    mult.poly = poly;
    sys.sos_multipliers.push_back(mult);
    return mult;
  }

  FreeMultiplier make_free_multiplier(const std::string& name, int form) {
    FreeMultiplier mult;
    mult.name = name;
    mult.form = form;
    mult.monos = monomial_basis(spec.vars->size(), spec.multiplier_degree);
    ParamPoly poly(spec.vars);
    for (std::size_t k = 0; k < mult.monos.size(); ++k) {
      std::string pname = name + "_c" + std::to_string(k);
      SRole role = k == 0 ? SRole::multiplier_constant : SRole::multiplier_coeff;
      int idx = sys.params.add_s(pname, role, form);
      mult.coeff_s.push_back(idx);
      poly.add_term(mult.monos[k], ParamExpr::param(ParamGroup::S, idx));
    }
    mult.poly = poly;
    sys.free_multipliers.push_back(mult);
    return mult;
  }

  unsigned degree_cap(const std::string& key) const {
    if (auto it = spec.sos_degree_overrides.find(key); it != spec.sos_degree_overrides.end())
      return it->second;
    return spec.sos_degree;
  }

  void add_principal(const ParamPoly& h, GramForm::Kind kind, int order,
                     const std::string& origin, const std::string& cap_key) {
    unsigned deg = param_poly_degree(h);
    unsigned cap = degree_cap(cap_key);
    if (deg > cap)
      throw EncodeError("degree budget too small for form '" + origin + "': degree " +
                        std::to_string(deg) + " > sos_degree " + std::to_string(cap));
    unsigned d = (deg + 1) / 2;
    int idx = static_cast<int>(sys.grams.size());
    GramForm g = gram_decompose(h, monomial_basis(spec.vars->size(), d), sys.params, idx, origin);
    g.kind = kind;
    g.consec_order = order;
    sys.grams.push_back(std::move(g));
  }

  void add_psd_side_conditions() {
    for (const auto& mult : sys.sos_multipliers) {
      GramForm g;
      g.kind = GramForm::Kind::MultiplierPsd;
      g.origin = "psd(" + mult.name + ")";
      g.basis = mult.basis;
      const int p = mult.p();
      g.q.assign(static_cast<std::size_t>(p) * p, ParamExpr{});
      std::size_t k = 0;
      for (int i = 0; i < p; ++i)
        for (int j = i; j < p; ++j) {
          ParamExpr e = ParamExpr::param(ParamGroup::S, mult.entry_s[k++]);
          g.at(i, j) += e;
          if (i != j) g.at(j, i) += e;
        }
      g.h = mult.poly;
      sys.grams.push_back(std::move(g));
    }
  }

  void finish() {
    const int m = static_cast<int>(sys.params.a_count());
    const int n = static_cast<int>(sys.params.s_count());
    for (const auto& g : sys.grams) sys.forms.push_back(flatten_bilinear(g, m, n));
  }
};

}  // namespace

ConstraintSystem build_sufficient_constraints(const ProblemSpec& spec) {
  Builder b(spec);
  auto& sys = b.sys;

  sys.template_poly = instantiate_template(spec.tmpl, spec.vars, sys.params);
  for (unsigned k = 0; k <= spec.lie_order; ++k)
    sys.lies.push_back(lie_derivative(sys.template_poly, spec.field, k));

  const int n_principal = static_cast<int>(2 + spec.lie_order);
  sys.principal_count = n_principal;

  // (1) initial: -B + sum_k sigma_k * I_k
  {
    ParamPoly h = -sys.template_poly;
    for (std::size_t k = 0; k < spec.init.size(); ++k) {
      auto sigma = b.make_sos_multiplier("sig_i" + std::to_string(k), 0);
      h += sigma.poly.mul_poly(spec.init[k]);
    }
    b.add_principal(h, GramForm::Kind::Initial, 0, "initial", "initial");
  }

  // (2) consecution, one form per order i.
  for (unsigned i = 1; i <= spec.lie_order; ++i) {
    ParamPoly h = -sys.lies[i];
    for (unsigned j = 0; j < i; ++j) {
      auto v = b.make_free_multiplier("v" + std::to_string(i) + std::to_string(j),
                                      static_cast<int>(i));
      h += v.poly * sys.lies[j];
    }
    if (spec.strict_order && i == spec.lie_order)
      h -= ParamPoly::from_poly(Poly::constant(spec.vars, b.eps));
    b.add_principal(h, GramForm::Kind::Consecution, static_cast<int>(i),
                    "consecution i=" + std::to_string(i), "consecution");
  }

  // (3) separation: B + sum_k sigma'_k * U_k - eps
  {
    ParamPoly h = sys.template_poly;
    for (std::size_t k = 0; k < spec.unsafe.size(); ++k) {
      auto sigma = b.make_sos_multiplier("sig_u" + std::to_string(k), n_principal - 1);
      h += sigma.poly.mul_poly(spec.unsafe[k]);
    }
    h -= ParamPoly::from_poly(Poly::constant(spec.vars, b.eps));
    b.add_principal(h, GramForm::Kind::Separation, 0, "separation", "separation");
  }

  b.add_psd_side_conditions();
  b.finish();
  return sys;
}

ConstraintSystem build_necessary_constraints(const ProblemSpec& spec, const Rat& ball_radius) {
  if (ball_radius <= 0) throw EncodeError("ball_radius must be positive");
  Builder b(spec);
  auto& sys = b.sys;

  sys.template_poly = instantiate_template(spec.tmpl, spec.vars, sys.params);
  for (unsigned k = 0; k <= spec.lie_order; ++k)
    sys.lies.push_back(lie_derivative(sys.template_poly, spec.field, k));

  const int n_principal = static_cast<int>(2 + spec.lie_order);
  sys.principal_count = n_principal;

  // ||x||^2 - L, the Archimedean ball term.
  Poly ball(spec.vars);
  for (std::size_t v = 0; v < spec.vars->size(); ++v) {
    Monomial sq(spec.vars->size());
    sq.exps[v] = 2;
    ball.add_term(sq, Rat(1));
  }
  ball.add_term(Monomial(spec.vars->size()), -ball_radius);
  ParamPoly epsp = ParamPoly::from_poly(Poly::constant(spec.vars, b.eps));

  {
    ParamPoly h = -sys.template_poly;
    auto rho = b.make_sos_multiplier("rho_i", 0);
    h += rho.poly.mul_poly(ball);
    for (std::size_t k = 0; k < spec.init.size(); ++k) {
      auto sigma = b.make_sos_multiplier("sig_i" + std::to_string(k), 0);
      h += sigma.poly.mul_poly(spec.init[k]);
    }
    h += epsp;
    b.add_principal(h, GramForm::Kind::Initial, 0, "initial", "initial");
  }

  for (unsigned i = 1; i <= spec.lie_order; ++i) {
    ParamPoly h = -sys.lies[i];
    auto rho = b.make_sos_multiplier("rho_c" + std::to_string(i), static_cast<int>(i));
    h += rho.poly.mul_poly(ball);
    for (unsigned j = 0; j < i; ++j) {
      auto v = b.make_free_multiplier("v" + std::to_string(i) + std::to_string(j),
                                      static_cast<int>(i));
      h += v.poly * sys.lies[j];
    }
    h += epsp;
    b.add_principal(h, GramForm::Kind::Consecution, static_cast<int>(i),
                    "consecution i=" + std::to_string(i), "consecution");
  }

  {
    ParamPoly h = sys.template_poly;
    auto rho = b.make_sos_multiplier("rho_u", n_principal - 1);
    h += rho.poly.mul_poly(ball);
    for (std::size_t k = 0; k < spec.unsafe.size(); ++k) {
      auto sigma = b.make_sos_multiplier("sig_u" + std::to_string(k), n_principal - 1);
      h += sigma.poly.mul_poly(spec.unsafe[k]);
    }
    b.add_principal(h, GramForm::Kind::Separation, 0, "separation", "separation");
  }

  b.add_psd_side_conditions();
  b.finish();
  return sys;
}

ConstraintSystem build_constraints(const ProblemSpec& spec) {
  if (spec.encoding == Encoding::Necessary) {
    if (!spec.ball_radius) throw EncodeError("necessary encoding requires ball_radius");
    return build_necessary_constraints(spec, *spec.ball_radius);
  }
  return build_sufficient_constraints(spec);
}

std::string dump_forms(const ConstraintSystem& sys) {
  std::ostringstream out;
  for (std::size_t f = 0; f < sys.grams.size(); ++f) {
    const auto& g = sys.grams[f];
    out << "form " << f << " (" << g.origin << ") p=" << g.p() << "\n";
    out << "  basis:";
    for (const auto& m : g.basis) out << " " << monomial_to_string(m, *sys.vars);
    out << "\n";
    for (int i = 0; i < g.p(); ++i)
      for (int j = i; j < g.p(); ++j) {
        const auto& e = g.at(i, j);
        if (!e.is_zero())
          out << "  Q(" << i + 1 << "," << j + 1 << ") = " << e.str(sys.params) << "\n";
      }
  }
  return out.str();
}

}  // namespace bcsynth
