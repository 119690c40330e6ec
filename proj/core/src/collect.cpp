// Exact coefficient extraction over jet coordinates / dependent variables.

#include <set>

#include "internal.hpp"
#include "qsym/expr.hpp"

namespace qsym {

using namespace detail;

namespace {

// Deep dependence check: the atom's own arguments and exp parts count.
bool atom_depends_on(const JetContext* ctx, int32_t atom, const std::set<int32_t>& vars) {
  const AtomData& d = ctx->atom(atom);
  if (vars.count(atom)) return true;
  if (d.kind == AtomKind::Root && vars.count(d.a)) return true;
  bool hit = false;
  auto check_expr = [&](const ExprPtr& e) {
    if (hit || !e) return;
    for_each_atom(e, [&](int32_t a) {
      if (vars.count(a)) hit = true;
      const AtomData& ad = ctx->atom(a);
      if (ad.kind == AtomKind::Root && vars.count(ad.a)) hit = true;
    });
  };
  check_expr(d.arg);
  for (const auto& a : d.args) check_expr(a);
  return hit;
}

void require_free_of(const JetContext* ctx, const Poly& p, const std::set<int32_t>& vars,
                     const char* where) {
  for (const auto& [m, c] : p.terms) {
    for (auto [atom, exp] : m.factors)
      if (atom_depends_on(ctx, atom, vars))
        throw math_error(std::string("non-polynomial dependence in ") + where + ": " +
                         ctx->atom_str(atom));
    if (m.exp_arg) {
      bool hit = false;
      for_each_atom(m.exp_arg, [&](int32_t a) {
        if (vars.count(a)) hit = true;
      });
      if (hit)
        throw math_error(std::string("non-polynomial dependence in ") + where +
                         ": exp(" + Expr(m.exp_arg).str() + ")");
    }
  }
}

}  // namespace

std::map<Expr, Expr, ExprLess> collect_coefficients(const Expr& e,
                                                    const std::vector<Symbol>& vars) {
  std::map<Expr, Expr, ExprLess> out;
  if (e.is_zero()) return out;
  ContextPtr ctx = e.context();
  if (!ctx) {
    out.emplace(Expr(1), e);
    return out;
  }
  std::set<int32_t> var_atoms;
  for (const auto& v : vars) {
    if (!v.valid() || v.ctx != ctx) throw context_error("collect: symbol from a different context");
    const AtomData& d = ctx->atom(v.atom);
    if (d.kind != AtomKind::Jet)
      throw context_error("collect: variables must be jet coordinates or dependent variables");
    var_atoms.insert(v.atom);
  }

  const ExprData& data = e.data();
  require_free_of(ctx.get(), data.den, var_atoms, "denominator");
  Expr den(make_ratio(ctx, data.den, poly_const(Rat(1))));

  for (const auto& [m, c] : data.num.terms) {
    Mono var_part, rest;
    rest.exp_arg = m.exp_arg;
    for (auto [atom, exp] : m.factors) {
      if (var_atoms.count(atom)) {
        var_part.factors.push_back({atom, exp});
      } else {
        if (atom_depends_on(ctx.get(), atom, var_atoms))
          throw math_error("non-polynomial dependence on a collection variable: " +
                           ctx->atom_str(atom));
        rest.factors.push_back({atom, exp});
      }
    }
    if (m.exp_arg) {
      bool hit = false;
      for_each_atom(m.exp_arg, [&](int32_t a) {
        if (var_atoms.count(a)) hit = true;
      });
      if (hit)
        throw math_error("non-polynomial dependence on a collection variable: exp(" +
                         Expr(m.exp_arg).str() + ")");
    }
    Poly key_poly;
    key_poly.terms.push_back({var_part, Rat(1)});
    Expr key(make_ratio(ctx, std::move(key_poly), poly_const(Rat(1))));
    Poly rest_poly;
    rest_poly.terms.push_back({rest, c});
    Expr val = Expr(make_ratio(ctx, std::move(rest_poly), poly_const(Rat(1)))) / den;
    auto [it, fresh] = out.try_emplace(key, Expr(0));
    it->second += val;
  }
  // drop keys whose coefficients cancelled to zero
  for (auto it = out.begin(); it != out.end();) {
    if (it->second.is_zero())
      it = out.erase(it);
    else
      ++it;
  }
  return out;
}

std::map<long, Expr> collect_powers(const Expr& e, const Symbol& s) {
  std::map<long, Expr> out;
  if (e.is_zero()) return out;
  ContextPtr ctx = e.context();
  if (!ctx) {
    out.emplace(0, e);
    return out;
  }
  if (!s.valid() || s.ctx != ctx) throw context_error("collect_powers: bad symbol");
  std::set<int32_t> var_atoms{s.atom};

  const ExprData& data = e.data();
  require_free_of(ctx.get(), data.den, var_atoms, "denominator");
  Expr den(make_ratio(ctx, data.den, poly_const(Rat(1))));

  for (const auto& [m, c] : data.num.terms) {
    long k = 0;
    Mono rest;
    rest.exp_arg = m.exp_arg;
    for (auto [atom, exp] : m.factors) {
      if (atom == s.atom) {
        k = exp;
      } else {
        if (atom_depends_on(ctx.get(), atom, var_atoms))
          throw math_error("non-polynomial dependence on " + s.str() + ": " +
                           ctx->atom_str(atom));
        rest.factors.push_back({atom, exp});
      }
    }
    if (m.exp_arg) {
      bool hit = false;
      for_each_atom(m.exp_arg, [&](int32_t a) {
        if (var_atoms.count(a)) hit = true;
      });
      if (hit)
        throw math_error("non-polynomial dependence on " + s.str() + " inside exp");
    }
    Poly rest_poly;
    rest_poly.terms.push_back({rest, c});
    Expr val = Expr(make_ratio(ctx, std::move(rest_poly), poly_const(Rat(1)))) / den;
    auto [it, fresh] = out.try_emplace(k, Expr(0));
    it->second += val;
  }
  for (auto it = out.begin(); it != out.end();) {
    if (it->second.is_zero())
      it = out.erase(it);
    else
      ++it;
  }
  return out;
}

Expr primitive_part(const Expr& e) {
  if (e.is_zero()) return Expr(0);
  Rat content;
  Poly num = poly_rat_content(e.data().num, content);
  return Expr(make_ratio(e.context(), std::move(num), poly_const(Rat(1))));
}

}  // namespace qsym
