// Formal partial and total derivatives.
//
// Both walk the same recursion; they differ only in the derivative of a bare
// symbol: the partial derivative treats every other symbol (including jet
// coordinates) as independent, while the total derivative D_i maps each jet
// u_alpha to u_(alpha+e_i).

#include "internal.hpp"
#include "qsym/expr.hpp"

namespace qsym {

using namespace detail;

namespace {

struct DerivMode {
  bool total = false;
  int32_t wrt_atom = -1;  // partial mode
  int index = -1;         // total mode: independent-variable index
};

Expr derive_expr(const Expr& e, const DerivMode& mode);

Expr derive_atom(ContextPtr ctx, int32_t id, const DerivMode& mode) {
  const AtomData& d = ctx->atom(id);
  switch (d.kind) {
    case AtomKind::IndepVar:
      if (mode.total) return Expr(d.a == mode.index ? 1 : 0);
      return Expr(id == mode.wrt_atom ? 1 : 0);
    case AtomKind::Jet:
      if (mode.total) return ctx->jet(d.a, d.index.plus(mode.index));
      return Expr(id == mode.wrt_atom ? 1 : 0);
    case AtomKind::Param:
      if (mode.total) return Expr(0);
      return Expr(id == mode.wrt_atom ? 1 : 0);
    case AtomKind::Func: {
      // chain rule over the argument slots
      Expr sum(0);
      const FunctionInfo& info = ctx->function_info(d.a);
      for (size_t slot = 0; slot < d.args.size(); ++slot) {
        Expr darg = derive_expr(Expr(d.args[slot]), mode);
        if (darg.is_zero()) continue;
        std::vector<Expr> args;
        args.reserve(d.args.size());
        for (const auto& a : d.args) args.push_back(Expr(a));
        Expr tagged = ctx->func_derivative(info.name, d.index.plus(static_cast<int>(slot)), args);
        sum += tagged * darg;
      }
      return sum;
    }
    case AtomKind::Root: {
      // d(b^(1/q)) = (1/q) b^(1/q - 1) db
      Expr base_deriv = derive_atom(ctx, d.a, mode);
      if (base_deriv.is_zero()) return Expr(0);
      Expr root = Expr(make_ratio(ctx, poly_atom(id), poly_const(Rat(1))));
      Expr power = root.pow(static_cast<long>(1 - d.b));  // R^(1-q), R = b^(1/q)
      Rat inv_q(1, d.b);
      inv_q.canonicalize();
      return Expr(inv_q) * power * base_deriv;
    }
    case AtomKind::Log: {
      Expr arg(d.arg);
      Expr darg = derive_expr(arg, mode);
      if (darg.is_zero()) return Expr(0);
      return darg / arg;
    }
    case AtomKind::Antideriv: {
      bool wrt_var = false;
      if (mode.total) {
        wrt_var = (mode.index == d.a);
      } else {
        const AtomData& w = ctx->atom(mode.wrt_atom);
        wrt_var = (w.kind == AtomKind::IndepVar && w.a == d.a);
      }
      if (wrt_var) return Expr(d.arg);
      Expr darg = derive_expr(Expr(d.arg), mode);
      if (darg.is_zero()) return Expr(0);
      return antiderivative(darg, Symbol{ctx, ctx->independent(d.a).atom});
    }
    case AtomKind::ExpVar:
      throw math_error("internal lattice atom escaped into a derivative");
  }
  return Expr(0);
}

Expr mono_expr(ContextPtr ctx, const Mono& m, const Rat& c) {
  Poly p;
  p.terms.push_back({m, c});
  return Expr(make_ratio(ctx, std::move(p), poly_const(Rat(1))));
}

Expr derive_poly(ContextPtr ctx, const Poly& p, const DerivMode& mode) {
  Expr sum(0);
  for (const auto& [m, c] : p.terms) {
    // product rule over the factors
    for (size_t i = 0; i < m.factors.size(); ++i) {
      auto [atom, exp] = m.factors[i];
      Expr da = derive_atom(ctx, atom, mode);
      if (da.is_zero()) continue;
      Mono rest = m;
      if (exp == 1)
        rest.factors.erase(rest.factors.begin() + static_cast<long>(i));
      else
        rest.factors[i].second -= 1;
      sum += mono_expr(ctx, rest, c * Rat(exp)) * da;
    }
    if (m.exp_arg) {
      Expr darg = derive_expr(Expr(m.exp_arg), mode);
      if (!darg.is_zero()) sum += mono_expr(ctx, m, c) * darg;
    }
  }
  return sum;
}

Expr derive_expr(const Expr& e, const DerivMode& mode) {
  ContextPtr ctx = e.context();
  if (!ctx) return Expr(0);
  const ExprData& d = e.data();
  Expr dn = derive_poly(ctx, d.num, mode);
  bool den_const = d.den.is_constant();
  if (den_const) {
    Rat dc = d.den.terms.empty() ? Rat(1) : d.den.terms[0].second;
    return dn / Expr(dc);
  }
  Expr den = Expr(make_ratio(ctx, d.den, poly_const(Rat(1))));
  Expr dd = derive_poly(ctx, d.den, mode);
  if (dd.is_zero()) return dn / den;
  // D'-cancellation: with g = gcd(D', D), D' = g a, D = g b, the quotient rule
  // collapses to (N' b - N a) / (b D); this keeps denominators one factor
  // deeper instead of squared
  const ExprData& dnd = dn.data();
  const ExprData& ddd = dd.data();
  bool dn_poly = dnd.den.is_constant() && (dnd.den.is_zero() || dnd.den.terms[0].second == 1);
  bool dd_poly = ddd.den.is_constant() && (ddd.den.is_zero() || ddd.den.terms[0].second == 1);
  if (dn_poly && dd_poly) {
    Poly a = ddd.num, b = d.den;
    cross_reduce(ctx.get(), a, b);
    Poly numr = poly_add(ctx.get(), poly_mul(ctx.get(), dnd.num, b),
                         poly_neg(poly_mul(ctx.get(), d.num, a)));
    Poly denr = poly_mul(ctx.get(), b, d.den);
    // b is (a divisor of) the squarefree radical of D, so every common factor
    // of numr and denr divides b; reduce by small gcds against b instead of
    // one full-size gcd
    int guard = 0;
    while (!numr.is_zero() && !b.is_constant()) {
      Poly btmp = b;
      Poly s = cross_reduce(ctx.get(), numr, btmp);
      if (s.is_constant()) break;
      denr = poly_divide_exact_general(ctx.get(), denr, s);
      if (++guard > 64) break;
    }
    return Expr(make_ratio_coprime(ctx, std::move(numr), std::move(denr)));
  }
  Expr num = Expr(make_ratio(ctx, d.num, poly_const(Rat(1))));
  return dn / den - num * dd / (den * den);
}

}  // namespace

Expr partial_derivative(const Expr& e, const Symbol& s) {
  if (!s.valid()) throw context_error("partial_derivative: invalid symbol");
  const AtomData& d = s.ctx->atom(s.atom);
  if (d.kind != AtomKind::IndepVar && d.kind != AtomKind::Jet && d.kind != AtomKind::Param)
    throw context_error("partial_derivative: not a differentiable symbol: " + s.str());
  if (e.context() && e.context() != s.ctx)
    throw context_error("partial_derivative: symbol from a different context");
  DerivMode m;
  m.total = false;
  m.wrt_atom = s.atom;
  return derive_expr(e, m);
}

Expr total_derivative(const Expr& e, int i) {
  ContextPtr ctx = e.context();
  if (!ctx) return Expr(0);
  if (i < 0 || i >= ctx->n_independent())
    throw context_error("total_derivative: variable index out of range");
  DerivMode m;
  m.total = true;
  m.index = i;
  return derive_expr(e, m);
}

Expr total_derivative(const Expr& e, const MultiIndex& alpha) {
  Expr r = e;
  for (int i = 0; i < alpha.size(); ++i)
    for (int k = 0; k < alpha[i]; ++k) r = total_derivative(r, i);
  return r;
}

}  // namespace qsym
