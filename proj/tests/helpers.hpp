#ifndef QSYM_TESTS_HELPERS_HPP
#define QSYM_TESTS_HELPERS_HPP

#include <qsym/casebook.hpp>
#include <qsym/invariance.hpp>
#include <qsym/reduction.hpp>

namespace qsym::testing {

/// Heat-equation workspace shared by most tests.
struct Heat {
  ContextPtr ctx = JetContext::make({"t", "x"}, {"u"});
  Expr t = ctx->x(0);
  Expr x = ctx->x(1);
  Expr u = ctx->u(0);
  Expr ut = ctx->jet(0, {1, 0});
  Expr ux = ctx->jet(0, {0, 1});
  Expr uxx = ctx->jet(0, {0, 2});
  PdeSystem heat{ctx, {PdeEquation{ctx->jet_symbol(0, {1, 0}), ctx->jet(0, {0, 2})}}};

  VectorField vf(Expr xi0, Expr xi1, Expr eta) const {
    return VectorField(ctx, {std::move(xi0), std::move(xi1)}, {std::move(eta)});
  }
  Symbol sym_ut() const { return ctx->jet_symbol(0, {1, 0}); }
  Symbol sym_ux() const { return ctx->jet_symbol(0, {0, 1}); }
  Symbol sym_uxx() const { return ctx->jet_symbol(0, {0, 2}); }

  VectorField dt() const { return vf(Expr(1), Expr(0), Expr(0)); }
  VectorField dx() const { return vf(Expr(0), Expr(1), Expr(0)); }
  VectorField galilei() const { return vf(Expr(0), t, Expr::rational(-1, 2) * x * u); }
  VectorField scaling_u() const { return vf(Expr(0), Expr(0), u); }
  VectorField dilation() const { return vf(Expr(2) * t, x, Expr(0)); }
  VectorField projective() const {
    return vf(Expr(4) * t.pow(2), Expr(4) * t * x, -(x.pow(2) + Expr(2) * t) * u);
  }
};

}  // namespace qsym::testing

#endif
