#include <doctest.h>

#include "helpers.hpp"

using namespace qsym;
using qsym::testing::Heat;

TEST_CASE("heat equation Lie symmetries") {
  Heat h;
  for (const VectorField& q : {h.dt(), h.dx(), h.galilei(), h.scaling_u(), h.dilation(),
                               h.projective()})
    CHECK(is_lie_symmetry(h.heat, q));

  // f(t,x) du needs the constraint f_t = f_xx
  h.ctx->declare_function("f", {h.ctx->independent(0), h.ctx->independent(1)});
  VectorField fu = h.vf(Expr(0), Expr(0), h.ctx->func("f"));
  InvarianceOptions fopts;
  fopts.constraints = {FunctionConstraint{"f", {1, 0}, h.ctx->func_derivative("f", {0, 2})}};
  CHECK(is_lie_symmetry(h.heat, fu, fopts));
  CHECK_FALSE(is_lie_symmetry(h.heat, fu));
}

TEST_CASE("on-manifold vanishing differs from identical vanishing") {
  Heat h;
  // pr Pi (L) is a nonzero multiple of L before restriction
  Expr l = h.ut - h.uxx;
  Expr raw = apply_prolonged(prolong(h.projective(), 2), l);
  CHECK_FALSE(raw.is_zero());
  CHECK(substitute(raw, {{h.sym_ut(), h.uxx}}).is_zero());
  auto res = lie_residual(h.heat, h.projective());
  REQUIRE(res.size() == 1);
  CHECK(res[0].is_zero());
  // dx + u du: nonzero raw application, still a symmetry
  VectorField q = h.vf(Expr(0), Expr(1), h.u);
  CHECK(apply_prolonged(prolong(q, 2), l).identical(l));
  CHECK(is_lie_symmetry(h.heat, q));
}

TEST_CASE("dilatation example t u_t + x u_x = 1") {
  Heat h;
  PdeSystem eq(h.ctx, {PdeEquation{h.sym_ut(), (Expr(1) - h.x * h.ux) / h.t}});
  CHECK(is_lie_symmetry(eq, VectorField(h.ctx, {h.t, h.x}, {Expr(0)})));
  CHECK_FALSE(is_lie_symmetry(eq, h.dt()));
}

TEST_CASE("equation (11) is not translation invariant") {
  Heat h;
  PdeSystem e11(h.ctx, {PdeEquation{h.sym_ut(), h.u + h.t * h.u - h.t * h.ux - h.uxx}});
  CHECK_FALSE(is_lie_symmetry(e11, h.dt()));
  auto res = lie_residual(e11, h.dt());
  CHECK(res[0].identical(h.ux - h.u));
  CHECK_FALSE(is_qcond_symmetry(e11, InvolutiveSet({h.dt()})));
}

TEST_CASE("Q-conditional residuals on the heat equation") {
  Heat h;
  // a Lie symmetry is Q-conditional
  CHECK(is_qcond_symmetry(h.heat, InvolutiveSet({h.dt()})));
  CHECK(is_qcond_symmetry(h.heat, InvolutiveSet({h.galilei()})));
  // elimination-order independence is checked internally; a plain non-symmetry
  VectorField bad = h.vf(Expr(1), h.u, Expr(0));
  CHECK_FALSE(is_qcond_symmetry(h.heat, InvolutiveSet({bad})));
}

TEST_CASE("degenerate surface conditions are rejected") {
  Heat h;
  VectorField no_xi = h.vf(Expr(0), Expr(0), h.u);
  CHECK_THROWS_AS(qcond_residual(h.heat, InvolutiveSet({no_xi})), rewrite_error);
  // two conditions solving for the same derivative
  CHECK_THROWS_AS(qcond_residual(h.heat, InvolutiveSet({h.dt(), h.dilation()})), rewrite_error);
}

TEST_CASE("transfer equation Q-conditional operators") {
  Heat h;
  h.ctx->declare_function("h", {h.ctx->independent(0)});
  Expr hh = h.ctx->func("h");
  PdeSystem transfer(h.ctx, {PdeEquation{h.sym_ut(), h.uxx - hh / h.x * h.ux}});
  VectorField x_op = h.vf(Expr(1), (hh - Expr(1)) / h.x, Expr(0));
  CHECK(is_qcond_symmetry(transfer, InvolutiveSet({x_op})));
  Expr a = symbol_expr(h.ctx->add_parameter("A"));
  VectorField g_tilde = h.vf(Expr(0), Expr(2) * h.t + a, -h.x * h.u);
  CHECK(is_qcond_symmetry(transfer, InvolutiveSet({g_tilde})));
  // the pair is not jointly involutive with distinct designated derivatives
  CHECK(is_qcond_symmetry(transfer, InvolutiveSet({x_op, g_tilde})));
}

TEST_CASE("nonlinear top jet falls back to pseudo-division") {
  Heat h;
  // u_t + (u_x + t u_xx)(u_xx + 1) = 0
  PdeSystem mix(h.ctx,
                {PdeEquation{h.sym_ut(), -(h.ux + h.t * h.uxx) * (h.uxx + Expr(1))}});
  auto qr = qcond_residual(mix, InvolutiveSet({h.dt()}));
  CHECK(qr.used_pseudo_division);
  CHECK_FALSE(qr.residuals[0].is_zero());
}

TEST_CASE("Definition-1 restriction is degenerate") {
  Heat h;
  CHECK(definition1_residual(h.heat, h.vf(Expr(1), h.x, h.u * h.u + h.t)).is_zero());
  CHECK(definition1_residual(h.heat, h.vf(Expr(0), Expr(1), h.u)).is_zero());
  PdeSystem e11(h.ctx, {PdeEquation{h.sym_ut(), h.u + h.t * h.u - h.t * h.ux - h.uxx}});
  CHECK(definition1_residual(e11, h.vf(Expr(1), h.t * h.x, h.x * h.u)).is_zero());
}

TEST_CASE("algebra closure") {
  Heat h;
  auto rep = check_algebra_closure(
      {h.dt(), h.dx(), h.galilei(), h.scaling_u(), h.dilation(), h.projective()});
  CHECK(rep.closes);
  // [dt, Pi] = 4 D - 2 I: table entries are exact rationals
  CHECK(rep.table[0][5][4] == Rat(4));
  CHECK(rep.table[0][5][3] == Rat(-2));
  auto rep2 = check_algebra_closure({h.dx(), h.projective()});
  CHECK_FALSE(rep2.closes);
  auto rep3 = check_algebra_closure({h.dt(), h.dilation()});
  CHECK(rep3.closes);
}
