#include <doctest.h>

#include "helpers.hpp"

using namespace qsym;
using qsym::testing::Heat;

TEST_CASE("canonical normalization") {
  Heat h;
  CHECK((h.x * h.u + h.u * h.x).identical(Expr(2) * h.x * h.u));
  CHECK((h.ux.pow(2) - h.ux * h.ux).is_zero());
  CHECK(((h.t * h.ut + h.x * h.ux - Expr(1)) - (h.x * h.ux + h.t * h.ut - Expr(1))).is_zero());
  // normalize is the identity on canonical values
  Expr e = h.x * h.u + Expr::rational(1, 2);
  CHECK(normalize(e).identical(e));
  CHECK(normalize(normalize(e)).identical(normalize(e)));
}

TEST_CASE("exactness of zero tests") {
  Heat h;
  CHECK(is_zero(h.ux - h.ux));
  CHECK(is_zero(exp_expr(h.u) * exp_expr(-h.u) - Expr(1)));
  CHECK(is_zero((h.x.pow(2) / h.t) * (h.t / h.x.pow(2)) - Expr(1)));
  CHECK_FALSE(is_zero(h.ux - h.ut));
  // exp merging keeps the group-ring representation canonical
  CHECK((exp_expr(h.u) * exp_expr(h.u)).identical(exp_expr(Expr(2) * h.u)));
  Expr frac = (exp_expr(Expr(2) * (h.t + h.x)) - Expr(1)) / (exp_expr(h.t + h.x) - Expr(1));
  CHECK(frac.identical(exp_expr(h.t + h.x) + Expr(1)));
}

TEST_CASE("partial derivatives") {
  Heat h;
  CHECK(partial_derivative(h.t * h.ux.pow(2) + h.u, h.sym_ux()).identical(Expr(2) * h.t * h.ux));
  CHECK(partial_derivative(exp_expr(h.u), h.ctx->dependent(0)).identical(exp_expr(h.u)));
  CHECK(partial_derivative(h.ut - h.uxx, h.sym_ut()).identical(Expr(1)));
  // jets are independent symbols
  CHECK(partial_derivative(h.ux, h.sym_ut()).is_zero());
  CHECK_THROWS_AS(partial_derivative(h.u, Symbol{}), context_error);
}

TEST_CASE("total derivatives") {
  Heat h;
  CHECK(total_derivative(h.u, 1).identical(h.ux));
  CHECK(total_derivative(h.x * h.ux, 1).identical(h.ux + h.x * h.uxx));
  Expr d = total_derivative(Expr(-2) * h.t * h.ut - h.x * h.ux, 0);
  Expr expect =
      Expr(-2) * h.ut - Expr(2) * h.t * h.ctx->jet(0, {2, 0}) - h.x * h.ctx->jet(0, {1, 1});
  CHECK(d.identical(expect));
  // multiindex composition
  CHECK(total_derivative(h.u, MultiIndex{0, 2}).identical(h.uxx));
  CHECK(total_derivative(h.u, MultiIndex{1, 1}).identical(h.ctx->jet(0, {1, 1})));
}

TEST_CASE("unknown functions and tagged derivatives") {
  Heat h;
  h.ctx->declare_function("theta", {h.ctx->independent(0), h.ctx->independent(1), h.ctx->dependent(0)});
  Expr th = h.ctx->func("theta");
  Expr th_u = h.ctx->func_derivative("theta", {0, 0, 1});
  Expr th_x = h.ctx->func_derivative("theta", {0, 1, 0});
  CHECK(partial_derivative(th, h.ctx->dependent(0)).identical(th_u));
  // total derivative chains through the dependent argument
  CHECK(total_derivative(th, 1).identical(th_x + th_u * h.ux));
  // derivatives with respect to non-arguments vanish
  CHECK(partial_derivative(th, h.sym_ux()).is_zero());
  // arity is validated
  CHECK_THROWS_AS(h.ctx->func("theta", {h.t}), context_error);
}

TEST_CASE("substitution") {
  Heat h;
  CHECK(substitute(h.ut - h.uxx, {{h.sym_ut(), h.uxx}}).is_zero());

  SubstOptions cl;
  cl.closure = true;
  cl.max_order = 3;
  CHECK(substitute(h.ctx->jet(0, {1, 1}), {{h.sym_ut(), h.uxx}}, cl)
            .identical(h.ctx->jet(0, {0, 3})));

  h.ctx->declare_function("theta", {h.ctx->independent(0), h.ctx->independent(1), h.ctx->dependent(0)});
  Expr th = h.ctx->func("theta");
  SubstOptions cl2;
  cl2.closure = true;
  cl2.max_order = 2;
  Expr got = substitute(h.uxx, {{h.sym_ux(), th}}, cl2);
  Expr expect = h.ctx->func_derivative("theta", {0, 1, 0}) +
                h.ctx->func_derivative("theta", {0, 0, 1}) * th;
  CHECK(got.identical(expect));

  // empty rule set is the identity
  Expr e = h.t * h.ux + exp_expr(h.u);
  CHECK(substitute(e, {}).identical(e));
  // cyclic rules are rejected
  CHECK_THROWS_AS(substitute(e, {{h.sym_ux(), h.ux + Expr(1)}}), rewrite_error);
  // closure without a cap is rejected
  SubstOptions bad;
  bad.closure = true;
  CHECK_THROWS_AS(substitute(h.uxx, {{h.sym_ux(), th}}, bad), rewrite_error);
}

TEST_CASE("coefficient collection") {
  Heat h;
  Symbol a = h.ctx->add_parameter("a");
  Symbol b = h.ctx->add_parameter("b");
  Symbol c = h.ctx->add_parameter("c");
  Expr e = symbol_expr(a) * h.ux.pow(2) + symbol_expr(b) * h.ux + symbol_expr(c);
  auto coeffs = collect_coefficients(e, {h.sym_ux()});
  REQUIRE(coeffs.size() == 3);
  CHECK(coeffs.at(h.ux.pow(2)).identical(symbol_expr(a)));
  CHECK(coeffs.at(h.ux).identical(symbol_expr(b)));
  CHECK(coeffs.at(Expr(1)).identical(symbol_expr(c)));

  CHECK(collect_coefficients(Expr(0), {h.sym_ux()}).empty());

  // non-polynomial dependence errors name the subterm
  CHECK_THROWS_AS(collect_coefficients(Expr(1) / h.ux, {h.sym_ux()}), math_error);
  CHECK_THROWS_AS(collect_coefficients(exp_expr(h.ux), {h.sym_ux()}), math_error);
}

TEST_CASE("antiderivative node") {
  Heat h;
  h.ctx->declare_function("h", {h.ctx->independent(0)});
  Expr hh = h.ctx->func("h");
  Expr integral = antiderivative(hh - Expr(1), h.ctx->independent(0));
  CHECK(partial_derivative(integral, h.ctx->independent(0)).identical(hh - Expr(1)));
  CHECK(partial_derivative(integral, h.ctx->independent(1)).is_zero());
  CHECK(total_derivative(integral, 0).identical(hh - Expr(1)));
  CHECK(antiderivative(Expr(0), h.ctx->independent(0)).is_zero());
}

TEST_CASE("rational powers on symbols") {
  Heat h;
  Expr sq = h.t.pow(Rat(1, 2));
  CHECK((sq * sq).identical(h.t));
  Expr w = h.x / sq;
  CHECK((w * w).identical(h.x.pow(2) / h.t));
  CHECK((sq.pow(4)).identical(h.t.pow(2)));
  CHECK_THROWS_AS((h.t + h.x).pow(Rat(1, 2)), math_error);
}

TEST_CASE("division by zero is rejected") {
  Heat h;
  CHECK_THROWS_AS(h.u / Expr(0), math_error);
  CHECK_THROWS_AS(h.u / (h.ux - h.ux), math_error);
}
