// Property tests over randomized expressions: the kernel's structural laws.

#include <doctest.h>

#include "helpers.hpp"

using namespace qsym;
using qsym::testing::Heat;

TEST_CASE("total derivatives commute") {
  Heat h;
  RandomSource rnd(101);
  for (int i = 0; i < 24; ++i) {
    Expr e = random_polynomial(h.ctx, rnd, 4, 3);
    Expr d01 = total_derivative(total_derivative(e, 0), 1);
    Expr d10 = total_derivative(total_derivative(e, 1), 0);
    CHECK((d01 - d10).is_zero());
  }
}

TEST_CASE("Leibniz rule") {
  Heat h;
  RandomSource rnd(102);
  for (int i = 0; i < 24; ++i) {
    Expr a = random_polynomial(h.ctx, rnd, 2, 2);
    Expr b = random_polynomial(h.ctx, rnd, 2, 2);
    int dir = rnd.uniform(0, 1);
    Expr lhs = total_derivative(a * b, dir);
    Expr rhs = total_derivative(a, dir) * b + a * total_derivative(b, dir);
    CHECK((lhs - rhs).is_zero());
  }
}

TEST_CASE("normalization is a congruence") {
  Heat h;
  RandomSource rnd(103);
  for (int i = 0; i < 24; ++i) {
    Expr a = random_polynomial(h.ctx, rnd, 2, 3);
    Expr b = random_polynomial(h.ctx, rnd, 2, 3);
    CHECK(normalize(a + b).identical(normalize(normalize(a) + normalize(b))));
    CHECK(normalize(a * b).identical(normalize(normalize(a) * normalize(b))));
  }
}

TEST_CASE("collect reconstructs the expression") {
  Heat h;
  RandomSource rnd(104);
  for (int i = 0; i < 16; ++i) {
    Expr e = random_polynomial(h.ctx, rnd, 2, 4);
    auto coeffs = collect_coefficients(e, {h.sym_ux(), h.ctx->dependent(0)});
    Expr back(0);
    for (const auto& [mono, coeff] : coeffs) back += mono * coeff;
    CHECK((back - e).is_zero());
  }
}

TEST_CASE("rational arithmetic round trips") {
  Heat h;
  RandomSource rnd(105);
  for (int i = 0; i < 16; ++i) {
    Expr a = random_polynomial(h.ctx, rnd, 1, 3);
    Expr b = random_polynomial(h.ctx, rnd, 1, 2);
    if (b.is_zero()) continue;
    Expr q = a / b;
    CHECK((q * b - a).is_zero());
  }
}

TEST_CASE("zero detection across mixed exponentials") {
  Heat h;
  RandomSource rnd(106);
  for (int i = 0; i < 12; ++i) {
    Expr a = random_heat_solution(h.ctx, rnd);
    Expr b = random_heat_solution(h.ctx, rnd);
    CHECK((a * b - b * a).is_zero());
    // division by a structured denominator (the Wronskian-type combination
    // used by the nonlocal map)
    Expr w = total_derivative(a, 1) * b - a * total_derivative(b, 1);
    if (!w.is_zero()) CHECK(((a / w) * w - a).is_zero());
  }
}
