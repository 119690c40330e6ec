#include "qsym/casebook.hpp"

namespace qsym {

Expr random_polynomial(const ContextPtr& ctx, RandomSource& rnd, int max_order, int terms) {
  // pool: independents, dependents, jets up to max_order
  std::vector<Expr> pool;
  for (int i = 0; i < ctx->n_independent(); ++i) pool.push_back(ctx->x(i));
  for (int j = 0; j < ctx->n_dependent(); ++j) {
    pool.push_back(ctx->u(j));
    if (max_order >= 1)
      for (const auto& alpha : multiindices_up_to(ctx->n_independent(), max_order))
        pool.push_back(ctx->jet(j, alpha));
  }
  Expr out(0);
  for (int t = 0; t < terms; ++t) {
    Expr term{rnd.small_nonzero()};
    int factors = rnd.uniform(1, 2);
    for (int f = 0; f < factors; ++f) {
      int pick = rnd.uniform(0, static_cast<int>(pool.size()) - 1);
      int power = rnd.uniform(1, 2);
      term *= pool[static_cast<size_t>(pick)].pow(power);
    }
    out += term;
  }
  return out;
}

VectorField random_point_field(const ContextPtr& ctx, RandomSource& rnd) {
  std::vector<Expr> pool;
  for (int i = 0; i < ctx->n_independent(); ++i) pool.push_back(ctx->x(i));
  for (int j = 0; j < ctx->n_dependent(); ++j) pool.push_back(ctx->u(j));
  auto coeff = [&]() {
    Expr out{rnd.small_rational()};
    int extra = rnd.uniform(0, 2);
    for (int f = 0; f < extra; ++f) {
      int pick = rnd.uniform(0, static_cast<int>(pool.size()) - 1);
      Expr term{rnd.small_nonzero()};
      term *= pool[static_cast<size_t>(pick)].pow(rnd.uniform(1, 2));
      out += term;
    }
    return out;
  };
  std::vector<Expr> xi, eta;
  for (int i = 0; i < ctx->n_independent(); ++i) xi.push_back(coeff());
  for (int j = 0; j < ctx->n_dependent(); ++j) eta.push_back(coeff());
  return VectorField(ctx, std::move(xi), std::move(eta));
}

Expr heat_polynomial(const ContextPtr& ctx, int n) {
  // v_n = n! sum_k t^k x^(n-2k) / (k! (n-2k)!)
  Expr t = ctx->x(0), x = ctx->x(1);
  Expr out(0);
  auto factorial = [](int m) {
    Rat r(1);
    for (int i = 2; i <= m; ++i) r *= i;
    return r;
  };
  for (int k = 0; 2 * k <= n; ++k) {
    Rat c = factorial(n) / (factorial(k) * factorial(n - 2 * k));
    out += Expr(c) * t.pow(k) * x.pow(n - 2 * k);
  }
  return out;
}

Expr random_heat_solution(const ContextPtr& ctx, RandomSource& rnd) {
  Expr t = ctx->x(0), x = ctx->x(1);
  Expr out(0);
  // a polynomial piece, an exponential piece, or their sum; frequencies are
  // kept at small denominators so combined solutions stay tractable
  int shape = rnd.uniform(0, 2);
  if (shape != 1) {
    out += Expr(rnd.small_nonzero()) * heat_polynomial(ctx, rnd.uniform(0, 4));
  }
  if (shape != 0) {
    // Galilei family: exp(a x + a^2 t) * v_n(t, x + 2 a t)
    Rat a(rnd.uniform(0, 1) == 0 ? rnd.uniform(1, 3) : -rnd.uniform(1, 3),
          rnd.uniform(1, 2));
    a.canonicalize();
    Expr ae{a};
    Expr boost = exp_expr(ae * x + ae * ae * t);
    int n = rnd.uniform(0, 2);
    // v_n with x shifted to x + 2 a t (one-shot replacement)
    int32_t x_atom = ctx->independent(1).atom;
    Expr shifted = rebuild(heat_polynomial(ctx, n), ctx,
                           [&](const JetContext&, int32_t id) -> std::optional<Expr> {
                             if (id == x_atom) return x + Expr(2) * ae * t;
                             return std::nullopt;
                           });
    out += Expr(rnd.small_nonzero()) * boost * shifted;
  }
  if (out.is_zero()) out = heat_polynomial(ctx, 1);
  return out;
}

}  // namespace qsym
