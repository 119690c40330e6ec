#include <benchmark/benchmark.h>

#include <qsym/casebook.hpp>
#include <qsym/invariance.hpp>

using namespace qsym;

namespace {

struct HeatBench {
  ContextPtr ctx = JetContext::make({"t", "x"}, {"u"});
  Expr t = ctx->x(0), x = ctx->x(1), u = ctx->u(0);
  PdeSystem heat{ctx, {PdeEquation{ctx->jet_symbol(0, {1, 0}), ctx->jet(0, {0, 2})}}};
};

void BM_NormalizeProduct(benchmark::State& state) {
  HeatBench h;
  Expr a = (h.x + h.u).pow(4) + exp_expr(h.t + h.x) * h.u.pow(2);
  Expr b = (h.t * h.u - Expr(1)).pow(3);
  for (auto _ : state) benchmark::DoNotOptimize((a * b) / (b + Expr(1)));
}
BENCHMARK(BM_NormalizeProduct);

void BM_ProlongProjective(benchmark::State& state) {
  HeatBench h;
  VectorField pi(h.ctx, {Expr(4) * h.t.pow(2), Expr(4) * h.t * h.x},
                 {-(h.x.pow(2) + Expr(2) * h.t) * h.u});
  for (auto _ : state) {
    ProlongedField p(pi, 3);
    benchmark::DoNotOptimize(p.coefficient(0, {1, 2}));
  }
}
BENCHMARK(BM_ProlongProjective);

void BM_LieResidualProjective(benchmark::State& state) {
  HeatBench h;
  VectorField pi(h.ctx, {Expr(4) * h.t.pow(2), Expr(4) * h.t * h.x},
                 {-(h.x.pow(2) + Expr(2) * h.t) * h.u});
  for (auto _ : state) benchmark::DoNotOptimize(lie_residual(h.heat, pi));
}
BENCHMARK(BM_LieResidualProjective);

void BM_Branch1DeterminingSystem(benchmark::State& state) {
  HeatBench h;
  for (auto n : {"g1", "g2", "g3"})
    h.ctx->declare_function(n, {h.ctx->independent(0), h.ctx->independent(1)});
  VectorField tmpl(h.ctx, {Expr(1), h.ctx->func("g1")},
                   {h.ctx->func("g2") * h.u + h.ctx->func("g3")});
  for (auto _ : state) benchmark::DoNotOptimize(qcond_determining_system(h.heat, tmpl));
}
BENCHMARK(BM_Branch1DeterminingSystem);

void BM_Theorem4Map(benchmark::State& state) {
  HeatBench h;
  for (auto n : {"g1", "g2", "g3"})
    h.ctx->declare_function(n, {h.ctx->independent(0), h.ctx->independent(1)});
  VectorField tmpl(h.ctx, {Expr(1), h.ctx->func("g1")},
                   {h.ctx->func("g2") * h.u + h.ctx->func("g3")});
  DeterminingSystem ds = qcond_determining_system(h.heat, tmpl);
  RandomSource rnd(7);
  Expr z1 = random_heat_solution(h.ctx, rnd);
  Expr z2 = random_heat_solution(h.ctx, rnd);
  Expr z3 = random_heat_solution(h.ctx, rnd);
  auto dx = [&](const Expr& e) { return total_derivative(e, 1); };
  for (auto _ : state) {
    Expr w = dx(z1) * z2 - z1 * dx(z2);
    Expr g1 = -(dx(dx(z1)) * z2 - z1 * dx(dx(z2))) / w;
    Expr g2 = -(dx(dx(z1)) * dx(z2) - dx(z1) * dx(dx(z2))) / w;
    Expr g3 = dx(dx(z3)) + g1 * dx(z3) - g2 * z3;
    benchmark::DoNotOptimize(ds.admits({{"g1", g1}, {"g2", g2}, {"g3", g3}}));
  }
}
BENCHMARK(BM_Theorem4Map);

}  // namespace

BENCHMARK_MAIN();
