// Builtin casebook checks: the parts of the verification suite that need
// engine-side work beyond plain directives (randomized properties, derive-and-
// compare flows, resolve-then-verify protocols for ambiguously printed
// formulas, and the integrable ODE families of the transfer equation).

#include <sstream>

#include "internal.hpp"
#include "qsym/casebook.hpp"
#include "qsym/reduction.hpp"

namespace qsym {

namespace {

[[noreturn]] void fail_case(const std::string& msg) { throw error(msg); }

void require(bool ok, const std::string& msg) {
  if (!ok) fail_case(msg);
}

// --- shared fixtures -----------------------------------------------------------

struct HeatFixture {
  ContextPtr ctx;
  Expr t, x, u;
  PdeSystem heat;

  HeatFixture()
      : ctx(JetContext::make({"t", "x"}, {"u"})),
        t(ctx->x(0)),
        x(ctx->x(1)),
        u(ctx->u(0)),
        heat(ctx, {PdeEquation{ctx->jet_symbol(0, {1, 0}), ctx->jet(0, {0, 2})}}) {}

  VectorField vf(Expr xi0, Expr xi1, Expr eta) const {
    return VectorField(ctx, {std::move(xi0), std::move(xi1)}, {std::move(eta)});
  }
};

DeterminingSystem derive_branch1(const HeatFixture& h) {
  h.ctx->declare_function("g1", {h.ctx->independent(0), h.ctx->independent(1)});
  h.ctx->declare_function("g2", {h.ctx->independent(0), h.ctx->independent(1)});
  h.ctx->declare_function("g3", {h.ctx->independent(0), h.ctx->independent(1)});
  VectorField t1 = h.vf(Expr(1), h.ctx->func("g1"),
                        h.ctx->func("g2") * h.u + h.ctx->func("g3"));
  return qcond_determining_system(h.heat, t1);
}

DeterminingSystem derive_branch2(const HeatFixture& h) {
  h.ctx->declare_function("theta",
                          {h.ctx->independent(0), h.ctx->independent(1), h.ctx->dependent(0)});
  VectorField t2 = h.vf(Expr(0), Expr(1), h.ctx->func("theta"));
  return qcond_determining_system(h.heat, t2);
}

// --- randomized properties -------------------------------------------------------

void master_identity(const BuiltinContext& bc) {
  long count = bc.arg_int(0, 100);
  HeatFixture h;
  RandomSource rnd(bc.seed);
  for (long i = 0; i < count; ++i) {
    Expr l = random_polynomial(h.ctx, rnd, rnd.uniform(1, 3), rnd.uniform(2, 4));
    VectorField q = random_point_field(h.ctx, rnd);
    Expr res = evolutionary_identity_residual(l, q);
    if (!res.is_zero()) {
      bc.residual(res);
      fail_case("identity residual nonzero at instance " + std::to_string(i) + ": L = " +
                l.str() + ", Q = " + q.str());
    }
  }
  bc.note("prolongation identity holds on " + std::to_string(count) + " randomized (L, Q) pairs");
}

void def1_degeneracy(const BuiltinContext& bc) {
  long count = bc.arg_int(0, 20);
  HeatFixture h;
  RandomSource rnd(bc.seed + 1);
  std::vector<Expr> pool = {h.t, h.x, h.u, h.ctx->jet(0, {0, 1})};
  auto x_poly = [&](int terms) {
    Expr out(0);
    for (int k = 0; k < terms; ++k) {
      Expr term{rnd.small_nonzero()};
      int factors = rnd.uniform(1, 2);
      for (int f = 0; f < factors; ++f)
        term *= pool[static_cast<size_t>(rnd.uniform(0, 3))].pow(rnd.uniform(1, 2));
      out += term;
    }
    return out;
  };
  for (long i = 0; i < count; ++i) {
    // quasilinear solved form u_t = a(t,x,u) u_xx + p(t, x, u, u_x)
    Expr a = Expr(rnd.small_nonzero()) +
             pool[static_cast<size_t>(rnd.uniform(0, 2))].pow(rnd.uniform(0, 1));
    Expr p = x_poly(2);
    Expr rhs = a * h.ctx->jet(0, {0, 2}) + p;
    PdeSystem eq(h.ctx, {PdeEquation{h.ctx->jet_symbol(0, {1, 0}), rhs}});
    // surface condition solvable for a designated derivative: xi is kept
    // low-degree and symbolically nonzero
    Expr small = Expr(rnd.small_rational()) * pool[static_cast<size_t>(rnd.uniform(0, 2))];
    Expr eta(0);  // point coefficient: (t, x, u) only
    for (int k = 0; k < 2; ++k)
      eta += Expr(rnd.small_rational()) *
             pool[static_cast<size_t>(rnd.uniform(0, 2))].pow(rnd.uniform(1, 2));
    std::vector<Expr> xi;
    if (rnd.uniform(0, 1) == 0)
      xi = {Expr(1) + small * small, Expr(rnd.small_rational()) * h.u};
    else
      xi = {Expr(0), Expr(1) + small * small};
    VectorField q2(h.ctx, xi, {eta});
    Expr res = definition1_residual(eq, q2);
    if (!res.is_zero()) {
      bc.residual(res);
      fail_case("Definition-1 restricted residual nonzero at instance " + std::to_string(i));
    }
  }
  bc.note("M-restricted residual vanished for " + std::to_string(count) +
          " randomized (equation, operator) pairs");
}

void lemma_equivalence(const BuiltinContext& bc) {
  long count = bc.arg_int(0, 6);
  HeatFixture h;
  RandomSource rnd(bc.seed + 2);

  // case A: heat with the generic theta operator, constrained by the derived
  // determining equation
  DeterminingSystem ds2 = derive_branch2(h);
  require(ds2.equations.size() == 1, "theta system should be one equation");
  // solve for theta_t
  Expr eq = ds2.equations[0];
  Expr th_t = h.ctx->func_derivative("theta", {1, 0, 0});
  auto split = [&](const Expr& e, const Expr& atom_expr) {
    // e = c1*atom + c0 (validated linear)
    int32_t atom = atom_expr.data().num.terms[0].first.factors[0].first;
    Expr c1(0), c0(0);
    const auto& data = e.data();
    ContextPtr ctx = e.context();
    for (const auto& [m, c] : data.num.terms) {
      bool has = false;
      detail::Mono rest;
      rest.exp_arg = m.exp_arg;
      for (auto [aid, ex] : m.factors) {
        if (aid == atom) {
          require(ex == 1, "nonlinear in the solved atom");
          has = true;
        } else {
          rest.factors.push_back({aid, ex});
        }
      }
      detail::Poly pp;
      pp.terms.push_back({rest, c});
      Expr piece(detail::make_ratio(ctx, std::move(pp), detail::poly_const(Rat(1))));
      if (has)
        c1 += piece;
      else
        c0 += piece;
    }
    Expr den(detail::make_ratio(ctx, data.den, detail::poly_const(Rat(1))));
    return std::make_pair(c1 / den, c0 / den);
  };
  auto [c1, c0] = split(eq, th_t);
  FunctionConstraint theta_rule{"theta", {1, 0, 0}, -c0 / c1};
  VectorField q_theta = h.vf(Expr(0), Expr(1), h.ctx->func("theta"));
  InvarianceOptions io;
  io.constraints = {theta_rule};
  require(is_qcond_symmetry(h.heat, InvolutiveSet({q_theta}), io),
          "theta operator not Q-conditional under its own determining equation");

  // case B: transfer equation with symbolic h
  h.ctx->declare_function("h", {h.ctx->independent(0)});
  Expr hh = h.ctx->func("h");
  PdeSystem transfer(h.ctx, {PdeEquation{h.ctx->jet_symbol(0, {1, 0}),
                                         h.ctx->jet(0, {0, 2}) - hh / h.x * h.ctx->jet(0, {0, 1})}});
  VectorField x_op = h.vf(Expr(1), (hh - Expr(1)) / h.x, Expr(0));
  require(is_qcond_symmetry(transfer, InvolutiveSet({x_op})), "X not Q-conditional");
  Expr a_param = symbol_expr(h.ctx->add_parameter("A"));
  VectorField g_tilde = h.vf(Expr(0), Expr(2) * h.t + a_param, -h.x * h.u);
  require(is_qcond_symmetry(transfer, InvolutiveSet({g_tilde})), "Gtilde not Q-conditional");

  for (long i = 0; i < count; ++i) {
    Expr lam = Expr(rnd.small_nonzero()) + random_polynomial(h.ctx, rnd, 0, 1);
    require(!lam.is_zero(), "lambda degenerate");
    InvolutiveSet sa = apply_equivalence(InvolutiveSet({q_theta}), {{lam}});
    require(is_qcond_symmetry(h.heat, sa, io),
            "equivalence scaling broke the theta case at instance " + std::to_string(i));
    InvolutiveSet sb = apply_equivalence(InvolutiveSet({x_op}), {{lam}});
    require(is_qcond_symmetry(transfer, sb),
            "equivalence scaling broke the transfer case at instance " + std::to_string(i));
    InvolutiveSet sc = apply_equivalence(InvolutiveSet({g_tilde}), {{lam}});
    require(is_qcond_symmetry(transfer, sc),
            "equivalence scaling broke the Gtilde case at instance " + std::to_string(i));
  }
  bc.note("equivalence scaling preserved Q-conditional invariance (" + std::to_string(count) +
          " random multipliers, theta / X / Gtilde cases)");
}

// --- Theorem 1 cross-check --------------------------------------------------------

void thm1_oracle(const BuiltinContext& bc) {
  HeatFixture h;
  DeterminingSystem ds2 = derive_branch2(h);
  require(ds2.equations.size() == 1, "branch 2 must yield one equation");

  // independent oracle: cross-differentiation of {u_x = theta, u_t = u_xx}
  Expr theta = h.ctx->func("theta");
  Symbol ux = h.ctx->jet_symbol(0, {0, 1});
  Symbol ut = h.ctx->jet_symbol(0, {1, 0});
  SubstOptions cl;
  cl.closure = true;
  cl.max_order = 2;
  Expr g = substitute(h.ctx->jet(0, {0, 2}), {SubstRule{ux, theta}}, cl);  // u_xx on the surface
  Expr route_a = substitute(total_derivative(theta, 0), {SubstRule{ut, g}});
  Expr route_b = substitute(total_derivative(g, 1), {SubstRule{ux, theta}});
  Expr oracle = primitive_part(route_a - route_b);
  require(!oracle.is_zero(), "oracle degenerate");
  bc.note("derived: " + ds2.equations[0].str() + " = 0");
  bc.note("oracle:  " + oracle.str() + " = 0");
  bc.residual(ds2.equations[0]);
  require(ds2.equations[0].identical(oracle),
          "derived theta equation differs from the compatibility oracle");

  // diff against the paper's printed form: emitted, never asserted
  auto fd = [&](std::initializer_list<int> mi) {
    return h.ctx->func_derivative("theta", MultiIndex(mi));
  };
  Expr paper = fd({1, 0, 0}) + fd({0, 2, 0}) + Expr(2) * theta * fd({0, 1, 1}) -
               theta.pow(2) * fd({0, 0, 2});
  Expr diff = primitive_part(paper) - ds2.equations[0];
  bc.note("paper prints: " + paper.str() + " = 0");
  bc.note("difference (paper - derived): " + diff.str());
}

// --- Theorems 2 and 3 ---------------------------------------------------------------

struct NamedOp {
  std::string name;
  VectorField op;
  bool needs_f = false;
};

void check_op_list(const BuiltinContext& bc, const PdeSystem& sys, const std::vector<NamedOp>& ops,
                   const InvarianceOptions& fopts) {
  for (const auto& [name, op, needs_f] : ops) {
    bool ok = needs_f ? is_lie_symmetry(sys, op, fopts) : is_lie_symmetry(sys, op);
    bc.note(std::string(ok ? "PASS " : "FAIL ") + name);
    require(ok, name + " is not a symmetry of the derived system");
  }
}

// resolve-then-verify: exactly one candidate reading must validate
const NamedOp& resolve_reading(const BuiltinContext& bc, const PdeSystem& sys,
                               const std::vector<NamedOp>& candidates) {
  const NamedOp* winner = nullptr;
  int hits = 0;
  for (const auto& c : candidates) {
    bool ok = is_lie_symmetry(sys, c.op);
    bc.note(std::string("reading ") + c.name + ": " + (ok ? "validates" : "fails"));
    if (ok) {
      ++hits;
      winner = &c;
    }
  }
  require(hits == 1, "expected exactly one validating reading, found " + std::to_string(hits));
  return *winner;
}

void thm2_ops(const BuiltinContext& bc) {
  HeatFixture h;
  DeterminingSystem ds1 = derive_branch1(h);
  auto dctx = JetContext::make({"t", "x"}, {"g1", "g2", "g3"});
  PdeSystem sys14 = determining_system_as_pde(
      ds1, dctx,
      {dctx->jet_symbol(0, {1, 0}), dctx->jet_symbol(1, {1, 0}), dctx->jet_symbol(2, {1, 0})});
  for (int mu = 0; mu < sys14.q(); ++mu)
    bc.note("system: " + sys14.equation(mu).lead.str() + " = " + sys14.equation(mu).rhs.str());

  Expr t = dctx->x(0), x = dctx->x(1);
  Expr g1 = dctx->u(0), g2 = dctx->u(1), g3 = dctx->u(2);
  Expr z(0), o(1);
  auto vf = [&](Expr a, Expr b, Expr e1, Expr e2, Expr e3) {
    return VectorField(dctx, {std::move(a), std::move(b)},
                       {std::move(e1), std::move(e2), std::move(e3)});
  };
  dctx->declare_function("f", {dctx->independent(0), dctx->independent(1)});
  InvarianceOptions fopts;
  fopts.constraints = {FunctionConstraint{"f", {1, 0}, dctx->func_derivative("f", {0, 2})}};

  std::vector<NamedOp> ops = {
      {"d_t", vf(o, z, z, z, z)},
      {"d_x", vf(z, o, z, z, z)},
      {"G1 = t d_x + d_g1 - (1/2)g1 d_g2 - (1/2)x g3 d_g3",
       vf(z, t, o, Expr::rational(-1, 2) * g1, Expr::rational(-1, 2) * x * g3)},
      {"I1 = g3 d_g3", vf(z, z, z, z, g3)},
      {"D1 = 2t d_t + x d_x - g1 d_g1 - 2 g2 d_g2", vf(Expr(2) * t, x, -g1, Expr(-2) * g2, z)},
      {"(f_t + f_x g1 - f g2) d_g3",
       vf(z, z, z, z,
          dctx->func_derivative("f", {1, 0}) + dctx->func_derivative("f", {0, 1}) * g1 -
              dctx->func("f") * g2),
       true},
  };
  check_op_list(bc, sys14, ops, fopts);

  // Pi1: the paper's rendering mixes flow directions; resolve mechanically
  std::vector<NamedOp> pi1 = {
      {"Pi1 as printed: 4t^2 d_t + 4tx d_x - 4(x - t g1) d_g1 - (8t g2 - 2x g1 - 2) d_g2 - "
       "(10t + x^2) g3 d_g3",
       vf(Expr(4) * t.pow(2), Expr(4) * t * x, Expr(-4) * (x - t * g1),
          -(Expr(8) * t * g2 - Expr(2) * x * g1 - Expr(2)), -(Expr(10) * t + x.pow(2)) * g3)},
      {"Pi1 corrected: 4t^2 d_t + 4tx d_x + 4(x - t g1) d_g1 - (8t g2 + 2x g1 + 2) d_g2 - "
       "(10t + x^2) g3 d_g3",
       vf(Expr(4) * t.pow(2), Expr(4) * t * x, Expr(4) * (x - t * g1),
          -(Expr(8) * t * g2 + Expr(2) * x * g1 + Expr(2)), -(Expr(10) * t + x.pow(2)) * g3)},
  };
  resolve_reading(bc, sys14, pi1);
  bc.note("all Theorem 2 generators verified on the derived system");
}

void thm3_ops(const BuiltinContext& bc) {
  HeatFixture h;
  DeterminingSystem ds2 = derive_branch2(h);
  auto tctx = JetContext::make({"t", "x", "u"}, {"theta"});
  PdeSystem thsys = determining_system_as_pde(ds2, tctx, {tctx->jet_symbol(0, {1, 0, 0})});
  bc.note("system: " + thsys.equation(0).lead.str() + " = " + thsys.equation(0).rhs.str());

  Expr t = tctx->x(0), x = tctx->x(1), u = tctx->x(2), th = tctx->u(0);
  Expr z(0), o(1);
  auto vf = [&](Expr a, Expr b, Expr c, Expr e) {
    return VectorField(tctx, {std::move(a), std::move(b), std::move(c)}, {std::move(e)});
  };
  tctx->declare_function("f", {tctx->independent(0), tctx->independent(1)});
  InvarianceOptions fopts;
  fopts.constraints = {FunctionConstraint{"f", {1, 0}, tctx->func_derivative("f", {0, 2})}};

  std::vector<NamedOp> ops = {
      {"d_t", vf(o, z, z, z)},
      {"d_x", vf(z, o, z, z)},
      {"I2 = u d_u + theta d_theta", vf(z, z, u, th)},
      {"D2 = 2t d_t + x d_x + u d_u", vf(Expr(2) * t, x, u, z)},
      {"f d_u + f_x d_theta", vf(z, z, tctx->func("f"), tctx->func_derivative("f", {0, 1})), true},
  };
  check_op_list(bc, thsys, ops, fopts);

  // G2: the paper prints "t d_x + - (1/2) x u d_u ..." (double sign); resolve
  std::vector<NamedOp> g2 = {
      {"G2 with minus: t d_x - (1/2)xu d_u - (1/2)(x theta + u) d_theta",
       vf(z, t, Expr::rational(-1, 2) * x * u, Expr::rational(-1, 2) * (x * th + u))},
      {"G2 with plus: t d_x + (1/2)xu d_u - (1/2)(x theta + u) d_theta",
       vf(z, t, Expr::rational(1, 2) * x * u, Expr::rational(-1, 2) * (x * th + u))},
  };
  resolve_reading(bc, thsys, g2);

  // Pi2: the printed theta coefficient -(x theta + 6t theta - 2xu) resolves to
  // -(x^2 theta + 6t theta + 2xu)
  std::vector<NamedOp> pi2 = {
      {"Pi2 as printed: ... - (x theta + 6t theta - 2xu) d_theta",
       vf(Expr(4) * t.pow(2), Expr(4) * t * x, -(x.pow(2) + Expr(2) * t) * u,
          -(x * th + Expr(6) * t * th - Expr(2) * x * u))},
      {"Pi2 with x^2: ... - (x^2 theta + 6t theta - 2xu) d_theta",
       vf(Expr(4) * t.pow(2), Expr(4) * t * x, -(x.pow(2) + Expr(2) * t) * u,
          -(x.pow(2) * th + Expr(6) * t * th - Expr(2) * x * u))},
      {"Pi2 with x^2 and +2xu: ... - (x^2 theta + 6t theta + 2xu) d_theta",
       vf(Expr(4) * t.pow(2), Expr(4) * t * x, -(x.pow(2) + Expr(2) * t) * u,
          -(x.pow(2) * th + Expr(6) * t * th + Expr(2) * x * u))},
  };
  resolve_reading(bc, thsys, pi2);
  bc.note("all Theorem 3 generators verified on the derived system");
}

// --- Theorem 4 -------------------------------------------------------------------------

struct Map18 {
  Expr g1, g2, g3;
};

Map18 map18(const HeatFixture& h, const Expr& z1, const Expr& z2, const Expr& z3) {
  auto dx = [&](const Expr& e) { return total_derivative(e, 1); };
  Expr w = dx(z1) * z2 - z1 * dx(z2);
  if (w.is_zero()) throw math_error("theorem 4 map: z1_x z2 - z1 z2_x = 0");
  Map18 m;
  m.g1 = -(dx(dx(z1)) * z2 - z1 * dx(dx(z2))) / w;
  m.g2 = -(dx(dx(z1)) * dx(z2) - dx(z1) * dx(dx(z2))) / w;
  m.g3 = dx(dx(z3)) + m.g1 * dx(z3) - m.g2 * z3;
  return m;
}

bool solves_heat(const HeatFixture& h, const Expr& w) {
  return (total_derivative(w, 0) - total_derivative(total_derivative(w, 1), 1)).is_zero();
}

void thm4_map(const BuiltinContext& bc) {
  long count = bc.arg_int(0, 20);
  HeatFixture h;
  DeterminingSystem ds1 = derive_branch1(h);

  auto admit = [&](const Map18& m) {
    return ds1.admits({{"g1", m.g1}, {"g2", m.g2}, {"g3", m.g3}});
  };

  Map18 f1 = map18(h, Expr(1), h.x, h.t + h.x.pow(2) / Expr(2));
  require(f1.g1.is_zero() && f1.g2.is_zero() && f1.g3.identical(Expr(1)),
          "fixed triple (1, x, t + x^2/2) should map to (0, 0, 1)");
  require(admit(f1), "(0, 0, 1) rejected by the branch-1 system");
  bc.note("(1, x, t + x^2/2) -> (0, 0, 1): satisfies the system");

  Map18 f2 = map18(h, Expr(1), h.x, exp_expr(h.t + h.x));
  require(f2.g3.identical(exp_expr(h.t + h.x)), "g3 should be exp(t + x)");
  require(admit(f2), "second fixed triple rejected");
  bc.note("(1, x, exp(t + x)) -> g3 = exp(t + x): satisfies the system");

  bool threw = false;
  try {
    map18(h, h.x, Expr(2) * h.x, Expr(1));
  } catch (const math_error&) {
    threw = true;
  }
  require(threw, "proportional z1, z2 must raise the zero-denominator error");
  bc.note("(x, 2x, 1): zero denominator correctly rejected");

  RandomSource rnd(bc.seed + 3);
  long done = 0;
  int guard = 0;
  while (done < count) {
    require(++guard < 40 * count, "could not draw enough nondegenerate triples");
    Expr z1 = random_heat_solution(h.ctx, rnd);
    Expr z2 = random_heat_solution(h.ctx, rnd);
    Expr z3 = random_heat_solution(h.ctx, rnd);
    require(solves_heat(h, z1) && solves_heat(h, z2) && solves_heat(h, z3),
            "generator produced a non-solution");
    Expr w = total_derivative(z1, 1) * z2 - z1 * total_derivative(z2, 1);
    if (w.is_zero()) continue;
    Map18 m = map18(h, z1, z2, z3);
    if (!admit(m))
      fail_case("randomized triple rejected: z1 = " + z1.str() + ", z2 = " + z2.str() +
                ", z3 = " + z3.str());
    ++done;
  }
  bc.note(std::to_string(done) + " randomized heat-solution triples mapped into the system");
}

void thm5_hodograph(const BuiltinContext& bc) {
  long count = bc.arg_int(0, 20);
  HeatFixture h;
  DeterminingSystem ds2 = derive_branch2(h);

  auto check = [&](const Expr& w) {
    // Psi = y2 + w(y0, y1) solves the heat equation with y2 a parameter;
    // Phi = u - w(t, x); theta = -Phi_t / Phi_u = w_t
    Expr phi = h.u - w;
    Expr phi_u = partial_derivative(phi, h.ctx->dependent(0));
    require(!phi_u.is_zero(), "Phi_u must not vanish");
    Expr theta = -partial_derivative(phi, h.ctx->independent(0)) / phi_u;
    for (const auto& eq : ds2.equations)
      if (!substitute_functions(eq, {{"theta", theta}}).is_zero()) return false;
    return true;
  };

  require(check(h.t + h.x.pow(2) / Expr(2)), "w = t + x^2/2 (theta = 1) failed");
  bc.note("w = t + x^2/2: theta = 1 satisfies the derived theta equation");
  require(check(exp_expr(h.t + h.x)), "w = exp(t + x) failed");
  bc.note("w = exp(t + x): theta = exp(t + x) verified");
  require(check(h.x), "w = x (theta = 0) failed");
  bc.note("w = x: theta = 0 verified");

  RandomSource rnd(bc.seed + 4);
  for (long i = 0; i < count; ++i) {
    Expr w = random_heat_solution(h.ctx, rnd);
    require(solves_heat(h, w), "generator produced a non-solution");
    if (!check(w)) fail_case("randomized witness failed: w = " + w.str());
  }
  bc.note(std::to_string(count) + " randomized hodograph witnesses verified");
}

// --- Theorem 6 and the transfer-equation material -------------------------------------

struct TransferReading {
  std::string name;
  bool transport;  // h(t)/x multiplies u_x
  int uxx_sign;    // sign of u_xx in u_t + ... + s u_xx = 0
};

PdeSystem transfer_equation(const HeatFixture& h, const Expr& hfun, const TransferReading& r) {
  Expr ux = h.ctx->jet(0, {0, 1});
  Expr uxx = h.ctx->jet(0, {0, 2});
  Expr drift = r.transport ? hfun / h.x * ux : hfun / h.x;
  // u_t = -drift - s*u_xx
  return PdeSystem(h.ctx,
                   {PdeEquation{h.ctx->jet_symbol(0, {1, 0}), -drift - Expr(r.uxx_sign) * uxx}});
}

void thm6_resolve(const BuiltinContext& bc) {
  HeatFixture h;
  h.ctx->declare_function("h", {h.ctx->independent(0)});
  h.ctx->declare_function("f", {h.ctx->independent(0), h.ctx->independent(1)});
  Expr t = h.t, x = h.x, u = h.u;
  Expr c_param = symbol_expr(h.ctx->add_parameter("c"));

  std::vector<TransferReading> readings = {
      {"u_t + h(t)/x u_x + u_xx = 0", true, 1},
      {"u_t + h(t)/x + u_xx = 0", false, 1},
      {"u_t + h(t)/x u_x - u_xx = 0", true, -1},
      {"u_t + h(t)/x - u_xx = 0", false, -1},
  };

  std::string winner;
  int hits = 0;
  for (const auto& r : readings) {
    bool ok = true;
    // case 1: arbitrary h(t): A1 = < u d_u, f d_u > with f solving the equation
    {
      PdeSystem eq = transfer_equation(h, h.ctx->func("h"), r);
      ok = ok && is_lie_symmetry(eq, h.vf(Expr(0), Expr(0), u));
      InvarianceOptions fopts;
      // f satisfies the same reading
      Expr fx = h.ctx->func_derivative("f", {0, 1});
      Expr fxx = h.ctx->func_derivative("f", {0, 2});
      Expr drift = r.transport ? h.ctx->func("h") / x * fx : h.ctx->func("h") / x;
      fopts.constraints = {
          FunctionConstraint{"f", {1, 0}, -drift - Expr(r.uxx_sign) * fxx}};
      ok = ok && is_lie_symmetry(eq, h.vf(Expr(0), Expr(0), h.ctx->func("f")), fopts);
    }
    // case 2: h = const (symbolic parameter c): A2 adds d_t, D, Pi
    if (ok) {
      PdeSystem eq = transfer_equation(h, c_param, r);
      VectorField dt = h.vf(Expr(1), Expr(0), Expr(0));
      VectorField dd = h.vf(Expr(2) * t, x, Expr(0));
      VectorField pi = h.vf(Expr(4) * t.pow(2), Expr(4) * t * x,
                            -(x.pow(2) + Expr(2) * (Expr(1) - c_param) * t) * u);
      ok = is_lie_symmetry(eq, dt) && is_lie_symmetry(eq, dd) && is_lie_symmetry(eq, pi);
    }
    // case 3: h in {0, -2}: A3 adds d_x + (1/2) h x^-1 u d_u and G
    for (long hv : {0L, -2L}) {
      if (!ok) break;
      PdeSystem eq = transfer_equation(h, Expr(hv), r);
      Expr hc(hv);
      VectorField extra = h.vf(Expr(0), Expr(1), Expr::rational(1, 2) * hc / x * u);
      VectorField g = h.vf(Expr(0), t, Expr::rational(-1, 2) * (x - hc * t / x) * u);
      VectorField dt = h.vf(Expr(1), Expr(0), Expr(0));
      VectorField dd = h.vf(Expr(2) * t, x, Expr(0));
      VectorField pi = h.vf(Expr(4) * t.pow(2), Expr(4) * t * x,
                            -(x.pow(2) + Expr(2) * (Expr(1) - hc) * t) * u);
      ok = is_lie_symmetry(eq, extra) && is_lie_symmetry(eq, g) && is_lie_symmetry(eq, dt) &&
           is_lie_symmetry(eq, dd) && is_lie_symmetry(eq, pi);
    }
    bc.note("reading " + r.name + ": " + (ok ? "validates all three cases" : "fails"));
    if (ok) {
      ++hits;
      winner = r.name;
    }
  }
  require(hits == 1, "expected exactly one validating reading, found " + std::to_string(hits));
  bc.note("resolved transfer equation: " + winner);
}

// the resolved reading, shared by the family builtins
PdeSystem resolved_transfer(const HeatFixture& h, const Expr& hfun) {
  return transfer_equation(h, hfun, TransferReading{"", true, -1});
}

// Solves the triangular ODE chain: each equation c1(t) f_t + rest = 0 for the
// designated unknown, integrating with a formal antiderivative.
Expr integrate_linear(const HeatFixture& h, const Expr& ode, const std::string& fn,
                      const Expr& constant) {
  Expr f_t = h.ctx->func_derivative(fn, {1});
  int32_t atom = f_t.data().num.terms[0].first.factors[0].first;
  Expr c1(0), c0(0);
  const auto& data = ode.data();
  for (const auto& [m, c] : data.num.terms) {
    bool has = false;
    detail::Mono rest;
    rest.exp_arg = m.exp_arg;
    for (auto [aid, ex] : m.factors) {
      if (aid == atom) {
        if (ex != 1) throw math_error("ODE nonlinear in " + fn + "_t");
        has = true;
      } else {
        rest.factors.push_back({aid, ex});
      }
    }
    detail::Poly pp;
    pp.terms.push_back({rest, c});
    Expr piece(detail::make_ratio(h.ctx, std::move(pp), detail::poly_const(Rat(1))));
    (has ? c1 : c0) += piece;
  }
  Expr den(detail::make_ratio(h.ctx, data.den, detail::poly_const(Rat(1))));
  c1 /= den;
  c0 /= den;
  if (c1.is_zero()) throw math_error("ODE does not determine " + fn);
  Expr integrand = -c0 / c1;
  return constant + antiderivative(integrand, h.ctx->independent(0));
}

void transfer_tfamily(const BuiltinContext& bc) {
  long n = bc.arg_int(0, 2);
  require(n <= 4, "n must be <= 4");
  HeatFixture h;
  h.ctx->declare_function("h", {h.ctx->independent(0)});
  PdeSystem eq = resolved_transfer(h, h.ctx->func("h"));

  // u = sum_k T^k(t) x^(2k)
  std::vector<std::string> names;
  Expr form(0);
  for (long k = 0; k <= n; ++k) {
    std::string fn = "T" + std::to_string(k);
    names.push_back(fn);
    h.ctx->declare_function(fn, {h.ctx->independent(0)});
    form += h.ctx->func(fn) * h.x.pow(2 * k);
  }
  SubstOptions cl;
  cl.closure = true;
  cl.max_order = 3;
  Expr residual = substitute(eq.l_expr(0), {SubstRule{h.ctx->dependent(0), form}}, cl);

  auto odes = collect_powers(residual, h.ctx->independent(1));
  bc.note("ODE system for the T^k family:");
  for (const auto& [pw, ode] : odes) {
    bc.note("  x^" + std::to_string(pw) + ": " + primitive_part(ode).str() + " = 0");
    require(pw % 2 == 0, "odd power in the residual");
  }

  if (n > 2) {
    bc.note("n > 2: derivation only (integration capped at n <= 2)");
    return;
  }

  // integrate top-down: the x^(2k) coefficient determines T^k
  std::map<std::string, Expr> defs;
  for (long k = n; k >= 0; --k) {
    auto it = odes.find(2 * k);
    require(it != odes.end(), "missing ODE at x^" + std::to_string(2 * k));
    Expr ode = substitute_functions(it->second, defs);
    Expr c = symbol_expr(h.ctx->add_parameter("C" + std::to_string(k)));
    Expr def = integrate_linear(h, ode, names[static_cast<size_t>(k)], c);
    bc.note("  T" + std::to_string(k) + " = " + def.str());
    defs["T" + std::to_string(k)] = def;
  }
  Expr back = substitute_functions(residual, defs);
  bc.residual(back);
  require(back.is_zero(), "integrated T-family does not solve the equation");
  bc.note("back-substitution verifies the integrated family exactly");
}

void transfer_sfamily(const BuiltinContext& bc) {
  long n = bc.arg_int(0, 1);
  require(n <= 2, "n must be <= 2");
  HeatFixture h;
  h.ctx->declare_function("h", {h.ctx->independent(0)});
  PdeSystem eq = resolved_transfer(h, h.ctx->func("h"));
  Expr a_param = symbol_expr(h.ctx->add_parameter("A"));
  Expr base = Expr(2) * h.t + a_param;

  Expr w_arg = -h.x.pow(2) / (Expr(2) * base) +
               antiderivative((h.ctx->func("h") - Expr(1)) / base, h.ctx->independent(0));
  std::vector<std::string> names;
  Expr cofactor(0);
  for (long k = 0; k <= n; ++k) {
    std::string fn = "S" + std::to_string(k);
    names.push_back(fn);
    h.ctx->declare_function(fn, {h.ctx->independent(0)});
    cofactor += h.ctx->func(fn) * (h.x / base).pow(2 * k);
  }
  Expr form = cofactor * exp_expr(w_arg);
  SubstOptions cl;
  cl.closure = true;
  cl.max_order = 3;
  Expr residual = substitute(eq.l_expr(0), {SubstRule{h.ctx->dependent(0), form}}, cl);
  // strip the common exponential factor, then split by powers of x
  Expr stripped = residual / exp_expr(w_arg);
  auto odes = collect_powers(stripped, h.ctx->independent(1));
  bc.note("ODE system for the S^k family:");
  for (const auto& [pw, ode] : odes)
    bc.note("  x^" + std::to_string(pw) + ": " + primitive_part(ode).str() + " = 0");

  std::map<std::string, Expr> defs;
  for (long k = n; k >= 0; --k) {
    auto it = odes.find(2 * k);
    require(it != odes.end(), "missing ODE at x^" + std::to_string(2 * k));
    Expr ode = substitute_functions(it->second, defs);
    Expr c = symbol_expr(h.ctx->add_parameter("K" + std::to_string(k)));
    Expr def = integrate_linear(h, ode, names[static_cast<size_t>(k)], c);
    bc.note("  S" + std::to_string(k) + " = " + def.str());
    defs["S" + std::to_string(k)] = def;
  }
  Expr back = substitute_functions(residual, defs);
  bc.residual(back);
  require(back.is_zero(), "integrated S-family does not solve the equation");
  bc.note("back-substitution verifies the integrated family exactly");
}

// --- heat algebra ideal ---------------------------------------------------------------

void heat_ideal(const BuiltinContext& bc) {
  HeatFixture h;
  Expr t = h.t, x = h.x, u = h.u;
  h.ctx->declare_function("f", {h.ctx->independent(0), h.ctx->independent(1)});
  VectorField fu = h.vf(Expr(0), Expr(0), h.ctx->func("f"));
  std::vector<std::pair<std::string, VectorField>> six = {
      {"d_t", h.vf(Expr(1), Expr(0), Expr(0))},
      {"d_x", h.vf(Expr(0), Expr(1), Expr(0))},
      {"G", h.vf(Expr(0), t, Expr::rational(-1, 2) * x * u)},
      {"I", h.vf(Expr(0), Expr(0), u)},
      {"D", h.vf(Expr(2) * t, x, Expr(0))},
      {"Pi", h.vf(Expr(4) * t.pow(2), Expr(4) * t * x, -(x.pow(2) + Expr(2) * t) * u)},
  };
  RewriteSystem heat_rule(h.ctx, 6, CapMode::Skip);
  heat_rule.add_constraint(FunctionConstraint{"f", {1, 0}, h.ctx->func_derivative("f", {0, 2})});
  for (const auto& [name, op] : six) {
    VectorField b = lie_bracket(op, fu);
    require(b.xi(0).is_zero() && b.xi(1).is_zero(),
            "[" + name + ", f d_u] is not of the form f~ d_u");
    Expr ftilde = b.eta(0);
    require(!ftilde.contains_symbol(h.ctx->dependent(0)),
            "[" + name + ", f d_u] coefficient depends on u");
    Expr res = heat_rule.reduce(partial_derivative(ftilde, h.ctx->independent(0)) -
                                partial_derivative(partial_derivative(ftilde, h.ctx->independent(1)),
                                                   h.ctx->independent(1)));
    require(res.is_zero(), "[" + name + ", f d_u] = f~ d_u but f~ does not solve the heat equation");
    bc.note("[" + name + ", f d_u] = (" + ftilde.str() + ") d_u, heat-constrained");
  }
  bc.note("the f d_u ideal is preserved by all six finite generators");
}

}  // namespace

const std::map<std::string, BuiltinFn>& casebook_builtins() {
  static const std::map<std::string, BuiltinFn> registry = {
      {"master-identity", master_identity},
      {"def1-degeneracy", def1_degeneracy},
      {"lemma-equivalence", lemma_equivalence},
      {"thm1-oracle", thm1_oracle},
      {"thm2-ops", thm2_ops},
      {"thm3-ops", thm3_ops},
      {"thm4-map", thm4_map},
      {"thm5-hodograph", thm5_hodograph},
      {"thm6-resolve", thm6_resolve},
      {"transfer-tfamily", transfer_tfamily},
      {"transfer-sfamily", transfer_sfamily},
      {"heat-ideal", heat_ideal},
  };
  return registry;
}

}  // namespace qsym
