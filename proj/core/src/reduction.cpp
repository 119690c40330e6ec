#include "qsym/reduction.hpp"

#include <set>

#include "internal.hpp"

namespace qsym {

using namespace detail;

std::string Ansatz::str() const {
  std::string out;
  for (const auto& inv : invariants) {
    if (!out.empty()) out += ", ";
    out += inv.omega.str() + " = " + inv.value.str();
  }
  for (size_t j = 0; j < u_forms.size(); ++j) {
    out += "; u" + (u_forms.size() > 1 ? std::to_string(j) : std::string()) + " = " +
           u_forms[j].str();
  }
  return out;
}

std::string ReduceResult::str() const {
  switch (status) {
    case ReduceStatus::Reduced:
      return reduced.str() + " = 0   [multiplier " + multiplier.str() + "]";
    case ReduceStatus::Inconsistent:
      return "0 = " + (-reduced).str() + "   (incompatible reduced system)";
    case ReduceStatus::Irreducible:
      return "irreducible remainder: " + remainder.str();
  }
  return "";
}

namespace {

// Derives W^j from a solved form affine in the phi-atoms: u = G*phi + H gives
// W = (u - H)/G.
std::optional<Expr> derive_w(ContextPtr ctx, int j, const Expr& form) {
  // find the unknown-function atoms present
  auto fids = form.function_ids();
  if (fids.empty()) return std::nullopt;
  // collect the form as a polynomial in those atoms: require a single atom,
  // degree one
  std::vector<int32_t> phi_atoms;
  for_each_top_atom(form.ptr(), [&](int32_t a) {
    const AtomData& d = ctx->atom(a);
    if (d.kind == AtomKind::Func)
      phi_atoms.push_back(a);
  });
  std::sort(phi_atoms.begin(), phi_atoms.end());
  phi_atoms.erase(std::unique(phi_atoms.begin(), phi_atoms.end()), phi_atoms.end());
  if (phi_atoms.size() != 1) return std::nullopt;
  // expand form = G*phi + H by dividing out
  Expr phi(make_ratio(ctx, poly_atom(phi_atoms[0]), poly_const(Rat(1))));
  // G = d(form)/d(phi) via formal split: form - H is linear in phi
  // use the polynomial split: collect powers of the atom
  const ExprData& data = form.data();
  Poly g_num = poly_zero(), h_num = poly_zero();
  for (const auto& [m, c] : data.num.terms) {
    bool has = false;
    Mono rest;
    rest.exp_arg = m.exp_arg;
    for (auto [atom, exp] : m.factors) {
      if (atom == phi_atoms[0]) {
        if (exp != 1) return std::nullopt;
        has = true;
      } else {
        rest.factors.push_back({atom, exp});
      }
    }
    Poly& dst = has ? g_num : h_num;
    Poly one;
    one.terms.push_back({rest, c});
    dst = poly_add(ctx.get(), dst, one);
  }
  Expr den(make_ratio(ctx, data.den, poly_const(Rat(1))));
  Expr g = Expr(make_ratio(ctx, g_num, poly_const(Rat(1)))) / den;
  Expr h = Expr(make_ratio(ctx, h_num, poly_const(Rat(1)))) / den;
  if (g.is_zero()) return std::nullopt;
  return (ctx->u(j) - h) / g;
}

}  // namespace

bool verify_ansatz(const InvolutiveSet& s, const Ansatz& a) {
  if (s.ops.empty()) throw math_error("verify_ansatz: empty operator set");
  ContextPtr ctx = s.ops[0].context();
  int n = ctx->n_independent(), m = ctx->n_dependent();
  int count = s.s();

  // rank conditions: rank ||xi|| = rank ||xi, eta|| = s
  std::vector<std::vector<Expr>> xi_mat, full_mat;
  for (const auto& q : s.ops) {
    std::vector<Expr> xi_row, full_row;
    for (int i = 0; i < n; ++i) {
      xi_row.push_back(q.xi(i));
      full_row.push_back(q.xi(i));
    }
    for (int j = 0; j < m; ++j) full_row.push_back(q.eta(j));
    xi_mat.push_back(std::move(xi_row));
    full_mat.push_back(std::move(full_row));
  }
  if (symbolic_rank(xi_mat) != count)
    throw math_error("verify_ansatz: rank ||xi|| != s (rank condition violated)");
  if (symbolic_rank(full_mat) != count)
    throw math_error("verify_ansatz: rank ||xi, eta|| != s (rank condition violated)");

  if (static_cast<int>(a.invariants.size()) != n - count)
    throw math_error("verify_ansatz: expected n - s invariants");

  // every invariant annihilated by every operator
  for (const auto& q : s.ops)
    for (const auto& inv : a.invariants)
      if (!q.apply(inv.value).is_zero()) return false;

  // W annihilation and the Jacobian condition
  std::vector<Expr> w = a.w_forms;
  if (w.empty()) {
    for (int j = 0; j < m; ++j) {
      auto derived = derive_w(ctx, j, a.u_forms.at(static_cast<size_t>(j)));
      if (!derived)
        throw math_error("verify_ansatz: cannot derive W from a solved form not affine in phi");
      // substitute the omega parameters by their invariant expressions so W
      // is a function of (x, u)
      std::vector<SubstRule> bind;
      for (const auto& inv : a.invariants) bind.push_back(SubstRule{inv.omega, inv.value});
      w.push_back(substitute(*derived, bind));
    }
  }
  for (const auto& q : s.ops)
    for (const auto& wj : w)
      if (!q.apply(wj).is_zero()) return false;

  std::vector<std::vector<Expr>> jac;
  for (const auto& wj : w) {
    std::vector<Expr> row;
    for (int j2 = 0; j2 < m; ++j2) row.push_back(partial_derivative(wj, ctx->dependent(j2)));
    jac.push_back(std::move(row));
  }
  if (determinant(jac).is_zero())
    throw math_error("verify_ansatz: Jacobian det ||dW/du|| vanishes");
  return true;
}

namespace {

// Solves invariant = omega for the designated variable; the invariant must be
// affine in it.
Expr solve_designated(ContextPtr ctx, const AnsatzInvariant& inv) {
  auto powers = collect_powers(inv.value, inv.designated);
  if (powers.empty() || powers.rbegin()->first != 1)
    throw math_error("reduce: invariant is not affine in the designated variable " +
                     inv.designated.str());
  Expr a = powers.at(1);
  Expr b = powers.count(0) ? powers.at(0) : Expr(0);
  return (symbol_expr(inv.omega) - b) / a;
}

}  // namespace

ReduceResult reduce(const PdeSystem& e, const Ansatz& a, bool waive_verification,
                    const InvolutiveSet* s) {
  ContextPtr ctx = e.context();
  if (e.q() != 1 || ctx->n_dependent() != 1)
    throw math_error("reduce: single equation in one unknown expected");
  if (!waive_verification) {
    if (!s) throw math_error("reduce: operator set required unless verification is waived");
    if (!verify_ansatz(*s, a)) throw math_error("reduce: ansatz verification failed");
  }

  // substitute u = F (phi written over the invariant expressions) through all
  // jets via consequence closure
  std::vector<SubstRule> omega_bind;
  for (const auto& inv : a.invariants) omega_bind.push_back(SubstRule{inv.omega, inv.value});
  Expr form = substitute(a.u_forms.at(0), omega_bind);
  SubstOptions closure;
  closure.closure = true;
  closure.max_order = e.order() + 1;
  Expr residual = substitute(e.l_expr(0), {SubstRule{ctx->dependent(0), form}}, closure);

  // eliminate the designated variables by the inverted invariants
  for (const auto& inv : a.invariants) {
    Expr sol = solve_designated(ctx, inv);
    residual = substitute(residual, {SubstRule{inv.designated, sol}});
  }

  ReduceResult out;
  out.multiplier = Expr(1);

  if (residual.is_zero()) {
    out.status = ReduceStatus::Reduced;
    out.reduced = Expr(0);
    return out;
  }

  // remaining explicit independent variables
  std::set<int> remaining;
  {
    ContextPtr rc = residual.context();
    if (rc) {
      for_each_atom(residual.ptr(), [&](int32_t id) {
        const AtomData& d = rc->atom(id);
        if (d.kind == AtomKind::IndepVar) remaining.insert(d.a);
        if (d.kind == AtomKind::Root && rc->atom(d.a).kind == AtomKind::IndepVar)
          remaining.insert(rc->atom(d.a).a);
      });
    }
  }

  if (remaining.empty()) {
    if (residual.is_rational_constant()) {
      out.status = ReduceStatus::Inconsistent;
      out.reduced = residual;
      return out;
    }
    out.status = ReduceStatus::Reduced;
    out.reduced = primitive_part(residual);
    out.multiplier = residual / out.reduced;
    return out;
  }

  // split the numerator over the remaining variables; the reduced equation is
  // the common factor of the coefficients
  Expr num = primitive_part(residual);

  // collect num as a polynomial in the remaining variables (and their roots)
  std::map<std::string, Expr> coeffs;  // keyed by the remaining-variable monomial text
  std::map<std::string, Expr> keys;
  {
    ContextPtr rc = num.context();
    const ExprData& data = num.data();
    for (const auto& [m, c] : data.num.terms) {
      Mono var_part, rest;
      rest.exp_arg = m.exp_arg;
      for (auto [atom, exp] : m.factors) {
        const AtomData& d = rc->atom(atom);
        bool is_var = d.kind == AtomKind::IndepVar && remaining.count(d.a);
        bool is_var_root = d.kind == AtomKind::Root &&
                           rc->atom(d.a).kind == AtomKind::IndepVar &&
                           remaining.count(rc->atom(d.a).a);
        if (is_var || is_var_root)
          var_part.factors.push_back({atom, exp});
        else
          rest.factors.push_back({atom, exp});
      }
      if (m.exp_arg) {
        bool hit = false;
        for_each_atom(m.exp_arg, [&](int32_t id2) {
          const AtomData& d2 = rc->atom(id2);
          if (d2.kind == AtomKind::IndepVar && remaining.count(d2.a)) hit = true;
        });
        if (hit) {
          out.status = ReduceStatus::Irreducible;
          out.remainder = residual;
          return out;
        }
      }
      Poly kp;
      kp.terms.push_back({var_part, Rat(1)});
      Expr key(make_ratio(rc, std::move(kp), poly_const(Rat(1))));
      Poly rp;
      rp.terms.push_back({rest, c});
      Expr val(make_ratio(rc, std::move(rp), poly_const(Rat(1))));
      std::string ks = key.prefix();
      auto [it, fresh] = coeffs.try_emplace(ks, Expr(0));
      it->second += val;
      keys.try_emplace(ks, key);
    }
  }
  // every coefficient must be free of the remaining variables (deep check)
  for (auto& [ks, coeff] : coeffs) {
    bool hit = false;
    ContextPtr rc = num.context();
    for_each_atom(coeff.ptr(), [&](int32_t id2) {
      const AtomData& d2 = rc->atom(id2);
      if (d2.kind == AtomKind::IndepVar && remaining.count(d2.a)) hit = true;
    });
    if (hit) {
      out.status = ReduceStatus::Irreducible;
      out.remainder = residual;
      return out;
    }
  }

  // gcd of the coefficients
  Expr g(0);
  for (auto& [ks, coeff] : coeffs) {
    Expr p = primitive_part(coeff);
    if (g.is_zero()) {
      g = p;
    } else {
      Poly gg = poly_gcd(num.context().get(), g.data().num, p.data().num);
      g = Expr(make_ratio(num.context(), std::move(gg), poly_const(Rat(1))));
    }
    if (g.is_rational_constant()) break;
  }

  if (g.is_rational_constant()) {
    if (coeffs.size() == 1) {
      // single monomial in the remaining variables: that monomial is the multiplier
      auto& [ks, coeff] = *coeffs.begin();
      if (coeff.is_rational_constant()) {
        out.status = ReduceStatus::Inconsistent;
        out.reduced = coeff;
        return out;
      }
      out.status = ReduceStatus::Reduced;
      out.reduced = primitive_part(coeff);
      out.multiplier = residual / out.reduced;
      return out;
    }
    out.status = ReduceStatus::Irreducible;
    out.remainder = residual;
    return out;
  }

  out.status = ReduceStatus::Reduced;
  out.reduced = g;
  out.multiplier = residual / g;
  return out;
}

bool joint_system_check(const PdeSystem& e, const InvolutiveSet& s, const Expr& candidate) {
  ContextPtr ctx = e.context();
  if (ctx->n_dependent() != 1) throw math_error("joint_system_check: m = 1 expected");
  if (candidate.contains_symbol(ctx->dependent(0)) || candidate.contains_positive_jet())
    throw math_error("joint_system_check: candidate must be an explicit function of x");
  SubstOptions closure;
  closure.closure = true;
  closure.max_order = e.order() + 1;
  std::vector<SubstRule> rule{SubstRule{ctx->dependent(0), candidate}};
  for (int mu = 0; mu < e.q(); ++mu)
    if (!substitute(e.l_expr(mu), rule, closure).is_zero()) return false;
  for (const auto& q : s.ops)
    if (!substitute(characteristic(q, 0), rule, closure).is_zero()) return false;
  return true;
}

}  // namespace qsym
