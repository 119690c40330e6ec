// Determining-system extraction and algebra-closure checks.

#include <set>

#include "internal.hpp"
#include "qsym/invariance.hpp"

namespace qsym {

using namespace detail;

namespace {

// A dependent variable is a splitting (parametric) variable iff it occurs as a
// plain polynomial factor and never inside an unknown-function argument or a
// composite (exp/log/Int) argument.
bool dependent_is_parametric(const Expr& r, int dep) {
  ContextPtr ctx = r.context();
  if (!ctx) return false;
  bool top_level = false;
  bool nested = false;
  auto scan_nested = [&](const ExprPtr& sub) {
    if (!sub) return;
    for_each_atom(sub, [&](int32_t a) {
      const AtomData& d = ctx->atom(a);
      if (d.kind == AtomKind::Jet && d.a == dep && d.index.is_zero()) nested = true;
    });
  };
  for_each_top_atom(r.ptr(), [&](int32_t a) {
    const AtomData& d = ctx->atom(a);
    if (d.kind == AtomKind::Jet && d.a == dep && d.index.is_zero()) top_level = true;
    if (d.kind == AtomKind::Func)
      for (const auto& arg : d.args) scan_nested(arg);
    if (d.arg) scan_nested(d.arg);
  });
  // exp parts of the top-level monomials count as nested occurrences
  for (const auto& [m, c] : r.data().num.terms)
    if (m.exp_arg) scan_nested(m.exp_arg);
  for (const auto& [m, c] : r.data().den.terms)
    if (m.exp_arg) scan_nested(m.exp_arg);
  return top_level && !nested;
}

// Splits one residual into canonical determining equations.
void split_residual(const Expr& residual, std::map<Expr, Expr, ExprLess>& monomials,
                    std::set<Expr, ExprLess>& equations) {
  if (residual.is_zero()) return;
  ContextPtr ctx = residual.context();
  if (!ctx) throw math_error("residual is a nonzero constant: the template admits no operator");
  std::vector<Symbol> vars;
  for (const auto& s : residual.jet_symbols()) vars.push_back(s);
  for (int j = 0; j < ctx->n_dependent(); ++j)
    if (dependent_is_parametric(residual, j)) vars.push_back(ctx->dependent(j));
  auto coeffs = collect_coefficients(residual, vars);
  for (const auto& [mono, coeff] : coeffs) {
    Expr eq = primitive_part(coeff);
    if (eq.is_zero()) continue;
    equations.insert(eq);
    auto [it, fresh] = monomials.try_emplace(mono, eq);
    (void)it;
    (void)fresh;
  }
}

DeterminingSystem finish_system(const VectorField& op_template,
                                const std::map<Expr, Expr, ExprLess>& monomials,
                                const std::set<Expr, ExprLess>& equations, bool pseudo) {
  DeterminingSystem ds{op_template, {}, {}, pseudo};
  for (const auto& eq : equations) ds.equations.push_back(eq);
  for (const auto& [mono, eq] : monomials) ds.parametric.push_back(mono);
  return ds;
}

}  // namespace

namespace {

// Cleared-denominator evaluation of a determining equation on explicit
// rational definitions.  Values are carried as numerator polynomials over
// factored denominator powers and never reduced; the single exact zero test
// happens on the assembled numerator.  Falls back to the generic substitution
// path when the polynomial-only assumptions do not hold.
struct FactoredFrac {
  Expr num;                                      // polynomial expression
  std::map<std::string, std::pair<Expr, int>> dens;  // fingerprint -> (base, power)
};

bool is_polynomial(const Expr& e) {
  const auto& den = e.data().den;
  return den.is_constant();
}

std::optional<FactoredFrac> frac_of_def(const Expr& def) {
  ContextPtr ctx = def.context();
  FactoredFrac f;
  const auto& data = def.data();
  f.num = Expr(make_ratio(ctx, data.num, poly_const(Rat(1))));
  if (!data.den.is_constant()) {
    Expr d(make_ratio(ctx, data.den, poly_const(Rat(1))));
    f.dens.emplace(d.prefix(), std::make_pair(d, 1));
  } else if (!data.den.is_zero() && data.den.terms[0].second != 1) {
    f.num = f.num / Expr(data.den.terms[0].second);
  }
  return f;
}

FactoredFrac frac_mul(const FactoredFrac& a, const FactoredFrac& b) {
  FactoredFrac out;
  out.num = a.num * b.num;
  out.dens = a.dens;
  for (const auto& [k, v] : b.dens) {
    auto [it, fresh] = out.dens.try_emplace(k, v);
    if (!fresh) it->second.second += v.second;
  }
  return out;
}

std::optional<FactoredFrac> frac_derivative(const FactoredFrac& f, const Symbol& s) {
  Expr dn = partial_derivative(f.num, s);
  if (!is_polynomial(dn)) return std::nullopt;
  if (f.dens.empty()) {
    FactoredFrac out;
    out.num = dn;
    return out;
  }
  // d(n * prod d_i^-e_i) = [dn * prod d_i - n * sum e_i d_i' prod_{j!=i} d_j]
  //                        * prod d_i^-(e_i+1)
  Expr all(1);
  for (const auto& [k, v] : f.dens) all = all * v.first;
  Expr corr(0);
  for (const auto& [k, v] : f.dens) {
    Expr dd = partial_derivative(v.first, s);
    if (!is_polynomial(dd)) return std::nullopt;
    if (dd.is_zero()) continue;
    Expr rest(1);
    for (const auto& [k2, v2] : f.dens)
      if (k2 != k) rest = rest * v2.first;
    corr += Expr(v.second) * dd * rest;
  }
  FactoredFrac out;
  out.num = dn * all - f.num * corr;
  out.dens = f.dens;
  for (auto& [k, v] : out.dens) v.second += 1;
  return out;
}

std::optional<bool> admits_cleared(const std::vector<Expr>& equations,
                                   const std::map<std::string, Expr>& defs) {
  ContextPtr ctx;
  for (const auto& eq : equations)
    if (eq.context()) ctx = eq.context();
  if (!ctx) return true;
  for (const auto& [name, def] : defs)
    if (!def.context() && !def.is_rational_constant()) return std::nullopt;

  std::map<int32_t, FactoredFrac> memo;
  std::function<std::optional<FactoredFrac>(int32_t)> value =
      [&](int32_t id) -> std::optional<FactoredFrac> {
    auto mit = memo.find(id);
    if (mit != memo.end()) return mit->second;
    const detail::AtomData& d = ctx->atom(id);
    if (d.kind != detail::AtomKind::Func) return std::nullopt;
    const FunctionInfo& info = ctx->function_info(d.a);
    auto dit = defs.find(info.name);
    if (dit == defs.end()) return std::nullopt;
    for (size_t slot = 0; slot < d.args.size(); ++slot)
      if (!Expr(d.args[slot]).identical(symbol_expr(info.signature[slot])))
        return std::nullopt;
    std::optional<FactoredFrac> out;
    if (d.index.is_zero()) {
      out = frac_of_def(dit->second);
    } else {
      int step = -1;
      for (int i = 0; i < d.index.size(); ++i)
        if (d.index[i] > 0) {
          step = i;
          break;
        }
      MultiIndex prev;
      d.index.minus(MultiIndex::unit(d.index.size(), step), prev);
      detail::AtomData pd;
      pd.kind = detail::AtomKind::Func;
      pd.a = d.a;
      pd.index = prev;
      pd.args = d.args;
      auto lower = value(ctx->intern_atom(pd));
      if (!lower) return std::nullopt;
      out = frac_derivative(*lower, info.signature[static_cast<size_t>(step)]);
    }
    if (!out || !is_polynomial(out->num)) return std::nullopt;
    memo.emplace(id, *out);
    return out;
  };

  for (const auto& eq : equations) {
    if (!eq.context()) {
      if (!eq.is_zero()) return false;
      continue;
    }
    const detail::ExprData& data = eq.data();
    if (!data.den.is_constant()) return std::nullopt;
    // evaluate each monomial as a FactoredFrac
    std::vector<FactoredFrac> terms;
    std::map<std::string, std::pair<Expr, int>> max_dens;
    for (const auto& [m, c] : data.num.terms) {
      if (m.exp_arg) return std::nullopt;
      FactoredFrac term;
      term.num = Expr(Rat(c));
      for (auto [atom, exp] : m.factors) {
        const detail::AtomData& ad = ctx->atom(atom);
        bool has_def = false;
        if (ad.kind == detail::AtomKind::Func) {
          const FunctionInfo& info = ctx->function_info(ad.a);
          has_def = defs.count(info.name) > 0;
        }
        if (has_def) {
          auto v = value(atom);
          if (!v) return std::nullopt;
          for (int k = 0; k < exp; ++k) term = frac_mul(term, *v);
        } else {
          FactoredFrac plain;
          plain.num = Expr(detail::make_ratio(ctx, detail::poly_atom(atom),
                                              detail::poly_const(Rat(1))))
                          .pow(exp);
          if (!is_polynomial(plain.num)) return std::nullopt;
          term = frac_mul(term, plain);
        }
      }
      for (const auto& [k, v] : term.dens) {
        auto [it, fresh] = max_dens.try_emplace(k, v);
        if (!fresh) it->second.second = std::max(it->second.second, v.second);
      }
      terms.push_back(std::move(term));
    }
    Expr sum(0);
    for (const auto& term : terms) {
      Expr cofactor(1);
      for (const auto& [k, v] : max_dens) {
        int used = 0;
        auto it = term.dens.find(k);
        if (it != term.dens.end()) used = it->second.second;
        for (int p = used; p < v.second; ++p) cofactor = cofactor * v.first;
      }
      sum += term.num * cofactor;
    }
    if (!sum.is_zero()) return false;
  }
  return true;
}

}  // namespace

bool DeterminingSystem::admits(const std::map<std::string, Expr>& defs) const {
  if (auto fast = admits_cleared(equations, defs)) return *fast;
  for (const auto& eq : equations)
    if (!substitute_functions(eq, defs).is_zero()) return false;
  return true;
}

std::string DeterminingSystem::str() const {
  std::string out;
  for (const auto& eq : equations) {
    if (!out.empty()) out += "\n";
    out += eq.str() + " = 0";
  }
  return out.empty() ? "(empty system)" : out;
}

DeterminingSystem qcond_determining_system(const PdeSystem& e, const VectorField& op_template,
                                           const InvarianceOptions& opts) {
  QcondResidual qr = qcond_residual(e, InvolutiveSet({op_template}), opts);
  std::map<Expr, Expr, ExprLess> monomials;
  std::set<Expr, ExprLess> equations;
  for (const auto& r : qr.residuals) split_residual(r, monomials, equations);
  return finish_system(op_template, monomials, equations, qr.used_pseudo_division);
}

DeterminingSystem lie_determining_system(const PdeSystem& s, const VectorField& op_template,
                                         const InvarianceOptions& opts) {
  auto residuals = lie_residual(s, op_template, opts);
  std::map<Expr, Expr, ExprLess> monomials;
  std::set<Expr, ExprLess> equations;
  for (const auto& r : residuals) split_residual(r, monomials, equations);
  return finish_system(op_template, monomials, equations, false);
}

// --- algebra closure over exact rationals -------------------------------------------

namespace {

// Writes `e * scale` as a sparse rational vector keyed by (slot, monomial
// prefix string); `scale` clears the slot's common denominator.
void add_vector_terms(std::map<std::pair<int, std::string>, Rat>& dst, int slot, const Expr& e,
                      const Expr& scale, const Rat& mult) {
  Expr scaled = e * scale;
  const ExprData& d = scaled.data();
  if (!d.den.is_constant())
    throw math_error("closure check: common denominator did not clear");
  Rat den_c = d.den.is_zero() ? Rat(1) : d.den.terms[0].second;
  for (const auto& [m, c] : d.num.terms) {
    std::string key;
    for (auto [atom, exp] : m.factors) key += std::to_string(atom) + "^" + std::to_string(exp) + ".";
    if (m.exp_arg) key += "E" + Expr(m.exp_arg).prefix();
    dst[{slot, key}] += mult * c / den_c;
  }
}

}  // namespace

ClosureReport check_algebra_closure(const std::vector<VectorField>& ops) {
  ClosureReport report;
  if (ops.empty()) return report;
  int s = static_cast<int>(ops.size());
  int n = ops[0].n(), m = ops[0].m();
  int slots = n + m;

  // per-slot common denominator (lcm over operators; brackets add nothing new
  // beyond products of the same denominators, collected per bracket below)
  auto slot_entry = [&](const VectorField& q, int slot) -> const Expr& {
    return slot < n ? q.xi(slot) : q.eta(slot - n);
  };

  report.table.assign(static_cast<size_t>(s),
                      std::vector<std::vector<Rat>>(static_cast<size_t>(s),
                                                    std::vector<Rat>(static_cast<size_t>(s), Rat(0))));

  for (int a = 0; a < s && report.closes; ++a)
    for (int b = a + 1; b < s && report.closes; ++b) {
      VectorField bracket = lie_bracket(ops[static_cast<size_t>(a)], ops[static_cast<size_t>(b)]);
      // build the linear system sum_p c_p * ops[p] = bracket
      std::map<std::pair<int, std::string>, Rat> rhs;
      std::vector<std::map<std::pair<int, std::string>, Rat>> cols(static_cast<size_t>(s));
      for (int slot = 0; slot < slots; ++slot) {
        // common denominator for this slot
        Expr den(1);
        auto fold_den = [&](const Expr& e) {
          Expr d(make_ratio(e.context() ? e.context() : bracket.context(), e.data().den,
                            poly_const(Rat(1))));
          den = den * d;  // product suffices for exact clearing
        };
        for (int p = 0; p < s; ++p) fold_den(slot_entry(ops[static_cast<size_t>(p)], slot));
        fold_den(slot_entry(bracket, slot));
        for (int p = 0; p < s; ++p)
          add_vector_terms(cols[static_cast<size_t>(p)], slot,
                           slot_entry(ops[static_cast<size_t>(p)], slot), den, Rat(1));
        add_vector_terms(rhs, slot, slot_entry(bracket, slot), den, Rat(1));
      }
      // assemble row set
      std::set<std::pair<int, std::string>> rows;
      for (const auto& [k, v] : rhs)
        if (v != 0) rows.insert(k);
      for (const auto& col : cols)
        for (const auto& [k, v] : col)
          if (v != 0) rows.insert(k);
      std::vector<std::vector<Rat>> mat;
      std::vector<Rat> vec;
      for (const auto& key : rows) {
        std::vector<Rat> row(static_cast<size_t>(s), Rat(0));
        for (int p = 0; p < s; ++p) {
          auto it = cols[static_cast<size_t>(p)].find(key);
          if (it != cols[static_cast<size_t>(p)].end()) row[static_cast<size_t>(p)] = it->second;
        }
        mat.push_back(std::move(row));
        auto it = rhs.find(key);
        vec.push_back(it != rhs.end() ? it->second : Rat(0));
      }
      // exact Gaussian elimination
      size_t rank = 0;
      std::vector<int> pivots;
      for (int col = 0; col < s && rank < mat.size(); ++col) {
        size_t pr = rank;
        while (pr < mat.size() && mat[pr][static_cast<size_t>(col)] == 0) ++pr;
        if (pr == mat.size()) continue;
        std::swap(mat[pr], mat[rank]);
        std::swap(vec[pr], vec[rank]);
        for (size_t r2 = 0; r2 < mat.size(); ++r2) {
          if (r2 == rank || mat[r2][static_cast<size_t>(col)] == 0) continue;
          Rat f = mat[r2][static_cast<size_t>(col)] / mat[rank][static_cast<size_t>(col)];
          for (int c2 = 0; c2 < s; ++c2) mat[r2][static_cast<size_t>(c2)] -= f * mat[rank][static_cast<size_t>(c2)];
          vec[r2] -= f * vec[rank];
        }
        pivots.push_back(col);
        ++rank;
      }
      bool consistent = true;
      for (size_t r2 = rank; r2 < mat.size(); ++r2)
        if (vec[r2] != 0) consistent = false;
      if (!consistent) {
        report.closes = false;
        report.failure = "[" + ops[static_cast<size_t>(a)].str() + ", " +
                         ops[static_cast<size_t>(b)].str() +
                         "] = " + bracket.str() + " is outside the rational span";
        break;
      }
      std::vector<Rat> sol(static_cast<size_t>(s), Rat(0));
      for (size_t r2 = 0; r2 < pivots.size(); ++r2)
        sol[static_cast<size_t>(pivots[r2])] = vec[r2] / mat[r2][static_cast<size_t>(pivots[r2])];
      // exact verification of the candidate combination
      VectorField check = bracket;
      for (int p = 0; p < s; ++p)
        check = check - ops[static_cast<size_t>(p)].scaled(Expr(sol[static_cast<size_t>(p)]));
      if (!check.is_zero()) {
        report.closes = false;
        report.failure = "[" + ops[static_cast<size_t>(a)].str() + ", " +
                         ops[static_cast<size_t>(b)].str() + "] verification failed";
        break;
      }
      for (int p = 0; p < s; ++p) {
        report.table[static_cast<size_t>(a)][static_cast<size_t>(b)][static_cast<size_t>(p)] =
            sol[static_cast<size_t>(p)];
        report.table[static_cast<size_t>(b)][static_cast<size_t>(a)][static_cast<size_t>(p)] =
            -sol[static_cast<size_t>(p)];
      }
    }
  return report;
}

// --- context transfer ------------------------------------------------------------------

Expr transfer_functions_to_dependents(const Expr& e, ContextPtr to) {
  ContextPtr from = e.context();
  if (!from) return e;
  // predeclare pass-through functions in the target context
  for (int fid : e.function_ids()) {
    const FunctionInfo& info = from->function_info(fid);
    if (to->dependent_index(info.name) >= 0) continue;
    if (to->function_id(info.name) >= 0) continue;
    std::vector<Symbol> sig;
    for (const auto& s : info.signature) {
      auto mapped = to->find_symbol(s.str());
      if (!mapped) {
        // parameters may need declaring
        mapped = to->add_parameter(s.str());
      }
      sig.push_back(*mapped);
    }
    to->declare_function(info.name, std::move(sig));
  }
  return rebuild(e, to, [&](const JetContext& c, int32_t id) -> std::optional<Expr> {
    const AtomData& d = c.atom(id);
    if (d.kind == AtomKind::Func) {
      const FunctionInfo& info = c.function_info(d.a);
      int j = to->dependent_index(info.name);
      if (j < 0) return std::nullopt;  // pass-through function
      for (size_t slot = 0; slot < d.args.size(); ++slot)
        if (!Expr(d.args[slot]).identical(symbol_expr(info.signature[slot])))
          throw math_error("transfer: function " + info.name +
                           " applied off its signature cannot become a dependent variable");
      if (d.index.size() != to->n_independent())
        throw math_error("transfer: signature arity differs from the target context");
      return to->jet(j, d.index);
    }
    if (d.kind == AtomKind::Jet) {
      const std::string& name = c.dependent_name(d.a);
      int i = to->independent_index(name);
      if (i >= 0) {
        if (!d.index.is_zero())
          throw math_error("transfer: jet of " + name +
                           " cannot map onto an independent variable");
        return to->x(i);
      }
      return std::nullopt;
    }
    return std::nullopt;
  });
}

PdeSystem determining_system_as_pde(const DeterminingSystem& ds, ContextPtr target,
                                    const std::vector<Symbol>& leads) {
  if (leads.size() != ds.equations.size())
    throw math_error("determining_system_as_pde: one lead per equation required");
  std::vector<PdeEquation> eqs;
  std::set<int32_t> used;
  for (const auto& eq : ds.equations) {
    Expr moved = transfer_functions_to_dependents(eq, target);
    // each equation is matched to the unique unused lead it contains
    const Symbol* lead = nullptr;
    for (const auto& l : leads) {
      if (used.count(l.atom) || !moved.contains_symbol(l)) continue;
      if (lead)
        throw math_error("determining_system_as_pde: equation matches several leads: " +
                         moved.str());
      lead = &l;
    }
    if (!lead)
      throw math_error("determining_system_as_pde: no lead found in equation " + moved.str());
    auto powers = collect_powers(moved, *lead);
    if (powers.empty() || powers.rbegin()->first != 1)
      throw math_error("determining_system_as_pde: equation is not linear in " + lead->str());
    Expr c1 = powers.at(1);
    Expr c0 = powers.count(0) ? powers.at(0) : Expr(0);
    used.insert(lead->atom);
    eqs.push_back(PdeEquation{*lead, -c0 / c1});
  }
  return PdeSystem(target, std::move(eqs));
}

}  // namespace qsym
