// Simultaneous substitution, differential-consequence closure, and the
// generic atom-mapping rebuild used by context transfer.

#include <map>

#include "internal.hpp"
#include "qsym/expr.hpp"

namespace qsym {

using namespace detail;

Expr rebuild(const Expr& e, ContextPtr target,
             const std::function<std::optional<Expr>(const JetContext&, int32_t)>& map_atom) {
  ContextPtr src = e.context();
  if (!src) return e;
  const JetContext& ctx = *src;

  std::function<Expr(const ExprPtr&)> walk_expr = [&](const ExprPtr& ptr) -> Expr {
    if (!ptr || !ptr->ctx) return Expr(ptr ? ptr : expr_zero());
    std::function<Expr(int32_t)> atom_expr = [&](int32_t id) -> Expr {
      if (auto mapped = map_atom(ctx, id)) return *mapped;
      const AtomData& d = ctx.atom(id);
      switch (d.kind) {
        case AtomKind::IndepVar:
        case AtomKind::Jet:
        case AtomKind::Param: {
          if (target == src) return Expr(make_ratio(src, poly_atom(id), poly_const(Rat(1))));
          // same-name transfer into the target context
          if (d.kind == AtomKind::IndepVar) {
            int i = target->independent_index(ctx.independent_name(d.a));
            if (i < 0) throw context_error("rebuild: no variable " + ctx.independent_name(d.a));
            return target->x(i);
          }
          if (d.kind == AtomKind::Param) return symbol_expr(target->add_parameter(d.param_name));
          int j = target->dependent_index(ctx.dependent_name(d.a));
          if (j < 0) throw context_error("rebuild: no dependent " + ctx.dependent_name(d.a));
          return target->jet(j, d.index);
        }
        case AtomKind::Func: {
          const FunctionInfo& info = ctx.function_info(d.a);
          std::vector<Expr> args;
          args.reserve(d.args.size());
          for (const auto& a : d.args) args.push_back(walk_expr(a));
          return target->func_derivative(info.name, d.index, args);
        }
        case AtomKind::Root: {
          Expr base = atom_expr(d.a);
          Rat k(1, d.b);
          k.canonicalize();
          return base.pow(k);
        }
        case AtomKind::Log:
          return log_expr(walk_expr(d.arg));
        case AtomKind::Antideriv: {
          Expr integrand = walk_expr(d.arg);
          int i = target == src
                      ? d.a
                      : target->independent_index(ctx.independent_name(d.a));
          if (i < 0) throw context_error("rebuild: no variable for antiderivative");
          return antiderivative(integrand, target->independent(i));
        }
        case AtomKind::ExpVar:
          throw math_error("internal lattice atom escaped into rebuild");
      }
      return Expr(0);
    };

    auto walk_poly = [&](const Poly& p) -> Expr {
      Expr sum(0);
      for (const auto& [m, c] : p.terms) {
        Expr term{Rat(c)};
        for (auto [atom, exp] : m.factors) {
          Expr a = atom_expr(atom);
          term *= a.pow(static_cast<long>(exp));
        }
        if (m.exp_arg) term *= exp_expr(walk_expr(m.exp_arg));
        sum += term;
      }
      return sum;
    };

    Expr num = walk_poly(ptr->num);
    Expr den = walk_poly(ptr->den);
    return num / den;
  };

  return walk_expr(e.ptr());
}

namespace {

struct JetRule {
  int dep = 0;
  MultiIndex alpha;
  Expr rhs;
};

struct Closure {
  ContextPtr ctx;
  std::map<int32_t, Expr> direct;  // exact-atom rules (as given)
  std::vector<JetRule> base;       // jet rules for cover matching
  std::map<int32_t, Expr> memo;    // atom -> fully reduced replacement
  int cap = -1;
  int depth = 0;

  const JetRule* best_cover(const AtomData& d) const {
    // largest |alpha| wins; canonical order as deterministic tiebreak
    const JetRule* best = nullptr;
    for (const auto& r : base) {
      if (r.dep != d.a || !d.index.covers(r.alpha)) continue;
      if (!best || best->alpha.order() < r.alpha.order() ||
          (best->alpha.order() == r.alpha.order() && r.alpha.grlex_less(best->alpha)))
        best = &r;
    }
    return best;
  }

  std::optional<Expr> replace(int32_t id) {
    auto mit = memo.find(id);
    if (mit != memo.end()) return mit->second;
    auto dit = direct.find(id);
    if (dit != direct.end()) {
      Expr r = apply(dit->second);
      memo.emplace(id, r);
      return r;
    }
    const AtomData& d = ctx->atom(id);
    if (d.kind != AtomKind::Jet) return std::nullopt;
    const JetRule* best = best_cover(d);
    if (!best) return std::nullopt;
    if (cap >= 0 && d.index.order() > cap)
      throw rewrite_error("consequence closure: jet " + ctx->atom_str(id) +
                          " exceeds the order cap " + std::to_string(cap));
    int step = -1;
    for (int i = 0; i < d.index.size(); ++i)
      if (d.index[i] > best->alpha[i]) {
        step = i;
        break;
      }
    MultiIndex prev;
    d.index.minus(MultiIndex::unit(d.index.size(), step), prev);
    int32_t prev_atom = ctx->jet_symbol(d.a, prev).atom;
    Expr prev_rhs = *replace(prev_atom);
    Expr next = apply(total_derivative(prev_rhs, step));
    memo.emplace(id, next);
    return next;
  }

  Expr apply(const Expr& e) {
    if (++depth > 512) throw rewrite_error("consequence closure: runaway substitution depth");
    Expr out = rebuild(e, ctx, [&](const JetContext&, int32_t id) { return replace(id); });
    --depth;
    return out;
  }
};

}  // namespace

Expr substitute(const Expr& e, const std::vector<SubstRule>& rules, const SubstOptions& opts) {
  if (rules.empty()) return e;
  ContextPtr ctx = e.context();
  for (const auto& r : rules) {
    if (!r.lhs.valid()) throw context_error("substitute: invalid rule symbol");
    if (!ctx) ctx = r.lhs.ctx;
    if (r.lhs.ctx != ctx) throw context_error("substitute: rule symbol from a different context");
  }
  if (!ctx) return e;
  // distinct left-hand sides
  for (size_t i = 0; i < rules.size(); ++i)
    for (size_t k = i + 1; k < rules.size(); ++k)
      if (rules[i].lhs == rules[k].lhs)
        throw rewrite_error("substitute: duplicate rule for " + rules[i].lhs.str());
  // no right-hand side may contain any left-hand side (cyclic rules)
  for (const auto& r : rules)
    for (const auto& q : rules)
      if (r.rhs.contains_symbol(q.lhs))
        throw rewrite_error("substitute: cyclic rules involving " + q.lhs.str());

  if (opts.closure && opts.max_order < 0)
    throw rewrite_error("substitute: consequence closure requires an order cap");

  Closure closure;
  closure.ctx = ctx;
  closure.cap = opts.closure ? opts.max_order : -1;
  for (const auto& r : rules) {
    closure.direct.emplace(r.lhs.atom, r.rhs);
    const AtomData& d = ctx->atom(r.lhs.atom);
    if (opts.closure && d.kind == AtomKind::Jet)
      closure.base.push_back(JetRule{d.a, d.index, r.rhs});
  }

  if (!opts.closure) {
    return rebuild(e, ctx, [&](const JetContext&, int32_t id) -> std::optional<Expr> {
      auto it = closure.direct.find(id);
      if (it == closure.direct.end()) return std::nullopt;
      return it->second;
    });
  }
  return closure.apply(e);
}

Expr substitute_functions(const Expr& e, const std::map<std::string, Expr>& defs) {
  ContextPtr ctx = e.context();
  if (!ctx || defs.empty()) return e;
  for (const auto& [name, def] : defs)
    if (ctx->function_id(name) < 0)
      throw context_error("substitute_functions: undeclared function " + name);

  // memoized atom values; derivative tags are built up one step at a time so
  // repeated occurrences (g_x, g_xx, ... across many equations) share work
  std::map<int32_t, Expr> memo;

  std::function<Expr(const Expr&)> walk = [&](const Expr& sub) -> Expr {
    std::function<std::optional<Expr>(const JetContext&, int32_t)> map_atom =
        [&](const JetContext& c, int32_t id) -> std::optional<Expr> {
      auto mit = memo.find(id);
      if (mit != memo.end()) return mit->second;
      const AtomData& d = c.atom(id);
      if (d.kind != AtomKind::Func) return std::nullopt;
      const FunctionInfo& info = c.function_info(d.a);
      auto it = defs.find(info.name);
      if (it == defs.end()) return std::nullopt;
      bool args_are_signature = true;
      for (size_t slot = 0; slot < d.args.size() && args_are_signature; ++slot)
        args_are_signature = Expr(d.args[slot]).identical(symbol_expr(info.signature[slot]));

      Expr value;
      if (args_are_signature && !d.index.is_zero()) {
        // one derivative step down, reusing the memoized lower tag
        int step = -1;
        for (int i = 0; i < d.index.size(); ++i)
          if (d.index[i] > 0) {
            step = i;
            break;
          }
        MultiIndex prev;
        d.index.minus(MultiIndex::unit(d.index.size(), step), prev);
        AtomData pd;
        pd.kind = AtomKind::Func;
        pd.a = d.a;
        pd.index = prev;
        pd.args = d.args;
        Expr lower = *map_atom(c, ctx->intern_atom(pd));
        value = partial_derivative(lower, info.signature[static_cast<size_t>(step)]);
      } else if (args_are_signature) {
        value = it->second;
      } else {
        // composite arguments: differentiate the template, then bind
        Expr t = it->second;
        for (int slot = 0; slot < d.index.size(); ++slot)
          for (int k = 0; k < d.index[slot]; ++k)
            t = partial_derivative(t, info.signature[static_cast<size_t>(slot)]);
        std::vector<SubstRule> bind;
        for (size_t slot = 0; slot < d.args.size(); ++slot)
          bind.push_back(SubstRule{info.signature[slot], walk(Expr(d.args[slot]))});
        value = rebuild(t, ctx, [&](const JetContext&, int32_t aid) -> std::optional<Expr> {
          for (const auto& b : bind)
            if (b.lhs.atom == aid) return b.rhs;
          return std::nullopt;
        });
      }
      memo.emplace(id, value);
      return value;
    };
    return rebuild(sub, ctx, map_atom);
  };
  return walk(e);
}

}  // namespace qsym
