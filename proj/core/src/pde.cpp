#include "qsym/pde.hpp"

#include "internal.hpp"

namespace qsym {

using namespace detail;

PdeSystem::PdeSystem(ContextPtr ctx, std::vector<PdeEquation> equations)
    : ctx_(std::move(ctx)), equations_(std::move(equations)) {
  if (!ctx_) throw context_error("PdeSystem: null context");
  if (equations_.empty()) throw math_error("PdeSystem: empty system");
  for (const auto& eq : equations_) {
    if (!eq.lead.valid() || eq.lead.ctx != ctx_)
      throw context_error("PdeSystem: leading symbol from a different context");
    const AtomData& d = ctx_->atom(eq.lead.atom);
    if (d.kind != AtomKind::Jet || d.index.is_zero())
      throw math_error("PdeSystem: leading coordinate must be a jet of positive order");
    if (eq.rhs.context() && eq.rhs.context() != ctx_)
      throw context_error("PdeSystem: right-hand side from a different context");
    // solved form: rhs free of the leading coordinate and all its derivatives
    for (const auto& s : eq.rhs.jet_symbols()) {
      const AtomData& sd = ctx_->atom(s.atom);
      if (sd.a == d.a && sd.index.covers(d.index))
        throw math_error("PdeSystem: right-hand side contains " + s.str() +
                         ", a derivative of the leading coordinate " + eq.lead.str());
    }
    order_ = std::max(order_, std::max(d.index.order(), eq.rhs.max_jet_order()));
  }
}

Expr PdeSystem::l_expr(int mu) const {
  const PdeEquation& eq = equation(mu);
  return symbol_expr(eq.lead) - eq.rhs;
}

// --- RewriteSystem ---------------------------------------------------------------

RewriteSystem::RewriteSystem(ContextPtr ctx, int order_cap, CapMode mode)
    : ctx_(std::move(ctx)), cap_(order_cap), mode_(mode) {
  if (!ctx_) throw context_error("RewriteSystem: null context");
}

void RewriteSystem::add_jet_rule(const Symbol& lead, const Expr& rhs, bool exact_only) {
  if (!lead.valid() || lead.ctx != ctx_) throw context_error("RewriteSystem: bad rule symbol");
  const AtomData& d = ctx_->atom(lead.atom);
  if (d.kind != AtomKind::Jet) throw context_error("RewriteSystem: rule must rewrite a jet");
  jet_rules_.push_back(JetRule{d.a, d.index, rhs, exact_only});
  memo_.clear();
}

void RewriteSystem::add_constraint(const FunctionConstraint& c) {
  if (ctx_->function_id(c.func) < 0)
    throw context_error("RewriteSystem: constraint on undeclared function " + c.func);
  constraints_.push_back(c);
  memo_.clear();
}

std::optional<Expr> RewriteSystem::replace_atom(int32_t id) const {
  auto mit = memo_.find(id);
  if (mit != memo_.end()) return mit->second;
  const AtomData& d = ctx_->atom(id);

  if (d.kind == AtomKind::Jet) {
    const JetRule* best = nullptr;
    for (const auto& r : jet_rules_) {
      if (r.dep != d.a || !d.index.covers(r.alpha)) continue;
      if (r.exact_only && !(d.index == r.alpha)) continue;
      if (!best || best->alpha.order() < r.alpha.order() ||
          (best->alpha.order() == r.alpha.order() && r.alpha.grlex_less(best->alpha)))
        best = &r;
    }
    if (!best) return std::nullopt;
    if (cap_ >= 0 && d.index.order() > cap_ && !(d.index == best->alpha)) {
      if (mode_ == CapMode::Skip) return std::nullopt;
      throw rewrite_error("restriction closure: consequence for " + ctx_->atom_str(id) +
                          " exceeds the order cap " + std::to_string(cap_));
    }
    Expr value;
    if (d.index == best->alpha) {
      value = reduce(best->rhs);
    } else {
      int step = -1;
      for (int i = 0; i < d.index.size(); ++i)
        if (d.index[i] > best->alpha[i]) {
          step = i;
          break;
        }
      MultiIndex prev;
      d.index.minus(MultiIndex::unit(d.index.size(), step), prev);
      Expr prev_value = *replace_atom(ctx_->jet_symbol(d.a, prev).atom);
      value = reduce(total_derivative(prev_value, step));
    }
    memo_.emplace(id, value);
    return value;
  }

  if (d.kind == AtomKind::Func) {
    const FunctionInfo& info = ctx_->function_info(d.a);
    const FunctionConstraint* best = nullptr;
    for (const auto& c : constraints_) {
      if (c.func != info.name || !d.index.covers(c.lead)) continue;
      if (!best || best->lead.order() < c.lead.order()) best = &c;
    }
    if (!best) return std::nullopt;
    // constraints apply only to signature-argument symbols (determining
    // systems keep them that way)
    for (size_t slot = 0; slot < d.args.size(); ++slot)
      if (!Expr(d.args[slot]).identical(symbol_expr(info.signature[slot])))
        return std::nullopt;
    Expr value;
    if (d.index == best->lead) {
      value = reduce(best->rhs);
    } else {
      int step = -1;
      for (int i = 0; i < d.index.size(); ++i)
        if (d.index[i] > best->lead[i]) {
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
      Expr prev_value = *replace_atom(ctx_->intern_atom(pd));
      value = reduce(partial_derivative(prev_value, info.signature[static_cast<size_t>(step)]));
    }
    memo_.emplace(id, value);
    return value;
  }

  return std::nullopt;
}

Expr RewriteSystem::reduce(const Expr& e) const {
  if (++depth_ > 512) {
    --depth_;
    throw rewrite_error("restriction closure: runaway reduction depth");
  }
  Expr out = rebuild(e, ctx_, [&](const JetContext&, int32_t id) { return replace_atom(id); });
  --depth_;
  return out;
}

RewriteSystem restriction_k(const PdeSystem& s, int order_cap,
                            const std::vector<FunctionConstraint>& constraints) {
  RewriteSystem rw(s.context(), order_cap);
  for (const auto& eq : s.equations()) rw.add_jet_rule(eq.lead, eq.rhs);
  for (const auto& c : constraints) rw.add_constraint(c);
  return rw;
}

}  // namespace qsym
