// Canonical text rendering.  The printed form is deterministic (terms in
// descending monomial order) and re-parses to the identical expression, which
// the golden files and the CLI round-trip contract rely on.

#include <sstream>

#include "internal.hpp"
#include "qsym/expr.hpp"

namespace qsym {

using namespace detail;

namespace {

bool single_char_names(const JetContext& ctx) {
  for (int i = 0; i < ctx.n_independent(); ++i)
    if (ctx.independent_name(i).size() != 1) return false;
  return true;
}

bool suffix_collides(const JetContext& ctx, const std::string& candidate) {
  return ctx.has_parameter(candidate) || ctx.function_id(candidate) >= 0 ||
         ctx.independent_index(candidate) >= 0 || ctx.dependent_index(candidate) >= 0;
}

std::string expr_str(const ExprPtr& e);

std::string jet_str(const JetContext& ctx, int dep, const MultiIndex& alpha) {
  const std::string& base = ctx.dependent_name(dep);
  if (alpha.is_zero()) return base;
  if (single_char_names(ctx) && base.find('_') == std::string::npos) {
    std::string suffix;
    for (int i = 0; i < alpha.size(); ++i)
      for (int k = 0; k < alpha[i]; ++k) suffix += ctx.independent_name(i);
    std::string name = base + "_" + suffix;
    if (!suffix_collides(ctx, name)) return name;
  }
  std::string out = "d(" + base;
  for (int i = 0; i < alpha.size(); ++i) {
    if (alpha[i] == 0) continue;
    out += "," + ctx.independent_name(i);
    if (alpha[i] > 1) out += "," + std::to_string(alpha[i]);
  }
  out += ")";
  return out;
}

std::string func_str(const JetContext& ctx, const AtomData& d) {
  const FunctionInfo& info = ctx.function_info(d.a);
  // arguments equal to the declared signature are left implicit
  bool plain_args = d.args.size() == info.signature.size();
  for (size_t i = 0; plain_args && i < d.args.size(); ++i) {
    const ExprPtr& a = d.args[i];
    plain_args = a->den.is_constant() && !a->num.is_zero() && a->num.terms.size() == 1 &&
                 a->num.terms[0].second == 1 && a->den.terms[0].second == 1 &&
                 a->num.terms[0].first.factors.size() == 1 &&
                 !a->num.terms[0].first.exp_arg &&
                 a->num.terms[0].first.factors[0] ==
                     std::make_pair(info.signature[i].atom, 1);
  }
  std::string head;
  bool d_form = false;
  if (d.index.is_zero()) {
    head = info.name;
  } else {
    bool shorthand = true;
    std::string suffix;
    for (int i = 0; i < d.index.size(); ++i) {
      std::string n = info.signature[static_cast<size_t>(i)].str();
      if (n.size() != 1) shorthand = false;
      for (int k = 0; k < d.index[i]; ++k) suffix += n;
    }
    if (shorthand && info.name.find('_') == std::string::npos &&
        !suffix_collides(ctx, info.name + "_" + suffix)) {
      head = info.name + "_" + suffix;
    } else {
      d_form = true;
      head = "d(" + info.name;
      for (int i = 0; i < d.index.size(); ++i) {
        if (d.index[i] == 0) continue;
        head += "," + info.signature[static_cast<size_t>(i)].str();
        if (d.index[i] > 1) head += "," + std::to_string(d.index[i]);
      }
      head += ")";
    }
  }
  (void)d_form;
  if (!plain_args) {
    head += "(";
    for (size_t i = 0; i < d.args.size(); ++i) {
      if (i) head += ",";
      head += expr_str(d.args[i]);
    }
    head += ")";
  }
  return head;
}

std::string atom_str_impl(const JetContext& ctx, int32_t id) {
  const AtomData& d = ctx.atom(id);
  switch (d.kind) {
    case AtomKind::IndepVar:
      return ctx.independent_name(d.a);
    case AtomKind::Jet:
      return jet_str(ctx, d.a, d.index);
    case AtomKind::Param:
      return d.param_name;
    case AtomKind::Func:
      return func_str(ctx, d);
    case AtomKind::Root:
      return atom_str_impl(ctx, d.a);  // exponent rendered at the factor level
    case AtomKind::Log:
      return "log(" + expr_str(d.arg) + ")";
    case AtomKind::Antideriv:
      return "Int(" + expr_str(d.arg) + "," + ctx.independent_name(d.a) + ")";
    case AtomKind::ExpVar:
      return "exp(" + expr_str(d.arg) + ")";
  }
  return "?";
}

std::string factor_str(const JetContext& ctx, int32_t atom, int32_t exp) {
  const AtomData& d = ctx.atom(atom);
  // atom renderings are self-delimiting (identifiers or call-like forms)
  std::string base = atom_str_impl(ctx, atom);
  if (d.kind == AtomKind::Root) {
    long g = std::gcd(static_cast<long>(exp < 0 ? -exp : exp), static_cast<long>(d.b));
    long num_e = exp / g, den_e = d.b / g;
    if (den_e == 1) return num_e == 1 ? base : base + "^" + std::to_string(num_e);
    return base + "^(" + std::to_string(num_e) + "/" + std::to_string(den_e) + ")";
  }
  if (exp == 1) return base;
  if (exp < 0) return base + "^(" + std::to_string(exp) + ")";
  return base + "^" + std::to_string(exp);
}

std::string mono_str(const JetContext* ctx, const Mono& m, const Rat& coeff) {
  std::vector<std::string> parts;
  Rat c = coeff;
  bool neg = c < 0;
  if (neg) c = -c;
  if (c != 1 || (m.factors.empty() && !m.exp_arg)) parts.push_back(c.get_str());
  for (auto [atom, exp] : m.factors) parts.push_back(factor_str(*ctx, atom, exp));
  if (m.exp_arg) parts.push_back("exp(" + expr_str(m.exp_arg) + ")");
  std::string body;
  for (size_t i = 0; i < parts.size(); ++i) {
    if (i) body += "*";
    body += parts[i];
  }
  return (neg ? "-" : "") + body;
}

std::string poly_str(const JetContext* ctx, const Poly& p) {
  if (p.is_zero()) return "0";
  std::string out;
  // descending order: leading term first
  for (auto it = p.terms.rbegin(); it != p.terms.rend(); ++it) {
    std::string t = mono_str(ctx, it->first, it->second);
    if (out.empty()) {
      out = t;
    } else if (!t.empty() && t[0] == '-') {
      out += " - " + t.substr(1);
    } else {
      out += " + " + t;
    }
  }
  return out;
}

bool den_is_simple(const Poly& den) {
  if (den.terms.size() != 1) return false;
  const auto& [m, c] = den.terms[0];
  return c == 1 && !m.exp_arg && m.factors.size() == 1 && m.factors[0].second == 1;
}

std::string expr_str(const ExprPtr& e) {
  if (!e) return "0";
  const JetContext* ctx = e->ctx.get();
  std::string num = poly_str(ctx, e->num);
  bool den_one = e->den.is_constant() && !e->den.is_zero() && e->den.terms[0].second == 1;
  if (den_one) return num;
  if (e->num.terms.size() > 1) num = "(" + num + ")";
  std::string den = poly_str(ctx, e->den);
  if (!den_is_simple(e->den)) den = "(" + den + ")";
  return num + "/" + den;
}

// --- prefix form -----------------------------------------------------------------

std::string prefix_expr(const ExprPtr& e);

std::string prefix_atom(const JetContext& ctx, int32_t id, int32_t exp) {
  const AtomData& d = ctx.atom(id);
  std::string body;
  switch (d.kind) {
    case AtomKind::IndepVar:
      body = ctx.independent_name(d.a);
      break;
    case AtomKind::Jet: {
      body = "(jet " + ctx.dependent_name(d.a);
      for (int c : d.index.counts()) body += " " + std::to_string(c);
      body += ")";
      break;
    }
    case AtomKind::Param:
      body = d.param_name;
      break;
    case AtomKind::Func: {
      body = "(f " + ctx.function_info(d.a).name + " (";
      for (int i = 0; i < d.index.size(); ++i) {
        if (i) body += " ";
        body += std::to_string(d.index[i]);
      }
      body += ")";
      for (const auto& a : d.args) body += " " + prefix_expr(a);
      body += ")";
      break;
    }
    case AtomKind::Root:
      return "(^ " + prefix_atom(ctx, d.a, 1) + " " + std::to_string(exp) + "/" +
             std::to_string(d.b) + ")";
    case AtomKind::Log:
      body = "(log " + prefix_expr(d.arg) + ")";
      break;
    case AtomKind::Antideriv:
      body = "(int " + prefix_expr(d.arg) + " " + ctx.independent_name(d.a) + ")";
      break;
    case AtomKind::ExpVar:
      body = "(exp " + prefix_expr(d.arg) + ")";
      break;
  }
  if (exp == 1) return body;
  return "(^ " + body + " " + std::to_string(exp) + ")";
}

std::string prefix_poly(const JetContext* ctx, const Poly& p) {
  if (p.is_zero()) return "0";
  std::vector<std::string> terms;
  for (auto it = p.terms.rbegin(); it != p.terms.rend(); ++it) {
    std::string t = "(* " + it->second.get_str();
    for (auto [atom, exp] : it->first.factors) t += " " + prefix_atom(*ctx, atom, exp);
    if (it->first.exp_arg) t += " (exp " + prefix_expr(it->first.exp_arg) + ")";
    t += ")";
    terms.push_back(std::move(t));
  }
  if (terms.size() == 1) return terms[0];
  std::string out = "(+";
  for (const auto& t : terms) out += " " + t;
  out += ")";
  return out;
}

std::string prefix_expr(const ExprPtr& e) {
  if (!e) return "0";
  const JetContext* ctx = e->ctx.get();
  bool den_one = e->den.is_constant() && !e->den.is_zero() && e->den.terms[0].second == 1;
  if (den_one) return prefix_poly(ctx, e->num);
  return "(/ " + prefix_poly(ctx, e->num) + " " + prefix_poly(ctx, e->den) + ")";
}

}  // namespace

std::string JetContext::atom_str(int32_t id) const { return atom_str_impl(*this, id); }

std::string Expr::str() const { return expr_str(data_); }

std::string Expr::prefix() const { return prefix_expr(data_); }

}  // namespace qsym
