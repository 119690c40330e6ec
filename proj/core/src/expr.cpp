#include "qsym/expr.hpp"

#include <algorithm>

#include "internal.hpp"

namespace qsym {

namespace detail {

const ExprPtr& expr_zero() {
  static const ExprPtr z = [] {
    auto d = std::make_shared<ExprData>();
    d->num = poly_zero();
    d->den = poly_const(Rat(1));
    return d;
  }();
  return z;
}

const ExprPtr& expr_one() {
  static const ExprPtr o = [] {
    auto d = std::make_shared<ExprData>();
    d->num = poly_const(Rat(1));
    d->den = poly_const(Rat(1));
    return d;
  }();
  return o;
}

ExprPtr make_const(const Rat& c) {
  if (c == 0) return expr_zero();
  auto d = std::make_shared<ExprData>();
  d->num = poly_const(c);
  d->den = poly_const(Rat(1));
  return d;
}

ExprPtr make_ratio(ContextPtr ctx, Poly num, Poly den) {
  normalize_pair(ctx.get(), num, den);
  auto d = std::make_shared<ExprData>();
  d->ctx = num.is_constant() && den.is_constant() ? nullptr : std::move(ctx);
  d->num = std::move(num);
  d->den = std::move(den);
  return d;
}

ContextPtr unify_ctx(const ExprPtr& a, const ExprPtr& b) {
  if (a->ctx && b->ctx && a->ctx != b->ctx)
    throw context_error("operation mixes expressions from different contexts");
  return a->ctx ? a->ctx : b->ctx;
}

bool expr_is_zero(const ExprPtr& a) { return a->num.is_zero(); }

ExprPtr expr_add(const ExprPtr& a, const ExprPtr& b) {
  ContextPtr ctx = unify_ctx(a, b);
  const JetContext* c = ctx.get();
  if (expr_is_zero(a)) return b;
  if (expr_is_zero(b)) return a;
  if (cmp_poly(c, a->den, b->den) == 0)
    return make_ratio(ctx, poly_add(c, a->num, b->num), a->den);
  // lcm denominator: D1 = G C1, D2 = G C2; result (N1 C2 + N2 C1)/(G C1 C2).
  // Since the operands are reduced and C1, C2 are coprime, every common
  // factor of the new numerator and denominator divides G — so only the
  // (small) gcd against G is ever needed, and none at all when G = 1.
  Poly c1 = a->den, c2 = b->den;
  Poly g = cross_reduce(c, c1, c2);
  Poly num = poly_add(c, poly_mul(c, a->num, c2), poly_mul(c, b->num, c1));
  Poly den = poly_mul(c, a->den, c2);
  if (num.is_zero()) return expr_zero();
  if (!g.is_constant()) {
    Poly shared = cross_reduce(c, num, g);
    if (!shared.is_constant()) den = poly_divide_exact_general(c, den, shared);
  }
  return make_ratio_coprime(ctx, std::move(num), std::move(den));
}

ExprPtr expr_neg(const ExprPtr& a) {
  auto d = std::make_shared<ExprData>(*a);
  d->num = poly_neg(d->num);
  return d;
}

ExprPtr expr_sub(const ExprPtr& a, const ExprPtr& b) { return expr_add(a, expr_neg(b)); }

ExprPtr expr_mul(const ExprPtr& a, const ExprPtr& b) {
  ContextPtr ctx = unify_ctx(a, b);
  const JetContext* c = ctx.get();
  if (expr_is_zero(a) || expr_is_zero(b)) return expr_zero();
  // cross-cancel: the product of reduced, cross-cancelled ratios is reduced
  Poly n1 = a->num, d2 = b->den;
  cross_reduce(c, n1, d2);
  Poly n2 = b->num, d1 = a->den;
  cross_reduce(c, n2, d1);
  Poly num = poly_mul(c, n1, n2);
  Poly den = poly_mul(c, d1, d2);
  return make_ratio_coprime(ctx, std::move(num), std::move(den));
}

ExprPtr expr_div(const ExprPtr& a, const ExprPtr& b) {
  if (expr_is_zero(b)) throw math_error("division by zero expression");
  ContextPtr ctx = unify_ctx(a, b);
  const JetContext* c = ctx.get();
  if (expr_is_zero(a)) return expr_zero();
  Poly n1 = a->num, n2 = b->num;
  cross_reduce(c, n1, n2);
  Poly d1 = a->den, d2 = b->den;
  cross_reduce(c, d2, d1);
  Poly num = poly_mul(c, n1, d2);
  Poly den = poly_mul(c, d1, n2);
  return make_ratio_coprime(ctx, std::move(num), std::move(den));
}

ExprPtr expr_pow(const ExprPtr& a, long k) {
  if (k == 0) return expr_one();
  if (k == 1) return a;
  const JetContext* c = a->ctx.get();
  bool neg = k < 0;
  long kk = neg ? -k : k;
  Poly num = poly_pow(c, a->num, kk);
  Poly den = poly_pow(c, a->den, kk);
  if (neg) std::swap(num, den);
  return make_ratio(a->ctx, std::move(num), std::move(den));
}

}  // namespace detail

using namespace detail;

// --- Expr ----------------------------------------------------------------------

Expr::Expr() : data_(expr_zero()) {}
Expr::Expr(long v) : data_(make_const(Rat(v))) {}
Expr::Expr(const Rat& v) : data_(make_const(v)) {}
Expr::Expr(ExprPtr data) : data_(std::move(data)) {
  if (!data_) data_ = expr_zero();
}

Expr Expr::rational(long num, long den) {
  if (den == 0) throw math_error("rational with zero denominator");
  Rat r(num, den);
  r.canonicalize();
  return Expr(r);
}

Expr operator+(const Expr& a, const Expr& b) { return Expr(expr_add(a.ptr(), b.ptr())); }
Expr operator-(const Expr& a, const Expr& b) { return Expr(expr_sub(a.ptr(), b.ptr())); }
Expr operator*(const Expr& a, const Expr& b) { return Expr(expr_mul(a.ptr(), b.ptr())); }
Expr operator/(const Expr& a, const Expr& b) { return Expr(expr_div(a.ptr(), b.ptr())); }
Expr Expr::operator-() const { return Expr(expr_neg(data_)); }

Expr Expr::pow(long k) const { return Expr(expr_pow(data_, k)); }

Expr Expr::pow(const Rat& k) const {
  if (k.get_den() == 1) {
    if (!k.get_num().fits_slong_p()) throw math_error("pow: exponent overflow");
    return pow(k.get_num().get_si());
  }
  long q = k.get_den().fits_slong_p() ? k.get_den().get_si() : 0;
  long p = k.get_num().fits_slong_p() ? k.get_num().get_si() : 0;
  if (q <= 1 || p == 0) throw math_error("pow: exponent out of range");

  // Rational powers apply factorwise to single-monomial expressions whose
  // factors are plain symbols (plus an exponential part, which absorbs the
  // exponent into its argument).
  auto take_root = [&](const Poly& poly, ContextPtr ctx) -> Poly {
    if (poly.is_constant()) {
      if (poly.is_zero()) {
        if (p < 0) throw math_error("pow: zero to a negative power");
        return poly;
      }
      if (poly.terms[0].second == 1) return poly;
      throw math_error("pow: rational power of a non-unit constant");
    }
    if (poly.terms.size() != 1)
      throw math_error("pow: rational power of a sum is outside the expression class");
    const auto& [m, c] = poly.terms[0];
    if (c != 1) throw math_error("pow: rational power of a non-unit coefficient");
    Mono out;
    JetContext* cx = ctx.get();
    for (auto [atom, exp] : m.factors) {
      const AtomData& d = cx->atom(atom);
      long base_atom = atom;
      long num_e = static_cast<long>(exp) * p;
      long den_e = q;
      if (d.kind == AtomKind::Root) {
        base_atom = d.a;
        den_e *= d.b;
      } else if (d.kind != AtomKind::IndepVar && d.kind != AtomKind::Jet &&
                 d.kind != AtomKind::Param) {
        throw math_error("pow: rational power supported on plain symbols only");
      }
      long g = std::gcd(num_e < 0 ? -num_e : num_e, den_e);
      num_e /= g;
      den_e /= g;
      if (den_e == 1) {
        out.factors.push_back({static_cast<int32_t>(base_atom), static_cast<int32_t>(num_e)});
      } else {
        AtomData rd;
        rd.kind = AtomKind::Root;
        rd.a = static_cast<int32_t>(base_atom);
        rd.b = static_cast<int32_t>(den_e);
        out.factors.push_back({cx->intern_atom(rd), static_cast<int32_t>(num_e)});
      }
    }
    if (m.exp_arg) {
      ExprPtr scaled = expr_mul(make_const(k), m.exp_arg);
      if (!expr_is_zero(scaled)) out.exp_arg = scaled;
    }
    std::sort(out.factors.begin(), out.factors.end(), [&](const auto& x, const auto& y) {
      return cmp_atom(cx, x.first, y.first) < 0;
    });
    Poly r;
    r.terms.push_back({out, Rat(1)});
    return r;
  };

  ContextPtr ctx = context();
  Poly num = take_root(data_->num, ctx);
  Poly den = take_root(data_->den, ctx);
  // negative exponents land in the numerator as negative factor powers; split
  Poly pos_num = poly_const(Rat(1)), pos_den = poly_const(Rat(1));
  auto split = [&](const Poly& poly, Poly& to_num, Poly& to_den) {
    if (poly.is_constant()) {
      to_num = poly_mul(ctx.get(), to_num, poly);
      return;
    }
    Mono mn, md;
    const Mono& m = poly.terms[0].first;
    for (auto [atom, exp] : m.factors)
      (exp > 0 ? mn : md).factors.push_back({atom, exp > 0 ? exp : -exp});
    mn.exp_arg = m.exp_arg;
    Poly pn, pd;
    pn.terms.push_back({mn, poly.terms[0].second});
    pd.terms.push_back({md, Rat(1)});
    to_num = poly_mul(ctx.get(), to_num, pn);
    to_den = poly_mul(ctx.get(), to_den, pd);
  };
  Poly rn = poly_const(Rat(1)), rd = poly_const(Rat(1));
  split(num, rn, rd);
  split(den, rd, rn);
  return Expr(make_ratio(ctx, std::move(rn), std::move(rd)));
}

bool Expr::is_zero() const { return data_->num.is_zero(); }

bool Expr::is_one() const {
  return data_->num.is_constant() && data_->den.is_constant() && !is_zero() &&
         data_->num.terms[0].second == 1 && data_->den.terms[0].second == 1;
}

bool Expr::is_rational_constant() const {
  return data_->num.is_constant() && data_->den.is_constant();
}

std::optional<Rat> Expr::rational_value() const {
  if (!is_rational_constant()) return std::nullopt;
  if (is_zero()) return Rat(0);
  Rat v = data_->num.terms[0].second / data_->den.terms[0].second;
  return v;
}

std::optional<Symbol> Expr::as_symbol() const {
  if (!data_->ctx) return std::nullopt;
  const ExprData& d = *data_;
  if (!d.den.is_constant() || d.den.terms[0].second != 1) return std::nullopt;
  if (d.num.terms.size() != 1 || d.num.terms[0].second != 1) return std::nullopt;
  const Mono& m = d.num.terms[0].first;
  if (m.exp_arg || m.factors.size() != 1 || m.factors[0].second != 1) return std::nullopt;
  return Symbol{d.ctx, m.factors[0].first};
}

bool Expr::identical(const Expr& o) const { return compare(*this, o) == 0; }

int Expr::compare(const Expr& a, const Expr& b) {
  if (a.data_ == b.data_) return 0;
  const JetContext* ca = a.data_->ctx.get();
  const JetContext* cb = b.data_->ctx.get();
  if (ca && cb && ca != cb) return ca < cb ? -1 : 1;  // cross-context: arbitrary but total
  return cmp_expr_ptr(a.data_, b.data_);
}

ContextPtr Expr::context() const { return data_->ctx; }

bool Expr::contains_symbol(const Symbol& s) const {
  if (!s.valid() || !data_->ctx) return false;
  if (s.ctx != data_->ctx) return false;
  return expr_contains_atom_deep(data_->ctx.get(), data_, s.atom);
}

bool Expr::contains_positive_jet() const {
  if (!data_->ctx) return false;
  bool found = false;
  const JetContext* ctx = data_->ctx.get();
  for_each_atom(data_, [&](int32_t a) {
    const AtomData& d = ctx->atom(a);
    if (d.kind == AtomKind::Jet && !d.index.is_zero()) found = true;
  });
  return found;
}

int Expr::max_jet_order() const {
  if (!data_->ctx) return 0;
  int best = 0;
  const JetContext* ctx = data_->ctx.get();
  for_each_atom(data_, [&](int32_t a) {
    const AtomData& d = ctx->atom(a);
    if (d.kind == AtomKind::Jet) best = std::max(best, d.index.order());
  });
  return best;
}

std::vector<Symbol> Expr::jet_symbols() const {
  std::vector<Symbol> out;
  if (!data_->ctx) return out;
  ContextPtr ctx = data_->ctx;
  std::vector<int32_t> ids;
  for_each_atom(data_, [&](int32_t a) {
    const AtomData& d = ctx->atom(a);
    if (d.kind == AtomKind::Jet && !d.index.is_zero()) ids.push_back(a);
  });
  std::sort(ids.begin(), ids.end(),
            [&](int32_t x, int32_t y) { return ctx->compare_atoms(x, y) < 0; });
  ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
  for (int32_t id : ids) out.push_back(Symbol{ctx, id});
  return out;
}

std::vector<int> Expr::function_ids() const {
  std::vector<int> out;
  if (!data_->ctx) return out;
  const JetContext* ctx = data_->ctx.get();
  for_each_atom(data_, [&](int32_t a) {
    const AtomData& d = ctx->atom(a);
    if (d.kind == AtomKind::Func) out.push_back(d.a);
  });
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

// --- constructors ----------------------------------------------------------------

Expr symbol_expr(const Symbol& s) {
  if (!s.valid()) throw context_error("invalid symbol");
  return Expr(make_ratio(s.ctx, poly_atom(s.atom), poly_const(Rat(1))));
}

Expr exp_expr(const Expr& arg) {
  if (arg.is_zero()) return Expr(1);
  return Expr(make_ratio(arg.context(), poly_exp(arg.ptr()), poly_const(Rat(1))));
}

Expr log_expr(const Expr& arg) {
  if (arg.is_zero()) throw math_error("log of zero");
  if (arg.is_one()) return Expr(0);
  // log(exp(E)) = E for a pure exponential monomial
  const ExprData& d = arg.data();
  if (d.den.is_constant() && d.den.terms[0].second == 1 && d.num.terms.size() == 1 &&
      d.num.terms[0].second == 1 && d.num.terms[0].first.factors.empty() &&
      d.num.terms[0].first.exp_arg)
    return Expr(d.num.terms[0].first.exp_arg);
  if (!arg.context()) throw math_error("log of a rational constant is outside the class");
  AtomData ad;
  ad.kind = AtomKind::Log;
  ad.arg = arg.ptr();
  int32_t id = arg.context()->intern_atom(ad);
  return Expr(make_ratio(arg.context(), poly_atom(id), poly_const(Rat(1))));
}

Expr antiderivative(const Expr& integrand, const Symbol& var) {
  if (!var.valid()) throw context_error("antiderivative: invalid variable");
  const AtomData& vd = var.ctx->atom(var.atom);
  if (vd.kind != AtomKind::IndepVar)
    throw math_error("antiderivative variable must be an independent variable");
  if (integrand.is_zero()) return Expr(0);
  if (integrand.context() && integrand.context() != var.ctx)
    throw context_error("antiderivative: mixed contexts");
  AtomData ad;
  ad.kind = AtomKind::Antideriv;
  ad.a = vd.a;
  ad.arg = integrand.is_rational_constant()
               ? make_const(*integrand.rational_value())
               : integrand.ptr();
  int32_t id = var.ctx->intern_atom(ad);
  return Expr(make_ratio(var.ctx, poly_atom(id), poly_const(Rat(1))));
}

// --- JetContext expression factories ----------------------------------------------

Expr JetContext::x(int i) { return symbol_expr(independent(i)); }
Expr JetContext::u(int j) { return symbol_expr(dependent(j)); }
Expr JetContext::jet(int j, const MultiIndex& alpha) { return symbol_expr(jet_symbol(j, alpha)); }
Expr JetContext::param(const std::string& name) { return symbol_expr(parameter(name)); }

Expr JetContext::func(const std::string& name) {
  int id = function_id(name);
  if (id < 0) throw context_error("undeclared function: " + name);
  return func_derivative(name, MultiIndex(static_cast<int>(function_info(id).signature.size())));
}

Expr JetContext::func(const std::string& name, const std::vector<Expr>& args) {
  int id = function_id(name);
  if (id < 0) throw context_error("undeclared function: " + name);
  return func_derivative(name, MultiIndex(static_cast<int>(function_info(id).signature.size())),
                         args);
}

Expr JetContext::func_derivative(const std::string& name, const MultiIndex& deriv) {
  int id = function_id(name);
  if (id < 0) throw context_error("undeclared function: " + name);
  const FunctionInfo& info = function_info(id);
  std::vector<Expr> args;
  args.reserve(info.signature.size());
  for (const auto& s : info.signature) args.push_back(symbol_expr(s));
  return func_derivative(name, deriv, args);
}

Expr JetContext::func_derivative(const std::string& name, const MultiIndex& deriv,
                                 const std::vector<Expr>& args) {
  int id = function_id(name);
  if (id < 0) throw context_error("undeclared function: " + name);
  const FunctionInfo& info = function_info(id);
  if (args.size() != info.signature.size())
    throw context_error("arity mismatch for function " + name + ": expected " +
                        std::to_string(info.signature.size()) + ", got " +
                        std::to_string(args.size()));
  if (deriv.size() != static_cast<int>(info.signature.size()))
    throw context_error("derivative multiindex arity mismatch for function " + name);
  AtomData d;
  d.kind = AtomKind::Func;
  d.a = id;
  d.index = deriv;
  for (const auto& a : args) {
    if (a.context() && a.context().get() != this)
      throw context_error("function argument from a different context: " + name);
    d.args.push_back(a.ptr());
  }
  return Expr(make_ratio(shared_from_this(), poly_atom(intern_atom(d)), poly_const(Rat(1))));
}

}  // namespace qsym
