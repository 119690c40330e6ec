#include <functional>

#include "internal.hpp"

namespace qsym::detail {

// --- comparisons -------------------------------------------------------------

int cmp_rat(const Rat& a, const Rat& b) {
  int c = cmp(a, b);
  return c < 0 ? -1 : (c > 0 ? 1 : 0);
}

int cmp_atom(const JetContext* ctx, int32_t a, int32_t b) {
  if (a == b) return 0;
  return ctx->compare_atoms(a, b);
}

int cmp_expr_ptr(const ExprPtr& a, const ExprPtr& b) {
  if (a == b) return 0;
  if (!a) return -1;
  if (!b) return 1;
  const JetContext* ctx = a->ctx ? a->ctx.get() : b->ctx.get();
  int r = cmp_poly(ctx, a->num, b->num);
  if (r != 0) return r;
  return cmp_poly(ctx, a->den, b->den);
}

// Lexicographic monomial order with smaller atoms more significant: at the
// first differing position, a positive exponent on the smaller atom wins.
// This order is total and compatible with monomial multiplication, which the
// division algorithm relies on.
int cmp_mono(const JetContext* ctx, const Mono& a, const Mono& b) {
  size_t i = 0, k = 0;
  while (i < a.factors.size() && k < b.factors.size()) {
    auto [aa, ea] = a.factors[i];
    auto [ab, eb] = b.factors[k];
    int c = cmp_atom(ctx, aa, ab);
    if (c < 0) return ea > 0 ? 1 : -1;  // a has the more significant atom
    if (c > 0) return eb > 0 ? -1 : 1;
    if (ea != eb) return ea < eb ? -1 : 1;
    ++i;
    ++k;
  }
  if (i < a.factors.size()) return a.factors[i].second > 0 ? 1 : -1;
  if (k < b.factors.size()) return b.factors[k].second > 0 ? -1 : 1;
  // exponential part as tiebreak (total order only; never used for division)
  return cmp_expr_ptr(a.exp_arg, b.exp_arg);
}

int cmp_poly(const JetContext* ctx, const Poly& a, const Poly& b) {
  size_t n = std::min(a.terms.size(), b.terms.size());
  for (size_t i = 0; i < n; ++i) {
    int c = cmp_mono(ctx, a.terms[i].first, b.terms[i].first);
    if (c != 0) return c;
    c = cmp_rat(a.terms[i].second, b.terms[i].second);
    if (c != 0) return c;
  }
  if (a.terms.size() != b.terms.size()) return a.terms.size() < b.terms.size() ? -1 : 1;
  return 0;
}

// --- basic structure ----------------------------------------------------------

Poly poly_zero() { return Poly{}; }

Poly poly_const(const Rat& c) {
  Poly p;
  if (c != 0) p.terms.push_back({Mono{}, c});
  return p;
}

Poly poly_atom(int32_t atom) {
  Poly p;
  Mono m;
  m.factors.push_back({atom, 1});
  p.terms.push_back({m, Rat(1)});
  return p;
}

Poly poly_exp(const ExprPtr& arg) {
  Poly p;
  Mono m;
  m.exp_arg = arg;
  p.terms.push_back({m, Rat(1)});
  return p;
}

Poly poly_add(const JetContext* ctx, const Poly& a, const Poly& b) {
  Poly out;
  out.terms.reserve(a.terms.size() + b.terms.size());
  size_t i = 0, k = 0;
  while (i < a.terms.size() && k < b.terms.size()) {
    int c = cmp_mono(ctx, a.terms[i].first, b.terms[k].first);
    if (c < 0) {
      out.terms.push_back(a.terms[i++]);
    } else if (c > 0) {
      out.terms.push_back(b.terms[k++]);
    } else {
      Rat s = a.terms[i].second + b.terms[k].second;
      if (s != 0) out.terms.push_back({a.terms[i].first, s});
      ++i;
      ++k;
    }
  }
  while (i < a.terms.size()) out.terms.push_back(a.terms[i++]);
  while (k < b.terms.size()) out.terms.push_back(b.terms[k++]);
  return out;
}

Poly poly_neg(const Poly& a) {
  Poly out = a;
  for (auto& t : out.terms) t.second = -t.second;
  return out;
}

Poly poly_scale(const Poly& a, const Rat& c) {
  if (c == 0) return poly_zero();
  Poly out = a;
  for (auto& t : out.terms) t.second *= c;
  return out;
}

Mono mono_mul(const JetContext* ctx, const Mono& a, const Mono& b) {
  Mono out;
  out.factors.reserve(a.factors.size() + b.factors.size());
  size_t i = 0, k = 0;
  while (i < a.factors.size() && k < b.factors.size()) {
    int c = cmp_atom(ctx, a.factors[i].first, b.factors[k].first);
    if (c < 0) {
      out.factors.push_back(a.factors[i++]);
    } else if (c > 0) {
      out.factors.push_back(b.factors[k++]);
    } else {
      int32_t e = a.factors[i].second + b.factors[k].second;
      if (e != 0) out.factors.push_back({a.factors[i].first, e});
      ++i;
      ++k;
    }
  }
  while (i < a.factors.size()) out.factors.push_back(a.factors[i++]);
  while (k < b.factors.size()) out.factors.push_back(b.factors[k++]);
  if (a.exp_arg && b.exp_arg) {
    ExprPtr sum = expr_add(a.exp_arg, b.exp_arg);
    if (!expr_is_zero(sum)) out.exp_arg = sum;
  } else if (a.exp_arg) {
    out.exp_arg = a.exp_arg;
  } else if (b.exp_arg) {
    out.exp_arg = b.exp_arg;
  }
  return out;
}

Poly poly_mul_mono(const JetContext* ctx, const Poly& a, const Mono& m, const Rat& c) {
  if (c == 0) return poly_zero();
  Poly out;
  out.terms.reserve(a.terms.size());
  for (const auto& [ma, ca] : a.terms) out.terms.push_back({mono_mul(ctx, ma, m), ca * c});
  // multiplying by a fixed monomial preserves the order
  return out;
}

Poly poly_mul(const JetContext* ctx, const Poly& a, const Poly& b) {
  if (a.is_zero() || b.is_zero()) return poly_zero();
  std::map<Mono, Rat, MonoLess> acc{MonoLess{ctx}};
  for (const auto& [ma, ca] : a.terms)
    for (const auto& [mb, cb] : b.terms) {
      Mono m = mono_mul(ctx, ma, mb);
      auto [it, fresh] = acc.try_emplace(std::move(m), Rat(0));
      it->second += ca * cb;
    }
  Poly out;
  out.terms.reserve(acc.size());
  for (auto& [m, c] : acc)
    if (c != 0) out.terms.push_back({m, c});
  return out;
}

Poly poly_pow(const JetContext* ctx, const Poly& a, long k) {
  if (k < 0) throw math_error("poly_pow: negative exponent");
  Poly r = poly_const(Rat(1));
  Poly base = a;
  while (k > 0) {
    if (k & 1) r = poly_mul(ctx, r, base);
    k >>= 1;
    if (k > 0) base = poly_mul(ctx, base, base);
  }
  return r;
}

bool poly_has_exp(const Poly& a) {
  for (const auto& t : a.terms)
    if (t.first.exp_arg) return true;
  return false;
}

bool poly_has_atom_kind(const JetContext* ctx, const Poly& a, AtomKind k) {
  for (const auto& t : a.terms)
    for (auto [atom, exp] : t.first.factors)
      if (ctx->atom(atom).kind == k) return true;
  return false;
}

// --- division -----------------------------------------------------------------

namespace {

// Divides monomial a by b; exponents must stay nonnegative.  Quotients of
// min-zero-shifted polynomials never need negative exponents (the minimal
// exponent of a product is the sum of the factors' minima), so strict
// division is complete here and, crucially, terminates.
std::optional<Mono> mono_divide(const JetContext* ctx, const Mono& a, const Mono& b) {
  if (b.exp_arg) return std::nullopt;  // division routed through the lattice
  Mono out;
  size_t i = 0;
  for (auto [atom, exp] : b.factors) {
    while (i < a.factors.size() && cmp_atom(ctx, a.factors[i].first, atom) < 0)
      out.factors.push_back(a.factors[i++]);
    if (i >= a.factors.size() || a.factors[i].first != atom) return std::nullopt;
    int32_t e = a.factors[i].second - exp;
    if (e < 0) return std::nullopt;
    if (e != 0) out.factors.push_back({atom, e});
    ++i;
  }
  while (i < a.factors.size()) out.factors.push_back(a.factors[i++]);
  out.exp_arg = a.exp_arg;
  return out;
}

const Mono& leading_mono(const Poly& p) { return p.terms.back().first; }
const Rat& leading_coeff(const Poly& p) { return p.terms.back().second; }

}  // namespace

std::optional<Poly> poly_divide_exact(const JetContext* ctx, const Poly& a, const Poly& b) {
  if (b.is_zero()) throw math_error("poly_divide_exact: division by zero");
  if (a.is_zero()) return poly_zero();
  for (const auto& t : a.terms)
    if (t.first.exp_arg) return std::nullopt;
  for (const auto& t : b.terms)
    if (t.first.exp_arg) return std::nullopt;
  Poly rem = a;
  Poly quot;
  std::map<Mono, Rat, MonoLess> qacc{MonoLess{ctx}};
  while (!rem.is_zero()) {
    auto qm = mono_divide(ctx, leading_mono(rem), leading_mono(b));
    if (!qm) return std::nullopt;
    Rat qc = leading_coeff(rem) / leading_coeff(b);
    qacc[*qm] += qc;
    rem = poly_add(ctx, rem, poly_neg(poly_mul_mono(ctx, b, *qm, qc)));
  }
  for (auto& [m, c] : qacc)
    if (c != 0) quot.terms.push_back({m, c});
  return quot;
}

// --- content and gcd ------------------------------------------------------------

Poly poly_rat_content(const Poly& p, Rat& content_out) {
  if (p.is_zero()) throw math_error("poly_rat_content: zero polynomial");
  mpz_class num_gcd = 0, den_lcm = 1;
  for (const auto& [m, c] : p.terms) {
    mpz_gcd(num_gcd.get_mpz_t(), num_gcd.get_mpz_t(), c.get_num().get_mpz_t());
    mpz_lcm(den_lcm.get_mpz_t(), den_lcm.get_mpz_t(), c.get_den().get_mpz_t());
  }
  Rat content(num_gcd, den_lcm);
  content.canonicalize();
  if (sgn(leading_coeff(p)) < 0) content = -content;
  content_out = content;
  Poly out = p;
  for (auto& t : out.terms) t.second /= content;
  return out;
}

namespace {

// Main variable for gcd recursion: the atom with the smallest maximal degree
// across both polynomials (fewest pseudo-division steps), ties broken by the
// structural order.  Deterministic.
int32_t main_variable(const JetContext* ctx, const Poly& a, const Poly& b) {
  std::map<int32_t, int> degree;
  auto scan = [&](const Poly& p) {
    for (const auto& t : p.terms)
      for (auto [atom, exp] : t.first.factors) {
        int& d = degree[atom];
        d = std::max(d, static_cast<int>(exp));
      }
  };
  scan(a);
  scan(b);
  int32_t best = -1;
  int best_deg = 0;
  for (auto [atom, deg] : degree) {
    if (best < 0 || deg < best_deg ||
        (deg == best_deg && cmp_atom(ctx, atom, best) < 0)) {
      best = atom;
      best_deg = deg;
    }
  }
  return best;
}

int degree_in(const JetContext* ctx, const Poly& p, int32_t v) {
  int deg = 0;
  for (const auto& t : p.terms)
    for (auto [atom, exp] : t.first.factors)
      if (atom == v) deg = std::max(deg, static_cast<int>(exp));
  return deg;
}

// Coefficient of v^k, as a polynomial free of v.
Poly coeff_in(const JetContext* ctx, const Poly& p, int32_t v, int k) {
  Poly out;
  for (const auto& [m, c] : p.terms) {
    int e = 0;
    Mono rest;
    rest.exp_arg = m.exp_arg;
    for (auto [atom, exp] : m.factors) {
      if (atom == v)
        e = exp;
      else
        rest.factors.push_back({atom, exp});
    }
    if (e == k) out.terms.push_back({rest, c});
  }
  std::sort(out.terms.begin(), out.terms.end(), [&](const auto& x, const auto& y) {
    return cmp_mono(ctx, x.first, y.first) < 0;
  });
  return out;
}

Poly times_var_pow(const JetContext* ctx, const Poly& p, int32_t v, int k) {
  if (k == 0) return p;
  Mono m;
  m.factors.push_back({v, k});
  return poly_mul_mono(ctx, p, m, Rat(1));
}

Poly gcd_primitive(const JetContext* ctx, Poly a, Poly b);

// GCD of all v-coefficients of p.
Poly content_in(const JetContext* ctx, const Poly& p, int32_t v) {
  Poly g = poly_zero();
  int d = degree_in(ctx, p, v);
  for (int k = 0; k <= d; ++k) {
    Poly c = coeff_in(ctx, p, v, k);
    if (c.is_zero()) continue;
    g = g.is_zero() ? c : gcd_primitive(ctx, g, c);
    if (g.is_constant()) break;
  }
  return g;
}

// Pseudo-remainder of a by b in the variable v (both with deg_v(b) >= 1).
Poly prem_in(const JetContext* ctx, Poly a, const Poly& b, int32_t v) {
  int db = degree_in(ctx, b, v);
  Poly lb = coeff_in(ctx, b, v, db);
  int guard = 0;
  while (true) {
    int da = degree_in(ctx, a, v);
    if (a.is_zero() || da < db) return a;
    Poly la = coeff_in(ctx, a, v, da);
    // a := lb*a - la*v^(da-db)*b
    Poly t1 = poly_mul(ctx, lb, a);
    Poly t2 = poly_mul(ctx, la, times_var_pow(ctx, b, v, da - db));
    a = poly_add(ctx, t1, poly_neg(t2));
    if (++guard > 10000) throw math_error("prem_in: runaway pseudo-division");
  }
}

Poly normalize_unit(const Poly& p) {
  if (p.is_zero()) return p;
  Rat c;
  return poly_rat_content(p, c);
}

Poly gcd_primitive(const JetContext* ctx, Poly a, Poly b);

// --- heuristic gcd (evaluate / integer-gcd / reconstruct / verify) -------------
//
// Evaluating one variable at a large integer reduces the problem by a
// dimension; the candidate is recovered by xi-adic expansion with symmetric
// residues and verified by exact trial division, so the heuristic is sound.
// The recursive-content PRS below remains as the (rarely needed) fallback.

mpz_class poly_height(const Poly& p) {
  mpz_class h = 1;
  for (const auto& [m, c] : p.terms) {
    mpz_class a = abs(c.get_num());
    if (a > h) h = a;
  }
  return h;
}

Poly eval_at(const JetContext* ctx, const Poly& p, int32_t v, const mpz_class& xi) {
  std::map<Mono, Rat, MonoLess> acc{MonoLess{ctx}};
  for (const auto& [m, c] : p.terms) {
    int e = 0;
    Mono rest;
    rest.exp_arg = m.exp_arg;
    for (auto [atom, exp] : m.factors) {
      if (atom == v)
        e = exp;
      else
        rest.factors.push_back({atom, exp});
    }
    Rat val = c;
    if (e > 0) {
      mpz_class pw;
      mpz_pow_ui(pw.get_mpz_t(), xi.get_mpz_t(), static_cast<unsigned long>(e));
      val *= Rat(pw);
    }
    acc[rest] += val;
  }
  Poly out;
  for (auto& [m, c] : acc)
    if (c != 0) out.terms.push_back({m, c});
  return out;
}

// symmetric residue of an integer rational modulo xi
Rat smod_rat(const Rat& q, const mpz_class& xi) {
  mpz_class r;
  mpz_mod(r.get_mpz_t(), q.get_num().get_mpz_t(), xi.get_mpz_t());
  if (r * 2 > xi) r -= xi;
  return Rat(r);
}

std::optional<Poly> gcd_heuristic(const JetContext* ctx, const Poly& a, const Poly& b,
                                  int32_t v) {
  int deg_bound = std::min(degree_in(ctx, a, v), degree_in(ctx, b, v));
  mpz_class xi = 2 * std::min(poly_height(a), poly_height(b)) + 29;
  // keep nested evaluations from exploding: integer sizes grow like
  // height^(prod degrees), so budget the evaluated coefficient size
  if (mpz_sizeinbase(xi.get_mpz_t(), 2) * static_cast<size_t>(deg_bound + 1) > 120000)
    return std::nullopt;
  for (int attempt = 0; attempt < 6; ++attempt, xi = xi * 3 + 7) {
    Poly ea = eval_at(ctx, a, v, xi);
    Poly eb = eval_at(ctx, b, v, xi);
    if (ea.is_zero() || eb.is_zero()) continue;
    Poly gamma = gcd_primitive(ctx, normalize_unit(ea), normalize_unit(eb));
    // reconstruct by xi-adic expansion
    Poly g = poly_zero();
    bool ok = true;
    for (int i = 0; !gamma.is_zero(); ++i) {
      if (i > deg_bound) {
        ok = false;
        break;
      }
      Poly c;
      for (const auto& [m, cf] : gamma.terms) {
        Rat r = smod_rat(cf, xi);
        if (r != 0) c.terms.push_back({m, r});
      }
      if (!c.is_zero()) g = poly_add(ctx, g, times_var_pow(ctx, c, v, i));
      gamma = poly_add(ctx, gamma, poly_neg(c));
      for (auto& [m, cf] : gamma.terms) cf /= Rat(xi);
      Poly tmp;
      for (auto& [m, cf] : gamma.terms)
        if (cf != 0) tmp.terms.push_back({m, cf});
      gamma = std::move(tmp);
    }
    if (!ok || g.is_zero()) continue;
    g = normalize_unit(g);
    if (g.is_constant()) return poly_const(Rat(1));
    if (poly_divide_exact(ctx, a, g) && poly_divide_exact(ctx, b, g)) return g;
  }
  return std::nullopt;
}

// Common power product across all terms: componentwise minimum exponents.
Mono mono_content(const JetContext* ctx, const Poly& p) {
  Mono content = p.terms[0].first;
  content.exp_arg = nullptr;
  for (size_t i = 1; i < p.terms.size() && !content.factors.empty(); ++i) {
    const auto& mf = p.terms[i].first.factors;
    std::vector<std::pair<int32_t, int32_t>> next;
    size_t j = 0, k = 0;
    while (j < content.factors.size() && k < mf.size()) {
      int c = cmp_atom(ctx, content.factors[j].first, mf[k].first);
      if (c == 0) {
        next.push_back(
            {content.factors[j].first, std::min(content.factors[j].second, mf[k].second)});
        ++j;
        ++k;
      } else if (c < 0) {
        ++j;  // atom absent from this term: drops out of the content
      } else {
        ++k;
      }
    }
    content.factors = std::move(next);
  }
  return content;
}

Poly strip_mono(const JetContext* ctx, const Poly& p, const Mono& content) {
  if (content.factors.empty()) return p;
  Poly out;
  out.terms.reserve(p.terms.size());
  for (const auto& [m, c] : p.terms) {
    auto q = mono_divide(ctx, m, content);
    out.terms.push_back({*q, c});
  }
  return out;
}

Poly gcd_primitive(const JetContext* ctx, Poly a, Poly b) {
  a = normalize_unit(a);
  b = normalize_unit(b);
  if (a.is_zero()) return b;
  if (b.is_zero()) return a;
  if (cmp_poly(ctx, a, b) == 0) return a;
  if (a.is_constant() || b.is_constant()) return poly_const(Rat(1));
  // monomial content: strip the common power product first, it collapses the
  // essential degrees (exp-lattice polynomials often carry large ones)
  Mono mca = mono_content(ctx, a);
  Mono mcb = mono_content(ctx, b);
  if (!mca.factors.empty() || !mcb.factors.empty()) {
    Mono cg;
    size_t j = 0, k = 0;
    while (j < mca.factors.size() && k < mcb.factors.size()) {
      int c = cmp_atom(ctx, mca.factors[j].first, mcb.factors[k].first);
      if (c == 0) {
        cg.factors.push_back({mca.factors[j].first,
                              std::min(mca.factors[j].second, mcb.factors[k].second)});
        ++j;
        ++k;
      } else if (c < 0) {
        ++j;
      } else {
        ++k;
      }
    }
    Poly g = gcd_primitive(ctx, strip_mono(ctx, a, mca), strip_mono(ctx, b, mcb));
    if (!cg.factors.empty()) {
      g = poly_mul_mono(ctx, g, cg, Rat(1));
      std::sort(g.terms.begin(), g.terms.end(),
                [&](const auto& x, const auto& y) { return cmp_mono(ctx, x.first, y.first) < 0; });
    }
    return g;
  }
  // quick divisibility checks
  if (poly_divide_exact(ctx, a, b)) return b;
  if (poly_divide_exact(ctx, b, a)) return a;
  int32_t v = main_variable(ctx, a, b);
  if (v < 0) return poly_const(Rat(1));
  int da = degree_in(ctx, a, v), db = degree_in(ctx, b, v);
  if (da == 0 || db == 0) {
    // v absent from one side: gcd divides that side's v-content
    Poly ca = da == 0 ? a : content_in(ctx, a, v);
    Poly cb = db == 0 ? b : content_in(ctx, b, v);
    return gcd_primitive(ctx, ca, cb);
  }
  if (auto h = gcd_heuristic(ctx, a, b, v)) return *h;

  Poly ca = content_in(ctx, a, v);
  Poly cb = content_in(ctx, b, v);
  Poly c = gcd_primitive(ctx, ca, cb);
  Poly pa = *poly_divide_exact(ctx, a, ca);
  Poly pb = *poly_divide_exact(ctx, b, cb);
  if (degree_in(ctx, pa, v) < degree_in(ctx, pb, v)) std::swap(pa, pb);
  // primitive PRS
  int guard = 0;
  while (!pb.is_zero()) {
    Poly r = prem_in(ctx, pa, pb, v);
    pa = pb;
    if (r.is_zero()) {
      pb = poly_zero();
      break;
    }
    Poly rc = content_in(ctx, r, v);
    pb = normalize_unit(*poly_divide_exact(ctx, r, rc));
    if (++guard > 1000) throw math_error("gcd_primitive: runaway PRS");
  }
  Poly g = pa;
  Poly gc = content_in(ctx, g, v);
  g = normalize_unit(*poly_divide_exact(ctx, g, gc));
  Poly result = poly_mul(ctx, c, g);
  // the PRS result is only guaranteed up to factors for the primitive parts;
  // verify and fall back to the trivial gcd if division fails
  if (!poly_divide_exact(ctx, a, result) || !poly_divide_exact(ctx, b, result))
    return poly_mul(ctx, c, poly_const(Rat(1)));
  return normalize_unit(result);
}

}  // namespace

Poly poly_gcd(const JetContext* ctx, const Poly& a, const Poly& b) {
  if (a.is_zero()) return normalize_unit(b);
  if (b.is_zero()) return normalize_unit(a);
  if (poly_has_exp(a) || poly_has_exp(b))
    throw math_error("poly_gcd: exponential parts must be lattice-embedded first");
  return gcd_primitive(ctx, a, b);
}

// --- traversal ------------------------------------------------------------------

namespace {

void for_each_atom_poly(const Poly& p, const std::function<void(int32_t)>& fn,
                        const std::function<void(const ExprPtr&)>& rec) {
  for (const auto& [m, c] : p.terms) {
    for (auto [atom, exp] : m.factors) fn(atom);
    if (m.exp_arg) rec(m.exp_arg);
  }
}

}  // namespace

void for_each_atom(const ExprPtr& e, const std::function<void(int32_t)>& fn) {
  if (!e || !e->ctx) return;
  const JetContext* ctx = e->ctx.get();
  std::function<void(const ExprPtr&)> rec = [&](const ExprPtr& sub) {
    if (!sub) return;
    auto fn_deep = [&](int32_t atom) {
      fn(atom);
      const AtomData& d = ctx->atom(atom);
      if (d.arg) rec(d.arg);
      for (const auto& a : d.args) rec(a);
      if (d.kind == AtomKind::Root) fn(d.a);
    };
    for_each_atom_poly(sub->num, fn_deep, rec);
    for_each_atom_poly(sub->den, fn_deep, rec);
  };
  rec(e);
}

void for_each_top_atom(const ExprPtr& e, const std::function<void(int32_t)>& fn) {
  if (!e) return;
  auto noop = [](const ExprPtr&) {};
  for_each_atom_poly(e->num, fn, noop);
  for_each_atom_poly(e->den, fn, noop);
}

bool expr_contains_atom_deep(const JetContext* ctx, const ExprPtr& e, int32_t atom) {
  bool found = false;
  for_each_atom(e, [&](int32_t a) {
    if (a == atom) found = true;
  });
  return found;
}

}  // namespace qsym::detail
