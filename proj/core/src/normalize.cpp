// Canonical reduction of polynomial ratios.
//
// Exponential parts are handled by embedding the occurring exp arguments into
// an integer lattice: a deterministic Gaussian elimination over the rational
// span of the arguments yields a basis, every monomial's exp part becomes an
// integer exponent vector over internal ExpVar atoms, and ordinary polynomial
// gcd applies.  The embedding is local to one reduction and never leaks into
// canonical forms.

#include <map>
#include <set>

#include "internal.hpp"

namespace qsym::detail {

namespace {

// --- root-atom closure ---------------------------------------------------------
//
// Rational powers of symbols are carried by Root atoms.  Canonical forms keep,
// per base symbol, a single root index q, and when a root is present the bare
// base never appears (t and t^(1/2) combine into Root(t,2)^2 and Root(t,2)).
// After reduction, indices are lowered again where possible.

long gcd_long(long a, long b) {
  while (b) {
    long t = a % b;
    a = b;
    b = t;
  }
  return a < 0 ? -a : a;
}

long lcm_long(long a, long b) { return a / gcd_long(a, b) * b; }

bool collect_roots(const JetContext* ctx, const Poly& p, std::map<int32_t, long>& q_of_base) {
  bool any = false;
  for (const auto& [m, c] : p.terms)
    for (auto [atom, exp] : m.factors) {
      const AtomData& d = ctx->atom(atom);
      if (d.kind == AtomKind::Root) {
        any = true;
        long& q = q_of_base[d.a];
        q = q == 0 ? d.b : lcm_long(q, d.b);
      }
    }
  return any;
}

Poly rewrite_roots(JetContext* ctx, const Poly& p, const std::map<int32_t, long>& q_of_base) {
  Poly out;
  out.terms.reserve(p.terms.size());
  for (const auto& [m, c] : p.terms) {
    Mono nm;
    nm.exp_arg = m.exp_arg;
    std::map<int32_t, long> exps;  // atom -> exponent (after rewrite)
    auto add = [&](int32_t atom, long e) { exps[atom] += e; };
    for (auto [atom, exp] : m.factors) {
      const AtomData& d = ctx->atom(atom);
      if (d.kind == AtomKind::Root) {
        auto it = q_of_base.find(d.a);
        long q = it->second;
        AtomData rd;
        rd.kind = AtomKind::Root;
        rd.a = d.a;
        rd.b = static_cast<int32_t>(q);
        add(ctx->intern_atom(rd), exp * (q / d.b));
      } else if (q_of_base.count(atom)) {
        long q = q_of_base.at(atom);
        AtomData rd;
        rd.kind = AtomKind::Root;
        rd.a = atom;
        rd.b = static_cast<int32_t>(q);
        add(ctx->intern_atom(rd), exp * q);
      } else {
        add(atom, exp);
      }
    }
    for (auto [atom, e] : exps)
      if (e != 0) nm.factors.push_back({atom, static_cast<int32_t>(e)});
    std::sort(nm.factors.begin(), nm.factors.end(),
              [&](const auto& x, const auto& y) { return cmp_atom(ctx, x.first, y.first) < 0; });
    out.terms.push_back({nm, c});
  }
  std::sort(out.terms.begin(), out.terms.end(),
            [&](const auto& x, const auto& y) { return cmp_mono(ctx, x.first, y.first) < 0; });
  return out;
}

// Lowers root indices where all exponents share a factor with q; restores the
// bare base when the index drops to 1.
void cleanup_roots(JetContext* ctx, Poly& num, Poly& den) {
  std::map<int32_t, long> exp_gcd;  // base atom -> gcd of exponents (with q)
  std::map<int32_t, long> q_of_base;
  auto scan = [&](const Poly& p) {
    for (const auto& [m, c] : p.terms)
      for (auto [atom, exp] : m.factors) {
        const AtomData& d = ctx->atom(atom);
        if (d.kind != AtomKind::Root) continue;
        q_of_base[d.a] = d.b;
        long& g = exp_gcd[d.a];
        g = gcd_long(g == 0 ? d.b : g, gcd_long(exp, d.b));
      }
  };
  scan(num);
  scan(den);
  std::map<int32_t, long> new_q;
  bool any = false;
  for (auto [base, g] : exp_gcd)
    if (g > 1) {
      new_q[base] = q_of_base[base] / g;
      any = true;
    }
  if (!any) return;
  auto rewrite = [&](Poly& p) {
    Poly out;
    out.terms.reserve(p.terms.size());
    for (auto& [m, c] : p.terms) {
      Mono nm;
      nm.exp_arg = m.exp_arg;
      for (auto [atom, exp] : m.factors) {
        const AtomData& d = ctx->atom(atom);
        auto it = d.kind == AtomKind::Root ? new_q.find(d.a) : new_q.end();
        if (it == new_q.end()) {
          nm.factors.push_back({atom, exp});
          continue;
        }
        long g = exp_gcd[d.a];
        long q2 = it->second;
        if (q2 <= 1) {
          nm.factors.push_back({d.a, static_cast<int32_t>(exp / g)});
        } else {
          AtomData rd;
          rd.kind = AtomKind::Root;
          rd.a = d.a;
          rd.b = static_cast<int32_t>(q2);
          nm.factors.push_back({ctx->intern_atom(rd), static_cast<int32_t>(exp / g)});
        }
      }
      std::sort(nm.factors.begin(), nm.factors.end(),
                [&](const auto& x, const auto& y) { return cmp_atom(ctx, x.first, y.first) < 0; });
      out.terms.push_back({nm, c});
    }
    std::sort(out.terms.begin(), out.terms.end(),
              [&](const auto& x, const auto& y) { return cmp_mono(ctx, x.first, y.first) < 0; });
    p = out;
  };
  rewrite(num);
  rewrite(den);
}

// --- exp lattice ------------------------------------------------------------------

// A sparse rational vector over canonical "slot" expressions; used to Gaussian-
// eliminate exp arguments.  Components are keyed by an index into a slot table.
using Vec = std::map<size_t, Rat>;

struct Lattice {
  std::vector<ExprPtr> args;              // distinct exp arguments, sorted
  std::vector<std::vector<Rat>> coords;   // per arg: rational coords over basis
  std::vector<ExprPtr> scaled_basis;      // basis elements divided by scale M
  std::vector<int32_t> zatoms;            // interned ExpVar atoms for the basis
  std::vector<std::vector<long>> zcoords; // per arg: integer coords
};

// Decomposes the distinct args into a rational basis.  Args are rational
// functions; bringing everything over a common denominator turns them into
// plain polynomials = sparse vectors over monomials.
Lattice build_lattice(JetContext* ctx, std::vector<ExprPtr> args) {
  std::sort(args.begin(), args.end(),
            [](const ExprPtr& a, const ExprPtr& b) { return cmp_expr_ptr(a, b) < 0; });
  args.erase(std::unique(args.begin(), args.end(),
                         [](const ExprPtr& a, const ExprPtr& b) { return cmp_expr_ptr(a, b) == 0; }),
             args.end());
  Lattice lat;
  lat.args = args;

  // common denominator
  Poly common_den = poly_const(Rat(1));
  for (const auto& a : args) {
    if (poly_has_exp(a->num) || poly_has_exp(a->den))
      throw math_error("nested exponentials in exp arguments are outside the expression class");
    Poly g = poly_gcd(ctx, common_den, a->den);
    auto q = poly_divide_exact(ctx, a->den, g);
    common_den = poly_mul(ctx, common_den, *q);
  }

  // args as polynomial vectors
  std::vector<Poly> vecs;
  vecs.reserve(args.size());
  for (const auto& a : args) {
    auto cofactor = poly_divide_exact(ctx, common_den, a->den);
    vecs.push_back(poly_mul(ctx, a->num, *cofactor));
  }

  // Gaussian elimination, deterministic: pivot on the largest monomial.
  std::vector<Poly> basis;  // reduced rows, monic at their pivot
  for (size_t i = 0; i < vecs.size(); ++i) {
    Poly v = vecs[i];
    std::vector<Rat> coord(basis.size(), Rat(0));
    for (size_t bi = 0; bi < basis.size(); ++bi) {
      if (v.is_zero()) break;
      const Mono& pivot = basis[bi].terms.back().first;
      Rat c(0);
      for (const auto& [m, cc] : v.terms)
        if (cmp_mono(ctx, m, pivot) == 0) {
          c = cc;
          break;
        }
      if (c != 0) {
        v = poly_add(ctx, v, poly_neg(poly_scale(basis[bi], c)));
        coord[bi] = c;
      }
    }
    if (!v.is_zero()) {
      Rat lead = v.terms.back().second;
      basis.push_back(poly_scale(v, Rat(1) / lead));
      coord.push_back(lead);
    }
    lat.coords.push_back(std::move(coord));
  }
  for (auto& c : lat.coords) c.resize(basis.size(), Rat(0));

  // integer scale per basis direction: M = lcm of coordinate denominators
  std::vector<mpz_class> scales(basis.size(), mpz_class(1));
  for (size_t bi = 0; bi < basis.size(); ++bi)
    for (const auto& c : lat.coords)
      mpz_lcm(scales[bi].get_mpz_t(), scales[bi].get_mpz_t(),
              c[bi].get_den().get_mpz_t());

  for (size_t bi = 0; bi < basis.size(); ++bi) {
    Rat inv_scale(1, scales[bi]);
    inv_scale.canonicalize();
    Poly num = poly_scale(basis[bi], inv_scale);
    Poly den = common_den;
    normalize_pair(ctx, num, den);
    auto data = std::make_shared<ExprData>();
    data->ctx = ctx->shared_from_this();
    data->num = std::move(num);
    data->den = std::move(den);
    lat.scaled_basis.push_back(data);
    AtomData zd;
    zd.kind = AtomKind::ExpVar;
    zd.arg = lat.scaled_basis.back();
    lat.zatoms.push_back(ctx->intern_atom(zd));
  }
  for (size_t ai = 0; ai < lat.coords.size(); ++ai) {
    std::vector<long> zc(basis.size(), 0);
    for (size_t bi = 0; bi < basis.size(); ++bi) {
      Rat z = lat.coords[ai][bi] * Rat(scales[bi]);
      z.canonicalize();
      if (z.get_den() != 1) throw math_error("exp lattice: non-integer coordinate");
      if (!z.get_num().fits_slong_p()) throw math_error("exp lattice: coordinate overflow");
      zc[bi] = z.get_num().get_si();
    }
    lat.zcoords.push_back(std::move(zc));
  }
  return lat;
}

int arg_index(const Lattice& lat, const ExprPtr& arg) {
  for (size_t i = 0; i < lat.args.size(); ++i)
    if (cmp_expr_ptr(lat.args[i], arg) == 0) return static_cast<int>(i);
  return -1;
}

Poly to_zspace(JetContext* ctx, const Poly& p, const Lattice& lat) {
  Poly out;
  out.terms.reserve(p.terms.size());
  for (const auto& [m, c] : p.terms) {
    Mono nm;
    nm.factors = m.factors;
    if (m.exp_arg) {
      int ai = arg_index(lat, m.exp_arg);
      if (ai < 0) throw math_error("exp lattice: unknown argument");
      for (size_t bi = 0; bi < lat.zatoms.size(); ++bi) {
        long e = lat.zcoords[static_cast<size_t>(ai)][bi];
        if (e != 0) nm.factors.push_back({lat.zatoms[bi], static_cast<int32_t>(e)});
      }
      std::sort(nm.factors.begin(), nm.factors.end(),
                [&](const auto& x, const auto& y) { return cmp_atom(ctx, x.first, y.first) < 0; });
    }
    out.terms.push_back({nm, c});
  }
  std::sort(out.terms.begin(), out.terms.end(),
            [&](const auto& x, const auto& y) { return cmp_mono(ctx, x.first, y.first) < 0; });
  return out;
}

Poly from_zspace(JetContext* ctx, const Poly& p, const Lattice& lat) {
  Poly out;
  out.terms.reserve(p.terms.size());
  for (const auto& [m, c] : p.terms) {
    Mono nm;
    ExprPtr arg;  // accumulated exp argument
    for (auto [atom, exp] : m.factors) {
      const AtomData& d = ctx->atom(atom);
      if (d.kind == AtomKind::ExpVar) {
        ExprPtr contrib = exp == 1 ? d.arg : expr_mul(make_const(Rat(exp)), d.arg);
        arg = arg ? expr_add(arg, contrib) : contrib;
      } else {
        nm.factors.push_back({atom, exp});
      }
    }
    if (m.exp_arg) arg = arg ? expr_add(arg, m.exp_arg) : m.exp_arg;
    if (arg && !expr_is_zero(arg)) nm.exp_arg = arg;
    out.terms.push_back({nm, c});
  }
  std::sort(out.terms.begin(), out.terms.end(),
            [&](const auto& x, const auto& y) { return cmp_mono(ctx, x.first, y.first) < 0; });
  // terms with equal monomials cannot appear: distinct z-vectors map to
  // distinct exp arguments
  return out;
}

// Shifts both polynomials by the common per-ExpVar minimum so that exponents
// are nonnegative; ratio-preserving.
void laurent_shift_joint(JetContext* ctx, Poly& a, Poly& b) {
  std::map<int32_t, long> mins;
  auto scan = [&](const Poly& p) {
    for (const auto& [m, c] : p.terms) {
      std::map<int32_t, long> present;
      for (auto [atom, exp] : m.factors)
        if (ctx->atom(atom).kind == AtomKind::ExpVar) present[atom] = exp;
      for (auto& [atom, mn] : mins)
        mn = std::min(mn, present.count(atom) ? present[atom] : 0L);
      for (auto [atom, exp] : present)
        if (!mins.count(atom)) mins[atom] = std::min(exp, 0L);
    }
  };
  // initialize with all z atoms appearing anywhere
  auto init = [&](const Poly& p) {
    for (const auto& [m, c] : p.terms)
      for (auto [atom, exp] : m.factors)
        if (ctx->atom(atom).kind == AtomKind::ExpVar && !mins.count(atom))
          mins[atom] = exp;
  };
  init(a);
  init(b);
  scan(a);
  scan(b);
  Mono shift;
  for (auto [atom, mn] : mins)
    if (mn != 0) shift.factors.push_back({atom, static_cast<int32_t>(-mn)});
  if (shift.factors.empty()) return;
  std::sort(shift.factors.begin(), shift.factors.end(),
            [&](const auto& x, const auto& y) { return cmp_atom(ctx, x.first, y.first) < 0; });
  a = poly_mul_mono(ctx, a, shift, Rat(1));
  b = poly_mul_mono(ctx, b, shift, Rat(1));
  auto resort = [&](Poly& p) {
    std::sort(p.terms.begin(), p.terms.end(),
              [&](const auto& x, const auto& y) { return cmp_mono(ctx, x.first, y.first) < 0; });
  };
  resort(a);
  resort(b);
}

// Shifts one polynomial to per-ExpVar minimum zero; returns the inverse
// monomial (applying it undoes the shift).
Mono laurent_shift_single(JetContext* ctx, Poly& p) {
  std::map<int32_t, long> mins;
  bool first = true;
  for (const auto& [m, c] : p.terms) {
    std::map<int32_t, long> present;
    for (auto [atom, exp] : m.factors)
      if (ctx->atom(atom).kind == AtomKind::ExpVar) present[atom] = exp;
    if (first) {
      mins = present;
      first = false;
    } else {
      for (auto& [atom, mn] : mins)
        mn = std::min(mn, present.count(atom) ? present[atom] : 0L);
      for (auto [atom, exp] : present)
        if (!mins.count(atom)) mins[atom] = std::min(exp, 0L);
    }
  }
  Mono shift, unshift;
  for (auto [atom, mn] : mins)
    if (mn != 0) {
      shift.factors.push_back({atom, static_cast<int32_t>(-mn)});
      unshift.factors.push_back({atom, static_cast<int32_t>(mn)});
    }
  if (shift.factors.empty()) return unshift;
  auto by_atom = [&](const auto& x, const auto& y) { return cmp_atom(ctx, x.first, y.first) < 0; };
  std::sort(shift.factors.begin(), shift.factors.end(), by_atom);
  std::sort(unshift.factors.begin(), unshift.factors.end(), by_atom);
  p = poly_mul_mono(ctx, p, shift, Rat(1));
  std::sort(p.terms.begin(), p.terms.end(),
            [&](const auto& x, const auto& y) { return cmp_mono(ctx, x.first, y.first) < 0; });
  return unshift;
}

// Shifts the pair so the denominator has per-ExpVar minimum exponent zero.
void pin_denominator_exp(JetContext* ctx, Poly& num, Poly& den) {
  std::map<int32_t, long> mins;
  bool first = true;
  for (const auto& [m, c] : den.terms) {
    std::map<int32_t, long> present;
    for (auto [atom, exp] : m.factors)
      if (ctx->atom(atom).kind == AtomKind::ExpVar) present[atom] = exp;
    if (first) {
      mins = present;
      first = false;
    } else {
      for (auto& [atom, mn] : mins)
        mn = std::min(mn, present.count(atom) ? present[atom] : 0L);
      for (auto [atom, exp] : present)
        if (!mins.count(atom)) mins[atom] = std::min(exp, 0L);
    }
  }
  Mono shift;
  for (auto [atom, mn] : mins)
    if (mn != 0) shift.factors.push_back({atom, static_cast<int32_t>(-mn)});
  if (shift.factors.empty()) return;
  std::sort(shift.factors.begin(), shift.factors.end(),
            [&](const auto& x, const auto& y) { return cmp_atom(ctx, x.first, y.first) < 0; });
  num = poly_mul_mono(ctx, num, shift, Rat(1));
  den = poly_mul_mono(ctx, den, shift, Rat(1));
  auto resort = [&](Poly& p) {
    std::sort(p.terms.begin(), p.terms.end(),
              [&](const auto& x, const auto& y) { return cmp_mono(ctx, x.first, y.first) < 0; });
  };
  resort(num);
  resort(den);
}

}  // namespace

Poly cross_reduce(const JetContext* cctx, Poly& a, Poly& b) {
  JetContext* ctx = const_cast<JetContext*>(cctx);
  if (a.is_zero() || b.is_zero()) return poly_const(Rat(1));
  if (a.is_constant() || b.is_constant()) return poly_const(Rat(1));
  bool exp_present = poly_has_exp(a) || poly_has_exp(b);
  if (!exp_present) {
    Poly g = poly_gcd(ctx, a, b);
    if (!g.is_constant()) {
      a = *poly_divide_exact(ctx, a, g);
      b = *poly_divide_exact(ctx, b, g);
    }
    return g;
  }
  // lattice-embed; shift each side to min-zero independently and undo after
  std::vector<ExprPtr> args;
  auto gather = [&](const Poly& p) {
    for (const auto& [m, c] : p.terms)
      if (m.exp_arg) args.push_back(m.exp_arg);
  };
  gather(a);
  gather(b);
  Lattice lat = build_lattice(ctx, std::move(args));
  Poly za = to_zspace(ctx, a, lat);
  Poly zb = to_zspace(ctx, b, lat);
  Mono unshift_a = laurent_shift_single(ctx, za);
  Mono unshift_b = laurent_shift_single(ctx, zb);
  Poly g = poly_gcd(ctx, za, zb);
  if (!g.is_constant()) {
    za = *poly_divide_exact(ctx, za, g);
    zb = *poly_divide_exact(ctx, zb, g);
  }
  za = poly_mul_mono(ctx, za, unshift_a, Rat(1));
  zb = poly_mul_mono(ctx, zb, unshift_b, Rat(1));
  auto resort = [&](Poly& p) {
    std::sort(p.terms.begin(), p.terms.end(),
              [&](const auto& x, const auto& y) { return cmp_mono(ctx, x.first, y.first) < 0; });
  };
  resort(za);
  resort(zb);
  a = from_zspace(ctx, za, lat);
  b = from_zspace(ctx, zb, lat);
  return from_zspace(ctx, g, lat);
}

Poly poly_divide_exact_general(const JetContext* cctx, const Poly& a, const Poly& b) {
  JetContext* ctx = const_cast<JetContext*>(cctx);
  if (!poly_has_exp(a) && !poly_has_exp(b)) {
    auto q = poly_divide_exact(ctx, a, b);
    if (!q) throw math_error("poly_divide_exact_general: not divisible");
    return *q;
  }
  std::vector<ExprPtr> args;
  auto gather = [&](const Poly& p) {
    for (const auto& [m, c] : p.terms)
      if (m.exp_arg) args.push_back(m.exp_arg);
  };
  gather(a);
  gather(b);
  Lattice lat = build_lattice(ctx, std::move(args));
  Poly za = to_zspace(ctx, a, lat);
  Poly zb = to_zspace(ctx, b, lat);
  Mono ua = laurent_shift_single(ctx, za);  // za = a * Z^(-ma), ua = Z^(+ma)
  Mono ub = laurent_shift_single(ctx, zb);
  auto q = poly_divide_exact(ctx, za, zb);
  if (!q) throw math_error("poly_divide_exact_general: not divisible");
  // a/b = q * Z^(ma - mb): apply ua and the inverse of ub
  Mono inv_ub;
  for (auto [atom, e] : ub.factors) inv_ub.factors.push_back({atom, -e});
  Poly out = poly_mul_mono(ctx, *q, ua, Rat(1));
  out = poly_mul_mono(ctx, out, inv_ub, Rat(1));
  std::sort(out.terms.begin(), out.terms.end(),
            [&](const auto& x, const auto& y) { return cmp_mono(ctx, x.first, y.first) < 0; });
  return from_zspace(ctx, out, lat);
}

ExprPtr make_ratio_coprime(ContextPtr ctx, Poly num, Poly den) {
  if (den.is_zero()) throw math_error("division by zero expression");
  if (num.is_zero()) return expr_zero();
  // roots force the slow path: closure can merge atoms and create factors
  bool any_root = false;
  if (ctx) {
    std::map<int32_t, long> roots;
    any_root = collect_roots(ctx.get(), num, roots);
    any_root = collect_roots(ctx.get(), den, roots) || any_root;
  }
  if (any_root) return make_ratio(std::move(ctx), std::move(num), std::move(den));
  // re-pin the denominator's exponential content (cross-cancellation can
  // leave a common exp factor behind)
  if (poly_has_exp(den) || poly_has_exp(num)) {
    JetContext* c = ctx.get();
    std::vector<ExprPtr> args;
    auto gather = [&](const Poly& p) {
      for (const auto& [m, cf] : p.terms)
        if (m.exp_arg) args.push_back(m.exp_arg);
    };
    gather(num);
    gather(den);
    Lattice lat = build_lattice(c, std::move(args));
    Poly zn = to_zspace(c, num, lat);
    Poly zd = to_zspace(c, den, lat);
    pin_denominator_exp(c, zn, zd);
    num = from_zspace(c, zn, lat);
    den = from_zspace(c, zd, lat);
  }
  Rat dc;
  den = poly_rat_content(den, dc);
  num = poly_scale(num, Rat(1) / dc);
  auto d = std::make_shared<ExprData>();
  d->ctx = num.is_constant() && den.is_constant() ? nullptr : std::move(ctx);
  d->num = std::move(num);
  d->den = std::move(den);
  return d;
}

void normalize_pair(const JetContext* cctx, Poly& num, Poly& den) {
  JetContext* ctx = const_cast<JetContext*>(cctx);
  if (den.is_zero()) throw math_error("division by zero expression");
  if (num.is_zero()) {
    den = poly_const(Rat(1));
    return;
  }

  // root closure across the pair
  std::map<int32_t, long> roots;
  bool any_root = false;
  if (ctx) {
    any_root |= collect_roots(ctx, num, roots);
    any_root |= collect_roots(ctx, den, roots);
  }
  if (any_root) {
    num = rewrite_roots(ctx, num, roots);
    den = rewrite_roots(ctx, den, roots);
  }

  // constant denominator: only the scale pin is needed
  if (den.is_constant()) {
    Rat dc0;
    den = poly_rat_content(den, dc0);
    num = poly_scale(num, Rat(1) / dc0);
    if (any_root && ctx) cleanup_roots(ctx, num, den);
    return;
  }

  bool exp_present = poly_has_exp(num) || poly_has_exp(den);
  if (!exp_present) {
    if (!den.is_constant() || !num.is_constant()) {
      Poly g = poly_gcd(ctx, num, den);
      if (!g.is_constant()) {
        num = *poly_divide_exact(ctx, num, g);
        den = *poly_divide_exact(ctx, den, g);
      }
    }
  } else {
    // lattice embedding
    std::vector<ExprPtr> args;
    auto gather = [&](const Poly& p) {
      for (const auto& [m, c] : p.terms)
        if (m.exp_arg) args.push_back(m.exp_arg);
    };
    gather(num);
    gather(den);
    Lattice lat = build_lattice(ctx, std::move(args));
    Poly zn = to_zspace(ctx, num, lat);
    Poly zd = to_zspace(ctx, den, lat);
    laurent_shift_joint(ctx, zn, zd);
    Poly g = poly_gcd(ctx, zn, zd);
    if (!g.is_constant()) {
      zn = *poly_divide_exact(ctx, zn, g);
      zd = *poly_divide_exact(ctx, zd, g);
    }
    pin_denominator_exp(ctx, zn, zd);
    num = from_zspace(ctx, zn, lat);
    den = from_zspace(ctx, zd, lat);
  }

  // pin denominator scale: integer primitive, positive leading coefficient
  Rat dc;
  den = poly_rat_content(den, dc);
  num = poly_scale(num, Rat(1) / dc);

  if (any_root && ctx) cleanup_roots(ctx, num, den);
}

}  // namespace qsym::detail
