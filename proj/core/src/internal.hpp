#ifndef QSYM_SRC_INTERNAL_HPP
#define QSYM_SRC_INTERNAL_HPP

// Internal representation of canonical expressions.
//
// An expression is a reduced ratio of two "exponential polynomials".  A
// monomial is a power product of interned atoms together with an optional
// exponential part exp(arg); multiplying monomials adds the args, which keeps
// exp(a)*exp(b) and exp(a+b) identical by construction.  Rational-function
// reduction (gcd), when exponential parts are present, maps them onto integer
// lattice coordinates over a basis of the occurring arguments, so common
// factors such as exp(2u) = exp(u)^2 are still recognized.

#include <algorithm>
#include <cassert>
#include <map>
#include <optional>
#include <vector>

#include "qsym/context.hpp"
#include "qsym/expr.hpp"

namespace qsym::detail {

struct Mono {
  // (atom id, exponent) sorted by the context's structural atom order.
  // Exponents are positive in canonical forms; internal Laurent steps may
  // create negative ones transiently.
  std::vector<std::pair<int32_t, int32_t>> factors;
  ExprPtr exp_arg;  // canonical nonzero expression, or null

  bool is_unit() const { return factors.empty() && !exp_arg; }
};

struct Poly {
  std::vector<std::pair<Mono, Rat>> terms;  // ascending monomial order, nonzero coeffs
  bool is_zero() const { return terms.empty(); }
  bool is_constant() const {
    return terms.empty() || (terms.size() == 1 && terms[0].first.is_unit());
  }
};

struct ExprData {
  ContextPtr ctx;  // null for pure rational constants
  Poly num;
  Poly den;  // never zero; integer primitive, leading coefficient positive
};

// --- comparisons -------------------------------------------------------------

int cmp_rat(const Rat& a, const Rat& b);
int cmp_atom(const JetContext* ctx, int32_t a, int32_t b);
int cmp_expr_ptr(const ExprPtr& a, const ExprPtr& b);
int cmp_mono(const JetContext* ctx, const Mono& a, const Mono& b);
int cmp_poly(const JetContext* ctx, const Poly& a, const Poly& b);

struct MonoLess {
  const JetContext* ctx;
  bool operator()(const Mono& a, const Mono& b) const { return cmp_mono(ctx, a, b) < 0; }
};

// --- polynomial structure ops ------------------------------------------------

Poly poly_zero();
Poly poly_const(const Rat& c);
Poly poly_atom(int32_t atom);
Poly poly_exp(const ExprPtr& arg);

Poly poly_add(const JetContext* ctx, const Poly& a, const Poly& b);
Poly poly_neg(const Poly& a);
Poly poly_scale(const Poly& a, const Rat& c);
Mono mono_mul(const JetContext* ctx, const Mono& a, const Mono& b);
Poly poly_mul(const JetContext* ctx, const Poly& a, const Poly& b);
Poly poly_mul_mono(const JetContext* ctx, const Poly& a, const Mono& m, const Rat& c);
Poly poly_pow(const JetContext* ctx, const Poly& a, long k);

bool poly_has_exp(const Poly& a);
bool poly_has_atom_kind(const JetContext* ctx, const Poly& a, AtomKind k);

/// Exact division; requires exp-free inputs (callers route exponential parts
/// through the lattice first).  Returns nullopt when not divisible.
std::optional<Poly> poly_divide_exact(const JetContext* ctx, const Poly& a, const Poly& b);

/// GCD, unit-normalized (integer primitive, leading coefficient positive).
/// Handles exponential parts via the lattice embedding.
Poly poly_gcd(const JetContext* ctx, const Poly& a, const Poly& b);

/// Splits off rational content: P = content * result, result integer primitive
/// with positive leading coefficient.  P must be nonzero.
Poly poly_rat_content(const Poly& p, Rat& content_out);

// --- canonical ratio assembly -----------------------------------------------

/// Full canonical reduction of a ratio in place: root-atom closure, gcd
/// removal (lattice-embedding exponential parts when present), denominator
/// pinned to integer primitive form with positive leading coefficient and no
/// common exponential factor.
void normalize_pair(const JetContext* ctx, Poly& num, Poly& den);

/// Divides gcd(a, b) out of both (lattice-aware); returns it.  Used for
/// cross-cancellation so that products of reduced ratios stay reduced without
/// a full-size gcd at the end.
Poly cross_reduce(const JetContext* ctx, Poly& a, Poly& b);

/// Exact division a / b, lattice-embedding exponential parts; b must divide a.
Poly poly_divide_exact_general(const JetContext* ctx, const Poly& a, const Poly& b);

/// Assembles a ratio known to be gcd-free (e.g. built from cross-cancelled
/// reduced operands): runs root closure and denominator pinning only, falling
/// back to the full reduction when root closure had to rewrite anything.
ExprPtr make_ratio_coprime(ContextPtr ctx, Poly num, Poly den);

ExprPtr make_ratio(ContextPtr ctx, Poly num, Poly den);
ExprPtr make_const(const Rat& c);

const ExprPtr& expr_zero();
const ExprPtr& expr_one();

ExprPtr expr_add(const ExprPtr& a, const ExprPtr& b);
ExprPtr expr_sub(const ExprPtr& a, const ExprPtr& b);
ExprPtr expr_mul(const ExprPtr& a, const ExprPtr& b);
ExprPtr expr_div(const ExprPtr& a, const ExprPtr& b);
ExprPtr expr_neg(const ExprPtr& a);
ExprPtr expr_pow(const ExprPtr& a, long k);

bool expr_is_zero(const ExprPtr& a);

/// Context unification for binary ops (null adopts non-null; distinct non-null
/// contexts are an error).
ContextPtr unify_ctx(const ExprPtr& a, const ExprPtr& b);

// --- traversal helpers --------------------------------------------------------

/// Calls fn for every atom id reachable in the expression, including atoms
/// inside composite arguments and exponential parts (pre-order, may repeat).
void for_each_atom(const ExprPtr& e, const std::function<void(int32_t)>& fn);
/// Shallow variant: atoms of the top-level monomials only (args not entered).
void for_each_top_atom(const ExprPtr& e, const std::function<void(int32_t)>& fn);

bool expr_contains_atom_deep(const JetContext* ctx, const ExprPtr& e, int32_t atom);

}  // namespace qsym::detail

#endif
