#ifndef QSYM_EXPR_HPP
#define QSYM_EXPR_HPP

#include <gmpxx.h>

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "qsym/context.hpp"
#include "qsym/errors.hpp"
#include "qsym/multiindex.hpp"

namespace qsym {

using Rat = mpq_class;

/// Immutable symbolic expression in canonical form.
///
/// The value class is rational functions in the context's symbols (independent
/// variables, jet coordinates, parameters, unknown-function symbols), extended
/// by exp and log and by a formal antiderivative node.  Construction
/// canonicalizes eagerly: two expressions are mathematically equal within this
/// class iff they are structurally identical, so equality and zero tests are
/// exact.  All arithmetic is over arbitrary-precision rationals.
class Expr {
 public:
  Expr();  // zero
  Expr(long v);
  explicit Expr(const Rat& v);
  explicit Expr(detail::ExprPtr data);

  static Expr integer(long v) { return Expr(v); }
  static Expr rational(long num, long den);

  // --- arithmetic (all results canonical) ---------------------------------
  friend Expr operator+(const Expr& a, const Expr& b);
  friend Expr operator-(const Expr& a, const Expr& b);
  friend Expr operator*(const Expr& a, const Expr& b);
  friend Expr operator/(const Expr& a, const Expr& b);
  Expr operator-() const;
  Expr& operator+=(const Expr& o) { return *this = *this + o; }
  Expr& operator-=(const Expr& o) { return *this = *this - o; }
  Expr& operator*=(const Expr& o) { return *this = *this * o; }
  Expr& operator/=(const Expr& o) { return *this = *this / o; }

  /// Integer power; negative exponents divide.
  Expr pow(long k) const;
  /// Rational power; defined for single-symbol monomials and exp parts only.
  Expr pow(const Rat& k) const;

  // --- predicates ----------------------------------------------------------
  bool is_zero() const;
  bool is_one() const;
  bool is_rational_constant() const;
  /// Value when the expression is a rational constant.
  std::optional<Rat> rational_value() const;
  /// The symbol when the expression is exactly one symbol atom.
  std::optional<Symbol> as_symbol() const;
  /// Structural (= mathematical, within the class) equality.
  bool identical(const Expr& o) const;
  bool operator==(const Expr& o) const { return identical(o); }
  bool operator!=(const Expr& o) const { return !identical(o); }

  /// Deterministic total order (used for canonical map keys and sorting).
  static int compare(const Expr& a, const Expr& b);
  bool less(const Expr& o) const { return compare(*this, o) < 0; }

  /// true iff the symbol occurs anywhere, including inside composite
  /// arguments and exp parts.
  bool contains_symbol(const Symbol& s) const;
  /// true iff any jet coordinate of positive order occurs.
  bool contains_positive_jet() const;
  /// Highest jet order present (0 if none).
  int max_jet_order() const;
  /// All jet symbols (j, alpha) with |alpha| >= 1 present, canonical order.
  std::vector<Symbol> jet_symbols() const;
  /// All unknown-function ids present (including inside nested arguments).
  std::vector<int> function_ids() const;

  ContextPtr context() const;
  const detail::ExprData& data() const { return *data_; }
  detail::ExprPtr ptr() const { return data_; }

  // --- rendering -----------------------------------------------------------
  std::string str() const;     // human-readable canonical text
  std::string prefix() const;  // machine-readable prefix notation

 private:
  detail::ExprPtr data_;
};

struct ExprLess {
  bool operator()(const Expr& a, const Expr& b) const { return a.less(b); }
};

// --- construction helpers ---------------------------------------------------

/// The symbol as an expression.
Expr symbol_expr(const Symbol& s);
Expr exp_expr(const Expr& arg);
Expr log_expr(const Expr& arg);
/// Formal antiderivative of `integrand` with respect to independent variable
/// `var`.  Differentiates back to its integrand; otherwise opaque.
Expr antiderivative(const Expr& integrand, const Symbol& var);

// --- core operations ---------------------------------------------------------

/// Canonicalization entry point.  Construction already canonicalizes, so this
/// is the identity on well-formed expressions; it exists as the documented
/// normal-form hook and for symmetry with the operation set.
inline Expr normalize(const Expr& e) { return e; }

inline bool is_zero(const Expr& e) { return e.is_zero(); }

/// Formal partial derivative treating all other symbols (including jet
/// coordinates) as independent.  `s` must be an independent variable,
/// dependent variable, jet coordinate, or parameter of e's context.
Expr partial_derivative(const Expr& e, const Symbol& s);

/// Total derivative D_i.
Expr total_derivative(const Expr& e, int i);
/// Composition D_alpha over a multiindex (order-independent).
Expr total_derivative(const Expr& e, const MultiIndex& alpha);

struct SubstRule {
  Symbol lhs;
  Expr rhs;
};

struct SubstOptions {
  /// Enables differential-consequence closure: a jet u_beta with beta >= alpha
  /// is rewritten via D_(beta-alpha) of the rule for u_alpha.  Requires
  /// max_order.
  bool closure = false;
  int max_order = -1;
};

/// Simultaneous substitution followed by normalization.  Rules must have
/// distinct left-hand sides, and no right-hand side may contain any rule's
/// left-hand side (no implicit fixpoint).
Expr substitute(const Expr& e, const std::vector<SubstRule>& rules,
                const SubstOptions& opts = {});

/// Replaces unknown functions by expression templates written in their
/// signature symbols.  Derivative tags are resolved by differentiating the
/// template; composite arguments are substituted after differentiation.
Expr substitute_functions(const Expr& e, const std::map<std::string, Expr>& defs);

/// Rebuilds an expression atom-by-atom.  `map_atom` may return a replacement
/// expression over `target` for any atom; atoms it declines (nullopt) are
/// rebuilt structurally, recursing into composite arguments.  Used for
/// substitution internals and for transferring expressions between contexts.
Expr rebuild(const Expr& e, ContextPtr target,
             const std::function<std::optional<Expr>(const JetContext&, int32_t)>& map_atom);

/// Exact coefficient extraction: writes e as sum(monomial * coefficient) over
/// the given variables (jet coordinates and/or dependent variables), with
/// coefficients free of them.  Errors on non-polynomial dependence, naming the
/// offending subterm.
std::map<Expr, Expr, ExprLess> collect_coefficients(const Expr& e,
                                                    const std::vector<Symbol>& vars);

/// Coefficients of powers of a single symbol (general helper; the symbol may
/// also be an independent variable).  Errors on non-polynomial dependence.
std::map<long, Expr> collect_powers(const Expr& e, const Symbol& s);

/// Multiplies away denominators and rational content: returns the primitive
/// integer-coefficient numerator with deterministic sign (leading coefficient
/// positive).  The result is zero iff e is zero.
Expr primitive_part(const Expr& e);

}  // namespace qsym

#endif
