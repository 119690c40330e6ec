#ifndef QSYM_PDE_HPP
#define QSYM_PDE_HPP

#include <optional>
#include <vector>

#include "qsym/expr.hpp"
#include "qsym/vector_field.hpp"

namespace qsym {

/// One equation in solved form: leading jet coordinate = right-hand side.
struct PdeEquation {
  Symbol lead;  // jet coordinate u^j_alpha
  Expr rhs;     // free of the leading coordinate and its derivatives
};

/// System of PDEs, each in solved form.  The maximal-rank condition of the
/// underlying theory is assumed, not verified.
class PdeSystem {
 public:
  PdeSystem(ContextPtr ctx, std::vector<PdeEquation> equations);

  const ContextPtr& context() const { return ctx_; }
  int q() const { return static_cast<int>(equations_.size()); }
  int order() const { return order_; }
  const PdeEquation& equation(int mu) const { return equations_.at(static_cast<size_t>(mu)); }
  const std::vector<PdeEquation>& equations() const { return equations_; }

  /// L^mu = lead - rhs as an expression.
  Expr l_expr(int mu) const;

 private:
  ContextPtr ctx_;
  std::vector<PdeEquation> equations_;
  int order_ = 0;
};

/// Rewrite constraint on an unknown function: any derivative covering `lead`
/// is reduced through the formal derivative of `rhs`, e.g. f_t -> f_xx for an
/// unknown f(t, x) constrained by the heat equation.
struct FunctionConstraint {
  std::string func;
  MultiIndex lead;  // over the function's signature slots
  Expr rhs;
};

/// Which manifold a residual is restricted onto.
enum class RestrictionKind {
  K,  // differential consequences of the system itself
  N,  // consequences of the invariant surface conditions, order <= r-1
  M,  // both (Definition 1; degenerate by the prolongation identity)
};

/// Behavior when a consequence would exceed the order cap: K-restrictions
/// treat it as an error (closure explosion diagnostic); N-restrictions leave
/// the jet untouched, since Definition 2 only provides consequences up to
/// order r-1.
enum class CapMode { Throw, Skip };

/// Triangular rewrite system realizing a restriction: jet rules (solved
/// equations and their derivative consequences, generated on demand under an
/// order cap) plus unknown-function constraint rules.
class RewriteSystem {
 public:
  RewriteSystem(ContextPtr ctx, int order_cap, CapMode mode = CapMode::Throw);

  /// Adds a solved rule lead -> rhs; consequences D_beta(rule) are derived on
  /// demand while reducing.  Exact-only rules never generate consequences.
  void add_jet_rule(const Symbol& lead, const Expr& rhs, bool exact_only = false);
  void add_constraint(const FunctionConstraint& c);

  int order_cap() const { return cap_; }
  const ContextPtr& context() const { return ctx_; }

  /// Reduces to a normal form under the rules; in Throw mode, exceeding the
  /// order cap raises rewrite_error with a diagnostic.
  Expr reduce(const Expr& e) const;

 private:
  ContextPtr ctx_;
  int cap_;
  CapMode mode_;
  struct JetRule {
    int dep;
    MultiIndex alpha;
    Expr rhs;
    bool exact_only;
  };
  std::vector<JetRule> jet_rules_;
  std::vector<FunctionConstraint> constraints_;
  mutable std::map<int32_t, Expr> memo_;
  mutable int depth_ = 0;

  std::optional<Expr> replace_atom(int32_t id) const;
};

/// K-restriction: solved forms of the system closed under total derivatives
/// up to the cap.
RewriteSystem restriction_k(const PdeSystem& s, int order_cap,
                            const std::vector<FunctionConstraint>& constraints = {});

}  // namespace qsym

#endif
