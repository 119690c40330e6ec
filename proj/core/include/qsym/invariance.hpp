#ifndef QSYM_INVARIANCE_HPP
#define QSYM_INVARIANCE_HPP

#include <string>
#include <vector>

#include "qsym/pde.hpp"

namespace qsym {

struct InvarianceOptions {
  /// Consequence-closure order cap; defaults to 2 * order of the system.
  int max_order = -1;
  std::vector<FunctionConstraint> constraints;
};

/// Residuals of the Lie invariance condition restricted onto K.
std::vector<Expr> lie_residual(const PdeSystem& s, const VectorField& q,
                               const InvarianceOptions& opts = {});

bool is_lie_symmetry(const PdeSystem& s, const VectorField& q,
                     const InvarianceOptions& opts = {});

/// Result of a Q-conditional residual computation (m = q = 1).
struct QcondResidual {
  std::vector<Expr> residuals;  // one per operator of the set
  /// Reducibility note: when the equation, after N-reduction, is nonlinear in
  /// its highest jet, vanishing is decided modulo the principal relation by
  /// pseudo-division (sound; incompleteness documented).
  bool used_pseudo_division = false;
};

/// Definition-2 residuals: prolonged operator applied to L, restricted on
/// L = 0 and on N (consequences of the invariant surface conditions of order
/// <= r-1).  N is eliminated first, then L; independence of the elimination
/// order is checked when both eliminations are triangular.
QcondResidual qcond_residual(const PdeSystem& e, const InvolutiveSet& s,
                             const InvarianceOptions& opts = {});

bool is_qcond_symmetry(const PdeSystem& e, const InvolutiveSet& s,
                       const InvarianceOptions& opts = {});

/// Definition-1 residual: restriction on M (consequences of both the system
/// and the surface conditions).  Degenerate: identically zero for every
/// operator, reproduced as a regression property.
Expr definition1_residual(const PdeSystem& e, const VectorField& q, int order_cap = -1);

/// Extracted determining system for an operator template.
struct DeterminingSystem {
  VectorField op_template;
  std::vector<Expr> equations;       // canonical: primitive, sign-pinned, sorted
  std::vector<Expr> parametric;      // monomials the residual was split by
  bool used_pseudo_division = false;

  bool is_empty() const { return equations.empty(); }
  /// true iff substituting the given definitions for the template's unknown
  /// functions annihilates every equation.
  bool admits(const std::map<std::string, Expr>& defs) const;
  /// true iff the operator (coefficients matched against the template's
  /// unknowns) satisfies the system.
  std::string str() const;
};

/// Q-conditional determining system (Definition 2 restriction) for a template
/// whose coefficients contain unknown functions.
DeterminingSystem qcond_determining_system(const PdeSystem& e, const VectorField& op_template,
                                           const InvarianceOptions& opts = {});

/// Lie determining system (K restriction only).
DeterminingSystem lie_determining_system(const PdeSystem& s, const VectorField& op_template,
                                         const InvarianceOptions& opts = {});

/// Closure of a finite operator list under Lie brackets with rational constant
/// coefficients.
struct ClosureReport {
  bool closes = true;
  /// table[k][l] = coefficients of [Q_k, Q_l] over the list (when it closes).
  std::vector<std::vector<std::vector<Rat>>> table;
  std::string failure;  // offending bracket when it does not close
};

ClosureReport check_algebra_closure(const std::vector<VectorField>& ops);

/// Converts a determining system into a PDE system over a fresh context whose
/// dependent variables are the template's unknown functions (used to study
/// symmetries *of* determining systems).  `leads` picks the solved form.
PdeSystem determining_system_as_pde(const DeterminingSystem& ds, ContextPtr target,
                                    const std::vector<Symbol>& leads);

/// Transfers an expression between contexts, mapping unknown-function symbols
/// of `from` onto dependent variables of `to` with the same name.
Expr transfer_functions_to_dependents(const Expr& e, ContextPtr to);

}  // namespace qsym

#endif
