#ifndef QSYM_VECTOR_FIELD_HPP
#define QSYM_VECTOR_FIELD_HPP

#include <map>
#include <optional>
#include <vector>

#include "qsym/expr.hpp"

namespace qsym {

/// First-order differential operator Q = sum xi^i d_{x_i} + sum eta^j d_{u^j}
/// with coefficients in (x, u) — no jet coordinate of positive order.
class VectorField {
 public:
  VectorField(ContextPtr ctx, std::vector<Expr> xi, std::vector<Expr> eta);

  const ContextPtr& context() const { return ctx_; }
  int n() const { return static_cast<int>(xi_.size()); }
  int m() const { return static_cast<int>(eta_.size()); }
  const Expr& xi(int i) const { return xi_.at(static_cast<size_t>(i)); }
  const Expr& eta(int j) const { return eta_.at(static_cast<size_t>(j)); }

  /// Applies the field as a derivation on a function of (x, u).
  Expr apply(const Expr& f) const;

  bool is_zero() const;
  bool identical(const VectorField& o) const;

  VectorField operator+(const VectorField& o) const;
  VectorField operator-(const VectorField& o) const;
  VectorField scaled(const Expr& factor) const;

  std::string str() const;

 private:
  ContextPtr ctx_;
  std::vector<Expr> xi_;
  std::vector<Expr> eta_;
};

/// Characteristic Qu^j = eta^j - sum_i xi^i u^j_i.
Expr characteristic(const VectorField& q, int j);

/// Prolongation of a vector field to jet space.  Coefficients satisfy
/// eta_alpha = D_alpha(Qu) + sum_i xi^i u_(alpha+e_i).
class ProlongedField {
 public:
  ProlongedField(VectorField base, int order);

  const VectorField& base() const { return base_; }
  int order() const { return order_; }
  /// Coefficient for d_{u^j_alpha}, 1 <= |alpha| <= order.
  const Expr& coefficient(int j, const MultiIndex& alpha) const;

  /// Applies the prolonged field to an expression.  The prolongation extends
  /// itself on demand when the expression's order exceeds the stored one.
  Expr apply(const Expr& e) const;

 private:
  VectorField base_;
  int order_;
  mutable std::map<std::pair<int, std::vector<int>>, Expr> coeffs_;
  mutable std::map<std::pair<int, std::vector<int>>, Expr> char_derivs_;  // D_alpha(Qu^j)
  const Expr& char_deriv(int j, const MultiIndex& alpha) const;
  void extend(int order) const;
};

inline ProlongedField prolong(const VectorField& q, int order) {
  return ProlongedField(q, order);
}

Expr apply_prolonged(const ProlongedField& p, const Expr& e);

/// pr Q L - sum_alpha (dL/du_alpha) D_alpha(Qu) - sum_i xi^i D_i L.
/// Identically zero; the engine's master self-test.
Expr evolutionary_identity_residual(const Expr& l, const VectorField& q);

/// Commutator [Q1, Q2] = Q1 Q2 - Q2 Q1 as a first-order operator.
VectorField lie_bracket(const VectorField& q1, const VectorField& q2);

/// Candidate structure functions f^{klp}(x, u) for an involutive set.
using StructureFunctions = std::vector<std::vector<std::vector<Expr>>>;

/// Operators Q^1..Q^s, optionally with structure functions witnessing
/// involutivity: [Q^k, Q^l] = sum_p f^{klp} Q^p.
struct InvolutiveSet {
  std::vector<VectorField> ops;
  std::optional<StructureFunctions> structure;

  InvolutiveSet(std::vector<VectorField> operators) : ops(std::move(operators)) {}
  InvolutiveSet(std::vector<VectorField> operators, StructureFunctions f)
      : ops(std::move(operators)), structure(std::move(f)) {}
  int s() const { return static_cast<int>(ops.size()); }
};

/// true iff every bracket residual [Q^k,Q^l] - sum_p f^{klp} Q^p vanishes.
/// Missing structure functions are treated as zero.
bool verify_involutive(const InvolutiveSet& s);

/// Attempts to solve for structure functions by exact linear elimination over
/// the coefficient field; reports failure honestly (nullopt).
std::optional<StructureFunctions> search_structure_functions(const std::vector<VectorField>& ops);

/// Equivalence transformation: Q~^k = sum_l lambda_{kl} Q^l with invertible
/// lambda(x, u).  Errors when det(lambda) normalizes to zero.
InvolutiveSet apply_equivalence(const InvolutiveSet& s, const std::vector<std::vector<Expr>>& lambda);

/// Symbolic rank via minors: rank >= k iff some k x k minor is nonzero.
int symbolic_rank(const std::vector<std::vector<Expr>>& matrix);

/// Determinant by cofactor expansion (small matrices).
Expr determinant(const std::vector<std::vector<Expr>>& matrix);

}  // namespace qsym

#endif
