#ifndef QSYM_REDUCTION_HPP
#define QSYM_REDUCTION_HPP

#include <optional>
#include <string>
#include <vector>

#include "qsym/invariance.hpp"
#include "qsym/pde.hpp"

namespace qsym {

/// Ansatz u = F(x, phi(omega)) built from first integrals omega of a reducing
/// operator set.  Each invariant is bound to a declared parameter symbol (its
/// reduced-variable name) and carries one designated independent variable the
/// engine may solve it for (the invariant must be affine in that variable).
struct AnsatzInvariant {
  Symbol omega;      // parameter symbol naming the reduced variable
  Expr value;        // the invariant as a function of (x, u)
  Symbol designated; // independent variable eliminated through this invariant
};

struct Ansatz {
  std::vector<AnsatzInvariant> invariants;
  /// Solved form for each dependent variable, written in x, parameters, and
  /// unknown functions of the omega symbols (e.g. phi(w)).
  std::vector<Expr> u_forms;
  /// Optional explicit first integrals W^j(x, u); when absent they are
  /// derived from u_forms affine in phi.
  std::vector<Expr> w_forms;

  std::string str() const;
};

/// Checks the rank conditions, Q(omega) = 0, Q(W) = 0, and the Jacobian
/// condition det(dW/du) != 0.  Errors name the violated condition.
bool verify_ansatz(const InvolutiveSet& s, const Ansatz& a);

enum class ReduceStatus {
  Reduced,       // reduced equation found (up to the reported multiplier)
  Inconsistent,  // reduced system is a nonzero constant: 0 = c
  Irreducible,   // residual could not be written in (omega, phi): remainder kept
};

struct ReduceResult {
  ReduceStatus status = ReduceStatus::Reduced;
  Expr reduced;     // equation in (omega, phi, phi', ...); zero when irreducible
  Expr multiplier;  // cofactor: residual = multiplier * reduced (when Reduced)
  Expr remainder;   // irreducible residual (Irreducible only)

  std::string str() const;
};

/// Substitutes the ansatz into the (single) equation and rewrites the residual
/// in the reduced variables.  When the residual splits over powers of the
/// remaining independent variables, the common factor of the coefficients is
/// the reduced equation (this covers reduction by non-invariant ansatzes).
ReduceResult reduce(const PdeSystem& e, const Ansatz& a, bool waive_verification = false,
                    const InvolutiveSet* s = nullptr);

/// true iff the candidate (an explicit function of x) satisfies both the
/// equation and every invariant-surface condition of the set.
bool joint_system_check(const PdeSystem& e, const InvolutiveSet& s, const Expr& candidate);

}  // namespace qsym

#endif
