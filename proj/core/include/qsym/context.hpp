#ifndef QSYM_CONTEXT_HPP
#define QSYM_CONTEXT_HPP

#include <cstdint>
#include <deque>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string>
#include <vector>

#include "qsym/errors.hpp"
#include "qsym/multiindex.hpp"

namespace qsym {

class Expr;
class JetContext;
using ContextPtr = std::shared_ptr<JetContext>;

namespace detail {
struct ExprData;
using ExprPtr = std::shared_ptr<const ExprData>;

enum class AtomKind : uint8_t {
  IndepVar = 0,   // independent variable x_i
  Jet = 1,        // jet coordinate u^j_alpha (|alpha| == 0 is the dependent variable)
  Param = 2,      // parameter symbol
  Func = 3,       // unknown-function symbol with derivative tag and argument list
  Root = 4,       // q-th root of a symbol atom (internal support for t^(1/2))
  Log = 5,        // log(expr)
  Antideriv = 6,  // formal antiderivative of expr w.r.t. one independent variable
  ExpVar = 7,     // internal lattice variable exp(basis); never in canonical forms
};

struct AtomData {
  AtomKind kind = AtomKind::Param;
  int32_t a = 0;          // IndepVar/Antideriv: variable index; Jet: dependent index;
                          // Func: function id; Root: base atom id
  int32_t b = 0;          // Root: root index q >= 2
  MultiIndex index;       // Jet: alpha; Func: derivative multiindex over the signature
  std::string param_name; // Param only
  ExprPtr arg;            // Log/Antideriv/ExpVar argument
  std::vector<ExprPtr> args;  // Func arguments (size == arity)
};
}  // namespace detail

/// A symbol atom bound to a context: independent variable, dependent variable,
/// jet coordinate, or parameter.  Lightweight value handle.
struct Symbol {
  ContextPtr ctx;
  int32_t atom = -1;

  bool valid() const { return ctx != nullptr && atom >= 0; }
  bool operator==(const Symbol& o) const { return ctx == o.ctx && atom == o.atom; }
  bool operator!=(const Symbol& o) const { return !(*this == o); }
  bool operator<(const Symbol& o) const {
    return ctx.get() != o.ctx.get() ? ctx.get() < o.ctx.get() : atom < o.atom;
  }
  std::string str() const;
};

/// Declared unknown-function signature.
struct FunctionInfo {
  std::string name;
  std::vector<Symbol> signature;  // argument slots, drawn from the context's symbols
};

/// Shared symbol table for one jet space: n independent variables, m dependent
/// variables, parameters, unknown functions, and the interned atom storage.
/// Atom ids are stable for the lifetime of the context; all mutation is
/// internal and synchronized, so expressions over one context may be shared
/// freely between threads.
class JetContext : public std::enable_shared_from_this<JetContext> {
 public:
  static ContextPtr make(std::vector<std::string> independents,
                         std::vector<std::string> dependents);

  int n_independent() const { return static_cast<int>(indep_.size()); }
  int n_dependent() const { return static_cast<int>(dep_.size()); }
  const std::string& independent_name(int i) const { return indep_.at(static_cast<size_t>(i)); }
  const std::string& dependent_name(int j) const { return dep_.at(static_cast<size_t>(j)); }
  int independent_index(const std::string& name) const;  // -1 if absent
  int dependent_index(const std::string& name) const;    // -1 if absent

  /// Highest jet order seen so far (bookkeeping; jets auto-extend).
  int max_order_seen() const;

  // --- declarations -------------------------------------------------------
  Symbol add_parameter(const std::string& name);
  bool has_parameter(const std::string& name) const;
  int declare_function(const std::string& name, std::vector<Symbol> signature);
  int function_id(const std::string& name) const;  // -1 if absent
  const FunctionInfo& function_info(int id) const;
  std::vector<std::string> parameter_names() const;
  std::vector<std::string> function_names() const;

  // --- symbols ------------------------------------------------------------
  Symbol independent(int i);
  Symbol dependent(int j);
  Symbol jet_symbol(int j, const MultiIndex& alpha);
  Symbol parameter(const std::string& name);
  /// Resolves a plain name: independent, dependent, or parameter.
  std::optional<Symbol> find_symbol(const std::string& name);

  // --- expressions --------------------------------------------------------
  Expr x(int i);
  Expr u(int j);
  Expr jet(int j, const MultiIndex& alpha);
  Expr param(const std::string& name);
  /// Unknown function applied to its declared signature symbols.
  Expr func(const std::string& name);
  /// Unknown function applied to explicit arguments (arity-checked).
  Expr func(const std::string& name, const std::vector<Expr>& args);
  /// Derivative symbol of an unknown function, e.g. theta_xu.
  Expr func_derivative(const std::string& name, const MultiIndex& deriv);
  Expr func_derivative(const std::string& name, const MultiIndex& deriv,
                       const std::vector<Expr>& args);

  // --- internal atom table (used by the expression kernel) ----------------
  int32_t intern_atom(const detail::AtomData& data);
  const detail::AtomData& atom(int32_t id) const;
  /// Structural total order on atoms of this context; memoized internally.
  int compare_atoms(int32_t a, int32_t b) const;
  std::string atom_str(int32_t id) const;
  void note_order(int order) const;

 private:
  JetContext() = default;

  std::vector<std::string> indep_;
  std::vector<std::string> dep_;
  std::vector<std::string> params_;
  std::vector<FunctionInfo> funcs_;

  mutable std::shared_mutex mutex_;
  std::deque<detail::AtomData> atoms_;  // deque: stable references under growth
  std::map<std::string, int32_t> atom_index_;  // structural key -> id
  mutable std::map<std::pair<int32_t, int32_t>, int> cmp_memo_;
  mutable int max_order_seen_ = 0;

  std::string atom_key(const detail::AtomData& data) const;
};

}  // namespace qsym

#endif
