#ifndef QSYM_CASEBOOK_HPP
#define QSYM_CASEBOOK_HPP

#include <functional>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "qsym/invariance.hpp"

namespace qsym {

/// Execution environment handed to a builtin case: argument list from the
/// casebook file, seeded randomness, and sinks for report lines.
struct BuiltinContext {
  std::vector<std::string> args;
  unsigned seed = 1;
  int max_order = -1;
  std::vector<std::string>* detail = nullptr;
  std::vector<std::string>* residuals = nullptr;

  void note(const std::string& line) const {
    if (detail) detail->push_back(line);
  }
  void residual(const Expr& e) const {
    if (residuals) residuals->push_back(e.prefix());
  }
  long arg_int(size_t i, long fallback) const {
    if (i >= args.size()) return fallback;
    return std::stol(args[i]);
  }
};

/// A builtin throws qsym::error (or returns normally) — the runner turns
/// exceptions into FAIL results.
using BuiltinFn = std::function<void(const BuiltinContext&)>;

const std::map<std::string, BuiltinFn>& casebook_builtins();

// --- randomized generators shared by builtins and tests -----------------------

class RandomSource {
 public:
  explicit RandomSource(unsigned seed) : rng_(seed) {}
  int uniform(int lo, int hi) {
    return std::uniform_int_distribution<int>(lo, hi)(rng_);
  }
  Rat small_rational() {
    int num = uniform(-4, 4);
    int den = uniform(1, 3);
    Rat r(num, den);
    r.canonicalize();
    return r;
  }
  Rat small_nonzero() {
    Rat r = small_rational();
    return r == 0 ? Rat(1) : r;
  }

 private:
  std::mt19937 rng_;
};

/// Random polynomial in the context's variables and jets up to max_order.
Expr random_polynomial(const ContextPtr& ctx, RandomSource& rnd, int max_order, int terms);

/// Random point vector field with polynomial coefficients in (x, u).
VectorField random_point_field(const ContextPtr& ctx, RandomSource& rnd);

/// Random exact solution of u_t = u_xx over a (t, x) context: a rational
/// combination of heat polynomials and Galilei-boosted exponential solutions.
Expr random_heat_solution(const ContextPtr& ctx, RandomSource& rnd);

/// Heat polynomial v_n(t, x): polynomial solution with v_n(0, x) = x^n.
Expr heat_polynomial(const ContextPtr& ctx, int n);

}  // namespace qsym

#endif
