#include "qsym/vector_field.hpp"

#include <algorithm>

#include "internal.hpp"

namespace qsym {

using namespace detail;

VectorField::VectorField(ContextPtr ctx, std::vector<Expr> xi, std::vector<Expr> eta)
    : ctx_(std::move(ctx)), xi_(std::move(xi)), eta_(std::move(eta)) {
  if (!ctx_) throw context_error("VectorField: null context");
  if (static_cast<int>(xi_.size()) != ctx_->n_independent() ||
      static_cast<int>(eta_.size()) != ctx_->n_dependent())
    throw context_error("VectorField: coefficient count does not match the context");
  auto check = [&](const Expr& c) {
    if (c.context() && c.context() != ctx_)
      throw context_error("VectorField: coefficient from a different context");
    if (c.contains_positive_jet())
      throw math_error("VectorField coefficients must not contain jet coordinates: " + c.str());
  };
  for (const auto& c : xi_) check(c);
  for (const auto& c : eta_) check(c);
}

Expr VectorField::apply(const Expr& f) const {
  Expr out(0);
  for (int i = 0; i < n(); ++i)
    if (!xi_[static_cast<size_t>(i)].is_zero())
      out += xi_[static_cast<size_t>(i)] * partial_derivative(f, ctx_->independent(i));
  for (int j = 0; j < m(); ++j)
    if (!eta_[static_cast<size_t>(j)].is_zero())
      out += eta_[static_cast<size_t>(j)] * partial_derivative(f, ctx_->dependent(j));
  return out;
}

bool VectorField::is_zero() const {
  for (const auto& c : xi_)
    if (!c.is_zero()) return false;
  for (const auto& c : eta_)
    if (!c.is_zero()) return false;
  return true;
}

bool VectorField::identical(const VectorField& o) const {
  if (ctx_ != o.ctx_ || n() != o.n() || m() != o.m()) return false;
  for (int i = 0; i < n(); ++i)
    if (!xi(i).identical(o.xi(i))) return false;
  for (int j = 0; j < m(); ++j)
    if (!eta(j).identical(o.eta(j))) return false;
  return true;
}

VectorField VectorField::operator+(const VectorField& o) const {
  if (ctx_ != o.ctx_) throw context_error("VectorField: mixed contexts");
  std::vector<Expr> xi, eta;
  for (int i = 0; i < n(); ++i) xi.push_back(this->xi(i) + o.xi(i));
  for (int j = 0; j < m(); ++j) eta.push_back(this->eta(j) + o.eta(j));
  return VectorField(ctx_, std::move(xi), std::move(eta));
}

VectorField VectorField::operator-(const VectorField& o) const {
  return *this + o.scaled(Expr(-1));
}

VectorField VectorField::scaled(const Expr& factor) const {
  std::vector<Expr> xi, eta;
  for (const auto& c : xi_) xi.push_back(c * factor);
  for (const auto& c : eta_) eta.push_back(c * factor);
  return VectorField(ctx_, std::move(xi), std::move(eta));
}

std::string VectorField::str() const {
  std::string out;
  auto append = [&](const Expr& c, const std::string& basis) {
    if (c.is_zero()) return;
    std::string cs = c.str();
    std::string part;
    if (cs == "1")
      part = basis;
    else if (cs == "-1")
      part = "-" + basis;
    else if (c.data().num.terms.size() > 1)
      part = "(" + cs + ")*" + basis;
    else
      part = cs + "*" + basis;
    if (out.empty()) {
      out = part;
    } else if (part[0] == '-') {
      out += " - " + part.substr(1);
    } else {
      out += " + " + part;
    }
  };
  for (int i = 0; i < n(); ++i) append(xi(i), "d" + ctx_->independent_name(i));
  for (int j = 0; j < m(); ++j) append(eta(j), "d" + ctx_->dependent_name(j));
  return out.empty() ? "0" : out;
}

Expr characteristic(const VectorField& q, int j) {
  ContextPtr ctx = q.context();
  Expr out = q.eta(j);
  for (int i = 0; i < q.n(); ++i)
    out -= q.xi(i) * ctx->jet(j, MultiIndex::unit(q.n(), i));
  return out;
}

// --- prolongation -----------------------------------------------------------------

ProlongedField::ProlongedField(VectorField base, int order)
    : base_(std::move(base)), order_(order) {
  if (order < 1) throw math_error("prolong: order must be >= 1");
  extend(order);
}

const Expr& ProlongedField::char_deriv(int j, const MultiIndex& alpha) const {
  auto key = std::make_pair(j, alpha.counts());
  auto it = char_derivs_.find(key);
  if (it != char_derivs_.end()) return it->second;
  Expr value;
  if (alpha.is_zero()) {
    value = characteristic(base_, j);
  } else {
    int step = -1;
    for (int i = 0; i < alpha.size(); ++i)
      if (alpha[i] > 0) {
        step = i;
        break;
      }
    MultiIndex prev;
    alpha.minus(MultiIndex::unit(alpha.size(), step), prev);
    value = total_derivative(char_deriv(j, prev), step);
  }
  return char_derivs_.emplace(key, std::move(value)).first->second;
}

void ProlongedField::extend(int order) const {
  ContextPtr ctx = base_.context();
  for (int j = 0; j < base_.m(); ++j) {
    for (const auto& alpha : multiindices_up_to(base_.n(), order)) {
      auto key = std::make_pair(j, alpha.counts());
      if (coeffs_.count(key)) continue;
      // eta_alpha = D_alpha(Qu^j) + sum_i xi^i u^j_(alpha+e_i)
      Expr coeff = char_deriv(j, alpha);
      for (int i = 0; i < base_.n(); ++i)
        if (!base_.xi(i).is_zero()) coeff += base_.xi(i) * ctx->jet(j, alpha.plus(i));
      coeffs_.emplace(key, std::move(coeff));
    }
  }
}

const Expr& ProlongedField::coefficient(int j, const MultiIndex& alpha) const {
  if (alpha.order() > order_) extend(alpha.order());
  auto it = coeffs_.find(std::make_pair(j, alpha.counts()));
  if (it == coeffs_.end()) throw math_error("prolongation coefficient out of range");
  return it->second;
}

Expr ProlongedField::apply(const Expr& e) const {
  int needed = e.max_jet_order();
  if (needed > order_) extend(needed);
  Expr out = base_.apply(e);
  for (const auto& s : e.jet_symbols()) {
    const auto& d = s.ctx->atom(s.atom);
    out += coefficient(d.a, d.index) * partial_derivative(e, s);
  }
  return out;
}

Expr apply_prolonged(const ProlongedField& p, const Expr& e) { return p.apply(e); }

Expr evolutionary_identity_residual(const Expr& l, const VectorField& q) {
  ContextPtr ctx = q.context();
  int r = std::max(1, l.max_jet_order());
  ProlongedField p(q, r);
  Expr lhs = p.apply(l);
  Expr rhs(0);
  for (int j = 0; j < q.m(); ++j) {
    // |alpha| = 0 term: (dL/du^j) Qu^j
    rhs += partial_derivative(l, ctx->dependent(j)) * characteristic(q, j);
    for (const auto& alpha : multiindices_up_to(q.n(), r)) {
      Expr dl = partial_derivative(l, ctx->jet_symbol(j, alpha));
      if (dl.is_zero()) continue;
      rhs += dl * total_derivative(characteristic(q, j), alpha);
    }
  }
  for (int i = 0; i < q.n(); ++i)
    if (!q.xi(i).is_zero()) rhs += q.xi(i) * total_derivative(l, i);
  return lhs - rhs;
}

VectorField lie_bracket(const VectorField& q1, const VectorField& q2) {
  if (q1.context() != q2.context()) throw context_error("lie_bracket: mixed contexts");
  std::vector<Expr> xi, eta;
  for (int i = 0; i < q1.n(); ++i) xi.push_back(q1.apply(q2.xi(i)) - q2.apply(q1.xi(i)));
  for (int j = 0; j < q1.m(); ++j) eta.push_back(q1.apply(q2.eta(j)) - q2.apply(q1.eta(j)));
  return VectorField(q1.context(), std::move(xi), std::move(eta));
}

bool verify_involutive(const InvolutiveSet& s) {
  int n = s.ops.empty() ? 0 : s.ops[0].n();
  int m = s.ops.empty() ? 0 : s.ops[0].m();
  for (int k = 0; k < s.s(); ++k)
    for (int l = 0; l < s.s(); ++l) {
      VectorField bracket = lie_bracket(s.ops[static_cast<size_t>(k)], s.ops[static_cast<size_t>(l)]);
      if (s.structure) {
        for (int p = 0; p < s.s(); ++p) {
          const Expr& f = (*s.structure)[static_cast<size_t>(k)][static_cast<size_t>(l)]
                                        [static_cast<size_t>(p)];
          bracket = bracket - s.ops[static_cast<size_t>(p)].scaled(f);
        }
      }
      for (int i = 0; i < n; ++i)
        if (!bracket.xi(i).is_zero()) return false;
      for (int j = 0; j < m; ++j)
        if (!bracket.eta(j).is_zero()) return false;
    }
  return true;
}

// --- linear algebra over the expression field --------------------------------------

Expr determinant(const std::vector<std::vector<Expr>>& matrix) {
  size_t s = matrix.size();
  if (s == 0) return Expr(1);
  for (const auto& row : matrix)
    if (row.size() != s) throw math_error("determinant: non-square matrix");
  if (s == 1) return matrix[0][0];
  Expr out(0);
  for (size_t k = 0; k < s; ++k) {
    if (matrix[0][k].is_zero()) continue;
    std::vector<std::vector<Expr>> minor;
    for (size_t r = 1; r < s; ++r) {
      std::vector<Expr> row;
      for (size_t c = 0; c < s; ++c)
        if (c != k) row.push_back(matrix[r][c]);
      minor.push_back(std::move(row));
    }
    Expr term = matrix[0][k] * determinant(minor);
    out += (k % 2 == 0) ? term : -term;
  }
  return out;
}

namespace {

void enumerate_subsets(int n, int k, int start, std::vector<int>& current,
                       const std::function<bool(const std::vector<int>&)>& visit, bool& stop) {
  if (stop) return;
  if (static_cast<int>(current.size()) == k) {
    if (visit(current)) stop = true;
    return;
  }
  for (int i = start; i < n; ++i) {
    current.push_back(i);
    enumerate_subsets(n, k, i + 1, current, visit, stop);
    current.pop_back();
    if (stop) return;
  }
}

}  // namespace

int symbolic_rank(const std::vector<std::vector<Expr>>& matrix) {
  int rows = static_cast<int>(matrix.size());
  int cols = rows == 0 ? 0 : static_cast<int>(matrix[0].size());
  int best = 0;
  for (int k = std::min(rows, cols); k >= 1; --k) {
    bool found = false;
    std::vector<int> rsel;
    bool stop = false;
    enumerate_subsets(rows, k, 0, rsel, [&](const std::vector<int>& rset) {
      std::vector<int> csel;
      bool cstop = false;
      enumerate_subsets(cols, k, 0, csel, [&](const std::vector<int>& cset) {
        std::vector<std::vector<Expr>> sub;
        for (int r : rset) {
          std::vector<Expr> row;
          for (int c : cset) row.push_back(matrix[static_cast<size_t>(r)][static_cast<size_t>(c)]);
          sub.push_back(std::move(row));
        }
        if (!determinant(sub).is_zero()) {
          found = true;
          return true;
        }
        return false;
      }, cstop);
      return found;
    }, stop);
    if (found) {
      best = k;
      break;
    }
  }
  return best;
}

std::optional<StructureFunctions> search_structure_functions(const std::vector<VectorField>& ops) {
  if (ops.empty()) return StructureFunctions{};
  int s = static_cast<int>(ops.size());
  int n = ops[0].n(), m = ops[0].m();
  StructureFunctions f(static_cast<size_t>(s),
                       std::vector<std::vector<Expr>>(static_cast<size_t>(s),
                                                      std::vector<Expr>(static_cast<size_t>(s), Expr(0))));
  for (int k = 0; k < s; ++k)
    for (int l = 0; l < s; ++l) {
      VectorField bracket = lie_bracket(ops[static_cast<size_t>(k)], ops[static_cast<size_t>(l)]);
      // solve sum_p f_p * ops[p] = bracket slotwise by exact elimination
      int slots = n + m;
      std::vector<std::vector<Expr>> a(static_cast<size_t>(slots),
                                       std::vector<Expr>(static_cast<size_t>(s), Expr(0)));
      std::vector<Expr> b(static_cast<size_t>(slots), Expr(0));
      for (int slot = 0; slot < slots; ++slot) {
        for (int p = 0; p < s; ++p)
          a[static_cast<size_t>(slot)][static_cast<size_t>(p)] =
              slot < n ? ops[static_cast<size_t>(p)].xi(slot)
                       : ops[static_cast<size_t>(p)].eta(slot - n);
        b[static_cast<size_t>(slot)] = slot < n ? bracket.xi(slot) : bracket.eta(slot - n);
      }
      // Gaussian elimination with symbolic pivots
      std::vector<int> pivot_col;
      size_t row = 0;
      for (int col = 0; col < s && row < a.size(); ++col) {
        size_t pr = row;
        while (pr < a.size() && a[pr][static_cast<size_t>(col)].is_zero()) ++pr;
        if (pr == a.size()) continue;
        std::swap(a[pr], a[row]);
        std::swap(b[pr], b[row]);
        for (size_t r2 = 0; r2 < a.size(); ++r2) {
          if (r2 == row || a[r2][static_cast<size_t>(col)].is_zero()) continue;
          Expr factor = a[r2][static_cast<size_t>(col)] / a[row][static_cast<size_t>(col)];
          for (int c2 = 0; c2 < s; ++c2)
            a[r2][static_cast<size_t>(c2)] -= factor * a[row][static_cast<size_t>(c2)];
          b[r2] -= factor * b[row];
        }
        pivot_col.push_back(col);
        ++row;
      }
      // consistency: zero rows must have zero rhs
      for (size_t r2 = row; r2 < a.size(); ++r2)
        if (!b[r2].is_zero()) return std::nullopt;
      std::vector<Expr> sol(static_cast<size_t>(s), Expr(0));
      for (size_t r2 = 0; r2 < pivot_col.size(); ++r2)
        sol[static_cast<size_t>(pivot_col[r2])] = b[r2] / a[r2][static_cast<size_t>(pivot_col[r2])];
      // structure functions must be functions of (x, u) only: no jets appear
      // here by construction (operator coefficients are jet-free)
      for (int p = 0; p < s; ++p)
        f[static_cast<size_t>(k)][static_cast<size_t>(l)][static_cast<size_t>(p)] =
            sol[static_cast<size_t>(p)];
      // verify (elimination can produce spurious solutions only through
      // inconsistency already caught, but check exactly)
      VectorField check = bracket;
      for (int p = 0; p < s; ++p)
        check = check - ops[static_cast<size_t>(p)].scaled(sol[static_cast<size_t>(p)]);
      if (!check.is_zero()) return std::nullopt;
    }
  return f;
}

InvolutiveSet apply_equivalence(const InvolutiveSet& s,
                                const std::vector<std::vector<Expr>>& lambda) {
  int count = s.s();
  if (static_cast<int>(lambda.size()) != count)
    throw math_error("apply_equivalence: lambda dimension mismatch");
  for (const auto& row : lambda)
    if (static_cast<int>(row.size()) != count)
      throw math_error("apply_equivalence: lambda dimension mismatch");
  if (determinant(lambda).is_zero())
    throw math_error("apply_equivalence: det(lambda) normalizes to zero");
  std::vector<VectorField> out;
  for (int k = 0; k < count; ++k) {
    VectorField acc = s.ops[0].scaled(lambda[static_cast<size_t>(k)][0]);
    for (int l = 1; l < count; ++l)
      acc = acc + s.ops[static_cast<size_t>(l)].scaled(lambda[static_cast<size_t>(k)][static_cast<size_t>(l)]);
    out.push_back(std::move(acc));
  }
  return InvolutiveSet(std::move(out));
}

}  // namespace qsym
