#include "qsym/context.hpp"

#include <sstream>

#include "internal.hpp"
#include "qsym/expr.hpp"

namespace qsym {

using detail::AtomData;
using detail::AtomKind;

std::string Symbol::str() const {
  if (!valid()) return "<invalid>";
  return ctx->atom_str(atom);
}

ContextPtr JetContext::make(std::vector<std::string> independents,
                            std::vector<std::string> dependents) {
  if (independents.empty() || dependents.empty())
    throw context_error("JetContext requires n >= 1 independent and m >= 1 dependent variables");
  auto ctx = ContextPtr(new JetContext());
  ctx->indep_ = std::move(independents);
  ctx->dep_ = std::move(dependents);
  for (size_t i = 0; i < ctx->indep_.size(); ++i)
    for (size_t k = i + 1; k < ctx->indep_.size(); ++k)
      if (ctx->indep_[i] == ctx->indep_[k])
        throw context_error("duplicate independent variable name: " + ctx->indep_[i]);
  for (const auto& d : ctx->dep_)
    if (ctx->independent_index(d) >= 0)
      throw context_error("name used for both variable kinds: " + d);
  return ctx;
}

int JetContext::independent_index(const std::string& name) const {
  for (size_t i = 0; i < indep_.size(); ++i)
    if (indep_[i] == name) return static_cast<int>(i);
  return -1;
}

int JetContext::dependent_index(const std::string& name) const {
  for (size_t j = 0; j < dep_.size(); ++j)
    if (dep_[j] == name) return static_cast<int>(j);
  return -1;
}

int JetContext::max_order_seen() const {
  std::shared_lock lock(mutex_);
  return max_order_seen_;
}

void JetContext::note_order(int order) const {
  std::unique_lock lock(mutex_);
  if (order > max_order_seen_) max_order_seen_ = order;
}

Symbol JetContext::add_parameter(const std::string& name) {
  if (name.empty()) throw context_error("empty parameter name");
  {
    std::unique_lock lock(mutex_);
    bool known = false;
    for (const auto& p : params_) known |= (p == name);
    if (!known) {
      if (independent_index(name) >= 0 || dependent_index(name) >= 0)
        throw context_error("parameter name collides with a variable: " + name);
      for (const auto& f : funcs_)
        if (f.name == name)
          throw context_error("parameter name collides with a function: " + name);
      params_.push_back(name);
    }
  }
  return parameter(name);
}

bool JetContext::has_parameter(const std::string& name) const {
  std::shared_lock lock(mutex_);
  for (const auto& p : params_)
    if (p == name) return true;
  return false;
}

std::vector<std::string> JetContext::parameter_names() const {
  std::shared_lock lock(mutex_);
  return params_;
}

std::vector<std::string> JetContext::function_names() const {
  std::shared_lock lock(mutex_);
  std::vector<std::string> out;
  out.reserve(funcs_.size());
  for (const auto& f : funcs_) out.push_back(f.name);
  return out;
}

int JetContext::declare_function(const std::string& name, std::vector<Symbol> signature) {
  if (name.empty()) throw context_error("empty function name");
  for (const auto& s : signature) {
    if (!s.valid() || s.ctx.get() != this)
      throw context_error("function signature symbol from a different context");
    AtomKind k = atom(s.atom).kind;
    if (k != AtomKind::IndepVar && k != AtomKind::Param &&
        !(k == AtomKind::Jet && atom(s.atom).index.is_zero()))
      throw context_error("function arguments must be variables or parameters: " + name);
  }
  std::unique_lock lock(mutex_);
  for (size_t i = 0; i < funcs_.size(); ++i)
    if (funcs_[i].name == name) {
      if (funcs_[i].signature != signature)
        throw context_error("function redeclared with a different signature: " + name);
      return static_cast<int>(i);
    }
  if (independent_index(name) >= 0 || dependent_index(name) >= 0)
    throw context_error("function name collides with a variable: " + name);
  for (const auto& p : params_)
    if (p == name) throw context_error("function name collides with a parameter: " + name);
  funcs_.push_back(FunctionInfo{name, std::move(signature)});
  return static_cast<int>(funcs_.size()) - 1;
}

int JetContext::function_id(const std::string& name) const {
  std::shared_lock lock(mutex_);
  for (size_t i = 0; i < funcs_.size(); ++i)
    if (funcs_[i].name == name) return static_cast<int>(i);
  return -1;
}

const FunctionInfo& JetContext::function_info(int id) const {
  std::shared_lock lock(mutex_);
  return funcs_.at(static_cast<size_t>(id));
}

Symbol JetContext::independent(int i) {
  if (i < 0 || i >= n_independent()) throw context_error("independent index out of range");
  AtomData d;
  d.kind = AtomKind::IndepVar;
  d.a = i;
  return Symbol{shared_from_this(), intern_atom(d)};
}

Symbol JetContext::dependent(int j) { return jet_symbol(j, MultiIndex(n_independent())); }

Symbol JetContext::jet_symbol(int j, const MultiIndex& alpha) {
  if (j < 0 || j >= n_dependent()) throw context_error("dependent index out of range");
  if (alpha.size() != n_independent())
    throw context_error("jet multiindex dimension does not match the context");
  AtomData d;
  d.kind = AtomKind::Jet;
  d.a = j;
  d.index = alpha;
  note_order(alpha.order());
  return Symbol{shared_from_this(), intern_atom(d)};
}

Symbol JetContext::parameter(const std::string& name) {
  if (!has_parameter(name)) throw context_error("undeclared parameter: " + name);
  AtomData d;
  d.kind = AtomKind::Param;
  d.param_name = name;
  return Symbol{shared_from_this(), intern_atom(d)};
}

std::optional<Symbol> JetContext::find_symbol(const std::string& name) {
  int i = independent_index(name);
  if (i >= 0) return independent(i);
  int j = dependent_index(name);
  if (j >= 0) return dependent(j);
  if (has_parameter(name)) return parameter(name);
  return std::nullopt;
}

int32_t JetContext::intern_atom(const AtomData& data) {
  std::string key = atom_key(data);
  {
    std::shared_lock lock(mutex_);
    auto it = atom_index_.find(key);
    if (it != atom_index_.end()) return it->second;
  }
  std::unique_lock lock(mutex_);
  auto it = atom_index_.find(key);
  if (it != atom_index_.end()) return it->second;
  atoms_.push_back(data);
  int32_t id = static_cast<int32_t>(atoms_.size()) - 1;
  atom_index_.emplace(std::move(key), id);
  return id;
}

const AtomData& JetContext::atom(int32_t id) const {
  std::shared_lock lock(mutex_);
  return atoms_.at(static_cast<size_t>(id));
}

namespace {

// Structural serialization used only for interning (equality); canonical
// subexpressions have identical atom ids, so ids are stable key material.
void key_expr(const detail::ExprPtr& e, std::string& out);

void key_poly(const detail::Poly& p, std::string& out) {
  out += '[';
  for (const auto& [m, c] : p.terms) {
    out += c.get_str();
    out += '{';
    for (auto [atom, exp] : m.factors) {
      out += std::to_string(atom);
      out += '^';
      out += std::to_string(exp);
      out += ',';
    }
    out += '}';
    if (m.exp_arg) {
      out += 'E';
      key_expr(m.exp_arg, out);
    }
    out += ';';
  }
  out += ']';
}

void key_expr(const detail::ExprPtr& e, std::string& out) {
  if (!e) {
    out += '0';
    return;
  }
  out += 'R';
  key_poly(e->num, out);
  key_poly(e->den, out);
}

}  // namespace

std::string JetContext::atom_key(const AtomData& d) const {
  std::string out;
  out += std::to_string(static_cast<int>(d.kind));
  out += ':';
  switch (d.kind) {
    case AtomKind::IndepVar:
      out += std::to_string(d.a);
      break;
    case AtomKind::Jet:
      out += std::to_string(d.a);
      out += '|';
      for (int c : d.index.counts()) out += std::to_string(c) + ",";
      break;
    case AtomKind::Param:
      out += d.param_name;
      break;
    case AtomKind::Func:
      out += std::to_string(d.a);
      out += '|';
      for (int c : d.index.counts()) out += std::to_string(c) + ",";
      out += '(';
      for (const auto& a : d.args) key_expr(a, out);
      out += ')';
      break;
    case AtomKind::Root:
      out += std::to_string(d.a);
      out += '/';
      out += std::to_string(d.b);
      break;
    case AtomKind::Log:
    case AtomKind::ExpVar:
      key_expr(d.arg, out);
      break;
    case AtomKind::Antideriv:
      out += std::to_string(d.a);
      out += '|';
      key_expr(d.arg, out);
      break;
  }
  return out;
}

namespace {

int kind_rank(const AtomData& d) {
  switch (d.kind) {
    case AtomKind::IndepVar: return 0;
    case AtomKind::Jet: return d.index.is_zero() ? 1 : 2;
    case AtomKind::Param: return 3;
    case AtomKind::Func: return 4;
    case AtomKind::Root: return 5;
    case AtomKind::Log: return 6;
    case AtomKind::Antideriv: return 7;
    case AtomKind::ExpVar: return 8;
  }
  return 9;
}

template <typename T>
int cmp_scalar(const T& a, const T& b) {
  if (a < b) return -1;
  if (b < a) return 1;
  return 0;
}

}  // namespace

int JetContext::compare_atoms(int32_t a, int32_t b) const {
  if (a == b) return 0;
  {
    std::shared_lock lock(mutex_);
    auto it = cmp_memo_.find({a, b});
    if (it != cmp_memo_.end()) return it->second;
  }
  AtomData da, db;
  {
    std::shared_lock lock(mutex_);
    da = atoms_.at(static_cast<size_t>(a));
    db = atoms_.at(static_cast<size_t>(b));
  }
  int r = 0;
  int ra = kind_rank(da), rb = kind_rank(db);
  if (ra != rb) {
    r = ra < rb ? -1 : 1;
  } else {
    switch (da.kind) {
      case AtomKind::IndepVar:
        r = cmp_scalar(da.a, db.a);
        break;
      case AtomKind::Jet: {
        // graded-lex on alpha, dependent index as tiebreak
        if (da.index.order() != db.index.order())
          r = da.index.order() < db.index.order() ? -1 : 1;
        else if (da.index.counts() != db.index.counts())
          r = da.index.counts() < db.index.counts() ? -1 : 1;
        else
          r = cmp_scalar(da.a, db.a);
        break;
      }
      case AtomKind::Param:
        r = cmp_scalar(da.param_name, db.param_name);
        break;
      case AtomKind::Func: {
        const std::string& na = function_info(da.a).name;
        const std::string& nb = function_info(db.a).name;
        r = cmp_scalar(na, nb);
        if (r == 0) {
          if (da.index.order() != db.index.order())
            r = da.index.order() < db.index.order() ? -1 : 1;
          else if (da.index.counts() != db.index.counts())
            r = da.index.counts() < db.index.counts() ? -1 : 1;
        }
        if (r == 0) r = cmp_scalar(da.args.size(), db.args.size());
        for (size_t i = 0; r == 0 && i < da.args.size(); ++i)
          r = detail::cmp_expr_ptr(da.args[i], db.args[i]);
        break;
      }
      case AtomKind::Root:
        r = compare_atoms(da.a, db.a);
        if (r == 0) r = cmp_scalar(da.b, db.b);
        break;
      case AtomKind::Log:
      case AtomKind::ExpVar:
        r = detail::cmp_expr_ptr(da.arg, db.arg);
        break;
      case AtomKind::Antideriv:
        r = cmp_scalar(da.a, db.a);
        if (r == 0) r = detail::cmp_expr_ptr(da.arg, db.arg);
        break;
    }
  }
  std::unique_lock lock(mutex_);
  cmp_memo_[{a, b}] = r;
  cmp_memo_[{b, a}] = -r;
  return r;
}

}  // namespace qsym
