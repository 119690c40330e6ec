// Recursive-descent parser for the declaration/directive language.  Symbols
// resolve eagerly against the current context, so parsed statements carry
// canonical expressions.

#include <functional>

#include "qsym/script.hpp"
#include "script_detail.hpp"

namespace qsym {

using namespace detail;

namespace {

struct Parser {
  std::vector<Token> toks;
  size_t pos = 0;
  Script script;
  ContextPtr ctx;                 // current context
  std::string ctx_name;
  std::string pending_context;   // named by `context`, materialized at `dep`
  std::vector<std::string> pending_vars;

  const Token& peek(int ahead = 0) const {
    size_t i = std::min(pos + static_cast<size_t>(ahead), toks.size() - 1);
    return toks[i];
  }
  const Token& get() {
    const Token& t = toks[std::min(pos, toks.size() - 1)];
    if (pos < toks.size() - 1) ++pos;
    return t;
  }
  [[noreturn]] void fail(const std::string& msg, const Token& t) const {
    throw parse_error(msg, t.line, t.column);
  }
  bool at(Tok k) const { return peek().kind == k; }
  bool at_ident(const char* kw) const { return at(Tok::Ident) && peek().text == kw; }
  void expect(Tok k, const char* what) {
    if (!at(k)) fail(std::string("expected ") + what + ", got '" + peek().text + "'", peek());
    get();
  }
  std::string expect_ident(const char* what) {
    if (!at(Tok::Ident)) fail(std::string("expected ") + what, peek());
    return get().text;
  }
  bool accept_ident(const char* kw) {
    if (at_ident(kw)) {
      get();
      return true;
    }
    return false;
  }

  ContextPtr need_ctx(const Token& t) {
    if (!ctx) fail("no context declared yet (use context/vars/dep)", t);
    return ctx;
  }

  // --- expressions ----------------------------------------------------------

  Expr parse_expr() {
    Expr e = parse_term();
    while (at(Tok::Plus) || at(Tok::Minus)) {
      bool plus = get().kind == Tok::Plus;
      Expr r = parse_term();
      e = plus ? e + r : e - r;
    }
    return e;
  }

  Expr parse_term() {
    Expr e = parse_unary();
    while (at(Tok::Star) || at(Tok::Slash)) {
      bool mul = get().kind == Tok::Star;
      Expr r = parse_unary();
      e = mul ? e * r : e / r;
    }
    return e;
  }

  Expr parse_unary() {
    if (at(Tok::Minus)) {
      get();
      return -parse_unary();
    }
    if (at(Tok::Plus)) {
      get();
      return parse_unary();
    }
    return parse_power();
  }

  Expr parse_power() {
    Expr base = parse_primary();
    if (!at(Tok::Caret)) return base;
    get();
    // exponent: integer, or a parenthesized rational constant
    if (at(Tok::Int)) {
      long k = std::stol(get().text);
      return base.pow(k);
    }
    const Token& t = peek();
    expect(Tok::LParen, "integer or (rational) exponent");
    Expr e = parse_expr();
    expect(Tok::RParen, ")");
    auto v = e.rational_value();
    if (!v) fail("exponent must be an exact rational constant", t);
    return base.pow(*v);
  }

  Expr parse_primary() {
    const Token& t = peek();
    if (at(Tok::Int)) {
      Rat v(get().text);
      v.canonicalize();
      return Expr(v);
    }
    if (at(Tok::LParen)) {
      get();
      Expr e = parse_expr();
      expect(Tok::RParen, ")");
      return e;
    }
    if (!at(Tok::Ident)) fail("expected expression", t);
    std::string name = get().text;
    if (name == "exp") return exp_expr(parse_call_single());
    if (name == "log") return log_expr(parse_call_single());
    if (name == "Int") return parse_antiderivative();
    if (name == "d") return parse_derivative_call();
    return resolve_name(name, t);
  }

  Expr parse_call_single() {
    expect(Tok::LParen, "(");
    Expr e = parse_expr();
    expect(Tok::RParen, ")");
    return e;
  }

  Expr parse_antiderivative() {
    const Token& t = peek();
    expect(Tok::LParen, "(");
    Expr integrand = parse_expr();
    expect(Tok::Comma, ",");
    std::string var = expect_ident("variable");
    expect(Tok::RParen, ")");
    int i = need_ctx(t)->independent_index(var);
    if (i < 0) fail("Int: unknown independent variable " + var, t);
    return antiderivative(integrand, ctx->independent(i));
  }

  // d(name, v1 [, n1], v2 [, n2], ...) with optional trailing explicit
  // argument list for unknown functions: d(phi,w)(x/t)
  Expr parse_derivative_call() {
    const Token& t = peek();
    expect(Tok::LParen, "(");
    std::string name = expect_ident("differentiated symbol");
    ContextPtr c = need_ctx(t);
    int dep = c->dependent_index(name);
    int fid = dep < 0 ? c->function_id(name) : -1;
    if (dep < 0 && fid < 0) fail("d(): " + name + " is not a dependent variable or function", t);
    int slots = dep >= 0 ? c->n_independent()
                         : static_cast<int>(c->function_info(fid).signature.size());
    MultiIndex deriv(slots);
    while (at(Tok::Comma)) {
      get();
      std::string var = expect_ident("variable");
      int count = 1;
      if (at(Tok::Comma) && peek(1).kind == Tok::Int) {
        get();
        count = static_cast<int>(std::stol(get().text));
      }
      int slot = -1;
      if (dep >= 0) {
        slot = c->independent_index(var);
      } else {
        const auto& sig = c->function_info(fid).signature;
        for (size_t k = 0; k < sig.size(); ++k)
          if (sig[k].str() == var) slot = static_cast<int>(k);
      }
      if (slot < 0) fail("d(): " + var + " is not an argument of " + name, t);
      for (int k = 0; k < count; ++k) deriv = deriv.plus(slot);
    }
    expect(Tok::RParen, ")");
    if (dep >= 0) return c->jet(dep, deriv);
    if (at(Tok::LParen)) return c->func_derivative(name, deriv, parse_arg_list());
    return c->func_derivative(name, deriv);
  }

  std::vector<Expr> parse_arg_list() {
    expect(Tok::LParen, "(");
    std::vector<Expr> args;
    if (!at(Tok::RParen)) {
      args.push_back(parse_expr());
      while (at(Tok::Comma)) {
        get();
        args.push_back(parse_expr());
      }
    }
    expect(Tok::RParen, ")");
    return args;
  }

  Expr resolve_name(const std::string& name, const Token& t) {
    ContextPtr c = need_ctx(t);
    if (auto s = c->find_symbol(name)) return symbol_expr(*s);
    if (c->function_id(name) >= 0) {
      if (at(Tok::LParen)) return c->func(name, parse_arg_list());
      return c->func(name);
    }
    // jet / function-derivative shorthand: head_suffix
    size_t us = name.find('_');
    if (us != std::string::npos && us > 0 && us + 1 < name.size()) {
      std::string head = name.substr(0, us);
      std::string suffix = name.substr(us + 1);
      int dep = c->dependent_index(head);
      int fid = dep < 0 ? c->function_id(head) : -1;
      if (dep >= 0) {
        MultiIndex deriv(c->n_independent());
        for (char ch : suffix) {
          int i = c->independent_index(std::string(1, ch));
          if (i < 0) fail("cannot resolve jet shorthand " + name, t);
          deriv = deriv.plus(i);
        }
        return c->jet(dep, deriv);
      }
      if (fid >= 0) {
        const auto& sig = c->function_info(fid).signature;
        MultiIndex deriv(static_cast<int>(sig.size()));
        for (char ch : suffix) {
          int slot = -1;
          for (size_t k = 0; k < sig.size(); ++k)
            if (sig[k].str() == std::string(1, ch)) slot = static_cast<int>(k);
          if (slot < 0) fail("cannot resolve derivative shorthand " + name, t);
          deriv = deriv.plus(slot);
        }
        if (at(Tok::LParen)) return c->func_derivative(head, deriv, parse_arg_list());
        return c->func_derivative(head, deriv);
      }
    }
    fail("undeclared symbol " + name, t);
  }

  // --- vector fields ----------------------------------------------------------

  // basis token for slot: "d" + variable name; slots order: independents then
  // dependents
  int basis_slot(const std::string& name) {
    if (name.size() < 2 || name[0] != 'd') return -1;
    std::string var = name.substr(1);
    int i = ctx->independent_index(var);
    if (i >= 0) return i;
    int j = ctx->dependent_index(var);
    if (j >= 0) return ctx->n_independent() + j;
    return -1;
  }

  VectorField parse_vector_field() {
    const Token& t0 = peek();
    ContextPtr c = need_ctx(t0);
    int slots = c->n_independent() + c->n_dependent();
    std::vector<Expr> coeff(static_cast<size_t>(slots), Expr(0));
    bool first = true;
    while (true) {
      bool neg = false;
      if (at(Tok::Minus)) {
        get();
        neg = true;
      } else if (at(Tok::Plus)) {
        get();
      } else if (!first) {
        break;
      }
      first = false;
      // one term: product of factors, exactly one of which is a basis token
      Expr factor(1);
      int slot = -1;
      bool expect_factor = true;
      bool dividing = false;
      while (expect_factor) {
        const Token& t = peek();
        if (at(Tok::Ident) && basis_slot(peek().text) >= 0) {
          if (slot >= 0) fail("operator term has two basis symbols", t);
          if (dividing) fail("basis symbol under division", t);
          slot = basis_slot(get().text);
        } else {
          Expr f = parse_power_vf();
          factor = dividing ? factor / f : factor * f;
        }
        if (at(Tok::Star)) {
          get();
          dividing = false;
        } else if (at(Tok::Slash)) {
          get();
          dividing = true;
        } else {
          expect_factor = false;
        }
      }
      if (slot < 0) fail("operator term lacks a basis symbol (dt, dx, du, ...)", t0);
      coeff[static_cast<size_t>(slot)] += neg ? -factor : factor;
      if (!at(Tok::Plus) && !at(Tok::Minus)) break;
    }
    std::vector<Expr> xi(coeff.begin(), coeff.begin() + c->n_independent());
    std::vector<Expr> eta(coeff.begin() + c->n_independent(), coeff.end());
    return VectorField(c, std::move(xi), std::move(eta));
  }

  // like parse_power but does not treat basis tokens as symbols
  Expr parse_power_vf() {
    if (at(Tok::Minus)) {
      get();
      return -parse_power_vf();
    }
    Expr base = [&]() -> Expr {
      if (at(Tok::LParen)) {
        get();
        Expr e = parse_expr();
        expect(Tok::RParen, ")");
        return e;
      }
      return parse_primary();
    }();
    if (!at(Tok::Caret)) return base;
    get();
    if (at(Tok::Int)) return base.pow(std::stol(get().text));
    const Token& t = peek();
    expect(Tok::LParen, "exponent");
    Expr e = parse_expr();
    expect(Tok::RParen, ")");
    auto v = e.rational_value();
    if (!v) fail("exponent must be an exact rational constant", t);
    return base.pow(*v);
  }

  // --- statements -------------------------------------------------------------

  void materialize_context(const Token& t) {
    if (pending_vars.empty()) fail("dep before vars", t);
    std::string name = pending_context.empty()
                           ? "ctx" + std::to_string(script.contexts.size() + 1)
                           : pending_context;
    if (script.contexts.count(name)) fail("context redeclared: " + name, t);
    ctx_name = name;
    pending_context.clear();
  }

  void register_object(const std::string& name, const Token& t) {
    if (script.object_context.count(name)) fail("name already declared: " + name, t);
    script.object_context[name] = ctx_name;
  }

  std::vector<std::string> parse_name_list() {
    std::vector<std::string> names;
    names.push_back(expect_ident("name"));
    while (at(Tok::Ident)) names.push_back(get().text);
    return names;
  }

  std::vector<std::string> parse_ops_group() {
    // ops(A, B, ...) or a single operator / set name
    if (accept_ident("ops")) {
      expect(Tok::LParen, "(");
      std::vector<std::string> names;
      names.push_back(expect_ident("operator"));
      while (at(Tok::Comma)) {
        get();
        names.push_back(expect_ident("operator"));
      }
      expect(Tok::RParen, ")");
      return names;
    }
    const Token& t = peek();
    std::string name = expect_ident("operator or set");
    if (script.sets.count(name)) return script.sets.at(name);
    if (script.operators.count(name)) return {name};
    fail("unknown operator or set " + name, t);
  }

  Expectation parse_expectation() {
    const Token& t = peek();
    if (!accept_ident("expect")) fail("expected 'expect'", t);
    if (accept_ident("pass")) return Expectation::Pass;
    if (accept_ident("fail")) return Expectation::Fail;
    fail("expected pass or fail", peek());
  }

  std::vector<std::string> parse_modulo() {
    std::vector<std::string> cs;
    if (accept_ident("modulo")) {
      cs.push_back(expect_ident("constraint name"));
      while (at(Tok::Comma)) {
        get();
        cs.push_back(expect_ident("constraint name"));
      }
    }
    for (const auto& c : cs)
      if (!script.constraints.count(c)) fail("unknown constraint " + c, peek());
    return cs;
  }

  const PdeSystem& lookup_eq(const std::string& name, const Token& t) {
    auto it = script.equations.find(name);
    if (it == script.equations.end()) fail("unknown equation " + name, t);
    return it->second;
  }
  const VectorField& lookup_op(const std::string& name, const Token& t) {
    auto it = script.operators.find(name);
    if (it == script.operators.end()) fail("unknown operator " + name, t);
    return it->second;
  }

  void parse_statement();
  DirectiveBody parse_directive(const std::string& head, const Token& t);

  void run() {
    while (!at(Tok::End)) parse_statement();
  }
};

void Parser::parse_statement() {
  const Token& t = peek();
  int line = t.line;
  if (!at(Tok::Ident)) fail("expected statement", t);
  std::string head = get().text;

  auto finish = [&](StatementBody body) {
    expect(Tok::Semi, ";");
    script.statements.push_back(Statement{std::move(body), ctx_name, line});
  };

  if (head == "context") {
    pending_context = expect_ident("context name");
    expect(Tok::Semi, ";");
    return;  // recorded when materialized
  }
  if (head == "vars") {
    pending_vars = parse_name_list();
    expect(Tok::Semi, ";");
    return;
  }
  if (head == "dep") {
    std::vector<std::string> deps = parse_name_list();
    materialize_context(t);
    ctx = JetContext::make(pending_vars, deps);
    script.contexts[ctx_name] = ctx;
    script.statements.push_back(
        Statement{DeclContext{ctx_name, pending_vars, deps}, ctx_name, line});
    pending_vars.clear();
    expect(Tok::Semi, ";");
    return;
  }
  if (head == "param") {
    DeclParams d;
    d.names = parse_name_list();
    for (const auto& n : d.names) need_ctx(t)->add_parameter(n);
    finish(std::move(d));
    return;
  }
  if (head == "unknown") {
    DeclUnknown d;
    while (at(Tok::Ident)) {
      DeclUnknown::One one;
      one.name = get().text;
      expect(Tok::LParen, "(");
      one.args.push_back(expect_ident("argument"));
      while (at(Tok::Comma)) {
        get();
        one.args.push_back(expect_ident("argument"));
      }
      expect(Tok::RParen, ")");
      std::vector<Symbol> sig;
      for (const auto& a : one.args) {
        auto s = need_ctx(t)->find_symbol(a);
        if (!s) fail("unknown argument symbol " + a, t);
        sig.push_back(*s);
      }
      need_ctx(t)->declare_function(one.name, std::move(sig));
      d.fns.push_back(std::move(one));
    }
    if (d.fns.empty()) fail("unknown: no declarations", t);
    finish(std::move(d));
    return;
  }
  if (head == "eq") {
    DeclEquation d;
    d.name = expect_ident("equation name");
    expect(Tok::Colon, ":");
    auto parse_one = [&]() {
      const Token& lt = peek();
      Expr lead = parse_expr();
      auto s = lead.as_symbol();
      if (!s) fail("equation left side must be a single jet coordinate", lt);
      expect(Tok::Equals, "=");
      Expr rhs = parse_expr();
      d.equations.emplace_back(*s, rhs);
    };
    parse_one();
    while (at(Tok::Comma)) {
      get();
      parse_one();
    }
    register_object(d.name, t);
    std::vector<PdeEquation> eqs;
    for (auto& [lead, rhs] : d.equations) eqs.push_back(PdeEquation{lead, rhs});
    script.equations.emplace(d.name, PdeSystem(ctx, std::move(eqs)));
    finish(std::move(d));
    return;
  }
  if (head == "op" || head == "template") {
    std::string name = expect_ident("operator name");
    expect(Tok::Colon, ":");
    VectorField vf = parse_vector_field();
    register_object(name, t);
    script.operators.emplace(name, vf);
    finish(DeclOperator{name, head == "template", std::move(vf)});
    return;
  }
  if (head == "set") {
    DeclSet d;
    d.name = expect_ident("set name");
    expect(Tok::Colon, ":");
    d.members = parse_ops_group();
    register_object(d.name, t);
    script.sets.emplace(d.name, d.members);
    finish(std::move(d));
    return;
  }
  if (head == "constraint") {
    DeclConstraint d;
    d.name = expect_ident("constraint name");
    expect(Tok::Colon, ":");
    const Token& ft = peek();
    Expr lead = parse_expr();
    expect(Tok::Equals, "=");
    Expr rhs = parse_expr();
    // lead must be a single function-derivative atom
    bool ok = false;
    if (auto s = lead.as_symbol()) {
      const auto& atom = ctx->atom(s->atom);
      if (atom.kind == detail::AtomKind::Func) {
        d.constraint = FunctionConstraint{ctx->function_info(atom.a).name, atom.index, rhs};
        ok = true;
      }
    }
    if (!ok) fail("constraint left side must be a function derivative", ft);
    register_object(d.name, t);
    script.constraints.emplace(d.name, d.constraint);
    finish(std::move(d));
    return;
  }
  if (head == "ansatz") {
    DeclAnsatz d;
    d.name = expect_ident("ansatz name");
    expect(Tok::Colon, ":");
    if (!accept_ident("invariants")) fail("expected invariants(...)", peek());
    expect(Tok::LParen, "(");
    std::vector<std::pair<std::string, Expr>> invs;
    do {
      std::string w = expect_ident("invariant parameter");
      expect(Tok::Equals, "=");
      invs.emplace_back(w, parse_expr());
    } while (at(Tok::Comma) ? (get(), true) : false);
    expect(Tok::RParen, ")");
    if (!accept_ident("solve")) fail("expected solve(...)", peek());
    expect(Tok::LParen, "(");
    std::vector<std::string> solv;
    solv.push_back(expect_ident("variable"));
    while (at(Tok::Comma)) {
      get();
      solv.push_back(expect_ident("variable"));
    }
    expect(Tok::RParen, ")");
    if (solv.size() != invs.size()) fail("solve(...) must list one variable per invariant", t);
    for (size_t k = 0; k < invs.size(); ++k) {
      auto w = need_ctx(t)->find_symbol(invs[k].first);
      if (!w) fail("invariant parameter not declared: " + invs[k].first, t);
      int i = ctx->independent_index(solv[k]);
      if (i < 0) fail("solve: not an independent variable: " + solv[k], t);
      d.ansatz.invariants.push_back(AnsatzInvariant{*w, invs[k].second, ctx->independent(i)});
    }
    if (!accept_ident("form")) fail("expected form u = ...", peek());
    for (int j = 0; j < ctx->n_dependent(); ++j) {
      if (j > 0) expect(Tok::Comma, ",");
      std::string dn = expect_ident("dependent variable");
      if (dn != ctx->dependent_name(j)) fail("form must list dependents in order", t);
      expect(Tok::Equals, "=");
      d.ansatz.u_forms.push_back(parse_expr());
    }
    if (accept_ident("wform")) {
      d.ansatz.w_forms.push_back(parse_expr());
      while (at(Tok::Comma)) {
        get();
        d.ansatz.w_forms.push_back(parse_expr());
      }
    }
    register_object(d.name, t);
    script.ansatzes.emplace(d.name, d.ansatz);
    finish(std::move(d));
    return;
  }

  // --- directives (optionally `case id:` prefixed) -----------------------------
  Directive dir;
  dir.line = line;
  if (head == "case") {
    if (at(Tok::String))
      dir.case_id = get().text;
    else
      dir.case_id = expect_ident("case id");
    expect(Tok::Colon, ":");
    head = expect_ident("directive");
  }
  // two-part directive names: check-lie, check-qcond, run-casebook, verify-*
  if ((head == "check" || head == "run" || head == "verify") && at(Tok::Minus)) {
    get();
    head += "-" + expect_ident("directive name");
  }
  dir.body = parse_directive(head, t);
  expect(Tok::Semi, ";");
  script.statements.push_back(Statement{std::move(dir), ctx_name, line});
}

DirectiveBody Parser::parse_directive(const std::string& head, const Token& t) {
  if (head == "check-lie") {
    DirCheckLie d;
    d.eq = expect_ident("equation");
    lookup_eq(d.eq, t);
    d.op = expect_ident("operator");
    lookup_op(d.op, t);
    d.constraints = parse_modulo();
    d.expect = parse_expectation();
    return d;
  }
  if (head == "check-qcond") {
    DirCheckQcond d;
    d.eq = expect_ident("equation");
    lookup_eq(d.eq, t);
    d.ops = parse_ops_group();
    for (const auto& o : d.ops) lookup_op(o, t);
    d.constraints = parse_modulo();
    d.expect = parse_expectation();
    return d;
  }
  if (head == "derive") {
    std::string kind = expect_ident("qcond or lie");
    if (kind == "qcond") {
      DirDeriveQcond d;
      d.eq = expect_ident("equation");
      lookup_eq(d.eq, t);
      d.tmpl = expect_ident("template");
      lookup_op(d.tmpl, t);
      if (accept_ident("expect")) {
        d.has_expected = true;
        if (accept_ident("mismatch")) d.expect_mismatch = true;
        if (!accept_ident("system")) fail("expected system(...)", peek());
        expect(Tok::LParen, "(");
        while (true) {
          Expr lhs = parse_expr();
          expect(Tok::Equals, "=");
          const Token& zt = peek();
          Expr rhs = parse_expr();
          if (!rhs.is_zero()) fail("stored equations must be written = 0", zt);
          d.expected.push_back(primitive_part(lhs));
          if (at(Tok::Semi)) {
            get();
            if (at(Tok::RParen)) break;
            continue;
          }
          break;
        }
        expect(Tok::RParen, ")");
      }
      if (accept_ident("note")) {
        if (!at(Tok::String)) fail("note expects a string", peek());
        d.note = get().text;
      }
      if (d.expect_mismatch && d.note.empty())
        fail("expected mismatch requires a note", t);
      return d;
    }
    if (kind == "lie") {
      DirDeriveLie d;
      d.eq = expect_ident("equation");
      lookup_eq(d.eq, t);
      d.tmpl = expect_ident("template");
      lookup_op(d.tmpl, t);
      if (accept_ident("expect")) {
        d.has_expected = true;
        if (!accept_ident("system")) fail("expected system(...)", peek());
        expect(Tok::LParen, "(");
        while (true) {
          Expr lhs = parse_expr();
          expect(Tok::Equals, "=");
          const Token& zt = peek();
          Expr rhs = parse_expr();
          if (!rhs.is_zero()) fail("stored equations must be written = 0", zt);
          d.expected.push_back(primitive_part(lhs));
          if (at(Tok::Semi)) {
            get();
            if (at(Tok::RParen)) break;
            continue;
          }
          break;
        }
        expect(Tok::RParen, ")");
      }
      while (accept_ident("admits")) {
        expect(Tok::LParen, "(");
        std::map<std::string, Expr> defs;
        do {
          std::string fn = expect_ident("unknown function");
          if (ctx->function_id(fn) < 0) fail("unknown function " + fn, t);
          expect(Tok::Equals, "=");
          defs.emplace(fn, parse_expr());
        } while (at(Tok::Comma) ? (get(), true) : false);
        expect(Tok::RParen, ")");
        d.admits.push_back(std::move(defs));
      }
      return d;
    }
    fail("derive: expected qcond or lie", t);
  }
  if (head == "bracket") {
    DirBracket d;
    d.a = expect_ident("operator");
    lookup_op(d.a, t);
    d.b = expect_ident("operator");
    lookup_op(d.b, t);
    if (accept_ident("expect")) d.expected = parse_vector_field();
    return d;
  }
  if (head == "closure") {
    DirClosure d;
    d.ops = parse_ops_group();
    for (const auto& o : d.ops) lookup_op(o, t);
    d.expect = parse_expectation();
    return d;
  }
  if (head == "invol") {
    DirInvolutive d;
    d.ops = parse_ops_group();
    for (const auto& o : d.ops) lookup_op(o, t);
    if (accept_ident("with")) {
      if (accept_ident("zero"))
        d.search = false;
      else if (accept_ident("auto"))
        d.search = true;
      else
        fail("invol: expected zero or auto", peek());
    }
    d.expect = parse_expectation();
    return d;
  }
  if (head == "reduce") {
    DirReduce d;
    d.eq = expect_ident("equation");
    lookup_eq(d.eq, t);
    d.ansatz = expect_ident("ansatz");
    if (!script.ansatzes.count(d.ansatz)) fail("unknown ansatz " + d.ansatz, t);
    if (accept_ident("by")) {
      d.by_ops = parse_ops_group();
      for (const auto& o : d.by_ops) lookup_op(o, t);
    } else if (!accept_ident("waive")) {
      fail("reduce: expected 'by ops(...)' or 'waive'", peek());
    }
    if (!accept_ident("expect")) fail("expected expect", peek());
    if (accept_ident("inconsistent")) {
      d.expect_kind = DirReduce::Inconsistent;
    } else if (accept_ident("irreducible")) {
      d.expect_kind = DirReduce::Irreducible;
    } else if (accept_ident("reduced")) {
      d.expect_kind = DirReduce::Reduced;
      Expr lhs = parse_expr();
      expect(Tok::Equals, "=");
      const Token& zt = peek();
      Expr rhs = parse_expr();
      if (!rhs.is_zero()) fail("reduced equation must be written = 0", zt);
      d.expected_reduced = primitive_part(lhs);
    } else {
      fail("reduce: expected reduced/inconsistent/irreducible", peek());
    }
    return d;
  }
  if (head == "joint") {
    DirJoint d;
    d.eq = expect_ident("equation");
    lookup_eq(d.eq, t);
    d.ops = parse_ops_group();
    for (const auto& o : d.ops) lookup_op(o, t);
    if (!accept_ident("candidate")) fail("expected candidate", peek());
    d.candidate = parse_expr();
    d.expect = parse_expectation();
    return d;
  }
  if (head == "solves") {
    DirSolves d;
    d.eq = expect_ident("equation");
    lookup_eq(d.eq, t);
    d.candidate = parse_expr();
    d.expect = parse_expectation();
    return d;
  }
  if (head == "verify-ansatz") {
    DirVerifyAnsatz d;
    d.ops = parse_ops_group();
    for (const auto& o : d.ops) lookup_op(o, t);
    d.ansatz = expect_ident("ansatz");
    if (!script.ansatzes.count(d.ansatz)) fail("unknown ansatz " + d.ansatz, t);
    d.expect = parse_expectation();
    return d;
  }
  if (head == "print") {
    DirPrint d;
    d.value = parse_expr();
    return d;
  }
  if (head == "builtin") {
    DirBuiltin d;
    d.name = expect_ident("builtin name");
    while (at(Tok::Minus)) {
      get();
      d.name += "-" + expect_ident("builtin name");
    }
    while (at(Tok::Ident) || at(Tok::Int)) d.args.push_back(get().text);
    return d;
  }
  if (head == "run-casebook") return DirRunCasebook{};
  if (head == "verify-case") {
    DirVerifyCase d;
    if (at(Tok::String))
      d.id = get().text;
    else
      d.id = expect_ident("case id");
    return d;
  }
  fail("unknown directive " + head, t);
}

}  // namespace

Script parse_script(const std::string& source, const std::string& filename) {
  (void)filename;
  Parser p;
  p.toks = lex_script(source);
  p.run();
  return std::move(p.script);
}

}  // namespace qsym
