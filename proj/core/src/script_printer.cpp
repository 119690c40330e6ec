// Canonical script rendering and structural comparison.

#include <sstream>

#include "qsym/script.hpp"

namespace qsym {

namespace {

std::string join(const std::vector<std::string>& v, const char* sep) {
  std::string out;
  for (size_t i = 0; i < v.size(); ++i) {
    if (i) out += sep;
    out += v[i];
  }
  return out;
}

std::string ops_group(const std::vector<std::string>& ops) {
  return "ops(" + join(ops, ", ") + ")";
}

std::string expect_str(Expectation e) {
  return e == Expectation::Pass ? "expect pass" : "expect fail";
}

std::string quote(const std::string& s) {
  return "\"" + s + "\"";
}

struct Printer {
  const Script& s;
  std::ostringstream out;

  void print_statement(const Statement& st) {
    std::visit([&](const auto& body) { print_body(body); }, st.body);
  }

  void print_body(const DeclContext& d) {
    out << "context " << d.name << ";\n";
    out << "vars " << join(d.indep, " ") << ";\n";
    out << "dep " << join(d.dep, " ") << ";\n";
  }
  void print_body(const DeclParams& d) { out << "param " << join(d.names, " ") << ";\n"; }
  void print_body(const DeclUnknown& d) {
    out << "unknown";
    for (const auto& f : d.fns) out << " " << f.name << "(" << join(f.args, ",") << ")";
    out << ";\n";
  }
  void print_body(const DeclEquation& d) {
    out << "eq " << d.name << ": ";
    for (size_t i = 0; i < d.equations.size(); ++i) {
      if (i) out << ", ";
      out << d.equations[i].first.str() << " = " << d.equations[i].second.str();
    }
    out << ";\n";
  }
  void print_body(const DeclOperator& d) {
    out << (d.is_template ? "template " : "op ") << d.name << ": " << d.op.str() << ";\n";
  }
  void print_body(const DeclSet& d) {
    out << "set " << d.name << ": " << ops_group(d.members) << ";\n";
  }
  void print_body(const DeclConstraint& d) {
    // reconstruct the lead derivative in d() form
    const auto& c = d.constraint;
    out << "constraint " << d.name << ": d(" << c.func;
    ContextPtr ctx = c.rhs.context();
    // signature names for the lead multiindex
    if (ctx) {
      int fid = ctx->function_id(c.func);
      const auto& sig = ctx->function_info(fid).signature;
      for (int i = 0; i < c.lead.size(); ++i) {
        if (c.lead[i] == 0) continue;
        out << "," << sig[static_cast<size_t>(i)].str();
        if (c.lead[i] > 1) out << "," << c.lead[i];
      }
    }
    out << ") = " << c.rhs.str() << ";\n";
  }
  void print_body(const DeclAnsatz& d) {
    out << "ansatz " << d.name << ": invariants(";
    for (size_t i = 0; i < d.ansatz.invariants.size(); ++i) {
      if (i) out << ", ";
      out << d.ansatz.invariants[i].omega.str() << " = " << d.ansatz.invariants[i].value.str();
    }
    out << ") solve(";
    for (size_t i = 0; i < d.ansatz.invariants.size(); ++i) {
      if (i) out << ", ";
      out << d.ansatz.invariants[i].designated.str();
    }
    out << ") form ";
    ContextPtr ctx;
    for (const auto& inv : d.ansatz.invariants)
      if (inv.value.context()) ctx = inv.value.context();
    for (size_t j = 0; j < d.ansatz.u_forms.size(); ++j) {
      if (j) out << ", ";
      out << (ctx ? ctx->dependent_name(static_cast<int>(j)) : "u") << " = "
          << d.ansatz.u_forms[j].str();
    }
    if (!d.ansatz.w_forms.empty()) {
      out << " wform ";
      for (size_t j = 0; j < d.ansatz.w_forms.size(); ++j) {
        if (j) out << ", ";
        out << d.ansatz.w_forms[j].str();
      }
    }
    out << ";\n";
  }

  void print_body(const Directive& dir) {
    if (!dir.case_id.empty()) out << "case " << dir.case_id << ": ";
    std::visit([&](const auto& b) { print_dir(b); }, dir.body);
    out << ";\n";
  }

  void print_dir(const DirCheckLie& d) {
    out << "check-lie " << d.eq << " " << d.op;
    if (!d.constraints.empty()) out << " modulo " << join(d.constraints, ", ");
    out << " " << expect_str(d.expect);
  }
  void print_dir(const DirCheckQcond& d) {
    out << "check-qcond " << d.eq << " " << ops_group(d.ops);
    if (!d.constraints.empty()) out << " modulo " << join(d.constraints, ", ");
    out << " " << expect_str(d.expect);
  }
  void print_dir(const DirDeriveQcond& d) {
    out << "derive qcond " << d.eq << " " << d.tmpl;
    if (d.has_expected) {
      out << " expect " << (d.expect_mismatch ? "mismatch " : "") << "system(";
      for (size_t i = 0; i < d.expected.size(); ++i) {
        if (i) out << "; ";
        out << d.expected[i].str() << " = 0";
      }
      out << ")";
    }
    if (!d.note.empty()) out << " note " << quote(d.note);
  }
  void print_dir(const DirDeriveLie& d) {
    out << "derive lie " << d.eq << " " << d.tmpl;
    if (d.has_expected) {
      out << " expect system(";
      for (size_t i = 0; i < d.expected.size(); ++i) {
        if (i) out << "; ";
        out << d.expected[i].str() << " = 0";
      }
      out << ")";
    }
    for (const auto& defs : d.admits) {
      out << " admits(";
      bool first = true;
      for (const auto& [fn, val] : defs) {
        if (!first) out << ", ";
        first = false;
        out << fn << " = " << val.str();
      }
      out << ")";
    }
  }
  void print_dir(const DirBracket& d) {
    out << "bracket " << d.a << " " << d.b;
    if (d.expected) out << " expect " << d.expected->str();
  }
  void print_dir(const DirClosure& d) {
    out << "closure " << ops_group(d.ops) << " " << expect_str(d.expect);
  }
  void print_dir(const DirInvolutive& d) {
    out << "invol " << ops_group(d.ops) << " with " << (d.search ? "auto" : "zero") << " "
        << expect_str(d.expect);
  }
  void print_dir(const DirReduce& d) {
    out << "reduce " << d.eq << " " << d.ansatz;
    if (d.by_ops.empty())
      out << " waive";
    else
      out << " by " << ops_group(d.by_ops);
    out << " expect ";
    switch (d.expect_kind) {
      case DirReduce::Reduced:
        out << "reduced " << d.expected_reduced.str() << " = 0";
        break;
      case DirReduce::Inconsistent:
        out << "inconsistent";
        break;
      case DirReduce::Irreducible:
        out << "irreducible";
        break;
    }
  }
  void print_dir(const DirJoint& d) {
    out << "joint " << d.eq << " " << ops_group(d.ops) << " candidate " << d.candidate.str()
        << " " << expect_str(d.expect);
  }
  void print_dir(const DirSolves& d) {
    out << "solves " << d.eq << " " << d.candidate.str() << " " << expect_str(d.expect);
  }
  void print_dir(const DirVerifyAnsatz& d) {
    out << "verify-ansatz " << ops_group(d.ops) << " " << d.ansatz << " " << expect_str(d.expect);
  }
  void print_dir(const DirPrint& d) { out << "print " << d.value.str(); }
  void print_dir(const DirBuiltin& d) {
    out << "builtin " << d.name;
    for (const auto& a : d.args) out << " " << a;
  }
  void print_dir(const DirRunCasebook&) { out << "run-casebook"; }
  void print_dir(const DirVerifyCase& d) { out << "verify-case " << d.id; }
};

// context-independent expression fingerprint
std::string fp(const Expr& e) { return e.prefix(); }
std::string fp(const VectorField& v) { return v.str(); }

struct Fingerprint {
  std::ostringstream out;

  void add(const Statement& st) {
    std::visit([&](const auto& b) { body(b); }, st.body);
    out << "\n";
  }
  void body(const DeclContext& d) { out << "C|" << d.name << "|" << join(d.indep, ",") << "|" << join(d.dep, ","); }
  void body(const DeclParams& d) { out << "P|" << join(d.names, ","); }
  void body(const DeclUnknown& d) {
    out << "U";
    for (const auto& f : d.fns) out << "|" << f.name << "(" << join(f.args, ",") << ")";
  }
  void body(const DeclEquation& d) {
    out << "E|" << d.name;
    for (const auto& [lead, rhs] : d.equations) out << "|" << lead.str() << "=" << fp(rhs);
  }
  void body(const DeclOperator& d) { out << (d.is_template ? "T|" : "O|") << d.name << "|" << fp(d.op); }
  void body(const DeclSet& d) { out << "S|" << d.name << "|" << join(d.members, ","); }
  void body(const DeclConstraint& d) {
    out << "K|" << d.name << "|" << d.constraint.func << "|";
    for (int c : d.constraint.lead.counts()) out << c << ",";
    out << "|" << fp(d.constraint.rhs);
  }
  void body(const DeclAnsatz& d) {
    out << "A|" << d.name;
    for (const auto& inv : d.ansatz.invariants)
      out << "|" << inv.omega.str() << "=" << fp(inv.value) << "@" << inv.designated.str();
    for (const auto& f : d.ansatz.u_forms) out << "|u=" << fp(f);
    for (const auto& f : d.ansatz.w_forms) out << "|w=" << fp(f);
  }
  void body(const Directive& dir) {
    out << "D|" << dir.case_id << "|";
    std::visit([&](const auto& b) { dbody(b); }, dir.body);
  }
  void dbody(const DirCheckLie& d) {
    out << "check-lie|" << d.eq << "|" << d.op << "|" << join(d.constraints, ",") << "|"
        << (d.expect == Expectation::Pass);
  }
  void dbody(const DirCheckQcond& d) {
    out << "check-qcond|" << d.eq << "|" << join(d.ops, ",") << "|" << join(d.constraints, ",")
        << "|" << (d.expect == Expectation::Pass);
  }
  void dbody(const DirDeriveQcond& d) {
    out << "derive-qcond|" << d.eq << "|" << d.tmpl << "|" << d.has_expected << "|"
        << d.expect_mismatch << "|" << d.note;
    for (const auto& e : d.expected) out << "|" << fp(e);
  }
  void dbody(const DirDeriveLie& d) {
    out << "derive-lie|" << d.eq << "|" << d.tmpl << "|" << d.has_expected;
    for (const auto& e : d.expected) out << "|" << fp(e);
    for (const auto& defs : d.admits) {
      out << "|[";
      for (const auto& [fn, val] : defs) out << fn << "=" << fp(val) << ";";
      out << "]";
    }
  }
  void dbody(const DirBracket& d) {
    out << "bracket|" << d.a << "|" << d.b << "|" << (d.expected ? fp(*d.expected) : "");
  }
  void dbody(const DirClosure& d) {
    out << "closure|" << join(d.ops, ",") << "|" << (d.expect == Expectation::Pass);
  }
  void dbody(const DirInvolutive& d) {
    out << "invol|" << join(d.ops, ",") << "|" << d.search << "|" << (d.expect == Expectation::Pass);
  }
  void dbody(const DirReduce& d) {
    out << "reduce|" << d.eq << "|" << d.ansatz << "|" << join(d.by_ops, ",") << "|"
        << static_cast<int>(d.expect_kind) << "|" << fp(d.expected_reduced);
  }
  void dbody(const DirJoint& d) {
    out << "joint|" << d.eq << "|" << join(d.ops, ",") << "|" << fp(d.candidate) << "|"
        << (d.expect == Expectation::Pass);
  }
  void dbody(const DirSolves& d) {
    out << "solves|" << d.eq << "|" << fp(d.candidate) << "|" << (d.expect == Expectation::Pass);
  }
  void dbody(const DirVerifyAnsatz& d) {
    out << "verify-ansatz|" << join(d.ops, ",") << "|" << d.ansatz << "|"
        << (d.expect == Expectation::Pass);
  }
  void dbody(const DirPrint& d) { out << "print|" << fp(d.value); }
  void dbody(const DirBuiltin& d) { out << "builtin|" << d.name << "|" << join(d.args, ","); }
  void dbody(const DirRunCasebook&) { out << "run-casebook"; }
  void dbody(const DirVerifyCase& d) { out << "verify-case|" << d.id; }
};

}  // namespace

std::string print_script(const Script& s) {
  Printer p{s};
  for (const auto& st : s.statements) p.print_statement(st);
  return p.out.str();
}

bool scripts_identical(const Script& a, const Script& b) {
  if (a.statements.size() != b.statements.size()) return false;
  Fingerprint fa, fb;
  for (const auto& st : a.statements) fa.add(st);
  for (const auto& st : b.statements) fb.add(st);
  return fa.out.str() == fb.out.str();
}

}  // namespace qsym
