#ifndef QSYM_SCRIPT_HPP
#define QSYM_SCRIPT_HPP

#include <iosfwd>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "qsym/invariance.hpp"
#include "qsym/reduction.hpp"

namespace qsym {

// --- statements -------------------------------------------------------------

enum class Expectation { Pass, Fail };

struct DeclContext {
  std::string name;
  std::vector<std::string> indep, dep;
};
struct DeclParams {
  std::vector<std::string> names;
};
struct DeclUnknown {
  struct One {
    std::string name;
    std::vector<std::string> args;
  };
  std::vector<One> fns;
};
struct DeclEquation {
  std::string name;
  std::vector<std::pair<Symbol, Expr>> equations;  // lead = rhs
};
struct DeclOperator {
  std::string name;
  bool is_template = false;  // printed as `template` when coefficients hold unknowns
  VectorField op;
  DeclOperator(std::string n, bool t, VectorField o)
      : name(std::move(n)), is_template(t), op(std::move(o)) {}
};
struct DeclSet {
  std::string name;
  std::vector<std::string> members;
};
struct DeclConstraint {
  std::string name;
  FunctionConstraint constraint;
};
struct DeclAnsatz {
  std::string name;
  Ansatz ansatz;
};

struct DirCheckLie {
  std::string eq, op;
  std::vector<std::string> constraints;
  Expectation expect = Expectation::Pass;
};
struct DirCheckQcond {
  std::string eq;
  std::vector<std::string> ops;  // operator names (a set reference expands)
  std::vector<std::string> constraints;
  Expectation expect = Expectation::Pass;
};
struct DirDeriveQcond {
  std::string eq, tmpl;
  bool has_expected = false;
  bool expect_mismatch = false;
  std::vector<Expr> expected;  // stored system, canonicalized on parse
  std::string note;
};
struct DirDeriveLie {
  std::string eq, tmpl;
  bool has_expected = false;
  std::vector<Expr> expected;
  std::vector<std::map<std::string, Expr>> admits;  // unknown-function bindings
};
struct DirBracket {
  std::string a, b;
  std::optional<VectorField> expected;
};
struct DirClosure {
  std::vector<std::string> ops;
  Expectation expect = Expectation::Pass;
};
struct DirInvolutive {
  std::vector<std::string> ops;
  bool search = true;  // false: zero structure functions
  Expectation expect = Expectation::Pass;
};
struct DirReduce {
  std::string eq, ansatz;
  std::vector<std::string> by_ops;  // verification set; empty => waive
  enum Kind { Reduced, Inconsistent, Irreducible } expect_kind = Reduced;
  Expr expected_reduced;  // for Reduced
};
struct DirJoint {
  std::string eq;
  std::vector<std::string> ops;
  Expr candidate;
  Expectation expect = Expectation::Pass;
};
struct DirSolves {
  std::string eq;
  Expr candidate;
  Expectation expect = Expectation::Pass;
};
struct DirVerifyAnsatz {
  std::vector<std::string> ops;
  std::string ansatz;
  Expectation expect = Expectation::Pass;
};
struct DirPrint {
  Expr value;
};
struct DirBuiltin {
  std::string name;
  std::vector<std::string> args;
};
struct DirRunCasebook {};
struct DirVerifyCase {
  std::string id;
};

using DirectiveBody =
    std::variant<DirCheckLie, DirCheckQcond, DirDeriveQcond, DirDeriveLie, DirBracket, DirClosure,
                 DirInvolutive, DirReduce, DirJoint, DirSolves, DirVerifyAnsatz, DirPrint,
                 DirBuiltin, DirRunCasebook, DirVerifyCase>;

struct Directive {
  std::string case_id;  // empty: auto-numbered at run time
  DirectiveBody body;
  int line = 0;
};

using StatementBody = std::variant<DeclContext, DeclParams, DeclUnknown, DeclEquation,
                                   DeclOperator, DeclSet, DeclConstraint, DeclAnsatz, Directive>;

struct Statement {
  StatementBody body;
  std::string context_name;  // context current when the statement was parsed
  int line = 0;
};

/// Parsed script: ordered statements plus the resolved object environment.
struct Script {
  std::vector<Statement> statements;

  std::map<std::string, ContextPtr> contexts;
  std::map<std::string, std::string> object_context;  // object name -> context name
  std::map<std::string, PdeSystem> equations;
  std::map<std::string, VectorField> operators;
  std::map<std::string, std::vector<std::string>> sets;
  std::map<std::string, FunctionConstraint> constraints;
  std::map<std::string, Ansatz> ansatzes;
};

Script parse_script(const std::string& source, const std::string& filename = "<script>");

/// Canonical rendering; parse(print(parse(s))) is structurally identical to
/// parse(s).
std::string print_script(const Script& s);

/// Structural equality across independently parsed scripts (expressions are
/// compared by canonical rendering, so distinct context instances agree).
bool scripts_identical(const Script& a, const Script& b);

// --- execution ---------------------------------------------------------------

struct RunOptions {
  int max_order = -1;       // consequence-closure cap override
  unsigned seed = 1;        // randomized builtins
  bool parallel = false;    // concurrent directives, deterministic output order
  std::string casebook_path;  // file executed by run-casebook
  std::string summary_path;   // machine-readable summary sink
};

enum class CaseStatus { Pass, Fail, ExpectedMismatch, Error };

struct CaseResult {
  std::string id;
  std::string directive;
  CaseStatus status = CaseStatus::Pass;
  std::vector<std::string> detail;
  std::vector<std::string> residuals;  // prefix notation
};

struct RunReport {
  std::vector<CaseResult> results;
  int passed = 0, failed = 0, expected_mismatch = 0, errors = 0;
  bool ok() const { return failed == 0 && errors == 0; }
};

RunReport run_script(const Script& s, const RunOptions& opts, std::ostream& out);

/// Renders the report's machine-readable summary (JSON).
std::string summary_json(const RunReport& r);

}  // namespace qsym

#endif
