// Acceptance suite: one check per criterion, exact tolerances, one line each.
//
// The symbolic criteria run through the casebook (the declarative record of
// the verified results); the CLI criteria drive the installed binary.

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include <qsym/casebook.hpp>
#include <qsym/script.hpp>

using namespace qsym;

namespace {

int failures = 0;

void report(int index, const std::string& name, bool ok, const std::string& note = "") {
  std::printf("%2d. %-58s %s%s%s\n", index, name.c_str(), ok ? "PASS" : "FAIL",
              note.empty() ? "" : "  — ", note.c_str());
  if (!ok) ++failures;
}

RunReport run_cases(const Script& s, const std::vector<std::string>& ids, unsigned seed) {
  Script filtered = s;
  filtered.statements.clear();
  for (const auto& st : s.statements) {
    const Directive* d = std::get_if<Directive>(&st.body);
    if (!d) continue;
    for (const auto& id : ids)
      if (d->case_id == id) filtered.statements.push_back(st);
  }
  RunOptions opts;
  opts.seed = seed;
  std::ostringstream sink;
  return run_script(filtered, opts, sink);
}

bool all_pass(const RunReport& rep, size_t expected_count) {
  return rep.ok() && rep.results.size() == expected_count &&
         rep.failed == 0 && rep.errors == 0;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  if (!in) return {};
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

int run_cli(const std::string& args, const std::string& out_path) {
  std::string cmd = std::string(QSYM_CLI_PATH) + " " + args + " > " + out_path + " 2>&1";
  return std::system(cmd.c_str());
}

}  // namespace

int main() {
  std::string source = slurp(QSYM_CASEBOOK_FILE);
  if (source.empty()) {
    std::fprintf(stderr, "cannot read casebook at %s\n", QSYM_CASEBOOK_FILE);
    return 2;
  }
  Script casebook = parse_script(source, QSYM_CASEBOOK_FILE);

  // 1. master identity on 100 randomized pairs
  report(1, "master prolongation identity (100 randomized pairs)",
         all_pass(run_cases(casebook, {"prop.identity"}, 1), 1));

  // 2. heat Lie algebra: six generators, constrained f du, closure
  {
    RunReport rep = run_cases(casebook,
                              {"heat.lie.Dt", "heat.lie.Dx", "heat.lie.G", "heat.lie.I",
                               "heat.lie.Dil", "heat.lie.Pi", "heat.lie.f",
                               "heat.algebra.closure", "heat.algebra.ideal"},
                              1);
    report(2, "heat Lie algebra: generators, f du, commutator closure", all_pass(rep, 9));
  }

  // 3. Theorem 1 branch 1: three equations matching the stored paper system
  {
    RunReport rep = run_cases(casebook, {"thm1.branch1"}, 1);
    bool ok = all_pass(rep, 1);
    std::string note;
    if (ok)
      for (const auto& line : rep.results[0].detail)
        if (line.find("derived") != std::string::npos) note = "3 equations, exact match";
    report(3, "Theorem 1 branch 1 determining system matches the paper", ok, note);
  }

  // 4. Theorem 1 branch 2: equals the cross-differentiation oracle; the diff
  //    against the printed form is emitted (expected mismatch), not asserted
  {
    RunReport oracle = run_cases(casebook, {"thm1.branch2.oracle"}, 1);
    RunReport paper = run_cases(casebook, {"thm1.branch2.paper"}, 1);
    bool ok = all_pass(oracle, 1) && paper.results.size() == 1 &&
              paper.results[0].status == CaseStatus::ExpectedMismatch;
    report(4, "Theorem 1 branch 2 equals the compatibility oracle", ok,
           ok ? "paper-form diff emitted as expected mismatch" : "");
  }

  // 5. Theorems 2-3: listed generators on the derived determining systems
  report(5, "Theorems 2-3 generators on the derived systems",
         all_pass(run_cases(casebook, {"thm2.symmetries", "thm3.symmetries"}, 1), 2));

  // 6. Theorem 4 map on fixed and >= 20 randomized triples
  report(6, "Theorem 4 nonlocal map (fixed + 20 randomized triples)",
         all_pass(run_cases(casebook, {"thm4.map"}, 1), 1));

  // 7. Theorem 5 forward witnesses, >= 20 randomized heat solutions
  report(7, "Theorem 5 hodograph witnesses (fixed + 20 randomized)",
         all_pass(run_cases(casebook, {"thm5.hodograph"}, 1), 1));

  // 8. Theorem 6: exactly one validating reading across all three cases
  {
    RunReport rep = run_cases(casebook, {"thm6.readings"}, 1);
    bool ok = all_pass(rep, 1);
    std::string resolved;
    if (ok)
      for (const auto& line : rep.results[0].detail)
        if (line.find("resolved") != std::string::npos) resolved = line;
    report(8, "Theorem 6: exactly one reading validates all cases", ok, resolved);
  }

  // 9. operators (22), closed-form solutions, polynomial families
  report(9, "transfer equation: X, Gtilde, solutions, ODE families",
         all_pass(run_cases(casebook,
                            {"transfer.qcond.X", "transfer.qcond.Gt", "transfer.sol.poly",
                             "transfer.sol.gauss", "transfer.family.T", "transfer.family.S"},
                            1),
                  6));

  // 10. counterexample triptych
  report(10, "counterexamples: 0=1 reduction, joint-vs-Lie, phi''+1",
         all_pass(run_cases(casebook,
                            {"ce.dilation.lie", "ce.dilation.reduce", "ce.e11.joint",
                             "ce.e11.lie", "ce.mix.reduce", "ce.mix.qcond"},
                            1),
                  6));

  // 11. Definition-1 degeneracy on 20 randomized pairs
  report(11, "Definition-1 M-restriction degeneracy (20 randomized)",
         all_pass(run_cases(casebook, {"prop.def1"}, 1), 1));

  // 12. Lemma: equivalence scaling preserves Q-conditional invariance
  report(12, "Lemma: random equivalence scalings preserve invariance",
         all_pass(run_cases(casebook, {"prop.lemma"}, 1), 1));

  // 13. CLI: casebook round trip and byte-identical reports for a fixed seed
  {
    Script reparsed = parse_script(print_script(casebook));
    bool round_trip = scripts_identical(casebook, reparsed);
    std::string out1 = "acceptance_cli_run1.txt";
    std::string out2 = "acceptance_cli_run2.txt";
    std::string cb = std::string("--casebook ") + QSYM_CASEBOOK_FILE + " --run-casebook --seed 7";
    int rc1 = run_cli(cb, out1);
    int rc2 = run_cli(cb, out2);
    std::string a = slurp(out1), b = slurp(out2);
    bool ok = round_trip && rc1 == 0 && rc2 == 0 && !a.empty() && a == b;
    report(13, "CLI: round-trip parse/print, byte-identical seeded runs", ok);
    std::remove(out1.c_str());
    std::remove(out2.c_str());
  }

  if (failures == 0) {
    std::printf("acceptance: all 13 criteria PASS\n");
    return 0;
  }
  std::printf("acceptance: %d criteria FAILED\n", failures);
  return 1;
}
