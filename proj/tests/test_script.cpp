#include <doctest.h>

#include <fstream>
#include <sstream>

#include <qsym/script.hpp>

using namespace qsym;

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  REQUIRE(in);
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

const char* kSample = R"(
context heat2d;
vars t x;
dep u;
param A w;
unknown f(t,x) phi(w);
eq heat: u_t = u_xx;
op G: t*dx - 1/2*x*u*du;
op Dt: dt;
constraint fheat: d(f,t) = d(f,x,2);
case a: check-lie heat G expect pass;
case b: bracket Dt G expect dx;
print u_xx + exp(u) - x^(1/2);
)";

}  // namespace

TEST_CASE("parse and execute a small script") {
  Script s = parse_script(kSample);
  CHECK(s.equations.count("heat") == 1);
  CHECK(s.operators.count("G") == 1);
  CHECK(s.constraints.count("fheat") == 1);
  std::ostringstream out;
  RunReport rep = run_script(s, RunOptions{}, out);
  CHECK(rep.ok());
  CHECK(rep.passed == 3);
  CHECK(out.str().find("[PASS] a") != std::string::npos);
}

TEST_CASE("round-trip: parse(print(parse(s))) is identical") {
  Script s1 = parse_script(kSample);
  std::string printed = print_script(s1);
  Script s2 = parse_script(printed);
  CHECK(scripts_identical(s1, s2));
  // and printing is a fixed point from the first print on
  CHECK(print_script(s2) == printed);
}

TEST_CASE("round-trip on the casebook") {
  std::string source = read_file(QSYM_CASEBOOK_FILE);
  Script s1 = parse_script(source, QSYM_CASEBOOK_FILE);
  Script s2 = parse_script(print_script(s1));
  CHECK(scripts_identical(s1, s2));
}

TEST_CASE("deterministic reports") {
  const char* src = R"(
context c; vars t x; dep u;
eq heat: u_t = u_xx;
op Dil: 2*t*dt + x*dx;
op Pi: 4*t^2*dt + 4*t*x*dx - (x^2 + 2*t)*u*du;
case one: check-lie heat Pi expect pass;
case two: closure ops(Dil, Pi) expect fail;
print (u_x + u)^3 / (t*x - 1);
)";
  RunOptions opts;
  opts.seed = 42;
  std::ostringstream out1, out2;
  run_script(parse_script(src), opts, out1);
  run_script(parse_script(src), opts, out2);
  CHECK(out1.str() == out2.str());
  // summaries are byte-identical as well
  RunReport r1, r2;
  std::ostringstream sink;
  r1 = run_script(parse_script(src), opts, sink);
  r2 = run_script(parse_script(src), opts, sink);
  CHECK(summary_json(r1) == summary_json(r2));
}

TEST_CASE("parallel execution keeps the output order") {
  const char* src = R"(
context c; vars t x; dep u;
eq heat: u_t = u_xx;
op Dt: dt;
op Dx: dx;
op G: t*dx - 1/2*x*u*du;
case a1: check-lie heat Dt expect pass;
case a2: check-lie heat Dx expect pass;
case a3: check-lie heat G expect pass;
case a4: check-qcond heat G expect pass;
)";
  std::ostringstream seq, par;
  RunOptions opts;
  run_script(parse_script(src), opts, seq);
  opts.parallel = true;
  run_script(parse_script(src), opts, par);
  CHECK(seq.str() == par.str());
}

TEST_CASE("parse errors carry position and message") {
  CHECK_THROWS_AS(parse_script("vars t x; dep u; eq e: u_t = ;"), parse_error);
  CHECK_THROWS_AS(parse_script("vars t x; dep u; op Q: t*dy;"), parse_error);      // unknown basis
  CHECK_THROWS_AS(parse_script("vars t x; dep u; print nope;"), parse_error);      // undeclared
  CHECK_THROWS_AS(parse_script("vars t x; dep u; unknown f(q);"), parse_error);    // bad signature
  CHECK_THROWS_AS(parse_script("vars t x; dep u; eq e: u_t = u_tx;"), error);      // not solved form
  try {
    parse_script("vars t x;\ndep u;\nprint nope;");
  } catch (const parse_error& e) {
    CHECK(e.line() == 3);
  }
}

TEST_CASE("exit-status contract: failures surface") {
  const char* src = R"(
context c; vars t x; dep u;
eq heat: u_t = u_xx;
op Bad: dx + u*u*dt;
case fails: check-lie heat Bad expect pass;
)";
  std::ostringstream out;
  RunReport rep = run_script(parse_script(src), RunOptions{}, out);
  CHECK_FALSE(rep.ok());
  CHECK(rep.failed == 1);
}

TEST_CASE("expected mismatch is a distinct status") {
  const char* src = R"(
context c; vars t x; dep u;
unknown theta(t,x,u);
eq heat: u_t = u_xx;
template T2: dx + theta*du;
case paper: derive qcond heat T2
  expect mismatch system(d(theta,t) + d(theta,x,2) + 2*theta*d(theta,x,u) - theta^2*d(theta,u,2) = 0)
  note "printed form differs";
)";
  std::ostringstream out;
  RunReport rep = run_script(parse_script(src), RunOptions{}, out);
  CHECK(rep.ok());
  CHECK(rep.expected_mismatch == 1);
  CHECK(out.str().find("[XMISM]") != std::string::npos);
}
