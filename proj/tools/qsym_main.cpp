// Command-line driver: parses and executes analysis scripts, runs the
// casebook, and emits machine-readable summaries.

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

#include "qsym/script.hpp"

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw qsym::error("cannot open " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"qsym — Lie and Q-conditional (nonclassical) symmetry engine"};

  std::vector<std::string> scripts;
  qsym::RunOptions opts;
  bool casebook_only = false;
  app.add_option("scripts", scripts, "analysis scripts to execute in order");
  app.add_option("--casebook", opts.casebook_path, "casebook file for run-casebook / verify-case");
  app.add_option("--emit-summary", opts.summary_path, "write a JSON summary to this path");
  app.add_option("--max-order", opts.max_order,
                 "consequence-closure order cap (default: 2 * equation order)");
  app.add_option("--seed", opts.seed, "seed for randomized property directives");
  app.add_flag("--parallel", opts.parallel,
               "run independent directives concurrently (output order unchanged)");
  app.add_flag("--run-casebook", casebook_only, "execute the casebook file and exit");

  CLI11_PARSE(app, argc, argv);

  if (scripts.empty() && !casebook_only) {
    std::cerr << "no scripts given (use --run-casebook to execute the casebook)\n";
    return 2;
  }

  try {
    bool all_ok = true;
    qsym::RunReport merged;
    auto run_source = [&](const std::string& source, const std::string& name) {
      qsym::Script s = qsym::parse_script(source, name);
      qsym::RunOptions local = opts;
      local.summary_path.clear();  // merged summary written once at the end
      qsym::RunReport rep = qsym::run_script(s, local, std::cout);
      all_ok = all_ok && rep.ok();
      for (auto& r : rep.results) merged.results.push_back(std::move(r));
      merged.passed += rep.passed;
      merged.failed += rep.failed;
      merged.expected_mismatch += rep.expected_mismatch;
      merged.errors += rep.errors;
    };
    if (casebook_only) {
      if (opts.casebook_path.empty()) throw qsym::error("--run-casebook requires --casebook PATH");
      run_source(read_file(opts.casebook_path), opts.casebook_path);
    }
    for (const auto& path : scripts) run_source(read_file(path), path);
    if (!opts.summary_path.empty()) {
      std::ofstream sf(opts.summary_path);
      if (!sf) throw qsym::error("cannot write " + opts.summary_path);
      sf << qsym::summary_json(merged);
    }
    return all_ok ? 0 : 1;
  } catch (const qsym::parse_error& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return 2;
  } catch (const qsym::error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
