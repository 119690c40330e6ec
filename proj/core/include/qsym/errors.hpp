#ifndef QSYM_ERRORS_HPP
#define QSYM_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace qsym {

/// Base class for all engine errors.
class error : public std::runtime_error {
 public:
  explicit error(const std::string& what) : std::runtime_error(what) {}
};

/// Symbol used outside its context, mixed contexts, undeclared names.
class context_error : public error {
 public:
  explicit context_error(const std::string& what) : error(what) {}
};

/// Mathematically invalid request: division by zero, zero determinant,
/// non-polynomial dependence where a polynomial is required, etc.
class math_error : public error {
 public:
  explicit math_error(const std::string& what) : error(what) {}
};

/// Rewrite/closure failures: order cap exceeded, cyclic rules,
/// degenerate invariant-surface conditions.
class rewrite_error : public error {
 public:
  explicit rewrite_error(const std::string& what) : error(what) {}
};

/// DSL syntax or resolution failure; carries line/column.
class parse_error : public error {
 public:
  parse_error(const std::string& what, int line, int column)
      : error(what + " (line " + std::to_string(line) + ", col " +
              std::to_string(column) + ")"),
        line_(line),
        column_(column) {}
  int line() const { return line_; }
  int column() const { return column_; }

 private:
  int line_;
  int column_;
};

}  // namespace qsym

#endif
