#ifndef FTL_PARSE_HPP
#define FTL_PARSE_HPP

#include <memory>
#include <stdexcept>
#include <string>

#include "ftl/cpoly.hpp"

namespace ftl {

/// Expression grammar for domain definition files:
///   complex variables z1..zn, conj(e), |e|^k (even k), +, -, *, integer
///   powers e^k, Re(e), Im(e), real rational literals (ints, decimals, a/b).
struct Ast;
using AstPtr = std::shared_ptr<const Ast>;

struct Ast {
  enum Kind { Num, Var, Conj, Re, Im, Abs, Add, Sub, Mul, Neg, Pow } kind;
  std::string num;       // Num: literal text as written
  int var_slot = 0;      // Var: 0-based
  int power = 0;         // Abs / Pow exponent
  AstPtr a, b;
};

struct ParseError : std::runtime_error {
  int line, col;
  ParseError(const std::string& msg, int line_, int col_)
      : std::runtime_error(msg + " at line " + std::to_string(line_) +
                           ", col " + std::to_string(col_)),
        line(line_), col(col_) {}
};

/// Parse an expression over variables z1..zn. Throws ParseError with
/// line/column diagnostics.
AstPtr parse_expr(const std::string& text, int n);

/// Canonical text form; parse_expr(pretty_print(a)) is structurally equal to a.
std::string pretty_print(const AstPtr& a);

bool ast_equal(const AstPtr& a, const AstPtr& b);

/// Lower to an exact polynomial in n complex variables.
CPoly ast_to_poly(const AstPtr& a, int n);

} // namespace ftl

#endif
