#include "ftl/parse.hpp"

#include <cctype>
#include <sstream>

namespace ftl {

namespace {

struct Lexer {
  const std::string& s;
  size_t i = 0;
  int line = 1, col = 1;

  explicit Lexer(const std::string& text) : s(text) {}

  void skip_ws() {
    while (i < s.size() && std::isspace((unsigned char)s[i])) {
      if (s[i] == '\n') {
        line++;
        col = 1;
      } else {
        col++;
      }
      i++;
    }
  }
  char peek() {
    skip_ws();
    return i < s.size() ? s[i] : '\0';
  }
  char get() {
    char c = peek();
    if (i < s.size()) {
      i++;
      col++;
    }
    return c;
  }
  bool eat(char c) {
    if (peek() == c) {
      get();
      return true;
    }
    return false;
  }
  [[noreturn]] void fail(const std::string& msg) {
    throw ParseError(msg, line, col);
  }
};

struct Parser {
  Lexer lx;
  int n;

  Parser(const std::string& text, int n_) : lx(text), n(n_) {}

  AstPtr mk(Ast a) { return std::make_shared<Ast>(std::move(a)); }

  int parse_int() {
    lx.skip_ws();
    if (!std::isdigit((unsigned char)lx.peek())) lx.fail("expected integer");
    int v = 0;
    while (lx.i < lx.s.size() && std::isdigit((unsigned char)lx.s[lx.i])) {
      v = v * 10 + (lx.s[lx.i] - '0');
      lx.i++;
      lx.col++;
    }
    return v;
  }

  AstPtr parse_number() {
    lx.skip_ws();
    size_t start = lx.i;
    while (lx.i < lx.s.size() &&
           (std::isdigit((unsigned char)lx.s[lx.i]) || lx.s[lx.i] == '.'))
      lx.i++, lx.col++;
    std::string num = lx.s.substr(start, lx.i - start);
    if (num.empty()) lx.fail("expected number");
    // rational literal a/b: only when the slash is followed by a digit
    if (lx.peek() == '/' && lx.i + 1 < lx.s.size() &&
        std::isdigit((unsigned char)lx.s[lx.i + 1])) {
      lx.get();
      size_t ds = lx.i;
      while (lx.i < lx.s.size() && std::isdigit((unsigned char)lx.s[lx.i]))
        lx.i++, lx.col++;
      num += "/" + lx.s.substr(ds, lx.i - ds);
    }
    Ast a;
    a.kind = Ast::Num;
    a.num = num;
    return mk(std::move(a));
  }

  AstPtr parse_call(Ast::Kind kind) {
    if (!lx.eat('(')) lx.fail("expected '('");
    AstPtr inner = parse_sum();
    if (!lx.eat(')')) lx.fail("expected ')'");
    Ast a;
    a.kind = kind;
    a.a = inner;
    return mk(std::move(a));
  }

  AstPtr parse_primary() {
    char c = lx.peek();
    if (c == '(') {
      lx.get();
      AstPtr e = parse_sum();
      if (!lx.eat(')')) lx.fail("expected ')'");
      return e;
    }
    if (c == '|') {
      lx.get();
      AstPtr inner = parse_sum();
      if (!lx.eat('|')) lx.fail("expected closing '|'");
      if (!lx.eat('^')) lx.fail("modulus requires an even power: |e|^k");
      int k = parse_int();
      if (k % 2 != 0) lx.fail("odd modulus power unsupported");
      Ast a;
      a.kind = Ast::Abs;
      a.a = inner;
      a.power = k;
      return mk(std::move(a));
    }
    if (c == '-') {
      lx.get();
      Ast a;
      a.kind = Ast::Neg;
      a.a = parse_factor();
      return mk(std::move(a));
    }
    if (std::isdigit((unsigned char)c) || c == '.') return parse_number();
    if (std::isalpha((unsigned char)c)) {
      std::string id;
      while (lx.i < lx.s.size() &&
             (std::isalnum((unsigned char)lx.s[lx.i]))) {
        id += lx.s[lx.i];
        lx.i++;
        lx.col++;
      }
      if (id == "conj") return parse_call(Ast::Conj);
      if (id == "Re") return parse_call(Ast::Re);
      if (id == "Im") return parse_call(Ast::Im);
      if (id.size() >= 2 && id[0] == 'z') {
        int slot = 0;
        for (size_t j = 1; j < id.size(); ++j) {
          if (!std::isdigit((unsigned char)id[j])) lx.fail("bad identifier '" + id + "'");
          slot = slot * 10 + (id[j] - '0');
        }
        if (slot < 1 || slot > n)
          lx.fail("variable " + id + " out of range 1.." + std::to_string(n));
        Ast a;
        a.kind = Ast::Var;
        a.var_slot = slot - 1;
        return mk(std::move(a));
      }
      lx.fail("unknown identifier '" + id + "'");
    }
    lx.fail(std::string("unexpected character '") + c + "'");
  }

  AstPtr parse_factor() {
    AstPtr base = parse_primary();
    if (lx.peek() == '^') {
      lx.get();
      int k = parse_int();
      Ast a;
      a.kind = Ast::Pow;
      a.a = base;
      a.power = k;
      return mk(std::move(a));
    }
    return base;
  }

  AstPtr parse_term() {
    AstPtr acc = parse_factor();
    while (lx.peek() == '*') {
      lx.get();
      Ast a;
      a.kind = Ast::Mul;
      a.a = acc;
      a.b = parse_factor();
      acc = mk(std::move(a));
    }
    return acc;
  }

  AstPtr parse_sum() {
    AstPtr acc = parse_term();
    for (;;) {
      char c = lx.peek();
      if (c == '+' || c == '-') {
        lx.get();
        Ast a;
        a.kind = (c == '+') ? Ast::Add : Ast::Sub;
        a.a = acc;
        a.b = parse_term();
        acc = mk(std::move(a));
      } else {
        return acc;
      }
    }
  }
};

double num_value(const std::string& s) {
  auto slash = s.find('/');
  if (slash == std::string::npos) return std::stod(s);
  return std::stod(s.substr(0, slash)) / std::stod(s.substr(slash + 1));
}

} // namespace

AstPtr parse_expr(const std::string& text, int n) {
  Parser p(text, n);
  AstPtr e = p.parse_sum();
  p.lx.skip_ws();
  if (p.lx.i != text.size())
    p.lx.fail("trailing input");
  return e;
}

std::string pretty_print(const AstPtr& a) {
  std::ostringstream os;
  switch (a->kind) {
    case Ast::Num: os << a->num; break;
    case Ast::Var: os << "z" << (a->var_slot + 1); break;
    case Ast::Conj: os << "conj(" << pretty_print(a->a) << ")"; break;
    case Ast::Re: os << "Re(" << pretty_print(a->a) << ")"; break;
    case Ast::Im: os << "Im(" << pretty_print(a->a) << ")"; break;
    case Ast::Abs: os << "|" << pretty_print(a->a) << "|^" << a->power; break;
    case Ast::Add: os << "(" << pretty_print(a->a) << " + " << pretty_print(a->b) << ")"; break;
    case Ast::Sub: os << "(" << pretty_print(a->a) << " - " << pretty_print(a->b) << ")"; break;
    case Ast::Mul: os << "(" << pretty_print(a->a) << " * " << pretty_print(a->b) << ")"; break;
    case Ast::Neg: os << "-(" << pretty_print(a->a) << ")"; break;
    case Ast::Pow: os << "(" << pretty_print(a->a) << ")^" << a->power; break;
  }
  return os.str();
}

bool ast_equal(const AstPtr& a, const AstPtr& b) {
  if (!a || !b) return a == b;
  if (a->kind != b->kind || a->num != b->num || a->var_slot != b->var_slot ||
      a->power != b->power)
    return false;
  if ((a->a != nullptr) != (b->a != nullptr)) return false;
  if ((a->b != nullptr) != (b->b != nullptr)) return false;
  if (a->a && !ast_equal(a->a, b->a)) return false;
  if (a->b && !ast_equal(a->b, b->b)) return false;
  return true;
}

CPoly ast_to_poly(const AstPtr& a, int n) {
  switch (a->kind) {
    case Ast::Num: return CPoly::constant(n, num_value(a->num));
    case Ast::Var: return CPoly::variable(n, a->var_slot);
    case Ast::Conj: return ast_to_poly(a->a, n).conj();
    case Ast::Re: {
      CPoly u = ast_to_poly(a->a, n);
      return (u + u.conj()) * Cplx(0.5);
    }
    case Ast::Im: {
      CPoly u = ast_to_poly(a->a, n);
      return (u - u.conj()) * Cplx(0.0, -0.5);
    }
    case Ast::Abs: {
      CPoly u = ast_to_poly(a->a, n);
      return (u * u.conj()).pow(a->power / 2);
    }
    case Ast::Add: return ast_to_poly(a->a, n) + ast_to_poly(a->b, n);
    case Ast::Sub: return ast_to_poly(a->a, n) - ast_to_poly(a->b, n);
    case Ast::Mul: return ast_to_poly(a->a, n) * ast_to_poly(a->b, n);
    case Ast::Neg: return ast_to_poly(a->a, n) * Cplx(-1.0);
    case Ast::Pow: return ast_to_poly(a->a, n).pow(a->power);
  }
  return CPoly(n);
}

} // namespace ftl
