#include "killingflow/expr.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <numbers>
#include <string_view>
#include <system_error>

namespace kflow {

namespace {

std::string join_expected(const std::vector<std::string>& expected) {
  std::string out;
  for (std::size_t i = 0; i < expected.size(); ++i) {
    if (i > 0) out += i + 1 == expected.size() ? " or " : ", ";
    out += "\"" + expected[i] + "\"";
  }
  return out;
}

struct FunctionEntry {
  std::string_view name;
  ExprFunction f;
};

constexpr std::array<FunctionEntry, 12> kFunctions{{{"sin", ExprFunction::sin},
                                                    {"cos", ExprFunction::cos},
                                                    {"tan", ExprFunction::tan},
                                                    {"sinh", ExprFunction::sinh},
                                                    {"cosh", ExprFunction::cosh},
                                                    {"tanh", ExprFunction::tanh},
                                                    {"exp", ExprFunction::exp},
                                                    {"log", ExprFunction::log},
                                                    {"sqrt", ExprFunction::sqrt},
                                                    {"abs", ExprFunction::abs},
                                                    {"min", ExprFunction::min},
                                                    {"max", ExprFunction::max}}};

enum class Tok { number, ident, plus, minus, star, slash, caret, lparen, rparen, comma, end, bad };

struct Token {
  Tok kind = Tok::end;
  std::size_t offset = 0;
  std::string_view text;
  double value = 0.0;
};

std::string describe(const Token& t) {
  if (t.kind == Tok::end) return "end of input";
  return "\"" + std::string(t.text) + "\"";
}

bool is_ident_start(char c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_';
}
bool is_digit(char c) { return c >= '0' && c <= '9'; }

class Parser {
 public:
  explicit Parser(std::string_view src) : src_(src) { advance(); }

  std::shared_ptr<const ExprNode> parse() {
    if (tok_.kind == Tok::end) fail({"number", "identifier", "(", "-"});
    auto root = expr();
    if (tok_.kind != Tok::end) fail({"+", "-", "*", "/", "^", "end of input"});
    return root;
  }

 private:
  [[noreturn]] void fail(std::vector<std::string> expected) const {
    throw ExprSyntaxError(tok_.offset, std::move(expected), describe(tok_));
  }

  void advance() {
    std::size_t i = pos_;
    while (i < src_.size() && (src_[i] == ' ' || src_[i] == '\t' || src_[i] == '\n' || src_[i] == '\r')) ++i;
    tok_ = Token{};
    tok_.offset = i;
    if (i >= src_.size()) {
      tok_.kind = Tok::end;
      pos_ = i;
      return;
    }
    const char c = src_[i];
    if (is_digit(c) || (c == '.' && i + 1 < src_.size() && is_digit(src_[i + 1]))) {
      std::size_t j = i;
      while (j < src_.size() && is_digit(src_[j])) ++j;
      if (j < src_.size() && src_[j] == '.') {
        ++j;
        while (j < src_.size() && is_digit(src_[j])) ++j;
      }
      if (j < src_.size() && (src_[j] == 'e' || src_[j] == 'E')) {
        std::size_t k = j + 1;
        if (k < src_.size() && (src_[k] == '+' || src_[k] == '-')) ++k;
        if (k < src_.size() && is_digit(src_[k])) {
          while (k < src_.size() && is_digit(src_[k])) ++k;
          j = k;
        }
      }
      tok_.kind = Tok::number;
      tok_.text = src_.substr(i, j - i);
      const auto res = std::from_chars(src_.data() + i, src_.data() + j, tok_.value);
      if (res.ec != std::errc{} || !std::isfinite(tok_.value)) {
        throw ExprSyntaxError(i, {"finite number"}, "\"" + std::string(tok_.text) + "\"");
      }
      pos_ = j;
      return;
    }
    if (is_ident_start(c)) {
      std::size_t j = i + 1;
      while (j < src_.size() && (is_ident_start(src_[j]) || is_digit(src_[j]))) ++j;
      tok_.kind = Tok::ident;
      tok_.text = src_.substr(i, j - i);
      pos_ = j;
      return;
    }
    switch (c) {
      case '+': tok_.kind = Tok::plus; break;
      case '-': tok_.kind = Tok::minus; break;
      case '*': tok_.kind = Tok::star; break;
      case '/': tok_.kind = Tok::slash; break;
      case '^': tok_.kind = Tok::caret; break;
      case '(': tok_.kind = Tok::lparen; break;
      case ')': tok_.kind = Tok::rparen; break;
      case ',': tok_.kind = Tok::comma; break;
      default: tok_.kind = Tok::bad; break;
    }
    tok_.text = src_.substr(i, 1);
    pos_ = i + 1;
  }

  static std::shared_ptr<const ExprNode> binary(ExprOp op, std::shared_ptr<const ExprNode> a,
                                                std::shared_ptr<const ExprNode> b) {
    auto n = std::make_shared<ExprNode>();
    n->op = op;
    n->args = {std::move(a), std::move(b)};
    return n;
  }

  std::shared_ptr<const ExprNode> expr() {
    auto lhs = term();
    while (tok_.kind == Tok::plus || tok_.kind == Tok::minus) {
      const ExprOp op = tok_.kind == Tok::plus ? ExprOp::add : ExprOp::subtract;
      advance();
      lhs = binary(op, lhs, term());
    }
    return lhs;
  }

  std::shared_ptr<const ExprNode> term() {
    auto lhs = unary();
    while (tok_.kind == Tok::star || tok_.kind == Tok::slash) {
      const ExprOp op = tok_.kind == Tok::star ? ExprOp::multiply : ExprOp::divide;
      advance();
      lhs = binary(op, lhs, unary());
    }
    return lhs;
  }

  std::shared_ptr<const ExprNode> unary() {
    if (tok_.kind == Tok::minus) {
      advance();
      auto n = std::make_shared<ExprNode>();
      n->op = ExprOp::negate;
      n->args = {unary()};
      return n;
    }
    return power();
  }

  std::shared_ptr<const ExprNode> power() {
    auto base = primary();
    if (tok_.kind == Tok::caret) {
      advance();
      return binary(ExprOp::power, base, unary());
    }
    return base;
  }

  std::shared_ptr<const ExprNode> primary() {
    auto n = std::make_shared<ExprNode>();
    switch (tok_.kind) {
      case Tok::number:
        n->value = tok_.value;
        advance();
        return n;
      case Tok::lparen: {
        advance();
        auto inner = expr();
        if (tok_.kind != Tok::rparen) fail({")"});
        advance();
        return inner;
      }
      case Tok::ident:
        break;
      default:
        fail({"number", "identifier", "(", "-"});
    }
    const std::string_view name = tok_.text;
    const std::size_t at = tok_.offset;
    if (name == "r" || name == "theta" || name == "t") {
      n->op = name == "r" ? ExprOp::var_r : name == "theta" ? ExprOp::var_theta : ExprOp::var_t;
      advance();
      return n;
    }
    if (name == "pi") {
      n->value = std::numbers::pi;
      advance();
      return n;
    }
    for (const auto& entry : kFunctions) {
      if (entry.name != name) continue;
      advance();
      if (tok_.kind != Tok::lparen) fail({"("});
      advance();
      n->op = ExprOp::call;
      n->function = entry.f;
      const int count = arity(entry.f);
      for (int k = 0; k < count; ++k) {
        n->args.push_back(expr());
        if (k + 1 < count) {
          if (tok_.kind != Tok::comma) fail({","});
          advance();
        }
      }
      if (tok_.kind != Tok::rparen) fail({")"});
      advance();
      return n;
    }
    throw UnknownIdentifierError(at, std::string(name));
  }

  std::string_view src_;
  std::size_t pos_ = 0;
  Token tok_;
};

double apply(ExprFunction f, double a, double b) {
  switch (f) {
    case ExprFunction::sin: return std::sin(a);
    case ExprFunction::cos: return std::cos(a);
    case ExprFunction::tan: return std::tan(a);
    case ExprFunction::sinh: return std::sinh(a);
    case ExprFunction::cosh: return std::cosh(a);
    case ExprFunction::tanh: return std::tanh(a);
    case ExprFunction::exp: return std::exp(a);
    case ExprFunction::log:
      if (!(a > 0.0)) throw DomainError("log of a nonpositive argument");
      return std::log(a);
    case ExprFunction::sqrt:
      if (a < 0.0) throw DomainError("sqrt of a negative argument");
      return std::sqrt(a);
    case ExprFunction::abs: return std::abs(a);
    case ExprFunction::min: return std::min(a, b);
    case ExprFunction::max: return std::max(a, b);
  }
  return 0.0;
}

double eval_node(const ExprNode& n, const Variables& v) {
  switch (n.op) {
    case ExprOp::number: return n.value;
    case ExprOp::var_r: return v.r;
    case ExprOp::var_theta: return v.theta;
    case ExprOp::var_t: return v.t;
    case ExprOp::negate: return -eval_node(*n.args[0], v);
    case ExprOp::add: return eval_node(*n.args[0], v) + eval_node(*n.args[1], v);
    case ExprOp::subtract: return eval_node(*n.args[0], v) - eval_node(*n.args[1], v);
    case ExprOp::multiply: return eval_node(*n.args[0], v) * eval_node(*n.args[1], v);
    case ExprOp::divide: return eval_node(*n.args[0], v) / eval_node(*n.args[1], v);
    case ExprOp::power: return std::pow(eval_node(*n.args[0], v), eval_node(*n.args[1], v));
    case ExprOp::call: {
      const double a = eval_node(*n.args[0], v);
      const double b = n.args.size() > 1 ? eval_node(*n.args[1], v) : 0.0;
      return apply(n.function, a, b);
    }
  }
  return 0.0;
}

// Binding strength used by the printer: sums 1, products 2, unary minus 3, powers 4, atoms 5.
int strength(const ExprNode& n) {
  switch (n.op) {
    case ExprOp::add:
    case ExprOp::subtract: return 1;
    case ExprOp::multiply:
    case ExprOp::divide: return 2;
    case ExprOp::negate: return 3;
    case ExprOp::power: return 4;
    case ExprOp::number: return std::signbit(n.value) ? 3 : 5;
    default: return 5;
  }
}

std::string format_number(double x) {
  if (x == std::numbers::pi) return "pi";
  std::array<char, 64> buf{};
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), std::abs(x));
  std::string digits(buf.data(), res.ptr);
  return std::signbit(x) ? "-" + digits : digits;
}

void print(const ExprNode& n, std::string& out);

void print_wrapped(const ExprNode& n, bool wrap, std::string& out) {
  if (wrap) out += '(';
  print(n, out);
  if (wrap) out += ')';
}

void print(const ExprNode& n, std::string& out) {
  switch (n.op) {
    case ExprOp::number: out += format_number(n.value); return;
    case ExprOp::var_r: out += 'r'; return;
    case ExprOp::var_theta: out += "theta"; return;
    case ExprOp::var_t: out += 't'; return;
    case ExprOp::negate:
      out += '-';
      print_wrapped(*n.args[0], strength(*n.args[0]) < 3, out);
      return;
    case ExprOp::call:
      out += to_string(n.function);
      out += '(';
      for (std::size_t k = 0; k < n.args.size(); ++k) {
        if (k > 0) out += ", ";
        print(*n.args[k], out);
      }
      out += ')';
      return;
    default:
      break;
  }
  const int s = strength(n);
  const auto& lhs = *n.args[0];
  const auto& rhs = *n.args[1];
  const char* sym = n.op == ExprOp::add        ? " + "
                    : n.op == ExprOp::subtract ? " - "
                    : n.op == ExprOp::multiply ? "*"
                    : n.op == ExprOp::divide   ? "/"
                                               : "^";
  if (n.op == ExprOp::power) {
    // the base is a primary; the exponent is parsed as a unary
    print_wrapped(lhs, strength(lhs) <= 4, out);
    out += sym;
    print_wrapped(rhs, strength(rhs) < 3, out);
    return;
  }
  print_wrapped(lhs, strength(lhs) < s, out);
  out += sym;
  print_wrapped(rhs, strength(rhs) <= s, out);
}

bool uses(const ExprNode& n, ExprOp var) {
  if (n.op == var) return true;
  for (const auto& a : n.args) {
    if (uses(*a, var)) return true;
  }
  return false;
}

}  // namespace

ExprSyntaxError::ExprSyntaxError(std::size_t offset, std::vector<std::string> expected,
                                 const std::string& found)
    : Error("syntax error at offset " + std::to_string(offset) + ": expected " +
            join_expected(expected) + ", found " + found),
      offset(offset),
      expected(std::move(expected)) {}

UnknownIdentifierError::UnknownIdentifierError(std::size_t offset, const std::string& name)
    : Error("unknown identifier \"" + name + "\" at offset " + std::to_string(offset) +
            " (variables are r, theta, t)"),
      offset(offset),
      name(name) {}

std::string to_string(ExprFunction f) {
  for (const auto& entry : kFunctions) {
    if (entry.f == f) return std::string(entry.name);
  }
  return "?";
}

int arity(ExprFunction f) { return f == ExprFunction::min || f == ExprFunction::max ? 2 : 1; }

Expr parse_expression(const std::string& src) { return Expr(Parser(src).parse()); }

double Expr::eval(const Variables& vars) const {
  if (!root_) throw ParameterError("evaluating an empty expression");
  return eval_node(*root_, vars);
}

std::string Expr::to_string() const {
  std::string out;
  if (root_) print(*root_, out);
  return out;
}

bool Expr::uses_r() const { return root_ && uses(*root_, ExprOp::var_r); }
bool Expr::uses_theta() const { return root_ && uses(*root_, ExprOp::var_theta); }
bool Expr::uses_t() const { return root_ && uses(*root_, ExprOp::var_t); }

}  // namespace kflow
