#pragma once

#include <memory>
#include <string>
#include <vector>

#include "killingflow/errors.hpp"

namespace kflow {

// Arithmetic expressions over the variables r, theta, t:
//   expr    := term (('+' | '-') term)*
//   term    := unary (('*' | '/') unary)*
//   unary   := '-' unary | power
//   power   := primary ('^' unary)?          right associative, binds tighter than unary minus
//   primary := number | variable | 'pi' | function '(' expr (',' expr)* ')' | '(' expr ')'
// Functions: sin cos tan sinh cosh tanh exp log sqrt abs (one argument), min max (two).

struct ExprSyntaxError : Error {
  ExprSyntaxError(std::size_t offset, std::vector<std::string> expected, const std::string& found);
  std::size_t offset;
  std::vector<std::string> expected;
};

struct UnknownIdentifierError : Error {
  UnknownIdentifierError(std::size_t offset, const std::string& name);
  std::size_t offset;
  std::string name;
};

struct Variables {
  double r = 0.0;
  double theta = 0.0;
  double t = 0.0;
};

enum class ExprOp {
  number,
  var_r,
  var_theta,
  var_t,
  negate,
  add,
  subtract,
  multiply,
  divide,
  power,
  call
};

enum class ExprFunction { sin, cos, tan, sinh, cosh, tanh, exp, log, sqrt, abs, min, max };

struct ExprNode {
  ExprOp op = ExprOp::number;
  double value = 0.0;                 // number
  ExprFunction function = ExprFunction::sin;  // call
  std::vector<std::shared_ptr<const ExprNode>> args;
};

class Expr {
 public:
  Expr() = default;
  explicit Expr(std::shared_ptr<const ExprNode> root) : root_(std::move(root)) {}

  // log of a nonpositive number and sqrt of a negative number raise DomainError.
  double eval(const Variables& vars) const;
  double operator()(double r, double theta, double t = 0.0) const { return eval({r, theta, t}); }

  // Minimal-parenthesis form that parses back to the same tree; numbers use
  // the shortest round-trip decimal form.
  std::string to_string() const;

  bool uses_r() const;
  bool uses_theta() const;
  bool uses_t() const;
  const ExprNode* root() const { return root_.get(); }
  bool empty() const { return !root_; }

 private:
  std::shared_ptr<const ExprNode> root_;
};

Expr parse_expression(const std::string& src);

std::string to_string(ExprFunction f);
int arity(ExprFunction f);

}  // namespace kflow
