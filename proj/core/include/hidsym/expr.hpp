#pragma once

// Immutable symbolic expressions over coordinates, parameters and a small set
// of elementary functions. Constants are exact rationals; floating point only
// enters at evaluation time.

#include <cstdint>
#include <map>
#include <memory>
#include <set>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "hidsym/rational.hpp"

namespace hidsym {

enum class Op : std::uint8_t {
  Const,
  Param,
  Coord,
  Sum,
  Product,
  Quotient,
  Power,
  Neg,
  Sin,
  Cos,
  Tan,
  Exp,
  Log,
  Sqrt,
};

/// Coordinate name -> value.
using Point = std::map<std::string, double>;
/// Parameter name -> value (e.g. the NUT parameter m).
using ParamEnv = std::map<std::string, double>;

class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, std::size_t offset)
      : std::runtime_error(what + " at offset " + std::to_string(offset)), offset_(offset) {}
  [[nodiscard]] std::size_t offset() const { return offset_; }

 private:
  std::size_t offset_;
};

/// log of a non-positive number, division by zero, sqrt of a negative.
class DomainError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class UnboundNameError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Node;

class Expr {
 public:
  Expr();                                   // constant 0
  Expr(Rational c);                         // NOLINT(implicit)
  Expr(std::int64_t c) : Expr(Rational(c)) {}  // NOLINT(implicit)
  Expr(int c) : Expr(Rational(c)) {}           // NOLINT(implicit)

  static Expr coord(std::string name);
  static Expr param(std::string name);

  [[nodiscard]] Op op() const;
  /// Constant value, or the exponent of a Power node.
  [[nodiscard]] const Rational& value() const;
  [[nodiscard]] const std::string& name() const;
  [[nodiscard]] std::span<const Expr> args() const;
  [[nodiscard]] std::size_t hash() const;
  [[nodiscard]] const Node* id() const { return node_.get(); }

  [[nodiscard]] bool is_const() const { return op() == Op::Const; }
  [[nodiscard]] bool is_zero() const { return is_const() && value().is_zero(); }
  [[nodiscard]] bool is_one() const { return is_const() && value().is_one(); }

  /// Structural equality.
  friend bool operator==(const Expr& a, const Expr& b);
  friend bool operator!=(const Expr& a, const Expr& b) { return !(a == b); }

  // Construction from a prepared node; used by the smart constructors.
  explicit Expr(std::shared_ptr<const Node> n) : node_(std::move(n)) {}

 private:
  std::shared_ptr<const Node> node_;
};

struct Node {
  Op op = Op::Const;
  Rational value;
  std::string name;
  std::vector<Expr> args;
  std::size_t hash = 0;
};

/// Total structural order (negative, zero, positive).
int compare(const Expr& a, const Expr& b);

struct ExprHash {
  std::size_t operator()(const Expr& e) const { return e.hash(); }
};

// Smart constructors. They fold constants, drop 0/1 identities and flatten
// nested sums/products but otherwise keep the tree shape.
Expr make_sum(std::vector<Expr> terms);
Expr make_product(std::vector<Expr> factors);
Expr make_quotient(const Expr& num, const Expr& den);
Expr make_power(const Expr& base, const Rational& exponent);
Expr make_neg(const Expr& e);
Expr make_function(Op fn, const Expr& arg);

Expr operator+(const Expr& a, const Expr& b);
Expr operator-(const Expr& a, const Expr& b);
Expr operator*(const Expr& a, const Expr& b);
Expr operator/(const Expr& a, const Expr& b);
Expr operator-(const Expr& a);
inline Expr& operator+=(Expr& a, const Expr& b) { return a = a + b; }
inline Expr& operator-=(Expr& a, const Expr& b) { return a = a - b; }
inline Expr& operator*=(Expr& a, const Expr& b) { return a = a * b; }

Expr pow(const Expr& base, const Rational& exponent);
Expr sin(const Expr& e);
Expr cos(const Expr& e);
Expr tan(const Expr& e);
Expr exp(const Expr& e);
Expr log(const Expr& e);
Expr sqrt(const Expr& e);

/// Infix rendering in the same grammar `parse` accepts.
std::string to_string(const Expr& e);
std::ostream& operator<<(std::ostream& os, const Expr& e);

/// Parses infix text. Identifiers listed in `coordinates` become coordinate
/// references; every other identifier is a parameter reference.
Expr parse(std::string_view src, const std::set<std::string>& coordinates = {});

/// Exact partial derivative with respect to a coordinate.
Expr differentiate(const Expr& e, std::string_view var);

/// Memoizing differentiator; reuse one instance when differentiating many
/// expressions that share subtrees.
class Differentiator {
 public:
  explicit Differentiator(std::string var) : var_(std::move(var)) {}
  Expr operator()(const Expr& e);
  [[nodiscard]] const std::string& var() const { return var_; }

 private:
  std::string var_;
  std::unordered_map<const Node*, std::pair<Expr, Expr>> cache_;
};

/// Replaces coordinate references by expressions.
Expr substitute(const Expr& e, const std::map<std::string, Expr>& replacements);

std::set<std::string> free_coordinates(const Expr& e);
std::set<std::string> free_parameters(const Expr& e);

/// Number of distinct nodes in the DAG.
std::size_t dag_size(const Expr& e);

double evaluate(const Expr& e, const Point& p, const ParamEnv& env);

/// A batch of expressions flattened into a shared-subexpression instruction
/// list. Coordinates are bound positionally, parameters at compile time.
class Program {
 public:
  Program() = default;
  Program(std::span<const Expr> exprs, std::vector<std::string> coordinates,
          const ParamEnv& env);

  [[nodiscard]] std::size_t outputs() const { return outputs_.size(); }
  [[nodiscard]] std::size_t instructions() const { return code_.size(); }

  /// Evaluates all outputs at coordinate values `x` (chart order).
  void run(std::span<const double> x, std::span<double> out) const;
  [[nodiscard]] std::vector<double> operator()(std::span<const double> x) const;

 private:
  struct Instr {
    Op op;
    double constant = 0.0;
    double exponent = 0.0;
    bool integer_exponent = false;
    int slot = -1;        // coordinate slot
    std::uint32_t first = 0;  // into args_
    std::uint32_t count = 0;
  };
  std::vector<Instr> code_;
  std::vector<std::uint32_t> args_;
  std::vector<std::uint32_t> outputs_;
  std::vector<std::string> coordinates_;
};

}  // namespace hidsym
