#include "hidsym/expr.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <functional>
#include <ostream>
#include <sstream>
#include <unordered_set>

namespace hidsym {

namespace {

std::size_t mix(std::size_t seed, std::size_t v) {
  return seed ^ (v + 0x9e3779b97f4a7c15ULL + (seed << 6) + (seed >> 2));
}

Expr make_node(Op op, Rational value, std::string name, std::vector<Expr> args) {
  auto n = std::make_shared<Node>();
  n->op = op;
  n->value = value;
  n->name = std::move(name);
  n->args = std::move(args);
  std::size_t h = mix(static_cast<std::size_t>(op) + 1, n->value.hash());
  h = mix(h, std::hash<std::string>{}(n->name));
  for (const auto& a : n->args) h = mix(h, a.hash());
  n->hash = h;
  return Expr(std::shared_ptr<const Node>(std::move(n)));
}

const Expr& zero_expr() {
  static const Expr z = make_node(Op::Const, Rational(0), {}, {});
  return z;
}

const char* function_name(Op op) {
  switch (op) {
    case Op::Sin: return "sin";
    case Op::Cos: return "cos";
    case Op::Tan: return "tan";
    case Op::Exp: return "exp";
    case Op::Log: return "log";
    case Op::Sqrt: return "sqrt";
    default: return "?";
  }
}

// Exact integer n-th root if it exists.
bool exact_root(std::int64_t v, std::int64_t n, std::int64_t& out) {
  if (v < 0) return false;
  auto r = static_cast<std::int64_t>(std::llround(std::pow(static_cast<double>(v), 1.0 / n)));
  for (std::int64_t c = std::max<std::int64_t>(0, r - 1); c <= r + 1; ++c) {
    __int128 p = 1;
    for (std::int64_t i = 0; i < n; ++i) p *= c;
    if (p == v) {
      out = c;
      return true;
    }
  }
  return false;
}

}  // namespace

// ---------------------------------------------------------------------------
// Expr basics

Expr::Expr() : node_(zero_expr().node_) {}

Expr::Expr(Rational c) : Expr(c.is_zero() ? zero_expr() : make_node(Op::Const, c, {}, {})) {}

Expr Expr::coord(std::string name) { return make_node(Op::Coord, {}, std::move(name), {}); }
Expr Expr::param(std::string name) { return make_node(Op::Param, {}, std::move(name), {}); }

Op Expr::op() const { return node_->op; }
const Rational& Expr::value() const { return node_->value; }
const std::string& Expr::name() const { return node_->name; }
std::span<const Expr> Expr::args() const { return node_->args; }
std::size_t Expr::hash() const { return node_->hash; }

bool operator==(const Expr& a, const Expr& b) {
  if (a.node_ == b.node_) return true;
  if (a.hash() != b.hash()) return false;
  const Node& x = *a.node_;
  const Node& y = *b.node_;
  if (x.op != y.op || !(x.value == y.value) || x.name != y.name || x.args.size() != y.args.size())
    return false;
  for (std::size_t i = 0; i < x.args.size(); ++i)
    if (!(x.args[i] == y.args[i])) return false;
  return true;
}

int compare(const Expr& a, const Expr& b) {
  if (a.id() == b.id()) return 0;
  if (a.op() != b.op()) return a.op() < b.op() ? -1 : 1;
  if (!(a.value() == b.value())) return a.value() < b.value() ? -1 : 1;
  if (int c = a.name().compare(b.name()); c != 0) return c < 0 ? -1 : 1;
  auto aa = a.args();
  auto ba = b.args();
  if (aa.size() != ba.size()) return aa.size() < ba.size() ? -1 : 1;
  for (std::size_t i = 0; i < aa.size(); ++i)
    if (int c = compare(aa[i], ba[i]); c != 0) return c;
  return 0;
}

// ---------------------------------------------------------------------------
// Smart constructors

Expr make_sum(std::vector<Expr> terms) {
  std::vector<Expr> flat;
  flat.reserve(terms.size());
  Rational c(0);
  for (auto& t : terms) {
    if (t.op() == Op::Sum) {
      for (const auto& s : t.args()) {
        if (s.is_const())
          c += s.value();
        else
          flat.push_back(s);
      }
    } else if (t.is_const()) {
      c += t.value();
    } else {
      flat.push_back(std::move(t));
    }
  }
  if (!c.is_zero()) flat.emplace_back(c);
  if (flat.empty()) return Expr();
  if (flat.size() == 1) return flat.front();
  return make_node(Op::Sum, {}, {}, std::move(flat));
}

Expr make_neg(const Expr& e) {
  switch (e.op()) {
    case Op::Const:
      return Expr(-e.value());
    case Op::Neg:
      return e.args()[0];
    case Op::Product: {
      auto args = e.args();
      if (args[0].is_const()) {
        Rational c = -args[0].value();
        std::vector<Expr> rest(args.begin() + 1, args.end());
        if (c.is_one()) return rest.size() == 1 ? rest[0] : make_node(Op::Product, {}, {}, rest);
        rest.insert(rest.begin(), Expr(c));
        return make_node(Op::Product, {}, {}, std::move(rest));
      }
      return make_node(Op::Neg, {}, {}, {e});
    }
    default:
      return make_node(Op::Neg, {}, {}, {e});
  }
}

Expr make_product(std::vector<Expr> factors) {
  std::vector<Expr> others;
  others.reserve(factors.size());
  Rational c(1);
  std::function<void(const Expr&)> absorb = [&](const Expr& f) {
    switch (f.op()) {
      case Op::Const:
        c *= f.value();
        break;
      case Op::Neg:
        c = -c;
        absorb(f.args()[0]);
        break;
      case Op::Product:
        for (const auto& g : f.args()) absorb(g);
        break;
      default:
        others.push_back(f);
    }
  };
  for (const auto& f : factors) {
    absorb(f);
    if (c.is_zero()) return Expr();
  }
  if (others.empty()) return Expr(c);
  Expr body = others.size() == 1 ? others[0] : make_node(Op::Product, {}, {}, others);
  if (c.is_one()) return body;
  if ((-c).is_one()) return make_neg(body);
  others.insert(others.begin(), Expr(c));
  return make_node(Op::Product, {}, {}, std::move(others));
}

Expr make_quotient(const Expr& num, const Expr& den) {
  if (den.is_const()) {
    if (den.value().is_zero()) throw DomainError("division by zero");
    return make_product({Expr(den.value().inverse()), num});
  }
  if (num.is_zero()) return Expr();
  if (num.op() == Op::Neg) return make_neg(make_quotient(num.args()[0], den));
  if (den.op() == Op::Neg) return make_neg(make_quotient(num, den.args()[0]));
  if (num.is_const() && num.value().is_negative()) return make_neg(make_quotient(Expr(-num.value()), den));
  if (num.op() == Op::Product && num.args()[0].is_const() && num.args()[0].value().is_negative())
    return make_neg(make_quotient(make_neg(num), den));
  return make_node(Op::Quotient, {}, {}, {num, den});
}

Expr make_power(const Expr& base, const Rational& k) {
  if (k.is_zero()) return Expr(1);
  if (k.is_one()) return base;
  if (base.is_const()) {
    const Rational& b = base.value();
    if (b.is_zero()) {
      if (k.is_negative()) throw DomainError("zero to a negative power");
      return Expr();
    }
    if (b.is_one()) return Expr(1);
    if (k.is_integer()) return Expr(b.pow(k.num()));
    if (!b.is_negative()) {
      std::int64_t pn = 0, pd = 0;
      if (exact_root(b.num(), k.den(), pn) && exact_root(b.den(), k.den(), pd))
        return Expr(Rational(pn, pd).pow(k.num()));
    }
    return make_node(Op::Power, k, {}, {base});
  }
  if (base.op() == Op::Power && k.is_integer()) return make_power(base.args()[0], base.value() * k);
  if (base.op() == Op::Neg && k.is_integer()) {
    Expr p = make_power(base.args()[0], k);
    return (k.num() % 2 == 0) ? p : make_neg(p);
  }
  return make_node(Op::Power, k, {}, {base});
}

Expr make_function(Op fn, const Expr& arg) {
  if (arg.is_const()) {
    const Rational& v = arg.value();
    switch (fn) {
      case Op::Sin:
      case Op::Tan:
        if (v.is_zero()) return Expr();
        break;
      case Op::Cos:
      case Op::Exp:
        if (v.is_zero()) return Expr(1);
        break;
      case Op::Log:
        if (v.is_one()) return Expr();
        break;
      case Op::Sqrt:
        return make_power(arg, Rational(1, 2)).is_const() ? make_power(arg, Rational(1, 2))
                                                          : make_node(fn, {}, {}, {arg});
      default:
        break;
    }
  }
  return make_node(fn, {}, {}, {arg});
}

Expr operator+(const Expr& a, const Expr& b) { return make_sum({a, b}); }
Expr operator-(const Expr& a, const Expr& b) { return make_sum({a, make_neg(b)}); }
Expr operator*(const Expr& a, const Expr& b) { return make_product({a, b}); }
Expr operator/(const Expr& a, const Expr& b) { return make_quotient(a, b); }
Expr operator-(const Expr& a) { return make_neg(a); }

Expr pow(const Expr& base, const Rational& exponent) { return make_power(base, exponent); }
Expr sin(const Expr& e) { return make_function(Op::Sin, e); }
Expr cos(const Expr& e) { return make_function(Op::Cos, e); }
Expr tan(const Expr& e) { return make_function(Op::Tan, e); }
Expr exp(const Expr& e) { return make_function(Op::Exp, e); }
Expr log(const Expr& e) { return make_function(Op::Log, e); }
Expr sqrt(const Expr& e) { return make_function(Op::Sqrt, e); }

// ---------------------------------------------------------------------------
// Printing

namespace {

int precedence(const Expr& e) {
  switch (e.op()) {
    case Op::Const:
      if (e.value().is_integer()) return e.value().is_negative() ? 3 : 5;
      return 2;
    case Op::Sum:
      return 1;
    case Op::Product:
    case Op::Quotient:
      return 2;
    case Op::Neg:
      return 3;
    case Op::Power:
      return 4;
    default:
      return 5;
  }
}

void print(const Expr& e, std::ostream& os);

void wrap(const Expr& e, int min_prec, std::ostream& os) {
  if (precedence(e) < min_prec) {
    os << '(';
    print(e, os);
    os << ')';
  } else {
    print(e, os);
  }
}

void print_product_body(std::span<const Expr> factors, std::ostream& os) {
  for (std::size_t i = 0; i < factors.size(); ++i) {
    if (i > 0) os << '*';
    wrap(factors[i], 3, os);
  }
}

void print(const Expr& e, std::ostream& os) {
  switch (e.op()) {
    case Op::Const:
      os << e.value().str();
      return;
    case Op::Param:
    case Op::Coord:
      os << e.name();
      return;
    case Op::Sum: {
      auto terms = e.args();
      for (std::size_t i = 0; i < terms.size(); ++i) {
        const Expr& t = terms[i];
        if (i == 0) {
          print(t, os);
          continue;
        }
        if (t.op() == Op::Neg) {
          os << " - ";
          wrap(t.args()[0], 2, os);
        } else if (t.is_const() && t.value().is_negative()) {
          os << " - " << (-t.value()).str();
        } else if (t.op() == Op::Product && t.args()[0].is_const() &&
                   t.args()[0].value().is_negative()) {
          os << " - ";
          print(make_neg(t), os);
        } else {
          os << " + ";
          print(t, os);
        }
      }
      return;
    }
    case Op::Product: {
      auto f = e.args();
      if (f[0].is_const()) {
        os << f[0].value().str() << '*';
        print_product_body(f.subspan(1), os);
      } else {
        print_product_body(f, os);
      }
      return;
    }
    case Op::Quotient:
      wrap(e.args()[0], 2, os);
      os << '/';
      wrap(e.args()[1], 4, os);
      return;
    case Op::Power: {
      wrap(e.args()[0], 5, os);
      os << '^';
      const Rational& k = e.value();
      if (k.is_integer() && !k.is_negative())
        os << k.str();
      else
        os << '(' << k.str() << ')';
      return;
    }
    case Op::Neg:
      os << '-';
      wrap(e.args()[0], 2, os);
      return;
    default:
      os << function_name(e.op()) << '(';
      print(e.args()[0], os);
      os << ')';
      return;
  }
}

}  // namespace

std::string to_string(const Expr& e) {
  std::ostringstream os;
  print(e, os);
  return os.str();
}

std::ostream& operator<<(std::ostream& os, const Expr& e) {
  print(e, os);
  return os;
}

// ---------------------------------------------------------------------------
// Parsing

namespace {

class Parser {
 public:
  Parser(std::string_view src, const std::set<std::string>& coords) : src_(src), coords_(coords) {}

  Expr run() {
    Expr e = expression();
    skip_ws();
    if (pos_ != src_.size()) throw ParseError("unexpected '" + std::string(1, src_[pos_]) + "'", pos_);
    return e;
  }

 private:
  void skip_ws() {
    while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
  }
  bool accept(char c) {
    skip_ws();
    if (pos_ < src_.size() && src_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  Expr expression() {
    std::vector<Expr> terms{term()};
    for (;;) {
      if (accept('+'))
        terms.push_back(term());
      else if (accept('-'))
        terms.push_back(make_neg(term()));
      else
        break;
    }
    return make_sum(std::move(terms));
  }

  Expr term() {
    Expr acc = unary();
    for (;;) {
      if (accept('*')) {
        acc = make_product({acc, unary()});
      } else if (accept('/')) {
        std::size_t at = pos_;
        Expr den = unary();
        if (den.is_zero()) throw ParseError("division by zero", at);
        acc = make_quotient(acc, den);
      } else {
        break;
      }
    }
    return acc;
  }

  Expr unary() {
    if (accept('-')) return make_neg(unary());
    if (accept('+')) return unary();
    return power();
  }

  Expr power() {
    Expr base = primary();
    if (accept('^')) {
      std::size_t at = pos_;
      Expr k = unary();
      if (!k.is_const()) throw ParseError("non-constant exponent", at);
      try {
        return make_power(base, k.value());
      } catch (const DomainError& e) {
        throw ParseError(e.what(), at);
      }
    }
    return base;
  }

  Expr primary() {
    skip_ws();
    if (pos_ >= src_.size()) throw ParseError("unexpected end of input", pos_);
    char c = src_[pos_];
    if (c == '(') {
      ++pos_;
      Expr e = expression();
      if (!accept(')')) throw ParseError("expected ')'", pos_);
      return e;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t start = pos_;
      while (pos_ < src_.size() &&
             (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_'))
        ++pos_;
      std::string id(src_.substr(start, pos_ - start));
      skip_ws();
      if (pos_ < src_.size() && src_[pos_] == '(') {
        static const std::map<std::string, Op> fns = {{"sin", Op::Sin}, {"cos", Op::Cos},
                                                      {"tan", Op::Tan}, {"exp", Op::Exp},
                                                      {"log", Op::Log}, {"sqrt", Op::Sqrt}};
        auto it = fns.find(id);
        if (it == fns.end()) throw ParseError("unknown function '" + id + "'", start);
        ++pos_;
        Expr arg = expression();
        if (!accept(')')) throw ParseError("expected ')'", pos_);
        return make_function(it->second, arg);
      }
      return coords_.contains(id) ? Expr::coord(id) : Expr::param(id);
    }
    throw ParseError("unexpected '" + std::string(1, c) + "'", pos_);
  }

  Expr number() {
    std::size_t start = pos_;
    std::int64_t mant = 0;
    int scale = 0;
    bool digits = false;
    auto push_digit = [&](char d) {
      if (mant > (std::numeric_limits<std::int64_t>::max() - 9) / 10)
        throw ParseError("numeric literal too long", start);
      mant = mant * 10 + (d - '0');
      digits = true;
    };
    while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) push_digit(src_[pos_++]);
    if (pos_ < src_.size() && src_[pos_] == '.') {
      ++pos_;
      while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) {
        push_digit(src_[pos_++]);
        --scale;
      }
    }
    if (!digits) throw ParseError("malformed number", start);
    if (pos_ < src_.size() && (src_[pos_] == 'e' || src_[pos_] == 'E')) {
      std::size_t save = pos_++;
      int sign = 1;
      if (pos_ < src_.size() && (src_[pos_] == '+' || src_[pos_] == '-')) sign = src_[pos_++] == '-' ? -1 : 1;
      if (pos_ >= src_.size() || !std::isdigit(static_cast<unsigned char>(src_[pos_]))) {
        pos_ = save;
      } else {
        int ex = 0;
        while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_])))
          ex = ex * 10 + (src_[pos_++] - '0');
        scale += sign * ex;
      }
    }
    try {
      return Expr(Rational(mant) * Rational(10).pow(scale));
    } catch (const std::overflow_error&) {
      throw ParseError("numeric literal out of range", start);
    }
  }

  std::string_view src_;
  const std::set<std::string>& coords_;
  std::size_t pos_ = 0;
};

}  // namespace

Expr parse(std::string_view src, const std::set<std::string>& coordinates) {
  return Parser(src, coordinates).run();
}

// ---------------------------------------------------------------------------
// Differentiation

Expr Differentiator::operator()(const Expr& e) {
  switch (e.op()) {
    case Op::Const:
    case Op::Param:
      return Expr();
    case Op::Coord:
      return e.name() == var_ ? Expr(1) : Expr();
    default:
      break;
  }
  if (auto it = cache_.find(e.id()); it != cache_.end()) return it->second.second;

  Expr d;
  auto args = e.args();
  switch (e.op()) {
    case Op::Sum: {
      std::vector<Expr> parts;
      for (const auto& a : args) {
        Expr da = (*this)(a);
        if (!da.is_zero()) parts.push_back(da);
      }
      d = make_sum(std::move(parts));
      break;
    }
    case Op::Product: {
      std::vector<Expr> terms;
      for (std::size_t i = 0; i < args.size(); ++i) {
        Expr di = (*this)(args[i]);
        if (di.is_zero()) continue;
        std::vector<Expr> f(args.begin(), args.end());
        f[i] = di;
        terms.push_back(make_product(std::move(f)));
      }
      d = make_sum(std::move(terms));
      break;
    }
    case Op::Quotient: {
      const Expr& a = args[0];
      const Expr& b = args[1];
      Expr da = (*this)(a);
      Expr db = (*this)(b);
      if (db.is_zero())
        d = make_quotient(da, b);
      else
        d = make_quotient(da * b - a * db, make_power(b, Rational(2)));
      break;
    }
    case Op::Power: {
      Expr db = (*this)(args[0]);
      if (!db.is_zero()) d = make_product({Expr(e.value()), make_power(args[0], e.value() - 1), db});
      break;
    }
    case Op::Neg:
      d = make_neg((*this)(args[0]));
      break;
    default: {
      const Expr& u = args[0];
      Expr du = (*this)(u);
      if (du.is_zero()) break;
      switch (e.op()) {
        case Op::Sin: d = cos(u) * du; break;
        case Op::Cos: d = make_neg(sin(u) * du); break;
        case Op::Tan: d = make_quotient(du, make_power(cos(u), Rational(2))); break;
        case Op::Exp: d = e * du; break;
        case Op::Log: d = make_quotient(du, u); break;
        case Op::Sqrt: d = make_quotient(du, Expr(2) * e); break;
        default: break;
      }
    }
  }
  cache_.emplace(e.id(), std::make_pair(e, d));
  return d;
}

Expr differentiate(const Expr& e, std::string_view var) {
  Differentiator d{std::string(var)};
  return d(e);
}

// ---------------------------------------------------------------------------
// Traversals

namespace {

Expr rebuild(const Expr& e, std::vector<Expr> args) {
  switch (e.op()) {
    case Op::Sum: return make_sum(std::move(args));
    case Op::Product: return make_product(std::move(args));
    case Op::Quotient: return make_quotient(args[0], args[1]);
    case Op::Power: return make_power(args[0], e.value());
    case Op::Neg: return make_neg(args[0]);
    default: return make_function(e.op(), args[0]);
  }
}

template <class F>
void visit_dag(const Expr& root, F&& f) {
  std::unordered_set<const Node*> seen;
  std::vector<Expr> stack{root};
  while (!stack.empty()) {
    Expr e = stack.back();
    stack.pop_back();
    if (!seen.insert(e.id()).second) continue;
    f(e);
    for (const auto& a : e.args()) stack.push_back(a);
  }
}

}  // namespace

Expr substitute(const Expr& e, const std::map<std::string, Expr>& repl) {
  std::unordered_map<const Node*, Expr> memo;
  std::function<Expr(const Expr&)> go = [&](const Expr& x) -> Expr {
    if (x.op() == Op::Coord) {
      auto it = repl.find(x.name());
      return it == repl.end() ? x : it->second;
    }
    if (x.args().empty()) return x;
    if (auto it = memo.find(x.id()); it != memo.end()) return it->second;
    std::vector<Expr> args;
    bool changed = false;
    for (const auto& a : x.args()) {
      args.push_back(go(a));
      changed = changed || args.back().id() != a.id();
    }
    Expr out = changed ? rebuild(x, std::move(args)) : x;
    memo.emplace(x.id(), out);
    return out;
  };
  return go(e);
}

std::set<std::string> free_coordinates(const Expr& e) {
  std::set<std::string> out;
  visit_dag(e, [&](const Expr& x) {
    if (x.op() == Op::Coord) out.insert(x.name());
  });
  return out;
}

std::set<std::string> free_parameters(const Expr& e) {
  std::set<std::string> out;
  visit_dag(e, [&](const Expr& x) {
    if (x.op() == Op::Param) out.insert(x.name());
  });
  return out;
}

std::size_t dag_size(const Expr& e) {
  std::size_t n = 0;
  visit_dag(e, [&](const Expr&) { ++n; });
  return n;
}

// ---------------------------------------------------------------------------
// Evaluation

namespace {

struct InstrKey {
  Op op;
  Rational value;
  std::string name;
  std::vector<std::uint32_t> args;
  bool operator==(const InstrKey& o) const {
    return op == o.op && value == o.value && name == o.name && args == o.args;
  }
};

struct InstrKeyHash {
  std::size_t operator()(const InstrKey& k) const {
    std::size_t h = mix(static_cast<std::size_t>(k.op), k.value.hash());
    h = mix(h, std::hash<std::string>{}(k.name));
    for (auto a : k.args) h = mix(h, a);
    return h;
  }
};

}  // namespace

Program::Program(std::span<const Expr> exprs, std::vector<std::string> coordinates,
                 const ParamEnv& env)
    : coordinates_(std::move(coordinates)) {
  std::unordered_map<const Node*, std::uint32_t> by_ptr;
  std::unordered_map<InstrKey, std::uint32_t, InstrKeyHash> by_key;
  std::vector<Expr> keep_alive;

  std::function<std::uint32_t(const Expr&)> emit = [&](const Expr& e) -> std::uint32_t {
    if (auto it = by_ptr.find(e.id()); it != by_ptr.end()) return it->second;
    InstrKey key{e.op(), e.value(), e.name(), {}};
    for (const auto& a : e.args()) key.args.push_back(emit(a));
    if (auto it = by_key.find(key); it != by_key.end()) {
      by_ptr.emplace(e.id(), it->second);
      keep_alive.push_back(e);
      return it->second;
    }
    Instr ins{e.op()};
    switch (e.op()) {
      case Op::Const:
        ins.constant = e.value().to_double();
        break;
      case Op::Coord: {
        auto it = std::find(coordinates_.begin(), coordinates_.end(), e.name());
        if (it == coordinates_.end()) throw UnboundNameError("unbound coordinate '" + e.name() + "'");
        ins.slot = static_cast<int>(it - coordinates_.begin());
        break;
      }
      case Op::Param: {
        auto it = env.find(e.name());
        if (it == env.end()) throw UnboundNameError("unbound parameter '" + e.name() + "'");
        ins.op = Op::Const;
        ins.constant = it->second;
        break;
      }
      case Op::Power:
        ins.exponent = e.value().to_double();
        ins.integer_exponent = e.value().is_integer();
        break;
      default:
        break;
    }
    ins.first = static_cast<std::uint32_t>(args_.size());
    ins.count = static_cast<std::uint32_t>(key.args.size());
    args_.insert(args_.end(), key.args.begin(), key.args.end());
    auto idx = static_cast<std::uint32_t>(code_.size());
    code_.push_back(ins);
    by_key.emplace(std::move(key), idx);
    by_ptr.emplace(e.id(), idx);
    keep_alive.push_back(e);
    return idx;
  };
  for (const auto& e : exprs) outputs_.push_back(emit(e));
}

void Program::run(std::span<const double> x, std::span<double> out) const {
  thread_local std::vector<double> reg;
  reg.resize(code_.size());
  for (std::size_t i = 0; i < code_.size(); ++i) {
    const Instr& in = code_[i];
    const std::uint32_t* a = args_.data() + in.first;
    double v = 0.0;
    switch (in.op) {
      case Op::Const: v = in.constant; break;
      case Op::Coord: v = x[static_cast<std::size_t>(in.slot)]; break;
      case Op::Sum:
        for (std::uint32_t k = 0; k < in.count; ++k) v += reg[a[k]];
        break;
      case Op::Product:
        v = 1.0;
        for (std::uint32_t k = 0; k < in.count; ++k) v *= reg[a[k]];
        break;
      case Op::Quotient: {
        double d = reg[a[1]];
        if (d == 0.0) throw DomainError("division by zero");
        v = reg[a[0]] / d;
        break;
      }
      case Op::Power: {
        double b = reg[a[0]];
        if (b == 0.0 && in.exponent < 0) throw DomainError("zero to a negative power");
        if (b < 0.0 && !in.integer_exponent) throw DomainError("fractional power of a negative number");
        if (in.integer_exponent && in.exponent == 2.0)
          v = b * b;
        else if (in.integer_exponent && in.exponent == -1.0)
          v = 1.0 / b;
        else
          v = std::pow(b, in.exponent);
        break;
      }
      case Op::Neg: v = -reg[a[0]]; break;
      case Op::Sin: v = std::sin(reg[a[0]]); break;
      case Op::Cos: v = std::cos(reg[a[0]]); break;
      case Op::Tan: v = std::tan(reg[a[0]]); break;
      case Op::Exp: v = std::exp(reg[a[0]]); break;
      case Op::Log:
        if (reg[a[0]] <= 0.0) throw DomainError("log of a non-positive number");
        v = std::log(reg[a[0]]);
        break;
      case Op::Sqrt:
        if (reg[a[0]] < 0.0) throw DomainError("sqrt of a negative number");
        v = std::sqrt(reg[a[0]]);
        break;
      case Op::Param: break;  // bound to Const at compile time
    }
    reg[i] = v;
  }
  for (std::size_t k = 0; k < outputs_.size(); ++k) out[k] = reg[outputs_[k]];
}

std::vector<double> Program::operator()(std::span<const double> x) const {
  std::vector<double> out(outputs_.size());
  run(x, out);
  return out;
}

double evaluate(const Expr& e, const Point& p, const ParamEnv& env) {
  std::vector<std::string> names;
  std::vector<double> x;
  for (const auto& [k, v] : p) {
    names.push_back(k);
    x.push_back(v);
  }
  Program prog(std::span<const Expr>(&e, 1), std::move(names), env);
  return prog(x)[0];
}

}  // namespace hidsym
