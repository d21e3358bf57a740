#include "hidsym/algebra.hpp"

#include <sstream>

namespace hidsym {

bool operator<(const GaussRational& a, const GaussRational& b) {
  if (!(a.re == b.re)) return a.re < b.re;
  return a.im < b.im;
}

namespace {

int eps(int i, int j, int k) {
  if (i == j || j == k || i == k) return 0;
  return ((i % 3) + 1 == j) ? 1 : -1;
}
int third(int i, int j) { return 6 - i - j; }

const GaussRational kI = GaussRational::i();

}  // namespace

BPoly::BPoly(GaussRational c, int power) {
  if (!c.is_zero()) c_[power] = c;
}

BPoly& BPoly::operator+=(const BPoly& o) {
  for (const auto& [p, c] : o.c_) {
    auto& v = c_[p];
    v += c;
    if (v.is_zero()) c_.erase(p);
  }
  return *this;
}

BPoly operator-(const BPoly& a, const BPoly& b) {
  BPoly out = a;
  for (const auto& [p, c] : b.c_) out += BPoly(-c, p);
  return out;
}

BPoly operator*(const BPoly& a, const BPoly& b) {
  BPoly out;
  for (const auto& [p, c] : a.c_)
    for (const auto& [q, d] : b.c_) out += BPoly(c * d, p + q);
  return out;
}

bool operator==(const BPoly& a, const BPoly& b) { return a.c_ == b.c_; }

std::string BPoly::str() const {
  if (c_.empty()) return "0";
  std::ostringstream os;
  bool first = true;
  for (const auto& [p, c] : c_) {
    if (!first) os << " + ";
    first = false;
    os << '(' << c.str() << ')';
    if (p == 1) os << "*B";
    if (p > 1) os << "*B^" << p;
  }
  return os.str();
}

std::string to_string(const Generator& g) {
  switch (g.kind) {
    case GenKind::I: return "I";
    case GenKind::J: return "J" + std::to_string(g.index);
    case GenKind::K: return "K" + std::to_string(g.index);
    case GenKind::Q: return "Q" + std::to_string(g.index);
    case GenKind::QY: return "QY";
    case GenKind::P4: return "P4";
    case GenKind::H: return "H";
  }
  return "?";
}

AlgebraElement::AlgebraElement(Generator g, BPoly c) {
  if (!c.is_zero()) terms_[g] = std::move(c);
}

AlgebraElement& AlgebraElement::operator+=(const AlgebraElement& o) {
  for (const auto& [g, c] : o.terms_) {
    auto& v = terms_[g];
    v += c;
    if (v.is_zero()) terms_.erase(g);
  }
  return *this;
}

AlgebraElement operator-(const AlgebraElement& a, const AlgebraElement& b) {
  return a + BPoly(GaussRational(-1)) * b;
}

AlgebraElement operator*(const BPoly& c, const AlgebraElement& a) {
  AlgebraElement out;
  for (const auto& [g, d] : a.terms_) out += AlgebraElement(g, c * d);
  return out;
}

std::string AlgebraElement::str() const {
  if (terms_.empty()) return "0";
  std::ostringstream os;
  bool first = true;
  for (const auto& [g, c] : terms_) {
    if (!first) os << " + ";
    first = false;
    os << '[' << c.str() << "] " << to_string(g);
  }
  return os.str();
}

AlgebraElement J(int i) { return Generator{GenKind::J, i}; }
AlgebraElement K(int i) { return Generator{GenKind::K, i}; }
AlgebraElement Q(int i) { return Generator{GenKind::Q, i}; }
BPoly Bpow(int k) { return BPoly(GaussRational(1), k); }

AlgebraElement bracket(const Generator& a, const Generator& b) {
  auto inert = [](GenKind k) { return k == GenKind::QY || k == GenKind::P4 || k == GenKind::H; };
  if (inert(a.kind) || inert(b.kind))
    throw AlgebraError("no bracket is specified for [" + to_string(a) + ", " + to_string(b) + "]");
  if (a.kind == GenKind::I || b.kind == GenKind::I || a == b) return {};
  for (const auto& g : {a, b})
    if (g.index < 1 || g.index > 3) throw AlgebraError("generator index must be 1, 2 or 3");
  // Order the pair as (J, K, Q) and fix the sign afterwards.
  if (a.kind > b.kind) {
    AlgebraElement r = bracket(b, a);
    return BPoly(GaussRational(-1)) * r;
  }
  int i = a.index, j = b.index;
  int e = eps(i, j, third(i, j));
  if (e == 0) return {};
  int k = third(i, j);
  GaussRational c = GaussRational(e) * kI;
  switch (a.kind) {
    case GenKind::J:
      if (b.kind == GenKind::J) return AlgebraElement(Generator{GenKind::J, k}, BPoly(c));
      if (b.kind == GenKind::K) return AlgebraElement(Generator{GenKind::K, k}, BPoly(c));
      return AlgebraElement(Generator{GenKind::Q, k}, BPoly(c));
    case GenKind::K:
      if (b.kind == GenKind::K) return AlgebraElement(Generator{GenKind::J, k}, BPoly(c, 2));
      return AlgebraElement(Generator{GenKind::Q, k}, BPoly(c, 1));
    case GenKind::Q:
      return AlgebraElement(Generator{GenKind::Q, k}, BPoly(GaussRational(2) * c));
    default:
      break;
  }
  throw AlgebraError("unhandled bracket");
}

AlgebraElement bracket(const AlgebraElement& a, const AlgebraElement& b) {
  AlgebraElement out;
  for (const auto& [ga, ca] : a.terms())
    for (const auto& [gb, cb] : b.terms()) out += (ca * cb) * bracket(ga, gb);
  return out;
}

void AlgebraReport::fail(std::string what) {
  pass = false;
  if (failures.size() < 10) failures.push_back(std::move(what));
}

Quaternion quaternion_product(const Quaternion& a, const Quaternion& b) {
  Quaternion out{};
  for (int x = 0; x < 4; ++x)
    for (int y = 0; y < 4; ++y) {
      GaussRational c = a[static_cast<std::size_t>(x)] * b[static_cast<std::size_t>(y)];
      if (c.is_zero()) continue;
      if (x == 0) {
        out[static_cast<std::size_t>(y)] += c;
      } else if (y == 0) {
        out[static_cast<std::size_t>(x)] += c;
      } else if (x == y) {
        out[0] += c;
      } else {
        int k = third(x, y);
        out[static_cast<std::size_t>(k)] += c * GaussRational(eps(x, y, k)) * kI;
      }
    }
  return out;
}

AlgebraReport quaternion_table_check() {
  AlgebraReport r{"quaternion-table"};
  auto unit = [](int k) {
    Quaternion q{};
    q[static_cast<std::size_t>(k)] = GaussRational(1);
    return q;
  };
  // Products against the defining relation.
  for (int i = 1; i <= 3; ++i)
    for (int j = 1; j <= 3; ++j) {
      Quaternion want{};
      if (i == j) want[0] = GaussRational(1);
      else want[static_cast<std::size_t>(third(i, j))] = GaussRational(eps(i, j, third(i, j))) * kI;
      ++r.cases;
      if (quaternion_product(unit(i), unit(j)) != want)
        r.fail("Q" + std::to_string(i) + "Q" + std::to_string(j));
    }
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b)
      for (int c = 0; c < 4; ++c) {
        ++r.cases;
        auto l = quaternion_product(quaternion_product(unit(a), unit(b)), unit(c));
        auto rr = quaternion_product(unit(a), quaternion_product(unit(b), unit(c)));
        if (l != rr) r.fail("associativity " + std::to_string(a) + std::to_string(b) + std::to_string(c));
      }
  // [Q_i, Q_j] from the table against the Lie bracket table.
  for (int i = 1; i <= 3; ++i)
    for (int j = 1; j <= 3; ++j) {
      ++r.cases;
      auto ab = quaternion_product(unit(i), unit(j)), ba = quaternion_product(unit(j), unit(i));
      AlgebraElement comm;
      for (int k = 0; k < 4; ++k) {
        GaussRational c = ab[static_cast<std::size_t>(k)] - ba[static_cast<std::size_t>(k)];
        if (k == 0 && !c.is_zero()) r.fail("commutator has an identity part");
        if (k > 0) comm += AlgebraElement(Generator{GenKind::Q, k}, BPoly(c));
      }
      if (!(comm == bracket(Generator{GenKind::Q, i}, Generator{GenKind::Q, j})))
        r.fail("[Q" + std::to_string(i) + ", Q" + std::to_string(j) + "]");
    }
  return r;
}

std::string to_string(const LoopGenerator& g) {
  return std::string(1, g.type) + std::to_string(g.index) + "_" + std::to_string(g.grade());
}

LoopElement loop_bracket(const LoopGenerator& a, const LoopGenerator& b) {
  if (a.n < 0 || b.n < 0) throw AlgebraError("loop generator grade must be non-negative");
  if ((a.type != 'A' && a.type != 'B') || (b.type != 'A' && b.type != 'B'))
    throw AlgebraError("loop generator type must be A or B");
  int k = third(a.index, b.index);
  int e = eps(a.index, b.index, k);
  if (e == 0) return {};
  GaussRational c = GaussRational(e) * kI;
  LoopGenerator out;
  if (a.type == 'A' && b.type == 'A') {
    out = {'A', k, a.n + b.n};
  } else if (a.type == 'B' && b.type == 'B') {
    out = {'A', k, a.n + b.n + 2};
  } else {
    out = {'B', k, a.n + b.n};  // B^k_{2(n+m+1)} = B^k_{2(n+m)+2}
  }
  return {{out, c}};
}

LoopElement loop_bracket(const LoopElement& a, const LoopElement& b) {
  LoopElement out;
  for (const auto& [ga, ca] : a)
    for (const auto& [gb, cb] : b)
      for (const auto& [g, c] : loop_bracket(ga, gb)) {
        auto& v = out[g];
        v += ca * cb * c;
        if (v.is_zero()) out.erase(g);
      }
  return out;
}

AlgebraElement absorb(const LoopGenerator& g) {
  return AlgebraElement(Generator{g.type == 'A' ? GenKind::J : GenKind::K, g.index}, Bpow(g.n));
}

AlgebraElement absorb(const LoopElement& e) {
  AlgebraElement out;
  for (const auto& [g, c] : e) out += BPoly(c) * absorb(g);
  return out;
}

std::vector<LoopGenerator> loop_generators(int cutoff) {
  if (cutoff < 0) throw AlgebraError("cutoff must be non-negative");
  std::vector<LoopGenerator> out;
  for (int n = 0; n <= cutoff; ++n)
    for (char t : {'A', 'B'})
      for (int i = 1; i <= 3; ++i) out.push_back({t, i, n});
  return out;
}

AlgebraReport grade_absorb(int cutoff) {
  AlgebraReport r{"grade-absorb"};
  auto gens = loop_generators(cutoff);
  for (const auto& a : gens)
    for (const auto& b : gens) {
      ++r.cases;
      AlgebraElement lhs = bracket(absorb(a), absorb(b));
      AlgebraElement rhs = absorb(loop_bracket(a, b));
      if (!(lhs == rhs)) r.fail("[" + to_string(a) + ", " + to_string(b) + "]");
    }
  return r;
}

AlgebraReport jacobi_check(int cutoff) {
  AlgebraReport r{"jacobi"};
  auto gens = loop_generators(cutoff);
  auto one = [](const LoopGenerator& g) { return LoopElement{{g, GaussRational(1)}}; };
  for (std::size_t x = 0; x < gens.size(); ++x)
    for (std::size_t y = x; y < gens.size(); ++y)
      for (std::size_t z = y; z < gens.size(); ++z) {
        const auto &a = gens[x], &b = gens[y], &c = gens[z];
        if (a.grade() + b.grade() + c.grade() > 2 * cutoff) continue;
        ++r.cases;
        LoopElement sum;
        for (const auto& part : {loop_bracket(loop_bracket(one(a), one(b)), one(c)),
                                 loop_bracket(loop_bracket(one(b), one(c)), one(a)),
                                 loop_bracket(loop_bracket(one(c), one(a)), one(b))})
          for (const auto& [g, v] : part) {
            auto& s = sum[g];
            s += v;
            if (s.is_zero()) sum.erase(g);
          }
        if (!sum.empty()) r.fail("(" + to_string(a) + ", " + to_string(b) + ", " + to_string(c) + ")");
      }
  return r;
}

AlgebraReport jacobi_check_base() {
  AlgebraReport r{"jacobi-base"};
  std::vector<AlgebraElement> gens;
  for (GenKind k : {GenKind::J, GenKind::K, GenKind::Q})
    for (int i = 1; i <= 3; ++i) gens.emplace_back(Generator{k, i});
  for (const auto& a : gens)
    for (const auto& b : gens)
      for (const auto& c : gens) {
        ++r.cases;
        AlgebraElement s = bracket(bracket(a, b), c) + bracket(bracket(b, c), a) + bracket(bracket(c, a), b);
        if (!s.is_zero()) r.fail("(" + a.str() + ", " + b.str() + ", " + c.str() + ")");
      }
  return r;
}

std::string runge_lenz_formula() {
  return "K_i = (mu/4) {QY, Q_i} + (1/2) (B - P4) Q_i - J_i P4, with B^2 = P4^2 - H^2";
}

}  // namespace hidsym
