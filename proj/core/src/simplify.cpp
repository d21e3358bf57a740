#include "hidsym/simplify.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <optional>
#include <unordered_map>

namespace hidsym {

namespace {

// Laurent monomial: (atom id, exponent) sorted by id, no zero exponents.
using Mono = std::vector<std::pair<std::uint32_t, std::int32_t>>;

// Lexicographic order, greatest first.
struct LexGreater {
  bool operator()(const Mono& a, const Mono& b) const {
    std::size_t i = 0, j = 0;
    while (i < a.size() || j < b.size()) {
      std::uint32_t ia = i < a.size() ? a[i].first : UINT32_MAX;
      std::uint32_t ib = j < b.size() ? b[j].first : UINT32_MAX;
      std::uint32_t id = std::min(ia, ib);
      std::int32_t ea = ia == id ? a[i].second : 0;
      std::int32_t eb = ib == id ? b[j].second : 0;
      if (ea != eb) return ea > eb;
      if (ia == id) ++i;
      if (ib == id) ++j;
    }
    return false;
  }
};

using Poly = std::map<Mono, Rational, LexGreater>;

Mono mono_mul(const Mono& a, const Mono& b) {
  Mono out;
  out.reserve(a.size() + b.size());
  std::size_t i = 0, j = 0;
  while (i < a.size() || j < b.size()) {
    if (j == b.size() || (i < a.size() && a[i].first < b[j].first)) {
      out.push_back(a[i++]);
    } else if (i == a.size() || b[j].first < a[i].first) {
      out.push_back(b[j++]);
    } else {
      std::int32_t e = a[i].second + b[j].second;
      if (e != 0) out.emplace_back(a[i].first, e);
      ++i;
      ++j;
    }
  }
  return out;
}

Mono mono_inv(Mono m) {
  for (auto& [id, e] : m) e = -e;
  return m;
}

// True when b/a has no negative exponents.
bool mono_divides(const Mono& a, const Mono& b) {
  Mono q = mono_mul(b, mono_inv(a));
  return std::all_of(q.begin(), q.end(), [](const auto& p) { return p.second > 0; });
}

void add_term(Poly& p, const Mono& m, const Rational& c) {
  if (c.is_zero()) return;
  auto [it, fresh] = p.try_emplace(m, c);
  if (!fresh) {
    it->second += c;
    if (it->second.is_zero()) p.erase(it);
  }
}

// Per-atom minimum exponent across all terms (absent counts as 0).
Mono content(const Poly& p) {
  std::map<std::uint32_t, std::int32_t> lo;
  bool first = true;
  for (const auto& [m, c] : p) {
    if (first) {
      for (auto [id, e] : m) lo[id] = e;
      first = false;
      continue;
    }
    std::map<std::uint32_t, std::int32_t> seen(m.begin(), m.end());
    for (auto& [id, e] : lo) {
      auto it = seen.find(id);
      e = std::min(e, it == seen.end() ? 0 : it->second);
    }
    for (auto [id, e] : m)
      if (!lo.count(id)) lo[id] = std::min(0, e);
  }
  Mono out;
  for (auto [id, e] : lo)
    if (e != 0) out.emplace_back(id, e);
  return out;
}

Mono negative_part(const Poly& p) {
  Mono c = content(p);
  Mono out;
  for (auto [id, e] : c)
    if (e < 0) out.emplace_back(id, e);
  return out;
}

struct RF {
  Poly num;
  std::vector<std::pair<Poly, int>> den;  // monic factors with multiplicity
};

struct Abandon {};

class Simplifier {
 public:
  explicit Simplifier(const SimplifyOptions& opt) : opt_(opt) {}

  RF convert(const Expr& e) {
    if (auto it = memo_.find(e.id()); it != memo_.end()) return it->second;
    RF out;
    auto args = e.args();
    switch (e.op()) {
      case Op::Const:
        out = constant(e.value());
        break;
      case Op::Coord:
      case Op::Param:
        out = atom(e);
        break;
      case Op::Sum:
        out = convert(args[0]);
        for (std::size_t i = 1; i < args.size(); ++i) out = add(out, convert(args[i]));
        break;
      case Op::Product:
        out = convert(args[0]);
        for (std::size_t i = 1; i < args.size(); ++i) out = mul(out, convert(args[i]));
        break;
      case Op::Quotient:
        out = mul(convert(args[0]), inv(convert(args[1])));
        break;
      case Op::Neg:
        out = scale(convert(args[0]), Rational(-1));
        break;
      case Op::Power: {
        const Rational& k = e.value();
        if (k.is_integer()) {
          out = pow(convert(args[0]), k.num());
        } else {
          RF base = convert(args[0]);
          Expr a = make_power(to_expr(base), Rational(1, k.den()));
          out = pow(root_atom(a, base, static_cast<int>(k.den())), k.num());
        }
        break;
      }
      case Op::Sqrt: {
        RF base = convert(args[0]);
        out = root_atom(make_function(Op::Sqrt, to_expr(base)), base, 2);
        break;
      }
      default: {
        Expr f = make_function(e.op(), to_expr(convert(args[0])));
        out = f.is_const() ? constant(f.value()) : atom(f);
      }
    }
    memo_.emplace(e.id(), out);
    keep_.push_back(e);
    return out;
  }

  RF pythagorean(RF x) {
    std::vector<std::pair<std::uint32_t, std::uint32_t>> pairs;
    for (std::uint32_t id = 0; id < atoms_.size(); ++id) {
      if (atoms_[id].op() != Op::Sin) continue;
      auto it = index_.find(make_function(Op::Cos, atoms_[id].args()[0]));
      if (it != index_.end()) pairs.emplace_back(id, it->second);
    }
    if (pairs.empty()) return x;
    for (int pass = 0; pass < 8; ++pass) {
      bool improved = false;
      for (auto [s, c] : pairs) {
        for (int dir = 0; dir < 2; ++dir) {
          std::uint32_t from = dir == 0 ? s : c;
          std::uint32_t to = dir == 0 ? c : s;
          if (!uses(x, from)) continue;
          RF y{rewrite(x.num, from, to), {}};
          for (const auto& [f, m] : x.den) y = mul(y, pow(inv(RF{rewrite(f, from, to), {}}), m));
          if (size(y) < size(x)) {
            x = std::move(y);
            improved = true;
          }
        }
      }
      if (!improved) break;
    }
    return x;
  }

  Expr to_expr(const RF& x) {
    rank_.assign(atoms_.size(), 0);
    std::vector<std::uint32_t> order(atoms_.size());
    std::iota(order.begin(), order.end(), 0u);
    std::sort(order.begin(), order.end(),
              [&](auto a, auto b) { return compare(atoms_[a], atoms_[b]) < 0; });
    for (std::uint32_t r = 0; r < order.size(); ++r) rank_[order[r]] = r;

    if (x.den.empty()) return poly_expr(x.num);
    Mono shift = negative_part(x.num);
    Poly p = times_mono(x.num, mono_inv(shift));
    std::vector<Expr> den;
    for (auto [id, e] : shift) den.push_back(make_power(atoms_[id], Rational(-e)));
    for (const auto& [f, m] : x.den) den.push_back(make_power(poly_expr(f), Rational(m)));
    return make_quotient(poly_expr(p), make_product(std::move(den)));
  }

 private:
  RF constant(const Rational& c) {
    RF r;
    if (!c.is_zero()) r.num.emplace(Mono{}, c);
    return r;
  }

  std::uint32_t atom_id(const Expr& e) {
    auto [it, fresh] = index_.try_emplace(e, static_cast<std::uint32_t>(atoms_.size()));
    if (fresh) atoms_.push_back(e);
    return it->second;
  }

  RF atom(const Expr& e) {
    RF r;
    r.num.emplace(Mono{{atom_id(e), 1}}, Rational(1));
    return r;
  }

  RF root_atom(const Expr& a, const RF& base, int q) {
    if (a.is_const()) return constant(a.value());
    std::uint32_t id = atom_id(a);
    roots_.try_emplace(id, base, q);
    return atom(a);
  }

  void check(const Poly& p) {
    if (p.size() > opt_.max_terms) throw Abandon{};
  }

  void charge(std::size_t work) {
    work_ += work;
    if (work_ > 400 * opt_.max_terms) throw Abandon{};
  }

  Poly poly_mul(const Poly& a, const Poly& b) {
    charge(a.size() * b.size());
    Poly out;
    for (const auto& [ma, ca] : a)
      for (const auto& [mb, cb] : b) add_term(out, mono_mul(ma, mb), ca * cb);
    check(out);
    return out;
  }

  Poly poly_add(Poly a, const Poly& b) {
    charge(b.size());
    for (const auto& [m, c] : b) add_term(a, m, c);
    check(a);
    return a;
  }

  Poly poly_pow(const Poly& p, int k) {
    Poly out;
    out.emplace(Mono{}, Rational(1));
    for (int i = 0; i < k; ++i) out = poly_mul(out, p);
    return out;
  }

  static Poly times_mono(const Poly& p, const Mono& m, const Rational& c = Rational(1)) {
    Poly out;
    for (const auto& [mp, cp] : p) out.emplace(mono_mul(mp, m), cp * c);
    return out;
  }

  std::optional<Poly> exact_div(Poly r, const Poly& f) {
    Poly q;
    const auto& [lf, cf] = *f.begin();
    std::size_t steps = 0;
    while (!r.empty()) {
      if (++steps > 4 * opt_.max_terms) return std::nullopt;
      auto [lr, cr] = *r.begin();
      if (!mono_divides(lf, lr)) return std::nullopt;
      Mono m = mono_mul(lr, mono_inv(lf));
      Rational c = cr / cf;
      add_term(q, m, c);
      charge(f.size());
      for (const auto& [mf, c2] : f) add_term(r, mono_mul(mf, m), -(c2 * c));
      check(r);
    }
    return q;
  }

  Poly expand_den(const RF& x) {
    Poly out;
    out.emplace(Mono{}, Rational(1));
    for (const auto& [f, m] : x.den) out = poly_mul(out, poly_pow(f, m));
    return out;
  }

  void cancel(RF& x) {
    if (x.num.empty()) {
      x.den.clear();
      return;
    }
    if (x.den.empty()) return;
    Mono shift = negative_part(x.num);
    Poly n = times_mono(x.num, mono_inv(shift));
    for (auto& [f, m] : x.den) {
      while (m > 0) {
        auto q = exact_div(n, f);
        if (!q) break;
        n = std::move(*q);
        --m;
      }
    }
    x.num = times_mono(n, shift);
    std::erase_if(x.den, [](const auto& fm) { return fm.second == 0; });
  }

  RF scale(RF x, const Rational& c) {
    for (auto& [m, v] : x.num) v *= c;
    return x;
  }

  RF add(const RF& a, const RF& b) {
    if (a.num.empty()) return b;
    if (b.num.empty()) return a;
    if (a.den.empty() && b.den.empty()) return RF{poly_add(a.num, b.num), {}};
    std::vector<std::pair<Poly, int>> u = a.den;
    for (const auto& [f, m] : b.den) {
      auto it = std::find_if(u.begin(), u.end(), [&](const auto& g) { return g.first == f; });
      if (it == u.end())
        u.emplace_back(f, m);
      else
        it->second = std::max(it->second, m);
    }
    auto lift = [&](const RF& x) {
      Poly n = x.num;
      for (const auto& [f, m] : u) {
        auto it = std::find_if(x.den.begin(), x.den.end(), [&](const auto& g) { return g.first == f; });
        int have = it == x.den.end() ? 0 : it->second;
        if (m > have) n = poly_mul(n, poly_pow(f, m - have));
      }
      return n;
    };
    RF out{poly_add(lift(a), lift(b)), std::move(u)};
    cancel(out);
    return out;
  }

  RF mul(const RF& a, const RF& b) {
    if (a.num.empty() || b.num.empty()) return {};
    RF out{poly_mul(a.num, b.num), a.den};
    for (const auto& [f, m] : b.den) {
      auto it = std::find_if(out.den.begin(), out.den.end(), [&](const auto& g) { return g.first == f; });
      if (it == out.den.end())
        out.den.emplace_back(f, m);
      else
        it->second += m;
    }
    reduce_roots(out);
    cancel(out);
    return out;
  }

  RF inv(const RF& a) {
    if (a.num.empty()) throw Abandon{};
    Poly d = expand_den(a);
    if (a.num.size() == 1) {
      const auto& [m, c] = *a.num.begin();
      RF out{times_mono(d, mono_inv(m), c.inverse()), {}};
      reduce_roots(out);
      return out;
    }
    Mono cm = content(a.num);
    Poly p = times_mono(a.num, mono_inv(cm));
    Rational lead = p.begin()->second;
    for (auto& [m, c] : p) c /= lead;
    RF out{times_mono(d, mono_inv(cm), lead.inverse()), {{std::move(p), 1}}};
    reduce_roots(out);
    cancel(out);
    return out;
  }

  RF pow(RF x, std::int64_t k) {
    if (k < 0) return pow(inv(x), -k);
    RF out = constant(Rational(1));
    while (k > 0) {
      if (k & 1) out = mul(out, x);
      k >>= 1;
      if (k > 0) x = mul(x, x);
    }
    return out;
  }

  // Replaces radical^e with |e| >= q by radical^r * base^k.
  void reduce_roots(RF& x) {
    if (roots_.empty()) return;
    Poly rest;
    RF extra;
    bool any = false;
    for (const auto& [m, c] : x.num) {
      Mono kept;
      RF factor = constant(c);
      bool hit = false;
      for (auto [id, e] : m) {
        auto it = roots_.find(id);
        if (it == roots_.end() || (e < it->second.second && e > -it->second.second)) {
          kept.emplace_back(id, e);
          continue;
        }
        int q = it->second.second;
        int r = e % q;  // sign follows e
        int k = (e - r) / q;
        if (r != 0) kept.emplace_back(id, r);
        factor = mul(factor, pow(it->second.first, k));
        hit = true;
      }
      if (!hit) {
        rest.emplace(m, c);
        continue;
      }
      any = true;
      RF term{{}, {}};
      term.num.emplace(kept, Rational(1));
      extra = add(extra, mul(term, factor));
    }
    if (!any) return;
    RF unit = constant(Rational(1));
    unit.den = x.den;
    x = add(RF{std::move(rest), x.den}, mul(extra, unit));
  }

  static bool uses(const RF& x, std::uint32_t id) {
    auto in = [&](const Poly& p) {
      for (const auto& [m, c] : p)
        for (auto [a, e] : m)
          if (a == id && e >= 2) return true;
      return false;
    };
    if (in(x.num)) return true;
    return std::any_of(x.den.begin(), x.den.end(), [&](const auto& f) { return in(f.first); });
  }

  static std::size_t size(const RF& x) {
    std::size_t n = x.num.size();
    for (const auto& [f, m] : x.den) n += f.size();
    return n;
  }

  Poly rewrite(const Poly& p, std::uint32_t from, std::uint32_t to) {
    Poly unit;  // 1 - to^2
    unit.emplace(Mono{}, Rational(1));
    unit.emplace(Mono{{to, 2}}, Rational(-1));
    Poly out;
    for (const auto& [m, c] : p) {
      int e = 0;
      Mono kept;
      for (auto [id, x] : m) {
        if (id == from && x >= 2) {
          e = x;
          if (x % 2) kept.emplace_back(id, 1);
        } else {
          kept.emplace_back(id, x);
        }
      }
      if (e == 0) {
        add_term(out, m, c);
        continue;
      }
      Poly term;
      term.emplace(kept, c);
      out = poly_add(out, poly_mul(term, poly_pow(unit, e / 2)));
    }
    return out;
  }

  Expr mono_expr(const Mono& m, const Rational& c) {
    std::vector<Expr> num{Expr(c)};
    std::vector<Expr> den;
    Mono sorted = m;
    std::sort(sorted.begin(), sorted.end(), [&](auto a, auto b) { return rank_[a.first] < rank_[b.first]; });
    for (auto [id, e] : sorted) {
      if (e > 0)
        num.push_back(make_power(atoms_[id], Rational(e)));
      else
        den.push_back(make_power(atoms_[id], Rational(-e)));
    }
    Expr n = make_product(std::move(num));
    if (den.empty()) return n;
    return make_quotient(n, make_product(std::move(den)));
  }

  Expr poly_expr(const Poly& p) {
    using Key = std::vector<std::pair<std::uint32_t, std::int32_t>>;
    std::vector<std::pair<Key, const Poly::value_type*>> terms;
    for (const auto& t : p) {
      Key k;
      for (auto [id, e] : t.first) k.emplace_back(rank_[id], e);
      std::sort(k.begin(), k.end());
      terms.emplace_back(std::move(k), &t);
    }
    std::sort(terms.begin(), terms.end(),
              [](const auto& a, const auto& b) { return LexGreater{}(a.first, b.first); });
    std::vector<Expr> out;
    for (const auto& [k, t] : terms) out.push_back(mono_expr(t->first, t->second));
    return make_sum(std::move(out));
  }

  SimplifyOptions opt_;
  std::vector<Expr> atoms_;
  std::unordered_map<Expr, std::uint32_t, ExprHash> index_;
  std::unordered_map<std::uint32_t, std::pair<RF, int>> roots_;
  std::unordered_map<const Node*, RF> memo_;
  std::vector<Expr> keep_;
  std::vector<std::uint32_t> rank_;
  std::size_t work_ = 0;
};

}  // namespace

Expr simplify(const Expr& e, const SimplifyOptions& opt) {
  try {
    Simplifier s(opt);
    RF r = s.convert(e);
    if (opt.pythagorean) r = s.pythagorean(std::move(r));
    return s.to_expr(r);
  } catch (const Abandon&) {
    return e;
  } catch (const std::overflow_error&) {
    return e;
  } catch (const DomainError&) {
    return e;
  }
}

}  // namespace hidsym
