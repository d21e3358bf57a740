#include "hidsym/tensor.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

#include "hidsym/simplify.hpp"

namespace hidsym {

namespace {

std::size_t ipow(std::size_t b, std::size_t e) {
  std::size_t r = 1;
  while (e--) r *= b;
  return r;
}

void require_same_shape(const TensorField& a, const TensorField& b) {
  if (a.dim() != b.dim() || a.slots() != b.slots())
    throw std::invalid_argument("tensor shape mismatch");
}

}  // namespace

int permutation_sign(std::span<const std::size_t> perm) {
  int sign = 1;
  for (std::size_t i = 0; i < perm.size(); ++i)
    for (std::size_t j = i + 1; j < perm.size(); ++j) {
      if (perm[i] == perm[j]) return 0;
      if (perm[i] > perm[j]) sign = -sign;
    }
  return sign;
}

TensorField::TensorField(std::size_t dim, std::vector<Variance> slots, Symmetry sym)
    : dim_(dim), slots_(std::move(slots)), sym_(sym), comps_(ipow(dim, slots_.size())) {}

TensorField TensorField::scalar(std::size_t dim, Expr value) {
  TensorField t(dim, {});
  t.comps_[0] = std::move(value);
  return t;
}

TensorField TensorField::vector(std::vector<Expr> comps) {
  TensorField t(comps.size(), {Variance::Up});
  t.comps_ = std::move(comps);
  return t;
}

TensorField TensorField::one_form(std::vector<Expr> comps) {
  TensorField t(comps.size(), {Variance::Down}, Symmetry::Antisymmetric);
  t.comps_ = std::move(comps);
  return t;
}

TensorField TensorField::form(std::size_t dim, std::size_t p, const std::map<Index, Expr>& comps) {
  TensorField t(dim, std::vector<Variance>(p, Variance::Down), Symmetry::Antisymmetric);
  for (const auto& [idx, value] : comps) {
    if (idx.size() != p) throw std::invalid_argument("form index tuple has wrong length");
    for (std::size_t k = 0; k < p; ++k) {
      if (idx[k] >= dim) throw std::invalid_argument("form index out of range");
      if (k > 0 && idx[k] <= idx[k - 1])
        throw std::invalid_argument("form index tuples must be strictly increasing");
    }
    std::vector<std::size_t> order(p);
    std::iota(order.begin(), order.end(), 0u);
    do {
      Index permuted(p);
      for (std::size_t k = 0; k < p; ++k) permuted[k] = idx[order[k]];
      t.at(permuted) = permutation_sign(order) > 0 ? value : -value;
    } while (std::next_permutation(order.begin(), order.end()));
  }
  return t;
}

TensorField TensorField::covariant2(const std::vector<std::vector<Expr>>& m, Symmetry sym) {
  std::size_t n = m.size();
  TensorField t(n, {Variance::Down, Variance::Down}, sym);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) t.comps_[i * n + j] = m.at(i).at(j);
  return t;
}

bool TensorField::all_down() const {
  return std::all_of(slots_.begin(), slots_.end(), [](Variance v) { return v == Variance::Down; });
}

std::size_t TensorField::flat(std::span<const std::size_t> idx) const {
  if (idx.size() != slots_.size()) throw std::out_of_range("tensor index has wrong rank");
  std::size_t k = 0;
  for (auto i : idx) {
    if (i >= dim_) throw std::out_of_range("tensor index out of range");
    k = k * dim_ + i;
  }
  return k;
}

Index TensorField::unflat(std::size_t k) const {
  Index idx(slots_.size());
  for (std::size_t s = slots_.size(); s-- > 0;) {
    idx[s] = k % dim_;
    k /= dim_;
  }
  return idx;
}

TensorField operator+(const TensorField& a, const TensorField& b) {
  require_same_shape(a, b);
  TensorField out = a;
  for (std::size_t k = 0; k < a.size(); ++k) out.comps_[k] = a.comps_[k] + b.comps_[k];
  if (a.sym_ != b.sym_) out.sym_ = Symmetry::None;
  return out;
}

TensorField operator-(const TensorField& a, const TensorField& b) {
  require_same_shape(a, b);
  TensorField out = a;
  for (std::size_t k = 0; k < a.size(); ++k) out.comps_[k] = a.comps_[k] - b.comps_[k];
  if (a.sym_ != b.sym_) out.sym_ = Symmetry::None;
  return out;
}

TensorField operator*(const Expr& s, const TensorField& t) {
  TensorField out = t;
  for (auto& c : out.comps_) c = s * c;
  return out;
}

TensorField tensor_product(const TensorField& a, const TensorField& b) {
  if (a.dim() != b.dim()) throw std::invalid_argument("dimension mismatch");
  std::vector<Variance> slots = a.slots();
  slots.insert(slots.end(), b.slots().begin(), b.slots().end());
  TensorField out(a.dim(), std::move(slots));
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j) out[i * b.size() + j] = a[i] * b[j];
  return out;
}

TensorField contract(const TensorField& t, std::size_t a, std::size_t b) {
  if (a == b || a >= t.rank() || b >= t.rank()) throw std::invalid_argument("bad contraction slots");
  if (t.variance(a) == t.variance(b)) throw std::invalid_argument("contraction needs opposite variance");
  std::vector<Variance> slots;
  for (std::size_t s = 0; s < t.rank(); ++s)
    if (s != a && s != b) slots.push_back(t.variance(s));
  TensorField out(t.dim(), slots);
  std::vector<std::vector<Expr>> acc(out.size());
  for (std::size_t k = 0; k < t.size(); ++k) {
    Index idx = t.unflat(k);
    if (idx[a] != idx[b]) continue;
    Index rest;
    for (std::size_t s = 0; s < t.rank(); ++s)
      if (s != a && s != b) rest.push_back(idx[s]);
    if (!t[k].is_zero()) acc[out.flat(rest)].push_back(t[k]);
  }
  for (std::size_t k = 0; k < out.size(); ++k) out[k] = make_sum(std::move(acc[k]));
  return out;
}

TensorField permute(const TensorField& t, std::span<const std::size_t> perm) {
  if (perm.size() != t.rank()) throw std::invalid_argument("permutation has wrong length");
  std::vector<Variance> slots(t.rank());
  for (std::size_t k = 0; k < t.rank(); ++k) slots[k] = t.variance(perm[k]);
  TensorField out(t.dim(), slots, t.symmetry());
  for (std::size_t k = 0; k < out.size(); ++k) {
    Index idx = out.unflat(k);
    Index src(t.rank());
    for (std::size_t s = 0; s < t.rank(); ++s) src[perm[s]] = idx[s];
    out[k] = t.at(src);
  }
  return out;
}

namespace {

TensorField project(const TensorField& t, bool anti) {
  std::size_t r = t.rank();
  std::vector<std::size_t> order(r);
  std::iota(order.begin(), order.end(), 0u);
  std::vector<std::vector<Expr>> acc(t.size());
  std::size_t count = 0;
  do {
    int sign = anti ? permutation_sign(order) : 1;
    ++count;
    for (std::size_t k = 0; k < t.size(); ++k) {
      Index idx = t.unflat(k);
      Index src(r);
      for (std::size_t s = 0; s < r; ++s) src[s] = idx[order[s]];
      const Expr& c = t.at(src);
      if (!c.is_zero()) acc[k].push_back(sign > 0 ? c : -c);
    }
  } while (std::next_permutation(order.begin(), order.end()));
  TensorField out(t.dim(), t.slots(), anti ? Symmetry::Antisymmetric : Symmetry::Symmetric);
  Expr w(Rational(1, static_cast<std::int64_t>(count)));
  for (std::size_t k = 0; k < t.size(); ++k) out[k] = w * make_sum(std::move(acc[k]));
  return out;
}

}  // namespace

TensorField symmetrize(const TensorField& t) { return project(t, false); }
TensorField antisymmetrize(const TensorField& t) { return project(t, true); }

TensorField simplified(const TensorField& t) {
  return t.map([](const Expr& e) { return simplify(e); });
}

bool structurally_antisymmetric(const TensorField& t) {
  for (std::size_t k = 0; k < t.size(); ++k) {
    Index idx = t.unflat(k);
    for (std::size_t a = 0; a < idx.size(); ++a)
      for (std::size_t b = a + 1; b < idx.size(); ++b) {
        Index sw = idx;
        std::swap(sw[a], sw[b]);
        if (idx[a] == idx[b]) {
          if (!t[k].is_zero()) return false;
        } else if (!(t.at(sw) == -t[k])) {
          return false;
        }
      }
  }
  return true;
}

bool structurally_symmetric(const TensorField& t) {
  for (std::size_t k = 0; k < t.size(); ++k) {
    Index idx = t.unflat(k);
    for (std::size_t a = 0; a < idx.size(); ++a)
      for (std::size_t b = a + 1; b < idx.size(); ++b) {
        Index sw = idx;
        std::swap(sw[a], sw[b]);
        if (!(t.at(sw) == t[k])) return false;
      }
  }
  return true;
}

}  // namespace hidsym
