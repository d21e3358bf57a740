#pragma once

#include <cstddef>
#include <initializer_list>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "hidsym/expr.hpp"

namespace hidsym {

enum class Variance : std::uint8_t { Up, Down };
enum class Symmetry : std::uint8_t { None, Symmetric, Antisymmetric };

using Index = std::vector<std::size_t>;

/// Dense component array over an n-dimensional chart, row-major in the slots.
class TensorField {
 public:
  TensorField() = default;
  TensorField(std::size_t dim, std::vector<Variance> slots, Symmetry sym = Symmetry::None);

  static TensorField scalar(std::size_t dim, Expr value);
  /// Contravariant vector field X^mu.
  static TensorField vector(std::vector<Expr> comps);
  /// Covariant 1-form.
  static TensorField one_form(std::vector<Expr> comps);
  /// p-form from components on strictly increasing index tuples; the rest is
  /// filled by antisymmetry.
  static TensorField form(std::size_t dim, std::size_t p, const std::map<Index, Expr>& comps);
  /// Covariant rank-2 tensor from a matrix.
  static TensorField covariant2(const std::vector<std::vector<Expr>>& m, Symmetry sym = Symmetry::None);

  [[nodiscard]] std::size_t dim() const { return dim_; }
  [[nodiscard]] std::size_t rank() const { return slots_.size(); }
  [[nodiscard]] const std::vector<Variance>& slots() const { return slots_; }
  [[nodiscard]] Variance variance(std::size_t slot) const { return slots_.at(slot); }
  [[nodiscard]] Symmetry symmetry() const { return sym_; }
  void set_symmetry(Symmetry s) { sym_ = s; }
  [[nodiscard]] bool all_down() const;

  [[nodiscard]] std::size_t size() const { return comps_.size(); }
  [[nodiscard]] std::size_t flat(std::span<const std::size_t> idx) const;
  [[nodiscard]] Index unflat(std::size_t k) const;

  Expr& operator[](std::size_t k) { return comps_[k]; }
  const Expr& operator[](std::size_t k) const { return comps_[k]; }
  Expr& at(std::initializer_list<std::size_t> idx) { return comps_[flat(std::span(idx.begin(), idx.size()))]; }
  [[nodiscard]] const Expr& at(std::initializer_list<std::size_t> idx) const {
    return comps_[flat(std::span(idx.begin(), idx.size()))];
  }
  Expr& at(std::span<const std::size_t> idx) { return comps_[flat(idx)]; }
  [[nodiscard]] const Expr& at(std::span<const std::size_t> idx) const { return comps_[flat(idx)]; }

  [[nodiscard]] const std::vector<Expr>& components() const { return comps_; }
  std::vector<Expr>& components() { return comps_; }

  /// Applies `f` to every component.
  template <class F>
  [[nodiscard]] TensorField map(F&& f) const {
    TensorField out = *this;
    for (auto& c : out.comps_) c = f(c);
    return out;
  }

  friend TensorField operator+(const TensorField& a, const TensorField& b);
  friend TensorField operator-(const TensorField& a, const TensorField& b);
  friend TensorField operator*(const Expr& s, const TensorField& t);

 private:
  std::size_t dim_ = 0;
  std::vector<Variance> slots_;
  Symmetry sym_ = Symmetry::None;
  std::vector<Expr> comps_;
};

/// Outer product; slots of `a` first.
TensorField tensor_product(const TensorField& a, const TensorField& b);
/// Trace over two slots of opposite variance.
TensorField contract(const TensorField& t, std::size_t a, std::size_t b);
/// Reorders slots: result slot k is input slot perm[k].
TensorField permute(const TensorField& t, std::span<const std::size_t> perm);
/// Unit-weight (1/k!) projectors over all slots.
TensorField symmetrize(const TensorField& t);
TensorField antisymmetrize(const TensorField& t);

/// Applies `simplify` to every component.
TensorField simplified(const TensorField& t);

/// Structural antisymmetry test on all slot transpositions.
bool structurally_antisymmetric(const TensorField& t);
bool structurally_symmetric(const TensorField& t);

/// Sign of a permutation given as a sequence of distinct values.
int permutation_sign(std::span<const std::size_t> perm);

}  // namespace hidsym
