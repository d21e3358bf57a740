#pragma once

#include <cstdint>
#include <memory>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "hidsym/expr.hpp"
#include "hidsym/tensor.hpp"

namespace hidsym {

class GeometryError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
};

class Chart {
 public:
  Chart() = default;
  Chart(std::vector<std::string> coordinates, std::vector<Interval> box);

  [[nodiscard]] std::size_t dim() const { return coords_.size(); }
  [[nodiscard]] const std::vector<std::string>& coordinates() const { return coords_; }
  [[nodiscard]] const std::vector<Interval>& box() const { return box_; }
  [[nodiscard]] std::set<std::string> coordinate_set() const { return {coords_.begin(), coords_.end()}; }
  [[nodiscard]] std::size_t index_of(const std::string& name) const;
  [[nodiscard]] bool contains(std::span<const double> x) const;

  [[nodiscard]] Point to_point(std::span<const double> x) const;
  [[nodiscard]] std::vector<double> to_values(const Point& p) const;

 private:
  std::vector<std::string> coords_;
  std::vector<Interval> box_;
};

/// Deterministic uniform samples from the chart box.
std::vector<std::vector<double>> sample_points(const Chart& chart, std::size_t count, std::uint64_t seed);

using Matrix = std::vector<std::vector<Expr>>;

/// Chart plus metric. Derived geometric quantities are computed on first use
/// and cached; copies share the cache.
class Manifold {
 public:
  Manifold(std::string name, Chart chart, Matrix metric, ParamEnv params, std::vector<int> signature);

  [[nodiscard]] const std::string& name() const { return name_; }
  [[nodiscard]] const Chart& chart() const { return chart_; }
  [[nodiscard]] std::size_t dim() const { return chart_.dim(); }
  [[nodiscard]] const Matrix& metric() const { return g_; }
  [[nodiscard]] const ParamEnv& params() const { return params_; }
  [[nodiscard]] const std::vector<int>& signature() const { return signature_; }

  [[nodiscard]] TensorField metric_tensor() const;
  [[nodiscard]] const Matrix& inverse_metric() const;
  [[nodiscard]] TensorField inverse_metric_tensor() const;
  /// Gamma^rho_{mu nu}, flattened as [rho][mu][nu].
  [[nodiscard]] const std::vector<Expr>& christoffel() const;
  [[nodiscard]] const Expr& christoffel(std::size_t rho, std::size_t mu, std::size_t nu) const;
  /// R^rho_{sigma mu nu}.
  [[nodiscard]] const TensorField& riemann() const;
  /// R_{sigma nu} = R^lambda_{sigma lambda nu}.
  [[nodiscard]] const TensorField& ricci() const;

  /// Compiles expressions against this chart and parameter set.
  [[nodiscard]] Program compile(std::span<const Expr> exprs) const;
  [[nodiscard]] Program compile(const TensorField& t) const { return compile(t.components()); }

 private:
  struct Cache;
  std::string name_;
  Chart chart_;
  Matrix g_;
  ParamEnv params_;
  std::vector<int> signature_;
  std::shared_ptr<Cache> cache_;
};

/// Checks det g != 0 and eigenvalue signs against the declared signature.
void validate_metric(const Manifold& m, std::size_t count = 20, std::uint64_t seed = 0);

/// Levi-Civita covariant derivative; the derivative index becomes slot 0.
TensorField covariant_derivative(const TensorField& t, const Manifold& m);
TensorField lower_index(const TensorField& t, std::size_t slot, const Manifold& m);
TensorField raise_index(const TensorField& t, std::size_t slot, const Manifold& m);
/// Lowers every contravariant slot.
TensorField lower_all(const TensorField& t, const Manifold& m);

/// (df)_{l m1..mp} = (p+1) d_[l f_{m1..mp]} with unit-weight projector.
TensorField exterior_derivative(const TensorField& f, const Chart& chart);
/// (d*f)_{m2..mp} = -g^{lm} nabla_l f_{m m2..mp}.
TensorField codifferential(const TensorField& f, const Manifold& m);
/// alpha ^ beta for a 1-form alpha and a p-form beta.
TensorField wedge1(const TensorField& alpha, const TensorField& beta);
/// General wedge product of a p-form and a q-form.
TensorField wedge(const TensorField& alpha, const TensorField& beta);
/// [X, Y]^mu = X^nu d_nu Y^mu - Y^nu d_nu X^mu.
TensorField lie_bracket(const TensorField& x, const TensorField& y, const Chart& chart);
/// Plain partial derivative of every component; new slot 0 (down).
TensorField partial_derivative(const TensorField& t, const Chart& chart);

}  // namespace hidsym
