#pragma once

#include <cstdint>
#include <limits>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "hidsym/manifold.hpp"

namespace hidsym {

struct CheckOptions {
  std::size_t points = 20;
  std::uint64_t seed = 0;
  double tol = 1e-9;
};

struct ResidualReport {
  std::string check;
  double tolerance = 1e-9;
  std::size_t points = 0;
  double max_abs = 0.0;
  double max_rel = 0.0;
  bool pass = true;
  Point worst_point;
  std::map<std::string, double> extra;
  std::vector<std::string> notes;
};

/// Folds per-point residual magnitudes into a report. The relative residual
/// at a point is abs / scale; a zero scale counts as exact when abs is zero.
class ResidualAccumulator {
 public:
  ResidualAccumulator(std::string check, double tol) : check_(std::move(check)), tol_(tol) {}

  void add(const Point& p, double abs, double scale);
  [[nodiscard]] ResidualReport finish() const;

 private:
  std::string check_;
  double tol_;
  std::size_t points_ = 0;
  double max_abs_ = 0.0;
  double max_rel_ = 0.0;
  Point worst_;
};

/// Combines reports: worst residuals, pass only if all pass.
ResidualReport merge_reports(std::string check, std::span<const ResidualReport> parts);

double max_abs(std::span<const double> v);

/// Evaluates `residual` and `scale` expression batches at sampled points.
ResidualReport sampled_residual(std::string check, const Manifold& m, std::span<const Expr> residual,
                                std::span<const Expr> scale, const CheckOptions& opt);

}  // namespace hidsym
