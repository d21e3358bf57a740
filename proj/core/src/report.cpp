#include "hidsym/report.hpp"

#include <algorithm>
#include <cmath>

namespace hidsym {

void ResidualAccumulator::add(const Point& p, double abs, double scale) {
  double rel;
  if (scale > 0.0)
    rel = abs / scale;
  else
    rel = abs == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
  if (std::isnan(abs)) rel = abs = std::numeric_limits<double>::infinity();
  if (points_ == 0 || rel > max_rel_) {
    max_rel_ = rel;
    worst_ = p;
  }
  max_abs_ = std::max(max_abs_, abs);
  ++points_;
}

ResidualReport ResidualAccumulator::finish() const {
  ResidualReport r;
  r.check = check_;
  r.tolerance = tol_;
  r.points = points_;
  r.max_abs = max_abs_;
  r.max_rel = max_rel_;
  r.pass = max_rel_ < tol_;
  r.worst_point = worst_;
  return r;
}

ResidualReport merge_reports(std::string check, std::span<const ResidualReport> parts) {
  ResidualReport r;
  r.check = std::move(check);
  if (parts.empty()) return r;
  r.tolerance = parts.front().tolerance;
  for (const auto& p : parts) {
    r.points = std::max(r.points, p.points);
    r.max_abs = std::max(r.max_abs, p.max_abs);
    if (p.max_rel >= r.max_rel) {
      r.max_rel = p.max_rel;
      r.worst_point = p.worst_point;
    }
    r.pass = r.pass && p.pass;
    r.extra[p.check + ".max_relative_residual"] = p.max_rel;
    r.extra[p.check + ".pass"] = p.pass ? 1.0 : 0.0;
    for (const auto& n : p.notes) r.notes.push_back(p.check + ": " + n);
  }
  return r;
}

double max_abs(std::span<const double> v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::isnan(x) ? std::numeric_limits<double>::infinity() : std::abs(x));
  return m;
}

ResidualReport sampled_residual(std::string check, const Manifold& m, std::span<const Expr> residual,
                                std::span<const Expr> scale, const CheckOptions& opt) {
  Program res = m.compile(residual);
  Program sc = m.compile(scale);
  ResidualAccumulator acc(std::move(check), opt.tol);
  for (const auto& x : sample_points(m.chart(), opt.points, opt.seed))
    acc.add(m.chart().to_point(x), max_abs(res(x)), max_abs(sc(x)));
  return acc.finish();
}

}  // namespace hidsym
