#pragma once

#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "hidsym/manifold.hpp"

namespace hidsym {

struct GeodesicState {
  double t = 0.0;
  Point position;
  Point velocity;  // coordinate name -> ds^mu/dt
};

enum class Method { RK4, RK45 };

struct IntegratorConfig {
  Method method = Method::RK4;
  double step = 1e-3;        // RK4 step, initial step for RK45
  double tolerance = 1e-10;  // RK45 local error target
  double t0 = 0.0;
  double t1 = 10.0;
  std::size_t stride = 1;    // keep every stride-th accepted step
  double min_step = 1e-12;   // RK45 underflow threshold
  /// Coordinates that wrap with the given period. They are kept in
  /// [lo, lo + period) of the chart box and not checked against its upper end.
  std::map<std::string, double> periodic;
};

enum class TrajectoryStatus { Completed, DomainExit, StepUnderflow };

struct Trajectory {
  std::vector<GeodesicState> states;
  TrajectoryStatus status = TrajectoryStatus::Completed;
  std::size_t steps = 0;
  [[nodiscard]] bool complete() const { return status == TrajectoryStatus::Completed; }
};

/// x'' + Gamma x' x' = 0. Throws GeometryError if s0 lies outside the chart box
/// or the configuration is invalid. Leaving the box ends the run early with
/// status DomainExit; the samples up to that point are kept.
Trajectory integrate(const Manifold& m, const GeodesicState& s0, const IntegratorConfig& cfg = {});

/// Runs independent trajectories on worker threads.
std::vector<Trajectory> integrate_many(const Manifold& m, std::span<const GeodesicState> starts,
                                       const IntegratorConfig& cfg = {}, unsigned threads = 0);

/// Q = K_{mu1..mur} s'^mu1 ... s'^mur for a vector field (r = 1, lowered) or a
/// symmetric tensor of any variance (lowered).
class Invariant {
 public:
  Invariant(std::string name, const TensorField& q, const Manifold& m);
  [[nodiscard]] const std::string& name() const { return name_; }
  [[nodiscard]] std::size_t rank() const { return rank_; }
  [[nodiscard]] double operator()(std::span<const double> x, std::span<const double> v) const;
  [[nodiscard]] double operator()(const GeodesicState& s, const Chart& chart) const;

 private:
  std::string name_;
  std::size_t rank_ = 0;
  std::size_t dim_ = 0;
  Program program_;
};

struct ConservationReport {
  std::string name;
  double initial = 0.0;
  double max_abs_drift = 0.0;
  double relative_drift = 0.0;  // max|Q - Q0| / max(1, |Q0|)
  double tolerance = 1e-8;
  std::size_t samples = 0;
  bool pass = true;
};

ConservationReport monitor_invariant(const Trajectory& traj, const Invariant& q, const Manifold& m,
                                     double tolerance = 1e-8);

/// Columns: t, coordinates, velocities, then one per invariant.
void write_csv(std::ostream& os, const Trajectory& traj, const Manifold& m, std::span<const Invariant> invariants = {});

}  // namespace hidsym
