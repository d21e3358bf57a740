#include "hidsym/geodesic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <thread>

#include "hidsym/tensor.hpp"

namespace hidsym {

namespace {

using State = std::vector<double>;  // x (n) then v (n)

class Flow {
 public:
  explicit Flow(const Manifold& m) : n_(m.dim()), gamma_(m.compile(std::span(m.christoffel()))), buf_(n_ * n_ * n_) {}

  void operator()(const State& y, State& dy) {
    gamma_.run(std::span(y.data(), n_), buf_);
    for (std::size_t i = 0; i < n_; ++i) dy[i] = y[n_ + i];
    for (std::size_t r = 0; r < n_; ++r) {
      double acc = 0.0;
      const double* gr = buf_.data() + r * n_ * n_;
      for (std::size_t a = 0; a < n_; ++a) {
        double va = y[n_ + a];
        if (va == 0.0) continue;
        for (std::size_t b = 0; b < n_; ++b) acc += gr[a * n_ + b] * va * y[n_ + b];
      }
      dy[n_ + r] = -acc;
    }
  }

 private:
  std::size_t n_;
  Program gamma_;
  std::vector<double> buf_;
};

struct Domain {
  std::vector<Interval> box;
  std::vector<double> period;  // 0 for non-periodic

  bool inside(State& y) const {
    for (std::size_t i = 0; i < box.size(); ++i) {
      if (!std::isfinite(y[i]) || !std::isfinite(y[box.size() + i])) return false;
      if (period[i] > 0.0) {
        y[i] = box[i].lo + std::fmod(std::fmod(y[i] - box[i].lo, period[i]) + period[i], period[i]);
      } else if (y[i] < box[i].lo || y[i] > box[i].hi) {
        return false;
      }
    }
    return true;
  }
};

GeodesicState to_state(double t, const State& y, const Chart& chart) {
  std::size_t n = chart.dim();
  GeodesicState s;
  s.t = t;
  s.position = chart.to_point(std::span(y.data(), n));
  s.velocity = chart.to_point(std::span(y.data() + n, n));
  return s;
}

void axpy(State& out, const State& y, double h, const State& k) {
  for (std::size_t i = 0; i < y.size(); ++i) out[i] = y[i] + h * k[i];
}

}  // namespace

Trajectory integrate(const Manifold& m, const GeodesicState& s0, const IntegratorConfig& cfg) {
  const Chart& chart = m.chart();
  std::size_t n = chart.dim();
  if (!(cfg.step > 0.0)) throw GeometryError("integrator step must be positive");
  if (cfg.method == Method::RK45 && !(cfg.tolerance > 0.0)) throw GeometryError("tolerance must be positive");
  if (!(cfg.t1 > cfg.t0)) throw GeometryError("empty time span");
  if (cfg.stride == 0) throw GeometryError("stride must be positive");

  Domain dom{chart.box(), std::vector<double>(n, 0.0)};
  for (const auto& [name, p] : cfg.periodic) {
    if (!(p > 0.0)) throw GeometryError("period must be positive");
    dom.period[chart.index_of(name)] = p;
  }
  State y(2 * n);
  std::vector<double> x0 = chart.to_values(s0.position);
  std::vector<double> v0 = chart.to_values(s0.velocity);
  std::copy(x0.begin(), x0.end(), y.begin());
  std::copy(v0.begin(), v0.end(), y.begin() + static_cast<std::ptrdiff_t>(n));
  for (std::size_t i = 0; i < n; ++i)
    if (dom.period[i] == 0.0 && (y[i] < dom.box[i].lo || y[i] > dom.box[i].hi))
      throw GeometryError("initial point outside the chart box");
  dom.inside(y);

  Flow f(m);
  Trajectory traj;
  double t = cfg.t0;
  traj.states.push_back(to_state(t, y, chart));
  std::size_t kept = 0;
  auto record = [&](bool last) {
    ++traj.steps;
    if (++kept % cfg.stride == 0 || last) traj.states.push_back(to_state(t, y, chart));
  };

  State k1(2 * n), k2(2 * n), k3(2 * n), k4(2 * n), tmp(2 * n);
  if (cfg.method == Method::RK4) {
    auto total = static_cast<std::size_t>(std::llround((cfg.t1 - cfg.t0) / cfg.step));
    total = std::max<std::size_t>(total, 1);
    double h = (cfg.t1 - cfg.t0) / static_cast<double>(total);
    for (std::size_t s = 0; s < total; ++s) {
      try {
        f(y, k1);
        axpy(tmp, y, h / 2, k1);
        f(tmp, k2);
        axpy(tmp, y, h / 2, k2);
        f(tmp, k3);
        axpy(tmp, y, h, k3);
        f(tmp, k4);
      } catch (const DomainError&) {
        traj.status = TrajectoryStatus::DomainExit;
        break;
      }
      State next(2 * n);
      for (std::size_t i = 0; i < 2 * n; ++i) next[i] = y[i] + h / 6 * (k1[i] + 2 * k2[i] + 2 * k3[i] + k4[i]);
      if (!dom.inside(next)) {
        traj.status = TrajectoryStatus::DomainExit;
        break;
      }
      y = std::move(next);
      t = cfg.t0 + static_cast<double>(s + 1) * h;
      record(s + 1 == total);
    }
    if (traj.status != TrajectoryStatus::Completed && kept % cfg.stride != 0)
      traj.states.push_back(to_state(t, y, chart));
    return traj;
  }

  // Dormand-Prince 5(4).
  static constexpr double a21 = 1.0 / 5;
  static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
  static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
  static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
  static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                          a65 = -5103.0 / 18656;
  static constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784, b6 = 11.0 / 84;
  static constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                          e6 = 22.0 / 525, e7 = -1.0 / 40;
  State k5(2 * n), k6(2 * n), k7(2 * n), next(2 * n);
  double h = std::min(cfg.step, cfg.t1 - cfg.t0);
  bool have_k1 = false;
  while (t < cfg.t1) {
    if (h < cfg.min_step) {
      traj.status = TrajectoryStatus::StepUnderflow;
      break;
    }
    bool last = t + h >= cfg.t1;
    if (last) h = cfg.t1 - t;
    double err = 0.0;
    try {
      if (!have_k1) f(y, k1);
      have_k1 = true;
      for (std::size_t i = 0; i < 2 * n; ++i) tmp[i] = y[i] + h * a21 * k1[i];
      f(tmp, k2);
      for (std::size_t i = 0; i < 2 * n; ++i) tmp[i] = y[i] + h * (a31 * k1[i] + a32 * k2[i]);
      f(tmp, k3);
      for (std::size_t i = 0; i < 2 * n; ++i) tmp[i] = y[i] + h * (a41 * k1[i] + a42 * k2[i] + a43 * k3[i]);
      f(tmp, k4);
      for (std::size_t i = 0; i < 2 * n; ++i)
        tmp[i] = y[i] + h * (a51 * k1[i] + a52 * k2[i] + a53 * k3[i] + a54 * k4[i]);
      f(tmp, k5);
      for (std::size_t i = 0; i < 2 * n; ++i)
        tmp[i] = y[i] + h * (a61 * k1[i] + a62 * k2[i] + a63 * k3[i] + a64 * k4[i] + a65 * k5[i]);
      f(tmp, k6);
      for (std::size_t i = 0; i < 2 * n; ++i)
        next[i] = y[i] + h * (b1 * k1[i] + b3 * k3[i] + b4 * k4[i] + b5 * k5[i] + b6 * k6[i]);
      f(next, k7);
      for (std::size_t i = 0; i < 2 * n; ++i) {
        double e = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] + e7 * k7[i]);
        double sc = cfg.tolerance * (1.0 + std::max(std::abs(y[i]), std::abs(next[i])));
        err = std::max(err, std::abs(e) / sc);
      }
    } catch (const DomainError&) {
      err = std::numeric_limits<double>::infinity();
    }
    if (!std::isfinite(err)) {
      h /= 4;
      continue;
    }
    if (err <= 1.0) {
      State cand = next;
      if (!dom.inside(cand)) {
        traj.status = TrajectoryStatus::DomainExit;
        break;
      }
      y = std::move(cand);
      t = last ? cfg.t1 : t + h;
      k1 = k7;
      record(last);
    }
    double factor = err == 0.0 ? 5.0 : std::clamp(0.9 * std::pow(err, -0.2), 0.2, 5.0);
    h *= factor;
  }
  if (traj.status != TrajectoryStatus::Completed && kept % cfg.stride != 0)
    traj.states.push_back(to_state(t, y, chart));
  return traj;
}

std::vector<Trajectory> integrate_many(const Manifold& m, std::span<const GeodesicState> starts,
                                       const IntegratorConfig& cfg, unsigned threads) {
  // Force the shared symbolic caches before fanning out.
  (void)m.christoffel();
  std::vector<Trajectory> out(starts.size());
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = std::min<unsigned>(threads, static_cast<unsigned>(std::max<std::size_t>(starts.size(), 1)));
  std::vector<std::exception_ptr> errors(threads);
  std::vector<std::thread> pool;
  for (unsigned w = 0; w < threads; ++w)
    pool.emplace_back([&, w] {
      try {
        for (std::size_t i = w; i < starts.size(); i += threads) out[i] = integrate(m, starts[i], cfg);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  for (auto& th : pool) th.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  return out;
}

Invariant::Invariant(std::string name, const TensorField& q, const Manifold& m) : name_(std::move(name)) {
  if (q.dim() != m.dim()) throw GeometryError("invariant dimension does not match the manifold");
  if (q.rank() == 0) throw GeometryError("invariant needs rank >= 1");
  if (q.rank() > 1 && q.symmetry() != Symmetry::Symmetric && !structurally_symmetric(q))
    throw GeometryError("invariant tensor must be symmetric");
  TensorField low = lower_all(q, m);
  rank_ = low.rank();
  dim_ = low.dim();
  program_ = m.compile(low);
}

double Invariant::operator()(std::span<const double> x, std::span<const double> v) const {
  std::vector<double> k = program_(x);
  double total = 0.0;
  Index idx(rank_, 0);
  for (std::size_t f = 0; f < k.size(); ++f) {
    if (k[f] == 0.0) continue;
    std::size_t rem = f;
    double w = k[f];
    for (std::size_t s = 0; s < rank_; ++s) {
      w *= v[rem % dim_];
      rem /= dim_;
    }
    total += w;
  }
  return total;
}

double Invariant::operator()(const GeodesicState& s, const Chart& chart) const {
  return (*this)(chart.to_values(s.position), chart.to_values(s.velocity));
}

ConservationReport monitor_invariant(const Trajectory& traj, const Invariant& q, const Manifold& m, double tolerance) {
  ConservationReport r;
  r.name = q.name();
  r.tolerance = tolerance;
  if (traj.states.empty()) return r;
  r.initial = q(traj.states.front(), m.chart());
  for (const auto& s : traj.states) {
    r.max_abs_drift = std::max(r.max_abs_drift, std::abs(q(s, m.chart()) - r.initial));
    ++r.samples;
  }
  r.relative_drift = r.max_abs_drift / std::max(1.0, std::abs(r.initial));
  r.pass = r.relative_drift < tolerance;
  return r;
}

void write_csv(std::ostream& os, const Trajectory& traj, const Manifold& m, std::span<const Invariant> invariants) {
  const auto& names = m.chart().coordinates();
  os << "t";
  for (const auto& c : names) os << ',' << c;
  for (const auto& c : names) os << ",d" << c;
  for (const auto& q : invariants) os << ',' << q.name();
  os << '\n';
  auto old = os.precision(17);
  for (const auto& s : traj.states) {
    os << s.t;
    for (const auto& c : names) os << ',' << s.position.at(c);
    for (const auto& c : names) os << ',' << s.velocity.at(c);
    for (const auto& q : invariants) os << ',' << q(s, m.chart());
    os << '\n';
  }
  os.precision(old);
}

}  // namespace hidsym
