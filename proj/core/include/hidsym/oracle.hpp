#pragma once

#include <span>
#include <vector>

#include "hidsym/manifold.hpp"
#include "hidsym/report.hpp"

namespace hidsym {

// Finite-difference geometry from numeric metric values only. Derivatives use
// the fourth-order central stencil.

/// Gamma^rho_{mu nu} at x, flattened [rho][mu][nu].
std::vector<double> fd_christoffel(const Manifold& m, std::span<const double> x, double h = 1e-3);
/// R^rho_{sigma mu nu} at x from differences of fd_christoffel, flattened.
std::vector<double> fd_riemann(const Manifold& m, std::span<const double> x, double h = 1e-3);

/// Symbolic Christoffels and Riemann tensor against the oracle. Relative
/// residual per point is max|sym - fd| / max|sym|; the Riemann scale also
/// includes max|Gamma|^2.
ResidualReport christoffel_oracle_check(const Manifold& m, const CheckOptions& opt = {.points = 5, .seed = 0, .tol = 1e-6});
ResidualReport riemann_oracle_check(const Manifold& m, const CheckOptions& opt = {.points = 5, .seed = 0, .tol = 1e-6});

}  // namespace hidsym
