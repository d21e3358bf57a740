#pragma once

#include <array>
#include <optional>
#include <vector>

#include "hidsym/killing.hpp"
#include "hidsym/manifold.hpp"
#include "hidsym/report.hpp"

namespace hidsym {

/// One almost contact and two almost paracontact structures.
/// phi[a] is a (1,1) tensor phi^mu_nu, xi[a] a vector field, eta[a] a 1-form.
struct MixedThreeStructure {
  std::array<TensorField, 3> phi;
  std::array<TensorField, 3> xi;
  std::array<TensorField, 3> eta;
  std::array<int, 3> eps{1, -1, -1};
};

/// Almost (para)contact identities, cross relations over even permutations,
/// and metric compatibility.
ResidualReport structure_identity_suite(const Manifold& m, const MixedThreeStructure& s, const CheckOptions& opt = {});

/// Sasakian condition for alpha = 1 and LP-Sasakian conditions for alpha = 2, 3,
/// with X, Y over the coordinate basis. The extras carry the uniform variant
/// (nabla_X phi_a) Y = eta_a(Y) X - g(X, Y) xi_a.
ResidualReport sasakian_residuals(const Manifold& m, const MixedThreeStructure& s, const CheckOptions& opt = {});

/// Killing property, orthogonality, causal character, the bracket relations
/// [xi_a, xi_b] = -2 eps_c xi_c and phi_a = -eps_a nabla xi_a.
ResidualReport killing_triple_check(const Manifold& m, const MixedThreeStructure& s, const CheckOptions& opt = {});

/// R(X, xi_a) Y = g(xi_a, Y) X - g(X, Y) xi_a.
ResidualReport curvature_characterization(const Manifold& m, const MixedThreeStructure& s,
                                          const CheckOptions& opt = {});

/// Sectional curvature of planes span{xi_a, X} against 1. Planes with
/// |denominator| <= degenerate_guard are skipped and counted.
ResidualReport sectional_curvature_check(const Manifold& m, const MixedThreeStructure& s, const CheckOptions& opt = {},
                                         double degenerate_guard = 1e-6);

/// Ric - lambda g.
ResidualReport einstein_check(const Manifold& m, const Rational& lambda, const CheckOptions& opt = {});

struct ConeManifold {
  Manifold cone;
  std::array<TensorField, 3> J;  // (1,1) tensors on the cone
  TensorField euler;             // r d_r
  std::array<int, 3> eps{1, -1, -1};
};

/// Cone M x R+ with metric dr^2 + r^2 g; r is appended as the last coordinate.
/// J_a X = phi_a X - eta_a(X) Phi and J_a Phi = xi_a.
ConeManifold build_cone(const Manifold& m, const MixedThreeStructure& s, Interval r_range = {0.5, 2.0});

/// J1 J2 J3 = -Id, g(J_a X, J_a Y) = eps_a g(X, Y) and nabla J_a = 0.
ResidualReport para_hyperkahler_check(const ConeManifold& c, const CheckOptions& opt = {});

/// Structure on r = 1: xi_a = J_a(d_r), phi_a X = -eps_a nabla_X xi_a,
/// eta_a = g(xi_a, .).
MixedThreeStructure reverse_cone(const ConeManifold& c, const Manifold& base);

/// Compares reverse_cone(c) and the cone rebuilt from it with the original data.
ResidualReport cone_round_trip(const ConeManifold& c, const Manifold& base, const MixedThreeStructure& original,
                               const CheckOptions& opt = {});

struct Witness {
  int alpha = 0;
  Point point;
  std::vector<double> x;      // X, orthogonal to xi_alpha, not lightlike
  std::vector<double> value;  // (nabla_X phi_alpha) X
  double norm = 0.0;
};
struct WitnessReport {
  ResidualReport report;  // pass iff every alpha has a witness
  std::vector<Witness> witnesses;
};
/// Searches sampled points for X with |(nabla_X phi_a) X| > threshold.
WitnessReport phi_not_killing_witness(const Manifold& m, const MixedThreeStructure& s, const CheckOptions& opt = {},
                                      double threshold = 1e-6);

enum class ConformalStatus { Killing, ConformalNotKilling, NotConformal };
struct ConformalKillingReport {
  ResidualReport report;
  ConformalStatus status = ConformalStatus::NotConformal;
};
/// Conformal factor of X, the identity f = eps_a (L_X g)(xi_a, xi_a), and
/// nabla_{xi_a} xi_a = 0.
ConformalKillingReport conformal_to_killing_check(const Manifold& m, const MixedThreeStructure& s,
                                                  const TensorField& x, const CheckOptions& opt = {});

/// eta_a ^ (d eta_a)^k.
TensorField odd_rank_candidate(const Manifold& m, const MixedThreeStructure& s, int alpha, int k);
/// Runs ky_residual on the candidate; throws GeometryError on a zero form or
/// k outside 0..2n+1.
ResidualReport ky_odd_rank_check(const Manifold& m, const MixedThreeStructure& s, int alpha, int k,
                                 const CheckOptions& opt = {});

}  // namespace hidsym
