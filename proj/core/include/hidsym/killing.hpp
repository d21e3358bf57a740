#pragma once

#include <vector>

#include "hidsym/manifold.hpp"
#include "hidsym/report.hpp"

namespace hidsym {

/// (L_X g)_{mu nu} for a contravariant vector field X.
TensorField lie_derivative_metric(const TensorField& x, const Manifold& m);

ResidualReport killing_vector_residual(const TensorField& x, const Manifold& m, const CheckOptions& opt = {});

struct ConformalFactor {
  ResidualReport report;        // residual of L_X g - f g
  std::vector<double> factors;  // least-squares f per sampled point
};
ConformalFactor conformal_killing_factor(const TensorField& x, const Manifold& m, const CheckOptions& opt = {});

/// Fully symmetrized covariant derivative of a symmetric covariant tensor.
ResidualReport sk_residual(const TensorField& k, const Manifold& m, const CheckOptions& opt = {});
/// Killing-Yano residual: symmetric part of nabla_l f_{m1...} in (l, m1), and
/// the deviation of nabla f from its full antisymmetrization.
ResidualReport ky_residual(const TensorField& f, const Manifold& m, const CheckOptions& opt = {});
/// Conformal Killing-Yano residual over coordinate-basis X.
ResidualReport cky_residual(const TensorField& f, const Manifold& m, const CheckOptions& opt = {});
/// CKY residual tensor, slot 0 is the direction X.
TensorField cky_residual_tensor(const TensorField& f, const Manifold& m);
ResidualReport covariant_constancy_residual(const TensorField& t, const Manifold& m, const CheckOptions& opt = {});
/// Compares nabla T at `index` (derivative slot first) with a closed form, and
/// the largest |nabla T| component with its magnitude.
ResidualReport covariant_derivative_component_check(const TensorField& t, const Index& index, const Expr& expected,
                                                    const Manifold& m, const CheckOptions& opt = {});

/// K_{mu nu} = f_{mu a2..ap} f_nu^{a2..ap}.
TensorField associated_sk(const TensorField& f, const Manifold& m);

struct UnitRootReport {
  ResidualReport strict;           // f^mu_a f_{mu b} - g_ab
  ResidualReport fitted;           // f^mu_a f_{mu b} - c g_ab
  std::vector<double> scales;      // c per point
};
UnitRootReport unit_root_check(const TensorField& f, const Manifold& m, const CheckOptions& opt = {});

/// f^i f^j + f^j f^i = -2 delta_ij and f^i f^j - f^j f^i = -2 eps_ijk f^k with
/// (f^i)^mu_nu = g^{mu l} f^i_{l nu} composed as matrices.
ResidualReport quaternion_relations_check(const TensorField& f1, const TensorField& f2, const TensorField& f3,
                                          const Manifold& m, const CheckOptions& opt = {});

/// Throws unless f is antisymmetric structurally or at sampled points.
void require_antisymmetric(const TensorField& f, const Manifold& m);

}  // namespace hidsym
