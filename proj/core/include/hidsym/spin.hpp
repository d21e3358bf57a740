#pragma once

#include <map>
#include <memory>
#include <optional>
#include <vector>

#include "hidsym/manifold.hpp"
#include "hidsym/rational.hpp"
#include "hidsym/report.hpp"

namespace hidsym {

/// Complex-valued expression.
struct CExpr {
  Expr re;
  Expr im;
  [[nodiscard]] bool is_zero() const { return re.is_zero() && im.is_zero(); }
};
CExpr operator+(const CExpr& a, const CExpr& b);
CExpr operator-(const CExpr& a, const CExpr& b);
CExpr operator*(const CExpr& a, const CExpr& b);
CExpr operator*(const GaussRational& c, const CExpr& a);
CExpr operator*(const Expr& s, const CExpr& a);

using GaussMatrix = std::vector<std::vector<GaussRational>>;
using SpinMatrix = std::vector<std::vector<CExpr>>;
using SpinorField = std::vector<CExpr>;

struct Frame {
  Matrix e;      // e^a_mu, row a
  Matrix inv;    // E_a^mu, row a
  std::vector<int> eta;  // diagonal frame metric
};

/// Diagonal metrics get sqrt|g_aa|; other metrics go through a symbolic LDL^T
/// factorisation. Throws GeometryError when a pivot vanishes.
Frame orthonormal_frame(const Manifold& m);
/// Uses a supplied coframe; the inverse is E_a^mu = eta_ab g^{mu nu} e^b_nu.
/// Throws GeometryError if e^a e^b eta_ab = g fails at sampled points (1e-10).
Frame orthonormal_frame(const Manifold& m, const Matrix& coframe, std::vector<int> eta = {});
/// e^a_mu e^b_nu eta_ab - g_mu nu.
ResidualReport frame_residual(const Manifold& m, const Frame& f, const CheckOptions& opt = {});

struct GammaRep {
  std::size_t dim = 0;
  std::vector<int> eta;
  std::vector<GaussMatrix> gamma;  // gamma^a
  [[nodiscard]] std::size_t size() const { return gamma.empty() ? 0 : gamma.front().size(); }
};

/// Tensor products of Pauli matrices; gamma^a gamma^b + gamma^b gamma^a = 2 eta^ab.
GammaRep gamma_matrices(std::size_t dim, std::vector<int> eta = {});
/// U gamma U^-1 for an invertible U with inverse u_inv.
GammaRep conjugate(const GammaRep& g, const GaussMatrix& u, const GaussMatrix& u_inv);
/// Exact check of the Clifford relation.
bool clifford_holds(const GammaRep& g);

/// omega_mu^a_b from d_mu e^a_nu - Gamma^l_{mu nu} e^a_l + omega_mu^a_b e^b_nu = 0, flattened [mu][a][b].
std::vector<Expr> spin_connection(const Frame& f, const Manifold& m);
/// Tetrad-postulate residual and antisymmetry of omega_mu^{ab}.
ResidualReport spin_connection_check(const Frame& f, const Manifold& m, const CheckOptions& opt = {});

enum class OperatorKind { StandardDirac, KillingOp, DiracType };

struct OperatorSpec {
  OperatorKind kind = OperatorKind::StandardDirac;
  TensorField payload;  // vector field for KillingOp, 2-form for DiracType
  bool validate = true; // run the Killing / K-Y check on construction
};

/// Builds the first-order operators sum_nu A_nu d_nu + B on a spinor bundle.
/// D_s = i gamma^mu nabla_mu
/// X_R = -i (R^mu nabla_mu - 1/4 gamma^mu gamma^nu R_{mu;nu})
/// D_f = i gamma^mu (f_mu^nu nabla_nu - 1/6 gamma^nu gamma^rho f_{mu nu;rho})
class SpinGeometry {
 public:
  SpinGeometry(const Manifold& m, Frame f, GammaRep g);

  [[nodiscard]] const Manifold& manifold() const { return m_; }
  [[nodiscard]] const Frame& frame() const { return frame_; }
  [[nodiscard]] const GammaRep& gammas() const { return gamma_; }
  [[nodiscard]] std::size_t spinor_size() const { return gamma_.size(); }
  /// gamma^mu = E_a^mu gamma^a.
  [[nodiscard]] const SpinMatrix& gamma_curved(std::size_t mu) const { return gamma_mu_.at(mu); }
  /// Omega_mu = 1/4 omega_mu^{ab} gamma_a gamma_b.
  [[nodiscard]] const SpinMatrix& spinor_connection(std::size_t mu) const { return omega_.at(mu); }

  struct Operator {
    std::vector<SpinMatrix> a;  // per coordinate
    SpinMatrix b;
  };
  /// Throws GeometryError if validation of the payload fails.
  [[nodiscard]] Operator build(const OperatorSpec& spec, const CheckOptions& opt = {}) const;
  [[nodiscard]] SpinorField apply(const Operator& op, const SpinorField& psi) const;
  [[nodiscard]] SpinorField apply(const OperatorSpec& spec, const SpinorField& psi) const {
    return apply(build(spec), psi);
  }
  /// nabla_mu psi.
  [[nodiscard]] SpinorField covariant_derivative(std::size_t mu, const SpinorField& psi) const;

 private:
  Manifold m_;
  Frame frame_;
  GammaRep gamma_;
  std::vector<SpinMatrix> gamma_mu_;
  std::vector<SpinMatrix> omega_;
  std::shared_ptr<std::vector<Differentiator>> diff_;
};

/// Deterministic test spinors: components are sums of degree <= 2 monomials in
/// the coordinates times 1, sin(theta) or cos(theta); theta is the coordinate
/// named "theta" or else the first one.
std::vector<SpinorField> spinor_bank(const Manifold& m, std::size_t spinor_size, std::size_t count = 5,
                                     std::uint64_t seed = 0);
/// U psi for a constant matrix U.
SpinorField transform(const GaussMatrix& u, const SpinorField& psi);

/// |(AB + BA) psi| / (|AB psi| + |BA psi|), worst over bank and points.
ResidualReport anticommutator_residual(const SpinGeometry& sg, const OperatorSpec& a, const OperatorSpec& b,
                                       const std::vector<SpinorField>& bank, const CheckOptions& opt = {});
/// Same with AB - BA.
ResidualReport commutator_residual(const SpinGeometry& sg, const OperatorSpec& a, const OperatorSpec& b,
                                   const std::vector<SpinorField>& bank, const CheckOptions& opt = {});
/// |(D_f^2 - D_s^2) psi| / (|D_f^2 psi| + |D_s^2 psi|).
ResidualReport square_compare(const SpinGeometry& sg, const OperatorSpec& f, const std::vector<SpinorField>& bank,
                              const CheckOptions& opt = {});

/// Numeric values of a spinor field at a point, as (re, im) pairs.
std::vector<std::pair<double, double>> evaluate_spinor(const Manifold& m, const SpinorField& psi,
                                                       std::span<const double> x);

}  // namespace hidsym
