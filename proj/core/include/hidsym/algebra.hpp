#pragma once

#include <array>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "hidsym/rational.hpp"

namespace hidsym {

class AlgebraError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

bool operator<(const GaussRational& a, const GaussRational& b);

/// Polynomial in the central indeterminate B with Gaussian-rational coefficients.
class BPoly {
 public:
  BPoly() = default;
  BPoly(GaussRational c, int power = 0);  // NOLINT(implicit)

  [[nodiscard]] bool is_zero() const { return c_.empty(); }
  [[nodiscard]] const std::map<int, GaussRational>& coefficients() const { return c_; }
  [[nodiscard]] std::string str() const;

  BPoly& operator+=(const BPoly& o);
  friend BPoly operator+(BPoly a, const BPoly& b) { return a += b; }
  friend BPoly operator-(const BPoly& a, const BPoly& b);
  friend BPoly operator*(const BPoly& a, const BPoly& b);
  friend bool operator==(const BPoly& a, const BPoly& b);

 private:
  std::map<int, GaussRational> c_;
};

enum class GenKind : std::uint8_t { I, J, K, Q, QY, P4, H };

struct Generator {
  GenKind kind = GenKind::I;
  int index = 0;  // 1..3 for J, K, Q; 0 otherwise
  friend auto operator<=>(const Generator&, const Generator&) = default;
};
std::string to_string(const Generator& g);

/// Linear combination of generators with coefficients in Q[i][B].
class AlgebraElement {
 public:
  AlgebraElement() = default;
  AlgebraElement(Generator g, BPoly c = BPoly(GaussRational(1)));  // NOLINT(implicit)

  [[nodiscard]] bool is_zero() const { return terms_.empty(); }
  [[nodiscard]] const std::map<Generator, BPoly>& terms() const { return terms_; }
  [[nodiscard]] std::string str() const;

  AlgebraElement& operator+=(const AlgebraElement& o);
  friend AlgebraElement operator+(AlgebraElement a, const AlgebraElement& b) { return a += b; }
  friend AlgebraElement operator-(const AlgebraElement& a, const AlgebraElement& b);
  friend AlgebraElement operator*(const BPoly& c, const AlgebraElement& a);
  friend bool operator==(const AlgebraElement& a, const AlgebraElement& b) = default;

 private:
  std::map<Generator, BPoly> terms_;
};

AlgebraElement J(int i);
AlgebraElement K(int i);
AlgebraElement Q(int i);
/// B^k as a coefficient.
BPoly Bpow(int k);

/// Bracket table on J_i, K_i, Q_i and the identity:
///   [J_i, J_j] = i eps J_k, [J_i, K_j] = i eps K_k, [K_i, K_j] = i eps J_k B^2,
///   [J_i, Q_j] = i eps Q_k, [K_i, Q_j] = i eps Q_k B, [Q_i, Q_j] = 2 i eps Q_k
///   (the last induced by the quaternion table).
/// Q^Y, P4 and H have no stated brackets; any bracket touching them throws
/// AlgebraError.
AlgebraElement bracket(const Generator& a, const Generator& b);
AlgebraElement bracket(const AlgebraElement& a, const AlgebraElement& b);

struct AlgebraReport {
  std::string check;
  bool pass = true;
  std::size_t cases = 0;
  std::vector<std::string> failures;  // first few offending cases
  void fail(std::string what);
};

/// Associative table Q_i Q_j = delta_ij I + i eps_ijk Q_k on {I, Q1, Q2, Q3}:
/// products, associativity of all 64 triples, and the induced commutators.
AlgebraReport quaternion_table_check();
/// Element of the associative span of {I, Q1, Q2, Q3}.
using Quaternion = std::array<GaussRational, 4>;
Quaternion quaternion_product(const Quaternion& a, const Quaternion& b);

/// Generators A^i_{2n} and B^i_{2n+2} of the graded loop algebra.
struct LoopGenerator {
  char type = 'A';  // 'A' or 'B'
  int index = 1;
  int n = 0;        // A^i_{2n}, B^i_{2n+2}
  [[nodiscard]] int grade() const { return type == 'A' ? 2 * n : 2 * n + 2; }
  friend auto operator<=>(const LoopGenerator&, const LoopGenerator&) = default;
};
std::string to_string(const LoopGenerator& g);
using LoopElement = std::map<LoopGenerator, GaussRational>;

/// [A^i_2n, A^j_2m] = i eps A^k_2(n+m), [A^i_2n, B^j_2m+2] = i eps B^k_2(n+m+1),
/// [B^i_2n+2, B^j_2m+2] = i eps A^k_2(n+m+2).
LoopElement loop_bracket(const LoopGenerator& a, const LoopGenerator& b);
LoopElement loop_bracket(const LoopElement& a, const LoopElement& b);
/// A^i_2n -> J_i B^n, B^i_2n+2 -> K_i B^n.
AlgebraElement absorb(const LoopGenerator& g);
AlgebraElement absorb(const LoopElement& e);

/// Generators with n <= cutoff.
std::vector<LoopGenerator> loop_generators(int cutoff);
/// Compares absorb([a, b]) with [absorb(a), absorb(b)] for all generator pairs.
AlgebraReport grade_absorb(int cutoff = 10);
/// Jacobi identity over unordered generator triples whose total grade is at most 2 * cutoff.
AlgebraReport jacobi_check(int cutoff = 10);
/// Jacobi identity over all triples of J_i, K_i, Q_i in Q[i][B].
AlgebraReport jacobi_check_base();

/// Runge-Lenz combination in terms of the inert generators, kept as text.
std::string runge_lenz_formula();

}  // namespace hidsym
