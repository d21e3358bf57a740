#include <gtest/gtest.h>

#include "hidsym/algebra.hpp"

using namespace hidsym;

namespace {

const GaussRational kI = GaussRational::i();

AlgebraElement times(GaussRational c, const AlgebraElement& e, int bpow = 0) { return BPoly(c, bpow) * e; }

// Matrix oracle: J_i -> L_i (adjoint of su(2)), B -> the scalar b, so that
// A^i_2n -> L_i b^n and B^i_2n+2 -> L_i b^(n+1). Exact Gaussian-rational entries.
using Mat = std::array<std::array<GaussRational, 3>, 3>;

int eps(int i, int j, int k) {
  if (i == j || j == k || i == k) return 0;
  return ((j - i + 3) % 3 == 1) ? 1 : -1;
}

Mat L(int i) {
  Mat m{};
  for (int j = 0; j < 3; ++j)
    for (int k = 0; k < 3; ++k) m[j][k] = GaussRational(Rational(0), Rational(-eps(i - 1, j, k)));
  return m;
}

Mat mul(const Mat& a, const Mat& b) {
  Mat m{};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      for (int k = 0; k < 3; ++k) m[i][j] += a[i][k] * b[k][j];
  return m;
}

Mat add(const Mat& a, const Mat& b, GaussRational s = GaussRational(1)) {
  Mat m{};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) m[i][j] = a[i][j] + s * b[i][j];
  return m;
}

Mat scale(const Mat& a, GaussRational s) { return add(Mat{}, a, s); }

GaussRational power(GaussRational b, int n) {
  GaussRational r(1);
  for (int k = 0; k < n; ++k) r *= b;
  return r;
}

Mat represent(const LoopElement& e, GaussRational b) {
  Mat m{};
  for (const auto& [g, c] : e) {
    int p = g.type == 'A' ? g.n : g.n + 1;
    m = add(m, L(g.index), c * power(b, p));
  }
  return m;
}

}  // namespace

TEST(Bracket, JJ) {
  EXPECT_EQ(bracket(J(1), J(2)), times(kI, J(3)));
  EXPECT_EQ(bracket(J(2), J(1)), times(-kI, J(3)));
  EXPECT_TRUE(bracket(J(1), J(1)).is_zero());
}

TEST(Bracket, KKCarriesBSquared) {
  EXPECT_EQ(bracket(K(1), K(2)), times(kI, J(3), 2));
  EXPECT_EQ(bracket(J(3), K(1)), times(kI, K(2)));
}

TEST(Bracket, ActionOnQ) {
  EXPECT_EQ(bracket(J(1), Q(2)), times(kI, Q(3)));
  EXPECT_EQ(bracket(K(2), Q(3)), times(kI, Q(1), 1));
  EXPECT_EQ(bracket(Q(1), Q(2)), times(GaussRational(0, 2), Q(3)));
}

TEST(Bracket, BilinearAndCentral) {
  AlgebraElement x = J(1) + times(GaussRational(Rational(1, 2)), K(3), 1);
  AlgebraElement y = times(GaussRational(Rational(2, 3), Rational(-1)), J(2), 3);
  AlgebraElement lhs = bracket(x, y);
  AlgebraElement rhs = times(GaussRational(Rational(2, 3), Rational(-1)),
                             bracket(J(1), J(2)) + times(GaussRational(Rational(1, 2)), bracket(K(3), J(2)), 1), 3);
  EXPECT_EQ(lhs, rhs);
  EXPECT_EQ(bracket(y, x), times(GaussRational(-1), lhs));
}

TEST(Bracket, UnspecifiedGeneratorsThrow) {
  for (GenKind k : {GenKind::QY, GenKind::P4, GenKind::H}) {
    EXPECT_THROW(bracket(Generator{k, 0}, Generator{GenKind::J, 1}), AlgebraError);
    EXPECT_THROW(bracket(Generator{GenKind::K, 2}, Generator{k, 0}), AlgebraError);
  }
}

TEST(QuaternionUnits, Products) {
  auto unit = [](int k) {
    Quaternion q{};
    q[static_cast<std::size_t>(k)] = GaussRational(1);
    return q;
  };
  Quaternion i3{};
  i3[3] = kI;
  Quaternion mi3{};
  mi3[3] = -kI;
  EXPECT_EQ(quaternion_product(unit(1), unit(1)), unit(0));
  EXPECT_EQ(quaternion_product(unit(1), unit(2)), i3);
  EXPECT_EQ(quaternion_product(unit(2), unit(1)), mi3);
  EXPECT_EQ(quaternion_product(quaternion_product(unit(1), unit(2)), unit(3)),
            quaternion_product(unit(1), quaternion_product(unit(2), unit(3))));
}

TEST(QuaternionUnits, TableCheck) {
  auto r = quaternion_table_check();
  EXPECT_TRUE(r.pass) << (r.failures.empty() ? "" : r.failures[0]);
  EXPECT_GT(r.cases, 0u);
}

TEST(Loop, BracketExamples) {
  LoopGenerator a1_0{'A', 1, 0}, a2_0{'A', 2, 0}, b1_2{'B', 1, 0}, b2_2{'B', 2, 0}, a1_2{'A', 1, 1};
  EXPECT_EQ(loop_bracket(a1_0, a2_0), (LoopElement{{LoopGenerator{'A', 3, 0}, kI}}));
  EXPECT_EQ(loop_bracket(b1_2, b2_2), (LoopElement{{LoopGenerator{'A', 3, 2}, kI}}));
  EXPECT_TRUE(loop_bracket(a1_2, b1_2).empty());
  EXPECT_EQ(b1_2.grade(), 2);
  EXPECT_EQ(to_string(LoopGenerator{'A', 3, 2}), to_string(LoopGenerator{'A', 3, 2}));
}

TEST(Loop, AgreesWithMatrixOracle) {
  // b = 2 - i/3 keeps powers distinct; any nonzero value works for a polynomial identity check at fixed grade.
  GaussRational b(Rational(2), Rational(-1, 3));
  auto gens = loop_generators(4);
  for (const auto& x : gens)
    for (const auto& y : gens) {
      Mat mx = represent({{x, GaussRational(1)}}, b), my = represent({{y, GaussRational(1)}}, b);
      Mat comm = add(mul(mx, my), mul(my, mx), GaussRational(-1));
      EXPECT_EQ(represent(loop_bracket(x, y), b), comm) << to_string(x) << " " << to_string(y);
    }
}

TEST(Loop, AbsorptionMap) {
  EXPECT_EQ(absorb(LoopGenerator{'A', 2, 3}), times(GaussRational(1), J(2), 3));
  EXPECT_EQ(absorb(LoopGenerator{'B', 1, 0}), K(1));
  auto r = grade_absorb(10);
  EXPECT_TRUE(r.pass) << (r.failures.empty() ? "" : r.failures[0]);
  EXPECT_EQ(r.cases, 4356u);
}

TEST(Jacobi, BaseGenerators) {
  EXPECT_EQ(bracket(bracket(K(1), K(2)), J(3)) + bracket(bracket(K(2), J(3)), K(1)) +
                bracket(bracket(J(3), K(1)), K(2)),
            AlgebraElement{});
  auto r = jacobi_check_base();
  EXPECT_TRUE(r.pass);
  EXPECT_EQ(r.cases, 729u);
}

TEST(Jacobi, GradedTriplesToCutoffTen) {
  auto r = jacobi_check(10);
  EXPECT_TRUE(r.pass) << (r.failures.empty() ? "" : r.failures[0]);
  EXPECT_EQ(r.cases, 7531u);
  EXPECT_GE(r.cases, 1080u);
}

TEST(Jacobi, ReportRecordsFailures) {
  AlgebraReport r{"x"};
  r.fail("(a, b, c)");
  EXPECT_FALSE(r.pass);
  ASSERT_EQ(r.failures.size(), 1u);
}

TEST(RungeLenz, StoredAsText) { EXPECT_NE(runge_lenz_formula().find("QY"), std::string::npos); }
