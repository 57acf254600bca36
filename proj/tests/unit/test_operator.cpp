#include <gtest/gtest.h>

#include "iat/operator.hpp"
#include "iat/problems.hpp"
#include "oracles.hpp"

using iat::DenseOperator;
using iat::KronBlurOperator;
using iat::Matrix;
using iat::Vector;

TEST(DenseOperator, IdentityApply) {
  DenseOperator op(Matrix::Identity(3, 3));
  const Vector x = (Vector(3) << 1, 2, 3).finished();
  EXPECT_EQ(op.apply(x), x);
  EXPECT_EQ(op.dim(), 3);
  EXPECT_EQ(op.kind(), iat::OperatorKind::dense);
}

TEST(DenseOperator, RejectsBadInput) {
  EXPECT_THROW(DenseOperator(Matrix::Zero(2, 3)), iat::ArgumentError);
  Matrix m = Matrix::Identity(2, 2);
  m(0, 1) = std::numeric_limits<double>::infinity();
  EXPECT_THROW(DenseOperator{m}, iat::ArgumentError);
  DenseOperator op(Matrix::Identity(2, 2));
  EXPECT_THROW(op.apply(Vector::Ones(3)), iat::ArgumentError);
  EXPECT_THROW(op.apply_transpose(Vector::Ones(1)), iat::ArgumentError);
}

TEST(DenseOperator, MatchesMatVecAndTranspose) {
  oracle::Gen gen(1);
  const Matrix m = gen.matrix(17, 17);
  DenseOperator op(m);
  for (int trial = 0; trial < 10; ++trial) {
    const Vector x = gen.vector(17);
    const Vector ref = m * x;
    EXPECT_LE((op.apply(x) - ref).norm(), 1e-14 * ref.norm());
    EXPECT_LE((op.apply_transpose(x) - m.transpose() * x).norm(), 1e-14 * ref.norm());
  }
}

TEST(KronBlurOperator, IdentityFactorIsIdentity) {
  KronBlurOperator op(Matrix::Identity(4, 4));
  oracle::Gen gen(2);
  const Vector x = gen.vector(16);
  EXPECT_EQ(op.apply(x), x);
  EXPECT_EQ(op.kind(), iat::OperatorKind::kron_blur);
}

TEST(KronBlurOperator, RejectsAsymmetricFactor) {
  Matrix a = Matrix::Identity(3, 3);
  a(0, 1) = 0.5;
  EXPECT_THROW(KronBlurOperator{a}, iat::ArgumentError);
}

TEST(KronBlurOperator, FirstColumnMatchesDenseKronecker) {
  const auto p = iat::blur(4, 3, 0.7);
  const Matrix a = p.op->factor();
  const Matrix dense = oracle::kron(a, a);
  Vector e1 = Vector::Zero(16);
  e1(0) = 1.0;
  EXPECT_LE((p.op->apply(e1) - dense.col(0)).cwiseAbs().maxCoeff(), 1e-14);
}

TEST(KronBlurOperator, AgreesWithDenseKroneckerUpToEight) {
  oracle::Gen gen(3);
  for (iat::Index n = 1; n <= 8; ++n) {
    Vector row = Vector::Zero(n);
    for (iat::Index k = 0; k < std::min<iat::Index>(n, 3); ++k) row(k) = gen.uniform(0.1, 1.0);
    const auto op = KronBlurOperator::from_toeplitz_row(row);
    const Matrix dense = oracle::kron(op.factor(), op.factor());
    for (int trial = 0; trial < 100; ++trial) {
      const Vector x = gen.vector(n * n);
      const Vector ref = dense * x;
      EXPECT_LE((op.apply(x) - ref).norm(), 1e-12 * std::max(ref.norm(), 1e-300)) << "n=" << n;
    }
  }
}

TEST(KronBlurOperator, ToDenseMatchesKronecker) {
  const auto p = iat::blur(5, 3, 0.7);
  const Matrix a = p.op->factor();
  EXPECT_LE((p.op->to_dense() - oracle::kron(a, a)).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(OperatorTwoNorm, DiagonalSpectrum) {
  DenseOperator op(Vector((Vector(3) << 3, 1, 1).finished()).asDiagonal().toDenseMatrix());
  const auto est = iat::operator_two_norm(op);
  EXPECT_NEAR(est.value, 3.0, 1e-8);
  EXPECT_TRUE(est.converged);
}

TEST(OperatorTwoNorm, ZeroOperator) {
  DenseOperator op(Matrix::Zero(4, 4));
  EXPECT_EQ(iat::operator_two_norm(op).value, 0.0);
}

TEST(OperatorTwoNorm, MatchesDenseSvd) {
  oracle::Gen gen(4);
  const Matrix m = gen.matrix(20, 20);
  const double ref = oracle::spectral_norm(m);
  const auto est = iat::operator_two_norm(DenseOperator(m), 1e-12, 5000);
  EXPECT_NEAR(est.value, ref, 1e-6 * ref);
}

TEST(OperatorTwoNorm, ScalesWithConstant) {
  oracle::Gen gen(5);
  const Matrix m = gen.matrix(12, 12);
  const double base = iat::operator_two_norm(DenseOperator(m)).value;
  for (double c : {-3.0, 0.25, 7.5}) {
    const double scaled = iat::operator_two_norm(DenseOperator(c * m)).value;
    EXPECT_NEAR(scaled, std::abs(c) * base, 1e-10 * std::abs(c) * base);
  }
}

TEST(OperatorTwoNorm, RejectsNonPositiveTolerance) {
  DenseOperator op(Matrix::Identity(2, 2));
  EXPECT_THROW(iat::operator_two_norm(op, 0.0), iat::ArgumentError);
}
