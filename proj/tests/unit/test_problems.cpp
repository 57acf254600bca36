#include <gtest/gtest.h>

#include <numbers>

#include "iat/problems.hpp"
#include "oracles.hpp"

using iat::Index;
using iat::Matrix;
using iat::Vector;

TEST(Phillips, SolutionValues) {
  const auto p = iat::phillips(13);  // nodes at integers -6..6
  EXPECT_DOUBLE_EQ(p.x_dagger(6), 2.0);
  for (Index k : {0, 1, 2, 3, 9, 10, 11, 12}) EXPECT_EQ(p.x_dagger(k), 0.0) << k;
  EXPECT_NEAR(p.y_analytic(6), 9.0, 1e-14);
}

TEST(Phillips, MatchesExplicitQuadrature) {
  const auto p = iat::phillips(57);
  EXPECT_LE((p.op->entries() - oracle::phillips_matrix(57)).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(Phillips, QuadratureErrorConvergence) {
  // The trapezoidal rule on this kernel converges at fourth order: the
  // integrand x(s-t) x(t) is C^1 with jumps only in higher derivatives.
  auto err = [](Index n) {
    const auto p = iat::phillips(n);
    Vector ref(n);
    for (Index k = 0; k < n; ++k) ref(k) = oracle::phillips_rhs(p.grid(k));
    return (p.op->apply(p.x_dagger) - ref).cwiseAbs().maxCoeff();
  };
  const double ratio = err(201) / err(401);
  EXPECT_GE(ratio, 14.0);
  EXPECT_LE(ratio, 18.0);
}

TEST(Phillips, Nonsymmetric) {
  const auto p = iat::phillips(50);
  const Matrix& t = p.op->entries();
  EXPECT_GT((t - t.transpose()).norm(), 0.0);
}

TEST(Baart, RowAtSmallestSIntegratesConstant) {
  const auto p = iat::baart(1000);
  // s_1 = pi/(4n) is close to zero, so the row sums to about pi.
  EXPECT_NEAR(p.op->entries().row(0).sum(), std::numbers::pi, 1e-3);
  const double y0 = p.op->apply(p.x_dagger)(0);
  EXPECT_NEAR(y0, 2.0, 1e-2);
  const double s0 = p.s_nodes(0);
  EXPECT_NEAR(y0, 2.0 * std::sinh(s0) / s0, 1e-5);
}

TEST(Baart, SingularValuesDecay) {
  const auto p = iat::baart(1000);
  const Vector s = Eigen::BDCSVD<Matrix>(p.op->entries()).singularValues();
  Index first_small = s.size();
  for (Index k = 0; k < s.size(); ++k) {
    if (s(k) < 1e-12 * s(0)) {
      first_small = k + 1;
      break;
    }
  }
  EXPECT_LE(first_small, 12);
}

TEST(Blur, BandOneIsScaledIdentity) {
  const auto p = iat::blur(5, 1, 0.7);
  const Matrix t = p.op->to_dense();
  const double c = 1.0 / (2.0 * std::numbers::pi * 0.49);
  EXPECT_LE((t - c * Matrix::Identity(25, 25)).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(Blur, SymmetricKronecker) {
  const auto p = iat::blur(6, 3, 0.7);
  const Matrix t = p.op->to_dense();
  EXPECT_EQ((t - t.transpose()).cwiseAbs().maxCoeff(), 0.0);
  const Matrix& a = p.op->factor();
  EXPECT_NEAR(a(0, 0) * a(0, 0), 1.0 / (2.0 * std::numbers::pi * 0.49), 1e-15);
  EXPECT_NEAR(a(0, 1) / a(0, 0), std::exp(-1.0 / 0.98), 1e-15);
  EXPECT_EQ(a(0, 3), 0.0);
}

TEST(Blur, TestImageLayout) {
  const Matrix x = iat::blur_test_image(30);
  EXPECT_EQ(x.block(12, 13, 6, 4).minCoeff(), 1.0);
  EXPECT_EQ(x.block(3, 22, 3, 3).minCoeff(), 0.5);
  EXPECT_EQ(x.block(3, 22, 3, 3).maxCoeff(), 0.5);
  EXPECT_DOUBLE_EQ(x.sum(), 24.0 + 4.5);
  const auto p = iat::blur(30);
  EXPECT_EQ(p.x_dagger.size(), 900);
  EXPECT_EQ(p.x_dagger(13 * 30 + 12), 1.0);  // column-stacked
}

TEST(Blur, RejectsBadArguments) {
  EXPECT_THROW(iat::blur(2, 3, 0.7), iat::ArgumentError);
  EXPECT_THROW(iat::blur(5, 3, 0.0), iat::ArgumentError);
  EXPECT_THROW(iat::phillips(2), iat::ArgumentError);
  EXPECT_THROW(iat::baart(1), iat::ArgumentError);
}

TEST(Noise, ZeroLevel) {
  const Vector y = Vector::LinSpaced(10, 1.0, 2.0);
  const auto noisy = iat::add_noise(y, 0.0, 3);
  EXPECT_EQ(noisy.y_delta, y);
  EXPECT_EQ(noisy.delta, 0.0);
}

TEST(Noise, ExactLevelAndDeterminism) {
  const Vector y = Vector::LinSpaced(100, -1.0, 3.0);
  for (std::uint64_t seed : {0ULL, 1ULL, 11ULL, 123456789ULL}) {
    const auto a = iat::add_noise(y, 0.01, seed);
    const auto b = iat::add_noise(y, 0.01, seed);
    EXPECT_EQ(a.y_delta, b.y_delta);
    EXPECT_NEAR((a.y_delta - y).norm() / y.norm(), 0.01, 1e-14);
    EXPECT_DOUBLE_EQ(a.delta, 0.01 * y.norm());
  }
  EXPECT_NE(iat::add_noise(y, 0.01, 1).y_delta, iat::add_noise(y, 0.01, 2).y_delta);
}

TEST(Noise, Errors) {
  EXPECT_THROW(iat::add_noise(Vector::Zero(4), 0.1, 1), iat::ArgumentError);
  EXPECT_THROW(iat::add_noise(Vector::Ones(4), -0.1, 1), iat::ArgumentError);
}

TEST(Noise, MeanNearZero) {
  const Index n = 1000;
  double sum = 0.0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) sum += iat::gaussian_vector(n, seed).sum();
  EXPECT_LE(std::abs(sum / (100.0 * n)), 4.0 / std::sqrt(100.0 * n));
}

TEST(Noise, StandardNormalMoments) {
  const Vector e = iat::gaussian_vector(200001, 5);
  const double mean = e.mean();
  const double var = (e.array() - mean).square().mean();
  EXPECT_NEAR(mean, 0.0, 0.01);
  EXPECT_NEAR(var, 1.0, 0.01);
  EXPECT_EQ(iat::gaussian_vector(7, 9).head(6), iat::gaussian_vector(6, 9));
}

TEST(MakeProblem, Invariants) {
  for (auto kind : {iat::ProblemKind::phillips, iat::ProblemKind::baart, iat::ProblemKind::blur}) {
    iat::ProblemSpec spec;
    spec.kind = kind;
    spec.size = kind == iat::ProblemKind::blur ? 10 : 60;
    const auto p = iat::make_problem(spec);
    EXPECT_EQ(p.y, p.op->apply(p.x_dagger));
    EXPECT_NEAR((p.y_delta - p.y).norm(), p.delta, 1e-12 * p.delta);
    EXPECT_DOUBLE_EQ(p.delta, spec.xi * p.y.norm());
    EXPECT_GT(p.x_dagger.norm(), 0.0);
    EXPECT_TRUE(p.op->to_dense().allFinite());
    EXPECT_EQ(p.label, iat::to_string(kind));
    EXPECT_EQ(iat::problem_kind_from_string(p.label), kind);
  }
  EXPECT_THROW(iat::problem_kind_from_string("shaw"), iat::ArgumentError);
}
