#pragma once

#include <cstdint>
#include <memory>
#include <string>

#include "iat/operator.hpp"
#include "iat/types.hpp"

namespace iat {

/// Phillips test problem on [-6, 6]: Nystrom discretization with the
/// composite trapezoidal rule on n equispaced nodes.
struct PhillipsProblem {
  std::shared_ptr<const DenseOperator> op;
  Vector grid;
  Vector x_dagger;
  Vector y_analytic;  // closed-form right-hand side at the nodes
};
PhillipsProblem phillips(Index n);

/// Baart test problem, int_0^pi exp(s cos t) x(t) dt = 2 sinh(s)/s,
/// s in [0, pi/2]; midpoint rule in both variables, weights pi/n.
struct BaartProblem {
  std::shared_ptr<const DenseOperator> op;
  Vector s_nodes;
  Vector t_nodes;
  Vector x_dagger;
};
BaartProblem baart(Index n);

/// Gaussian blur of an n x n image, T = (1/(2 pi sigma^2)) A0 (x) A0 with A0 the
/// symmetric banded Toeplitz matrix of first row exp(-k^2/(2 sigma^2)), k < band.
/// The scale is split evenly between the two Kronecker factors.
///
/// The true image: a centered rectangle of intensity 1 (height round(n/5),
/// width round(2n/15)) and an off-center square of intensity 0.5 (side
/// round(n/10), top-left corner at row round(n/10), column n - 2 round(n/10) - 2),
/// column-stacked. All sizes are clamped to at least one pixel.
struct BlurProblem {
  std::shared_ptr<const KronBlurOperator> op;
  Matrix image;
  Vector x_dagger;
};
BlurProblem blur(Index n, Index band = 3, double sigma = 0.7);
Matrix blur_test_image(Index n);

/// Standard normal deviates from SplitMix64 (64-bit state, seeded with `seed`)
/// through the Box-Muller transform. Both outputs of each pair are used.
Vector gaussian_vector(Index n, std::uint64_t seed);

struct NoisyData {
  Vector y_delta;
  double delta = 0.0;
};

/// y_delta = y + e xi ||y|| / ||e|| with e = gaussian_vector(n, seed), so that
/// ||y_delta - y|| = xi ||y|| = delta.
NoisyData add_noise(const Eigen::Ref<const Vector>& y, double xi, std::uint64_t seed);

enum class ProblemKind { phillips, baart, blur };
std::string to_string(ProblemKind kind);
ProblemKind problem_kind_from_string(const std::string& name);

struct ProblemSpec {
  ProblemKind kind = ProblemKind::phillips;
  Index size = 1000;  // n for phillips/baart, image side for blur
  double xi = 0.01;
  std::uint64_t seed = 11;
  Index blur_band = 3;
  double blur_sigma = 0.7;
};

struct Problem {
  OperatorPtr op;
  Vector x_dagger;
  Vector y;  // op.apply(x_dagger)
  Vector y_delta;
  double delta = 0.0;
  double xi = 0.0;
  std::uint64_t seed = 0;
  std::string label;
};

Problem make_problem(const ProblemSpec& spec);

}  // namespace iat
