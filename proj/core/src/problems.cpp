#include "iat/problems.hpp"

#include <cmath>
#include <numbers>

namespace iat {

namespace {

double phillips_solution(double t) {
  return std::abs(t) < 3.0 ? 1.0 + std::cos(std::numbers::pi * t / 3.0) : 0.0;
}

double phillips_rhs(double s) {
  const double a = std::abs(s);
  return (6.0 - a) * (1.0 + 0.5 * std::cos(std::numbers::pi * s / 3.0)) +
         9.0 / (2.0 * std::numbers::pi) * std::sin(std::numbers::pi * a / 3.0);
}

Index at_least_one(double v) { return std::max<Index>(1, static_cast<Index>(std::lround(v))); }

}  // namespace

PhillipsProblem phillips(Index n) {
  if (n < 3) throw ArgumentError("phillips: n must be >= 3");
  PhillipsProblem p;
  p.grid = Vector::LinSpaced(n, -6.0, 6.0);
  const double h = 12.0 / static_cast<double>(n - 1);
  Vector w = Vector::Constant(n, h);
  w(0) *= 0.5;
  w(n - 1) *= 0.5;

  Matrix t(n, n);
  for (Index j = 0; j < n; ++j) {
    for (Index i = 0; i < n; ++i) t(i, j) = w(j) * phillips_solution(p.grid(i) - p.grid(j));
  }
  p.op = std::make_shared<const DenseOperator>(std::move(t));
  p.x_dagger = p.grid.unaryExpr(&phillips_solution);
  p.y_analytic = p.grid.unaryExpr(&phillips_rhs);
  return p;
}

BaartProblem baart(Index n) {
  if (n < 3) throw ArgumentError("baart: n must be >= 3");
  BaartProblem p;
  const double nd = static_cast<double>(n);
  p.s_nodes = (Vector::LinSpaced(n, 0.0, nd - 1.0).array() + 0.5) * (std::numbers::pi / 2.0) / nd;
  p.t_nodes = (Vector::LinSpaced(n, 0.0, nd - 1.0).array() + 0.5) * std::numbers::pi / nd;
  const double weight = std::numbers::pi / nd;
  Matrix t(n, n);
  for (Index j = 0; j < n; ++j) {
    const double c = std::cos(p.t_nodes(j));
    for (Index i = 0; i < n; ++i) t(i, j) = weight * std::exp(p.s_nodes(i) * c);
  }
  p.op = std::make_shared<const DenseOperator>(std::move(t));
  p.x_dagger = p.t_nodes.array().sin();
  return p;
}

Matrix blur_test_image(Index n) {
  if (n < 1) throw ArgumentError("blur_test_image: n must be >= 1");
  const double nd = static_cast<double>(n);
  Matrix x = Matrix::Zero(n, n);

  const Index height = std::min(n, at_least_one(nd / 5.0));
  const Index width = std::min(n, at_least_one(2.0 * nd / 15.0));
  x.block((n - height) / 2, (n - width) / 2, height, width).setConstant(1.0);

  const Index side = std::min(n, at_least_one(nd / 10.0));
  const Index row = std::min(n - side, static_cast<Index>(std::lround(nd / 10.0)));
  const Index col = std::clamp<Index>(n - 2 * side - 2, 0, n - side);
  x.block(row, col, side, side).array() += 0.5;
  x = x.cwiseMin(1.0);
  return x;
}

BlurProblem blur(Index n, Index band, double sigma) {
  if (band < 1 || n < band) throw ArgumentError("blur: need n >= band >= 1");
  if (!(sigma > 0.0)) throw ArgumentError("blur: sigma must be positive");
  // 1/(2 pi sigma^2) on T, split as 1/(sigma sqrt(2 pi)) on each factor.
  const double scale = 1.0 / (sigma * std::sqrt(2.0 * std::numbers::pi));
  Vector row = Vector::Zero(n);
  for (Index k = 0; k < band; ++k) {
    const double kd = static_cast<double>(k);
    row(k) = scale * std::exp(-(kd * kd) / (2.0 * sigma * sigma));
  }
  BlurProblem p;
  p.op = std::make_shared<const KronBlurOperator>(KronBlurOperator::from_toeplitz_row(row));
  p.image = blur_test_image(n);
  p.x_dagger = Eigen::Map<const Vector>(p.image.data(), n * n);
  return p;
}

Vector gaussian_vector(Index n, std::uint64_t seed) {
  if (n < 0) throw ArgumentError("gaussian_vector: negative length");
  std::uint64_t state = seed;
  auto next = [&state]() {
    // SplitMix64
    std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  };
  constexpr double kTwo53 = 9007199254740992.0;
  Vector e(n);
  for (Index k = 0; k < n; k += 2) {
    const double u1 = (static_cast<double>(next() >> 11) + 1.0) / kTwo53;  // (0, 1]
    const double u2 = static_cast<double>(next() >> 11) / kTwo53;          // [0, 1)
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * std::numbers::pi * u2;
    e(k) = radius * std::cos(angle);
    if (k + 1 < n) e(k + 1) = radius * std::sin(angle);
  }
  return e;
}

NoisyData add_noise(const Eigen::Ref<const Vector>& y, double xi, std::uint64_t seed) {
  if (!(xi >= 0.0) || !std::isfinite(xi)) throw ArgumentError("add_noise: xi must be >= 0");
  NoisyData out;
  if (xi == 0.0) {
    out.y_delta = y;
    return out;
  }
  const double y_norm = y.norm();
  if (!(y_norm > 0.0)) throw ArgumentError("add_noise: zero data with positive noise level");
  const Vector e = gaussian_vector(y.size(), seed);
  out.delta = xi * y_norm;
  out.y_delta = y + e * (out.delta / e.norm());
  return out;
}

std::string to_string(ProblemKind kind) {
  switch (kind) {
    case ProblemKind::phillips: return "phillips";
    case ProblemKind::baart: return "baart";
    case ProblemKind::blur: return "blur";
  }
  return "unknown";
}

ProblemKind problem_kind_from_string(const std::string& name) {
  if (name == "phillips") return ProblemKind::phillips;
  if (name == "baart") return ProblemKind::baart;
  if (name == "blur") return ProblemKind::blur;
  throw ArgumentError("unknown problem '" + name + "' (expected phillips|baart|blur)");
}

Problem make_problem(const ProblemSpec& spec) {
  Problem p;
  switch (spec.kind) {
    case ProblemKind::phillips: {
      auto gen = phillips(spec.size);
      p.op = gen.op;
      p.x_dagger = std::move(gen.x_dagger);
      break;
    }
    case ProblemKind::baart: {
      auto gen = baart(spec.size);
      p.op = gen.op;
      p.x_dagger = std::move(gen.x_dagger);
      break;
    }
    case ProblemKind::blur: {
      auto gen = blur(spec.size, spec.blur_band, spec.blur_sigma);
      p.op = gen.op;
      p.x_dagger = std::move(gen.x_dagger);
      break;
    }
  }
  p.y = p.op->apply(p.x_dagger);
  auto noisy = add_noise(p.y, spec.xi, spec.seed);
  p.y_delta = std::move(noisy.y_delta);
  p.delta = noisy.delta;
  p.xi = spec.xi;
  p.seed = spec.seed;
  p.label = to_string(spec.kind);
  return p;
}

}  // namespace iat
