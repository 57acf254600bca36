#include "iat/operator.hpp"

#include <cmath>
#include <string>
#include <utility>

namespace iat {

namespace {

void check_length(Index expected, Index got) {
  if (expected != got) {
    throw ArgumentError("operator dimension mismatch: expected " + std::to_string(expected) +
                        ", got " + std::to_string(got));
  }
}

void check_square_finite(const Matrix& m, const char* what) {
  if (m.rows() != m.cols() || m.rows() == 0) {
    throw ArgumentError(std::string(what) + " must be a non-empty square matrix");
  }
  if (!m.allFinite()) {
    throw ArgumentError(std::string(what) + " has non-finite entries");
  }
}

}  // namespace

LinearOperator::LinearOperator(Index dim) : dim_(dim) {
  if (dim <= 0) throw ArgumentError("operator dimension must be positive");
}

Vector LinearOperator::apply(const Eigen::Ref<const Vector>& x) const {
  check_length(dim_, x.size());
  Vector out(dim_);
  apply_into(x, out);
  return out;
}

Vector LinearOperator::apply_transpose(const Eigen::Ref<const Vector>& x) const {
  check_length(dim_, x.size());
  Vector out(dim_);
  apply_transpose_into(x, out);
  return out;
}

Matrix LinearOperator::to_dense() const {
  Matrix m(dim_, dim_);
  Vector e = Vector::Zero(dim_);
  for (Index j = 0; j < dim_; ++j) {
    e[j] = 1.0;
    apply_into(e, m.col(j));
    e[j] = 0.0;
  }
  return m;
}

DenseOperator::DenseOperator(Matrix entries)
    : LinearOperator(entries.rows()), entries_(std::move(entries)) {
  check_square_finite(entries_, "dense operator");
}

void DenseOperator::apply_into(const Eigen::Ref<const Vector>& x,
                               Eigen::Ref<Vector> out) const {
  out.noalias() = entries_ * x;
}

void DenseOperator::apply_transpose_into(const Eigen::Ref<const Vector>& x,
                                         Eigen::Ref<Vector> out) const {
  out.noalias() = entries_.transpose() * x;
}

KronBlurOperator::KronBlurOperator(Matrix factor)
    : LinearOperator(factor.rows() * factor.rows()), factor_(std::move(factor)) {
  check_square_finite(factor_, "blur factor");
  if (factor_ != factor_.transpose()) {
    throw ArgumentError("blur factor must be exactly symmetric");
  }
}

KronBlurOperator KronBlurOperator::from_toeplitz_row(const Eigen::Ref<const Vector>& first_row) {
  const Index n = first_row.size();
  Matrix a(n, n);
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < n; ++j) a(i, j) = first_row[std::abs(i - j)];
  }
  return KronBlurOperator(std::move(a));
}

void KronBlurOperator::apply_into(const Eigen::Ref<const Vector>& x,
                                  Eigen::Ref<Vector> out) const {
  const Index n = factor_.rows();
  Eigen::Map<const Matrix> image(x.data(), n, n);
  Eigen::Map<Matrix> result(out.data(), n, n);
  // (A (x) A) vec(X) = vec(A X A^T)
  const Matrix tmp = factor_ * image;
  result.noalias() = tmp * factor_.transpose();
}

void KronBlurOperator::apply_transpose_into(const Eigen::Ref<const Vector>& x,
                                            Eigen::Ref<Vector> out) const {
  apply_into(x, out);
}

NormEstimate estimate_gram_norm(const std::function<Vector(const Vector&)>& gram,
                                Vector start, double tol, int max_iter) {
  if (!(tol > 0.0)) throw ArgumentError("norm estimate tolerance must be positive");
  NormEstimate est;
  const double start_norm = start.norm();
  if (start_norm == 0.0) {
    est.converged = true;
    return est;
  }
  Vector v = start / start_norm;
  double previous = -1.0;
  for (int k = 1; k <= max_iter; ++k) {
    Vector w = gram(v);
    const double sigma = std::sqrt(std::max(v.dot(w), 0.0));
    const double w_norm = w.norm();
    est.value = sigma;
    est.iterations = k;
    if (w_norm == 0.0) {
      est.converged = true;
      return est;
    }
    if (previous >= 0.0 && std::abs(sigma - previous) <= tol * sigma) {
      est.converged = true;
      return est;
    }
    previous = sigma;
    v = w / w_norm;
  }
  return est;
}

NormEstimate operator_two_norm(const LinearOperator& op, double tol, int max_iter) {
  return estimate_gram_norm(
      [&op](const Vector& v) { return op.apply_transpose(op.apply(v)); },
      Vector::Ones(op.dim()), tol, max_iter);
}

}  // namespace iat
