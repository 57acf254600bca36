#pragma once

#include <functional>
#include <memory>

#include "iat/types.hpp"

namespace iat {

enum class OperatorKind { dense, kron_blur };

/// Real square operator acting on dense vectors of length dim().
///
/// Implementations are immutable after construction, so one instance can be
/// shared read-only between concurrent solves.
class LinearOperator {
 public:
  virtual ~LinearOperator() = default;

  Index dim() const noexcept { return dim_; }
  virtual OperatorKind kind() const noexcept = 0;

  /// T x. Throws ArgumentError on a length mismatch.
  Vector apply(const Eigen::Ref<const Vector>& x) const;
  /// T^T x. Needed only by the norm estimators.
  Vector apply_transpose(const Eigen::Ref<const Vector>& x) const;

  /// Dense realization, assembled column by column through apply().
  virtual Matrix to_dense() const;

 protected:
  explicit LinearOperator(Index dim);

  virtual void apply_into(const Eigen::Ref<const Vector>& x,
                          Eigen::Ref<Vector> out) const = 0;
  virtual void apply_transpose_into(const Eigen::Ref<const Vector>& x,
                                    Eigen::Ref<Vector> out) const = 0;

 private:
  Index dim_;
};

using OperatorPtr = std::shared_ptr<const LinearOperator>;

class DenseOperator final : public LinearOperator {
 public:
  /// Takes ownership of a square matrix with finite entries.
  explicit DenseOperator(Matrix entries);

  OperatorKind kind() const noexcept override { return OperatorKind::dense; }
  const Matrix& entries() const noexcept { return entries_; }
  Matrix to_dense() const override { return entries_; }

 protected:
  void apply_into(const Eigen::Ref<const Vector>& x,
                  Eigen::Ref<Vector> out) const override;
  void apply_transpose_into(const Eigen::Ref<const Vector>& x,
                            Eigen::Ref<Vector> out) const override;

 private:
  Matrix entries_;
};

/// T = A (x) A acting on column-stacked n-by-n images, with A symmetric.
/// apply(x) evaluates vec(A X A^T) without forming the n^2-by-n^2 matrix.
class KronBlurOperator final : public LinearOperator {
 public:
  /// `factor` must be square, finite and exactly symmetric.
  explicit KronBlurOperator(Matrix factor);

  /// Symmetric Toeplitz factor whose first row is `first_row`.
  static KronBlurOperator from_toeplitz_row(const Eigen::Ref<const Vector>& first_row);

  OperatorKind kind() const noexcept override { return OperatorKind::kron_blur; }
  const Matrix& factor() const noexcept { return factor_; }
  Index image_size() const noexcept { return factor_.rows(); }

 protected:
  void apply_into(const Eigen::Ref<const Vector>& x,
                  Eigen::Ref<Vector> out) const override;
  void apply_transpose_into(const Eigen::Ref<const Vector>& x,
                            Eigen::Ref<Vector> out) const override;

 private:
  Matrix factor_;
};

struct NormEstimate {
  double value = 0.0;
  int iterations = 0;
  bool converged = false;
};

/// Largest singular value of a map A, given only its Gram action v -> A^T A v.
/// Power iteration from `start`; stops once the relative change of the
/// Rayleigh-quotient estimate drops to `tol`.
NormEstimate estimate_gram_norm(const std::function<Vector(const Vector&)>& gram,
                                Vector start, double tol, int max_iter);

/// ||T||_2 by power iteration on T^T T from the normalized all-ones vector.
NormEstimate operator_two_norm(const LinearOperator& op, double tol = 1e-10,
                               int max_iter = 500);

}  // namespace iat
