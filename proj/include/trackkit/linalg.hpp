/*
 * Copyright 2026 The trackkit Authors. All rights reserved.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <algorithm>
#include <string>

#include <Eigen/Dense>

#include "trackkit/errors.hpp"

namespace trackkit {

using Eigen::Index;

template <typename Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

/// Relative singular-value threshold used for every rank decision.
///
/// A singular value counts toward the rank when
///   sigma > relative_epsilon * max(sigma_max, scale) * max(rows, cols),
/// where `scale` is an optional reference magnitude supplied by the caller
/// (zero by default, which makes the rule purely relative).
class RankTolerance {
 public:
  static constexpr double kDefaultEpsilon = 1e-10;

  constexpr RankTolerance() = default;
  explicit RankTolerance(double relative_epsilon)
      : relative_epsilon_(relative_epsilon) {
    if (!(relative_epsilon > 0.0 && relative_epsilon < 1.0)) {
      throw InvalidArgument("rank tolerance must lie in (0, 1), got " +
                            std::to_string(relative_epsilon));
    }
  }

  constexpr double relative_epsilon() const { return relative_epsilon_; }

 private:
  double relative_epsilon_ = kDefaultEpsilon;
};

template <typename Derived>
void require_finite(const Eigen::MatrixBase<Derived>& M,
                    const char* what = "matrix") {
  if (!M.allFinite()) {
    throw InvalidMatrix(std::string(what) + " has non-finite entries");
  }
}

template <typename Scalar>
Scalar rank_threshold(Scalar sigma_max, Index rows, Index cols,
                      RankTolerance tol, Scalar scale = Scalar(0)) {
  using std::max;
  return Scalar(tol.relative_epsilon()) * max(sigma_max, scale) *
         Scalar(max(rows, cols));
}

namespace internal {

template <typename Scalar>
Index count_above(const Vector<Scalar>& singular_values, Scalar threshold) {
  Index rank = 0;
  for (Index i = 0; i < singular_values.size(); ++i) {
    if (singular_values(i) > threshold) ++rank;
  }
  return rank;
}

}  // namespace internal

/// Number of singular values above the tolerance threshold. Zero for the
/// zero matrix and for empty matrices.
template <typename Derived>
Index numerical_rank(const Eigen::MatrixBase<Derived>& M,
                     RankTolerance tol = {},
                     typename Derived::Scalar scale = 0) {
  using Scalar = typename Derived::Scalar;
  require_finite(M);
  if (M.size() == 0) return 0;
  Eigen::JacobiSVD<Matrix<Scalar>> svd(M.eval());
  const Vector<Scalar> sv = svd.singularValues();
  const Scalar threshold =
      rank_threshold<Scalar>(sv(0), M.rows(), M.cols(), tol, scale);
  return internal::count_above<Scalar>(sv, threshold);
}

/// Moore-Penrose pseudoinverse; singular values at or below the rank
/// threshold are treated as zero. The zero matrix maps to the zero matrix of
/// transposed shape.
template <typename Derived>
Matrix<typename Derived::Scalar> pseudoinverse(
    const Eigen::MatrixBase<Derived>& M, RankTolerance tol = {}) {
  using Scalar = typename Derived::Scalar;
  require_finite(M);
  Matrix<Scalar> result = Matrix<Scalar>::Zero(M.cols(), M.rows());
  if (M.size() == 0) return result;
  Eigen::JacobiSVD<Matrix<Scalar>> svd(M.eval(),
                                       Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Vector<Scalar>& sv = svd.singularValues();
  const Scalar threshold =
      rank_threshold<Scalar>(sv(0), M.rows(), M.cols(), tol);
  const Index rank = internal::count_above<Scalar>(sv, threshold);
  if (rank == 0) return result;
  const auto U = svd.matrixU().leftCols(rank);
  const auto V = svd.matrixV().leftCols(rank);
  result.noalias() =
      V * sv.head(rank).cwiseInverse().asDiagonal() * U.transpose();
  return result;
}

/// Orthonormal basis of the column space of M, one basis vector per column.
template <typename Derived>
Matrix<typename Derived::Scalar> column_space_basis(
    const Eigen::MatrixBase<Derived>& M, RankTolerance tol = {}) {
  using Scalar = typename Derived::Scalar;
  require_finite(M);
  if (M.size() == 0) return Matrix<Scalar>(M.rows(), 0);
  Eigen::JacobiSVD<Matrix<Scalar>> svd(M.eval(), Eigen::ComputeThinU);
  const Vector<Scalar>& sv = svd.singularValues();
  const Index rank = internal::count_above<Scalar>(
      sv, rank_threshold<Scalar>(sv(0), M.rows(), M.cols(), tol));
  return svd.matrixU().leftCols(rank);
}

/// Orthogonal projection of v onto R(M). Equal to M (M^T M)^+ M^T v, computed
/// through an orthonormal basis of R(M).
template <typename DerivedM, typename DerivedV>
Vector<typename DerivedM::Scalar> project_onto_columnspace(
    const Eigen::MatrixBase<DerivedM>& M, const Eigen::MatrixBase<DerivedV>& v,
    RankTolerance tol = {}) {
  if (v.cols() != 1 || v.rows() != M.rows()) {
    throw DimensionError("projection: vector of length " +
                         std::to_string(v.rows()) + " against matrix with " +
                         std::to_string(M.rows()) + " rows");
  }
  require_finite(v, "vector");
  const auto basis = column_space_basis(M, tol);
  if (basis.cols() == M.rows()) return v;
  return basis * (basis.transpose() * v);
}

/// Block anti-diagonal permutation with `blocks` identity blocks of size q,
/// arranged in reversed block order. Involutory: P * P = I.
template <typename Scalar = double>
Matrix<Scalar> permutation_matrix(Index q, Index blocks) {
  if (q < 1 || blocks < 1) {
    throw InvalidArgument("permutation_matrix needs q >= 1 and blocks >= 1");
  }
  Matrix<Scalar> P = Matrix<Scalar>::Zero(q * blocks, q * blocks);
  for (Index b = 0; b < blocks; ++b) {
    P.block(b * q, (blocks - 1 - b) * q, q, q).setIdentity();
  }
  return P;
}

}  // namespace trackkit
