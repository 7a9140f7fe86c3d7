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

#include <optional>
#include <string>
#include <utility>

#include "trackkit/linalg.hpp"

namespace trackkit {

/// Strictly proper discrete-time LTI system
///   x_{k+1} = A x_k + B u_k,   y_k = C x_k,
/// with n states, m inputs, l outputs and initial state x0 (zero unless
/// given). Construction enforces n >= 1, 1 <= m <= n, 1 <= l <= n and finite
/// entries; the object is immutable afterwards.
template <typename Scalar>
class StateSpaceSystem {
 public:
  StateSpaceSystem(Matrix<Scalar> A, Matrix<Scalar> B, Matrix<Scalar> C,
                   std::optional<Vector<Scalar>> x0 = std::nullopt)
      : A_(std::move(A)), B_(std::move(B)), C_(std::move(C)) {
    const Index n = A_.rows();
    if (n < 1 || A_.cols() != n) {
      throw DimensionError("A must be square and non-empty, got " +
                           shape(A_));
    }
    if (B_.rows() != n || B_.cols() < 1) {
      throw DimensionError("B must be " + std::to_string(n) +
                           " x m with m >= 1, got " + shape(B_));
    }
    if (C_.cols() != n || C_.rows() < 1) {
      throw DimensionError("C must be l x " + std::to_string(n) +
                           " with l >= 1, got " + shape(C_));
    }
    if (B_.cols() > n) {
      throw DimensionPolicyError("m = " + std::to_string(B_.cols()) +
                                 " exceeds n = " + std::to_string(n));
    }
    if (C_.rows() > n) {
      throw DimensionPolicyError("l = " + std::to_string(C_.rows()) +
                                 " exceeds n = " + std::to_string(n));
    }
    require_finite(A_, "A");
    require_finite(B_, "B");
    require_finite(C_, "C");
    if (x0) {
      if (x0->size() != n) {
        throw DimensionError("x0 must have " + std::to_string(n) +
                             " entries, got " + std::to_string(x0->size()));
      }
      require_finite(*x0, "x0");
      x0_ = std::move(*x0);
    } else {
      x0_ = Vector<Scalar>::Zero(n);
    }
  }

  const Matrix<Scalar>& A() const { return A_; }
  const Matrix<Scalar>& B() const { return B_; }
  const Matrix<Scalar>& C() const { return C_; }
  const Vector<Scalar>& x0() const { return x0_; }

  Index num_states() const { return A_.rows(); }
  Index num_inputs() const { return B_.cols(); }
  Index num_outputs() const { return C_.rows(); }

  /// Copy of this system with a different initial state.
  StateSpaceSystem with_initial_state(Vector<Scalar> x0) const {
    return StateSpaceSystem(A_, B_, C_, std::move(x0));
  }

 private:
  static std::string shape(const Matrix<Scalar>& M) {
    return std::to_string(M.rows()) + "x" + std::to_string(M.cols());
  }

  Matrix<Scalar> A_;
  Matrix<Scalar> B_;
  Matrix<Scalar> C_;
  Vector<Scalar> x0_;
};

struct ReferenceTag {};
struct InputTag {};
struct OutputTag {};

/// Sequence of equally sized vectors indexed start_index, start_index+1, ...
/// Samples are the columns of a (dimension x count) matrix, so the
/// column-major storage is exactly the stacked vector [v_s; v_{s+1}; ...].
template <typename Scalar, typename Tag>
class Trajectory {
 public:
  Trajectory() = default;
  Trajectory(Index start_index, Matrix<Scalar> samples)
      : start_index_(start_index), samples_(std::move(samples)) {
    if (start_index_ < 0) {
      throw InvalidArgument("trajectory start index must be non-negative");
    }
    require_finite(samples_, "trajectory");
  }

  /// Splits a stacked vector into samples of the given dimension.
  static Trajectory from_stacked(Index start_index, Index dimension,
                                 const Vector<Scalar>& stacked) {
    if (dimension < 1 || stacked.size() % dimension != 0) {
      throw DimensionError("stacked vector of length " +
                           std::to_string(stacked.size()) +
                           " is not a multiple of " + std::to_string(dimension));
    }
    return Trajectory(start_index,
                      Eigen::Map<const Matrix<Scalar>>(
                          stacked.data(), dimension, stacked.size() / dimension));
  }

  Index start_index() const { return start_index_; }
  /// Index of the final sample.
  Index end_index() const { return start_index_ + count() - 1; }
  Index dimension() const { return samples_.rows(); }
  Index count() const { return samples_.cols(); }
  bool empty() const { return samples_.cols() == 0; }

  const Matrix<Scalar>& samples() const { return samples_; }
  auto sample_at(Index k) const { return samples_.col(k - start_index_); }

  Vector<Scalar> stacked() const {
    return Eigen::Map<const Vector<Scalar>>(samples_.data(), samples_.size());
  }

 private:
  Index start_index_ = 0;
  Matrix<Scalar> samples_;
};

template <typename Scalar>
using ReferenceTrajectory = Trajectory<Scalar, ReferenceTag>;
template <typename Scalar>
using InputTrajectory = Trajectory<Scalar, InputTag>;
template <typename Scalar>
using OutputTrajectory = Trajectory<Scalar, OutputTag>;

template <typename Scalar>
struct StepResult {
  Vector<Scalar> next_state;
  Vector<Scalar> output;  ///< y = C x at the current state, before the update
};

template <typename Scalar, typename DerivedX, typename DerivedU>
StepResult<Scalar> step(const StateSpaceSystem<Scalar>& system,
                        const Eigen::MatrixBase<DerivedX>& x,
                        const Eigen::MatrixBase<DerivedU>& u) {
  if (x.size() != system.num_states() || u.size() != system.num_inputs()) {
    throw DimensionError("step: expected x of size " +
                         std::to_string(system.num_states()) +
                         " and u of size " + std::to_string(system.num_inputs()));
  }
  return {system.A() * x + system.B() * u, system.C() * x};
}

}  // namespace trackkit
