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
#include <optional>
#include <string>
#include <vector>

#include "trackkit/linalg.hpp"
#include "trackkit/markov.hpp"
#include "trackkit/system.hpp"
#include "trackkit/trackability.hpp"

namespace trackkit {

/// Inversion law u = (C A^{L-1} B)^+ (y_ref,k+L - C A^L x_k).
template <typename Scalar>
class InversionLaw {
 public:
  explicit InversionLaw(const StateSpaceSystem<Scalar>& system,
                        RankTolerance tol = {})
      : delay_(compute_delay(system, tol)),
        n_(system.num_states()),
        l_(system.num_outputs()) {
    const Matrix<Scalar> G = markov_parameter(system, delay_ - 1);
    gain_ = pseudoinverse(G, tol);
    trackable_ = numerical_rank(G, tol) == l_;
    predictor_ = system.C();
    for (Index k = 0; k < delay_; ++k) predictor_ = predictor_ * system.A();
  }

  Index delay() const { return delay_; }
  bool exact() const { return trackable_; }
  const Matrix<Scalar>& gain() const { return gain_; }
  const Matrix<Scalar>& predictor() const { return predictor_; }

  template <typename DerivedY, typename DerivedX>
  Vector<Scalar> operator()(const Eigen::MatrixBase<DerivedY>& y_future,
                            const Eigen::MatrixBase<DerivedX>& x) const {
    if (y_future.size() != l_ || x.size() != n_) {
      throw DimensionError("closed_loop_input: expected reference sample of "
                           "size " + std::to_string(l_) + " and state of size " +
                           std::to_string(n_));
    }
    return gain_ * (y_future - predictor_ * x);
  }

 private:
  Index delay_;
  Index n_;
  Index l_;
  bool trackable_ = false;
  Matrix<Scalar> gain_;
  Matrix<Scalar> predictor_;  ///< C A^L
};

/// Single closed-loop step u_k from the state x_k and the sample
/// y_ref,k+L.
template <typename Scalar, typename DerivedY, typename DerivedX>
Vector<Scalar> closed_loop_input(const StateSpaceSystem<Scalar>& system,
                                 const Eigen::MatrixBase<DerivedY>& y_future,
                                 const Eigen::MatrixBase<DerivedX>& x,
                                 RankTolerance tol = {}) {
  return InversionLaw<Scalar>(system, tol)(y_future, x);
}

/// Open-loop input sequence u_0..u_{r-L} for a reference on L..r:
///   u_k = G^+ (y_ref,k+L - C A^{k+L} x0 - sum_{i=1..k} C A^{i+L-1} B u_{k-i}).
/// Exact for trackable systems, least squares per step otherwise.
template <typename Scalar, typename Derived>
InputTrajectory<Scalar> open_loop_input(
    const StateSpaceSystem<Scalar>& system,
    const ReferenceTrajectory<Scalar>& reference,
    const Eigen::MatrixBase<Derived>& x0,
    RankTolerance tol = {}) {
  const auto stack = internal::stack_for_reference(system, reference, tol);
  if (x0.size() != system.num_states()) {
    throw DimensionError("x0 must have " + std::to_string(system.num_states()) +
                         " entries");
  }
  require_finite(x0, "x0");
  const Index L = stack.delay;
  const Index N = stack.blocks();
  const Index l = system.num_outputs();
  const Index m = system.num_inputs();
  const Matrix<Scalar> gain = pseudoinverse(stack.first_markov(), tol);
  const Vector<Scalar> free = stack.free_response * x0;

  Matrix<Scalar> U(m, N);
  for (Index k = 0; k < N; ++k) {
    Vector<Scalar> bracket = free.segment(k * l, l);
    for (Index i = 1; i <= k; ++i) {
      bracket += stack.markov.block(i * l, 0, l, m) * U.col(k - i);
    }
    U.col(k) = gain * (reference.sample_at(k + L) - bracket);
  }
  return InputTrajectory<Scalar>(0, std::move(U));
}

enum class SimulationMode { open_loop, closed_loop, projected };

inline const char* to_string(SimulationMode mode) {
  switch (mode) {
    case SimulationMode::open_loop:
      return "open_loop";
    case SimulationMode::closed_loop:
      return "closed_loop";
    case SimulationMode::projected:
      return "projected";
  }
  return "unknown";
}

template <typename Scalar>
struct SimulationRun {
  SimulationMode mode = SimulationMode::closed_loop;
  Index delay = 0;
  InputTrajectory<Scalar> inputs;    ///< u_0..u_{r-L}
  std::vector<Vector<Scalar>> states;  ///< x_0..x_r, zero input after r-L
  OutputTrajectory<Scalar> outputs;  ///< y_0..y_r
  ReferenceTrajectory<Scalar> reference;  ///< as supplied, on L..r
  ReferenceTrajectory<Scalar> target;     ///< what the controller followed
  Scalar error_norm = 0;            ///< ||target - y_{L..r}||
  Scalar reference_error_norm = 0;  ///< ||reference - y_{L..r}||
  /// Set when C A^{L-1} B is not right invertible, so exactness is not
  /// guaranteed.
  bool best_effort = false;

  Index horizon() const { return outputs.end_index(); }
  /// Outputs y_L..y_r stacked.
  Vector<Scalar> tracked_outputs() const {
    return outputs.stacked().tail(reference.count() * reference.dimension());
  }
};

/// Runs the system under the inversion controller. The projected mode
/// replaces the reference by its orthogonal projection onto R(M_r), forces
/// x0 = 0 and runs closed loop.
template <typename Scalar, typename Derived>
SimulationRun<Scalar> simulate(const StateSpaceSystem<Scalar>& system,
                               SimulationMode mode,
                               const ReferenceTrajectory<Scalar>& reference,
                               const Eigen::MatrixBase<Derived>& x0,
                               RankTolerance tol = {}) {
  const auto stack = internal::stack_for_reference(system, reference, tol);
  if (x0.size() != system.num_states()) {
    throw DimensionError("x0 must have " + std::to_string(system.num_states()) +
                         " entries");
  }
  require_finite(x0, "x0");
  const Index L = stack.delay;
  const Index r = stack.horizon;
  const Index N = stack.blocks();
  const Index n = system.num_states();
  const Index m = system.num_inputs();
  const Index l = system.num_outputs();

  SimulationRun<Scalar> run;
  run.mode = mode;
  run.delay = L;
  run.reference = reference;
  run.target = reference;
  Vector<Scalar> x = x0;
  if (mode == SimulationMode::projected) {
    run.target = decompose(system, reference, tol).projected;
    x = Vector<Scalar>::Zero(n);
  }

  const InversionLaw<Scalar> law(system, tol);
  run.best_effort = !law.exact();

  Matrix<Scalar> U = Matrix<Scalar>::Zero(m, N);
  if (mode == SimulationMode::open_loop) {
    U = open_loop_input(system, run.target, x, tol).samples();
  }

  Matrix<Scalar> Y(l, r + 1);
  run.states.reserve(static_cast<std::size_t>(r + 1));
  for (Index k = 0; k <= r; ++k) {
    Vector<Scalar> u = Vector<Scalar>::Zero(m);
    if (k < N) {
      if (mode != SimulationMode::open_loop) {
        U.col(k) = law(run.target.sample_at(k + L), x);
      }
      u = U.col(k);
    }
    run.states.push_back(x);
    auto next = step(system, x, u);
    Y.col(k) = next.output;
    x = std::move(next.next_state);
  }
  run.inputs = InputTrajectory<Scalar>(0, std::move(U));
  run.outputs = OutputTrajectory<Scalar>(0, std::move(Y));

  const Vector<Scalar> tracked = run.tracked_outputs();
  run.error_norm = (run.target.stacked() - tracked).norm();
  run.reference_error_norm = (reference.stacked() - tracked).norm();
  return run;
}

namespace internal {

inline void validate_rows(const std::vector<Index>& rows, Index l) {
  if (rows.empty()) throw InvalidArgument("row selection is empty");
  std::vector<Index> sorted = rows;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
    throw InvalidArgument("row selection has duplicates");
  }
  if (sorted.front() < 0 || sorted.back() >= l) {
    throw InvalidArgument("row selection out of range 0.." +
                          std::to_string(l - 1));
  }
}

}  // namespace internal

/// Reduced system (A, B, C~) keeping the given output rows (0-based, in the
/// given order). Throws NoTrackableSubset unless the reduction is trackable.
template <typename Scalar>
StateSpaceSystem<Scalar> truncated_C_retrofit(
    const StateSpaceSystem<Scalar>& system, const std::vector<Index>& rows,
    RankTolerance tol = {}) {
  internal::validate_rows(rows, system.num_outputs());
  Matrix<Scalar> C(static_cast<Index>(rows.size()), system.num_states());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    C.row(static_cast<Index>(i)) = system.C().row(rows[i]);
  }
  StateSpaceSystem<Scalar> reduced(system.A(), system.B(), std::move(C),
                                   system.x0());
  const auto delays = input_output_delays(reduced, tol);
  if (!delays.delay ||
      numerical_rank(markov_parameter(reduced, *delays.delay - 1), tol) !=
          reduced.num_outputs()) {
    throw NoTrackableSubset("selected rows do not give a trackable system");
  }
  return reduced;
}

/// Greedy row choice: scan the rows of C A^{L-1} B in order and keep each
/// row that raises the rank of the kept block. With `size` given, stops
/// after that many rows and throws NoTrackableSubset if fewer exist.
template <typename Scalar>
std::vector<Index> greedy_trackable_rows(const StateSpaceSystem<Scalar>& system,
                                         std::optional<Index> size = {},
                                         RankTolerance tol = {}) {
  if (size && *size < 1) throw InvalidArgument("subset size must be >= 1");
  const Index L = compute_delay(system, tol);
  const Matrix<Scalar> G = markov_parameter(system, L - 1);
  const Scalar g_scale = G.operatorNorm();

  std::vector<Index> kept;
  Matrix<Scalar> block(0, G.cols());
  for (Index i = 0; i < G.rows(); ++i) {
    if (size && static_cast<Index>(kept.size()) == *size) break;
    Matrix<Scalar> candidate(block.rows() + 1, G.cols());
    candidate << block, G.row(i);
    if (numerical_rank(candidate, tol, g_scale) > block.rows()) {
      kept.push_back(i);
      block = std::move(candidate);
    }
  }
  if (size && static_cast<Index>(kept.size()) < *size) {
    throw NoTrackableSubset("no " + std::to_string(*size) +
                            " output rows give a trackable system; at most " +
                            std::to_string(kept.size()));
  }
  return kept;
}

}  // namespace trackkit
