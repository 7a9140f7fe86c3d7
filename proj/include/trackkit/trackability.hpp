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

#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "trackkit/linalg.hpp"
#include "trackkit/markov.hpp"
#include "trackkit/system.hpp"

namespace trackkit {

/// Relative residual below which a reference counts as reachable:
/// ||resid|| / max(||Y_ref||, 1) < kMembershipTolerance.
inline constexpr double kMembershipTolerance = 1e-8;

/// Aggregation used for the scalar system index Theta:
///   linear    -> sum(vartheta) / l
///   quadratic -> vartheta^T vartheta / l
enum class ThetaVariant { linear, quadratic };

inline const char* to_string(ThetaVariant variant) {
  return variant == ThetaVariant::linear ? "linear" : "quadratic";
}

struct TrackabilityOptions {
  std::optional<Index> horizon;  ///< defaults to L + n
  RankTolerance tolerance;
  ThetaVariant theta_variant = ThetaVariant::linear;
};

template <typename Scalar>
struct TrackabilityReport {
  bool trackable = false;
  Index delay = 0;
  std::vector<std::optional<Index>> channel_delays;
  Index first_markov_rank = 0;  ///< rank(C A^{L-1} B)
  Index num_outputs = 0;
  Index num_inputs = 0;
  Index horizon = 0;
  Index markov_rank = 0;           ///< rank(M_r) at `horizon`
  Index required_markov_rank = 0;  ///< (r - L + 1) l
  Index markov_tilde_rank = 0;
  Vector<Scalar> vartheta;
  Scalar Theta = 0;
  ThetaVariant theta_variant = ThetaVariant::linear;

  /// The Markov-stack rank test agrees with the first-Markov-parameter test.
  bool stack_rank_consistent() const {
    return trackable == (markov_rank == required_markov_rank);
  }
};

/// Relative gain array G o (G^+)^T.
template <typename Derived>
Matrix<typename Derived::Scalar> rga(const Eigen::MatrixBase<Derived>& G,
                                     RankTolerance tol = {}) {
  return G.cwiseProduct(pseudoinverse(G, tol).transpose());
}

/// Row sums of rga(G). Row i equals (G G^+)_{ii}, a diagonal entry of an
/// orthogonal projector, so every component lies in [0, 1] and the
/// components sum to rank(G).
template <typename Derived>
Vector<typename Derived::Scalar> rga_row_sums(
    const Eigen::MatrixBase<Derived>& G, RankTolerance tol = {}) {
  return rga(G, tol).rowwise().sum();
}

template <typename Scalar>
Scalar aggregate_theta(const Vector<Scalar>& vartheta, ThetaVariant variant) {
  const Scalar l = Scalar(vartheta.size());
  return variant == ThetaVariant::linear ? vartheta.sum() / l
                                         : vartheta.squaredNorm() / l;
}

/// Component-wise system trackability index rga(C A^{L-1} B) 1_m.
template <typename Scalar>
Vector<Scalar> vartheta_index(const StateSpaceSystem<Scalar>& system,
                              RankTolerance tol = {}) {
  const Index L = compute_delay(system, tol);
  return rga_row_sums(markov_parameter(system, L - 1), tol);
}

/// System trackability index; equals 1 exactly for trackable systems.
template <typename Scalar>
Scalar Theta_index(const StateSpaceSystem<Scalar>& system,
                   ThetaVariant variant = ThetaVariant::linear,
                   RankTolerance tol = {}) {
  return aggregate_theta(vartheta_index(system, tol), variant);
}

/// Trackability decision: rank(C A^{L-1} B) == l. The report also carries
/// the Markov-stack rank test at the chosen horizon as a cross-check.
template <typename Scalar>
TrackabilityReport<Scalar> is_trackable(const StateSpaceSystem<Scalar>& system,
                                        const TrackabilityOptions& options = {}) {
  const auto stack = build_stacks(system, options.horizon, options.tolerance);
  const auto G = stack.first_markov();

  TrackabilityReport<Scalar> report;
  report.delay = stack.delay;
  report.channel_delays = stack.channel_delays;
  report.num_outputs = system.num_outputs();
  report.num_inputs = system.num_inputs();
  report.horizon = stack.horizon;
  report.first_markov_rank = numerical_rank(G, options.tolerance);
  report.trackable = report.first_markov_rank == system.num_outputs();
  report.markov_rank = numerical_rank(stack.markov, options.tolerance);
  report.markov_tilde_rank =
      numerical_rank(stack.markov_tilde, options.tolerance);
  report.required_markov_rank = stack.blocks() * system.num_outputs();
  report.vartheta = rga_row_sums(G, options.tolerance);
  report.theta_variant = options.theta_variant;
  report.Theta = aggregate_theta(report.vartheta, options.theta_variant);
  return report;
}

namespace internal {

/// Stack sized to the reference: the reference must cover samples L..r.
template <typename Scalar>
MarkovStack<Scalar> stack_for_reference(
    const StateSpaceSystem<Scalar>& system,
    const ReferenceTrajectory<Scalar>& reference, RankTolerance tol) {
  if (reference.empty()) {
    throw DimensionError("reference trajectory is empty");
  }
  if (reference.dimension() != system.num_outputs()) {
    throw DimensionError("reference has " +
                         std::to_string(reference.dimension()) +
                         " components, system has l = " +
                         std::to_string(system.num_outputs()));
  }
  const Index L = compute_delay(system, tol);
  if (reference.start_index() != L) {
    throw DimensionError("reference starts at k = " +
                         std::to_string(reference.start_index()) +
                         " but must start at the delay L = " +
                         std::to_string(L));
  }
  return build_stacks(system, reference.end_index(), tol);
}

}  // namespace internal

template <typename Scalar>
struct MembershipResult {
  bool in_trackable_set = false;
  /// Minimum-norm input reaching the reference, present for members.
  std::optional<InputTrajectory<Scalar>> witness;
  Scalar residual_norm = 0;  ///< min_U ||Gamma x0 + M U - Y_ref||
  /// False when R(Gamma_r) lies inside R(M_r), i.e. the trackable set does
  /// not depend on x0.
  bool initial_state_matters = false;
};

/// Whether Y_ref lies in the affine trackable set R(M_r) + {Gamma_r x0}.
template <typename Scalar, typename Derived>
MembershipResult<Scalar> membership(const StateSpaceSystem<Scalar>& system,
                                    const ReferenceTrajectory<Scalar>& reference,
                                    const Eigen::MatrixBase<Derived>& x0,
                                    RankTolerance tol = {}) {
  const auto stack = internal::stack_for_reference(system, reference, tol);
  if (x0.size() != system.num_states()) {
    throw DimensionError("x0 must have " + std::to_string(system.num_states()) +
                         " entries");
  }
  require_finite(x0, "x0");
  const Vector<Scalar> Y = reference.stacked();
  const Vector<Scalar> target = Y - stack.free_response * x0;
  const Vector<Scalar> U = pseudoinverse(stack.markov, tol) * target;
  const Vector<Scalar> residual = target - stack.markov * U;

  MembershipResult<Scalar> result;
  result.residual_norm = residual.norm();
  using std::max;
  result.in_trackable_set =
      result.residual_norm / max(Y.norm(), Scalar(1)) <
      Scalar(kMembershipTolerance);
  if (result.in_trackable_set) {
    result.witness =
        InputTrajectory<Scalar>::from_stacked(0, system.num_inputs(), U);
  }
  const Matrix<Scalar> basis = column_space_basis(stack.markov, tol);
  const Matrix<Scalar> outside =
      stack.free_response - basis * (basis.transpose() * stack.free_response);
  result.initial_state_matters =
      numerical_rank(outside, tol, stack.free_response.norm()) > 0;
  return result;
}

/// Orthogonal split of a reference (x0 = 0) into its trackable part in
/// R(M_r) and the remainder in N(M_r^T).
template <typename Scalar>
struct ReferenceDecomposition {
  ReferenceTrajectory<Scalar> projected;
  ReferenceTrajectory<Scalar> residual;
  std::optional<Scalar> theta;  ///< absent for the zero reference
  Scalar min_error_norm = 0;    ///< ||residual||
};

template <typename Scalar>
ReferenceDecomposition<Scalar> decompose(
    const StateSpaceSystem<Scalar>& system,
    const ReferenceTrajectory<Scalar>& reference, RankTolerance tol = {}) {
  const auto stack = internal::stack_for_reference(system, reference, tol);
  const Vector<Scalar> Y = reference.stacked();
  const Vector<Scalar> projected =
      project_onto_columnspace(stack.markov, Y, tol);
  const Vector<Scalar> residual = Y - projected;

  const Index start = reference.start_index();
  const Index l = reference.dimension();
  ReferenceDecomposition<Scalar> out{
      ReferenceTrajectory<Scalar>::from_stacked(start, l, projected),
      ReferenceTrajectory<Scalar>::from_stacked(start, l, residual),
      std::nullopt, residual.norm()};
  const Scalar y_norm = Y.norm();
  if (y_norm > Scalar(0)) {
    out.theta = projected.norm() / y_norm;
  }
  return out;
}

/// Reference command trackability index ||Pi Y|| / ||Y|| (x0 = 0).
template <typename Scalar>
Scalar theta_index(const StateSpaceSystem<Scalar>& system,
                   const ReferenceTrajectory<Scalar>& reference,
                   RankTolerance tol = {}) {
  const auto parts = decompose(system, reference, tol);
  if (!parts.theta) {
    throw UndefinedIndex("theta is undefined for the zero reference");
  }
  return *parts.theta;
}

/// Least achievable 2-norm tracking error over all inputs from x0 = 0,
/// sqrt(||Y||^2 - ||Pi Y||^2).
template <typename Scalar>
Scalar min_error_bound(const StateSpaceSystem<Scalar>& system,
                       const ReferenceTrajectory<Scalar>& reference,
                       RankTolerance tol = {}) {
  return decompose(system, reference, tol).min_error_norm;
}

}  // namespace trackkit
