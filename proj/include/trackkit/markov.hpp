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
#include <vector>

#include "trackkit/linalg.hpp"
#include "trackkit/system.hpp"

namespace trackkit {

/// Markov parameter C A^k B.
template <typename Scalar>
Matrix<Scalar> markov_parameter(const StateSpaceSystem<Scalar>& system,
                                Index k) {
  Matrix<Scalar> X = system.B();
  for (Index i = 0; i < k; ++i) X = system.A() * X;
  return system.C() * X;
}

/// Markov parameters C A^k B for k = 0..count-1.
template <typename Scalar>
std::vector<Matrix<Scalar>> markov_parameters(
    const StateSpaceSystem<Scalar>& system, Index count) {
  std::vector<Matrix<Scalar>> params;
  params.reserve(static_cast<std::size_t>(count));
  Matrix<Scalar> X = system.B();
  for (Index k = 0; k < count; ++k) {
    params.push_back(system.C() * X);
    X = system.A() * X;
  }
  return params;
}

/// Whether C A^k B is numerically zero. A product is judged against the
/// magnitude ||C|| ||A^k|| ||B|| its factors could produce, so cancellation
/// noise in an exactly-zero product is not mistaken for coupling.
template <typename Scalar, typename Derived>
bool is_numerically_zero(const Eigen::MatrixBase<Derived>& product,
                         Scalar factor_scale, RankTolerance tol) {
  return numerical_rank(product, tol, factor_scale) == 0;
}

struct DelayInfo {
  std::optional<Index> delay;                       ///< L = min_q L_q
  std::vector<std::optional<Index>> channel_delays; ///< L_q, none if q never couples
};

/// Input-output delays: L_q is the smallest k in 1..n with C A^{k-1} b_q
/// nonzero, and L is their minimum. Never throws for a valid system.
template <typename Scalar>
DelayInfo input_output_delays(const StateSpaceSystem<Scalar>& system,
                              RankTolerance tol = {}) {
  const Index n = system.num_states();
  const Index m = system.num_inputs();
  const Scalar c_norm = system.C().operatorNorm();

  DelayInfo info;
  info.channel_delays.assign(static_cast<std::size_t>(m), std::nullopt);
  Matrix<Scalar> Ak = Matrix<Scalar>::Identity(n, n);  // A^{k-1}
  for (Index k = 1; k <= n; ++k) {
    const Matrix<Scalar> CAk = system.C() * Ak;
    const Scalar a_norm = Ak.operatorNorm();
    for (Index q = 0; q < m; ++q) {
      auto& Lq = info.channel_delays[static_cast<std::size_t>(q)];
      if (Lq) continue;
      const Vector<Scalar> impulse = CAk * system.B().col(q);
      const Scalar scale = c_norm * a_norm * system.B().col(q).norm();
      if (!is_numerically_zero(impulse, scale, tol)) Lq = k;
    }
    Ak = system.A() * Ak;
  }
  for (const auto& Lq : info.channel_delays) {
    if (Lq && (!info.delay || *Lq < *info.delay)) info.delay = Lq;
  }
  return info;
}

/// Delay L; throws NoInputOutputCoupling when it is not defined.
template <typename Scalar>
Index compute_delay(const StateSpaceSystem<Scalar>& system,
                    RankTolerance tol = {}) {
  const auto info = input_output_delays(system, tol);
  if (!info.delay) throw NoInputOutputCoupling();
  return *info.delay;
}

/// Markov-parameter stacks for horizon r >= L:
///   free_response = Gamma_r = [C A^L; ...; C A^r],
///   markov        = M_r, block lower-triangular Toeplitz with
///                   block (i, j) = C A^{L-1+i-j} B for i >= j,
///   markov_tilde  = the block upper-triangular arrangement with block
///                   (i, j) = C A^{L-1+j-i} B for j >= i.
template <typename Scalar>
struct MarkovStack {
  Index delay = 0;
  std::vector<std::optional<Index>> channel_delays;
  Index horizon = 0;
  Index num_outputs = 0;
  Index num_inputs = 0;
  Matrix<Scalar> markov;
  Matrix<Scalar> free_response;
  Matrix<Scalar> markov_tilde;

  /// Number of samples L..r covered by the stack.
  Index blocks() const { return horizon - delay + 1; }
  /// First nonzero Markov parameter C A^{L-1} B.
  auto first_markov() const {
    return markov.topLeftCorner(num_outputs, num_inputs);
  }
};

/// Default horizon r = L + n.
template <typename Scalar>
Index default_horizon(const StateSpaceSystem<Scalar>& system, Index delay) {
  return delay + system.num_states();
}

template <typename Scalar>
MarkovStack<Scalar> build_stacks(const StateSpaceSystem<Scalar>& system,
                                 std::optional<Index> horizon = std::nullopt,
                                 RankTolerance tol = {}) {
  const auto delays = input_output_delays(system, tol);
  if (!delays.delay) throw NoInputOutputCoupling();
  const Index L = *delays.delay;
  const Index r = horizon.value_or(default_horizon(system, L));
  if (r < L) {
    throw HorizonTooShort("horizon r = " + std::to_string(r) +
                          " is shorter than the delay L = " + std::to_string(L));
  }
  const Index l = system.num_outputs();
  const Index m = system.num_inputs();
  const Index n = system.num_states();
  const Index N = r - L + 1;

  MarkovStack<Scalar> stack;
  stack.delay = L;
  stack.channel_delays = delays.channel_delays;
  stack.horizon = r;
  stack.num_outputs = l;
  stack.num_inputs = m;

  // C A^{L-1+d} B for d = 0..N-1.
  const auto params = markov_parameters(system, L - 1 + N);
  stack.markov = Matrix<Scalar>::Zero(N * l, N * m);
  stack.markov_tilde = Matrix<Scalar>::Zero(N * l, N * m);
  for (Index i = 0; i < N; ++i) {
    for (Index j = 0; j <= i; ++j) {
      const auto& P = params[static_cast<std::size_t>(L - 1 + i - j)];
      stack.markov.block(i * l, j * m, l, m) = P;
      stack.markov_tilde.block(j * l, i * m, l, m) = P;
    }
  }

  stack.free_response.resize(N * l, n);
  Matrix<Scalar> CAk = system.C();
  for (Index k = 0; k < L; ++k) CAk = CAk * system.A();
  for (Index i = 0; i < N; ++i) {
    stack.free_response.middleRows(i * l, l) = CAk;
    CAk = CAk * system.A();
  }
  return stack;
}

/// Batch equation Y_{r,L} = Gamma_r x0 + M_r U_{r-L}; the result holds the
/// outputs y_L..y_r.
template <typename Scalar, typename Derived>
OutputTrajectory<Scalar> batch_output(const MarkovStack<Scalar>& stack,
                                      const Eigen::MatrixBase<Derived>& x0,
                                      const InputTrajectory<Scalar>& inputs) {
  if (x0.size() != stack.free_response.cols()) {
    throw DimensionError("batch_output: x0 has " + std::to_string(x0.size()) +
                         " entries, expected " +
                         std::to_string(stack.free_response.cols()));
  }
  if (inputs.dimension() != stack.num_inputs ||
      inputs.count() != stack.blocks()) {
    throw DimensionError("batch_output: expected " +
                         std::to_string(stack.blocks()) + " inputs of size " +
                         std::to_string(stack.num_inputs));
  }
  const Vector<Scalar> Y =
      stack.free_response * x0 + stack.markov * inputs.stacked();
  return OutputTrajectory<Scalar>::from_stacked(stack.delay, stack.num_outputs,
                                                Y);
}

struct TildeRankCheck {
  Index rank_markov = 0;
  Index rank_markov_tilde = 0;
  double max_permutation_deviation = 0.0;  ///< max |M_tilde - P_l M P_m|

  bool ranks_equal() const { return rank_markov == rank_markov_tilde; }
};

/// Compares rank(M_r) with rank(M_tilde_r) and checks that the two are
/// related by the block-reversal permutations.
template <typename Scalar>
TildeRankCheck tilde_rank_check(const MarkovStack<Scalar>& stack,
                                RankTolerance tol = {}) {
  const Index N = stack.blocks();
  const Matrix<Scalar> permuted =
      permutation_matrix<Scalar>(stack.num_outputs, N) * stack.markov *
      permutation_matrix<Scalar>(stack.num_inputs, N);
  TildeRankCheck check;
  check.rank_markov = numerical_rank(stack.markov, tol);
  check.rank_markov_tilde = numerical_rank(stack.markov_tilde, tol);
  check.max_permutation_deviation = static_cast<double>(
      (stack.markov_tilde - permuted).cwiseAbs().maxCoeff());
  return check;
}

}  // namespace trackkit
