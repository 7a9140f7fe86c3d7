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

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "trackkit/linalg.hpp"
#include "trackkit/markov.hpp"
#include "trackkit/system.hpp"

namespace trackkit {

namespace internal {

inline Index checked_horizon(std::optional<Index> horizon, Index n) {
  const Index r = horizon.value_or(n);
  if (r < 1) throw InvalidArgument("horizon must be at least 1");
  return r;
}

}  // namespace internal

/// Q_sc,r = [B  AB  ...  A^{r-1}B]; r defaults to n.
template <typename Scalar>
Matrix<Scalar> controllability_matrix(const StateSpaceSystem<Scalar>& system,
                                      std::optional<Index> horizon = {}) {
  const Index r = internal::checked_horizon(horizon, system.num_states());
  const Index m = system.num_inputs();
  Matrix<Scalar> Q(system.num_states(), r * m);
  Q.leftCols(m) = system.B();
  for (Index i = 1; i < r; ++i) {
    Q.middleCols(i * m, m) = system.A() * Q.middleCols((i - 1) * m, m);
  }
  return Q;
}

/// Q_so,r = [C; CA; ...; CA^{r-1}]; r defaults to n.
template <typename Scalar>
Matrix<Scalar> observability_matrix(const StateSpaceSystem<Scalar>& system,
                                    std::optional<Index> horizon = {}) {
  const Index r = internal::checked_horizon(horizon, system.num_states());
  const Index l = system.num_outputs();
  Matrix<Scalar> Q(r * l, system.num_states());
  Q.topRows(l) = system.C();
  for (Index i = 1; i < r; ++i) {
    Q.middleRows(i * l, l) = Q.middleRows((i - 1) * l, l) * system.A();
  }
  return Q;
}

/// Q_oc,r = C Q_sc,r.
template <typename Scalar>
Matrix<Scalar> output_controllability_matrix(
    const StateSpaceSystem<Scalar>& system, std::optional<Index> horizon = {}) {
  return system.C() * controllability_matrix(system, horizon);
}

/// Input-and-state observability matrix: the stacked map from
/// (x0, u_0, ..., u_{r-1}) to (y_0, ..., y_r) with
///   y_k = C A^k x0 + sum_{j<k} C A^{k-1-j} B u_j.
/// Size (r+1) l x (n + r m); r defaults to n. Defined even when L is not.
template <typename Scalar>
Matrix<Scalar> iso_matrix(const StateSpaceSystem<Scalar>& system,
                          std::optional<Index> horizon = {}) {
  const Index r = internal::checked_horizon(horizon, system.num_states());
  const Index n = system.num_states();
  const Index m = system.num_inputs();
  const Index l = system.num_outputs();
  const auto params = markov_parameters(system, r);

  Matrix<Scalar> Psi = Matrix<Scalar>::Zero((r + 1) * l, n + r * m);
  Matrix<Scalar> CAk = system.C();
  for (Index k = 0; k <= r; ++k) {
    Psi.block(k * l, 0, l, n) = CAk;
    for (Index j = 0; j < k; ++j) {
      Psi.block(k * l, n + j * m, l, m) =
          params[static_cast<std::size_t>(k - 1 - j)];
    }
    CAk = CAk * system.A();
  }
  return Psi;
}

struct IsoTest {
  Index rank = 0;
  Index required_rank = 0;  ///< n + r m
  bool iso() const { return rank == required_rank; }
};

template <typename Scalar>
IsoTest iso_test(const StateSpaceSystem<Scalar>& system,
                 std::optional<Index> horizon = {}, RankTolerance tol = {}) {
  const Matrix<Scalar> Psi = iso_matrix(system, horizon);
  return {numerical_rank(Psi, tol), Psi.cols()};
}

/// Phi_r = [ B  AB  ...  A^r B ; 0 | M_tilde_r ] where M_tilde_r is block
/// upper-triangular Toeplitz in CB, CAB, ..., CA^{r-1}B. Size
/// (n + r l) x ((r + 1) m).
template <typename Scalar>
Matrix<Scalar> phi_matrix(const StateSpaceSystem<Scalar>& system, Index r) {
  if (r < 0) throw InvalidArgument("phi_matrix needs r >= 0");
  const Index n = system.num_states();
  const Index m = system.num_inputs();
  const Index l = system.num_outputs();
  Matrix<Scalar> Phi = Matrix<Scalar>::Zero(n + r * l, (r + 1) * m);
  Phi.topRows(n) = controllability_matrix(system, r + 1);
  const auto params = markov_parameters(system, r);
  for (Index i = 0; i < r; ++i) {
    for (Index j = i; j < r; ++j) {
      Phi.block(n + i * l, (j + 1) * m, l, m) =
          params[static_cast<std::size_t>(j - i)];
    }
  }
  return Phi;
}

struct ZerosRankTest {
  Index phi_rank = 0;
  Index required_rank = 0;  ///< n + (n - 1) l
  bool full = false;
  /// The rank condition characterises invariant zeros only for minimal
  /// systems; when this is false the result is computed but flagged.
  bool minimal = false;
  std::optional<Index> delay;
  bool precondition_met() const { return minimal; }
  /// Full rank on a minimal system certifies trackability with L = 1.
  bool certifies_trackability() const { return full && minimal; }
};

template <typename Scalar>
ZerosRankTest zeros_rank_test(const StateSpaceSystem<Scalar>& system,
                              RankTolerance tol = {}) {
  const Index n = system.num_states();
  ZerosRankTest test;
  test.phi_rank = numerical_rank(phi_matrix(system, n - 1), tol);
  test.required_rank = n + (n - 1) * system.num_outputs();
  test.full = test.phi_rank == test.required_rank;
  test.minimal = numerical_rank(controllability_matrix(system), tol) == n &&
                 numerical_rank(observability_matrix(system), tol) == n;
  test.delay = input_output_delays(system, tol).delay;
  return test;
}

/// The five independent properties behind a Venn region; minimality is
/// derived as controllable && observable.
struct PropertySignature {
  bool state_controllable;
  bool state_observable;
  bool output_controllable;
  bool iso;
  bool trackable;

  friend bool operator==(const PropertySignature&,
                         const PropertySignature&) = default;
};

/// Region i is the profile of the i-th reference example system. Regions 16
/// and 17 share a profile.
inline constexpr std::array<PropertySignature, 17> kVennRegions = {{
    {false, false, false, false, false},  // 1 (L undefined)
    {true, false, false, false, false},   // 2
    {true, true, false, false, false},    // 3
    {false, true, false, false, false},   // 4
    {false, false, true, false, false},   // 5
    {false, false, true, false, true},    // 6
    {true, false, true, false, false},    // 7
    {true, false, true, false, true},     // 8
    {true, true, true, false, false},     // 9
    {true, true, true, false, true},      // 10
    {true, true, true, true, false},      // 11
    {true, true, true, true, true},       // 12
    {true, true, false, true, false},     // 13
    {false, true, false, true, false},    // 14
    {false, true, true, true, false},     // 15
    {false, true, true, false, true},     // 16
    {false, true, true, false, true},     // 17
}};

/// All region ids (1-based) whose profile equals the signature.
inline std::vector<int> matching_regions(const PropertySignature& signature) {
  std::vector<int> regions;
  for (std::size_t i = 0; i < kVennRegions.size(); ++i) {
    if (kVennRegions[i] == signature) regions.push_back(static_cast<int>(i) + 1);
  }
  return regions;
}

struct PropertyRanks {
  Index controllability = 0;         ///< rank(Q_sc,n)
  Index observability = 0;           ///< rank(Q_so,n)
  Index output_controllability = 0;  ///< rank(Q_oc,n)
  Index iso = 0;                     ///< rank(Psi_n)
  Index iso_required = 0;            ///< n + n m
  Index phi = 0;                     ///< rank(Phi_{n-1})
  Index output_matrix = 0;           ///< rank(C)
  std::optional<Index> first_markov; ///< rank(C A^{L-1} B)

  friend bool operator==(const PropertyRanks&, const PropertyRanks&) = default;
};

struct PropertyProfile {
  Index num_states = 0;
  Index num_inputs = 0;
  Index num_outputs = 0;
  std::optional<Index> delay;
  bool state_controllable = false;
  bool state_observable = false;
  bool minimal = false;
  bool output_controllable = false;
  bool iso = false;
  std::optional<bool> trackable;  ///< absent when L is not defined
  std::optional<int> venn_region; ///< lowest matching region
  std::vector<int> candidate_regions;
  PropertyRanks ranks;

  /// Signature used for region placement; an undefined L counts as
  /// not trackable.
  PropertySignature signature() const {
    return {state_controllable, state_observable, output_controllable, iso,
            trackable.value_or(false)};
  }

  friend bool operator==(const PropertyProfile&,
                         const PropertyProfile&) = default;
};

template <typename Scalar>
PropertyProfile classify(const StateSpaceSystem<Scalar>& system,
                         RankTolerance tol = {}) {
  const Index n = system.num_states();
  const Index l = system.num_outputs();

  PropertyProfile profile;
  profile.num_states = n;
  profile.num_inputs = system.num_inputs();
  profile.num_outputs = l;

  const Matrix<Scalar> Qsc = controllability_matrix(system);
  const Matrix<Scalar> Qoc = system.C() * Qsc;
  auto& ranks = profile.ranks;
  ranks.controllability = numerical_rank(Qsc, tol);
  ranks.observability = numerical_rank(observability_matrix(system), tol);
  ranks.output_controllability = numerical_rank(
      Qoc, tol, system.C().operatorNorm() * Qsc.operatorNorm());
  const IsoTest iso = iso_test(system, std::nullopt, tol);
  ranks.iso = iso.rank;
  ranks.iso_required = iso.required_rank;
  ranks.phi = numerical_rank(phi_matrix(system, n - 1), tol);
  ranks.output_matrix = numerical_rank(system.C(), tol);

  profile.state_controllable = ranks.controllability == n;
  profile.state_observable = ranks.observability == n;
  profile.minimal = profile.state_controllable && profile.state_observable;
  profile.output_controllable = ranks.output_controllability == l;
  profile.iso = iso.iso();

  profile.delay = input_output_delays(system, tol).delay;
  if (profile.delay) {
    ranks.first_markov =
        numerical_rank(markov_parameter(system, *profile.delay - 1), tol);
    profile.trackable = *ranks.first_markov == l;
  }

  profile.candidate_regions = matching_regions(profile.signature());
  if (!profile.candidate_regions.empty()) {
    profile.venn_region = profile.candidate_regions.front();
  }
  return profile;
}

}  // namespace trackkit
