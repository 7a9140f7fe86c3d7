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

// Acceptance suite. Prints one PASS/FAIL line per criterion and exits
// nonzero if any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "named_systems.hpp"
#include "oracles.hpp"
#include "random_systems.hpp"
#include "trackkit/control.hpp"
#include "trackkit/io.hpp"
#include "trackkit/properties.hpp"

namespace {

using namespace trackkit;
using Clock = std::chrono::steady_clock;

struct Outcome {
  bool pass = true;
  std::string detail;
};

class Findings {
 public:
  void fail(const std::string& what) {
    ++failures_;
    if (notes_.size() < 5) notes_.push_back(what);
  }
  void check(bool ok, const std::string& what) {
    if (!ok) fail(what);
  }
  int failures() const { return failures_; }
  std::string summary() const {
    std::string out;
    for (const auto& n : notes_) out += "; " + n;
    return out;
  }

 private:
  int failures_ = 0;
  std::vector<std::string> notes_;
};

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.3g", v);
  return buf;
}

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

System corpus_system(int id) { return io::load_system(trackkit::testing::corpus_path(id)); }

/// Random systems with a defined delay, n <= 6 and 1 <= m, l <= n.
std::vector<trackkit::testing::GeneratedSystem> population(std::uint64_t seed,
                                                           int count) {
  trackkit::testing::SystemGenerator gen(seed, 6);
  std::vector<trackkit::testing::GeneratedSystem> out;
  while (static_cast<int>(out.size()) < count) {
    auto g = gen.next();
    if (input_output_delays(g.system).delay) out.push_back(std::move(g));
  }
  return out;
}

Eigen::MatrixXd reversal(Eigen::Index q, Eigen::Index blocks) {
  Eigen::MatrixXd P = Eigen::MatrixXd::Zero(q * blocks, q * blocks);
  for (Eigen::Index b = 0; b < blocks; ++b) {
    for (Eigen::Index i = 0; i < q; ++i) P(b * q + i, (blocks - 1 - b) * q + i) = 1;
  }
  return P;
}

// 1. Corpus profiles.
Outcome corpus_profiles() {
  struct Expected {
    int id;
    bool sc, so, minimal, oc, iso, trackable;
    int delay;  // 0: undefined, -1: not stated
  };
  static const Expected table[] = {
      {1, false, false, false, false, false, false, 0},
      {2, true, false, false, false, false, false, -1},
      {3, true, true, true, false, false, false, -1},
      {4, false, true, false, false, false, false, -1},
      {5, false, false, false, true, false, false, -1},
      {6, false, false, false, true, false, true, -1},
      {7, true, false, false, true, false, false, -1},
      {8, true, false, false, true, false, true, -1},
      {9, true, true, true, true, false, false, 2},
      {10, true, true, true, true, false, true, 2},
      {11, true, true, true, true, true, false, -1},
      {12, true, true, true, true, true, true, -1},
      {13, true, true, true, false, true, false, -1},
      {14, false, true, false, false, true, false, -1},
      {15, false, true, false, true, true, false, -1},
      {16, false, true, false, true, false, true, -1},
      {17, false, true, false, true, false, true, -1},
  };
  const auto start = Clock::now();
  Findings f;
  for (const auto& e : table) {
    const auto p = classify(corpus_system(e.id));
    const std::string ex = "example " + std::to_string(e.id);
    f.check(p.state_controllable == e.sc, ex + " controllability");
    f.check(p.state_observable == e.so, ex + " observability");
    f.check(p.minimal == e.minimal, ex + " minimality");
    f.check(p.output_controllable == e.oc, ex + " output controllability");
    f.check(p.iso == e.iso, ex + " ISO");
    f.check(p.trackable.value_or(false) == e.trackable, ex + " trackability");
    if (e.delay == 0) {
      f.check(!p.delay && !p.trackable, ex + " L should be undefined");
    } else if (e.delay > 0) {
      f.check(p.delay == e.delay, ex + " delay");
    }
    const auto& c = p.candidate_regions;
    f.check(std::find(c.begin(), c.end(), e.id) != c.end(), ex + " region");
  }
  const double t = seconds_since(start);
  f.check(t < 1.0, "runtime " + fmt(t) + " s");
  return {f.failures() == 0, "17 examples, " + std::to_string(f.failures()) +
                                 " mismatches, " + fmt(t) + " s" + f.summary()};
}

// 2. Three trackability tests agree.
Outcome theorem_equivalence() {
  const auto start = Clock::now();
  trackkit::testing::SystemGenerator refs(9202);
  Findings f;
  int trackable = 0;
  for (const auto& g : population(9201, 500)) {
    const auto& s = g.system;
    const Index L = *input_output_delays(s).delay;
    const Index l = s.num_outputs();
    const bool verdict =
        numerical_rank(markov_parameter(s, L - 1)) == l;
    trackable += verdict;
    for (Index r = L; r <= L + 4; ++r) {
      const Eigen::MatrixXd M =
          trackkit::testing::impulse_batch_matrix(s.A(), s.B(), s.C(), L, r);
      const bool full = numerical_rank(M) == (r - L + 1) * l;
      f.check(full == verdict, std::string(to_string(g.family)) + " rank(M_r) at r=L+" +
                                   std::to_string(r - L));
    }
    const Index r = L + 4;
    const ReferenceTrajectory<double> ref(L, refs.gaussian(l, r - L + 1));
    const Eigen::VectorXd x0 = refs.gaussian_vector(s.num_states());
    const auto run = simulate(s, SimulationMode::closed_loop, ref, x0);
    const Eigen::MatrixXd Y = trackkit::testing::simulate_outputs(
        s.A(), s.B(), s.C(), x0, run.inputs.samples(), r + 1);
    const double residual =
        (Y.rightCols(r - L + 1) - ref.samples()).norm() /
        std::max(1.0, ref.samples().norm());
    f.check((residual < 1e-8) == verdict,
            std::string(to_string(g.family)) + " tracking residual " + fmt(residual));
  }
  const double t = seconds_since(start);
  f.check(t < 30.0, "runtime " + fmt(t) + " s");
  return {f.failures() == 0,
          "500 systems (" + std::to_string(trackable) + " trackable), " +
              std::to_string(f.failures()) + " disagreements, " + fmt(t) +
              " s" + f.summary()};
}

// 3. Stack rank against min(l, m).
Outcome min_rank_lemma() {
  Findings f;
  for (const auto& g : population(9201, 500)) {
    const auto& s = g.system;
    const Index L = *input_output_delays(s).delay;
    const Index p = std::min(s.num_outputs(), s.num_inputs());
    const bool first = numerical_rank(markov_parameter(s, L - 1)) == p;
    for (Index r = L; r <= L + 4; ++r) {
      const Eigen::MatrixXd M =
          trackkit::testing::impulse_batch_matrix(s.A(), s.B(), s.C(), L, r);
      f.check((numerical_rank(M) == (r - L + 1) * p) == first,
              std::string(to_string(g.family)) + " r=L+" + std::to_string(r - L));
    }
  }
  return {f.failures() == 0,
          "500 systems, r = L..L+4, " + std::to_string(f.failures()) +
              " violations" + f.summary()};
}

// 4. Block-reversed stack.
Outcome reversed_stack() {
  std::vector<System> systems;
  for (int id = 1; id <= 17; ++id) systems.push_back(corpus_system(id));
  for (auto& g : population(9201, 500)) systems.push_back(std::move(g.system));
  Findings f;
  double worst = 0;
  int checked = 0;
  for (const auto& s : systems) {
    const auto info = input_output_delays(s);
    if (!info.delay) continue;
    for (Index r = *info.delay; r <= *info.delay + 4; ++r) {
      const auto stack = build_stacks(s, r);
      const Eigen::Index N = stack.blocks();
      const Eigen::MatrixXd expected = reversal(s.num_outputs(), N) *
                                       stack.markov * reversal(s.num_inputs(), N);
      const double dev = (stack.markov_tilde - expected).cwiseAbs().maxCoeff();
      worst = std::max(worst, dev);
      f.check(dev <= 1e-12, "deviation " + fmt(dev));
      f.check(numerical_rank(stack.markov_tilde) == numerical_rank(stack.markov),
              "rank mismatch");
      ++checked;
    }
  }
  return {f.failures() == 0, std::to_string(checked) +
                                 " stacks, max deviation " + fmt(worst) + ", " +
                                 std::to_string(f.failures()) + " failures" +
                                 f.summary()};
}

// 5. Three-output example.
Outcome three_output_example() {
  Findings f;
  const auto sys = trackkit::testing::three_output_system();
  f.check(!is_trackable(sys).trackable, "verdict should be untrackable");

  trackkit::testing::SystemGenerator gen(9501);
  const Index r = 50;
  const ReferenceTrajectory<double> ref(1, gen.gaussian(3, r));
  const auto run = simulate(sys, SimulationMode::projected, ref,
                            Eigen::VectorXd::Zero(4));
  const Eigen::MatrixXd Y = trackkit::testing::simulate_outputs(
      sys.A(), sys.B(), sys.C(), Eigen::VectorXd::Zero(4), run.inputs.samples(),
      r + 1);
  // Projection target recomputed with the least-squares oracle.
  const Eigen::MatrixXd M =
      trackkit::testing::impulse_batch_matrix(sys.A(), sys.B(), sys.C(), 1, r);
  const Eigen::VectorXd target =
      trackkit::testing::least_squares_fit(M, ref.stacked());
  const Eigen::MatrixXd tail = Y.rightCols(r);
  const double projected_error =
      (Eigen::Map<const Eigen::VectorXd>(tail.data(), tail.size()) - target).norm();
  f.check(projected_error < 1e-8, "projected error " + fmt(projected_error));

  const auto reduced = truncated_C_retrofit(sys, {0, 1});
  f.check(is_trackable(reduced).trackable, "reduced system untrackable");
  double worst = 0;
  for (int trial = 0; trial < 20; ++trial) {
    const ReferenceTrajectory<double> ref2(1, gen.gaussian(2, 30));
    const Eigen::VectorXd x0 = gen.gaussian_vector(4);
    const auto run2 = simulate(reduced, SimulationMode::closed_loop, ref2, x0);
    const Eigen::MatrixXd Y2 = trackkit::testing::simulate_outputs(
        reduced.A(), reduced.B(), reduced.C(), x0, run2.inputs.samples(), 31);
    worst = std::max(worst, (Y2.rightCols(30) - ref2.samples()).norm() /
                                ref2.samples().norm());
  }
  f.check(worst < 1e-8, "reduced tracking error " + fmt(worst));
  return {f.failures() == 0, "projected error " + fmt(projected_error) +
                                 ", reduced-system relative error " +
                                 fmt(worst) + f.summary()};
}

// 6. Null-space references.
Outcome null_space_references() {
  Findings f;
  const auto sys = trackkit::testing::index_example_system();
  trackkit::testing::SystemGenerator gen(9601);
  double worst_gap = 0;
  std::string equality;
  for (Index r : {Index{1}, Index{5}, Index{50}}) {
    const Eigen::MatrixXd M =
        trackkit::testing::impulse_batch_matrix(sys.A(), sys.B(), sys.C(), 1, r);
    const Eigen::VectorXd v = gen.gaussian_vector(M.rows());
    const Eigen::VectorXd Y = v - trackkit::testing::least_squares_fit(M, v);
    const double ynorm = Y.norm();

    std::vector<Eigen::VectorXd> inputs;
    inputs.push_back(Eigen::VectorXd::Zero(M.cols()));
    for (int trial = 0; trial < 200; ++trial) {
      inputs.push_back(gen.gaussian_vector(M.cols()) *
                       std::pow(10.0, gen.uniform_index(-3, 2)));
    }
    const auto ref = ReferenceTrajectory<double>::from_stacked(1, 3, Y);
    const auto run = simulate(sys, SimulationMode::closed_loop, ref,
                              Eigen::VectorXd::Zero(4));
    inputs.push_back(run.inputs.stacked());
    for (const auto& U : inputs) {
      const double e = (Y - M * U).norm();
      worst_gap = std::min(worst_gap, e - ynorm);
      f.check(e >= ynorm - 1e-9, "bound violated by " + fmt(ynorm - e));
    }

    const Eigen::MatrixXd Yout = trackkit::testing::simulate_outputs(
        sys.A(), sys.B(), sys.C(), Eigen::VectorXd::Zero(4), run.inputs.samples(),
        r + 1);
    const Eigen::MatrixXd tail = Yout.rightCols(r);
    const double inversion_error =
        (Y - Eigen::Map<const Eigen::VectorXd>(tail.data(), tail.size())).norm();
    const bool equal = std::abs(inversion_error - ynorm) < 1e-8;
    f.check(equal, "r=" + std::to_string(r) + " inversion error " +
                       fmt(inversion_error) + " vs ||Y|| " + fmt(ynorm));
    equality += " r=" + std::to_string(r) + ": " + fmt(inversion_error) + "/" +
                fmt(ynorm);
  }
  return {f.failures() == 0,
          "lower bound min(e - ||Y||) = " + fmt(worst_gap) +
              "; inversion error/||Y||" + equality + f.summary()};
}

// 7. Index properties.
Outcome index_properties() {
  Findings f;
  int vartheta_outside = 0;
  trackkit::testing::SystemGenerator gen(9701);
  for (const auto& g : population(9201, 500)) {
    const auto& s = g.system;
    const auto report = is_trackable(s);
    for (Index i = 0; i < report.vartheta.size(); ++i) {
      const double v = report.vartheta(i);
      if (v < -1e-9 || v > 1 + 1e-9) ++vartheta_outside;
    }
    f.check(std::abs(report.vartheta.sum() - double(report.first_markov_rank)) <=
                1e-9,
            "sum(vartheta) " + fmt(report.vartheta.sum()));
    f.check((std::abs(report.Theta - 1.0) < 1e-9) == report.trackable,
            "Theta " + fmt(report.Theta));

    const Index L = report.delay;
    const Index r = L + gen.uniform_index(0, 6);
    const Eigen::MatrixXd samples = gen.gaussian(s.num_outputs(), r - L + 1);
    const double theta = theta_index(s, ReferenceTrajectory<double>(L, samples));
    f.check(theta >= 0 && theta <= 1, "theta " + fmt(theta));
    if (report.trackable) f.check(std::abs(theta - 1) < 1e-9, "theta " + fmt(theta));
    for (double alpha : {-3.7, 1e-3, 250.0}) {
      const double scaled =
          theta_index(s, ReferenceTrajectory<double>(L, alpha * samples));
      f.check(std::abs(scaled - theta) < 1e-10,
              "scale change " + fmt(std::abs(scaled - theta)));
    }
  }
  f.check(vartheta_outside == 0,
          std::to_string(vartheta_outside) + " vartheta components outside [0, 1]");
  return {f.failures() == 0, "500 systems, " + std::to_string(f.failures()) +
                                 " violations" + f.summary()};
}

// 8. Structural facts.
Outcome structural_facts() {
  const auto start = Clock::now();
  trackkit::testing::SystemGenerator gen(9801, 6);
  Findings f;
  int region18 = 0, lemma = 0, rank_c = 0, minimal_rank = 0;
  int trackable = 0, oc_counted = 0;
  for (int trial = 0; trial < 10000; ++trial) {
    const auto g = gen.next();
    const auto& s = g.system;
    const auto p = classify(s);
    const bool tr = p.trackable.value_or(false);
    const bool full_c = numerical_rank(s.C()) == s.num_outputs();
    trackable += tr;
    oc_counted += p.output_controllable;
    if (tr && p.iso && !p.state_controllable) ++region18;
    if (tr && !p.output_controllable) ++lemma;
    if (p.output_controllable && !full_c) ++rank_c;
    if (p.minimal && full_c && !p.output_controllable) ++minimal_rank;
  }
  const double t = seconds_since(start);
  f.check(region18 == 0, std::to_string(region18) + " trackable ISO uncontrollable");
  f.check(lemma == 0, std::to_string(lemma) + " trackable not output controllable");
  f.check(rank_c == 0, std::to_string(rank_c) + " output controllable with rank C < l");
  f.check(minimal_rank == 0,
          std::to_string(minimal_rank) + " minimal, rank C = l, not output controllable");
  f.check(t < 120.0, "runtime " + fmt(t) + " s");
  return {f.failures() == 0,
          "10000 systems (" + std::to_string(trackable) + " trackable, " +
              std::to_string(oc_counted) + " output controllable), " +
              std::to_string(f.failures()) + " violations, " + fmt(t) + " s" +
              f.summary()};
}

// 9. Invariant zero example.
Outcome zero_example() {
  Findings f;
  const auto sys = trackkit::testing::zero_example_system();
  const auto p = classify(sys);
  f.check(p.minimal, "not minimal");
  f.check(p.trackable.value_or(false), "not trackable");
  const auto test = zeros_rank_test(sys);
  f.check(test.precondition_met(), "rank test precondition");
  f.check(!test.full, "Phi_(n-1) has full rank");
  const auto zeros = trackkit::testing::rosenbrock_zeros(sys.A(), sys.B(), sys.C());
  double nearest = 1e300;
  for (const auto& z : zeros) nearest = std::min(nearest, std::abs(z - 0.1));
  f.check(nearest < 1e-8, "nearest zero at distance " + fmt(nearest));
  return {f.failures() == 0, "rank Phi " + std::to_string(test.phi_rank) +
                                 " of " + std::to_string(test.required_rank) +
                                 ", |z - 0.1| = " + fmt(nearest) + f.summary()};
}

// 10. Batch and recursive inputs agree.
Outcome open_closed_agreement() {
  Findings f;
  trackkit::testing::SystemGenerator gen(9901);
  double worst = 0;
  int runs = 0;
  for (int id = 1; id <= 17; ++id) {
    const auto s = corpus_system(id);
    const auto info = input_output_delays(s);
    if (!info.delay) continue;
    for (int trial = 0; trial < 5; ++trial) {
      const Index L = *info.delay;
      const ReferenceTrajectory<double> ref(L, gen.gaussian(s.num_outputs(), 20));
      const Eigen::VectorXd x0 = gen.gaussian_vector(s.num_states());
      const auto open = open_loop_input(s, ref, x0);
      const auto closed = simulate(s, SimulationMode::closed_loop, ref, x0);
      const double dev =
          (open.samples() - closed.inputs.samples()).cwiseAbs().maxCoeff();
      worst = std::max(worst, dev);
      f.check(dev <= 1e-10, "example " + std::to_string(id) + " deviation " + fmt(dev));
      ++runs;
    }
  }
  return {f.failures() == 0, std::to_string(runs) +
                                 " corpus runs, max deviation " + fmt(worst) +
                                 f.summary()};
}

}  // namespace

int main() {
  const std::vector<std::function<Outcome()>> criteria = {
      corpus_profiles,      theorem_equivalence,  min_rank_lemma,
      reversed_stack,       three_output_example, null_space_references,
      index_properties,     structural_facts,     zero_example,
      open_closed_agreement};
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i]();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failed += !o.pass;
    std::printf("criterion %zu: %s (%s)\n", i + 1, o.pass ? "PASS" : "FAIL",
                o.detail.c_str());
    std::fflush(stdout);
  }
  return failed == 0 ? 0 : 1;
}
