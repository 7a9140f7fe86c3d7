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
#include <ostream>
#include <string>
#include <vector>

#include "trackkit/properties.hpp"

namespace trackkit {

enum ExitCode : int { kExitOk = 0, kExitMismatch = 1, kExitInputError = 2 };

/// Expected classification of one reference example system.
struct CorpusExpectation {
  int id;
  bool state_controllable;
  bool state_observable;
  bool minimal;
  bool output_controllable;
  bool iso;
  bool trackable;  ///< false also covers an undefined L
  /// 0 means L is undefined; -1 means the delay is not checked.
  int delay;
};

inline constexpr std::array<CorpusExpectation, 17> kCorpusExpectations = {{
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
}};

/// Whether a computed profile agrees with an expectation. `why` receives a
/// short description of the first disagreement.
bool matches(const PropertyProfile& profile,
             const CorpusExpectation& expected, std::string* why = nullptr);

/// Entry point behind the trackkit executable. `args` excludes the program
/// name. Returns one of ExitCode.
int run_cli(const std::vector<std::string>& args, std::ostream& out,
            std::ostream& err);

}  // namespace trackkit
