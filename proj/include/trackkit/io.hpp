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

#include <filesystem>
#include <string>
#include <string_view>

#include <json.hpp>

#include "trackkit/control.hpp"
#include "trackkit/properties.hpp"
#include "trackkit/system.hpp"
#include "trackkit/trackability.hpp"

namespace trackkit {

using System = StateSpaceSystem<double>;

namespace io {

/// System document: {"A": [[..]], "B": [[..]], "C": [[..]], "x0": [..]}
/// with row-major nested arrays. "x0", "name" and "description" are
/// optional; any other key, including "D", is rejected.
System parse_system(std::string_view text);
System load_system(const std::filesystem::path& path);
std::string format_system(const System& system);
void save_system(const std::filesystem::path& path, const System& system);

/// Reference CSV: header "k,y1,...,yl" and one row per consecutive sample.
ReferenceTrajectory<double> parse_reference(std::string_view text, Index l);
ReferenceTrajectory<double> load_reference(const std::filesystem::path& path,
                                           Index l);

/// Shortest decimal form that reads back to the same double.
std::string format_number(double value);

/// CSV with header "k,<prefix>1,...,<prefix>d".
template <typename Tag>
std::string format_trajectory(const Trajectory<double, Tag>& trajectory,
                              std::string_view prefix) {
  std::string out = "k";
  for (Index i = 1; i <= trajectory.dimension(); ++i) {
    out += ',';
    out += prefix;
    out += std::to_string(i);
  }
  out += '\n';
  for (Index k = trajectory.start_index(); k <= trajectory.end_index(); ++k) {
    out += std::to_string(k);
    const auto sample = trajectory.sample_at(k);
    for (Index i = 0; i < sample.size(); ++i) {
      out += ',';
      out += format_number(sample(i));
    }
    out += '\n';
  }
  return out;
}

/// Columns k, u1..um, y1..yl, yref1..yrefl over k = 0..r; entries outside a
/// trajectory's range are left blank. Projected runs add ytgt1..ytgtl.
std::string format_simulation(const SimulationRun<double>& run);

/// Columns k, yref1..yrefl, proj1..projl, resid1..residl.
std::string format_decomposition(const ReferenceTrajectory<double>& reference,
                                 const ReferenceDecomposition<double>& parts);

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view contents);

}  // namespace io

void to_json(nlohmann::json& j, const TrackabilityReport<double>& report);
void from_json(const nlohmann::json& j, TrackabilityReport<double>& report);
void to_json(nlohmann::json& j, const PropertyProfile& profile);
void from_json(const nlohmann::json& j, PropertyProfile& profile);

}  // namespace trackkit
