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

#include "trackkit/io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <system_error>
#include <vector>

namespace trackkit {

using nlohmann::json;

namespace io {
namespace {

Matrix<double> parse_matrix(const json& value, const char* key) {
  const std::string name(key);
  if (!value.is_array() || value.empty()) {
    throw FormatError(name + " must be a non-empty array of rows");
  }
  const auto rows = static_cast<Index>(value.size());
  Index cols = -1;
  Matrix<double> M;
  for (Index i = 0; i < rows; ++i) {
    const json& row = value[static_cast<std::size_t>(i)];
    if (!row.is_array() || row.empty()) {
      throw FormatError(name + " row " + std::to_string(i) +
                        " must be a non-empty array");
    }
    if (cols < 0) {
      cols = static_cast<Index>(row.size());
      M.resize(rows, cols);
    } else if (static_cast<Index>(row.size()) != cols) {
      throw FormatError(name + " is ragged: row " + std::to_string(i) +
                        " has " + std::to_string(row.size()) +
                        " entries, expected " + std::to_string(cols));
    }
    for (Index j = 0; j < cols; ++j) {
      const json& entry = row[static_cast<std::size_t>(j)];
      if (!entry.is_number()) {
        throw FormatError(name + "[" + std::to_string(i) + "][" +
                          std::to_string(j) + "] is not a number");
      }
      M(i, j) = entry.get<double>();
    }
  }
  return M;
}

Vector<double> parse_vector(const json& value, const char* key) {
  const std::string name(key);
  if (!value.is_array() || value.empty()) {
    throw FormatError(name + " must be a non-empty array of numbers");
  }
  Vector<double> v(static_cast<Index>(value.size()));
  for (std::size_t i = 0; i < value.size(); ++i) {
    if (!value[i].is_number()) {
      throw FormatError(name + "[" + std::to_string(i) + "] is not a number");
    }
    v(static_cast<Index>(i)) = value[i].get<double>();
  }
  return v;
}

json matrix_to_json(const Matrix<double>& M) {
  json rows = json::array();
  for (Index i = 0; i < M.rows(); ++i) {
    json row = json::array();
    for (Index j = 0; j < M.cols(); ++j) row.push_back(M(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

template <typename Derived>
json vector_to_json(const Eigen::MatrixBase<Derived>& v) {
  json out = json::array();
  for (Index i = 0; i < v.size(); ++i) out.push_back(v(i));
  return out;
}

std::vector<std::string_view> split(std::string_view line, char sep) {
  std::vector<std::string_view> fields;
  std::size_t begin = 0;
  while (true) {
    const std::size_t end = line.find(sep, begin);
    fields.push_back(line.substr(begin, end - begin));
    if (end == std::string_view::npos) break;
    begin = end + 1;
  }
  return fields;
}

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

template <typename T>
T parse_field(std::string_view field, std::size_t line_no) {
  field = trim(field);
  T value{};
  const char* end = field.data() + field.size();
  auto [ptr, ec] = std::from_chars(field.data(), end, value);
  if (field.empty() || ec != std::errc() || ptr != end) {
    throw FormatError("line " + std::to_string(line_no) + ": '" +
                      std::string(field) + "' is not a number");
  }
  return value;
}

void append_blank_or(std::string& out, bool present, double value) {
  out += ',';
  if (present) out += format_number(value);
}

}  // namespace

System parse_system(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw FormatError(std::string("system file is not valid JSON: ") +
                      e.what());
  }
  if (!doc.is_object()) throw FormatError("system file must be a JSON object");
  if (doc.contains("D")) {
    throw FormatError(
        "system file has a D matrix; only strictly proper systems "
        "(y = C x) are supported");
  }
  for (const auto& item : doc.items()) {
    const std::string& key = item.key();
    if (key != "A" && key != "B" && key != "C" && key != "x0" &&
        key != "name" && key != "description") {
      throw FormatError("unknown key '" + key + "' in system file");
    }
  }
  for (const char* key : {"A", "B", "C"}) {
    if (!doc.contains(key)) {
      throw FormatError(std::string("system file is missing ") + key);
    }
  }
  std::optional<Vector<double>> x0;
  if (doc.contains("x0")) x0 = parse_vector(doc["x0"], "x0");
  return System(parse_matrix(doc["A"], "A"), parse_matrix(doc["B"], "B"),
                parse_matrix(doc["C"], "C"), std::move(x0));
}

System load_system(const std::filesystem::path& path) {
  return parse_system(read_file(path));
}

std::string format_system(const System& system) {
  json doc;
  doc["A"] = matrix_to_json(system.A());
  doc["B"] = matrix_to_json(system.B());
  doc["C"] = matrix_to_json(system.C());
  doc["x0"] = vector_to_json(system.x0());
  return doc.dump(2) + "\n";
}

void save_system(const std::filesystem::path& path, const System& system) {
  write_file(path, format_system(system));
}

ReferenceTrajectory<double> parse_reference(std::string_view text, Index l) {
  if (l < 1) throw InvalidArgument("reference dimension must be >= 1");
  std::vector<std::string_view> lines;
  for (std::string_view line : split(text, '\n')) {
    if (!trim(line).empty()) lines.push_back(line);
  }
  if (lines.empty()) throw FormatError("reference file is empty");

  const auto header = split(lines.front(), ',');
  const auto expected = static_cast<std::size_t>(l + 1);
  if (header.size() != expected) {
    throw FormatError("reference header has " + std::to_string(header.size()) +
                      " columns, expected k plus " + std::to_string(l) +
                      " outputs");
  }
  if (trim(header.front()) != "k") {
    throw FormatError("reference header must start with 'k'");
  }
  if (lines.size() < 2) throw FormatError("reference file has no samples");

  Matrix<double> samples(l, static_cast<Index>(lines.size() - 1));
  long long start = 0;
  for (std::size_t row = 1; row < lines.size(); ++row) {
    const std::size_t line_no = row + 1;
    const auto fields = split(lines[row], ',');
    if (fields.size() != expected) {
      throw FormatError("line " + std::to_string(line_no) + " has " +
                        std::to_string(fields.size()) + " columns, expected " +
                        std::to_string(expected));
    }
    const auto k = parse_field<long long>(fields.front(), line_no);
    if (row == 1) {
      if (k < 0) throw FormatError("sample index k must be non-negative");
      start = k;
    } else if (k != start + static_cast<long long>(row) - 1) {
      throw FormatError("line " + std::to_string(line_no) + ": expected k = " +
                        std::to_string(start + static_cast<long long>(row) - 1) +
                        ", got " + std::to_string(k));
    }
    for (Index i = 0; i < l; ++i) {
      samples(i, static_cast<Index>(row - 1)) = parse_field<double>(
          fields[static_cast<std::size_t>(i + 1)], line_no);
    }
  }
  try {
    return ReferenceTrajectory<double>(static_cast<Index>(start),
                                       std::move(samples));
  } catch (const InvalidMatrix& e) {
    throw FormatError(std::string("reference: ") + e.what());
  }
}

ReferenceTrajectory<double> load_reference(const std::filesystem::path& path,
                                           Index l) {
  return parse_reference(read_file(path), l);
}

std::string format_number(double value) {
  char buffer[64];
  const auto result = std::to_chars(buffer, buffer + sizeof(buffer), value);
  return std::string(buffer, result.ptr);
}

std::string format_simulation(const SimulationRun<double>& run) {
  const Index m = run.inputs.dimension();
  const Index l = run.outputs.dimension();
  const bool with_target = run.mode == SimulationMode::projected;

  std::string out = "k";
  for (Index i = 1; i <= m; ++i) out += ",u" + std::to_string(i);
  for (Index i = 1; i <= l; ++i) out += ",y" + std::to_string(i);
  for (Index i = 1; i <= l; ++i) out += ",yref" + std::to_string(i);
  if (with_target) {
    for (Index i = 1; i <= l; ++i) out += ",ytgt" + std::to_string(i);
  }
  out += '\n';

  for (Index k = 0; k <= run.outputs.end_index(); ++k) {
    out += std::to_string(k);
    const bool has_u = k <= run.inputs.end_index();
    for (Index i = 0; i < m; ++i) {
      append_blank_or(out, has_u, has_u ? run.inputs.sample_at(k)(i) : 0.0);
    }
    for (Index i = 0; i < l; ++i) {
      append_blank_or(out, true, run.outputs.sample_at(k)(i));
    }
    const bool has_ref = k >= run.reference.start_index();
    for (Index i = 0; i < l; ++i) {
      append_blank_or(out, has_ref,
                      has_ref ? run.reference.sample_at(k)(i) : 0.0);
    }
    if (with_target) {
      for (Index i = 0; i < l; ++i) {
        append_blank_or(out, has_ref,
                        has_ref ? run.target.sample_at(k)(i) : 0.0);
      }
    }
    out += '\n';
  }
  return out;
}

std::string format_decomposition(const ReferenceTrajectory<double>& reference,
                                 const ReferenceDecomposition<double>& parts) {
  const Index l = reference.dimension();
  std::string out = "k";
  for (const char* prefix : {"yref", "proj", "resid"}) {
    for (Index i = 1; i <= l; ++i) {
      out += ',';
      out += prefix;
      out += std::to_string(i);
    }
  }
  out += '\n';
  for (Index k = reference.start_index(); k <= reference.end_index(); ++k) {
    out += std::to_string(k);
    for (const auto* trajectory :
         {&reference, &parts.projected, &parts.residual}) {
      for (Index i = 0; i < l; ++i) {
        append_blank_or(out, true, trajectory->sample_at(k)(i));
      }
    }
    out += '\n';
  }
  return out;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

void write_file(const std::filesystem::path& path, std::string_view contents) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FormatError("cannot write " + path.string());
  out << contents;
  if (!out) throw FormatError("failed writing " + path.string());
}

}  // namespace io

namespace {

template <typename T>
json optional_to_json(const std::optional<T>& value) {
  return value ? json(*value) : json(nullptr);
}

template <typename T>
std::optional<T> optional_from_json(const json& value) {
  if (value.is_null()) return std::nullopt;
  return value.get<T>();
}

ThetaVariant theta_variant_from_string(const std::string& name) {
  if (name == "linear") return ThetaVariant::linear;
  if (name == "quadratic") return ThetaVariant::quadratic;
  throw FormatError("unknown theta variant '" + name + "'");
}

}  // namespace

void to_json(json& j, const TrackabilityReport<double>& report) {
  json channels = json::array();
  for (const auto& Lq : report.channel_delays) {
    channels.push_back(optional_to_json(Lq));
  }
  j = json{{"trackable", report.trackable},
           {"delay", report.delay},
           {"channel_delays", std::move(channels)},
           {"first_markov_rank", report.first_markov_rank},
           {"num_outputs", report.num_outputs},
           {"num_inputs", report.num_inputs},
           {"horizon", report.horizon},
           {"markov_rank", report.markov_rank},
           {"required_markov_rank", report.required_markov_rank},
           {"markov_tilde_rank", report.markov_tilde_rank},
           {"vartheta", io::vector_to_json(report.vartheta)},
           {"Theta", report.Theta},
           {"theta_variant", to_string(report.theta_variant)}};
}

void from_json(const json& j, TrackabilityReport<double>& report) {
  report.trackable = j.at("trackable").get<bool>();
  report.delay = j.at("delay").get<Index>();
  report.channel_delays.clear();
  for (const auto& Lq : j.at("channel_delays")) {
    report.channel_delays.push_back(optional_from_json<Index>(Lq));
  }
  report.first_markov_rank = j.at("first_markov_rank").get<Index>();
  report.num_outputs = j.at("num_outputs").get<Index>();
  report.num_inputs = j.at("num_inputs").get<Index>();
  report.horizon = j.at("horizon").get<Index>();
  report.markov_rank = j.at("markov_rank").get<Index>();
  report.required_markov_rank = j.at("required_markov_rank").get<Index>();
  report.markov_tilde_rank = j.at("markov_tilde_rank").get<Index>();
  const auto& vt = j.at("vartheta");
  report.vartheta.resize(static_cast<Index>(vt.size()));
  for (std::size_t i = 0; i < vt.size(); ++i) {
    report.vartheta(static_cast<Index>(i)) = vt[i].get<double>();
  }
  report.Theta = j.at("Theta").get<double>();
  report.theta_variant =
      theta_variant_from_string(j.at("theta_variant").get<std::string>());
}

void to_json(json& j, const PropertyProfile& profile) {
  const auto& r = profile.ranks;
  j = json{
      {"num_states", profile.num_states},
      {"num_inputs", profile.num_inputs},
      {"num_outputs", profile.num_outputs},
      {"delay", optional_to_json(profile.delay)},
      {"state_controllable", profile.state_controllable},
      {"state_observable", profile.state_observable},
      {"minimal", profile.minimal},
      {"output_controllable", profile.output_controllable},
      {"iso", profile.iso},
      {"trackable", optional_to_json(profile.trackable)},
      {"venn_region", optional_to_json(profile.venn_region)},
      {"candidate_regions", profile.candidate_regions},
      {"ranks",
       {{"controllability", r.controllability},
        {"observability", r.observability},
        {"output_controllability", r.output_controllability},
        {"iso", r.iso},
        {"iso_required", r.iso_required},
        {"phi", r.phi},
        {"output_matrix", r.output_matrix},
        {"first_markov", optional_to_json(r.first_markov)}}}};
}

void from_json(const json& j, PropertyProfile& profile) {
  profile.num_states = j.at("num_states").get<Index>();
  profile.num_inputs = j.at("num_inputs").get<Index>();
  profile.num_outputs = j.at("num_outputs").get<Index>();
  profile.delay = optional_from_json<Index>(j.at("delay"));
  profile.state_controllable = j.at("state_controllable").get<bool>();
  profile.state_observable = j.at("state_observable").get<bool>();
  profile.minimal = j.at("minimal").get<bool>();
  profile.output_controllable = j.at("output_controllable").get<bool>();
  profile.iso = j.at("iso").get<bool>();
  profile.trackable = optional_from_json<bool>(j.at("trackable"));
  profile.venn_region = optional_from_json<int>(j.at("venn_region"));
  profile.candidate_regions =
      j.at("candidate_regions").get<std::vector<int>>();
  const auto& r = j.at("ranks");
  profile.ranks.controllability = r.at("controllability").get<Index>();
  profile.ranks.observability = r.at("observability").get<Index>();
  profile.ranks.output_controllability =
      r.at("output_controllability").get<Index>();
  profile.ranks.iso = r.at("iso").get<Index>();
  profile.ranks.iso_required = r.at("iso_required").get<Index>();
  profile.ranks.phi = r.at("phi").get<Index>();
  profile.ranks.output_matrix = r.at("output_matrix").get<Index>();
  profile.ranks.first_markov = optional_from_json<Index>(r.at("first_markov"));
}

}  // namespace trackkit
