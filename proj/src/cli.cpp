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

#include "trackkit/cli.hpp"

#include <filesystem>
#include <iomanip>
#include <map>
#include <sstream>

#include <CLI11.hpp>

#include "trackkit/io.hpp"

namespace trackkit {

using nlohmann::json;

namespace {

struct Config {
  std::optional<Index> horizon;
  double tolerance = RankTolerance::kDefaultEpsilon;
  bool json = false;
  std::string theta_variant = "linear";
  std::string mode = "closed_loop";
  std::string x0;
  std::string out_path;
  std::vector<std::string> paths;
};

std::string fmt(double value, int precision = 3) {
  std::ostringstream s;
  s << std::setprecision(precision) << value;
  return s.str();
}

std::string fmt_vector(const Vector<double>& v, int precision = 6) {
  std::string out;
  for (Index i = 0; i < v.size(); ++i) {
    if (i > 0) out += ' ';
    out += fmt(v(i), precision);
  }
  return out;
}

std::string fmt_delays(const std::vector<std::optional<Index>>& delays) {
  std::string out;
  for (std::size_t q = 0; q < delays.size(); ++q) {
    if (q > 0) out += ' ';
    out += delays[q] ? std::to_string(*delays[q]) : std::string("-");
  }
  return out;
}

Vector<double> parse_x0(const std::string& text, Index n) {
  std::vector<double> values;
  std::stringstream s(text);
  std::string field;
  while (std::getline(s, field, ',')) {
    std::size_t used = 0;
    double value = 0;
    try {
      value = std::stod(field, &used);
    } catch (const std::exception&) {
      throw FormatError("--x0: '" + field + "' is not a number");
    }
    if (field.find_first_not_of(" \t", used) != std::string::npos) {
      throw FormatError("--x0: '" + field + "' is not a number");
    }
    values.push_back(value);
  }
  if (static_cast<Index>(values.size()) != n) {
    throw DimensionError("--x0 has " + std::to_string(values.size()) +
                         " entries, the system has n = " + std::to_string(n));
  }
  return Eigen::Map<Vector<double>>(values.data(), n);
}

ThetaVariant parse_variant(const std::string& name) {
  return name == "quadratic" ? ThetaVariant::quadratic : ThetaVariant::linear;
}

SimulationMode parse_mode(const std::string& name) {
  if (name == "open_loop") return SimulationMode::open_loop;
  if (name == "projected") return SimulationMode::projected;
  return SimulationMode::closed_loop;
}

constexpr const char* kNoCoupling = "L undefined: no input-output coupling";

int cmd_analyze(const Config& cfg, std::ostream& out) {
  const System system = io::load_system(cfg.paths.at(0));
  const RankTolerance tol(cfg.tolerance);
  const auto delays = input_output_delays(system, tol);
  if (!delays.delay) {
    if (cfg.json) {
      json channels = json::array();
      for (std::size_t q = 0; q < delays.channel_delays.size(); ++q) {
        channels.push_back(nullptr);
      }
      out << json{{"delay", nullptr},
                  {"channel_delays", channels},
                  {"trackable", nullptr},
                  {"verdict", kNoCoupling}}
                 .dump(2)
          << "\n";
    } else {
      out << "system: n=" << system.num_states()
          << ", m=" << system.num_inputs() << ", l=" << system.num_outputs()
          << "\n"
          << "verdict: " << kNoCoupling << "\n";
    }
    return kExitOk;
  }

  TrackabilityOptions options;
  options.horizon = cfg.horizon;
  options.tolerance = tol;
  options.theta_variant = parse_variant(cfg.theta_variant);
  const auto report = is_trackable(system, options);

  std::string verdict;
  if (report.trackable) {
    verdict = "trackable, Θ=" + fmt(report.Theta);
  } else {
    verdict = "untrackable, rank " + std::to_string(report.first_markov_rank) +
              " of " + std::to_string(report.num_outputs) +
              ", Θ=" + fmt(report.Theta);
  }

  if (cfg.json) {
    json j = report;
    j["verdict"] = verdict;
    out << j.dump(2) << "\n";
    return kExitOk;
  }
  out << "system: n=" << system.num_states() << ", m=" << report.num_inputs
      << ", l=" << report.num_outputs << "\n"
      << "delay: L=" << report.delay
      << ", channel delays: " << fmt_delays(report.channel_delays) << "\n"
      << "rank(C A^(L-1) B) = " << report.first_markov_rank << " of l = "
      << report.num_outputs << "\n"
      << "vartheta: " << fmt_vector(report.vartheta) << "\n"
      << "Theta (" << to_string(report.theta_variant)
      << "): " << fmt(report.Theta, 6) << "\n"
      << "rank(M_r) = " << report.markov_rank << ", (r-L+1) l = "
      << report.required_markov_rank << " at r = " << report.horizon
      << (report.stack_rank_consistent() ? " (consistent)" : " (INCONSISTENT)")
      << "\n"
      << "rank(M~_r) = " << report.markov_tilde_rank
      << (report.markov_tilde_rank == report.markov_rank ? " (equal)"
                                                         : " (DIFFERENT)")
      << "\n"
      << "verdict: " << verdict << "\n";
  return kExitOk;
}

std::string profile_row(const PropertyProfile& p) {
  auto yn = [](bool b) { return b ? "  1" : "  0"; };
  std::ostringstream s;
  s << yn(p.state_controllable) << yn(p.state_observable) << yn(p.minimal)
    << yn(p.output_controllable) << yn(p.iso)
    << (p.trackable ? yn(*p.trackable) : "  -") << "  "
    << (p.delay ? std::to_string(*p.delay) : std::string("-"));
  return s.str();
}

int cmd_classify(const Config& cfg, std::ostream& out) {
  const System system = io::load_system(cfg.paths.at(0));
  const auto profile = classify(system, RankTolerance(cfg.tolerance));
  if (cfg.json) {
    out << json(profile).dump(2) << "\n";
    return kExitOk;
  }
  auto yes = [](bool b) { return b ? "yes" : "no"; };
  const auto& r = profile.ranks;
  out << "system: n=" << profile.num_states << ", m=" << profile.num_inputs
      << ", l=" << profile.num_outputs << "\n"
      << "state controllable:  " << yes(profile.state_controllable)
      << " (rank Q_sc = " << r.controllability << ")\n"
      << "state observable:    " << yes(profile.state_observable)
      << " (rank Q_so = " << r.observability << ")\n"
      << "minimal:             " << yes(profile.minimal) << "\n"
      << "output controllable: " << yes(profile.output_controllable)
      << " (rank Q_oc = " << r.output_controllability << ")\n"
      << "ISO:                 " << yes(profile.iso) << " (rank Psi = "
      << r.iso << " of " << r.iso_required << ")\n";
  if (profile.trackable) {
    out << "trackable:           " << yes(*profile.trackable) << " (L="
        << *profile.delay << ", rank C A^(L-1) B = " << *r.first_markov
        << ")\n";
  } else {
    out << "trackable:           undefined (" << kNoCoupling << ")\n";
  }
  out << "rank Phi_(n-1):      " << r.phi << "\n"
      << "region:              "
      << (profile.venn_region ? std::to_string(*profile.venn_region) : "none");
  if (profile.candidate_regions.size() > 1) {
    out << " (candidates:";
    for (int id : profile.candidate_regions) out << ' ' << id;
    out << ")";
  }
  out << "\n";
  return kExitOk;
}

int cmd_index(const Config& cfg, std::ostream& out) {
  const System system = io::load_system(cfg.paths.at(0));
  const RankTolerance tol(cfg.tolerance);
  if (!input_output_delays(system, tol).delay) {
    out << kNoCoupling << "\n";
    return kExitOk;
  }
  const auto reference =
      io::load_reference(cfg.paths.at(1), system.num_outputs());
  const auto parts = decompose(system, reference, tol);
  if (!cfg.out_path.empty()) {
    io::write_file(cfg.out_path, io::format_decomposition(reference, parts));
  }
  if (cfg.json) {
    json j{{"horizon", reference.end_index()},
           {"delay", reference.start_index()},
           {"theta", parts.theta ? json(*parts.theta) : json(nullptr)},
           {"min_error_bound", parts.min_error_norm},
           {"reference_norm", reference.stacked().norm()}};
    out << j.dump(2) << "\n";
    return kExitOk;
  }
  out << "horizon: L=" << reference.start_index()
      << ", r=" << reference.end_index() << "\n"
      << "theta: "
      << (parts.theta ? io::format_number(*parts.theta)
                      : std::string("undefined (zero reference)"))
      << "\n"
      << "min_error_bound: " << io::format_number(parts.min_error_norm) << "\n";
  return kExitOk;
}

int cmd_simulate(const Config& cfg, std::ostream& out) {
  const System system = io::load_system(cfg.paths.at(0));
  const RankTolerance tol(cfg.tolerance);
  if (!input_output_delays(system, tol).delay) {
    out << kNoCoupling << "\n";
    return kExitOk;
  }
  const auto reference =
      io::load_reference(cfg.paths.at(1), system.num_outputs());
  const Vector<double> x0 = cfg.x0.empty()
                                ? system.x0()
                                : parse_x0(cfg.x0, system.num_states());
  const auto run = simulate(system, parse_mode(cfg.mode), reference, x0, tol);
  const std::string csv = io::format_simulation(run);
  if (!cfg.out_path.empty()) io::write_file(cfg.out_path, csv);

  if (cfg.json) {
    out << json{{"mode", to_string(run.mode)},
                {"delay", run.delay},
                {"horizon", run.horizon()},
                {"error_norm", run.error_norm},
                {"reference_error_norm", run.reference_error_norm},
                {"best_effort", run.best_effort}}
               .dump(2)
        << "\n";
  } else if (cfg.out_path.empty()) {
    out << csv;
  } else {
    out << "mode: " << to_string(run.mode) << ", L=" << run.delay
        << ", r=" << run.horizon() << "\n"
        << "error_norm: " << io::format_number(run.error_norm) << "\n"
        << "reference_error_norm: "
        << io::format_number(run.reference_error_norm) << "\n"
        << (run.best_effort ? "best-effort: C A^(L-1) B is not right "
                              "invertible\n"
                            : "");
  }
  return kExitOk;
}

int cmd_corpus(const Config& cfg, std::ostream& out, std::ostream& err) {
  const std::filesystem::path dir = cfg.paths.at(0);
  const RankTolerance tol(cfg.tolerance);
  bool mismatch = false;
  bool failed = false;
  json records = json::array();
  if (!cfg.json) out << " ex  sc  so min  oc iso trk  L  region  status\n";
  for (const auto& expected : kCorpusExpectations) {
    std::ostringstream name;
    name << "example_" << std::setw(2) << std::setfill('0') << expected.id
         << ".json";
    const auto path = dir / name.str();
    std::optional<PropertyProfile> profile;
    try {
      profile = classify(io::load_system(path), tol);
    } catch (const Error& e) {
      err << path.string() << ": " << e.what() << "\n";
      failed = true;
    }
    std::string why;
    const bool ok = profile && matches(*profile, expected, &why);
    mismatch = mismatch || (profile && !ok);
    if (cfg.json) {
      json record{{"id", expected.id}, {"ok", ok}};
      if (profile) record["profile"] = *profile;
      if (!why.empty()) record["mismatch"] = why;
      records.push_back(std::move(record));
      continue;
    }
    out << std::setw(3) << expected.id << " ";
    if (profile) {
      std::string region = "-";
      if (!profile->candidate_regions.empty()) {
        region.clear();
        for (int id : profile->candidate_regions) {
          if (!region.empty()) region += '/';
          region += std::to_string(id);
        }
      }
      out << profile_row(*profile) << "  " << std::setw(6) << region << "  "
          << (ok ? "ok" : "MISMATCH: " + why) << "\n";
    } else {
      out << "  error\n";
    }
  }
  if (cfg.json) out << records.dump(2) << "\n";
  if (failed) return kExitInputError;
  return mismatch ? kExitMismatch : kExitOk;
}

}  // namespace

bool matches(const PropertyProfile& profile,
             const CorpusExpectation& expected, std::string* why) {
  const std::pair<const char*, std::pair<bool, bool>> checks[] = {
      {"state_controllable",
       {profile.state_controllable, expected.state_controllable}},
      {"state_observable",
       {profile.state_observable, expected.state_observable}},
      {"minimal", {profile.minimal, expected.minimal}},
      {"output_controllable",
       {profile.output_controllable, expected.output_controllable}},
      {"iso", {profile.iso, expected.iso}},
      {"trackable", {profile.trackable.value_or(false), expected.trackable}},
  };
  for (const auto& [name, values] : checks) {
    if (values.first != values.second) {
      if (why) *why = std::string(name) + " differs";
      return false;
    }
  }
  if (expected.delay >= 0) {
    const Index want = expected.delay;
    const bool ok = want == 0 ? !profile.delay
                              : (profile.delay && *profile.delay == want);
    if (!ok) {
      if (why) *why = "L differs";
      return false;
    }
  }
  const auto& regions = profile.candidate_regions;
  if (std::find(regions.begin(), regions.end(), expected.id) == regions.end()) {
    if (why) *why = "region differs";
    return false;
  }
  return true;
}

int run_cli(const std::vector<std::string>& args, std::ostream& out,
            std::ostream& err) {
  CLI::App app{"Trackability analysis for discrete-time LTI systems"};
  app.name("trackkit");
  app.require_subcommand(1);
  Config cfg;

  auto add_common = [&cfg](CLI::App* sub) {
    sub->add_option("--tol", cfg.tolerance, "relative rank tolerance")
        ->default_val(RankTolerance::kDefaultEpsilon)
        ->check(CLI::Range(0.0, 1.0));
    sub->add_flag("--json", cfg.json, "emit JSON instead of text");
  };

  auto* analyze = app.add_subcommand("analyze", "trackability verdict");
  analyze->add_option("system", cfg.paths, "system JSON file")
      ->required()
      ->expected(1);
  analyze->add_option("--r", cfg.horizon, "horizon r (default L + n)");
  analyze
      ->add_option("--theta-variant", cfg.theta_variant,
                   "aggregation for Theta")
      ->default_val("linear")
      ->check(CLI::IsMember({"linear", "quadratic"}));
  add_common(analyze);

  auto* classify_cmd =
      app.add_subcommand("classify", "property profile and region");
  classify_cmd->add_option("system", cfg.paths, "system JSON file")
      ->required()
      ->expected(1);
  add_common(classify_cmd);

  auto* index = app.add_subcommand("index", "reference trackability index");
  index->add_option("files", cfg.paths, "system JSON and reference CSV")
      ->required()
      ->expected(2);
  index->add_option("--out", cfg.out_path, "write the decomposition CSV here");
  add_common(index);

  auto* sim = app.add_subcommand("simulate", "inversion-based tracking run");
  sim->add_option("files", cfg.paths, "system JSON and reference CSV")
      ->required()
      ->expected(2);
  sim->add_option("--mode", cfg.mode, "open_loop, closed_loop or projected")
      ->default_val("closed_loop")
      ->check(CLI::IsMember({"open_loop", "closed_loop", "projected"}));
  sim->add_option("--x0", cfg.x0, "initial state \"v1,v2,...\"");
  sim->add_option("--out", cfg.out_path, "write the run CSV here");
  add_common(sim);

  auto* corpus = app.add_subcommand("corpus", "classify example_NN.json files");
  corpus->add_option("dir", cfg.paths, "directory of example files")
      ->required()
      ->expected(1);
  add_common(corpus);

  std::vector<std::string> argv_storage;
  argv_storage.reserve(args.size() + 1);
  argv_storage.emplace_back("trackkit");
  argv_storage.insert(argv_storage.end(), args.begin(), args.end());
  std::vector<const char*> argv;
  for (const auto& a : argv_storage) argv.push_back(a.c_str());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitInputError;
  }

  try {
    if (*analyze) return cmd_analyze(cfg, out);
    if (*classify_cmd) return cmd_classify(cfg, out);
    if (*index) return cmd_index(cfg, out);
    if (*sim) return cmd_simulate(cfg, out);
    if (*corpus) return cmd_corpus(cfg, out, err);
  } catch (const NoInputOutputCoupling& e) {
    out << e.what() << "\n";
    return kExitOk;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitInputError;
  }
  return kExitInputError;
}

}  // namespace trackkit
