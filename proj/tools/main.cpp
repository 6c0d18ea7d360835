// SPDX-License-Identifier: Apache-2.0
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#include "risd2d/errors.hpp"
#include "risd2d/harness.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

using namespace risd2d;

namespace {

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string item; std::getline(in, item, ',');) {
    const auto a = item.find_first_not_of(" \t");
    const auto b = item.find_last_not_of(" \t");
    if (a != std::string::npos) out.push_back(item.substr(a, b - a + 1));
  }
  return out;
}

std::vector<double> parse_values(const std::string& text) {
  std::vector<double> out;
  for (const auto& item : split_list(text)) {
    std::size_t used = 0;
    const double v = std::stod(item, &used);
    if (used != item.size()) throw ConfigError("bad axis value '" + item + "'");
    out.push_back(v);
  }
  return out;
}

// Lines keyed "sweep.<name>" configure the sweep; the rest is the system
// config.
struct ConfigFile {
  std::string system;
  std::map<std::string, std::string> sweep;
};

ConfigFile read_config_file(const std::string& path) {
  ConfigFile out;
  if (path.empty()) return out;
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path);
  std::string line;
  while (std::getline(in, line)) {
    std::string body = line.substr(0, line.find('#'));
    const auto eq = body.find('=');
    if (eq != std::string::npos) {
      std::string key = body.substr(0, eq);
      key.erase(0, key.find_first_not_of(" \t"));
      key.erase(key.find_last_not_of(" \t") + 1);
      if (key.rfind("sweep.", 0) == 0) {
        std::string value = body.substr(eq + 1);
        value.erase(0, value.find_first_not_of(" \t"));
        value.erase(value.find_last_not_of(" \t\r") + 1);
        out.sweep[key.substr(6)] = value;
        continue;
      }
    }
    out.system += line + '\n';
  }
  return out;
}

SystemConfig system_config(const ConfigFile& file, int bits) {
  SystemConfig cfg = parse_config(file.system, default_topology());
  if (bits > 0) {
    cfg.phase_bits = bits;
    cfg.validate();
  }
  return cfg;
}

void write_text(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  out << text;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"RIS-assisted D2D underlay optimizer: SE/EE solves, Monte Carlo sweeps, RIS power table"};
  app.require_subcommand(1);

  std::string config_path;
  std::uint64_t seed = 1;
  std::string metric = "se";
  std::string feasible_set = "f1";
  int bits = 0;
  std::string out_path;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "System config file (key = value, units required on powers)");
    sub->add_option("--seed", seed, "Master seed");
    sub->add_option("--metric", metric, "se or ee");
    sub->add_option("--feasible-set", feasible_set, "f1, f2 or f3")->check(CLI::IsMember({"f1", "f2", "f3"}));
    sub->add_option("--bits", bits, "Phase bits B (overrides the config)");
    sub->add_option("--out", out_path, "Output file (default stdout)");
  };

  CLI::App* solve = app.add_subcommand("solve", "Solve one channel draw and print the report as JSON");
  add_common(solve);
  std::string scheme = "proposed";
  std::string trace_path;
  solve->add_option("--scheme", scheme, "proposed, no_ris, random_phase or ideal_pairing");
  solve->add_option("--trace-out", trace_path, "Write the objective trace as iteration,objective CSV");

  CLI::App* sweep = app.add_subcommand("sweep", "Monte Carlo sweep over one axis");
  add_common(sweep);
  int realizations = 0;
  std::string axis, values, schemes, format = "csv";
  int threads = 0;
  sweep->add_option("--realizations", realizations, "Draws per axis value (default 200)");
  sweep->add_option("--axis", axis, "p_max, m, b, r_min_cu, rician_factor or k");
  sweep->add_option("--values", values, "Comma-separated axis values");
  sweep->add_option("--schemes", schemes, "Comma-separated schemes (default proposed)");
  sweep->add_option("--format", format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
  sweep->add_option("--threads", threads, "Worker threads (default: hardware concurrency)");

  CLI::App* table2 = app.add_subcommand("table2", "Print per-element RIS power (mW) for M in {200,500,1000}, B in 1..10");
  table2->add_option("--config", config_path, "System config file");
  table2->add_option("--out", out_path, "Output file (default stdout)");

  CLI11_PARSE(app, argc, argv);

  try {
    const ConfigFile file = read_config_file(config_path);

    if (*table2) {
      const SystemConfig cfg = system_config(file, 0);
      std::ostringstream out;
      out << "m,b,per_element_mw\n";
      for (int m : {200, 500, 1000}) {
        for (int b = 1; b <= 10; ++b) {
          RisPowerModel model = ris_power_model(cfg);
          model.elements = m;
          model.bits = b;
          char buf[64];
          std::snprintf(buf, sizeof buf, "%d,%d,%.9g\n", m, b, ris_power(model) / m * 1e3);
          out << buf;
        }
      }
      write_text(out_path, out.str());
      return 0;
    }

    if (*solve) {
      const SystemConfig cfg = system_config(file, bits);
      Rng rng = draw_rng(seed, 0);
      const ChannelRealization ch = draw_realization(cfg, rng);
      SolverSettings settings;
      settings.init_seed = draw_init_seed(seed, 0);
      const SolveReport report =
          run_scheme(parse_scheme(scheme), ch, cfg, parse_metric(metric), parse_feasible_set(feasible_set), settings);
      write_text(out_path, report_json(report));
      if (!trace_path.empty()) {
        std::ostringstream t;
        t << "iteration,objective\n";
        for (std::size_t i = 0; i < report.trace.size(); ++i) {
          char buf[64];
          std::snprintf(buf, sizeof buf, "%zu,%.9g\n", i, report.trace[i]);
          t << buf;
        }
        write_text(trace_path, t.str());
      }
      return report.feasible ? 0 : 2;
    }

    // sweep: flags override sweep.* keys from the config file.
    auto pick = [&](const std::string& flag, const char* key) {
      if (!flag.empty()) return flag;
      const auto it = file.sweep.find(key);
      return it == file.sweep.end() ? std::string() : it->second;
    };
    for (const auto& [key, value] : file.sweep) {
      static const char* known[] = {"axis", "values", "schemes", "metric", "realizations", "feasible_set"};
      if (std::find(std::begin(known), std::end(known), key) == std::end(known))
        throw ConfigError("unknown sweep key 'sweep." + key + "'");
    }
    SweepSpec spec;
    spec.base = system_config(file, bits);
    const std::string axis_text = pick(axis, "axis");
    if (axis_text.empty()) throw ConfigError("sweep needs --axis");
    spec.axis = parse_axis(axis_text);
    spec.values = parse_values(pick(values, "values"));
    const std::string scheme_text = pick(schemes, "schemes");
    if (!scheme_text.empty()) {
      spec.schemes.clear();
      for (const auto& s : split_list(scheme_text)) spec.schemes.push_back(parse_scheme(s));
    }
    const bool metric_given = sweep->count("--metric") > 0;
    spec.metric = parse_metric(metric_given ? metric : (file.sweep.count("metric") ? file.sweep.at("metric") : metric));
    const bool set_given = sweep->count("--feasible-set") > 0;
    spec.feasible_set = parse_feasible_set(
        set_given ? feasible_set : (file.sweep.count("feasible_set") ? file.sweep.at("feasible_set") : feasible_set));
    spec.realizations = realizations > 0 ? realizations
                        : file.sweep.count("realizations") ? std::stoi(file.sweep.at("realizations"))
                                                           : 200;
    spec.seed = seed;
    spec.threads = threads;

    auto flush = [&](const std::vector<ResultRow>& rows) {
      if (!out_path.empty() && out_path != "-") emit_results(rows, format, out_path);
    };
    const std::vector<ResultRow> rows = run_sweep(spec, &std::cerr, flush);
    if (out_path.empty() || out_path == "-") std::cout << (format == "csv" ? to_csv(rows) : to_json(rows));
    return sweep_exit_code(rows);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
