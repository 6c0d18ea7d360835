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

#include "risd2d/harness.hpp"

#include "risd2d/errors.hpp"

#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <mutex>
#include <ostream>
#include <sstream>
#include <thread>

namespace risd2d {

const char* to_string(Scheme scheme) {
  switch (scheme) {
    case Scheme::Proposed:
      return "proposed";
    case Scheme::NoRis:
      return "no_ris";
    case Scheme::RandomPhase:
      return "random_phase";
    case Scheme::IdealPairing:
      return "ideal_pairing";
  }
  return "?";
}

const char* to_string(Metric metric) { return metric == Metric::SE ? "se" : "ee"; }

const char* to_string(Axis axis) {
  switch (axis) {
    case Axis::PMax:
      return "p_max";
    case Axis::M:
      return "m";
    case Axis::B:
      return "b";
    case Axis::RMinCu:
      return "r_min_cu";
    case Axis::Rician:
      return "rician_factor";
    case Axis::K:
      return "k";
  }
  return "?";
}

Scheme parse_scheme(const std::string& text) {
  for (Scheme s : {Scheme::Proposed, Scheme::NoRis, Scheme::RandomPhase, Scheme::IdealPairing}) {
    if (text == to_string(s)) return s;
  }
  throw std::invalid_argument("unknown scheme '" + text + "'");
}

Metric parse_metric(const std::string& text) {
  if (text == "se" || text == "SE") return Metric::SE;
  if (text == "ee" || text == "EE") return Metric::EE;
  throw std::invalid_argument("unknown metric '" + text + "' (expected se or ee)");
}

Axis parse_axis(const std::string& text) {
  for (Axis a : {Axis::PMax, Axis::M, Axis::B, Axis::RMinCu, Axis::Rician, Axis::K}) {
    if (text == to_string(a)) return a;
  }
  throw std::invalid_argument("unknown axis '" + text + "'");
}

namespace {

int as_count(Axis axis, double value) {
  if (value != std::floor(value) || value < 1.0)
    throw ConfigError(std::string("axis ") + to_string(axis) + " needs positive integers");
  return static_cast<int>(value);
}

}  // namespace

SystemConfig apply_axis(const SystemConfig& cfg, Axis axis, double value) {
  SystemConfig out = cfg;
  switch (axis) {
    case Axis::PMax:
      out.p_max_d2d = out.p_max_cu = dbm_to_watt(value);
      break;
    case Axis::M:
      out.ris_elements = as_count(axis, value);
      break;
    case Axis::B:
      out.phase_bits = as_count(axis, value);
      break;
    case Axis::RMinCu:
      out.gamma_min_cu = rate_to_sinr(value);
      break;
    case Axis::Rician:
      out.rician_tx_ris = out.rician_cu_ris = out.rician_ris_rx = out.rician_ris_bs = value;
      break;
    case Axis::K:
      set_cu_count(out, as_count(axis, value));
      break;
  }
  out.validate();
  return out;
}

// ---------------------------------------------------------------------------
// Schemes
// ---------------------------------------------------------------------------

namespace {

struct SchemeRun {
  const ChannelRealization& ch;
  const SystemConfig& cfg;
  Metric metric;
  FeasibleSet set;
  const SolverSettings& settings;
  double ris_watts;
  bool optimize_theta;
  CVec fixed_theta;  // start θ when optimize_theta is false

  SolveReport operator()(const Pairing& pairing) const {
    AlternatingHooks hooks = se_hooks(pairing, ch, cfg, settings);
    if (metric == Metric::EE) {
      const double watts = ris_watts;
      hooks.objective = [&pairing, this, watts](const Allocation& a) { return ee_value(a, pairing, ch, cfg, watts); };
      hooks.power_step = [&pairing, this, watts](const Allocation& a) {
        return dinkelbach_power_step(a, pairing, ch, cfg, watts, settings);
      };
    }
    Allocation start = initial_allocation(pairing, ch, cfg, settings);
    if (!optimize_theta) start.theta = fixed_theta;
    return alternate(start, pairing, ch, cfg, set, optimize_theta, hooks, settings);
  }
};

SolveReport with_fallback(const SchemeRun& run, const Pairing& first) {
  SolveReport report = run(first);
  if (report.feasible) return report;
  const ChannelRealization& ch = run.ch;
  for (const Pairing& p : enumerate_pairings(ch.num_d2d(), ch.num_cu())) {
    if (p == first) continue;
    SolveReport alt = run(p);
    if (alt.feasible) {
      alt.note = "RCS pairing infeasible; first feasible pairing in lexicographic order";
      return alt;
    }
  }
  return report;
}

}  // namespace

SolveReport run_scheme(Scheme scheme, const ChannelRealization& ch, const SystemConfig& cfg, Metric metric,
                       FeasibleSet set, const SolverSettings& settings) {
  const double ris_watts = metric == Metric::EE ? ris_power(ris_power_model(cfg)) : 0.0;
  switch (scheme) {
    case Scheme::Proposed: {
      const SchemeRun run{ch, cfg, metric, set, settings, ris_watts, true, {}};
      return with_fallback(run, rcs_pairing(ch));
    }
    case Scheme::NoRis: {
      const ChannelRealization bare = ch.without_ris();
      const SchemeRun run{bare, cfg, metric, FeasibleSet::F1, settings, 0.0, false,
                          CVec::Zero(ch.ris_elements())};
      SolveReport report = with_fallback(run, rcs_pairing(bare));
      report.feasible_set = set;
      return report;
    }
    case Scheme::RandomPhase: {
      // A stream apart from the one that seeds the proposed scheme's start.
      Rng rng(settings.init_seed ^ 0x9e3779b97f4a7c15ULL);
      const int bits = set == FeasibleSet::F3 ? cfg.phase_bits : 0;
      const SchemeRun run{ch, cfg, metric, set, settings, ris_watts, false, random_phases(ch.ris_elements(), rng, bits)};
      return with_fallback(run, rcs_pairing(ch));
    }
    case Scheme::IdealPairing: {
      const SchemeRun run{ch, cfg, metric, set, settings, ris_watts, true, {}};
      SolveReport best;
      bool have = false;
      for (const Pairing& p : enumerate_pairings(ch.num_d2d(), ch.num_cu())) {
        SolveReport r = run(p);
        if (!have || (r.feasible && (!best.feasible || r.objective > best.objective))) {
          best = std::move(r);
          have = true;
        }
      }
      return best;
    }
  }
  throw std::invalid_argument("run_scheme: unknown scheme");
}

// ---------------------------------------------------------------------------
// Sweeps
// ---------------------------------------------------------------------------

void SweepSpec::validate() const {
  if (values.empty()) throw ConfigError("sweep needs at least one axis value");
  if (realizations < 1) throw ConfigError("sweep needs at least one realization");
  if (schemes.empty()) throw ConfigError("sweep needs at least one scheme");
  for (double v : values) {
    const SystemConfig cfg = apply_axis(base, axis, v);
    for (Scheme s : schemes) {
      if (s == Scheme::IdealPairing && pairing_count(cfg.num_d2d(), cfg.num_cu(), pairing_cap) > pairing_cap)
        throw SizeError("ideal_pairing needs more than the enumeration cap of pairings");
    }
  }
}

Rng draw_rng(std::uint64_t seed, int draw) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(draw)};
  return Rng(seq);
}

std::uint64_t draw_init_seed(std::uint64_t seed, int draw) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(draw), 1u};
  std::uint32_t out[2];
  seq.generate(out, out + 2);
  return (static_cast<std::uint64_t>(out[0]) << 32) | out[1];
}

namespace {

struct DrawResult {
  bool feasible = false;
  double metric = 0.0;
  int iterations = 0;
};

}  // namespace

std::vector<ResultRow> run_sweep(const SweepSpec& spec, std::ostream* log,
                                 const std::function<void(const std::vector<ResultRow>&)>& on_value) {
  spec.validate();
  const std::size_t n_schemes = spec.schemes.size();
  int threads = spec.threads > 0 ? spec.threads : static_cast<int>(std::thread::hardware_concurrency());
  threads = std::max(1, std::min(threads, spec.realizations));

  std::vector<ResultRow> rows;
  std::mutex log_mutex;
  for (double value : spec.values) {
    const SystemConfig cfg = apply_axis(spec.base, spec.axis, value);
    std::vector<std::vector<DrawResult>> results(spec.realizations, std::vector<DrawResult>(n_schemes));
    std::atomic<int> next{0};

    auto worker = [&]() {
      for (int r = next++; r < spec.realizations; r = next++) {
        Rng rng = draw_rng(spec.seed, r);
        const ChannelRealization ch = draw_realization(cfg, rng);
        SolverSettings settings = spec.settings;
        settings.init_seed = draw_init_seed(spec.seed, r);
        for (std::size_t s = 0; s < n_schemes; ++s) {
          try {
            const SolveReport rep = run_scheme(spec.schemes[s], ch, cfg, spec.metric, spec.feasible_set, settings);
            results[r][s] = {rep.feasible, rep.objective, rep.iterations};
          } catch (const std::exception& e) {
            if (log) {
              std::lock_guard<std::mutex> lock(log_mutex);
              *log << "draw " << r << " (seed " << spec.seed << ", " << to_string(spec.axis) << " = " << value
                   << ", " << to_string(spec.schemes[s]) << ") failed: " << e.what() << '\n';
            }
          }
        }
      }
    };
    std::vector<std::thread> pool;
    for (int t = 1; t < threads; ++t) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();

    for (std::size_t s = 0; s < n_schemes; ++s) {
      double sum = 0.0, iters = 0.0;
      int feasible = 0;
      for (int r = 0; r < spec.realizations; ++r) {
        if (!results[r][s].feasible) continue;
        sum += results[r][s].metric;
        iters += results[r][s].iterations;
        ++feasible;
      }
      ResultRow row;
      row.scheme = to_string(spec.schemes[s]);
      row.axis = to_string(spec.axis);
      row.axis_value = value;
      row.metric = to_string(spec.metric);
      row.realizations = spec.realizations;
      row.seed = spec.seed;
      row.feasibility_rate = static_cast<double>(feasible) / spec.realizations;
      if (feasible == 0) {
        row.mean = std::numeric_limits<double>::quiet_NaN();
        row.stderr_ = std::numeric_limits<double>::quiet_NaN();
      } else {
        row.mean = sum / feasible;
        row.mean_iterations = iters / feasible;
        double ss = 0.0;
        for (int r = 0; r < spec.realizations; ++r) {
          if (results[r][s].feasible) ss += std::pow(results[r][s].metric - row.mean, 2);
        }
        row.stderr_ = feasible > 1 ? std::sqrt(ss / (feasible - 1) / feasible) : 0.0;
      }
      rows.push_back(row);
    }
    if (on_value) on_value(rows);
  }
  return rows;
}

// ---------------------------------------------------------------------------
// Serialization
// ---------------------------------------------------------------------------

namespace {

constexpr const char* kHeader =
    "scheme,axis,axis_value,metric,mean,stderr,feasibility_rate,mean_iterations,realizations,seed";

std::string fmt9(double v) {
  if (std::isnan(v)) return "nan";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

double round9(double v) { return std::isnan(v) ? v : std::strtod(fmt9(v).c_str(), nullptr); }

double parse_double(const std::string& s) {
  if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
  std::size_t used = 0;
  const double v = std::stod(s, &used);
  if (used != s.size()) throw std::invalid_argument("bad number '" + s + "'");
  return v;
}

nlohmann::json json_number(double v) { return std::isnan(v) ? nlohmann::json(nullptr) : nlohmann::json(round9(v)); }

double json_double(const nlohmann::json& j) {
  return j.is_null() ? std::numeric_limits<double>::quiet_NaN() : j.get<double>();
}

}  // namespace

std::string to_csv(const std::vector<ResultRow>& rows) {
  std::ostringstream out;
  out << kHeader << '\n';
  for (const auto& r : rows) {
    out << r.scheme << ',' << r.axis << ',' << fmt9(r.axis_value) << ',' << r.metric << ',' << fmt9(r.mean) << ','
        << fmt9(r.stderr_) << ',' << fmt9(r.feasibility_rate) << ',' << fmt9(r.mean_iterations) << ','
        << r.realizations << ',' << r.seed << '\n';
  }
  return out.str();
}

std::vector<ResultRow> parse_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line != kHeader) throw std::invalid_argument("CSV header does not match the schema");
  std::vector<ResultRow> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::istringstream ls(line);
    for (std::string cell; std::getline(ls, cell, ',');) f.push_back(cell);
    if (f.size() != 10) throw std::invalid_argument("CSV row needs 10 fields: " + line);
    ResultRow r;
    r.scheme = f[0];
    r.axis = f[1];
    r.axis_value = parse_double(f[2]);
    r.metric = f[3];
    r.mean = parse_double(f[4]);
    r.stderr_ = parse_double(f[5]);
    r.feasibility_rate = parse_double(f[6]);
    r.mean_iterations = parse_double(f[7]);
    r.realizations = std::stoi(f[8]);
    r.seed = std::stoull(f[9]);
    rows.push_back(r);
  }
  return rows;
}

std::string to_json(const std::vector<ResultRow>& rows) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& r : rows) {
    arr.push_back({{"scheme", r.scheme},
                   {"axis", r.axis},
                   {"axis_value", json_number(r.axis_value)},
                   {"metric", r.metric},
                   {"mean", json_number(r.mean)},
                   {"stderr", json_number(r.stderr_)},
                   {"feasibility_rate", json_number(r.feasibility_rate)},
                   {"mean_iterations", json_number(r.mean_iterations)},
                   {"realizations", r.realizations},
                   {"seed", r.seed}});
  }
  return arr.dump(2) + "\n";
}

std::vector<ResultRow> parse_json(const std::string& text) {
  const nlohmann::json arr = nlohmann::json::parse(text);
  std::vector<ResultRow> rows;
  for (const auto& j : arr) {
    ResultRow r;
    r.scheme = j.at("scheme").get<std::string>();
    r.axis = j.at("axis").get<std::string>();
    r.axis_value = json_double(j.at("axis_value"));
    r.metric = j.at("metric").get<std::string>();
    r.mean = json_double(j.at("mean"));
    r.stderr_ = json_double(j.at("stderr"));
    r.feasibility_rate = json_double(j.at("feasibility_rate"));
    r.mean_iterations = json_double(j.at("mean_iterations"));
    r.realizations = j.at("realizations").get<int>();
    r.seed = j.at("seed").get<std::uint64_t>();
    rows.push_back(r);
  }
  return rows;
}

void emit_results(const std::vector<ResultRow>& rows, const std::string& format, const std::filesystem::path& path) {
  if (rows.empty()) throw std::invalid_argument("emit_results: no rows");
  std::string body;
  if (format == "csv") body = to_csv(rows);
  else if (format == "json") body = to_json(rows);
  else throw std::invalid_argument("emit_results: unknown format '" + format + "' (expected csv or json)");
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  out << body;
  out.close();
  if (!out) throw std::runtime_error("write to " + path.string() + " failed");
}

int sweep_exit_code(const std::vector<ResultRow>& rows) {
  std::vector<std::pair<double, bool>> seen;  // axis value, any feasible
  for (const auto& r : rows) {
    auto it = std::find_if(seen.begin(), seen.end(), [&](const auto& e) { return e.first == r.axis_value; });
    if (it == seen.end()) seen.emplace_back(r.axis_value, r.feasibility_rate > 0.0);
    else it->second = it->second || r.feasibility_rate > 0.0;
  }
  for (const auto& e : seen) {
    if (!e.second) return 2;
  }
  return 0;
}

std::string report_json(const SolveReport& report) {
  nlohmann::json j;
  j["feasible"] = report.feasible;
  j["feasible_set"] = to_string(report.feasible_set);
  j["objective"] = report.objective;
  j["sum_rate"] = report.sum_rate;
  j["iterations"] = report.iterations;
  j["trace"] = report.trace;
  j["pairing"] = report.pairing.cu_of_d2d();
  j["init_seed"] = report.init_seed;
  j["wall_seconds"] = report.wall_seconds;
  j["note"] = report.note;
  const RVec& p = report.allocation.p;
  j["power_w"] = std::vector<double>(p.data(), p.data() + p.size());
  std::vector<double> amp, phase;
  for (Eigen::Index m = 0; m < report.allocation.theta.size(); ++m) {
    amp.push_back(std::abs(report.allocation.theta[m]));
    phase.push_back(std::arg(report.allocation.theta[m]));
  }
  j["theta_amplitude"] = amp;
  j["theta_phase"] = phase;
  return j.dump(2) + "\n";
}

}  // namespace risd2d
