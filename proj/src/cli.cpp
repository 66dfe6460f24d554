// Copyright 2026 The gerry Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "gerry/cli.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"

#include "gerry/analysis.hpp"
#include "gerry/config.hpp"
#include "gerry/csv.hpp"
#include "gerry/elections.hpp"
#include "gerry/ensemble_io.hpp"
#include "gerry/errors.hpp"
#include "gerry/geography.hpp"
#include "gerry/oracle.hpp"
#include "gerry/sampler.hpp"

namespace gerry::cli {

namespace {

using ordered_json = nlohmann::ordered_json;
namespace fs = std::filesystem;

struct GlobalOptions {
  std::string config;
  std::vector<std::string> sets;
  std::optional<std::uint64_t> seed;
  std::optional<int> workers;
  std::optional<std::string> out;
};

std::pair<int, int> parse_dims(const std::string& text) {
  const auto x = text.find('x');
  if (x == std::string::npos) throw ParseError("expected WxH, got '" + text + "'");
  int w = 0;
  int h = 0;
  const auto a = std::from_chars(text.data(), text.data() + x, w);
  const auto b = std::from_chars(text.data() + x + 1, text.data() + text.size(), h);
  if (a.ec != std::errc() || a.ptr != text.data() + x || b.ec != std::errc() || b.ptr != text.data() + text.size()) {
    throw ParseError("expected WxH, got '" + text + "'");
  }
  return {w, h};
}

std::vector<std::string> split_list(const std::vector<std::string>& items) {
  std::vector<std::string> out;
  for (const auto& item : items) {
    std::stringstream ss(item);
    std::string part;
    while (std::getline(ss, part, ',')) {
      if (!part.empty()) out.push_back(part);
    }
  }
  return out;
}

double parse_real(const std::string& text) {
  double v = 0.0;
  const auto r = std::from_chars(text.data(), text.data() + text.size(), v);
  if (r.ec != std::errc() || r.ptr != text.data() + text.size()) throw ParseError("not a number: '" + text + "'");
  return v;
}

RunConfig build_config(const GlobalOptions& opts) {
  RunConfig c = opts.config.empty() ? RunConfig{} : load_config(opts.config);
  for (const auto& kv : opts.sets) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw ParseError("--set expects key=value, got '" + kv + "'");
    c.set(kv.substr(0, eq), kv.substr(eq + 1));
  }
  if (opts.seed) c.seed = *opts.seed;
  if (opts.workers) c.workers = *opts.workers;
  if (opts.out) c.out = *opts.out;
  c.validate();
  return c;
}

void require_file(const fs::path& p, const std::string& key) {
  if (p.empty()) throw ValidationError("config key '" + key + "' is not set");
  if (!fs::exists(p)) throw ValidationError(key + " file does not exist: " + p.string());
}

LoadedGeography load_configured_geography(const RunConfig& c) {
  require_file(c.wards, "wards");
  require_file(c.adjacency, "adjacency");
  return load_geography(c.wards, c.adjacency, c.districts);
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) throw std::runtime_error("cannot create output directory " + dir.string());
}

// synth

struct SynthArgs {
  std::string grid;
  int districts = 4;
  std::string population = "uniform";
  SyntheticSpec spec;
};

int cmd_synth(const GlobalOptions& g, const SynthArgs& a, std::ostream& out) {
  SyntheticSpec spec = a.spec;
  std::tie(spec.width, spec.height) = parse_dims(a.grid);
  spec.k = a.districts;
  spec.seed = g.seed.value_or(1);
  if (a.population == "uniform") {
    spec.population = PopulationField::uniform;
  } else if (a.population == "urban") {
    spec.population = PopulationField::urban_cluster;
  } else {
    throw ParseError("--population must be uniform or urban");
  }
  const SyntheticInstance inst = synth_geography(spec);
  const fs::path dir = g.out.value_or(".");
  ensure_dir(dir);
  write_wards_csv(dir / "wards.csv", inst.geography, &inst.reference_plan);
  write_adjacency_csv(dir / "adjacency.csv", inst.geography);
  write_votes_csv(dir / "votes.csv", inst.geography, inst.elections);
  out << "wrote " << inst.geography.num_wards() << " wards, " << inst.geography.num_edges() << " edges, "
      << inst.elections.size() << " elections to " << dir.string() << "\n";
  return kOk;
}

// sample

int cmd_sample(const GlobalOptions& opts, std::ostream& out, std::ostream& err) {
  const RunConfig c = build_config(opts);
  const LoadedGeography lg = load_configured_geography(c);
  const Geography& g = lg.geography;

  FilterCriteria crit;
  crit.max_pop_deviation = c.max_pop_deviation;
  crit.vra = c.vra;
  if (c.max_compactness == "ref") {
    if (!lg.reference_plan) throw ValidationError("max_compactness = ref needs a ref_district column");
    crit.max_compactness = score_compactness(g, *lg.reference_plan);
  } else if (c.max_compactness != "none") {
    crit.max_compactness = parse_real(c.max_compactness);
  }

  EnsembleOptions eo;
  eo.max_attempts = c.max_attempts;
  eo.workers = c.workers;
  eo.chain.stall_cap = c.stall_cap;
  const std::size_t every = std::max<std::size_t>(1, c.ensemble_size / 20);
  std::size_t reported = 0;
  eo.progress = [&err, &reported, every, n = c.ensemble_size](std::size_t accepted, std::uint64_t attempts) {
    if (accepted != reported && (accepted % every == 0 || accepted == n)) {
      reported = accepted;
      err << "sampled " << accepted << "/" << n << " plans (" << attempts << " runs)\n";
    }
  };

  Ensemble ens;
  try {
    ens = generate_ensemble(g, c.weights, c.schedule, crit, c.ensemble_size, c.seed, eo);
  } catch (const BudgetExhaustedError& e) {
    err << "error: " << e.what() << "\n";
    for (const auto& [reason, count] : e.failures()) err << "  " << reason << ": " << count << "\n";
    return kValidationFailure;
  }

  ensure_dir(c.out);
  const fs::path ensemble_path = c.ensemble.empty() ? c.out / "ensemble.jsonl" : c.ensemble;
  write_ensemble_jsonl(ensemble_path, ens);
  write_ensemble_summary(c.out / "ensemble_summary.json", ens);
  write_ward_index_csv(c.out / "ward_index.csv", g);
  out << "sampled " << ens.size() << " plans in " << ens.attempts << " runs; wrote " << ensemble_path.string()
      << "\n";
  return kOk;
}

// interpolate

struct InterpolateArgs {
  std::string target;
  std::vector<std::string> candidates;
  std::size_t max_size = 3;
};

const Election& find_election(const std::vector<Election>& elections, const std::string& id) {
  for (const auto& e : elections) {
    if (e.id() == id) return e;
  }
  throw ValidationError("election " + id + " not found in the votes file");
}

int cmd_interpolate(const GlobalOptions& opts, const InterpolateArgs& a, std::ostream& out, std::ostream& err) {
  const RunConfig c = build_config(opts);
  const LoadedGeography lg = load_configured_geography(c);
  require_file(c.votes, "votes");
  const auto elections = load_votes(c.votes, lg.geography);
  const Election& target = find_election(elections, a.target);
  const auto ids = split_list(a.candidates);

  ordered_json report;
  report["target"] = target.id();
  report["candidates"] = ids;
  report["max_size"] = a.max_size;
  ensure_dir(c.out);
  const fs::path csv_path = c.out / ("interpolated_" + target.id() + ".csv");
  const fs::path report_path = c.out / ("interpolation_report_" + target.id() + ".json");

  if (target.fully_opposed()) {
    err << "notice: election " << target.id() << " is fully opposed; output is unchanged\n";
    write_interpolated_csv(csv_path, lg.geography, target, std::vector<bool>(target.num_wards(), false));
    report["chosen"] = ordered_json::array();
    report["squared_error"] = nullptr;
    report["interpolated_wards"] = 0;
    report["notice"] = "fully opposed; nothing to interpolate";
    write_text(report_path, report.dump(2) + "\n");
    return kOk;
  }
  if (ids.empty()) throw ValidationError("no candidate reference elections given");

  std::vector<ReferenceElection> candidates;
  for (const auto& id : ids) {
    if (id == target.id()) throw ValidationError("target " + id + " cannot be its own reference");
    candidates.emplace_back(find_election(elections, id));
  }
  const ReferenceSelection sel = select_reference_set(target, candidates, a.max_size);
  std::vector<ReferenceElection> chosen;
  for (std::size_t i : sel.indices) chosen.push_back(candidates[i]);
  const InterpolationResult result = interpolate_election(target, chosen);
  write_interpolated_csv(csv_path, lg.geography, result.election, result.interpolated);

  report["chosen"] = sel.ids;
  report["squared_error"] = sel.squared_error;
  report["interpolated_wards"] = std::count(result.interpolated.begin(), result.interpolated.end(), true);
  write_text(report_path, report.dump(2) + "\n");
  out << "interpolated " << report["interpolated_wards"].get<long>() << " wards of " << target.id()
      << " from {";
  for (std::size_t i = 0; i < sel.ids.size(); ++i) out << (i ? "," : "") << sel.ids[i];
  out << "}; held-out squared error " << csv::format_double(sel.squared_error) << "\n";
  return kOk;
}

// analyze

struct AnalyzeArgs {
  std::string which;
  std::string plan;
  std::vector<std::string> elections;
  double range = 10.0;
  double step = 0.5;
  std::vector<std::string> shifts;
};

Plan read_plan_csv(const fs::path& path, const Geography& g) {
  const csv::Table t = csv::read_file(path);
  const std::size_t c_ward = t.column("ward_id");
  const std::size_t c_district = t.column("district");
  std::vector<std::string> label(g.num_wards());
  std::vector<bool> seen(g.num_wards(), false);
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    const auto w = g.find_ward(t.rows[r][c_ward]);
    if (!w) throw ValidationError(path.string() + ": unknown ward " + t.rows[r][c_ward]);
    if (seen[static_cast<std::size_t>(*w)]) throw ValidationError(path.string() + ": ward listed twice: " + t.rows[r][c_ward]);
    seen[static_cast<std::size_t>(*w)] = true;
    label[static_cast<std::size_t>(*w)] = t.rows[r][c_district];
  }
  if (std::find(seen.begin(), seen.end(), false) != seen.end()) {
    throw ValidationError(path.string() + ": plan does not assign every ward");
  }
  std::vector<std::string> labels = label;
  std::sort(labels.begin(), labels.end());
  labels.erase(std::unique(labels.begin(), labels.end()), labels.end());
  const bool numeric = std::all_of(labels.begin(), labels.end(), [](const std::string& s) {
    long long v = 0;
    const auto r = std::from_chars(s.data(), s.data() + s.size(), v);
    return r.ec == std::errc() && r.ptr == s.data() + s.size();
  });
  if (numeric) {
    std::sort(labels.begin(), labels.end(), [](const std::string& a, const std::string& b) {
      return std::stoll(a) < std::stoll(b);
    });
  }
  if (static_cast<int>(labels.size()) != g.num_districts()) {
    throw ValidationError(path.string() + ": plan uses " + std::to_string(labels.size()) + " districts, expected " +
                          std::to_string(g.num_districts()));
  }
  Plan p;
  for (const auto& l : label) {
    p.assignment.push_back(static_cast<DistrictId>(std::find(labels.begin(), labels.end(), l) - labels.begin()));
  }
  validate_plan(g, p);
  return p;
}

std::optional<Plan> resolve_plan(const std::string& source, const LoadedGeography& lg, const Ensemble& ens) {
  if (source.empty()) return lg.reference_plan;
  if (source == "ref") {
    if (!lg.reference_plan) throw ValidationError("--plan ref needs a ref_district column in the wards file");
    return lg.reference_plan;
  }
  if (source.rfind("ensemble:", 0) == 0) {
    const auto id = static_cast<std::size_t>(std::stoull(source.substr(9)));
    if (id >= ens.size()) throw ValidationError("ensemble has no plan " + std::to_string(id));
    return ens.plans[id];
  }
  return read_plan_csv(source, lg.geography);
}

std::string fmt(double v) { return csv::format_double(v); }

int cmd_analyze(const GlobalOptions& opts, const AnalyzeArgs& a, std::ostream& out) {
  const RunConfig c = build_config(opts);
  const LoadedGeography lg = load_configured_geography(c);
  const Geography& g = lg.geography;
  require_file(c.votes, "votes");
  const auto elections = load_votes(c.votes, g);
  require_file(c.ensemble_path(), "ensemble");
  const Ensemble ens = read_ensemble_jsonl(c.ensemble_path(), g);
  if (ens.size() == 0) throw ValidationError("ensemble is empty");

  const bool needs_plan = a.which == "indices";
  const std::optional<Plan> plan = resolve_plan(a.plan, lg, ens);
  if (needs_plan && !plan) throw ValidationError("indices need a plan: --plan ref|ensemble:ID|FILE");

  std::vector<std::string> ids = split_list(a.elections);
  if (ids.empty()) {
    for (const auto& e : elections) ids.push_back(e.id());
  }
  ensure_dir(c.out);
  std::size_t files = 0;
  for (const auto& id : ids) {
    const Election& e = find_election(elections, id);
    const EnsembleShares shares = ensemble_shares(g, ens.plans, e);
    std::optional<std::vector<double>> plan_shares;
    if (plan) plan_shares = district_tallies(g, *plan, e).rep_share;

    if (a.which == "histogram") {
      std::ofstream f(c.out / ("histogram_" + id + ".csv"), std::ios::binary);
      csv::write_row(f, {"shift", "seats", "count"});
      auto shifts = split_list(a.shifts);
      if (shifts.empty()) shifts.push_back("0");
      for (const auto& s : shifts) {
        const double delta = parse_real(s);
        const SeatHistogram h = seat_histogram(shares, delta);
        for (const auto& [seats, count] : h.counts) csv::write_row(f, {fmt(delta), std::to_string(seats), std::to_string(count)});
      }
    } else if (a.which == "boxes") {
      const MarginalBoxStats stats = marginal_box_stats(shares);
      std::ofstream f(c.out / ("boxes_" + id + ".csv"), std::ios::binary);
      csv::write_row(f, {"rank", "mean", "q1", "median", "q3", "lo", "hi"});
      for (std::size_t r = 0; r < stats.ranks.size(); ++r) {
        const BoxStats& b = stats.ranks[r];
        csv::write_row(f, {std::to_string(r + 1), fmt(b.mean), fmt(b.q1), fmt(b.median), fmt(b.q3), fmt(b.lo), fmt(b.hi)});
      }
    } else if (a.which == "envelope") {
      const auto rows = shift_envelope(shares, plan_shares ? &*plan_shares : nullptr, a.range, a.step);
      std::ofstream f(c.out / ("envelope_" + id + ".csv"), std::ios::binary);
      csv::write_row(f, {"shift", "mean", "sd", "p5", "p95", "min", "max", "ref_seats"});
      for (const auto& r : rows) {
        csv::write_row(f, {fmt(r.shift), fmt(r.mean), fmt(r.sd), fmt(r.p5), fmt(r.p95), fmt(r.min), fmt(r.max),
                           r.ref_seats ? std::to_string(*r.ref_seats) : std::string()});
      }
    } else if (a.which == "indices") {
      IndexOptions io;
      io.grid = ShiftGrid::range(c.shift_min, c.shift_max, c.shift_step);
      io.variant_half_width = c.variant_halfwidth;
      io.ramp_width = c.ramp_width;
      const IndexReport report = index_report(*plan_shares, shares, id, io);
      write_text(c.out / ("indices_" + id + ".json"), report.to_json() + "\n");
    } else if (a.which == "parity") {
      const ParityShift ps = ensemble_parity_shift(shares);
      ordered_json j;
      j["election"] = id;
      j["rep_fraction"] = shares.rep_fraction;
      j["ensemble_delta"] = ps.delta;
      j["ensemble_statewide_fraction"] = ps.statewide_fraction;
      j["majority_plans"] = ps.majority_plans;
      j["ensemble_size"] = shares.size();
      j["plan_parity_fraction"] =
          plan_shares ? ordered_json(plan_parity_fraction(*plan_shares, shares.rep_fraction)) : ordered_json();
      write_text(c.out / ("parity_" + id + ".json"), j.dump(2) + "\n");
      std::ofstream f(c.out / ("parity_fractions_" + id + ".csv"), std::ios::binary);
      csv::write_row(f, {"plan_id", "parity_fraction"});
      for (std::size_t i = 0; i < shares.size(); ++i) {
        csv::write_row(f, {std::to_string(i), fmt(plan_parity_fraction(shares.by_plan[i], shares.rep_fraction))});
      }
    } else {
      throw ParseError("unknown analysis '" + a.which + "'");
    }
    ++files;
  }
  out << "analyze " << a.which << ": " << files << " election(s) over " << ens.size() << " plans written to "
      << c.out.string() << "\n";
  return kOk;
}

// validate

struct ValidateArgs {
  std::string instance = "3x3";
  int districts = 2;
  std::int64_t steps = 1'000'000;
  std::string fault = "none";
};

int cmd_validate(const GlobalOptions& opts, const ValidateArgs& a, std::ostream& out) {
  const auto [width, height] = parse_dims(a.instance);
  AcceptanceRule rule = AcceptanceRule::metropolis_hastings;
  if (a.fault == "always-accept") {
    rule = AcceptanceRule::always_accept;
  } else if (a.fault == "no-correction") {
    rule = AcceptanceRule::no_proposal_correction;
  } else if (a.fault != "none") {
    throw ParseError("--fault must be none, always-accept or no-correction");
  }
  if (a.steps < 1) throw ParseError("--steps must be positive");
  const std::uint64_t seed = opts.seed.value_or(1);
  bool all_ok = true;
  const auto report = [&](const std::string& name, bool ok, const std::string& detail) {
    out << (ok ? "PASS " : "FAIL ") << name << "  " << detail << "\n";
    all_ok = all_ok && ok;
  };

  {
    const Geography g = grid_geography(width, height, a.districts);
    const auto r = stationarity_check(g, ScoreWeights{}, VraTargets{}, 0.0, a.steps, derive_seed(seed, 100), rule);
    report("uniform_stationarity", r.tv < 0.05,
           "plans=" + std::to_string(r.support) + " accepted=" + std::to_string(r.accepted) + " tv=" + fmt(r.tv));
  }
  {
    SyntheticSpec spec;
    spec.width = width;
    spec.height = height;
    spec.k = a.districts;
    spec.seed = seed;
    spec.population_jitter = 0.002;
    spec.county_block = 2;
    spec.black_peak = 0.0;
    spec.hispanic_peak = 0.0;
    const SyntheticInstance inst = synth_geography(spec);
    const auto r =
        stationarity_check(inst.geography, ScoreWeights{}, VraTargets{}, 1.0, a.steps, derive_seed(seed, 101), rule);
    report("boltzmann_stationarity", r.tv < 0.05,
           "plans=" + std::to_string(r.support) + " accepted=" + std::to_string(r.accepted) + " tv=" + fmt(r.tv));
  }
  {
    std::int64_t worst = 0;
    int picked = 0;
    const int trials = 100;
    for (int t = 0; t < trials; ++t) {
      const ExactLinearFixture fx = exact_linear_fixture(60, derive_seed(seed, 200 + static_cast<std::uint64_t>(t)));
      const std::vector<ReferenceElection> linear{fx.linear};
      const InterpolationResult res = interpolate_election(fx.target, linear);
      for (std::size_t w = 0; w < fx.target.num_wards(); ++w) {
        if (!res.interpolated[w]) continue;
        const WardVotes& got = res.election.votes()[w];
        const WardVotes& want = fx.truth.votes()[w];
        worst = std::max({worst, std::abs(got.total - want.total), std::abs(got.dem - want.dem),
                          std::abs(got.rep - want.rep)});
      }
      const std::vector<ReferenceElection> both{fx.noise, fx.linear};
      const ReferenceSelection sel = select_reference_set(fx.target, both, 2);
      picked += sel.ids == std::vector<std::string>{"linear"};
    }
    report("interpolation_oracle", worst <= 1 && picked == trials,
           "max_error=" + std::to_string(worst) + " selection=" + std::to_string(picked) + "/" + std::to_string(trials));
  }
  {
    SyntheticSpec spec;
    spec.width = std::max(width, 7);
    spec.height = std::max(height, 7);
    spec.k = a.districts;
    spec.seed = seed;
    const SyntheticInstance inst = synth_geography(spec);
    ChainOptions co;
    co.check_invariants = true;
    AnnealingSchedule schedule{200, 800, 200};
    std::string detail;
    bool ok = false;
    try {
      const ChainResult r = run_annealed_chain(inst.geography, ScoreWeights{}, VraTargets{}, schedule,
                                               derive_seed(seed, 300), co);
      validate_plan(inst.geography, r.plan);
      ok = r.accepted_steps == schedule.total();
      detail = "accepted=" + std::to_string(r.accepted_steps);
    } catch (const std::exception& e) {
      detail = e.what();
    }
    report("annealing_invariants", ok, detail);
  }
  return all_ok ? kOk : kValidationFailure;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Redistricting ensemble sampler and outlier statistics"};
  app.name("gerry");
  app.require_subcommand(1);
  app.fallthrough();

  GlobalOptions g;
  std::uint64_t seed = 0;
  int workers = 1;
  std::string out_dir;
  app.add_option("--config", g.config, "Run configuration file");
  app.add_option("--set", g.sets, "Override a config key (key=value)");
  auto* seed_opt = app.add_option("--seed", seed, "Master seed");
  auto* workers_opt = app.add_option("--workers", workers, "Worker threads");
  auto* out_opt = app.add_option("--out", out_dir, "Output directory");

  SynthArgs synth;
  auto* synth_cmd = app.add_subcommand("synth", "Write a synthetic grid instance");
  synth_cmd->add_option("--grid", synth.grid, "Grid size WxH")->required();
  synth_cmd->add_option("--districts", synth.districts, "District count");
  synth_cmd->add_option("--population", synth.population, "uniform or urban");
  synth_cmd->add_option("--jitter", synth.spec.population_jitter, "Relative population jitter");
  synth_cmd->add_option("--baseline", synth.spec.baseline_rep_share, "Baseline Republican share");
  synth_cmd->add_option("--amplitude", synth.spec.dem_cluster_amplitude, "Democratic urban-cluster amplitude");
  synth_cmd->add_option("--noise", synth.spec.share_noise, "Ward share noise");
  synth_cmd->add_option("--county-block", synth.spec.county_block, "County tile side");
  synth_cmd->add_option("--town-block", synth.spec.town_block, "Town tile side");
  synth_cmd->add_option("--black-peak", synth.spec.black_peak, "Black fraction at the cluster center");
  synth_cmd->add_option("--hispanic-peak", synth.spec.hispanic_peak, "Hispanic fraction at its cluster center");
  synth_cmd->add_option("--unopposed", synth.spec.unopposed_fraction, "Unopposed ward fraction in 'partial'");

  auto* sample_cmd = app.add_subcommand("sample", "Generate an ensemble of plans");

  InterpolateArgs interp;
  auto* interp_cmd = app.add_subcommand("interpolate", "Fill in unopposed wards of an election");
  interp_cmd->add_option("--target", interp.target, "Election to interpolate")->required();
  interp_cmd->add_option("--candidates", interp.candidates, "Candidate reference elections (comma separated)");
  interp_cmd->add_option("--max-size", interp.max_size, "Largest reference set");

  AnalyzeArgs analyze;
  auto* analyze_cmd = app.add_subcommand("analyze", "Ensemble statistics");
  analyze_cmd->add_option("which", analyze.which, "histogram|boxes|envelope|indices|parity")
      ->required()
      ->check(CLI::IsMember({"histogram", "boxes", "envelope", "indices", "parity"}));
  analyze_cmd->add_option("--plan", analyze.plan, "ref, ensemble:ID or a ward_id,district CSV");
  analyze_cmd->add_option("--elections", analyze.elections, "Election ids (comma separated)");
  analyze_cmd->add_option("--range", analyze.range, "Envelope half range in points");
  analyze_cmd->add_option("--step", analyze.step, "Envelope step in points");
  analyze_cmd->add_option("--shifts", analyze.shifts, "Histogram shifts in points (comma separated)");

  ValidateArgs val;
  auto* validate_cmd = app.add_subcommand("validate", "Run the oracle validation suite");
  validate_cmd->add_option("--instance", val.instance, "Grid WxH");
  validate_cmd->add_option("--districts", val.districts, "District count");
  validate_cmd->add_option("--steps", val.steps, "Accepted steps per stationarity check");
  validate_cmd->add_option("--fault", val.fault, "none|always-accept|no-correction");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsageError;
  }
  if (seed_opt->count()) g.seed = seed;
  if (workers_opt->count()) g.workers = workers;
  if (out_opt->count()) g.out = out_dir;

  try {
    if (*synth_cmd) return cmd_synth(g, synth, out);
    if (*sample_cmd) return cmd_sample(g, out, err);
    if (*interp_cmd) return cmd_interpolate(g, interp, out, err);
    if (*analyze_cmd) return cmd_analyze(g, analyze, out);
    if (*validate_cmd) return cmd_validate(g, val, out);
  } catch (const ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kUsageError;
  } catch (const InstanceTooLarge& e) {
    err << "error: " << e.what() << "\n";
    return kUsageError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kValidationFailure;
  }
  return kUsageError;
}

int run(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return run(args, std::cout, std::cerr);
}

}  // namespace gerry::cli
