#include "monsoon/app.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <set>

#include "monsoon/baselines.hpp"
#include "monsoon/rng.hpp"
#include "monsoon/spells.hpp"
#include "monsoon/transitions.hpp"

namespace monsoon::app {

namespace fs = std::filesystem;

namespace {

const std::set<std::string> kExecutionKeys = {"out", "fit_dir", "workers"};

class Reader {
 public:
  Reader(const csv::KeyValues& kv, fs::path base) : kv_(kv), base_(std::move(base)) {}

  void real(const char* key, double& dst) const {
    if (auto it = kv_.find(key); it != kv_.end()) dst = csv::parse_double(it->second, key);
  }
  void integer(const char* key, int& dst) const {
    if (auto it = kv_.find(key); it != kv_.end())
      dst = static_cast<int>(csv::parse_long(it->second, key));
  }
  void boolean(const char* key, bool& dst) const {
    if (auto it = kv_.find(key); it != kv_.end()) {
      const auto& v = it->second;
      if (v == "true" || v == "1" || v == "yes") dst = true;
      else if (v == "false" || v == "0" || v == "no") dst = false;
      else throw DataError(std::string(key) + ": expected true/false, got '" + v + "'");
    }
  }
  void path(const char* key, fs::path& dst) const {
    if (auto it = kv_.find(key); it != kv_.end()) {
      fs::path p(it->second);
      dst = p.is_absolute() ? p : base_ / p;
    }
  }

 private:
  const csv::KeyValues& kv_;
  fs::path base_;
};

// Output files with their headers, checked once everything is written.
class Outputs {
 public:
  explicit Outputs(fs::path dir) : dir_(std::move(dir)) { fs::create_directories(dir_); }

  fs::path add(const std::string& name, std::string header) {
    files_.emplace_back(name, std::move(header));
    return dir_ / name;
  }

  void verify() const {
    for (const auto& [name, header] : files_) {
      const auto path = dir_ / name;
      std::ifstream in(path);
      if (!in) throw DataError("output missing: " + path.string());
      std::string line;
      bool ok = false;
      while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        ok = header.empty() || line == header;
        break;
      }
      if (!ok && !header.empty()) {
        throw DataError("output " + path.string() + " does not start with header '" + header + "'");
      }
    }
  }

  std::size_t count() const { return files_.size(); }

 private:
  fs::path dir_;
  std::vector<std::pair<std::string, std::string>> files_;
};

std::ofstream open_with_header(const fs::path& path, const std::string& stamp,
                               const std::string& header) {
  auto out = csv::open_output(path, stamp);
  if (!header.empty()) out << header << '\n';
  return out;
}

void write_kv(Outputs& outputs, const std::string& name, const csv::KeyValues& kv,
              const std::string& stamp) {
  csv::write_key_values(outputs.add(name, ""), kv, stamp);
}

RainfallField load_field(const RunConfig& cfg) {
  if (cfg.data.empty() || cfg.geometry.empty()) {
    throw DataError("config must name both `data` and `geometry`");
  }
  if (!fs::exists(cfg.geometry)) throw DataError("geometry file not found: " + cfg.geometry.string());
  if (!fs::exists(cfg.data)) throw DataError("data file not found: " + cfg.data.string());
  LoadStats stats;
  auto field = load_rainfall(cfg.data, cfg.geometry, &stats);
  if (stats.skipped_outside_season) {
    std::cerr << "skipped " << stats.skipped_outside_season
              << " rows outside June-September\n";
  }
  return field;
}

ModelParams read_fitted_params(const fs::path& fit_dir) {
  const auto path = fit_dir / "model_params.txt";
  if (!fs::exists(path)) throw DataError("fit output missing: " + path.string());
  return model_params_from(csv::read_key_values(path));
}

std::string join(const std::vector<int>& v, char sep) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? std::string(1, sep) : "") + std::to_string(v[i]);
  return s;
}

struct MaskPair {
  std::vector<unsigned char> monsoon_zone;
  std::vector<unsigned char> north;
};

MaskPair read_masks(const fs::path& path, std::size_t n_locations) {
  const auto table = csv::read(path, {"location_id", "monsoon_zone", "north"});
  MaskPair m;
  m.monsoon_zone.assign(n_locations, 0);
  m.north.assign(n_locations, 0);
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    const auto ctx = path.string() + ":" + std::to_string(table.line_numbers[i]);
    const long id = csv::parse_long(table.rows[i][0], ctx);
    if (id < 0 || static_cast<std::size_t>(id) >= n_locations) {
      throw DataError(ctx + ": unknown location_id");
    }
    m.monsoon_zone[static_cast<std::size_t>(id)] = csv::parse_long(table.rows[i][1], ctx) != 0;
    m.north[static_cast<std::size_t>(id)] = csv::parse_long(table.rows[i][2], ctx) != 0;
  }
  return m;
}

int distinct_count(const std::vector<int>& labels) {
  return static_cast<int>(std::set<int>(labels.begin(), labels.end()).size());
}

}  // namespace

std::string RunConfig::stamp(const std::string& command) const {
  std::string s = "monsoon " + command + " config:";
  for (const auto& [k, v] : raw) {
    if (kExecutionKeys.count(k)) continue;
    s += " " + k + "=" + v;
  }
  return s;
}

SynthSpec RunConfig::synth_spec() const {
  auto spec = banded_synth_spec(synth_rows, synth_cols, synth_patterns, synth_years,
                                synth_in_prob, synth_out_prob, synth_self_prob);
  spec.first_year = synth_first_year;
  spec.flip_noise = synth_flip_noise;
  spec.emission = synth_emission;
  spec.seed = sampler.seed;
  return spec;
}

RunConfig run_config_from(const csv::KeyValues& kv, const fs::path& base_dir) {
  RunConfig cfg;
  cfg.raw = kv;
  const Reader r(kv, base_dir);
  r.path("data", cfg.data);
  r.path("geometry", cfg.geometry);
  r.path("masks", cfg.masks);
  r.path("out", cfg.out_dir);
  cfg.fit_dir = cfg.out_dir;
  r.path("fit_dir", cfg.fit_dir);

  cfg.model = model_params_from(kv);

  r.integer("n_sweeps", cfg.sampler.n_sweeps);
  r.integer("burn_in", cfg.sampler.burn_in);
  if (auto it = kv.find("seed"); it != kv.end())
    cfg.sampler.seed = static_cast<std::uint64_t>(csv::parse_long(it->second, "seed"));
  if (auto it = kv.find("init"); it != kv.end()) {
    if (it->second == "threshold_local_mean") cfg.sampler.init = InitMode::threshold_local_mean;
    else if (it->second == "random") cfg.sampler.init = InitMode::random;
    else throw DataError("init: expected threshold_local_mean or random");
  }
  r.boolean("track_map", cfg.sampler.track_map);
  r.integer("workers", cfg.sampler.worker_count);
  cfg.sampler.validate();

  r.integer("min_run", cfg.min_run);
  r.integer("local_min_run", cfg.local_min_run);
  r.boolean("include_cross_season", cfg.include_cross_season);
  if (auto it = kv.find("prominence"); it != kv.end()) {
    if (it->second == "five_of_eight") cfg.prominence = ProminenceRule::five_of_eight;
    else if (it->second == "four_of_eight") cfg.prominence = ProminenceRule::four_of_eight;
    else throw DataError("prominence: expected five_of_eight or four_of_eight");
  }
  r.integer("min_years", cfg.min_years);
  r.real("dry_quantile", cfg.dry_quantile);
  for (const auto& [k, v] : kv) {
    const std::string prefix = "family_override.";
    if (k.rfind(prefix, 0) != 0) continue;
    const int label = static_cast<int>(csv::parse_long(k.substr(prefix.size()), k));
    cfg.family_overrides[label] = static_cast<int>(csv::parse_long(v, k));
  }
  r.integer("subseq_k", cfg.subseq_k);
  r.integer("subseq_top_n", cfg.subseq_top_n);
  r.integer("baseline_k_days", cfg.baseline_k_days);
  r.integer("baseline_k_locations", cfg.baseline_k_locations);
  r.real("fixed_threshold_mm", cfg.fixed_threshold_mm);

  r.integer("synth.rows", cfg.synth_rows);
  r.integer("synth.cols", cfg.synth_cols);
  r.integer("synth.years", cfg.synth_years);
  r.integer("synth.first_year", cfg.synth_first_year);
  r.integer("synth.patterns", cfg.synth_patterns);
  r.real("synth.flip_noise", cfg.synth_flip_noise);
  r.real("synth.in_prob", cfg.synth_in_prob);
  r.real("synth.out_prob", cfg.synth_out_prob);
  r.real("synth.self_prob", cfg.synth_self_prob);
  r.real("synth.dry_mean_mm", cfg.synth_emission.dry_mean_mm);
  r.real("synth.wet_mean_mm", cfg.synth_emission.wet_mean_mm);
  r.real("synth.wet_shape", cfg.synth_emission.wet_shape);

  r.integer("sim.seasons", cfg.sim_seasons);
  r.integer("sim.length", cfg.sim_length);
  r.path("sim.transitions", cfg.sim_transitions);
  r.path("sim.patterns", cfg.sim_patterns);
  if (auto it = kv.find("sim.initial"); it != kv.end()) {
    if (it->second == "uniform") cfg.sim_stationary_start = false;
    else if (it->second == "stationary") cfg.sim_stationary_start = true;
    else throw DataError("sim.initial: expected uniform or stationary");
  }
  if (cfg.sim_seasons < 1 || cfg.sim_length < 1) {
    throw DataError("sim.seasons and sim.length must be >= 1");
  }
  if (cfg.min_run < 1 || cfg.local_min_run < 1) throw DataError("min_run must be >= 1");
  return cfg;
}

RunConfig load_run_config(const fs::path& path, const csv::KeyValues& overrides) {
  csv::KeyValues kv;
  fs::path base = fs::current_path();
  if (!path.empty()) {
    kv = csv::read_key_values(path);
    base = fs::absolute(path).parent_path();
  }
  for (const auto& [k, v] : overrides) kv[k] = v;
  // Overrides given on the command line are relative to the working directory.
  if (overrides.count("out")) {
    kv["out"] = fs::absolute(overrides.at("out")).string();
  }
  return run_config_from(kv, base);
}

int cmd_synth(const RunConfig& cfg) {
  const auto spec = cfg.synth_spec();
  const auto synth = synth_generate(spec);
  const auto stamp = cfg.stamp("synth");
  Outputs outputs(cfg.out_dir);
  const auto& field = synth.field;
  const std::size_t S = field.n_locations(), D = field.n_days();

  {
    auto out = open_with_header(outputs.add("geometry.csv", "location_id,lat,lon"), stamp,
                                "location_id,lat,lon");
    for (const auto& loc : field.geometry.locations())
      out << loc.id << ',' << csv::format(loc.lat) << ',' << csv::format(loc.lon) << '\n';
  }
  {
    auto out = open_with_header(outputs.add("rainfall.csv", "location_id,date,rain_mm"), stamp,
                                "location_id,date,rain_mm");
    for (std::size_t s = 0; s < S; ++s)
      for (std::size_t t = 0; t < D; ++t)
        out << s << ',' << field.calendar.iso_date(t) << ',' << csv::format(field.x(s, t)) << '\n';
  }
  {
    auto out = open_with_header(outputs.add("truth.csv", "location_id_or_day,kind,label"),
                                stamp, "location_id_or_day,kind,label");
    for (std::size_t t = 0; t < D; ++t) out << t << ",u," << synth.u[t] << '\n';
    for (std::size_t s = 0; s < S; ++s) out << s << ",v," << synth.v[s] << '\n';
    // z rows are keyed by the flattened site index s * D + t.
    for (std::size_t s = 0; s < S; ++s)
      for (std::size_t t = 0; t < D; ++t)
        out << s * D + t << ",z," << static_cast<int>(synth.z(s, t)) << '\n';
  }
  outputs.verify();
  std::cout << "synth: " << S << " locations x " << D << " days = " << S * D
            << " rainfall rows, " << spec.n_patterns << " patterns, written to "
            << cfg.out_dir.string() << '\n';
  return 0;
}

int cmd_fit(const RunConfig& cfg) {
  const auto field = load_field(cfg);
  const auto params = resolve_params(cfg.model, field);
  const auto result = run(field, params, cfg.sampler);
  const auto stamp = cfg.stamp("fit");
  Outputs outputs(cfg.out_dir);
  const auto& state = result.map_state;
  const auto& cal = field.calendar;
  const std::size_t S = field.n_locations(), D = field.n_days();

  auto kv = to_key_values(params);
  kv["map_log_density"] = csv::format(result.map_log_density);
  write_kv(outputs, "model_params.txt", kv, stamp);
  write_diagnostics_csv(outputs.add("diagnostics.csv", "sweep,log_density,changed_z,changed_u,changed_v"),
                        result, stamp);
  {
    auto out = open_with_header(outputs.add("state_z.csv", "location_id,date,z"), stamp,
                                "location_id,date,z");
    for (std::size_t s = 0; s < S; ++s)
      for (std::size_t t = 0; t < D; ++t)
        out << s << ',' << cal.iso_date(t) << ',' << static_cast<int>(state.z(s, t)) << '\n';
  }
  {
    auto out = open_with_header(outputs.add("state_u.csv", "day,date,u"), stamp, "day,date,u");
    for (std::size_t t = 0; t < D; ++t) out << t << ',' << cal.iso_date(t) << ',' << state.u[t] << '\n';
  }
  {
    auto out = open_with_header(outputs.add("state_v.csv", "location_id,v"), stamp, "location_id,v");
    for (std::size_t s = 0; s < S; ++s) out << s << ',' << state.v[s] << '\n';
  }
  {
    const auto& proto = result.map_prototypes;
    auto out = open_with_header(outputs.add("prototypes_u.csv", "label,count,mu_agg"), stamp,
                                "label,count,mu_agg");
    for (std::size_t k = 0; k < proto.counts_u.size(); ++k)
      out << k << ',' << proto.counts_u[k] << ',' << csv::format(proto.mu_agg[k]) << '\n';
    auto pi = open_with_header(outputs.add("prototypes_pi.csv", "label,location_id,pi"), stamp,
                               "label,location_id,pi");
    for (std::size_t k = 0; k < proto.pi.rows(); ++k)
      for (std::size_t s = 0; s < S; ++s)
        pi << k << ',' << s << ',' << csv::format(proto.pi(k, s)) << '\n';
    auto tau = open_with_header(outputs.add("prototypes_tau.csv", "label,day,tau"), stamp,
                                "label,day,tau");
    for (std::size_t k = 0; k < proto.tau.rows(); ++k)
      for (std::size_t t = 0; t < D; ++t)
        tau << k << ',' << t << ',' << csv::format(proto.tau(k, t)) << '\n';
  }

  auto spatial = extract_spatial(field, state, params.max_clusters_u);
  const int min_years = cfg.min_years > 0 ? cfg.min_years
                                          : default_min_years(cal.n_years(), cfg.prominence);
  mark_prominent(spatial, cal, min_years);
  {
    auto out = open_with_header(
        outputs.add("patterns_spatial.csv", "label,location_id,crp_value,cdp_value"), stamp,
        "label,location_id,crp_value,cdp_value");
    for (const auto& p : spatial.patterns)
      for (std::size_t s = 0; s < S; ++s)
        out << p.label << ',' << s << ',' << csv::format(p.crp[s]) << ','
            << static_cast<int>(p.cdp[s]) << '\n';
  }
  {
    const std::string header = "label,n_days,mu_k,wet_fraction,aggregate,prominent,order_rank";
    auto out = open_with_header(outputs.add("patterns_summary.csv", header), stamp, header);
    const auto ranks = spatial.ranks();
    for (std::size_t i = 0; i < spatial.patterns.size(); ++i) {
      const auto& p = spatial.patterns[i];
      out << p.label << ',' << p.days.size() << ',' << csv::format(p.mu_k) << ','
          << csv::format(p.wet_fraction) << ',' << csv::format(p.aggregate()) << ','
          << (p.prominent ? 1 : 0) << ',' << ranks[i] << '\n';
    }
  }
  const auto temporal = extract_temporal(field, state, params.max_clusters_v);
  {
    auto out = open_with_header(
        outputs.add("patterns_temporal.csv", "label,day,date,cts_value,cds_value"), stamp,
        "label,day,date,cts_value,cds_value");
    for (const auto& p : temporal.patterns)
      for (std::size_t t = 0; t < D; ++t)
        out << p.label << ',' << t << ',' << cal.iso_date(t) << ',' << csv::format(p.cts[t])
            << ',' << static_cast<int>(p.cds[t]) << '\n';
    auto sizes = open_with_header(outputs.add("temporal_summary.csv", "label,n_locations"),
                                  stamp, "label,n_locations");
    for (const auto& p : temporal.patterns) sizes << p.label << ',' << p.locations.size() << '\n';
  }
  outputs.verify();
  for (int l : spatial.empty_labels) std::cerr << "fit: daily cluster " << l << " is empty\n";
  for (int l : temporal.empty_labels) std::cerr << "fit: location cluster " << l << " is empty\n";
  std::cout << "fit: " << result.sweeps.size() << " sweeps, MAP log density "
            << csv::format(result.map_log_density) << ", " << spatial.patterns.size()
            << " daily clusters, " << temporal.patterns.size() << " location clusters\n";
  return 0;
}

LatentState read_state(const fs::path& fit_dir, const RainfallField& field) {
  const std::size_t S = field.n_locations(), D = field.n_days();
  for (const char* name : {"state_z.csv", "state_u.csv", "state_v.csv"}) {
    if (!fs::exists(fit_dir / name)) {
      throw DataError("fit output missing: " + (fit_dir / name).string());
    }
  }
  LatentState state;
  state.z = BinaryMatrix(S, D, 0);
  state.u.assign(D, -1);
  state.v.assign(S, -1);
  {
    const auto path = fit_dir / "state_z.csv";
    const auto table = csv::read(path, {"location_id", "date", "z"});
    if (table.rows.size() != S * D) throw DataError(path.string() + ": expected S*D rows");
    for (std::size_t i = 0; i < table.rows.size(); ++i) {
      const auto ctx = path.string() + ":" + std::to_string(table.line_numbers[i]);
      const long s = csv::parse_long(table.rows[i][0], ctx);
      if (s < 0 || static_cast<std::size_t>(s) >= S) throw DataError(ctx + ": bad location_id");
      state.z(static_cast<std::size_t>(s), i % D) = csv::parse_long(table.rows[i][2], ctx) != 0;
    }
  }
  {
    const auto path = fit_dir / "state_u.csv";
    const auto table = csv::read(path, {"day", "date", "u"});
    if (table.rows.size() != D) throw DataError(path.string() + ": expected D rows");
    for (std::size_t i = 0; i < D; ++i)
      state.u[i] = static_cast<int>(csv::parse_long(table.rows[i][2], path.string()));
  }
  {
    const auto path = fit_dir / "state_v.csv";
    const auto table = csv::read(path, {"location_id", "v"});
    if (table.rows.size() != S) throw DataError(path.string() + ": expected S rows");
    for (std::size_t i = 0; i < S; ++i)
      state.v[i] = static_cast<int>(csv::parse_long(table.rows[i][1], path.string()));
  }
  return state;
}

int cmd_analyze(const RunConfig& cfg) {
  const auto field = load_field(cfg);
  const auto params = read_fitted_params(cfg.fit_dir);
  const auto state = read_state(cfg.fit_dir, field);
  const auto stamp = cfg.stamp("analyze");
  const auto& cal = field.calendar;
  const std::size_t S = field.n_locations(), D = field.n_days();
  const auto y = daily_aggregate(field);
  Outputs outputs(cfg.out_dir);
  csv::KeyValues report;

  // Patterns, prominence and families.
  auto spatial = extract_spatial(field, state, params.max_clusters_u);
  const int min_years = cfg.min_years > 0 ? cfg.min_years
                                          : default_min_years(cal.n_years(), cfg.prominence);
  mark_prominent(spatial, cal, min_years);
  std::vector<int> prominent;  // ordered by increasing aggregate rainfall
  for (std::size_t i : spatial.order)
    if (spatial.patterns[i].prominent) prominent.push_back(spatial.patterns[i].label);
  report["prominent_min_years"] = std::to_string(min_years);
  report["prominent_labels"] = join(prominent, ' ');

  bool families_assigned = false;
  {
    FamilyRule rule;
    rule.dry_quantile = cfg.dry_quantile;
    rule.overrides = cfg.family_overrides;
    if (!cfg.masks.empty()) {
      const auto masks = read_masks(cfg.masks, S);
      rule.monsoon_zone = masks.monsoon_zone;
      rule.north = masks.north;
    }
    try {
      assign_families(spatial, rule);
      families_assigned = true;
    } catch (const DataError& e) {
      std::cerr << "analyze: families not assigned: " << e.what() << '\n';
    }
  }
  std::map<int, int> family_of;
  for (const auto& p : spatial.patterns)
    if (p.prominent && families_assigned) family_of[p.label] = p.family;
  report["families_assigned"] = families_assigned ? "true" : "false";

  {
    const std::string header = "label,n_days,mu_k,wet_fraction,aggregate,prominent,family,order_rank";
    auto out = open_with_header(outputs.add("pattern_summary.csv", header), stamp, header);
    const auto ranks = spatial.ranks();
    for (std::size_t i = 0; i < spatial.patterns.size(); ++i) {
      const auto& p = spatial.patterns[i];
      out << p.label << ',' << p.days.size() << ',' << csv::format(p.mu_k) << ','
          << csv::format(p.wet_fraction) << ',' << csv::format(p.aggregate()) << ','
          << (p.prominent ? 1 : 0) << ',' << p.family << ',' << ranks[i] << '\n';
    }
  }
  {
    const std::string header = "label,jun,jul,aug,sep";
    auto out = open_with_header(outputs.add("monthly_distribution.csv", header), stamp, header);
    const auto monthly = monthly_distribution(spatial, cal);
    for (std::size_t i = 0; i < spatial.patterns.size(); ++i) {
      out << spatial.patterns[i].label;
      for (double v : monthly[i]) out << ',' << csv::format(v);
      out << '\n';
    }
  }
  if (cal.n_years() >= 2) {
    const std::string header = "year,total_mm,class";
    auto out = open_with_header(outputs.add("year_classes.csv", header), stamp, header);
    for (const auto& yl : classify_years(field))
      out << yl.year << ',' << csv::format(yl.total) << ',' << to_string(yl.label) << '\n';
  }

  // Transitions over prominent patterns; other days form a sink.
  report["self_transitions_all_pairs"] = std::to_string(self_transition_count(state.u, cal, true));
  report["self_transitions_within_season"] =
      std::to_string(self_transition_count(state.u, cal, false));
  report["consecutive_pairs"] = std::to_string(D ? D - 1 : 0);
  if (!prominent.empty()) {
    const auto model = estimate_transitions(state.u, cal, prominent, cfg.include_cross_season);
    const std::string header = "from," + join(prominent, ',');
    write_transition_csv(outputs.add("transitions.csv", header), model.labels, model.matrix, stamp);
    write_transition_counts_csv(outputs.add("transition_counts.csv", header + ",empty_row"), model,
                                stamp);
    write_transition_csv(outputs.add("transitions_zero_diag.csv", header), model.labels,
                         zero_diagonal(model.matrix), stamp);
    const auto perm = family_order(model.labels, family_of);
    std::vector<int> permuted_labels;
    for (std::size_t i : perm) permuted_labels.push_back(model.labels[i]);
    write_transition_csv(outputs.add("transitions_family.csv", "from," + join(permuted_labels, ',')),
                         permuted_labels, permute(zero_diagonal(model.matrix), perm), stamp);
  } else {
    std::cerr << "analyze: no prominent patterns; transition matrices skipped\n";
  }
  {
    std::vector<int> mapped(state.u);
    const std::set<int> keep(prominent.begin(), prominent.end());
    for (int& l : mapped)
      if (!keep.count(l)) l = -1;
    const auto subseq = frequent_ksubseq(mapped, cal, cfg.subseq_k, cfg.subseq_top_n);
    auto out = open_with_header(outputs.add("subsequences.csv", "seq,count"), stamp, "seq,count");
    for (const auto& sc : subseq) out << join(sc.window, '-') << ',' << sc.count << '\n';

    const auto spells = pattern_spell_stats(state.u, cal, prominent);
    const std::string header = "label,spell_count,mean_length,spells_per_season,days";
    auto ps = open_with_header(outputs.add("pattern_spells.csv", header), stamp, header);
    for (const auto& [label, n] : spells.spell_count)
      ps << label << ',' << n << ',' << csv::format(spells.mean_length.at(label)) << ','
         << csv::format(spells.spells_per_season.at(label)) << ',' << spells.days.at(label) << '\n';
  }

  // All-India active/break spells by both definitions.
  std::map<int, double> mu_k;
  for (const auto& p : spatial.patterns)
    if (p.prominent) mu_k[p.label] = p.mu_k;
  const auto by_threshold = act_brk_threshold(y, cal, cfg.min_run);
  const auto by_cluster = act_brk_cluster(state.u, mu_k, y, cal, cfg.min_run);
  const std::string spell_header = "scale,id,kind,start_date,end_date,length";
  {
    auto out = open_with_header(outputs.add("spells_all_india.csv", spell_header), stamp, spell_header);
    write_spell_rows(out, by_threshold.active, cal);
    write_spell_rows(out, by_threshold.brk, cal);
    write_spell_rows(out, by_cluster.active, cal);
    write_spell_rows(out, by_cluster.brk, cal);
    const std::string day_header = "day,date,act0,brk0,act1,brk1";
    auto days = open_with_header(outputs.add("act_brk_days.csv", day_header), stamp, day_header);
    for (std::size_t t = 0; t < D; ++t) {
      const int ti = static_cast<int>(t);
      days << t << ',' << cal.iso_date(t) << ',' << by_threshold.active.contains(ti) << ','
           << by_threshold.brk.contains(ti) << ',' << by_cluster.active.contains(ti) << ','
           << by_cluster.brk.contains(ti) << '\n';
    }
  }
  {
    csv::KeyValues cmp;
    cmp["mu_y"] = csv::format(by_threshold.thresholds.mean);
    cmp["sigma_y"] = csv::format(by_threshold.thresholds.sd);
    const auto classes = classify_clusters(mu_k, by_threshold.thresholds);
    cmp["active_clusters"] = join(classes.active, ' ');
    cmp["break_clusters"] = join(classes.brk, ' ');
    const auto add = [&](const std::string& prefix, const SpellComparison& c,
                         const std::string& a, const std::string& b) {
      cmp[prefix + "intersection"] = std::to_string(c.intersection);
      for (const auto& [name, st] : {std::pair{a, c.a}, std::pair{b, c.b}}) {
        cmp[name + "_days"] = std::to_string(st.size);
        cmp[name + "_mean_rain_per_grid"] = csv::format(st.mean_rain_per_grid);
        cmp[name + "_mean_above_mean_locations"] = csv::format(st.mean_above_mean_locations);
        cmp[name + "_spells"] = std::to_string(st.spell_count);
        cmp[name + "_mean_spell_length"] = csv::format(st.mean_spell_length);
      }
    };
    add("act_", compare_spells(by_threshold.active, by_cluster.active, field), "act0", "act1");
    add("brk_", compare_spells(by_threshold.brk, by_cluster.brk, field), "brk0", "brk1");
    write_kv(outputs, "spell_comparison.txt", cmp, stamp);
  }

  // Local and regional wet/dry spells.
  {
    const auto local = local_spells(state.z, cal, cfg.local_min_run);
    auto out = open_with_header(outputs.add("spells_local.csv", spell_header), stamp, spell_header);
    double wet_sum = 0.0, dry_sum = 0.0;
    std::size_t wet_n = 0, dry_n = 0;
    for (std::size_t s = 0; s < S; ++s) {
      write_spell_rows(out, local.wet[s], cal);
      write_spell_rows(out, local.dry[s], cal);
      for (const auto& r : local.wet[s].spells) wet_sum += r.length();
      for (const auto& r : local.dry[s].spells) dry_sum += r.length();
      wet_n += local.wet[s].spells.size();
      dry_n += local.dry[s].spells.size();
    }
    const std::string header = "location_id,mean_wet_length,mean_dry_length";
    auto summary = open_with_header(outputs.add("local_spell_summary.csv", header), stamp, header);
    for (std::size_t s = 0; s < S; ++s)
      summary << s << ',' << csv::format(local.mean_wet_length[s]) << ','
              << csv::format(local.mean_dry_length[s]) << '\n';
    report["local_mean_wet_spell"] = csv::format(wet_n ? wet_sum / static_cast<double>(wet_n) : 0.0);
    report["local_mean_dry_spell"] = csv::format(dry_n ? dry_sum / static_cast<double>(dry_n) : 0.0);
  }
  {
    const auto temporal = extract_temporal(field, state, params.max_clusters_v);
    std::map<int, std::vector<unsigned char>> cds;
    for (const auto& p : temporal.patterns) cds[p.label] = p.cds;
    const auto regional = regional_spells(cds, cal, cfg.local_min_run);
    auto out = open_with_header(outputs.add("spells_regional.csv", spell_header), stamp, spell_header);
    for (const auto& r : regional) {
      write_spell_rows(out, r.wet, cal);
      write_spell_rows(out, r.dry, cal);
    }
  }

  // Coherence of the model's Z against threshold baselines.
  {
    csv::KeyValues coh;
    const auto put = [&](const std::string& name, const Coherence& c) {
      coh[name + "_neighbor_agreement"] = csv::format(c.neighbor_agreement);
      coh[name + "_day_persistence"] = csv::format(c.day_persistence);
    };
    put("model", coherence_stats(state.z, field.geometry, cal));
    put("local_mean", coherence_stats(threshold_discretize(field, ThresholdMode::local()),
                                      field.geometry, cal));
    put("fixed", coherence_stats(threshold_discretize(field, ThresholdMode::fixed(cfg.fixed_threshold_mm)),
                                 field.geometry, cal));
    coh["fixed_threshold_mm"] = csv::format(cfg.fixed_threshold_mm);
    write_kv(outputs, "coherence.txt", coh, stamp);
  }

  // Hamming similarity of each day to its cluster's CDP.
  {
    const auto cdp = cdp_matrix(spatial, params.max_clusters_u, S);
    const auto sim = hamming_similarity_series(field, state.z, state.u, cdp);
    const std::string header = "day,date,similarity,aggregate_mm";
    auto out = open_with_header(outputs.add("hamming_similarity.csv", header), stamp, header);
    for (std::size_t t = 0; t < D; ++t)
      out << t << ',' << cal.iso_date(t) << ',' << csv::format(sim.per_day[t]) << ','
          << csv::format(y[t]) << '\n';
    auto by_year = open_with_header(outputs.add("hamming_similarity_by_year.csv", "year,mean_similarity"),
                                    stamp, "year,mean_similarity");
    for (std::size_t i = 0; i < sim.years.size(); ++i)
      by_year << sim.years[i] << ',' << csv::format(sim.per_year_mean[i]) << '\n';
    report["mean_hamming_similarity"] = csv::format(sim.overall_mean);
    report["similarity_aggregate_correlation"] = csv::format(sim.correlation_with_aggregate);
  }

  write_kv(outputs, "analysis_report.txt", report, stamp);
  outputs.verify();
  std::cout << "analyze: " << prominent.size() << " prominent patterns, "
            << outputs.count() << " outputs written to " << cfg.out_dir.string() << '\n';
  return 0;
}

int cmd_simulate(const RunConfig& cfg) {
  const auto transitions_path =
      cfg.sim_transitions.empty() ? cfg.fit_dir / "transitions.csv" : cfg.sim_transitions;
  const auto patterns_path =
      cfg.sim_patterns.empty() ? cfg.fit_dir / "patterns_spatial.csv" : cfg.sim_patterns;
  if (!fs::exists(transitions_path)) throw DataError("transition model not found: " + transitions_path.string());
  if (!fs::exists(patterns_path)) throw DataError("patterns not found: " + patterns_path.string());
  const auto model = read_transition_csv(transitions_path);

  const auto table = csv::read(patterns_path, {"label", "location_id", "crp_value", "cdp_value"});
  std::map<int, std::map<long, double>> crp_by_label;
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    const auto ctx = patterns_path.string() + ":" + std::to_string(table.line_numbers[i]);
    crp_by_label[static_cast<int>(csv::parse_long(table.rows[i][0], ctx))]
                [csv::parse_long(table.rows[i][1], ctx)] = csv::parse_double(table.rows[i][2], ctx);
  }
  std::size_t S = 0;
  for (int l : model.labels) {
    auto it = crp_by_label.find(l);
    if (it == crp_by_label.end()) throw DataError("no CRP for label " + std::to_string(l));
    if (S == 0) S = it->second.size();
    if (it->second.size() != S) throw DataError("CRPs have inconsistent lengths");
  }
  Matrix<double> crp(model.size(), S);
  for (std::size_t i = 0; i < model.size(); ++i) {
    std::size_t s = 0;
    for (const auto& [loc, v] : crp_by_label[model.labels[i]]) crp(i, s++) = v;
  }

  std::vector<double> initial(model.size(), 1.0 / static_cast<double>(model.size()));
  if (cfg.sim_stationary_start) initial = stationary_distribution(model.matrix);
  {
    double sum = 0.0;
    for (double p : initial) sum += p;
    for (double& p : initial) p /= sum;
  }

  const auto stamp = cfg.stamp("simulate");
  Outputs outputs(cfg.out_dir);
  auto seasons = open_with_header(outputs.add("simulated_seasons.csv", "season,day,label,aggregate_mm"),
                                  stamp, "season,day,label,aggregate_mm");
  auto rain = open_with_header(outputs.add("simulated_rainfall.csv", "season,day,location_id,rain_mm"),
                               stamp, "season,day,location_id,rain_mm");
  double total = 0.0;
  for (int season = 0; season < cfg.sim_seasons; ++season) {
    const auto sim = simulate_season(model, crp, initial, cfg.sim_length,
                                     mix64(cfg.sampler.seed + static_cast<std::uint64_t>(season)));
    for (std::size_t t = 0; t < sim.labels.size(); ++t) {
      double agg = 0.0;
      for (std::size_t s = 0; s < S; ++s) {
        agg += sim.rain(s, t);
        rain << season << ',' << t << ',' << s << ',' << csv::format(sim.rain(s, t)) << '\n';
      }
      total += agg;
      seasons << season << ',' << t << ',' << sim.labels[t] << ',' << csv::format(agg) << '\n';
    }
  }
  seasons.close();
  rain.close();
  outputs.verify();
  std::cout << "simulate: " << cfg.sim_seasons << " seasons of " << cfg.sim_length
            << " days, mean daily aggregate "
            << csv::format(total / (static_cast<double>(cfg.sim_seasons) * cfg.sim_length))
            << " mm/day\n";
  return 0;
}

int cmd_evaluate(const RunConfig& cfg) {
  const auto field = load_field(cfg);
  const auto state = read_state(cfg.fit_dir, field);
  const auto stamp = cfg.stamp("evaluate");
  const int workers = cfg.sampler.worker_count;
  const auto seed = cfg.sampler.seed;
  const auto baseline_z = threshold_discretize(field, ThresholdMode::local());
  const int k_loc = cfg.baseline_k_locations > 0 ? cfg.baseline_k_locations : distinct_count(state.v);
  const int k_day = cfg.baseline_k_days > 0 ? cfg.baseline_k_days : distinct_count(state.u);
  const std::size_t S = field.n_locations(), D = field.n_days();

  Matrix<double> day_items(D, S);
  for (std::size_t s = 0; s < S; ++s)
    for (std::size_t t = 0; t < D; ++t) day_items(t, s) = field.x(s, t);

  struct Row {
    std::string method, axis;
    int k;
    EvalReport r;
  };
  std::vector<Row> rows;
  const Affinity euclid{kernels::Metric::euclidean, 0.0};
  const Affinity hamming{kernels::Metric::hamming, 0.0};

  rows.push_back({"mrf", "locations", distinct_count(state.v),
                  evaluate_temporal_clustering(field, state.v, state.z)});
  rows.push_back({"kmeans", "locations", k_loc,
                  evaluate_temporal_clustering(field, kmeans(field.x, k_loc, seed, 300, workers).labels,
                                               baseline_z)});
  rows.push_back({"spect_euclid", "locations", k_loc,
                  evaluate_temporal_clustering(
                      field, spectral_locations(field, k_loc, euclid, seed, workers).labels, baseline_z)});
  rows.push_back({"spect_hamming", "locations", k_loc,
                  evaluate_temporal_clustering(
                      field, spectral_locations(field, k_loc, hamming, seed, workers).labels, baseline_z)});

  rows.push_back({"mrf", "days", distinct_count(state.u),
                  evaluate_daily_clustering(field, state.u, state.z)});
  rows.push_back({"kmeans", "days", k_day,
                  evaluate_daily_clustering(field, kmeans(day_items, k_day, seed, 300, workers).labels,
                                            baseline_z)});
  rows.push_back({"spect_euclid", "days", k_day,
                  evaluate_daily_clustering(field, spectral_days(field, k_day, euclid, seed, workers).labels,
                                            baseline_z)});
  rows.push_back({"spect_hamming", "days", k_day,
                  evaluate_daily_clustering(field, spectral_days(field, k_day, hamming, seed, workers).labels,
                                            baseline_z)});

  Outputs outputs(cfg.out_dir);
  const std::string header = "method,axis,k,std_yy,l2_theta,hamm_theta_d,self_transitions";
  {
    auto out = open_with_header(outputs.add("eval_report.csv", header), stamp, header);
    for (const auto& row : rows) {
      out << row.method << ',' << row.axis << ',' << row.k << ',' << csv::format(row.r.std_yy) << ','
          << csv::format(row.r.l2_theta) << ',' << csv::format(row.r.hamm_theta_d) << ',';
      if (row.r.self_transitions) out << *row.r.self_transitions;
      out << '\n';
    }
  }
  outputs.verify();
  std::cout << "evaluate: " << rows.size() << " rows written to "
            << (cfg.out_dir / "eval_report.csv").string() << '\n';
  return 0;
}

}  // namespace monsoon::app
