// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 on any
// failure. Criterion 10 needs real data and reports SKIP without it.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <string>

#include "monsoon/app.hpp"
#include "monsoon/baselines.hpp"
#include "monsoon/gibbs.hpp"
#include "monsoon/patterns.hpp"
#include "monsoon/rng.hpp"
#include "monsoon/spells.hpp"
#include "monsoon/synth.hpp"
#include "monsoon/transitions.hpp"

using namespace monsoon;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  enum { pass, fail, skip } status = pass;
  std::string detail;
};

int failures = 0;

void report(int id, const char* name, const std::function<Outcome()>& body) {
  const auto t0 = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o = {Outcome::fail, std::string("exception: ") + e.what()};
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  const char* tag = o.status == Outcome::pass ? "PASS" : o.status == Outcome::skip ? "SKIP" : "FAIL";
  if (o.status == Outcome::fail) ++failures;
  std::printf("%s %2d %-32s %s [%.2fs]\n", tag, id, name, o.detail.c_str(), secs);
  std::fflush(stdout);
}

std::string fmt(const char* f, double a) {
  char buf[128];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

RainfallField small_field(std::uint64_t seed) {
  RainfallField f{GridGeometry::lattice(2, 2), CalendarIndex::seasons(2000, 1, 3), Matrix<double>(4, 3)};
  SplitMix64 g(seed);
  for (std::size_t s = 0; s < 4; ++s)
    for (std::size_t t = 0; t < 3; ++t) f.x(s, t) = g.uniform() < 0.3 ? 0.0 : -6.0 * std::log1p(-g.uniform());
  return f;
}

std::vector<double> enumerate(LatentState st, const RainfallField& f, const ModelParams& p,
                              const ClusterPrototypes& proto, const std::function<void(LatentState&, int)>& set,
                              int n) {
  std::vector<double> w(static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k) {
    set(st, k);
    w[static_cast<std::size_t>(k)] = joint_log_density(st, f, p, proto);
  }
  const double m = *std::max_element(w.begin(), w.end());
  double sum = 0;
  for (double& x : w) sum += (x = std::exp(x - m));
  for (double& x : w) x /= sum;
  return w;
}

double total_variation(const std::vector<double>& a, const std::vector<double>& b) {
  double d = 0;
  for (std::size_t i = 0; i < a.size(); ++i) d += std::abs(a[i] - b[i]);
  return d / 2;
}

// Maximal within-season runs of `value`, scanned one day at a time.
std::vector<Run> naive_runs(const std::vector<int>& seq, const CalendarIndex& cal, int value) {
  std::vector<Run> runs;
  int start = -1;
  for (std::size_t t = 0; t <= seq.size(); ++t) {
    const bool boundary = t == seq.size() || (t > 0 && !cal.same_season(t - 1, t));
    if (start >= 0 && (boundary || seq[t] != value)) {
      runs.push_back({start, static_cast<int>(t) - 1});
      start = -1;
    }
    if (t < seq.size() && seq[t] == value && start < 0) start = static_cast<int>(t);
  }
  return runs;
}

Outcome criterion_1() {
  const auto t0 = std::chrono::steady_clock::now();
  double worst = 0;
  for (std::uint64_t seed = 1; seed <= 50; ++seed) {
    const auto f = small_field(seed);
    ModelParams p;
    p.max_clusters_u = p.max_clusters_v = 2;
    p.j_temporal = 0.7;
    p.j_spatial = 1.3;
    p = resolve_params(p, f);
    SplitMix64 g(seed * 31);
    LatentState st{BinaryMatrix(4, 3, 0), std::vector<int>(3), std::vector<int>(4)};
    for (std::size_t s = 0; s < 4; ++s)
      for (std::size_t t = 0; t < 3; ++t) st.z(s, t) = static_cast<unsigned char>(g.below(2));
    for (auto& u : st.u) u = static_cast<int>(g.below(2));
    for (auto& v : st.v) v = static_cast<int>(g.below(2));
    const auto proto = refresh_prototypes(st, f, p);
    for (std::size_t s = 0; s < 4; ++s)
      for (std::size_t t = 0; t < 3; ++t) {
        const double pz = conditional_z(s, t, st, f, p, proto);
        const auto ref = enumerate(st, f, p, proto, [&](LatentState& x, int k) { x.z(s, t) = static_cast<unsigned char>(k); }, 2);
        worst = std::max(worst, total_variation({1 - pz, pz}, ref));
      }
    for (std::size_t t = 0; t < 3; ++t) {
      const auto ref = enumerate(st, f, p, proto, [&](LatentState& x, int k) { x.u[t] = k; }, 2);
      worst = std::max(worst, total_variation(conditional_u(t, st, f, p, proto), ref));
    }
    for (std::size_t s = 0; s < 4; ++s) {
      const auto ref = enumerate(st, f, p, proto, [&](LatentState& x, int k) { x.v[s] = k; }, 2);
      worst = std::max(worst, total_variation(conditional_v(s, st, f, p, proto), ref));
    }
  }
  const double secs = seconds_since(t0);
  const bool ok = worst < 1e-9 && secs < 10;
  return {ok ? Outcome::pass : Outcome::fail,
          "max TV " + fmt("%.2e", worst) + " over 50 states (< 1e-9), " + fmt("%.2fs", secs) + " (< 10s)"};
}

Outcome criterion_2() {
  double worst_ari = 1, worst_cdp = 1, worst_secs = 0;
  for (std::uint64_t seed = 1; seed <= 3; ++seed) {
    auto spec = banded_synth_spec(8, 8, 4, 2);
    spec.flip_noise = 0.1;
    spec.seed = seed;
    const auto synth = synth_generate(spec);
    const auto t0 = std::chrono::steady_clock::now();
    ModelParams p;
    p.max_clusters_u = p.max_clusters_v = 4;
    p = resolve_params(p, synth.field);
    SamplerConfig c;
    c.n_sweeps = 200;
    c.burn_in = 50;
    c.seed = seed + 100;
    const auto r = run(synth.field, p, c);
    const auto set = extract_spatial(synth.field, r.map_state, 4);
    worst_secs = std::max(worst_secs, seconds_since(t0));
    worst_ari = std::min(worst_ari, adjusted_rand_index(r.map_state.u, synth.u));
    // Each extracted pattern is compared with the planted pattern most of its
    // days came from; planted support is wet probability > 0.5.
    long match = 0, cells = 0;
    for (const auto& pat : set.patterns) {
      std::vector<int> votes(4, 0);
      for (int t : pat.days) ++votes[static_cast<std::size_t>(synth.u[static_cast<std::size_t>(t)])];
      const auto planted = static_cast<std::size_t>(std::max_element(votes.begin(), votes.end()) - votes.begin());
      for (std::size_t s = 0; s < 64; ++s, ++cells)
        match += (pat.cdp[s] != 0) == (spec.pattern_wet_probs(planted, s) > 0.5);
    }
    worst_cdp = std::min(worst_cdp, static_cast<double>(match) / static_cast<double>(cells));
  }
  const bool ok = worst_ari >= 0.9 && worst_cdp >= 0.9 && worst_secs < 60;
  return {ok ? Outcome::pass : Outcome::fail,
          "min ARI " + fmt("%.4f", worst_ari) + " (>= 0.9), min CDP match " + fmt("%.4f", worst_cdp) +
              " (>= 0.9), max fit " + fmt("%.2fs", worst_secs) + " (< 60s), 3 seeds"};
}

Outcome criterion_3() {
  const double p[3][3] = {{0.6, 0.3, 0.1}, {0.2, 0.5, 0.3}, {0.25, 0.25, 0.5}};
  const int n = 100000;
  const auto cal = CalendarIndex::seasons(2000, 1, n);
  std::vector<int> u(n);
  SplitMix64 g(2024);
  int state = 0;
  for (int t = 0; t < n; ++t) {
    u[static_cast<std::size_t>(t)] = state;
    const double r = g.uniform();
    double acc = 0;
    int next = 2;
    for (int j = 0; j < 3; ++j)
      if (r < (acc += p[state][j])) {
        next = j;
        break;
      }
    state = next;
  }
  const auto m = estimate_transitions(u, cal, {0, 1, 2});
  double linf = 0, row_err = 0;
  for (std::size_t i = 0; i < 3; ++i) {
    double sum = 0;
    for (std::size_t j = 0; j < 3; ++j) {
      linf = std::max(linf, std::abs(m.matrix(i, j) - p[i][j]));
      sum += m.matrix(i, j);
    }
    row_err = std::max(row_err, std::abs(sum - 1));
  }
  const bool ok = linf < 0.01 && row_err <= 1e-12;
  return {ok ? Outcome::pass : Outcome::fail,
          "l_inf " + fmt("%.4f", linf) + " (< 0.01), max |row sum - 1| " + fmt("%.1e", row_err) + " (<= 1e-12)"};
}

Outcome criterion_4() {
  SplitMix64 g(77);
  long mismatches = 0;
  for (int rep = 0; rep < 1000; ++rep) {
    const int len = 1 + static_cast<int>(g.below(500));
    const int seasons = 1 + static_cast<int>(g.below(4));
    const auto cal = CalendarIndex::seasons(2000, seasons, len);
    const std::size_t D = cal.size();
    BinaryMatrix z(1, D, 0);
    std::vector<int> seq(D);
    const double p_wet = g.uniform();
    for (std::size_t t = 0; t < D; ++t) seq[t] = z(0, t) = g.uniform() < p_wet;
    const auto ls = local_spells(z, cal, 1);
    mismatches += ls.wet[0].spells != naive_runs(seq, cal, 1);
    mismatches += ls.dry[0].spells != naive_runs(seq, cal, 0);

    const auto ps = pattern_spell_stats(seq, cal, {0, 1});
    for (int label : {0, 1}) {
      const auto runs = naive_runs(seq, cal, label);
      if (runs.empty()) {
        mismatches += ps.spell_count.count(label) != 0;
        continue;
      }
      long days = 0;
      for (const auto& r : runs) days += r.length();
      mismatches += ps.spell_count.at(label) != static_cast<long>(runs.size());
      mismatches += ps.days.at(label) != days;
      mismatches += ps.mean_length.at(label) != static_cast<double>(days) / static_cast<double>(runs.size());
    }
  }
  long collapse_bad = 0, subseq_bad = 0;
  for (int rep = 0; rep < 1000; ++rep) {
    const int len = static_cast<int>(g.below(200));
    std::vector<int> seq(static_cast<std::size_t>(len));
    for (auto& x : seq) x = static_cast<int>(g.below(5));
    const auto once = collapse_runs(seq);
    collapse_bad += collapse_runs(once) != once;

    if (len < 1) continue;
    const auto cal = CalendarIndex::seasons(2000, 1, len);
    std::map<std::vector<int>, long> naive;
    for (std::size_t i = 0; i + 3 <= once.size(); ++i)
      ++naive[{once[i], once[i + 1], once[i + 2]}];
    std::map<std::vector<int>, long> got;
    for (const auto& sc : frequent_ksubseq(seq, cal, 3, 0)) got[sc.window] = sc.count;
    subseq_bad += got != naive;
  }
  const bool ok = mismatches == 0 && collapse_bad == 0 && subseq_bad == 0;
  return {ok ? Outcome::pass : Outcome::fail,
          "spell mismatches " + std::to_string(mismatches) + ", collapse failures " +
              std::to_string(collapse_bad) + ", subsequence mismatches " + std::to_string(subseq_bad) +
              " (all 0)"};
}

Outcome criterion_5() {
  SplitMix64 g(5);
  long violations = 0;
  for (int rep = 0; rep < 500; ++rep) {
    const int seasons = 1 + static_cast<int>(g.below(4));
    const auto cal = CalendarIndex::seasons(2000, seasons, 10 + static_cast<int>(g.below(120)));
    std::vector<double> y(cal.size());
    double level = 50;
    for (auto& v : y) v = (level = std::max(0.0, level + (g.uniform() - 0.5) * 30));
    const auto ab = act_brk_threshold(y, cal, 3);
    for (int t : ab.active.days) violations += ab.brk.contains(t);
    for (const auto* set : {&ab.active, &ab.brk})
      for (const auto& r : set->spells) {
        violations += r.length() < 3;
        violations += !cal.same_season(static_cast<std::size_t>(r.start), static_cast<std::size_t>(r.end));
      }
  }
  const std::vector<double> y{1, 1, 9, 9, 9, 1, 1, 1};
  const auto hand = act_brk_threshold(y, CalendarIndex::seasons(2000, 1, 8), 3);
  const bool hand_ok = hand.active.spells.size() == 1 && hand.active.spells[0].length() == 3 &&
                       hand.active.spells[0].start == 2 && hand.brk.spells.empty();
  const bool ok = violations == 0 && hand_ok;
  return {ok ? Outcome::pass : Outcome::fail,
          "violations " + std::to_string(violations) + " over 500 series, hand example " +
              (hand_ok ? "one active spell of length 3" : "wrong")};
}

Outcome criterion_6() {
  auto spec = banded_synth_spec(8, 8, 4, 2);
  spec.seed = 6;
  const auto synth = synth_generate(spec);
  ModelParams p;
  p.j_temporal = p.j_spatial = 2;
  p.max_clusters_u = p.max_clusters_v = 4;
  p = resolve_params(p, synth.field);
  SamplerConfig c;
  c.n_sweeps = 150;
  c.burn_in = 50;
  const auto r = run(synth.field, p, c);
  const auto model = coherence_stats(r.map_state.z, synth.field.geometry, synth.field.calendar);
  const auto base = coherence_stats(threshold_discretize(synth.field, ThresholdMode::local()),
                                    synth.field.geometry, synth.field.calendar);
  const bool ok = model.neighbor_agreement > base.neighbor_agreement &&
                  model.day_persistence > base.day_persistence;
  return {ok ? Outcome::pass : Outcome::fail,
          "neighbour " + fmt("%.4f", model.neighbor_agreement) + " vs " + fmt("%.4f", base.neighbor_agreement) +
              ", persistence " + fmt("%.4f", model.day_persistence) + " vs " + fmt("%.4f", base.day_persistence)};
}

Outcome criterion_7() {
  long increases = 0;
  for (std::uint64_t seed = 1; seed <= 100; ++seed) {
    SplitMix64 g(seed);
    const std::size_t n = 20 + g.below(80), dim = 1 + g.below(5);
    Matrix<double> pts(n, dim);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < dim; ++j) pts(i, j) = g.uniform() * 10;
    const int k = 1 + static_cast<int>(g.below(6));
    const auto r = kmeans(pts, k, seed);
    for (std::size_t i = 1; i < r.objective_trace.size(); ++i)
      increases += r.objective_trace[i] > r.objective_trace[i - 1] * (1 + 1e-12);
  }
  Matrix<double> a(7, 7, 0.0);
  for (std::size_t i = 0; i < 7; ++i)
    for (std::size_t j = 0; j < 7; ++j)
      if ((i < 3) == (j < 3)) a(i, j) = 1.0 / (1.0 + static_cast<double>((i * j) % 4));
  const auto blocks = spectral_from_affinity(a, 2, 1);
  const bool blocks_ok = adjusted_rand_index(blocks.labels, {0, 0, 0, 1, 1, 1, 1}) == 1.0;

  RainfallField f{GridGeometry::lattice(2, 3), CalendarIndex::seasons(2000, 1, 5), Matrix<double>(6, 5)};
  SplitMix64 g(9);
  for (std::size_t s = 0; s < 6; ++s)
    for (std::size_t t = 0; t < 5; ++t) f.x(s, t) = g.uniform() * 20;
  const auto z = local_mean_threshold(f);
  const auto loc = evaluate_temporal_clustering(f, {0, 1, 2, 3, 4, 5}, z);
  const auto day = evaluate_daily_clustering(f, {0, 1, 2, 3, 4}, z);
  const bool singleton_ok = loc.std_yy == 0 && loc.l2_theta == 0 && loc.hamm_theta_d == 0 &&
                            day.std_yy == 0 && day.l2_theta == 0 && day.hamm_theta_d == 0;
  const bool ok = increases == 0 && blocks_ok && singleton_ok;
  return {ok ? Outcome::pass : Outcome::fail,
          "objective increases " + std::to_string(increases) + " over 100 instances, blocks " +
              (blocks_ok ? "exact" : "wrong") + ", singletons " + (singleton_ok ? "zero" : "nonzero")};
}

Outcome criterion_8() {
  TransitionModel model;
  model.labels = {0, 1};
  model.matrix = Matrix<double>(2, 2);
  model.matrix(0, 0) = 0.9;
  model.matrix(0, 1) = 0.1;
  model.matrix(1, 0) = 0.2;
  model.matrix(1, 1) = 0.8;
  Matrix<double> crp(2, 3);
  const double rows[2][3] = {{1.0, 2.0, 0.5}, {10.0, 14.0, 6.0}};
  for (std::size_t k = 0; k < 2; ++k)
    for (std::size_t s = 0; s < 3; ++s) crp(k, s) = rows[k][s];
  const auto pi = stationary_distribution(model.matrix);
  const auto sim = simulate_season(model, crp, pi, 100000, 8);
  double freq0 = 0, agg = 0;
  for (std::size_t t = 0; t < sim.labels.size(); ++t) {
    freq0 += sim.labels[t] == 0;
    for (std::size_t s = 0; s < 3; ++s) agg += sim.rain(s, t);
  }
  freq0 /= 1e5;
  agg /= 1e5;
  const double expected = (2.0 / 3) * 3.5 + (1.0 / 3) * 30.0;
  const double freq_err = std::abs(freq0 - 2.0 / 3);
  const double agg_err = std::abs(agg - expected) / expected;
  const bool ok = freq_err < 0.01 && agg_err < 0.01;
  return {ok ? Outcome::pass : Outcome::fail,
          "freq (" + fmt("%.4f", freq0) + ", " + fmt("%.4f", 1 - freq0) + ") vs (0.6667, 0.3333), aggregate " +
              fmt("%.4f", agg) + " vs " + fmt("%.4f", expected) + " (rel err " + fmt("%.4f", agg_err) + ")"};
}

Outcome criterion_9() {
  const fs::path root = fs::temp_directory_path() / "monsoon_acceptance_determinism";
  fs::remove_all(root);
  fs::create_directories(root);
  {
    std::ofstream cfg(root / "run.cfg");
    cfg << "data = synth/rainfall.csv\ngeometry = synth/geometry.csv\n"
           "synth.rows = 6\nsynth.cols = 6\nsynth.years = 2\nsynth.patterns = 3\n"
           "max_clusters_u = 4\nmax_clusters_v = 4\nn_sweeps = 40\nburn_in = 10\nseed = 13\n"
           "prominence = four_of_eight\nsim.seasons = 3\n";
  }
  auto load = [&](const std::string& out, const std::string& workers) {
    return app::load_run_config(root / "run.cfg", {{"out", (root / out).string()}, {"workers", workers}});
  };
  app::cmd_synth(load("synth", "1"));
  const char* fit_files[] = {"model_params.txt", "state_z.csv", "state_u.csv", "state_v.csv",
                             "diagnostics.csv", "patterns_spatial.csv", "patterns_summary.csv",
                             "patterns_temporal.csv", "prototypes_pi.csv", "prototypes_tau.csv"};
  for (const char* run : {"a1", "b1", "a4", "b4"}) {
    const std::string w(1, run[1]);
    app::cmd_fit(load(run, w));
    app::cmd_analyze(load(run, w));
    app::cmd_simulate(load(run, w));
  }
  int compared = 0, differing = 0;
  for (const char* other : {"b1", "a4", "b4"}) {
    std::vector<std::string> names(std::begin(fit_files), std::end(fit_files));
    names.push_back("simulated_seasons.csv");
    names.push_back("simulated_rainfall.csv");
    for (const auto& name : names) {
      ++compared;
      const auto a = slurp(root / "a1" / name);
      differing += a.empty() || a != slurp(root / other / name);
    }
  }
  fs::remove_all(root);
  return {differing == 0 ? Outcome::pass : Outcome::fail,
          std::to_string(compared - differing) + "/" + std::to_string(compared) +
              " output files byte-identical across reruns and workers {1, 4}"};
}

Outcome criterion_10() {
  const char* dir = std::getenv("MONSOON_IMD_DIR");
  if (!dir) return {Outcome::skip, "set MONSOON_IMD_DIR to a directory with rainfall.csv and geometry.csv"};
  const fs::path in(dir);
  const fs::path out = fs::temp_directory_path() / "monsoon_acceptance_real";
  fs::remove_all(out);
  csv::KeyValues kv{{"data", (in / "rainfall.csv").string()}, {"geometry", (in / "geometry.csv").string()},
                    {"out", out.string()}};
  if (fs::exists(in / "masks.csv")) kv["masks"] = (in / "masks.csv").string();
  const auto cfg = app::run_config_from(kv, in);
  app::cmd_fit(cfg);
  app::cmd_analyze(cfg);
  app::cmd_simulate(cfg);
  app::cmd_evaluate(cfg);
  const auto rep = csv::read_key_values(out / "analysis_report.txt");
  const double sim = csv::parse_double(rep.at("mean_hamming_similarity"), "report");
  // Reported against 0.84 +/- 0.05 without gating.
  return {Outcome::pass, "mean Hamming similarity " + fmt("%.4f", sim) + " (reference 0.84 +/- 0.05: " +
                             (std::abs(sim - 0.84) <= 0.05 ? "within" : "outside") + ", not gating)"};
}

}  // namespace

int main() {
  report(1, "conditional-oracle equivalence", criterion_1);
  report(2, "synthetic recovery", criterion_2);
  report(3, "transition estimation", criterion_3);
  report(4, "run/spell oracle", criterion_4);
  report(5, "active/break contract", criterion_5);
  report(6, "coherence direction", criterion_6);
  report(7, "baselines", criterion_7);
  report(8, "simulator fidelity", criterion_8);
  report(9, "determinism", criterion_9);
  report(10, "real data (optional)", criterion_10);
  std::printf("%s: %d failing\n", failures ? "FAIL" : "PASS", failures);
  return failures ? 1 : 0;
}
