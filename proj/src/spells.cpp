#include "monsoon/spells.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>

#include "monsoon/gibbs.hpp"

namespace monsoon {

const char* to_string(SpellKind k) {
  switch (k) {
    case SpellKind::active: return "active";
    case SpellKind::brk: return "break";
    case SpellKind::wet: return "wet";
    case SpellKind::dry: return "dry";
  }
  return "?";
}

const char* to_string(SpellScale s) {
  switch (s) {
    case SpellScale::all_india: return "all_india";
    case SpellScale::region: return "region";
    case SpellScale::grid: return "grid";
  }
  return "?";
}

bool SpellSet::contains(int day) const {
  return std::binary_search(days.begin(), days.end(), day);
}

std::vector<Run> find_runs(std::span<const unsigned char> mask,
                           const CalendarIndex& calendar, int min_run) {
  if (mask.size() != calendar.size()) throw DataError("find_runs: mask does not match calendar");
  std::vector<Run> runs;
  std::size_t t = 0;
  while (t < mask.size()) {
    if (!mask[t]) {
      ++t;
      continue;
    }
    std::size_t end = t;
    while (end + 1 < mask.size() && mask[end + 1] && calendar.same_season(end, end + 1)) ++end;
    if (static_cast<int>(end - t + 1) >= min_run)
      runs.push_back({static_cast<int>(t), static_cast<int>(end)});
    t = end + 1;
  }
  return runs;
}

namespace {

SpellSet make_set(SpellKind kind, SpellScale scale, int id,
                  std::span<const unsigned char> mask, const CalendarIndex& calendar,
                  int min_run) {
  SpellSet set;
  set.kind = kind;
  set.scale = scale;
  set.scale_id = id;
  for (std::size_t t = 0; t < mask.size(); ++t)
    if (mask[t]) set.days.push_back(static_cast<int>(t));
  set.spells = find_runs(mask, calendar, min_run);
  return set;
}

SetStats set_stats(const SpellSet& set, const RainfallField& field,
                   const std::vector<double>& y, const std::vector<double>& loc_mean) {
  SetStats st;
  st.size = set.days.size();
  const double S = static_cast<double>(field.n_locations());
  for (int t : set.days) {
    const auto tt = static_cast<std::size_t>(t);
    st.mean_rain_per_grid += y[tt] / S;
    int above = 0;
    for (std::size_t s = 0; s < field.n_locations(); ++s) above += field.x(s, tt) > loc_mean[s];
    st.mean_above_mean_locations += above;
  }
  if (st.size) {
    st.mean_rain_per_grid /= static_cast<double>(st.size);
    st.mean_above_mean_locations /= static_cast<double>(st.size);
  }
  st.spell_count = set.spells.size();
  for (const auto& r : set.spells) st.mean_spell_length += r.length();
  if (st.spell_count) st.mean_spell_length /= static_cast<double>(st.spell_count);
  return st;
}

}  // namespace

AggregateThresholds aggregate_thresholds(std::span<const double> y) {
  AggregateThresholds th;
  if (y.empty()) {
    th.degenerate = true;
    return th;
  }
  const double n = static_cast<double>(y.size());
  th.mean = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double ss = 0.0;
  for (double v : y) ss += (v - th.mean) * (v - th.mean);
  th.sd = std::sqrt(ss / n);
  th.degenerate = th.sd <= 1e-12 * std::max(1.0, std::abs(th.mean));
  return th;
}

ActiveBreak act_brk_threshold(std::span<const double> y,
                              const CalendarIndex& calendar, int min_run) {
  if (y.size() != calendar.size()) throw DataError("act_brk_threshold: series does not match calendar");
  ActiveBreak out;
  out.thresholds = aggregate_thresholds(y);
  std::vector<unsigned char> act(y.size(), 0), brk(y.size(), 0);
  if (!out.thresholds.degenerate) {
    const double hi = out.thresholds.mean + out.thresholds.sd;
    const double lo = out.thresholds.mean - out.thresholds.sd;
    for (std::size_t t = 0; t < y.size(); ++t) {
      act[t] = y[t] >= hi;
      brk[t] = y[t] < lo;
    }
  }
  out.active = make_set(SpellKind::active, SpellScale::all_india, 0, act, calendar, min_run);
  out.brk = make_set(SpellKind::brk, SpellScale::all_india, 0, brk, calendar, min_run);
  return out;
}

ClusterClasses classify_clusters(const std::map<int, double>& mu_k,
                                 const AggregateThresholds& th) {
  ClusterClasses c;
  for (const auto& [label, mu] : mu_k) {
    if (mu >= th.mean + th.sd) c.active.push_back(label);
    else if (mu <= th.mean - th.sd) c.brk.push_back(label);
  }
  return c;
}

ActiveBreak act_brk_cluster(std::span<const int> u, const std::map<int, double>& mu_k,
                            std::span<const double> y, const CalendarIndex& calendar,
                            int min_run) {
  if (u.size() != calendar.size() || y.size() != calendar.size()) {
    throw DataError("act_brk_cluster: series do not match calendar");
  }
  ActiveBreak out;
  out.thresholds = aggregate_thresholds(y);
  const auto classes = classify_clusters(mu_k, out.thresholds);
  std::vector<unsigned char> act(u.size(), 0), brk(u.size(), 0);
  for (std::size_t t = 0; t < u.size(); ++t) {
    act[t] = std::find(classes.active.begin(), classes.active.end(), u[t]) != classes.active.end();
    brk[t] = std::find(classes.brk.begin(), classes.brk.end(), u[t]) != classes.brk.end();
  }
  out.active = make_set(SpellKind::active, SpellScale::all_india, 1, act, calendar, min_run);
  out.brk = make_set(SpellKind::brk, SpellScale::all_india, 1, brk, calendar, min_run);
  return out;
}

SpellComparison compare_spells(const SpellSet& a, const SpellSet& b,
                               const RainfallField& field) {
  if (a.scale != b.scale) throw DataError("compare_spells: scale mismatch");
  const auto y = daily_aggregate(field);
  std::vector<double> loc_mean(field.n_locations(), 0.0);
  for (std::size_t s = 0; s < field.n_locations(); ++s) {
    for (double v : field.x.row(s)) loc_mean[s] += v;
    loc_mean[s] /= static_cast<double>(field.n_days());
  }
  SpellComparison c;
  c.a = set_stats(a, field, y, loc_mean);
  c.b = set_stats(b, field, y, loc_mean);
  std::vector<int> common;
  std::set_intersection(a.days.begin(), a.days.end(), b.days.begin(), b.days.end(),
                        std::back_inserter(common));
  c.intersection = common.size();
  return c;
}

LocalSpells local_spells(const BinaryMatrix& z, const CalendarIndex& calendar,
                         int min_run) {
  if (z.cols() != calendar.size()) throw DataError("local_spells: z does not match calendar");
  LocalSpells out;
  const std::size_t S = z.rows();
  std::vector<unsigned char> dry(z.cols());
  const auto mean_len = [](const std::vector<Run>& runs) {
    if (runs.empty()) return 0.0;
    double total = 0.0;
    for (const auto& r : runs) total += r.length();
    return total / static_cast<double>(runs.size());
  };
  for (std::size_t s = 0; s < S; ++s) {
    const auto wet = z.row(s);
    for (std::size_t t = 0; t < wet.size(); ++t) dry[t] = !wet[t];
    const int id = static_cast<int>(s);
    out.wet.push_back(make_set(SpellKind::wet, SpellScale::grid, id, wet, calendar, min_run));
    out.dry.push_back(make_set(SpellKind::dry, SpellScale::grid, id, dry, calendar, min_run));
    out.mean_wet_length.push_back(mean_len(out.wet.back().spells));
    out.mean_dry_length.push_back(mean_len(out.dry.back().spells));
  }
  return out;
}

std::vector<RegionalSpells> regional_spells(
    const std::map<int, std::vector<unsigned char>>& cds,
    const CalendarIndex& calendar, int min_run) {
  std::vector<RegionalSpells> out;
  for (const auto& [region, series] : cds) {
    std::vector<unsigned char> dry(series.size());
    for (std::size_t t = 0; t < series.size(); ++t) dry[t] = !series[t];
    out.push_back({region,
                   make_set(SpellKind::wet, SpellScale::region, region, series, calendar, min_run),
                   make_set(SpellKind::dry, SpellScale::region, region, dry, calendar, min_run)});
  }
  return out;
}

Coherence coherence_stats(const BinaryMatrix& z, const GridGeometry& geometry,
                          const CalendarIndex& calendar) {
  const std::size_t S = z.rows(), D = z.cols();
  if (geometry.size() != S || calendar.size() != D) {
    throw DataError("coherence_stats: dimension mismatch");
  }
  long pair_total = 0, pair_equal = 0;
  for (std::size_t s = 0; s < S; ++s)
    for (int n : geometry.neighbors(s)) {
      const auto sn = static_cast<std::size_t>(n);
      if (sn <= s) continue;
      for (std::size_t t = 0; t < D; ++t) {
        ++pair_total;
        pair_equal += z(s, t) == z(sn, t);
      }
    }
  long step_total = 0, step_equal = 0;
  for (std::size_t s = 0; s < S; ++s)
    for (std::size_t t = 0; t + 1 < D; ++t) {
      if (!calendar.same_season(t, t + 1)) continue;
      ++step_total;
      step_equal += z(s, t) == z(s, t + 1);
    }
  Coherence c;
  c.neighbor_agreement =
      pair_total ? static_cast<double>(pair_equal) / static_cast<double>(pair_total) : std::nan("");
  c.day_persistence =
      step_total ? static_cast<double>(step_equal) / static_cast<double>(step_total) : std::nan("");
  return c;
}

BinaryMatrix threshold_discretize(const RainfallField& field, ThresholdMode mode) {
  if (mode.local_mean) return local_mean_threshold(field);
  if (!(mode.fixed_mm >= 0.0)) throw DataError("threshold_discretize: threshold must be >= 0");
  BinaryMatrix z(field.n_locations(), field.n_days(), 0);
  for (std::size_t i = 0; i < z.data().size(); ++i)
    z.data()[i] = field.x.data()[i] > mode.fixed_mm ? 1 : 0;
  return z;
}

void write_spell_rows(std::ostream& out, const SpellSet& set,
                      const CalendarIndex& calendar) {
  for (const auto& r : set.spells) {
    out << to_string(set.scale) << ',' << set.scale_id << ',' << to_string(set.kind)
        << ',' << calendar.iso_date(static_cast<std::size_t>(r.start)) << ','
        << calendar.iso_date(static_cast<std::size_t>(r.end)) << ',' << r.length()
        << '\n';
  }
}

}  // namespace monsoon
