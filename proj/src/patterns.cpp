#include "monsoon/patterns.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

namespace monsoon {

double SpatialPattern::aggregate() const {
  return std::accumulate(crp.begin(), crp.end(), 0.0);
}

const SpatialPattern* CanonicalPatternSet::find(int label) const {
  for (const auto& p : patterns)
    if (p.label == label) return &p;
  return nullptr;
}

std::vector<std::size_t> CanonicalPatternSet::ranks() const {
  std::vector<std::size_t> r(patterns.size());
  for (std::size_t i = 0; i < order.size(); ++i) r[order[i]] = i;
  return r;
}

const TemporalPattern* TemporalPatternSet::find(int label) const {
  for (const auto& p : patterns)
    if (p.label == label) return &p;
  return nullptr;
}

CanonicalPatternSet extract_spatial(const RainfallField& field,
                                    const LatentState& state, int n_labels) {
  const std::size_t S = field.n_locations(), D = field.n_days();
  if (state.u.size() != D || state.z.rows() != S || state.z.cols() != D) {
    throw DataError("extract_spatial: state does not match field");
  }
  const auto y = daily_aggregate(field);
  std::vector<std::vector<int>> days(static_cast<std::size_t>(n_labels));
  for (std::size_t t = 0; t < D; ++t) {
    const int l = state.u[t];
    if (l < 0 || l >= n_labels) throw DataError("extract_spatial: label out of range");
    days[static_cast<std::size_t>(l)].push_back(static_cast<int>(t));
  }

  CanonicalPatternSet set;
  for (int l = 0; l < n_labels; ++l) {
    auto& members = days[static_cast<std::size_t>(l)];
    if (members.empty()) {
      set.empty_labels.push_back(l);
      continue;
    }
    SpatialPattern p;
    p.label = l;
    p.crp.assign(S, 0.0);
    p.cdp.assign(S, 0);
    const double n = static_cast<double>(members.size());
    for (std::size_t s = 0; s < S; ++s) {
      double sum = 0.0;
      int wet = 0;
      for (int t : members) {
        sum += field.x(s, static_cast<std::size_t>(t));
        wet += state.z(s, static_cast<std::size_t>(t));
      }
      p.crp[s] = sum / n;
      p.cdp[s] = 2 * wet >= static_cast<int>(members.size()) ? 1 : 0;
    }
    double ysum = 0.0;
    for (int t : members) ysum += y[static_cast<std::size_t>(t)];
    p.mu_k = ysum / n;
    p.wet_fraction = S ? static_cast<double>(std::count(p.cdp.begin(), p.cdp.end(), 1)) /
                             static_cast<double>(S)
                       : 0.0;
    p.days = std::move(members);
    set.patterns.push_back(std::move(p));
  }
  set.order.resize(set.patterns.size());
  std::iota(set.order.begin(), set.order.end(), 0);
  std::vector<double> agg(set.patterns.size());
  for (std::size_t i = 0; i < agg.size(); ++i) agg[i] = set.patterns[i].aggregate();
  std::stable_sort(set.order.begin(), set.order.end(),
                   [&](std::size_t a, std::size_t b) { return agg[a] < agg[b]; });
  return set;
}

TemporalPatternSet extract_temporal(const RainfallField& field,
                                    const LatentState& state, int n_labels) {
  const std::size_t S = field.n_locations(), D = field.n_days();
  if (state.v.size() != S || state.z.rows() != S || state.z.cols() != D) {
    throw DataError("extract_temporal: state does not match field");
  }
  std::vector<std::vector<int>> locs(static_cast<std::size_t>(n_labels));
  for (std::size_t s = 0; s < S; ++s) {
    const int l = state.v[s];
    if (l < 0 || l >= n_labels) throw DataError("extract_temporal: label out of range");
    locs[static_cast<std::size_t>(l)].push_back(static_cast<int>(s));
  }
  TemporalPatternSet set;
  for (int l = 0; l < n_labels; ++l) {
    auto& members = locs[static_cast<std::size_t>(l)];
    if (members.empty()) {
      set.empty_labels.push_back(l);
      continue;
    }
    TemporalPattern p;
    p.label = l;
    p.cts.assign(D, 0.0);
    std::vector<int> wet(D, 0);
    for (int s : members) {
      const auto row = field.x.row(static_cast<std::size_t>(s));
      const auto zrow = state.z.row(static_cast<std::size_t>(s));
      for (std::size_t t = 0; t < D; ++t) {
        p.cts[t] += row[t];
        wet[t] += zrow[t];
      }
    }
    p.cds.assign(D, 0);
    const double n = static_cast<double>(members.size());
    for (std::size_t t = 0; t < D; ++t) {
      p.cts[t] /= n;
      p.cds[t] = 2 * wet[t] >= static_cast<int>(members.size()) ? 1 : 0;
    }
    p.locations = std::move(members);
    set.patterns.push_back(std::move(p));
  }
  return set;
}

int default_min_years(int n_years, ProminenceRule rule) {
  const int num = rule == ProminenceRule::five_of_eight ? 5 : 4;
  return std::max(1, (num * n_years + 7) / 8);
}

void mark_prominent(CanonicalPatternSet& set, const CalendarIndex& calendar,
                    int min_years) {
  for (auto& p : set.patterns) {
    std::set<int> seasons;
    for (int t : p.days) seasons.insert(calendar.season_of(static_cast<std::size_t>(t)));
    p.prominent = static_cast<int>(seasons.size()) >= min_years;
  }
}

namespace {

double quantile(std::vector<double> values, double q) {
  std::sort(values.begin(), values.end());
  const double h = q * static_cast<double>(values.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const auto hi = std::min(lo + 1, values.size() - 1);
  return values[lo] + (h - static_cast<double>(lo)) * (values[hi] - values[lo]);
}

double masked_activity(const std::vector<unsigned char>& cdp,
                       const std::vector<unsigned char>& mask) {
  int n = 0, wet = 0;
  for (std::size_t s = 0; s < cdp.size(); ++s) {
    if (!mask[s]) continue;
    ++n;
    wet += cdp[s];
  }
  return n ? static_cast<double>(wet) / n : 0.0;
}

}  // namespace

void assign_families(CanonicalPatternSet& set, const FamilyRule& rule) {
  std::vector<double> wet;
  bool needs_rule = false;
  for (const auto& p : set.patterns) {
    if (!p.prominent) continue;
    wet.push_back(p.wet_fraction);
    if (!rule.overrides.count(p.label)) needs_rule = true;
  }
  const std::size_t S = set.patterns.empty() ? 0 : set.patterns.front().cdp.size();
  if (needs_rule && (rule.monsoon_zone.size() != S || rule.north.size() != S)) {
    throw DataError("assign_families: region masks are required (or overrides for every prominent pattern)");
  }
  for (const auto& [label, family] : rule.overrides) {
    if (family < 1 || family > 3) {
      throw DataError("assign_families: family override must be 1, 2 or 3");
    }
  }
  const double cut = wet.empty() ? 0.0 : quantile(wet, rule.dry_quantile);
  for (auto& p : set.patterns) {
    if (!p.prominent) {
      p.family = 0;
      continue;
    }
    if (auto it = rule.overrides.find(p.label); it != rule.overrides.end()) {
      p.family = it->second;
    } else if (p.wet_fraction < cut) {
      p.family = 1;
    } else if (masked_activity(p.cdp, rule.monsoon_zone) >=
               masked_activity(p.cdp, rule.north)) {
      p.family = 3;
    } else {
      p.family = 2;
    }
  }
}

std::vector<std::array<double, 4>> monthly_distribution(const CanonicalPatternSet& set,
                                                        const CalendarIndex& calendar) {
  const double n_years = std::max(1, calendar.n_years());
  std::vector<std::array<double, 4>> out;
  out.reserve(set.patterns.size());
  for (const auto& p : set.patterns) {
    std::array<double, 4> counts{};
    for (int t : p.days) {
      const int m = calendar[static_cast<std::size_t>(t)].month;
      if (m >= 6 && m <= 9) counts[static_cast<std::size_t>(m - 6)] += 1.0;
    }
    for (double& c : counts) c /= n_years;
    out.push_back(counts);
  }
  return out;
}

double hamming_similarity(std::span<const unsigned char> a,
                          std::span<const unsigned char> b) {
  if (a.size() != b.size()) throw DataError("hamming_similarity: length mismatch");
  if (a.empty()) return 1.0;
  std::size_t mismatches = 0;
  for (std::size_t i = 0; i < a.size(); ++i) mismatches += a[i] != b[i];
  return 1.0 - static_cast<double>(mismatches) / static_cast<double>(a.size());
}

DayMatch match_day(std::span<const double> x_col,
                   std::span<const unsigned char> z_col,
                   const CanonicalPatternSet& set) {
  DayMatch m;
  double best_l2 = std::numeric_limits<double>::infinity();
  double best_sim = -1.0;
  for (const auto& p : set.patterns) {
    if (p.crp.size() != x_col.size() || p.cdp.size() != z_col.size()) {
      throw DataError("match_day: dimension mismatch");
    }
    double d = 0.0;
    for (std::size_t s = 0; s < x_col.size(); ++s)
      d += (x_col[s] - p.crp[s]) * (x_col[s] - p.crp[s]);
    // Patterns are in increasing label order, so strict comparison keeps the
    // lower label on ties.
    if (d < best_l2) {
      best_l2 = d;
      m.crp_label = p.label;
    }
    const double sim = hamming_similarity(z_col, p.cdp);
    if (sim > best_sim) {
      best_sim = sim;
      m.cdp_label = p.label;
    }
  }
  m.hamming_similarity = best_sim < 0 ? 0.0 : best_sim;
  return m;
}

BinaryMatrix cdp_matrix(const CanonicalPatternSet& set, int n_labels,
                        std::size_t n_locations) {
  BinaryMatrix out(static_cast<std::size_t>(n_labels), n_locations, 0);
  for (const auto& p : set.patterns) {
    auto row = out.row(static_cast<std::size_t>(p.label));
    std::copy(p.cdp.begin(), p.cdp.end(), row.begin());
  }
  return out;
}

}  // namespace monsoon
