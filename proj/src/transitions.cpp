#include "monsoon/transitions.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include "monsoon/csv.hpp"
#include "monsoon/mrf_model.hpp"
#include "monsoon/rng.hpp"

namespace monsoon {

int TransitionModel::index_of(int label) const {
  for (std::size_t i = 0; i < labels.size(); ++i)
    if (labels[i] == label) return static_cast<int>(i);
  return -1;
}

TransitionModel estimate_transitions(std::span<const int> u,
                                     const CalendarIndex& calendar,
                                     const std::vector<int>& labels,
                                     bool include_cross_season) {
  if (labels.empty()) throw DataError("estimate_transitions: no labels (K = 0)");
  if (u.size() != calendar.size()) throw DataError("estimate_transitions: u does not match calendar");
  TransitionModel m;
  m.labels = labels;
  m.include_cross_season = include_cross_season;
  const std::size_t K = labels.size();
  m.counts = Matrix<long>(K, K, 0);
  m.matrix = Matrix<double>(K, K, 0.0);
  m.empty_rows.assign(K, false);

  std::map<int, std::size_t> index;
  for (std::size_t i = 0; i < K; ++i) index[labels[i]] = i;
  for (std::size_t t = 0; t + 1 < u.size(); ++t) {
    if (!include_cross_season && !calendar.same_season(t, t + 1)) continue;
    auto a = index.find(u[t]), b = index.find(u[t + 1]);
    if (a == index.end() || b == index.end()) continue;
    ++m.counts(a->second, b->second);
  }
  for (std::size_t i = 0; i < K; ++i) {
    long total = 0;
    for (long c : m.counts.row(i)) total += c;
    if (total == 0) {
      m.empty_rows[i] = true;
      for (double& p : m.matrix.row(i)) p = 1.0 / static_cast<double>(K);
      continue;
    }
    for (std::size_t j = 0; j < K; ++j)
      m.matrix(i, j) = static_cast<double>(m.counts(i, j)) / static_cast<double>(total);
  }
  return m;
}

Matrix<double> zero_diagonal(const Matrix<double>& m) {
  Matrix<double> out = m;
  for (std::size_t i = 0; i < std::min(m.rows(), m.cols()); ++i) out(i, i) = 0.0;
  return out;
}

std::vector<std::size_t> family_order(const std::vector<int>& labels,
                                      const std::map<int, int>& family_of) {
  std::vector<std::size_t> perm(labels.size());
  std::iota(perm.begin(), perm.end(), 0);
  const auto fam = [&](std::size_t i) {
    auto it = family_of.find(labels[i]);
    return it == family_of.end() ? 4 : it->second;
  };
  std::stable_sort(perm.begin(), perm.end(),
                   [&](std::size_t a, std::size_t b) { return fam(a) < fam(b); });
  return perm;
}

Matrix<double> permute(const Matrix<double>& m, const std::vector<std::size_t>& perm) {
  Matrix<double> out(perm.size(), perm.size());
  for (std::size_t i = 0; i < perm.size(); ++i)
    for (std::size_t j = 0; j < perm.size(); ++j) out(i, j) = m(perm[i], perm[j]);
  return out;
}

std::vector<std::size_t> inverse_permutation(const std::vector<std::size_t>& perm) {
  std::vector<std::size_t> inv(perm.size());
  for (std::size_t i = 0; i < perm.size(); ++i) inv[perm[i]] = i;
  return inv;
}

std::vector<int> collapse_runs(std::span<const int> seq) {
  std::vector<int> out;
  for (int v : seq)
    if (out.empty() || out.back() != v) out.push_back(v);
  return out;
}

std::vector<SubsequenceCount> frequent_ksubseq(std::span<const int> u,
                                               const CalendarIndex& calendar,
                                               int k, int top_n) {
  if (k < 2) throw DataError("frequent_ksubseq: k must be >= 2");
  if (u.size() != calendar.size()) throw DataError("frequent_ksubseq: u does not match calendar");
  std::map<std::vector<int>, long> counts;
  const auto count_segment = [&](std::size_t begin, std::size_t end) {
    const auto collapsed = collapse_runs(u.subspan(begin, end - begin));
    const auto kk = static_cast<std::size_t>(k);
    for (std::size_t i = 0; i + kk <= collapsed.size(); ++i)
      ++counts[std::vector<int>(collapsed.begin() + static_cast<std::ptrdiff_t>(i),
                                collapsed.begin() + static_cast<std::ptrdiff_t>(i + kk))];
  };
  std::size_t begin = 0;
  for (std::size_t t = 0; t <= u.size(); ++t) {
    const bool boundary = t == u.size() || u[t] < 0 ||
                          (t > begin && !calendar.same_season(t - 1, t));
    if (!boundary) continue;
    if (t > begin) count_segment(begin, t);
    begin = (t < u.size() && u[t] < 0) ? t + 1 : t;
  }
  std::vector<SubsequenceCount> out;
  out.reserve(counts.size());
  for (auto& [w, c] : counts) out.push_back({w, c});
  std::stable_sort(out.begin(), out.end(),
                   [](const auto& a, const auto& b) { return a.count > b.count; });
  if (top_n > 0 && out.size() > static_cast<std::size_t>(top_n))
    out.resize(static_cast<std::size_t>(top_n));
  return out;
}

PatternSpellStats pattern_spell_stats(std::span<const int> u,
                                      const CalendarIndex& calendar,
                                      const std::vector<int>& labels) {
  if (u.size() != calendar.size()) throw DataError("pattern_spell_stats: u does not match calendar");
  PatternSpellStats stats;
  const std::set<int> wanted(labels.begin(), labels.end());
  std::map<int, long> total_len;
  std::size_t t = 0;
  while (t < u.size()) {
    std::size_t end = t + 1;
    while (end < u.size() && u[end] == u[t] && calendar.same_season(end - 1, end)) ++end;
    if (wanted.count(u[t])) {
      ++stats.spell_count[u[t]];
      total_len[u[t]] += static_cast<long>(end - t);
    }
    t = end;
  }
  const double seasons = std::max(1, calendar.n_years());
  for (const auto& [label, n] : stats.spell_count) {
    stats.days[label] = total_len[label];
    stats.mean_length[label] = static_cast<double>(total_len[label]) / static_cast<double>(n);
    stats.spells_per_season[label] = static_cast<double>(n) / seasons;
  }
  return stats;
}

std::vector<double> stationary_distribution(const Matrix<double>& m, int max_iter,
                                            double tol) {
  const std::size_t K = m.rows();
  std::vector<double> pi(K, 1.0 / static_cast<double>(K)), next(K);
  for (int it = 0; it < max_iter; ++it) {
    std::fill(next.begin(), next.end(), 0.0);
    for (std::size_t i = 0; i < K; ++i)
      for (std::size_t j = 0; j < K; ++j) next[j] += pi[i] * m(i, j);
    double diff = 0.0;
    for (std::size_t j = 0; j < K; ++j) diff = std::max(diff, std::abs(next[j] - pi[j]));
    pi.swap(next);
    if (diff < tol) break;
  }
  return pi;
}

SimulatedSeason simulate_season(const TransitionModel& model,
                                const Matrix<double>& crp,
                                std::span<const double> initial, int length,
                                std::uint64_t seed) {
  const std::size_t K = model.size();
  if (K == 0) throw DataError("simulate_season: empty model");
  if (crp.rows() != K) throw DataError("simulate_season: one crp row per label required");
  if (initial.size() != K) throw DataError("simulate_season: initial distribution size mismatch");
  if (length < 1) throw DataError("simulate_season: length must be >= 1");
  const double init_sum = std::accumulate(initial.begin(), initial.end(), 0.0);
  if (std::abs(init_sum - 1.0) > 1e-9) throw DataError("simulate_season: initial distribution must sum to 1");
  for (std::size_t i = 0; i < K; ++i) {
    double sum = 0.0;
    for (double p : model.matrix.row(i)) sum += p;
    if (std::abs(sum - 1.0) > 1e-9) throw DataError("simulate_season: matrix is not row-stochastic");
  }

  SplitMix64 rng(seed);
  SimulatedSeason out;
  const auto L = static_cast<std::size_t>(length);
  out.labels.resize(L);
  out.rain = Matrix<double>(crp.cols(), L);
  int state = sample_categorical(initial, rng.uniform());
  for (std::size_t t = 0; t < L; ++t) {
    if (t > 0)
      state = sample_categorical(model.matrix.row(static_cast<std::size_t>(state)),
                                 rng.uniform());
    out.labels[t] = model.labels[static_cast<std::size_t>(state)];
    const auto src = crp.row(static_cast<std::size_t>(state));
    for (std::size_t s = 0; s < src.size(); ++s) out.rain(s, t) = src[s];
  }
  return out;
}

void write_transition_csv(const std::filesystem::path& path,
                          const std::vector<int>& labels, const Matrix<double>& m,
                          const std::string& stamp) {
  auto out = csv::open_output(path, stamp);
  out << "from";
  for (int l : labels) out << ',' << l;
  out << '\n';
  for (std::size_t i = 0; i < labels.size(); ++i) {
    out << labels[i];
    for (double p : m.row(i)) out << ',' << csv::format(p);
    out << '\n';
  }
}

void write_transition_counts_csv(const std::filesystem::path& path,
                                 const TransitionModel& model,
                                 const std::string& stamp) {
  auto out = csv::open_output(path, stamp);
  out << "from";
  for (int l : model.labels) out << ',' << l;
  out << ",empty_row\n";
  for (std::size_t i = 0; i < model.size(); ++i) {
    out << model.labels[i];
    for (long c : model.counts.row(i)) out << ',' << c;
    out << ',' << (model.empty_rows[i] ? 1 : 0) << '\n';
  }
}

TransitionModel read_transition_csv(const std::filesystem::path& path, double tol) {
  const auto table = csv::read(path);
  if (table.header.empty() || table.header[0] != "from") {
    throw DataError(path.string() + ": transition header must start with 'from'");
  }
  TransitionModel m;
  for (std::size_t j = 1; j < table.header.size(); ++j)
    m.labels.push_back(static_cast<int>(csv::parse_long(table.header[j], path.string())));
  const std::size_t K = m.labels.size();
  if (K == 0 || table.rows.size() != K) {
    throw DataError(path.string() + ": expected a square matrix with " +
                    std::to_string(K) + " rows");
  }
  m.matrix = Matrix<double>(K, K);
  m.counts = Matrix<long>(K, K, 0);
  m.empty_rows.assign(K, false);
  for (std::size_t i = 0; i < K; ++i) {
    const auto ctx = path.string() + ":" + std::to_string(table.line_numbers[i]);
    if (csv::parse_long(table.rows[i][0], ctx) != m.labels[i]) {
      throw DataError(ctx + ": row label does not match header order");
    }
    double sum = 0.0;
    for (std::size_t j = 0; j < K; ++j) {
      const double p = csv::parse_double(table.rows[i][j + 1], ctx);
      if (!(p >= 0.0 && p <= 1.0)) throw DataError(ctx + ": probability outside [0,1]");
      m.matrix(i, j) = p;
      sum += p;
    }
    if (std::abs(sum - 1.0) > tol) {
      throw DataError(ctx + ": row sums to " + csv::format(sum) + ", not 1");
    }
  }
  return m;
}

}  // namespace monsoon
