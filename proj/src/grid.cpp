#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <set>

#include "monsoon/csv.hpp"
#include "monsoon/grid.hpp"

namespace monsoon {

namespace {

constexpr double kLatticeTol = 1e-6;

bool near(double a, double b) { return std::abs(a - b) < kLatticeTol; }

}  // namespace

GridGeometry::GridGeometry(std::vector<Location> locations)
    : locations_(std::move(locations)) {
  const std::size_t n = locations_.size();
  for (std::size_t s = 0; s < n; ++s) {
    if (locations_[s].id != static_cast<int>(s)) {
      throw DataError("location ids must be 0..S-1 in order; found id " +
                      std::to_string(locations_[s].id) + " at position " +
                      std::to_string(s));
    }
  }
  adjacency_.assign(n, {});
  parity_.assign(n, 0);
  if (n == 0) return;

  double lat0 = locations_[0].lat, lon0 = locations_[0].lon;
  for (const auto& loc : locations_) {
    lat0 = std::min(lat0, loc.lat);
    lon0 = std::min(lon0, loc.lon);
  }
  for (std::size_t s = 0; s < n; ++s) {
    const long r = std::lround(locations_[s].lat - lat0);
    const long c = std::lround(locations_[s].lon - lon0);
    parity_[s] = static_cast<int>((r + c) & 1);
  }

  // Index cells by rounded lattice coordinates, then confirm the exact 1 degree
  // offset for each candidate neighbour.
  std::map<std::pair<long, long>, std::vector<int>> cells;
  for (std::size_t s = 0; s < n; ++s) {
    cells[{std::lround(locations_[s].lat - lat0),
           std::lround(locations_[s].lon - lon0)}]
        .push_back(static_cast<int>(s));
  }
  constexpr long kOffsets[4][2] = {{-1, 0}, {1, 0}, {0, -1}, {0, 1}};
  for (std::size_t s = 0; s < n; ++s) {
    const auto& a = locations_[s];
    const long r = std::lround(a.lat - lat0);
    const long c = std::lround(a.lon - lon0);
    for (const auto& off : kOffsets) {
      auto it = cells.find({r + off[0], c + off[1]});
      if (it == cells.end()) continue;
      for (int other : it->second) {
        const auto& b = locations_[other];
        const double dlat = std::abs(a.lat - b.lat);
        const double dlon = std::abs(a.lon - b.lon);
        if ((near(dlat, 1.0) && near(dlon, 0.0)) ||
            (near(dlat, 0.0) && near(dlon, 1.0))) {
          adjacency_[s].push_back(other);
        }
      }
    }
    std::sort(adjacency_[s].begin(), adjacency_[s].end());
    edge_count_ += adjacency_[s].size();
  }
  edge_count_ /= 2;
}

GridGeometry GridGeometry::lattice(int rows, int cols) {
  if (rows < 1 || cols < 1) throw DataError("lattice needs rows, cols >= 1");
  std::vector<Location> locs;
  locs.reserve(static_cast<std::size_t>(rows) * cols);
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c)
      locs.push_back({r * cols + c, static_cast<double>(r),
                      static_cast<double>(c)});
  return GridGeometry(std::move(locs));
}

void RainfallField::validate() const {
  if (x.rows() != geometry.size()) {
    throw DataError("rainfall has " + std::to_string(x.rows()) +
                    " locations but geometry has " +
                    std::to_string(geometry.size()));
  }
  if (x.cols() != calendar.size()) {
    throw DataError("rainfall has " + std::to_string(x.cols()) +
                    " days but calendar has " + std::to_string(calendar.size()));
  }
  for (std::size_t s = 0; s < x.rows(); ++s) {
    for (std::size_t t = 0; t < x.cols(); ++t) {
      const double v = x(s, t);
      if (!std::isfinite(v)) {
        throw DataError("non-finite rainfall at location " + std::to_string(s) +
                        ", day " + std::to_string(t));
      }
      if (v < 0.0) {
        throw DataError("negative rainfall at location " + std::to_string(s) +
                        ", day " + std::to_string(t));
      }
    }
  }
}

GridGeometry load_geometry(const std::filesystem::path& geometry_path) {
  const auto table = csv::read(geometry_path, {"location_id", "lat", "lon"});
  std::vector<Location> locs;
  locs.reserve(table.rows.size());
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    const auto ctx = geometry_path.string() + ":" +
                     std::to_string(table.line_numbers[i]);
    const auto& row = table.rows[i];
    locs.push_back({static_cast<int>(csv::parse_long(row[0], ctx)),
                    csv::parse_double(row[1], ctx),
                    csv::parse_double(row[2], ctx)});
  }
  std::sort(locs.begin(), locs.end(),
            [](const Location& a, const Location& b) { return a.id < b.id; });
  return GridGeometry(std::move(locs));
}

RainfallField load_rainfall(const std::filesystem::path& data_path,
                            const std::filesystem::path& geometry_path,
                            LoadStats* stats) {
  RainfallField field;
  field.geometry = load_geometry(geometry_path);
  const std::size_t n_loc = field.geometry.size();
  if (n_loc == 0) throw DataError(geometry_path.string() + ": no locations");

  const auto table = csv::read(data_path, {"location_id", "date", "rain_mm"});
  struct Entry {
    std::size_t s;
    int year;
    int dos;
    double value;
    std::size_t line;
  };
  std::vector<Entry> entries;
  entries.reserve(table.rows.size());
  LoadStats local;
  std::set<int> years;
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    const auto& row = table.rows[i];
    const auto ctx = data_path.string() + ":" +
                     std::to_string(table.line_numbers[i]);
    ++local.rows_read;
    const long id = csv::parse_long(row[0], ctx);
    if (id < 0 || static_cast<std::size_t>(id) >= n_loc) {
      throw DataError(ctx + ": unknown location_id " + std::to_string(id));
    }
    const auto date = parse_iso_date(row[1]);
    const double value = csv::parse_double(row[2], ctx);
    if (date.day_of_season < 0) {
      ++local.skipped_outside_season;
      continue;
    }
    if (!std::isfinite(value)) throw DataError(ctx + ": non-finite rainfall");
    if (value < 0.0) throw DataError(ctx + ": negative rainfall");
    years.insert(date.year);
    entries.push_back({static_cast<std::size_t>(id), date.year,
                       date.day_of_season, value, table.line_numbers[i]});
  }
  if (years.empty()) throw DataError(data_path.string() + ": no June-September rows");

  const std::vector<int> year_list(years.begin(), years.end());
  std::map<int, int> season_of_year;
  for (std::size_t i = 0; i < year_list.size(); ++i)
    season_of_year[year_list[i]] = static_cast<int>(i);
  const CalendarIndex cal = CalendarIndex::monsoon_years(year_list);

  const std::size_t n_days = cal.size();
  field.calendar = cal;
  field.x = Matrix<double>(n_loc, n_days, 0.0);
  BinaryMatrix seen(n_loc, n_days, 0);
  for (const auto& e : entries) {
    const std::size_t t = static_cast<std::size_t>(season_of_year[e.year]) *
                              CalendarIndex::kSeasonLength +
                          static_cast<std::size_t>(e.dos);
    if (seen(e.s, t)) {
      throw DataError(data_path.string() + ":" + std::to_string(e.line) +
                      ": duplicate row for location " + std::to_string(e.s) +
                      " on " + cal.iso_date(t));
    }
    seen(e.s, t) = 1;
    field.x(e.s, t) = e.value;
  }

  std::vector<std::string> gaps;
  std::size_t gap_count = 0;
  for (std::size_t s = 0; s < n_loc; ++s) {
    for (std::size_t t = 0; t < n_days; ++t) {
      if (seen(s, t)) continue;
      ++gap_count;
      if (gaps.size() < 10)
        gaps.push_back("(" + std::to_string(s) + ", " + cal.iso_date(t) + ")");
    }
  }
  if (gap_count > 0) {
    std::string msg = data_path.string() + ": " + std::to_string(gap_count) +
                      " missing location/day combinations; first: ";
    for (std::size_t i = 0; i < gaps.size(); ++i)
      msg += (i ? " " : "") + gaps[i];
    throw DataError(msg);
  }
  if (stats) *stats = local;
  return field;
}

std::vector<double> daily_aggregate(const RainfallField& field) {
  std::vector<double> y(field.n_days(), 0.0);
  for (std::size_t s = 0; s < field.n_locations(); ++s) {
    const auto row = field.x.row(s);
    for (std::size_t t = 0; t < row.size(); ++t) y[t] += row[t];
  }
  return y;
}

const char* to_string(YearClass c) {
  switch (c) {
    case YearClass::excess: return "excess";
    case YearClass::deficient: return "deficient";
    case YearClass::normal: break;
  }
  return "normal";
}

std::vector<YearLabel> classify_year_totals(std::span<const int> years,
                                            std::span<const double> totals) {
  if (years.size() != totals.size()) throw DataError("years/totals size mismatch");
  if (totals.size() < 2) {
    throw DataError("year classification needs at least two years");
  }
  const double n = static_cast<double>(totals.size());
  const double mean = std::accumulate(totals.begin(), totals.end(), 0.0) / n;
  double ss = 0.0;
  for (double a : totals) ss += (a - mean) * (a - mean);
  const double sd = std::sqrt(ss / n);
  std::vector<YearLabel> out;
  out.reserve(totals.size());
  for (std::size_t i = 0; i < totals.size(); ++i) {
    YearClass c = YearClass::normal;
    if (totals[i] > mean + sd) c = YearClass::excess;
    else if (totals[i] < mean - sd) c = YearClass::deficient;
    out.push_back({years[i], totals[i], c});
  }
  return out;
}

std::vector<YearLabel> classify_years(const RainfallField& field) {
  const auto y = daily_aggregate(field);
  const auto& cal = field.calendar;
  std::vector<double> totals(static_cast<std::size_t>(cal.n_years()), 0.0);
  for (std::size_t t = 0; t < y.size(); ++t)
    totals[static_cast<std::size_t>(cal.season_of(t))] += y[t];
  return classify_year_totals(cal.years(), totals);
}

}  // namespace monsoon
