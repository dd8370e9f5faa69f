#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "monsoon/matrix.hpp"

namespace monsoon {

/// Raised for malformed input data or violated input contracts.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Location {
  int id = 0;
  double lat = 0.0;
  double lon = 0.0;
};

/// Grid cells on a 1 degree lattice with 4-neighbour (rook) adjacency.
/// Cells on the boundary of an irregular land mask simply have fewer
/// neighbours.
class GridGeometry {
 public:
  GridGeometry() = default;
  /// Location ids must be exactly 0..S-1 in order.
  explicit GridGeometry(std::vector<Location> locations);

  /// rows x cols lattice with lat = row, lon = col; id = row * cols + col.
  static GridGeometry lattice(int rows, int cols);

  std::size_t size() const { return locations_.size(); }
  const std::vector<Location>& locations() const { return locations_; }
  const Location& location(std::size_t s) const { return locations_[s]; }
  std::span<const int> neighbors(std::size_t s) const {
    return {adjacency_[s].data(), adjacency_[s].size()};
  }
  /// Parity of the lattice coordinates; rook neighbours always differ.
  int parity(std::size_t s) const { return parity_[s]; }
  /// Number of undirected spatial edges.
  std::size_t edge_count() const { return edge_count_; }

 private:
  std::vector<Location> locations_;
  std::vector<std::vector<int>> adjacency_;
  std::vector<int> parity_;
  std::size_t edge_count_ = 0;
};

struct CalendarDay {
  int year = 0;
  int month = 0;
  int day_of_month = 0;
  int day_of_season = 0;
};

/// Day index t -> calendar date. Each year contributes one contiguous season
/// starting on June 1; monsoon seasons are 122 days (June-September).
class CalendarIndex {
 public:
  static constexpr int kSeasonLength = 122;

  CalendarIndex() = default;

  /// n_years consecutive June-September seasons.
  static CalendarIndex monsoon_seasons(int first_year, int n_years);
  /// One June-September season per listed year, in the given order.
  static CalendarIndex monsoon_years(const std::vector<int>& years);
  /// n_seasons seasons of season_length days each, starting June 1. Used for
  /// short fixtures; dates past September 30 roll into October and beyond.
  static CalendarIndex seasons(int first_year, int n_seasons,
                               int season_length);

  std::size_t size() const { return days_.size(); }
  const CalendarDay& operator[](std::size_t t) const { return days_[t]; }
  const std::vector<CalendarDay>& days() const { return days_; }

  int n_years() const { return static_cast<int>(years_.size()); }
  const std::vector<int>& years() const { return years_; }
  /// 0-based season index of day t.
  int season_of(std::size_t t) const { return season_[t]; }
  bool same_season(std::size_t a, std::size_t b) const {
    return season_[a] == season_[b];
  }
  std::string iso_date(std::size_t t) const;

 private:
  std::vector<CalendarDay> days_;
  std::vector<int> years_;
  std::vector<int> season_;
};

/// Parses YYYY-MM-DD. Throws DataError on malformed input.
CalendarDay parse_iso_date(const std::string& text);
/// 0-based offset from June 1 of the same year, or -1 outside June-September.
int monsoon_day_of_season(int year, int month, int day);

/// Rainfall x(s, t) in mm/day.
struct RainfallField {
  GridGeometry geometry;
  CalendarIndex calendar;
  Matrix<double> x;

  std::size_t n_locations() const { return x.rows(); }
  std::size_t n_days() const { return x.cols(); }

  /// Throws DataError if dimensions disagree or any value is negative or
  /// not finite.
  void validate() const;
};

struct LoadStats {
  std::size_t rows_read = 0;
  std::size_t skipped_outside_season = 0;
};

/// Reads `location_id,date,rain_mm` and `location_id,lat,lon` CSV files.
/// Lines starting with '#' are ignored.
RainfallField load_rainfall(const std::filesystem::path& data_path,
                            const std::filesystem::path& geometry_path,
                            LoadStats* stats = nullptr);

GridGeometry load_geometry(const std::filesystem::path& geometry_path);

/// Y(t) = sum_s x(s, t).
std::vector<double> daily_aggregate(const RainfallField& field);

enum class YearClass { normal, excess, deficient };

const char* to_string(YearClass c);

struct YearLabel {
  int year = 0;
  double total = 0.0;
  YearClass label = YearClass::normal;
};

/// Classifies annual totals against mean +/- population std.
std::vector<YearLabel> classify_year_totals(std::span<const int> years,
                                            std::span<const double> totals);
std::vector<YearLabel> classify_years(const RainfallField& field);

}  // namespace monsoon
