#include <chrono>
#include <cstdio>

#include "monsoon/grid.hpp"

namespace monsoon {

namespace {

namespace chr = std::chrono;

CalendarDay date_after_june_first(int year, int offset) {
  const chr::sys_days june1 =
      chr::year_month_day{chr::year{year}, chr::month{6}, chr::day{1}};
  const chr::year_month_day ymd{june1 + chr::days{offset}};
  return {static_cast<int>(ymd.year()),
          static_cast<int>(static_cast<unsigned>(ymd.month())),
          static_cast<int>(static_cast<unsigned>(ymd.day())), offset};
}

}  // namespace

CalendarIndex CalendarIndex::monsoon_seasons(int first_year, int n_years) {
  return seasons(first_year, n_years, kSeasonLength);
}

CalendarIndex CalendarIndex::seasons(int first_year, int n_seasons,
                                     int season_length) {
  if (n_seasons < 1 || season_length < 1) {
    throw DataError("calendar needs at least one season of one day");
  }
  CalendarIndex cal;
  cal.days_.reserve(static_cast<std::size_t>(n_seasons) * season_length);
  for (int y = 0; y < n_seasons; ++y) {
    cal.years_.push_back(first_year + y);
    for (int d = 0; d < season_length; ++d) {
      auto day = date_after_june_first(first_year + y, d);
      // Keep the season's year even when a long fixture season runs past
      // December.
      day.year = first_year + y;
      cal.days_.push_back(day);
      cal.season_.push_back(y);
    }
  }
  return cal;
}

CalendarIndex CalendarIndex::monsoon_years(const std::vector<int>& years) {
  if (years.empty()) throw DataError("calendar needs at least one year");
  CalendarIndex cal;
  for (std::size_t i = 0; i < years.size(); ++i) {
    cal.years_.push_back(years[i]);
    for (int d = 0; d < kSeasonLength; ++d) {
      cal.days_.push_back(date_after_june_first(years[i], d));
      cal.season_.push_back(static_cast<int>(i));
    }
  }
  return cal;
}

std::string CalendarIndex::iso_date(std::size_t t) const {
  const auto& d = days_[t];
  const auto real = date_after_june_first(d.year, d.day_of_season);
  char buf[16];
  std::snprintf(buf, sizeof(buf), "%04d-%02d-%02d", real.year, real.month,
                real.day_of_month);
  return buf;
}

CalendarDay parse_iso_date(const std::string& text) {
  int y = 0, m = 0, d = 0;
  char tail = 0;
  if (std::sscanf(text.c_str(), "%d-%d-%d%c", &y, &m, &d, &tail) != 3) {
    throw DataError("malformed date '" + text + "' (expected YYYY-MM-DD)");
  }
  const chr::year_month_day ymd{chr::year{y}, chr::month{static_cast<unsigned>(m)},
                                chr::day{static_cast<unsigned>(d)}};
  if (!ymd.ok()) throw DataError("invalid date '" + text + "'");
  return {y, m, d, monsoon_day_of_season(y, m, d)};
}

int monsoon_day_of_season(int year, int month, int day) {
  if (month < 6 || month > 9) return -1;
  const chr::sys_days june1 =
      chr::year_month_day{chr::year{year}, chr::month{6}, chr::day{1}};
  const chr::sys_days date = chr::year_month_day{
      chr::year{year}, chr::month{static_cast<unsigned>(month)},
      chr::day{static_cast<unsigned>(day)}};
  return static_cast<int>((date - june1).count());
}

}  // namespace monsoon
