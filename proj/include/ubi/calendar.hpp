#pragma once

// Business-day calendar: Monday to Friday minus public holidays, plus
// weekend dates declared working days by transfer.

#include <istream>
#include <set>
#include <sstream>
#include <string>
#include <string_view>

#include "ubi/error.hpp"
#include "ubi/time.hpp"

namespace ubi {

class HolidayCalendar {
 public:
  HolidayCalendar() = default;

  void add_holiday(Days d) { holidays_.insert(d); }
  void add_working_day(Days d) { working_.insert(d); }

  bool is_business_day(Days d) const {
    if (working_.count(d)) return true;
    if (holidays_.count(d)) return false;
    return !is_weekend(d);
  }

  const std::set<Days>& holidays() const { return holidays_; }
  const std::set<Days>& working_days() const { return working_; }

  bool operator==(const HolidayCalendar&) const = default;

  // One entry per line: "YYYY-MM-DD" is a non-working holiday,
  // "+YYYY-MM-DD" a transferred working day. '#' starts a comment.
  static HolidayCalendar parse(std::istream& in) {
    HolidayCalendar cal;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
      ++line_no;
      if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
      auto b = line.find_first_not_of(" \t\r");
      if (b == std::string::npos) continue;
      auto e = line.find_last_not_of(" \t\r");
      std::string_view entry(line.data() + b, e - b + 1);
      bool working = !entry.empty() && entry[0] == '+';
      if (working) entry.remove_prefix(1);
      auto d = parse_date(entry);
      if (!d) throw InputError("holiday calendar line " + std::to_string(line_no) + ": invalid date");
      working ? cal.add_working_day(*d) : cal.add_holiday(*d);
    }
    return cal;
  }

  static HolidayCalendar parse(std::string_view text) {
    std::istringstream in{std::string(text)};
    return parse(in);
  }

 private:
  std::set<Days> holidays_;
  std::set<Days> working_;
};

// Russian federal non-working days and transferred working Saturdays,
// 2018-2021 production calendars.
inline constexpr std::string_view kRussianHolidays2018To2021 = R"(# Russia, non-working holidays
2018-01-01
2018-01-02
2018-01-03
2018-01-04
2018-01-05
2018-01-08
2018-02-23
2018-03-08
2018-03-09
2018-04-30
2018-05-01
2018-05-02
2018-05-09
2018-06-11
2018-06-12
2018-11-05
2018-12-31
+2018-04-28
+2018-06-09
+2018-12-29
2019-01-01
2019-01-02
2019-01-03
2019-01-04
2019-01-07
2019-01-08
2019-03-08
2019-05-01
2019-05-02
2019-05-03
2019-05-09
2019-05-10
2019-06-12
2019-11-04
2020-01-01
2020-01-02
2020-01-03
2020-01-06
2020-01-07
2020-01-08
2020-02-24
2020-03-09
2020-05-01
2020-05-04
2020-05-05
2020-05-11
2020-06-12
2020-11-04
2021-01-01
2021-01-04
2021-01-05
2021-01-06
2021-01-07
2021-01-08
2021-02-22
2021-02-23
2021-03-08
2021-05-03
2021-05-10
2021-06-14
2021-11-04
2021-11-05
2021-12-31
+2021-02-20
)";

inline const HolidayCalendar& russian_holiday_calendar() {
  static const HolidayCalendar cal = HolidayCalendar::parse(kRussianHolidays2018To2021);
  return cal;
}

}  // namespace ubi
