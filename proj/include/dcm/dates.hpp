#pragma once

#include <chrono>
#include <optional>
#include <string>
#include <string_view>

namespace dcm {

using Date = std::chrono::sys_days;

// Parses `YYYY-MM-DD`. Returns nullopt on malformed or impossible dates.
std::optional<Date> parse_date(std::string_view text);

// Parses an ISO-8601 instant (`YYYY-MM-DD`, optionally followed by
// `Thh:mm[:ss[.fff]]` and `Z` or a `+hh:mm` / `-hh:mm` offset) and returns the
// UTC calendar day it falls on. Missing offsets are read as UTC.
std::optional<Date> parse_utc_day(std::string_view text);

std::string format_date(Date d);

// Inclusive range of UTC calendar days [start, start + days).
class Timeframe {
public:
    Timeframe(Date start, int days);
    static Timeframe from_range(Date first, Date last);
    static Timeframe parse(std::string_view first, std::string_view last);

    Date start() const { return start_; }
    Date last() const { return start_ + std::chrono::days{days_ - 1}; }
    int days() const { return days_; }

    // Day ordinal in [0, days) or nullopt when `d` lies outside the frame.
    std::optional<int> ordinal(Date d) const;
    Date date_of(int ordinal) const;

private:
    Date start_;
    int days_;
};

} // namespace dcm
