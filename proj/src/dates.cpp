#include "dcm/dates.hpp"

#include "dcm/error.hpp"

#include <cctype>
#include <charconv>
#include <cstdio>

namespace dcm {

namespace {

bool read_int(std::string_view text, std::size_t pos, std::size_t len, int& out) {
    if (pos + len > text.size()) return false;
    for (std::size_t i = pos; i < pos + len; ++i) {
        if (!std::isdigit(static_cast<unsigned char>(text[i]))) return false;
    }
    auto [ptr, ec] = std::from_chars(text.data() + pos, text.data() + pos + len, out);
    return ec == std::errc{};
}

} // namespace

std::optional<Date> parse_date(std::string_view text) {
    int y = 0, m = 0, d = 0;
    if (text.size() != 10 || text[4] != '-' || text[7] != '-') return std::nullopt;
    if (!read_int(text, 0, 4, y) || !read_int(text, 5, 2, m) || !read_int(text, 8, 2, d)) {
        return std::nullopt;
    }
    const std::chrono::year_month_day ymd{std::chrono::year{y}, std::chrono::month{static_cast<unsigned>(m)},
                                          std::chrono::day{static_cast<unsigned>(d)}};
    if (!ymd.ok()) return std::nullopt;
    return Date{ymd};
}

std::optional<Date> parse_utc_day(std::string_view text) {
    if (text.size() < 10) return std::nullopt;
    auto day = parse_date(text.substr(0, 10));
    if (!day) return std::nullopt;
    if (text.size() == 10) return day;

    if (text[10] != 'T' && text[10] != 't' && text[10] != ' ') return std::nullopt;
    int hh = 0, mm = 0, ss = 0;
    if (!read_int(text, 11, 2, hh) || text.size() < 16 || text[13] != ':' || !read_int(text, 14, 2, mm)) {
        return std::nullopt;
    }
    std::size_t pos = 16;
    if (pos < text.size() && text[pos] == ':') {
        if (!read_int(text, pos + 1, 2, ss)) return std::nullopt;
        pos += 3;
        if (pos < text.size() && (text[pos] == '.' || text[pos] == ',')) {
            ++pos;
            const auto frac_start = pos;
            while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) ++pos;
            if (pos == frac_start) return std::nullopt;
        }
    }
    if (hh > 23 || mm > 59 || ss > 60) return std::nullopt;

    int offset_minutes = 0;
    if (pos < text.size()) {
        const char c = text[pos];
        if ((c == 'Z' || c == 'z') && pos + 1 == text.size()) {
            // UTC
        } else if (c == '+' || c == '-') {
            int oh = 0, om = 0;
            const auto rest = text.substr(pos + 1);
            if (rest.size() == 5 && rest[2] == ':') {
                if (!read_int(rest, 0, 2, oh) || !read_int(rest, 3, 2, om)) return std::nullopt;
            } else if (rest.size() == 4) {
                if (!read_int(rest, 0, 2, oh) || !read_int(rest, 2, 2, om)) return std::nullopt;
            } else if (rest.size() == 2) {
                if (!read_int(rest, 0, 2, oh)) return std::nullopt;
            } else {
                return std::nullopt;
            }
            if (oh > 23 || om > 59) return std::nullopt;
            offset_minutes = (c == '+' ? 1 : -1) * (oh * 60 + om);
        } else {
            return std::nullopt;
        }
    }
    using namespace std::chrono;
    const auto local = sys_seconds{*day} + hours{hh} + minutes{mm} + seconds{ss};
    const auto utc = local - minutes{offset_minutes};
    return floor<days>(utc);
}

std::string format_date(Date d) {
    const std::chrono::year_month_day ymd{d};
    char buf[16];
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(ymd.year()),
                  static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()));
    return buf;
}

Timeframe::Timeframe(Date start, int days) : start_(start), days_(days) {
    if (days < 1) throw Error("timeframe must span at least one day");
}

Timeframe Timeframe::from_range(Date first, Date last) {
    if (last < first) {
        throw Error("timeframe end " + format_date(last) + " precedes start " + format_date(first));
    }
    return Timeframe(first, static_cast<int>((last - first).count()) + 1);
}

Timeframe Timeframe::parse(std::string_view first, std::string_view last) {
    const auto a = parse_date(first);
    const auto b = parse_date(last);
    if (!a) throw Error("invalid start date '" + std::string(first) + "' (expected YYYY-MM-DD)");
    if (!b) throw Error("invalid end date '" + std::string(last) + "' (expected YYYY-MM-DD)");
    return from_range(*a, *b);
}

std::optional<int> Timeframe::ordinal(Date d) const {
    const auto off = (d - start_).count();
    if (off < 0 || off >= days_) return std::nullopt;
    return static_cast<int>(off);
}

Date Timeframe::date_of(int ordinal) const {
    if (ordinal < 0 || ordinal >= days_) {
        throw Error("day ordinal " + std::to_string(ordinal) + " outside timeframe of " +
                    std::to_string(days_) + " days");
    }
    return start_ + std::chrono::days{ordinal};
}

} // namespace dcm
