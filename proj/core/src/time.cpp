#include "scenario_forge/time.hpp"

#include <charconv>
#include <chrono>
#include <cstdio>

#include "scenario_forge/error.hpp"

namespace sforge {
namespace {

using namespace std::chrono;

[[noreturn]] void bad(std::string_view text, std::string_view why) {
    throw Error(ErrorCode::InvalidArgument,
                "bad timestamp '" + std::string(text) + "': " + std::string(why));
}

int read_int(std::string_view text, std::size_t pos, std::size_t len, std::string_view whole) {
    if (pos + len > text.size()) bad(whole, "truncated");
    int value = 0;
    const char* first = text.data() + pos;
    auto [ptr, ec] = std::from_chars(first, first + len, value);
    if (ec != std::errc{} || ptr != first + len) bad(whole, "expected digits");
    return value;
}

}  // namespace

Timestamp Timestamp::from_civil(int y, unsigned m, unsigned d, unsigned h) {
    const year_month_day ymd{year{y}, month{m}, day{d}};
    if (!ymd.ok() || h > 23) {
        throw Error(ErrorCode::InvalidArgument, "invalid civil date");
    }
    const auto days = sys_days{ymd}.time_since_epoch().count();
    return Timestamp(static_cast<std::int64_t>(days) * 24 + h);
}

Timestamp Timestamp::parse(std::string_view text) {
    // YYYY-MM-DDTHH is the minimum.
    if (text.size() < 13 || text[4] != '-' || text[7] != '-' || (text[10] != 'T' && text[10] != ' ')) {
        bad(text, "expected YYYY-MM-DDTHH");
    }
    const int y = read_int(text, 0, 4, text);
    const int mo = read_int(text, 5, 2, text);
    const int d = read_int(text, 8, 2, text);
    const int h = read_int(text, 11, 2, text);
    int minute = 0;
    int second = 0;
    std::size_t pos = 13;
    if (pos < text.size() && text[pos] == ':') {
        minute = read_int(text, pos + 1, 2, text);
        pos += 3;
        if (pos < text.size() && text[pos] == ':') {
            second = read_int(text, pos + 1, 2, text);
            pos += 3;
        }
    }
    int offset_minutes = 0;
    if (pos < text.size()) {
        const char c = text[pos];
        if (c == 'Z' && pos + 1 == text.size()) {
            pos += 1;
        } else if ((c == '+' || c == '-') && pos + 6 == text.size() && text[pos + 3] == ':') {
            const int oh = read_int(text, pos + 1, 2, text);
            const int om = read_int(text, pos + 4, 2, text);
            offset_minutes = (c == '+' ? 1 : -1) * (oh * 60 + om);
            pos += 6;
        } else {
            bad(text, "unrecognized zone designator");
        }
    }
    if (mo < 1 || mo > 12 || d < 1 || d > 31 || h > 23 || minute > 59 || second > 59) {
        bad(text, "field out of range");
    }
    const year_month_day ymd{year{y}, month{static_cast<unsigned>(mo)}, day{static_cast<unsigned>(d)}};
    if (!ymd.ok()) bad(text, "no such date");
    if (second != 0) bad(text, "not hour-aligned");
    const std::int64_t utc_minutes =
        static_cast<std::int64_t>(sys_days{ymd}.time_since_epoch().count()) * 1440 + h * 60 + minute -
        offset_minutes;
    if (utc_minutes % 60 != 0) bad(text, "not hour-aligned");
    // floor division for pre-epoch instants
    std::int64_t hours = utc_minutes / 60;
    if (utc_minutes < 0 && utc_minutes % 60 != 0) --hours;
    return Timestamp(hours);
}

std::string Timestamp::to_string() const {
    std::int64_t days = hours_ / 24;
    std::int64_t hour = hours_ % 24;
    if (hour < 0) {
        hour += 24;
        days -= 1;
    }
    const year_month_day ymd{sys_days{std::chrono::days{days}}};
    char buf[32];
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02d:00:00Z", static_cast<int>(ymd.year()),
                  static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()),
                  static_cast<int>(hour));
    return buf;
}

CalendarFields calendar_fields(Timestamp t) {
    std::int64_t days = t.hours_since_epoch() / 24;
    std::int64_t hour = t.hours_since_epoch() % 24;
    if (hour < 0) {
        hour += 24;
        days -= 1;
    }
    const sys_days sd{std::chrono::days{days}};
    const year_month_day ymd{sd};
    const int dow = static_cast<int>(weekday{sd}.iso_encoding()) - 1;
    return CalendarFields{static_cast<int>(hour), dow, static_cast<int>(static_cast<unsigned>(ymd.month())),
                          dow >= 5};
}

}  // namespace sforge
