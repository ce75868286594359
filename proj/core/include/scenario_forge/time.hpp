#pragma once

#include <compare>
#include <cstdint>
#include <string>
#include <string_view>

namespace sforge {

/// An hour-aligned UTC instant, stored as whole hours since 1970-01-01T00Z.
class Timestamp {
public:
    constexpr Timestamp() = default;
    constexpr explicit Timestamp(std::int64_t hours_since_epoch) : hours_(hours_since_epoch) {}

    constexpr std::int64_t hours_since_epoch() const { return hours_; }

    constexpr Timestamp operator+(std::int64_t hours) const { return Timestamp(hours_ + hours); }
    constexpr Timestamp operator-(std::int64_t hours) const { return Timestamp(hours_ - hours); }
    constexpr std::int64_t operator-(Timestamp other) const { return hours_ - other.hours_; }
    constexpr Timestamp& operator+=(std::int64_t hours) {
        hours_ += hours;
        return *this;
    }

    constexpr auto operator<=>(const Timestamp&) const = default;

    /// Parses ISO-8601 `YYYY-MM-DDTHH[:MM[:SS]]` with optional `Z` or `±HH:MM`
    /// offset (normalized to UTC). A space may replace `T`. Minutes and
    /// seconds must be zero once normalized. Throws Error(InvalidArgument).
    static Timestamp parse(std::string_view text);

    static Timestamp from_civil(int year, unsigned month, unsigned day, unsigned hour);

    /// `YYYY-MM-DDTHH:00:00Z`
    std::string to_string() const;

private:
    std::int64_t hours_ = 0;
};

struct CalendarFields {
    int hour_of_day;  // 0-23
    int day_of_week;  // 0 = Monday ... 6 = Sunday
    int month;        // 1-12
    bool weekend;
};

CalendarFields calendar_fields(Timestamp t);

}  // namespace sforge
