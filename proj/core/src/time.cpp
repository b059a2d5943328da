#include "mhf/time.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>

namespace mhf {

namespace detail {

std::int64_t days_from_civil(int y, unsigned m, unsigned d) {
    y -= m <= 2;
    const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
    const unsigned yoe = static_cast<unsigned>(y - era * 400);
    const unsigned doy = (153 * (m > 2 ? m - 3 : m + 9) + 2) / 5 + d - 1;
    const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
    return era * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

void civil_from_days(std::int64_t z, int& y, unsigned& m, unsigned& d) {
    z += 719468;
    const std::int64_t era = (z >= 0 ? z : z - 146096) / 146097;
    const unsigned doe = static_cast<unsigned>(z - era * 146097);
    const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
    const std::int64_t yy = static_cast<std::int64_t>(yoe) + era * 400;
    const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
    const unsigned mp = (5 * doy + 2) / 153;
    d = doy - (153 * mp + 2) / 5 + 1;
    m = mp < 10 ? mp + 3 : mp - 9;
    y = static_cast<int>(yy + (m <= 2));
}

} // namespace detail

namespace {

constexpr std::int64_t kMsPerDay = 86'400'000;

bool read_digits(std::string_view s, std::size_t pos, std::size_t n, int& out) {
    if (pos + n > s.size()) return false;
    int v = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const char c = s[pos + i];
        if (c < '0' || c > '9') return false;
        v = v * 10 + (c - '0');
    }
    out = v;
    return true;
}

unsigned days_in_month(int y, unsigned m) {
    static const unsigned lengths[] = {31, 28, 31, 30, 31, 30,
                                       31, 31, 30, 31, 30, 31};
    if (m == 2) {
        const bool leap = (y % 4 == 0 && y % 100 != 0) || y % 400 == 0;
        return leap ? 29u : 28u;
    }
    return lengths[m - 1];
}

} // namespace

EpochMillis::EpochMillis(std::int64_t ms) : ms_(ms) {
    if (ms < 0) throw DecodeError("epoch milliseconds must be non-negative");
}

std::string EpochMillis::to_iso8601() const {
    const std::int64_t days = ms_ / kMsPerDay;
    std::int64_t rem = ms_ % kMsPerDay;
    int year = 0;
    unsigned month = 0, day = 0;
    detail::civil_from_days(days, year, month, day);
    const int ms = static_cast<int>(rem % 1000);
    rem /= 1000;
    const int sec = static_cast<int>(rem % 60);
    rem /= 60;
    const int min = static_cast<int>(rem % 60);
    const int hour = static_cast<int>(rem / 60);
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%04d-%02u-%02uT%02d:%02d:%02d.%03dZ",
                  year, month, day, hour, min, sec, ms);
    return buf;
}

EpochMillis decode_epoch_ms(std::int64_t raw) {
    if (raw < 0) throw DecodeError("negative epoch value: " + std::to_string(raw));
    return EpochMillis(raw);
}

EpochMillis decode_epoch_ms(double raw) {
    if (!std::isfinite(raw)) throw DecodeError("non-finite epoch value");
    if (raw < 0) throw DecodeError("negative epoch value");
    if (raw != std::trunc(raw))
        throw DecodeError("epoch value carries fractional milliseconds");
    if (raw > 9.2e18) throw DecodeError("epoch value out of range");
    return EpochMillis(static_cast<std::int64_t>(raw));
}

EpochMillis decode_epoch_ms(std::string_view raw) {
    // Accepts decimal digits with an optional all-zero fraction, matching
    // stored forms like "1422297991793.0".
    std::size_t i = 0;
    while (i < raw.size() && std::isspace(static_cast<unsigned char>(raw[i]))) ++i;
    std::size_t end = raw.size();
    while (end > i && std::isspace(static_cast<unsigned char>(raw[end - 1]))) --end;
    if (i >= end) throw DecodeError("empty epoch string");
    if (raw[i] == '-') throw DecodeError("negative epoch value");
    std::int64_t value = 0;
    bool any = false;
    for (; i < end && raw[i] != '.'; ++i) {
        const char c = raw[i];
        if (c < '0' || c > '9')
            throw DecodeError("not a numeric epoch string");
        if (value > (INT64_MAX - (c - '0')) / 10)
            throw DecodeError("epoch value out of range");
        value = value * 10 + (c - '0');
        any = true;
    }
    if (!any) throw DecodeError("not a numeric epoch string");
    if (i < end) {  // fractional part must be all zeros
        ++i;
        for (; i < end; ++i) {
            if (raw[i] == '0') continue;
            if (raw[i] >= '1' && raw[i] <= '9')
                throw DecodeError("epoch value carries fractional milliseconds");
            throw DecodeError("not a numeric epoch string");
        }
    }
    return EpochMillis(value);
}

EpochMillis decode_epoch_ms(const Value& raw) {
    switch (raw.type()) {
    case Value::Type::Integer: return decode_epoch_ms(*raw.as_int());
    case Value::Type::Real: return decode_epoch_ms(*raw.as_real());
    case Value::Type::Text: return decode_epoch_ms(std::string_view(*raw.as_text()));
    case Value::Type::Null: throw DecodeError("null epoch value");
    case Value::Type::Blob: throw DecodeError("blob epoch value");
    }
    throw DecodeError("unsupported epoch value");
}

ZoneSpec ZoneSpec::parse(std::string_view text) {
    if (text.empty() || text == "UTC" || text == "utc" || text == "Z")
        return ZoneSpec{};
    if (text.size() < 3 || (text[0] != '+' && text[0] != '-'))
        throw DecodeError("unrecognized zone: " + std::string(text));
    const int sign = text[0] == '-' ? -1 : 1;
    int hh = 0, mm = 0;
    if (!read_digits(text, 1, 2, hh))
        throw DecodeError("unrecognized zone: " + std::string(text));
    std::size_t pos = 3;
    if (pos < text.size() && text[pos] == ':') ++pos;
    if (pos < text.size()) {
        if (!read_digits(text, pos, 2, mm) || pos + 2 != text.size())
            throw DecodeError("unrecognized zone: " + std::string(text));
    }
    if (hh > 14 || mm > 59)
        throw DecodeError("zone offset out of range: " + std::string(text));
    ZoneSpec z;
    z.offset_minutes = sign * (hh * 60 + mm);
    char buf[16];
    std::snprintf(buf, sizeof(buf), "UTC%c%02d:%02d", sign < 0 ? '-' : '+', hh, mm);
    z.label = z.offset_minutes == 0 ? "UTC" : buf;
    return z;
}

Timestamp Timestamp::from_epoch(EpochMillis at, TimePrecision precision) {
    Timestamp t;
    t.instant_ = at;
    t.precision_ = precision;
    t.zone_assumed_ = false;
    t.zone_label_ = "UTC";
    return t;
}

std::optional<Timestamp> Timestamp::from_naive(std::string_view text,
                                               const ZoneSpec& assumed) {
    std::size_t b = 0, e = text.size();
    while (b < e && std::isspace(static_cast<unsigned char>(text[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(text[e - 1]))) --e;
    const std::string_view s = text.substr(b, e - b);

    int year = 0, month = 0, day = 0;
    if (!read_digits(s, 0, 4, year)) return std::nullopt;
    if (s.size() < 10 || s[4] != '-' || s[7] != '-') return std::nullopt;
    if (!read_digits(s, 5, 2, month) || !read_digits(s, 8, 2, day))
        return std::nullopt;
    if (month < 1 || month > 12 || day < 1 ||
        day > static_cast<int>(days_in_month(year, month)))
        return std::nullopt;

    Timestamp t;
    t.raw_ = std::string(s);
    t.zone_assumed_ = true;
    t.zone_label_ = assumed.label;

    int hour = 0, minute = 0, second = 0;
    if (s.size() == 10) {
        t.precision_ = TimePrecision::DateOnly;
    } else if (s.size() >= 19 && (s[10] == ' ' || s[10] == 'T') &&
               s[13] == ':' && s[16] == ':' && read_digits(s, 11, 2, hour) &&
               read_digits(s, 14, 2, minute) && read_digits(s, 17, 2, second) &&
               s.size() == 19 && hour < 24 && minute < 60 && second < 60) {
        t.precision_ = TimePrecision::Seconds;
    } else if (s[10] == ' ' || s[10] == 'T') {
        // Truncated tail such as "2015-01-21 04:3...": the day is reliable,
        // the time of day is not.
        t.precision_ = TimePrecision::DateOnly;
        t.truncated_ = true;
        hour = minute = second = 0;
    } else {
        return std::nullopt;
    }

    const std::int64_t days = detail::days_from_civil(year, month, day);
    std::int64_t ms = days * kMsPerDay +
                      (static_cast<std::int64_t>(hour) * 3600 +
                       minute * 60 + second) *
                          1000;
    ms -= static_cast<std::int64_t>(assumed.offset_minutes) * 60'000;
    if (ms < 0) return std::nullopt;
    t.instant_ = EpochMillis(ms);
    return t;
}

std::string Timestamp::render() const {
    std::string out = instant_.to_iso8601();
    if (zone_assumed_) {
        out += " (assumed ";
        out += zone_label_;
        out += ")";
    }
    return out;
}

} // namespace mhf
