// Unix-millisecond epoch decoding and the timestamp model shared by all
// parsers. Naive local datetime strings (no zone marker) are resolved under
// an assumed zone and stay annotated as such all the way into reports.

#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

#include "mhf/value.hpp"

namespace mhf {

struct DecodeError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// An instant as a non-negative count of milliseconds since
// 1970-01-01T00:00:00Z.
class EpochMillis {
public:
    explicit EpochMillis(std::int64_t ms);

    std::int64_t count() const { return ms_; }

    // YYYY-MM-DDTHH:MM:SS.mmmZ, always UTC, always 3 fractional digits.
    std::string to_iso8601() const;

    auto operator<=>(const EpochMillis&) const = default;

private:
    std::int64_t ms_ = 0;
};

// Rejects negative and non-finite inputs; real-valued input must carry a
// whole number of milliseconds ("1422297991793.0" decodes like the integer).
EpochMillis decode_epoch_ms(std::int64_t raw);
EpochMillis decode_epoch_ms(double raw);
EpochMillis decode_epoch_ms(std::string_view raw);
EpochMillis decode_epoch_ms(const Value& raw);

// Fixed-offset zone used to resolve naive datetime strings.
struct ZoneSpec {
    int offset_minutes = 0;
    std::string label = "UTC";

    // Accepts "UTC", "Z", "+HH:MM", "-HH:MM", "+HHMM". Throws DecodeError.
    static ZoneSpec parse(std::string_view text);
};

enum class TimePrecision { DateOnly, Seconds, Millis };

// A resolved timestamp. Epoch-sourced instants are exact; naive-string
// instants are resolved under an assumed zone and flagged.
class Timestamp {
public:
    static Timestamp from_epoch(EpochMillis at,
                                TimePrecision precision = TimePrecision::Millis);

    // Parses "YYYY-MM-DD HH:MM:SS", "YYYY-MM-DD", and truncated forms such
    // as "2015-01-21 04:3..." (kept at date precision). Empty optional when
    // the text is not a recognizable datetime.
    static std::optional<Timestamp> from_naive(std::string_view text,
                                               const ZoneSpec& assumed);

    const EpochMillis& instant() const { return instant_; }
    TimePrecision precision() const { return precision_; }
    bool zone_assumed() const { return zone_assumed_; }
    bool truncated() const { return truncated_; }
    const std::string& raw_text() const { return raw_; }
    const std::string& assumed_zone_label() const { return zone_label_; }

    // ISO instant, suffixed with the assumed-zone annotation when the
    // source was naive, e.g. "2015-01-20T12:55:44.000Z (assumed UTC)".
    std::string render() const;

private:
    EpochMillis instant_{0};
    TimePrecision precision_ = TimePrecision::Millis;
    bool zone_assumed_ = false;
    bool truncated_ = false;
    std::string raw_;
    std::string zone_label_;
};

namespace detail {
// Days <-> civil date, proleptic Gregorian calendar.
std::int64_t days_from_civil(int year, unsigned month, unsigned day);
void civil_from_days(std::int64_t days, int& year, unsigned& month,
                     unsigned& day);
} // namespace detail

} // namespace mhf
