#include "doctest.h"

#include <random>

#include "mhf/time.hpp"
#include "oracle.hpp"

using namespace mhf;
using mhf::test::oracle_iso_utc;

TEST_CASE("epoch decoding matches the independent calendar oracle") {
    // Expected strings frozen from an independent converter; the in-test
    // oracle recomputes them via a third route.
    struct Case {
        std::int64_t raw;
        const char* iso;
    };
    const Case cases[] = {
        {0, "1970-01-01T00:00:00.000Z"},
        {1422297991793, "2015-01-26T18:46:31.793Z"},
        {1422298294182, "2015-01-26T18:51:34.182Z"},
        {1422299047685, "2015-01-26T19:04:07.685Z"},
        {1422304983101, "2015-01-26T20:43:03.101Z"},
        {1421587800000, "2015-01-18T13:30:00.000Z"},
        {1422711000000, "2015-01-31T13:30:00.000Z"},
    };
    for (const Case& c : cases) {
        CAPTURE(c.raw);
        CHECK(oracle_iso_utc(c.raw) == c.iso);
        CHECK(decode_epoch_ms(c.raw).to_iso8601() == c.iso);
    }
}

TEST_CASE("real-valued epochs with a whole number of milliseconds decode "
          "like integers") {
    CHECK(decode_epoch_ms(1422297991793.0).count() == 1422297991793);
    CHECK(decode_epoch_ms(std::string_view("1422297991793.0")).count() ==
          1422297991793);
    CHECK(decode_epoch_ms(std::string_view("1422297991793")).count() ==
          1422297991793);
    CHECK(decode_epoch_ms(Value(1422297991793.0)).to_iso8601() ==
          decode_epoch_ms(Value(std::int64_t{1422297991793})).to_iso8601());
}

TEST_CASE("epoch decode errors") {
    CHECK_THROWS_AS(decode_epoch_ms(std::int64_t{-1}), DecodeError);
    CHECK_THROWS_AS(decode_epoch_ms(-0.5), DecodeError);
    CHECK_THROWS_AS(decode_epoch_ms(1422297991793.25), DecodeError);
    CHECK_THROWS_AS(decode_epoch_ms(std::nan("")), DecodeError);
    CHECK_THROWS_AS(decode_epoch_ms(std::numeric_limits<double>::infinity()),
                    DecodeError);
    CHECK_THROWS_AS(decode_epoch_ms(std::string_view("")), DecodeError);
    CHECK_THROWS_AS(decode_epoch_ms(std::string_view("-5")), DecodeError);
    CHECK_THROWS_AS(decode_epoch_ms(std::string_view("142229.5")), DecodeError);
    CHECK_THROWS_AS(decode_epoch_ms(std::string_view("abc")), DecodeError);
    CHECK_THROWS_AS(decode_epoch_ms(Value()), DecodeError);
}

TEST_CASE("decode then re-encode is the identity; rendering is strictly "
          "monotone") {
    std::mt19937_64 rng(20150126);
    // Cap below year 10000 so the fixed-width rendering stays ordered.
    std::uniform_int_distribution<std::int64_t> dist(0, 253402300799999);
    std::int64_t prev_raw = -1;
    std::string prev_iso;
    std::vector<std::int64_t> samples;
    for (int i = 0; i < 2000; ++i) samples.push_back(dist(rng));
    std::sort(samples.begin(), samples.end());
    for (std::int64_t raw : samples) {
        const EpochMillis decoded = decode_epoch_ms(raw);
        CHECK(decoded.count() == raw);  // identity
        const std::string iso = decoded.to_iso8601();
        CHECK(iso == oracle_iso_utc(raw));
        if (prev_raw >= 0 && raw != prev_raw) {
            CHECK(prev_iso < iso);  // strictly monotone rendering
        }
        prev_raw = raw;
        prev_iso = iso;
    }
}

TEST_CASE("zone parsing") {
    CHECK(ZoneSpec::parse("UTC").offset_minutes == 0);
    CHECK(ZoneSpec::parse("").offset_minutes == 0);
    CHECK(ZoneSpec::parse("Z").offset_minutes == 0);
    CHECK(ZoneSpec::parse("+10:30").offset_minutes == 630);
    CHECK(ZoneSpec::parse("+1030").offset_minutes == 630);
    CHECK(ZoneSpec::parse("-05:00").offset_minutes == -300);
    CHECK(ZoneSpec::parse("+10:30").label == "UTC+10:30");
    CHECK_THROWS_AS(ZoneSpec::parse("Adelaide"), DecodeError);
    CHECK_THROWS_AS(ZoneSpec::parse("+15:00"), DecodeError);
    CHECK_THROWS_AS(ZoneSpec::parse("+1:3"), DecodeError);
}

TEST_CASE("naive datetimes resolve under the assumed zone and stay annotated") {
    const ZoneSpec utc;
    auto ts = Timestamp::from_naive("2015-01-20 12:55:44", utc);
    REQUIRE(ts);
    CHECK(ts->instant().to_iso8601() == "2015-01-20T12:55:44.000Z");
    CHECK(ts->precision() == TimePrecision::Seconds);
    CHECK(ts->zone_assumed());
    CHECK(ts->render() == "2015-01-20T12:55:44.000Z (assumed UTC)");

    // Local midnight in UTC+10:30 equals the stored cycle-start epoch.
    const ZoneSpec adelaide = ZoneSpec::parse("+10:30");
    auto local = Timestamp::from_naive("2015-01-19 00:00:00", adelaide);
    REQUIRE(local);
    CHECK(local->instant().count() == 1421587800000);

    auto date_only = Timestamp::from_naive("2015-01-16", utc);
    REQUIRE(date_only);
    CHECK(date_only->precision() == TimePrecision::DateOnly);
    CHECK(date_only->instant().to_iso8601() == "2015-01-16T00:00:00.000Z");

    // Truncated tail: the date survives, the time of day does not.
    auto truncated = Timestamp::from_naive("2015-01-21 04:3...", utc);
    REQUIRE(truncated);
    CHECK(truncated->precision() == TimePrecision::DateOnly);
    CHECK(truncated->truncated());
    CHECK(truncated->zone_assumed());
    CHECK(truncated->instant().to_iso8601() == "2015-01-21T00:00:00.000Z");

    CHECK_FALSE(Timestamp::from_naive("garbage", utc));
    CHECK_FALSE(Timestamp::from_naive("2015-13-40", utc));
    CHECK_FALSE(Timestamp::from_naive("", utc));
}

TEST_CASE("epoch-sourced timestamps are never zone-annotated") {
    const auto ts = Timestamp::from_epoch(EpochMillis(1422297991793));
    CHECK_FALSE(ts.zone_assumed());
    CHECK(ts.render() == "2015-01-26T18:46:31.793Z");
}
