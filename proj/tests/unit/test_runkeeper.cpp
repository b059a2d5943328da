#include "doctest.h"

#include <algorithm>
#include <cmath>

#include "fixtures.hpp"
#include "mhf/runkeeper.hpp"

using namespace mhf;
using namespace mhf::runkeeper;

namespace {

std::shared_ptr<const std::vector<std::string>>
columns(std::initializer_list<std::string> names) {
    return std::make_shared<const std::vector<std::string>>(names);
}

RawRow row(std::int64_t rowid,
           std::shared_ptr<const std::vector<std::string>> cols,
           std::vector<Value> values) {
    RawRow r;
    r.rowid = rowid;
    r.columns = std::move(cols);
    r.values = std::move(values);
    return r;
}

struct Parsed {
    TripParse trips;
    std::map<std::int64_t, std::vector<RoutePoint>> points;
    Rows settings;
    Rows deleted;
    WarningLog log;
};

Parsed parse_fixture() {
    Parsed p;
    const StoreHandle store = open_store(test::runkeeper_path());
    p.trips = parse_trips(store.read_rows("trips"), p.log);
    p.points = parse_points(store.read_rows("points"), p.log);
    p.settings = store.read_rows("trip_settings");
    p.deleted = store.read_rows("deleted_trips");
    return p;
}

} // namespace

TEST_CASE("trips parse with real-typed epoch starts and the _id gap is "
          "reported") {
    Parsed p = parse_fixture();
    REQUIRE(p.trips.trips.size() == 5);

    const Trip& t1 = p.trips.trips[0];
    CHECK(t1.trip_id == 1);
    CHECK(t1.ext_trip_id == 502472481);
    CHECK(t1.distance_m == 19.8604922024573);
    CHECK(t1.elapsed_s == 113.0);
    REQUIRE(t1.start);
    CHECK(t1.start->count() == 1422297991793);
    CHECK(t1.start->to_iso8601() == "2015-01-26T18:46:31.793Z");

    CHECK(p.trips.id_gaps == std::vector<std::int64_t>{5});
    const bool gap_reported = std::any_of(
        p.log.items().begin(), p.log.items().end(), [](const Warning& w) {
            return w.message.find("gap in trip _id sequence") !=
                   std::string::npos;
        });
    CHECK(gap_reported);

    WarningLog log;
    CHECK(parse_trips({}, log).trips.empty());
}

TEST_CASE("an undecodable start_date keeps the trip with a null start") {
    auto cols = columns({"_id", "ext_trip_id", "start_date", "distance",
                         "elapsed_time"});
    Rows rows;
    rows.push_back(row(1, cols,
                       {Value(std::int64_t{1}), Value(std::int64_t{9}),
                        Value("not-a-number"), Value(5.0), Value(10.0)}));
    WarningLog log;
    const auto parsed = parse_trips(rows, log);
    REQUIRE(parsed.trips.size() == 1);
    CHECK_FALSE(parsed.trips[0].start.has_value());
    CHECK(log.any_degraded());
}

TEST_CASE("points group by trip and keep the stored cumulative distances") {
    Parsed p = parse_fixture();
    REQUIRE(p.points.size() == 3);

    const auto& trip1 = p.points.at(1);
    REQUIRE(trip1.size() == 4);
    CHECK(trip1.back().dist_at_point_m == 19.8604922024573);
    CHECK(trip1.front().dist_from_last_m == 0.0);
    CHECK(trip1.front().dist_at_point_m == 0.0);

    const auto& trip6 = p.points.at(6);
    CHECK(trip6.front().latitude == -34.81003651);
    CHECK(trip6.front().longitude == 138.61946183);
    CHECK(trip6.front().dist_at_point_m == 0.0);
}

TEST_CASE("out-of-range coordinates are flagged invalid, excluded from "
          "aggregates, and retained raw") {
    auto cols = columns({"_id", "trip_id", "latitude", "longitude",
                         "time_interval_at_point", "distance_from_last_point",
                         "distance_at_point"});
    Rows rows;
    rows.push_back(row(1, cols,
                       {Value(std::int64_t{1}), Value(std::int64_t{9}),
                        Value(-95.0), Value(10.0), Value(0.0), Value(0.0),
                        Value(0.0)}));
    rows.push_back(row(2, cols,
                       {Value(std::int64_t{2}), Value(std::int64_t{9}),
                        Value(-34.8), Value(138.6), Value(3.0), Value(2.0),
                        Value(2.0)}));
    WarningLog log;
    const auto groups = parse_points(rows, log);
    REQUIRE(groups.at(9).size() == 2);
    CHECK_FALSE(groups.at(9)[0].valid);
    CHECK(groups.at(9)[1].valid);

    TripParse trips;
    trips.trips.push_back(
        {9, 0, EpochMillis(1422297991793), std::nullopt, 2.0, 3.0, {}, {}});
    const auto recon = reconstruct_routes(trips, groups, {}, {}, log);
    REQUIRE(recon.routes.size() == 1);
    CHECK(recon.routes[0].points.size() == 1);  // only the valid fix
    CHECK(recon.routes[0].rejected_points.size() == 1);
}

TEST_CASE("route reconstruction: distance cross-checks hold on the fixture") {
    Parsed p = parse_fixture();
    const auto recon =
        reconstruct_routes(p.trips, p.points, p.settings, p.deleted, p.log);
    REQUIRE(recon.routes.size() == 5);

    std::map<std::int64_t, const TripRoute*> by_id;
    for (const TripRoute& route : recon.routes)
        by_id[route.trip.trip_id] = &route;

    // Stored distance agrees exactly for trip 1.
    REQUIRE(by_id.at(1)->stored_distance_residual_m);
    CHECK(*by_id.at(1)->stored_distance_residual_m == 0.0);
    // And within a micrometre everywhere points exist.
    for (std::int64_t id : {1, 3, 6}) {
        REQUIRE(by_id.at(id)->stored_distance_residual_m);
        CHECK(*by_id.at(id)->stored_distance_residual_m <= 1e-6);
        REQUIRE(by_id.at(id)->cumulative_check_residual_m);
        CHECK(*by_id.at(id)->cumulative_check_residual_m <= 1e-6);
    }

    // Trips without fixes produce empty routes plus a warning, not errors.
    CHECK(by_id.at(2)->points.empty());
    CHECK(by_id.at(4)->points.empty());
    const auto warned = [&](const std::string& needle) {
        return std::any_of(p.log.items().begin(), p.log.items().end(),
                           [&](const Warning& w) {
                               return w.message.find(needle) !=
                                      std::string::npos;
                           });
    };
    CHECK(warned("trip 2 has no location fixes"));
    // The stored elapsed time disagreeing with the last interval is an
    // informational note, not an error.
    CHECK(warned("trip 1 elapsed_time 113 s differs from last point interval 88 s"));

    // Settings join: plaintext name plus epoch-decoded birthday.
    CHECK(by_id.at(1)->settings.display_name == "Runner One");
    REQUIRE(by_id.at(1)->settings.birthday);
    CHECK(by_id.at(1)->settings.birthday->to_iso8601() ==
          "1984-09-13T00:00:00.000Z");

    // Deletion event for the wiped trip: time only, no coordinates.
    const auto deleted = std::find_if(
        recon.records.begin(), recon.records.end(), [](const EvidenceRecord& r) {
            const auto* e = r.as<EventData>();
            return e && e->kind == "trip-deleted";
        });
    REQUIRE(deleted != recon.records.end());
    CHECK(deleted->as<EventData>()->details.at("trip_id") == "5");
    REQUIRE(deleted->observed_at);
    CHECK(deleted->observed_at->instant().count() == 1422300500123);
    CHECK(recon.deleted_trip_ids == std::set<std::int64_t>{5});

    // Haversine corroboration for trip 1 lands near the stored total.
    CHECK(std::abs(by_id.at(1)->haversine_path_m - 19.8604922024573) < 0.5);
}

TEST_CASE("orphan point groups are reported, never silently dropped") {
    auto cols = columns({"_id", "trip_id", "latitude", "longitude",
                         "time_interval_at_point", "distance_from_last_point",
                         "distance_at_point"});
    Rows rows;
    rows.push_back(row(1, cols,
                       {Value(std::int64_t{1}), Value(std::int64_t{99}),
                        Value(-34.8), Value(138.6), Value(0.0), Value(0.0),
                        Value(0.0)}));
    WarningLog log;
    const auto groups = parse_points(rows, log);
    const auto recon = reconstruct_routes({}, groups, {}, {}, log);
    CHECK(recon.orphan_trip_ids == std::vector<std::int64_t>{99});
    CHECK(recon.routes.empty());
}

TEST_CASE("no location fix ever references a deleted trip") {
    auto point_cols =
        columns({"_id", "trip_id", "latitude", "longitude",
                 "time_interval_at_point", "distance_from_last_point",
                 "distance_at_point"});
    Rows points;
    points.push_back(row(1, point_cols,
                         {Value(std::int64_t{1}), Value(std::int64_t{7}),
                          Value(-34.8), Value(138.6), Value(0.0), Value(0.0),
                          Value(0.0)}));
    auto deleted_cols = columns({"_id", "deleted_at"});
    Rows deleted;
    deleted.push_back(row(1, deleted_cols,
                          {Value(std::int64_t{7}),
                           Value(std::int64_t{1422300500123})}));
    WarningLog log;
    const auto recon =
        reconstruct_routes({}, parse_points(points, log), {}, deleted, log);
    for (const EvidenceRecord& r : recon.records) {
        const auto* fix = r.as<GeoFixData>();
        if (fix && fix->trip_ref) CHECK(*fix->trip_ref != 7);
    }
    // Also via status_updates.
    auto status_cols =
        columns({"_id", "trip_id", "timestamp", "latitude", "longitude"});
    Rows status;
    status.push_back(row(1, status_cols,
                         {Value(std::int64_t{1}), Value(std::int64_t{7}),
                          Value(std::int64_t{1422300000000}), Value(-34.8),
                          Value(138.6)}));
    const auto records =
        parse_feed_and_status({}, status, recon.deleted_trip_ids, log);
    for (const EvidenceRecord& r : records)
        CHECK(r.kind() != RecordKind::GeoFix);
}

TEST_CASE("friends parse verbatim with decoded lastActive") {
    const StoreHandle store = open_store(test::runkeeper_path());
    WarningLog log;
    const auto friends = parse_friends(store.read_rows("friends"), log);
    REQUIRE(friends.size() == 1);
    CHECK(friends[0].friend_id == 39876746);
    CHECK(friends[0].name == "Abishkking");
    CHECK(friends[0].email == "abishkking@gmail.com");
    CHECK(friends[0].status == 1);
    CHECK(friends[0].current_month_activity_count == 2);
    REQUIRE(friends[0].last_active);
    CHECK(friends[0].last_active->count() == 1422304983101);
    CHECK(friends[0].last_active->to_iso8601() == "2015-01-26T20:43:03.101Z");
    CHECK_FALSE(friends[0].implausible_last_active);

    CHECK(parse_friends({}, log).empty());

    auto cols = columns({"_id", "name", "email", "lastActive"});
    Rows zero;
    zero.push_back(row(1, cols,
                       {Value(std::int64_t{2}), Value("x"), Value("x@y.z"),
                        Value(std::int64_t{0})}));
    const auto f = parse_friends(zero, log);
    REQUIRE(f.size() == 1);
    CHECK(f[0].implausible_last_active);
    REQUIRE(f[0].last_active);
    CHECK(f[0].last_active->count() == 0);
}

TEST_CASE("feed payloads parse as structured text; malformed payloads are "
          "retained raw") {
    const StoreHandle store = open_store(test::runkeeper_path());
    WarningLog log;
    const auto records = parse_feed_and_status(store.read_rows("feed"),
                                               store.read_rows("status_updates"),
                                               {}, log);

    const auto feed = std::find_if(
        records.begin(), records.end(), [](const EvidenceRecord& r) {
            const auto* e = r.as<EventData>();
            return e && e->kind == "feed-post";
        });
    REQUIRE(feed != records.end());
    CHECK(feed->as<EventData>()->details.at("duration") == "113.0");
    CHECK(feed->as<EventData>()->details.at("notes") == "morning run");
    CHECK(feed->as<EventData>()->details.at("distance") == "19.8604922024573");

    // Image upload becomes an event plus a fix, both tied to the trip.
    const auto upload = std::find_if(
        records.begin(), records.end(), [](const EvidenceRecord& r) {
            const auto* e = r.as<EventData>();
            return e && e->kind == "image-upload";
        });
    REQUIRE(upload != records.end());
    CHECK(upload->as<EventData>()->details.at("trip_id") == "1");
    const auto fix = std::find_if(
        records.begin(), records.end(), [](const EvidenceRecord& r) {
            return r.kind() == RecordKind::GeoFix;
        });
    REQUIRE(fix != records.end());
    CHECK(fix->as<GeoFixData>()->trip_ref == 1);

    auto cols = columns({"_id", "user_id", "username", "timestamp", "data"});
    Rows bad;
    bad.push_back(row(1, cols,
                      {Value(std::int64_t{1}), Value(std::int64_t{2}),
                       Value("u"), Value(std::int64_t{1422298304000}),
                       Value("{not json")}));
    WarningLog log2;
    const auto raw = parse_feed_and_status(bad, {}, {}, log2);
    REQUIRE(raw.size() == 1);
    CHECK(raw[0].as<EventData>()->details.at("payload_raw") == "{not json");
    CHECK_FALSE(log2.items().empty());

    CHECK(parse_feed_and_status({}, {}, {}, log2).empty());
}

TEST_CASE("GPX export: one track, trackpoint times offset from trip start") {
    Parsed p = parse_fixture();
    const auto recon =
        reconstruct_routes(p.trips, p.points, p.settings, p.deleted, p.log);
    const TripRoute& route = recon.routes.front();
    const std::string gpx = to_gpx(route);

    CHECK(gpx.find("<gpx version=\"1.1\"") != std::string::npos);
    CHECK(gpx.find("<name>trip 1</name>") != std::string::npos);
    CHECK(gpx.find("<trkpt lat=\"-34.8067581\" lon=\"138.61073062\">") !=
          std::string::npos);
    // First point at the start instant, second one 3.0 s later.
    CHECK(gpx.find("<time>2015-01-26T18:46:31.793Z</time>") !=
          std::string::npos);
    CHECK(gpx.find("<time>2015-01-26T18:46:34.793Z</time>") !=
          std::string::npos);
    CHECK(std::count(gpx.begin(), gpx.end(), '\n') > 10);
    const std::size_t trkpts = [&] {
        std::size_t n = 0, pos = 0;
        while ((pos = gpx.find("<trkpt ", pos)) != std::string::npos) {
            ++n;
            pos += 7;
        }
        return n;
    }();
    CHECK(trkpts == 4);
}

TEST_CASE("haversine distance sanity") {
    CHECK(haversine_m(0, 0, 0, 0) == 0.0);
    // One degree of longitude at the equator is about 111.19 km.
    CHECK(std::abs(haversine_m(0, 0, 0, 1) - 111195.0) < 100.0);
    // Symmetric.
    CHECK(haversine_m(-34.8, 138.6, -34.81, 138.61) ==
          haversine_m(-34.81, 138.61, -34.8, 138.6));
}
