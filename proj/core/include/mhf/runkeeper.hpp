// RunKeeper (RunKeeper.sqlite) artefact extraction and per-trip route
// reconstruction from the trips / points / trip_settings join.

#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "mhf/evidence.hpp"
#include "mhf/store.hpp"

namespace mhf::runkeeper {

struct Trip {
    std::int64_t trip_id = 0;  // trips._id
    std::int64_t ext_trip_id = 0;
    std::optional<EpochMillis> start;
    std::optional<std::string> name;
    double distance_m = 0.0;
    double elapsed_s = 0.0;
    std::optional<double> calories;
    std::optional<std::string> notes;
};

struct RoutePoint {
    std::int64_t point_id = 0;
    std::int64_t trip_id = 0;
    double latitude = 0.0;
    double longitude = 0.0;
    std::optional<double> altitude_m;
    double time_interval_s = 0.0;
    double dist_from_last_m = 0.0;
    double dist_at_point_m = 0.0;
    double speed_from_last = 0.0;
    std::int64_t point_type = 0;  // undocumented; passed through raw
    double accuracy = 0.0;
    bool valid = true;  // false when lat/lon out of range
};

struct TripSettings {
    std::map<std::string, std::string> values;
    std::optional<std::string> display_name;   // setting_key "name"
    std::optional<EpochMillis> birthday;       // setting_key "birthday", epoch ms
};

struct TripRoute {
    Trip trip;
    std::vector<RoutePoint> points;  // valid points, ordered by point_id
    std::vector<RoutePoint> rejected_points;
    TripSettings settings;
    // |trips.distance - last dist_at_point|; empty when the route has no fixes.
    std::optional<double> stored_distance_residual_m;
    // |sum(dist_from_last) - last dist_at_point|.
    std::optional<double> cumulative_check_residual_m;
    // Secondary diagnostic from raw coordinates; never replaces stored fields.
    double haversine_path_m = 0.0;
};

struct FriendRecord {
    std::int64_t friend_id = 0;
    std::string name;
    std::int64_t fbuid = 0;
    std::string email;
    std::int64_t status = 0;
    std::int64_t current_month_activity_count = 0;
    std::optional<EpochMillis> last_active;
    bool implausible_last_active = false;  // e.g. epoch origin
    std::int64_t rowid = 0;
};

struct TripParse {
    std::vector<Trip> trips;  // ordered by trip_id
    // Missing _id values between the observed min and max; the store keeps
    // numbering across user switches, so gaps mark possible wiped or
    // deleted trips.
    std::vector<std::int64_t> id_gaps;
};

TripParse parse_trips(const Rows& rows, WarningLog& log);

// Grouped by trip_id, ordered by _id. Out-of-range coordinates are flagged
// invalid and kept; per-group monotonicity violations downgrade to
// warnings.
std::map<std::int64_t, std::vector<RoutePoint>> parse_points(const Rows& rows,
                                                             WarningLog& log);

struct Reconstruction {
    std::vector<TripRoute> routes;  // one per trip, ordered by trip_id
    std::vector<std::int64_t> orphan_trip_ids;  // point groups with no trip
    std::set<std::int64_t> deleted_trip_ids;
    std::vector<EvidenceRecord> records;
};

// Joins trips to points on trips._id = points.trip_id, attaches settings,
// computes the distance cross-checks, and emits deletion events for
// deleted_trips rows. No location record is ever emitted for a deleted
// trip.
Reconstruction reconstruct_routes(
    const TripParse& trips,
    const std::map<std::int64_t, std::vector<RoutePoint>>& points,
    const Rows& settings_rows, const Rows& deleted_rows, WarningLog& log);

std::vector<FriendRecord> parse_friends(const Rows& rows, WarningLog& log);
std::vector<EvidenceRecord>
friend_records(const std::vector<FriendRecord>& friends);

// feed rows carry a JSON payload (duration, notes, distance); malformed
// payloads are preserved raw. status_updates rows mark image uploads with
// trip id, time, and coordinates.
std::vector<EvidenceRecord>
parse_feed_and_status(const Rows& feed_rows, const Rows& status_rows,
                      const std::set<std::int64_t>& deleted_trip_ids,
                      WarningLog& log);

// GPX 1.1 document, one track for the route; trackpoint time is trip start
// plus the stored interval.
std::string to_gpx(const TripRoute& route);

double haversine_m(double lat1, double lon1, double lat2, double lon2);

struct Extraction {
    TripParse trips;
    Reconstruction reconstruction;
    std::vector<FriendRecord> friends;
    std::vector<EvidenceRecord> records;
};

Extraction parse_store(const StoreHandle& store, const ZoneSpec& tz,
                       WarningLog& log);

} // namespace mhf::runkeeper
