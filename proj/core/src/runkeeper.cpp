#include "mhf/runkeeper.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "json.hpp"

namespace mhf::runkeeper {

namespace {

constexpr const char* kApp = "RunKeeper";

std::optional<EpochMillis> decode_epoch_field(const Value& v,
                                              const std::string& what,
                                              WarningLog& log) {
    if (v.is_null()) return std::nullopt;
    try {
        return decode_epoch_ms(v);
    } catch (const DecodeError& e) {
        log.degraded("runkeeper", "undecodable " + what + ": " + e.what());
        return std::nullopt;
    }
}

std::string fmt(double v) { return format_double(v); }

} // namespace

double haversine_m(double lat1, double lon1, double lat2, double lon2) {
    constexpr double kEarthRadiusM = 6'371'000.0;
    constexpr double kDegToRad = std::numbers::pi / 180.0;
    const double phi1 = lat1 * kDegToRad;
    const double phi2 = lat2 * kDegToRad;
    const double dphi = (lat2 - lat1) * kDegToRad;
    const double dlambda = (lon2 - lon1) * kDegToRad;
    const double a = std::sin(dphi / 2) * std::sin(dphi / 2) +
                     std::cos(phi1) * std::cos(phi2) * std::sin(dlambda / 2) *
                         std::sin(dlambda / 2);
    return 2.0 * kEarthRadiusM * std::asin(std::min(1.0, std::sqrt(a)));
}

TripParse parse_trips(const Rows& rows, WarningLog& log) {
    TripParse out;
    for (const RawRow& row : rows) {
        Trip trip;
        trip.trip_id = row.get("_id").as_int().value_or(row.rowid);
        trip.ext_trip_id = row.get("ext_trip_id").as_int().value_or(0);
        trip.start = decode_epoch_field(
            row.get("start_date"),
            "start_date of trip " + std::to_string(trip.trip_id), log);
        if (auto v = row.get("name").as_text(); v && !v->empty()) trip.name = *v;
        trip.distance_m = row.get("distance").as_real().value_or(0.0);
        trip.elapsed_s = row.get("elapsed_time").as_real().value_or(0.0);
        if (auto v = row.get("calories").as_real()) trip.calories = *v;
        if (auto v = row.get("notes").as_text(); v && !v->empty()) trip.notes = *v;
        if (trip.distance_m < 0 || trip.elapsed_s < 0)
            log.finding("runkeeper/trips",
                        "trip " + std::to_string(trip.trip_id) +
                            " carries a negative distance or duration");
        out.trips.push_back(std::move(trip));
    }
    std::sort(out.trips.begin(), out.trips.end(),
              [](const Trip& a, const Trip& b) { return a.trip_id < b.trip_id; });

    // Numbering continues across user switches while wiped trips vanish, so
    // holes in _id are evidence of their own.
    for (std::size_t i = 1; i < out.trips.size(); ++i) {
        for (std::int64_t missing = out.trips[i - 1].trip_id + 1;
             missing < out.trips[i].trip_id; ++missing)
            out.id_gaps.push_back(missing);
    }
    if (!out.id_gaps.empty()) {
        std::string ids;
        for (std::int64_t id : out.id_gaps)
            ids += (ids.empty() ? "" : ", ") + std::to_string(id);
        log.finding("runkeeper/trips",
                    "gap in trip _id sequence at {" + ids +
                        "}: possible prior-user or deleted trips");
    }
    return out;
}

std::map<std::int64_t, std::vector<RoutePoint>> parse_points(const Rows& rows,
                                                             WarningLog& log) {
    std::map<std::int64_t, std::vector<RoutePoint>> groups;
    for (const RawRow& row : rows) {
        RoutePoint p;
        p.point_id = row.get("_id").as_int().value_or(row.rowid);
        p.trip_id = row.get("trip_id").as_int().value_or(0);
        p.latitude = row.get("latitude").as_real().value_or(0.0);
        p.longitude = row.get("longitude").as_real().value_or(0.0);
        if (auto v = row.get("altitude").as_real()) p.altitude_m = *v;
        p.time_interval_s =
            row.get("time_interval_at_point").as_real().value_or(0.0);
        p.dist_from_last_m =
            row.get("distance_from_last_point").as_real().value_or(0.0);
        p.dist_at_point_m =
            row.get("distance_at_point").as_real().value_or(0.0);
        p.speed_from_last =
            row.get("speed_from_last_point").as_real().value_or(0.0);
        p.point_type = row.get("point_type").as_int().value_or(0);
        p.accuracy = row.get("accuracy").as_real().value_or(0.0);
        p.valid = p.latitude >= -90.0 && p.latitude <= 90.0 &&
                  p.longitude >= -180.0 && p.longitude <= 180.0;
        if (!p.valid)
            log.finding("runkeeper/points",
                        "point " + std::to_string(p.point_id) +
                            " has out-of-range coordinates; excluded from "
                            "aggregates, raw data retained");
        groups[p.trip_id].push_back(p);
    }

    for (auto& [trip_id, points] : groups) {
        std::sort(points.begin(), points.end(),
                  [](const RoutePoint& a, const RoutePoint& b) {
                      return a.point_id < b.point_id;
                  });
        for (std::size_t i = 1; i < points.size(); ++i) {
            if (points[i].time_interval_s < points[i - 1].time_interval_s ||
                points[i].dist_at_point_m < points[i - 1].dist_at_point_m) {
                log.finding("runkeeper/points",
                            "trip " + std::to_string(trip_id) +
                                " has non-monotone time or distance at point " +
                                std::to_string(points[i].point_id));
            }
        }
    }
    return groups;
}

namespace {

TripSettings settings_for(const Rows& settings_rows, std::int64_t trip_id,
                          WarningLog& log) {
    TripSettings settings;
    for (const RawRow& row : settings_rows) {
        if (row.get("trip_id").as_int().value_or(-1) != trip_id) continue;
        const auto key = row.get("setting_key").as_text();
        if (!key) continue;
        const std::string value = row.get("setting_value").to_display();
        settings.values[*key] = value;
        if (*key == "name" && !value.empty()) settings.display_name = value;
        if (*key == "birthday")
            settings.birthday = decode_epoch_field(
                row.get("setting_value"),
                "birthday setting of trip " + std::to_string(trip_id), log);
    }
    return settings;
}

} // namespace

Reconstruction reconstruct_routes(
    const TripParse& trips,
    const std::map<std::int64_t, std::vector<RoutePoint>>& points,
    const Rows& settings_rows, const Rows& deleted_rows, WarningLog& log) {
    Reconstruction out;

    for (const RawRow& row : deleted_rows) {
        const std::int64_t id = row.get("_id").as_int().value_or(row.rowid);
        out.deleted_trip_ids.insert(id);
        EventData event;
        event.kind = "trip-deleted";
        event.details["trip_id"] = std::to_string(id);
        std::optional<Timestamp> at;
        for (const char* col : {"deleted_at", "delete_date", "timestamp"}) {
            if (auto ts = decode_epoch_field(row.get(col), "deletion time", log)) {
                at = Timestamp::from_epoch(*ts);
                event.details["deleted_at"] = ts->to_iso8601();
                break;
            }
        }
        // Only the time of deletion survives; the location trail is gone.
        out.records.push_back(
            EvidenceRecord::make(kApp, "deleted_trips", row.rowid, event, at));
    }

    std::set<std::int64_t> claimed;
    for (const Trip& trip : trips.trips) {
        TripRoute route;
        route.trip = trip;
        route.settings = settings_for(settings_rows, trip.trip_id, log);

        auto group = points.find(trip.trip_id);
        if (group != points.end()) {
            claimed.insert(trip.trip_id);
            for (const RoutePoint& p : group->second)
                (p.valid ? route.points : route.rejected_points).push_back(p);
        }

        if (route.points.empty()) {
            log.finding("runkeeper/routes",
                        "trip " + std::to_string(trip.trip_id) +
                            " has no location fixes");
        } else {
            const RoutePoint& first = route.points.front();
            const RoutePoint& last = route.points.back();
            if (first.dist_from_last_m != 0.0 || first.dist_at_point_m != 0.0)
                log.finding("runkeeper/routes",
                            "trip " + std::to_string(trip.trip_id) +
                                " does not start at distance zero");
            double cumulative = 0.0;
            double haversine = 0.0;
            for (std::size_t i = 0; i < route.points.size(); ++i) {
                cumulative += route.points[i].dist_from_last_m;
                if (i > 0)
                    haversine += haversine_m(
                        route.points[i - 1].latitude, route.points[i - 1].longitude,
                        route.points[i].latitude, route.points[i].longitude);
            }
            route.haversine_path_m = haversine;
            route.cumulative_check_residual_m =
                std::abs(cumulative - last.dist_at_point_m);
            route.stored_distance_residual_m =
                std::abs(trip.distance_m - last.dist_at_point_m);
            if (*route.cumulative_check_residual_m > 1e-6)
                log.finding("runkeeper/routes",
                            "trip " + std::to_string(trip.trip_id) +
                                " cumulative distance check off by " +
                                fmt(*route.cumulative_check_residual_m) + " m");
            if (trip.elapsed_s != last.time_interval_s)
                log.finding("runkeeper/routes",
                            "trip " + std::to_string(trip.trip_id) +
                                " elapsed_time " + fmt(trip.elapsed_s) +
                                " s differs from last point interval " +
                                fmt(last.time_interval_s) + " s");
        }

        // Trip event plus one fix per point.
        EventData trip_event;
        trip_event.kind = "trip";
        trip_event.details["trip_id"] = std::to_string(trip.trip_id);
        trip_event.details["ext_trip_id"] = std::to_string(trip.ext_trip_id);
        trip_event.details["distance_m"] = fmt(trip.distance_m);
        trip_event.details["elapsed_s"] = fmt(trip.elapsed_s);
        if (route.settings.display_name)
            trip_event.details["name"] = *route.settings.display_name;
        std::optional<Timestamp> start_ts;
        if (trip.start) start_ts = Timestamp::from_epoch(*trip.start);
        out.records.push_back(EvidenceRecord::make(kApp, "trips", trip.trip_id,
                                                   trip_event, start_ts));

        if (out.deleted_trip_ids.count(trip.trip_id)) {
            // Deletion wins: no fix is ever emitted for a deleted trip id.
            log.finding("runkeeper/routes",
                        "trip " + std::to_string(trip.trip_id) +
                            " also appears in deleted_trips; fixes withheld");
            out.routes.push_back(std::move(route));
            continue;
        }
        for (const RoutePoint& p : route.points) {
            GeoFixData fix;
            fix.latitude = p.latitude;
            fix.longitude = p.longitude;
            fix.altitude_m = p.altitude_m;
            fix.trip_ref = p.trip_id;
            std::optional<Timestamp> at;
            if (trip.start) {
                const auto offset_ms = static_cast<std::int64_t>(
                    std::llround(p.time_interval_s * 1000.0));
                at = Timestamp::from_epoch(
                    EpochMillis(trip.start->count() + offset_ms));
            }
            out.records.push_back(
                EvidenceRecord::make(kApp, "points", p.point_id, fix, at));
        }

        out.routes.push_back(std::move(route));
    }

    for (const auto& [trip_id, group] : points) {
        if (claimed.count(trip_id)) continue;
        out.orphan_trip_ids.push_back(trip_id);
        if (out.deleted_trip_ids.count(trip_id)) {
            // Fixes referencing a deleted trip are withheld from the record
            // stream: deletion wins over stray page remnants.
            log.finding("runkeeper/points",
                        "points reference deleted trip " +
                            std::to_string(trip_id) + "; not emitted as fixes");
            continue;
        }
        log.finding("runkeeper/points",
                    "orphan point group: trip " + std::to_string(trip_id) +
                        " has " + std::to_string(group.size()) +
                        " points but no trips row");
    }
    std::sort(out.orphan_trip_ids.begin(), out.orphan_trip_ids.end());
    return out;
}

std::vector<FriendRecord> parse_friends(const Rows& rows, WarningLog& log) {
    std::vector<FriendRecord> out;
    for (const RawRow& row : rows) {
        FriendRecord f;
        f.rowid = row.rowid;
        f.friend_id = row.get("_id").as_int().value_or(row.rowid);
        if (auto v = row.get("name").as_text()) f.name = *v;
        f.fbuid = row.get("fbuid").as_int().value_or(0);
        if (auto v = row.get("email").as_text()) f.email = *v;
        f.status = row.get("status").as_int().value_or(0);
        f.current_month_activity_count =
            row.get("currentMonthActivityCount").as_int().value_or(0);
        f.last_active = decode_epoch_field(row.get("lastActive"),
                                           "friend lastActive", log);
        if (f.last_active && f.last_active->count() == 0) {
            f.implausible_last_active = true;
            log.finding("runkeeper/friends",
                        "friend " + std::to_string(f.friend_id) +
                            " lastActive is the epoch origin; implausible");
        }
        out.push_back(std::move(f));
    }
    return out;
}

std::vector<EvidenceRecord>
friend_records(const std::vector<FriendRecord>& friends) {
    std::vector<EvidenceRecord> records;
    for (const FriendRecord& f : friends) {
        EventData event;
        event.kind = "friend";
        event.details["name"] = f.name;
        event.details["email"] = f.email;
        event.details["status"] = std::to_string(f.status);
        event.details["current_month_activity_count"] =
            std::to_string(f.current_month_activity_count);
        std::optional<Timestamp> at;
        if (f.last_active) at = Timestamp::from_epoch(*f.last_active);
        records.push_back(
            EvidenceRecord::make(kApp, "friends", f.rowid, event, at));
    }
    return records;
}

std::vector<EvidenceRecord>
parse_feed_and_status(const Rows& feed_rows, const Rows& status_rows,
                      const std::set<std::int64_t>& deleted_trip_ids,
                      WarningLog& log) {
    std::vector<EvidenceRecord> records;

    for (const RawRow& row : feed_rows) {
        EventData event;
        event.kind = "feed-post";
        if (auto v = row.get("user_id").as_int())
            event.details["user_id"] = std::to_string(*v);
        if (auto v = row.get("username").as_text())
            event.details["username"] = *v;

        std::string payload;
        for (const char* col : {"data", "json", "payload"}) {
            if (auto v = row.get(col).as_text(); v && !v->empty()) {
                payload = *v;
                break;
            }
        }
        if (!payload.empty()) {
            const auto parsed =
                nlohmann::json::parse(payload, nullptr, false);
            if (parsed.is_discarded()) {
                event.details["payload_raw"] = payload;
                log.finding("runkeeper/feed",
                            "row " + std::to_string(row.rowid) +
                                " carries a malformed payload; retained raw");
            } else {
                for (const char* key : {"duration", "notes", "distance"}) {
                    if (!parsed.contains(key)) continue;
                    const auto& v = parsed[key];
                    event.details[key] = v.is_string()
                                             ? v.get<std::string>()
                                             : nlohmann::to_string(v);
                }
            }
        }
        std::optional<Timestamp> at;
        if (auto ts = decode_epoch_field(row.get("timestamp"),
                                         "feed timestamp", log))
            at = Timestamp::from_epoch(*ts);
        records.push_back(
            EvidenceRecord::make(kApp, "feed", row.rowid, event, at));
    }

    for (const RawRow& row : status_rows) {
        const std::int64_t trip_id = row.get("trip_id").as_int().value_or(0);
        std::optional<Timestamp> at;
        if (auto ts = decode_epoch_field(row.get("timestamp"),
                                         "status_updates timestamp", log))
            at = Timestamp::from_epoch(*ts);

        EventData event;
        event.kind = "image-upload";
        event.details["trip_id"] = std::to_string(trip_id);
        if (auto v = row.get("latitude").as_real())
            event.details["latitude"] = fmt(*v);
        if (auto v = row.get("longitude").as_real())
            event.details["longitude"] = fmt(*v);
        records.push_back(
            EvidenceRecord::make(kApp, "status_updates", row.rowid, event, at));

        if (deleted_trip_ids.count(trip_id)) {
            log.finding("runkeeper/status_updates",
                        "image upload references deleted trip " +
                            std::to_string(trip_id) + "; fix withheld");
            continue;
        }
        const auto lat = row.get("latitude").as_real();
        const auto lon = row.get("longitude").as_real();
        if (lat && lon) {
            GeoFixData fix;
            fix.latitude = *lat;
            fix.longitude = *lon;
            fix.trip_ref = trip_id;
            fix.valid = *lat >= -90 && *lat <= 90 && *lon >= -180 && *lon <= 180;
            records.push_back(EvidenceRecord::make(kApp, "status_updates",
                                                   row.rowid, fix, at));
        }
    }
    return records;
}

std::string to_gpx(const TripRoute& route) {
    std::string gpx =
        "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
        "<gpx version=\"1.1\" creator=\"mhf\" "
        "xmlns=\"http://www.topografix.com/GPX/1/1\">\n";
    gpx += "  <trk>\n    <name>trip " + std::to_string(route.trip.trip_id) +
           "</name>\n    <trkseg>\n";
    for (const RoutePoint& p : route.points) {
        gpx += "      <trkpt lat=\"" + fmt(p.latitude) + "\" lon=\"" +
               fmt(p.longitude) + "\">\n";
        if (p.altitude_m)
            gpx += "        <ele>" + fmt(*p.altitude_m) + "</ele>\n";
        if (route.trip.start) {
            const auto offset_ms = static_cast<std::int64_t>(
                std::llround(p.time_interval_s * 1000.0));
            gpx += "        <time>" +
                   EpochMillis(route.trip.start->count() + offset_ms)
                       .to_iso8601() +
                   "</time>\n";
        }
        gpx += "      </trkpt>\n";
    }
    gpx += "    </trkseg>\n  </trk>\n</gpx>\n";
    return gpx;
}

Extraction parse_store(const StoreHandle& store, const ZoneSpec& /*tz*/,
                       WarningLog& log) {
    Extraction out;

    const auto rows_of = [&](const char* table) -> Rows {
        if (!store.has_table(table)) {
            log.finding("runkeeper",
                        std::string("table missing, skipped: ") + table);
            return {};
        }
        return store.read_rows(table, &log);
    };

    out.trips = parse_trips(rows_of("trips"), log);
    const auto points = parse_points(rows_of("points"), log);
    out.reconstruction =
        reconstruct_routes(out.trips, points, rows_of("trip_settings"),
                           rows_of("deleted_trips"), log);
    out.records.insert(out.records.end(), out.reconstruction.records.begin(),
                       out.reconstruction.records.end());

    out.friends = parse_friends(rows_of("friends"), log);
    auto friends = friend_records(out.friends);
    out.records.insert(out.records.end(), friends.begin(), friends.end());

    auto feed = parse_feed_and_status(rows_of("feed"), rows_of("status_updates"),
                                      out.reconstruction.deleted_trip_ids, log);
    out.records.insert(out.records.end(), feed.begin(), feed.end());

    return out;
}

} // namespace mhf::runkeeper
