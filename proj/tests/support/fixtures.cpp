#include "fixtures.hpp"

#include <sqlite3.h>
#include <unistd.h>

#include <fstream>
#include <ios>
#include <stdexcept>

namespace mhf::test {

namespace {

namespace fs = std::filesystem;

void remove_if_exists(const fs::path& path) {
    std::error_code ec;
    fs::remove(path, ec);
}

} // namespace

DbWriter::DbWriter(const fs::path& path, bool truncate) {
    if (truncate) {
        remove_if_exists(path);
        if (path.has_parent_path()) fs::create_directories(path.parent_path());
    }
    if (sqlite3_open(path.string().c_str(), &db_) != SQLITE_OK)
        throw std::runtime_error("cannot create fixture db " + path.string());
    exec("PRAGMA journal_mode=MEMORY");
}

DbWriter::~DbWriter() {
    if (db_) sqlite3_close(db_);
}

void DbWriter::exec(const std::string& sql) {
    char* err = nullptr;
    if (sqlite3_exec(db_, sql.c_str(), nullptr, nullptr, &err) != SQLITE_OK) {
        const std::string message = err ? err : "unknown error";
        sqlite3_free(err);
        throw std::runtime_error("fixture sql failed: " + message + " [" + sql +
                                 "]");
    }
}

void DbWriter::insert(const std::string& table,
                      const std::vector<std::string>& columns,
                      const std::vector<Value>& values) {
    std::string sql = "INSERT INTO \"" + table + "\" (";
    for (std::size_t i = 0; i < columns.size(); ++i)
        sql += (i ? ",\"" : "\"") + columns[i] + "\"";
    sql += ") VALUES (";
    for (std::size_t i = 0; i < columns.size(); ++i) sql += i ? ",?" : "?";
    sql += ")";

    sqlite3_stmt* stmt = nullptr;
    if (sqlite3_prepare_v2(db_, sql.c_str(), -1, &stmt, nullptr) != SQLITE_OK)
        throw std::runtime_error("fixture prepare failed: " + sql);
    for (std::size_t i = 0; i < values.size(); ++i) {
        const int idx = static_cast<int>(i) + 1;
        const Value& v = values[i];
        switch (v.type()) {
        case Value::Type::Null: sqlite3_bind_null(stmt, idx); break;
        case Value::Type::Integer: sqlite3_bind_int64(stmt, idx, *v.as_int()); break;
        case Value::Type::Real: sqlite3_bind_double(stmt, idx, *v.as_real()); break;
        case Value::Type::Text: {
            const std::string text = *v.as_text();
            sqlite3_bind_text(stmt, idx, text.c_str(),
                              static_cast<int>(text.size()), SQLITE_TRANSIENT);
            break;
        }
        case Value::Type::Blob: {
            const auto* blob = v.as_blob();
            sqlite3_bind_blob(stmt, idx, blob->data(),
                              static_cast<int>(blob->size()), SQLITE_TRANSIENT);
            break;
        }
        }
    }
    const int rc = sqlite3_step(stmt);
    sqlite3_finalize(stmt);
    if (rc != SQLITE_DONE)
        throw std::runtime_error("fixture insert failed into " + table);
}

namespace {

Value I(std::int64_t v) { return Value(v); }
Value R(double v) { return Value(v); }
Value T(std::string v) { return Value(std::move(v)); }
Value N() { return Value(); }

void make_filler_tables(DbWriter& db, const std::vector<std::string>& names) {
    for (const std::string& name : names)
        db.exec("CREATE TABLE \"" + name +
                "\" (id INTEGER PRIMARY KEY, value TEXT)");
}

} // namespace

void build_mfp_db(const fs::path& path) {
    DbWriter db(path);

    db.exec("CREATE TABLE user_properties (id INTEGER PRIMARY KEY, "
            "user_id INTEGER, property_name TEXT, property_value TEXT, "
            "updated_at TEXT, last_sync_at TEXT)");
    db.exec("CREATE TABLE users (id INTEGER PRIMARY KEY, master_id INTEGER, "
            "username TEXT, password TEXT, last_sync_at TEXT, pincode TEXT)");
    db.exec("CREATE TABLE images (user_id INTEGER, image_type INTEGER, "
            "filename TEXT, thumbnail_image TEXT, full_image_url TEXT, "
            "created_at TEXT, updated_at TEXT)");
    db.exec("CREATE TABLE diary_notes (id INTEGER PRIMARY KEY, "
            "master_id INTEGER, user_id INTEGER, entry_date TEXT, "
            "note_type INTEGER, body TEXT, uid INTEGER)");
    db.exec("CREATE TABLE exercise_entries (id INTEGER PRIMARY KEY, "
            "user_id INTEGER, exercise_id INTEGER, entry_date TEXT, "
            "quantity REAL, calories REAL)");
    db.exec("CREATE TABLE exercises (id INTEGER PRIMARY KEY, name TEXT, "
            "exercise_type INTEGER)");
    db.exec("CREATE TABLE food_entries (id INTEGER PRIMARY KEY, "
            "user_id INTEGER, food_id INTEGER, entry_date TEXT, "
            "meal_name TEXT, quantity REAL)");
    db.exec("CREATE TABLE foods (id INTEGER PRIMARY KEY, master_id INTEGER, "
            "description TEXT, calories REAL)");
    db.exec("CREATE TABLE measurement_types (id INTEGER PRIMARY KEY, "
            "name TEXT)");
    db.exec("CREATE TABLE measurements (id INTEGER PRIMARY KEY, "
            "user_id INTEGER, type_id INTEGER, entry_date TEXT, value REAL)");
    db.exec("CREATE TABLE search_history (id INTEGER PRIMARY KEY, "
            "user_id INTEGER, search_term TEXT, created_at TEXT)");
    db.exec("CREATE TABLE last_sync_pointers (id INTEGER PRIMARY KEY, "
            "user_id INTEGER, item_type TEXT, last_sync_at TEXT)");
    make_filler_tables(
        db, {"android_metadata", "app_state", "custom_exercises",
             "custom_foods", "deleted_items", "failed_requests", "food_notes",
             "food_portions", "goals", "messages", "notifications",
             "nutrient_goals", "pending_uploads", "profiles_cache", "recipes",
             "recipe_ingredients", "reminders", "sessions", "settings",
             "steps_entries", "sync_settings", "water_entries"});

    const std::vector<std::string> prop_cols = {
        "id", "user_id", "property_name", "property_value", "updated_at",
        "last_sync_at"};
    const std::string u1_upd = "2015-01-20 12:55:44";
    const std::string u1_sync = "2015-01-20 12:56:17";
    const std::string u2_ts = "2015-01-18 12:10:30";
    const auto prop = [&](std::int64_t id, std::int64_t user,
                          const std::string& name, const std::string& value,
                          const std::string& upd, const std::string& sync) {
        db.insert("user_properties", prop_cols,
                  {I(id), I(user), T(name), T(value), T(upd), T(sync)});
    };
    prop(1, 1, "timezone_identifier", "Australia/Adelaide", u1_upd, u1_sync);
    prop(6, 1, "gender", "Female", u1_upd, u1_sync);
    prop(7, 1, "date_of_birth", "1985-03-19", u1_upd, u1_sync);
    prop(8, 1, "country_name", "Bangladesh", u1_upd, u1_sync);
    prop(9, 1, "postal_code", "1230", u1_upd, u1_sync);
    prop(15, 1, "diary_privacy_setting", "password", u1_upd, u1_sync);
    prop(16, 1, "diary_password", "pass2015", u1_upd, u1_sync);
    prop(62, 1, "email", "iamrunner@gmail.com", u1_upd, u1_sync);
    // Stale duplicate of user 1's timezone with an earlier updated_at.
    prop(81, 1, "timezone_identifier", "Australia/Sydney", u2_ts, u2_ts);
    prop(86, 2, "gender", "Male", u2_ts, u2_ts);
    prop(87, 2, "date_of_birth", "1990-01-09", u2_ts, u2_ts);
    prop(88, 2, "country_name", "Australia", u2_ts, u2_ts);
    prop(89, 2, "postal_code", "1112", u2_ts, u2_ts);
    prop(95, 2, "diary_privacy_setting", "private", u2_ts, u2_ts);
    prop(96, 2, "diary_password", "", u2_ts, u2_ts);
    prop(142, 2, "email", "abishkking@gmail.com", u2_ts, u2_ts);

    const std::vector<std::string> user_cols = {
        "id", "master_id", "username", "password", "last_sync_at", "pincode"};
    db.insert("users", user_cols,
              {I(1), I(61252726), T("iamrunner"),
               T("94d4d38a8380ffff23cbd4c0a69df5fd145bd9e6"),
               T("2015-01-20 12:56:17"), T("2015")});
    db.insert("users", user_cols,
              {I(2), I(81074846), T("abrunner"),
               T("71bc5027b0387562e0c90dbc3d30301b0ee109af"),
               T("2015-01-18 12:10:30"), T("2525")});

    const std::vector<std::string> image_cols = {
        "user_id",        "image_type", "filename",  "thumbnail_image",
        "full_image_url", "created_at", "updated_at"};
    db.insert("images", image_cols,
              {I(2), I(1), T("user/9f83/8c83/profile.jpg"),
               T("http://dakd0cjsv8wfa.cloudfront.net/images/photos/user/"
                 "9f83/8c83/thumb.jpg"),
               T("http://dakd0cjsv8wfa.cloudfront.net/images/photos/user/"
                 "9f83/8c83/profile.jpg"),
               T("2015-01-18 01:4..."), T("2015-01-18 01:4...")});
    db.insert("images", image_cols,
              {I(1), I(1), T("user/a7ab/f661/profile.jpg"),
               T("http://dakd0cjsv8wfa.cloudfront.net/images/photos/user/"
                 "a7ab/f661/thumb.jpg"),
               T("http://dakd0cjsv8wfa.cloudfront.net/images/photos/user/"
                 "a7ab/f661/profile.jpg"),
               T("2015-01-21 04:3..."), T("2015-01-21 04:3...")});

    const std::vector<std::string> note_cols = {
        "id", "master_id", "user_id", "entry_date", "note_type", "body", "uid"};
    db.insert("diary_notes", note_cols,
              {I(3), I(10893913), I(1), T("2015-01-16"), I(0),
               T("Eat less, live more"), I(23802195930941)});
    db.insert("diary_notes", note_cols,
              {I(13), I(10893915), I(1), T("2015-01-16"), I(1), T("Work hard"),
               I(23802195931069)});
    db.insert("diary_notes", note_cols,
              {I(16), I(10924345), I(2), T("2015-01-23"), I(0),
               T("Is this entry visible in the database?"), I(94179693604669)});
    db.insert("diary_notes", note_cols,
              {I(17), I(10924348), I(2), T("2015-01-23"), I(1),
               T("This is exercise note"), I(93629946179389)});

    db.insert("exercise_entries",
              {"id", "user_id", "exercise_id", "entry_date", "quantity",
               "calories"},
              {I(1), I(1), I(1), T("2015-01-20"), R(30.0), R(180.0)});
    db.insert("exercises", {"id", "name", "exercise_type"},
              {I(1), T("Walking"), I(0)});
    db.insert("food_entries",
              {"id", "user_id", "food_id", "entry_date", "meal_name",
               "quantity"},
              {I(1), I(1), I(1), T("2015-01-20"), T("Breakfast"), R(1.0)});
    db.insert("foods", {"id", "master_id", "description", "calories"},
              {I(1), I(77), T("Oats"), R(150.0)});
    db.insert("measurement_types", {"id", "name"}, {I(1), T("Weight")});
    db.insert("measurements",
              {"id", "user_id", "type_id", "entry_date", "value"},
              {I(1), I(1), I(1), T("2015-01-20"), R(65.2)});
    db.insert("search_history",
              {"id", "user_id", "search_term", "created_at"},
              {I(1), I(1), T("green smoothie"), T("2015-01-20 12:40:02")});
    db.insert("last_sync_pointers",
              {"id", "user_id", "item_type", "last_sync_at"},
              {I(1), I(1), T("diary_entries"), T("2015-01-20 12:56:17")});
}

void build_runkeeper_db(const fs::path& path) {
    DbWriter db(path);

    db.exec("CREATE TABLE trips (_id INTEGER PRIMARY KEY, ext_trip_id INTEGER, "
            "start_date REAL, name TEXT, distance REAL, elapsed_time REAL, "
            "calories REAL, notes TEXT)");
    db.exec("CREATE TABLE points (_id INTEGER PRIMARY KEY, "
            "ext_point_id INTEGER, trip_id INTEGER, has_been_sent INTEGER, "
            "latitude REAL, longitude REAL, altitude REAL, "
            "time_at_point INTEGER, time_interval_at_point REAL, "
            "speed_from_last_point REAL, distance_from_last_point REAL, "
            "point_type INTEGER, accuracy REAL, distance_at_point REAL)");
    db.exec("CREATE TABLE trip_settings (id INTEGER PRIMARY KEY, "
            "trip_id INTEGER, setting_key TEXT, setting_value TEXT)");
    db.exec("CREATE TABLE friends (_id INTEGER PRIMARY KEY, name TEXT, "
            "fbuid INTEGER, email TEXT, status INTEGER, "
            "currentMonthActivityCount INTEGER, lastActive INTEGER)");
    db.exec("CREATE TABLE deleted_trips (_id INTEGER PRIMARY KEY, "
            "ext_trip_id INTEGER, deleted_at INTEGER)");
    db.exec("CREATE TABLE feed (_id INTEGER PRIMARY KEY, user_id INTEGER, "
            "username TEXT, timestamp INTEGER, data TEXT)");
    db.exec("CREATE TABLE status_updates (_id INTEGER PRIMARY KEY, "
            "trip_id INTEGER, timestamp INTEGER, latitude REAL, "
            "longitude REAL)");
    make_filler_tables(
        db, {"android_metadata", "activity_summaries", "audio_cues",
             "challenges", "challenge_events", "elite_status",
             "friend_invites", "goals", "heart_rates", "notifications",
             "nutrition_entries", "pending_posts", "personal_records",
             "routes_cache", "scheduled_classes", "settings", "shoes",
             "shoe_activities", "splits", "sync_state", "training_sessions",
             "weight_entries", "workouts", "workout_intervals"});

    const std::vector<std::string> trip_cols = {
        "_id",      "ext_trip_id",  "start_date", "name",
        "distance", "elapsed_time", "calories",   "notes"};
    db.insert("trips", trip_cols,
              {I(1), I(502472481), R(1422297991793.0), N(),
               R(19.8604922024573), R(113.0), N(), N()});
    db.insert("trips", trip_cols,
              {I(2), I(502473487), R(1422298294182.0), N(), R(3000.0), R(30.0),
               N(), N()});
    db.insert("trips", trip_cols,
              {I(3), I(502480002), R(1422299047685.0), N(),
               R(19.0393058849443), R(621.0), N(), N()});
    db.insert("trips", trip_cols,
              {I(4), I(502480917), R(1422299849693.0), N(), R(0.0), R(5.0),
               N(), N()});
    db.insert("trips", trip_cols,
              {I(6), I(0), R(1422362022221.0), N(), R(207.516353980068),
               R(219.0), N(), N()});

    const std::vector<std::string> point_cols = {
        "_id",
        "ext_point_id",
        "trip_id",
        "has_been_sent",
        "latitude",
        "longitude",
        "altitude",
        "time_at_point",
        "time_interval_at_point",
        "speed_from_last_point",
        "distance_from_last_point",
        "point_type",
        "accuracy",
        "distance_at_point"};
    const auto point = [&](std::int64_t id, std::int64_t trip, double lat,
                           double lon, double alt, double interval,
                           double speed, double dist_last, std::int64_t type,
                           double accuracy, double dist_at) {
        db.insert("points", point_cols,
                  {I(id), N(), I(trip), I(0), R(lat), R(lon), R(alt), I(0),
                   R(interval), R(speed), R(dist_last), I(type), R(accuracy),
                   R(dist_at)});
    };
    point(5, 1, -34.8067581, 138.61073062, 11.0, 0.0, 0.0, 0.0, 0, 34.0, 0.0);
    point(6, 1, -34.80676169, 138.61074841, 11.0, 3.0, 0.557521681240173,
          1.67256504372052, 4, 15.0, 1.67256504372052);
    point(7, 1, -34.80681559, 138.61082237, 11.0, 41.0, 0.220212882705303,
          9.02872819091741, 4, 4.0, 10.7012932346379);
    point(8, 1, -34.80684196, 138.61091741, 11.0, 88.0, 0.104081806452493,
          9.15919896781941, 5, 4.0, 19.8604922024573);
    point(13, 3, -34.80677696, 138.61074804, 11.0, 0.0, 0.0, 0.0, 0, 18.0, 0.0);
    point(14, 3, -34.80677456, 138.61074602, 11.0, 2.0, 0.162197006111948,
          0.324394012223896, 4, 10.0, 0.324394012223896);
    point(15, 3, -34.80681168, 138.61084043, 11.0, 162.0, 0.0589934089358041,
          9.55693224760027, 4, 11.0, 9.88132625982416);
    point(16, 3, -34.80683205, 138.61093762, 11.0, 167.0, 0.0548382013480251,
          9.15797962512019, 5, 11.0, 19.0393058849444);
    point(60, 6, -34.81003651, 138.61946183, 17.0, 0.0, 0.0, 0.0, 0, 25.0, 0.0);
    point(61, 6, -34.81007723, 138.61959495, 17.0, 44.0, 0.294759967667325,
          12.9694385773623, 4, 15.0, 12.9694385773623);
    point(62, 6, -34.81006891, 138.61949439, 17.0, 55.0, 0.167768510866551,
          9.22726809766029, 4, 5.0, 22.1967066750226);
    // Continuation of trip 6 beyond the published snapshot, closing the
    // route at the stored total distance.
    point(63, 6, -34.8101523, 138.6204051, 17.0, 150.0, 1.05263157894737,
          100.0, 4, 8.0, 122.1967066750226);
    point(64, 6, -34.8102103, 138.6211724, 17.0, 219.0, 1.2365166276166,
          85.3196473050454, 5, 6.0, 207.516353980068);

    const std::vector<std::string> setting_cols = {"id", "trip_id",
                                                   "setting_key",
                                                   "setting_value"};
    std::int64_t setting_id = 0;
    for (std::int64_t trip : {1, 2, 3, 4, 6}) {
        db.insert("trip_settings", setting_cols,
                  {I(++setting_id), I(trip), T("name"), T("Runner One")});
        db.insert("trip_settings", setting_cols,
                  {I(++setting_id), I(trip), T("birthday"), T("463881600000")});
        db.insert("trip_settings", setting_cols,
                  {I(++setting_id), I(trip), T("units"), T("metric")});
    }

    db.insert("friends",
              {"_id", "name", "fbuid", "email", "status",
               "currentMonthActivityCount", "lastActive"},
              {I(39876746), T("Abishkking"), I(0), T("abishkking@gmail.com"),
               I(1), I(2), I(1422304983101)});

    db.insert("deleted_trips", {"_id", "ext_trip_id", "deleted_at"},
              {I(5), I(502480944), I(1422300500123)});

    db.insert("feed", {"_id", "user_id", "username", "timestamp", "data"},
              {I(1), I(61252726), T("runnerone"), I(1422298304000),
               T(R"({"duration":113.0,"notes":"morning run","distance":19.8604922024573})")});

    db.insert("status_updates",
              {"_id", "trip_id", "timestamp", "latitude", "longitude"},
              {I(1), I(1), I(1422298000000), R(-34.8068), R(138.6108)});
}

void build_pc_db(const fs::path& path) {
    DbWriter db(path);

    db.exec("CREATE TABLE user (_id INTEGER PRIMARY KEY, uid INTEGER, "
            "username TEXT, password TEXT, email TEXT, question TEXT, "
            "answer TEXT, setting TEXT, temp1 TEXT, temp2 TEXT, temp3 TEXT)");
    db.exec("CREATE TABLE note (_id INTEGER PRIMARY KEY, uid INTEGER, "
            "date INTEGER, note TEXT, pill TEXT, temperature REAL, "
            "weight REAL, symptoms TEXT, moods TEXT)");
    db.exec("CREATE TABLE period (_id INTEGER PRIMARY KEY, "
            "menses_start INTEGER, menses_length INTEGER, "
            "period_length INTEGER, pregnancy INTEGER, uid INTEGER)");
    make_filler_tables(db, {"android_metadata", "app_setting"});

    const std::vector<std::string> user_cols = {
        "_id",      "uid",    "username", "password", "email", "question",
        "answer",   "setting", "temp1",   "temp2",    "temp3"};
    db.insert("user", user_cols,
              {I(1), I(0), T("Default user"), T("iarg2013"),
               T("iarg2013@gmail.com"), T("Your favorite color?"), T("blue"),
               T(R"({"1":{"key":"weight_unit","value":1},"2":{"key":"ignore_irregular","value":0}})"),
               T(""), T(""), T("")});
    db.insert("user", user_cols,
              {I(2), I(1), T("seconduser"), T("2user"),
               T("seconduser@gmail.com"), T("Your first phone number?"),
               T("654321"),
               T(R"({"1":{"key":"weight_unit","value":1},"2":{"key":"period_length","value":28}})"),
               T(""), T(""), T("")});
    db.insert("user", user_cols,
              {I(3), I(2), T("thirduser"), T("3user"),
               T("thirduser@gmail.com"), T("Your boss name?"), T("kkkkkkk"),
               T(R"({"1":{"key":"period_length","value":30},"2":{"key":"menses_length","value":6}})"),
               T(""), T(""), T("")});

    const std::vector<std::string> note_cols = {
        "_id", "uid", "date", "note", "pill", "temperature", "weight",
        "symptoms", "moods"};
    db.insert("note", note_cols,
              {I(1), I(0), I(1421674200000), T("feeling fine"), T("Aspirin"),
               R(36.6), R(130.0), T(""), T("")});
    db.insert("note", note_cols,
              {I(2), I(1), I(1422279000000), T(""), T(""), R(0.0), R(141.0),
               T(""), T("")});

    const std::vector<std::string> period_cols = {
        "_id", "menses_start", "menses_length", "period_length", "pregnancy",
        "uid"};
    db.insert("period", period_cols,
              {I(4), I(1421587800000), I(3), I(19), I(0), I(0)});
    db.insert("period", period_cols,
              {I(6), I(1419255000000), I(-3), I(27), I(0), I(0)});
    db.insert("period", period_cols,
              {I(7), I(1423229400000), I(-3), I(27), I(0), I(0)});
    db.insert("period", period_cols,
              {I(8), I(1422279000000), I(-4), I(26), I(0), I(1)});
    db.insert("period", period_cols,
              {I(9), I(1422711000000), I(6), I(30), I(0), I(2)});
}

void build_pc_pill_db(const fs::path& path) {
    DbWriter db(path);
    db.exec("CREATE TABLE pill (_id INTEGER PRIMARY KEY, uid INTEGER, "
            "name TEXT, first_take_date INTEGER, next_medication INTEGER)");
    db.exec("CREATE TABLE pill_record (_id INTEGER PRIMARY KEY, "
            "pill_id INTEGER, date INTEGER, description TEXT)");
    make_filler_tables(db, {"android_metadata", "pill_setting"});

    db.insert("pill",
              {"_id", "uid", "name", "first_take_date", "next_medication"},
              {I(1), I(0), T("Levonelle"), I(1421587800000), I(1422711000000)});
    db.insert("pill_record", {"_id", "pill_id", "date", "description"},
              {I(1), I(1), I(1421674200000), T("taken with water")});
}

void build_pc_backup_db(const fs::path& path) {
    build_pc_db(path);
    // The backup predates a deletion: it still holds a period row the live
    // database no longer has.
    DbWriter db(path, /*truncate=*/false);
    db.insert("period",
              {"_id", "menses_start", "menses_length", "period_length",
               "pregnancy", "uid"},
              {I(10), I(1424439000000), I(4), I(28), I(0), I(1)});
}

void build_corrupt_db(const fs::path& path) {
    {
        DbWriter db(path);
        db.exec("CREATE TABLE small (id INTEGER PRIMARY KEY, v TEXT)");
        db.insert("small", {"id", "v"}, {I(1), T("ok")});
        db.exec("CREATE TABLE big (id INTEGER PRIMARY KEY, v TEXT)");
        const std::string filler(100, 'x');
        for (int i = 0; i < 400; ++i)
            db.insert("big", {"id", "v"}, {I(i + 1), T(filler)});
    }
    // Zero out the leaf pages holding `big`'s rows (identified by their
    // filler content); the schema page and `small` stay readable.
    std::fstream file(path, std::ios::binary | std::ios::in | std::ios::out);
    if (!file) throw std::runtime_error("cannot reopen corrupt fixture");
    file.seekg(16);
    unsigned char ps[2] = {};
    file.read(reinterpret_cast<char*>(ps), 2);
    std::size_t page_size = (std::size_t(ps[0]) << 8) | ps[1];
    if (page_size == 1) page_size = 65536;
    file.seekg(0, std::ios::end);
    const std::size_t total = static_cast<std::size_t>(file.tellg());
    const std::string needle(50, 'x');
    std::string page(page_size, '\0');
    const std::string zeros(page_size, '\0');
    for (std::size_t offset = page_size; offset + page_size <= total;
         offset += page_size) {
        file.seekg(static_cast<std::streamoff>(offset));
        file.read(page.data(), static_cast<std::streamsize>(page_size));
        if (page.find(needle) == std::string::npos) continue;
        file.seekp(static_cast<std::streamoff>(offset));
        file.write(zeros.data(), static_cast<std::streamsize>(page_size));
    }
}

std::filesystem::path build_tree(const fs::path& root) {
    fs::create_directories(root / "data/data/com.myfitnesspal.android/databases");
    fs::create_directories(
        root / "data/data/com.fitnesskeeper.runkeeper.pro/databases");
    fs::create_directories(
        root / "data/data/com.popularapp.periodcalendar/databases");
    fs::create_directories(root / "sdcard");

    build_mfp_db(root /
                 "data/data/com.myfitnesspal.android/databases/myfitnesspal.db");
    build_runkeeper_db(
        root / "data/data/com.fitnesskeeper.runkeeper.pro/databases/RunKeeper.sqlite");
    build_pc_db(root / "data/data/com.popularapp.periodcalendar/databases/PC.db");

    const auto write_bytes = [](const fs::path& p, std::string_view bytes) {
        std::ofstream out(p, std::ios::binary);
        out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    };
    // Tiny JPEG-ish stubs; content is irrelevant, only the name pattern is.
    write_bytes(root / "sdcard/tmp_avatar_mfp~1.jpg",
                std::string("\xFF\xD8\xFF\xE0", 4) + "avatar-one");
    write_bytes(root / "sdcard/tmp_avatar_mfp~2.jpg",
                std::string("\xFF\xD8\xFF\xE0", 4) + "avatar-two");
    write_bytes(root / "sdcard/avatar.jpg",
                std::string("\xFF\xD8\xFF\xE0", 4) + "decoy");
    return root;
}

namespace {

const fs::path& base_dir() {
    static const fs::path dir = [] {
        fs::path d = fs::temp_directory_path() /
                     ("mhf-fixtures-" + std::to_string(::getpid()));
        fs::create_directories(d);
        return d;
    }();
    return dir;
}

} // namespace

const fs::path& fixture_dir() { return base_dir(); }

const fs::path& mfp_path() {
    static const fs::path path = [] {
        const fs::path p = base_dir() / "myfitnesspal.db";
        build_mfp_db(p);
        return p;
    }();
    return path;
}

const fs::path& runkeeper_path() {
    static const fs::path path = [] {
        const fs::path p = base_dir() / "RunKeeper.sqlite";
        build_runkeeper_db(p);
        return p;
    }();
    return path;
}

const fs::path& pc_path() {
    static const fs::path path = [] {
        const fs::path p = base_dir() / "PC.db";
        build_pc_db(p);
        return p;
    }();
    return path;
}

const fs::path& pc_pill_path() {
    static const fs::path path = [] {
        const fs::path p = base_dir() / "PC_PILL.db";
        build_pc_pill_db(p);
        return p;
    }();
    return path;
}

} // namespace mhf::test
