#include "mhf/mfp.hpp"

#include <algorithm>

namespace mhf::mfp {

namespace {

constexpr const char* kApp = "MyFitnessPal";

// Scans the usual timestamp columns; naive strings resolve under the
// assumed zone, integer values at millisecond scale decode as epochs.
std::optional<Timestamp> best_timestamp(const RawRow& row, const ZoneSpec& tz) {
    static const char* candidates[] = {"entry_date", "created_at", "updated_at",
                                       "date",       "timestamp",  "last_sync_at",
                                       "searched_at"};
    for (const char* col : candidates) {
        const Value& v = row.get(col);
        if (v.is_null()) continue;
        if (v.type() == Value::Type::Text) {
            if (auto ts = Timestamp::from_naive(*v.as_text(), tz)) return ts;
            continue;
        }
        if (auto n = v.as_int(); n && *n > 100'000'000'000) {
            return Timestamp::from_epoch(EpochMillis(*n));
        }
    }
    return std::nullopt;
}

std::map<std::string, std::string> row_details(const RawRow& row) {
    std::map<std::string, std::string> details;
    if (!row.columns) return details;
    for (std::size_t i = 0; i < row.columns->size(); ++i) {
        const Value& v = row.values[i];
        if (v.is_null()) continue;
        details[(*row.columns)[i]] = v.to_display();
    }
    return details;
}

} // namespace

const std::vector<std::string>& tables_of_interest() {
    static const std::vector<std::string> tables = {
        "user_properties", "users",
        "images",          "diary_notes",
        "exercise_entries", "exercises",
        "food_entries",    "foods",
        "measurement_types", "measurements",
        "last_sync_pointers", "search_history",
    };
    return tables;
}

std::optional<std::string> UserProfile::attr(const std::string& name) const {
    auto it = attributes.find(name);
    if (it == attributes.end()) return std::nullopt;
    return it->second.value;
}

std::map<std::int64_t, UserProfile>
pivot_user_properties(const Rows& rows, const ZoneSpec& tz, WarningLog& log) {
    std::map<std::int64_t, UserProfile> profiles;
    for (const RawRow& row : rows) {
        const auto user_id = row.get("user_id").as_int();
        const auto name = row.get("property_name").as_text();
        if (!user_id || !name || name->empty()) {
            log.degraded("mfp/user_properties",
                         "row " + std::to_string(row.rowid) +
                             " lacks user_id or property_name");
            continue;
        }
        ProfileAttribute attr;
        if (auto v = row.get("property_value").as_text()) attr.value = *v;
        if (auto v = row.get("updated_at").as_text())
            attr.updated_at = Timestamp::from_naive(*v, tz);
        if (auto v = row.get("last_sync_at").as_text())
            attr.last_sync_at = Timestamp::from_naive(*v, tz);
        attr.source_rowid = row.rowid;

        UserProfile& profile = profiles[*user_id];
        profile.user_id = *user_id;
        auto [it, inserted] = profile.attributes.emplace(*name, attr);
        if (!inserted) {
            // Duplicate (user, property): latest updated_at wins.
            const std::int64_t incumbent =
                it->second.updated_at
                    ? it->second.updated_at->instant().count()
                    : -1;
            const std::int64_t challenger =
                attr.updated_at ? attr.updated_at->instant().count() : -1;
            log.finding("mfp/user_properties",
                        "duplicate property '" + *name + "' for user " +
                            std::to_string(*user_id) +
                            "; kept the later updated_at");
            if (challenger > incumbent) it->second = attr;
        }
    }
    return profiles;
}

std::vector<MfpCredential> parse_mfp_users(const Rows& rows, WarningLog& log) {
    std::vector<MfpCredential> out;
    for (const RawRow& row : rows) {
        MfpCredential cred;
        cred.rowid = row.rowid;
        cred.id = row.get("id").as_int().value_or(row.rowid);
        cred.master_id = row.get("master_id").as_int().value_or(0);
        if (auto v = row.get("username").as_text()) cred.username = *v;
        if (auto v = row.get("password").as_text()) cred.password_digest = *v;
        if (auto v = row.get("last_sync_at").as_text()) cred.last_sync_at_raw = *v;

        const CredentialClass cls =
            classify_credential(cred.password_digest, "password");
        cred.password_kind = cls.kind;

        const Value& pin = row.get("pincode");
        if (!pin.is_null()) {
            const std::string text = pin.to_display();
            if (!text.empty()) {
                cred.pincode = text;
                const CredentialClass pin_cls = classify_credential(text, "pincode");
                if (pin_cls.shape_warning)
                    log.finding("mfp/users",
                                "pincode of row " + std::to_string(row.rowid) +
                                    " is not a 4-digit value");
            }
        }
        out.push_back(std::move(cred));
    }
    return out;
}

std::vector<EvidenceRecord>
credential_records(const std::vector<MfpCredential>& creds) {
    std::vector<EvidenceRecord> records;
    for (const MfpCredential& c : creds) {
        if (!c.password_digest.empty()) {
            CredentialData data;
            data.kind = c.password_kind;
            data.value = c.password_digest;
            data.field = "password";
            data.user_ref = c.id;
            records.push_back(
                EvidenceRecord::make(kApp, "users", c.rowid, data));
        }
        if (c.pincode) {
            const CredentialClass cls = classify_credential(*c.pincode, "pincode");
            CredentialData data;
            data.kind = cls.kind;
            data.shape_warning = cls.shape_warning;
            data.value = *c.pincode;
            data.field = "pincode";
            data.user_ref = c.id;
            records.push_back(
                EvidenceRecord::make(kApp, "users", c.rowid, data));
        }
    }
    return records;
}

std::vector<EvidenceRecord>
profile_records(const std::map<std::int64_t, UserProfile>& profiles,
                const Rows& /*rows*/, const ZoneSpec& /*tz*/) {
    std::vector<EvidenceRecord> records;
    for (const auto& [user_id, profile] : profiles) {
        IdentityData identity;
        identity.user_ref = user_id;
        identity.attributes = profile.attributes;

        // The profile is dated by its most recent attribute update.
        std::optional<Timestamp> latest;
        for (const auto& [name, attr] : profile.attributes) {
            if (attr.updated_at &&
                (!latest || attr.updated_at->instant() > latest->instant()))
                latest = attr.updated_at;
        }
        records.push_back(EvidenceRecord::make(kApp, "user_properties", user_id,
                                               identity, latest));

        // The diary password doubles as a queryable credential record.
        auto diary = profile.attributes.find("diary_password");
        if (diary != profile.attributes.end()) {
            const CredentialClass cls =
                classify_credential(diary->second.value, "diary_password");
            CredentialData data;
            data.kind = cls.kind;
            data.value = diary->second.value;
            data.field = "diary_password";
            data.user_ref = user_id;
            records.push_back(EvidenceRecord::make(
                kApp, "user_properties", diary->second.source_rowid, data));
        }
    }
    return records;
}

std::vector<EvidenceRecord> parse_mfp_images(const Rows& rows,
                                             const ZoneSpec& tz,
                                             WarningLog& log) {
    std::vector<EvidenceRecord> records;
    for (const RawRow& row : rows) {
        MediaRefData media;
        if (auto url = row.get("full_image_url").as_text()) media.target = *url;

        const auto scheme_end = media.target.find("://");
        if (scheme_end != std::string::npos) {
            media.is_url = true;
            const auto host_start = scheme_end + 3;
            const auto host_end = media.target.find('/', host_start);
            media.host = media.target.substr(
                host_start, host_end == std::string::npos
                                ? std::string::npos
                                : host_end - host_start);
            const std::string scheme = media.target.substr(0, scheme_end);
            // Cloud-hosted profile pictures are reachable by anyone who
            // holds the URL; the URL is recorded, never fetched.
            media.publicly_accessible =
                (scheme == "http" || scheme == "https") && !media.host.empty();
        }
        if (!media.target.empty() && (!media.is_url || media.host.empty()))
            log.finding("mfp/images", "row " + std::to_string(row.rowid) +
                                          " has a malformed image URL");

        std::optional<Timestamp> created;
        if (auto v = row.get("created_at").as_text())
            created = Timestamp::from_naive(*v, tz);

        records.push_back(EvidenceRecord::make(kApp, "images", row.rowid,
                                               media, created));
    }
    return records;
}

std::vector<DiaryNote> parse_mfp_diary_notes(const Rows& rows,
                                             WarningLog& log) {
    std::vector<DiaryNote> notes;
    for (const RawRow& row : rows) {
        DiaryNote note;
        note.rowid = row.rowid;
        note.id = row.get("id").as_int().value_or(row.rowid);
        note.master_id = row.get("master_id").as_int().value_or(0);
        note.user_id = row.get("user_id").as_int().value_or(0);
        note.uid = row.get("uid").as_int().value_or(0);
        if (auto v = row.get("entry_date").as_text()) note.entry_date = *v;
        if (auto v = row.get("body").as_text()) note.body = *v;
        note.note_type = row.get("note_type").as_int().value_or(-1);
        switch (note.note_type) {
        case 0: note.label = DiaryNote::Label::Food; break;
        case 1: note.label = DiaryNote::Label::Exercise; break;
        default:
            note.label = DiaryNote::Label::Unknown;
            log.finding("mfp/diary_notes",
                        "note id " + std::to_string(note.id) +
                            " has undocumented note_type " +
                            std::to_string(note.note_type) +
                            "; body preserved raw");
            break;
        }
        notes.push_back(std::move(note));
    }
    return notes;
}

std::vector<EvidenceRecord> note_records(const std::vector<DiaryNote>& notes,
                                         const ZoneSpec& tz) {
    std::vector<EvidenceRecord> records;
    for (const DiaryNote& n : notes) {
        NoteData data;
        data.body = n.body;
        data.user_ref = n.user_id;
        switch (n.label) {
        case DiaryNote::Label::Food: data.label = "food"; break;
        case DiaryNote::Label::Exercise: data.label = "exercise"; break;
        case DiaryNote::Label::Unknown:
            data.label = "unknown(" + std::to_string(n.note_type) + ")";
            break;
        }
        std::optional<Timestamp> at = Timestamp::from_naive(n.entry_date, tz);
        records.push_back(
            EvidenceRecord::make(kApp, "diary_notes", n.rowid, data, at));
    }
    return records;
}

std::vector<EvidenceRecord>
parse_mfp_activity(const std::map<std::string, Rows>& tables,
                   const ZoneSpec& tz, WarningLog& log) {
    static const std::map<std::string, std::string> kEventKinds = {
        {"exercise_entries", "exercise-entry"},
        {"exercises", "exercise-def"},
        {"food_entries", "food-entry"},
        {"foods", "food-def"},
        {"measurement_types", "measurement-type"},
        {"search_history", "search"},
        {"last_sync_pointers", "sync"},
    };

    std::vector<EvidenceRecord> records;

    // measurement_types gives display names for measurements rows.
    std::map<std::int64_t, std::string> type_names;
    if (auto it = tables.find("measurement_types"); it != tables.end()) {
        for (const RawRow& row : it->second) {
            const auto id = row.get("id").as_int();
            const auto name = row.get("name").as_text();
            if (id && name) type_names[*id] = *name;
        }
    }

    for (const auto& [table, rows] : tables) {
        if (table == "measurements") {
            for (const RawRow& row : rows) {
                MeasurementData m;
                m.user_ref = row.get("user_id").as_int().value_or(0);
                m.name = "measurement";
                if (auto type_id = row.get("type_id").as_int()) {
                    auto found = type_names.find(*type_id);
                    if (found != type_names.end()) m.name = found->second;
                }
                if (auto v = row.get("value").as_real()) m.value = *v;
                records.push_back(EvidenceRecord::make(
                    kApp, table, row.rowid, m, best_timestamp(row, tz)));
            }
            continue;
        }
        auto kind = kEventKinds.find(table);
        if (kind == kEventKinds.end()) {
            log.finding("mfp/activity", "unrecognized activity table skipped: " + table);
            continue;
        }
        for (const RawRow& row : rows) {
            EventData event;
            event.kind = kind->second;
            event.details = row_details(row);
            if (table == "search_history") event.details["tag"] = "food search";
            records.push_back(EvidenceRecord::make(kApp, table, row.rowid,
                                                   event,
                                                   best_timestamp(row, tz)));
        }
    }
    return records;
}

Extraction parse_store(const StoreHandle& store, const ZoneSpec& tz,
                       WarningLog& log) {
    Extraction out;

    const auto rows_of = [&](const char* table) -> Rows {
        if (!store.has_table(table)) {
            log.finding("mfp", std::string("table missing, skipped: ") + table);
            return {};
        }
        return store.read_rows(table, &log);
    };

    const Rows property_rows = rows_of("user_properties");
    out.profiles = pivot_user_properties(property_rows, tz, log);
    auto identity = profile_records(out.profiles, property_rows, tz);
    out.records.insert(out.records.end(), identity.begin(), identity.end());

    out.credentials = parse_mfp_users(rows_of("users"), log);
    auto creds = credential_records(out.credentials);
    out.records.insert(out.records.end(), creds.begin(), creds.end());

    auto images = parse_mfp_images(rows_of("images"), tz, log);
    out.records.insert(out.records.end(), images.begin(), images.end());

    out.notes = parse_mfp_diary_notes(rows_of("diary_notes"), log);
    auto notes = note_records(out.notes, tz);
    out.records.insert(out.records.end(), notes.begin(), notes.end());

    std::map<std::string, Rows> activity;
    for (const char* table :
         {"exercise_entries", "exercises", "food_entries", "foods",
          "measurement_types", "measurements", "search_history",
          "last_sync_pointers"}) {
        if (store.has_table(table))
            activity[table] = store.read_rows(table, &log);
        else
            log.finding("mfp", std::string("table missing, skipped: ") + table);
    }
    auto events = parse_mfp_activity(activity, tz, log);
    out.records.insert(out.records.end(), events.begin(), events.end());

    return out;
}

} // namespace mhf::mfp
