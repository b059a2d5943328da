#include "mhf/period.hpp"

#include <algorithm>

#include "json.hpp"

namespace mhf::period {

namespace {

constexpr const char* kApp = "PeriodCalendar";

std::optional<EpochMillis> decode_epoch_field(const Value& v,
                                              const std::string& what,
                                              WarningLog& log) {
    if (v.is_null()) return std::nullopt;
    try {
        return decode_epoch_ms(v);
    } catch (const DecodeError& e) {
        log.degraded("period", "undecodable " + what + ": " + e.what());
        return std::nullopt;
    }
}

// The app records cycle data per calendar day; stored instants are day
// markers, so timestamps carry date precision for grading purposes while
// the exact decoded instant is preserved.
std::optional<Timestamp> day_timestamp(std::optional<EpochMillis> at) {
    if (!at) return std::nullopt;
    return Timestamp::from_epoch(*at, TimePrecision::DateOnly);
}

// Settings blobs look like {"1":{"key":"weight_unit","value":1},...}; any
// object or array of {key,value} pairs is accepted.
bool parse_settings_blob(const std::string& raw,
                         std::map<std::string, std::string>& out) {
    const auto parsed = nlohmann::json::parse(raw, nullptr, false);
    if (parsed.is_discarded()) return false;
    const auto add_pair = [&out](const nlohmann::json& node) {
        if (!node.is_object() || !node.contains("key")) return;
        const auto& key = node["key"];
        if (!key.is_string()) return;
        std::string value;
        if (node.contains("value")) {
            const auto& v = node["value"];
            value = v.is_string() ? v.get<std::string>() : nlohmann::to_string(v);
        }
        out[key.get<std::string>()] = value;
    };
    if (parsed.is_object()) {
        for (const auto& [k, v] : parsed.items()) add_pair(v);
    } else if (parsed.is_array()) {
        for (const auto& v : parsed) add_pair(v);
    } else {
        return false;
    }
    return true;
}

} // namespace

std::vector<PcUser> parse_pc_users(const Rows& rows, WarningLog& log) {
    std::vector<PcUser> out;
    for (const RawRow& row : rows) {
        PcUser user;
        user.row_id = row.get("_id").as_int().value_or(row.rowid);
        user.uid = row.get("uid").as_int().value_or(0);
        if (auto v = row.get("username").as_text()) user.username = *v;
        if (auto v = row.get("password").as_text()) user.password = *v;
        if (auto v = row.get("email").as_text()) user.email = *v;
        if (auto v = row.get("question").as_text()) user.question = *v;
        if (auto v = row.get("answer").as_text()) user.answer = *v;
        if (auto v = row.get("setting").as_text()) user.settings_raw = *v;

        if (!user.settings_raw.empty()) {
            user.settings_parsed =
                parse_settings_blob(user.settings_raw, user.settings);
            if (!user.settings_parsed)
                log.finding("period/user",
                            "settings blob of uid " + std::to_string(user.uid) +
                                " is not well-formed; retained raw");
        }
        for (const char* unused : {"temp1", "temp2", "temp3"}) {
            const Value& v = row.get(unused);
            if (!v.is_null() && !v.to_display().empty())
                log.finding("period/user",
                            std::string("unused field ") + unused +
                                " is non-empty for uid " +
                                std::to_string(user.uid));
        }
        out.push_back(std::move(user));
    }
    return out;
}

std::vector<EvidenceRecord> user_records(const std::vector<PcUser>& users) {
    std::vector<EvidenceRecord> records;
    for (const PcUser& u : users) {
        IdentityData identity;
        identity.user_ref = u.uid;
        identity.attributes["username"] = {u.username};
        identity.attributes["email"] = {u.email};
        if (!u.question.empty())
            identity.attributes["secret_question"] = {u.question};
        for (const auto& [key, value] : u.settings)
            identity.attributes["setting:" + key] = {value};
        records.push_back(
            EvidenceRecord::make(kApp, "user", u.row_id, identity));

        // Exactly one password credential and one secret-QA credential per
        // user row.
        const CredentialClass pw = classify_credential(u.password, "password");
        CredentialData password;
        password.kind = pw.kind;
        password.value = u.password;
        password.field = "password";
        password.user_ref = u.uid;
        records.push_back(
            EvidenceRecord::make(kApp, "user", u.row_id, password));

        CredentialData answer;
        answer.kind = classify_credential(u.answer, "answer").kind;
        answer.value = u.answer;
        answer.field = "answer";
        answer.user_ref = u.uid;
        records.push_back(EvidenceRecord::make(kApp, "user", u.row_id, answer));
    }
    return records;
}

std::vector<PeriodRecord> parse_periods(const Rows& rows, WarningLog& log) {
    std::vector<PeriodRecord> out;
    for (const RawRow& row : rows) {
        PeriodRecord rec;
        rec.row_id = row.get("_id").as_int().value_or(row.rowid);
        rec.uid = row.get("uid").as_int().value_or(0);
        rec.menses_start = decode_epoch_field(
            row.get("menses_start"),
            "menses_start of row " + std::to_string(rec.row_id), log);
        rec.menses_length = row.get("menses_length").as_int().value_or(0);
        rec.period_length = row.get("period_length").as_int().value_or(0);
        rec.pregnancy = row.get("pregnancy").as_int().value_or(0);
        if (rec.menses_length < 0) {
            // Negative lengths look like app-internal predictions; they are
            // flagged, never silently corrected or dropped.
            rec.anomalous_length = true;
            log.finding("period/period",
                        "row " + std::to_string(rec.row_id) +
                            " has negative menses_length " +
                            std::to_string(rec.menses_length) +
                            "; flagged as anomalous/predicted");
        }
        if (rec.pregnancy != 0 && rec.pregnancy != 1)
            log.finding("period/period",
                        "row " + std::to_string(rec.row_id) +
                            " has unexpected pregnancy flag " +
                            std::to_string(rec.pregnancy));
        out.push_back(std::move(rec));
    }
    return out;
}

std::vector<EvidenceRecord>
period_records(const std::vector<PeriodRecord>& records) {
    std::vector<EvidenceRecord> out;
    for (const PeriodRecord& r : records) {
        EventData event;
        event.kind = "period";
        event.details["uid"] = std::to_string(r.uid);
        event.details["menses_length"] = std::to_string(r.menses_length);
        event.details["period_length"] = std::to_string(r.period_length);
        event.details["pregnancy"] = std::to_string(r.pregnancy);
        if (r.anomalous_length) event.details["anomalous"] = "true";
        out.push_back(EvidenceRecord::make(kApp, "period", r.row_id, event,
                                           day_timestamp(r.menses_start)));
    }
    return out;
}

std::vector<HealthNote> parse_pc_notes(const Rows& rows, WarningLog& log) {
    std::vector<HealthNote> out;
    for (const RawRow& row : rows) {
        HealthNote note;
        note.row_id = row.get("_id").as_int().value_or(row.rowid);
        note.uid = row.get("uid").as_int().value_or(0);
        note.date = decode_epoch_field(
            row.get("date"), "note date of row " + std::to_string(note.row_id),
            log);
        if (auto v = row.get("note").as_text()) note.note = *v;
        if (auto v = row.get("pill").as_text()) note.pill = *v;
        if (auto v = row.get("temperature").as_real(); v && *v != 0.0)
            note.temperature_c = *v;
        if (auto v = row.get("weight").as_real(); v && *v != 0.0)
            note.weight_lb = *v;
        if (auto v = row.get("symptoms").as_text()) note.symptoms_raw = *v;
        if (auto v = row.get("moods").as_text()) note.moods_raw = *v;
        out.push_back(std::move(note));
    }
    return out;
}

std::vector<EvidenceRecord>
health_note_records(const std::vector<HealthNote>& notes) {
    std::vector<EvidenceRecord> out;
    for (const HealthNote& n : notes) {
        const auto at = day_timestamp(n.date);
        if (!n.note.empty()) {
            NoteData note;
            note.body = n.note;
            note.label = "health-note";
            note.user_ref = n.uid;
            out.push_back(EvidenceRecord::make(kApp, "note", n.row_id, note, at));
        }
        if (n.weight_lb) {
            // Stored unit is pounds; no conversion in the parser.
            MeasurementData m{"weight", *n.weight_lb, "lb", n.uid};
            out.push_back(EvidenceRecord::make(kApp, "note", n.row_id, m, at));
        }
        if (n.temperature_c) {
            MeasurementData m{"temperature", *n.temperature_c, "degC", n.uid};
            out.push_back(EvidenceRecord::make(kApp, "note", n.row_id, m, at));
        }
        if (!n.pill.empty()) {
            EventData event;
            event.kind = "pill-taken";
            event.details["pill"] = n.pill;
            event.details["uid"] = std::to_string(n.uid);
            out.push_back(EvidenceRecord::make(kApp, "note", n.row_id, event, at));
        }
    }
    return out;
}

std::vector<EvidenceRecord> parse_pills(const Rows& pill_rows,
                                        const Rows& pill_record_rows,
                                        WarningLog& log) {
    std::vector<EvidenceRecord> out;

    std::map<std::int64_t, std::string> details_by_pill;
    std::set<std::int64_t> known_pills;
    for (const RawRow& row : pill_rows)
        known_pills.insert(row.get("_id").as_int().value_or(row.rowid));
    for (const RawRow& row : pill_record_rows) {
        const std::int64_t pill_id = row.get("pill_id").as_int().value_or(-1);
        std::string detail;
        for (const char* col : {"description", "note", "detail"}) {
            if (auto v = row.get(col).as_text(); v && !v->empty()) {
                detail = *v;
                break;
            }
        }
        if (!known_pills.count(pill_id)) {
            log.finding("period/pill_record",
                        "orphan pill_record row " + std::to_string(row.rowid) +
                            " references unknown pill " +
                            std::to_string(pill_id));
            continue;
        }
        if (!detail.empty()) {
            auto& slot = details_by_pill[pill_id];
            if (!slot.empty()) slot += "; ";
            slot += detail;
        }
    }

    for (const RawRow& row : pill_rows) {
        const std::int64_t pill_id = row.get("_id").as_int().value_or(row.rowid);
        std::string name = "(unnamed pill)";
        for (const char* col : {"name", "pill", "pill_name"}) {
            if (auto v = row.get(col).as_text(); v && !v->empty()) {
                name = *v;
                break;
            }
        }
        const auto emit = [&](const char* kind, std::optional<EpochMillis> at) {
            if (!at) return;
            EventData event;
            event.kind = kind;
            event.details["pill"] = name;
            if (auto uid = row.get("uid").as_int())
                event.details["uid"] = std::to_string(*uid);
            if (auto detail = details_by_pill.find(pill_id);
                detail != details_by_pill.end())
                event.details["record"] = detail->second;
            out.push_back(EvidenceRecord::make(kApp, "pill", row.rowid, event,
                                               day_timestamp(at)));
        };
        std::optional<EpochMillis> first, next;
        for (const char* col : {"first_take_date", "first_taken", "start_date"}) {
            if (!row.get(col).is_null()) {
                first = decode_epoch_field(row.get(col), "pill first-take", log);
                break;
            }
        }
        for (const char* col : {"next_medication", "next_date", "next_time"}) {
            if (!row.get(col).is_null()) {
                next = decode_epoch_field(row.get(col), "pill next-medication", log);
                break;
            }
        }
        emit("pill-first-taken", first);
        emit("pill-next-medication", next);
    }
    return out;
}

namespace {

std::string row_key(const RawRow& row) {
    // Content-based identity: sorted column=value pairs, rowid excluded.
    std::vector<std::string> parts;
    if (row.columns) {
        for (std::size_t i = 0; i < row.columns->size(); ++i) {
            std::string part = (*row.columns)[i];
            part += '=';
            if (i < row.values.size() && !row.values[i].is_null()) {
                part += std::to_string(
                    static_cast<int>(row.values[i].type()));
                part += ':';
                part += row.values[i].to_display();
            }
            parts.push_back(std::move(part));
        }
    }
    std::sort(parts.begin(), parts.end());
    std::string key;
    for (const std::string& p : parts) {
        key += p;
        key += '\x1f';
    }
    return key;
}

} // namespace

DiffReport reconcile_backups(const StoreHandle& primary,
                             const StoreHandle& backup) {
    const AppId lhs = detect_app(primary);
    const AppId rhs = detect_app(backup);
    const bool period_pair =
        lhs == rhs && (lhs == AppId::PeriodCalendar ||
                       lhs == AppId::PeriodCalendarPill);
    if (!period_pair)
        throw ReconcileError(
            "cannot reconcile: databases fingerprint as " +
            std::string(to_string(lhs)) + " and " + std::string(to_string(rhs)));

    std::set<std::string> tables(primary.table_names().begin(),
                                 primary.table_names().end());
    tables.insert(backup.table_names().begin(), backup.table_names().end());

    DiffReport report;
    for (const std::string& table : tables) {
        const Rows primary_rows =
            primary.has_table(table) ? primary.read_rows(table) : Rows{};
        const Rows backup_rows =
            backup.has_table(table) ? backup.read_rows(table) : Rows{};

        std::map<std::string, std::vector<const RawRow*>> p_index, b_index;
        for (const RawRow& r : primary_rows) p_index[row_key(r)].push_back(&r);
        for (const RawRow& r : backup_rows) b_index[row_key(r)].push_back(&r);

        TableDiff diff;
        diff.table = table;
        for (const auto& [key, rows] : p_index) {
            const std::size_t matched =
                b_index.count(key) ? b_index[key].size() : 0;
            for (std::size_t i = matched; i < rows.size(); ++i)
                diff.only_in_primary.push_back(*rows[i]);
        }
        for (const auto& [key, rows] : b_index) {
            const std::size_t matched =
                p_index.count(key) ? p_index[key].size() : 0;
            for (std::size_t i = matched; i < rows.size(); ++i)
                diff.only_in_backup.push_back(*rows[i]);
        }
        const auto by_rowid = [](const RawRow& a, const RawRow& b) {
            return a.rowid < b.rowid;
        };
        std::sort(diff.only_in_primary.begin(), diff.only_in_primary.end(),
                  by_rowid);
        std::sort(diff.only_in_backup.begin(), diff.only_in_backup.end(),
                  by_rowid);
        if (!diff.only_in_primary.empty() || !diff.only_in_backup.empty())
            report.tables.push_back(std::move(diff));
    }
    return report;
}

Extraction parse_store(const StoreHandle& store, const ZoneSpec& /*tz*/,
                       WarningLog& log) {
    Extraction out;

    const auto rows_of = [&](const char* table) -> Rows {
        if (!store.has_table(table)) {
            log.finding("period", std::string("table missing, skipped: ") + table);
            return {};
        }
        return store.read_rows(table, &log);
    };

    if (store.has_table("user")) {
        out.users = parse_pc_users(rows_of("user"), log);
        auto users = user_records(out.users);
        out.records.insert(out.records.end(), users.begin(), users.end());

        out.periods = parse_periods(rows_of("period"), log);
        auto periods = period_records(out.periods);
        out.records.insert(out.records.end(), periods.begin(), periods.end());

        out.notes = parse_pc_notes(rows_of("note"), log);
        auto notes = health_note_records(out.notes);
        out.records.insert(out.records.end(), notes.begin(), notes.end());
    }

    if (store.has_table("pill")) {
        const Rows pill_rows = rows_of("pill");
        const Rows record_rows = store.has_table("pill_record")
                                     ? store.read_rows("pill_record", &log)
                                     : Rows{};
        if (!store.has_table("pill_record"))
            log.finding("period", "pill_record missing; pills emitted without details");
        auto pills = parse_pills(pill_rows, record_rows, log);
        out.records.insert(out.records.end(), pills.begin(), pills.end());
    }

    return out;
}

} // namespace mhf::period
