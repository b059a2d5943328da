#include "mhf/report.hpp"

#include <algorithm>
#include <fstream>
#include <future>
#include <sstream>

#include "json.hpp"

#include "mhf/mfp.hpp"
#include "mhf/period.hpp"
#include "mhf/sha256.hpp"

namespace mhf::report {

using nlohmann::ordered_json;

// --- redaction ---------------------------------------------------------------

std::string mask_email(std::string_view email) {
    const auto at = email.find('@');
    if (at == std::string_view::npos || at == 0)
        return "[REDACTED:email]";
    std::string out;
    out += email[0];
    out += "\xE2\x80\xA6";  // single-char ellipsis, keeps the mask unambiguous
    out += email.substr(at);
    return out;
}

namespace {

bool name_suggests_credential(const std::string& name) {
    return name.find("password") != std::string::npos ||
           name.find("pincode") != std::string::npos ||
           name.find("pin_code") != std::string::npos;
}

bool name_suggests_email(const std::string& name) {
    return name.find("email") != std::string::npos;
}

const std::set<std::string>& personal_detail_keys() {
    static const std::set<std::string> keys = {
        "name",  "username", "notes", "note",   "body",       "pill",
        "record", "question", "answer", "search_term", "term", "query"};
    return keys;
}

void redact_record(EvidenceRecord& record, RedactionMode mode) {
    const bool mask_all = mode == RedactionMode::MaskAll;
    switch (record.kind()) {
    case RecordKind::Credential: {
        auto& cred = std::get<CredentialData>(record.payload);
        if (!cred.value.empty())
            cred.value = "[REDACTED:" + cred.kind.slug() + "]";
        break;
    }
    case RecordKind::Identity: {
        auto& identity = std::get<IdentityData>(record.payload);
        for (auto& [name, attr] : identity.attributes) {
            if (attr.value.empty()) continue;
            if (name_suggests_email(name))
                attr.value = mask_email(attr.value);
            else if (name_suggests_credential(name))
                attr.value = "[REDACTED:attribute]";
            else if (mask_all)
                attr.value = "[REDACTED]";
        }
        break;
    }
    case RecordKind::Event: {
        auto& event = std::get<EventData>(record.payload);
        for (auto& [key, value] : event.details) {
            if (value.empty()) continue;
            if (name_suggests_email(key))
                value = mask_email(value);
            else if (name_suggests_credential(key))
                value = "[REDACTED:attribute]";
            else if (mask_all && personal_detail_keys().count(key))
                value = "[REDACTED]";
        }
        break;
    }
    case RecordKind::Note: {
        if (mask_all) std::get<NoteData>(record.payload).body = "[REDACTED]";
        break;
    }
    case RecordKind::MediaRef: {
        if (mask_all) {
            auto& media = std::get<MediaRefData>(record.payload);
            if (!media.target.empty())
                media.target = media.is_url && !media.host.empty()
                                   ? media.host + "/[REDACTED]"
                                   : "[REDACTED:path]";
        }
        break;
    }
    case RecordKind::GeoFix:
    case RecordKind::Measurement:
        break;
    }
}

} // namespace

std::vector<EvidenceRecord> redact(std::vector<EvidenceRecord> records,
                                   const RedactionPolicy& policy) {
    if (policy.mode == RedactionMode::Off) return records;
    for (EvidenceRecord& record : records) redact_record(record, policy.mode);
    return records;
}

// --- timeline ----------------------------------------------------------------

namespace {

std::string clip(std::string s, std::size_t limit) {
    if (s.size() <= limit) return s;
    s.resize(limit);
    s += "...";
    return s;
}

std::string summarize(const EvidenceRecord& record) {
    switch (record.kind()) {
    case RecordKind::Identity: {
        const auto& id = *record.as<IdentityData>();
        return "profile of user " + std::to_string(id.user_ref) + " (" +
               std::to_string(id.attributes.size()) + " attributes)";
    }
    case RecordKind::Credential: {
        const auto& cred = *record.as<CredentialData>();
        return "credential " + cred.field + " [" + cred.kind.slug() + "]";
    }
    case RecordKind::GeoFix: {
        const auto& fix = *record.as<GeoFixData>();
        std::string out = "fix lat " + format_double(fix.latitude) + " lon " +
                          format_double(fix.longitude);
        if (fix.trip_ref) out += " (trip " + std::to_string(*fix.trip_ref) + ")";
        return out;
    }
    case RecordKind::Note: {
        const auto& note = *record.as<NoteData>();
        return "note (" + note.label + "): " + clip(note.body, 60);
    }
    case RecordKind::Measurement: {
        const auto& m = *record.as<MeasurementData>();
        return m.name + " " + format_double(m.value) + " " + m.unit;
    }
    case RecordKind::MediaRef: {
        const auto& media = *record.as<MediaRefData>();
        return "media " + clip(media.target, 70);
    }
    case RecordKind::Event: {
        const auto& event = *record.as<EventData>();
        std::string out = event.kind;
        std::string detail;
        for (const auto& [key, value] : event.details) {
            if (!detail.empty()) detail += ", ";
            detail += key + "=" + value;
        }
        if (!detail.empty()) out += " (" + clip(detail, 90) + ")";
        return out;
    }
    }
    return "record";
}

} // namespace

Timeline build_timeline(std::span<const EvidenceRecord> records) {
    Timeline timeline;
    for (std::size_t i = 0; i < records.size(); ++i) {
        const EvidenceRecord& record = records[i];
        if (!record.observed_at) {
            timeline.undated.push_back(i);
            continue;
        }
        TimelineEvent event;
        event.instant = *record.observed_at;
        event.source_app = record.source_app;
        event.source_table = record.source_table;
        event.source_row_id = record.source_row_id;
        event.categories = taxonomy::classify_artefact(record);
        event.summary = summarize(record);
        event.record_index = i;
        timeline.events.push_back(std::move(event));
    }
    std::sort(timeline.events.begin(), timeline.events.end(),
              [](const TimelineEvent& a, const TimelineEvent& b) {
                  const std::int64_t at = a.instant.instant().count();
                  const std::int64_t bt = b.instant.instant().count();
                  if (at != bt) return at < bt;
                  if (a.source_app != b.source_app)
                      return a.source_app < b.source_app;
                  if (a.source_table != b.source_table)
                      return a.source_table < b.source_table;
                  if (a.source_row_id != b.source_row_id)
                      return a.source_row_id < b.source_row_id;
                  return a.record_index < b.record_index;
              });
    return timeline;
}

// --- analysis ----------------------------------------------------------------

namespace {

struct StoreTask {
    std::filesystem::path path;
};

struct StoreOutcome {
    std::optional<StoreReport> report;
    std::vector<EvidenceRecord> records;
    std::vector<runkeeper::TripRoute> routes;
    WarningLog warnings;
};

AppId forced_app(AppOverride o) {
    switch (o) {
    case AppOverride::Mfp: return AppId::MyFitnessPal;
    case AppOverride::RunKeeper: return AppId::RunKeeper;
    case AppOverride::PeriodCal: return AppId::PeriodCalendar;
    case AppOverride::Auto: return AppId::Unknown;
    }
    return AppId::Unknown;
}

StoreOutcome process_store(const std::filesystem::path& path,
                           const AnalysisOptions& options) {
    StoreOutcome out;

    std::string digest;
    try {
        digest = sha256_file(path);
    } catch (const std::exception& e) {
        out.warnings.degraded("analyze", e.what());
        return out;
    }

    std::optional<StoreHandle> handle;
    try {
        handle.emplace(open_store(path));
    } catch (const CorruptStore& e) {
        out.warnings.degraded("analyze", std::string("corrupt store, salvaging: ") +
                                             e.what());
        try {
            handle.emplace(open_store_salvage(path));
        } catch (const std::exception& inner) {
            out.warnings.degraded("analyze",
                                  std::string("salvage failed: ") + inner.what());
            return out;
        }
    } catch (const std::exception& e) {
        out.warnings.degraded("analyze", e.what());
        return out;
    }

    StoreReport report;
    report.path = path;
    report.sha256 = digest;
    report.tables = handle->table_names();
    report.page_size = handle->page_size();
    report.degraded = handle->degraded();
    report.unreadable_tables = handle->unreadable_tables();

    AppId detected = detect_app(*handle);
    AppId effective = detected;
    if (options.app != AppOverride::Auto) {
        effective = forced_app(options.app);
        if (effective == AppId::PeriodCalendar &&
            detected == AppId::PeriodCalendarPill)
            effective = AppId::PeriodCalendarPill;
        if (detected != effective)
            out.warnings.finding("analyze",
                                 path.filename().string() + " fingerprints as " +
                                     std::string(to_string(detected)) +
                                     " but is parsed as " +
                                     std::string(to_string(effective)) +
                                     " by request");
    }
    report.app = effective;

    switch (effective) {
    case AppId::MyFitnessPal: {
        auto extraction = mfp::parse_store(*handle, options.tz, out.warnings);
        out.records = std::move(extraction.records);
        break;
    }
    case AppId::RunKeeper: {
        auto extraction =
            runkeeper::parse_store(*handle, options.tz, out.warnings);
        out.records = std::move(extraction.records);
        out.routes = std::move(extraction.reconstruction.routes);
        break;
    }
    case AppId::PeriodCalendar:
    case AppId::PeriodCalendarPill: {
        auto extraction = period::parse_store(*handle, options.tz, out.warnings);
        out.records = std::move(extraction.records);
        break;
    }
    case AppId::Unknown:
        out.warnings.finding("analyze",
                             path.filename().string() +
                                 " does not fingerprint as a supported app; "
                                 "only store metadata is reported");
        break;
    }

    // Store-level metadata is evidence of its own.
    EventData db_event;
    db_event.kind = "database";
    db_event.details["file"] = path.filename().string();
    db_event.details["tables"] = std::to_string(report.tables.size());
    db_event.details["page_size"] = std::to_string(report.page_size);
    db_event.details["degraded"] = report.degraded ? "true" : "false";
    out.records.push_back(EvidenceRecord::make(
        std::string(to_string(effective)), "sqlite_master", 0, db_event));

    out.report = std::move(report);
    return out;
}

} // namespace

int Analysis::exit_code() const {
    if (no_evidence) return 2;
    for (const Warning& w : warnings)
        if (w.cls == WarningClass::Degraded) return 1;
    return 0;
}

Analysis analyze(const std::vector<std::filesystem::path>& inputs,
                 const AnalysisOptions& options) {
    Analysis analysis;
    analysis.tz = options.tz;
    analysis.registry = options.registry_file
                            ? taxonomy::load_registry_file(*options.registry_file)
                            : taxonomy::embedded_registry();

    WarningLog log;
    std::vector<StoreTask> tasks;

    for (const auto& input : inputs) {
        std::error_code ec;
        if (std::filesystem::is_directory(input, ec)) {
            ScanResult scan = scan_tree(input);
            log.merge(scan.warnings);
            for (const auto& [path, app] : scan.databases)
                tasks.push_back({path});
            for (const AvatarHit& hit : scan.avatars)
                analysis.avatars.push_back(hit);
        } else if (std::filesystem::exists(input, ec)) {
            if (auto idx = avatar_index(input.filename().string())) {
                analysis.avatars.push_back({input, *idx});
            } else {
                tasks.push_back({input});
            }
        } else {
            log.degraded("analyze", "no such input: " + input.string());
        }
    }

    std::vector<StoreOutcome> outcomes(tasks.size());
    if (options.concurrent && tasks.size() > 1) {
        std::vector<std::future<StoreOutcome>> futures;
        futures.reserve(tasks.size());
        for (const StoreTask& task : tasks)
            futures.push_back(std::async(std::launch::async, process_store,
                                         task.path, std::cref(options)));
        for (std::size_t i = 0; i < futures.size(); ++i)
            outcomes[i] = futures[i].get();
    } else {
        for (std::size_t i = 0; i < tasks.size(); ++i)
            outcomes[i] = process_store(tasks[i].path, options);
    }

    // Deterministic merge in input order.
    for (StoreOutcome& outcome : outcomes) {
        log.merge(outcome.warnings);
        if (outcome.report) analysis.stores.push_back(std::move(*outcome.report));
        analysis.records.insert(analysis.records.end(),
                                std::make_move_iterator(outcome.records.begin()),
                                std::make_move_iterator(outcome.records.end()));
        analysis.routes.insert(analysis.routes.end(),
                               std::make_move_iterator(outcome.routes.begin()),
                               std::make_move_iterator(outcome.routes.end()));
    }

    std::sort(analysis.avatars.begin(), analysis.avatars.end(),
              [](const AvatarHit& a, const AvatarHit& b) {
                  return std::tuple(a.index, a.path.string()) <
                         std::tuple(b.index, b.path.string());
              });
    for (const AvatarHit& hit : analysis.avatars) {
        MediaRefData media;
        media.target = hit.path.string();
        media.is_url = false;
        analysis.records.push_back(EvidenceRecord::make(
            "MyFitnessPal", "(filesystem)", hit.index, media));
    }

    analysis.no_evidence = analysis.stores.empty() && analysis.avatars.empty();

    analysis.records = redact(std::move(analysis.records), options.redaction);
    analysis.timeline = build_timeline(analysis.records);

    // Grade each recognized app from its own records.
    std::map<std::string, std::vector<EvidenceRecord>> per_app;
    for (const EvidenceRecord& record : analysis.records) {
        std::optional<std::string> app_id;
        if (record.source_app == to_string(AppId::MyFitnessPal))
            app_id = "App1";
        else if (record.source_app == to_string(AppId::RunKeeper))
            app_id = "App2";
        else if (record.source_app == to_string(AppId::PeriodCalendar) ||
                 record.source_app == to_string(AppId::PeriodCalendarPill))
            app_id = "App3";
        if (app_id && taxonomy::find_app(analysis.registry, *app_id))
            per_app[*app_id].push_back(record);
    }
    for (const auto& [app_id, records] : per_app) {
        analysis.grades.push_back(
            taxonomy::grade_extraction(records, app_id, analysis.registry));
        for (const taxonomy::GradeDelta& delta : analysis.grades.back().deltas)
            log.finding("taxonomy",
                        app_id + " " +
                            std::string(to_string(delta.category)) +
                            " graded " +
                            std::string(to_string(delta.computed)) +
                            " but the registry expects " +
                            std::string(to_string(delta.expected)));
    }

    analysis.matrix_errata = taxonomy::matrix_errata(analysis.registry);
    analysis.source_errata.push_back(
        "registry source: the artefact-location table repeats the RunKeeper "
        "database directory for Period Calendar; the package path "
        "com.popularapp.periodcalendar/databases is authoritative");
    for (const taxonomy::MatrixErratum& e : analysis.matrix_errata)
        analysis.source_errata.push_back("published matrix: " + e.describe());

    analysis.warnings = log.items();
    return analysis;
}

// --- emission ----------------------------------------------------------------

namespace {

ordered_json timestamp_json(const Timestamp& ts) {
    ordered_json j;
    j["instant"] = ts.instant().to_iso8601();
    j["epoch_ms"] = ts.instant().count();
    switch (ts.precision()) {
    case TimePrecision::DateOnly: j["precision"] = "date"; break;
    case TimePrecision::Seconds: j["precision"] = "seconds"; break;
    case TimePrecision::Millis: j["precision"] = "millis"; break;
    }
    j["zone_assumed"] = ts.zone_assumed();
    if (ts.zone_assumed()) j["assumed_zone"] = ts.assumed_zone_label();
    if (!ts.raw_text().empty()) j["raw"] = ts.raw_text();
    return j;
}

ordered_json payload_json(const EvidenceRecord& record) {
    ordered_json j;
    switch (record.kind()) {
    case RecordKind::Identity: {
        const auto& id = *record.as<IdentityData>();
        j["user_ref"] = id.user_ref;
        ordered_json attrs;
        for (const auto& [name, attr] : id.attributes) {
            ordered_json a;
            a["value"] = attr.value;
            if (attr.updated_at) a["updated_at"] = attr.updated_at->render();
            if (attr.last_sync_at)
                a["last_sync_at"] = attr.last_sync_at->render();
            attrs[name] = std::move(a);
        }
        j["attributes"] = std::move(attrs);
        break;
    }
    case RecordKind::Credential: {
        const auto& cred = *record.as<CredentialData>();
        j["field"] = cred.field;
        j["kind"] = cred.kind.slug();
        j["value"] = cred.value;
        j["user_ref"] = cred.user_ref;
        if (cred.shape_warning) j["shape_warning"] = true;
        break;
    }
    case RecordKind::GeoFix: {
        const auto& fix = *record.as<GeoFixData>();
        j["latitude"] = fix.latitude;
        j["longitude"] = fix.longitude;
        if (fix.altitude_m) j["altitude_m"] = *fix.altitude_m;
        if (fix.trip_ref) j["trip_ref"] = *fix.trip_ref;
        j["valid"] = fix.valid;
        break;
    }
    case RecordKind::Note: {
        const auto& note = *record.as<NoteData>();
        j["label"] = note.label;
        j["body"] = note.body;
        j["user_ref"] = note.user_ref;
        break;
    }
    case RecordKind::Measurement: {
        const auto& m = *record.as<MeasurementData>();
        j["name"] = m.name;
        j["value"] = m.value;
        j["unit"] = m.unit;
        j["user_ref"] = m.user_ref;
        break;
    }
    case RecordKind::MediaRef: {
        const auto& media = *record.as<MediaRefData>();
        j["target"] = media.target;
        j["is_url"] = media.is_url;
        if (!media.host.empty()) j["host"] = media.host;
        j["publicly_accessible"] = media.publicly_accessible;
        break;
    }
    case RecordKind::Event: {
        const auto& event = *record.as<EventData>();
        j["event"] = event.kind;
        ordered_json details;
        for (const auto& [key, value] : event.details) details[key] = value;
        j["details"] = std::move(details);
        break;
    }
    }
    return j;
}

ordered_json categories_json(const std::set<ArtefactCategory>& categories) {
    ordered_json out = ordered_json::array();
    for (ArtefactCategory c : categories) out.push_back(std::string(to_string(c)));
    return out;
}

std::string csv_quote(std::string_view field) {
    const bool needs =
        field.find_first_of(",\"\r\n") != std::string_view::npos;
    if (!needs) return std::string(field);
    std::string out = "\"";
    for (char c : field) {
        out.push_back(c);
        if (c == '"') out.push_back('"');
    }
    out.push_back('"');
    return out;
}

std::string csv_line(const std::vector<std::string>& fields) {
    std::string out;
    for (std::size_t i = 0; i < fields.size(); ++i) {
        if (i) out.push_back(',');
        out += csv_quote(fields[i]);
    }
    out += "\r\n";
    return out;
}

std::string ts_or_empty(const std::optional<Timestamp>& ts) {
    return ts ? ts->render() : std::string();
}

} // namespace

std::string render_json(const Analysis& analysis, const EmitOptions& opts) {
    ordered_json root;
    root["schema_version"] = 1;
    root["generator"] = "mhf";
    root["assumed_zone"] = analysis.tz.label;

    ordered_json inputs = ordered_json::array();
    for (const StoreReport& store : analysis.stores) {
        ordered_json j;
        j["path"] = store.path.generic_string();
        j["sha256"] = store.sha256;
        j["app"] = std::string(to_string(store.app));
        j["page_size"] = store.page_size;
        j["tables"] = store.tables;
        j["degraded"] = store.degraded;
        if (!store.unreadable_tables.empty())
            j["unreadable_tables"] = store.unreadable_tables;
        inputs.push_back(std::move(j));
    }
    root["inputs"] = std::move(inputs);

    ordered_json avatars = ordered_json::array();
    for (const AvatarHit& hit : analysis.avatars) {
        ordered_json j;
        j["path"] = hit.path.generic_string();
        j["index"] = hit.index;
        avatars.push_back(std::move(j));
    }
    root["avatars"] = std::move(avatars);

    ordered_json records = ordered_json::array();
    for (std::size_t i = 0; i < analysis.records.size(); ++i) {
        const EvidenceRecord& record = analysis.records[i];
        ordered_json j;
        j["index"] = i;
        j["app"] = record.source_app;
        j["table"] = record.source_table;
        j["row"] = record.source_row_id;
        j["kind"] = std::string(to_string(record.kind()));
        if (record.observed_at)
            j["observed_at"] = timestamp_json(*record.observed_at);
        j["categories"] = categories_json(taxonomy::classify_artefact(record));
        j["payload"] = payload_json(record);
        records.push_back(std::move(j));
    }
    root["records"] = std::move(records);

    ordered_json routes = ordered_json::array();
    for (const runkeeper::TripRoute& route : analysis.routes) {
        ordered_json j;
        j["trip_id"] = route.trip.trip_id;
        j["ext_trip_id"] = route.trip.ext_trip_id;
        if (route.trip.start) j["start"] = route.trip.start->to_iso8601();
        if (route.trip.name) j["name"] = *route.trip.name;
        j["distance_m"] = route.trip.distance_m;
        j["elapsed_s"] = route.trip.elapsed_s;
        if (route.trip.calories) j["calories"] = *route.trip.calories;
        if (route.trip.notes) j["notes"] = *route.trip.notes;
        j["point_count"] = route.points.size();
        if (route.stored_distance_residual_m)
            j["stored_distance_residual_m"] = *route.stored_distance_residual_m;
        if (route.cumulative_check_residual_m)
            j["cumulative_check_residual_m"] =
                *route.cumulative_check_residual_m;
        if (!route.points.empty()) j["haversine_path_m"] = route.haversine_path_m;
        if (!route.settings.values.empty()) {
            ordered_json settings;
            for (const auto& [key, value] : route.settings.values)
                settings[key] = value;
            if (route.settings.birthday)
                settings["birthday_decoded"] =
                    route.settings.birthday->to_iso8601();
            j["settings"] = std::move(settings);
        }
        ordered_json points = ordered_json::array();
        for (const runkeeper::RoutePoint& p : route.points) {
            ordered_json pj;
            pj["point_id"] = p.point_id;
            pj["latitude"] = p.latitude;
            pj["longitude"] = p.longitude;
            if (p.altitude_m) pj["altitude_m"] = *p.altitude_m;
            pj["time_interval_s"] = p.time_interval_s;
            pj["dist_from_last_m"] = p.dist_from_last_m;
            pj["dist_at_point_m"] = p.dist_at_point_m;
            pj["point_type"] = p.point_type;
            pj["accuracy"] = p.accuracy;
            points.push_back(std::move(pj));
        }
        j["points"] = std::move(points);
        routes.push_back(std::move(j));
    }
    root["routes"] = std::move(routes);

    ordered_json timeline = ordered_json::array();
    for (const TimelineEvent& event : analysis.timeline.events) {
        ordered_json j;
        j["instant"] = event.instant.instant().to_iso8601();
        j["zone_assumed"] = event.instant.zone_assumed();
        j["app"] = event.source_app;
        j["table"] = event.source_table;
        j["row"] = event.source_row_id;
        j["categories"] = categories_json(event.categories);
        j["summary"] = event.summary;
        j["record"] = event.record_index;
        timeline.push_back(std::move(j));
    }
    root["timeline"] = std::move(timeline);
    root["undated"] = analysis.timeline.undated;

    ordered_json grades = ordered_json::array();
    for (const taxonomy::GradeReport& report : analysis.grades) {
        ordered_json j;
        j["app_id"] = report.app_id;
        if (const auto* entry =
                taxonomy::find_app(analysis.registry, report.app_id))
            j["app_name"] = entry->name;
        ordered_json g;
        for (int i = 0; i < kArtefactCategoryCount; ++i)
            g[std::string(to_string(static_cast<ArtefactCategory>(i)))] =
                std::string(to_string(report.grades[i]));
        j["grades"] = std::move(g);
        ordered_json deltas = ordered_json::array();
        for (const taxonomy::GradeDelta& d : report.deltas) {
            ordered_json dj;
            dj["category"] = std::string(to_string(d.category));
            dj["computed"] = std::string(to_string(d.computed));
            dj["expected"] = std::string(to_string(d.expected));
            deltas.push_back(std::move(dj));
        }
        j["deltas"] = std::move(deltas);
        grades.push_back(std::move(j));
    }
    root["grades"] = std::move(grades);

    root["errata"] = analysis.source_errata;

    ordered_json warnings = ordered_json::array();
    for (const Warning& w : analysis.warnings) {
        ordered_json j;
        j["class"] = w.cls == WarningClass::Degraded ? "degraded" : "finding";
        j["source"] = w.source;
        j["message"] = w.message;
        warnings.push_back(std::move(j));
    }
    root["warnings"] = std::move(warnings);

    if (opts.include_matrix) {
        root["matrix_csv"] =
            taxonomy::matrix_to_csv(taxonomy::render_matrix(analysis.registry));
    }
    return root.dump(2) + "\n";
}

std::string render_text(const Analysis& analysis, const EmitOptions& opts) {
    std::ostringstream out;
    out << "mhf analysis report\n";
    out << "===================\n\n";
    out << "assumed zone for naive datetimes: " << analysis.tz.label << "\n\n";

    out << "inputs (" << analysis.stores.size() << " databases, "
        << analysis.avatars.size() << " avatar files):\n";
    for (const StoreReport& store : analysis.stores) {
        out << "  " << store.path.generic_string() << "\n    app "
            << to_string(store.app) << ", " << store.tables.size()
            << " tables, page size " << store.page_size << ", sha256 "
            << store.sha256 << (store.degraded ? " [salvaged]" : "") << "\n";
    }
    for (const AvatarHit& hit : analysis.avatars)
        out << "  " << hit.path.generic_string() << " (avatar #" << hit.index
            << ")\n";

    std::array<std::size_t, 7> counts{};
    for (const EvidenceRecord& record : analysis.records)
        ++counts[static_cast<std::size_t>(record.kind())];
    out << "\nrecords: " << analysis.records.size() << " total";
    static const char* kind_names[] = {"identities", "credentials", "fixes",
                                       "notes",      "measurements", "media",
                                       "events"};
    out << " (";
    for (int i = 0; i < 7; ++i)
        out << (i ? ", " : "") << counts[i] << " " << kind_names[i];
    out << ")\n";

    out << "\ncredentials:\n";
    bool any_cred = false;
    for (const EvidenceRecord& record : analysis.records) {
        const auto* cred = record.as<CredentialData>();
        if (!cred) continue;
        any_cred = true;
        out << "  [" << record.source_app << "/" << record.source_table << "#"
            << record.source_row_id << "] " << cred->field << " ("
            << cred->kind.slug() << ")";
        if (!cred->value.empty()) out << ": " << cred->value;
        out << "\n";
    }
    if (!any_cred) out << "  (none)\n";

    out << "\ngrades:\n";
    for (const taxonomy::GradeReport& report : analysis.grades) {
        const auto* entry = taxonomy::find_app(analysis.registry, report.app_id);
        out << "  " << report.app_id;
        if (entry) out << " " << entry->name;
        out << ":\n";
        for (int i = 0; i < kArtefactCategoryCount; ++i) {
            const auto cat = static_cast<ArtefactCategory>(i);
            out << "    " << to_string(cat) << ": "
                << to_string(report.grades[i]);
            if (entry)
                out << " (expected "
                    << to_string(entry->artefact_grades[i]) << ")";
            out << "\n";
        }
    }
    if (analysis.grades.empty()) out << "  (no recognized apps)\n";

    out << "\ntimeline: " << analysis.timeline.events.size() << " events, "
        << analysis.timeline.undated.size() << " undated records\n";
    for (const TimelineEvent& event : analysis.timeline.events) {
        out << "  " << event.instant.instant().to_iso8601()
            << (event.instant.zone_assumed() ? "~" : " ") << " ["
            << event.source_app << "/" << event.source_table << "#"
            << event.source_row_id << "] " << event.summary << "\n";
    }
    if (!analysis.timeline.undated.empty()) {
        out << "  undated:\n";
        for (std::size_t idx : analysis.timeline.undated) {
            const EvidenceRecord& record = analysis.records[idx];
            out << "    [" << record.source_app << "/" << record.source_table
                << "#" << record.source_row_id << "] " << summarize(record)
                << "\n";
        }
    }

    out << "\nwarnings (" << analysis.warnings.size() << "):\n";
    for (const Warning& w : analysis.warnings)
        out << "  ["
            << (w.cls == WarningClass::Degraded ? "degraded" : "finding")
            << "] " << w.source << ": " << w.message << "\n";
    if (analysis.warnings.empty()) out << "  (none)\n";

    out << "\nerrata (" << analysis.source_errata.size() << "):\n";
    for (const std::string& e : analysis.source_errata) out << "  " << e << "\n";

    if (opts.include_matrix) {
        out << "\ngrading matrix (registry-derived):\n";
        out << taxonomy::matrix_to_text(
            taxonomy::render_matrix(analysis.registry));
    }
    out << "\nexit status: " << analysis.exit_code() << "\n";
    return out.str();
}

std::vector<std::pair<std::string, std::string>>
render_csv(const Analysis& analysis, const EmitOptions& opts) {
    std::vector<std::pair<std::string, std::string>> files;

    std::string identities =
        csv_line({"app", "table", "row", "user_ref", "attribute", "value",
                  "updated_at", "last_sync_at"});
    std::string credentials = csv_line(
        {"app", "table", "row", "user_ref", "field", "kind", "value"});
    std::string fixes =
        csv_line({"app", "table", "row", "trip_ref", "latitude", "longitude",
                  "altitude_m", "valid", "observed_at"});
    std::string notes = csv_line(
        {"app", "table", "row", "user_ref", "label", "body", "observed_at"});
    std::string measurements =
        csv_line({"app", "table", "row", "user_ref", "name", "value", "unit",
                  "observed_at"});
    std::string media =
        csv_line({"app", "table", "row", "target", "is_url", "host",
                  "publicly_accessible", "observed_at"});
    std::string events = csv_line(
        {"app", "table", "row", "kind", "details", "observed_at"});

    for (const EvidenceRecord& record : analysis.records) {
        const std::string app = record.source_app;
        const std::string table = record.source_table;
        const std::string row = std::to_string(record.source_row_id);
        const std::string at = ts_or_empty(record.observed_at);
        switch (record.kind()) {
        case RecordKind::Identity: {
            const auto& id = *record.as<IdentityData>();
            for (const auto& [name, attr] : id.attributes)
                identities += csv_line(
                    {app, table, row, std::to_string(id.user_ref), name,
                     attr.value, ts_or_empty(attr.updated_at),
                     ts_or_empty(attr.last_sync_at)});
            break;
        }
        case RecordKind::Credential: {
            const auto& cred = *record.as<CredentialData>();
            credentials += csv_line({app, table, row,
                                     std::to_string(cred.user_ref), cred.field,
                                     cred.kind.slug(), cred.value});
            break;
        }
        case RecordKind::GeoFix: {
            const auto& fix = *record.as<GeoFixData>();
            fixes += csv_line(
                {app, table, row,
                 fix.trip_ref ? std::to_string(*fix.trip_ref) : "",
                 format_double(fix.latitude), format_double(fix.longitude),
                 fix.altitude_m ? format_double(*fix.altitude_m) : "",
                 fix.valid ? "true" : "false", at});
            break;
        }
        case RecordKind::Note: {
            const auto& note = *record.as<NoteData>();
            notes += csv_line({app, table, row, std::to_string(note.user_ref),
                               note.label, note.body, at});
            break;
        }
        case RecordKind::Measurement: {
            const auto& m = *record.as<MeasurementData>();
            measurements +=
                csv_line({app, table, row, std::to_string(m.user_ref), m.name,
                          format_double(m.value), m.unit, at});
            break;
        }
        case RecordKind::MediaRef: {
            const auto& m = *record.as<MediaRefData>();
            media += csv_line({app, table, row, m.target,
                               m.is_url ? "true" : "false", m.host,
                               m.publicly_accessible ? "true" : "false", at});
            break;
        }
        case RecordKind::Event: {
            const auto& event = *record.as<EventData>();
            std::string details;
            for (const auto& [key, value] : event.details) {
                if (!details.empty()) details += "; ";
                details += key + "=" + value;
            }
            events += csv_line({app, table, row, event.kind, details, at});
            break;
        }
        }
    }

    std::string timeline = csv_line({"position", "instant", "zone_assumed",
                                     "app", "table", "row", "categories",
                                     "summary", "record"});
    for (std::size_t i = 0; i < analysis.timeline.events.size(); ++i) {
        const TimelineEvent& event = analysis.timeline.events[i];
        std::string categories;
        for (ArtefactCategory c : event.categories) {
            if (!categories.empty()) categories += " ";
            categories += to_string(c);
        }
        timeline += csv_line({std::to_string(i),
                              event.instant.instant().to_iso8601(),
                              event.instant.zone_assumed() ? "true" : "false",
                              event.source_app, event.source_table,
                              std::to_string(event.source_row_id), categories,
                              event.summary,
                              std::to_string(event.record_index)});
    }

    std::string grades =
        csv_line({"app_id", "category", "computed", "expected"});
    for (const taxonomy::GradeReport& report : analysis.grades) {
        const auto* entry = taxonomy::find_app(analysis.registry, report.app_id);
        for (int i = 0; i < kArtefactCategoryCount; ++i) {
            const auto cat = static_cast<ArtefactCategory>(i);
            grades += csv_line(
                {report.app_id, std::string(to_string(cat)),
                 std::string(to_string(report.grades[i])),
                 entry ? std::string(to_string(entry->artefact_grades[i]))
                       : ""});
        }
    }

    files.emplace_back("identities.csv", std::move(identities));
    files.emplace_back("credentials.csv", std::move(credentials));
    files.emplace_back("geofixes.csv", std::move(fixes));
    files.emplace_back("notes.csv", std::move(notes));
    files.emplace_back("measurements.csv", std::move(measurements));
    files.emplace_back("media_refs.csv", std::move(media));
    files.emplace_back("events.csv", std::move(events));
    files.emplace_back("timeline.csv", std::move(timeline));
    files.emplace_back("grades.csv", std::move(grades));
    if (opts.include_matrix)
        files.emplace_back(
            "matrix.csv",
            taxonomy::matrix_to_csv(taxonomy::render_matrix(analysis.registry)));
    return files;
}

namespace {

void atomic_write(const std::filesystem::path& target,
                  const std::string& content) {
    const std::filesystem::path tmp = target.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw IoError("cannot write " + tmp.string());
        out.write(content.data(),
                  static_cast<std::streamsize>(content.size()));
        if (!out) throw IoError("short write to " + tmp.string());
    }
    std::error_code ec;
    std::filesystem::rename(tmp, target, ec);
    if (ec) {
        std::filesystem::remove(tmp, ec);
        throw IoError("cannot finalize " + target.string());
    }
}

} // namespace

std::vector<std::filesystem::path>
emit_report(const Analysis& analysis, const EmitOptions& opts,
            const std::filesystem::path& dest_dir) {
    std::error_code ec;
    std::filesystem::create_directories(dest_dir, ec);
    if (ec && !std::filesystem::is_directory(dest_dir))
        throw IoError("cannot create output directory " + dest_dir.string());

    std::vector<std::filesystem::path> written;
    switch (opts.format) {
    case Format::Json: {
        const auto path = dest_dir / "report.json";
        atomic_write(path, render_json(analysis, opts));
        written.push_back(path);
        break;
    }
    case Format::Text: {
        const auto path = dest_dir / "report.txt";
        atomic_write(path, render_text(analysis, opts));
        written.push_back(path);
        break;
    }
    case Format::Csv: {
        for (const auto& [name, content] : render_csv(analysis, opts)) {
            const auto path = dest_dir / name;
            atomic_write(path, content);
            written.push_back(path);
        }
        break;
    }
    }
    return written;
}

std::vector<std::filesystem::path>
emit_gpx(const Analysis& analysis, const std::filesystem::path& dest_dir) {
    std::error_code ec;
    std::filesystem::create_directories(dest_dir, ec);
    std::vector<std::filesystem::path> written;
    for (const runkeeper::TripRoute& route : analysis.routes) {
        if (route.points.empty()) continue;
        const auto path =
            dest_dir / ("trip_" + std::to_string(route.trip.trip_id) + ".gpx");
        atomic_write(path, runkeeper::to_gpx(route));
        written.push_back(path);
    }
    return written;
}

} // namespace mhf::report
