// Analysis orchestration and reporting: scan -> detect -> parse -> grade,
// chronology assembly, credential redaction, and deterministic json / csv /
// text emission.

#pragma once

#include <filesystem>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "mhf/evidence.hpp"
#include "mhf/runkeeper.hpp"
#include "mhf/store.hpp"
#include "mhf/taxonomy.hpp"

namespace mhf::report {

// --- redaction ---------------------------------------------------------------

enum class RedactionMode { Off, MaskCredentials, MaskAll };

struct RedactionPolicy {
    RedactionMode mode = RedactionMode::Off;
};

// Keeps the first character and the full domain: "a…@gmail.com".
std::string mask_email(std::string_view email);

// Off leaves every byte unchanged. MaskCredentials replaces credential raw
// values with "[REDACTED:<kind>]" and masks emails while keeping all
// classification metadata. MaskAll additionally masks personal text
// (profile attributes, note bodies, names, media targets).
std::vector<EvidenceRecord> redact(std::vector<EvidenceRecord> records,
                                   const RedactionPolicy& policy);

// --- timeline ----------------------------------------------------------------

struct TimelineEvent {
    Timestamp instant;
    std::string source_app;
    std::string source_table;
    std::int64_t source_row_id = 0;
    std::set<ArtefactCategory> categories;
    std::string summary;
    std::size_t record_index = 0;  // into the analyzed record list
};

struct Timeline {
    std::vector<TimelineEvent> events;       // ascending instants
    std::vector<std::size_t> undated;        // records without a timestamp
};

// Total order: instant ascending, ties broken by (source_app, source_table,
// source_row_id). Undated records are never interleaved.
Timeline build_timeline(std::span<const EvidenceRecord> records);

// --- analysis ----------------------------------------------------------------

struct StoreReport {
    std::filesystem::path path;
    std::string sha256;
    AppId app = AppId::Unknown;
    std::vector<std::string> tables;
    int page_size = 0;
    bool degraded = false;
    std::vector<std::string> unreadable_tables;
};

enum class AppOverride { Auto, Mfp, RunKeeper, PeriodCal };

struct AnalysisOptions {
    AppOverride app = AppOverride::Auto;
    ZoneSpec tz;  // assumed zone for naive datetime strings
    RedactionPolicy redaction;
    std::optional<std::filesystem::path> registry_file;
    bool concurrent = true;
};

struct Analysis {
    std::vector<StoreReport> stores;
    std::vector<AvatarHit> avatars;
    std::vector<EvidenceRecord> records;  // redaction already applied
    std::vector<runkeeper::TripRoute> routes;
    Timeline timeline;
    std::vector<taxonomy::GradeReport> grades;  // per recognized app
    std::vector<taxonomy::MatrixErratum> matrix_errata;
    std::vector<std::string> source_errata;  // documented source-material errata
    std::vector<Warning> warnings;
    taxonomy::Registry registry;
    ZoneSpec tz;
    bool no_evidence = false;

    // 0 complete, 1 partial (degraded warnings), 2 no parsable evidence.
    int exit_code() const;
};

// Analyzes files and/or directory trees. Directories are scanned
// recursively; distinct stores are parsed concurrently and merged in
// deterministic input order.
Analysis analyze(const std::vector<std::filesystem::path>& inputs,
                 const AnalysisOptions& options);

// --- emission ----------------------------------------------------------------

enum class Format { Json, Csv, Text };

struct EmitOptions {
    Format format = Format::Json;
    bool include_matrix = false;  // append the full grading matrix
};

std::string render_json(const Analysis& analysis, const EmitOptions& opts);
std::string render_text(const Analysis& analysis, const EmitOptions& opts);
// One csv per record class; returned as (file name, content) pairs.
std::vector<std::pair<std::string, std::string>>
render_csv(const Analysis& analysis, const EmitOptions& opts);

// Writes the chosen format under dest_dir (created if needed) via
// temp-file-plus-rename so nothing is ever partially written. Returns the
// paths written. Throws IoError on unwritable destinations.
std::vector<std::filesystem::path>
emit_report(const Analysis& analysis, const EmitOptions& opts,
            const std::filesystem::path& dest_dir);

// GPX side outputs, one file per route with location fixes.
std::vector<std::filesystem::path>
emit_gpx(const Analysis& analysis, const std::filesystem::path& dest_dir);

} // namespace mhf::report
