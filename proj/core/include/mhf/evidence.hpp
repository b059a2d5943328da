// The unified evidence model: every artefact a parser recovers is carried
// as an EvidenceRecord with full source provenance, plus the coverage-grade
// and category vocabularies used by the taxonomy engine.

#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "mhf/credential.hpp"
#include "mhf/time.hpp"

namespace mhf {

// Three-valued recovery grade: Full, Partial, None.
enum class CoverageGrade { F, P, N };

std::string_view to_string(CoverageGrade g);
std::string_view grade_word(CoverageGrade g);

// The seven artefact groups records are classified into.
enum class ArtefactCategory {
    Databases,
    UserCredentials,
    PersonalDetails,
    UserActivities,
    UserLocation,
    ActivityTimestamps,
    Images,
};
inline constexpr int kArtefactCategoryCount = 7;

// The four app categories of the grading matrix.
enum class AppCategory {
    PatientCareMonitoring,
    LaypersonHealth,
    CommunicationEducationResearch,
    PhysicianStudentReference,
};
inline constexpr int kAppCategoryCount = 4;

std::string_view to_string(ArtefactCategory c);
std::string_view to_string(AppCategory c);

// --- record payloads ------------------------------------------------------

struct ProfileAttribute {
    std::string value;
    std::optional<Timestamp> updated_at;
    std::optional<Timestamp> last_sync_at;
    std::int64_t source_rowid = 0;
};

struct IdentityData {
    std::int64_t user_ref = 0;
    std::map<std::string, ProfileAttribute> attributes;
};

struct CredentialData {
    CredentialKind kind;
    std::string value;  // raw recovered value (or redaction placeholder)
    std::string field;  // source column, e.g. "pincode"
    std::int64_t user_ref = 0;
    bool shape_warning = false;
};

struct GeoFixData {
    double latitude = 0.0;
    double longitude = 0.0;
    std::optional<double> altitude_m;
    std::optional<std::int64_t> trip_ref;
    bool valid = true;  // false when coordinates are out of range
};

struct NoteData {
    std::string body;
    std::string label;  // "food", "exercise", "unknown", ...
    std::int64_t user_ref = 0;
};

struct MeasurementData {
    std::string name;
    double value = 0.0;
    std::string unit;
    std::int64_t user_ref = 0;
};

struct MediaRefData {
    std::string target;  // URL or file path; never dereferenced
    bool is_url = false;
    std::string host;    // parsed from URL targets
    bool publicly_accessible = false;
};

struct EventData {
    std::string kind;  // "search", "sync", "trip", "trip-deleted", ...
    std::map<std::string, std::string> details;
};

using RecordPayload =
    std::variant<IdentityData, CredentialData, GeoFixData, NoteData,
                 MeasurementData, MediaRefData, EventData>;

// Index order matches RecordPayload alternatives.
enum class RecordKind : std::size_t {
    Identity = 0,
    Credential,
    GeoFix,
    Note,
    Measurement,
    MediaRef,
    Event,
};

std::string_view to_string(RecordKind k);

struct EvidenceRecord {
    std::string source_app;    // never empty
    std::string source_table;  // never empty
    std::int64_t source_row_id = 0;
    std::optional<Timestamp> observed_at;
    RecordPayload payload;

    RecordKind kind() const { return static_cast<RecordKind>(payload.index()); }

    template <typename T>
    const T* as() const {
        return std::get_if<T>(&payload);
    }

    // Provenance is never dropped: throws std::invalid_argument on empty
    // source_app/source_table.
    static EvidenceRecord make(std::string app, std::string table,
                               std::int64_t row_id, RecordPayload payload,
                               std::optional<Timestamp> observed_at = {});
};

// --- warnings -------------------------------------------------------------

// Findings are forensic observations over well-formed data (gaps, conflicts,
// anomalies); Degraded marks lossy processing (corrupt pages, undecodable
// fields). Only Degraded warnings affect the exit code.
enum class WarningClass { Finding, Degraded };

struct Warning {
    WarningClass cls = WarningClass::Finding;
    std::string source;   // "mfp/user_properties", "store/scan", ...
    std::string message;
};

class WarningLog {
public:
    void finding(std::string source, std::string message);
    void degraded(std::string source, std::string message);

    const std::vector<Warning>& items() const { return items_; }
    bool any_degraded() const;
    void merge(const WarningLog& other);

private:
    std::vector<Warning> items_;
};

} // namespace mhf
