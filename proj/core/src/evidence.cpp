#include "mhf/evidence.hpp"

#include <algorithm>

namespace mhf {

std::string_view to_string(CoverageGrade g) {
    switch (g) {
    case CoverageGrade::F: return "F";
    case CoverageGrade::P: return "P";
    case CoverageGrade::N: return "N";
    }
    return "?";
}

std::string_view grade_word(CoverageGrade g) {
    switch (g) {
    case CoverageGrade::F: return "full";
    case CoverageGrade::P: return "partial";
    case CoverageGrade::N: return "none";
    }
    return "?";
}

std::string_view to_string(ArtefactCategory c) {
    switch (c) {
    case ArtefactCategory::Databases: return "databases";
    case ArtefactCategory::UserCredentials: return "user-credentials";
    case ArtefactCategory::PersonalDetails: return "personal-details";
    case ArtefactCategory::UserActivities: return "user-activities";
    case ArtefactCategory::UserLocation: return "user-location";
    case ArtefactCategory::ActivityTimestamps: return "activity-timestamps";
    case ArtefactCategory::Images: return "images";
    }
    return "?";
}

std::string_view to_string(AppCategory c) {
    switch (c) {
    case AppCategory::PatientCareMonitoring: return "patient-care-monitoring";
    case AppCategory::LaypersonHealth: return "layperson-health";
    case AppCategory::CommunicationEducationResearch:
        return "communication-education-research";
    case AppCategory::PhysicianStudentReference:
        return "physician-student-reference";
    }
    return "?";
}

std::string_view to_string(RecordKind k) {
    switch (k) {
    case RecordKind::Identity: return "identity";
    case RecordKind::Credential: return "credential";
    case RecordKind::GeoFix: return "geo-fix";
    case RecordKind::Note: return "note";
    case RecordKind::Measurement: return "measurement";
    case RecordKind::MediaRef: return "media-ref";
    case RecordKind::Event: return "event";
    }
    return "?";
}

EvidenceRecord EvidenceRecord::make(std::string app, std::string table,
                                    std::int64_t row_id, RecordPayload payload,
                                    std::optional<Timestamp> observed_at) {
    if (app.empty()) throw std::invalid_argument("record without source app");
    if (table.empty()) throw std::invalid_argument("record without source table");
    EvidenceRecord r;
    r.source_app = std::move(app);
    r.source_table = std::move(table);
    r.source_row_id = row_id;
    r.observed_at = std::move(observed_at);
    r.payload = std::move(payload);
    return r;
}

void WarningLog::finding(std::string source, std::string message) {
    items_.push_back({WarningClass::Finding, std::move(source), std::move(message)});
}

void WarningLog::degraded(std::string source, std::string message) {
    items_.push_back({WarningClass::Degraded, std::move(source), std::move(message)});
}

bool WarningLog::any_degraded() const {
    return std::any_of(items_.begin(), items_.end(), [](const Warning& w) {
        return w.cls == WarningClass::Degraded;
    });
}

void WarningLog::merge(const WarningLog& other) {
    items_.insert(items_.end(), other.items_.begin(), other.items_.end());
}

} // namespace mhf
