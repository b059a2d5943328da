// MyFitnessPal (myfitnesspal.db) artefact extraction: pivoted user
// profiles, credentials and pin codes, profile-picture URLs, diary notes,
// and the activity tables.

#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "mhf/evidence.hpp"
#include "mhf/store.hpp"

namespace mhf::mfp {

// The twelve tables of forensic interest in myfitnesspal.db.
const std::vector<std::string>& tables_of_interest();

struct UserProfile {
    std::int64_t user_id = 0;
    std::map<std::string, ProfileAttribute> attributes;

    std::optional<std::string> attr(const std::string& name) const;

    std::optional<std::string> gender() const { return attr("gender"); }
    std::optional<std::string> date_of_birth() const { return attr("date_of_birth"); }
    std::optional<std::string> country() const { return attr("country_name"); }
    std::optional<std::string> postal_code() const { return attr("postal_code"); }
    std::optional<std::string> email() const { return attr("email"); }
    std::optional<std::string> timezone_identifier() const { return attr("timezone_identifier"); }
    std::optional<std::string> diary_privacy_setting() const { return attr("diary_privacy_setting"); }
    std::optional<std::string> diary_password() const { return attr("diary_password"); }
};

struct MfpCredential {
    std::int64_t id = 0;
    std::int64_t master_id = 0;
    std::string username;
    std::string password_digest;
    CredentialKind password_kind;
    std::optional<std::string> pincode;
    std::string last_sync_at_raw;
    std::int64_t rowid = 0;
};

struct DiaryNote {
    std::int64_t id = 0;
    std::int64_t master_id = 0;
    std::int64_t user_id = 0;
    std::string entry_date;
    std::int64_t note_type = 0;
    std::string body;
    std::int64_t uid = 0;
    enum class Label { Food, Exercise, Unknown } label = Label::Unknown;
    std::int64_t rowid = 0;
};

// Pivots the row-per-attribute user_properties table into one attribute map
// per user. Duplicate (user_id, property_name) pairs keep the latest
// updated_at and flag a conflict finding. Profiles of logged-out users are
// retained like any other.
std::map<std::int64_t, UserProfile>
pivot_user_properties(const Rows& rows, const ZoneSpec& tz, WarningLog& log);

std::vector<MfpCredential> parse_mfp_users(const Rows& rows, WarningLog& log);

std::vector<EvidenceRecord> parse_mfp_images(const Rows& rows,
                                             const ZoneSpec& tz,
                                             WarningLog& log);

std::vector<DiaryNote> parse_mfp_diary_notes(const Rows& rows, WarningLog& log);

// Generic extraction for the eight activity tables (exercise_entries,
// exercises, food_entries, foods, measurement_types, measurements,
// search_history, last_sync_pointers). Missing tables are skipped with a
// finding; unknown columns pass through into the event detail map.
std::vector<EvidenceRecord>
parse_mfp_activity(const std::map<std::string, Rows>& tables,
                   const ZoneSpec& tz, WarningLog& log);

// Record emission.
std::vector<EvidenceRecord>
profile_records(const std::map<std::int64_t, UserProfile>& profiles,
                const Rows& rows, const ZoneSpec& tz);
std::vector<EvidenceRecord>
credential_records(const std::vector<MfpCredential>& creds);
std::vector<EvidenceRecord> note_records(const std::vector<DiaryNote>& notes,
                                         const ZoneSpec& tz);

struct Extraction {
    std::map<std::int64_t, UserProfile> profiles;
    std::vector<MfpCredential> credentials;
    std::vector<DiaryNote> notes;
    std::vector<EvidenceRecord> records;  // everything, provenance-tagged
};

Extraction parse_store(const StoreHandle& store, const ZoneSpec& tz,
                       WarningLog& log);

} // namespace mhf::mfp
