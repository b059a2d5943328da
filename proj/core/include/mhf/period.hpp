// Period Calendar (PC.db / PC_PILL.db) artefact extraction: plaintext
// credentials, cycle records, health notes, pill schedules, and
// primary-vs-backup reconciliation.

#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "mhf/evidence.hpp"
#include "mhf/store.hpp"

namespace mhf::period {

struct ReconcileError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct PcUser {
    std::int64_t row_id = 0;
    std::int64_t uid = 0;
    std::string username;
    std::string password;  // stored in plaintext
    std::string email;
    std::string question;
    std::string answer;    // stored in plaintext
    std::string settings_raw;
    std::map<std::string, std::string> settings;  // parsed when well-formed
    bool settings_parsed = false;
};

struct PeriodRecord {
    std::int64_t row_id = 0;
    std::int64_t uid = 0;
    std::optional<EpochMillis> menses_start;
    std::int64_t menses_length = 0;  // negative raw values preserved
    std::int64_t period_length = 0;
    std::int64_t pregnancy = 0;
    bool anomalous_length = false;   // menses_length < 0, flagged not dropped
};

struct HealthNote {
    std::int64_t row_id = 0;
    std::int64_t uid = 0;
    std::optional<EpochMillis> date;
    std::string note;
    std::string pill;
    std::optional<double> temperature_c;  // degrees Celsius as stored
    std::optional<double> weight_lb;      // pounds as stored, no conversion
    std::string symptoms_raw;
    std::string moods_raw;
};

std::vector<PcUser> parse_pc_users(const Rows& rows, WarningLog& log);
// One Identity, one PlaintextPassword credential, and one SecretQA
// credential per user.
std::vector<EvidenceRecord> user_records(const std::vector<PcUser>& users);

std::vector<PeriodRecord> parse_periods(const Rows& rows, WarningLog& log);
std::vector<EvidenceRecord>
period_records(const std::vector<PeriodRecord>& records);

std::vector<HealthNote> parse_pc_notes(const Rows& rows, WarningLog& log);
std::vector<EvidenceRecord>
health_note_records(const std::vector<HealthNote>& notes);

// PC_PILL.db: each pill yields first-taken and next-medication events;
// pill_record rows attach as details, orphans are reported.
std::vector<EvidenceRecord> parse_pills(const Rows& pill_rows,
                                        const Rows& pill_record_rows,
                                        WarningLog& log);

struct TableDiff {
    std::string table;
    Rows only_in_primary;
    Rows only_in_backup;  // recoverable-from-backup evidence
};

struct DiffReport {
    std::vector<TableDiff> tables;  // only tables with differences
    bool empty() const { return tables.empty(); }
};

// Row-level diff between a live database and its backup. Both handles must
// fingerprint as the same Period Calendar database kind, else
// ReconcileError. diff(A, A) is empty; diff(A, B) mirrors diff(B, A).
DiffReport reconcile_backups(const StoreHandle& primary,
                             const StoreHandle& backup);

struct Extraction {
    std::vector<PcUser> users;
    std::vector<PeriodRecord> periods;
    std::vector<HealthNote> notes;
    std::vector<EvidenceRecord> records;
};

Extraction parse_store(const StoreHandle& store, const ZoneSpec& tz,
                       WarningLog& log);

} // namespace mhf::period
