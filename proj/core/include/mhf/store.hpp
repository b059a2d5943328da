// Read-only access to extracted SQLite evidence files: opening, app
// fingerprinting from table-name sets, row reading, and directory scans of
// logical-image trees. Evidence bytes are never modified.

#pragma once

#include <filesystem>
#include <memory>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "mhf/evidence.hpp"
#include "mhf/value.hpp"

namespace mhf {

enum class AppId {
    MyFitnessPal,
    RunKeeper,
    PeriodCalendar,
    PeriodCalendarPill,
    Unknown,
};

std::string_view to_string(AppId id);

struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct NotADatabase : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct CorruptStore : std::runtime_error {
    CorruptStore(const std::string& what, std::vector<std::string> salvageable)
        : std::runtime_error(what), salvageable_tables(std::move(salvageable)) {}
    std::vector<std::string> salvageable_tables;
};

struct NoSuchTable : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct StoreImpl;

class StoreHandle {
public:
    StoreHandle(StoreHandle&&) noexcept;
    StoreHandle& operator=(StoreHandle&&) noexcept;
    ~StoreHandle();
    StoreHandle(const StoreHandle&) = delete;
    StoreHandle& operator=(const StoreHandle&) = delete;

    const std::filesystem::path& path() const;
    // Sorted user table names (salvageable ones only in degraded mode).
    const std::vector<std::string>& table_names() const;
    int page_size() const;
    bool degraded() const;
    const std::vector<std::string>& unreadable_tables() const;

    bool has_table(const std::string& table) const;

    // Rows in rowid order with column types preserved. Throws NoSuchTable.
    // In degraded mode a partially readable table yields the rows salvaged
    // before the first broken page, with a Degraded warning when a log is
    // supplied.
    Rows read_rows(const std::string& table, WarningLog* log = nullptr) const;

private:
    friend StoreHandle detail_open_store(const std::filesystem::path&, bool);
    StoreHandle();

    std::unique_ptr<StoreImpl> impl_;
};

// Opens strictly read-only. Errors: missing file -> IoError; missing or
// wrong magic header -> NotADatabase; unreadable tables -> CorruptStore
// carrying the table names that can still be salvaged (reopen with
// open_store_salvage to work with those).
StoreHandle open_store(const std::filesystem::path& path);

// Like open_store but degrades to the salvageable subset instead of
// throwing CorruptStore.
StoreHandle open_store_salvage(const std::filesystem::path& path);

// Fingerprints the producing app from the table-name set alone.
AppId detect_app(const std::set<std::string>& table_names);
AppId detect_app(const StoreHandle& handle);

struct AvatarHit {
    std::filesystem::path path;
    int index = 0;  // the x in tmp_avatar_mfp~x.jpg / .png
};

struct ScanResult {
    // Every SQLite file found, fingerprinted; sorted by path.
    std::vector<std::pair<std::filesystem::path, AppId>> databases;
    std::vector<AvatarHit> avatars;
    WarningLog warnings;
};

// Walks an extracted logical-image tree. Unreadable entries are skipped
// with a Degraded warning, never fatal.
ScanResult scan_tree(const std::filesystem::path& root);

// Matches tmp_avatar_mfp~<x>.jpg / .png with integer x >= 1.
std::optional<int> avatar_index(std::string_view filename);

} // namespace mhf
