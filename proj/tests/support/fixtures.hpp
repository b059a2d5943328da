// Builds the fixture databases used across the test suites: the three app
// stores seeded with the documented table snapshots, plus synthetic trees
// and corrupt stores for the degradation paths.

#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "mhf/value.hpp"

struct sqlite3;

namespace mhf::test {

// Minimal writable-database helper for fixtures only; production code never
// links against it.
class DbWriter {
public:
    explicit DbWriter(const std::filesystem::path& path, bool truncate = true);
    ~DbWriter();
    DbWriter(const DbWriter&) = delete;
    DbWriter& operator=(const DbWriter&) = delete;

    void exec(const std::string& sql);
    void insert(const std::string& table,
                const std::vector<std::string>& columns,
                const std::vector<Value>& values);

private:
    sqlite3* db_ = nullptr;
};

// Each builder overwrites its target path.
void build_mfp_db(const std::filesystem::path& path);        // 34 tables
void build_runkeeper_db(const std::filesystem::path& path);  // 31 tables
void build_pc_db(const std::filesystem::path& path);         // 5 tables
void build_pc_pill_db(const std::filesystem::path& path);    // 4 tables

// PC.db backup containing one extra period row (recoverable evidence).
void build_pc_backup_db(const std::filesystem::path& path);

// A database that passes the magic check but has one unreadable table.
void build_corrupt_db(const std::filesystem::path& path);

// Synthetic logical-image tree with the three databases and two avatar
// files; returns the root.
std::filesystem::path build_tree(const std::filesystem::path& root);

// Shared per-process fixture directory (build_dir/fixtures-<pid>), built
// once on first use.
const std::filesystem::path& fixture_dir();
const std::filesystem::path& mfp_path();
const std::filesystem::path& runkeeper_path();
const std::filesystem::path& pc_path();
const std::filesystem::path& pc_pill_path();

} // namespace mhf::test
