#include "mhf/store.hpp"

#include <sqlite3.h>

#include <algorithm>
#include <cctype>
#include <cstring>
#include <fstream>

namespace mhf {

namespace {

constexpr char kMagic[16] = {'S', 'Q', 'L', 'i', 't', 'e', ' ', 'f',
                             'o', 'r', 'm', 'a', 't', ' ', '3', '\0'};

std::string lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) {
        return static_cast<char>(std::tolower(c));
    });
    return s;
}

std::string quote_identifier(const std::string& name) {
    std::string out = "\"";
    for (char c : name) {
        out.push_back(c);
        if (c == '"') out.push_back('"');
    }
    out.push_back('"');
    return out;
}

// file: URI for a strictly read-only, never-written mapping of the evidence
// file (immutable=1 also prevents journal probing side effects).
std::string readonly_uri(const std::filesystem::path& path) {
    const std::string raw = std::filesystem::absolute(path).string();
    static const char* hex = "0123456789ABCDEF";
    std::string out = "file:";
    for (unsigned char c : raw) {
        if (std::isalnum(c) || c == '/' || c == '.' || c == '_' || c == '-' ||
            c == '~') {
            out.push_back(static_cast<char>(c));
        } else {
            out.push_back('%');
            out.push_back(hex[c >> 4]);
            out.push_back(hex[c & 0xF]);
        }
    }
    out += "?immutable=1&mode=ro";
    return out;
}

struct StmtCloser {
    void operator()(sqlite3_stmt* s) const { sqlite3_finalize(s); }
};
using StmtPtr = std::unique_ptr<sqlite3_stmt, StmtCloser>;

StmtPtr prepare(sqlite3* db, const std::string& sql) {
    sqlite3_stmt* stmt = nullptr;
    if (sqlite3_prepare_v2(db, sql.c_str(), -1, &stmt, nullptr) != SQLITE_OK) {
        sqlite3_finalize(stmt);
        return nullptr;
    }
    return StmtPtr(stmt);
}

Value column_value(sqlite3_stmt* stmt, int col) {
    switch (sqlite3_column_type(stmt, col)) {
    case SQLITE_INTEGER:
        return Value(static_cast<std::int64_t>(sqlite3_column_int64(stmt, col)));
    case SQLITE_FLOAT: return Value(sqlite3_column_double(stmt, col));
    case SQLITE_TEXT: {
        const auto* text = sqlite3_column_text(stmt, col);
        const int n = sqlite3_column_bytes(stmt, col);
        return Value(std::string(reinterpret_cast<const char*>(text),
                                 static_cast<std::size_t>(n)));
    }
    case SQLITE_BLOB: {
        const auto* data = static_cast<const std::uint8_t*>(
            sqlite3_column_blob(stmt, col));
        const int n = sqlite3_column_bytes(stmt, col);
        return Value::blob(std::vector<std::uint8_t>(data, data + n));
    }
    default: return Value();
    }
}

} // namespace

std::string_view to_string(AppId id) {
    switch (id) {
    case AppId::MyFitnessPal: return "MyFitnessPal";
    case AppId::RunKeeper: return "RunKeeper";
    case AppId::PeriodCalendar: return "PeriodCalendar";
    case AppId::PeriodCalendarPill: return "PeriodCalendarPill";
    case AppId::Unknown: return "Unknown";
    }
    return "Unknown";
}

struct StoreImpl {
    std::filesystem::path path;
    sqlite3* db = nullptr;
    std::vector<std::string> tables;
    std::vector<std::string> unreadable;
    int page_size = 0;
    bool degraded = false;

    ~StoreImpl() {
        if (db) sqlite3_close(db);
    }
};

StoreHandle::StoreHandle() : impl_(std::make_unique<StoreImpl>()) {}
StoreHandle::StoreHandle(StoreHandle&&) noexcept = default;
StoreHandle& StoreHandle::operator=(StoreHandle&&) noexcept = default;
StoreHandle::~StoreHandle() = default;

const std::filesystem::path& StoreHandle::path() const { return impl_->path; }
const std::vector<std::string>& StoreHandle::table_names() const {
    return impl_->tables;
}
int StoreHandle::page_size() const { return impl_->page_size; }
bool StoreHandle::degraded() const { return impl_->degraded; }
const std::vector<std::string>& StoreHandle::unreadable_tables() const {
    return impl_->unreadable;
}

bool StoreHandle::has_table(const std::string& table) const {
    return std::find(impl_->tables.begin(), impl_->tables.end(), table) !=
           impl_->tables.end();
}

Rows StoreHandle::read_rows(const std::string& table, WarningLog* log) const {
    if (!has_table(table))
        throw NoSuchTable("no such table: " + table + " in " +
                          impl_->path.string());

    const std::string quoted = quote_identifier(table);
    StmtPtr stmt = prepare(impl_->db, "SELECT _rowid_, * FROM " + quoted +
                                          " ORDER BY _rowid_");
    int first_data_col = 1;
    if (!stmt) {
        // WITHOUT ROWID or shadowed rowid name; fall back to storage order.
        stmt = prepare(impl_->db, "SELECT * FROM " + quoted);
        first_data_col = 0;
        if (!stmt)
            throw NoSuchTable("cannot query table: " + table);
    }

    auto columns = std::make_shared<std::vector<std::string>>();
    const int ncols = sqlite3_column_count(stmt.get());
    for (int i = first_data_col; i < ncols; ++i)
        columns->push_back(sqlite3_column_name(stmt.get(), i));

    Rows rows;
    std::int64_t synthetic_rowid = 0;
    for (;;) {
        const int rc = sqlite3_step(stmt.get());
        if (rc == SQLITE_DONE) break;
        if (rc != SQLITE_ROW) {
            // Broken page mid-table: salvage what was read so far.
            impl_->degraded = true;
            if (log)
                log->degraded("store/" + table,
                              "table truncated after " +
                                  std::to_string(rows.size()) + " rows: " +
                                  sqlite3_errmsg(impl_->db));
            break;
        }
        RawRow row;
        row.columns = columns;
        row.rowid = first_data_col == 1 ? sqlite3_column_int64(stmt.get(), 0)
                                        : ++synthetic_rowid;
        row.values.reserve(static_cast<std::size_t>(ncols - first_data_col));
        for (int i = first_data_col; i < ncols; ++i)
            row.values.push_back(column_value(stmt.get(), i));
        rows.push_back(std::move(row));
    }
    return rows;
}

namespace {

// Lists user tables and probes each with a full scan; broken tables land in
// `unreadable`.
void inspect_tables(StoreImpl& impl) {
    StmtPtr stmt = prepare(impl.db,
                           "SELECT name FROM sqlite_master WHERE type='table' "
                           "AND name NOT LIKE 'sqlite!_%' ESCAPE '!' "
                           "ORDER BY name");
    if (!stmt)
        throw CorruptStore("cannot read database schema of " +
                               impl.path.string(),
                           {});
    std::vector<std::string> names;
    for (;;) {
        const int rc = sqlite3_step(stmt.get());
        if (rc == SQLITE_DONE) break;
        if (rc != SQLITE_ROW)
            throw CorruptStore("schema table is damaged in " +
                                   impl.path.string(),
                               names);
        names.emplace_back(
            reinterpret_cast<const char*>(sqlite3_column_text(stmt.get(), 0)));
    }
    for (const std::string& name : names) {
        StmtPtr probe = prepare(
            impl.db, "SELECT count(*) FROM " + quote_identifier(name));
        const bool ok = probe && sqlite3_step(probe.get()) == SQLITE_ROW;
        if (ok)
            impl.tables.push_back(name);
        else
            impl.unreadable.push_back(name);
    }
}

} // namespace

StoreHandle detail_open_store(const std::filesystem::path& path, bool salvage) {
    std::error_code ec;
    if (!std::filesystem::exists(path, ec) ||
        !std::filesystem::is_regular_file(path, ec))
        throw IoError("no such evidence file: " + path.string());

    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open evidence file: " + path.string());
    char header[100] = {};
    in.read(header, sizeof(header));
    const auto got = in.gcount();
    if (got < 16 || std::memcmp(header, kMagic, 16) != 0)
        throw NotADatabase("not an SQLite-3 database: " + path.string());
    if (got < 100)
        throw CorruptStore("database header truncated: " + path.string(), {});
    in.close();

    StoreHandle handle;
    StoreImpl& impl = *handle.impl_;
    impl.path = path;
    int ps = (static_cast<unsigned char>(header[16]) << 8) |
             static_cast<unsigned char>(header[17]);
    impl.page_size = ps == 1 ? 65536 : ps;

    sqlite3* db = nullptr;
    const int rc = sqlite3_open_v2(readonly_uri(path).c_str(), &db,
                                   SQLITE_OPEN_READONLY | SQLITE_OPEN_URI,
                                   nullptr);
    impl.db = db;
    if (rc != SQLITE_OK)
        throw CorruptStore("cannot open database: " + path.string() + ": " +
                               (db ? sqlite3_errmsg(db) : "unknown error"),
                           {});

    inspect_tables(impl);
    if (!impl.unreadable.empty()) {
        if (!salvage)
            throw CorruptStore("damaged tables in " + path.string(),
                               impl.tables);
        impl.degraded = true;
    }
    return handle;
}

StoreHandle open_store(const std::filesystem::path& path) {
    return detail_open_store(path, false);
}

StoreHandle open_store_salvage(const std::filesystem::path& path) {
    return detail_open_store(path, true);
}

AppId detect_app(const std::set<std::string>& table_names) {
    std::set<std::string> t;
    for (const std::string& name : table_names) t.insert(lower(name));
    const auto has_all = [&t](std::initializer_list<const char*> names) {
        return std::all_of(names.begin(), names.end(), [&t](const char* n) {
            return t.count(n) > 0;
        });
    };
    if (has_all({"user_properties", "users", "images", "diary_notes"}))
        return AppId::MyFitnessPal;
    if (has_all({"trips", "points", "trip_settings"})) return AppId::RunKeeper;
    if (has_all({"user", "note", "period"})) return AppId::PeriodCalendar;
    if (has_all({"pill", "pill_record"})) return AppId::PeriodCalendarPill;
    return AppId::Unknown;
}

AppId detect_app(const StoreHandle& handle) {
    return detect_app(std::set<std::string>(handle.table_names().begin(),
                                            handle.table_names().end()));
}

std::optional<int> avatar_index(std::string_view filename) {
    constexpr std::string_view prefix = "tmp_avatar_mfp~";
    if (filename.size() <= prefix.size() ||
        filename.substr(0, prefix.size()) != prefix)
        return std::nullopt;
    std::string_view rest = filename.substr(prefix.size());
    std::string_view digits;
    if (rest.size() > 4 && rest.substr(rest.size() - 4) == ".jpg")
        digits = rest.substr(0, rest.size() - 4);
    else if (rest.size() > 4 && rest.substr(rest.size() - 4) == ".png")
        digits = rest.substr(0, rest.size() - 4);
    else
        return std::nullopt;
    if (digits.empty() || digits[0] == '0') return std::nullopt;
    int value = 0;
    for (char c : digits) {
        if (c < '0' || c > '9') return std::nullopt;
        if (value > 100000000) return std::nullopt;
        value = value * 10 + (c - '0');
    }
    return value;  // x >= 1 guaranteed by the leading-zero rejection
}

ScanResult scan_tree(const std::filesystem::path& root) {
    ScanResult result;

    std::vector<std::filesystem::path> files;
    std::error_code ec;
    std::filesystem::recursive_directory_iterator it(
        root, std::filesystem::directory_options::skip_permission_denied, ec);
    if (ec) {
        result.warnings.degraded("store/scan",
                                 "cannot walk " + root.string() + ": " +
                                     ec.message());
        return result;
    }
    for (auto end = std::filesystem::end(it); it != end;
         it.increment(ec)) {
        if (ec) {
            result.warnings.degraded("store/scan",
                                     "walk interrupted: " + ec.message());
            break;
        }
        std::error_code fec;
        if (it->is_regular_file(fec) && !fec) files.push_back(it->path());
    }
    std::sort(files.begin(), files.end());

    for (const auto& file : files) {
        if (auto idx = avatar_index(file.filename().string())) {
            result.avatars.push_back({file, *idx});
            continue;
        }
        // Cheap probe before attempting a database open.
        std::ifstream in(file, std::ios::binary);
        if (!in) {
            result.warnings.degraded("store/scan",
                                     "unreadable entry skipped: " +
                                         file.string());
            continue;
        }
        char magic[16] = {};
        in.read(magic, sizeof(magic));
        if (in.gcount() < 16 || std::memcmp(magic, kMagic, 16) != 0) continue;
        in.close();

        try {
            StoreHandle handle = open_store(file);
            result.databases.emplace_back(file, detect_app(handle));
        } catch (const CorruptStore& e) {
            result.warnings.degraded("store/scan",
                                     std::string("corrupt database: ") +
                                         e.what());
            try {
                StoreHandle handle = open_store_salvage(file);
                result.databases.emplace_back(file, detect_app(handle));
            } catch (const std::exception&) {
                result.databases.emplace_back(file, AppId::Unknown);
            }
        } catch (const std::exception& e) {
            result.warnings.degraded("store/scan",
                                     std::string("unreadable database: ") +
                                         e.what());
        }
    }
    return result;
}

} // namespace mhf
