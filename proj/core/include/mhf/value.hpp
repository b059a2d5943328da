// Nullable scalar values as stored in SQLite columns, plus the raw row
// shape handed from the store reader to the app parsers.

#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace mhf {

class Value {
public:
    enum class Type { Null, Integer, Real, Text, Blob };

    Value() = default;
    explicit Value(std::int64_t v) : v_(v) {}
    explicit Value(double v) : v_(v) {}
    explicit Value(std::string v) : v_(std::move(v)) {}
    explicit Value(const char* v) : v_(std::string(v)) {}

    static Value blob(std::vector<std::uint8_t> bytes);

    Type type() const;
    bool is_null() const { return type() == Type::Null; }

    // Checked accessors: empty optional when the stored type does not match
    // and cannot be coerced losslessly.
    std::optional<std::int64_t> as_int() const;
    std::optional<double> as_real() const;
    std::optional<std::string> as_text() const;
    const std::vector<std::uint8_t>* as_blob() const;

    // Deterministic rendering for reports: integers in decimal, reals in
    // shortest round-trip form, blobs as lowercase hex, null as "".
    std::string to_display() const;

    bool operator==(const Value& other) const { return v_ == other.v_; }

private:
    std::variant<std::monostate, std::int64_t, double, std::string,
                 std::vector<std::uint8_t>>
        v_;
};

// Deterministic shortest round-trip rendering of a double.
std::string format_double(double v);

// One table row. Column names are shared across all rows of a table.
struct RawRow {
    std::int64_t rowid = 0;
    std::shared_ptr<const std::vector<std::string>> columns;
    std::vector<Value> values;

    bool has(std::string_view column) const;
    // Null value when the column is absent.
    const Value& get(std::string_view column) const;
};

using Rows = std::vector<RawRow>;

} // namespace mhf
