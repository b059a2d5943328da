#include "mhf/value.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cstdio>

namespace mhf {

Value Value::blob(std::vector<std::uint8_t> bytes) {
    Value v;
    v.v_ = std::move(bytes);
    return v;
}

Value::Type Value::type() const {
    switch (v_.index()) {
    case 1: return Type::Integer;
    case 2: return Type::Real;
    case 3: return Type::Text;
    case 4: return Type::Blob;
    default: return Type::Null;
    }
}

std::optional<std::int64_t> Value::as_int() const {
    if (const auto* i = std::get_if<std::int64_t>(&v_)) return *i;
    if (const auto* d = std::get_if<double>(&v_)) {
        if (*d == static_cast<double>(static_cast<std::int64_t>(*d)))
            return static_cast<std::int64_t>(*d);
        return std::nullopt;
    }
    if (const auto* s = std::get_if<std::string>(&v_)) {
        std::int64_t out = 0;
        const char* first = s->data();
        const char* last = s->data() + s->size();
        auto [ptr, ec] = std::from_chars(first, last, out);
        if (ec == std::errc{} && ptr == last && !s->empty()) return out;
        return std::nullopt;
    }
    return std::nullopt;
}

std::optional<double> Value::as_real() const {
    if (const auto* d = std::get_if<double>(&v_)) return *d;
    if (const auto* i = std::get_if<std::int64_t>(&v_))
        return static_cast<double>(*i);
    if (const auto* s = std::get_if<std::string>(&v_)) {
        if (s->empty()) return std::nullopt;
        char* end = nullptr;
        const std::string tmp = *s;  // strtod needs a terminated buffer
        double out = std::strtod(tmp.c_str(), &end);
        if (end == tmp.c_str() + tmp.size()) return out;
        return std::nullopt;
    }
    return std::nullopt;
}

std::optional<std::string> Value::as_text() const {
    if (const auto* s = std::get_if<std::string>(&v_)) return *s;
    if (!is_null()) return to_display();
    return std::nullopt;
}

const std::vector<std::uint8_t>* Value::as_blob() const {
    return std::get_if<std::vector<std::uint8_t>>(&v_);
}

std::string format_double(double v) {
    std::array<char, 64> buf{};
    auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    if (ec != std::errc{}) return "0";
    return std::string(buf.data(), ptr);
}

std::string Value::to_display() const {
    switch (type()) {
    case Type::Null: return "";
    case Type::Integer: return std::to_string(*std::get_if<std::int64_t>(&v_));
    case Type::Real: return format_double(*std::get_if<double>(&v_));
    case Type::Text: return *std::get_if<std::string>(&v_);
    case Type::Blob: {
        static const char* hex = "0123456789abcdef";
        const auto& b = *std::get_if<std::vector<std::uint8_t>>(&v_);
        std::string out;
        out.reserve(b.size() * 2);
        for (std::uint8_t byte : b) {
            out.push_back(hex[byte >> 4]);
            out.push_back(hex[byte & 0xF]);
        }
        return out;
    }
    }
    return "";
}

bool RawRow::has(std::string_view column) const {
    if (!columns) return false;
    return std::find(columns->begin(), columns->end(), column) != columns->end();
}

const Value& RawRow::get(std::string_view column) const {
    static const Value null_value;
    if (!columns) return null_value;
    for (std::size_t i = 0; i < columns->size() && i < values.size(); ++i) {
        if ((*columns)[i] == column) return values[i];
    }
    return null_value;
}

} // namespace mhf
