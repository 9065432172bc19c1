#pragma once

#include <cctype>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <variant>

#include "provkit/errors.hpp"

namespace provkit {

enum class TypeKind { Integer, Decimal, Text, Boolean };

/// Declared type of a relation attribute. Decimals carry (precision, scale):
/// precision is the maximum number of significant digits (at most 18 so the
/// unscaled value always fits an int64), scale the number of fraction digits.
struct AttributeType {
    TypeKind kind = TypeKind::Integer;
    int precision = 0; // decimal only
    int scale = 0;     // decimal only

    static AttributeType integer() { return {TypeKind::Integer, 0, 0}; }
    static AttributeType text() { return {TypeKind::Text, 0, 0}; }
    static AttributeType boolean() { return {TypeKind::Boolean, 0, 0}; }

    static AttributeType decimal(int precision, int scale) {
        if (precision < 1 || precision > 18 || scale < 0 || scale > precision)
            throw UserError("bad decimal spec: decimal(" + std::to_string(precision) + "," +
                            std::to_string(scale) + ") requires 1 <= precision <= 18 and 0 <= scale <= precision");
        return {TypeKind::Decimal, precision, scale};
    }

    bool operator==(const AttributeType&) const = default;

    std::string to_string() const {
        switch (kind) {
            case TypeKind::Integer: return "int";
            case TypeKind::Text: return "text";
            case TypeKind::Boolean: return "bool";
            case TypeKind::Decimal:
                return "decimal(" + std::to_string(precision) + "," + std::to_string(scale) + ")";
        }
        return "?";
    }

    /// Parses "int", "decimal(p,s)", "text", "bool" (aliases: "integer", "boolean").
    static AttributeType parse(std::string_view text) {
        if (text == "int" || text == "integer") return integer();
        if (text == "text") return AttributeType::text();
        if (text == "bool" || text == "boolean") return boolean();
        if (text.starts_with("decimal(") && text.ends_with(")")) {
            std::string_view body = text.substr(8, text.size() - 9);
            auto comma = body.find(',');
            if (comma != std::string_view::npos) {
                auto to_int = [](std::string_view s) -> std::optional<int> {
                    if (s.empty() || s.size() > 2) return std::nullopt;
                    int v = 0;
                    for (char c : s) {
                        if (!std::isdigit(static_cast<unsigned char>(c))) return std::nullopt;
                        v = v * 10 + (c - '0');
                    }
                    return v;
                };
                auto p = to_int(body.substr(0, comma));
                auto s = to_int(body.substr(comma + 1));
                if (p && s) return decimal(*p, *s);
            }
        }
        throw UserError("unknown attribute type '" + std::string(text) + "'");
    }
};

namespace detail {

inline int64_t pow10_i64(int n) {
    int64_t v = 1;
    for (int i = 0; i < n; ++i) v *= 10;
    return v;
}

} // namespace detail

/// A typed scalar. Decimals are stored as exact scaled integers (the unscaled
/// value together with the scale from the attribute type), so comparisons and
/// renderings never go through floating point.
class Value {
public:
    Value() = default;

    static Value integer(int64_t v) {
        Value r;
        r.type_ = AttributeType::integer();
        r.num_ = v;
        return r;
    }

    static Value boolean(bool v) {
        Value r;
        r.type_ = AttributeType::boolean();
        r.num_ = v ? 1 : 0;
        return r;
    }

    static Value text(std::string v) {
        Value r;
        r.type_ = AttributeType::text();
        r.text_ = std::move(v);
        return r;
    }

    static Value decimal(int64_t unscaled, int precision, int scale) {
        Value r;
        r.type_ = AttributeType::decimal(precision, scale);
        if (!fits(unscaled, precision))
            throw DataError("decimal value out of range for " + r.type_.to_string());
        r.num_ = unscaled;
        return r;
    }

    /// Parses `text` as a value of the given type. Decimal parsing is exact:
    /// the fraction must not exceed the declared scale and the unscaled value
    /// must fit the declared precision.
    static Value parse(const AttributeType& type, std::string_view text) {
        switch (type.kind) {
            case TypeKind::Text: return Value::text(std::string(text));
            case TypeKind::Boolean:
                if (text == "true") return boolean(true);
                if (text == "false") return boolean(false);
                throw DataError("cannot parse '" + std::string(text) + "' as bool");
            case TypeKind::Integer: {
                auto parsed = parse_integer(text);
                if (!parsed) throw DataError("cannot parse '" + std::string(text) + "' as int");
                return integer(*parsed);
            }
            case TypeKind::Decimal: {
                auto parsed = parse_decimal(text, type.scale);
                if (!parsed)
                    throw DataError("cannot parse '" + std::string(text) + "' as " + type.to_string());
                if (!fits(*parsed, type.precision))
                    throw DataError("value '" + std::string(text) + "' out of range for " + type.to_string());
                Value r;
                r.type_ = type;
                r.num_ = *parsed;
                return r;
            }
        }
        throw DataError("unknown type");
    }

    const AttributeType& type() const { return type_; }
    TypeKind kind() const { return type_.kind; }
    int64_t as_integer() const { return num_; }
    bool as_boolean() const { return num_ != 0; }
    const std::string& as_text() const { return text_; }
    int64_t unscaled() const { return num_; }

    bool is_numeric() const { return type_.kind == TypeKind::Integer || type_.kind == TypeKind::Decimal; }

    /// Three-way comparison. Numerics compare exactly against each other at a
    /// common scale (an int counts as a decimal of scale 0); text with text
    /// and bool with bool. Anything else is a type error.
    int compare(const Value& other) const {
        if (is_numeric() && other.is_numeric()) {
            // Rescale both sides to the larger scale; scales are at most 18,
            // so the products fit a 128-bit integer.
            int sa = type_.kind == TypeKind::Decimal ? type_.scale : 0;
            int sb = other.type_.kind == TypeKind::Decimal ? other.type_.scale : 0;
            int common = sa > sb ? sa : sb;
            __int128 a = static_cast<__int128>(num_) * detail::pow10_i64(common - sa);
            __int128 b = static_cast<__int128>(other.num_) * detail::pow10_i64(common - sb);
            return a < b ? -1 : (a > b ? 1 : 0);
        }
        if (type_.kind == TypeKind::Text && other.type_.kind == TypeKind::Text)
            return text_ < other.text_ ? -1 : (text_ > other.text_ ? 1 : 0);
        if (type_.kind == TypeKind::Boolean && other.type_.kind == TypeKind::Boolean)
            return num_ < other.num_ ? -1 : (num_ > other.num_ ? 1 : 0);
        throw DataError("type mismatch: cannot compare " + type_.to_string() + " with " +
                        other.type_.to_string());
    }

    bool equals(const Value& other) const { return compare(other) == 0; }

    std::string to_string() const {
        switch (type_.kind) {
            case TypeKind::Integer: return std::to_string(num_);
            case TypeKind::Boolean: return num_ ? "true" : "false";
            case TypeKind::Text: return text_;
            case TypeKind::Decimal: {
                int64_t v = num_;
                bool neg = v < 0;
                if (neg) v = -v;
                int64_t unit = detail::pow10_i64(type_.scale);
                std::string whole = std::to_string(v / unit);
                std::string out = neg ? "-" + whole : whole;
                if (type_.scale > 0) {
                    std::string frac = std::to_string(v % unit);
                    out += "." + std::string(type_.scale - frac.size(), '0') + frac;
                }
                return out;
            }
        }
        return "?";
    }

private:
    static bool fits(int64_t unscaled, int precision) {
        int64_t limit = detail::pow10_i64(precision);
        return unscaled > -limit && unscaled < limit;
    }

    static std::optional<int64_t> parse_integer(std::string_view text) {
        if (text.empty()) return std::nullopt;
        size_t i = text[0] == '-' ? 1 : 0;
        if (i == text.size()) return std::nullopt;
        int64_t v = 0;
        for (; i < text.size(); ++i) {
            if (!std::isdigit(static_cast<unsigned char>(text[i]))) return std::nullopt;
            int d = text[i] - '0';
            if (v > (INT64_MAX - d) / 10) return std::nullopt;
            v = v * 10 + d;
        }
        return text[0] == '-' ? -v : v;
    }

    static std::optional<int64_t> parse_decimal(std::string_view text, int scale) {
        if (text.empty()) return std::nullopt;
        bool neg = text[0] == '-';
        size_t i = neg ? 1 : 0;
        std::string digits;
        while (i < text.size() && std::isdigit(static_cast<unsigned char>(text[i])))
            digits += text[i++];
        if (digits.empty()) return std::nullopt;
        std::string frac;
        if (i < text.size() && text[i] == '.') {
            ++i;
            while (i < text.size() && std::isdigit(static_cast<unsigned char>(text[i])))
                frac += text[i++];
            if (frac.empty()) return std::nullopt;
        }
        if (i != text.size()) return std::nullopt;
        // No silent rounding: more fraction digits than the scale is an error.
        if (static_cast<int>(frac.size()) > scale) return std::nullopt;
        frac += std::string(scale - frac.size(), '0');
        std::string all = digits + frac;
        if (all.size() > 18) return std::nullopt;
        int64_t v = 0;
        for (char c : all) v = v * 10 + (c - '0');
        return neg ? -v : v;
    }

    AttributeType type_ = AttributeType::integer();
    int64_t num_ = 0;   // integer value, bool as 0/1, or decimal unscaled value
    std::string text_;  // text payload
};

/// Strict-weak order used to keep result rows deterministic.
struct ValueLess {
    bool operator()(const Value& a, const Value& b) const { return a.compare(b) < 0; }
};

} // namespace provkit
