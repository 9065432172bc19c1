#pragma once

#include <cctype>
#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include "provkit/errors.hpp"

namespace provkit {

/// Identifier of a logical tuple, optionally carrying the logical timestamp
/// of one of its versions. An id renders as "r1" while the tuple has a single
/// version and as "r2@t1", "r2@t2", ... once it has been updated.
struct ProvenanceId {
    std::string base;
    std::optional<uint64_t> version;

    ProvenanceId() = default;
    explicit ProvenanceId(std::string base_, std::optional<uint64_t> version_ = std::nullopt)
        : base(std::move(base_)), version(version_) {}

    std::string to_string() const {
        if (version) return base + "@t" + std::to_string(*version);
        return base;
    }

    /// Parses the rendering produced by to_string.
    static ProvenanceId parse(std::string_view text) {
        auto at = text.find('@');
        if (at == std::string_view::npos) {
            if (!valid_base(text)) throw DataError("bad provenance id '" + std::string(text) + "'");
            return ProvenanceId(std::string(text));
        }
        std::string_view base = text.substr(0, at);
        std::string_view suffix = text.substr(at + 1);
        if (!valid_base(base) || suffix.size() < 2 || suffix[0] != 't')
            throw DataError("bad provenance id '" + std::string(text) + "'");
        uint64_t v = 0;
        for (size_t i = 1; i < suffix.size(); ++i) {
            if (!std::isdigit(static_cast<unsigned char>(suffix[i])))
                throw DataError("bad provenance id '" + std::string(text) + "'");
            v = v * 10 + static_cast<uint64_t>(suffix[i] - '0');
        }
        return ProvenanceId(std::string(base), v);
    }

    bool operator==(const ProvenanceId&) const = default;

    // Canonical order is the lexicographic order of the rendered form; the
    // polynomial rendering is defined in terms of it.
    std::strong_ordering operator<=>(const ProvenanceId& other) const {
        std::string a = to_string(), b = other.to_string();
        return a < b ? std::strong_ordering::less
                     : (a == b ? std::strong_ordering::equal : std::strong_ordering::greater);
    }

private:
    static bool valid_base(std::string_view s) {
        if (s.empty()) return false;
        if (!std::isalpha(static_cast<unsigned char>(s[0])) && s[0] != '_') return false;
        for (char c : s)
            if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_') return false;
        return true;
    }
};

} // namespace provkit
