#pragma once

#include <cctype>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "provkit/errors.hpp"
#include "provkit/value.hpp"

namespace provkit {

inline bool is_identifier(std::string_view s) {
    if (s.empty()) return false;
    if (!std::isalpha(static_cast<unsigned char>(s[0])) && s[0] != '_') return false;
    for (char c : s)
        if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_') return false;
    return true;
}

struct Attribute {
    std::string name;
    AttributeType type;

    bool operator==(const Attribute&) const = default;
};

/// Ordered attribute list of a named relation.
struct Schema {
    std::string relation_name;
    std::vector<Attribute> attributes;

    Schema() = default;
    Schema(std::string name, std::vector<Attribute> attrs)
        : relation_name(std::move(name)), attributes(std::move(attrs)) {}

    bool operator==(const Schema&) const = default;

    std::optional<size_t> find(std::string_view attribute) const {
        for (size_t i = 0; i < attributes.size(); ++i)
            if (attributes[i].name == attribute) return i;
        return std::nullopt;
    }

    bool has(std::string_view attribute) const { return find(attribute).has_value(); }

    /// Checks identifier validity, non-emptiness and attribute-name uniqueness.
    void validate() const {
        if (!is_identifier(relation_name))
            throw UserError("invalid relation name '" + relation_name + "'");
        if (attributes.empty())
            throw UserError("empty schema: relation '" + relation_name + "' has no attributes");
        for (size_t i = 0; i < attributes.size(); ++i) {
            if (!is_identifier(attributes[i].name))
                throw UserError("invalid attribute name '" + attributes[i].name + "'");
            for (size_t j = i + 1; j < attributes.size(); ++j)
                if (attributes[i].name == attributes[j].name)
                    throw UserError("duplicate attribute '" + attributes[i].name + "' in relation '" +
                                    relation_name + "'");
        }
    }
};

/// Parses the CLI schema syntax "name:type,name:type,...". Commas inside
/// decimal(p,s) do not split entries.
inline Schema parse_schema(std::string relation_name, std::string_view spec) {
    std::vector<Attribute> attrs;
    size_t start = 0;
    int depth = 0;
    auto flush = [&](size_t end) {
        std::string_view entry = spec.substr(start, end - start);
        auto colon = entry.find(':');
        if (colon == std::string_view::npos)
            throw UserError("bad schema entry '" + std::string(entry) + "': expected name:type");
        attrs.push_back({std::string(entry.substr(0, colon)), AttributeType::parse(entry.substr(colon + 1))});
    };
    for (size_t i = 0; i < spec.size(); ++i) {
        char c = spec[i];
        if (c == '(') ++depth;
        else if (c == ')') --depth;
        else if (c == ',' && depth == 0) {
            flush(i);
            start = i + 1;
        }
    }
    if (start < spec.size()) flush(spec.size());
    else if (spec.empty()) throw UserError("empty schema: relation '" + relation_name + "' has no attributes");
    Schema schema(std::move(relation_name), std::move(attrs));
    schema.validate();
    return schema;
}

} // namespace provkit
