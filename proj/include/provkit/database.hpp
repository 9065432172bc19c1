#pragma once

#include <cctype>
#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "provkit/errors.hpp"
#include "provkit/provenance_id.hpp"
#include "provkit/schema.hpp"
#include "provkit/value.hpp"

namespace provkit {

/// One stored tuple version. The id base stays fixed across updates; the
/// version records the database version at which this revision appeared.
struct StoredTuple {
    std::string base;
    uint64_t version = 0;
    std::vector<Value> values;
};

struct SnapshotRelation {
    Schema schema;
    // Tuples visible at the snapshot's timestamp, with ids resolved: the
    // version is carried only for bases that have more than one revision in
    // the full history (or when the database stamps everything).
    std::vector<std::pair<ProvenanceId, std::vector<Value>>> tuples;
};

/// Immutable point-in-time state of a database. Snapshots are plain values
/// and can be shared across threads freely.
class Snapshot {
public:
    Snapshot() = default;
    Snapshot(uint64_t at_version, std::map<std::string, SnapshotRelation> relations)
        : at_version_(at_version), relations_(std::move(relations)) {}

    uint64_t at_version() const { return at_version_; }
    const std::map<std::string, SnapshotRelation>& relations() const { return relations_; }

    bool has_relation(const std::string& name) const { return relations_.count(name) > 0; }

    const SnapshotRelation& relation(const std::string& name) const {
        auto it = relations_.find(name);
        if (it == relations_.end()) throw DataError("unknown relation '" + name + "'");
        return it->second;
    }

    /// Restricts the snapshot to tuples whose rendered id is in `ids`.
    /// Used for witness checks and why-not explanations.
    Snapshot restricted_to(const std::set<std::string>& ids) const {
        std::map<std::string, SnapshotRelation> rels;
        for (const auto& [name, rel] : relations_) {
            SnapshotRelation restricted;
            restricted.schema = rel.schema;
            for (const auto& tuple : rel.tuples)
                if (ids.count(tuple.first.to_string())) restricted.tuples.push_back(tuple);
            rels.emplace(name, std::move(restricted));
        }
        return Snapshot(at_version_, std::move(rels));
    }

private:
    uint64_t at_version_ = 0;
    std::map<std::string, SnapshotRelation> relations_;
};

/// Versioned relational storage. Inserts stamp tuples with the current
/// database version; updates bump the version and append a new revision under
/// the same id base, so every earlier state stays reachable via snapshot_at.
/// A fresh database is at version 1, making the first revisions t1.
///
/// Mutations require exclusive access; snapshots are safe to share.
class VersionedDatabase {
public:
    explicit VersionedDatabase(bool always_version_ids = false)
        : always_version_ids_(always_version_ids) {}

    uint64_t current_version() const { return current_version_; }

    void define_relation(Schema schema) {
        schema.validate();
        if (relations_.count(schema.relation_name))
            throw UserError("duplicate relation '" + schema.relation_name + "'");
        RelationState state;
        state.id_prefix = claim_prefix(schema.relation_name);
        state.schema = std::move(schema);
        order_.push_back(state.schema.relation_name);
        relations_.emplace(state.schema.relation_name, std::move(state));
    }

    bool has_relation(const std::string& name) const { return relations_.count(name) > 0; }

    const Schema& schema(const std::string& relation) const { return state(relation).schema; }

    /// Relation names in definition order.
    const std::vector<std::string>& relation_names() const { return order_; }

    /// Rendered ids of every revision ever stored in the relation, in
    /// insertion order — the universe of registrable fine-grained ids.
    std::vector<std::string> tuple_ids(const std::string& relation) const {
        const RelationState& rel = state(relation);
        std::vector<std::string> out;
        out.reserve(rel.tuples.size());
        for (const auto& tuple : rel.tuples)
            out.push_back(resolved_id(rel, tuple.base, tuple.version).to_string());
        return out;
    }

    ProvenanceId insert(const std::string& relation, std::vector<Value> values) {
        RelationState& rel = state(relation);
        check_values(rel.schema, values);
        StoredTuple tuple;
        tuple.base = rel.id_prefix + std::to_string(++rel.id_counter);
        tuple.version = current_version_;
        tuple.values = std::move(values);
        std::string base = tuple.base;
        rel.tuples.push_back(std::move(tuple));
        return resolved_id(rel, base, current_version_);
    }

    /// Appends a new revision of the tuple with this base; the prior revision
    /// stays reachable through snapshots of earlier versions.
    ProvenanceId update(const std::string& relation, const std::string& base,
                        std::vector<Value> values) {
        RelationState& rel = state(relation);
        check_values(rel.schema, values);
        if (rel.revision_count(base) == 0)
            throw DataError("unknown tuple base '" + base + "' in relation '" + relation + "'");
        ++current_version_;
        StoredTuple tuple;
        tuple.base = base;
        tuple.version = current_version_;
        tuple.values = std::move(values);
        rel.tuples.push_back(std::move(tuple));
        return resolved_id(rel, base, current_version_);
    }

    Snapshot snapshot_at(uint64_t t) const {
        if (t > current_version_)
            throw DataError("timestamp " + std::to_string(t) + " out of range (current version is " +
                            std::to_string(current_version_) + ")");
        std::map<std::string, SnapshotRelation> rels;
        for (const auto& name : order_) {
            const RelationState& rel = relations_.at(name);
            SnapshotRelation out;
            out.schema = rel.schema;
            // Latest revision per base with version <= t, in first-insert order.
            std::vector<std::string> base_order;
            std::map<std::string, const StoredTuple*> latest;
            for (const auto& tuple : rel.tuples) {
                if (tuple.version > t) continue;
                auto it = latest.find(tuple.base);
                if (it == latest.end()) {
                    base_order.push_back(tuple.base);
                    latest.emplace(tuple.base, &tuple);
                } else if (tuple.version > it->second->version) {
                    it->second = &tuple;
                }
            }
            for (const auto& base : base_order) {
                const StoredTuple* tuple = latest.at(base);
                out.tuples.emplace_back(resolved_id(rel, base, tuple->version), tuple->values);
            }
            rels.emplace(name, std::move(out));
        }
        return Snapshot(t, std::move(rels));
    }

    /// The live state; tuple for tuple equal to snapshot_at(current_version).
    Snapshot snapshot() const { return snapshot_at(current_version_); }

    nlohmann::ordered_json to_json() const {
        nlohmann::ordered_json doc;
        doc["current_version"] = current_version_;
        doc["versioned_mode"] = always_version_ids_;
        doc["relations"] = nlohmann::ordered_json::array();
        for (const auto& name : order_) {
            const RelationState& rel = relations_.at(name);
            nlohmann::ordered_json r;
            r["name"] = name;
            r["id_prefix"] = rel.id_prefix;
            r["id_counter"] = rel.id_counter;
            r["schema"] = nlohmann::ordered_json::array();
            for (const auto& attr : rel.schema.attributes)
                r["schema"].push_back({{"name", attr.name}, {"type", attr.type.to_string()}});
            r["tuples"] = nlohmann::ordered_json::array();
            for (const auto& tuple : rel.tuples) {
                nlohmann::ordered_json t;
                t["base"] = tuple.base;
                t["version"] = tuple.version;
                t["values"] = nlohmann::ordered_json::array();
                for (size_t i = 0; i < tuple.values.size(); ++i)
                    t["values"].push_back(value_to_json(tuple.values[i]));
                r["tuples"].push_back(std::move(t));
            }
            doc["relations"].push_back(std::move(r));
        }
        return doc;
    }

    static VersionedDatabase from_json(const nlohmann::json& doc) {
        try {
            VersionedDatabase db(doc.at("versioned_mode").get<bool>());
            db.current_version_ = doc.at("current_version").get<uint64_t>();
            for (const auto& r : doc.at("relations")) {
                RelationState rel;
                std::string name = r.at("name").get<std::string>();
                std::vector<Attribute> attrs;
                for (const auto& a : r.at("schema"))
                    attrs.push_back({a.at("name").get<std::string>(),
                                     AttributeType::parse(a.at("type").get<std::string>())});
                rel.schema = Schema(name, std::move(attrs));
                rel.schema.validate();
                rel.id_prefix = r.at("id_prefix").get<std::string>();
                rel.id_counter = r.at("id_counter").get<uint64_t>();
                for (const auto& t : r.at("tuples")) {
                    StoredTuple tuple;
                    tuple.base = t.at("base").get<std::string>();
                    tuple.version = t.at("version").get<uint64_t>();
                    const auto& values = t.at("values");
                    for (size_t i = 0; i < values.size(); ++i) {
                        if (i >= rel.schema.attributes.size()) break;
                        tuple.values.push_back(
                            value_from_json(rel.schema.attributes[i].type, values.at(i)));
                    }
                    check_values(rel.schema, tuple.values);
                    if (tuple.version > db.current_version_)
                        throw UserError("tuple version exceeds database version");
                    rel.tuples.push_back(std::move(tuple));
                }
                db.order_.push_back(name);
                db.relations_.emplace(name, std::move(rel));
            }
            return db;
        } catch (const nlohmann::json::exception& e) {
            throw UserError(std::string("malformed database document: ") + e.what());
        }
    }

    static nlohmann::ordered_json value_to_json(const Value& v) {
        switch (v.kind()) {
            case TypeKind::Integer: return v.as_integer();
            case TypeKind::Boolean: return v.as_boolean();
            case TypeKind::Text: return v.as_text();
            case TypeKind::Decimal: return v.to_string(); // exact, so kept as a string
        }
        return nullptr;
    }

    static Value value_from_json(const AttributeType& type, const nlohmann::json& j) {
        switch (type.kind) {
            case TypeKind::Integer:
                if (!j.is_number_integer()) throw UserError("expected integer value");
                return Value::integer(j.get<int64_t>());
            case TypeKind::Boolean:
                if (!j.is_boolean()) throw UserError("expected boolean value");
                return Value::boolean(j.get<bool>());
            case TypeKind::Text:
                if (!j.is_string()) throw UserError("expected text value");
                return Value::text(j.get<std::string>());
            case TypeKind::Decimal:
                if (!j.is_string()) throw UserError("expected decimal value as string");
                return Value::parse(type, j.get<std::string>());
        }
        throw UserError("unknown type");
    }

private:
    struct RelationState {
        Schema schema;
        std::string id_prefix;
        uint64_t id_counter = 0;
        std::vector<StoredTuple> tuples;

        size_t revision_count(const std::string& base) const {
            size_t n = 0;
            for (const auto& t : tuples)
                if (t.base == base) ++n;
            return n;
        }
    };

    RelationState& state(const std::string& relation) {
        auto it = relations_.find(relation);
        if (it == relations_.end()) throw DataError("unknown relation '" + relation + "'");
        return it->second;
    }

    const RelationState& state(const std::string& relation) const {
        return const_cast<VersionedDatabase*>(this)->state(relation);
    }

    static void check_values(const Schema& schema, const std::vector<Value>& values) {
        if (values.size() != schema.attributes.size())
            throw DataError("relation '" + schema.relation_name + "' expects " +
                            std::to_string(schema.attributes.size()) + " values, got " +
                            std::to_string(values.size()));
        for (size_t i = 0; i < values.size(); ++i)
            if (values[i].type() != schema.attributes[i].type)
                throw DataError("type mismatch for attribute '" + schema.attributes[i].name +
                                "': expected " + schema.attributes[i].type.to_string() + ", got " +
                                values[i].type().to_string());
    }

    // Id prefix is the lowercase first letter of the relation name; when that
    // letter is already claimed by another relation, fall back to the
    // unambiguous "rel_<Name>_" form.
    std::string claim_prefix(const std::string& relation_name) {
        std::string prefix(1, static_cast<char>(std::tolower(static_cast<unsigned char>(relation_name[0]))));
        auto it = prefix_owner_.find(prefix);
        if (it == prefix_owner_.end()) {
            prefix_owner_.emplace(prefix, relation_name);
            return prefix;
        }
        return "rel_" + relation_name + "_";
    }

    ProvenanceId resolved_id(const RelationState& rel, const std::string& base,
                             uint64_t version) const {
        if (always_version_ids_ || rel.revision_count(base) > 1) return ProvenanceId(base, version);
        return ProvenanceId(base);
    }

    bool always_version_ids_ = false;
    uint64_t current_version_ = 1;
    std::vector<std::string> order_;
    std::map<std::string, RelationState> relations_;
    std::map<std::string, std::string> prefix_owner_;
};

} // namespace provkit
