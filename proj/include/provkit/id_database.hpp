#pragma once

#include <algorithm>
#include <cctype>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "provkit/errors.hpp"
#include "provkit/polynomial.hpp"

namespace provkit {

/// One registered file: which relation's tuples it contains, which tuple ids,
/// its content fingerprint, and optionally the workflow entity that stands
/// for it in the provenance graph.
struct FileRecord {
    std::string file_id;  // provenance variable at file granularity, e.g. "f1"
    std::string path;
    std::string sha256;
    std::string relation;
    std::vector<std::string> tuple_ids; // rendered, sorted
    std::optional<std::string> workflow_entity;

    bool operator==(const FileRecord&) const = default;
};

/// Maps fine-grained tuple ids to the files they came from. This is what
/// connects tuple-level annotations to file-level workflow provenance:
/// renaming every tuple variable to its file variable turns a tuple
/// polynomial into a file polynomial.
class IdDatabase {
public:
    /// Registers a file. Passing an empty file_id picks the next free "f<n>".
    /// Every tuple id may belong to at most one file.
    std::string register_file(std::string file_id, std::string path, std::string sha256,
                              std::string relation, std::vector<std::string> tuple_ids,
                              std::optional<std::string> workflow_entity = std::nullopt) {
        if (file_id.empty()) file_id = "f" + std::to_string(next_auto_);
        if (records_.count(file_id)) throw UserError("file id '" + file_id + "' is already registered");
        if (tuple_ids.empty()) throw UserError("file '" + file_id + "' registers no tuple ids");
        std::sort(tuple_ids.begin(), tuple_ids.end());
        tuple_ids.erase(std::unique(tuple_ids.begin(), tuple_ids.end()), tuple_ids.end());
        for (const auto& id : tuple_ids) {
            auto it = owner_.find(id);
            if (it != owner_.end())
                throw UserError("tuple '" + id + "' is already registered to file '" + it->second + "'");
        }
        for (const auto& id : tuple_ids) owner_.emplace(id, file_id);
        bump_auto_counter(file_id);
        FileRecord record{file_id, std::move(path), std::move(sha256), std::move(relation),
                          std::move(tuple_ids), std::move(workflow_entity)};
        records_.emplace(file_id, std::move(record));
        return file_id;
    }

    bool has_record(const std::string& file_id) const { return records_.count(file_id) > 0; }

    const FileRecord& record(const std::string& file_id) const {
        auto it = records_.find(file_id);
        if (it == records_.end()) throw DataError("unknown file '" + file_id + "'");
        return it->second;
    }

    /// The file a tuple id belongs to, or nullptr when it was never registered.
    const FileRecord* resolve(const std::string& tuple_id) const {
        auto it = owner_.find(tuple_id);
        if (it == owner_.end()) return nullptr;
        return &records_.at(it->second);
    }

    /// All records, ordered by file id.
    std::vector<const FileRecord*> records() const {
        std::vector<const FileRecord*> out;
        out.reserve(records_.size());
        for (const auto& [id, record] : records_) out.push_back(&record);
        return out;
    }

    /// Records whose file stands for the given workflow entity.
    std::vector<const FileRecord*> records_for_entity(const std::string& entity_id) const {
        std::vector<const FileRecord*> out;
        for (const auto& [id, record] : records_)
            if (record.workflow_entity && *record.workflow_entity == entity_id) out.push_back(&record);
        return out;
    }

    /// Tuple variable -> file variable mapping covering the polynomial.
    std::map<ProvenanceId, ProvenanceId> lift_mapping(const Polynomial& poly) const {
        std::map<ProvenanceId, ProvenanceId> mapping;
        for (const auto& var : poly.variables()) {
            const FileRecord* rec = resolve(var.to_string());
            if (!rec)
                throw DataError("tuple '" + var.to_string() + "' is not registered in the id database");
            mapping.emplace(var, ProvenanceId(rec->file_id));
        }
        return mapping;
    }

    /// Rewrites a tuple-level polynomial to file granularity. Monomials that
    /// collapse to the same file product merge, so the coefficients count how
    /// many tuple-level derivations each file combination supports.
    Polynomial lift(const Polynomial& poly) const { return poly.rename(lift_mapping(poly)); }

    nlohmann::ordered_json to_json() const {
        nlohmann::ordered_json doc;
        doc["records"] = nlohmann::ordered_json::array();
        for (const auto& [id, record] : records_) {
            nlohmann::ordered_json r;
            r["file_id"] = record.file_id;
            r["path"] = record.path;
            r["sha256"] = record.sha256;
            r["relation"] = record.relation;
            r["tuple_ids"] = record.tuple_ids;
            if (record.workflow_entity) r["workflow_entity"] = *record.workflow_entity;
            doc["records"].push_back(std::move(r));
        }
        return doc;
    }

    static IdDatabase from_json(const nlohmann::json& doc) {
        IdDatabase db;
        try {
            for (const auto& r : doc.at("records")) {
                std::optional<std::string> entity;
                if (r.contains("workflow_entity")) entity = r.at("workflow_entity").get<std::string>();
                db.register_file(r.at("file_id").get<std::string>(), r.at("path").get<std::string>(),
                                 r.at("sha256").get<std::string>(), r.at("relation").get<std::string>(),
                                 r.at("tuple_ids").get<std::vector<std::string>>(), std::move(entity));
            }
        } catch (const nlohmann::json::exception& e) {
            throw UserError(std::string("malformed id database document: ") + e.what());
        }
        return db;
    }

private:
    void bump_auto_counter(const std::string& file_id) {
        if (file_id.size() < 2 || file_id[0] != 'f') return;
        uint64_t n = 0;
        for (size_t i = 1; i < file_id.size(); ++i) {
            if (!std::isdigit(static_cast<unsigned char>(file_id[i]))) return;
            n = n * 10 + static_cast<uint64_t>(file_id[i] - '0');
        }
        if (n + 1 > next_auto_) next_auto_ = n + 1;
    }

    std::map<std::string, FileRecord> records_; // by file id
    std::map<std::string, std::string> owner_;  // tuple id -> file id
    uint64_t next_auto_ = 1;
};

} // namespace provkit
