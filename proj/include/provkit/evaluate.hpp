#pragma once

#include <algorithm>
#include <map>
#include <memory>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "provkit/algebra.hpp"
#include "provkit/database.hpp"
#include "provkit/errors.hpp"
#include "provkit/polynomial.hpp"
#include "provkit/schema.hpp"
#include "provkit/value.hpp"

namespace provkit {

/// One source cell a result value was copied from: where-provenance.
struct WhereCell {
    std::string relation;
    ProvenanceId tuple;
    std::string attribute;

    bool operator==(const WhereCell&) const = default;
    bool operator<(const WhereCell& other) const {
        if (relation != other.relation) return relation < other.relation;
        if (tuple != other.tuple) return tuple < other.tuple;
        return attribute < other.attribute;
    }

    std::string to_string() const {
        return relation + "." + tuple.to_string() + "." + attribute;
    }
};

/// Origin of an output attribute: its type and the scanned relations it can
/// come from. This answers "what is this result made of" at the schema level.
struct AttributeOrigin {
    AttributeType type;
    std::set<std::string> relations;

    bool operator==(const AttributeOrigin&) const = default;
};

struct ResultRow {
    std::vector<Value> values;
    Polynomial annotation;
    // Per output attribute, the source cells the value was copied from.
    std::map<std::string, std::set<WhereCell>> where;
};

/// Annotated query result: rows in value order, each carrying its provenance
/// polynomial and where-provenance, plus per-attribute origin info.
struct AnnotatedResult {
    std::vector<Attribute> attributes;
    std::vector<ResultRow> rows;
    std::map<std::string, AttributeOrigin> origins;

    std::optional<size_t> attribute_index(std::string_view name) const {
        for (size_t i = 0; i < attributes.size(); ++i)
            if (attributes[i].name == name) return i;
        return std::nullopt;
    }

    /// Rows whose values match all given (attribute, value) pairs.
    std::vector<size_t> rows_matching(const std::vector<std::pair<std::string, Value>>& expected) const {
        std::vector<size_t> out;
        for (size_t r = 0; r < rows.size(); ++r) {
            bool all = true;
            for (const auto& [name, value] : expected) {
                auto idx = attribute_index(name);
                if (!idx || rows[r].values[*idx].compare(value) != 0) {
                    all = false;
                    break;
                }
            }
            if (all) out.push_back(r);
        }
        return out;
    }
};

namespace detail {

struct RowLess {
    bool operator()(const std::vector<Value>& a, const std::vector<Value>& b) const {
        size_t n = std::min(a.size(), b.size());
        for (size_t i = 0; i < n; ++i) {
            int c = a[i].compare(b[i]);
            if (c != 0) return c < 0;
        }
        return a.size() < b.size();
    }
};

struct RowInfo {
    Polynomial annotation;
    std::map<std::string, std::set<WhereCell>> where;
};

struct Table {
    std::vector<Attribute> attributes;
    std::map<std::vector<Value>, RowInfo, RowLess> rows;
    std::map<std::string, AttributeOrigin> origins;

    std::optional<size_t> attribute_index(std::string_view name) const {
        for (size_t i = 0; i < attributes.size(); ++i)
            if (attributes[i].name == name) return i;
        return std::nullopt;
    }

    /// Adds a row, merging by value: annotations add, where-cells union.
    void absorb(std::vector<Value> values, RowInfo info) {
        auto it = rows.find(values);
        if (it == rows.end()) {
            rows.emplace(std::move(values), std::move(info));
            return;
        }
        it->second.annotation = it->second.annotation + info.annotation;
        for (auto& [attr, cells] : info.where)
            it->second.where[attr].insert(cells.begin(), cells.end());
    }
};

} // namespace detail

/// Evaluates an algebra expression against a snapshot under set semantics
/// with provenance annotations: every base tuple is annotated with its own
/// id variable; joins multiply annotations, projections and unions add them.
class Evaluator {
public:
    explicit Evaluator(const Snapshot& snapshot) : snapshot_(snapshot) {}

    AnnotatedResult evaluate(const AlgebraExpr& expr) const {
        detail::Table table = eval(expr);
        AnnotatedResult result;
        result.attributes = std::move(table.attributes);
        result.origins = std::move(table.origins);
        for (auto& [values, info] : table.rows)
            result.rows.push_back({values, std::move(info.annotation), std::move(info.where)});
        return result;
    }

private:
    const Snapshot& snapshot_;

    detail::Table eval(const AlgebraExpr& expr) const {
        switch (expr.kind) {
            case AlgebraExpr::Kind::Scan: return eval_scan(expr);
            case AlgebraExpr::Kind::Select: return eval_select(expr);
            case AlgebraExpr::Kind::NaturalJoin: return eval_join(expr);
            case AlgebraExpr::Kind::Project: return eval_project(expr);
            case AlgebraExpr::Kind::Union: return eval_union(expr);
        }
        throw DataError("unknown algebra node");
    }

    detail::Table eval_scan(const AlgebraExpr& expr) const {
        const SnapshotRelation& rel = snapshot_.relation(expr.relation);
        detail::Table table;
        table.attributes = rel.schema.attributes;
        for (const auto& attr : rel.schema.attributes)
            table.origins.emplace(attr.name, AttributeOrigin{attr.type, {expr.relation}});
        for (const auto& [id, values] : rel.tuples) {
            detail::RowInfo info;
            info.annotation = Polynomial::variable(id);
            for (size_t i = 0; i < values.size(); ++i)
                info.where[rel.schema.attributes[i].name].insert(
                    WhereCell{expr.relation, id, rel.schema.attributes[i].name});
            table.absorb(values, std::move(info));
        }
        return table;
    }

    detail::Table eval_select(const AlgebraExpr& expr) const {
        detail::Table input = eval(*expr.left);
        std::vector<std::string> used;
        expr.predicate->collect_attributes(used);
        for (const auto& name : used)
            if (!input.attribute_index(name))
                throw DataError("unknown attribute '" + name + "' in predicate");

        detail::Table table;
        table.attributes = input.attributes;
        table.origins = input.origins;
        for (auto& [values, info] : input.rows) {
            TupleBinding binding;
            for (size_t i = 0; i < values.size(); ++i)
                binding.emplace(input.attributes[i].name, values[i]);
            if (expr.predicate->evaluate(binding)) table.absorb(values, std::move(info));
        }
        return table;
    }

    detail::Table eval_join(const AlgebraExpr& expr) const {
        detail::Table left = eval(*expr.left);
        detail::Table right = eval(*expr.right);

        // Shared attributes, in left order; they must agree on type.
        std::vector<std::pair<size_t, size_t>> shared; // (left index, right index)
        for (size_t i = 0; i < left.attributes.size(); ++i) {
            auto j = right.attribute_index(left.attributes[i].name);
            if (!j) continue;
            if (left.attributes[i].type != right.attributes[*j].type)
                throw DataError("type mismatch on shared attribute '" + left.attributes[i].name +
                                "': " + left.attributes[i].type.to_string() + " vs " +
                                right.attributes[*j].type.to_string());
            shared.emplace_back(i, *j);
        }
        if (shared.empty()) throw DataError("natural join has no shared attributes");

        std::vector<size_t> right_only;
        for (size_t j = 0; j < right.attributes.size(); ++j) {
            if (!left.attribute_index(right.attributes[j].name)) right_only.push_back(j);
        }

        detail::Table table;
        table.attributes = left.attributes;
        for (size_t j : right_only) table.attributes.push_back(right.attributes[j]);
        table.origins = left.origins;
        for (const auto& [name, origin] : right.origins) {
            auto it = table.origins.find(name);
            if (it == table.origins.end())
                table.origins.emplace(name, origin);
            else
                it->second.relations.insert(origin.relations.begin(), origin.relations.end());
        }

        for (const auto& [lvalues, linfo] : left.rows) {
            for (const auto& [rvalues, rinfo] : right.rows) {
                bool match = true;
                for (const auto& [li, ri] : shared) {
                    if (lvalues[li].compare(rvalues[ri]) != 0) {
                        match = false;
                        break;
                    }
                }
                if (!match) continue;
                std::vector<Value> values = lvalues;
                for (size_t j : right_only) values.push_back(rvalues[j]);
                detail::RowInfo info;
                info.annotation = linfo.annotation * rinfo.annotation;
                info.where = linfo.where;
                for (size_t j : right_only) {
                    const std::string& name = right.attributes[j].name;
                    auto it = rinfo.where.find(name);
                    if (it != rinfo.where.end()) info.where[name] = it->second;
                }
                // A shared value sits in both inputs, so both cells count.
                for (const auto& [li, ri] : shared) {
                    const std::string& name = left.attributes[li].name;
                    auto it = rinfo.where.find(name);
                    if (it != rinfo.where.end())
                        info.where[name].insert(it->second.begin(), it->second.end());
                }
                table.absorb(std::move(values), std::move(info));
            }
        }
        return table;
    }

    detail::Table eval_project(const AlgebraExpr& expr) const {
        detail::Table input = eval(*expr.left);
        if (expr.project_all) return input;

        std::vector<size_t> indices;
        std::set<std::string> seen;
        for (const auto& name : expr.attributes) {
            auto idx = input.attribute_index(name);
            if (!idx) throw DataError("unknown attribute '" + name + "' in projection");
            if (!seen.insert(name).second)
                throw DataError("duplicate attribute '" + name + "' in projection");
            indices.push_back(*idx);
        }

        detail::Table table;
        for (size_t i : indices) table.attributes.push_back(input.attributes[i]);
        for (const auto& attr : table.attributes) table.origins.emplace(attr.name, input.origins.at(attr.name));
        for (auto& [values, info] : input.rows) {
            std::vector<Value> projected;
            projected.reserve(indices.size());
            for (size_t i : indices) projected.push_back(values[i]);
            detail::RowInfo out;
            out.annotation = std::move(info.annotation);
            for (const auto& attr : table.attributes) {
                auto it = info.where.find(attr.name);
                if (it != info.where.end()) out.where.emplace(attr.name, it->second);
            }
            table.absorb(std::move(projected), std::move(out));
        }
        return table;
    }

    detail::Table eval_union(const AlgebraExpr& expr) const {
        detail::Table left = eval(*expr.left);
        detail::Table right = eval(*expr.right);
        if (left.attributes.size() != right.attributes.size())
            throw DataError("union inputs have different schemas");
        for (size_t i = 0; i < left.attributes.size(); ++i)
            if (left.attributes[i].name != right.attributes[i].name ||
                left.attributes[i].type != right.attributes[i].type)
                throw DataError("union inputs have different schemas");

        detail::Table table = std::move(left);
        for (const auto& [name, origin] : right.origins) {
            auto& mine = table.origins.at(name);
            mine.relations.insert(origin.relations.begin(), origin.relations.end());
        }
        for (auto& [values, info] : right.rows) table.absorb(values, std::move(info));
        return table;
    }
};

inline AnnotatedResult evaluate(const Snapshot& snapshot, const AlgebraExpr& expr) {
    return Evaluator(snapshot).evaluate(expr);
}

inline AnnotatedResult evaluate(const Snapshot& snapshot,
                                const std::shared_ptr<const AlgebraExpr>& expr) {
    return Evaluator(snapshot).evaluate(*expr);
}

} // namespace provkit
