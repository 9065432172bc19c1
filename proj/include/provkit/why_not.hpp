#pragma once

#include <algorithm>
#include <cctype>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include <json.hpp>

#include "provkit/algebra.hpp"
#include "provkit/database.hpp"
#include "provkit/errors.hpp"
#include "provkit/evaluate.hpp"
#include "provkit/polynomial.hpp"

namespace provkit {

/// A derivation that exists in the data but is rejected by a selection. The
/// blamed predicate is the first atomic comparison that came out false, with
/// the operand values it compared.
struct PickySelection {
    std::string predicate;             // e.g. "intensity_1 < intensity_2"
    std::vector<ProvenanceId> derivation;
    std::optional<Value> lhs;          // absent when the predicate has no comparison
    std::optional<Value> rhs;

    std::string to_string() const {
        std::string out = "PickySelection(predicate = " + predicate + ", derivation = {";
        for (size_t i = 0; i < derivation.size(); ++i) {
            if (i) out += ",";
            out += derivation[i].to_string();
        }
        out += "}";
        if (lhs && rhs) out += ", compared " + lhs->to_string() + " vs " + rhs->to_string();
        return out + ")";
    }
};

/// A source tuple carries an expected value but never joins with the other
/// relations, so no derivation reaches the result.
struct MissingJoinPartner {
    ProvenanceId tuple;
    std::string relation;
    std::vector<std::pair<std::string, Value>> join_values; // the values it would have to match

    std::string to_string() const {
        std::string out = "MissingJoinPartner(tuple = " + tuple.to_string() + ", relation = " +
                          relation;
        for (const auto& [attr, value] : join_values)
            out += ", " + attr + " = " + value.to_string();
        return out + ")";
    }
};

/// No source tuple supplies the expected value at all (also used as the
/// catch-all when every expected value exists and joins, but the combination
/// never co-occurs in one row).
struct AbsentSourceValue {
    std::string attribute;
    Value value;

    std::string to_string() const {
        return "AbsentSourceValue(attribute = " + attribute + ", value = " + value.to_string() + ")";
    }
};

struct WhyNotFinding {
    std::variant<PickySelection, MissingJoinPartner, AbsentSourceValue> detail;

    std::string to_string() const {
        return std::visit([](const auto& f) { return f.to_string(); }, detail);
    }

    nlohmann::ordered_json to_json() const {
        nlohmann::ordered_json j;
        if (const auto* ps = std::get_if<PickySelection>(&detail)) {
            j["type"] = "picky-selection";
            j["predicate"] = ps->predicate;
            j["derivation"] = nlohmann::ordered_json::array();
            for (const auto& id : ps->derivation) j["derivation"].push_back(id.to_string());
            if (ps->lhs) j["lhs"] = ps->lhs->to_string();
            if (ps->rhs) j["rhs"] = ps->rhs->to_string();
        } else if (const auto* mj = std::get_if<MissingJoinPartner>(&detail)) {
            j["type"] = "missing-join-partner";
            j["tuple"] = mj->tuple.to_string();
            j["relation"] = mj->relation;
            j["join_values"] = nlohmann::ordered_json::object();
            for (const auto& [attr, value] : mj->join_values) j["join_values"][attr] = value.to_string();
        } else {
            const auto& av = std::get<AbsentSourceValue>(detail);
            j["type"] = "absent-source-value";
            j["attribute"] = av.attribute;
            j["value"] = av.value.to_string();
        }
        return j;
    }
};

struct WhyNotReport {
    std::vector<WhyNotFinding> findings;

    nlohmann::ordered_json to_json() const {
        nlohmann::ordered_json j;
        j["findings"] = nlohmann::ordered_json::array();
        for (const auto& f : findings) j["findings"].push_back(f.to_json());
        return j;
    }
};

/// Parses "attr=value[,attr=value]*" into expectation pairs. Values follow
/// query literal rules: integers, decimals with the written scale,
/// single-quoted text, or true/false.
inline std::vector<std::pair<std::string, Value>> parse_expectation(const std::string& text) {
    std::vector<std::pair<std::string, Value>> pairs;
    size_t pos = 0;
    while (pos <= text.size()) {
        // Split on commas outside quotes.
        size_t end = pos;
        bool in_quote = false;
        while (end < text.size() && (in_quote || text[end] != ',')) {
            if (text[end] == '\'') in_quote = !in_quote;
            ++end;
        }
        std::string entry = text.substr(pos, end - pos);
        auto eq = entry.find('=');
        if (eq == std::string::npos)
            throw UserError("bad expectation '" + entry + "': expected attr=value");
        auto trim = [](std::string s) {
            size_t a = s.find_first_not_of(" \t");
            size_t b = s.find_last_not_of(" \t");
            return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
        };
        std::string attr = trim(entry.substr(0, eq));
        std::string raw = trim(entry.substr(eq + 1));
        if (attr.empty() || raw.empty())
            throw UserError("bad expectation '" + entry + "': expected attr=value");

        Value value;
        if (raw.front() == '\'' && raw.back() == '\'' && raw.size() >= 2) {
            value = Value::text(raw.substr(1, raw.size() - 2));
        } else if (raw == "true" || raw == "TRUE") {
            value = Value::boolean(true);
        } else if (raw == "false" || raw == "FALSE") {
            value = Value::boolean(false);
        } else {
            auto dot = raw.find('.');
            try {
                if (dot == std::string::npos) {
                    value = Value::parse(AttributeType::integer(), raw);
                } else {
                    int digits = 0;
                    for (char c : raw)
                        if (std::isdigit(static_cast<unsigned char>(c))) ++digits;
                    int scale = static_cast<int>(raw.size() - dot - 1);
                    value = Value::parse(AttributeType::decimal(digits, scale), raw);
                }
            } catch (const Error&) {
                throw UserError("bad expectation '" + entry + "': cannot parse value '" + raw + "'");
            }
        }
        pairs.emplace_back(std::move(attr), std::move(value));
        if (end >= text.size()) break;
        pos = end + 1;
    }
    if (pairs.empty()) throw UserError("empty expectation");
    return pairs;
}

/// Rebuilds the expression with every selection removed; scans, joins,
/// projections and unions are kept as-is.
inline std::shared_ptr<const AlgebraExpr> strip_selections(
    const std::shared_ptr<const AlgebraExpr>& expr) {
    switch (expr->kind) {
        case AlgebraExpr::Kind::Scan:
            return expr;
        case AlgebraExpr::Kind::Select:
            return strip_selections(expr->left);
        case AlgebraExpr::Kind::NaturalJoin:
            return AlgebraExpr::natural_join(strip_selections(expr->left),
                                             strip_selections(expr->right));
        case AlgebraExpr::Kind::Project:
            return expr->project_all
                       ? AlgebraExpr::project_everything(strip_selections(expr->left))
                       : AlgebraExpr::project(strip_selections(expr->left), expr->attributes);
        case AlgebraExpr::Kind::Union:
            return AlgebraExpr::set_union(strip_selections(expr->left),
                                          strip_selections(expr->right));
    }
    throw DataError("unknown algebra node");
}

/// Explains why a query result contains no row matching the expectation.
///
/// The search works outward from the data: first the selections are removed;
/// every derivation that then produces a matching row is replayed against the
/// original query to find the selection (and the atomic comparison) that
/// rejects it. If even the selection-free query cannot produce the row, the
/// expected values are traced to source tuples that either never join
/// (MissingJoinPartner) or do not exist (AbsentSourceValue).
class WhyNotExplainer {
public:
    static WhyNotReport explain(const Snapshot& snapshot,
                                const std::shared_ptr<const AlgebraExpr>& expr,
                                const std::vector<std::pair<std::string, Value>>& expected) {
        AnnotatedResult actual = evaluate(snapshot, expr);
        for (const auto& [attr, value] : expected) {
            (void)value;
            if (!actual.attribute_index(attr))
                throw UserError("attribute '" + attr + "' is not in the query result");
        }
        if (!actual.rows_matching(expected).empty())
            throw DataError("a matching row is present in the result; the expectation is not missing");

        auto stripped = strip_selections(expr);
        AnnotatedResult unfiltered = evaluate(snapshot, stripped);

        WhyNotReport report;
        std::set<std::string> seen; // dedupe on rendering

        auto emit = [&](WhyNotFinding finding) {
            if (seen.insert(finding.to_string()).second) report.findings.push_back(std::move(finding));
        };

        // Derivations that exist but are filtered out.
        for (size_t row : unfiltered.rows_matching(expected)) {
            for (const auto& monomial : unfiltered.rows[row].annotation.monomials()) {
                if (monomial.variables.empty()) continue;
                if (auto finding = blame_selection(snapshot, expr, monomial)) emit({*finding});
            }
        }
        if (!report.findings.empty()) return report;

        // Nothing derivable even without selections: look at the sources.
        std::vector<std::string> scanned;
        expr->collect_relations(scanned);
        std::vector<std::string> relations; // deduped, scan order
        for (const auto& name : scanned)
            if (std::find(relations.begin(), relations.end(), name) == relations.end())
                relations.push_back(name);

        std::set<std::string> derivable; // variables reachable in the selection-free result
        for (const auto& row : unfiltered.rows)
            for (const auto& id : row.annotation.variables()) derivable.insert(id.to_string());

        for (const auto& [attr, value] : expected) {
            bool found_carrier = false;
            bool blamed = false;
            for (const auto& rel_name : relations) {
                const SnapshotRelation& rel = snapshot.relation(rel_name);
                auto idx = rel.schema.find(attr);
                if (!idx) continue;
                // Join attributes: those shared with any other scanned relation.
                std::vector<size_t> join_attrs;
                for (size_t i = 0; i < rel.schema.attributes.size(); ++i) {
                    for (const auto& other_name : relations) {
                        if (other_name == rel_name) continue;
                        if (snapshot.relation(other_name).schema.has(rel.schema.attributes[i].name)) {
                            join_attrs.push_back(i);
                            break;
                        }
                    }
                }
                for (const auto& [id, values] : rel.tuples) {
                    if (values[*idx].compare(value) != 0) continue;
                    found_carrier = true;
                    if (derivable.count(id.to_string())) continue; // it joins; not this tuple's fault
                    MissingJoinPartner finding;
                    finding.tuple = id;
                    finding.relation = rel_name;
                    for (size_t i : join_attrs)
                        finding.join_values.emplace_back(rel.schema.attributes[i].name, values[i]);
                    emit({std::move(finding)});
                    blamed = true;
                }
            }
            if (!found_carrier || !blamed) emit({AbsentSourceValue{attr, value}});
        }
        return report;
    }

private:
    /// Replays the original query with only this derivation's tuples present
    /// and finds the first selection (bottom-up, left-to-right) that rejects
    /// every tuple reaching it, then the first comparison that failed.
    static std::optional<PickySelection> blame_selection(const Snapshot& snapshot,
                                                         const std::shared_ptr<const AlgebraExpr>& expr,
                                                         const Monomial& monomial) {
        std::set<std::string> ids;
        std::vector<ProvenanceId> derivation;
        for (const auto& id : monomial.variables) {
            if (ids.insert(id.to_string()).second) derivation.push_back(id);
        }
        Snapshot restricted = snapshot.restricted_to(ids);

        std::vector<const AlgebraExpr*> selects;
        collect_selects(*expr, selects);

        const AlgebraExpr* partial_blocker = nullptr; // rejected some tuples, but not all
        for (const AlgebraExpr* select : selects) {
            AnnotatedResult input = evaluate(restricted, *select->left);
            if (input.rows.empty()) continue;
            size_t passed = 0;
            std::vector<std::vector<ComparisonRecord>> traces;
            for (const auto& row : input.rows) {
                TupleBinding binding;
                for (size_t i = 0; i < row.values.size(); ++i)
                    binding.emplace(input.attributes[i].name, row.values[i]);
                std::vector<ComparisonRecord> trace;
                if (select->predicate->evaluate(binding, &trace))
                    ++passed;
                else
                    traces.push_back(std::move(trace));
            }
            if (passed == input.rows.size()) continue;
            if (passed > 0) {
                if (!partial_blocker) partial_blocker = select;
                continue;
            }
            return make_finding(*select, std::move(derivation), traces.front());
        }
        if (partial_blocker) {
            // No selection empties the pipeline outright; fall back to the
            // first one that rejected anything.
            AnnotatedResult input = evaluate(restricted, *partial_blocker->left);
            for (const auto& row : input.rows) {
                TupleBinding binding;
                for (size_t i = 0; i < row.values.size(); ++i)
                    binding.emplace(input.attributes[i].name, row.values[i]);
                std::vector<ComparisonRecord> trace;
                if (!partial_blocker->predicate->evaluate(binding, &trace))
                    return make_finding(*partial_blocker, std::move(derivation), trace);
            }
        }
        return std::nullopt; // the derivation actually survives
    }

    static PickySelection make_finding(const AlgebraExpr& select, std::vector<ProvenanceId> derivation,
                                       const std::vector<ComparisonRecord>& trace) {
        PickySelection finding;
        finding.derivation = std::move(derivation);
        const ComparisonRecord* blamed = nullptr;
        for (const auto& record : trace) {
            if (!record.satisfied) {
                blamed = &record;
                break;
            }
        }
        if (!blamed && !trace.empty()) blamed = &trace.front();
        if (blamed) {
            finding.predicate = blamed->rendering;
            finding.lhs = blamed->lhs;
            finding.rhs = blamed->rhs;
        } else {
            finding.predicate = select.predicate->to_string();
        }
        return finding;
    }

    static void collect_selects(const AlgebraExpr& expr, std::vector<const AlgebraExpr*>& out) {
        switch (expr.kind) {
            case AlgebraExpr::Kind::Scan:
                return;
            case AlgebraExpr::Kind::Select:
                collect_selects(*expr.left, out);
                out.push_back(&expr);
                return;
            case AlgebraExpr::Kind::Project:
                collect_selects(*expr.left, out);
                return;
            case AlgebraExpr::Kind::NaturalJoin:
            case AlgebraExpr::Kind::Union:
                collect_selects(*expr.left, out);
                collect_selects(*expr.right, out);
                return;
        }
    }
};

inline WhyNotReport why_not(const Snapshot& snapshot, const std::shared_ptr<const AlgebraExpr>& expr,
                            const std::vector<std::pair<std::string, Value>>& expected) {
    return WhyNotExplainer::explain(snapshot, expr, expected);
}

} // namespace provkit
