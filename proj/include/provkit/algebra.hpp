#pragma once

#include <map>
#include <memory>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "provkit/errors.hpp"
#include "provkit/value.hpp"

namespace provkit {

enum class ComparisonOp { Lt, Le, Eq, Ne, Ge, Gt };

inline std::string to_string(ComparisonOp op) {
    switch (op) {
        case ComparisonOp::Lt: return "<";
        case ComparisonOp::Le: return "<=";
        case ComparisonOp::Eq: return "=";
        case ComparisonOp::Ne: return "!=";
        case ComparisonOp::Ge: return ">=";
        case ComparisonOp::Gt: return ">";
    }
    return "?";
}

struct AttributeRef {
    std::string name;
};

/// A comparison operand: either an attribute of the current tuple or a
/// literal constant.
using Operand = std::variant<AttributeRef, Value>;

inline std::string operand_to_string(const Operand& operand) {
    if (std::holds_alternative<AttributeRef>(operand)) return std::get<AttributeRef>(operand).name;
    const Value& v = std::get<Value>(operand);
    if (v.kind() == TypeKind::Text) {
        std::string escaped;
        for (char c : v.as_text()) {
            escaped += c;
            if (c == '\'') escaped += c; // '' escapes a quote, as in query literals
        }
        return "'" + escaped + "'";
    }
    if (v.kind() == TypeKind::Boolean) return v.as_boolean() ? "TRUE" : "FALSE";
    return v.to_string();
}

/// Attribute bindings of the tuple a predicate is evaluated against.
using TupleBinding = std::map<std::string, Value>;

/// Result of one atomic comparison during predicate evaluation, with the
/// operand values it saw. Collected in evaluation order for explanations.
struct ComparisonRecord {
    std::string rendering; // e.g. "intensity_1 < intensity_2"
    bool satisfied = false;
    Value lhs;
    Value rhs;
};

/// Boolean predicate tree over one tuple: comparisons combined with AND, OR
/// and NOT, plus boolean literals.
struct Predicate {
    enum class Kind { Comparison, And, Or, Not, Literal };

    Kind kind = Kind::Literal;
    Operand lhs;                      // Comparison
    ComparisonOp op = ComparisonOp::Eq;
    Operand rhs;                      // Comparison
    std::shared_ptr<const Predicate> left;  // And / Or / Not
    std::shared_ptr<const Predicate> right; // And / Or
    bool literal_value = false;       // Literal

    static std::shared_ptr<const Predicate> comparison(Operand lhs, ComparisonOp op, Operand rhs) {
        auto p = std::make_shared<Predicate>();
        p->kind = Kind::Comparison;
        p->lhs = std::move(lhs);
        p->op = op;
        p->rhs = std::move(rhs);
        return p;
    }
    static std::shared_ptr<const Predicate> conjunction(std::shared_ptr<const Predicate> a,
                                                        std::shared_ptr<const Predicate> b) {
        auto p = std::make_shared<Predicate>();
        p->kind = Kind::And;
        p->left = std::move(a);
        p->right = std::move(b);
        return p;
    }
    static std::shared_ptr<const Predicate> disjunction(std::shared_ptr<const Predicate> a,
                                                        std::shared_ptr<const Predicate> b) {
        auto p = std::make_shared<Predicate>();
        p->kind = Kind::Or;
        p->left = std::move(a);
        p->right = std::move(b);
        return p;
    }
    static std::shared_ptr<const Predicate> negation(std::shared_ptr<const Predicate> a) {
        auto p = std::make_shared<Predicate>();
        p->kind = Kind::Not;
        p->left = std::move(a);
        return p;
    }
    static std::shared_ptr<const Predicate> literal(bool value) {
        auto p = std::make_shared<Predicate>();
        p->kind = Kind::Literal;
        p->literal_value = value;
        return p;
    }

    /// Evaluates against one tuple. When `trace` is given, both branches of
    /// AND/OR are evaluated (no short-circuiting) so the trace lists every
    /// atomic comparison in left-to-right order.
    bool evaluate(const TupleBinding& tuple, std::vector<ComparisonRecord>* trace = nullptr) const {
        switch (kind) {
            case Kind::Comparison: {
                Value a = resolve(lhs, tuple);
                Value b = resolve(rhs, tuple);
                int cmp = a.compare(b);
                bool ok = false;
                switch (op) {
                    case ComparisonOp::Lt: ok = cmp < 0; break;
                    case ComparisonOp::Le: ok = cmp <= 0; break;
                    case ComparisonOp::Eq: ok = cmp == 0; break;
                    case ComparisonOp::Ne: ok = cmp != 0; break;
                    case ComparisonOp::Ge: ok = cmp >= 0; break;
                    case ComparisonOp::Gt: ok = cmp > 0; break;
                }
                if (trace) trace->push_back({to_string(), ok, std::move(a), std::move(b)});
                return ok;
            }
            case Kind::And: {
                bool a = left->evaluate(tuple, trace);
                if (!trace && !a) return false;
                bool b = right->evaluate(tuple, trace);
                return a && b;
            }
            case Kind::Or: {
                bool a = left->evaluate(tuple, trace);
                if (!trace && a) return true;
                bool b = right->evaluate(tuple, trace);
                return a || b;
            }
            case Kind::Not:
                return !left->evaluate(tuple, trace);
            case Kind::Literal:
                return literal_value;
        }
        return false;
    }

    /// Attribute names this predicate reads.
    void collect_attributes(std::vector<std::string>& out) const {
        auto add = [&out](const Operand& operand) {
            if (std::holds_alternative<AttributeRef>(operand))
                out.push_back(std::get<AttributeRef>(operand).name);
        };
        switch (kind) {
            case Kind::Comparison:
                add(lhs);
                add(rhs);
                break;
            case Kind::And:
            case Kind::Or:
                left->collect_attributes(out);
                right->collect_attributes(out);
                break;
            case Kind::Not:
                left->collect_attributes(out);
                break;
            case Kind::Literal:
                break;
        }
    }

    std::string to_string() const { return render(0); }

private:
    static Value resolve(const Operand& operand, const TupleBinding& tuple) {
        if (std::holds_alternative<Value>(operand)) return std::get<Value>(operand);
        const std::string& name = std::get<AttributeRef>(operand).name;
        auto it = tuple.find(name);
        if (it == tuple.end()) throw DataError("unknown attribute '" + name + "' in predicate");
        return it->second;
    }

    // Parent precedence: 0 root, 1 OR, 2 AND, 3 NOT.
    std::string render(int parent) const {
        int own = 4;
        std::string text;
        switch (kind) {
            case Kind::Comparison:
                text = operand_to_string(lhs) + " " + provkit::to_string(op) + " " +
                       operand_to_string(rhs);
                break;
            case Kind::And:
                own = 2;
                text = left->render(2) + " AND " + right->render(2);
                break;
            case Kind::Or:
                own = 1;
                text = left->render(1) + " OR " + right->render(1);
                break;
            case Kind::Not:
                own = 3;
                text = "NOT " + left->render(3);
                break;
            case Kind::Literal:
                text = literal_value ? "TRUE" : "FALSE";
                break;
        }
        if (own < parent) return "(" + text + ")";
        return text;
    }
};

/// Relational algebra over annotated relations: scans, selections, natural
/// joins, projections and unions. Nodes are immutable and shared.
struct AlgebraExpr {
    enum class Kind { Scan, Select, NaturalJoin, Project, Union };

    Kind kind = Kind::Scan;
    std::string relation;                      // Scan
    std::shared_ptr<const AlgebraExpr> left;   // unary input / left input
    std::shared_ptr<const AlgebraExpr> right;  // right input
    std::shared_ptr<const Predicate> predicate; // Select
    std::vector<std::string> attributes;       // Project
    bool project_all = false;                  // Project

    static std::shared_ptr<const AlgebraExpr> scan(std::string relation) {
        auto e = std::make_shared<AlgebraExpr>();
        e->kind = Kind::Scan;
        e->relation = std::move(relation);
        return e;
    }
    static std::shared_ptr<const AlgebraExpr> select(std::shared_ptr<const AlgebraExpr> input,
                                                     std::shared_ptr<const Predicate> predicate) {
        auto e = std::make_shared<AlgebraExpr>();
        e->kind = Kind::Select;
        e->left = std::move(input);
        e->predicate = std::move(predicate);
        return e;
    }
    static std::shared_ptr<const AlgebraExpr> natural_join(std::shared_ptr<const AlgebraExpr> a,
                                                           std::shared_ptr<const AlgebraExpr> b) {
        auto e = std::make_shared<AlgebraExpr>();
        e->kind = Kind::NaturalJoin;
        e->left = std::move(a);
        e->right = std::move(b);
        return e;
    }
    static std::shared_ptr<const AlgebraExpr> project(std::shared_ptr<const AlgebraExpr> input,
                                                      std::vector<std::string> attributes) {
        auto e = std::make_shared<AlgebraExpr>();
        e->kind = Kind::Project;
        e->left = std::move(input);
        e->attributes = std::move(attributes);
        return e;
    }
    static std::shared_ptr<const AlgebraExpr> project_everything(
        std::shared_ptr<const AlgebraExpr> input) {
        auto e = std::make_shared<AlgebraExpr>();
        e->kind = Kind::Project;
        e->left = std::move(input);
        e->project_all = true;
        return e;
    }
    static std::shared_ptr<const AlgebraExpr> set_union(std::shared_ptr<const AlgebraExpr> a,
                                                        std::shared_ptr<const AlgebraExpr> b) {
        auto e = std::make_shared<AlgebraExpr>();
        e->kind = Kind::Union;
        e->left = std::move(a);
        e->right = std::move(b);
        return e;
    }

    std::string to_string() const {
        switch (kind) {
            case Kind::Scan: return relation;
            case Kind::Select: return "select[" + predicate->to_string() + "](" + left->to_string() + ")";
            case Kind::NaturalJoin: return "join(" + left->to_string() + ", " + right->to_string() + ")";
            case Kind::Project: {
                if (project_all) return "project[*](" + left->to_string() + ")";
                std::string attrs;
                for (size_t i = 0; i < attributes.size(); ++i) {
                    if (i) attrs += ",";
                    attrs += attributes[i];
                }
                return "project[" + attrs + "](" + left->to_string() + ")";
            }
            case Kind::Union: return "union(" + left->to_string() + ", " + right->to_string() + ")";
        }
        return "?";
    }

    /// Relation names scanned anywhere in the expression, in scan order.
    void collect_relations(std::vector<std::string>& out) const {
        switch (kind) {
            case Kind::Scan:
                out.push_back(relation);
                break;
            case Kind::Select:
            case Kind::Project:
                left->collect_relations(out);
                break;
            case Kind::NaturalJoin:
            case Kind::Union:
                left->collect_relations(out);
                right->collect_relations(out);
                break;
        }
    }
};

} // namespace provkit
