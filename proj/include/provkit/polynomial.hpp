#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "provkit/errors.hpp"
#include "provkit/provenance_id.hpp"

namespace provkit {

/// One term of a provenance polynomial: a positive coefficient and a multiset
/// of tuple ids. An empty multiset makes the term a constant (k times the
/// multiplicative identity). Variable multiplicity is kept, so self-joins such
/// as r1*r1 stay distinguishable from r1.
struct Monomial {
    uint64_t coefficient = 1;
    std::vector<ProvenanceId> variables; // sorted by rendered form, duplicates adjacent

    Monomial() = default;
    Monomial(uint64_t coeff, std::vector<ProvenanceId> vars)
        : coefficient(coeff), variables(std::move(vars)) {
        std::sort(variables.begin(), variables.end());
    }

    /// Sort/merge key: the sorted variable renderings.
    std::vector<std::string> key() const {
        std::vector<std::string> k;
        k.reserve(variables.size());
        for (const auto& v : variables) k.push_back(v.to_string());
        return k;
    }

    std::string to_string() const {
        if (variables.empty()) return std::to_string(coefficient);
        std::string out;
        if (coefficient > 1) out = std::to_string(coefficient) + "*";
        for (size_t i = 0; i < variables.size(); ++i) {
            if (i) out += "*";
            out += variables[i].to_string();
        }
        return out;
    }

    bool operator==(const Monomial&) const = default;
};

/// Why-provenance: a set of witnesses, each the set of tuple ids sufficient
/// to reconstruct a result tuple. Witnesses are kept as produced by the
/// polynomial's monomials; supersets are not absorbed.
struct WitnessBasis {
    std::vector<std::vector<ProvenanceId>> witnesses; // each sorted+unique, list sorted

    bool operator==(const WitnessBasis&) const = default;

    bool empty() const { return witnesses.empty(); }

    WitnessBasis united(const WitnessBasis& other) const {
        std::set<std::vector<ProvenanceId>> all(witnesses.begin(), witnesses.end());
        all.insert(other.witnesses.begin(), other.witnesses.end());
        WitnessBasis r;
        r.witnesses.assign(all.begin(), all.end());
        return r;
    }

    /// Renders as "{{r1,s1},{r1,s3}}"; the empty basis renders as "{}".
    std::string to_string() const {
        std::string out = "{";
        for (size_t i = 0; i < witnesses.size(); ++i) {
            if (i) out += ",";
            out += "{";
            for (size_t j = 0; j < witnesses[i].size(); ++j) {
                if (j) out += ",";
                out += witnesses[i][j].to_string();
            }
            out += "}";
        }
        return out + "}";
    }
};

/// An element of the commutative semiring N[X] over provenance ids, kept in
/// canonical form: monomials with equal variable multisets are merged, none
/// has coefficient zero, and they are ordered by their sorted variable
/// renderings. The zero polynomial is the empty monomial list.
class Polynomial {
public:
    Polynomial() = default; // zero

    static Polynomial zero() { return Polynomial(); }

    static Polynomial constant(uint64_t k) {
        if (k == 0) return zero();
        Polynomial p;
        p.monomials_.push_back(Monomial(k, {}));
        return p;
    }

    static Polynomial one() { return constant(1); }

    static Polynomial variable(ProvenanceId id) {
        Polynomial p;
        p.monomials_.push_back(Monomial(1, {std::move(id)}));
        return p;
    }

    /// Builds the canonical form of an arbitrary monomial list.
    static Polynomial from_monomials(std::vector<Monomial> monomials) {
        std::map<std::vector<std::string>, Monomial> merged;
        for (auto& m : monomials) {
            if (m.coefficient == 0) continue;
            Monomial sorted(m.coefficient, std::move(m.variables));
            auto key = sorted.key();
            auto it = merged.find(key);
            if (it == merged.end())
                merged.emplace(std::move(key), std::move(sorted));
            else
                it->second.coefficient += sorted.coefficient;
        }
        Polynomial p;
        p.monomials_.reserve(merged.size());
        for (auto& [key, m] : merged) p.monomials_.push_back(std::move(m));
        return p;
    }

    bool is_zero() const { return monomials_.empty(); }
    const std::vector<Monomial>& monomials() const { return monomials_; }

    /// The distinct variables of the polynomial.
    std::set<ProvenanceId> variables() const {
        std::set<ProvenanceId> vars;
        for (const auto& m : monomials_) vars.insert(m.variables.begin(), m.variables.end());
        return vars;
    }

    friend Polynomial operator+(const Polynomial& a, const Polynomial& b) {
        std::vector<Monomial> all = a.monomials_;
        all.insert(all.end(), b.monomials_.begin(), b.monomials_.end());
        return from_monomials(std::move(all));
    }

    friend Polynomial operator*(const Polynomial& a, const Polynomial& b) {
        std::vector<Monomial> products;
        products.reserve(a.monomials_.size() * b.monomials_.size());
        for (const auto& ma : a.monomials_) {
            for (const auto& mb : b.monomials_) {
                std::vector<ProvenanceId> vars = ma.variables;
                vars.insert(vars.end(), mb.variables.begin(), mb.variables.end());
                products.push_back(Monomial(ma.coefficient * mb.coefficient, std::move(vars)));
            }
        }
        return from_monomials(std::move(products));
    }

    Polynomial& operator+=(const Polynomial& other) { return *this = *this + other; }
    Polynomial& operator*=(const Polynomial& other) { return *this = *this * other; }

    bool operator==(const Polynomial&) const = default;

    /// Why-provenance of the polynomial: each monomial maps to the set of its
    /// distinct variables; coefficients and multiplicities are dropped and
    /// duplicate sets merge. Constant monomials need no source tuples and
    /// contribute no witness, which keeps every witness non-empty and makes
    /// the map distribute over +.
    WitnessBasis witness_basis() const {
        std::set<std::vector<ProvenanceId>> sets;
        for (const auto& m : monomials_) {
            if (m.variables.empty()) continue;
            std::vector<ProvenanceId> w = m.variables;
            w.erase(std::unique(w.begin(), w.end()), w.end());
            sets.insert(std::move(w));
        }
        WitnessBasis basis;
        basis.witnesses.assign(sets.begin(), sets.end());
        return basis;
    }

    /// Evaluates the polynomial in N under the assignment; a semiring
    /// homomorphism. The assignment must cover every variable.
    uint64_t specialize(const std::map<ProvenanceId, uint64_t>& assignment) const {
        uint64_t sum = 0;
        for (const auto& m : monomials_) {
            uint64_t term = m.coefficient;
            for (const auto& v : m.variables) {
                auto it = assignment.find(v);
                if (it == assignment.end())
                    throw DataError("specialize: no assignment for variable '" + v.to_string() + "'");
                term *= it->second;
            }
            sum += term;
        }
        return sum;
    }

    /// Substitutes variables and re-canonicalizes, merging monomials that
    /// collide after the substitution. The mapping must cover every variable.
    Polynomial rename(const std::map<ProvenanceId, ProvenanceId>& mapping) const {
        std::vector<Monomial> renamed;
        renamed.reserve(monomials_.size());
        for (const auto& m : monomials_) {
            std::vector<ProvenanceId> vars;
            vars.reserve(m.variables.size());
            for (const auto& v : m.variables) {
                auto it = mapping.find(v);
                if (it == mapping.end())
                    throw DataError("rename: no mapping for variable '" + v.to_string() + "'");
                vars.push_back(it->second);
            }
            renamed.push_back(Monomial(m.coefficient, std::move(vars)));
        }
        return from_monomials(std::move(renamed));
    }

    /// Canonical rendering: monomials joined by " + ", variables joined by
    /// "*", a coefficient prefix only when it exceeds 1. Zero renders as "0".
    std::string to_string() const {
        if (monomials_.empty()) return "0";
        std::string out;
        for (size_t i = 0; i < monomials_.size(); ++i) {
            if (i) out += " + ";
            out += monomials_[i].to_string();
        }
        return out;
    }

    /// Parses the rendering produced by to_string (whitespace around '+' and
    /// '*' is tolerated) and canonicalizes.
    static Polynomial parse(std::string_view text) {
        std::vector<Monomial> monomials;
        size_t pos = 0;
        auto skip_ws = [&] { while (pos < text.size() && text[pos] == ' ') ++pos; };
        auto parse_term = [&]() {
            uint64_t coeff = 1;
            bool have_coeff = false;
            std::vector<ProvenanceId> vars;
            skip_ws();
            if (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) {
                uint64_t v = 0;
                while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos])))
                    v = v * 10 + static_cast<uint64_t>(text[pos++] - '0');
                coeff = v;
                have_coeff = true;
            }
            bool expect_var = !have_coeff;
            for (;;) {
                skip_ws();
                if (pos < text.size() && text[pos] == '*') {
                    ++pos;
                    expect_var = true;
                    continue;
                }
                if (!expect_var) break;
                skip_ws();
                size_t start = pos;
                while (pos < text.size() &&
                       (std::isalnum(static_cast<unsigned char>(text[pos])) || text[pos] == '_' ||
                        text[pos] == '@'))
                    ++pos;
                if (start == pos) throw DataError("bad polynomial '" + std::string(text) + "'");
                vars.push_back(ProvenanceId::parse(text.substr(start, pos - start)));
                expect_var = false;
            }
            monomials.push_back(Monomial(coeff, std::move(vars)));
        };
        parse_term();
        skip_ws();
        while (pos < text.size()) {
            if (text[pos] != '+') throw DataError("bad polynomial '" + std::string(text) + "'");
            ++pos;
            parse_term();
            skip_ws();
        }
        return from_monomials(std::move(monomials));
    }

private:
    std::vector<Monomial> monomials_;
};

} // namespace provkit
