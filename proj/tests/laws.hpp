#pragma once

// Randomized semiring-law suite for provenance polynomials, cross-checked
// against the independent reference polynomial from oracle.hpp. Shared by the
// unit tests and the acceptance checks.

#include <cstdint>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "oracle.hpp"
#include "provkit/polynomial.hpp"

namespace lawsuite {

struct Stats {
    size_t checks = 0;
    std::vector<std::string> failures;
};

inline const std::vector<provkit::ProvenanceId>& variable_pool() {
    static const std::vector<provkit::ProvenanceId> pool = {
        provkit::ProvenanceId::parse("r1"), provkit::ProvenanceId::parse("r2@t1"),
        provkit::ProvenanceId::parse("r2@t2"), provkit::ProvenanceId::parse("s1"),
        provkit::ProvenanceId::parse("x_9"),
    };
    return pool;
}

/// Up to four monomials, coefficients 1..3, degree up to 3 over a pool of
/// five variables. Small bounds keep every specialize() result far from
/// overflow while still producing collisions that exercise merging.
inline provkit::Polynomial random_poly(std::mt19937& rng) {
    std::uniform_int_distribution<int> n_monomials(0, 4);
    std::uniform_int_distribution<uint64_t> coefficient(1, 3);
    std::uniform_int_distribution<int> degree(0, 3);
    std::uniform_int_distribution<size_t> var(0, variable_pool().size() - 1);
    std::vector<provkit::Monomial> monomials;
    int count = n_monomials(rng);
    for (int i = 0; i < count; ++i) {
        std::vector<provkit::ProvenanceId> vars;
        int d = degree(rng);
        for (int j = 0; j < d; ++j) vars.push_back(variable_pool()[var(rng)]);
        monomials.emplace_back(coefficient(rng), std::move(vars));
    }
    return provkit::Polynomial::from_monomials(std::move(monomials));
}

inline std::map<provkit::ProvenanceId, uint64_t> random_assignment(std::mt19937& rng) {
    std::uniform_int_distribution<uint64_t> value(0, 3);
    std::map<provkit::ProvenanceId, uint64_t> assignment;
    for (const auto& id : variable_pool()) assignment[id] = value(rng);
    return assignment;
}

inline Stats run(size_t rounds, uint32_t seed = 20240301) {
    using provkit::Polynomial;
    Stats stats;
    std::mt19937 rng(seed);
    auto check = [&](bool ok, const std::string& label, const Polynomial& a, const Polynomial& b,
                     const Polynomial& c) {
        ++stats.checks;
        if (!ok)
            stats.failures.push_back(label + " violated for a=" + a.to_string() +
                                     ", b=" + b.to_string() + ", c=" + c.to_string());
    };
    for (size_t round = 0; round < rounds; ++round) {
        Polynomial a = random_poly(rng);
        Polynomial b = random_poly(rng);
        Polynomial c = random_poly(rng);
        auto assignment = random_assignment(rng);

        check(a + b == b + a, "commutativity of +", a, b, c);
        check((a + b) + c == a + (b + c), "associativity of +", a, b, c);
        check(a * b == b * a, "commutativity of *", a, b, c);
        check((a * b) * c == a * (b * c), "associativity of *", a, b, c);
        check(a * (b + c) == a * b + a * c, "distributivity", a, b, c);
        check(a + Polynomial::zero() == a, "additive identity", a, b, c);
        check(a * Polynomial::one() == a, "multiplicative identity", a, b, c);
        check((a * Polynomial::zero()).is_zero(), "multiplicative annihilator", a, b, c);
        check(Polynomial::from_monomials(a.monomials()) == a, "canonical-form idempotence", a, b,
              c);
        check(Polynomial::parse(a.to_string()) == a, "rendering round-trip", a, b, c);
        check((a + b).specialize(assignment) ==
                  a.specialize(assignment) + b.specialize(assignment),
              "specialize is additive", a, b, c);
        check((a * b).specialize(assignment) ==
                  a.specialize(assignment) * b.specialize(assignment),
              "specialize is multiplicative", a, b, c);
        check(oracle::from_engine(a + b) == oracle::from_engine(a).add(oracle::from_engine(b)),
              "+ agrees with reference", a, b, c);
        check(oracle::from_engine(a * b) == oracle::from_engine(a).mul(oracle::from_engine(b)),
              "* agrees with reference", a, b, c);
        check((a + b).witness_basis() == a.witness_basis().united(b.witness_basis()),
              "witness basis distributes over +", a, b, c);
    }
    return stats;
}

} // namespace lawsuite
