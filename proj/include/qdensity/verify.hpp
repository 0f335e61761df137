#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "qdensity/params.hpp"
#include "qdensity/valuations.hpp"

namespace qdensity {
namespace verify {

struct Check {
    std::string name;
    bool ok = false;
    std::string detail;  // filled on failure
};

struct SuiteResult {
    std::string suite;
    std::vector<Check> checks;

    bool ok() const {
        for (const auto& c : checks)
            if (!c.ok) return false;
        return true;
    }
};

struct Options {
    std::uint64_t q_max = 5;
    std::uint64_t d_max = 5;
    std::uint64_t n_max = 10000;   // identity scan range
    std::uint64_t a_max = 2000;    // block-lemma range
    unsigned vectors = 50;         // random coefficient vectors per (q, d)
    std::uint64_t empirical_n = 100000;
    std::uint64_t seed = 20240901;
    std::uint64_t state_budget = 10'000'000;
};

// Valuation identities: digit-sum form of w_q, streaming vs random access,
// both block lemmas + the in-block step, q-additivity of psi*w + theta*n,
// and the u_q non-additivity counterexample at n = q + 1.
SuiteResult identities(const Options& opts);

// Counting invariants: the qA recurrence, the residue partition of [0, A),
// chunked vs serial counting, and the residue stream vs naive re-evaluation.
SuiteResult recurrence(const Options& opts);

// Chain invariants: row sums q, iterate vs gamma(q^k)/q^k, exact v = Pv,
// constancy on ergodic classes, stationary checks with a floating-point
// power-iteration diagnostic.
SuiteResult stochastic(const Options& opts);

// Closed forms vs chain-exact values, matrix structure facts, and the
// liminf bound against empirical counts.
SuiteResult theorems(const Options& opts);

std::vector<SuiteResult> run_all(const Options& opts);

}  // namespace verify
}  // namespace qdensity
