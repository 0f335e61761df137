#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "qdensity/params.hpp"
#include "qdensity/rational.hpp"
#include "qdensity/valuations.hpp"

namespace qdensity {
namespace counting {

/// Count of solutions n < A of the congruence, optionally split by n mod q.
struct CountResult {
    std::uint64_t bound = 0;
    std::uint64_t count = 0;
    std::optional<std::vector<std::uint64_t>> per_lambda;
};

// Value of theta_u*u_q(n) + theta_w*w_q(n) + theta_2*n(n+1)/2 + theta_1*n
// + theta_0 reduced mod d. Exact integers throughout; n(n+1)/2 is computed
// as an integer before reduction.
std::uint32_t evaluate_form(Base base, const ParamVector& s, std::uint64_t n);

struct GammaOptions {
    bool per_lambda = false;
};

// gamma(A, q, d; s): number of n in [0, A) solving the congruence, via an
// amortized-O(1) residue stream (w_q and u_q tracked mod d only).
CountResult gamma(Base base, const ParamVector& s, std::uint64_t A, GammaOptions opts = {});

// Same result as gamma, computed over `chunks` contiguous pieces of [0, A),
// each seeded with (w_q, u_q) mod d at its start via the random-access
// formulas. Bit-identical to the serial count. threads = 0 picks the
// available hardware parallelism.
CountResult gamma_parallel(Base base, const ParamVector& s, std::uint64_t A, unsigned chunks,
                           unsigned threads = 0);

// Histogram over residue classes of g(n) = theta_u*u + theta_w*w
// + theta_2*n(n+1)/2 + theta_1*n mod d for n < A: entry r counts the n with
// g(n) = r. gamma for s = (weights..., theta_0) is entry (d - theta_0) mod d.
std::vector<std::uint64_t> residue_histogram(Base base, Modulus m,
                                             const std::array<std::uint32_t, 4>& weights,
                                             std::uint64_t A);

// Both sides of gamma(qA; s) = sum_lambda gamma(A; s M_lambda), by brute
// force; the right side pushes s through the transform module.
bool check_recurrence(Base base, const ParamVector& s, std::uint64_t A);

struct TracePoint {
    std::uint64_t n;
    std::uint64_t count;
};

/// gamma(N)/N as an exact rational plus counts at geometrically spaced
/// checkpoints (powers of q and round decimals). No existence claim is made
/// about the N -> infinity limit.
struct EmpiricalDensity {
    std::uint64_t N = 0;
    std::uint64_t count = 0;
    BigRational value;
    std::vector<TracePoint> trace;
};

EmpiricalDensity empirical_density(Base base, const ParamVector& s, std::uint64_t N);

}  // namespace counting
}  // namespace qdensity
