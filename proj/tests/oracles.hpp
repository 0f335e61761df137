#pragma once

// Reference implementations used only as test oracles. Everything here is
// written from the definitions (plain summation), independent of the library
// code paths under test.

#include <array>
#include <cstdint>
#include <vector>

#include "qdensity/params.hpp"
#include "qdensity/rational.hpp"

namespace oracle {

using qdensity::BigInt;

inline std::uint32_t naive_valuation(std::uint64_t q, std::uint64_t n) {
    if (n == 0) return 0;
    std::uint32_t k = 0;
    BigInt power = q;
    while (BigInt(n) % power == 0) {
        ++k;
        power *= q;
    }
    return k;
}

inline std::uint64_t naive_digit_sum(std::uint64_t q, std::uint64_t n) {
    std::uint64_t s = 0;
    for (; n > 0; n /= q) s += n % q;
    return s;
}

// Table of (w_q(i), u_q(i)) for i = 0..n_max, built by direct summation.
struct WuTable {
    std::vector<BigInt> w;
    std::vector<BigInt> u;
};

inline WuTable build_wu_table(std::uint64_t q, std::uint64_t n_max) {
    WuTable t;
    t.w.resize(n_max + 1);
    t.u.resize(n_max + 1);
    BigInt w = 0, u = 0;
    for (std::uint64_t n = 0; n <= n_max; ++n) {
        w += naive_valuation(q, n);
        u += w;
        t.w[n] = w;
        t.u[n] = u;
    }
    return t;
}

// Number of n < A with theta_u*u + theta_w*w + theta_2*n(n+1)/2 + theta_1*n
// + theta_0 = 0 (mod d), evaluated from the table.
inline std::uint64_t naive_gamma(std::uint64_t q, std::uint32_t d,
                                 const std::array<std::int64_t, 5>& s, std::uint64_t A) {
    const WuTable t = build_wu_table(q, A == 0 ? 0 : A - 1);
    std::uint64_t count = 0;
    for (std::uint64_t n = 0; n < A; ++n) {
        BigInt value = BigInt(s[0]) * t.u[n] + BigInt(s[1]) * t.w[n] +
                       BigInt(s[2]) * (BigInt(n) * (BigInt(n) + 1) / 2) + BigInt(s[3]) * BigInt(n) +
                       BigInt(s[4]);
        if (mpz_fdiv_ui(value.get_mpz_t(), d) == 0) ++count;
    }
    return count;
}

}  // namespace oracle
