#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <string>

namespace qdensity {

// Exact arbitrary-precision integers and rationals. All density values in
// this library are BigRational; doubles appear only in diagnostics.
using BigInt = mpz_class;
using BigRational = mpq_class;

inline BigRational make_rational(long num, unsigned long den) {
    BigRational r(num, den);
    r.canonicalize();
    return r;
}

// "num/den" in lowest terms ("3/4", "1", "0").
std::string to_fraction_string(const BigRational& r);

// Decimal rendering with the given number of significant digits. The exact
// fraction stays authoritative; this is for display only.
std::string to_decimal(const BigRational& r, int significant_digits = 12);

double to_double(const BigRational& r);

}  // namespace qdensity
