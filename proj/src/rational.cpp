#include "qdensity/rational.hpp"

#include <stdexcept>

namespace qdensity {

std::string to_fraction_string(const BigRational& r) {
    BigRational c = r;
    c.canonicalize();
    if (c.get_den() == 1) return c.get_num().get_str();
    return c.get_num().get_str() + "/" + c.get_den().get_str();
}

std::string to_decimal(const BigRational& r, int significant_digits) {
    if (significant_digits < 1) throw std::invalid_argument("significant_digits must be >= 1");
    BigRational c = r;
    c.canonicalize();
    if (c == 0) return "0";

    const bool negative = c < 0;
    BigInt num = abs(c.get_num());
    BigInt den = c.get_den();

    // Decimal exponent of the leading digit: smallest e with |r| < 10^(e+1).
    long e = static_cast<long>(mpz_sizeinbase(num.get_mpz_t(), 10)) -
             static_cast<long>(mpz_sizeinbase(den.get_mpz_t(), 10));
    BigInt pow10;
    auto scaled_ge = [&](long k) {
        // num*10^max(0,-k) >= den*10^max(0,k)  <=>  |r| >= 10^k
        BigInt lhs = num, rhs = den;
        if (k >= 0) {
            mpz_ui_pow_ui(pow10.get_mpz_t(), 10, static_cast<unsigned long>(k));
            rhs *= pow10;
        } else {
            mpz_ui_pow_ui(pow10.get_mpz_t(), 10, static_cast<unsigned long>(-k));
            lhs *= pow10;
        }
        return lhs >= rhs;
    };
    while (!scaled_ge(e)) --e;
    while (scaled_ge(e + 1)) ++e;

    // digits = round(|r| * 10^(sig-1-e)), giving exactly `sig` digits
    // (one more after rounding overflow, e.g. 0.999999 -> 1.00000).
    const long shift = significant_digits - 1 - e;
    BigInt scaled_num = num, scaled_den = den;
    if (shift >= 0) {
        mpz_ui_pow_ui(pow10.get_mpz_t(), 10, static_cast<unsigned long>(shift));
        scaled_num *= pow10;
    } else {
        mpz_ui_pow_ui(pow10.get_mpz_t(), 10, static_cast<unsigned long>(-shift));
        scaled_den *= pow10;
    }
    BigInt digits = (2 * scaled_num + scaled_den) / (2 * scaled_den);  // round half up
    std::string ds = digits.get_str();
    if (static_cast<int>(ds.size()) > significant_digits) ++e;  // rounding carried over

    std::string out;
    if (e >= 0 && e < 12) {
        if (static_cast<long>(ds.size()) <= e) {
            ds.append(static_cast<std::size_t>(e + 1 - static_cast<long>(ds.size())), '0');
            out = ds;
        } else {
            out = ds.substr(0, static_cast<std::size_t>(e + 1));
            std::string frac = ds.substr(static_cast<std::size_t>(e + 1));
            while (!frac.empty() && frac.back() == '0') frac.pop_back();
            if (!frac.empty()) out += "." + frac;
        }
    } else if (e < 0 && e >= -4) {
        std::string frac(static_cast<std::size_t>(-e - 1), '0');
        frac += ds;
        while (!frac.empty() && frac.back() == '0') frac.pop_back();
        out = "0." + frac;
    } else {
        out = ds.substr(0, 1);
        std::string frac = ds.substr(1);
        while (!frac.empty() && frac.back() == '0') frac.pop_back();
        if (!frac.empty()) out += "." + frac;
        out += "e" + std::to_string(e);
    }
    return negative ? "-" + out : out;
}

double to_double(const BigRational& r) { return r.get_d(); }

}  // namespace qdensity
