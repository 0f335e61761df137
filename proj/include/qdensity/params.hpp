#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>

namespace qdensity {

/// Modulus d of the congruence, 2 <= d <= 2^31 (counting works in
/// machine-word residues; larger d would not change any density of interest).
struct Modulus {
    std::uint32_t d;

    explicit Modulus(std::uint64_t d_) {
        if (d_ < 2) throw std::invalid_argument("modulus d must be >= 2");
        if (d_ > (std::uint64_t{1} << 31)) throw std::invalid_argument("modulus d must be <= 2^31");
        d = static_cast<std::uint32_t>(d_);
    }
};

// Canonical residue of a possibly negative integer.
inline std::uint32_t mod_reduce(std::int64_t v, std::uint32_t d) {
    std::int64_t r = v % static_cast<std::int64_t>(d);
    if (r < 0) r += d;
    return static_cast<std::uint32_t>(r);
}

/// Coefficient vector (theta_u, theta_w, theta_2, theta_1, theta_0) of one
/// congruence, stored as canonical residues mod d. Congruent integer tuples
/// construct equal ParamVectors.
class ParamVector {
  public:
    ParamVector(Modulus m, std::array<std::int64_t, 5> coeffs) : d_(m.d) {
        for (int i = 0; i < 5; ++i) c_[i] = mod_reduce(coeffs[i], d_);
    }
    ParamVector(Modulus m, std::array<std::uint32_t, 5> residues) : d_(m.d) {
        for (int i = 0; i < 5; ++i) c_[i] = residues[i] % d_;
    }

    std::uint32_t d() const { return d_; }
    const std::array<std::uint32_t, 5>& coeffs() const { return c_; }
    std::uint32_t operator[](std::size_t i) const { return c_[i]; }

    std::uint32_t theta_u() const { return c_[0]; }
    std::uint32_t theta_w() const { return c_[1]; }
    std::uint32_t theta_2() const { return c_[2]; }
    std::uint32_t theta_1() const { return c_[3]; }
    std::uint32_t theta_0() const { return c_[4]; }

    friend bool operator==(const ParamVector& a, const ParamVector& b) {
        return a.d_ == b.d_ && a.c_ == b.c_;
    }
    friend bool operator!=(const ParamVector& a, const ParamVector& b) { return !(a == b); }
    friend bool operator<(const ParamVector& a, const ParamVector& b) {
        return a.c_ < b.c_;  // lexicographic; callers compare within one modulus
    }

    std::string str() const {
        std::string s = "(";
        for (int i = 0; i < 5; ++i) s += std::to_string(c_[i]) + (i < 4 ? "," : ")");
        return s;
    }

  private:
    std::uint32_t d_;
    std::array<std::uint32_t, 5> c_;
};

}  // namespace qdensity
