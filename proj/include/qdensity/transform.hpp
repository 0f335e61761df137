#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <vector>

#include "qdensity/params.hpp"
#include "qdensity/rational.hpp"
#include "qdensity/valuations.hpp"

namespace qdensity {
namespace transform {

using Mat5z = std::array<std::array<BigInt, 5>, 5>;
using Mat5q = std::array<std::array<BigRational, 5>, 5>;

// The exact integer shift matrix for n = a*q + lambda: row i is the expansion
// of the i-th component of (u_q(n), w_q(n), n(n+1)/2, n, 1) in the same
// quantities at a. Entries may be negative before reduction.
Mat5z lift_matrix(Base base, std::uint64_t lambda);

Mat5z mul(const Mat5z& a, const Mat5z& b);
BigInt det(const Mat5z& m);

// Exact rational inverse (adjugate over determinant). Throws
// std::domain_error when the matrix is singular over Q.
Mat5q rational_inverse(const Mat5z& m);

/// 5x5 matrix over Z/dZ acting on ParamVectors from the right; keeps the
/// exact integer lift when one is known (divisibility and rational-inverse
/// checks need it, the chain only needs residues).
class TransformMatrix {
  public:
    TransformMatrix(Modulus m, const Mat5z& lift);
    TransformMatrix(Modulus m, const std::array<std::array<std::uint32_t, 5>, 5>& entries);

    std::uint32_t d() const { return d_; }
    std::uint32_t at(std::size_t row, std::size_t col) const { return e_[row][col]; }
    const std::array<std::array<std::uint32_t, 5>, 5>& entries() const { return e_; }
    const std::optional<Mat5z>& lift() const { return lift_; }

    friend bool operator==(const TransformMatrix& a, const TransformMatrix& b) {
        return a.d_ == b.d_ && a.e_ == b.e_;
    }

  private:
    std::uint32_t d_;
    std::array<std::array<std::uint32_t, 5>, 5> e_;
    std::optional<Mat5z> lift_;
};

// M_lambda reduced mod d, with its integer lift retained.
TransformMatrix build_m(Base base, Modulus m, std::uint64_t lambda);

// Row-vector times matrix over Z/dZ. Throws on modulus mismatch.
ParamVector apply(const ParamVector& s, const TransformMatrix& mat);

TransformMatrix mod_mul(const TransformMatrix& a, const TransformMatrix& b);

// Inverse over Z/dZ via the adjugate; requires det to be a unit mod d.
// Throws NonUnitDeterminantError naming gcd(det, d) otherwise.
TransformMatrix invert(const TransformMatrix& mat);

std::uint32_t det_mod(const TransformMatrix& mat);

/// The integer-valued products M_1 M_0^{-1}, M_1^2 M_0^{-2} and (for q >= 3)
/// M_2^2 M_0^{-2}, reduced mod d. They are upper unitriangular and generate
/// the coefficient shifts used in the communication arguments.
struct MixingProducts {
    TransformMatrix m1_m0inv;
    TransformMatrix m1sq_m0invsq;
    std::optional<TransformMatrix> m2sq_m0invsq;
};

// Requires gcd(q, d) = 1. The third product needs q >= 3 (lambda = 2 exists).
MixingProducts mixing_products(Base base, Modulus m);

// For `trials` random tuples (lambda_1..lambda_n), forms the exact integer
// product M_{lambda_1} ... M_{lambda_n} and checks that columns 1 and 3
// (1-indexed) are divisible by q^n.
bool column_divisibility_check(Base base, unsigned n, unsigned trials, std::uint64_t seed = 20240901);

/// 3x3 reduction for the theta_u = theta_2 = 0 subspace: rows
/// (1,1,0), (0,q,lambda), (0,0,1) mod d. Acts on (theta_w, theta_1, theta_0).
class ReducedMatrix {
  public:
    ReducedMatrix(Modulus m, const std::array<std::array<std::uint32_t, 3>, 3>& entries)
        : d_(m.d), e_(entries) {}

    std::uint32_t d() const { return d_; }
    std::uint32_t at(std::size_t row, std::size_t col) const { return e_[row][col]; }

  private:
    std::uint32_t d_;
    std::array<std::array<std::uint32_t, 3>, 3> e_;
};

ReducedMatrix build_n(Base base, Modulus m, std::uint64_t lambda);

// (theta_w, theta_1, theta_0) * N_lambda over Z/dZ.
std::array<std::uint32_t, 3> apply_reduced(const std::array<std::uint32_t, 3>& v,
                                           const ReducedMatrix& mat);

}  // namespace transform
}  // namespace qdensity
