#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "qdensity/params.hpp"
#include "qdensity/rational.hpp"
#include "qdensity/valuations.hpp"

namespace qdensity {
namespace closedform {

/// Outcome of a closed-form density lookup: either an exact value with the
/// tag of the formula that produced it, or "not covered" plus the hypothesis
/// that failed. `conditional` marks values that assume the density exists.
struct ClosedFormResult {
    std::optional<BigRational> value;
    std::string formula;  // which result applies, e.g. "w-linear-gcd"
    std::vector<std::string> hypotheses_held;
    std::vector<std::string> hypotheses_failed;
    std::vector<std::string> tags;
    bool conditional = false;

    bool covered() const { return value.has_value(); }
};

std::uint64_t euler_phi(std::uint64_t m);

// Density of psi*w_q(n) + theta*n + x = 0 mod d:
// gcd(psi,theta,d)/d when gcd(psi,theta,d) | gcd(x,d), else 0.
// psi = theta = 0 degenerates to the constant form (tagged "degenerate");
// psi = 0, theta != 0 is the elementary linear case, same formula (tagged
// as an extension beyond the stated hypothesis).
ClosedFormResult delta_w_form(Base base, Modulus m, std::int64_t psi, std::int64_t theta,
                              std::int64_t x);

// Density of u_q(n) + x = 0 mod d when d | q:
// (1/d^2) * sum over f | gcd(x,d) of f * phi(d/f).
ClosedFormResult delta_u_d_divides_q(Base base, Modulus m, std::int64_t x);

// Density of theta_u*u_q(n) + theta_w*w_q(n) + x = 0 mod d when gcd(q,d) = 1
// and theta_u is a unit mod d: 1/d. Conditional on existence of all densities.
ClosedFormResult delta_u_coprime(Base base, Modulus m, std::int64_t theta_u, std::int64_t theta_w,
                                 std::int64_t x);

// phi(d)/(dq) * floor(q/d): lower bound for liminf gamma(N; (1,0,0,0,x))/N.
// Vacuous (0) when q < d.
BigRational liminf_bound(Base base, Modulus m);

// True iff every prime factor of d divides q (iff d | q^n for some n);
// then the whole density vector exists.
bool existence_guaranteed(Base base, Modulus m);

// Applies the matching formula to a general coefficient vector, scaling by a
// unit theta_u when that reduces to a covered case. Not covered otherwise.
ClosedFormResult lookup(Base base, Modulus m, const ParamVector& s);

}  // namespace closedform
}  // namespace qdensity
