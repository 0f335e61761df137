#include "qdensity/closedform.hpp"

#include <numeric>

namespace qdensity {
namespace closedform {

namespace {

std::uint64_t gcd_u(std::uint64_t a, std::uint64_t b) { return std::gcd(a, b); }

std::uint64_t inverse_mod(std::uint64_t a, std::uint64_t d) {
    std::int64_t t = 0, new_t = 1;
    std::int64_t r = static_cast<std::int64_t>(d), new_r = static_cast<std::int64_t>(a % d);
    while (new_r != 0) {
        const std::int64_t quot = r / new_r;
        std::int64_t tmp = t - quot * new_t;
        t = new_t;
        new_t = tmp;
        tmp = r - quot * new_r;
        r = new_r;
        new_r = tmp;
    }
    if (t < 0) t += static_cast<std::int64_t>(d);
    return static_cast<std::uint64_t>(t);
}

}  // namespace

std::uint64_t euler_phi(std::uint64_t m) {
    if (m == 0) throw std::invalid_argument("euler_phi needs m >= 1");
    std::uint64_t result = m;
    for (std::uint64_t p = 2; p * p <= m; ++p) {
        if (m % p == 0) {
            while (m % p == 0) m /= p;
            result -= result / p;
        }
    }
    if (m > 1) result -= result / m;
    return result;
}

ClosedFormResult delta_w_form(Base base, Modulus m, std::int64_t psi, std::int64_t theta,
                              std::int64_t x) {
    const std::uint32_t d = m.d;
    const std::uint64_t pr = mod_reduce(psi, d);
    const std::uint64_t tr = mod_reduce(theta, d);
    const std::uint64_t xr = mod_reduce(x, d);

    ClosedFormResult out;
    out.formula = "w-linear-gcd";
    if (pr == 0 && tr == 0) {
        out.tags.push_back("degenerate");
        out.value = BigRational(xr == 0 ? 1 : 0);
        out.hypotheses_held.push_back("psi = theta = 0: constant congruence");
        return out;
    }
    if (pr == 0) {
        out.tags.push_back("extension-beyond-stated-hypothesis");
        out.hypotheses_held.push_back("psi = 0: elementary linear case theta*n + x");
    } else {
        out.hypotheses_held.push_back("psi != 0 mod d");
    }
    const std::uint64_t g = gcd_u(gcd_u(pr, tr), d);
    if (gcd_u(xr, d) % g == 0) {
        BigRational v(static_cast<unsigned long>(g), static_cast<unsigned long>(d));
        v.canonicalize();
        out.value = v;
        out.hypotheses_held.push_back("gcd(psi,theta,d) | gcd(x,d)");
        if (g == 1) out.tags.push_back("uniformly-distributed");
        if (static_cast<std::uint64_t>(d) == base.q &&
            (gcd_u(tr, base.q) == 1 || tr % base.q == 0) && pr == 1)
            out.tags.push_back("unconditional-mod-q");
    } else {
        out.value = BigRational(0);
        out.hypotheses_held.push_back("gcd(psi,theta,d) does not divide gcd(x,d): no solutions");
    }
    return out;
}

ClosedFormResult delta_u_d_divides_q(Base base, Modulus m, std::int64_t x) {
    ClosedFormResult out;
    out.formula = "u-divisor-sum";
    const std::uint32_t d = m.d;
    if (base.q % d != 0) {
        out.hypotheses_failed.push_back("d | q fails (q = " + std::to_string(base.q) +
                                        ", d = " + std::to_string(d) + ")");
        return out;
    }
    out.hypotheses_held.push_back("d | q");
    const std::uint64_t xr = mod_reduce(x, d);
    const std::uint64_t gx = (xr == 0) ? d : gcd_u(xr, d);
    BigInt sum = 0;
    for (std::uint64_t f = 1; f <= gx; ++f) {
        if (gx % f == 0) sum += BigInt(static_cast<unsigned long>(f)) * euler_phi(d / f);
    }
    BigRational v(sum, BigInt(static_cast<unsigned long>(d)) * d);
    v.canonicalize();
    out.value = v;
    if (gcd_u(xr, d) == 1) out.tags.push_back("coprime-case-phi(d)/d^2");
    return out;
}

ClosedFormResult delta_u_coprime(Base base, Modulus m, std::int64_t theta_u, std::int64_t theta_w,
                                 std::int64_t x) {
    (void)theta_w;  // any value is allowed
    (void)x;
    ClosedFormResult out;
    out.formula = "u-coprime-uniform";
    const std::uint32_t d = m.d;
    bool ok = true;
    if (gcd_u(base.q, d) != 1) {
        out.hypotheses_failed.push_back("gcd(q, d) = 1 fails");
        ok = false;
    }
    const std::uint64_t tu = mod_reduce(theta_u, d);
    if (gcd_u(tu, d) != 1) {
        out.hypotheses_failed.push_back("theta_u must be a unit mod d");
        ok = false;
    }
    if (!ok) return out;
    out.hypotheses_held.push_back("gcd(q, d) = 1 and theta_u a unit");
    out.conditional = !existence_guaranteed(base, m);
    if (out.conditional)
        out.tags.push_back("assumes-existence-of-all-densities");
    BigRational v(1, static_cast<unsigned long>(d));
    v.canonicalize();
    out.value = v;
    out.tags.push_back("uniformly-distributed");
    return out;
}

BigRational liminf_bound(Base base, Modulus m) {
    const std::uint64_t floor_qd = base.q / m.d;
    BigRational v(static_cast<unsigned long>(euler_phi(m.d) * floor_qd), 1);
    v /= BigRational(static_cast<unsigned long>(m.d), 1) * BigRational(base.q);
    v.canonicalize();
    return v;
}

bool existence_guaranteed(Base base, Modulus m) {
    // Equivalent to d | q^n for some n: strip factors shared with q and see
    // whether anything is left.
    std::uint64_t d = m.d;
    while (d > 1) {
        const std::uint64_t g = gcd_u(d, base.q);
        if (g == 1) return false;
        while (d % g == 0) d /= g;
    }
    return true;
}

ClosedFormResult lookup(Base base, Modulus m, const ParamVector& s) {
    const std::uint32_t d = m.d;
    if (s.d() != d) throw std::invalid_argument("modulus mismatch");

    if (s.theta_u() == 0 && s.theta_2() == 0) {
        return delta_w_form(base, m, s.theta_w(), s.theta_1(), s.theta_0());
    }
    if (s.theta_2() == 0 && s.theta_1() == 0 && s.theta_u() != 0) {
        const std::uint64_t tu = s.theta_u();
        if (gcd_u(tu, d) == 1) {
            // gamma(N; s) = gamma(N; u*s) for a unit u: scale so theta_u = 1.
            const std::uint64_t inv = inverse_mod(tu, d);
            const std::uint64_t w_scaled = s.theta_w() * inv % d;
            const std::uint64_t x_scaled = s.theta_0() * inv % d;
            if (w_scaled == 0 && base.q % d == 0) {
                auto out = delta_u_d_divides_q(base, m, static_cast<std::int64_t>(x_scaled));
                if (tu != 1) out.tags.push_back("scaled-by-unit-theta_u");
                return out;
            }
            if (gcd_u(base.q, d) == 1) {
                auto out = delta_u_coprime(base, m, 1, static_cast<std::int64_t>(w_scaled),
                                           static_cast<std::int64_t>(x_scaled));
                if (tu != 1) out.tags.push_back("scaled-by-unit-theta_u");
                return out;
            }
        }
    }
    ClosedFormResult out;
    out.formula = "none";
    out.hypotheses_failed.push_back(
        "no closed form covers s = " + s.str() + " at q = " + std::to_string(base.q) +
        ", d = " + std::to_string(d));
    return out;
}

}  // namespace closedform
}  // namespace qdensity
