#include "qdensity/transform.hpp"

#include <numeric>
#include <random>
#include <utility>

#include "qdensity/errors.hpp"

namespace qdensity {
namespace transform {

namespace {

std::uint32_t reduce(const BigInt& v, std::uint32_t d) {
    return static_cast<std::uint32_t>(mpz_fdiv_ui(v.get_mpz_t(), d));
}

// Determinant by cofactor expansion on the first row; k x k submatrices of a
// 5 x 5 matrix, so the recursion is tiny.
BigInt det_rec(const std::vector<std::vector<BigInt>>& m) {
    const std::size_t n = m.size();
    if (n == 1) return m[0][0];
    BigInt acc = 0;
    for (std::size_t j = 0; j < n; ++j) {
        if (m[0][j] == 0) continue;
        std::vector<std::vector<BigInt>> minor(n - 1, std::vector<BigInt>(n - 1));
        for (std::size_t r = 1; r < n; ++r) {
            std::size_t cc = 0;
            for (std::size_t c = 0; c < n; ++c) {
                if (c == j) continue;
                minor[r - 1][cc++] = m[r][c];
            }
        }
        BigInt term = m[0][j] * det_rec(minor);
        if (j % 2 == 0)
            acc += term;
        else
            acc -= term;
    }
    return acc;
}

std::vector<std::vector<BigInt>> to_vec(const Mat5z& m) {
    std::vector<std::vector<BigInt>> v(5, std::vector<BigInt>(5));
    for (int i = 0; i < 5; ++i)
        for (int j = 0; j < 5; ++j) v[i][j] = m[i][j];
    return v;
}

BigInt cofactor(const Mat5z& m, std::size_t row, std::size_t col) {
    std::vector<std::vector<BigInt>> minor(4, std::vector<BigInt>(4));
    std::size_t rr = 0;
    for (std::size_t r = 0; r < 5; ++r) {
        if (r == row) continue;
        std::size_t cc = 0;
        for (std::size_t c = 0; c < 5; ++c) {
            if (c == col) continue;
            minor[rr][cc++] = m[r][c];
        }
        ++rr;
    }
    BigInt d = det_rec(minor);
    return ((row + col) % 2 == 0) ? d : -d;
}

}  // namespace

Mat5z lift_matrix(Base base, std::uint64_t lambda) {
    if (lambda >= base.q) throw std::invalid_argument("lambda must lie in [0, q)");
    const BigInt q = base.q;
    const BigInt l = lambda;
    Mat5z m;
    for (auto& row : m) row.fill(BigInt(0));
    m[0] = {q, l - q + 1, q, l - q + 1, BigInt(0)};
    m[1] = {BigInt(0), BigInt(1), BigInt(0), BigInt(1), BigInt(0)};
    m[2] = {BigInt(0), BigInt(0), q * q, l * q - q * (q - 1) / 2, l * (l + 1) / 2};
    m[3] = {BigInt(0), BigInt(0), BigInt(0), q, l};
    m[4] = {BigInt(0), BigInt(0), BigInt(0), BigInt(0), BigInt(1)};
    return m;
}

Mat5z mul(const Mat5z& a, const Mat5z& b) {
    Mat5z c;
    for (int i = 0; i < 5; ++i) {
        for (int j = 0; j < 5; ++j) {
            BigInt acc = 0;
            for (int k = 0; k < 5; ++k) acc += a[i][k] * b[k][j];
            c[i][j] = acc;
        }
    }
    return c;
}

BigInt det(const Mat5z& m) { return det_rec(to_vec(m)); }

Mat5q rational_inverse(const Mat5z& m) {
    const BigInt d = det(m);
    if (d == 0) throw std::domain_error("matrix is singular over Q");
    Mat5q inv;
    for (int i = 0; i < 5; ++i) {
        for (int j = 0; j < 5; ++j) {
            // adj(m)[i][j] = cofactor(m, j, i)
            BigRational e(cofactor(m, j, i), d);
            e.canonicalize();
            inv[i][j] = e;
        }
    }
    return inv;
}

TransformMatrix::TransformMatrix(Modulus m, const Mat5z& lift) : d_(m.d), lift_(lift) {
    for (int i = 0; i < 5; ++i)
        for (int j = 0; j < 5; ++j) e_[i][j] = reduce(lift[i][j], d_);
}

TransformMatrix::TransformMatrix(Modulus m, const std::array<std::array<std::uint32_t, 5>, 5>& entries)
    : d_(m.d) {
    for (int i = 0; i < 5; ++i)
        for (int j = 0; j < 5; ++j) e_[i][j] = entries[i][j] % d_;
}

TransformMatrix build_m(Base base, Modulus m, std::uint64_t lambda) {
    return TransformMatrix(m, lift_matrix(base, lambda));
}

ParamVector apply(const ParamVector& s, const TransformMatrix& mat) {
    if (s.d() != mat.d()) throw std::invalid_argument("modulus mismatch between vector and matrix");
    const std::uint64_t d = mat.d();
    std::array<std::uint32_t, 5> out{};
    for (int j = 0; j < 5; ++j) {
        std::uint64_t acc = 0;
        for (int i = 0; i < 5; ++i) {
            acc = (acc + static_cast<std::uint64_t>(s[i]) * mat.at(i, j)) % d;
        }
        out[j] = static_cast<std::uint32_t>(acc);
    }
    return ParamVector(Modulus(d), out);
}

TransformMatrix mod_mul(const TransformMatrix& a, const TransformMatrix& b) {
    if (a.d() != b.d()) throw std::invalid_argument("modulus mismatch");
    const std::uint64_t d = a.d();
    std::array<std::array<std::uint32_t, 5>, 5> c{};
    for (int i = 0; i < 5; ++i) {
        for (int j = 0; j < 5; ++j) {
            std::uint64_t acc = 0;
            for (int k = 0; k < 5; ++k)
                acc = (acc + static_cast<std::uint64_t>(a.at(i, k)) * b.at(k, j)) % d;
            c[i][j] = static_cast<std::uint32_t>(acc);
        }
    }
    return TransformMatrix(Modulus(d), c);
}

std::uint32_t det_mod(const TransformMatrix& mat) {
    Mat5z lift;
    for (int i = 0; i < 5; ++i)
        for (int j = 0; j < 5; ++j) lift[i][j] = BigInt(mat.at(i, j));
    return reduce(det(lift), mat.d());
}

namespace {

std::uint64_t inverse_mod(std::uint64_t a, std::uint64_t d) {
    // Extended Euclid; caller guarantees gcd(a, d) = 1.
    std::int64_t t = 0, new_t = 1;
    std::int64_t r = static_cast<std::int64_t>(d), new_r = static_cast<std::int64_t>(a % d);
    while (new_r != 0) {
        const std::int64_t quot = r / new_r;
        t = std::exchange(new_t, t - quot * new_t);
        r = std::exchange(new_r, r - quot * new_r);
    }
    if (t < 0) t += static_cast<std::int64_t>(d);
    return static_cast<std::uint64_t>(t);
}

}  // namespace

TransformMatrix invert(const TransformMatrix& mat) {
    const std::uint32_t d = mat.d();
    Mat5z lift;
    for (int i = 0; i < 5; ++i)
        for (int j = 0; j < 5; ++j) lift[i][j] = BigInt(mat.at(i, j));

    const std::uint32_t dm = reduce(det(lift), d);
    const std::uint64_t g = std::gcd(static_cast<std::uint64_t>(dm), static_cast<std::uint64_t>(d));
    if (g != 1) {
        throw NonUnitDeterminantError(
            "determinant " + std::to_string(dm) + " is not a unit mod " + std::to_string(d) +
                " (gcd(det, d) = " + std::to_string(g) + ")",
            g);
    }
    const std::uint64_t det_inv = inverse_mod(dm, d);
    std::array<std::array<std::uint32_t, 5>, 5> out{};
    for (int i = 0; i < 5; ++i) {
        for (int j = 0; j < 5; ++j) {
            const std::uint64_t adj = reduce(cofactor(lift, j, i), d);
            out[i][j] = static_cast<std::uint32_t>(adj * det_inv % d);
        }
    }
    return TransformMatrix(Modulus(d), out);
}

MixingProducts mixing_products(Base base, Modulus m) {
    if (std::gcd(base.q, static_cast<std::uint64_t>(m.d)) != 1)
        throw NonUnitDeterminantError("mixing products need gcd(q, d) = 1",
                                      std::gcd(base.q, static_cast<std::uint64_t>(m.d)));

    const Mat5z m0 = lift_matrix(base, 0);
    const Mat5z m1 = lift_matrix(base, 1);
    const Mat5q m0inv = rational_inverse(m0);

    auto rational_mul = [](const Mat5q& a, const Mat5q& b) {
        Mat5q c;
        for (int i = 0; i < 5; ++i)
            for (int j = 0; j < 5; ++j) {
                BigRational acc = 0;
                for (int k = 0; k < 5; ++k) acc += a[i][k] * b[k][j];
                acc.canonicalize();
                c[i][j] = acc;
            }
        return c;
    };
    auto to_rational = [](const Mat5z& a) {
        Mat5q c;
        for (int i = 0; i < 5; ++i)
            for (int j = 0; j < 5; ++j) c[i][j] = BigRational(a[i][j]);
        return c;
    };
    auto integral_lift = [](const Mat5q& a) {
        Mat5z c;
        for (int i = 0; i < 5; ++i)
            for (int j = 0; j < 5; ++j) {
                BigRational e = a[i][j];
                e.canonicalize();
                if (e.get_den() != 1)
                    throw std::logic_error("expected an integer matrix product");
                c[i][j] = e.get_num();
            }
        return c;
    };

    const Mat5q m0inv2 = rational_mul(m0inv, m0inv);
    const Mat5q p1 = rational_mul(to_rational(m1), m0inv);
    const Mat5q p2 = rational_mul(to_rational(mul(m1, m1)), m0inv2);

    MixingProducts out{
        TransformMatrix(m, integral_lift(p1)),
        TransformMatrix(m, integral_lift(p2)),
        std::nullopt,
    };
    if (base.q >= 3) {
        const Mat5z m2 = lift_matrix(base, 2);
        const Mat5q p3 = rational_mul(to_rational(mul(m2, m2)), m0inv2);
        out.m2sq_m0invsq = TransformMatrix(m, integral_lift(p3));
    }
    return out;
}

bool column_divisibility_check(Base base, unsigned n, unsigned trials, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<std::uint64_t> pick(0, base.q - 1);
    BigInt qn;
    mpz_ui_pow_ui(qn.get_mpz_t(), static_cast<unsigned long>(base.q), n);
    for (unsigned t = 0; t < trials; ++t) {
        Mat5z prod = lift_matrix(base, pick(rng));
        for (unsigned k = 1; k < n; ++k) prod = mul(prod, lift_matrix(base, pick(rng)));
        for (int row = 0; row < 5; ++row) {
            if (!mpz_divisible_p(prod[row][0].get_mpz_t(), qn.get_mpz_t())) return false;
            if (!mpz_divisible_p(prod[row][2].get_mpz_t(), qn.get_mpz_t())) return false;
        }
    }
    return true;
}

ReducedMatrix build_n(Base base, Modulus m, std::uint64_t lambda) {
    if (lambda >= base.q) throw std::invalid_argument("lambda must lie in [0, q)");
    const std::uint32_t d = m.d;
    std::array<std::array<std::uint32_t, 3>, 3> e{{
        {1 % d, 1 % d, 0},
        {0, static_cast<std::uint32_t>(base.q % d), static_cast<std::uint32_t>(lambda % d)},
        {0, 0, 1 % d},
    }};
    return ReducedMatrix(m, e);
}

std::array<std::uint32_t, 3> apply_reduced(const std::array<std::uint32_t, 3>& v,
                                           const ReducedMatrix& mat) {
    const std::uint64_t d = mat.d();
    std::array<std::uint32_t, 3> out{};
    for (int j = 0; j < 3; ++j) {
        std::uint64_t acc = 0;
        for (int i = 0; i < 3; ++i)
            acc = (acc + static_cast<std::uint64_t>(v[i]) * mat.at(i, j)) % d;
        out[j] = static_cast<std::uint32_t>(acc);
    }
    return out;
}

}  // namespace transform
}  // namespace qdensity
