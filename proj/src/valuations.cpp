#include "qdensity/valuations.hpp"

namespace qdensity {
namespace valuations {

std::uint32_t valuation(Base base, std::uint64_t n) {
    if (n == 0) return 0;
    std::uint32_t k = 0;
    while (n % base.q == 0) {
        ++k;
        n /= base.q;
    }
    return k;
}

std::uint64_t digit_sum(Base base, std::uint64_t n) {
    std::uint64_t s = 0;
    while (n > 0) {
        s += n % base.q;
        n /= base.q;
    }
    return s;
}

std::vector<std::uint32_t> digits(Base base, std::uint64_t n) {
    std::vector<std::uint32_t> out;
    while (n > 0) {
        out.push_back(static_cast<std::uint32_t>(n % base.q));
        n /= base.q;
    }
    return out;
}

BigInt w_direct(Base base, std::uint64_t n) {
    BigInt w = 0;
    for (std::uint64_t m = n / base.q; m > 0; m /= base.q) w += m;
    return w;
}

namespace {

// sum_{i=0}^{n} floor(i/m) = m*t(t-1)/2 + (r+1)*t  with n = t*m + r, 0 <= r < m.
BigInt floor_prefix_sum(std::uint64_t n, std::uint64_t m) {
    const BigInt t = n / m;
    const BigInt r = n % m;
    return BigInt(m) * (t * (t - 1) / 2) + (r + 1) * t;
}

}  // namespace

BigInt u_direct(Base base, std::uint64_t n) {
    BigInt u = 0;
    // u_q(n) = sum_k sum_{i<=n} floor(i/q^k); powers beyond n contribute 0.
    for (std::uint64_t m = base.q;; m *= base.q) {
        if (m > n) break;
        u += floor_prefix_sum(n, m);
        if (m > n / base.q) break;  // next power would overflow
    }
    return u;
}

Stream::Entry Stream::next() {
    if (next_ == 0) {
        ++next_;
        return Entry{0, 0, 0};
    }
    const std::uint64_t n = next_++;
    w_ += valuation(base_, n);
    u_ += w_;
    return Entry{n, w_, u_};
}

bool check_block_identities(Base base, std::uint64_t a, std::uint64_t lambda) {
    if (lambda >= base.q) throw std::invalid_argument("lambda must lie in [0, q)");
    const std::uint64_t q = base.q;
    const std::uint64_t n = a * q + lambda;

    const BigInt wa = w_direct(base, a);
    const BigInt ua = u_direct(base, a);

    if (w_direct(base, n) != wa + a) return false;

    const BigInt shift = BigInt(lambda) + 1 - BigInt(q);
    const BigInt expected_u =
        BigInt(q) * ua + shift * wa + BigInt(q) * (BigInt(a) * (BigInt(a) + 1) / 2) + shift * a;
    if (u_direct(base, n) != expected_u) return false;

    const BigInt u_block = u_direct(base, a * q);
    const BigInt w_block = w_direct(base, a * q);
    for (std::uint64_t r = 0; r < q; ++r) {
        if (u_direct(base, a * q + r) != u_block + BigInt(r) * w_block) return false;
    }
    return true;
}

bool is_q_additive_sample(Base base, std::int64_t psi, std::int64_t theta, std::uint64_t n_max) {
    auto f = [&](std::uint64_t n) -> BigInt {
        return BigInt(psi) * w_direct(base, n) + BigInt(theta) * BigInt(n);
    };
    for (std::uint64_t n = 0; n <= n_max; ++n) {
        BigInt sum = 0;
        std::uint64_t power = 1;
        for (std::uint32_t dig : digits(base, n)) {
            if (dig != 0) sum += f(dig * power);
            power *= base.q;
        }
        if (sum != f(n)) return false;
    }
    return true;
}

}  // namespace valuations
}  // namespace qdensity
