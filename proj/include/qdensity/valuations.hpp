#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "qdensity/rational.hpp"

namespace qdensity {

/// Radix of the valuation, q >= 2.
struct Base {
    std::uint64_t q;

    explicit Base(std::uint64_t q_) : q(q_) {
        if (q < 2) throw std::invalid_argument("base q must be >= 2");
    }
};

namespace valuations {

// v_q(n): largest k with q^k | n; 0 for n = 0.
std::uint32_t valuation(Base base, std::uint64_t n);

// s_q(n): sum of the base-q digits of n.
std::uint64_t digit_sum(Base base, std::uint64_t n);

// Base-q digits of n, least significant first. Empty for n = 0.
std::vector<std::uint32_t> digits(Base base, std::uint64_t n);

// w_q(n) = sum_{k>=1} floor(n/q^k), in O(log_q n) operations.
// Equal to (n - s_q(n)) / (q-1) and to the running sum of v_q.
BigInt w_direct(Base base, std::uint64_t n);

// u_q(n) = sum_{i<=n} w_q(i), in O(log_q n) operations via the closed form
// of sum_{i<=n} floor(i/m) for each power m = q^k.
BigInt u_direct(Base base, std::uint64_t n);

/// Streaming evaluation of (n, w_q(n), u_q(n)) with amortized O(1)
/// big-integer additions per step. Single consumer; may be moved across
/// threads but not shared.
class Stream {
  public:
    explicit Stream(Base base) : base_(base) {}

    struct Entry {
        std::uint64_t n;
        BigInt w;
        BigInt u;
    };

    // First call yields (0, 0, 0); each later call advances n by one.
    Entry next();

    std::uint64_t position() const { return next_; }  // index of the next yield

  private:
    Base base_;
    std::uint64_t next_ = 0;
    BigInt w_ = 0;
    BigInt u_ = 0;
};

// Exact check of the block shift identities
//   w_q(aq + lambda) = w_q(a) + a
//   u_q(aq + lambda) = q u_q(a) + (lambda+1-q) w_q(a) + q a(a+1)/2 + (lambda+1-q) a
// plus the in-block step u_q(aq + r) = u_q(aq) + r w_q(aq) for all r < q.
// Throws std::invalid_argument when lambda is not in [0, q).
bool check_block_identities(Base base, std::uint64_t a, std::uint64_t lambda);

// Checks that f(n) = psi*w_q(n) + theta*n satisfies the digitwise
// decomposition f(n) = sum_j f(digit_j * q^j) for all n <= n_max.
bool is_q_additive_sample(Base base, std::int64_t psi, std::int64_t theta, std::uint64_t n_max);

}  // namespace valuations
}  // namespace qdensity
