#include "qdensity/counting.hpp"

#include <algorithm>
#include <atomic>
#include <thread>
#include <utility>

#include "qdensity/transform.hpp"

namespace qdensity {
namespace counting {

namespace {

std::uint32_t reduce_big(const BigInt& v, std::uint32_t d) {
    return static_cast<std::uint32_t>(mpz_fdiv_ui(v.get_mpz_t(), d));
}

// Streams f(n) = theta_u*u + theta_w*w + theta_2*n(n+1)/2 + theta_1*n
// + theta_0 mod d over n in [from, to), visiting (n, f, n mod q).
//
// The hot loop keeps everything in machine words and updates f by the
// difference f(n) - f(n-1) = theta_u*w(n) + theta_w*v(n) + theta_2*n
// + theta_1. v_q(n) is read off a base-q odometer (carry count), so the
// loop does no division at all.
template <typename Visit>
void scan_form(Base base, const ParamVector& s, std::uint64_t from, std::uint64_t to,
               Visit&& visit) {
    if (from >= to) return;
    const std::uint64_t q = base.q;
    const std::uint64_t d = s.d();
    const std::uint64_t tu = s[0], tw = s[1], t2 = s[2], t1 = s[3], t0 = s[4];

    std::uint64_t start = from;
    std::uint64_t f, gu, hn;  // f(n-1); theta_u*w(n-1); theta_2*(n-1)+theta_1
    // Base-q odometer holding the digits of n-1 (a uint64 has at most 64
    // base-q digits; one slot of slack for the final carry).
    std::uint32_t odo[66] = {};
    int odo_len = 1;

    if (start == 0) {
        visit(std::uint64_t{0}, static_cast<std::uint32_t>(t0), std::uint64_t{0});
        start = 1;
        if (start >= to) return;
        f = t0;
        gu = 0;
        hn = t1 % d;
    } else {
        const std::uint64_t prev = start - 1;
        const std::uint32_t w_mod = reduce_big(valuations::w_direct(base, prev), s.d());
        f = evaluate_form(base, s, prev);
        gu = tu * w_mod % d;
        hn = (t2 % d) * (prev % d) % d;
        hn = (hn + t1) % d;
        std::uint64_t m = prev;
        odo_len = 0;
        while (m > 0) {
            odo[odo_len++] = static_cast<std::uint32_t>(m % q);
            m /= q;
        }
        if (odo_len == 0) odo_len = 1;
    }

    const std::uint32_t qm1 = static_cast<std::uint32_t>(q - 1);
    for (std::uint64_t n = start; n < to; ++n) {
        // Increment the odometer; the carry count is v_q(n).
        int i = 0;
        while (odo[i] == qm1) odo[i++] = 0;
        ++odo[i];
        if (i >= odo_len) odo_len = i + 1;

        hn += t2;
        if (hn >= d) hn -= d;
        if (i > 0) {
            const std::uint64_t v = static_cast<std::uint64_t>(i);
            gu = (gu + tu * v) % d;
            f = (f + tw * v) % d;
        }
        f += gu;
        if (f >= d) f -= d;
        f += hn;
        if (f >= d) f -= d;
        visit(n, static_cast<std::uint32_t>(f), static_cast<std::uint64_t>(odo[0]));
    }
}

CountResult count_range(Base base, const ParamVector& s, std::uint64_t from, std::uint64_t to,
                        const GammaOptions& opts) {
    CountResult out;
    out.bound = to;
    if (opts.per_lambda) {
        if (base.q > (std::uint64_t{1} << 20))
            throw std::invalid_argument("per-lambda counts limited to q <= 2^20");
        out.per_lambda.emplace(base.q, 0);
        auto& per = *out.per_lambda;
        std::uint64_t count = 0;
        scan_form(base, s, from, to, [&](std::uint64_t, std::uint32_t f, std::uint64_t lambda) {
            if (f == 0) {
                ++count;
                ++per[lambda];
            }
        });
        out.count = count;
    } else {
        std::uint64_t count = 0;
        scan_form(base, s, from, to,
                  [&](std::uint64_t, std::uint32_t f, std::uint64_t) { count += (f == 0); });
        out.count = count;
    }
    return out;
}

}  // namespace

std::uint32_t evaluate_form(Base base, const ParamVector& s, std::uint64_t n) {
    const std::uint64_t d = s.d();
    const std::uint32_t u_mod = reduce_big(valuations::u_direct(base, n), s.d());
    const std::uint32_t w_mod = reduce_big(valuations::w_direct(base, n), s.d());
    const std::uint32_t tri_mod = reduce_big(BigInt(n) * (BigInt(n) + 1) / 2, s.d());
    std::uint64_t acc = static_cast<std::uint64_t>(s[0]) * u_mod % d;
    acc = (acc + static_cast<std::uint64_t>(s[1]) * w_mod) % d;
    acc = (acc + static_cast<std::uint64_t>(s[2]) * tri_mod) % d;
    acc = (acc + static_cast<std::uint64_t>(s[3]) * (n % d)) % d;
    acc = (acc + s[4]) % d;
    return static_cast<std::uint32_t>(acc);
}

CountResult gamma(Base base, const ParamVector& s, std::uint64_t A, GammaOptions opts) {
    return count_range(base, s, 0, A, opts);
}

CountResult gamma_parallel(Base base, const ParamVector& s, std::uint64_t A, unsigned chunks,
                           unsigned threads) {
    if (chunks == 0) throw std::invalid_argument("chunks must be >= 1");
    if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
    if (chunks == 1 || A < chunks) return gamma(base, s, A);

    std::vector<std::pair<std::uint64_t, std::uint64_t>> ranges;
    ranges.reserve(chunks);
    const std::uint64_t step = A / chunks, extra = A % chunks;
    std::uint64_t at = 0;
    for (unsigned c = 0; c < chunks; ++c) {
        const std::uint64_t len = step + (c < extra ? 1 : 0);
        ranges.emplace_back(at, at + len);
        at += len;
    }

    std::vector<CountResult> partial(chunks);
    std::atomic<unsigned> next{0};
    auto worker = [&]() {
        for (unsigned c = next.fetch_add(1); c < chunks; c = next.fetch_add(1)) {
            partial[c] = count_range(base, s, ranges[c].first, ranges[c].second, {});
        }
    };
    std::vector<std::thread> pool;
    const unsigned nthreads = std::min<unsigned>(threads, chunks);
    pool.reserve(nthreads);
    for (unsigned t = 0; t < nthreads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();

    CountResult out;
    out.bound = A;
    for (const auto& p : partial) out.count += p.count;
    return out;
}

std::vector<std::uint64_t> residue_histogram(Base base, Modulus m,
                                             const std::array<std::uint32_t, 4>& weights,
                                             std::uint64_t A) {
    ParamVector s(m, std::array<std::uint32_t, 5>{weights[0], weights[1], weights[2], weights[3], 0});
    std::vector<std::uint64_t> hist(m.d, 0);
    scan_form(base, s, 0, A,
              [&](std::uint64_t, std::uint32_t f, std::uint64_t) { ++hist[f]; });
    return hist;
}

bool check_recurrence(Base base, const ParamVector& s, std::uint64_t A) {
    const std::uint64_t lhs = gamma(base, s, base.q * A).count;
    std::uint64_t rhs = 0;
    Modulus m(s.d());
    for (std::uint64_t lambda = 0; lambda < base.q; ++lambda) {
        const ParamVector t = transform::apply(s, transform::build_m(base, m, lambda));
        rhs += gamma(base, t, A).count;
    }
    return lhs == rhs;
}

namespace {

std::vector<std::uint64_t> trace_checkpoints(std::uint64_t q, std::uint64_t N) {
    std::vector<std::uint64_t> pts;
    for (std::uint64_t p = q; p <= N; p *= q) {
        pts.push_back(p);
        if (p > N / q) break;
    }
    for (std::uint64_t dec = 10; dec <= N; dec *= 10) {
        for (std::uint64_t mult : {1, 2, 5}) {
            if (mult <= N / dec) pts.push_back(mult * dec);
        }
        if (dec > N / 10) break;
    }
    pts.push_back(N);
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    return pts;
}

}  // namespace

EmpiricalDensity empirical_density(Base base, const ParamVector& s, std::uint64_t N) {
    if (N == 0) throw std::invalid_argument("N must be >= 1");
    EmpiricalDensity out;
    out.N = N;
    const auto pts = trace_checkpoints(base.q, N);
    std::size_t next_pt = 0;
    std::uint64_t count = 0;
    scan_form(base, s, 0, N, [&](std::uint64_t n, std::uint32_t f, std::uint64_t) {
        count += (f == 0);
        if (next_pt < pts.size() && n + 1 == pts[next_pt]) {
            out.trace.push_back(TracePoint{pts[next_pt], count});
            ++next_pt;
        }
    });
    out.count = count;
    out.value = BigRational(BigInt(count), BigInt(N));
    out.value.canonicalize();
    return out;
}

}  // namespace counting
}  // namespace qdensity
