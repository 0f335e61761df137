// Acceptance suite: one line per criterion, nonzero exit iff any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numeric>
#include <random>
#include <vector>

#include "qdensity/chain.hpp"
#include "qdensity/closedform.hpp"
#include "qdensity/counting.hpp"
#include "qdensity/transform.hpp"
#include "qdensity/valuations.hpp"

using namespace qdensity;

namespace {

struct Failure {
    std::string detail;
};

using CheckFn = std::function<bool(std::string&)>;

ParamVector vec(std::uint32_t d, std::array<std::int64_t, 5> c) {
    return ParamVector(Modulus(d), c);
}

ParamVector rvec(Modulus m, std::mt19937_64& rng) {
    std::array<std::uint32_t, 5> c{};
    for (auto& x : c) x = static_cast<std::uint32_t>(rng() % m.d);
    return ParamVector(m, c);
}

// ---- criterion 1: recurrence oracle ---------------------------------------
bool criterion_recurrence(std::string& detail) {
    std::mt19937_64 rng(1001);
    for (std::uint64_t q = 2; q <= 6; ++q) {
        for (std::uint32_t d = 2; d <= 6; ++d) {
            Modulus m(d);
            for (int i = 0; i < 200; ++i) {
                const ParamVector s = rvec(m, rng);
                for (std::uint64_t A : {1, 7, 64, 1000}) {
                    if (!counting::check_recurrence(Base(q), s, A)) {
                        detail = "q=" + std::to_string(q) + " d=" + std::to_string(d) +
                                 " s=" + s.str() + " A=" + std::to_string(A);
                        return false;
                    }
                }
            }
        }
    }
    return true;
}

// ---- criterion 2: chain/count equivalence ----------------------------------
bool criterion_chain_count(std::string& detail) {
    std::mt19937_64 rng(1002);
    for (std::uint64_t q = 2; q <= 4; ++q) {
        for (std::uint32_t d = 2; d <= 4; ++d) {
            Modulus m(d);
            for (int i = 0; i < 20; ++i) {
                const ParamVector s = rvec(m, rng);
                const auto traj = chain::iterate_density(Base(q), m, s, 8);
                std::uint64_t power = 1;
                for (unsigned k = 0; k <= 8; ++k) {
                    const auto count = counting::gamma(Base(q), s, power).count;
                    BigRational expect(static_cast<unsigned long>(count),
                                       static_cast<unsigned long>(power));
                    expect.canonicalize();
                    if (traj[k] != expect) {
                        detail = "q=" + std::to_string(q) + " d=" + std::to_string(d) +
                                 " s=" + s.str() + " k=" + std::to_string(k);
                        return false;
                    }
                    power *= q;
                }
            }
        }
    }
    return true;
}

// ---- criterion 3: theorem thetaw=0 -----------------------------------------
bool criterion_w_family(std::string& detail) {
    for (std::uint64_t q = 2; q <= 6; ++q) {
        for (std::uint32_t d = 2; d <= 6; ++d) {
            Modulus m(d);
            std::vector<ParamVector> seeds;
            for (std::uint32_t psi = 0; psi < d; ++psi)
                for (std::uint32_t theta = 0; theta < d; ++theta)
                    for (std::uint32_t x = 0; x < d; ++x)
                        seeds.emplace_back(m, std::array<std::uint32_t, 5>{0, psi, 0, theta, x});
            const auto solve = chain::solve_density(Base(q), m, seeds);
            for (std::uint32_t psi = 0; psi < d; ++psi) {
                for (std::uint32_t theta = 0; theta < d; ++theta) {
                    if (psi == 0 && theta == 0) continue;
                    const std::uint64_t g =
                        std::gcd(std::gcd<std::uint64_t>(psi, theta), static_cast<std::uint64_t>(d));
                    for (std::uint32_t x = 0; x < d; ++x) {
                        BigRational expect(0);
                        if (std::gcd<std::uint64_t>(x, d) % g == 0) {
                            expect = BigRational(static_cast<unsigned long>(g),
                                                 static_cast<unsigned long>(d));
                            expect.canonicalize();
                        }
                        const chain::State st{0, psi, 0, theta, x};
                        const auto got = solve.value[*solve.graph.index_of(st)];
                        if (got != expect) {
                            detail = "q=" + std::to_string(q) + " d=" + std::to_string(d) +
                                     " (psi,theta,x)=(" + std::to_string(psi) + "," +
                                     std::to_string(theta) + "," + std::to_string(x) + ")";
                            return false;
                        }
                    }
                }
            }
        }
    }
    return true;
}

// ---- criterion 4: theorem d | q ---------------------------------------------
bool criterion_d_divides_q(std::string& detail) {
    const std::vector<std::pair<std::uint64_t, std::uint32_t>> pairs{
        {2, 2}, {4, 2}, {4, 4}, {6, 2}, {6, 3}, {6, 6}, {9, 3}};
    for (const auto& [q, d] : pairs) {
        Modulus m(d);
        // chain-exact equals the divisor-sum formula for every x
        for (std::uint32_t x = 0; x < d; ++x) {
            const auto rep = chain::exact_density(Base(q), m, vec(d, {1, 0, 0, 0, x}));
            const auto formula = *closedform::delta_u_d_divides_q(Base(q), m, x).value;
            if (rep.value != formula) {
                detail = "chain vs formula at q=" + std::to_string(q) + " d=" + std::to_string(d) +
                         " x=" + std::to_string(x);
                return false;
            }
            if (q == 2 && d == 2 && x == 0 && formula != BigRational(3, 4)) {
                detail = "expected 3/4 at (2,2,0)";
                return false;
            }
            if (q == 2 && d == 2 && x == 1 && formula != BigRational(1, 4)) {
                detail = "expected 1/4 at (2,2,1)";
                return false;
            }
        }
        // empirical at N = min(q^12, 10^7), within 0.01
        std::uint64_t N = 1;
        bool capped = false;
        for (int k = 0; k < 12; ++k) {
            if (N > 10000000ull / q) {
                capped = true;
                break;
            }
            N *= q;
        }
        if (capped) N = 10000000ull;
        const auto hist = counting::residue_histogram(Base(q), m, {1, 0, 0, 0}, N);
        for (std::uint32_t x = 0; x < d; ++x) {
            const double emp = static_cast<double>(hist[(d - x) % d]) / static_cast<double>(N);
            const double exact = closedform::delta_u_d_divides_q(Base(q), m, x).value->get_d();
            if (std::abs(emp - exact) > 0.01) {
                detail = "empirical off at q=" + std::to_string(q) + " d=" + std::to_string(d) +
                         " x=" + std::to_string(x) + " N=" + std::to_string(N) +
                         " emp=" + std::to_string(emp);
                return false;
            }
        }
    }
    return true;
}

// ---- criterion 5: theorem coprime -------------------------------------------
bool criterion_coprime(std::string& detail) {
    const std::vector<std::pair<std::uint64_t, std::uint32_t>> pairs{
        {3, 2}, {2, 3}, {5, 2}, {5, 3}, {2, 5}, {3, 4}};
    for (const auto& [q, d] : pairs) {
        Modulus m(d);
        std::vector<ParamVector> seeds;
        std::vector<std::uint32_t> units;
        for (std::uint32_t tu = 1; tu < d; ++tu)
            if (std::gcd<std::uint64_t>(tu, d) == 1) units.push_back(tu);
        for (std::uint32_t tu : units)
            for (std::uint32_t tw = 0; tw < d; ++tw)
                for (std::uint32_t x = 0; x < d; ++x)
                    seeds.emplace_back(m, std::array<std::uint32_t, 5>{tu, tw, 0, 0, x});

        const auto solve = chain::solve_density(Base(q), m, seeds);
        BigRational expect(1, d);
        expect.canonicalize();
        for (const auto& s : seeds) {
            if (solve.value[*solve.graph.index_of(s.coeffs())] != expect) {
                detail = "chain != 1/d at q=" + std::to_string(q) + " d=" + std::to_string(d) +
                         " s=" + s.str();
                return false;
            }
        }
        // every reachable state is ergodic
        for (std::size_t v = 0; v < solve.graph.states.size(); ++v) {
            if (!solve.dec.ergodic[solve.dec.scc_of[v]]) {
                detail = "non-ergodic state in the coprime chain at q=" + std::to_string(q) +
                         " d=" + std::to_string(d);
                return false;
            }
        }
        // empirical at N = 10^6 within 0.02 of 1/d
        const std::uint64_t N = 1000000;
        for (std::uint32_t tu : units) {
            for (std::uint32_t tw = 0; tw < d; ++tw) {
                const auto hist = counting::residue_histogram(Base(q), m, {tu, tw, 0, 0}, N);
                for (std::uint32_t x = 0; x < d; ++x) {
                    const double emp =
                        static_cast<double>(hist[(d - x) % d]) / static_cast<double>(N);
                    if (std::abs(emp - 1.0 / d) > 0.02) {
                        detail = "empirical off at q=" + std::to_string(q) +
                                 " d=" + std::to_string(d) + " tu=" + std::to_string(tu) +
                                 " tw=" + std::to_string(tw) + " x=" + std::to_string(x);
                        return false;
                    }
                }
            }
        }
    }
    return true;
}

// ---- criterion 6: liminf bound ----------------------------------------------
bool criterion_liminf(std::string& detail) {
    const std::uint64_t N = 1000000;
    for (std::uint64_t q = 2; q <= 8; ++q) {
        for (std::uint32_t d = 2; d <= 8; ++d) {
            Modulus m(d);
            const double bound = closedform::liminf_bound(Base(q), m).get_d();
            const auto hist = counting::residue_histogram(Base(q), m, {1, 0, 0, 0}, N);
            for (std::uint32_t x = 0; x < d; ++x) {
                const double emp = static_cast<double>(hist[(d - x) % d]) / static_cast<double>(N);
                if (emp < bound - 0.01) {
                    detail = "q=" + std::to_string(q) + " d=" + std::to_string(d) +
                             " x=" + std::to_string(x) + " emp=" + std::to_string(emp) +
                             " bound=" + std::to_string(bound);
                    return false;
                }
            }
        }
    }
    return true;
}

// ---- criterion 7: structural matrix facts -----------------------------------
bool criterion_matrices(std::string& detail) {
    // det(M_lambda) = q^4 mod d for all lambda, q, d <= 7
    for (std::uint64_t q = 2; q <= 7; ++q) {
        BigInt q4(static_cast<unsigned long>(q));
        mpz_pow_ui(q4.get_mpz_t(), q4.get_mpz_t(), 4);
        for (std::uint32_t d = 2; d <= 7; ++d) {
            for (std::uint64_t lambda = 0; lambda < q; ++lambda) {
                const auto M = transform::build_m(Base(q), Modulus(d), lambda);
                if (transform::det_mod(M) != mpz_fdiv_ui(q4.get_mpz_t(), d)) {
                    detail = "det != q^4 at q=" + std::to_string(q) + " d=" + std::to_string(d);
                    return false;
                }
            }
        }
    }

    // displayed products mod d for coprime pairs
    for (const auto& [q, d] : std::vector<std::pair<std::uint64_t, std::uint32_t>>{
             {3, 2}, {2, 3}, {5, 4}}) {
        const auto prods = transform::mixing_products(Base(q), Modulus(d));
        auto expect_equal = [&](const transform::TransformMatrix& got,
                                const std::array<std::array<std::int64_t, 5>, 5>& want,
                                const char* name) {
            for (int i = 0; i < 5; ++i)
                for (int j = 0; j < 5; ++j)
                    if (got.at(i, j) != mod_reduce(want[i][j], d)) {
                        detail = std::string(name) + " mismatch at q=" + std::to_string(q) +
                                 " d=" + std::to_string(d);
                        return false;
                    }
            return true;
        };
        const std::array<std::array<std::int64_t, 5>, 5> p1{{{1, 1, 0, 0, 0},
                                                             {0, 1, 0, 0, 0},
                                                             {0, 0, 1, 1, 1},
                                                             {0, 0, 0, 1, 1},
                                                             {0, 0, 0, 0, 1}}};
        const std::int64_t iq = static_cast<std::int64_t>(q);
        const std::array<std::array<std::int64_t, 5>, 5> p2{
            {{1, iq + 1, 0, 0, 2},
             {0, 1, 0, 0, 1},
             {0, 0, 1, iq + 1, (iq + 1) * (iq + 2) / 2},
             {0, 0, 0, 1, iq + 1},
             {0, 0, 0, 0, 1}}};
        const std::array<std::array<std::int64_t, 5>, 5> p3{
            {{1, 2 * (iq + 1), 0, 0, iq + 6},
             {0, 1, 0, 0, 2},
             {0, 0, 1, 2 * (iq + 1), (iq + 1) * (2 * iq + 3)},
             {0, 0, 0, 1, 2 * (iq + 1)},
             {0, 0, 0, 0, 1}}};
        if (!expect_equal(prods.m1_m0inv, p1, "M1*M0^-1")) return false;
        if (!expect_equal(prods.m1sq_m0invsq, p2, "M1^2*M0^-2")) return false;
        if (q >= 3) {
            if (!prods.m2sq_m0invsq.has_value()) {
                detail = "missing M2^2*M0^-2 for q >= 3";
                return false;
            }
            if (!expect_equal(*prods.m2sq_m0invsq, p3, "M2^2*M0^-2")) return false;
        }
    }

    // columns 1 and 3 of random n-fold products divisible by q^n, n <= 6
    for (std::uint64_t q : {2, 3, 5, 7}) {
        for (unsigned n = 1; n <= 6; ++n) {
            if (!transform::column_divisibility_check(Base(q), n, 40, 7000 + 10 * q + n)) {
                detail = "column divisibility fails at q=" + std::to_string(q) +
                         " n=" + std::to_string(n);
                return false;
            }
        }
    }
    return true;
}

// ---- criterion 8: identity suite ----------------------------------------------
bool criterion_identities(std::string& detail) {
    for (std::uint64_t q : {2, 3, 4, 5, 7, 10}) {
        Base base(q);
        valuations::Stream stream(base);
        for (std::uint64_t n = 0; n <= 100000; ++n) {
            const BigInt w = valuations::w_direct(base, n);
            const BigInt num = BigInt(n) - valuations::digit_sum(base, n);
            if (num % (q - 1) != 0 || w != num / (q - 1)) {
                detail = "digit-sum identity at q=" + std::to_string(q) + " n=" + std::to_string(n);
                return false;
            }
            const auto e = stream.next();
            if (e.w != w || e.u != valuations::u_direct(base, n)) {
                detail = "stream mismatch at q=" + std::to_string(q) + " n=" + std::to_string(n);
                return false;
            }
        }
    }
    for (std::uint64_t q : {2, 3, 5}) {
        for (std::uint64_t a = 0; a <= 10000; ++a) {
            for (std::uint64_t lambda = 0; lambda < q; ++lambda) {
                if (!valuations::check_block_identities(Base(q), a, lambda)) {
                    detail = "block identity at q=" + std::to_string(q) + " a=" + std::to_string(a);
                    return false;
                }
            }
        }
    }
    for (std::uint64_t q : {2, 3, 7}) {
        if (!valuations::is_q_additive_sample(Base(q), 1, 0, 5000) ||
            !valuations::is_q_additive_sample(Base(q), 3, -2, 5000) ||
            !valuations::is_q_additive_sample(Base(q), 0, 1, 1000)) {
            detail = "q-additivity sample at q=" + std::to_string(q);
            return false;
        }
    }
    for (std::uint64_t q = 2; q <= 10; ++q) {
        if (valuations::u_direct(Base(q), q + 1) != 2 ||
            valuations::u_direct(Base(q), q) + valuations::u_direct(Base(q), 1) != 1) {
            detail = "u_q counterexample at q=" + std::to_string(q);
            return false;
        }
    }
    return true;
}

// ---- criterion 9: eigenvector and rationality ----------------------------------
bool criterion_eigenvector(std::string& detail) {
    std::mt19937_64 rng(1009);
    for (std::uint64_t q = 2; q <= 5; ++q) {
        for (std::uint32_t d = 2; d <= 5; ++d) {
            Modulus m(d);
            std::vector<ParamVector> seeds;
            for (int i = 0; i < 5; ++i) seeds.push_back(rvec(m, rng));
            const auto solve = chain::solve_density(Base(q), m, seeds);
            if (!solve.eigenvector_exact || !chain::is_eigenvector(solve.graph, solve.value)) {
                detail = "v != Pv at q=" + std::to_string(q) + " d=" + std::to_string(d);
                return false;
            }
            for (std::uint32_t c : solve.dec.ergodic_ids) {
                for (std::uint32_t s : solve.dec.members[c]) {
                    if (solve.value[s] != solve.class_value[c]) {
                        detail = "not constant on an ergodic class at q=" + std::to_string(q) +
                                 " d=" + std::to_string(d);
                        return false;
                    }
                }
            }
            for (const auto& v : solve.value) {
                if (v < 0 || v > 1) {
                    detail = "value outside [0,1]";
                    return false;
                }
                BigRational c = v;
                c.canonicalize();
                if (c != v) {
                    detail = "non-canonical rational in the output";
                    return false;
                }
            }
        }
    }
    return true;
}

// ---- criterion 10: performance floor --------------------------------------------
bool criterion_performance(std::string& detail) {
    const std::uint64_t N = 100000000;
    const ParamVector s = vec(2, {1, 0, 0, 0, 0});

    const auto t0 = std::chrono::steady_clock::now();
    const auto serial = counting::gamma(Base(2), s, N);
    const auto t1 = std::chrono::steady_clock::now();
    const double serial_s = std::chrono::duration<double>(t1 - t0).count();
    const double rate = static_cast<double>(N) / serial_s;

    const auto t2 = std::chrono::steady_clock::now();
    const auto parallel = counting::gamma_parallel(Base(2), s, N, 8);
    const auto t3 = std::chrono::steady_clock::now();
    const double parallel_s = std::chrono::duration<double>(t3 - t2).count();

    char buf[256];
    std::snprintf(buf, sizeof buf, "serial %.2e n/s, parallel(8) %.2fs, counts %llu/%llu", rate,
                  parallel_s, static_cast<unsigned long long>(serial.count),
                  static_cast<unsigned long long>(parallel.count));
    detail = buf;

    if (parallel.count != serial.count) return false;
    if (rate < 5e7) return false;
    if (parallel_s >= 5.0) return false;
    return true;
}

}  // namespace

int main() {
    struct Item {
        int id;
        const char* title;
        CheckFn fn;
    };
    const std::vector<Item> items{
        {1, "recurrence oracle gamma(qA) = sum over lambda of gamma(A; s M_lambda)",
         criterion_recurrence},
        {2, "chain/count equivalence P^k g0 = gamma(q^k)/q^k", criterion_chain_count},
        {3, "w-family densities equal the gcd closed form", criterion_w_family},
        {4, "d|q densities equal the divisor-sum closed form", criterion_d_divides_q},
        {5, "coprime densities equal 1/d with all states ergodic", criterion_coprime},
        {6, "empirical densities respect the liminf bound", criterion_liminf},
        {7, "structural matrix facts", criterion_matrices},
        {8, "valuation identity suite", criterion_identities},
        {9, "eigenvector identity and rationality of outputs", criterion_eigenvector},
        {10, "performance floor for residue-streamed counting", criterion_performance},
    };

    int failures = 0;
    for (const auto& item : items) {
        std::string detail;
        const auto start = std::chrono::steady_clock::now();
        bool ok = false;
        try {
            ok = item.fn(detail);
        } catch (const std::exception& e) {
            detail = std::string("exception: ") + e.what();
        }
        const double secs =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        std::printf("[%s] criterion %2d: %s (%.1fs)%s%s\n", ok ? "PASS" : "FAIL", item.id,
                    item.title, secs, detail.empty() ? "" : " -- ", detail.c_str());
        std::fflush(stdout);
        if (!ok) ++failures;
    }
    if (failures) std::printf("acceptance: %d criterion(s) FAILED\n", failures);
    else std::printf("acceptance: all criteria passed\n");
    return failures;
}
