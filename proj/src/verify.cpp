#include "qdensity/verify.hpp"

#include <cmath>
#include <numeric>
#include <random>
#include <unordered_map>

#include "qdensity/chain.hpp"
#include "qdensity/closedform.hpp"
#include "qdensity/counting.hpp"
#include "qdensity/transform.hpp"

namespace qdensity {
namespace verify {

namespace {

ParamVector random_vector(Modulus m, std::mt19937_64& rng) {
    std::uniform_int_distribution<std::uint32_t> pick(0, m.d - 1);
    return ParamVector(m, std::array<std::uint32_t, 5>{pick(rng), pick(rng), pick(rng), pick(rng),
                                                       pick(rng)});
}

// Slow reference count: re-evaluates the form per n through the exact
// valuations path.
std::uint64_t gamma_naive(Base base, const ParamVector& s, std::uint64_t A) {
    std::uint64_t count = 0;
    for (std::uint64_t n = 0; n < A; ++n)
        count += (counting::evaluate_form(base, s, n) == 0);
    return count;
}

void push(SuiteResult& r, const std::string& name, bool ok, const std::string& detail = "") {
    r.checks.push_back(Check{name, ok, ok ? "" : detail});
}

}  // namespace

SuiteResult identities(const Options& opts) {
    SuiteResult r{"identities", {}};

    {
        bool ok = true;
        std::string detail;
        for (std::uint64_t q = 2; q <= opts.q_max && ok; ++q) {
            Base base(q);
            valuations::Stream stream(base);
            for (std::uint64_t n = 0; n <= opts.n_max && ok; ++n) {
                const BigInt w = valuations::w_direct(base, n);
                const BigInt s = valuations::digit_sum(base, n);
                if ((BigInt(n) - s) % (q - 1) != 0 || w != (BigInt(n) - s) / (q - 1)) {
                    ok = false;
                    detail = "digit-sum identity fails at q=" + std::to_string(q) +
                             " n=" + std::to_string(n);
                }
                const auto e = stream.next();
                if (e.n != n || e.w != w || e.u != valuations::u_direct(base, n)) {
                    ok = false;
                    detail = "stream/random-access mismatch at q=" + std::to_string(q) +
                             " n=" + std::to_string(n);
                }
            }
        }
        push(r, "w_q digit-sum identity and streaming agreement", ok, detail);
    }

    {
        bool ok = true;
        std::string detail;
        for (std::uint64_t q = 2; q <= opts.q_max && ok; ++q) {
            Base base(q);
            for (std::uint64_t a = 0; a <= opts.a_max && ok; ++a) {
                for (std::uint64_t lambda = 0; lambda < q; ++lambda) {
                    if (!valuations::check_block_identities(base, a, lambda)) {
                        ok = false;
                        detail = "block identity fails at q=" + std::to_string(q) +
                                 " a=" + std::to_string(a) + " lambda=" + std::to_string(lambda);
                        break;
                    }
                }
            }
        }
        push(r, "block shift lemmas and in-block step identity", ok, detail);
    }

    {
        bool ok = true;
        std::string detail;
        std::mt19937_64 rng(opts.seed);
        std::uniform_int_distribution<std::int64_t> coeff(-20, 20);
        for (std::uint64_t q = 2; q <= opts.q_max && ok; ++q) {
            for (int trial = 0; trial < 5 && ok; ++trial) {
                const std::int64_t psi = coeff(rng), theta = coeff(rng);
                if (!valuations::is_q_additive_sample(Base(q), psi, theta,
                                                      std::min<std::uint64_t>(opts.n_max, 2000))) {
                    ok = false;
                    detail = "psi*w+theta*n not q-additive at q=" + std::to_string(q) +
                             " psi=" + std::to_string(psi) + " theta=" + std::to_string(theta);
                }
            }
        }
        push(r, "q-additivity of psi*w_q + theta*n", ok, detail);
    }

    {
        bool ok = true;
        std::string detail;
        for (std::uint64_t q = 2; q <= 10; ++q) {
            Base base(q);
            const BigInt lhs = valuations::u_direct(base, q + 1);
            const BigInt rhs = valuations::u_direct(base, q) + valuations::u_direct(base, 1);
            if (lhs != 2 || rhs != 1) {
                ok = false;
                detail = "u_q additivity counterexample failed at q=" + std::to_string(q);
            }
        }
        push(r, "u_q(q+1) = 2 != 1 = u_q(q) + u_q(1)", ok, detail);
    }

    return r;
}

SuiteResult recurrence(const Options& opts) {
    SuiteResult r{"recurrence", {}};
    std::mt19937_64 rng(opts.seed);

    {
        bool ok = true;
        std::string detail;
        for (std::uint64_t q = 2; q <= opts.q_max && ok; ++q) {
            for (std::uint64_t d = 2; d <= opts.d_max && ok; ++d) {
                Modulus m(d);
                for (unsigned i = 0; i < opts.vectors && ok; ++i) {
                    const ParamVector s = random_vector(m, rng);
                    for (std::uint64_t A : {std::uint64_t{1}, std::uint64_t{7}, std::uint64_t{64},
                                            std::uint64_t{1000}}) {
                        if (!counting::check_recurrence(Base(q), s, A)) {
                            ok = false;
                            detail = "recurrence fails at q=" + std::to_string(q) +
                                     " d=" + std::to_string(d) + " s=" + s.str() +
                                     " A=" + std::to_string(A);
                            break;
                        }
                    }
                }
            }
        }
        push(r, "gamma(qA; s) = sum over lambda of gamma(A; s M_lambda)", ok, detail);
    }

    {
        bool ok = true;
        std::string detail;
        for (std::uint64_t q = 2; q <= opts.q_max && ok; ++q) {
            for (std::uint64_t d = 2; d <= opts.d_max && ok; ++d) {
                Modulus m(d);
                const ParamVector base_vec = random_vector(m, rng);
                const std::uint64_t A = 5000;
                std::uint64_t total = 0;
                for (std::uint32_t x = 0; x < d; ++x) {
                    ParamVector s(m, std::array<std::uint32_t, 5>{base_vec[0], base_vec[1],
                                                                  base_vec[2], base_vec[3], x});
                    total += counting::gamma(Base(q), s, A).count;
                }
                if (total != A) {
                    ok = false;
                    detail = "partition fails at q=" + std::to_string(q) + " d=" + std::to_string(d);
                }
            }
        }
        push(r, "counts over all theta_0 partition [0, A)", ok, detail);
    }

    {
        bool ok = true;
        std::string detail;
        for (int trial = 0; trial < 5 && ok; ++trial) {
            const std::uint64_t q = 2 + rng() % (opts.q_max - 1);
            const std::uint64_t d = 2 + rng() % (opts.d_max - 1);
            Modulus m(d);
            const ParamVector s = random_vector(m, rng);
            const std::uint64_t A = 100000 + rng() % 50000;
            const std::uint64_t serial = counting::gamma(Base(q), s, A).count;
            for (unsigned chunks : {1u, 2u, 3u, 8u, 64u}) {
                if (counting::gamma_parallel(Base(q), s, A, chunks).count != serial) {
                    ok = false;
                    detail = "chunked count differs at q=" + std::to_string(q) +
                             " d=" + std::to_string(d) + " chunks=" + std::to_string(chunks);
                }
            }
        }
        push(r, "chunked counting is bit-identical to serial", ok, detail);
    }

    {
        bool ok = true;
        std::string detail;
        for (int trial = 0; trial < 3 && ok; ++trial) {
            const std::uint64_t q = 2 + rng() % (opts.q_max - 1);
            const std::uint64_t d = 2 + rng() % (opts.d_max - 1);
            Modulus m(d);
            const ParamVector s = random_vector(m, rng);
            const std::uint64_t A = 10000;
            if (counting::gamma(Base(q), s, A).count != gamma_naive(Base(q), s, A)) {
                ok = false;
                detail = "residue stream disagrees with naive evaluation at q=" +
                         std::to_string(q) + " d=" + std::to_string(d) + " s=" + s.str();
            }
        }
        push(r, "residue stream matches naive re-evaluation", ok, detail);
    }

    return r;
}

SuiteResult stochastic(const Options& opts) {
    SuiteResult r{"stochastic", {}};
    std::mt19937_64 rng(opts.seed);
    chain::BuildOptions bopts;
    bopts.state_budget = opts.state_budget;
    bopts.override_budget = true;

    {
        bool ok = true;
        std::string detail;
        for (std::uint64_t q = 2; q <= opts.q_max && ok; ++q) {
            for (std::uint64_t d = 2; d <= opts.d_max && ok; ++d) {
                Modulus m(d);
                std::vector<ParamVector> seeds;
                for (int i = 0; i < 5; ++i) seeds.push_back(random_vector(m, rng));
                const auto g = chain::build_chain(Base(q), m, seeds, bopts);
                for (std::size_t v = 0; v < g.states.size(); ++v) {
                    std::uint64_t sum = 0;
                    for (const auto& e : g.edges[v]) sum += e.mult;
                    if (sum != q) {
                        ok = false;
                        detail = "row multiplicities sum to " + std::to_string(sum) +
                                 " != q at q=" + std::to_string(q) + " d=" + std::to_string(d);
                        break;
                    }
                }
            }
        }
        push(r, "transition multiplicities sum to q at every state", ok, detail);
    }

    {
        bool ok = true;
        std::string detail;
        const std::uint64_t qd_cap = std::min<std::uint64_t>(opts.q_max, 4);
        for (std::uint64_t q = 2; q <= qd_cap && ok; ++q) {
            for (std::uint64_t d = 2; d <= std::min<std::uint64_t>(opts.d_max, 4) && ok; ++d) {
                Modulus m(d);
                for (int i = 0; i < 3 && ok; ++i) {
                    const ParamVector s = random_vector(m, rng);
                    const auto traj = chain::iterate_density(Base(q), m, s, 6, bopts);
                    std::uint64_t power = 1;
                    for (unsigned k = 0; k <= 6; ++k) {
                        const auto cnt = counting::gamma(Base(q), s, power).count;
                        BigRational expected(static_cast<unsigned long>(cnt),
                                             static_cast<unsigned long>(power));
                        expected.canonicalize();
                        if (traj[k] != expected) {
                            ok = false;
                            detail = "iterate != gamma(q^k)/q^k at q=" + std::to_string(q) +
                                     " d=" + std::to_string(d) + " k=" + std::to_string(k);
                            break;
                        }
                        power *= q;
                    }
                }
            }
        }
        push(r, "P^k iterates equal gamma(q^k)/q^k exactly", ok, detail);
    }

    {
        bool ok = true;
        std::string detail;
        for (std::uint64_t q = 2; q <= opts.q_max && ok; ++q) {
            for (std::uint64_t d = 2; d <= opts.d_max && ok; ++d) {
                Modulus m(d);
                std::vector<ParamVector> seeds;
                for (int i = 0; i < 3; ++i) seeds.push_back(random_vector(m, rng));
                const auto solve = chain::solve_density(Base(q), m, seeds, bopts);
                if (!solve.eigenvector_exact) {
                    ok = false;
                    detail = "v = Pv failed at q=" + std::to_string(q) + " d=" + std::to_string(d);
                }
                for (std::uint32_t c : solve.dec.ergodic_ids) {
                    for (std::uint32_t v : solve.dec.members[c]) {
                        if (solve.value[v] != solve.class_value[c]) {
                            ok = false;
                            detail = "density not constant on an ergodic class";
                        }
                    }
                }
                for (const auto& v : solve.value) {
                    if (v < 0 || v > 1) {
                        ok = false;
                        detail = "density outside [0, 1]";
                    }
                }
            }
        }
        push(r, "exact eigenvector v = Pv, constant on ergodic classes, in [0,1]", ok, detail);
    }

    {
        // Stationary distributions: exact balance plus a floating-point
        // power-iteration diagnostic on aperiodic classes.
        bool ok = true;
        std::string detail;
        for (std::uint64_t q = 2; q <= std::min<std::uint64_t>(opts.q_max, 4) && ok; ++q) {
            for (std::uint64_t d = 2; d <= std::min<std::uint64_t>(opts.d_max, 4) && ok; ++d) {
                Modulus m(d);
                const ParamVector s = random_vector(m, rng);
                const auto g = chain::build_chain(Base(q), m, {s}, bopts);
                const auto dec = chain::decompose(g);
                for (std::uint32_t c : dec.ergodic_ids) {
                    const auto pi = chain::stationary(g, dec, c);
                    const auto& mem = dec.members[c];
                    std::unordered_map<std::uint32_t, std::size_t> pos;
                    for (std::size_t i = 0; i < mem.size(); ++i) pos[mem[i]] = i;
                    // exact: pi P = pi
                    std::vector<BigRational> img(mem.size(), BigRational(0));
                    for (std::size_t i = 0; i < mem.size(); ++i) {
                        for (const auto& e : g.edges[mem[i]])
                            img[pos.at(e.to)] += pi[i] * BigRational(static_cast<long>(e.mult));
                    }
                    for (std::size_t i = 0; i < mem.size(); ++i) {
                        BigRational lhs = pi[i] * BigRational(static_cast<long>(q));
                        lhs.canonicalize();
                        img[i].canonicalize();
                        if (img[i] != lhs) {
                            ok = false;
                            detail = "pi P != pi at q=" + std::to_string(q) +
                                     " d=" + std::to_string(d);
                        }
                    }
                    if (dec.period[c] == 1) {
                        // plain power iteration converges; compare at 1e-9
                        std::vector<double> v(mem.size(), 1.0 / static_cast<double>(mem.size()));
                        for (int it = 0; it < 20000; ++it) {
                            std::vector<double> nv(mem.size(), 0.0);
                            for (std::size_t i = 0; i < mem.size(); ++i)
                                for (const auto& e : g.edges[mem[i]])
                                    nv[pos.at(e.to)] += v[i] * e.mult / static_cast<double>(q);
                            double delta = 0;
                            for (std::size_t i = 0; i < mem.size(); ++i)
                                delta = std::max(delta, std::fabs(nv[i] - v[i]));
                            v = std::move(nv);
                            if (delta < 1e-13) break;
                        }
                        for (std::size_t i = 0; i < mem.size(); ++i) {
                            if (std::fabs(v[i] - pi[i].get_d()) > 1e-9) {
                                ok = false;
                                detail = "power iteration disagrees with exact stationary";
                            }
                        }
                    }
                }
            }
        }
        push(r, "stationary distributions: exact balance + float diagnostic", ok, detail);
    }

    return r;
}

SuiteResult theorems(const Options& opts) {
    SuiteResult r{"theorems", {}};
    std::mt19937_64 rng(opts.seed);
    chain::BuildOptions bopts;
    bopts.state_budget = opts.state_budget;
    bopts.override_budget = true;

    {
        // w-family closed form against the exact chain value.
        bool ok = true;
        std::string detail;
        for (std::uint64_t q = 2; q <= opts.q_max && ok; ++q) {
            for (std::uint64_t d = 2; d <= opts.d_max && ok; ++d) {
                Modulus m(d);
                std::vector<ParamVector> seeds;
                for (std::uint32_t psi = 0; psi < d; ++psi)
                    for (std::uint32_t theta = 0; theta < d; ++theta)
                        for (std::uint32_t x = 0; x < d; ++x)
                            seeds.emplace_back(
                                m, std::array<std::uint32_t, 5>{0, psi, 0, theta, x});
                const auto solve = chain::solve_density(Base(q), m, seeds, bopts);
                for (const auto& s : seeds) {
                    if (s.theta_w() == 0 && s.theta_1() == 0) continue;
                    const auto cf = closedform::delta_w_form(Base(q), m, s.theta_w(), s.theta_1(),
                                                             s.theta_0());
                    const auto got = solve.value[*solve.graph.index_of(s.coeffs())];
                    if (got != *cf.value) {
                        ok = false;
                        detail = "w-family mismatch at q=" + std::to_string(q) +
                                 " d=" + std::to_string(d) + " s=" + s.str();
                        break;
                    }
                }
            }
        }
        push(r, "w-family densities: chain-exact equals gcd formula", ok, detail);
    }

    {
        // d | q divisor-sum formula against the chain.
        bool ok = true;
        std::string detail;
        for (std::uint64_t q = 2; q <= opts.q_max && ok; ++q) {
            for (std::uint64_t d = 2; d <= std::min(opts.d_max, q) && ok; ++d) {
                if (q % d != 0) continue;
                Modulus m(d);
                BigRational total(0);
                for (std::uint32_t x = 0; x < d; ++x) {
                    ParamVector s(m, std::array<std::uint32_t, 5>{1, 0, 0, 0, x});
                    const auto rep = chain::exact_density(Base(q), m, s, bopts);
                    const auto cf = closedform::delta_u_d_divides_q(Base(q), m, x);
                    if (rep.value != *cf.value) {
                        ok = false;
                        detail = "divisor-sum mismatch at q=" + std::to_string(q) +
                                 " d=" + std::to_string(d) + " x=" + std::to_string(x);
                    }
                    total += rep.value;
                }
                total.canonicalize();
                if (total != 1) {
                    ok = false;
                    detail = "divisor-sum values do not sum to 1 at q=" + std::to_string(q) +
                             " d=" + std::to_string(d);
                }
            }
        }
        push(r, "d|q divisor-sum densities match the chain and sum to 1", ok, detail);
    }

    {
        // Coprime case: all values 1/d, every state ergodic.
        bool ok = true;
        std::string detail;
        for (std::uint64_t q = 2; q <= opts.q_max && ok; ++q) {
            for (std::uint64_t d = 2; d <= opts.d_max && ok; ++d) {
                if (std::gcd(q, d) != 1) continue;
                Modulus m(d);
                std::uniform_int_distribution<std::uint32_t> pick(0, static_cast<std::uint32_t>(d - 1));
                for (int i = 0; i < 3 && ok; ++i) {
                    std::uint32_t tu = pick(rng);
                    while (std::gcd<std::uint64_t>(tu, d) != 1) tu = pick(rng);
                    ParamVector s(m, std::array<std::uint32_t, 5>{tu, pick(rng), 0, 0, pick(rng)});
                    const auto rep = chain::exact_density(Base(q), m, s, bopts);
                    BigRational expect(1, static_cast<unsigned long>(d));
                    expect.canonicalize();
                    if (rep.value != expect) {
                        ok = false;
                        detail = "coprime density != 1/d at q=" + std::to_string(q) +
                                 " d=" + std::to_string(d) + " s=" + s.str();
                    }
                }
            }
        }
        push(r, "coprime case: chain-exact density equals 1/d", ok, detail);
    }

    {
        // Matrix structure: det = q^4, N submatrix, mixing products,
        // rational inverse shape, column divisibility.
        bool ok = true;
        std::string detail;
        for (std::uint64_t q = 2; q <= opts.q_max && ok; ++q) {
            Base base(q);
            for (std::uint64_t d = 2; d <= opts.d_max && ok; ++d) {
                Modulus m(d);
                for (std::uint64_t lambda = 0; lambda < q; ++lambda) {
                    const auto M = transform::build_m(base, m, lambda);
                    BigInt q4 = BigInt(static_cast<unsigned long>(q));
                    mpz_pow_ui(q4.get_mpz_t(), q4.get_mpz_t(), 4);
                    if (transform::det_mod(M) !=
                        static_cast<std::uint32_t>(mpz_fdiv_ui(q4.get_mpz_t(), m.d))) {
                        ok = false;
                        detail = "det != q^4 mod d";
                    }
                    const auto N = transform::build_n(base, m, lambda);
                    const int rows[3] = {1, 3, 4};
                    for (int i = 0; i < 3 && ok; ++i)
                        for (int j = 0; j < 3; ++j)
                            if (N.at(i, j) != M.at(rows[i], rows[j])) {
                                ok = false;
                                detail = "N_lambda is not the (2,4,5) submatrix";
                            }
                }
                if (std::gcd(q, d) == 1) {
                    for (std::uint64_t lambda = 0; lambda < q && ok; ++lambda) {
                        const auto M = transform::build_m(base, m, lambda);
                        const auto inv = transform::invert(M);
                        if (!(transform::invert(inv) == M)) {
                            ok = false;
                            detail = "invert(invert(M)) != M";
                        }
                    }
                }
            }
            if (!transform::column_divisibility_check(base, 4, 25, opts.seed)) {
                ok = false;
                detail = "column divisibility by q^n fails at q=" + std::to_string(q);
            }
            const auto inv0 = transform::rational_inverse(transform::lift_matrix(base, 0));
            BigRational expect(-1, static_cast<unsigned long>(q * q));
            expect.canonicalize();
            if (inv0[0][2] != expect) {
                ok = false;
                detail = "rational inverse (1,3) entry is not -1/q^2";
            }
        }
        push(r, "matrix structure facts (determinant, submatrix, inverses)", ok, detail);
    }

    {
        // liminf bound against empirical counts.
        bool ok = true;
        std::string detail;
        for (std::uint64_t q = 2; q <= opts.q_max && ok; ++q) {
            for (std::uint64_t d = 2; d <= opts.d_max && ok; ++d) {
                Modulus m(d);
                const double bound = closedform::liminf_bound(Base(q), m).get_d();
                const auto hist = counting::residue_histogram(
                    Base(q), m, std::array<std::uint32_t, 4>{1, 0, 0, 0}, opts.empirical_n);
                for (std::uint32_t x = 0; x < d; ++x) {
                    const double density = static_cast<double>(hist[(d - x) % d]) /
                                           static_cast<double>(opts.empirical_n);
                    if (density < bound - 0.01) {
                        ok = false;
                        detail = "empirical density below liminf bound at q=" + std::to_string(q) +
                                 " d=" + std::to_string(d) + " x=" + std::to_string(x);
                    }
                }
            }
        }
        push(r, "empirical densities respect the liminf lower bound", ok, detail);
    }

    return r;
}

std::vector<SuiteResult> run_all(const Options& opts) {
    return {identities(opts), recurrence(opts), stochastic(opts), theorems(opts)};
}

}  // namespace verify
}  // namespace qdensity
