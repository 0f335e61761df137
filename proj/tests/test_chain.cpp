#include <doctest.h>

#include <cmath>
#include <map>
#include <random>

#include "qdensity/chain.hpp"
#include "qdensity/counting.hpp"
#include "qdensity/errors.hpp"

using namespace qdensity;
namespace ch = qdensity::chain;

namespace {

ParamVector vec(std::uint32_t d, std::int64_t a, std::int64_t b, std::int64_t c, std::int64_t e,
                std::int64_t f) {
    return ParamVector(Modulus(d), std::array<std::int64_t, 5>{a, b, c, e, f});
}

}  // namespace

TEST_CASE("absorbing seeds build singleton chains") {
    for (std::uint32_t x : {0u, 1u}) {
        const auto g = ch::build_chain(Base(3), Modulus(2), {vec(2, 0, 0, 0, 0, x)});
        REQUIRE(g.states.size() == 1);
        REQUIRE(g.edges[0].size() == 1);
        CHECK(g.edges[0][0].to == 0);
        CHECK(g.edges[0][0].mult == 3);

        const auto dec = ch::decompose(g);
        CHECK(dec.scc_count() == 1);
        CHECK(dec.ergodic[0]);
        CHECK(dec.period[0] == 1);
    }
}

TEST_CASE("closure from (1,0,0,0,0) at q=2, d=2") {
    const auto g = ch::build_chain(Base(2), Modulus(2), {vec(2, 1, 0, 0, 0, 0)});
    CHECK(g.index_of(ch::State{0, 1, 0, 1, 0}).has_value());
    CHECK(g.index_of(ch::State{0, 0, 0, 0, 0}).has_value());

    const auto dec = ch::decompose(g);
    const auto seed_scc = dec.scc_of[*g.index_of(ch::State{1, 0, 0, 0, 0})];
    CHECK(!dec.ergodic[seed_scc]);  // transient seed

    // row sums q at every state
    for (const auto& row : g.edges) {
        std::uint64_t sum = 0;
        for (const auto& e : row) sum += e.mult;
        CHECK(sum == 2);
    }
}

TEST_CASE("every state ergodic in the coprime case") {
    const auto g = ch::build_chain(Base(3), Modulus(2), {vec(2, 1, 0, 0, 0, 0)});
    const auto dec = ch::decompose(g);
    for (std::size_t v = 0; v < g.states.size(); ++v) CHECK(dec.ergodic[dec.scc_of[v]]);
}

TEST_CASE("budget is enforced unless overridden") {
    CHECK_THROWS_AS(ch::build_chain(Base(2), Modulus(64), {vec(64, 1, 0, 0, 0, 0)}),
                    StateBudgetError);
    ch::BuildOptions opts;
    opts.override_budget = true;
    CHECK_NOTHROW(ch::build_chain(Base(2), Modulus(64), {vec(64, 1, 0, 0, 0, 0)}, opts));
}

TEST_CASE("stationary distributions") {
    // Singleton class.
    const auto g1 = ch::build_chain(Base(4), Modulus(3), {vec(3, 0, 0, 0, 0, 0)});
    const auto dec1 = ch::decompose(g1);
    const auto pi1 = ch::stationary(g1, dec1, dec1.ergodic_ids[0]);
    CHECK(pi1.size() == 1);
    CHECK(pi1[0] == 1);

    // Two states, all q transitions crossing: period 2, stationary (1/2, 1/2).
    ch::ChainGraph toy;
    toy.q = 3;
    toy.d = 2;
    toy.states = {ch::State{0, 0, 0, 0, 0}, ch::State{0, 0, 0, 0, 1}};
    toy.edges = {{ch::Edge{1, 3}}, {ch::Edge{0, 3}}};
    toy.seeds = {0};
    const auto dect = ch::decompose(toy);
    REQUIRE(dect.scc_count() == 1);
    CHECK(dect.ergodic[0]);
    CHECK(dect.period[0] == 2);
    const auto pit = ch::stationary(toy, dect, 0);
    CHECK(pit[0] == BigRational(1, 2));
    CHECK(pit[1] == BigRational(1, 2));

    // Exact balance pi P = pi on the w-class reachable from (1,0,0,0,0).
    const auto g = ch::build_chain(Base(2), Modulus(2), {vec(2, 1, 0, 0, 0, 0)});
    const auto dec = ch::decompose(g);
    for (std::uint32_t c : dec.ergodic_ids) {
        const auto& mem = dec.members[c];
        const auto pi = ch::stationary(g, dec, c);
        BigRational total(0);
        for (const auto& p : pi) {
            CHECK(p > 0);
            total += p;
        }
        total.canonicalize();
        CHECK(total == 1);

        std::map<std::uint32_t, std::size_t> pos;
        for (std::size_t i = 0; i < mem.size(); ++i) pos[mem[i]] = i;
        std::vector<BigRational> img(mem.size(), BigRational(0));
        for (std::size_t i = 0; i < mem.size(); ++i)
            for (const auto& e : g.edges[mem[i]])
                img[pos.at(e.to)] += pi[i] * BigRational(static_cast<long>(e.mult));
        for (std::size_t i = 0; i < mem.size(); ++i) {
            BigRational want = pi[i] * 2;
            want.canonicalize();
            img[i].canonicalize();
            CHECK(img[i] == want);
        }

        // Power-iteration diagnostic with Cesaro averaging.
        std::vector<double> v(mem.size(), 0.0);
        v[0] = 1.0;
        std::vector<double> cesaro(mem.size(), 0.0);
        const int steps = 10000;
        for (int it = 0; it < steps; ++it) {
            std::vector<double> nv(mem.size(), 0.0);
            for (std::size_t i = 0; i < mem.size(); ++i)
                for (const auto& e : g.edges[mem[i]])
                    nv[pos.at(e.to)] += v[i] * e.mult / 2.0;
            v = std::move(nv);
            for (std::size_t i = 0; i < mem.size(); ++i) cesaro[i] += v[i] / steps;
        }
        for (std::size_t i = 0; i < mem.size(); ++i)
            CHECK(std::abs(cesaro[i] - pi[i].get_d()) < 1e-3);
    }

    CHECK_THROWS_AS(ch::stationary(g, dec, dec.scc_of[*g.index_of(ch::State{1, 0, 0, 0, 0})]),
                    std::invalid_argument);
}

TEST_CASE("absorption probabilities") {
    const auto g = ch::build_chain(Base(2), Modulus(2), {vec(2, 1, 0, 0, 0, 0)});
    const auto dec = ch::decompose(g);
    REQUIRE(dec.ergodic_ids.size() == 2);

    // From an ergodic state: everything lands in its own class.
    const auto zero_idx = *g.index_of(ch::State{0, 0, 0, 0, 0});
    const auto from_zero = ch::absorption(g, dec, zero_idx);
    BigRational sum(0);
    for (const auto& p : from_zero) sum += p;
    CHECK(sum == 1);
    for (std::size_t c = 0; c < dec.ergodic_ids.size(); ++c) {
        CHECK(from_zero[c] == ((dec.ergodic_ids[c] == dec.scc_of[zero_idx]) ? 1 : 0));
    }

    // The seed splits 1/2 : 1/2 between the zero class and the w-class.
    const auto seed_idx = *g.index_of(ch::State{1, 0, 0, 0, 0});
    const auto probs = ch::absorption(g, dec, seed_idx);
    CHECK(probs[0] == BigRational(1, 2));
    CHECK(probs[1] == BigRational(1, 2));

    // Monte Carlo cross-check, 10^6 walks: agreement within 3 sigma.
    std::mt19937_64 rng(424242);
    const int walks = 1000000;
    int hit_zero = 0;
    for (int wlk = 0; wlk < walks; ++wlk) {
        std::uint32_t at = seed_idx;
        while (!dec.ergodic[dec.scc_of[at]]) {
            std::uint64_t pick = rng() % g.q;
            for (const auto& e : g.edges[at]) {
                if (pick < e.mult) {
                    at = e.to;
                    break;
                }
                pick -= e.mult;
            }
        }
        if (dec.scc_of[at] == dec.scc_of[zero_idx]) ++hit_zero;
    }
    const double p_hat = static_cast<double>(hit_zero) / walks;
    const double sigma = std::sqrt(0.5 * 0.5 / walks);
    CHECK(std::abs(p_hat - 0.5) < 3 * sigma);
}

TEST_CASE("exact densities") {
    CHECK(ch::exact_density(Base(3), Modulus(4), vec(4, 0, 0, 0, 0, 0)).value == 1);
    CHECK(ch::exact_density(Base(3), Modulus(4), vec(4, 0, 0, 0, 0, 3)).value == 0);

    const auto rep = ch::exact_density(Base(2), Modulus(2), vec(2, 1, 0, 0, 0, 0));
    CHECK(rep.value == BigRational(3, 4));
    CHECK(rep.method == "chain-exact");
    CHECK(rep.existence_guaranteed);
    CHECK(rep.eigenvector_exact);
    CHECK(rep.states == 4);

    // matches the empirical count at N = 2^20 within 0.01
    const auto emp = counting::empirical_density(Base(2), vec(2, 1, 0, 0, 0, 0), 1 << 20);
    CHECK(std::abs(emp.value.get_d() - rep.value.get_d()) < 0.01);
}

TEST_CASE("iterated distribution equals gamma(q^k)/q^k") {
    const auto traj = ch::iterate_density(Base(2), Modulus(2), vec(2, 1, 0, 0, 0, 0), 3);
    CHECK(traj[0] == 1);  // theta_0 = 0
    CHECK(traj[3] == BigRational(3, 4));

    const auto traj3 = ch::iterate_density(Base(3), Modulus(2), vec(2, 1, 0, 0, 0, 0), 6);
    std::uint64_t power = 1;
    for (unsigned k = 0; k <= 6; ++k) {
        const auto cnt = counting::gamma(Base(3), vec(2, 1, 0, 0, 0, 0), power).count;
        BigRational expect(static_cast<unsigned long>(cnt), static_cast<unsigned long>(power));
        expect.canonicalize();
        CHECK(traj3[k] == expect);
        power *= 3;
    }

    // mixed case: gcd(q,d) = 2 but d does not divide a power of q. The
    // reachable classes have period 3 and convergence is slow; the exact
    // trajectory still matches the counts term by term.
    const auto traj46 = ch::iterate_density(Base(4), Modulus(6), vec(6, 1, 0, 0, 0, 0), 10);
    power = 1;
    for (unsigned k = 0; k <= 10; ++k) {
        const auto cnt = counting::gamma(Base(4), vec(6, 1, 0, 0, 0, 0), power).count;
        BigRational expect(static_cast<unsigned long>(cnt), static_cast<unsigned long>(power));
        expect.canonicalize();
        CHECK(traj46[k] == expect);
        power *= 4;
    }
    CHECK(traj46[6] == BigRational(547, 2048));
}

TEST_CASE("density vector is an exact eigenvector, constant on classes") {
    std::mt19937_64 rng(99);
    for (std::uint64_t q : {2, 3}) {
        for (std::uint32_t d : {2u, 4u}) {
            Modulus m(d);
            std::vector<ParamVector> seeds;
            for (int i = 0; i < 4; ++i) {
                std::array<std::int64_t, 5> raw{};
                for (auto& c : raw) c = static_cast<std::int64_t>(rng() % d);
                seeds.emplace_back(m, raw);
            }
            const auto solve = ch::solve_density(Base(q), m, seeds);
            CHECK(solve.eigenvector_exact);
            CHECK(ch::is_eigenvector(solve.graph, solve.value));
            for (std::uint32_t c : solve.dec.ergodic_ids)
                for (std::uint32_t s : solve.dec.members[c])
                    CHECK(solve.value[s] == solve.class_value[c]);
            for (const auto& v : solve.value) {
                CHECK(v >= 0);
                CHECK(v <= 1);
            }
        }
    }
}

TEST_CASE("row multiplicities sum to q everywhere") {
    std::mt19937_64 rng(1234);
    for (std::uint64_t q = 2; q <= 6; ++q) {
        for (std::uint32_t d = 2; d <= 6; ++d) {
            Modulus m(d);
            std::vector<ParamVector> seeds;
            for (int i = 0; i < 50; ++i) {
                std::array<std::int64_t, 5> raw{};
                for (auto& c : raw) c = static_cast<std::int64_t>(rng() % d);
                seeds.emplace_back(m, raw);
            }
            const auto g = ch::build_chain(Base(q), m, seeds);
            for (const auto& row : g.edges) {
                std::uint64_t sum = 0;
                for (const auto& e : row) sum += e.mult;
                REQUIRE(sum == q);
            }
        }
    }
}

TEST_CASE("density partition over theta_0 when raw limits exist") {
    std::mt19937_64 rng(555);
    for (const auto& [q, d] : std::vector<std::pair<std::uint64_t, std::uint32_t>>{
             {2, 2}, {4, 2}, {4, 4}, {6, 6}, {3, 5}}) {
        Modulus m(d);
        std::array<std::int64_t, 5> head{};
        for (int i = 0; i < 4; ++i) head[i] = static_cast<std::int64_t>(rng() % d);
        bool all_raw = true;
        BigRational total(0);
        for (std::uint32_t x = 0; x < d; ++x) {
            auto raw = head;
            raw[4] = x;
            const auto rep = ch::exact_density(Base(q), m, ParamVector(m, raw));
            all_raw = all_raw && rep.raw_limit_exists;
            total += rep.value;
        }
        total.canonicalize();
        if (all_raw) CHECK(total == 1);
    }

    // the (2,2) u-family case both partitions and has raw limits
    BigRational total(0);
    for (std::uint32_t x = 0; x < 2; ++x) {
        const auto rep = ch::exact_density(Base(2), Modulus(2), vec(2, 1, 0, 0, 0, x));
        CHECK(rep.raw_limit_exists);
        total += rep.value;
    }
    total.canonicalize();
    CHECK(total == 1);
}

TEST_CASE("exports") {
    const auto g = ch::build_chain(Base(2), Modulus(2), {vec(2, 1, 0, 0, 0, 0)});
    const auto dec = ch::decompose(g);
    const auto dot = ch::to_dot(g, &dec);
    CHECK(dot.find("digraph chain") != std::string::npos);
    CHECK(dot.find("1/2") != std::string::npos);

    const auto solve = ch::solve_density(Base(2), Modulus(2), {vec(2, 1, 0, 0, 0, 0)});
    const auto j = ch::export_json(solve.graph, solve.dec, &solve.value);
    CHECK(j["q"] == 2);
    CHECK(j["d"] == 2);
    CHECK(j["states"].size() == 4);
    CHECK(j.contains("sccs"));
    CHECK(j.contains("ergodic"));
    CHECK(j.contains("periods"));
    CHECK(j.contains("densities"));
    std::uint64_t mult_total = 0;
    for (const auto& e : j["edges"]) mult_total += e["mult"].get<std::uint64_t>();
    CHECK(mult_total == 2 * g.states.size());
}
