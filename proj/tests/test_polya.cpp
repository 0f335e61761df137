#include <doctest.h>

#include "oracles.hpp"
#include "qdensity/closedform.hpp"
#include "qdensity/polya.hpp"

using namespace qdensity;
namespace po = qdensity::polya;

TEST_CASE("class exponents") {
    const po::PolyaModel m23(Base(2), Modulus(3));
    CHECK(po::class_exponents(m23, 0) == std::pair<std::uint32_t, std::uint32_t>{0, 0});
    // w_2(10) = 8, u_2(10) = 38: (-8 mod 3, -38 mod 3) = (1, 1)
    CHECK(po::class_exponents(m23, 10) == std::pair<std::uint32_t, std::uint32_t>{1, 1});

    const po::PolyaModel m22(Base(2), Modulus(2));
    CHECK(po::class_exponents(m22, 6) == std::pair<std::uint32_t, std::uint32_t>{0, 0});

    // agreement with direct recomputation from the definitions
    const auto table = oracle::build_wu_table(3, 10000);
    const po::PolyaModel m34(Base(3), Modulus(4));
    for (std::uint64_t n = 0; n <= 10000; ++n) {
        const auto [cw, cu] = po::class_exponents(m34, n);
        CHECK(cw == (4 - mpz_fdiv_ui(table.w[n].get_mpz_t(), 4)) % 4);
        CHECK(cu == (4 - mpz_fdiv_ui(table.u[n].get_mpz_t(), 4)) % 4);
    }
}

TEST_CASE("report for d | q uses the divisor sum") {
    const auto rep = po::polya_report(po::PolyaModel(Base(2), Modulus(2)));
    CHECK(rep.freeness_density() == BigRational(3, 4));
    CHECK(rep.rows[0].engine == "closed-form");
    CHECK(rep.rows[1].int_density == BigRational(1, 4));
    for (const auto& row : rep.rows) {
        CHECK(row.char_density == BigRational(1, 2));
        CHECK(!row.conditional);
    }
}

TEST_CASE("report for coprime q, d is uniform and conditional") {
    const auto rep = po::polya_report(po::PolyaModel(Base(3), Modulus(2)));
    CHECK(rep.freeness_density() == BigRational(1, 2));
    for (const auto& row : rep.rows) {
        CHECK(row.int_density == BigRational(1, 2));
        CHECK(row.char_density == BigRational(1, 2));
        CHECK(row.conditional);
    }
}

TEST_CASE("general case falls back to the chain and distributions sum to 1") {
    // q = 4, d = 6: neither d | q nor coprime.
    const auto rep = po::polya_report(po::PolyaModel(Base(4), Modulus(6)));
    BigRational char_total(0), int_total(0);
    for (const auto& row : rep.rows) {
        CHECK(row.char_density == BigRational(1, 6));
        char_total += row.char_density;
        int_total += row.int_density;
        CHECK(row.engine == "chain-exact");
    }
    char_total.canonicalize();
    int_total.canonicalize();
    CHECK(char_total == 1);
    CHECK(int_total == 1);
}

TEST_CASE("d | q freeness equals the divisor sum over all f | d") {
    for (const auto& [q, d] : std::vector<std::pair<std::uint64_t, std::uint32_t>>{
             {2, 2}, {4, 2}, {6, 6}, {9, 3}}) {
        const auto rep = po::polya_report(po::PolyaModel(Base(q), Modulus(d)));
        BigInt sum = 0;
        for (std::uint32_t f = 1; f <= d; ++f)
            if (d % f == 0) sum += BigInt(f) * closedform::euler_phi(d / f);
        BigRational expect(sum, BigInt(d) * d);
        expect.canonicalize();
        CHECK(rep.freeness_density() == expect);
    }
}

TEST_CASE("serialization") {
    const auto rep = po::polya_report(po::PolyaModel(Base(2), Modulus(2)));
    const auto j = po::to_json(rep);
    CHECK(j["freeness_density"] == "3/4");
    CHECK(j["rows"].size() == 2);

    const auto table = po::to_table(rep);
    CHECK(table.find("3/4") != std::string::npos);
    CHECK(table.find("freeness") != std::string::npos);
}
