#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "qdensity/chain.hpp"
#include "qdensity/params.hpp"
#include "qdensity/rational.hpp"

namespace qdensity {
namespace polya {

/// Cyclic model of a Dedekind domain with a single nonprincipal Pi_q:
/// q is the norm of Pi_q, d the order of its class (= |Po(D)|). The class
/// of char_n is Pi_q^(-w_q(n) mod d), the class of Int_n is
/// Pi_q^(-u_q(n) mod d), so every distribution question reduces to the
/// density engines.
struct PolyaModel {
    Base base;
    Modulus group_order;

    PolyaModel(Base b, Modulus d) : base(b), group_order(d) {}
};

// Exponents (-w_q(n) mod d, -u_q(n) mod d): the classes of char_n and of
// the characteristic part of Int_n. Canonical representatives in [0, d).
std::pair<std::uint32_t, std::uint32_t> class_exponents(const PolyaModel& model, std::uint64_t n);

struct PolyaRow {
    std::uint32_t exponent = 0;    // g in Z/dZ
    BigRational char_density;      // density of { n : [char_n] = Pi^g }, always 1/d
    BigRational int_density;       // density of { n : [Int_n class] = Pi^g }
    std::string engine;            // "closed-form" or "chain-exact"
    bool conditional = false;      // value assumes the density exists
};

/// Limit distribution of the two class maps over Z/dZ. Row g solves
/// u_q(n) = -g (mod d); g = 0 is the freeness density of Int_n.
struct PolyaReport {
    std::uint64_t q = 0;
    std::uint32_t d = 0;
    std::vector<PolyaRow> rows;

    const BigRational& freeness_density() const { return rows.front().int_density; }
};

PolyaReport polya_report(const PolyaModel& model, const chain::BuildOptions& opts = {});

nlohmann::json to_json(const PolyaReport& rep);
std::string to_table(const PolyaReport& rep);

}  // namespace polya
}  // namespace qdensity
