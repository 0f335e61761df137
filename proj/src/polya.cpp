#include "qdensity/polya.hpp"

#include <numeric>
#include <sstream>

#include "qdensity/closedform.hpp"
#include "qdensity/valuations.hpp"

namespace qdensity {
namespace polya {

std::pair<std::uint32_t, std::uint32_t> class_exponents(const PolyaModel& model, std::uint64_t n) {
    const std::uint32_t d = model.group_order.d;
    const BigInt w = valuations::w_direct(model.base, n);
    const BigInt u = valuations::u_direct(model.base, n);
    const std::uint32_t wm = static_cast<std::uint32_t>(mpz_fdiv_ui(w.get_mpz_t(), d));
    const std::uint32_t um = static_cast<std::uint32_t>(mpz_fdiv_ui(u.get_mpz_t(), d));
    return {(d - wm) % d, (d - um) % d};
}

PolyaReport polya_report(const PolyaModel& model, const chain::BuildOptions& opts) {
    const Base base = model.base;
    const Modulus m = model.group_order;
    const std::uint32_t d = m.d;

    PolyaReport rep;
    rep.q = base.q;
    rep.d = d;

    const bool use_divisor_sum = (base.q % d == 0);
    const bool use_coprime = !use_divisor_sum && std::gcd(base.q, static_cast<std::uint64_t>(d)) == 1;

    // One chain solve covers all exponents when no closed form applies.
    std::optional<chain::DensitySolve> solve;
    if (!use_divisor_sum && !use_coprime) {
        std::vector<ParamVector> seeds;
        for (std::uint32_t g = 0; g < d; ++g)
            seeds.emplace_back(m, std::array<std::uint32_t, 5>{1, 0, 0, 0, g});
        solve.emplace(chain::solve_density(base, m, seeds, opts));
    }

    for (std::uint32_t g = 0; g < d; ++g) {
        PolyaRow row;
        row.exponent = g;

        // [char_n] = Pi^g means -w_q(n) = g, i.e. -w_q(n) - g = 0 (mod d).
        const auto char_form = closedform::delta_w_form(
            base, m, -1, 0, -static_cast<std::int64_t>(g));
        row.char_density = *char_form.value;

        // [Int_n class] = Pi^g means u_q(n) = -g, i.e. u_q(n) + g = 0 (mod d).
        if (use_divisor_sum) {
            row.int_density = *closedform::delta_u_d_divides_q(base, m, g).value;
            row.engine = "closed-form";
        } else if (use_coprime) {
            const auto r = closedform::delta_u_coprime(base, m, 1, 0, g);
            row.int_density = *r.value;
            row.engine = "closed-form";
            row.conditional = r.conditional;
        } else {
            const chain::State target{1, 0, 0, 0, g};
            row.int_density = solve->value[*solve->graph.index_of(target)];
            row.engine = "chain-exact";
            row.conditional = !closedform::existence_guaranteed(base, m);
        }
        rep.rows.push_back(std::move(row));
    }
    return rep;
}

nlohmann::json to_json(const PolyaReport& rep) {
    nlohmann::json j;
    j["q"] = rep.q;
    j["d"] = rep.d;
    j["exponent_convention"] = "class Pi^g solves u_q(n) = -g (mod d); exponents in [0, d)";
    j["rows"] = nlohmann::json::array();
    for (const auto& row : rep.rows) {
        j["rows"].push_back({
            {"exponent", row.exponent},
            {"char_density", to_fraction_string(row.char_density)},
            {"int_density", to_fraction_string(row.int_density)},
            {"engine", row.engine},
            {"conditional", row.conditional},
        });
    }
    j["freeness_density"] = to_fraction_string(rep.freeness_density());
    return j;
}

std::string to_table(const PolyaReport& rep) {
    std::ostringstream out;
    out << "Polya-Ostrowski cyclic model: q = " << rep.q << ", |Po(D)| = " << rep.d << "\n";
    out << "exponents g canonicalized to [0, d); row g solves u_q(n) = -g (mod d)\n";
    out << "  g   [char_n]=Pi^g     [Int_n class]=Pi^g   engine\n";
    for (const auto& row : rep.rows) {
        std::ostringstream cd, id;
        cd << to_fraction_string(row.char_density) << " = " << to_decimal(row.char_density, 6);
        id << to_fraction_string(row.int_density) << " = " << to_decimal(row.int_density, 6);
        out << "  " << row.exponent << "   " << cd.str() << "   " << id.str() << "   "
            << row.engine << (row.conditional ? " (conditional on existence)" : "");
        if (row.exponent == 0) out << "   <- freeness density";
        out << "\n";
    }
    return out.str();
}

}  // namespace polya
}  // namespace qdensity
