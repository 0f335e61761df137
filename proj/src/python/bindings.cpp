#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "qdensity/chain.hpp"
#include "qdensity/closedform.hpp"
#include "qdensity/counting.hpp"
#include "qdensity/errors.hpp"
#include "qdensity/polya.hpp"
#include "qdensity/transform.hpp"
#include "qdensity/valuations.hpp"
#include "qdensity/verify.hpp"

namespace py = pybind11;
using namespace qdensity;

namespace {

py::object py_int(const BigInt& v) {
    return py::module_::import("builtins").attr("int")(v.get_str());
}

py::object py_fraction(const BigRational& r) {
    return py::module_::import("fractions").attr("Fraction")(to_fraction_string(r));
}

ParamVector make_vector(std::uint64_t d, const std::array<std::int64_t, 5>& coeffs) {
    return ParamVector(Modulus(d), coeffs);
}

py::dict closed_form_dict(const closedform::ClosedFormResult& cf) {
    py::dict out;
    out["covered"] = cf.covered();
    out["formula"] = cf.formula;
    out["conditional"] = cf.conditional;
    out["tags"] = cf.tags;
    out["hypotheses_held"] = cf.hypotheses_held;
    out["hypotheses_failed"] = cf.hypotheses_failed;
    out["value"] = cf.covered() ? py_fraction(*cf.value) : py::none();
    return out;
}

py::dict report_dict(const chain::DensityReport& rep) {
    py::dict out;
    out["value"] = py_fraction(rep.value);
    out["method"] = rep.method;
    out["existence_guaranteed"] = rep.existence_guaranteed;
    out["raw_limit_exists"] = rep.raw_limit_exists;
    out["eigenvector_residual_zero"] = rep.eigenvector_exact;
    out["states"] = rep.states;
    py::list classes;
    for (const auto& c : rep.classes) {
        py::dict cd;
        cd["scc"] = c.scc;
        cd["size"] = c.size;
        cd["period"] = c.period;
        cd["value"] = py_fraction(c.value);
        classes.append(cd);
    }
    out["ergodic_classes"] = classes;
    out["note"] = rep.note;
    return out;
}

}  // namespace

PYBIND11_MODULE(_qdensity, m) {
    m.doc() = "Exact densities of congruences in the cumulative valuation functions w_q and u_q";

    py::register_exception<StateBudgetError>(m, "StateBudgetError", PyExc_RuntimeError);

    // valuations
    m.def(
        "valuation", [](std::uint64_t q, std::uint64_t n) { return valuations::valuation(Base(q), n); },
        py::arg("q"), py::arg("n"), "v_q(n): largest k with q^k | n (0 for n = 0)");
    m.def(
        "digit_sum",
        [](std::uint64_t q, std::uint64_t n) { return valuations::digit_sum(Base(q), n); },
        py::arg("q"), py::arg("n"), "s_q(n): sum of the base-q digits");
    m.def(
        "w", [](std::uint64_t q, std::uint64_t n) { return py_int(valuations::w_direct(Base(q), n)); },
        py::arg("q"), py::arg("n"), "w_q(n) = sum of floor(n/q^k)");
    m.def(
        "u", [](std::uint64_t q, std::uint64_t n) { return py_int(valuations::u_direct(Base(q), n)); },
        py::arg("q"), py::arg("n"), "u_q(n) = sum of w_q(i) for i <= n");

    py::class_<valuations::Stream>(m, "ValuationStream")
        .def(py::init([](std::uint64_t q) { return valuations::Stream(Base(q)); }), py::arg("q"))
        .def("next", [](valuations::Stream& s) {
            const auto e = s.next();
            return py::make_tuple(e.n, py_int(e.w), py_int(e.u));
        });

    m.def(
        "check_block_identities",
        [](std::uint64_t q, std::uint64_t a, std::uint64_t lam) {
            return valuations::check_block_identities(Base(q), a, lam);
        },
        py::arg("q"), py::arg("a"), py::arg("lam"));
    m.def(
        "is_q_additive_sample",
        [](std::uint64_t q, std::int64_t psi, std::int64_t theta, std::uint64_t n_max) {
            return valuations::is_q_additive_sample(Base(q), psi, theta, n_max);
        },
        py::arg("q"), py::arg("psi"), py::arg("theta"), py::arg("n_max"));

    // counting
    m.def(
        "evaluate_form",
        [](std::uint64_t q, std::uint64_t d, const std::array<std::int64_t, 5>& s,
           std::uint64_t n) { return counting::evaluate_form(Base(q), make_vector(d, s), n); },
        py::arg("q"), py::arg("d"), py::arg("s"), py::arg("n"));
    m.def(
        "gamma",
        [](std::uint64_t q, std::uint64_t d, const std::array<std::int64_t, 5>& s, std::uint64_t A,
           bool per_lambda) {
            const auto res =
                counting::gamma(Base(q), make_vector(d, s), A, counting::GammaOptions{per_lambda});
            py::dict out;
            out["count"] = res.count;
            out["bound"] = res.bound;
            out["per_lambda"] = res.per_lambda ? py::cast(*res.per_lambda) : py::none();
            return out;
        },
        py::arg("q"), py::arg("d"), py::arg("s"), py::arg("A"), py::arg("per_lambda") = false,
        "Number of n < A solving the congruence");
    m.def(
        "gamma_parallel",
        [](std::uint64_t q, std::uint64_t d, const std::array<std::int64_t, 5>& s, std::uint64_t A,
           unsigned chunks, unsigned threads) {
            return counting::gamma_parallel(Base(q), make_vector(d, s), A, chunks, threads).count;
        },
        py::arg("q"), py::arg("d"), py::arg("s"), py::arg("A"), py::arg("chunks"),
        py::arg("threads") = 0);
    m.def(
        "check_recurrence",
        [](std::uint64_t q, std::uint64_t d, const std::array<std::int64_t, 5>& s,
           std::uint64_t A) { return counting::check_recurrence(Base(q), make_vector(d, s), A); },
        py::arg("q"), py::arg("d"), py::arg("s"), py::arg("A"));
    m.def(
        "empirical_density",
        [](std::uint64_t q, std::uint64_t d, const std::array<std::int64_t, 5>& s,
           std::uint64_t N) {
            const auto res = counting::empirical_density(Base(q), make_vector(d, s), N);
            py::dict out;
            out["value"] = py_fraction(res.value);
            out["count"] = res.count;
            out["N"] = res.N;
            py::list trace;
            for (const auto& p : res.trace) trace.append(py::make_tuple(p.n, p.count));
            out["trace"] = trace;
            return out;
        },
        py::arg("q"), py::arg("d"), py::arg("s"), py::arg("N"));

    // transform
    m.def(
        "shift_matrix",
        [](std::uint64_t q, std::uint64_t d, std::uint64_t lam) {
            const auto mat = transform::build_m(Base(q), Modulus(d), lam);
            std::array<std::array<std::uint32_t, 5>, 5> rows{};
            for (int i = 0; i < 5; ++i)
                for (int j = 0; j < 5; ++j) rows[i][j] = mat.at(i, j);
            return rows;
        },
        py::arg("q"), py::arg("d"), py::arg("lam"), "M_lambda reduced mod d, row major");
    m.def(
        "apply_shift",
        [](std::uint64_t q, std::uint64_t d, const std::array<std::int64_t, 5>& s,
           std::uint64_t lam) {
            const auto t =
                transform::apply(make_vector(d, s), transform::build_m(Base(q), Modulus(d), lam));
            return t.coeffs();
        },
        py::arg("q"), py::arg("d"), py::arg("s"), py::arg("lam"), "s * M_lambda over Z/dZ");

    // chain + density engines
    m.def(
        "exact_density",
        [](std::uint64_t q, std::uint64_t d, const std::array<std::int64_t, 5>& s,
           std::uint64_t state_budget, bool override_budget) {
            chain::BuildOptions opts{state_budget, override_budget};
            return report_dict(chain::exact_density(Base(q), Modulus(d), make_vector(d, s), opts));
        },
        py::arg("q"), py::arg("d"), py::arg("s"), py::arg("state_budget") = 10'000'000,
        py::arg("override_budget") = false,
        "Exact rational density via the reachable Markov chain");
    m.def(
        "iterate_density",
        [](std::uint64_t q, std::uint64_t d, const std::array<std::int64_t, 5>& s, unsigned K) {
            py::list out;
            for (const auto& v : chain::iterate_density(Base(q), Modulus(d), make_vector(d, s), K))
                out.append(py_fraction(v));
            return out;
        },
        py::arg("q"), py::arg("d"), py::arg("s"), py::arg("K"),
        "Trajectory gamma(q^k)/q^k for k = 0..K");
    m.def(
        "chain_json",
        [](std::uint64_t q, std::uint64_t d,
           const std::vector<std::array<std::int64_t, 5>>& seeds) {
            std::vector<ParamVector> sv;
            for (const auto& s : seeds) sv.push_back(make_vector(d, s));
            const auto solve = chain::solve_density(Base(q), Modulus(d), sv);
            return chain::export_json(solve.graph, solve.dec, &solve.value).dump(2);
        },
        py::arg("q"), py::arg("d"), py::arg("seeds"),
        "chain.v1 JSON document for the reachable closure of the seeds");
    m.def(
        "chain_dot",
        [](std::uint64_t q, std::uint64_t d,
           const std::vector<std::array<std::int64_t, 5>>& seeds) {
            std::vector<ParamVector> sv;
            for (const auto& s : seeds) sv.push_back(make_vector(d, s));
            const auto g = chain::build_chain(Base(q), Modulus(d), sv);
            const auto dec = chain::decompose(g);
            return chain::to_dot(g, &dec);
        },
        py::arg("q"), py::arg("d"), py::arg("seeds"));

    // closed forms
    m.def(
        "closed_form",
        [](std::uint64_t q, std::uint64_t d, const std::array<std::int64_t, 5>& s) {
            return closed_form_dict(closedform::lookup(Base(q), Modulus(d), make_vector(d, s)));
        },
        py::arg("q"), py::arg("d"), py::arg("s"));
    m.def("euler_phi", &closedform::euler_phi, py::arg("m"));
    m.def(
        "liminf_bound",
        [](std::uint64_t q, std::uint64_t d) {
            return py_fraction(closedform::liminf_bound(Base(q), Modulus(d)));
        },
        py::arg("q"), py::arg("d"));
    m.def(
        "existence_guaranteed",
        [](std::uint64_t q, std::uint64_t d) {
            return closedform::existence_guaranteed(Base(q), Modulus(d));
        },
        py::arg("q"), py::arg("d"));

    // polya
    m.def(
        "polya_report",
        [](std::uint64_t q, std::uint64_t d) {
            const auto rep = polya::polya_report(polya::PolyaModel(Base(q), Modulus(d)));
            py::dict out;
            out["q"] = rep.q;
            out["d"] = rep.d;
            py::list rows;
            for (const auto& row : rep.rows) {
                py::dict r;
                r["exponent"] = row.exponent;
                r["char_density"] = py_fraction(row.char_density);
                r["int_density"] = py_fraction(row.int_density);
                r["engine"] = row.engine;
                r["conditional"] = row.conditional;
                rows.append(r);
            }
            out["rows"] = rows;
            out["freeness_density"] = py_fraction(rep.freeness_density());
            return out;
        },
        py::arg("q"), py::arg("d"));
    m.def(
        "class_exponents",
        [](std::uint64_t q, std::uint64_t d, std::uint64_t n) {
            const auto [cw, cu] =
                polya::class_exponents(polya::PolyaModel(Base(q), Modulus(d)), n);
            return py::make_tuple(cw, cu);
        },
        py::arg("q"), py::arg("d"), py::arg("n"));

    m.attr("__version__") = "0.1.0";
}
