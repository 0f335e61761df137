// qdensity: exact natural densities of congruences in the cumulative
// valuation functions w_q and u_q, by counting, Markov-chain analysis and
// closed forms.
//
// Exit codes: 0 success, 1 verification/runtime failure, 2 closed form not
// covered, 3 state budget exceeded, 4 usage error.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <thread>

#include <CLI11.hpp>
#include <json.hpp>

#include "qdensity/chain.hpp"
#include "qdensity/closedform.hpp"
#include "qdensity/counting.hpp"
#include "qdensity/errors.hpp"
#include "qdensity/polya.hpp"
#include "qdensity/transform.hpp"
#include "qdensity/valuations.hpp"
#include "qdensity/verify.hpp"

namespace {

using nlohmann::json;
using namespace qdensity;

struct GlobalOpts {
    std::string format = "human";  // human | json | csv
    unsigned threads = 0;
    std::uint64_t state_budget = 10'000'000;
    bool override_budget = false;
    std::uint64_t seed = 20240901;
};

std::pair<std::uint64_t, std::uint64_t> parse_range(const std::string& text) {
    const auto dots = text.find("..");
    if (dots == std::string::npos) {
        const std::uint64_t v = std::stoull(text);
        return {v, v};
    }
    const std::uint64_t lo = std::stoull(text.substr(0, dots));
    const std::uint64_t hi = std::stoull(text.substr(dots + 2));
    if (hi < lo) throw CLI::ValidationError("range", "range upper end below lower end");
    return {lo, hi};
}

std::array<std::int64_t, 5> parse_coeffs(const std::string& text) {
    std::array<std::int64_t, 5> out{};
    std::size_t at = 0;
    for (int i = 0; i < 5; ++i) {
        const std::size_t comma = text.find(',', at);
        const bool last = (i == 4);
        if (last != (comma == std::string::npos))
            throw CLI::ValidationError("--s", "expected 5 comma-separated integers");
        out[i] = std::stoll(text.substr(at, comma == std::string::npos ? comma : comma - at));
        at = comma + 1;
    }
    return out;
}

void write_output(const std::string& text, const std::string& out_path) {
    if (out_path.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream f(out_path);
    if (!f) throw CLI::ValidationError("--out", "cannot open '" + out_path + "' for writing");
    f << text;
}

json density_report_json(const chain::DensityReport& rep) {
    json classes = json::array();
    for (const auto& c : rep.classes) {
        classes.push_back({{"scc", c.scc},
                           {"size", c.size},
                           {"period", c.period},
                           {"value", to_fraction_string(c.value)}});
    }
    json j{{"value", to_fraction_string(rep.value)},
           {"decimal", to_decimal(rep.value)},
           {"method", rep.method},
           {"existence_guaranteed", rep.existence_guaranteed},
           {"raw_limit_exists", rep.raw_limit_exists},
           {"eigenvector_residual_zero", rep.eigenvector_exact},
           {"states", rep.states},
           {"ergodic_classes", classes}};
    if (!rep.note.empty()) j["note"] = rep.note;
    return j;
}

json closed_form_json(const closedform::ClosedFormResult& cf) {
    json j{{"formula", cf.formula},
           {"covered", cf.covered()},
           {"conditional", cf.conditional},
           {"hypotheses_held", cf.hypotheses_held},
           {"hypotheses_failed", cf.hypotheses_failed},
           {"tags", cf.tags}};
    if (cf.covered()) {
        j["value"] = to_fraction_string(*cf.value);
        j["decimal"] = to_decimal(*cf.value);
    }
    return j;
}

json empirical_json(const counting::EmpiricalDensity& emp) {
    json trace = json::array();
    for (const auto& p : emp.trace) {
        BigRational ratio(static_cast<unsigned long>(p.count), static_cast<unsigned long>(p.n));
        ratio.canonicalize();
        trace.push_back({{"N", p.n}, {"count", p.count}, {"ratio_decimal", to_decimal(ratio)}});
    }
    return json{{"value", to_fraction_string(emp.value)},
                {"decimal", to_decimal(emp.value)},
                {"N", emp.N},
                {"count", emp.count},
                {"trace", trace}};
}

int cmd_eval(const GlobalOpts& g, std::uint64_t q, const std::string& n_range,
             const std::string& out_path) {
    const auto [lo, hi] = parse_range(n_range);
    Base base(q);
    std::string text;
    json rows = json::array();
    if (g.format == "csv") text += "n,v,s,w,u\n";
    for (std::uint64_t n = lo; n <= hi; ++n) {
        const auto v = valuations::valuation(base, n);
        const auto s = valuations::digit_sum(base, n);
        const BigInt w = valuations::w_direct(base, n);
        const BigInt u = valuations::u_direct(base, n);
        if (g.format == "json") {
            rows.push_back({{"n", n},
                            {"v", v},
                            {"s", s},
                            {"w", w.get_str()},
                            {"u", u.get_str()}});
        } else if (g.format == "csv") {
            text += std::to_string(n) + "," + std::to_string(v) + "," + std::to_string(s) + "," +
                    w.get_str() + "," + u.get_str() + "\n";
        } else {
            text += "n=" + std::to_string(n) + "  v_q=" + std::to_string(v) +
                    "  s_q=" + std::to_string(s) + "  w_q=" + w.get_str() +
                    "  u_q=" + u.get_str() + "\n";
        }
        if (n == UINT64_MAX) break;
    }
    if (g.format == "json") text = json{{"q", q}, {"rows", rows}}.dump(2) + "\n";
    write_output(text, out_path);
    return 0;
}

int cmd_density(const GlobalOpts& g, std::uint64_t q, std::uint64_t d, const std::string& s_text,
                const std::string& method, std::uint64_t N, bool no_trace,
                const std::string& out_path) {
    Base base(q);
    Modulus m(d);
    ParamVector s(m, parse_coeffs(s_text));
    chain::BuildOptions bopts{g.state_budget, g.override_budget};

    const bool want_chain = (method == "chain" || method == "all");
    const bool want_closed = (method == "closed-form" || method == "all");
    const bool want_empirical = (method == "empirical" || method == "all");

    json out{{"q", q}, {"d", d}, {"s", s.coeffs()}, {"method", method}};
    std::string text = "density query: q=" + std::to_string(q) + " d=" + std::to_string(d) +
                       " s=" + s.str() + "\n";

    std::optional<chain::DensityReport> chain_rep;
    std::optional<closedform::ClosedFormResult> cf;
    std::optional<counting::EmpiricalDensity> emp;

    if (want_chain) {
        chain_rep = chain::exact_density(base, m, s, bopts);
        out["chain"] = density_report_json(*chain_rep);
        text += "  chain-exact:  " + to_fraction_string(chain_rep->value) + " = " +
                to_decimal(chain_rep->value) + "  (states=" + std::to_string(chain_rep->states) +
                (chain_rep->raw_limit_exists ? ", raw limit exists" : ", Cesaro along N=q^k") +
                (chain_rep->existence_guaranteed ? ", existence guaranteed" : "") + ")\n";
        if (!chain_rep->note.empty()) text += "    note: " + chain_rep->note + "\n";
    }
    if (want_closed) {
        cf = closedform::lookup(base, m, s);
        out["closed_form"] = closed_form_json(*cf);
        if (cf->covered()) {
            text += "  closed-form:  " + to_fraction_string(*cf->value) + " = " +
                    to_decimal(*cf->value) + "  (" + cf->formula +
                    (cf->conditional ? ", conditional on existence" : "") + ")\n";
        } else {
            text += "  closed-form:  not covered\n";
            for (const auto& h : cf->hypotheses_failed) text += "    " + h + "\n";
            if (method == "closed-form") {
                write_output(g.format == "json" ? out.dump(2) + "\n" : text, out_path);
                return 2;
            }
        }
    }
    if (want_empirical) {
        if (no_trace) {
            const unsigned chunks = std::max(1u, g.threads ? g.threads
                                                           : std::thread::hardware_concurrency());
            const auto res = counting::gamma_parallel(base, s, N, chunks, g.threads);
            counting::EmpiricalDensity e;
            e.N = N;
            e.count = res.count;
            e.value = BigRational(static_cast<unsigned long>(res.count),
                                  static_cast<unsigned long>(N));
            e.value.canonicalize();
            emp = std::move(e);
        } else {
            emp = counting::empirical_density(base, s, N);
        }
        out["empirical"] = empirical_json(*emp);
        text += "  empirical:    " + to_fraction_string(emp->value) + " = " +
                to_decimal(emp->value) + "  (N=" + std::to_string(N) + ")\n";
    }

    if (method == "all") {
        json agree;
        if (chain_rep && cf && cf->covered()) {
            const bool equal = (chain_rep->value == *cf->value);
            agree["chain_vs_closed_form"] = equal ? "exact-equal" : "MISMATCH";
            text += equal ? "  agreement: chain-exact == closed-form (exact)\n"
                          : "  DISAGREEMENT between chain-exact and closed-form!\n";
        }
        if (chain_rep && emp) {
            BigRational diff = emp->value - chain_rep->value;
            const double abs_diff = std::abs(diff.get_d());
            agree["empirical_abs_diff"] = abs_diff;
            agree["empirical_within_0.01"] = abs_diff <= 0.01;
            text += "  agreement: |empirical - chain| = " + std::to_string(abs_diff) +
                    (abs_diff <= 0.01 ? " (within 0.01)\n" : " (EXCEEDS 0.01)\n");
        }
        out["agreement"] = agree;
    }

    write_output(g.format == "json" ? out.dump(2) + "\n" : text, out_path);
    return 0;
}

int cmd_chain(const GlobalOpts& g, std::uint64_t q, std::uint64_t d,
              const std::vector<std::string>& seed_texts, const std::string& export_format,
              const std::string& out_path) {
    Base base(q);
    Modulus m(d);
    std::vector<ParamVector> seeds;
    for (const auto& t : seed_texts) seeds.emplace_back(m, parse_coeffs(t));
    chain::BuildOptions bopts{g.state_budget, g.override_budget};

    if (export_format == "dot") {
        const auto graph = chain::build_chain(base, m, seeds, bopts);
        const auto dec = chain::decompose(graph);
        write_output(chain::to_dot(graph, &dec), out_path);
        return 0;
    }
    const auto solve = chain::solve_density(base, m, seeds, bopts);
    json j = chain::export_json(solve.graph, solve.dec, &solve.value);
    json mats = json::array();
    for (std::uint64_t lambda = 0; lambda < q; ++lambda) {
        const auto mat = transform::build_m(base, m, lambda);
        json flat = json::array();
        for (int i = 0; i < 5; ++i)
            for (int jj = 0; jj < 5; ++jj) flat.push_back(mat.at(i, jj));
        mats.push_back(flat);
    }
    j["matrices"] = mats;
    write_output(j.dump(2) + "\n", out_path);
    return 0;
}

int cmd_verify(const GlobalOpts& g, const std::string& suite, const verify::Options& vopts) {
    std::vector<verify::SuiteResult> results;
    if (suite == "identities")
        results.push_back(verify::identities(vopts));
    else if (suite == "recurrence")
        results.push_back(verify::recurrence(vopts));
    else if (suite == "stochastic")
        results.push_back(verify::stochastic(vopts));
    else if (suite == "theorems")
        results.push_back(verify::theorems(vopts));
    else
        results = verify::run_all(vopts);

    bool all_ok = true;
    if (g.format == "json") {
        json j = json::array();
        for (const auto& r : results) {
            json checks = json::array();
            for (const auto& c : r.checks) {
                checks.push_back({{"name", c.name}, {"ok", c.ok}, {"detail", c.detail}});
                all_ok = all_ok && c.ok;
            }
            j.push_back({{"suite", r.suite}, {"ok", r.ok()}, {"checks", checks}});
        }
        std::cout << j.dump(2) << "\n";
    } else {
        for (const auto& r : results) {
            for (const auto& c : r.checks) {
                all_ok = all_ok && c.ok;
                std::cout << (c.ok ? "[PASS] " : "[FAIL] ") << r.suite << ": " << c.name;
                if (!c.ok) std::cout << " -- " << c.detail;
                std::cout << "\n";
            }
        }
        std::cout << (all_ok ? "verify: all checks passed\n" : "verify: FAILURES present\n");
    }
    return all_ok ? 0 : 1;
}

int cmd_table(const GlobalOpts& g, const std::string& family, const std::string& q_range,
              const std::string& d_range, std::uint64_t N, const std::string& out_path) {
    const auto [qlo, qhi] = parse_range(q_range);
    const auto [dlo, dhi] = parse_range(d_range);
    std::string text;

    if (family == "polya") {
        json reports = json::array();
        if (g.format == "csv") text += "q,d,exponent,char_density,int_density,engine,conditional\n";
        for (std::uint64_t q = qlo; q <= qhi; ++q) {
            for (std::uint64_t d = dlo; d <= dhi; ++d) {
                const auto rep = polya::polya_report(
                    polya::PolyaModel(Base(q), Modulus(d)),
                    chain::BuildOptions{g.state_budget, g.override_budget});
                if (g.format == "json") {
                    reports.push_back(polya::to_json(rep));
                } else if (g.format == "human") {
                    text += polya::to_table(rep) + "\n";
                } else {
                    for (const auto& row : rep.rows) {
                        text += std::to_string(q) + "," + std::to_string(d) + "," +
                                std::to_string(row.exponent) + "," +
                                to_fraction_string(row.char_density) + "," +
                                to_fraction_string(row.int_density) + "," + row.engine + "," +
                                (row.conditional ? "yes" : "no") + "\n";
                    }
                }
            }
        }
        if (g.format == "json") text = reports.dump(2) + "\n";
    } else {
        // Empirical distribution of u_q (or w_q) mod d: column x holds the
        // density of n < N with f(n) = x (mod d).
        text += "q,d";
        for (std::uint64_t x = 0; x < dhi; ++x) text += ",x" + std::to_string(x);
        text += "\n";
        const std::array<std::uint32_t, 4> weights =
            (family == "u") ? std::array<std::uint32_t, 4>{1, 0, 0, 0}
                            : std::array<std::uint32_t, 4>{0, 1, 0, 0};
        for (std::uint64_t q = qlo; q <= qhi; ++q) {
            for (std::uint64_t d = dlo; d <= dhi; ++d) {
                const auto hist =
                    counting::residue_histogram(Base(q), Modulus(d), weights, N);
                text += std::to_string(q) + "," + std::to_string(d);
                for (std::uint64_t x = 0; x < dhi; ++x) {
                    if (x < d) {
                        BigRational v(static_cast<unsigned long>(hist[x]),
                                      static_cast<unsigned long>(N));
                        v.canonicalize();
                        text += "," + to_decimal(v);
                    } else {
                        text += ",";
                    }
                }
                text += "\n";
            }
        }
    }
    write_output(text, out_path);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"qdensity: densities of congruences in the cumulative valuation functions"};
    app.require_subcommand(1);

    GlobalOpts g;
    if (const char* env = std::getenv("QDENSITY_STATE_BUDGET")) g.state_budget = std::stoull(env);
    app.add_option("--format", g.format, "Output format")
        ->check(CLI::IsMember({"human", "json", "csv"}))
        ->capture_default_str();
    app.add_option("--threads", g.threads, "Worker threads for parallel counting (0 = auto)");
    app.add_option("--state-budget", g.state_budget, "Chain state budget")->capture_default_str();
    app.add_flag("--override-budget", g.override_budget,
                 "Build chains even when d^5 exceeds the state budget");
    app.add_option("--seed", g.seed, "RNG seed for randomized diagnostics")
        ->capture_default_str();

    // eval
    auto* eval = app.add_subcommand("eval", "Evaluate v_q, s_q, w_q, u_q at n or a range n0..n1");
    eval->fallthrough();
    std::uint64_t eval_q = 2;
    std::string eval_n = "0", eval_out;
    eval->add_option("--q", eval_q, "Base q >= 2")->required();
    eval->add_option("--n", eval_n, "Index n or range n0..n1")->required();
    eval->add_option("--out", eval_out, "Write to file instead of stdout");

    // density
    auto* density = app.add_subcommand("density", "Density of a congruence by any engine");
    density->fallthrough();
    std::uint64_t den_q = 2, den_d = 2, den_N = 1u << 20;
    std::string den_s, den_method = "all", den_out;
    bool den_no_trace = false;
    density->add_option("--q", den_q, "Base q >= 2")->required();
    density->add_option("--d", den_d, "Modulus d >= 2")->required();
    density->add_option("--s", den_s, "Coefficients theta_u,theta_w,theta_2,theta_1,theta_0")
        ->required();
    density->add_option("--method", den_method, "Engine")
        ->check(CLI::IsMember({"empirical", "chain", "closed-form", "all"}))
        ->capture_default_str();
    density->add_option("--N", den_N, "Empirical sample bound")->capture_default_str();
    density->add_flag("--no-trace", den_no_trace,
                      "Skip the convergence trace (enables parallel counting)");
    density->add_option("--out", den_out, "Write to file instead of stdout");

    // chain
    auto* chain_cmd = app.add_subcommand("chain", "Export the Markov chain M(q,d) for seeds");
    chain_cmd->fallthrough();
    std::uint64_t ch_q = 2, ch_d = 2;
    std::vector<std::string> ch_seeds;
    std::string ch_export = "json", ch_out;
    chain_cmd->add_option("--q", ch_q, "Base q >= 2")->required();
    chain_cmd->add_option("--d", ch_d, "Modulus d >= 2")->required();
    chain_cmd->add_option("--seed-vector", ch_seeds, "Seed coefficient vector (repeatable)")
        ->required();
    chain_cmd->add_option("--export", ch_export, "Export format")
        ->check(CLI::IsMember({"dot", "json"}))
        ->capture_default_str();
    chain_cmd->add_option("--out", ch_out, "Write to file instead of stdout");

    // verify
    auto* verify_cmd = app.add_subcommand("verify", "Run the verification suites");
    verify_cmd->fallthrough();
    std::string ver_suite = "all";
    verify::Options vopts;
    verify_cmd->add_option("--suite", ver_suite, "Suite to run")
        ->check(CLI::IsMember({"identities", "recurrence", "stochastic", "theorems", "all"}))
        ->capture_default_str();
    verify_cmd->add_option("--q-max", vopts.q_max, "Largest base")->capture_default_str();
    verify_cmd->add_option("--d-max", vopts.d_max, "Largest modulus")->capture_default_str();
    verify_cmd->add_option("--n-max", vopts.n_max, "Identity scan bound")->capture_default_str();
    verify_cmd->add_option("--a-max", vopts.a_max, "Block lemma bound")->capture_default_str();
    verify_cmd->add_option("--vectors", vopts.vectors, "Random vectors per (q,d)")
        ->capture_default_str();
    verify_cmd->add_option("--empirical-n", vopts.empirical_n, "Empirical sample bound")
        ->capture_default_str();

    // table
    auto* table = app.add_subcommand("table", "CSV tables of densities over (q, d) ranges");
    table->fallthrough();
    std::string tab_family = "u", tab_q = "2..4", tab_d = "2..4", tab_out;
    std::uint64_t tab_N = 100000;
    table->add_option("--family", tab_family, "u | w | polya")
        ->check(CLI::IsMember({"u", "w", "polya"}))
        ->capture_default_str();
    table->add_option("--q", tab_q, "Base or range q0..q1")->capture_default_str();
    table->add_option("--d", tab_d, "Modulus or range d0..d1")->capture_default_str();
    table->add_option("--N", tab_N, "Empirical sample bound")->capture_default_str();
    table->add_option("--out", tab_out, "Write to file instead of stdout");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 4;
    }

    try {
        if (*eval) return cmd_eval(g, eval_q, eval_n, eval_out);
        if (*density)
            return cmd_density(g, den_q, den_d, den_s, den_method, den_N, den_no_trace, den_out);
        if (*chain_cmd) return cmd_chain(g, ch_q, ch_d, ch_seeds, ch_export, ch_out);
        if (*verify_cmd) {
            vopts.seed = g.seed;
            vopts.state_budget = g.state_budget;
            return cmd_verify(g, ver_suite, vopts);
        }
        if (*table) {
            // tables default to CSV; --format json/human override explicitly
            GlobalOpts gt = g;
            if (app.get_option("--format")->count() == 0) gt.format = "csv";
            return cmd_table(gt, tab_family, tab_q, tab_d, tab_N, tab_out);
        }
    } catch (const StateBudgetError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const CLI::ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 4;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 4;
    } catch (const std::out_of_range& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 4;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 4;
}
