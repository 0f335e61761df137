#include "qdensity/chain.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <queue>
#include <unordered_map>

#include "qdensity/closedform.hpp"
#include "qdensity/errors.hpp"
#include "qdensity/transform.hpp"

namespace qdensity {
namespace chain {

namespace {

struct StateHash {
    std::size_t operator()(const State& s) const {
        std::size_t h = 1469598103934665603ull;
        for (std::uint32_t v : s) {
            h ^= v;
            h *= 1099511628211ull;
        }
        return h;
    }
};

}  // namespace

std::optional<std::uint32_t> ChainGraph::index_of(const State& s) const {
    auto it = std::lower_bound(states.begin(), states.end(), s);
    if (it == states.end() || *it != s) return std::nullopt;
    return static_cast<std::uint32_t>(it - states.begin());
}

ChainGraph build_chain(Base base, Modulus m, const std::vector<ParamVector>& seeds,
                       const BuildOptions& opts) {
    if (seeds.empty()) throw std::invalid_argument("seed set must be nonempty");
    if (base.q > (std::uint64_t{1} << 20))
        throw std::invalid_argument("chain construction limited to q <= 2^20");
    for (const auto& s : seeds)
        if (s.d() != m.d) throw std::invalid_argument("seed modulus mismatch");

    // d^5 is the hard upper bound on the state space.
    BigInt full;
    mpz_ui_pow_ui(full.get_mpz_t(), m.d, 5);
    if (!opts.override_budget && full > BigInt(static_cast<unsigned long>(opts.state_budget)))
        throw StateBudgetError("state space bound d^5 = " + full.get_str() +
                               " exceeds the state budget " + std::to_string(opts.state_budget) +
                               " (raise the budget or pass the override)");

    std::vector<transform::TransformMatrix> mats;
    mats.reserve(base.q);
    for (std::uint64_t lambda = 0; lambda < base.q; ++lambda)
        mats.push_back(transform::build_m(base, m, lambda));

    std::unordered_map<State, std::uint32_t, StateHash> index;
    std::vector<State> discovered;
    std::queue<std::uint32_t> todo;

    auto intern = [&](const State& s) {
        auto [it, fresh] = index.try_emplace(s, static_cast<std::uint32_t>(discovered.size()));
        if (fresh) {
            discovered.push_back(s);
            if (discovered.size() > opts.state_budget)
                throw StateBudgetError("reachable closure exceeds the state budget " +
                                       std::to_string(opts.state_budget));
            todo.push(it->second);
        }
        return it->second;
    };

    std::vector<std::uint32_t> seed_ids;
    for (const auto& s : seeds) seed_ids.push_back(intern(s.coeffs()));

    std::vector<std::map<std::uint32_t, std::uint32_t>> out;  // per state: target -> mult
    while (!todo.empty()) {
        const std::uint32_t id = todo.front();
        todo.pop();
        if (out.size() <= id) out.resize(id + 1);
        const ParamVector s(m, discovered[id]);
        for (const auto& mat : mats) {
            const State t = transform::apply(s, mat).coeffs();
            ++out[id][intern(t)];
        }
    }

    // Renumber into lexicographic order for deterministic output.
    std::vector<std::uint32_t> order(discovered.size());
    std::iota(order.begin(), order.end(), 0u);
    std::sort(order.begin(), order.end(),
              [&](std::uint32_t a, std::uint32_t b) { return discovered[a] < discovered[b]; });
    std::vector<std::uint32_t> rank(discovered.size());
    for (std::uint32_t i = 0; i < order.size(); ++i) rank[order[i]] = i;

    ChainGraph g;
    g.q = base.q;
    g.d = m.d;
    g.states.resize(discovered.size());
    g.edges.resize(discovered.size());
    for (std::uint32_t old = 0; old < discovered.size(); ++old) {
        g.states[rank[old]] = discovered[old];
        auto& row = g.edges[rank[old]];
        for (const auto& [to, mult] : out[old]) row.push_back(Edge{rank[to], mult});
        std::sort(row.begin(), row.end(), [](const Edge& a, const Edge& b) { return a.to < b.to; });
    }
    for (std::uint32_t sid : seed_ids) g.seeds.push_back(rank[sid]);
    std::sort(g.seeds.begin(), g.seeds.end());
    g.seeds.erase(std::unique(g.seeds.begin(), g.seeds.end()), g.seeds.end());
    return g;
}

ChainDecomposition decompose(const ChainGraph& g) {
    const std::uint32_t n = static_cast<std::uint32_t>(g.states.size());
    constexpr std::uint32_t kUnset = 0xffffffffu;

    // Iterative Tarjan.
    std::vector<std::uint32_t> low(n, 0), disc(n, kUnset), scc_of(n, kUnset);
    std::vector<bool> on_stack(n, false);
    std::vector<std::uint32_t> stack;
    std::vector<std::vector<std::uint32_t>> sccs;  // pop order: sinks first

    struct Frame {
        std::uint32_t v;
        std::size_t edge;
    };
    std::uint32_t timer = 0;
    for (std::uint32_t root = 0; root < n; ++root) {
        if (disc[root] != kUnset) continue;
        std::vector<Frame> call;
        call.push_back({root, 0});
        disc[root] = low[root] = timer++;
        stack.push_back(root);
        on_stack[root] = true;
        while (!call.empty()) {
            Frame& f = call.back();
            if (f.edge < g.edges[f.v].size()) {
                const std::uint32_t w = g.edges[f.v][f.edge++].to;
                if (disc[w] == kUnset) {
                    disc[w] = low[w] = timer++;
                    stack.push_back(w);
                    on_stack[w] = true;
                    call.push_back({w, 0});
                } else if (on_stack[w]) {
                    low[f.v] = std::min(low[f.v], disc[w]);
                }
            } else {
                if (low[f.v] == disc[f.v]) {
                    std::vector<std::uint32_t> comp;
                    std::uint32_t w;
                    do {
                        w = stack.back();
                        stack.pop_back();
                        on_stack[w] = false;
                        scc_of[w] = static_cast<std::uint32_t>(sccs.size());
                        comp.push_back(w);
                    } while (w != f.v);
                    std::sort(comp.begin(), comp.end());
                    sccs.push_back(std::move(comp));
                }
                const std::uint32_t v = f.v;
                call.pop_back();
                if (!call.empty()) low[call.back().v] = std::min(low[call.back().v], low[v]);
            }
        }
    }

    // Canonical scc ids: ascending by smallest member state.
    const std::uint32_t k = static_cast<std::uint32_t>(sccs.size());
    std::vector<std::uint32_t> by_min(k);
    std::iota(by_min.begin(), by_min.end(), 0u);
    std::sort(by_min.begin(), by_min.end(),
              [&](std::uint32_t a, std::uint32_t b) { return sccs[a][0] < sccs[b][0]; });
    std::vector<std::uint32_t> new_id(k);
    for (std::uint32_t i = 0; i < k; ++i) new_id[by_min[i]] = i;

    ChainDecomposition dec;
    dec.members.resize(k);
    dec.scc_of.assign(n, 0);
    for (std::uint32_t old = 0; old < k; ++old) dec.members[new_id[old]] = std::move(sccs[old]);
    for (std::uint32_t v = 0; v < n; ++v) dec.scc_of[v] = new_id[scc_of[v]];

    // Tarjan pops sinks first: reversing the pop order gives sources first.
    dec.topo_order.resize(k);
    for (std::uint32_t old = 0; old < k; ++old) dec.topo_order[k - 1 - old] = new_id[old];

    // Ergodic = no edge leaves the class.
    dec.ergodic.assign(k, true);
    for (std::uint32_t v = 0; v < n; ++v) {
        for (const Edge& e : g.edges[v]) {
            if (dec.scc_of[e.to] != dec.scc_of[v]) dec.ergodic[dec.scc_of[v]] = false;
        }
    }

    // Period of an ergodic class: gcd of (level(u) + 1 - level(v)) over its
    // internal edges, from a BFS layering of the class.
    dec.period.assign(k, 0);
    for (std::uint32_t c = 0; c < k; ++c) {
        if (!dec.ergodic[c]) continue;
        dec.ergodic_ids.push_back(c);
        std::unordered_map<std::uint32_t, std::int64_t> level;
        std::queue<std::uint32_t> bfs;
        bfs.push(dec.members[c][0]);
        level[dec.members[c][0]] = 0;
        std::int64_t period = 0;
        while (!bfs.empty()) {
            const std::uint32_t v = bfs.front();
            bfs.pop();
            for (const Edge& e : g.edges[v]) {
                auto it = level.find(e.to);
                if (it == level.end()) {
                    level[e.to] = level[v] + 1;
                    bfs.push(e.to);
                } else {
                    period = std::gcd(period, level[v] + 1 - it->second);
                }
            }
        }
        dec.period[c] = static_cast<std::uint64_t>(period < 0 ? -period : period);
    }
    return dec;
}

namespace {

// Gaussian elimination over exact rationals: solves A X = B for possibly
// multiple right-hand sides. A is consumed. Throws on a singular system.
std::vector<std::vector<BigRational>> solve_exact(std::vector<std::vector<BigRational>>& a,
                                                  std::vector<std::vector<BigRational>>& b) {
    const std::size_t n = a.size();
    const std::size_t k = b.empty() ? 0 : b[0].size();
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t pivot = col;
        while (pivot < n && a[pivot][col] == 0) ++pivot;
        if (pivot == n) throw std::logic_error("singular linear system in exact solve");
        std::swap(a[pivot], a[col]);
        std::swap(b[pivot], b[col]);
        const BigRational inv = 1 / a[col][col];
        for (std::size_t j = col; j < n; ++j) {
            a[col][j] *= inv;
            a[col][j].canonicalize();
        }
        for (std::size_t j = 0; j < k; ++j) {
            b[col][j] *= inv;
            b[col][j].canonicalize();
        }
        for (std::size_t row = 0; row < n; ++row) {
            if (row == col || a[row][col] == 0) continue;
            const BigRational factor = a[row][col];
            for (std::size_t j = col; j < n; ++j) {
                a[row][j] -= factor * a[col][j];
                a[row][j].canonicalize();
            }
            for (std::size_t j = 0; j < k; ++j) {
                b[row][j] -= factor * b[col][j];
                b[row][j].canonicalize();
            }
        }
    }
    return b;
}

bool class_is_doubly_stochastic(const ChainGraph& g, const ChainDecomposition& dec,
                                std::uint32_t scc) {
    const auto& mem = dec.members[scc];
    std::unordered_map<std::uint32_t, std::uint64_t> col_sum;
    for (std::uint32_t v : mem)
        for (const Edge& e : g.edges[v]) col_sum[e.to] += e.mult;
    for (std::uint32_t v : mem) {
        auto it = col_sum.find(v);
        if (it == col_sum.end() || it->second != g.q) return false;
    }
    return true;
}

}  // namespace

std::vector<BigRational> stationary(const ChainGraph& g, const ChainDecomposition& dec,
                                    std::uint32_t scc) {
    if (scc >= dec.scc_count() || !dec.ergodic[scc])
        throw std::invalid_argument("stationary distribution requires an ergodic class");
    const auto& mem = dec.members[scc];
    const std::size_t n = mem.size();

    // Right multiplication by invertible matrices makes the restricted chain
    // doubly stochastic; its stationary distribution is then uniform.
    if (class_is_doubly_stochastic(g, dec, scc)) {
        BigRational u(1, static_cast<unsigned long>(n));
        u.canonicalize();
        return std::vector<BigRational>(n, u);
    }

    std::unordered_map<std::uint32_t, std::size_t> pos;
    for (std::size_t i = 0; i < n; ++i) pos[mem[i]] = i;

    // Balance equations (scaled by q) for all but one state, plus sum = 1.
    std::vector<std::vector<BigRational>> a(n, std::vector<BigRational>(n, BigRational(0)));
    std::vector<std::vector<BigRational>> b(n, std::vector<BigRational>(1, BigRational(0)));
    for (std::size_t i = 0; i < n; ++i) {
        for (const Edge& e : g.edges[mem[i]]) {
            const std::size_t j = pos.at(e.to);  // class is closed
            if (j + 1 < n) a[j][i] += static_cast<long>(e.mult);
        }
    }
    for (std::size_t j = 0; j + 1 < n; ++j) a[j][j] -= static_cast<long>(g.q);
    for (std::size_t i = 0; i < n; ++i) a[n - 1][i] = 1;
    b[n - 1][0] = 1;

    auto sol = solve_exact(a, b);
    std::vector<BigRational> pi(n);
    for (std::size_t i = 0; i < n; ++i) {
        pi[i] = sol[i][0];
        pi[i].canonicalize();
        if (pi[i] <= 0) throw std::logic_error("stationary distribution must be positive");
    }
    return pi;
}

namespace {

// Values on transient states given fixed values on all ergodic states:
// solves q*v(s) - sum_{t transient} mu(s,t) v(t) = sum_{t ergodic} mu(s,t) v(t).
std::vector<BigRational> extend_to_transient(const ChainGraph& g, const ChainDecomposition& dec,
                                             const std::vector<BigRational>& ergodic_value) {
    std::vector<std::uint32_t> transient;
    for (std::uint32_t v = 0; v < g.states.size(); ++v)
        if (!dec.ergodic[dec.scc_of[v]]) transient.push_back(v);

    std::vector<BigRational> value = ergodic_value;
    if (transient.empty()) return value;

    std::unordered_map<std::uint32_t, std::size_t> pos;
    for (std::size_t i = 0; i < transient.size(); ++i) pos[transient[i]] = i;

    const std::size_t n = transient.size();
    std::vector<std::vector<BigRational>> a(n, std::vector<BigRational>(n, BigRational(0)));
    std::vector<std::vector<BigRational>> b(n, std::vector<BigRational>(1, BigRational(0)));
    for (std::size_t i = 0; i < n; ++i) {
        a[i][i] = static_cast<long>(g.q);
        for (const Edge& e : g.edges[transient[i]]) {
            auto it = pos.find(e.to);
            if (it != pos.end()) {
                a[i][it->second] -= static_cast<long>(e.mult);
            } else {
                b[i][0] += BigRational(static_cast<long>(e.mult)) * value[e.to];
                b[i][0].canonicalize();
            }
        }
    }
    auto sol = solve_exact(a, b);
    for (std::size_t i = 0; i < n; ++i) {
        value[transient[i]] = sol[i][0];
        value[transient[i]].canonicalize();
    }
    return value;
}

}  // namespace

std::vector<BigRational> absorption(const ChainGraph& g, const ChainDecomposition& dec,
                                    std::uint32_t state) {
    if (state >= g.states.size()) throw std::invalid_argument("state index out of range");
    const std::size_t nc = dec.ergodic_ids.size();
    std::vector<BigRational> out(nc, BigRational(0));

    const std::uint32_t own = dec.scc_of[state];
    if (dec.ergodic[own]) {
        for (std::size_t c = 0; c < nc; ++c)
            if (dec.ergodic_ids[c] == own) out[c] = 1;
        return out;
    }

    for (std::size_t c = 0; c < nc; ++c) {
        // Indicator of class c on ergodic states, extended to transient ones.
        std::vector<BigRational> v(g.states.size(), BigRational(0));
        for (std::uint32_t s = 0; s < g.states.size(); ++s)
            if (dec.scc_of[s] == dec.ergodic_ids[c]) v[s] = 1;
        out[c] = extend_to_transient(g, dec, v)[state];
    }
    return out;
}

DensitySolve solve_density(Base base, Modulus m, const std::vector<ParamVector>& seeds,
                           const BuildOptions& opts) {
    DensitySolve out;
    out.graph = build_chain(base, m, seeds, opts);
    out.dec = decompose(out.graph);
    const ChainGraph& g = out.graph;
    const ChainDecomposition& dec = out.dec;

    out.class_value.assign(dec.scc_count(), BigRational(0));
    std::vector<BigRational> value(g.states.size(), BigRational(0));
    for (std::uint32_t c : dec.ergodic_ids) {
        const auto& mem = dec.members[c];
        const auto pi = stationary(g, dec, c);
        BigRational val(0);
        for (std::size_t i = 0; i < mem.size(); ++i) {
            if (g.states[mem[i]][4] == 0) val += pi[i];
        }
        val.canonicalize();
        out.class_value[c] = val;
        for (std::uint32_t s : mem) value[s] = val;
    }
    out.value = extend_to_transient(g, dec, value);
    out.eigenvector_exact = is_eigenvector(g, out.value);
    if (!out.eigenvector_exact)
        throw std::logic_error("density vector failed the exact eigenvector check");
    return out;
}

bool is_eigenvector(const ChainGraph& g, const std::vector<BigRational>& v) {
    if (v.size() != g.states.size()) return false;
    for (std::uint32_t s = 0; s < g.states.size(); ++s) {
        BigRational acc(0);
        for (const Edge& e : g.edges[s]) acc += BigRational(static_cast<long>(e.mult)) * v[e.to];
        acc.canonicalize();
        BigRational lhs = BigRational(static_cast<long>(g.q)) * v[s];
        lhs.canonicalize();
        if (acc != lhs) return false;
    }
    return true;
}

DensityReport exact_density(Base base, Modulus m, const ParamVector& s, const BuildOptions& opts) {
    DensitySolve solve = solve_density(base, m, {s}, opts);
    const std::uint32_t sid = *solve.graph.index_of(s.coeffs());

    DensityReport rep;
    rep.value = solve.value[sid];
    rep.method = "chain-exact";
    // Existence holds when d | q^n for some n, and also on the invariant
    // theta_u = theta_2 = 0 subspace (the q-additive family).
    rep.existence_guaranteed = closedform::existence_guaranteed(base, m) ||
                               (s.theta_u() == 0 && s.theta_2() == 0);
    rep.eigenvector_exact = solve.eigenvector_exact;
    rep.states = solve.graph.states.size();
    rep.raw_limit_exists = true;
    for (std::uint32_t c : solve.dec.ergodic_ids) {
        rep.classes.push_back(ClassSummary{c, solve.dec.members[c].size(), solve.dec.period[c],
                                           solve.class_value[c]});
        if (solve.dec.period[c] != 1) rep.raw_limit_exists = false;
    }
    if (!rep.existence_guaranteed && !rep.raw_limit_exists) {
        rep.note =
            "Cesaro limit along N = q^k; a periodic ergodic class is reachable and the natural "
            "density is not asserted";
    }
    return rep;
}

std::vector<BigRational> iterate_density(Base base, Modulus m, const ParamVector& s, unsigned K,
                                         const BuildOptions& opts) {
    const ChainGraph g = build_chain(base, m, {s}, opts);
    const std::uint32_t sid = *g.index_of(s.coeffs());

    std::vector<BigRational> cur(g.states.size());
    for (std::uint32_t t = 0; t < g.states.size(); ++t) cur[t] = (g.states[t][4] == 0) ? 1 : 0;

    std::vector<BigRational> traj;
    traj.reserve(K + 1);
    traj.push_back(cur[sid]);
    const BigRational qinv(1, static_cast<unsigned long>(g.q));
    for (unsigned k = 0; k < K; ++k) {
        std::vector<BigRational> next(g.states.size(), BigRational(0));
        for (std::uint32_t t = 0; t < g.states.size(); ++t) {
            BigRational acc(0);
            for (const Edge& e : g.edges[t])
                acc += BigRational(static_cast<long>(e.mult)) * cur[e.to];
            acc *= qinv;
            acc.canonicalize();
            next[t] = acc;
        }
        cur = std::move(next);
        traj.push_back(cur[sid]);
    }
    return traj;
}

std::string to_dot(const ChainGraph& g, const ChainDecomposition* dec) {
    std::string out;
    out += "digraph chain {\n";
    out += "  label=\"M(q=" + std::to_string(g.q) + ",d=" + std::to_string(g.d) + ")\";\n";
    out += "  node [shape=box];\n";
    for (std::uint32_t v = 0; v < g.states.size(); ++v) {
        std::string label = ParamVector(Modulus(g.d), g.states[v]).str();
        std::string attrs = "label=\"" + label + "\"";
        if (dec) {
            attrs += ", tooltip=\"scc " + std::to_string(dec->scc_of[v]) +
                     (dec->ergodic[dec->scc_of[v]] ? " (ergodic)" : " (transient)") + "\"";
            if (dec->ergodic[dec->scc_of[v]]) attrs += ", style=filled, fillcolor=lightgrey";
        }
        out += "  s" + std::to_string(v) + " [" + attrs + "];\n";
    }
    for (std::uint32_t v = 0; v < g.states.size(); ++v) {
        for (const Edge& e : g.edges[v]) {
            out += "  s" + std::to_string(v) + " -> s" + std::to_string(e.to) + " [label=\"" +
                   std::to_string(e.mult) + "/" + std::to_string(g.q) + "\"];\n";
        }
    }
    out += "}\n";
    return out;
}

nlohmann::json export_json(const ChainGraph& g, const ChainDecomposition& dec,
                           const std::vector<BigRational>* values) {
    nlohmann::json j;
    j["q"] = g.q;
    j["d"] = g.d;
    j["states"] = nlohmann::json::array();
    for (const State& s : g.states) j["states"].push_back(s);
    j["edges"] = nlohmann::json::array();
    for (std::uint32_t v = 0; v < g.states.size(); ++v) {
        for (const Edge& e : g.edges[v]) {
            j["edges"].push_back({{"from", v}, {"to", e.to}, {"mult", e.mult}});
        }
    }
    j["sccs"] = dec.scc_of;
    j["ergodic"] = dec.ergodic;
    j["periods"] = nlohmann::json::object();
    for (std::uint32_t c : dec.ergodic_ids) j["periods"][std::to_string(c)] = dec.period[c];
    j["densities"] = nlohmann::json::object();
    if (values) {
        for (std::uint32_t v = 0; v < g.states.size(); ++v)
            j["densities"][std::to_string(v)] = to_fraction_string((*values)[v]);
    }
    return j;
}

}  // namespace chain
}  // namespace qdensity
