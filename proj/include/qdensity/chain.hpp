#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "qdensity/params.hpp"
#include "qdensity/rational.hpp"
#include "qdensity/valuations.hpp"

namespace qdensity {
namespace chain {

using State = std::array<std::uint32_t, 5>;

struct Edge {
    std::uint32_t to;
    std::uint32_t mult;  // number of lambda in [0, q) mapping here
};

/// Reachable closure of a seed set under s -> s M_lambda, with transition
/// multiplicities. States are sorted lexicographically so all downstream
/// output is deterministic. Every state's out-multiplicities sum to q.
struct ChainGraph {
    std::uint64_t q = 0;
    std::uint32_t d = 0;
    std::vector<State> states;
    std::vector<std::vector<Edge>> edges;
    std::vector<std::uint32_t> seeds;  // indices into states

    std::optional<std::uint32_t> index_of(const State& s) const;
};

struct BuildOptions {
    std::uint64_t state_budget = 10'000'000;
    bool override_budget = false;
};

ChainGraph build_chain(Base base, Modulus m, const std::vector<ParamVector>& seeds,
                       const BuildOptions& opts = {});

/// Strongly connected components plus the chain-theoretic layer: a class is
/// ergodic iff no edge leaves it; each ergodic class gets its period (gcd of
/// its cycle lengths).
struct ChainDecomposition {
    std::vector<std::uint32_t> scc_of;                // per state
    std::vector<std::vector<std::uint32_t>> members;  // per scc, ascending
    std::vector<bool> ergodic;                        // per scc
    std::vector<std::uint64_t> period;                // per scc; 0 for non-ergodic
    std::vector<std::uint32_t> topo_order;            // scc ids, sources first
    std::vector<std::uint32_t> ergodic_ids;           // ascending

    std::size_t scc_count() const { return members.size(); }
};

ChainDecomposition decompose(const ChainGraph& g);

// Unique stationary distribution of the chain restricted to an ergodic
// class, indexed like members[scc]. Exact; entries positive; sums to 1.
std::vector<BigRational> stationary(const ChainGraph& g, const ChainDecomposition& dec,
                                    std::uint32_t scc);

// Probability of eventual absorption into each ergodic class (indexed like
// dec.ergodic_ids) starting from `state`. Entries sum to 1.
std::vector<BigRational> absorption(const ChainGraph& g, const ChainDecomposition& dec,
                                    std::uint32_t state);

/// Full exact solve: the eigenvector v = P v whose entry at s is the Cesaro
/// limit of (P^k g0)(s) with g0(t) = [theta_0(t) = 0]. This equals the
/// natural density whenever the density exists.
struct DensitySolve {
    ChainGraph graph;
    ChainDecomposition dec;
    std::vector<BigRational> value;        // per state
    std::vector<BigRational> class_value;  // per scc; meaningful for ergodic ids
    bool eigenvector_exact = false;        // v = P v verified exactly
};

DensitySolve solve_density(Base base, Modulus m, const std::vector<ParamVector>& seeds,
                           const BuildOptions& opts = {});

struct ClassSummary {
    std::uint32_t scc = 0;
    std::size_t size = 0;
    std::uint64_t period = 0;
    BigRational value;
};

/// Result of a density query with its diagnostics. `value` is the Cesaro
/// limit along N = q^k; when raw_limit_exists it is the plain limit of
/// gamma(q^k)/q^k, and when the density exists it equals the density.
struct DensityReport {
    BigRational value;
    std::string method;                // "chain-exact"
    bool existence_guaranteed = false; // d | q^n, or theta_u = theta_2 = 0
    bool raw_limit_exists = false;     // all reachable ergodic classes aperiodic
    bool eigenvector_exact = false;    // v = P v residual is exactly zero
    std::size_t states = 0;
    std::vector<ClassSummary> classes;
    std::string note;
};

DensityReport exact_density(Base base, Modulus m, const ParamVector& s,
                            const BuildOptions& opts = {});

// Trajectory (P^k g0)(s) for k = 0..K; entry k equals gamma(q^k)/q^k.
std::vector<BigRational> iterate_density(Base base, Modulus m, const ParamVector& s, unsigned K,
                                         const BuildOptions& opts = {});

// Exact check that q*v(s) = sum_t mu(s,t) v(t) for every state.
bool is_eigenvector(const ChainGraph& g, const std::vector<BigRational>& v);

std::string to_dot(const ChainGraph& g, const ChainDecomposition* dec = nullptr);

// The chain.v1 JSON document (see schemas/chain.v1.json).
nlohmann::json export_json(const ChainGraph& g, const ChainDecomposition& dec,
                           const std::vector<BigRational>* values = nullptr);

}  // namespace chain
}  // namespace qdensity
