#pragma once

#include <map>
#include <unordered_map>
#include <vector>

#include "bkh/bigmath.hpp"
#include "bkh/common.hpp"
#include "bkh/grid.hpp"
#include "bkh/solutions.hpp"

namespace bkh {

// The K-uniform hypergraph on A x [r] whose edges are the rainbow-colored
// solution sets. Edges are never materialized beyond diagnostics need: the
// census is carried by the solution list and color algebra.
struct RainbowHypergraph {
    EquationSpec spec;
    std::vector<Rank> members;
    std::vector<std::vector<std::uint16_t>> sols;
    int K = 0, r = 0;
    i64 num_vertices = 0;
    u128 f = 0;
    u128 edge_count = 0; // r!/(r-K)! * f
};

inline u128 falling_factorial(int from, int count) {
    u128 out = 1;
    for (int i = 0; i < count; ++i)
        out = checked_mul(out, u128(from - i), "falling_factorial");
    return out;
}

inline RainbowHypergraph build_hypergraph(const PointSet& A, const EquationSpec& spec,
                                          const SolveOptions& opts = {}) {
    if (spec.r < spec.total_points())
        throw domain_error("build_hypergraph: needs r >= K (rainbow edges require K colors)");
    RainbowHypergraph H;
    H.spec = spec;
    H.members = A.members();
    H.K = spec.total_points();
    H.r = spec.r;
    H.num_vertices = i64(H.members.size()) * spec.r;
    auto census = count_solutions(A, spec, opts);
    H.f = census.f;
    H.sols = solutions_as_indices(census.solutions, H.members);
    H.edge_count = checked_mul(H.f, falling_factorial(spec.r, H.K), "build_hypergraph");
    return H;
}

inline Rat average_degree(const RainbowHypergraph& H) {
    if (H.num_vertices == 0) throw domain_error("average_degree: empty vertex set");
    return Rat(Int(H.K) * to_int(H.edge_count), Int(H.num_vertices));
}

struct U128Hash {
    std::size_t operator()(u128 v) const {
        return std::size_t(fnv1a(&v, sizeof(v)));
    }
};

namespace detail {

inline u64 max_solution_cover(const std::vector<std::vector<std::uint16_t>>& sols, int j) {
    std::unordered_map<u128, u64, U128Hash> tally;
    std::vector<int> comb(static_cast<std::size_t>(j));
    u64 best = 0;
    for (const auto& sol : sols) {
        const int K = int(sol.size());
        if (j > K) continue;
        for (int i = 0; i < j; ++i) comb[std::size_t(i)] = i;
        while (true) {
            u128 key = 0;
            for (int i = 0; i < j; ++i) key = (key << 16) | u128(sol[std::size_t(comb[std::size_t(i)])]);
            best = std::max(best, ++tally[key]);
            int i = j - 1;
            while (i >= 0 && comb[std::size_t(i)] == K - j + i) --i;
            if (i < 0) break;
            ++comb[std::size_t(i)];
            for (int t = i + 1; t < j; ++t) comb[std::size_t(t)] = comb[std::size_t(t) - 1] + 1;
        }
    }
    return best;
}

} // namespace detail

// Delta_j: vertices sharing a point (or a color) have co-degree zero, so the
// maximum is (max solution cover of j points) * (r-j)...(r-K+1).
inline u128 max_codegree(const RainbowHypergraph& H, int j) {
    if (j < 2 || j > H.K) throw domain_error("max_codegree: needs 2 <= j <= K");
    u64 cover = detail::max_solution_cover(H.sols, j);
    if (cover == 0) return 0;
    return checked_mul(u128(cover), falling_factorial(H.r - j, H.K - j), "max_codegree");
}

// Explicit edge list for tiny instances: every (solution, injective color
// assignment) pair. Vertex id = point_index * r + color(0-based).
inline std::vector<std::vector<std::uint32_t>> enumerate_edges(const RainbowHypergraph& H,
                                                               u64 cap = 1'000'000) {
    if (H.edge_count > u128(cap))
        throw capacity_error("enumerate_edges: edge count exceeds the cap; use the formula path");
    std::vector<std::vector<std::uint32_t>> edges;
    edges.reserve(std::size_t(u64(H.edge_count)));
    std::vector<int> colors(static_cast<std::size_t>(H.K));
    for (const auto& sol : H.sols) {
        std::uint32_t used = 0;
        auto rec = [&](auto&& self, int at) -> void {
            if (at == int(sol.size())) {
                std::vector<std::uint32_t> e;
                e.reserve(sol.size());
                for (std::size_t i = 0; i < sol.size(); ++i)
                    e.push_back(std::uint32_t(sol[i]) * std::uint32_t(H.r) +
                                std::uint32_t(colors[i]));
                std::sort(e.begin(), e.end());
                edges.push_back(std::move(e));
                return;
            }
            for (int c = 0; c < H.r; ++c) {
                if ((used >> c) & 1) continue;
                used |= std::uint32_t(1) << c;
                colors[std::size_t(at)] = c;
                self(self, at + 1);
                used &= ~(std::uint32_t(1) << c);
            }
        };
        rec(rec, 0);
    }
    return edges;
}

// Dual co-degree path over an explicit edge list (tiny sizes only).
inline u128 max_codegree_via_edges(const RainbowHypergraph& H, int j, u64 cap = 1'000'000) {
    if (j < 2 || j > H.K) throw domain_error("max_codegree_via_edges: needs 2 <= j <= K");
    auto edges = enumerate_edges(H, cap);
    std::unordered_map<u64, u64> tally;
    u64 best = 0;
    std::vector<int> comb(static_cast<std::size_t>(j));
    for (const auto& e : edges) {
        const int K = int(e.size());
        for (int i = 0; i < j; ++i) comb[std::size_t(i)] = i;
        while (true) {
            u64 key = 0xcbf29ce484222325ULL;
            for (int i = 0; i < j; ++i) key = fnv1a_pod(e[std::size_t(comb[std::size_t(i)])], key);
            best = std::max(best, ++tally[key]);
            int i = j - 1;
            while (i >= 0 && comb[std::size_t(i)] == K - j + i) --i;
            if (i < 0) break;
            ++comb[std::size_t(i)];
            for (int t = i + 1; t < j; ++t) comb[std::size_t(t)] = comb[std::size_t(t) - 1] + 1;
        }
    }
    return best;
}

// Co-degree function at exact rational tau.
inline Rat codegree_function(const RainbowHypergraph& H, const Rat& tau) {
    if (tau <= 0 || tau >= 1) throw domain_error("codegree_function: needs 0 < tau < 1");
    if (H.edge_count == 0) throw domain_error("codegree_function: zero average degree");
    Rat d = average_degree(H);
    Rat sum = 0;
    for (int j = 2; j <= H.K; ++j) {
        Int scale = Int(1) << unsigned(binom(Int(H.K), 2).convert_to<u64>() - 1);
        Int down = Int(1) << unsigned(binom(Int(j - 1), 2).convert_to<u64>());
        Rat term = Rat(scale, down) * Rat(to_int(max_codegree(H, j)));
        Rat denom = d;
        for (int t = 0; t < j - 1; ++t) denom *= tau;
        sum += term / denom;
    }
    return sum;
}

// Same, over an enclosure of tau (monotone decreasing in tau).
inline BVal codegree_function_bv(const RainbowHypergraph& H, const BVal& tau) {
    if (H.edge_count == 0) throw domain_error("codegree_function_bv: zero average degree");
    Rat d = average_degree(H);
    BVal sum = bv_exact(Rat(0));
    for (int j = 2; j <= H.K; ++j) {
        Int scale = Int(1) << unsigned(binom(Int(H.K), 2).convert_to<u64>() - 1);
        Int down = Int(1) << unsigned(binom(Int(j - 1), 2).convert_to<u64>());
        Rat coeff = Rat(scale, down) * Rat(to_int(max_codegree(H, j))) / d;
        sum = bv_add(sum, bv_div(bv_exact(coeff), bv_pow(tau, unsigned(j - 1))));
    }
    return sum;
}

// ---------------------------------------------------------------------------
// The proof-path parameters epsilon and tau, and the container-theorem
// hypothesis checks, as certified interval verdicts.
// ---------------------------------------------------------------------------

struct ParameterReport {
    RatInterval epsilon, tau;      // enclosures (exact when n is a power of two)
    Verdict tau_small = Verdict::Undecided;   // tau < 1/(200 K (K!)^2)
    Verdict delta_small = Verdict::Undecided; // Delta(H,tau) <= eps/(12 K!)
    bool has_delta = false;
    RatInterval delta;             // Delta(H,tau) enclosure
    Verdict trend = Verdict::Undecided;       // Delta(H,tau) <= (log2 n)^{-5K}
};

inline BVal epsilon_bv(const EquationSpec& spec) {
    const int K = spec.total_points();
    Rat lead(Int(1), factorial(u64(spec.r)) / factorial(u64(spec.r - K)));
    return bv_mul(bv_exact(lead), bv_recip(bv_pow(bv_log2(Int(spec.n)), unsigned(5 * K))));
}

inline BVal tau_bv(const EquationSpec& spec) {
    const int k = spec.k(), h = spec.h(), K = spec.total_points();
    Rat expo = Rat(Int(k) * Int(h - 1) * Int(spec.d), Int(K - 1));
    return bv_mul(bv_recip(bv_npow(Int(spec.n), expo)), bv_pow(bv_log2(Int(spec.n)), 8));
}

inline ParameterReport paper_parameters(const EquationSpec& spec,
                                        const RainbowHypergraph* H = nullptr) {
    if (!spec.symmetric()) throw domain_error("paper_parameters: symmetric group sizes required");
    if (spec.n < 2) throw domain_error("paper_parameters: needs n >= 2");
    if (spec.r < spec.total_points()) throw domain_error("paper_parameters: needs r >= K");
    const int K = spec.total_points();
    ParameterReport rep;
    BVal eps = epsilon_bv(spec);
    BVal tau = tau_bv(spec);
    rep.epsilon = eps.eval(1);
    rep.tau = tau.eval(1);
    Rat tau_cap(Int(1), Int(200) * Int(K) * factorial(u64(K)) * factorial(u64(K)));
    rep.tau_small = bv_lt(tau, bv_exact(tau_cap));
    if (H != nullptr && H->edge_count > 0) {
        rep.has_delta = true;
        BVal delta = codegree_function_bv(*H, tau);
        rep.delta = delta.eval(1);
        Rat inv12(Int(1), Int(12) * factorial(u64(K)));
        rep.delta_small = bv_le(delta, bv_mul(eps, bv_exact(inv12)));
        rep.trend = bv_le(delta, bv_recip(bv_pow(bv_log2(Int(spec.n)), unsigned(5 * K))));
    }
    return rep;
}

// Exact pre-asymptotic co-degree bounds from the case analysis: terms with a
// negative exponent describe impossible configurations and contribute zero.
struct DeltaBoundReport {
    int j = 0;
    u128 delta_j = 0;
    Int bound = 0;
    bool holds = false;
};

inline DeltaBoundReport deltaj_bound_check(const RainbowHypergraph& H, int j, i64 sizeA) {
    if (!H.spec.symmetric()) throw domain_error("deltaj_bound_check: symmetric group sizes required");
    const int k = H.spec.k(), h = H.spec.h(), K = H.K;
    if (j < 2 || j > K) throw domain_error("deltaj_bound_check: needs 2 <= j <= K");
    auto pow0 = [&](int e) { return e < 0 ? Int(0) : int_pow(Int(sizeA), u64(e)); };
    DeltaBoundReport rep;
    rep.j = j;
    rep.delta_j = max_codegree(H, j);
    if (j == K) {
        rep.bound = 1;
    } else if (j <= h - 1) {
        rep.bound = int_pow(Int(H.r), u64(K - j)) * pow0(K - j - (k - 1));
    } else {
        Int inner = pow0(K - j - (k - 1));
        for (int t = 1; t <= j / h; ++t) inner += pow0(K - j - (k - t));
        rep.bound = int_pow(Int(H.r), u64(K - j)) * inner;
    }
    rep.holds = to_int(rep.delta_j) <= rep.bound;
    return rep;
}

} // namespace bkh
