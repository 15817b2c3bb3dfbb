#pragma once

#include <atomic>
#include <bit>
#include <vector>

#include "bkh/bigmath.hpp"
#include "bkh/common.hpp"
#include "bkh/grid.hpp"
#include "bkh/parallel.hpp"
#include "bkh/solutions.hpp"

namespace bkh {

// Colors are 1-based in all inputs and outputs; bit i of a mask stands for
// color i+1. A coloring is aligned with A.members() (canonical rank order).
struct Coloring {
    std::vector<std::uint8_t> colors;
};

inline bool is_rainbow_free(const Coloring& c, const std::vector<std::vector<std::uint16_t>>& sols,
                            std::size_t npoints, int r) {
    if (c.colors.size() != npoints)
        throw domain_error("is_rainbow_free: coloring length differs from |A|");
    for (std::uint8_t v : c.colors)
        if (v < 1 || int(v) > r) throw domain_error("is_rainbow_free: color outside [1, r]");
    for (const auto& sol : sols) {
        std::uint32_t mask = 0;
        for (std::uint16_t i : sol) mask |= std::uint32_t(1) << (c.colors.at(i) - 1);
        if (std::size_t(std::popcount(mask)) == sol.size()) return false;
    }
    return true;
}

struct ColorCountOptions {
    u64 node_budget = 10'000'000;
    int workers = 1;
    bool palette_census = false;  // histogram by number of distinct colors used
    bool deviation_census = false;
    std::uint32_t outside_mask = 0; // colors counted as deviating
};

struct ColorCountResult {
    u128 total = 0;
    std::vector<u128> by_palette_size;
    std::vector<u128> by_deviation;
    u64 nodes = 0;
};

namespace detail {

inline u128 binom_u128(u64 n, u64 k) {
    if (k > n) return 0;
    if (k > n - k) k = n - k;
    u128 acc = 1;
    for (u64 i = 1; i <= k; ++i) {
        acc = checked_mul(acc, u128(n - k + i), "binom_u128");
        acc /= i;
    }
    return acc;
}

// Backtracking over points in canonical order. A branch dies the moment a
// solution set becomes fully colored with pairwise distinct colors. Once
// every solution already repeats a color ("safe"), the remaining points are
// unconstrained and the subtree is counted in closed form.
class ColorWalk {
public:
    ColorWalk(int m, int r, const std::vector<std::uint32_t>& palettes,
              const std::vector<std::vector<std::uint16_t>>& sols,
              const ColorCountOptions& opts, std::atomic<u64>* nodes)
        : m_(m), r_(r), palettes_(palettes), opts_(opts), nodes_(nodes) {
        if (opts.palette_census && opts.deviation_census)
            throw domain_error("color counting: palette and deviation censuses are exclusive");
        full_mask_ = r >= 32 ? ~std::uint32_t(0) : (std::uint32_t(1) << r) - 1;
        // solutions with more points than available colors can never be rainbow
        for (const auto& s : sols)
            if (s.size() <= std::size_t(r)) sols_.push_back(s);
        incident_.resize(std::size_t(m));
        for (std::size_t si = 0; si < sols_.size(); ++si)
            for (std::uint16_t p : sols_[si]) incident_[p].push_back(std::uint16_t(si));
        sol_mask_.assign(sols_.size(), 0);
        sol_colored_.assign(sols_.size(), 0);
        sol_dups_.assign(sols_.size(), 0);
        unsafe_ = int(sols_.size());
        color_use_.assign(std::size_t(r), 0);
        suffix_full_.assign(std::size_t(m) + 1, true);
        for (int p = m - 1; p >= 0; --p)
            suffix_full_[std::size_t(p)] =
                suffix_full_[std::size_t(p) + 1] && palettes[std::size_t(p)] == full_mask_;
        if (opts.palette_census) result_.by_palette_size.assign(std::size_t(r) + 1, 0);
        if (opts.deviation_census) result_.by_deviation.assign(std::size_t(m) + 1, 0);
    }

    // run the whole tree, or a single first-color branch (root_color >= 0)
    ColorCountResult run(int root_color = -1) {
        if (root_color < 0) {
            recurse(0);
        } else {
            count_node();
            if (apply(0, root_color)) recurse(1);
            undo(0, root_color);
        }
        return std::move(result_);
    }

    bool root_shortcut_applies() const { return unsafe_ == 0 && shortcut_allowed(0); }

private:
    int m_, r_;
    const std::vector<std::uint32_t>& palettes_;
    ColorCountOptions opts_;
    std::atomic<u64>* nodes_;
    std::uint32_t full_mask_ = 0;
    std::vector<std::vector<std::uint16_t>> sols_;
    std::vector<std::vector<std::uint16_t>> incident_;
    std::vector<std::uint32_t> sol_mask_;
    std::vector<std::uint8_t> sol_colored_, sol_dups_;
    std::vector<std::uint8_t> journal_;
    std::vector<std::uint16_t> color_use_;
    std::vector<bool> suffix_full_;
    int unsafe_ = 0;
    int used_distinct_ = 0, dev_count_ = 0;
    ColorCountResult result_;

    void count_node() {
        u64 seen = nodes_->fetch_add(1, std::memory_order_relaxed) + 1;
        if (seen > opts_.node_budget)
            throw capacity_error("budget-colorings: backtracking node budget exceeded; raise --budget-colorings");
    }

    bool shortcut_allowed(int p) const {
        if (opts_.palette_census || opts_.deviation_census) return suffix_full_[std::size_t(p)];
        return true;
    }

    bool apply(int p, int c) {
        bool fail = false;
        for (std::uint16_t s : incident_[std::size_t(p)]) {
            ++sol_colored_[s];
            if ((sol_mask_[s] >> c) & 1) {
                if (sol_dups_[s]++ == 0) --unsafe_;
                journal_.push_back(1);
            } else {
                sol_mask_[s] |= std::uint32_t(1) << c;
                journal_.push_back(0);
                if (sol_colored_[s] == sols_[s].size() && sol_dups_[s] == 0) fail = true;
            }
        }
        if (color_use_[std::size_t(c)]++ == 0) ++used_distinct_;
        if ((opts_.outside_mask >> c) & 1) ++dev_count_;
        return !fail;
    }

    void undo(int p, int c) {
        const auto& inc = incident_[std::size_t(p)];
        for (std::size_t t = inc.size(); t-- > 0;) {
            std::uint16_t s = inc[t];
            --sol_colored_[s];
            std::uint8_t j = journal_.back();
            journal_.pop_back();
            if (j) {
                if (--sol_dups_[s] == 0) ++unsafe_;
            } else {
                sol_mask_[s] &= ~(std::uint32_t(1) << c);
            }
        }
        if (--color_use_[std::size_t(c)] == 0) --used_distinct_;
        if ((opts_.outside_mask >> c) & 1) --dev_count_;
    }

    void add_total(u128 v) {
        result_.total = checked_add(result_.total, v, "color counting");
    }

    void closed_form(int p) {
        int m_rem = m_ - p;
        if (opts_.palette_census) {
            int u = used_distinct_;
            for (int t = 0; t + u <= r_; ++t) {
                if (t > m_rem) break;
                // colorings of m_rem free points using exactly t new colors
                u128 pos = 0, neg = 0;
                for (int i = 0; i <= t; ++i) {
                    u128 term = checked_mul(binom_u128(u64(t), u64(i)),
                                            checked_pow(u128(u + t - i), unsigned(m_rem), "color counting"),
                                            "color counting");
                    if (i & 1) neg = checked_add(neg, term, "color counting");
                    else pos = checked_add(pos, term, "color counting");
                }
                u128 inner = pos - neg;
                u128 ways = checked_mul(binom_u128(u64(r_ - u), u64(t)), inner, "color counting");
                if (ways == 0) continue;
                result_.by_palette_size[std::size_t(u + t)] =
                    checked_add(result_.by_palette_size[std::size_t(u + t)], ways, "color counting");
                add_total(ways);
            }
            return;
        }
        if (opts_.deviation_census) {
            int oc = std::popcount(opts_.outside_mask & full_mask_);
            int ic = r_ - oc;
            for (int t = 0; t <= m_rem; ++t) {
                u128 ways = checked_mul(binom_u128(u64(m_rem), u64(t)),
                                        checked_pow(u128(oc), unsigned(t), "color counting"),
                                        "color counting");
                ways = checked_mul(ways, checked_pow(u128(ic), unsigned(m_rem - t), "color counting"),
                                   "color counting");
                if (ways == 0) continue;
                result_.by_deviation[std::size_t(dev_count_ + t)] =
                    checked_add(result_.by_deviation[std::size_t(dev_count_ + t)], ways, "color counting");
                add_total(ways);
            }
            return;
        }
        u128 prod = 1;
        for (int q = p; q < m_; ++q)
            prod = checked_mul(prod, u128(std::popcount(palettes_[std::size_t(q)])), "color counting");
        add_total(prod);
    }

    void leaf() {
        add_total(1);
        if (opts_.palette_census)
            result_.by_palette_size[std::size_t(used_distinct_)] = checked_add(
                result_.by_palette_size[std::size_t(used_distinct_)], 1, "color counting");
        if (opts_.deviation_census)
            result_.by_deviation[std::size_t(dev_count_)] =
                checked_add(result_.by_deviation[std::size_t(dev_count_)], 1, "color counting");
    }

    void recurse(int p) {
        if (unsafe_ == 0 && shortcut_allowed(p)) {
            closed_form(p);
            return;
        }
        if (p == m_) {
            leaf();
            return;
        }
        std::uint32_t pal = palettes_[std::size_t(p)] & full_mask_;
        while (pal) {
            int c = std::countr_zero(pal);
            pal &= pal - 1;
            count_node();
            if (apply(p, c)) recurse(p + 1);
            undo(p, c);
        }
    }
};

inline void merge_result(ColorCountResult& acc, ColorCountResult&& part) {
    acc.total = checked_add(acc.total, part.total, "color counting");
    if (acc.by_palette_size.size() < part.by_palette_size.size())
        acc.by_palette_size.resize(part.by_palette_size.size(), 0);
    for (std::size_t i = 0; i < part.by_palette_size.size(); ++i)
        acc.by_palette_size[i] = checked_add(acc.by_palette_size[i], part.by_palette_size[i], "color counting");
    if (acc.by_deviation.size() < part.by_deviation.size())
        acc.by_deviation.resize(part.by_deviation.size(), 0);
    for (std::size_t i = 0; i < part.by_deviation.size(); ++i)
        acc.by_deviation[i] = checked_add(acc.by_deviation[i], part.by_deviation[i], "color counting");
    acc.nodes += part.nodes;
}

} // namespace detail

// Exact count of colorings c with c(x) in P(x) for all x and no rainbow
// solution, over precomputed solution index lists.
inline ColorCountResult count_colorings_core(int npoints, int r,
                                             const std::vector<std::uint32_t>& palettes,
                                             const std::vector<std::vector<std::uint16_t>>& sols,
                                             const ColorCountOptions& opts) {
    if (r < 1 || r > 16) throw capacity_error("color counting: r must lie in [1, 16]");
    if (int(palettes.size()) != npoints)
        throw domain_error("color counting: palette list length differs from |A|");
    std::atomic<u64> nodes{0};
    ColorCountResult out;
    if (npoints == 0 || opts.workers <= 1) {
        detail::ColorWalk walk(npoints, r, palettes, sols, opts, &nodes);
        out = walk.run();
    } else {
        detail::ColorWalk probe(npoints, r, palettes, sols, opts, &nodes);
        if (probe.root_shortcut_applies()) {
            out = probe.run();
        } else {
            std::vector<int> root_colors;
            std::uint32_t pal = palettes[0] & ((r >= 32) ? ~0u : ((1u << r) - 1));
            while (pal) {
                root_colors.push_back(std::countr_zero(pal));
                pal &= pal - 1;
            }
            out = parallel_reduce<ColorCountResult>(
                root_colors.size(), opts.workers, ColorCountResult{},
                [&](std::size_t i) {
                    detail::ColorWalk walk(npoints, r, palettes, sols, opts, &nodes);
                    return walk.run(root_colors[i]);
                },
                [](ColorCountResult& acc, ColorCountResult&& part) {
                    detail::merge_result(acc, std::move(part));
                });
        }
    }
    if (opts.palette_census && out.by_palette_size.size() < std::size_t(r) + 1)
        out.by_palette_size.resize(std::size_t(r) + 1, 0);
    if (opts.deviation_census && out.by_deviation.size() < std::size_t(npoints) + 1)
        out.by_deviation.resize(std::size_t(npoints) + 1, 0);
    out.nodes = nodes.load();
    return out;
}

// Inequality-(2) value: colorings that use exactly K-1 of the r colors,
// counted by inclusion-exclusion and summed over the color sets.
inline Int lower_bound_value(u64 sizeA, int K, int r) {
    Int sum = 0;
    for (int i = 0; i <= K - 2; ++i) {
        Int term = binom(Int(K - 1), u64(i)) * int_pow(Int(K - 1 - i), sizeA);
        if (i & 1) sum -= term;
        else sum += term;
    }
    return binom(Int(r), u64(K - 1)) * sum;
}

inline Int lower_bound_value(u64 sizeA, int k, int h, int r) {
    return lower_bound_value(sizeA, k * h, r);
}

struct ColoringCensus {
    u128 g = 0;
    std::vector<u128> by_palette_size; // index = number of distinct colors used
    Int lower_bound = 0;
    u64 nodes = 0;
    u128 solution_count = 0;
};

struct ColoringOptions {
    u64 node_budget = 10'000'000;
    u64 bucket_budget = 1'000'000;
    int workers = 1;
};

inline ColoringCensus count_rainbow_free(const PointSet& A, const EquationSpec& spec,
                                         const ColoringOptions& opts = {}) {
    auto census = count_solutions(A, spec, SolveOptions{opts.bucket_budget, opts.workers});
    auto members = A.members();
    auto sols = solutions_as_indices(census.solutions, members);
    std::uint32_t full = spec.r >= 32 ? ~0u : (std::uint32_t(1) << spec.r) - 1;
    std::vector<std::uint32_t> palettes(members.size(), full);
    ColorCountOptions copts;
    copts.node_budget = opts.node_budget;
    copts.workers = opts.workers;
    copts.palette_census = true;
    auto res = count_colorings_core(int(members.size()), spec.r, palettes, sols, copts);
    ColoringCensus out;
    out.g = res.total;
    out.by_palette_size = std::move(res.by_palette_size);
    out.lower_bound = lower_bound_value(u64(members.size()), spec.total_points(), spec.r);
    out.nodes = res.nodes;
    out.solution_count = census.f;
    return out;
}

inline ColoringCensus count_rainbow_free_torus(const PointSet& A, const EquationSpec& spec,
                                               const ColoringOptions& opts = {}) {
    if (spec.ambient != Ambient::Torus)
        throw domain_error("count_rainbow_free_torus: spec ambient must be the torus");
    return count_rainbow_free(A, spec, opts);
}

struct DeviationCensus {
    u128 deviating = 0;              // colorings with at least one point outside C
    u128 inside = 0;                 // rainbow-free colorings entirely inside C
    std::vector<u128> by_deviation;  // histogram by |M_c|
    u64 nodes = 0;
};

inline DeviationCensus count_deviating(const PointSet& A, const std::vector<int>& C,
                                       const EquationSpec& spec, const ColoringOptions& opts = {}) {
    const int K = spec.total_points();
    if (int(C.size()) != K - 1)
        throw domain_error("count_deviating: |C| must equal K-1");
    std::uint32_t cmask = 0;
    for (int c : C) {
        if (c < 1 || c > spec.r) throw domain_error("count_deviating: color outside [1, r]");
        std::uint32_t bit = std::uint32_t(1) << (c - 1);
        if (cmask & bit) throw domain_error("count_deviating: repeated color in C");
        cmask |= bit;
    }
    auto census = count_solutions(A, spec, SolveOptions{opts.bucket_budget, opts.workers});
    auto members = A.members();
    auto sols = solutions_as_indices(census.solutions, members);
    std::uint32_t full = spec.r >= 32 ? ~0u : (std::uint32_t(1) << spec.r) - 1;
    std::vector<std::uint32_t> palettes(members.size(), full);
    ColorCountOptions copts;
    copts.node_budget = opts.node_budget;
    copts.workers = opts.workers;
    copts.deviation_census = true;
    copts.outside_mask = full & ~cmask;
    auto res = count_colorings_core(int(members.size()), spec.r, palettes, sols, copts);
    DeviationCensus out;
    out.by_deviation = std::move(res.by_deviation);
    out.inside = out.by_deviation.empty() ? 0 : out.by_deviation[0];
    out.deviating = res.total - out.inside;
    out.nodes = res.nodes;
    return out;
}

} // namespace bkh
