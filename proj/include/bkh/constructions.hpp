#pragma once

#include <algorithm>
#include <random>
#include <vector>

#include "bkh/bigmath.hpp"
#include "bkh/coloring.hpp"
#include "bkh/common.hpp"
#include "bkh/grid.hpp"
#include "bkh/parallel.hpp"
#include "bkh/solutions.hpp"

namespace bkh {

inline Int rat_floor(const Rat& q) {
    Int num = boost::multiprecision::numerator(q);
    Int den = boost::multiprecision::denominator(q);
    Int t = num / den;
    if (t * den > num) --t;
    return t;
}

inline Int rat_ceil(const Rat& q) {
    Int num = boost::multiprecision::numerator(q);
    Int den = boost::multiprecision::denominator(q);
    Int t = num / den;
    if (t * den < num) ++t;
    return t;
}

// One per-coordinate interval of a construction window, with the exact
// rational endpoints and the integer range they round to (after clipping
// to [1, n]).
struct Window {
    Rat lo, hi;
    bool lo_strict = false, hi_strict = false;
    int x_min = 1, x_max = 0;
    bool clipped = false;

    static Window make(const Rat& lo, bool lo_strict, const Rat& hi, bool hi_strict, int n) {
        Window w;
        w.lo = lo;
        w.hi = hi;
        w.lo_strict = lo_strict;
        w.hi_strict = hi_strict;
        Int mn = lo_strict ? rat_floor(lo) + 1 : rat_ceil(lo);
        Int mx = hi_strict ? rat_ceil(hi) - 1 : rat_floor(hi);
        if (mn < 1) { mn = 1; w.clipped = true; }
        if (mx > n) { mx = n; w.clipped = true; }
        w.x_min = int(mn);
        w.x_max = int(mx);
        return w;
    }

    bool contains(int x) const { return x >= x_min && x <= x_max; }
    i64 count() const { return x_max >= x_min ? x_max - x_min + 1 : 0; }
};

// The 2k-1 pairwise disjoint interval products anchored at a corner point v
// (all coordinates 1 or n), with a = 1/(2h(2k-1)). Coordinates where v is 1
// take windows anchored at n; coordinates where v is n take windows anchored
// at 1.
struct CornerConstruction {
    EquationSpec spec;
    Point v;
    Rat a;
    std::vector<std::vector<Window>> A_windows; // [l-1][coord], l = 1..k
    std::vector<std::vector<Window>> B_windows; // [l-2][coord], l = 2..k
    std::vector<PointSet> A_sets;
    std::vector<PointSet> B_sets;
    bool disjoint = false;
};

namespace detail {

inline PointSet windows_to_set(const std::vector<Window>& win, const EquationSpec& spec) {
    PointSet out(spec);
    for (const auto& w : win)
        if (w.count() == 0) return out;
    Point p;
    p.c.assign(std::size_t(spec.d), 0);
    auto rec = [&](auto&& self, int j) -> void {
        if (j == spec.d) {
            out.insert(p);
            return;
        }
        for (int x = win[std::size_t(j)].x_min; x <= win[std::size_t(j)].x_max; ++x) {
            p.c[std::size_t(j)] = x;
            self(self, j + 1);
        }
    };
    rec(rec, 0);
    return out;
}

} // namespace detail

inline CornerConstruction build_corner_sets(const Point& v, const EquationSpec& spec) {
    if (spec.ambient != Ambient::Box)
        throw domain_error("build_corner_sets: box ambient required");
    if (!spec.symmetric()) throw domain_error("build_corner_sets: symmetric group sizes required");
    if (int(v.c.size()) != spec.d)
        throw domain_error("build_corner_sets: corner arity differs from d");
    for (auto c : v.c)
        if (c != 1 && c != spec.n)
            throw domain_error("build_corner_sets: every corner coordinate must be 1 or n");
    const int k = spec.k(), h = spec.h(), n = spec.n;
    CornerConstruction cc;
    cc.spec = spec;
    cc.v = v;
    cc.a = Rat(1, 2 * h * (2 * k - 1));
    Rat an = cc.a * n;
    if (an < 2)
        throw construction_error("build_corner_sets: a*n < 2, windows too small at this n");

    auto top = [&](int l) { // coordinate where v(j) == 1
        if (l == 1) return Window::make(Rat(n) - an, true, Rat(n), false, n);
        return Window::make(Rat(n) - Rat(2 * l - 1) * an, true, Rat(n) - Rat(2 * l - 2) * an,
                            false, n);
    };
    auto bot = [&](int l) { // coordinate where v(j) == n
        if (l == 1) return Window::make(Rat(1), false, an, true, n);
        return Window::make(Rat(2 * l - 2) * an, false, Rat(2 * l - 1) * an, true, n);
    };
    auto btop = [&](int l) {
        return Window::make(Rat(1) + Rat((h - 1) * (2 * l - 3)) * an, true,
                            Rat(1) + Rat((h - 1) * (2 * l - 1)) * an, true, n);
    };
    auto bbot = [&](int l) {
        return Window::make(Rat(n + h - 1) - Rat((h - 1) * (2 * l - 1)) * an, true,
                            Rat(n) - Rat((h - 1) * (2 * l - 3)) * an, true, n);
    };

    for (int l = 1; l <= k; ++l) {
        std::vector<Window> win;
        for (int j = 0; j < spec.d; ++j)
            win.push_back(v.c[std::size_t(j)] == 1 ? top(l) : bot(l));
        for (const auto& w : win)
            if (w.count() == 0)
                throw construction_error("build_corner_sets: an A-window rounds to empty");
        cc.A_windows.push_back(win);
        cc.A_sets.push_back(detail::windows_to_set(win, spec));
    }
    for (int l = 2; l <= k; ++l) {
        std::vector<Window> win;
        for (int j = 0; j < spec.d; ++j)
            win.push_back(v.c[std::size_t(j)] == 1 ? btop(l) : bbot(l));
        cc.B_windows.push_back(win);
        cc.B_sets.push_back(detail::windows_to_set(win, spec));
    }

    std::vector<const PointSet*> all;
    for (const auto& s : cc.A_sets) all.push_back(&s);
    for (const auto& s : cc.B_sets) all.push_back(&s);
    for (std::size_t i = 0; i < all.size(); ++i)
        for (std::size_t j = i + 1; j < all.size(); ++j)
            if (!all[i]->disjoint_with(*all[j]))
                throw property_violation("build_corner_sets: the 2k-1 sets are not pairwise disjoint");
    cc.disjoint = true;
    return cc;
}

// Samples (h-1)-subsets from each A_l and checks that the forced point
// s_1 - s_l lands legally inside B_l.
struct ForcingReport {
    u64 samples = 0;
    u64 passes = 0;
};

inline ForcingReport forcing_property_check(const CornerConstruction& cc, u64 samples, u64 seed) {
    const EquationSpec& spec = cc.spec;
    const int k = spec.k(), h = spec.h();
    std::vector<std::vector<Rank>> pools;
    for (const auto& s : cc.A_sets) {
        pools.push_back(s.members());
        if (pools.back().size() < std::size_t(h - 1))
            throw construction_error("forcing_property_check: an A-window has fewer than h-1 points");
    }
    std::mt19937_64 rng(seed);
    ForcingReport rep;
    rep.samples = samples;
    std::vector<std::int64_t> s1(static_cast<std::size_t>(spec.d)), sl(static_cast<std::size_t>(spec.d));
    for (u64 it = 0; it < samples; ++it) {
        auto draw = [&](const std::vector<Rank>& pool, std::vector<std::int64_t>& acc) {
            std::vector<std::size_t> idx(pool.size());
            for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
            for (int t = 0; t < h - 1; ++t) {
                std::uniform_int_distribution<std::size_t> pick(t, idx.size() - 1);
                std::swap(idx[std::size_t(t)], idx[pick(rng)]);
                Point p = unrank_point(pool[idx[std::size_t(t)]], spec);
                for (int j = 0; j < spec.d; ++j) acc[std::size_t(j)] += p.c[std::size_t(j)];
            }
        };
        std::fill(s1.begin(), s1.end(), 0);
        for (int j = 0; j < spec.d; ++j) s1[std::size_t(j)] = cc.v.c[std::size_t(j)];
        draw(pools[0], s1);
        bool ok = true;
        for (int l = 2; l <= k && ok; ++l) {
            std::fill(sl.begin(), sl.end(), 0);
            draw(pools[std::size_t(l) - 1], sl);
            for (int j = 0; j < spec.d; ++j) {
                std::int64_t x = s1[std::size_t(j)] - sl[std::size_t(j)];
                if (x < 1 || x > spec.n || !cc.B_windows[std::size_t(l) - 2][std::size_t(j)].contains(int(x)))
                    ok = false;
            }
        }
        if (!ok)
            throw property_violation("forcing_property_check: a sampled forced point left its B-window");
        ++rep.passes;
    }
    return rep;
}

// Product lower bound prod_l C(|A_l|, h-1) against the exact through-point count.
struct CornerLowerBoundReport {
    Int product_bound = 0;
    u128 f_v = 0;
    bool holds = false;
};

inline CornerLowerBoundReport corner_lower_bound_check(const CornerConstruction& cc,
                                                       const SolveOptions& opts = {}) {
    CornerLowerBoundReport rep;
    rep.product_bound = 1;
    for (const auto& s : cc.A_sets)
        rep.product_bound *= binom(Int(s.size()), u64(cc.spec.h() - 1));
    PointSet grid = full_grid(cc.spec);
    rep.f_v = count_through_point(grid, cc.v, cc.spec, opts).count;
    rep.holds = rep.product_bound <= to_int(rep.f_v);
    return rep;
}

// ---------------------------------------------------------------------------
// Half-size window around an interior point, isomorphic to [floor(n/2)]^d
// with v mapped to a corner; solutions through v transport bijectively.
// ---------------------------------------------------------------------------

struct ShiftedSubgrid {
    PointSet F;
    Point v_image;
    int side = 0; // floor(n/2)
};

inline ShiftedSubgrid shifted_subgrid(const PointSet& A, const Point& v,
                                      const EquationSpec& spec) {
    if (spec.ambient != Ambient::Box) throw domain_error("shifted_subgrid: box ambient required");
    if (!A.contains(v)) throw domain_error("shifted_subgrid: v must belong to A");
    const int m = spec.n / 2;
    ShiftedSubgrid out;
    out.side = m;
    out.v_image.c.assign(std::size_t(spec.d), 0);
    std::vector<Window> win;
    for (int j = 0; j < spec.d; ++j) {
        int vj = v.c[std::size_t(j)];
        if (vj <= m) {
            win.push_back(Window::make(Rat(vj), false, Rat(vj + m - 1), false, spec.n));
            out.v_image.c[std::size_t(j)] = 1;
        } else {
            win.push_back(Window::make(Rat(vj - m + 1), false, Rat(vj), false, spec.n));
            out.v_image.c[std::size_t(j)] = std::int32_t(m);
        }
    }
    out.F = detail::windows_to_set(win, spec);
    return out;
}

// ---------------------------------------------------------------------------
// The two solution-free sets for mixed equations (k = 2)
// ---------------------------------------------------------------------------

inline PointSet solution_free_ratio_set(const EquationSpec& spec) {
    if (spec.k() != 2) throw domain_error("solution_free_ratio_set: needs exactly two groups");
    const int h1 = spec.groups[0], h2 = spec.groups[1];
    if (h1 >= h2) throw domain_error("solution_free_ratio_set: needs h1 < h2");
    if (spec.ambient != Ambient::Box)
        throw domain_error("solution_free_ratio_set: box ambient required");
    int lo = int((i64(h1) * spec.n + h2 - 1) / h2) + 1; // ceil(h1 n / h2) + 1
    if (lo > spec.n)
        throw construction_error("solution_free_ratio_set: window empty at this n");
    std::vector<Window> win(std::size_t(spec.d),
                            Window::make(Rat(lo), false, Rat(spec.n), false, spec.n));
    return detail::windows_to_set(win, spec);
}

inline PointSet odd_coordinate_set(const EquationSpec& spec) {
    if (spec.k() != 2) throw domain_error("odd_coordinate_set: needs exactly two groups");
    const int h1 = spec.groups[0], h2 = spec.groups[1];
    if (h1 % 2 == 0 || h2 % 2 == 1)
        throw domain_error("odd_coordinate_set: needs h1 odd and h2 even");
    if (spec.ambient != Ambient::Box) throw domain_error("odd_coordinate_set: box ambient required");
    PointSet out(spec);
    Point p;
    p.c.assign(std::size_t(spec.d), 1);
    auto rec = [&](auto&& self, int j) -> void {
        if (j == spec.d) {
            out.insert(p);
            return;
        }
        for (int x = 1; x <= spec.n; x += 2) {
            p.c[std::size_t(j)] = std::int32_t(x);
            self(self, j + 1);
        }
    };
    rec(rec, 0);
    return out;
}

// ---------------------------------------------------------------------------
// Exhaustive extremal scan over all subsets at tiny n
// ---------------------------------------------------------------------------

struct ExtremalScanRow {
    u64 mask = 0;
    int size = 0;
    u128 g = 0;
};

struct ExtremalScanResult {
    std::vector<ExtremalScanRow> rows; // every subset, by mask ascending
    u128 max_g = 0;
    std::vector<u64> argmax;
    bool unique_max = false;
    bool full_grid_is_max = false;
    bool dedup_used = false;
    RatInterval sparse_threshold;  // n^d / log2 n
    RatInterval dense_threshold;   // n^d - n^d / log2 n
    bool thresholds_valid = false;
};

struct ScanOptions {
    u64 node_budget = 10'000'000;
    u64 bucket_budget = 1'000'000;
    int workers = 1;
    bool use_reflection_dedup = true;
};

inline ExtremalScanResult extremal_scan(const EquationSpec& spec, const ScanOptions& opts = {}) {
    const i64 N = spec.grid_size();
    if (N > 24) throw capacity_error("extremal_scan: n^d > 24 subsets are out of reach");
    {
        Int work = int_pow(Int(spec.r + 1), u64(N));
        if (work > Int(opts.node_budget) * 16)
            throw capacity_error("budget-colorings: extremal scan work estimate exceeds the budget");
    }
    // reflection x -> n+1-x (componentwise) maps solutions to solutions when
    // the group sizes are symmetric; scan each orbit once
    std::vector<u64> reflect_perm(static_cast<std::size_t>(N));
    bool dedup = opts.use_reflection_dedup && spec.symmetric() && spec.ambient == Ambient::Box;
    if (dedup) {
        for (i64 i = 0; i < N; ++i) {
            Point p = unrank_point(i, spec);
            for (auto& c : p.c) c = std::int32_t(spec.n + 1 - c);
            reflect_perm[std::size_t(i)] = u64(rank_point(p, spec));
        }
    }
    auto reflect_mask = [&](u64 mask) {
        u64 out = 0;
        for (i64 i = 0; i < N; ++i)
            if ((mask >> i) & 1) out |= u64(1) << reflect_perm[std::size_t(i)];
        return out;
    };

    std::vector<u64> reps;
    const u64 total = u64(1) << N;
    for (u64 mask = 0; mask < total; ++mask) {
        if (dedup && reflect_mask(mask) < mask) continue;
        reps.push_back(mask);
    }

    ColoringOptions copts;
    copts.node_budget = opts.node_budget;
    copts.bucket_budget = opts.bucket_budget;
    copts.workers = 1; // parallelism lives at the subset level

    struct Rows {
        std::vector<ExtremalScanRow> v;
    };
    auto rows = parallel_reduce<Rows>(
        reps.size(), opts.workers, Rows{},
        [&](std::size_t i) {
            u64 mask = reps[i];
            PointSet A(spec);
            for (i64 b = 0; b < N; ++b)
                if ((mask >> b) & 1) A.insert(b);
            u128 g = count_rainbow_free(A, spec, copts).g;
            Rows out;
            out.v.push_back({mask, int(A.size()), g});
            if (dedup) {
                u64 rm = reflect_mask(mask);
                if (rm != mask) out.v.push_back({rm, int(A.size()), g});
            }
            return out;
        },
        [](Rows& acc, Rows&& part) {
            acc.v.insert(acc.v.end(), part.v.begin(), part.v.end());
        });

    ExtremalScanResult res;
    res.dedup_used = dedup;
    res.rows = std::move(rows.v);
    std::sort(res.rows.begin(), res.rows.end(),
              [](const ExtremalScanRow& a, const ExtremalScanRow& b) { return a.mask < b.mask; });
    for (const auto& row : res.rows) {
        if (row.g > res.max_g) {
            res.max_g = row.g;
            res.argmax.clear();
        }
        if (row.g == res.max_g) res.argmax.push_back(row.mask);
    }
    res.unique_max = res.argmax.size() == 1;
    res.full_grid_is_max =
        res.argmax.size() == 1 && res.argmax[0] == total - 1;
    if (spec.n >= 2) {
        BVal nd = bv_exact(Rat(N));
        BVal ratio = bv_div(nd, bv_log2(Int(spec.n)));
        res.sparse_threshold = ratio.eval(1);
        res.dense_threshold = bv_sub(nd, ratio).eval(1);
        res.thresholds_valid = true;
    }
    return res;
}

} // namespace bkh
