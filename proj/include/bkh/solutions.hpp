#pragma once

#include <algorithm>
#include <array>
#include <cstring>
#include <map>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "bkh/bigmath.hpp"
#include "bkh/common.hpp"
#include "bkh/grid.hpp"
#include "bkh/parallel.hpp"

namespace bkh {

// A solution is a set: the union of the groups, with every point distinct.
// Sets admitting several witness partitions are counted once; one witness
// (group index per point, aligned with the sorted point list) is kept.
struct SolutionSet {
    std::vector<Rank> points;
    std::vector<std::uint8_t> witness;
};

inline bool operator<(const SolutionSet& a, const SolutionSet& b) { return a.points < b.points; }

struct SolveOptions {
    u64 bucket_budget = 1'000'000; // max table cells / bucket entries / stored solutions
    int workers = 1;
};

// ---------------------------------------------------------------------------
// Sum-space tables
// ---------------------------------------------------------------------------

namespace detail {

// Dense indexing of componentwise sums of up to hmax points. Box sums are
// kept raw (per-coordinate range 0..hmax*n, so index addition is linear);
// torus sums are reduced mod n per coordinate.
struct SumSpace {
    Ambient ambient;
    int d, n, hmax;
    i64 base, size;

    static SumSpace make(const EquationSpec& spec, int hmax, u64 budget_cells) {
        SumSpace ss;
        ss.ambient = spec.ambient;
        ss.d = spec.d;
        ss.n = spec.n;
        ss.hmax = hmax;
        ss.base = spec.ambient == Ambient::Box ? i64(hmax) * spec.n + 1 : spec.n;
        ss.size = 1;
        for (int j = 0; j < ss.d; ++j) {
            if (ss.size > (i64(1) << 40) / ss.base)
                throw capacity_error("budget-buckets: sum-space table exceeds the bucket budget; shrink n or raise --budget-buckets");
            ss.size *= ss.base;
        }
        if (u128(ss.size) * u128(hmax + 1) > u128(budget_cells) * 8)
            throw capacity_error("budget-buckets: sum-space tables exceed the bucket budget; shrink n or raise --budget-buckets");
        return ss;
    }

    i64 index_raw(const std::int32_t* coords) const {
        i64 idx = 0;
        for (int j = 0; j < d; ++j) idx = idx * base + coords[j];
        return idx;
    }

    // index of a raw coordinate sum, reducing mod n on the torus
    i64 index_sum(const std::int64_t* sums) const {
        i64 idx = 0;
        for (int j = 0; j < d; ++j) {
            i64 c = sums[j];
            if (ambient == Ambient::Torus) c = ((c % n) + n) % n;
            idx = idx * base + c;
        }
        return idx;
    }

    std::vector<std::int32_t> coords_of(i64 idx) const {
        std::vector<std::int32_t> c(static_cast<std::size_t>(d));
        for (int j = d - 1; j >= 0; --j) {
            c[std::size_t(j)] = std::int32_t(idx % base);
            idx /= base;
        }
        return c;
    }

    i64 add(i64 a, i64 b) const {
        if (ambient == Ambient::Box) return a + b;
        i64 out = 0, pw = 1;
        for (int j = 0; j < d; ++j) {
            out += ((a % base + b % base) % base) * pw;
            a /= base;
            b /= base;
            pw *= base;
        }
        return out;
    }
};

struct Members {
    std::vector<Rank> ranks;          // ascending
    std::vector<std::int32_t> coords; // m x d row-major
    int m = 0, d = 0;

    const std::int32_t* coord(int i) const { return coords.data() + std::size_t(i) * std::size_t(d); }
};

inline Members collect_members(const PointSet& A) {
    Members M;
    M.d = A.spec().d;
    M.ranks = A.members();
    M.m = int(M.ranks.size());
    M.coords.resize(std::size_t(M.m) * std::size_t(M.d));
    for (int i = 0; i < M.m; ++i) {
        Point p = unrank_point(M.ranks[std::size_t(i)], A.spec());
        std::copy(p.c.begin(), p.c.end(), M.coords.begin() + std::size_t(i) * std::size_t(M.d));
    }
    return M;
}

// tables[c][s] = number of c-subsets of the members with sum index s
inline std::vector<std::vector<u64>> subset_count_tables(const Members& M, const SumSpace& ss,
                                                         int cmax) {
    for (int c = 0; c <= cmax; ++c)
        if (binom(Int(M.m), u64(c)) >= Int(std::numeric_limits<u64>::max()))
            throw capacity_error("subset_count_tables: counts exceed 64 bits; shrink the point set");
    std::vector<std::vector<u64>> t(std::size_t(cmax) + 1,
                                    std::vector<u64>(std::size_t(ss.size), 0));
    t[0][0] = 1;
    std::array<std::int64_t, 8> sums{};
    for (int i = 0; i < M.m; ++i) {
        i64 off = 0;
        if (ss.ambient == Ambient::Box) {
            off = ss.index_raw(M.coord(i));
        }
        for (int c = std::min(cmax, i + 1); c >= 1; --c) {
            const auto& prev = t[std::size_t(c) - 1];
            auto& cur = t[std::size_t(c)];
            if (ss.ambient == Ambient::Box) {
                for (i64 s = ss.size - 1 - off; s >= 0; --s)
                    if (prev[std::size_t(s)]) cur[std::size_t(s + off)] += prev[std::size_t(s)];
            } else {
                for (i64 s = 0; s < ss.size; ++s) {
                    if (!prev[std::size_t(s)]) continue;
                    i64 a = s;
                    for (int j = ss.d - 1; j >= 0; --j) {
                        sums[std::size_t(j)] = a % ss.base + M.coord(i)[j];
                        a /= ss.base;
                    }
                    cur[std::size_t(ss.index_sum(sums.data()))] += prev[std::size_t(s)];
                }
            }
        }
    }
    return t;
}

// tables[c][s] = number of ordered c-tuples of members (repeats allowed)
inline std::vector<std::vector<u64>> tuple_count_tables(const Members& M, const SumSpace& ss,
                                                        int cmax) {
    u128 e = 1;
    for (int c = 0; c < cmax; ++c) {
        e = checked_mul(e, u128(std::max(M.m, 1)), "tuple_count_tables");
        if (e > u128(std::numeric_limits<u64>::max()))
            throw capacity_error("tuple_count_tables: counts exceed 64 bits; shrink the point set");
    }
    std::vector<std::vector<u64>> t(std::size_t(cmax) + 1,
                                    std::vector<u64>(std::size_t(ss.size), 0));
    t[0][0] = 1;
    std::array<std::int64_t, 8> sums{};
    for (int c = 1; c <= cmax; ++c) {
        const auto& prev = t[std::size_t(c) - 1];
        auto& cur = t[std::size_t(c)];
        for (int i = 0; i < M.m; ++i) {
            i64 off = ss.ambient == Ambient::Box ? ss.index_raw(M.coord(i)) : 0;
            if (ss.ambient == Ambient::Box) {
                for (i64 s = ss.size - 1 - off; s >= 0; --s)
                    if (prev[std::size_t(s)]) cur[std::size_t(s + off)] += prev[std::size_t(s)];
            } else {
                for (i64 s = 0; s < ss.size; ++s) {
                    if (!prev[std::size_t(s)]) continue;
                    i64 a = s;
                    for (int j = ss.d - 1; j >= 0; --j) {
                        sums[std::size_t(j)] = a % ss.base + M.coord(i)[j];
                        a /= ss.base;
                    }
                    cur[std::size_t(ss.index_sum(sums.data()))] += prev[std::size_t(s)];
                }
            }
        }
    }
    return t;
}

// Fixed-size subsets stored flat: member indices (ascending) plus a bitmask
// over member positions for O(words) disjointness tests.
struct SubsetPool {
    int size = 0, words = 1;
    std::vector<std::uint16_t> flat;
    std::vector<u64> masks;
    std::size_t flat_count0 = 0; // number of empty subsets (size == 0 case)

    std::size_t count() const { return size == 0 ? flat_count0 : flat.size() / std::size_t(size); }

    const std::uint16_t* idx(std::size_t i) const { return flat.data() + i * std::size_t(size); }
    const u64* mask(std::size_t i) const { return masks.data() + i * std::size_t(words); }

    std::size_t append(const std::uint16_t* ids) {
        if (size == 0) return flat_count0++;
        std::size_t at = count();
        flat.insert(flat.end(), ids, ids + size);
        masks.insert(masks.end(), std::size_t(words), 0);
        u64* w = masks.data() + at * std::size_t(words);
        for (int t = 0; t < size; ++t) w[ids[t] >> 6] |= u64(1) << (ids[t] & 63);
        return at;
    }

    bool disjoint(std::size_t i, const u64* acc) const {
        if (size == 0) return true;
        const u64* w = mask(i);
        for (int t = 0; t < words; ++t)
            if (w[t] & acc[t]) return false;
        return true;
    }

    void orr(std::size_t i, u64* acc, bool set) const {
        if (size == 0) return;
        const u64* w = mask(i);
        for (int t = 0; t < words; ++t) {
            if (set) acc[t] |= w[t];
            else acc[t] &= ~w[t];
        }
    }
};

// Enumerate `size`-subsets of members (ascending indices) whose summed
// coordinates land on a flagged sum index. Box walks prune on per-coordinate
// reachable ranges against the flags' bounding box.
template <class Sink>
void enumerate_landing(const Members& M, const SumSpace& ss, int size,
                       const std::vector<std::uint8_t>& flags,
                       const std::vector<std::int64_t>& box_lo,
                       const std::vector<std::int64_t>& box_hi, u64 walk_limit, Sink&& sink) {
    if (size == 0) {
        std::array<std::int64_t, 8> zero{};
        i64 idx = ss.index_sum(zero.data());
        if (flags[std::size_t(idx)]) sink(idx, nullptr, 0);
        return;
    }
    std::vector<std::uint16_t> chosen(static_cast<std::size_t>(size));
    std::vector<std::int64_t> partial(std::size_t(ss.d), 0);
    std::vector<std::int32_t> cmin(std::size_t(ss.d), std::numeric_limits<std::int32_t>::max());
    std::vector<std::int32_t> cmax(std::size_t(ss.d), std::numeric_limits<std::int32_t>::min());
    for (int i = 0; i < M.m; ++i)
        for (int j = 0; j < ss.d; ++j) {
            cmin[std::size_t(j)] = std::min(cmin[std::size_t(j)], M.coord(i)[j]);
            cmax[std::size_t(j)] = std::max(cmax[std::size_t(j)], M.coord(i)[j]);
        }
    u64 nodes = 0;
    bool prune_ok = ss.ambient == Ambient::Box && !box_lo.empty();

    auto rec = [&](auto&& self, int depth, int start) -> void {
        if (depth == size) {
            i64 idx = ss.index_sum(partial.data());
            if (flags[std::size_t(idx)]) sink(idx, chosen.data(), size);
            return;
        }
        int rem = size - depth;
        if (M.m - start < rem) return;
        if (prune_ok) {
            for (int j = 0; j < ss.d; ++j) {
                if (partial[std::size_t(j)] + i64(rem) * cmin[std::size_t(j)] > box_hi[std::size_t(j)]) return;
                if (partial[std::size_t(j)] + i64(rem) * cmax[std::size_t(j)] < box_lo[std::size_t(j)]) return;
            }
        }
        for (int i = start; i < M.m; ++i) {
            if (++nodes > walk_limit)
                throw capacity_error("budget-buckets: subset enumeration walk exceeds the budget; shrink n or the point set");
            chosen[std::size_t(depth)] = std::uint16_t(i);
            for (int j = 0; j < ss.d; ++j) partial[std::size_t(j)] += M.coord(i)[j];
            self(self, depth + 1, i + 1);
            for (int j = 0; j < ss.d; ++j) partial[std::size_t(j)] -= M.coord(i)[j];
        }
    };
    rec(rec, 0, 0);
}

// One slot class of the bucket join: `copies` pairwise-disjoint subsets
// drawn from the same per-sum bucket, indices strictly increasing within
// the class so each unordered selection is visited once.
struct SlotClass {
    SubsetPool* pool = nullptr;
    std::vector<std::vector<std::uint32_t>>* buckets = nullptr; // per candidate position
    int copies = 0;
    std::vector<std::uint8_t> group_ids; // original group id per copy
};

struct UnionKeyHash {
    std::size_t operator()(const std::vector<std::uint16_t>& pts) const {
        return std::size_t(fnv1a(pts.data(), pts.size() * sizeof(std::uint16_t)));
    }
};

struct JoinChunk {
    u128 witness_count = 0;
    std::vector<std::pair<std::vector<std::uint16_t>, std::vector<std::uint8_t>>> found;
    std::unordered_set<std::vector<std::uint16_t>, UnionKeyHash> seen;
};

// Runs the join for one candidate-sum position and accumulates results.
inline void join_at(std::vector<SlotClass>& classes, std::size_t pos, int total_points,
                    int mask_words, JoinChunk& out, u64 solution_budget) {
    std::vector<u64> acc(std::size_t(mask_words), 0);
    std::vector<std::pair<int, std::uint32_t>> chosen; // (class, subset id)
    chosen.reserve(8);

    auto emit = [&]() {
        ++out.witness_count;
        std::vector<std::uint16_t> pts;
        pts.reserve(std::size_t(total_points));
        std::vector<std::pair<std::uint16_t, std::uint8_t>> tagged;
        tagged.reserve(std::size_t(total_points));
        std::size_t copy_counter[8] = {0, 0, 0, 0, 0, 0, 0, 0};
        for (auto [ci, id] : chosen) {
            SlotClass& sc = classes[std::size_t(ci)];
            std::uint8_t gid = sc.group_ids[copy_counter[ci]++];
            for (int t = 0; t < sc.pool->size; ++t)
                tagged.emplace_back(sc.pool->idx(id)[t], gid);
        }
        std::sort(tagged.begin(), tagged.end());
        std::vector<std::uint8_t> wit;
        wit.reserve(tagged.size());
        for (auto& [p, g] : tagged) {
            pts.push_back(p);
            wit.push_back(g);
        }
        if (out.seen.insert(pts).second) {
            out.found.emplace_back(std::move(pts), std::move(wit));
            if (out.found.size() > solution_budget)
                throw capacity_error("budget-buckets: materialized solution count exceeds the budget");
        }
    };

    auto rec = [&](auto&& self, std::size_t ci, int copy, std::size_t start) -> void {
        if (ci == classes.size()) {
            emit();
            return;
        }
        SlotClass& sc = classes[ci];
        if (copy == sc.copies) {
            self(self, ci + 1, 0, 0);
            return;
        }
        auto& bucket = (*sc.buckets)[pos];
        for (std::size_t at = start; at < bucket.size(); ++at) {
            std::uint32_t id = bucket[at];
            if (!sc.pool->disjoint(id, acc.data())) continue;
            sc.pool->orr(id, acc.data(), true);
            chosen.emplace_back(int(ci), id);
            self(self, ci, copy + 1, at + 1);
            chosen.pop_back();
            sc.pool->orr(id, acc.data(), false);
        }
    };
    rec(rec, 0, 0, 0);
}

} // namespace detail

// ---------------------------------------------------------------------------
// Multiplicity map m_A(s)
// ---------------------------------------------------------------------------

struct MultiplicityMap {
    EquationSpec spec;
    int h = 0;
    u64 source_digest = 0;
    i64 base = 0;
    std::vector<u64> counts; // dense over the sum space; index base^d

    u64 at_index(i64 idx) const {
        return idx >= 0 && idx < i64(counts.size()) ? counts[std::size_t(idx)] : 0;
    }

    Int total() const {
        Int t = 0;
        for (u64 c : counts) t += c;
        return t;
    }

    // sparse view keyed by raw sum vectors (box: actual sums, torus: reduced)
    std::map<SumVector, u64> as_map() const {
        std::map<SumVector, u64> out;
        for (std::size_t i = 0; i < counts.size(); ++i) {
            if (!counts[i]) continue;
            SumVector s;
            i64 idx = i64(i);
            s.c.assign(std::size_t(spec.d), 0);
            for (int j = spec.d - 1; j >= 0; --j) {
                s.c[std::size_t(j)] = std::int32_t(idx % base);
                idx /= base;
            }
            out.emplace(std::move(s), counts[i]);
        }
        return out;
    }
};

inline MultiplicityMap multiplicity_map(const PointSet& A, int h, const SolveOptions& opts = {}) {
    if (h < 1) throw domain_error("multiplicity_map: group size h must be >= 1");
    const EquationSpec& spec = A.spec();
    auto M = detail::collect_members(A);
    auto ss = detail::SumSpace::make(spec, h, opts.bucket_budget);
    auto tables = detail::subset_count_tables(M, ss, h);
    MultiplicityMap out;
    out.spec = spec;
    out.h = h;
    out.source_digest = A.digest();
    out.base = ss.base;
    out.counts = std::move(tables[std::size_t(h)]);
    return out;
}

// ---------------------------------------------------------------------------
// Solution census
// ---------------------------------------------------------------------------

struct SolutionCensus {
    u128 f = 0;
    std::vector<SolutionSet> solutions; // sorted by point list
    // symmetric-only diagnostics
    bool symmetric_diag = false;
    Int M1 = 0;           // sum over s of C(m_A(s), k)
    Int M2 = 0;           // equal-sum tuples with a repeated point, exact
    Int M2_bound = 0;     // C(kh,2) |A|^{k(h-1)}
    u128 witness_partitions = 0;
};

namespace detail {

struct JoinPlan {
    std::vector<SubsetPool> pools;
    std::vector<std::vector<std::vector<std::uint32_t>>> buckets; // pool -> pos -> subset ids
    std::vector<SlotClass> classes;
    std::vector<i64> cand; // candidate sum indices, ascending
    int total_points = 0;
    int mask_words = 1;
};

inline std::vector<SolutionSet> run_join(JoinPlan& plan, const Members& M, int workers,
                                         u64 solution_budget, u128& witness_count) {
    if (plan.classes.size() > 8)
        throw capacity_error("bucket join: more than 8 slot classes is unsupported");
    for (std::size_t c = 0; c < plan.classes.size(); ++c) {
        plan.classes[c].pool = &plan.pools[c];
        plan.classes[c].buckets = &plan.buckets[c];
    }
    auto chunk = parallel_reduce<JoinChunk>(
        plan.cand.size(), workers, JoinChunk{},
        [&](std::size_t pos) {
            JoinChunk local;
            join_at(plan.classes, pos, plan.total_points, plan.mask_words, local, solution_budget);
            return local;
        },
        [&](JoinChunk& acc, JoinChunk&& part) {
            acc.witness_count = checked_add(acc.witness_count, part.witness_count, "join");
            for (auto& f : part.found) {
                if (acc.seen.insert(f.first).second) {
                    acc.found.push_back(std::move(f));
                    if (acc.found.size() > solution_budget)
                        throw capacity_error("budget-buckets: materialized solution count exceeds the budget");
                }
            }
        });
    witness_count = chunk.witness_count;
    std::sort(chunk.found.begin(), chunk.found.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    std::vector<SolutionSet> out;
    out.reserve(chunk.found.size());
    for (auto& [pts, wit] : chunk.found) {
        SolutionSet s;
        s.points.reserve(pts.size());
        for (std::uint16_t i : pts) s.points.push_back(M.ranks[i]);
        s.witness = std::move(wit);
        out.push_back(std::move(s));
    }
    return out;
}

} // namespace detail

inline SolutionCensus count_solutions(const PointSet& A, const EquationSpec& spec,
                                      const SolveOptions& opts = {}) {
    if (!A.spec().same_universe(spec))
        throw domain_error("count_solutions: point set and spec disagree on the ambient space");
    SolutionCensus census;
    auto M = detail::collect_members(A);
    const int k = spec.k();
    const int K = spec.total_points();
    const u64 walk_limit = 50'000'000;

    if (spec.symmetric()) {
        const int h = spec.h();
        census.symmetric_diag = true;
        auto ss = detail::SumSpace::make(spec, h, opts.bucket_budget);
        auto sub = detail::subset_count_tables(M, ss, h);
        const auto& mA = sub[std::size_t(h)];

        for (i64 s = 0; s < ss.size; ++s)
            if (mA[std::size_t(s)]) census.M1 += binom(Int(mA[std::size_t(s)]), u64(k));

        auto tup = detail::tuple_count_tables(M, ss, h);
        Int t_eq = 0;
        for (i64 s = 0; s < ss.size; ++s)
            if (tup[std::size_t(h)][std::size_t(s)])
                t_eq += int_pow(Int(tup[std::size_t(h)][std::size_t(s)]), u64(k));

        std::vector<i64> cand;
        for (i64 s = 0; s < ss.size; ++s)
            if (mA[std::size_t(s)] >= u64(k)) cand.push_back(s);

        if (!cand.empty() && M.m >= K) {
            if (binom(Int(M.m), u64(h)) > Int(walk_limit))
                throw capacity_error("budget-buckets: too many h-subsets to materialize; shrink the point set");
            detail::JoinPlan plan;
            plan.total_points = K;
            plan.mask_words = (M.m + 63) / 64;
            plan.cand = cand;
            std::unordered_map<i64, std::uint32_t> pos_of;
            pos_of.reserve(cand.size() * 2);
            for (std::size_t i = 0; i < cand.size(); ++i) pos_of[cand[i]] = std::uint32_t(i);
            std::vector<std::uint8_t> flags(std::size_t(ss.size), 0);
            std::vector<std::int64_t> blo(std::size_t(ss.d), std::numeric_limits<std::int64_t>::max());
            std::vector<std::int64_t> bhi(std::size_t(ss.d), std::numeric_limits<std::int64_t>::min());
            for (i64 s : cand) {
                flags[std::size_t(s)] = 1;
                auto c = ss.coords_of(s);
                for (int j = 0; j < ss.d; ++j) {
                    blo[std::size_t(j)] = std::min(blo[std::size_t(j)], i64(c[std::size_t(j)]));
                    bhi[std::size_t(j)] = std::max(bhi[std::size_t(j)], i64(c[std::size_t(j)]));
                }
            }
            plan.pools.resize(1);
            plan.buckets.resize(1);
            plan.pools[0].size = h;
            plan.pools[0].words = plan.mask_words;
            plan.buckets[0].assign(cand.size(), {});
            u64 entries = 0;
            detail::enumerate_landing(M, ss, h, flags, blo, bhi, walk_limit,
                                      [&](i64 idx, const std::uint16_t* ids, int) {
                                          std::size_t at = plan.pools[0].append(ids);
                                          plan.buckets[0][pos_of[idx]].push_back(std::uint32_t(at));
                                          if (++entries > opts.bucket_budget)
                                              throw capacity_error("budget-buckets: bucket entries exceed the budget");
                                      });
            detail::SlotClass sc;
            sc.copies = k;
            sc.group_ids.resize(std::size_t(k));
            for (int g = 0; g < k; ++g) sc.group_ids[std::size_t(g)] = std::uint8_t(g);
            plan.classes.push_back(sc);
            census.solutions =
                detail::run_join(plan, M, opts.workers, opts.bucket_budget, census.witness_partitions);
        }
        census.f = census.solutions.size();
        // M2 = (equal-sum tuples) - (equal-sum tuples with all points distinct);
        // the distinct ones are k!*(h!)^k per unordered witness partition.
        Int t_dist = factorial(u64(k)) * int_pow(factorial(u64(h)), u64(k)) *
                     to_int(census.witness_partitions);
        census.M2 = t_eq - t_dist;
        if (census.M2 < 0)
            throw property_violation("count_solutions: tuple census produced negative M2");
        census.M2_bound = binom(Int(K), 2) * int_pow(Int(M.m), u64(k * (h - 1)));
    } else {
        // mixed group sizes: f only
        const int hmax = spec.max_group();
        auto ss = detail::SumSpace::make(spec, hmax, opts.bucket_budget);
        auto sub = detail::subset_count_tables(M, ss, hmax);
        std::map<int, int> copies; // subset size -> number of groups of that size
        for (int h : spec.groups) copies[h]++;
        std::vector<i64> cand;
        for (i64 s = 0; s < ss.size; ++s) {
            bool ok = true;
            for (auto [h, c] : copies)
                if (sub[std::size_t(h)][std::size_t(s)] < u64(c)) { ok = false; break; }
            if (ok) cand.push_back(s);
        }
        if (!cand.empty() && M.m >= K) {
            if (binom(Int(M.m), u64(hmax)) > Int(walk_limit))
                throw capacity_error("budget-buckets: too many subsets to materialize; shrink the point set");
            detail::JoinPlan plan;
            plan.total_points = K;
            plan.mask_words = (M.m + 63) / 64;
            plan.cand = cand;
            std::unordered_map<i64, std::uint32_t> pos_of;
            for (std::size_t i = 0; i < cand.size(); ++i) pos_of[cand[i]] = std::uint32_t(i);
            std::vector<std::uint8_t> flags(std::size_t(ss.size), 0);
            std::vector<std::int64_t> blo(std::size_t(ss.d), std::numeric_limits<std::int64_t>::max());
            std::vector<std::int64_t> bhi(std::size_t(ss.d), std::numeric_limits<std::int64_t>::min());
            for (i64 s : cand) {
                flags[std::size_t(s)] = 1;
                auto c = ss.coords_of(s);
                for (int j = 0; j < ss.d; ++j) {
                    blo[std::size_t(j)] = std::min(blo[std::size_t(j)], i64(c[std::size_t(j)]));
                    bhi[std::size_t(j)] = std::max(bhi[std::size_t(j)], i64(c[std::size_t(j)]));
                }
            }
            plan.pools.resize(copies.size());
            plan.buckets.resize(copies.size());
            std::size_t ci = 0;
            u64 entries = 0;
            for (auto [h, c] : copies) {
                plan.pools[ci].size = h;
                plan.pools[ci].words = plan.mask_words;
                plan.buckets[ci].assign(cand.size(), {});
                detail::enumerate_landing(M, ss, h, flags, blo, bhi, walk_limit,
                                          [&](i64 idx, const std::uint16_t* ids, int) {
                                              std::size_t at = plan.pools[ci].append(ids);
                                              plan.buckets[ci][pos_of[idx]].push_back(std::uint32_t(at));
                                              if (++entries > opts.bucket_budget)
                                                  throw capacity_error("budget-buckets: bucket entries exceed the budget");
                                          });
                detail::SlotClass sc;
                sc.copies = c;
                for (std::size_t g = 0; g < spec.groups.size(); ++g)
                    if (spec.groups[g] == h) sc.group_ids.push_back(std::uint8_t(g));
                plan.classes.push_back(sc);
                ++ci;
            }
            census.solutions =
                detail::run_join(plan, M, opts.workers, opts.bucket_budget, census.witness_partitions);
        }
        census.f = census.solutions.size();
    }
    return census;
}

// Solutions re-expressed as indices into A's member list (for coloring work).
inline std::vector<std::vector<std::uint16_t>> solutions_as_indices(
    const std::vector<SolutionSet>& sols, const std::vector<Rank>& members) {
    std::vector<std::vector<std::uint16_t>> out;
    out.reserve(sols.size());
    for (const auto& s : sols) {
        std::vector<std::uint16_t> v;
        v.reserve(s.points.size());
        for (Rank r : s.points) {
            auto it = std::lower_bound(members.begin(), members.end(), r);
            if (it == members.end() || *it != r)
                throw domain_error("solutions_as_indices: solution point outside the point set");
            v.push_back(std::uint16_t(it - members.begin()));
        }
        out.push_back(std::move(v));
    }
    return out;
}

// ---------------------------------------------------------------------------
// f_{d,k,h,j}(A1, A2): column-split solutions across two disjoint sets
// ---------------------------------------------------------------------------

inline u128 count_cross(const PointSet& A1, const PointSet& A2, int j, const EquationSpec& spec,
                        const SolveOptions& opts = {}) {
    if (!spec.symmetric()) throw domain_error("count_cross: symmetric group sizes required");
    const int h = spec.h(), k = spec.k();
    if (j < 1 || j > h - 1) throw domain_error("count_cross: need 1 <= j <= h-1");
    if (!A1.spec().same_universe(spec) || !A2.spec().same_universe(spec))
        throw domain_error("count_cross: point sets and spec disagree on the ambient space");
    if (!A1.disjoint_with(A2)) throw domain_error("count_cross: A1 and A2 must be disjoint");
    PointSet U = A1 | A2;
    auto M = detail::collect_members(U);
    std::vector<std::uint8_t> in_first(std::size_t(M.m), 0);
    for (int i = 0; i < M.m; ++i)
        if (A1.contains(M.ranks[std::size_t(i)])) in_first[std::size_t(i)] = 1;

    auto ss = detail::SumSpace::make(spec, h, opts.bucket_budget);
    const u64 walk_limit = 50'000'000;

    // enumerate j-subsets of A1 and (h-j)-subsets of A2, bucketed by sum
    std::vector<std::uint8_t> all(std::size_t(ss.size), 1);
    std::vector<std::int64_t> none;
    std::unordered_map<i64, std::vector<std::uint32_t>> js, os;
    detail::SubsetPool pj, po;
    pj.size = j;
    po.size = h - j;
    pj.words = po.words = (M.m + 63) / 64;
    u64 entries = 0;
    auto bump = [&]() {
        if (++entries > opts.bucket_budget)
            throw capacity_error("budget-buckets: bucket entries exceed the budget");
    };
    {
        // walk subsets of the union but keep only the pure-A1 / pure-A2 ones
        detail::enumerate_landing(M, ss, j, all, none, none, walk_limit,
                                  [&](i64 idx, const std::uint16_t* ids, int sz) {
                                      for (int t = 0; t < sz; ++t)
                                          if (!in_first[ids[t]]) return;
                                      js[idx].push_back(std::uint32_t(pj.append(ids)));
                                      bump();
                                  });
        detail::enumerate_landing(M, ss, h - j, all, none, none, walk_limit,
                                  [&](i64 idx, const std::uint16_t* ids, int sz) {
                                      for (int t = 0; t < sz; ++t)
                                          if (in_first[ids[t]]) return;
                                      os[idx].push_back(std::uint32_t(po.append(ids)));
                                      bump();
                                  });
    }

    // pair every A1 sum with every A2 sum; a pair is one column-split group
    detail::SubsetPool pairs;
    pairs.size = h;
    pairs.words = pj.words;
    std::map<i64, std::vector<std::uint32_t>> pair_buckets;
    std::vector<std::uint16_t> tmp(static_cast<std::size_t>(h));
    for (auto& [sa, la] : js)
        for (auto& [sb, lb] : os) {
            i64 s = ss.add(sa, sb);
            for (auto ia : la)
                for (auto ib : lb) {
                    std::copy(pj.idx(ia), pj.idx(ia) + j, tmp.begin());
                    std::copy(po.idx(ib), po.idx(ib) + (h - j), tmp.begin() + j);
                    std::sort(tmp.begin(), tmp.end());
                    pair_buckets[s].push_back(std::uint32_t(pairs.append(tmp.data())));
                    bump();
                }
        }

    detail::JoinPlan plan;
    plan.total_points = k * h;
    plan.mask_words = pj.words;
    std::vector<std::vector<std::uint32_t>> buckets;
    for (auto& [s, lst] : pair_buckets) {
        if (lst.size() < std::size_t(k)) continue;
        plan.cand.push_back(s);
        buckets.push_back(lst);
    }
    if (plan.cand.empty()) return 0;
    plan.pools.push_back(std::move(pairs));
    plan.buckets.push_back(std::move(buckets));
    detail::SlotClass sc;
    sc.copies = k;
    for (int g = 0; g < k; ++g) sc.group_ids.push_back(std::uint8_t(g));
    plan.classes.push_back(sc);
    u128 witnesses = 0;
    auto sols = detail::run_join(plan, M, opts.workers, opts.bucket_budget, witnesses);
    return u128(sols.size());
}

// ---------------------------------------------------------------------------
// f_A(v): solutions through a fixed point, v placed in group 1
// ---------------------------------------------------------------------------

struct ThroughPointResult {
    u128 count = 0;
    // each member: the (K-1)-point remainder, sorted; lexicographic order
    std::vector<std::vector<Rank>> family;
};

inline ThroughPointResult count_through_point(const PointSet& A, const Point& v,
                                              const EquationSpec& spec,
                                              const SolveOptions& opts = {}) {
    if (!A.spec().same_universe(spec))
        throw domain_error("count_through_point: point set and spec disagree on the ambient space");
    if (!A.contains(v)) throw domain_error("count_through_point: v must belong to A");
    const Rank vr = rank_point(v, spec);
    PointSet Ap = A;
    Ap.erase(vr);
    auto M = detail::collect_members(Ap);
    const int K = spec.total_points();
    const int h1 = spec.groups[0];
    const int hmax = spec.max_group();
    const u64 walk_limit = 50'000'000;
    ThroughPointResult out;
    if (M.m < K - 1) return out;

    auto ss = detail::SumSpace::make(spec, hmax, opts.bucket_budget);
    auto sub = detail::subset_count_tables(M, ss, hmax);

    // completion sums are shifted by v: group-1 sum = v + (completion sum)
    std::array<std::int64_t, 8> vc{};
    for (int j = 0; j < spec.d; ++j) vc[std::size_t(j)] = v.c[std::size_t(j)];
    i64 v_idx = ss.index_sum(vc.data());

    std::map<int, int> copies; // size -> groups among groups 2..k
    for (std::size_t g = 1; g < spec.groups.size(); ++g) copies[spec.groups[std::size_t(g)]]++;

    std::vector<i64> cand;
    for (i64 c = 0; c < ss.size; ++c) {
        if (!sub[std::size_t(h1) - 1][std::size_t(c)]) continue;
        i64 s = ss.add(c, v_idx);
        if (s < 0 || s >= ss.size) continue;
        bool ok = true;
        for (auto [h, cp] : copies)
            if (sub[std::size_t(h)][std::size_t(s)] < u64(cp)) { ok = false; break; }
        if (ok) cand.push_back(s);
    }
    std::sort(cand.begin(), cand.end());
    cand.erase(std::unique(cand.begin(), cand.end()), cand.end());
    if (cand.empty()) return out;

    std::unordered_map<i64, std::uint32_t> pos_of;
    for (std::size_t i = 0; i < cand.size(); ++i) pos_of[cand[i]] = std::uint32_t(i);

    detail::JoinPlan plan;
    plan.total_points = K - 1;
    plan.mask_words = (M.m + 63) / 64;
    plan.cand = cand;
    plan.pools.resize(1 + copies.size());
    plan.buckets.resize(1 + copies.size());

    // completion class: (h1-1)-subsets, bucketed under the shifted sum
    std::vector<std::uint8_t> cflags(std::size_t(ss.size), 0);
    std::vector<std::int64_t> blo(std::size_t(ss.d), std::numeric_limits<std::int64_t>::max());
    std::vector<std::int64_t> bhi(std::size_t(ss.d), std::numeric_limits<std::int64_t>::min());
    bool any = false;
    for (i64 c = 0; c < ss.size; ++c) {
        if (!sub[std::size_t(h1) - 1][std::size_t(c)]) continue;
        i64 s = ss.add(c, v_idx);
        if (s < 0 || s >= ss.size) continue;
        if (!std::binary_search(cand.begin(), cand.end(), s)) continue;
        cflags[std::size_t(c)] = 1;
        any = true;
        auto cc = ss.coords_of(c);
        for (int j = 0; j < ss.d; ++j) {
            blo[std::size_t(j)] = std::min(blo[std::size_t(j)], i64(cc[std::size_t(j)]));
            bhi[std::size_t(j)] = std::max(bhi[std::size_t(j)], i64(cc[std::size_t(j)]));
        }
    }
    if (!any) return out;
    if (binom(Int(M.m), u64(hmax)) > Int(walk_limit))
        throw capacity_error("budget-buckets: too many subsets to materialize; shrink the point set");

    u64 entries = 0;
    auto bump = [&]() {
        if (++entries > opts.bucket_budget)
            throw capacity_error("budget-buckets: bucket entries exceed the budget");
    };
    plan.pools[0].size = h1 - 1;
    plan.pools[0].words = plan.mask_words;
    plan.buckets[0].assign(cand.size(), {});
    detail::enumerate_landing(M, ss, h1 - 1, cflags, blo, bhi, walk_limit,
                              [&](i64 cidx, const std::uint16_t* ids, int) {
                                  i64 s = ss.add(cidx, v_idx);
                                  auto it = pos_of.find(s);
                                  if (it == pos_of.end()) return;
                                  std::size_t at = plan.pools[0].append(ids);
                                  plan.buckets[0][it->second].push_back(std::uint32_t(at));
                                  bump();
                              });
    {
        detail::SlotClass sc;
        sc.copies = 1;
        sc.group_ids = {0};
        plan.classes.push_back(sc);
    }

    std::vector<std::uint8_t> flags(std::size_t(ss.size), 0);
    std::vector<std::int64_t> slo(std::size_t(ss.d), std::numeric_limits<std::int64_t>::max());
    std::vector<std::int64_t> shi(std::size_t(ss.d), std::numeric_limits<std::int64_t>::min());
    for (i64 s : cand) {
        flags[std::size_t(s)] = 1;
        auto cc = ss.coords_of(s);
        for (int j = 0; j < ss.d; ++j) {
            slo[std::size_t(j)] = std::min(slo[std::size_t(j)], i64(cc[std::size_t(j)]));
            shi[std::size_t(j)] = std::max(shi[std::size_t(j)], i64(cc[std::size_t(j)]));
        }
    }
    std::size_t ci = 1;
    for (auto [h, cp] : copies) {
        plan.pools[ci].size = h;
        plan.pools[ci].words = plan.mask_words;
        plan.buckets[ci].assign(cand.size(), {});
        detail::enumerate_landing(M, ss, h, flags, slo, shi, walk_limit,
                                  [&](i64 idx, const std::uint16_t* ids, int) {
                                      std::size_t at = plan.pools[ci].append(ids);
                                      plan.buckets[ci][pos_of[idx]].push_back(std::uint32_t(at));
                                      bump();
                                  });
        detail::SlotClass sc;
        sc.copies = cp;
        for (std::size_t g = 1; g < spec.groups.size(); ++g)
            if (spec.groups[g] == h) sc.group_ids.push_back(std::uint8_t(g));
        plan.classes.push_back(sc);
        ++ci;
    }

    u128 witnesses = 0;
    auto sols = detail::run_join(plan, M, opts.workers, opts.bucket_budget, witnesses);
    out.count = u128(sols.size());
    out.family.reserve(sols.size());
    for (auto& s : sols) out.family.push_back(s.points);
    std::sort(out.family.begin(), out.family.end());
    return out;
}

// ---------------------------------------------------------------------------
// Greedy disjoint subfamily (canonical order), with the counting guarantee
// kept >= ceil(|F| / (1 + (K-1) maxdeg))
// ---------------------------------------------------------------------------

struct GreedyFamilyReport {
    std::vector<std::vector<Rank>> kept;
    u64 max_point_degree = 0;
    u64 guaranteed_min = 0;
};

inline GreedyFamilyReport greedy_disjoint_family(std::vector<std::vector<Rank>> family, Rank v,
                                                 int total_points) {
    const std::size_t want = std::size_t(total_points) - 1;
    for (auto& f : family) {
        if (f.size() != want)
            throw domain_error("greedy_disjoint_family: member size differs from K-1");
        if (!std::is_sorted(f.begin(), f.end()))
            throw domain_error("greedy_disjoint_family: members must be sorted");
        if (std::binary_search(f.begin(), f.end(), v))
            throw domain_error("greedy_disjoint_family: a member contains v");
    }
    std::sort(family.begin(), family.end());
    GreedyFamilyReport rep;
    std::unordered_map<Rank, u64> degree;
    for (const auto& f : family)
        for (Rank p : f) rep.max_point_degree = std::max(rep.max_point_degree, ++degree[p]);
    std::unordered_set<Rank> taken;
    for (const auto& f : family) {
        bool free = true;
        for (Rank p : f)
            if (taken.count(p)) { free = false; break; }
        if (!free) continue;
        for (Rank p : f) taken.insert(p);
        rep.kept.push_back(f);
    }
    u64 denom = 1 + u64(total_points - 1) * rep.max_point_degree;
    rep.guaranteed_min = (u64(family.size()) + denom - 1) / denom;
    if (rep.kept.size() < rep.guaranteed_min)
        throw property_violation("greedy_disjoint_family: output below the counting guarantee");
    return rep;
}

// ---------------------------------------------------------------------------
// Parallelogram classification (d >= 2, k = 2, h = 2)
// ---------------------------------------------------------------------------

enum class ParallelogramClass { Degenerate, Nondegenerate };

inline ParallelogramClass classify_parallelogram(const SolutionSet& sol, const EquationSpec& spec) {
    if (spec.d < 2 || spec.groups != std::vector<int>{2, 2} || spec.ambient != Ambient::Box)
        throw domain_error("classify_parallelogram: needs box ambient, d >= 2, groups (2,2)");
    if (sol.points.size() != 4)
        throw domain_error("classify_parallelogram: solution must have 4 points");
    std::array<Point, 4> p;
    for (int i = 0; i < 4; ++i) p[std::size_t(i)] = unrank_point(sol.points[std::size_t(i)], spec);
    // collinear iff every difference from p0 is parallel to p1-p0 (all 2x2
    // minors vanish, exact integer arithmetic)
    auto minor_zero = [&](const Point& a, const Point& b) {
        for (int i = 0; i < spec.d; ++i)
            for (int j = i + 1; j < spec.d; ++j) {
                i64 qa_i = a.c[std::size_t(i)] - p[0].c[std::size_t(i)];
                i64 qa_j = a.c[std::size_t(j)] - p[0].c[std::size_t(j)];
                i64 qb_i = b.c[std::size_t(i)] - p[0].c[std::size_t(i)];
                i64 qb_j = b.c[std::size_t(j)] - p[0].c[std::size_t(j)];
                if (qa_i * qb_j - qa_j * qb_i != 0) return false;
            }
        return true;
    };
    bool collinear = minor_zero(p[1], p[2]) && minor_zero(p[1], p[3]) && minor_zero(p[2], p[3]);
    return collinear ? ParallelogramClass::Degenerate : ParallelogramClass::Nondegenerate;
}

struct DegenerateCountReport {
    u128 total_solutions = 0;
    u128 degenerate = 0;
    Int bound = 0; // |A|^2 * n
    bool holds = false;
};

inline DegenerateCountReport degenerate_count_bound_check(const PointSet& A,
                                                          const EquationSpec& spec,
                                                          const SolveOptions& opts = {}) {
    if (spec.d < 2 || spec.groups != std::vector<int>{2, 2})
        throw domain_error("degenerate_count_bound_check: needs d >= 2 and groups (2,2)");
    DegenerateCountReport rep;
    auto census = count_solutions(A, spec, opts);
    rep.total_solutions = census.f;
    for (const auto& s : census.solutions)
        if (classify_parallelogram(s, spec) == ParallelogramClass::Degenerate) ++rep.degenerate;
    rep.bound = Int(A.size()) * Int(A.size()) * spec.n;
    rep.holds = to_int(rep.degenerate) <= rep.bound;
    return rep;
}

} // namespace bkh
