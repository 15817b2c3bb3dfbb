#pragma once

// Brute-force oracles. These enumerate every subset, every partition and
// every coloring directly, and stay independent of the bucket-join and
// backtracking paths they certify. Test and verification code only.

#include <algorithm>
#include <functional>
#include <map>
#include <vector>

#include "bkh/coloring.hpp"
#include "bkh/grid.hpp"
#include "bkh/solutions.hpp"

namespace bkh::oracle {

using namespace bkh;

inline std::vector<std::int64_t> sum_coords(const std::vector<Point>& pts,
                                            const std::vector<int>& which,
                                            const EquationSpec& spec) {
    std::vector<std::int64_t> s(static_cast<std::size_t>(spec.d), 0);
    for (int i : which)
        for (int j = 0; j < spec.d; ++j) s[std::size_t(j)] += pts[std::size_t(i)].c[std::size_t(j)];
    if (spec.ambient == Ambient::Torus)
        for (auto& v : s) v = ((v % spec.n) + spec.n) % spec.n;
    return s;
}

// Does a K-point set admit a partition into groups of the spec's sizes with
// equal group sums? `fixed_first` forces element 0 into group 0.
inline bool admits_partition(const std::vector<Point>& pts, const EquationSpec& spec,
                             bool fixed_first = false,
                             const std::function<bool(const std::vector<int>&, int)>& group_ok = {}) {
    const int K = spec.total_points();
    if (int(pts.size()) != K) return false;
    const int k = spec.k();
    std::vector<int> assign(static_cast<std::size_t>(K), -1);
    std::vector<int> room(spec.groups.begin(), spec.groups.end());
    bool found = false;

    std::function<void(int)> rec = [&](int at) {
        if (found) return;
        if (at == K) {
            std::vector<std::vector<int>> groups(static_cast<std::size_t>(k));
            for (int i = 0; i < K; ++i) groups[std::size_t(assign[std::size_t(i)])].push_back(i);
            auto s0 = sum_coords(pts, groups[0], spec);
            for (int g = 1; g < k; ++g)
                if (sum_coords(pts, groups[std::size_t(g)], spec) != s0) return;
            if (group_ok)
                for (int g = 0; g < k; ++g)
                    if (!group_ok(groups[std::size_t(g)], g)) return;
            found = true;
            return;
        }
        for (int g = 0; g < k; ++g) {
            if (room[std::size_t(g)] == 0) continue;
            if (at == 0 && fixed_first && g != 0) continue;
            assign[std::size_t(at)] = g;
            --room[std::size_t(g)];
            rec(at + 1);
            ++room[std::size_t(g)];
            assign[std::size_t(at)] = -1;
            if (found) return;
        }
    };
    rec(0);
    return found;
}

template <class Visit>
void for_each_subset(const std::vector<Rank>& members, int size, Visit&& visit) {
    std::vector<int> comb(static_cast<std::size_t>(size));
    const int m = int(members.size());
    if (size > m) return;
    for (int i = 0; i < size; ++i) comb[std::size_t(i)] = i;
    while (true) {
        visit(comb);
        int i = size - 1;
        while (i >= 0 && comb[std::size_t(i)] == m - size + i) --i;
        if (i < 0) break;
        ++comb[std::size_t(i)];
        for (int t = i + 1; t < size; ++t) comb[std::size_t(t)] = comb[std::size_t(t) - 1] + 1;
    }
}

inline std::vector<std::vector<Rank>> solutions(const PointSet& A, const EquationSpec& spec) {
    std::vector<std::vector<Rank>> out;
    auto members = A.members();
    const int K = spec.total_points();
    for_each_subset(members, K, [&](const std::vector<int>& comb) {
        std::vector<Point> pts;
        std::vector<Rank> ranks;
        for (int i : comb) {
            ranks.push_back(members[std::size_t(i)]);
            pts.push_back(unrank_point(members[std::size_t(i)], spec));
        }
        if (admits_partition(pts, spec)) out.push_back(ranks);
    });
    return out;
}

inline u64 count_solutions(const PointSet& A, const EquationSpec& spec) {
    return u64(solutions(A, spec).size());
}

inline u64 count_through_point(const PointSet& A, const Point& v, const EquationSpec& spec) {
    PointSet rest = A;
    rest.erase(rank_point(v, spec));
    auto members = rest.members();
    const int K = spec.total_points();
    u64 total = 0;
    for_each_subset(members, K - 1, [&](const std::vector<int>& comb) {
        std::vector<Point> pts;
        pts.push_back(v);
        for (int i : comb) pts.push_back(unrank_point(members[std::size_t(i)], spec));
        if (admits_partition(pts, spec, /*fixed_first=*/true)) ++total;
    });
    return total;
}

inline u64 count_cross(const PointSet& A1, const PointSet& A2, int j, const EquationSpec& spec) {
    PointSet U = A1 | A2;
    auto members = U.members();
    const int K = spec.total_points();
    u64 total = 0;
    for_each_subset(members, K, [&](const std::vector<int>& comb) {
        std::vector<Point> pts;
        std::vector<bool> first;
        for (int i : comb) {
            pts.push_back(unrank_point(members[std::size_t(i)], spec));
            first.push_back(A1.contains(members[std::size_t(i)]));
        }
        auto group_ok = [&](const std::vector<int>& grp, int) {
            int in1 = 0;
            for (int i : grp)
                if (first[std::size_t(i)]) ++in1;
            return in1 == j;
        };
        if (admits_partition(pts, spec, false, group_ok)) ++total;
    });
    return total;
}

// exact M2 by odometer over |A|^K tuples
inline Int tuple_m2(const PointSet& A, const EquationSpec& spec) {
    auto members = A.members();
    const int K = spec.total_points();
    const int m = int(members.size());
    if (m == 0) return 0;
    std::vector<int> tup(static_cast<std::size_t>(K), 0);
    std::vector<Point> pts;
    for (Rank r : members) pts.push_back(unrank_point(r, spec));
    Int count = 0;
    const int k = spec.k(), h = spec.groups[0];
    while (true) {
        bool repeated = false;
        for (int i = 0; i < K && !repeated; ++i)
            for (int t = i + 1; t < K; ++t)
                if (tup[std::size_t(i)] == tup[std::size_t(t)]) { repeated = true; break; }
        if (repeated) {
            std::vector<std::int64_t> s0(static_cast<std::size_t>(spec.d), 0);
            bool equal = true;
            for (int g = 0; g < k && equal; ++g) {
                std::vector<std::int64_t> s(static_cast<std::size_t>(spec.d), 0);
                for (int i = g * h; i < (g + 1) * h; ++i)
                    for (int j = 0; j < spec.d; ++j)
                        s[std::size_t(j)] += pts[std::size_t(tup[std::size_t(i)])].c[std::size_t(j)];
                if (spec.ambient == Ambient::Torus)
                    for (auto& v : s) v = ((v % spec.n) + spec.n) % spec.n;
                if (g == 0) s0 = s;
                else if (s != s0) equal = false;
            }
            if (equal) ++count;
        }
        int at = K - 1;
        while (at >= 0 && tup[std::size_t(at)] == m - 1) tup[std::size_t(at--)] = 0;
        if (at < 0) break;
        ++tup[std::size_t(at)];
    }
    return count;
}

struct GCensus {
    u128 g = 0;
    std::map<int, u128> by_distinct;
};

// odometer over all r^|A| colorings
inline GCensus count_rainbow_free(const PointSet& A, const EquationSpec& spec) {
    auto sols = solutions(A, spec);
    auto members = A.members();
    const int m = int(members.size());
    std::vector<std::vector<int>> sol_pos;
    for (auto& s : sols) {
        std::vector<int> pos;
        for (Rank r : s)
            pos.push_back(int(std::lower_bound(members.begin(), members.end(), r) - members.begin()));
        sol_pos.push_back(pos);
    }
    GCensus out;
    if (m == 0) {
        out.g = 1;
        out.by_distinct[0] = 1;
        return out;
    }
    std::vector<int> color(static_cast<std::size_t>(m), 0);
    while (true) {
        bool free = true;
        for (auto& pos : sol_pos) {
            std::uint32_t mask = 0;
            for (int p : pos) mask |= std::uint32_t(1) << color[std::size_t(p)];
            if (std::size_t(std::popcount(mask)) == pos.size()) { free = false; break; }
        }
        if (free) {
            ++out.g;
            std::uint32_t used = 0;
            for (int c : color) used |= std::uint32_t(1) << c;
            ++out.by_distinct[std::popcount(used)];
        }
        int at = m - 1;
        while (at >= 0 && color[std::size_t(at)] == spec.r - 1) color[std::size_t(at--)] = 0;
        if (at < 0) break;
        ++color[std::size_t(at)];
    }
    return out;
}

} // namespace bkh::oracle
