#pragma once

#include <algorithm>
#include <bit>
#include <cstdint>
#include <numeric>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "bkh/common.hpp"

namespace bkh {

enum class Ambient { Box, Torus };

inline const char* ambient_name(Ambient a) { return a == Ambient::Box ? "box" : "torus"; }

// The equation Sum_i x_{1,i} = ... = Sum_i x_{k,i} over points of [n]^d or
// Z_n^d, with group sizes (h_1,...,h_k). All engines read their parameters
// from here.
struct EquationSpec {
    Ambient ambient = Ambient::Box;
    int d = 1;
    int n = 1;
    std::vector<int> groups; // h_1..h_k
    int r = 1;               // colors

    EquationSpec() = default;
    EquationSpec(Ambient amb, int d_, int n_, std::vector<int> groups_, int r_ = 1)
        : ambient(amb), d(d_), n(n_), groups(std::move(groups_)), r(r_) {
        if (d < 1) throw domain_error("EquationSpec: dimension d must be >= 1");
        if (n < 1) throw domain_error("EquationSpec: order n must be >= 1");
        if (groups.size() < 2) throw domain_error("EquationSpec: need k >= 2 groups");
        for (int h : groups)
            if (h < 1) throw domain_error("EquationSpec: every group size must be >= 1");
        if (r < 1) throw domain_error("EquationSpec: color count r must be >= 1");
        grid_size(); // capacity check
    }

    int k() const { return int(groups.size()); }
    int total_points() const { return std::accumulate(groups.begin(), groups.end(), 0); }
    bool symmetric() const {
        return std::all_of(groups.begin(), groups.end(), [&](int h) { return h == groups[0]; });
    }
    int h() const {
        if (!symmetric()) throw domain_error("EquationSpec: symmetric group size requested on a mixed spec");
        return groups[0];
    }
    int max_group() const { return *std::max_element(groups.begin(), groups.end()); }

    // n^d, capped at 2^31 ranks
    i64 grid_size() const {
        i64 total = 1;
        for (int i = 0; i < d; ++i) {
            if (total > (i64(1) << 31) / n)
                throw capacity_error("EquationSpec: n^d exceeds the 2^31 rank capacity");
            total *= n;
        }
        return total;
    }

    int coord_lo() const { return ambient == Ambient::Box ? 1 : 0; }
    int coord_hi() const { return ambient == Ambient::Box ? n : n - 1; }

    bool operator==(const EquationSpec&) const = default;

    // Two specs describe the same point universe if they agree on ambient,
    // d and n; group sizes and r do not affect ranking.
    bool same_universe(const EquationSpec& o) const {
        return ambient == o.ambient && d == o.d && n == o.n;
    }
};

struct Point {
    std::vector<std::int32_t> c;
    Point() = default;
    explicit Point(std::vector<std::int32_t> coords) : c(std::move(coords)) {}
    auto operator<=>(const Point&) const = default; // lexicographic
};

using Rank = i64;

inline bool point_in_range(const Point& p, const EquationSpec& spec) {
    if (int(p.c.size()) != spec.d) return false;
    for (int j = 0; j < spec.d; ++j)
        if (p.c[j] < spec.coord_lo() || p.c[j] > spec.coord_hi()) return false;
    return true;
}

inline Rank rank_point(const Point& p, const EquationSpec& spec) {
    if (!point_in_range(p, spec))
        throw domain_error("rank_point: coordinate out of the ambient's legal range");
    Rank r = 0;
    for (int j = 0; j < spec.d; ++j) r = r * spec.n + (p.c[j] - spec.coord_lo());
    return r;
}

inline Point unrank_point(Rank rank, const EquationSpec& spec) {
    if (rank < 0 || rank >= spec.grid_size())
        throw domain_error("unrank_point: rank outside [0, n^d)");
    Point p;
    p.c.assign(std::size_t(spec.d), 0);
    for (int j = spec.d - 1; j >= 0; --j) {
        p.c[std::size_t(j)] = std::int32_t(rank % spec.n) + spec.coord_lo();
        rank /= spec.n;
    }
    return p;
}

// Componentwise sum of a tuple of points; torus sums are reduced mod n.
struct SumVector {
    std::vector<std::int32_t> c;
    auto operator<=>(const SumVector&) const = default;
};

inline SumVector point_sum(std::span<const Point> pts, const EquationSpec& spec) {
    SumVector s;
    s.c.assign(std::size_t(spec.d), 0);
    for (const Point& p : pts) {
        if (!point_in_range(p, spec)) throw domain_error("point_sum: point outside the ambient");
        for (int j = 0; j < spec.d; ++j) s.c[std::size_t(j)] += p.c[std::size_t(j)];
    }
    if (spec.ambient == Ambient::Torus)
        for (auto& v : s.c) v = std::int32_t(((v % spec.n) + spec.n) % spec.n);
    return s;
}

// Membership bit-vector over lexicographic ranks.
class PointSet {
public:
    PointSet() = default;
    explicit PointSet(const EquationSpec& spec)
        : spec_(spec), nbits_(spec.grid_size()), bits_(std::size_t((nbits_ + 63) / 64), 0) {}

    static PointSet full(const EquationSpec& spec) {
        PointSet s(spec);
        for (auto& w : s.bits_) w = ~u64(0);
        s.trim();
        return s;
    }

    const EquationSpec& spec() const { return spec_; }
    i64 universe_size() const { return nbits_; }

    bool contains(Rank r) const {
        check_rank(r);
        return (bits_[std::size_t(r >> 6)] >> (r & 63)) & 1;
    }
    bool contains(const Point& p) const { return contains(rank_point(p, spec_)); }

    void insert(Rank r) {
        check_rank(r);
        bits_[std::size_t(r >> 6)] |= u64(1) << (r & 63);
    }
    void insert(const Point& p) { insert(rank_point(p, spec_)); }

    void erase(Rank r) {
        check_rank(r);
        bits_[std::size_t(r >> 6)] &= ~(u64(1) << (r & 63));
    }

    i64 size() const {
        i64 total = 0;
        for (u64 w : bits_) total += std::popcount(w);
        return total;
    }

    std::vector<Rank> members() const {
        std::vector<Rank> out;
        out.reserve(std::size_t(size()));
        for (std::size_t w = 0; w < bits_.size(); ++w) {
            u64 word = bits_[w];
            while (word) {
                int b = std::countr_zero(word);
                out.push_back(Rank(w * 64 + std::size_t(b)));
                word &= word - 1;
            }
        }
        return out;
    }

    PointSet operator|(const PointSet& o) const { return zip(o, [](u64 a, u64 b) { return a | b; }); }
    PointSet operator&(const PointSet& o) const { return zip(o, [](u64 a, u64 b) { return a & b; }); }
    PointSet operator-(const PointSet& o) const { return zip(o, [](u64 a, u64 b) { return a & ~b; }); }

    bool operator==(const PointSet& o) const {
        return spec_.same_universe(o.spec_) && bits_ == o.bits_;
    }

    bool is_subset_of(const PointSet& o) const {
        require_same_universe(o);
        for (std::size_t i = 0; i < bits_.size(); ++i)
            if (bits_[i] & ~o.bits_[i]) return false;
        return true;
    }

    bool disjoint_with(const PointSet& o) const {
        require_same_universe(o);
        for (std::size_t i = 0; i < bits_.size(); ++i)
            if (bits_[i] & o.bits_[i]) return false;
        return true;
    }

    u64 digest() const {
        u64 h = fnv1a_pod(int(spec_.ambient));
        h = fnv1a_pod(spec_.d, h);
        h = fnv1a_pod(spec_.n, h);
        return fnv1a(bits_.data(), bits_.size() * sizeof(u64), h);
    }

private:
    EquationSpec spec_{Ambient::Box, 1, 1, {1, 1}, 1};
    i64 nbits_ = 1;
    std::vector<u64> bits_ = {0};

    void check_rank(Rank r) const {
        if (r < 0 || r >= nbits_) throw domain_error("PointSet: rank outside [0, n^d)");
    }
    void require_same_universe(const PointSet& o) const {
        if (!spec_.same_universe(o.spec_))
            throw domain_error("PointSet: operands live in different ambient spaces");
    }
    void trim() {
        int rem = int(nbits_ & 63);
        if (rem) bits_.back() &= (u64(1) << rem) - 1;
    }
    template <class F>
    PointSet zip(const PointSet& o, F f) const {
        require_same_universe(o);
        PointSet out(spec_);
        for (std::size_t i = 0; i < bits_.size(); ++i) out.bits_[i] = f(bits_[i], o.bits_[i]);
        return out;
    }
};

inline PointSet full_grid(const EquationSpec& spec) { return PointSet::full(spec); }

// Convenience for d=1 sets given as coordinate lists.
inline PointSet pointset_from_coords(const EquationSpec& spec,
                                     const std::vector<std::vector<std::int32_t>>& pts) {
    PointSet s(spec);
    for (const auto& c : pts) s.insert(Point(c));
    return s;
}

inline PointSet pointset_from_values(const EquationSpec& spec, const std::vector<int>& xs) {
    if (spec.d != 1) throw domain_error("pointset_from_values: d=1 only");
    PointSet s(spec);
    for (int x : xs) s.insert(Point({std::int32_t(x)}));
    return s;
}

// --- serialization -----------------------------------------------------
// Two interchangeable text forms, both exact round-trips:
//   tuples:  one "(c1,...,cd)" per line, in rank order
//   rle:     "rle <first-bit> <run> <run> ..." over the rank bit-vector

inline std::string pointset_to_tuples(const PointSet& s) {
    std::ostringstream out;
    for (Rank r : s.members()) {
        Point p = unrank_point(r, s.spec());
        out << '(';
        for (int j = 0; j < s.spec().d; ++j) {
            if (j) out << ',';
            out << p.c[std::size_t(j)];
        }
        out << ")\n";
    }
    return out.str();
}

inline std::string pointset_to_rle(const PointSet& s) {
    std::ostringstream out;
    i64 total = s.universe_size();
    int first = total > 0 && s.contains(0) ? 1 : 0;
    out << "rle " << first;
    i64 pos = 0;
    while (pos < total) {
        bool bit = s.contains(pos);
        i64 run = 1;
        while (pos + run < total && s.contains(pos + run) == bit) ++run;
        out << ' ' << run;
        pos += run;
    }
    out << '\n';
    return out.str();
}

inline PointSet pointset_parse(const std::string& text, const EquationSpec& spec) {
    PointSet s(spec);
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        std::size_t start = line.find_first_not_of(" \t\r");
        if (start == std::string::npos) continue;
        if (line.compare(start, 4, "rle ") == 0) {
            std::istringstream ls(line.substr(start + 4));
            int first = 0;
            if (!(ls >> first)) throw domain_error("pointset_parse: malformed rle header");
            i64 pos = 0;
            bool bit = first != 0;
            i64 run = 0;
            while (ls >> run) {
                if (run < 0 || pos + run > s.universe_size())
                    throw domain_error("pointset_parse: rle runs exceed n^d");
                if (bit)
                    for (i64 i = 0; i < run; ++i) s.insert(pos + i);
                pos += run;
                bit = !bit;
            }
            if (pos != s.universe_size())
                throw domain_error("pointset_parse: rle runs do not cover n^d");
            continue;
        }
        if (line[start] != '(')
            throw domain_error("pointset_parse: expected '(c1,...,cd)' or 'rle' line");
        Point p;
        std::size_t i = start + 1;
        while (i < line.size()) {
            std::size_t end = line.find_first_of(",)", i);
            if (end == std::string::npos) throw domain_error("pointset_parse: unterminated tuple");
            p.c.push_back(std::int32_t(std::stol(line.substr(i, end - i))));
            i = end + 1;
            if (line[end] == ')') break;
        }
        if (int(p.c.size()) != spec.d)
            throw domain_error("pointset_parse: tuple arity differs from d");
        s.insert(p);
    }
    return s;
}

} // namespace bkh
