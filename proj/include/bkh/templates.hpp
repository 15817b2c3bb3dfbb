#pragma once

#include <algorithm>
#include <bit>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "bkh/bigmath.hpp"
#include "bkh/coloring.hpp"
#include "bkh/common.hpp"
#include "bkh/grid.hpp"
#include "bkh/solutions.hpp"

namespace bkh {

// An r-template assigns each point of A a palette (set of allowed colors).
// Palettes are bitmasks, bit i = color i+1, aligned with A.members().
struct Template {
    std::vector<std::uint32_t> palettes;
};

inline Template coloring_as_template(const Coloring& c) {
    Template t;
    t.palettes.reserve(c.colors.size());
    for (std::uint8_t v : c.colors) {
        if (v < 1) throw domain_error("coloring_as_template: colors are 1-based");
        t.palettes.push_back(std::uint32_t(1) << (v - 1));
    }
    return t;
}

inline bool is_subtemplate(const Template& p1, const Template& p2) {
    if (p1.palettes.size() != p2.palettes.size())
        throw domain_error("is_subtemplate: templates live on different point sets");
    for (std::size_t i = 0; i < p1.palettes.size(); ++i)
        if (p1.palettes[i] & ~p2.palettes[i]) return false;
    return true;
}

// R(P): over each solution set X, count systems of pairwise distinct colors
// picked one per point from the palettes restricted to X. Points outside X
// carry empty palettes in the subtemplate, so each X contributes an
// injective-assignment count.
inline u128 count_rainbow_subtemplates(const Template& P,
                                       const std::vector<std::vector<std::uint16_t>>& sols,
                                       int workers = 1) {
    return parallel_reduce<u128>(
        sols.size(), workers, u128(0),
        [&](std::size_t si) {
            const auto& sol = sols[si];
            u128 count = 0;
            std::uint32_t used = 0;
            auto rec = [&](auto&& self, std::size_t at) -> void {
                if (at == sol.size()) {
                    ++count;
                    return;
                }
                std::uint32_t avail = P.palettes.at(sol[at]) & ~used;
                while (avail) {
                    std::uint32_t bit = avail & (~avail + 1);
                    avail ^= bit;
                    used |= bit;
                    self(self, at + 1);
                    used ^= bit;
                }
            };
            rec(rec, 0);
            return count;
        },
        [](u128& acc, u128&& v) { acc = checked_add(acc, v, "count_rainbow_subtemplates"); });
}

// g(P, A): colorings that are subtemplates of P and rainbow-free.
inline u128 count_template_colorings(const Template& P,
                                     const std::vector<std::vector<std::uint16_t>>& sols, int r,
                                     const ColorCountOptions& opts_in = {}) {
    ColorCountOptions opts = opts_in;
    opts.palette_census = false;
    opts.deviation_census = false;
    return count_colorings_core(int(P.palettes.size()), r, P.palettes, sols, opts).total;
}

// ---------------------------------------------------------------------------
// Stability classification: palette-size histogram X_i, good/bad verdict,
// dominant (K-1)-palette C_P. All logs are base 2 and all threshold
// comparisons run on certified rational enclosures.
// ---------------------------------------------------------------------------

struct TemplateClassification {
    std::vector<i64> x_sizes;     // |X_i| for i = 0..r
    i64 x_low = 0;                // |X_{<= K-2}|
    i64 x_high = 0;               // |X_{>= K}|
    bool good = false;            // x_low <= |A| / (log2 n)^3
    std::vector<int> dominant;    // C_P, 1-based colors, lexicographic tie-break
    i64 dominant_size = 0;        // |A_{P, C_P}|
    Verdict dominant_large;       // |A_{P,C_P}| >= |A| - |A|/(log2 n)^2
    Verdict high_small;           // x_high <= |A| / (log2 n)^4
};

inline TemplateClassification classify_template(const Template& P, const PointSet& A,
                                                const EquationSpec& spec) {
    const int K = spec.total_points();
    if (spec.r < K - 1) throw domain_error("classify_template: needs r >= K-1");
    if (spec.r > 16) throw capacity_error("classify_template: r capped at 16");
    if (spec.n < 2) throw domain_error("classify_template: needs n >= 2");
    auto members = A.members();
    if (P.palettes.size() != members.size())
        throw domain_error("classify_template: template length differs from |A|");

    TemplateClassification out;
    out.x_sizes.assign(std::size_t(spec.r) + 1, 0);
    for (std::uint32_t pal : P.palettes) {
        int sz = std::popcount(pal);
        if (sz > spec.r) throw domain_error("classify_template: palette uses colors beyond r");
        ++out.x_sizes[std::size_t(sz)];
    }
    for (int i = 0; i <= spec.r; ++i) {
        if (i <= K - 2) out.x_low += out.x_sizes[std::size_t(i)];
        if (i >= K) out.x_high += out.x_sizes[std::size_t(i)];
    }
    const i64 sizeA = i64(members.size());
    BVal log_n = bv_log2(Int(spec.n));
    BVal a = bv_exact(Rat(sizeA));
    // x_low * (log n)^3 <= |A|
    Verdict good = bv_le(bv_mul(bv_exact(Rat(out.x_low)), bv_pow(log_n, 3)), a);
    if (good == Verdict::Undecided)
        throw property_violation("classify_template: good/bad threshold undecided at max precision");
    out.good = good == Verdict::True;

    // dominant palette: exact-match census over all (K-1)-subsets of [r],
    // enumerated in lexicographic order so the first maximum wins ties
    std::vector<int> comb(static_cast<std::size_t>(K - 1));
    for (int i = 0; i < K - 1; ++i) comb[std::size_t(i)] = i + 1;
    auto mask_of = [](const std::vector<int>& cs) {
        std::uint32_t m = 0;
        for (int c : cs) m |= std::uint32_t(1) << (c - 1);
        return m;
    };
    bool first = true;
    while (true) {
        std::uint32_t cm = mask_of(comb);
        i64 cnt = 0;
        for (std::uint32_t pal : P.palettes)
            if (pal == cm) ++cnt;
        if (first || cnt > out.dominant_size) {
            out.dominant = comb;
            out.dominant_size = cnt;
            first = false;
        }
        // next (K-1)-combination of [r] in lexicographic order
        int i = K - 2;
        while (i >= 0 && comb[std::size_t(i)] == spec.r - (K - 2 - i)) --i;
        if (i < 0) break;
        ++comb[std::size_t(i)];
        for (int j = i + 1; j < K - 1; ++j) comb[std::size_t(j)] = comb[std::size_t(j) - 1] + 1;
    }

    out.dominant_large = bv_le(bv_sub(a, bv_div(a, bv_pow(log_n, 2))),
                               bv_exact(Rat(out.dominant_size)));
    out.high_small = bv_le(bv_mul(bv_exact(Rat(out.x_high)), bv_pow(log_n, 4)), a);
    return out;
}

// ---------------------------------------------------------------------------
// Checks of the three container-collection conclusions against a supplied
// collection. The collection itself is an input; nothing here constructs it.
// ---------------------------------------------------------------------------

struct ContainerCheckReport {
    bool coverage_ok = true;
    std::vector<std::size_t> uncovered;        // indices into the cover list
    std::vector<std::size_t> skipped_not_free; // cover entries with R > 0
    bool r_bound_ok = true;
    std::vector<u128> r_values;
    std::vector<Verdict> r_verdicts;
    RatInterval r_threshold;      // |A|^{k(h-1)+1} / (log2 n)^{5K}
    Verdict size_ok = Verdict::True;
    RatInterval size_exponent;    // |A| n^{-k(h-1)d/(kh-1)} (log2 n)^{10}
};

inline ContainerCheckReport container_conclusions_check(
    const std::vector<Template>& containers, const std::vector<Template>& to_cover,
    const PointSet& A, const EquationSpec& spec, const SolveOptions& opts = {}) {
    if (!spec.symmetric())
        throw domain_error("container_conclusions_check: symmetric group sizes required");
    if (spec.n < 2) throw domain_error("container_conclusions_check: needs n >= 2");
    const int k = spec.k(), h = spec.h(), K = spec.total_points();
    auto members = A.members();
    auto census = count_solutions(A, spec, opts);
    auto sols = solutions_as_indices(census.solutions, members);

    ContainerCheckReport rep;
    for (std::size_t i = 0; i < to_cover.size(); ++i) {
        if (count_rainbow_subtemplates(to_cover[i], sols, opts.workers) > 0) {
            rep.skipped_not_free.push_back(i);
            continue;
        }
        bool covered = false;
        for (const auto& c : containers)
            if (is_subtemplate(to_cover[i], c)) { covered = true; break; }
        if (!covered) {
            rep.coverage_ok = false;
            rep.uncovered.push_back(i);
        }
    }

    BVal log_n = bv_log2(Int(spec.n));
    BVal threshold = bv_div(bv_exact(Rat(int_pow(Int(members.size()), u64(k * (h - 1) + 1)))),
                            bv_pow(log_n, unsigned(5 * K)));
    rep.r_threshold = threshold.eval(1);
    for (const auto& c : containers) {
        u128 rv = count_rainbow_subtemplates(c, sols, opts.workers);
        rep.r_values.push_back(rv);
        Verdict v = bv_le(bv_exact(Rat(to_int(rv))), threshold);
        rep.r_verdicts.push_back(v);
        if (v != Verdict::True) rep.r_bound_ok = false;
    }

    Rat expo = Rat(Int(k * (h - 1)) * Int(spec.d), Int(K - 1));
    BVal exponent = bv_mul(bv_mul(bv_exact(Rat(i64(members.size()))),
                                  bv_recip(bv_npow(Int(spec.n), expo))),
                           bv_pow(log_n, 10));
    rep.size_exponent = exponent.eval(1);
    if (containers.size() > 1) {
        // |C| <= 2^E  <=>  log2 |C| <= E
        rep.size_ok = bv_le(bv_log2(Int(u64(containers.size()))), exponent);
    }
    return rep;
}

// --- template IO: one "rank: {c1,c2,...}" line per point -------------------

inline std::string template_to_string(const Template& P, const std::vector<Rank>& members) {
    if (P.palettes.size() != members.size())
        throw domain_error("template_to_string: template length differs from |A|");
    std::ostringstream out;
    for (std::size_t i = 0; i < members.size(); ++i) {
        out << members[i] << ": {";
        bool firstc = true;
        std::uint32_t pal = P.palettes[i];
        while (pal) {
            int c = std::countr_zero(pal);
            pal &= pal - 1;
            if (!firstc) out << ',';
            out << (c + 1);
            firstc = false;
        }
        out << "}\n";
    }
    return out.str();
}

// Parses one template; omitted ranks keep empty palettes.
inline Template template_parse(const std::string& text, const std::vector<Rank>& members, int r) {
    Template P;
    P.palettes.assign(members.size(), 0);
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        std::size_t colon = line.find(':');
        if (colon == std::string::npos) continue;
        Rank rank = std::stoll(line.substr(0, colon));
        auto it = std::lower_bound(members.begin(), members.end(), rank);
        if (it == members.end() || *it != rank)
            throw domain_error("template_parse: rank not a member of A");
        std::size_t idx = std::size_t(it - members.begin());
        std::size_t open = line.find('{', colon);
        std::size_t close = line.find('}', colon);
        if (open == std::string::npos || close == std::string::npos || close < open)
            throw domain_error("template_parse: malformed palette braces");
        std::string inner = line.substr(open + 1, close - open - 1);
        std::istringstream ps(inner);
        std::string tok;
        std::uint32_t mask = 0;
        while (std::getline(ps, tok, ',')) {
            if (tok.find_first_not_of(" \t") == std::string::npos) continue;
            int c = std::stoi(tok);
            if (c < 1 || c > r) throw domain_error("template_parse: color outside [1, r]");
            mask |= std::uint32_t(1) << (c - 1);
        }
        P.palettes[idx] = mask;
    }
    return P;
}

// A templates file: sections separated by lines beginning with "template".
inline std::vector<Template> templates_parse(const std::string& text,
                                             const std::vector<Rank>& members, int r) {
    std::vector<Template> out;
    std::istringstream in(text);
    std::string line, section;
    auto flush = [&]() {
        if (!section.empty()) {
            out.push_back(template_parse(section, members, r));
            section.clear();
        }
    };
    while (std::getline(in, line)) {
        if (line.rfind("template", 0) == 0) {
            flush();
            section = " ";
            continue;
        }
        if (section.empty()) section = " ";
        section += line + "\n";
    }
    flush();
    return out;
}

} // namespace bkh
