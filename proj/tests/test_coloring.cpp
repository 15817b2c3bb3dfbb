#include <catch2/catch_amalgamated.hpp>

#include <random>

#include <bkh/coloring.hpp>

#include <bkh/oracle.hpp>

namespace naive = bkh::oracle;

using namespace bkh;

namespace {

EquationSpec d1(int n, int r = 4) { return EquationSpec(Ambient::Box, 1, n, {2, 2}, r); }

std::vector<std::vector<std::uint16_t>> sols_of(const PointSet& A, const EquationSpec& spec) {
    auto census = count_solutions(A, spec);
    return solutions_as_indices(census.solutions, A.members());
}

} // namespace

TEST_CASE("is_rainbow_free basics") {
    auto spec = d1(4);
    auto A = full_grid(spec);
    auto sols = sols_of(A, spec);
    CHECK(is_rainbow_free(Coloring{{1, 1, 1, 1}}, sols, 4, 4));
    CHECK_FALSE(is_rainbow_free(Coloring{{1, 2, 3, 4}}, sols, 4, 4));
    CHECK(is_rainbow_free(Coloring{{1, 2, 3, 1}}, sols, 4, 4));
    CHECK_THROWS_AS(is_rainbow_free(Coloring{{1, 2}}, sols, 4, 4), domain_error);
    CHECK_THROWS_AS(is_rainbow_free(Coloring{{1, 2, 3, 5}}, sols, 4, 4), domain_error);
}

TEST_CASE("count_rainbow_free examples") {
    auto spec = d1(4);
    auto cen = count_rainbow_free(full_grid(spec), spec);
    CHECK(cen.g == 232);
    CHECK(cen.lower_bound == 144);

    auto spec3 = d1(3);
    CHECK(count_rainbow_free(full_grid(spec3), spec3).g == 64);

    auto spec_r3 = d1(4, 3);
    CHECK(count_rainbow_free(full_grid(spec_r3), spec_r3).g == 81);
}

TEST_CASE("backtracking equals the odometer oracle over all A in [5], r <= 4") {
    for (int r = 1; r <= 4; ++r) {
        EquationSpec spec = d1(5, r);
        for (u64 mask = 0; mask < 32; ++mask) {
            PointSet A(spec);
            for (int b = 0; b < 5; ++b)
                if ((mask >> b) & 1) A.insert(Rank(b));
            auto mine = count_rainbow_free(A, spec);
            auto ref = naive::count_rainbow_free(A, spec);
            REQUIRE(mine.g == ref.g);
            u128 total = 0;
            for (std::size_t i = 0; i < mine.by_palette_size.size(); ++i) {
                total += mine.by_palette_size[i];
                u128 expect = ref.by_distinct.count(int(i)) ? ref.by_distinct.at(int(i)) : 0;
                REQUIRE(mine.by_palette_size[i] == expect);
            }
            CHECK(total == mine.g);
        }
    }
}

TEST_CASE("backtracking equals the oracle on d=2 subsets") {
    EquationSpec spec(Ambient::Box, 2, 3, {2, 2}, 4);
    std::mt19937_64 rng(99);
    for (int it = 0; it < 12; ++it) {
        PointSet A(spec);
        for (Rank r = 0; r < 9; ++r)
            if (rng() % 3 != 0) A.insert(r);
        auto mine = count_rainbow_free(A, spec);
        auto ref = naive::count_rainbow_free(A, spec);
        CHECK(mine.g == ref.g);
    }
}

TEST_CASE("pigeonhole: <= K-1 colors is always rainbow-free") {
    auto spec = d1(5);
    auto A = full_grid(spec);
    auto sols = sols_of(A, spec);
    std::vector<int> color(5, 0);
    while (true) {
        std::uint32_t used = 0;
        for (int c : color) used |= 1u << c;
        if (std::popcount(used) <= 3) {
            Coloring col;
            for (int c : color) col.colors.push_back(std::uint8_t(c + 1));
            REQUIRE(is_rainbow_free(col, sols, 5, 4));
        }
        int at = 4;
        while (at >= 0 && color[std::size_t(at)] == 3) color[std::size_t(at--)] = 0;
        if (at < 0) break;
        ++color[std::size_t(at)];
    }
}

TEST_CASE("torus count never exceeds box count") {
    for (u64 mask = 0; mask < 32; ++mask) {
        EquationSpec box = d1(5);
        EquationSpec tor(Ambient::Torus, 1, 5, {2, 2}, 4);
        PointSet Ab(box), At(tor);
        for (int b = 0; b < 5; ++b)
            if ((mask >> b) & 1) {
                Ab.insert(Rank(b));
                At.insert(Rank(b)); // x -> x-1 identifies the two universes
            }
        auto gb = count_rainbow_free(Ab, box).g;
        auto gt = count_rainbow_free_torus(At, tor).g;
        CHECK(gt <= gb);
    }
    CHECK_THROWS_AS(count_rainbow_free_torus(full_grid(d1(4)), d1(4)), domain_error);
}

TEST_CASE("torus census equals the oracle") {
    EquationSpec tor(Ambient::Torus, 1, 5, {2, 2}, 4);
    auto mine = count_rainbow_free(full_grid(tor), tor);
    auto ref = naive::count_rainbow_free(full_grid(tor), tor);
    CHECK(mine.g == ref.g);
    EquationSpec tor3(Ambient::Torus, 1, 3, {2, 2}, 4);
    CHECK(count_rainbow_free(full_grid(tor3), tor3).g == naive::count_rainbow_free(full_grid(tor3), tor3).g);
}

TEST_CASE("lower bound value examples") {
    CHECK(lower_bound_value(2, 2, 2, 4) == 0);
    CHECK(lower_bound_value(3, 2, 2, 4) == 24);
    CHECK(lower_bound_value(4, 2, 2, 4) == 144);
    // r < K-1 gives a zero bound rather than an error
    CHECK(lower_bound_value(4, 2, 2, 2) == 0);
}

TEST_CASE("lower bound never exceeds g") {
    for (int n = 1; n <= 7; ++n) {
        auto spec = d1(n);
        auto cen = count_rainbow_free(full_grid(spec), spec);
        CHECK(cen.lower_bound <= to_int(cen.g));
    }
}

TEST_CASE("count_deviating examples and identities") {
    auto spec3 = d1(3);
    auto dev3 = count_deviating(full_grid(spec3), {1, 2, 3}, spec3);
    CHECK(dev3.deviating == 64 - 27);
    CHECK(dev3.inside == 27);

    auto spec4 = d1(4);
    auto dev4 = count_deviating(full_grid(spec4), {1, 2, 3}, spec4);
    CHECK(dev4.deviating == 232 - 81);
    CHECK(dev4.inside == 81);
    u128 total = 0;
    for (auto v : dev4.by_deviation) total += v;
    CHECK(total == 232);

    CHECK_THROWS_AS(count_deviating(full_grid(spec4), {1, 2}, spec4), domain_error);
    CHECK_THROWS_AS(count_deviating(full_grid(spec4), {1, 2, 9}, spec4), domain_error);
}

TEST_CASE("census is invariant under color permutation") {
    // renaming colors permutes colorings bijectively; census must not move
    auto spec = d1(5);
    auto A = full_grid(spec);
    auto base = count_rainbow_free(A, spec);
    auto sols = sols_of(A, spec);
    // recount with colors enumerated in a permuted order
    std::vector<int> perm = {2, 0, 3, 1};
    naive::GCensus ref;
    std::vector<int> color(5, 0);
    while (true) {
        Coloring c;
        for (int x : color) c.colors.push_back(std::uint8_t(perm[std::size_t(x)] + 1));
        if (is_rainbow_free(c, sols, 5, 4)) {
            ++ref.g;
            std::uint32_t used = 0;
            for (auto v : c.colors) used |= 1u << (v - 1);
            ++ref.by_distinct[std::popcount(used)];
        }
        int at = 4;
        while (at >= 0 && color[std::size_t(at)] == 3) color[std::size_t(at--)] = 0;
        if (at < 0) break;
        ++color[std::size_t(at)];
    }
    CHECK(base.g == ref.g);
    for (std::size_t i = 0; i < base.by_palette_size.size(); ++i) {
        u128 expect = ref.by_distinct.count(int(i)) ? ref.by_distinct.at(int(i)) : 0;
        CHECK(base.by_palette_size[i] == expect);
    }
}

TEST_CASE("coloring counts are worker independent") {
    auto spec = d1(9);
    auto A = full_grid(spec);
    ColoringOptions one;
    one.workers = 1;
    ColoringOptions many;
    many.workers = 8;
    auto a = count_rainbow_free(A, spec, one);
    auto b = count_rainbow_free(A, spec, many);
    CHECK(a.g == b.g);
    CHECK(a.by_palette_size == b.by_palette_size);
    CHECK(a.nodes == b.nodes);
}

TEST_CASE("node budget is a hard error") {
    auto spec = d1(10);
    ColoringOptions opts;
    opts.node_budget = 50;
    CHECK_THROWS_AS(count_rainbow_free(full_grid(spec), spec, opts), capacity_error);
}

TEST_CASE("empty set has exactly the empty coloring") {
    auto spec = d1(4);
    PointSet empty(spec);
    auto cen = count_rainbow_free(empty, spec);
    CHECK(cen.g == 1);
    CHECK(cen.by_palette_size[0] == 1);
}
