#include <catch2/catch_amalgamated.hpp>

#include <random>

#include <bkh/solutions.hpp>

#include <bkh/oracle.hpp>

namespace naive = bkh::oracle;

using namespace bkh;

namespace {

EquationSpec d1(int n, int k = 2, int h = 2) {
    return EquationSpec(Ambient::Box, 1, n, std::vector<int>(std::size_t(k), h), 4);
}

PointSet interval(const EquationSpec& spec, std::vector<int> xs) {
    return pointset_from_values(spec, xs);
}

void check_witness(const SolutionSet& s, const EquationSpec& spec) {
    REQUIRE(s.points.size() == std::size_t(spec.total_points()));
    REQUIRE(std::is_sorted(s.points.begin(), s.points.end()));
    std::vector<std::vector<std::int64_t>> sums(std::size_t(spec.k()),
                                                std::vector<std::int64_t>(std::size_t(spec.d), 0));
    std::vector<int> sizes(std::size_t(spec.k()), 0);
    for (std::size_t i = 0; i < s.points.size(); ++i) {
        Point p = unrank_point(s.points[i], spec);
        int g = s.witness[i];
        ++sizes[std::size_t(g)];
        for (int j = 0; j < spec.d; ++j) sums[std::size_t(g)][std::size_t(j)] += p.c[std::size_t(j)];
    }
    for (int g = 0; g < spec.k(); ++g) REQUIRE(sizes[std::size_t(g)] == spec.groups[std::size_t(g)]);
    for (auto& sv : sums)
        if (spec.ambient == Ambient::Torus)
            for (auto& x : sv) x = ((x % spec.n) + spec.n) % spec.n;
    for (int g = 1; g < spec.k(); ++g) REQUIRE(sums[std::size_t(g)] == sums[0]);
}

} // namespace

TEST_CASE("multiplicity map examples") {
    auto spec = d1(9);
    auto mm = multiplicity_map(interval(spec, {1, 2, 3}), 2);
    auto m = mm.as_map();
    REQUIRE(m.size() == 3);
    CHECK(m.at(SumVector{{3}}) == 1);
    CHECK(m.at(SumVector{{4}}) == 1);
    CHECK(m.at(SumVector{{5}}) == 1);

    CHECK(multiplicity_map(interval(spec, {1}), 2).as_map().empty());

    auto m4 = multiplicity_map(interval(spec, {1, 2, 3, 4}), 2).as_map();
    CHECK(m4.at(SumVector{{5}}) == 2);
    CHECK(m4.size() == 5);
    CHECK(multiplicity_map(interval(spec, {1, 2, 3, 4}), 2).total() == binom(Int(4), 2));
}

TEST_CASE("count_solutions d=1 examples") {
    auto spec = d1(5);
    auto c4 = count_solutions(interval(spec, {1, 2, 3, 4}), spec);
    CHECK(c4.f == 1);
    auto c5 = count_solutions(full_grid(spec), spec);
    CHECK(c5.f == 3);
    REQUIRE(c5.solutions.size() == 3);
    CHECK(c5.solutions[0].points == std::vector<Rank>{0, 1, 2, 3});
    CHECK(c5.solutions[1].points == std::vector<Rank>{0, 1, 3, 4});
    CHECK(c5.solutions[2].points == std::vector<Rank>{1, 2, 3, 4});
    for (auto& s : c5.solutions) check_witness(s, spec);
    CHECK(count_solutions(interval(spec, {1, 2, 4}), spec).f == 0);
}

TEST_CASE("bucket join equals the all-subsets oracle, d=1") {
    auto spec = d1(8);
    for (u64 mask = 0; mask < 256; ++mask) {
        PointSet A(spec);
        for (int b = 0; b < 8; ++b)
            if ((mask >> b) & 1) A.insert(Rank(b));
        auto eng = count_solutions(A, spec);
        auto ref = naive::solutions(A, spec);
        REQUIRE(u64(eng.f) == ref.size());
        for (auto& s : eng.solutions) check_witness(s, spec);
    }
}

TEST_CASE("bucket join equals the oracle on random subsets of [3]^2 and [2]^3") {
    std::mt19937_64 rng(20240801);
    for (auto dims : {std::pair<int, int>{2, 3}, std::pair<int, int>{3, 2}}) {
        EquationSpec spec(Ambient::Box, dims.first, dims.second, {2, 2}, 4);
        for (int it = 0; it < 25; ++it) {
            PointSet A(spec);
            for (Rank r = 0; r < spec.grid_size(); ++r)
                if (rng() & 1) A.insert(r);
            CHECK(u64(count_solutions(A, spec).f) == naive::count_solutions(A, spec));
        }
    }
}

TEST_CASE("bucket join equals the oracle for k=3 and h=3 shapes") {
    for (auto kh : {std::pair<int, int>{3, 2}, std::pair<int, int>{2, 3}}) {
        auto spec = d1(9, kh.first, kh.second);
        auto A = full_grid(spec);
        CHECK(u64(count_solutions(A, spec).f) == naive::count_solutions(A, spec));
    }
}

TEST_CASE("torus solutions wrap") {
    EquationSpec tor(Ambient::Torus, 1, 5, {2, 2}, 4);
    auto A = full_grid(tor);
    CHECK(u64(count_solutions(A, tor).f) == naive::count_solutions(A, tor));
    // {0,1,2,4}: 0+1 = 2+4 mod 5
    PointSet B(tor);
    for (Rank r : {0, 1, 2, 4}) B.insert(r);
    CHECK(count_solutions(B, tor).f == 1);
}

TEST_CASE("M2 matches the tuple odometer") {
    for (int n = 3; n <= 6; ++n) {
        auto spec = d1(n);
        auto cen = count_solutions(full_grid(spec), spec);
        CHECK(cen.M2 == naive::tuple_m2(full_grid(spec), spec));
    }
    auto spec23 = d1(5, 2, 3);
    auto cen23 = count_solutions(full_grid(spec23), spec23);
    CHECK(cen23.M2 == naive::tuple_m2(full_grid(spec23), spec23));
    EquationSpec tor(Ambient::Torus, 1, 5, {2, 2}, 4);
    CHECK(count_solutions(full_grid(tor), tor).M2 == naive::tuple_m2(full_grid(tor), tor));
}

TEST_CASE("exact inequality suite on small grids") {
    for (auto kh : {std::pair<int, int>{2, 2}, std::pair<int, int>{2, 3}, std::pair<int, int>{3, 2}}) {
        for (int n = 2; n <= 10; ++n) {
            auto spec = d1(n, kh.first, kh.second);
            auto A = full_grid(spec);
            auto cen = count_solutions(A, spec);
            const int k = kh.first, h = kh.second;
            Int sizeA = A.size();
            // f <= |A|^{k(h-1)+1}
            CHECK(to_int(cen.f) <= int_pow(sizeA, u64(k * (h - 1) + 1)));
            // M2 <= C(kh,2) |A|^{k(h-1)}
            CHECK(cen.M2 <= cen.M2_bound);
            // Jensen: M1 >= (hn)^d C(avg, k), avg = C(|A|,h)/(hn)^d
            Int cells = int_pow(Int(h) * spec.n, u64(spec.d));
            Rat avg = Rat(binom(sizeA, u64(h)), cells);
            CHECK(Rat(cen.M1) >= Rat(cells) * binom_convex(avg, u64(k)));
            // f >= (M1 - M2) k! / (C(kh,h) C(kh-h,h) ... C(h,h))
            Int part = 1;
            for (int g = 0; g < k; ++g) part *= binom(Int(k * h - g * h), u64(h));
            Rat rhs = Rat(cen.M1 - cen.M2) * Rat(factorial(u64(k)), part);
            CHECK(Rat(to_int(cen.f)) >= rhs);
        }
    }
}

TEST_CASE("count_cross examples and oracle") {
    auto spec = d1(9);
    auto A1 = interval(spec, {1, 2});
    auto A2 = interval(spec, {3, 4});
    CHECK(count_cross(A1, A2, 1, spec) == 1);
    CHECK(count_cross(interval(spec, {1}), interval(spec, {3, 4}), 1, spec) == 0);
    CHECK(count_cross(interval(spec, {1, 3}), interval(spec, {2, 4}), 1, spec) == 1);
    CHECK_THROWS_AS(count_cross(interval(spec, {1, 2}), interval(spec, {2, 3}), 1, spec),
                    domain_error);
    CHECK_THROWS_AS(count_cross(A1, A2, 2, spec), domain_error); // j > h-1

    std::mt19937_64 rng(5);
    auto spec23 = d1(9, 2, 3);
    for (int it = 0; it < 10; ++it) {
        PointSet B1(spec23), B2(spec23);
        for (Rank r = 0; r < 9; ++r) {
            int roll = int(rng() % 3);
            if (roll == 0) B1.insert(r);
            else if (roll == 1) B2.insert(r);
        }
        for (int j = 1; j <= 2; ++j)
            CHECK(u64(count_cross(B1, B2, j, spec23)) == naive::count_cross(B1, B2, j, spec23));
    }
}

TEST_CASE("count_through_point examples, oracle, reflection symmetry") {
    auto spec = d1(5);
    auto A5 = full_grid(spec);
    auto r1 = count_through_point(A5, Point({1}), spec);
    CHECK(r1.count == 2);
    REQUIRE(r1.family.size() == 2);
    CHECK(r1.family[0] == std::vector<Rank>{1, 2, 3});
    CHECK(r1.family[1] == std::vector<Rank>{1, 3, 4});

    auto spec4 = d1(4);
    CHECK(count_through_point(full_grid(spec4), Point({2}), spec4).count == 1);
    CHECK_THROWS_AS(count_through_point(interval(spec, {1, 2}), Point({3}), spec), domain_error);
    CHECK(count_through_point(interval(spec, {1, 2, 4}), Point({1}), spec).count == 0);

    std::mt19937_64 rng(17);
    for (int n = 5; n <= 9; ++n) {
        auto sp = d1(n);
        PointSet A(sp);
        for (Rank r = 0; r < n; ++r)
            if (rng() % 4 != 0) A.insert(r);
        for (Rank r : A.members()) {
            Point v = unrank_point(r, sp);
            u128 mine = count_through_point(A, v, sp).count;
            CHECK(u64(mine) == naive::count_through_point(A, v, sp));
            // reflect x -> n+1-x
            PointSet R(sp);
            for (Rank q : A.members()) R.insert(Rank(n - 1 - q));
            Point vr({std::int32_t(n + 1 - v.c[0])});
            CHECK(count_through_point(R, vr, sp).count == mine);
        }
    }
}

TEST_CASE("greedy disjoint family") {
    auto spec = d1(9);
    std::vector<std::vector<Rank>> fam = {{2, 3, 4}, {5, 6, 7}};
    auto rep = greedy_disjoint_family(fam, 0, 4);
    CHECK(rep.kept.size() == 2);
    std::vector<std::vector<Rank>> fam2 = {{2, 3, 4}, {4, 5, 6}};
    auto rep2 = greedy_disjoint_family(fam2, 0, 4);
    REQUIRE(rep2.kept.size() == 1);
    CHECK(rep2.kept[0] == std::vector<Rank>{2, 3, 4});

    auto spec5 = d1(5);
    auto tp = count_through_point(full_grid(spec5), Point({1}), spec5);
    auto rep3 = greedy_disjoint_family(tp.family, rank_point(Point({1}), spec5), 4);
    CHECK(rep3.kept.size() == 1);
    CHECK(rep3.kept.size() >= rep3.guaranteed_min);

    CHECK_THROWS_AS(greedy_disjoint_family({{0, 2, 3}}, 0, 4), domain_error);
    CHECK_THROWS_AS(greedy_disjoint_family({{2, 3}}, 0, 4), domain_error);
}

TEST_CASE("parallelogram classification") {
    EquationSpec spec(Ambient::Box, 2, 4, {2, 2}, 4);
    auto mk = [&](std::vector<std::vector<std::int32_t>> pts) {
        SolutionSet s;
        for (auto& c : pts) s.points.push_back(rank_point(Point(c), spec));
        std::sort(s.points.begin(), s.points.end());
        s.witness = {0, 1, 1, 0};
        return s;
    };
    CHECK(classify_parallelogram(mk({{1, 1}, {2, 2}, {3, 3}, {4, 4}}), spec) ==
          ParallelogramClass::Degenerate);
    CHECK(classify_parallelogram(mk({{1, 1}, {1, 2}, {2, 1}, {2, 2}}), spec) ==
          ParallelogramClass::Nondegenerate);
    CHECK(classify_parallelogram(mk({{1, 1}, {3, 1}, {1, 3}, {3, 3}}), spec) ==
          ParallelogramClass::Nondegenerate);
    EquationSpec bad(Ambient::Box, 1, 4, {2, 2}, 4);
    CHECK_THROWS_AS(classify_parallelogram(mk({{1, 1}, {2, 2}, {3, 3}, {4, 4}}), bad), domain_error);
}

TEST_CASE("degenerate parallelogram count bound") {
    EquationSpec spec(Ambient::Box, 2, 4, {2, 2}, 4);
    PointSet diag(spec);
    for (int i = 1; i <= 4; ++i) diag.insert(Point({i, i}));
    auto rep = degenerate_count_bound_check(diag, spec);
    CHECK(rep.degenerate == 1);
    CHECK(rep.bound == 64);
    CHECK(rep.holds);

    PointSet square(spec);
    for (auto c : std::vector<std::vector<std::int32_t>>{{1, 1}, {1, 2}, {2, 1}, {2, 2}})
        square.insert(Point(c));
    auto rep2 = degenerate_count_bound_check(square, spec);
    CHECK(rep2.degenerate == 0);
    CHECK(rep2.total_solutions == 1);
    CHECK(rep2.holds);

    PointSet tiny(spec);
    tiny.insert(Point({1, 1}));
    CHECK(degenerate_count_bound_check(tiny, spec).degenerate == 0);
}

TEST_CASE("solution counts are worker-count independent") {
    auto spec = d1(12);
    auto A = full_grid(spec);
    auto one = count_solutions(A, spec, SolveOptions{1'000'000, 1});
    auto many = count_solutions(A, spec, SolveOptions{1'000'000, 8});
    CHECK(one.f == many.f);
    CHECK(one.M2 == many.M2);
    REQUIRE(one.solutions.size() == many.solutions.size());
    for (std::size_t i = 0; i < one.solutions.size(); ++i) {
        CHECK(one.solutions[i].points == many.solutions[i].points);
        CHECK(one.solutions[i].witness == many.solutions[i].witness);
    }
}

TEST_CASE("mixed-group census counts f only") {
    auto spec = d1(6, 2, 2);
    EquationSpec mixed(Ambient::Box, 1, 6, {1, 2}, 4);
    auto cen = count_solutions(full_grid(mixed), mixed);
    CHECK_FALSE(cen.symmetric_diag);
    CHECK(u64(cen.f) == naive::count_solutions(full_grid(mixed), mixed));
    for (auto& s : cen.solutions) check_witness(s, mixed);
    (void)spec;
}
