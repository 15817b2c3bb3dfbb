#include <catch2/catch_amalgamated.hpp>

#include <bkh/hypergraph.hpp>

#include <bkh/oracle.hpp>

namespace naive = bkh::oracle;

using namespace bkh;

namespace {

EquationSpec d1(int n, int r = 4) { return EquationSpec(Ambient::Box, 1, n, {2, 2}, r); }

} // namespace

TEST_CASE("vertex and edge counts") {
    auto spec = d1(4);
    auto H = build_hypergraph(full_grid(spec), spec);
    CHECK(H.num_vertices == 16);
    CHECK(H.edge_count == 24);
    CHECK(H.f == 1);

    auto spec3 = d1(3);
    CHECK(build_hypergraph(full_grid(spec3), spec3).edge_count == 0);

    auto spec5 = d1(5);
    CHECK(build_hypergraph(full_grid(spec5), spec5).edge_count == 72);

    EquationSpec small_r(Ambient::Box, 1, 4, {2, 2}, 3);
    CHECK_THROWS_AS(build_hypergraph(full_grid(small_r), small_r), domain_error);
}

TEST_CASE("edge formula equals direct enumeration") {
    for (int n = 4; n <= 6; ++n)
        for (int r = 4; r <= 5; ++r) {
            EquationSpec spec = d1(n, r);
            auto H = build_hypergraph(full_grid(spec), spec);
            auto edges = enumerate_edges(H);
            CHECK(u128(edges.size()) == H.edge_count);
            // every edge's points form a registered solution set
            for (auto& e : edges) {
                std::vector<std::uint16_t> pts;
                std::uint32_t colors_seen = 0;
                for (auto vtx : e) {
                    pts.push_back(std::uint16_t(vtx / u64(r)));
                    colors_seen |= 1u << (vtx % u64(r));
                }
                std::sort(pts.begin(), pts.end());
                pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
                REQUIRE(pts.size() == 4);             // pairwise distinct points
                REQUIRE(std::popcount(colors_seen) == 4); // pairwise distinct colors
                bool found = false;
                for (auto& sol : H.sols) {
                    auto sorted = sol;
                    std::sort(sorted.begin(), sorted.end());
                    if (sorted == pts) { found = true; break; }
                }
                REQUIRE(found);
            }
        }
}

TEST_CASE("co-degree examples") {
    auto spec = d1(4);
    auto H = build_hypergraph(full_grid(spec), spec);
    CHECK(max_codegree(H, 2) == 2);
    CHECK(max_codegree(H, 4) == 1);
    CHECK_THROWS_AS(max_codegree(H, 1), domain_error);
    CHECK_THROWS_AS(max_codegree(H, 5), domain_error);
}

TEST_CASE("co-degree: algebra path equals edge-tally path") {
    for (int n = 4; n <= 6; ++n)
        for (int r = 4; r <= 5; ++r) {
            EquationSpec spec = d1(n, r);
            auto H = build_hypergraph(full_grid(spec), spec);
            for (int j = 2; j <= 4; ++j)
                CHECK(max_codegree(H, j) == max_codegree_via_edges(H, j));
        }
}

TEST_CASE("Delta_K is 1 whenever edges exist") {
    for (int n = 4; n <= 8; ++n) {
        EquationSpec spec = d1(n);
        auto H = build_hypergraph(full_grid(spec), spec);
        if (H.edge_count > 0) CHECK(max_codegree(H, 4) == 1);
    }
}

TEST_CASE("average degree identity") {
    auto spec = d1(5);
    auto H = build_hypergraph(full_grid(spec), spec);
    CHECK(average_degree(H) == Rat(Int(4) * 72, Int(20)));
}

TEST_CASE("co-degree function at an exact tau") {
    auto spec = d1(4);
    auto H = build_hypergraph(full_grid(spec), spec);
    // independent evaluation: Delta_j = {2: 2, 3: 1, 4: 1}, d(H) = 24*4/16 = 6
    // Delta(H, 1/2) = 2^{C(4,2)-1} * sum_j 2^{-C(j-1,2)} Delta_j / (6 (1/2)^{j-1})
    //   j=2: 2^5 * 2^0 * 2 / 3      = 64/3   * ... keep exact below
    Rat d = Rat(6);
    Rat tau(1, 2);
    Rat expect = 0;
    auto term = [&](int j, int delta) {
        Rat t = Rat(Int(1) << 5) / Rat(Int(1) << ((j - 1) * (j - 2) / 2));
        Rat denom = d;
        for (int i = 0; i < j - 1; ++i) denom *= tau;
        return t * Rat(delta) / denom;
    };
    CHECK(max_codegree(H, 3) == 1);
    expect = term(2, 2) + term(3, 1) + term(4, 1);
    CHECK(codegree_function(H, tau) == expect);
    CHECK_THROWS_AS(codegree_function(H, Rat(2)), domain_error);
    auto spec3 = d1(3);
    auto H0 = build_hypergraph(full_grid(spec3), spec3);
    CHECK_THROWS_AS(codegree_function(H0, tau), domain_error);
}

TEST_CASE("single-term co-degree function shape") {
    // with only Delta_K nonzero the function reduces to
    // 2^{C(K,2)-1-C(K-1,2)} / (d * tau^{K-1})
    auto spec = d1(4);
    auto H = build_hypergraph(full_grid(spec), spec);
    Rat tau(99, 100);
    Rat d = average_degree(H);
    Rat last = Rat(Int(1) << 5) / Rat(Int(1) << 3) / (d * tau * tau * tau);
    CHECK(codegree_function(H, tau) >= last); // other terms only add
}

TEST_CASE("proof parameters at n = 4 are exact and the hypothesis fails") {
    EquationSpec spec = d1(4);
    auto H = build_hypergraph(full_grid(spec), spec);
    auto rep = paper_parameters(spec, &H);
    REQUIRE(rep.epsilon.exact()); // log2 4 = 2 exactly
    CHECK(rep.epsilon.lo == Rat(Int(1), Int(24) * (Int(1) << 20)));
    CHECK(rep.tau_small == Verdict::False); // tau ~ 101.6 at n = 4
    CHECK(rep.has_delta);
    CHECK(rep.delta_small == Verdict::False);
    CHECK(rep.tau.lo > 0);
    CHECK(rep.epsilon.lo > 0);
}

TEST_CASE("pre-asymptotic co-degree bounds hold") {
    for (auto kh : {std::pair<int, int>{2, 2}, std::pair<int, int>{2, 3}, std::pair<int, int>{3, 2}}) {
        for (int n = 4; n <= 10; ++n) {
            EquationSpec spec(Ambient::Box, 1, n,
                              std::vector<int>(std::size_t(kh.first), kh.second),
                              kh.first * kh.second);
            auto H = build_hypergraph(full_grid(spec), spec);
            for (int j = 2; j <= H.K; ++j) {
                auto rep = deltaj_bound_check(H, j, n);
                CHECK(rep.holds);
            }
        }
    }
}

TEST_CASE("empty hypergraph bounds are vacuous") {
    auto spec3 = d1(3);
    auto H = build_hypergraph(full_grid(spec3), spec3);
    for (int j = 2; j <= 4; ++j) {
        auto rep = deltaj_bound_check(H, j, 3);
        CHECK(rep.delta_j == 0);
        CHECK(rep.holds);
    }
}
