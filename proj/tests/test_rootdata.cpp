#include <doctest.h>

#include <algorithm>
#include <set>

#include "spincm/rootdata.hpp"

using namespace spincm;

TEST_CASE("positive root enumeration for small types") {
    const RootSystem a1 = build_root_system('A', 1);
    CHECK(a1.positive_count() == 1);
    CHECK(height(a1.positive_roots[0]) == 1);

    const RootSystem a2 = build_root_system('A', 2);
    REQUIRE(a2.positive_count() == 3);
    std::multiset<int> h2;
    for (const auto& r : a2.positive_roots) h2.insert(height(r));
    CHECK(h2 == std::multiset<int>{1, 1, 2});

    const RootSystem b2 = build_root_system('B', 2);
    REQUIRE(b2.positive_count() == 4);
    std::multiset<int> hb;
    for (const auto& r : b2.positive_roots) hb.insert(height(r));
    CHECK(hb == std::multiset<int>{1, 1, 2, 3});
}

TEST_CASE("root system invariants") {
    for (auto [t, r] : {std::pair<char, int>{'A', 3}, {'B', 3}, {'C', 3}, {'D', 4}, {'G', 2},
                        {'F', 4}, {'E', 6}}) {
        const RootSystem rs = build_root_system(t, r);
        CHECK(rs.root_count() == 2 * rs.positive_count());
        for (const auto& root : rs.positive_roots) {
            CHECK(std::all_of(root.begin(), root.end(), [](int c) { return c >= 0; }));
            CHECK(rs.is_root(negate(root)));
        }
    }
}

TEST_CASE("exponents, height counts and the Coxeter number") {
    const ExponentData a2 = exponent_data(build_root_system('A', 2));
    CHECK(a2.exponents == std::vector<int>{1, 2});
    CHECK(a2.coxeter_number == 3);
    CHECK(a2.b == std::vector<int>{2, 1});

    const ExponentData b2 = exponent_data(build_root_system('B', 2));
    CHECK(b2.exponents == std::vector<int>{1, 3});
    CHECK(b2.coxeter_number == 4);
    CHECK(b2.b == std::vector<int>{2, 1, 1});

    const ExponentData g2 = exponent_data(build_root_system('G', 2));
    CHECK(g2.exponents == std::vector<int>{1, 5});
    CHECK(g2.coxeter_number == 6);

    const ExponentData d4 = exponent_data(build_root_system('D', 4));
    CHECK(d4.exponents == std::vector<int>{1, 3, 3, 5});
}

TEST_CASE("exponent sum matches the root count and dimension formula") {
    for (auto [t, r] : {std::pair<char, int>{'A', 1}, {'A', 2}, {'A', 4}, {'B', 2}, {'B', 3},
                        {'C', 2}, {'C', 3}, {'D', 4}, {'G', 2}}) {
        const RootSystem rs = build_root_system(t, r);
        const auto rep = verify_shephard_todd(exponent_data(rs), rs);
        CHECK(rep.ok);
    }
    const RootSystem a2 = build_root_system('A', 2);
    const auto rep = verify_shephard_todd(exponent_data(a2), a2);
    CHECK(rep.exponent_sum == 3);
    CHECK(rep.positive_count == 3);
    CHECK(rep.half_codim == 3);  // dim sl(3) = 8, (8-2)/2
}

TEST_CASE("height partition is conjugate to the exponent partition") {
    for (auto [t, r] : {std::pair<char, int>{'A', 4}, {'B', 3}, {'C', 3}, {'D', 4}, {'G', 2}}) {
        const ExponentData ed = exponent_data(build_root_system(t, r));
        std::vector<int> conj;
        for (int j = 1; j <= ed.b[0]; ++j) {
            int cnt = 0;
            for (int bj : ed.b)
                if (bj >= j) ++cnt;
            conj.push_back(cnt);
        }
        const std::vector<int> desc(ed.exponents.rbegin(), ed.exponents.rend());
        CHECK(conj == desc);
        CHECK(ed.b.front() == r);
        CHECK(ed.b.back() == 1);
        CHECK(std::is_sorted(ed.b.rbegin(), ed.b.rend()));
    }
}

TEST_CASE("root span") {
    const RootSystem a2 = build_root_system('A', 2);
    const auto span0 = root_span(a2, {0});
    REQUIRE(span0.size() == 2);
    CHECK(span0[0] == RootVec{1, 0});
    CHECK(span0[1] == RootVec{-1, 0});
    CHECK(root_span(a2, {0, 1}).size() == 6);

    const RootSystem b2 = build_root_system('B', 2);
    CHECK(root_span(b2, {1}).size() == 2);  // only +-alpha_2 is supported there

    CHECK_THROWS_AS(root_span(a2, {5}), std::invalid_argument);
}

TEST_CASE("closed subset validation") {
    const RootSystem a2 = build_root_system('A', 2);
    std::vector<RootVec> all;
    for (const auto& r : a2.positive_roots) {
        all.push_back(r);
        all.push_back(negate(r));
    }
    CHECK(validate_closed_subset(a2, all));
    CHECK(validate_closed_subset(a2, {{1, 0}, {-1, 0}}));
    CHECK_FALSE(validate_closed_subset(a2, {{1, 0}, {0, 1}, {1, 1}}));  // not negation-closed
    CHECK_FALSE(validate_closed_subset(a2, {{1, 0}, {-1, 0}, {0, 1}, {0, -1}}));  // sum escapes

    // every root span is closed
    for (auto [t, r] : {std::pair<char, int>{'A', 3}, {'B', 3}, {'D', 4}}) {
        const RootSystem rs = build_root_system(t, r);
        for (int i = 0; i < r; ++i) CHECK(validate_closed_subset(rs, root_span(rs, {i})));
        CHECK(validate_closed_subset(rs, root_span(rs, {0, 1})));
    }
}

TEST_CASE("invalid type and rank combinations are rejected") {
    CHECK_THROWS_AS(build_root_system('B', 1), std::invalid_argument);
    CHECK_THROWS_AS(build_root_system('C', 1), std::invalid_argument);
    CHECK_THROWS_AS(build_root_system('D', 3), std::invalid_argument);
    CHECK_THROWS_AS(build_root_system('G', 3), std::invalid_argument);
    CHECK_THROWS_AS(build_root_system('E', 9), std::invalid_argument);
    CHECK_THROWS_AS(build_root_system('X', 2), std::invalid_argument);
    CHECK_THROWS_AS(build_root_system('A', 0), std::invalid_argument);
}
