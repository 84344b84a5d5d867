#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>
#include <set>

#include "seqkern/seq_core.hpp"
#include "test_util.hpp"

using namespace seqkern;

TEST_CASE("increments") {
    const auto inc = increments(Sequence::scalar({0, 1, 3}));
    REQUIRE(inc.rows() == 2);
    CHECK(inc(0, 0) == 1.0);
    CHECK(inc(1, 0) == 2.0);

    const auto flat = increments(Sequence::scalar({4, 4, 4}));
    CHECK(flat.isZero(0.0));

    const auto two_d = increments(Sequence{{0, 0}, {1, 2}});
    REQUIRE(two_d.rows() == 1);
    CHECK(two_d(0, 0) == 1.0);
    CHECK(two_d(0, 1) == 2.0);

    // Length 1 is valid and has no increments.
    CHECK(increments(Sequence::scalar({7})).rows() == 0);
}

TEST_CASE("variation and mesh") {
    CHECK(variation(Sequence::scalar({0, 1, 3})) == 3.0);
    CHECK(variation(Sequence::scalar({0, 1, 0})) == 2.0);
    CHECK(variation(Sequence::scalar({2, 2, 2})) == 0.0);
    CHECK(variation(Sequence::scalar({2})) == 0.0);

    CHECK(mesh(Sequence::scalar({0, 1, 3})) == 2.0);
    CHECK(mesh(Sequence::scalar({0, 0.5, 1})) == 0.5);
    CHECK(mesh(Sequence{{0, 0}, {3, 4}}) == 5.0);
    CHECK_THROWS_WITH_AS(mesh(Sequence::scalar({1})), "no increments", Error);
}

TEST_CASE("variation bounds mesh and ignores reversal") {
    std::mt19937_64 rng(11);
    for (int c = 0; c < 50; ++c) {
        const auto s = testing::random_sequence(rng, testing::pick(rng, 2, 12), testing::pick(rng, 1, 3));
        CHECK(variation(s) >= mesh(s));
        CHECK(mesh(s) >= 0.0);
        CHECK(variation(s.reversed()) == doctest::Approx(variation(s)).epsilon(1e-14));
    }
}

TEST_CASE("cumulative sum inverts increments") {
    std::mt19937_64 rng(5);
    for (int c = 0; c < 20; ++c) {
        const auto steps = testing::random_matrix(rng, static_cast<Eigen::Index>(testing::pick(rng, 0, 8)), 2);
        const Sequence s = cumulative_sum(RowMatrix(steps), Eigen::RowVector2d(0.0, 0.0));
        // Integer-valued steps make the round trip exact.
        const RowMatrix rounded = steps.array().round().matrix();
        const Sequence r = cumulative_sum(rounded, Eigen::RowVector2d(0.0, 0.0));
        CHECK(increments(r) == rounded);
        CHECK(s.length() == static_cast<std::size_t>(steps.rows()) + 1);
    }
}

TEST_CASE("sequence invariants") {
    CHECK_THROWS_AS(Sequence::from_rows({}), Error);
    CHECK_THROWS_AS(Sequence::from_rows({{1, 2}, {3}}), Error);
    CHECK_THROWS_AS(Sequence(RowMatrix::Zero(2, 1), std::vector<double>{0.5, 0.5}), Error);
    CHECK_THROWS_AS(Sequence(RowMatrix::Zero(2, 1), std::vector<double>{0.5, 1.5}), Error);
    CHECK_NOTHROW(Sequence(RowMatrix::Zero(2, 1), std::vector<double>{0.0, 1.0}));

    const Sequence a = Sequence::scalar({0, 1});
    const Sequence b = Sequence::scalar({1, 3});
    const Sequence joined = concat(a, b);
    CHECK(joined.length() == 3);
    CHECK(joined.point(2)(0) == 3.0);
    CHECK_THROWS_AS(concat(a, Sequence::scalar({2, 3})), Error);
}

TEST_CASE("strict subtuples") {
    const auto t = enumerate_strict_subtuples(2, 2);
    REQUIRE(t.size() == 4);
    CHECK(t[0].indices.empty());
    CHECK(t[1].indices == std::vector<std::size_t>{0});
    CHECK(t[2].indices == std::vector<std::size_t>{1});
    CHECK(t[3].indices == std::vector<std::size_t>{0, 1});

    CHECK(enumerate_strict_subtuples(3, 1).size() == 4);
    CHECK(enumerate_strict_subtuples(4, 4).size() == 16);
    CHECK(enumerate_strict_subtuples(0, 3).size() == 1);

    for (std::size_t L = 0; L <= 7; ++L) {
        const auto all = enumerate_strict_subtuples(L, L);
        CHECK(all.size() == (std::size_t{1} << L));
        std::set<std::vector<std::size_t>> unique;
        for (const auto& x : all) {
            CHECK(x.is_strict());
            CHECK(x.multiplicity_factorial() == 1.0);
            unique.insert(x.indices);
        }
        CHECK(unique.size() == all.size());
    }
}

TEST_CASE("monotone subtuples") {
    using V = std::vector<std::size_t>;
    auto as_set = [](const std::vector<IndexTuple>& ts) {
        std::set<V> s;
        for (const auto& t : ts) s.insert(t.indices);
        return s;
    };
    CHECK(as_set(enumerate_monotone_subtuples(1, 2, 2)) == std::set<V>{{}, {0}, {0, 0}});
    CHECK(as_set(enumerate_monotone_subtuples(2, 2, 1)) == std::set<V>{{}, {0}, {1}, {0, 1}});
    const auto d2 = enumerate_monotone_subtuples(2, 2, 2);
    CHECK(d2.size() == 6);
    CHECK(as_set(d2) == std::set<V>{{}, {0}, {1}, {0, 0}, {0, 1}, {1, 1}});

    for (const auto& t : enumerate_monotone_subtuples(4, 5, 2)) {
        CHECK(t.is_monotone());
        CHECK(t.max_repeat() <= 2);
    }
}

TEST_CASE("multiplicity factorial") {
    CHECK(IndexTuple{{0, 0, 1}}.multiplicity_factorial() == 2.0);
    CHECK(IndexTuple{{2, 2, 2}}.multiplicity_factorial() == 6.0);
    CHECK(IndexTuple{{0, 1, 2}}.multiplicity_factorial() == 1.0);
    CHECK(IndexTuple{{}}.multiplicity_factorial() == 1.0);
}
