#include <algorithm>
#include <set>

#include "doctest.h"
#include "gcps/lattice.hpp"

using namespace gcps;

TEST_CASE("site enumeration round-trips") {
    for (int d : {1, 2, 3}) {
        for (int N : {1, 2, 4}) {
            Lattice lat(N, d);
            std::size_t expected = static_cast<std::size_t>(2 * N + 1);
            for (int k = 1; k < d; ++k) expected *= static_cast<std::size_t>(N);
            CHECK(lat.site_count() == expected);
            for (std::size_t i = 0; i < lat.site_count(); ++i)
                CHECK(lat.index_of(lat.coords_of(i)) == i);
        }
    }
}

TEST_CASE("invalid construction and coordinates rejected") {
    CHECK_THROWS_AS(Lattice(0, 1), std::invalid_argument);
    CHECK_THROWS_AS(Lattice(2, 0), std::invalid_argument);
    Lattice lat(2, 2);
    CHECK_THROWS_AS(lat.index_of({3, 0}), std::out_of_range);
    CHECK_THROWS_AS(lat.index_of({0, 2}), std::out_of_range);
    CHECK_THROWS_AS(lat.index_of({0}), std::invalid_argument);
    CHECK_THROWS_AS(lat.coords_of(lat.site_count()), std::out_of_range);
}

TEST_CASE("faces and embedding") {
    Lattice lat(4, 1);
    CHECK(lat.face_of(lat.index_of({-4})) == -1);
    CHECK(lat.face_of(lat.index_of({4})) == +1);
    CHECK(lat.face_of(lat.index_of({0})) == 0);
    CHECK(lat.embed(lat.index_of({-4}))[0] == doctest::Approx(-1.0));
    CHECK(lat.embed(lat.index_of({2}))[0] == doctest::Approx(0.5));

    Lattice lat2(4, 2);
    auto u = lat2.embed(lat2.index_of({1, 3}));
    CHECK(u[0] == doctest::Approx(0.25));
    CHECK(u[1] == doctest::Approx(0.75));
}

TEST_CASE("neighbor structure, open axis and torus wrap") {
    Lattice lat(3, 1);
    CHECK(lat.neighbors(lat.index_of({-3})).size() == 1);
    CHECK(lat.neighbors(lat.index_of({0})).size() == 2);
    CHECK(lat.neighbors(lat.index_of({3})).size() == 1);

    Lattice lat2(4, 2);
    auto nb = lat2.neighbors(lat2.index_of({0, 0}));
    CHECK(nb.size() == 4);
    std::set<std::size_t> got(nb.begin(), nb.end());
    std::set<std::size_t> want{lat2.index_of({-1, 0}), lat2.index_of({1, 0}),
                               lat2.index_of({0, 1}), lat2.index_of({0, 3})};
    CHECK(got == want);
    // face site loses one axis neighbor
    CHECK(lat2.neighbors(lat2.index_of({4, 2})).size() == 3);
}

TEST_CASE("exchange pairs cover each adjacency once per generator term") {
    Lattice lat(3, 1);
    CHECK(lat.exchange_pairs().size() == 6);  // 2N axis bonds
    for (auto [a, b] : lat.exchange_pairs()) {
        auto ca = lat.coords_of(a);
        auto cb = lat.coords_of(b);
        CHECK(cb[0] - ca[0] == 1);
    }

    Lattice lat2(4, 2);
    // axis: 8 per torus column * 4 columns; torus: one +e2 bond per site
    CHECK(lat2.exchange_pairs().size() == 8 * 4 + lat2.site_count());
    for (std::size_t x = 0; x < lat2.site_count(); ++x)
        for (auto pid : lat2.pairs_of_site(x)) {
            auto [a, b] = lat2.exchange_pairs()[pid];
            CHECK((a == x || b == x));
        }
}

TEST_CASE("size-2 torus keeps both directed bonds") {
    Lattice lat(2, 2);
    // each site has one +e2 pair even though the two wrap bonds join the
    // same unordered pair of sites
    std::size_t torus_pairs = 0;
    for (auto [a, b] : lat.exchange_pairs()) {
        auto ca = lat.coords_of(a);
        auto cb = lat.coords_of(b);
        if (ca[0] == cb[0]) ++torus_pairs;
    }
    CHECK(torus_pairs == lat.site_count());
}

TEST_CASE("boxes truncate at the open ends and wrap on the torus") {
    Lattice lat(4, 1);
    CHECK(lat.box(lat.index_of({0}), 1).size() == 3);
    CHECK(lat.box(lat.index_of({-4}), 2).size() == 3);  // truncated left
    CHECK(lat.box(lat.index_of({4}), 1).size() == 2);
    CHECK(lat.box(lat.index_of({0}), 10).size() == lat.site_count());

    Lattice lat2(4, 2);
    auto b = lat2.box(lat2.index_of({0, 0}), 1);
    CHECK(b.size() == 3 * 3);
    std::set<std::size_t> s(b.begin(), b.end());
    CHECK(s.size() == b.size());
    CHECK(s.count(lat2.index_of({1, 3})) == 1);  // wrapped torus neighbor
    // radius large enough to cover the whole torus circle
    CHECK(lat2.box(lat2.index_of({0, 0}), 2).size() == 5 * 4);
}

TEST_CASE("state encoding") {
    CHECK(encode_state(0, 0) == 0);
    CHECK(encode_state(1, 0) == 1);
    CHECK(encode_state(0, 1) == 2);
    CHECK(encode_state(1, 1) == 3);
    for (std::uint8_t s = 0; s < 4; ++s) {
        auto [xi, omega] = decode_state(s);
        CHECK(encode_state(xi, omega) == s);
        for (int i = 0; i < 4; ++i) CHECK(indicator(s, i) == (s == i ? 1 : 0));
    }
    CHECK_THROWS_AS(encode_state(2, 0), std::invalid_argument);
    CHECK_THROWS_AS(decode_state(4), std::invalid_argument);
}
