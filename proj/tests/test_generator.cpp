#include <array>
#include <cmath>

#include "doctest.h"
#include "gcps/generator_matrix.hpp"

using namespace gcps;

namespace {

const ModelParams kP{1.0, 0.75, 0.25, 1.0, 0.5, 1.0};

}  // namespace

TEST_CASE("config packing round-trips") {
    Lattice lat(1, 1);
    for (std::uint64_t code = 0; code < 64; ++code)
        CHECK(pack_config(unpack_config(code, lat.site_count())) == code);
}

TEST_CASE("generator rows sum to zero") {
    Lattice lat(1, 1);
    auto b = BoundaryData::constant({0.2, 0.3, 0.1});
    for (auto parts : {GeneratorParts::Contact, GeneratorParts::Exchange,
                       GeneratorParts::Boundary, GeneratorParts::All}) {
        auto G = build_generator(lat, kP, b, parts);
        Eigen::VectorXd ones = Eigen::VectorXd::Ones(static_cast<int>(G.n_states));
        Eigen::VectorXd row_sums = G.Q * ones;
        CHECK(row_sums.lpNorm<Eigen::Infinity>() < 1e-12);
    }
}

TEST_CASE("one generator row matches hand-assembled rates") {
    Lattice lat(1, 1);
    auto b = BoundaryData::constant({0.2, 0.3, 0.1});
    auto G = build_generator(lat, kP, b);
    // configuration (x=-1: 1, x=0: 0, x=1: 2)
    Configuration cfg{1, 0, 2};
    std::uint64_t row = pack_config(cfg);
    Eigen::SparseMatrix<double, Eigen::RowMajor> Q = G.Q;

    auto entry = [&](const Configuration& to) {
        return Q.coeff(static_cast<int>(row), static_cast<int>(pack_config(to)));
    };
    const double bscale_l = std::pow(1.0, 1.5);  // N=1: all boundary scales are 1
    // middle empty site: birth at lambda1 (one wild neighbor), release at r
    CHECK(entry({1, 1, 2}) == doctest::Approx(0.75));
    CHECK(entry({1, 2, 2}) == doctest::Approx(1.0));
    // left wild site: death + reservoir pulls (rate b_i each), plus r to mixed
    CHECK(entry({0, 0, 2}) == doctest::Approx(1.0 + bscale_l * (1 - 0.2 - 0.3 - 0.1)));
    CHECK(entry({2, 0, 2}) == doctest::Approx(0.3));
    CHECK(entry({3, 0, 2}) == doctest::Approx(1.0 + 0.1));
    // swaps at rate D N^2 = 1 where states differ
    CHECK(entry({0, 1, 2}) == doctest::Approx(1.0));
    CHECK(entry({1, 2, 0}) == doctest::Approx(1.0));
    // diagonal balances the row
    double out = 0;
    for (Eigen::SparseMatrix<double, Eigen::RowMajor>::InnerIterator it(Q,
                                                                        static_cast<int>(row));
         it; ++it)
        if (it.col() != static_cast<int>(row)) out += it.value();
    CHECK(Q.coeff(static_cast<int>(row), static_cast<int>(row)) == doctest::Approx(-out));
}

TEST_CASE("exchange part conserves the state multiset") {
    Lattice lat(1, 1);
    auto b = BoundaryData::constant({0.2, 0.3, 0.1});
    auto G = build_generator(lat, kP, b, GeneratorParts::Exchange);
    Eigen::SparseMatrix<double, Eigen::RowMajor> Q = G.Q;
    auto multiset = [&](std::uint64_t code) {
        std::array<int, 4> m{0, 0, 0, 0};
        for (auto s : unpack_config(code, G.n_sites)) m[s]++;
        return m;
    };
    for (int k = 0; k < Q.outerSize(); ++k)
        for (Eigen::SparseMatrix<double, Eigen::RowMajor>::InnerIterator it(Q, k); it; ++it)
            if (it.row() != it.col() && it.value() > 0)
                CHECK(multiset(static_cast<std::uint64_t>(it.row())) ==
                      multiset(static_cast<std::uint64_t>(it.col())));
}

TEST_CASE("full chain is irreducible; exchange alone is not") {
    Lattice lat(1, 1);
    auto b = BoundaryData::constant({0.2, 0.3, 0.1});
    CHECK(is_irreducible(build_generator(lat, kP, b)));
    CHECK_FALSE(is_irreducible(build_generator(lat, kP, b, GeneratorParts::Exchange)));
}

TEST_CASE("stationary distribution solves pi Q = 0 with total mass one") {
    Lattice lat(1, 1);
    auto b = BoundaryData::constant({0.2, 0.3, 0.1});
    auto G = build_generator(lat, kP, b);
    auto pi = stationary_distribution(G);
    CHECK(pi.sum() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(pi.minCoeff() > 0.0);
    Eigen::VectorXd res = G.Q.transpose() * pi;
    CHECK(res.lpNorm<Eigen::Infinity>() < 1e-10);

    auto marg = occupation_marginals(G, pi);
    for (std::size_t x = 0; x < G.n_sites; ++x) {
        double s = 0;
        for (int i = 0; i < 4; ++i) s += marg[x][static_cast<std::size_t>(i)];
        CHECK(s == doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("stationary marginals pulled to a strong left reservoir") {
    // theta_l = 0 and a sterile-heavy left reservoir should tilt the left
    // face toward state 2 relative to a wild-heavy right reservoir
    ModelParams p{1.0, 0.75, 0.25, 1.0, 0.0, 0.0};
    Lattice lat(1, 1);
    auto b = BoundaryData::constant({0.05, 0.85, 0.05}, {0.85, 0.05, 0.05});
    auto G = build_generator(lat, p, b);
    auto marg = occupation_marginals(G, stationary_distribution(G));
    CHECK(marg[0][2] > marg[2][2]);
    CHECK(marg[2][1] > marg[0][1]);
}

TEST_CASE("state-space cap is enforced") {
    Lattice big(10, 1);
    auto b = BoundaryData::constant({0.2, 0.3, 0.1});
    CHECK_THROWS_AS(build_generator(big, kP, b), std::invalid_argument);
}
