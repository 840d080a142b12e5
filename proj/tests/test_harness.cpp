#include <cstdio>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "gcps/harness.hpp"

using namespace gcps;

namespace {

std::string slurp(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    std::stringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

}  // namespace

TEST_CASE("seed derivation is deterministic and spreads") {
    CHECK(derive_seed(1, 2, 3) == derive_seed(1, 2, 3));
    CHECK(derive_seed(1, 2, 3) != derive_seed(1, 2, 4));
    CHECK(derive_seed(1, 2, 3) != derive_seed(1, 3, 2));
    CHECK(derive_seed(2, 2, 3) != derive_seed(1, 2, 3));
}

TEST_CASE("catalog has eight bounded immutable entries") {
    const auto& cat = test_catalog();
    REQUIRE(cat.size() == 8);
    for (const auto& tf : cat) {
        CHECK_FALSE(tf.name.empty());
        for (double x : {-1.0, -0.99, 0.0, 0.5, 1.0}) {
            std::array<double, 1> u{x};
            auto g = tf.g(u);
            for (double v : g) {
                CHECK(std::isfinite(v));
                CHECK(std::abs(v) <= 1.5);
            }
        }
    }
    CHECK(&test_catalog() == &cat);
}

TEST_CASE("empirical pairing with ones is the occupied fraction") {
    Lattice lat(6, 1);
    Rng rng(9);
    Configuration cfg(lat.site_count());
    for (auto& s : cfg) s = static_cast<std::uint8_t>(rng.raw() % 4);
    std::size_t occupied = 0;
    for (auto s : cfg) occupied += (s != 0);
    double v = config_pairing(lat, cfg, test_catalog()[0]);
    CHECK(v == doctest::Approx(static_cast<double>(occupied) / 6.0));
}

TEST_CASE("pairing linearity under constant shifts on both sides") {
    Lattice lat(5, 1);
    Rng rng(10);
    Configuration cfg(lat.site_count());
    for (auto& s : cfg) s = static_cast<std::uint8_t>(rng.raw() % 4);
    Grid g;
    g.m1 = 41;
    Profile rho(g, Density{0.2, 0.3, 0.25});

    const double c = 0.37;
    const auto& base = test_catalog()[6];  // bump
    TestFunction shifted{"bump+c", [&, c](std::span<const double> u) {
                             auto v = base.g(u);
                             for (auto& w : v) w += c;
                             return v;
                         }};
    // microscopic: mass is the occupied fraction
    double micro_mass = config_pairing(lat, cfg, test_catalog()[0]);
    CHECK(config_pairing(lat, cfg, shifted) ==
          doctest::Approx(config_pairing(lat, cfg, base) + c * micro_mass).epsilon(1e-12));
    // macroscopic: mass is the integral of rho1+rho2+rho3
    double macro_mass = profile_pairing(rho, test_catalog()[0]);
    CHECK(profile_pairing(rho, shifted) ==
          doctest::Approx(profile_pairing(rho, base) + c * macro_mass).epsilon(1e-12));
}

TEST_CASE("profile pairing integrates constants exactly") {
    Grid g;
    g.m1 = 21;
    Profile rho(g, Density{0.2, 0.3, 0.1});
    // domain volume 2, so <rho, (1,1,1)> = 2 * 0.6
    CHECK(profile_pairing(rho, test_catalog()[0]) == doctest::Approx(1.2));
    // <rho, (1,0,0)> = 2 * rho1
    CHECK(profile_pairing(rho, test_catalog()[1]) == doctest::Approx(0.4));
    // odd coordinate integrates to zero against a constant profile
    CHECK(profile_pairing(rho, test_catalog()[4]) == doctest::Approx(0.0));
}

TEST_CASE("profile interpolation is linear along the axis") {
    Grid g;
    g.m1 = 3;  // nodes at -1, 0, 1
    Profile rho(g, Density{0, 0, 0});
    rho.values[0] = {0.0, 0.2, 0.4};
    rho.values[1] = {0.5, 0.2, 0.0};
    rho.values[2] = {1.0, 0.2, 0.4};
    auto mid = profile_at(rho, -0.5);
    CHECK(mid[0] == doctest::Approx(0.25));
    CHECK(mid[1] == doctest::Approx(0.2));
    CHECK(mid[2] == doctest::Approx(0.2));
    CHECK(profile_at(rho, 1.0)[0] == doctest::Approx(1.0));
    CHECK_THROWS_AS(profile_at(rho, 1.5), std::invalid_argument);
}

TEST_CASE("trend detector needs gaps beyond twice the combined error") {
    std::vector<TrendEntry> good{{10, 1.0, 0.05}, {20, 0.5, 0.05}, {40, 0.3, 0.02}};
    CHECK(decreasing_beyond_noise(good));
    std::vector<TrendEntry> noisy{{10, 1.0, 0.3}, {20, 0.5, 0.3}};
    CHECK_FALSE(decreasing_beyond_noise(noisy));
    std::vector<TrendEntry> rising{{10, 0.5, 0.01}, {20, 1.0, 0.01}};
    CHECK_FALSE(decreasing_beyond_noise(rising));
}

TEST_CASE("marginal gap vanishes when the sides agree") {
    Lattice lat(2, 1);
    Grid g;
    g.m1 = 41;
    Profile rho(g, Density{0.2, 0.3, 0.1});
    std::vector<std::array<double, 4>> marg(lat.site_count(), {0.4, 0.2, 0.3, 0.1});
    CHECK(marginal_l1_gap(lat, marg, rho) < 1e-12);
    marg[2][1] += 0.05;
    CHECK(marginal_l1_gap(lat, marg, rho) == doctest::Approx(2.0 * 0.05 / 5.0));
}

TEST_CASE("csv bodies are byte-identical across writes") {
    std::string p1 = "/tmp/gcps_test_a.csv";
    std::string p2 = "/tmp/gcps_test_b.csv";
    std::vector<std::vector<double>> rows{{1.0 / 3.0, 2e-17, -0.0}, {5.5, 1e300, 3.14}};
    write_csv(p1, {"a", "b", "c"}, rows);
    write_csv(p2, {"a", "b", "c"}, rows);
    auto s1 = slurp(p1);
    CHECK_FALSE(s1.empty());
    CHECK(s1 == slurp(p2));
    std::remove(p1.c_str());
    std::remove(p2.c_str());
}

TEST_CASE("profile and empirical csv share the layout") {
    Grid g;
    g.m1 = 5;
    Profile rho(g, Density{0.1, 0.2, 0.3});
    std::string pp = "/tmp/gcps_test_profile.csv";
    write_profile_csv(pp, rho);
    std::ifstream is(pp);
    std::string header;
    std::getline(is, header);
    CHECK(header == "x1,rho1,rho2,rho3");
    std::size_t lines = 0;
    std::string line;
    while (std::getline(is, line)) ++lines;
    CHECK(lines == rho.values.size());
    std::remove(pp.c_str());

    Lattice lat(2, 1);
    Configuration cfg(lat.site_count(), 2);
    std::string ep = "/tmp/gcps_test_empirical.csv";
    write_empirical_csv(ep, lat, cfg, 1);
    std::ifstream is2(ep);
    std::getline(is2, header);
    CHECK(header == "x1,rho1,rho2,rho3");
    std::getline(is2, line);
    // all-sterile configuration: rho2 column is 1
    CHECK(line == "-1,0,1,0");
    std::remove(ep.c_str());
}

TEST_CASE("hydro check at the fixed point sits inside Monte Carlo noise") {
    HydroConfig cfg;
    cfg.params = ModelParams{1.0, 0.75, 0.25, 1.0, 0.5, 1.0};
    auto ext = extinction_state(cfg.params);
    cfg.b_left = cfg.b_right = ext;
    cfg.gamma = [ext](std::span<const double>) { return ext; };
    cfg.sizes = {8, 16};
    cfg.replicas = 6;
    cfg.t = 0.5;
    cfg.grid_m1 = 41;
    cfg.seed = 4;
    auto rep = hydrodynamic_check(cfg);
    REQUIRE(rep.errors.size() == 2);
    for (const auto& e : rep.errors) CHECK(e.mean < 0.35);
    CHECK(rep.regime.left == BoundaryCondition::Dirichlet);
    CHECK(rep.regime.right == BoundaryCondition::Robin);
}

TEST_CASE("hydro check rejects bad configs") {
    HydroConfig cfg;
    cfg.gamma = [](std::span<const double>) { return Density{0.2, 0.2, 0.2}; };
    cfg.sizes = {20, 10};
    CHECK_THROWS_AS(hydrodynamic_check(cfg), std::invalid_argument);
    cfg.sizes = {10, 20};
    cfg.gamma = {};
    CHECK_THROWS_AS(hydrodynamic_check(cfg), std::invalid_argument);
}

TEST_CASE("hydrostatic check refuses parameters violating H1") {
    HydrostaticConfig cfg;
    cfg.params = ModelParams{1.0, 1.0, 0.75, 1.0, 0.5, 1.0};  // H1 fails
    CHECK_THROWS_AS(hydrostatic_check(cfg), std::invalid_argument);
}
