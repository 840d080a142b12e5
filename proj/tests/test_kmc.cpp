#include <cmath>
#include <vector>

#include "doctest.h"
#include "gcps/kmc.hpp"

using namespace gcps;

namespace {

const ModelParams kP{1.0, 0.75, 0.25, 1.0, 0.5, 1.0};

Configuration random_config(const Lattice& lat, std::uint64_t seed) {
    Rng rng(seed);
    Configuration cfg(lat.site_count());
    for (auto& s : cfg) s = static_cast<std::uint8_t>(rng.raw() % 4);
    return cfg;
}

}  // namespace

TEST_CASE("rng stream is deterministic and uniform draws live in [0,1)") {
    Rng a(42), b(42);
    for (int i = 0; i < 1000; ++i) {
        double u = a.uniform();
        CHECK(u == b.uniform());
        CHECK(u >= 0.0);
        CHECK(u < 1.0);
    }
    Rng c(43);
    CHECK(Rng(42).uniform() != c.uniform());
}

TEST_CASE("contact rates by hand on a 3-site chain") {
    Lattice lat(1, 1);
    const ModelParams p{1.0, 0.75, 0.25, 2.0, 0.0, 0.0};
    // sites: x=-1 state 1, x=0 state 0, x=1 state 3
    Configuration cfg{1, 0, 3};

    auto r0 = contact_rates(cfg, lat, 1, p);  // empty site, neighbors 1 and 3
    CHECK(r0[1] == doctest::Approx(0.75 * 1 + 0.25 * 1));
    CHECK(r0[2] == doctest::Approx(2.0));
    CHECK(r0[0] == 0.0);
    CHECK(r0[3] == 0.0);

    auto r1 = contact_rates(cfg, lat, 0, p);  // wild site
    CHECK(r1[0] == doctest::Approx(1.0));
    CHECK(r1[3] == doctest::Approx(2.0));
    CHECK(r1[1] == 0.0);
    CHECK(r1[2] == 0.0);

    auto r3 = contact_rates(cfg, lat, 2, p);  // mixed site
    CHECK(r3[1] == doctest::Approx(1.0));
    CHECK(r3[2] == doctest::Approx(1.0));
    CHECK(r3[0] == 0.0);

    Configuration sterile{2, 2, 1};
    auto r2 = contact_rates(sterile, lat, 1, p);  // sterile with neighbors 2,1
    CHECK(r2[3] == doctest::Approx(0.75));
    CHECK(r2[0] == doctest::Approx(1.0));
}

TEST_CASE("boundary rates scale by N^(2-theta) and drop null flips") {
    Lattice lat(2, 1);
    ModelParams p{1.0, 0.75, 0.25, 1.0, 0.5, 2.0};
    auto b = BoundaryData::constant({0.2, 0.3, 0.1}, {0.1, 0.4, 0.1});
    Configuration cfg(lat.site_count(), 0);

    std::size_t left = lat.index_of({-2});
    auto rl = boundary_rates(cfg, lat, left, p, b, 2);
    double scale_l = std::pow(2.0, 1.5);  // N^{2-0.5}
    CHECK(rl[0] == 0.0);  // flip to the current state is a null event
    CHECK(rl[1] == doctest::Approx(scale_l * 0.2));
    CHECK(rl[2] == doctest::Approx(scale_l * 0.3));
    CHECK(rl[3] == doctest::Approx(scale_l * 0.1));

    std::size_t right = lat.index_of({2});
    cfg[right] = 2;
    auto rr = boundary_rates(cfg, lat, right, p, b, 2);
    CHECK(rr[0] == doctest::Approx(1.0 * 0.4));  // N^{2-2}=1, b0 = 0.4
    CHECK(rr[2] == 0.0);

    CHECK_THROWS_AS(boundary_rates(cfg, lat, lat.index_of({0}), p, b, 2),
                    std::invalid_argument);
}

TEST_CASE("exchange rate is D N^2 per directed pair term") {
    ModelParams p;
    p.D = 2.5;
    CHECK(exchange_rate(4, p) == doctest::Approx(2.5 * 16));
    CHECK(exchange_rate(4, p, 0.5) == doctest::Approx(2.5 * 8));
}

TEST_CASE("fenwick tree against a linear-scan oracle") {
    Rng rng(7);
    FenwickTree t(37);
    std::vector<double> ref(37, 0.0);
    for (int round = 0; round < 500; ++round) {
        std::size_t i = rng.raw() % 37;
        double v = rng.uniform() * 3.0;
        t.set(i, v);
        ref[i] = v;
        double total = 0;
        for (double x : ref) total += x;
        REQUIRE(t.total() == doctest::Approx(total).epsilon(1e-12));

        double target = rng.uniform() * total;
        std::size_t got = t.sample(target);
        std::size_t want = 0;
        double acc = 0;
        for (; want + 1 < ref.size(); ++want) {
            if (target < acc + ref[want]) break;
            acc += ref[want];
        }
        // skip zero-rate leaves the scan may land on
        while (want + 1 < ref.size() && ref[want] == 0.0) ++want;
        REQUIRE(got == want);
    }
}

TEST_CASE("engine rate table stays consistent with a fresh rebuild") {
    Lattice lat(3, 1);
    auto b = BoundaryData::constant({0.2, 0.3, 0.1});
    KmcEngine engine(lat, kP, b, random_config(lat, 99));
    Rng rng(5);
    for (int i = 0; i < 2000; ++i) engine.step(rng);

    std::size_t n_leaves = lat.site_count() + lat.exchange_pairs().size();
    std::vector<double> before(n_leaves);
    for (std::size_t i = 0; i < n_leaves; ++i) before[i] = engine.leaf_rate(i);
    engine.rebuild_all_rates();
    for (std::size_t i = 0; i < n_leaves; ++i)
        REQUIRE(engine.leaf_rate(i) == doctest::Approx(before[i]).epsilon(1e-12));
}

TEST_CASE("same seed replays the identical event log") {
    Lattice lat(2, 1);
    auto b = BoundaryData::constant({0.2, 0.3, 0.1});
    auto init = random_config(lat, 4);
    KmcEngine e1(lat, kP, b, init);
    KmcEngine e2(lat, kP, b, init);
    Rng r1(123), r2(123);
    auto t1 = e1.run(0.5, r1, {}, {}, true);
    auto t2 = e2.run(0.5, r2, {}, {}, true);
    REQUIRE(t1.events.size() == t2.events.size());
    CHECK(t1.events.size() > 0);
    for (std::size_t i = 0; i < t1.events.size(); ++i) {
        CHECK(t1.events[i].time == t2.events[i].time);
        CHECK(t1.events[i].kind == t2.events[i].kind);
        CHECK(t1.events[i].site_a == t2.events[i].site_a);
        CHECK(t1.events[i].site_b == t2.events[i].site_b);
        CHECK(t1.events[i].to_state == t2.events[i].to_state);
    }
    CHECK(e1.config() == e2.config());
}

TEST_CASE("swaps conserve state counts, flips change one site") {
    Lattice lat(2, 1);
    auto b = BoundaryData::constant({0.2, 0.3, 0.1});
    KmcEngine engine(lat, kP, b, random_config(lat, 8));
    Rng rng(9);
    Configuration prev = engine.config();
    for (int i = 0; i < 500; ++i) {
        auto ev = engine.step(rng);
        const auto& cur = engine.config();
        if (ev.kind == EventKind::Swap) {
            CHECK(cur[ev.site_a] == prev[ev.site_b]);
            CHECK(cur[ev.site_b] == prev[ev.site_a]);
        } else {
            CHECK(cur[ev.site_a] == ev.to_state);
        }
        std::size_t diffs = 0;
        for (std::size_t x = 0; x < cur.size(); ++x) diffs += (cur[x] != prev[x]);
        CHECK(diffs <= 2);
        prev = cur;
    }
}

TEST_CASE("event times are strictly increasing and exponential waits positive") {
    Lattice lat(2, 1);
    auto b = BoundaryData::constant({0.2, 0.3, 0.1});
    KmcEngine engine(lat, kP, b, Configuration(lat.site_count(), 1));
    Rng rng(17);
    double last = 0;
    for (int i = 0; i < 200; ++i) {
        auto ev = engine.step(rng);
        CHECK(ev.time > last);
        last = ev.time;
    }
}

TEST_CASE("snapshots use the configuration in force at the snapshot time") {
    Lattice lat(1, 1);
    auto b = BoundaryData::constant({0.2, 0.3, 0.1});
    KmcEngine engine(lat, kP, b, Configuration(lat.site_count(), 0));
    Rng rng(21);
    std::vector<double> times{0.05, 0.1, 0.15, 0.2};
    std::vector<Configuration> snaps;
    auto traj = engine.run(0.2, rng, times,
                           [&](double, const Configuration& c) { snaps.push_back(c); }, true);
    REQUIRE(snaps.size() == times.size());
    // replay the event log to the same times
    Configuration replay = traj.initial;
    std::size_t ei = 0;
    for (std::size_t si = 0; si < times.size(); ++si) {
        while (ei < traj.events.size() && traj.events[ei].time < times[si]) {
            const auto& ev = traj.events[ei];
            if (ev.kind == EventKind::Flip)
                replay[ev.site_a] = ev.to_state;
            else
                std::swap(replay[ev.site_a], replay[ev.site_b]);
            ++ei;
        }
        CHECK(replay == snaps[si]);
    }
}

TEST_CASE("occupation fractions are a probability vector per site") {
    Lattice lat(2, 1);
    auto b = BoundaryData::constant({0.2, 0.3, 0.1});
    KmcEngine engine(lat, kP, b, Configuration(lat.site_count(), 2));
    Rng rng(3);
    engine.run_events(5000, rng);
    CHECK(engine.occupation_window() > 0);
    for (std::size_t x = 0; x < lat.site_count(); ++x) {
        double sum = 0;
        for (int i = 0; i < 4; ++i) {
            double o = engine.occupation(x, i);
            CHECK(o >= 0.0);
            sum += o;
        }
        CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("profile sampling hits the requested site marginals") {
    Lattice lat(50, 1);
    Rng rng(31);
    std::array<double, 4> counts{0, 0, 0, 0};
    const int reps = 2000;
    for (int i = 0; i < reps; ++i) {
        auto cfg = sample_from_profile(
            lat, [](std::span<const double>) { return std::array<double, 3>{0.1, 0.6, 0.1}; },
            rng);
        for (auto s : cfg) counts[s] += 1.0;
    }
    double total = static_cast<double>(reps) * static_cast<double>(lat.site_count());
    CHECK(counts[1] / total == doctest::Approx(0.1).epsilon(0.05));
    CHECK(counts[2] / total == doctest::Approx(0.6).epsilon(0.05));
    CHECK(counts[3] / total == doctest::Approx(0.1).epsilon(0.05));
}
