#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "gcps/generator_matrix.hpp"
#include "gcps/kmc.hpp"
#include "gcps/lattice.hpp"
#include "gcps/measures.hpp"
#include "gcps/params.hpp"
#include "gcps/pde.hpp"
#include "gcps/spectral.hpp"

namespace gcps {

/// Deterministic per-replica seed derivation (splitmix64 over the base seed
/// and the replica coordinates), independent of scheduling order.
inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t a, std::uint64_t b) {
    std::uint64_t z = base + 0x9e3779b97f4a7c15ull * (a + 1) + 0xbf58476d1ce4e5b9ull * (b + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

/// Catalog entry: a named triple (G1,G2,G3) of bounded closed-form functions
/// on the closed cylinder.
struct TestFunction {
    std::string name;
    std::function<std::array<double, 3>(std::span<const double>)> g;
};

inline const std::vector<TestFunction>& test_catalog() {
    static const std::vector<TestFunction> catalog = [] {
        std::vector<TestFunction> c;
        auto scalar = [](std::string name, std::function<double(double)> f) {
            return TestFunction{std::move(name),
                                [f = std::move(f)](std::span<const double> u) {
                                    double v = f(u[0]);
                                    return std::array<double, 3>{v, v, v};
                                }};
        };
        c.push_back({"ones", [](std::span<const double>) {
                         return std::array<double, 3>{1, 1, 1};
                     }});
        c.push_back({"e1", [](std::span<const double>) {
                         return std::array<double, 3>{1, 0, 0};
                     }});
        c.push_back({"e2", [](std::span<const double>) {
                         return std::array<double, 3>{0, 1, 0};
                     }});
        c.push_back({"e3", [](std::span<const double>) {
                         return std::array<double, 3>{0, 0, 1};
                     }});
        c.push_back(scalar("axis", [](double x) { return x; }));
        c.push_back(scalar("axis-sq", [](double x) { return x * x; }));
        c.push_back(scalar("bump", [](double x) {
            if (std::abs(x) >= 1.0) return 0.0;
            return std::exp(1.0 - 1.0 / (1.0 - x * x));
        }));
        c.push_back(scalar("eigen-w0", [](double x) {
            return axis_value(EigenKind::DirichletNeumann, 0, x);
        }));
        return c;
    }();
    return catalog;
}

/// <rho, G> = integral over the cylinder of sum_i rho_i G_i, by trapezoid
/// along the axis and exact node weights in the periodic directions.
inline double profile_pairing(const Profile& rho, const TestFunction& G) {
    const Grid& g = rho.grid;
    double torus_w = 1.0;
    for (int k = 1; k < g.d; ++k) torus_w *= g.hk();
    double sum = 0;
    for (std::size_t i = 0; i < rho.values.size(); ++i) {
        int layer = g.layer(i);
        double w = (layer == 0 || layer == g.m1 - 1) ? 0.5 : 1.0;
        auto u = g.point(i);
        auto gv = G.g(std::span<const double>(u.data(), u.size()));
        double v = 0;
        for (int c = 0; c < 3; ++c)
            v += rho.values[i][static_cast<std::size_t>(c)] * gv[static_cast<std::size_t>(c)];
        sum += w * v;
    }
    return sum * g.h1() * torus_w;
}

/// <pi^N, G>: the empirical pairing of a particle configuration.
inline double config_pairing(const Lattice& lat, const Configuration& cfg,
                             const TestFunction& G) {
    return empirical_pair(lat, cfg, G.g);
}

/// Linear interpolation of a d=1 profile at an axis point.
inline Density profile_at(const Profile& rho, double x) {
    const Grid& g = rho.grid;
    if (g.d != 1) throw std::invalid_argument("profile_at: d=1 only");
    double s = (x - g.x_lo) / g.h1();
    if (s < 0 || s > g.m1 - 1 + 1e-9)
        throw std::invalid_argument("profile_at: point outside the grid");
    std::size_t i0 = static_cast<std::size_t>(std::min(static_cast<int>(s), g.m1 - 2));
    double w = s - static_cast<double>(i0);
    Density out;
    for (int c = 0; c < 3; ++c)
        out[static_cast<std::size_t>(c)] =
            (1.0 - w) * rho.values[i0][static_cast<std::size_t>(c)] +
            w * rho.values[i0 + 1][static_cast<std::size_t>(c)];
    return out;
}

struct TrendEntry {
    int N = 0;
    double mean = 0;
    double se = 0;
};

/// Strictly decreasing beyond noise: each consecutive drop exceeds twice the
/// combined standard error.
inline bool decreasing_beyond_noise(const std::vector<TrendEntry>& e) {
    for (std::size_t i = 0; i + 1 < e.size(); ++i) {
        double combined = std::sqrt(e[i].se * e[i].se + e[i + 1].se * e[i + 1].se);
        if (!(e[i].mean - e[i + 1].mean > 2.0 * combined)) return false;
    }
    return true;
}

using ProfileFn = std::function<Density(std::span<const double>)>;

struct HydroConfig {
    ModelParams params;
    std::array<double, 3> b_left{0.25, 0.25, 0.25};
    std::array<double, 3> b_right{0.25, 0.25, 0.25};
    ProfileFn gamma;  // continuous initial profile (local-equilibrium start)
    std::vector<int> sizes{50, 100, 200};
    int d = 1;
    int replicas = 32;
    double t = 1.0;
    int grid_m1 = 201;
    double pde_dt = 0.0;  // 0: auto from the CFL bound
    std::uint64_t seed = 1;
    int threads = 1;
};

struct HydroReport {
    std::vector<TrendEntry> errors;  // max-over-catalog pairing error per N
    std::vector<std::vector<double>> per_g_errors;  // [N index][catalog index]
    bool decreasing = false;
    BoundaryRegime regime{BoundaryCondition::Dirichlet, BoundaryCondition::Dirichlet};
};

inline HydroReport hydrodynamic_check(const HydroConfig& cfg) {
    if (cfg.sizes.empty()) throw std::invalid_argument("hydrodynamic_check: no lattice sizes");
    for (std::size_t i = 0; i + 1 < cfg.sizes.size(); ++i)
        if (cfg.sizes[i] >= cfg.sizes[i + 1])
            throw std::invalid_argument("hydrodynamic_check: sizes must be ascending");
    if (!cfg.gamma) throw std::invalid_argument("hydrodynamic_check: missing initial profile");
    cfg.params.validate();

    const auto& catalog = test_catalog();
    auto b = BoundaryData::constant(cfg.b_left, cfg.b_right);
    auto regime = regime_from_theta(cfg.params.theta_l, cfg.params.theta_r);

    // macroscopic side: one solve, pairings at time t
    Grid grid;
    grid.d = cfg.d;
    grid.m1 = cfg.grid_m1;
    grid.mk = cfg.d > 1 ? cfg.grid_m1 : 1;
    Profile u0(grid, cfg.gamma);
    double dt = cfg.pde_dt > 0 ? cfg.pde_dt : 0.9 * cfl_limit(grid, cfg.params);
    Profile rho_t = solve(u0, cfg.t, dt, cfg.params, regime, b, {cfg.t}).back();
    std::vector<double> pde_pairings(catalog.size());
    for (std::size_t gi = 0; gi < catalog.size(); ++gi)
        pde_pairings[gi] = profile_pairing(rho_t, catalog[gi]);

    HydroReport rep;
    rep.regime = regime;
    for (std::size_t ni = 0; ni < cfg.sizes.size(); ++ni) {
        const int N = cfg.sizes[ni];
        Lattice lat(N, cfg.d);
        std::vector<double> max_err(static_cast<std::size_t>(cfg.replicas), 0.0);
        std::vector<std::vector<double>> g_err(
            static_cast<std::size_t>(cfg.replicas), std::vector<double>(catalog.size(), 0.0));

        auto run_replica = [&](int r) {
            Rng rng(derive_seed(cfg.seed, static_cast<std::uint64_t>(N),
                                static_cast<std::uint64_t>(r)));
            auto init = sample_from_profile(lat, cfg.gamma, rng);
            KmcEngine engine(lat, cfg.params, b, std::move(init));
            engine.run(cfg.t, rng);
            const auto& final_cfg = engine.config();
            for (std::size_t gi = 0; gi < catalog.size(); ++gi) {
                double diff =
                    std::abs(config_pairing(lat, final_cfg, catalog[gi]) - pde_pairings[gi]);
                g_err[static_cast<std::size_t>(r)][gi] = diff;
                max_err[static_cast<std::size_t>(r)] =
                    std::max(max_err[static_cast<std::size_t>(r)], diff);
            }
        };

        if (cfg.threads > 1) {
            std::vector<std::thread> pool;
            int per = (cfg.replicas + cfg.threads - 1) / cfg.threads;
            for (int t0 = 0; t0 < cfg.replicas; t0 += per) {
                int t1 = std::min(cfg.replicas, t0 + per);
                pool.emplace_back([&, t0, t1] {
                    for (int r = t0; r < t1; ++r) run_replica(r);
                });
            }
            for (auto& th : pool) th.join();
        } else {
            for (int r = 0; r < cfg.replicas; ++r) run_replica(r);
        }

        double mean = 0;
        for (double v : max_err) mean += v;
        mean /= static_cast<double>(cfg.replicas);
        double var = 0;
        for (double v : max_err) var += (v - mean) * (v - mean);
        var /= std::max(1.0, static_cast<double>(cfg.replicas - 1));
        rep.errors.push_back({N, mean, std::sqrt(var / cfg.replicas)});

        std::vector<double> gmean(catalog.size(), 0.0);
        for (const auto& row : g_err)
            for (std::size_t gi = 0; gi < catalog.size(); ++gi) gmean[gi] += row[gi];
        for (auto& v : gmean) v /= static_cast<double>(cfg.replicas);
        rep.per_g_errors.push_back(std::move(gmean));
    }
    rep.decreasing = decreasing_beyond_noise(rep.errors);
    return rep;
}

struct HydrostaticConfig {
    ModelParams params;
    std::array<double, 3> b_left{0.25, 0.25, 0.25};
    std::array<double, 3> b_right{0.25, 0.25, 0.25};
    std::vector<int> exact_sizes{1, 2, 3};
    int statistical_size = 0;  // 0: skip the Monte Carlo variant
    double burn_in = 10.0;
    double window = 50.0;
    int grid_m1 = 201;
    double pde_tol = 1e-6;
    double pde_t_max = 500.0;
    double delta1_override = 0.0;  // 0: spectral default
    std::uint64_t seed = 1;
};

struct HydrostaticReport {
    bool h1 = false;
    std::vector<TrendEntry> gaps;  // L1 gap per exact N (se = 0, no MC error)
    std::vector<std::vector<double>> per_g_gaps;
    TrendEntry statistical_gap;  // informational, when statistical_size > 0
    bool decreasing = false;
    bool pde_converged = false;
};

/// Volume-weighted L1 distance between exact site marginals and the PDE
/// profile evaluated at the embedded sites.
inline double marginal_l1_gap(const Lattice& lat,
                              const std::vector<std::array<double, 4>>& marginals,
                              const Profile& rho) {
    double gap = 0;
    for (std::size_t x = 0; x < lat.site_count(); ++x) {
        auto u = lat.embed(x);
        auto rv = profile_at(rho, u[0]);
        for (int i = 1; i <= 3; ++i)
            gap += std::abs(marginals[x][static_cast<std::size_t>(i)] -
                            rv[static_cast<std::size_t>(i - 1)]);
    }
    return 2.0 * gap / static_cast<double>(lat.site_count());
}

inline HydrostaticReport hydrostatic_check(const HydrostaticConfig& cfg) {
    cfg.params.validate();
    double delta1 = cfg.delta1_override > 0 ? cfg.delta1_override : default_delta1(1);
    auto cond = check_conditions(cfg.params, 1, delta1);
    HydrostaticReport rep;
    rep.h1 = cond.h1;
    if (!cond.h1)
        throw std::invalid_argument(
            "hydrostatic_check: parameters violate condition H1; the stationary "
            "profile is not guaranteed unique there");

    auto b = BoundaryData::constant(cfg.b_left, cfg.b_right);
    auto regime = regime_from_theta(cfg.params.theta_l, cfg.params.theta_r);
    Grid grid;
    grid.m1 = cfg.grid_m1;
    auto stat = stationary_solve(grid, cfg.params, regime, b, cfg.pde_tol, cfg.pde_t_max);
    rep.pde_converged = stat.converged;
    if (!stat.converged)
        throw std::runtime_error("hydrostatic_check: PDE stationary solve did not converge");

    const auto& catalog = test_catalog();
    for (int N : cfg.exact_sizes) {
        Lattice lat(N, 1);
        auto G = build_generator(lat, cfg.params, b);
        auto pi = stationary_distribution(G);
        auto marg = occupation_marginals(G, pi);
        rep.gaps.push_back({N, marginal_l1_gap(lat, marg, stat.profile), 0.0});

        std::vector<double> gg;
        for (const auto& tf : catalog) {
            // exact pairing: sum_x N^{-d} sum_i marg_i(x) G_i(x/N)
            double micro = 0;
            for (std::size_t x = 0; x < lat.site_count(); ++x) {
                auto u = lat.embed(x);
                auto gv = tf.g(std::span<const double>(u.data(), u.size()));
                for (int i = 1; i <= 3; ++i)
                    micro += marg[x][static_cast<std::size_t>(i)] *
                             gv[static_cast<std::size_t>(i - 1)];
            }
            micro /= static_cast<double>(N);
            gg.push_back(std::abs(micro - profile_pairing(stat.profile, tf)));
        }
        rep.per_g_gaps.push_back(std::move(gg));
    }
    rep.decreasing = true;
    for (std::size_t i = 0; i + 1 < rep.gaps.size(); ++i)
        rep.decreasing = rep.decreasing && rep.gaps[i + 1].mean < rep.gaps[i].mean;

    if (cfg.statistical_size > 0) {
        Lattice lat(cfg.statistical_size, 1);
        Rng rng(derive_seed(cfg.seed, static_cast<std::uint64_t>(cfg.statistical_size), 0));
        Configuration init(lat.site_count(), 2);
        KmcEngine engine(lat, cfg.params, b, std::move(init));
        engine.run(cfg.burn_in, rng);
        engine.reset_occupation();
        engine.run(cfg.burn_in + cfg.window, rng);
        std::vector<std::array<double, 4>> marg(lat.site_count());
        for (std::size_t x = 0; x < lat.site_count(); ++x)
            for (int i = 0; i < 4; ++i)
                marg[x][static_cast<std::size_t>(i)] = engine.occupation(x, i);
        rep.statistical_gap = {cfg.statistical_size,
                               marginal_l1_gap(lat, marg, stat.profile), 0.0};
    }
    return rep;
}

struct AppendixBRun {
    std::string label;
    ModelParams params;
    bool h1 = false;
    Profile from_low;   // transformed (0,0,0) data, i.e. densities (0,1,0)
    Profile from_high;  // transformed (1,1,1) data, i.e. densities (1,0,0)
    double linf_gap = 0;
};

struct AppendixBReport {
    double dt_stated = 2e-4;
    double dt_used = 0;
    double cfl = 0;
    bool dt_tightened = false;
    std::vector<AppendixBRun> runs;
};

/// The fixed benchmark: d=1 on [0,1] with 100 cells, Neumann faces, T=100,
/// two parameter sets and the two extremal initial data each. The stated
/// step count implies dt=2e-4, above the explicit-Euler stability bound for
/// this grid, so the preset tightens dt to the bound and records both.
inline AppendixBReport reproduce_appendix_b() {
    Grid grid;
    grid.d = 1;
    grid.m1 = 101;
    grid.x_lo = 0.0;
    grid.x_hi = 1.0;

    ModelParams run1;  // lambda1=0.75, lambda2=0.25, r=D=1: H1 holds
    ModelParams run2 = run1;
    run2.lambda1 = 1.0;
    run2.lambda2 = 0.75;
    run1.theta_l = run1.theta_r = 2.0;  // Neumann both faces
    run2.theta_l = run2.theta_r = 2.0;

    AppendixBReport rep;
    rep.cfl = cfl_limit(grid, run1);
    rep.dt_used = std::min(rep.dt_stated, rep.cfl);
    rep.dt_tightened = rep.dt_used < rep.dt_stated;

    auto b = BoundaryData::constant({0.25, 0.25, 0.25});  // inert under Neumann
    BoundaryRegime regime{BoundaryCondition::Neumann, BoundaryCondition::Neumann};
    const double T = 100.0;

    for (const auto& [label, p] : {std::pair<std::string, ModelParams>{"run1", run1},
                                   {"run2", run2}}) {
        Profile low(grid, Density{0, 1, 0});
        Profile high(grid, Density{1, 0, 0});
        auto low_t = solve(low, T, rep.dt_used, p, regime, b, {T}).back();
        auto high_t = solve(high, T, rep.dt_used, p, regime, b, {T}).back();
        // the gap is measured in the transformed coordinates the benchmark plots
        double gap = 0;
        for (std::size_t i = 0; i < low_t.values.size(); ++i) {
            auto ql = transform(low_t.values[i]);
            auto qh = transform(high_t.values[i]);
            for (int c = 0; c < 3; ++c)
                gap = std::max(gap, std::abs(ql[static_cast<std::size_t>(c)] -
                                             qh[static_cast<std::size_t>(c)]));
        }
        auto cond = check_conditions(p, 1, default_delta1(1));
        rep.runs.push_back({label, p, cond.h1, low_t, high_t, gap});
    }
    return rep;
}

// ---- emission -------------------------------------------------------------

inline std::string format_g17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

/// CSV with a header row; every numeric cell printed with %.17g so reruns
/// are byte-identical.
inline void write_csv(const std::string& path, const std::vector<std::string>& header,
                      const std::vector<std::vector<double>>& rows) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("write_csv: cannot open " + path);
    for (std::size_t i = 0; i < header.size(); ++i)
        os << (i ? "," : "") << header[i];
    os << "\n";
    for (const auto& row : rows) {
        for (std::size_t i = 0; i < row.size(); ++i)
            os << (i ? "," : "") << format_g17(row[i]);
        os << "\n";
    }
    if (!os) throw std::runtime_error("write_csv: write failed for " + path);
}

inline void write_profile_csv(const std::string& path, const Profile& rho) {
    std::vector<std::string> header;
    for (int k = 0; k < rho.grid.d; ++k) header.push_back("x" + std::to_string(k + 1));
    header.insert(header.end(), {"rho1", "rho2", "rho3"});
    std::vector<std::vector<double>> rows;
    rows.reserve(rho.values.size());
    for (std::size_t i = 0; i < rho.values.size(); ++i) {
        auto u = rho.grid.point(i);
        std::vector<double> row(u.begin(), u.end());
        for (int c = 0; c < 3; ++c) row.push_back(rho.values[i][static_cast<std::size_t>(c)]);
        rows.push_back(std::move(row));
    }
    write_csv(path, header, rows);
}

/// Block-averaged empirical profile on the embedded sites, emitted in the
/// same CSV layout as PDE profiles for direct differencing.
inline void write_empirical_csv(const std::string& path, const Lattice& lat,
                                const Configuration& cfg, int block_radius) {
    std::vector<std::string> header;
    for (int k = 0; k < lat.dim(); ++k) header.push_back("x" + std::to_string(k + 1));
    header.insert(header.end(), {"rho1", "rho2", "rho3"});
    std::vector<std::vector<double>> rows;
    for (std::size_t x = 0; x < lat.site_count(); ++x) {
        auto u = lat.embed(x);
        std::vector<double> row(u.begin(), u.end());
        for (int i = 1; i <= 3; ++i) row.push_back(block_average(lat, cfg, x, block_radius, i));
        rows.push_back(std::move(row));
    }
    write_csv(path, header, rows);
}

}  // namespace gcps
