// Command-line harness: particle simulation, PDE solves, stationary
// profiles, limit checks, and the fixed benchmark reproduction.
//
// Exit codes: 0 success, 2 invalid configuration, 3 check failed.

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "gcps/config_io.hpp"
#include "gcps/harness.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr const char* kVersion = "1.0.0";
constexpr int kExitConfig = 2;
constexpr int kExitCheckFailed = 3;

struct GlobalOpts {
    std::string config_path;
    std::uint64_t seed = 1;
    std::string out_dir = ".";
    int threads = 1;
};

json load_config(const GlobalOpts& g) {
    if (g.config_path.empty()) return json::object();
    std::ifstream is(g.config_path);
    if (!is) throw std::invalid_argument("cannot open config file: " + g.config_path);
    json j;
    is >> j;
    return j;
}

gcps::ModelParams parse_model(const json& j) {
    gcps::ModelParams p;
    if (j.contains("model")) {
        const auto& m = j["model"];
        p.D = m.value("D", p.D);
        p.lambda1 = m.value("lambda1", p.lambda1);
        p.lambda2 = m.value("lambda2", p.lambda2);
        p.r = m.value("r", p.r);
        p.theta_l = m.value("theta_l", p.theta_l);
        p.theta_r = m.value("theta_r", p.theta_r);
    }
    p.validate();
    return p;
}

std::array<double, 3> parse_triple(const json& j, std::array<double, 3> dflt) {
    if (!j.is_array() || j.size() != 3)
        throw std::invalid_argument("expected a 3-element array");
    return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
    (void)dflt;
}

void parse_boundary(const json& j, std::array<double, 3>& left, std::array<double, 3>& right) {
    if (!j.contains("boundary")) return;
    const auto& b = j["boundary"];
    if (b.contains("left")) left = parse_triple(b["left"], left);
    if (b.contains("right")) right = parse_triple(b["right"], right);
}

gcps::Grid parse_grid(const json& j) {
    gcps::Grid g;
    if (j.contains("grid")) {
        const auto& jg = j["grid"];
        g.d = jg.value("d", g.d);
        g.m1 = jg.value("m1", g.m1);
        g.mk = jg.value("mk", g.mk);
        g.x_lo = jg.value("x_lo", g.x_lo);
        g.x_hi = jg.value("x_hi", g.x_hi);
    }
    g.validate();
    return g;
}

gcps::ProfileFn parse_initial(const json& j, const gcps::ModelParams& p) {
    std::string kind = "extinction";
    std::array<double, 3> value{0.2, 0.2, 0.2};
    if (j.contains("initial")) {
        const auto& ji = j["initial"];
        kind = ji.value("kind", kind);
        if (ji.contains("value")) value = parse_triple(ji["value"], value);
    }
    if (kind == "extinction") {
        auto ext = gcps::extinction_state(p);
        return [ext](std::span<const double>) { return ext; };
    }
    if (kind == "constant")
        return [value](std::span<const double>) { return value; };
    if (kind == "wild")
        return [](std::span<const double>) { return gcps::Density{1, 0, 0}; };
    if (kind == "sterile")
        return [](std::span<const double>) { return gcps::Density{0, 1, 0}; };
    throw std::invalid_argument("unknown initial profile kind: " + kind);
}

void write_manifest(const GlobalOpts& g, const std::string& command, const json& config,
                    const std::vector<std::string>& outputs, double wall_seconds) {
    json m;
    m["version"] = kVersion;
    m["command"] = command;
    m["seed"] = g.seed;
    m["threads"] = g.threads;
    m["config"] = config;
    m["outputs"] = outputs;
    m["wall_seconds"] = wall_seconds;  // informational; not covered by determinism
    std::ofstream os(fs::path(g.out_dir) / "manifest.json");
    if (!os) throw std::runtime_error("cannot write manifest in " + g.out_dir);
    os << m.dump(2) << "\n";
}

std::string out_path(const GlobalOpts& g, const std::string& name) {
    return (fs::path(g.out_dir) / name).string();
}

int cmd_simulate(const GlobalOpts& g, const json& cfg) {
    auto p = parse_model(cfg);
    std::array<double, 3> bl{0.25, 0.25, 0.25}, br{0.25, 0.25, 0.25};
    parse_boundary(cfg, bl, br);
    int N = 20, d = 1;
    if (cfg.contains("lattice")) {
        N = cfg["lattice"].value("N", N);
        d = cfg["lattice"].value("d", d);
    }
    double t_end = cfg.value("t_end", 1.0);
    int block_radius = cfg.value("block_radius", 0);
    std::vector<double> snapshots = cfg.value("snapshots", std::vector<double>{t_end});

    gcps::Lattice lat(N, d);
    auto b = gcps::BoundaryData::constant(bl, br);
    gcps::Rng rng(g.seed);
    auto gamma = parse_initial(cfg, p);
    auto init = gcps::sample_from_profile(lat, gamma, rng);
    gcps::KmcEngine engine(lat, p, b, std::move(init));

    std::vector<std::string> outputs;
    int snap_idx = 0;
    engine.run(t_end, rng, snapshots,
               [&](double, const gcps::Configuration& c) {
                   std::string name = "empirical_" + std::to_string(snap_idx++) + ".csv";
                   gcps::write_empirical_csv(out_path(g, name), lat, c, block_radius);
                   outputs.push_back(name);
               });
    {
        std::ofstream os(out_path(g, "final_config.txt"), std::ios::binary);
        gcps::write_config_text(os, engine.config(), N, d);
        outputs.push_back("final_config.txt");
    }
    write_manifest(g, "simulate", cfg, outputs, 0.0);
    std::cout << "simulate: " << engine.event_count() << " events to t=" << t_end << "\n";
    return 0;
}

int cmd_solve(const GlobalOpts& g, const json& cfg) {
    auto p = parse_model(cfg);
    std::array<double, 3> bl{0.25, 0.25, 0.25}, br{0.25, 0.25, 0.25};
    parse_boundary(cfg, bl, br);
    auto grid = parse_grid(cfg);
    double t_end = cfg.value("t_end", 1.0);
    double dt = cfg.value("dt", 0.0);
    if (dt <= 0) dt = 0.9 * gcps::cfl_limit(grid, p);
    std::vector<double> snapshots = cfg.value("snapshots", std::vector<double>{t_end});

    auto b = gcps::BoundaryData::constant(bl, br);
    auto regime = gcps::regime_from_theta(p.theta_l, p.theta_r);
    gcps::Profile u0(grid, parse_initial(cfg, p));
    auto snaps = gcps::solve(u0, t_end, dt, p, regime, b, snapshots);

    std::vector<std::string> outputs;
    for (std::size_t i = 0; i < snaps.size(); ++i) {
        std::string name = "profile_" + std::to_string(i) + ".csv";
        gcps::write_profile_csv(out_path(g, name), snaps[i]);
        outputs.push_back(name);
    }
    write_manifest(g, "solve", cfg, outputs, 0.0);
    std::cout << "solve: " << snaps.size() << " snapshots, dt=" << dt << "\n";
    return 0;
}

int cmd_stationary(const GlobalOpts& g, const json& cfg) {
    auto p = parse_model(cfg);
    std::array<double, 3> bl{0.25, 0.25, 0.25}, br{0.25, 0.25, 0.25};
    parse_boundary(cfg, bl, br);
    auto grid = parse_grid(cfg);
    double tol = cfg.value("tol", 1e-6);
    double t_max = cfg.value("t_max", 500.0);

    auto b = gcps::BoundaryData::constant(bl, br);
    auto regime = gcps::regime_from_theta(p.theta_l, p.theta_r);
    auto res = gcps::stationary_solve(grid, p, regime, b, tol, t_max);

    std::vector<std::string> outputs{"stationary_low.csv", "stationary_high.csv"};
    gcps::write_profile_csv(out_path(g, "stationary_low.csv"), res.profile);
    gcps::write_profile_csv(out_path(g, "stationary_high.csv"), res.upper);
    write_manifest(g, "stationary", cfg, outputs, 0.0);
    std::cout << "stationary: converged=" << res.converged << " settled=" << res.settled
              << " gap=" << res.gap << " t=" << res.t_reached << "\n";
    return res.converged ? 0 : kExitCheckFailed;
}

int cmd_hydro_check(const GlobalOpts& g, const json& cfg) {
    gcps::HydroConfig hc;
    hc.params = parse_model(cfg);
    parse_boundary(cfg, hc.b_left, hc.b_right);
    hc.sizes = cfg.value("sizes", hc.sizes);
    hc.replicas = cfg.value("replicas", hc.replicas);
    hc.t = cfg.value("t", hc.t);
    hc.grid_m1 = cfg.value("grid_m1", hc.grid_m1);
    hc.seed = g.seed;
    hc.threads = g.threads;
    hc.gamma = parse_initial(cfg, hc.params);

    auto rep = gcps::hydrodynamic_check(hc);
    std::vector<std::vector<double>> rows;
    for (const auto& e : rep.errors)
        rows.push_back({static_cast<double>(e.N), e.mean, e.se});
    gcps::write_csv(out_path(g, "hydro_trend.csv"), {"N", "error_mean", "error_se"}, rows);
    write_manifest(g, "hydro-check", cfg, {"hydro_trend.csv"}, 0.0);
    for (const auto& e : rep.errors)
        std::cout << "N=" << e.N << " error=" << e.mean << " se=" << e.se << "\n";
    std::cout << "decreasing=" << rep.decreasing << "\n";
    return rep.decreasing ? 0 : kExitCheckFailed;
}

int cmd_hydrostatic_check(const GlobalOpts& g, const json& cfg) {
    gcps::HydrostaticConfig hc;
    hc.params = parse_model(cfg);
    parse_boundary(cfg, hc.b_left, hc.b_right);
    hc.exact_sizes = cfg.value("exact_sizes", hc.exact_sizes);
    hc.statistical_size = cfg.value("statistical_size", hc.statistical_size);
    hc.burn_in = cfg.value("burn_in", hc.burn_in);
    hc.window = cfg.value("window", hc.window);
    hc.grid_m1 = cfg.value("grid_m1", hc.grid_m1);
    hc.pde_tol = cfg.value("tol", hc.pde_tol);
    hc.delta1_override = cfg.value("delta1", hc.delta1_override);
    hc.seed = g.seed;

    auto rep = gcps::hydrostatic_check(hc);
    std::vector<std::vector<double>> rows;
    for (const auto& e : rep.gaps)
        rows.push_back({static_cast<double>(e.N), e.mean});
    if (rep.statistical_gap.N > 0)
        rows.push_back({static_cast<double>(rep.statistical_gap.N), rep.statistical_gap.mean});
    gcps::write_csv(out_path(g, "hydrostatic_gaps.csv"), {"N", "l1_gap"}, rows);
    write_manifest(g, "hydrostatic-check", cfg, {"hydrostatic_gaps.csv"}, 0.0);
    for (const auto& e : rep.gaps)
        std::cout << "N=" << e.N << " l1_gap=" << e.mean << "\n";
    std::cout << "decreasing=" << rep.decreasing << "\n";
    return rep.decreasing ? 0 : kExitCheckFailed;
}

int cmd_appendix_b(const GlobalOpts& g, const json& cfg) {
    auto rep = gcps::reproduce_appendix_b();
    std::vector<std::string> outputs;
    for (const auto& run : rep.runs) {
        for (const auto& [tag, prof] :
             {std::pair<const char*, const gcps::Profile*>{"low", &run.from_low},
              {"high", &run.from_high}}) {
            std::vector<std::vector<double>> rows;
            for (std::size_t i = 0; i < prof->values.size(); ++i) {
                auto q = gcps::transform(prof->values[i]);
                rows.push_back({prof->grid.point(i)[0], q[0], q[1], q[2]});
            }
            std::string name = "appendix_b_" + run.label + "_" + tag + ".csv";
            gcps::write_csv(out_path(g, name), {"x", "rho1", "T", "R"}, rows);
            outputs.push_back(name);
        }
        std::cout << run.label << ": H1=" << run.h1 << " linf_gap=" << run.linf_gap << "\n";
    }
    std::vector<std::vector<double>> gaps;
    for (std::size_t i = 0; i < rep.runs.size(); ++i)
        gaps.push_back({static_cast<double>(i + 1), rep.runs[i].h1 ? 1.0 : 0.0,
                        rep.runs[i].linf_gap});
    gcps::write_csv(out_path(g, "appendix_b_gaps.csv"), {"run", "h1", "linf_gap"}, gaps);
    outputs.push_back("appendix_b_gaps.csv");
    write_manifest(g, "appendix-b", cfg, outputs, 0.0);
    std::cout << "dt_stated=" << rep.dt_stated << " dt_used=" << rep.dt_used
              << " tightened=" << rep.dt_tightened << "\n";
    return 0;
}

int cmd_conditions(const GlobalOpts& g, const json& cfg, const std::string& require) {
    auto p = parse_model(cfg);
    int d = cfg.value("d", 1);
    double delta1 = cfg.value("delta1", 0.0);
    if (delta1 <= 0) delta1 = gcps::default_delta1(d);
    auto rep = gcps::check_conditions(p, d, delta1);
    gcps::write_csv(out_path(g, "conditions.csv"), {"h1", "h2", "h3", "delta1"},
                    {{rep.h1 ? 1.0 : 0.0, rep.h2 ? 1.0 : 0.0, rep.h3 ? 1.0 : 0.0, rep.delta1}});
    write_manifest(g, "conditions", cfg, {"conditions.csv"}, 0.0);
    std::cout << "H1=" << rep.h1 << " H2=" << rep.h2 << " H3=" << rep.h3
              << " delta1=" << rep.delta1 << "\n";
    if (require == "h1" && !rep.h1) return kExitCheckFailed;
    if (require == "h2" && !rep.h2) return kExitCheckFailed;
    if (require == "h3" && !rep.h3) return kExitCheckFailed;
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Sterile-insect particle system and reaction-diffusion limit harness"};
    app.require_subcommand(1);

    GlobalOpts g;
    app.add_option("--config", g.config_path, "JSON configuration file");
    app.add_option("--seed", g.seed, "random seed (no wall-clock seeding)");
    app.add_option("--out", g.out_dir, "output directory");
    app.add_option("--threads", g.threads, "worker threads for replica sweeps");

    auto* sim = app.add_subcommand("simulate", "run the particle system");
    auto* sol = app.add_subcommand("solve", "run the reaction-diffusion solver");
    auto* sta = app.add_subcommand("stationary", "solve for the stationary profile");
    auto* hyd = app.add_subcommand("hydro-check", "hydrodynamic limit trend check");
    auto* hys = app.add_subcommand("hydrostatic-check", "hydrostatic limit trend check");
    auto* apb = app.add_subcommand("appendix-b", "reproduce the fixed benchmark");
    auto* con = app.add_subcommand("conditions", "evaluate conditions H1/H2/H3");
    std::string require;
    con->add_option("--require", require, "fail (exit 3) unless this condition holds")
        ->check(CLI::IsMember({"h1", "h2", "h3"}));

    CLI11_PARSE(app, argc, argv);

    try {
        fs::create_directories(g.out_dir);
        json cfg = load_config(g);
        if (sim->parsed()) return cmd_simulate(g, cfg);
        if (sol->parsed()) return cmd_solve(g, cfg);
        if (sta->parsed()) return cmd_stationary(g, cfg);
        if (hyd->parsed()) return cmd_hydro_check(g, cfg);
        if (hys->parsed()) return cmd_hydrostatic_check(g, cfg);
        if (apb->parsed()) return cmd_appendix_b(g, cfg);
        if (con->parsed()) return cmd_conditions(g, cfg, require);
    } catch (const std::invalid_argument& e) {
        std::cerr << "invalid configuration: " << e.what() << "\n";
        return kExitConfig;
    } catch (const nlohmann::json::exception& e) {
        std::cerr << "invalid configuration: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
