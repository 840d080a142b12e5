#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "gcps/params.hpp"

namespace gcps {

/// Regular grid on [x_lo,x_hi] x [0,1)^{d-1}: m1 nodes along axis 1 including
/// both endpoints, mk nodes per periodic direction. Node enumeration is
/// row-major with axis 1 slowest.
struct Grid {
    int d = 1;
    int m1 = 101;
    int mk = 1;
    double x_lo = -1.0;
    double x_hi = 1.0;

    void validate() const {
        if (d < 1) throw std::invalid_argument("Grid: d must be >= 1");
        if (m1 < 3) throw std::invalid_argument("Grid: m1 must be >= 3");
        if (d > 1 && mk < 3) throw std::invalid_argument("Grid: mk must be >= 3");
        if (!(x_hi > x_lo)) throw std::invalid_argument("Grid: empty axis interval");
    }

    double h1() const { return (x_hi - x_lo) / static_cast<double>(m1 - 1); }
    double hk() const { return 1.0 / static_cast<double>(mk); }

    std::size_t torus_volume() const {
        std::size_t v = 1;
        for (int k = 1; k < d; ++k) v *= static_cast<std::size_t>(mk);
        return v;
    }

    std::size_t node_count() const { return static_cast<std::size_t>(m1) * torus_volume(); }

    std::vector<double> point(std::size_t idx) const {
        std::vector<double> u(static_cast<std::size_t>(d));
        for (int k = d - 1; k >= 1; --k) {
            u[static_cast<std::size_t>(k)] =
                static_cast<double>(idx % static_cast<std::size_t>(mk)) * hk();
            idx /= static_cast<std::size_t>(mk);
        }
        u[0] = x_lo + static_cast<double>(idx) * h1();
        return u;
    }

    /// Axis-1 layer of a node: 0 at the left face, m1-1 at the right face.
    int layer(std::size_t idx) const { return static_cast<int>(idx / torus_volume()); }

    bool same_as(const Grid& o) const {
        return d == o.d && m1 == o.m1 && mk == o.mk && x_lo == o.x_lo && x_hi == o.x_hi;
    }
};

using Density = std::array<double, 3>;

struct Profile {
    Grid grid;
    std::vector<Density> values;

    explicit Profile(const Grid& g, Density fill = {0, 0, 0})
        : grid(g), values(g.node_count(), fill) {
        g.validate();
    }

    Profile(const Grid& g, const std::function<Density(std::span<const double>)>& f) : grid(g) {
        g.validate();
        values.resize(g.node_count());
        for (std::size_t i = 0; i < values.size(); ++i) {
            auto u = g.point(i);
            values[i] = f(std::span<const double>(u.data(), u.size()));
        }
    }
};

inline double linf_distance(const Profile& a, const Profile& b) {
    if (!a.grid.same_as(b.grid)) throw std::invalid_argument("linf_distance: grid mismatch");
    double m = 0;
    for (std::size_t i = 0; i < a.values.size(); ++i)
        for (int c = 0; c < 3; ++c)
            m = std::max(m, std::abs(a.values[i][static_cast<std::size_t>(c)] -
                                     b.values[i][static_cast<std::size_t>(c)]));
    return m;
}

inline constexpr double kSimplexTol = 1e-9;

/// Clamps a density to the simplex when the violation is within tol;
/// rejects larger departures.
inline Density clamp_simplex(Density rho, double tol = kSimplexTol) {
    double sum = 0;
    for (auto& v : rho) {
        if (v < -tol || v > 1.0 + tol)
            throw std::invalid_argument("clamp_simplex: density outside [0,1] beyond tolerance");
        v = std::min(1.0, std::max(0.0, v));
        sum += v;
    }
    if (sum > 1.0 + tol)
        throw std::invalid_argument("clamp_simplex: component sum exceeds 1 beyond tolerance");
    if (sum > 1.0)
        for (auto& v : rho) v /= sum;
    return rho;
}

/// Reaction term of the macroscopic system; rho0 = 1 - rho1 - rho2 - rho3.
inline Density reaction_F(Density rho, const ModelParams& p, int d) {
    rho = clamp_simplex(rho);
    const double rho0 = 1.0 - rho[0] - rho[1] - rho[2];
    const double beta = 2.0 * d * (p.lambda1 * rho[0] + p.lambda2 * rho[2]);
    return {beta * rho0 + rho[2] - (p.r + 1.0) * rho[0],
            p.r * rho0 + rho[2] - beta * rho[1] - rho[1],
            beta * rho[1] + p.r * rho[0] - 2.0 * rho[2]};
}

/// Change of coordinates (rho1, rho2, rho3) -> (rho1, T, R) with
/// T = rho1 + rho3 and R = 1 - rho2 - rho3.
inline Density transform(const Density& rho) {
    return {rho[0], rho[0] + rho[2], 1.0 - rho[1] - rho[2]};
}

inline Density untransform(const Density& q) {
    return {q[0], 1.0 - q[2] - q[1] + q[0], q[1] - q[0]};
}

/// Reaction in the transformed coordinates.
inline Density reaction_transformed(const Density& q, const ModelParams& p, int d) {
    const double rho1 = q[0], T = q[1], R = q[2];
    const double g = 2.0 * d * ((p.lambda1 - p.lambda2) * rho1 + p.lambda2 * T);
    return {g * (R - rho1) + T - (p.r + 2.0) * rho1,
            g * (1.0 - T) - T,
            -(p.r + 1.0) * R + 1.0};
}

/// Reaction fixed point with no wild population: (0, r/(r+1), 0).
inline Density extinction_state(const ModelParams& p) { return {0.0, p.r / (p.r + 1.0), 0.0}; }

using ReactionFn = std::function<Density(const Density&)>;

inline ReactionFn model_reaction(const ModelParams& p, int d) {
    return [p, d](const Density& rho) { return reaction_F(rho, p, d); };
}

inline ReactionFn zero_reaction() {
    return [](const Density&) { return Density{0, 0, 0}; };
}

/// Largest stable explicit-Euler step for the diffusion part,
/// 1/(2D sum_k 1/h_k^2); equals h^2/(2dD) on an isotropic grid.
inline double cfl_limit(const Grid& g, const ModelParams& p) {
    double inv = 1.0 / (g.h1() * g.h1());
    for (int k = 1; k < g.d; ++k) inv += 1.0 / (g.hk() * g.hk());
    return 1.0 / (2.0 * p.D * inv);
}

namespace detail {

inline Density boundary_density(const BoundaryData& b, const Grid& g, std::size_t idx, int face) {
    auto u = g.point(idx);
    std::span<const double> torus(u.data() + 1, u.size() - 1);
    auto bv = b(face, torus);
    return {bv[0], bv[1], bv[2]};
}

}  // namespace detail

/// One explicit-Euler step: interior update u + dt (D Lap_h u + F(u)) with the
/// (2d+1)-point Laplacian, periodic wrap in directions 2..d, and face handling
/// per regime (Dirichlet pin, Neumann reflected ghost, Robin centered ghost
/// enforcing the outward-normal flux condition on each face).
inline Profile euler_step(const Profile& u, double dt, const ModelParams& p,
                          const BoundaryRegime& regime, const BoundaryData& b,
                          const ReactionFn& reaction = {}) {
    const Grid& g = u.grid;
    if (!(dt > 0)) throw std::invalid_argument("euler_step: dt must be positive");
    if (dt > cfl_limit(g, p) * (1.0 + 1e-12))
        throw std::invalid_argument("euler_step: dt violates the CFL bound");
    const ReactionFn F = reaction ? reaction : model_reaction(p, g.d);

    const double h1 = g.h1();
    const double hk = g.hk();
    const std::size_t tv = g.torus_volume();
    Profile out = u;

    std::vector<std::size_t> stride(static_cast<std::size_t>(g.d), 1);
    for (int k = g.d - 2; k >= 1; --k)
        stride[static_cast<std::size_t>(k)] =
            stride[static_cast<std::size_t>(k) + 1] * static_cast<std::size_t>(g.mk);

    for (std::size_t i = 0; i < u.values.size(); ++i) {
        const int layer = g.layer(i);
        const bool left = (layer == 0), right = (layer == g.m1 - 1);
        const BoundaryCondition bc = left ? regime.left : regime.right;
        if ((left || right) && bc == BoundaryCondition::Dirichlet) {
            out.values[i] = detail::boundary_density(b, g, i, left ? -1 : +1);
            continue;
        }

        Density lap{0, 0, 0};
        const Density& here = u.values[i];
        // axis 1
        {
            Density ghost{};
            const Density* lo;
            const Density* hi;
            if (left) {
                hi = &u.values[i + tv];
                if (bc == BoundaryCondition::Neumann) {
                    ghost = *hi;
                } else {  // Robin, inward normal on the left face
                    auto bd = detail::boundary_density(b, g, i, -1);
                    for (int c = 0; c < 3; ++c)
                        ghost[static_cast<std::size_t>(c)] =
                            (*hi)[static_cast<std::size_t>(c)] +
                            (2.0 * h1 / p.D) * (bd[static_cast<std::size_t>(c)] -
                                                here[static_cast<std::size_t>(c)]);
                }
                lo = &ghost;
            } else if (right) {
                lo = &u.values[i - tv];
                if (bc == BoundaryCondition::Neumann) {
                    ghost = *lo;
                } else {
                    auto bd = detail::boundary_density(b, g, i, +1);
                    for (int c = 0; c < 3; ++c)
                        ghost[static_cast<std::size_t>(c)] =
                            (*lo)[static_cast<std::size_t>(c)] +
                            (2.0 * h1 / p.D) * (bd[static_cast<std::size_t>(c)] -
                                                here[static_cast<std::size_t>(c)]);
                }
                hi = &ghost;
            } else {
                lo = &u.values[i - tv];
                hi = &u.values[i + tv];
            }
            for (int c = 0; c < 3; ++c)
                lap[static_cast<std::size_t>(c)] +=
                    ((*lo)[static_cast<std::size_t>(c)] + (*hi)[static_cast<std::size_t>(c)] -
                     2.0 * here[static_cast<std::size_t>(c)]) /
                    (h1 * h1);
        }
        // periodic directions
        for (int k = 1; k < g.d; ++k) {
            const std::size_t s = stride[static_cast<std::size_t>(k)];
            const std::size_t m = static_cast<std::size_t>(g.mk);
            const std::size_t pos = (i / s) % m;
            const std::size_t lo_i = i - pos * s + ((pos + m - 1) % m) * s;
            const std::size_t hi_i = i - pos * s + ((pos + 1) % m) * s;
            for (int c = 0; c < 3; ++c)
                lap[static_cast<std::size_t>(c)] +=
                    (u.values[lo_i][static_cast<std::size_t>(c)] +
                     u.values[hi_i][static_cast<std::size_t>(c)] -
                     2.0 * here[static_cast<std::size_t>(c)]) /
                    (hk * hk);
        }

        Density f = F(here);
        Density next;
        for (int c = 0; c < 3; ++c) {
            next[static_cast<std::size_t>(c)] =
                here[static_cast<std::size_t>(c)] +
                dt * (p.D * lap[static_cast<std::size_t>(c)] + f[static_cast<std::size_t>(c)]);
            if (!std::isfinite(next[static_cast<std::size_t>(c)]))
                throw std::runtime_error("euler_step: non-finite value at node " +
                                         std::to_string(i));
        }
        out.values[i] = next;
    }
    return out;
}

/// Iterates euler_step to t_end, recording snapshots (nondecreasing times)
/// and asserting simplex invariance each step.
inline std::vector<Profile> solve(const Profile& u0, double t_end, double dt,
                                  const ModelParams& p, const BoundaryRegime& regime,
                                  const BoundaryData& b,
                                  const std::vector<double>& snapshot_times,
                                  const ReactionFn& reaction = {}) {
    if (!(t_end > 0)) throw std::invalid_argument("solve: t_end must be positive");
    std::vector<Profile> snaps;
    Profile u = u0;
    std::size_t next_snap = 0;
    const auto take_due = [&](double t) {
        while (next_snap < snapshot_times.size() && snapshot_times[next_snap] <= t + 1e-12) {
            snaps.push_back(u);
            ++next_snap;
        }
    };
    double t = 0;
    take_due(t);
    const std::size_t n_steps = static_cast<std::size_t>(std::ceil(t_end / dt - 1e-9));
    for (std::size_t s = 0; s < n_steps; ++s) {
        double step = std::min(dt, t_end - t);
        u = euler_step(u, step, p, regime, b, reaction);
        for (auto& v : u.values) v = clamp_simplex(v);
        t += step;
        take_due(t);
    }
    return snaps;
}

struct StationaryResult {
    Profile profile;       // the common limit (lower run when not converged)
    Profile upper;         // limit from the transformed (1,1,1) data
    bool converged = false;  // both runs settled and agree within 2*tol
    bool settled = false;    // both runs individually reached their tolerance
    double gap = 0;          // Linf distance between the two limits
    double t_reached = 0;
};

/// Integrates from both extremal initial data, transformed (0,0,0) and
/// (1,1,1), i.e. densities (0,1,0) and (1,0,0), until successive snapshots
/// one time unit apart differ by less than tol in Linf.
inline StationaryResult stationary_solve(const Grid& g, const ModelParams& p,
                                         const BoundaryRegime& regime, const BoundaryData& b,
                                         double tol = 1e-6, double t_max = 500.0,
                                         double dt = 0.0) {
    if (!(tol > 0)) throw std::invalid_argument("stationary_solve: tol must be positive");
    if (dt <= 0) dt = 0.9 * cfl_limit(g, p);
    Profile low(g, Density{0, 1, 0});
    Profile high(g, Density{1, 0, 0});
    bool low_done = false, high_done = false;
    double t = 0;
    while (t < t_max && !(low_done && high_done)) {
        double horizon = std::min(1.0, t_max - t);
        auto advance = [&](Profile& u, bool& done) {
            if (done) return;
            auto snaps = solve(u, horizon, dt, p, regime, b, {horizon});
            done = linf_distance(snaps.back(), u) < tol && horizon == 1.0;
            u = snaps.back();
        };
        advance(low, low_done);
        advance(high, high_done);
        t += horizon;
    }
    StationaryResult res{low, high};
    res.settled = low_done && high_done;
    res.gap = linf_distance(low, high);
    res.converged = res.settled && res.gap < 2.0 * tol;
    res.t_reached = t;
    return res;
}

struct ComparisonResult {
    bool ordered = true;
    std::optional<std::size_t> node;  // first violating node
    int component = -1;               // 0: rho1, 1: T, 2: R
};

/// Nodewise (rho1, T, R) order check: ua <= ub in all three transformed
/// coordinates at every node.
inline ComparisonResult comparison_check(const Profile& ua, const Profile& ub,
                                         double tol = 0.0) {
    if (!ua.grid.same_as(ub.grid))
        throw std::invalid_argument("comparison_check: grid mismatch");
    for (std::size_t i = 0; i < ua.values.size(); ++i) {
        auto qa = transform(ua.values[i]);
        auto qb = transform(ub.values[i]);
        for (int c = 0; c < 3; ++c) {
            if (qa[static_cast<std::size_t>(c)] > qb[static_cast<std::size_t>(c)] + tol)
                return {false, i, c};
        }
    }
    return {};
}

}  // namespace gcps
