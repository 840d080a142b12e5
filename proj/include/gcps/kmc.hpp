#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <span>
#include <stdexcept>
#include <vector>

#include "gcps/lattice.hpp"
#include "gcps/params.hpp"

namespace gcps {

/// Deterministic uniform/exponential source. Doubles are derived from the
/// raw 64-bit stream so replays are bit-identical across standard libraries.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    double uniform() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

    double exponential(double rate) { return -std::log1p(-uniform()) / rate; }

    std::uint64_t raw() { return gen_(); }

private:
    std::mt19937_64 gen_;
};

/// beta(x,eta) = lambda1 n1 + lambda2 n3 with n_i the number of neighbors of
/// x in state i.
inline double birth_pressure(const Configuration& cfg, const Lattice& lat, std::size_t x,
                             const ModelParams& p) {
    int n1 = 0, n3 = 0;
    for (auto y : lat.neighbors(x)) {
        n1 += indicator(cfg[y], 1);
        n3 += indicator(cfg[y], 3);
    }
    return p.lambda1 * n1 + p.lambda2 * n3;
}

/// Contact flip rates out of the current state of x, indexed by target state.
inline std::array<double, 4> contact_rates(const Configuration& cfg, const Lattice& lat,
                                           std::size_t x, const ModelParams& p) {
    std::array<double, 4> rate{0, 0, 0, 0};
    switch (cfg[x]) {
        case 0:
            rate[1] = birth_pressure(cfg, lat, x, p);
            rate[2] = p.r;
            break;
        case 1:
            rate[3] = p.r;
            rate[0] = 1.0;
            break;
        case 2:
            rate[3] = birth_pressure(cfg, lat, x, p);
            rate[0] = 1.0;
            break;
        case 3:
            rate[1] = 1.0;
            rate[2] = 1.0;
            break;
        default:
            throw std::logic_error("contact_rates: corrupt state");
    }
    return rate;
}

/// Reservoir flip rates at a face site, N^{2-theta} b_i(x/N) toward each
/// state i different from the current one (flips to the current state are
/// null events and carry rate 0).
inline std::array<double, 4> boundary_rates(const Configuration& cfg, const Lattice& lat,
                                            std::size_t x, const ModelParams& p,
                                            const BoundaryData& b, int N) {
    int face = lat.face_of(x);
    if (face == 0) throw std::invalid_argument("boundary_rates: site is not on a face");
    double theta = face < 0 ? p.theta_l : p.theta_r;
    double scale = std::pow(static_cast<double>(N), 2.0 - theta);
    auto u = lat.embed(x);
    std::span<const double> torus(u.data() + 1, u.size() - 1);
    auto bf = b.full(face, torus);
    std::array<double, 4> rate{};
    for (int i = 0; i < 4; ++i)
        rate[static_cast<std::size_t>(i)] =
            (cfg[x] == i) ? 0.0 : scale * bf[static_cast<std::size_t>(i)];
    return rate;
}

/// Swap clock rate per generator pair term: D N^2 (times the convention
/// multiplier for the ordered-vs-unordered pair reading).
inline double exchange_rate(int N, const ModelParams& p, double pair_multiplier = 1.0) {
    return p.D * static_cast<double>(N) * static_cast<double>(N) * pair_multiplier;
}

/// Prefix-sum tree for O(log n) sampling and single-leaf updates.
class FenwickTree {
public:
    explicit FenwickTree(std::size_t n) : n_(n), tree_(n + 1, 0.0), leaf_(n, 0.0) {}

    void set(std::size_t i, double v) {
        double delta = v - leaf_[i];
        if (delta == 0.0) return;
        leaf_[i] = v;
        for (std::size_t j = i + 1; j <= n_; j += j & (~j + 1)) tree_[j] += delta;
    }

    double get(std::size_t i) const { return leaf_[i]; }

    double total() const {
        double s = 0;
        for (std::size_t j = n_; j > 0; j -= j & (~j + 1)) s += tree_[j];
        return s;
    }

    /// Largest index whose prefix sum is <= target; returns the leaf it lands in.
    std::size_t sample(double target) const {
        std::size_t pos = 0;
        std::size_t mask = 1;
        while ((mask << 1) <= n_) mask <<= 1;
        for (; mask > 0; mask >>= 1) {
            std::size_t next = pos + mask;
            if (next <= n_ && tree_[next] <= target) {
                target -= tree_[next];
                pos = next;
            }
        }
        return pos < n_ ? pos : n_ - 1;
    }

    std::size_t size() const { return n_; }

private:
    std::size_t n_;
    std::vector<double> tree_;
    std::vector<double> leaf_;
};

enum class EventKind : std::uint8_t { Flip, Swap };

struct Event {
    double time;
    EventKind kind;
    std::uint32_t site_a;
    std::uint32_t site_b;   // swap partner; unused for flips
    std::uint8_t to_state;  // flip target; unused for swaps
};

struct Trajectory {
    Configuration initial;
    std::vector<Event> events;
    std::uint64_t seed = 0;
    double t_end = 0;
};

/// Exact continuous-time simulation of the full generator
/// N^2 L_exchange + N^2 L_boundary + L_contact.
class KmcEngine {
public:
    KmcEngine(const Lattice& lat, const ModelParams& p, const BoundaryData& b,
              Configuration initial, double pair_multiplier = 1.0)
        : lat_(lat),
          p_(p),
          b_(b),
          pair_mult_(pair_multiplier),
          cfg_(std::move(initial)),
          site_tree_(lat.site_count() + lat.exchange_pairs().size()) {
        p_.validate();
        if (cfg_.size() != lat_.site_count())
            throw std::invalid_argument("KmcEngine: configuration size mismatch");
        pair_rate_ = exchange_rate(lat_.half_width(), p_, pair_mult_);
        cache_boundary_rates();
        rebuild_all_rates();
    }

    const Configuration& config() const { return cfg_; }
    double time() const { return t_; }
    double total_rate() const { return site_tree_.total(); }

    /// One Gillespie step. Throws if the rate table is exhausted (cannot
    /// happen for the full dynamics, which is irreducible).
    Event step(Rng& rng) {
        double total = site_tree_.total();
        if (!(total > 0)) throw std::runtime_error("KmcEngine: absorbing state (total rate 0)");
        t_ += rng.exponential(total);
        std::size_t leaf = site_tree_.sample(rng.uniform() * total);
        Event ev{};
        ev.time = t_;
        if (leaf < lat_.site_count()) {
            ev.kind = EventKind::Flip;
            ev.site_a = static_cast<std::uint32_t>(leaf);
            ev.to_state = pick_flip_target(leaf, rng);
            apply_flip(leaf, ev.to_state);
        } else {
            std::size_t pid = leaf - lat_.site_count();
            auto [a, b] = lat_.exchange_pairs()[pid];
            ev.kind = EventKind::Swap;
            ev.site_a = a;
            ev.site_b = b;
            apply_swap(a, b);
        }
        return ev;
    }

    /// Simulates until the first event time exceeding t_end. snapshot_times
    /// must be nondecreasing; the callback receives the configuration in
    /// force at each snapshot time (cadlag convention).
    Trajectory run(double t_end, Rng& rng,
                   const std::vector<double>& snapshot_times = {},
                   const std::function<void(double, const Configuration&)>& on_snapshot = {},
                   bool log_events = false) {
        if (!(t_end > 0)) throw std::invalid_argument("KmcEngine: t_end must be positive");
        Trajectory traj;
        traj.initial = cfg_;
        traj.t_end = t_end;
        std::size_t snap = 0;
        while (true) {
            double total = site_tree_.total();
            if (!(total > 0)) throw std::runtime_error("KmcEngine: absorbing state (total rate 0)");
            double wait = rng.exponential(total);
            double t_next = t_ + wait;
            while (snap < snapshot_times.size() && snapshot_times[snap] < t_next &&
                   snapshot_times[snap] <= t_end) {
                if (on_snapshot) on_snapshot(snapshot_times[snap], cfg_);
                ++snap;
            }
            if (t_next > t_end) {
                accumulate_occupation(t_end - t_);
                t_ = t_end;
                break;
            }
            accumulate_occupation(wait);
            t_ = t_next;
            std::size_t leaf = site_tree_.sample(rng.uniform() * total);
            Event ev{};
            ev.time = t_;
            if (leaf < lat_.site_count()) {
                ev.kind = EventKind::Flip;
                ev.site_a = static_cast<std::uint32_t>(leaf);
                ev.to_state = pick_flip_target(leaf, rng);
                apply_flip(leaf, ev.to_state);
            } else {
                std::size_t pid = leaf - lat_.site_count();
                auto [a, b] = lat_.exchange_pairs()[pid];
                ev.kind = EventKind::Swap;
                ev.site_a = a;
                ev.site_b = b;
                apply_swap(a, b);
            }
            if (log_events) traj.events.push_back(ev);
            ++event_count_;
        }
        while (snap < snapshot_times.size() && snapshot_times[snap] <= t_end) {
            if (on_snapshot) on_snapshot(snapshot_times[snap], cfg_);
            ++snap;
        }
        return traj;
    }

    /// Runs a fixed number of events, accumulating dwell-time occupation.
    void run_events(std::size_t n_events, Rng& rng) {
        for (std::size_t i = 0; i < n_events; ++i) {
            double total = site_tree_.total();
            if (!(total > 0)) throw std::runtime_error("KmcEngine: absorbing state (total rate 0)");
            double wait = rng.exponential(total);
            accumulate_occupation(wait);
            t_ += wait;
            std::size_t leaf = site_tree_.sample(rng.uniform() * total);
            if (leaf < lat_.site_count()) {
                apply_flip(leaf, pick_flip_target(leaf, rng));
            } else {
                auto [a, b] = lat_.exchange_pairs()[leaf - lat_.site_count()];
                apply_swap(a, b);
            }
            ++event_count_;
        }
    }

    void reset_occupation() {
        occupation_time_.assign(lat_.site_count() * 4, 0.0);
        occupation_total_ = 0.0;
    }

    /// Time-averaged indicator of (site, state) since the last reset.
    double occupation(std::size_t site, int state) const {
        if (occupation_total_ <= 0) return 0.0;
        return occupation_time_[site * 4 + static_cast<std::size_t>(state)] / occupation_total_;
    }

    double occupation_window() const { return occupation_total_; }
    std::size_t event_count() const { return event_count_; }

    /// Recomputes every rate from scratch; used by consistency tests.
    void rebuild_all_rates() {
        if (occupation_time_.empty()) occupation_time_.assign(lat_.site_count() * 4, 0.0);
        for (std::size_t x = 0; x < lat_.site_count(); ++x)
            site_tree_.set(x, site_rate(x));
        const auto& pairs = lat_.exchange_pairs();
        for (std::size_t pid = 0; pid < pairs.size(); ++pid) {
            auto [a, b] = pairs[pid];
            site_tree_.set(lat_.site_count() + pid, cfg_[a] != cfg_[b] ? pair_rate_ : 0.0);
        }
    }

    double leaf_rate(std::size_t leaf) const { return site_tree_.get(leaf); }

private:
    void cache_boundary_rates() {
        boundary_full_.assign(lat_.site_count(), {});
        for (std::size_t x = 0; x < lat_.site_count(); ++x) {
            int face = lat_.face_of(x);
            if (face == 0) continue;
            double theta = face < 0 ? p_.theta_l : p_.theta_r;
            double scale = std::pow(static_cast<double>(lat_.half_width()), 2.0 - theta);
            auto u = lat_.embed(x);
            std::span<const double> torus(u.data() + 1, u.size() - 1);
            auto bf = b_.full(face, torus);
            for (int i = 0; i < 4; ++i)
                boundary_full_[x][static_cast<std::size_t>(i)] =
                    scale * bf[static_cast<std::size_t>(i)];
        }
    }

    std::array<double, 4> flip_rates(std::size_t x) const {
        auto rate = contact_rates(cfg_, lat_, x, p_);
        if (lat_.face_of(x) != 0) {
            for (int i = 0; i < 4; ++i)
                if (cfg_[x] != i)
                    rate[static_cast<std::size_t>(i)] += boundary_full_[x][static_cast<std::size_t>(i)];
        }
        return rate;
    }

    double site_rate(std::size_t x) const {
        auto r = flip_rates(x);
        return r[0] + r[1] + r[2] + r[3];
    }

    std::uint8_t pick_flip_target(std::size_t x, Rng& rng) {
        auto r = flip_rates(x);
        double total = r[0] + r[1] + r[2] + r[3];
        double u = rng.uniform() * total;
        for (int i = 0; i < 4; ++i) {
            if (u < r[static_cast<std::size_t>(i)]) return static_cast<std::uint8_t>(i);
            u -= r[static_cast<std::size_t>(i)];
        }
        // numerical edge: fall back to the largest-rate target
        int best = 0;
        for (int i = 1; i < 4; ++i)
            if (r[static_cast<std::size_t>(i)] > r[static_cast<std::size_t>(best)]) best = i;
        return static_cast<std::uint8_t>(best);
    }

    void apply_flip(std::size_t x, std::uint8_t to) {
        cfg_[x] = to;
        refresh_site_and_neighbors(x);
    }

    void apply_swap(std::size_t a, std::size_t b) {
        std::swap(cfg_[a], cfg_[b]);
        refresh_site_and_neighbors(a);
        refresh_site_and_neighbors(b);
    }

    void refresh_site_and_neighbors(std::size_t x) {
        site_tree_.set(x, site_rate(x));
        for (auto y : lat_.neighbors(x)) site_tree_.set(y, site_rate(y));
        // pair rates depend only on their endpoint states, so only pairs
        // touching x can change
        for (auto pid : lat_.pairs_of_site(x)) {
            auto [a, b] = lat_.exchange_pairs()[pid];
            site_tree_.set(lat_.site_count() + pid, cfg_[a] != cfg_[b] ? pair_rate_ : 0.0);
        }
    }

    void accumulate_occupation(double dt) {
        if (dt <= 0) return;
        for (std::size_t x = 0; x < lat_.site_count(); ++x)
            occupation_time_[x * 4 + cfg_[x]] += dt;
        occupation_total_ += dt;
    }

    const Lattice& lat_;
    ModelParams p_;
    BoundaryData b_;
    double pair_mult_;
    double pair_rate_ = 0;
    Configuration cfg_;
    FenwickTree site_tree_;
    std::vector<std::array<double, 4>> boundary_full_;
    std::vector<double> occupation_time_;
    double occupation_total_ = 0;
    double t_ = 0;
    std::size_t event_count_ = 0;
};

/// Site-wise independent sample from a continuous profile gamma_hat
/// (the local-equilibrium initial data used by the limit checks).
inline Configuration sample_from_profile(
    const Lattice& lat,
    const std::function<std::array<double, 3>(std::span<const double>)>& gamma, Rng& rng) {
    Configuration cfg(lat.site_count());
    for (std::size_t x = 0; x < lat.site_count(); ++x) {
        auto u = lat.embed(x);
        auto g = gamma(std::span<const double>(u.data(), u.size()));
        double u01 = rng.uniform();
        if (u01 < g[0]) cfg[x] = 1;
        else if (u01 < g[0] + g[1]) cfg[x] = 2;
        else if (u01 < g[0] + g[1] + g[2]) cfg[x] = 3;
        else cfg[x] = 0;
    }
    return cfg;
}

}  // namespace gcps
