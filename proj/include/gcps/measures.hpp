#pragma once

#include <array>
#include <cmath>
#include <functional>
#include <span>
#include <stdexcept>
#include <vector>

#include "gcps/lattice.hpp"

namespace gcps {

/// Site-dependent single-site law alpha_hat(u) = (alpha0,...,alpha3)(u) of a
/// product measure nu_alpha^N, evaluated at the embedded point u = x/N.
class ProductMeasure {
public:
    using Fn = std::function<std::array<double, 4>(std::span<const double>)>;

    explicit ProductMeasure(Fn alpha) : alpha_(std::move(alpha)) {}

    /// Constant profile from (a1,a2,a3); a0 is the complement.
    static ProductMeasure constant(std::array<double, 3> a) {
        std::array<double, 4> full{1.0 - a[0] - a[1] - a[2], a[0], a[1], a[2]};
        return ProductMeasure([full](std::span<const double>) { return full; });
    }

    std::array<double, 4> operator()(std::span<const double> u) const {
        auto a = alpha_(u);
        double sum = 0;
        for (double v : a) {
            if (!(v > 0.0) || !(v < 1.0))
                throw std::invalid_argument("ProductMeasure: weights must lie in (0,1)");
            sum += v;
        }
        if (std::abs(sum - 1.0) > 1e-12)
            throw std::invalid_argument("ProductMeasure: weights must sum to 1");
        return a;
    }

    std::array<double, 4> at_site(const Lattice& lat, std::size_t x) const {
        auto u = lat.embed(x);
        return (*this)(std::span<const double>(u.data(), u.size()));
    }

    /// nu_alpha^N(eta) = prod_x alpha_{eta(x)}(x/N).
    double weight(const Lattice& lat, const Configuration& cfg) const {
        if (cfg.size() != lat.site_count())
            throw std::invalid_argument("ProductMeasure: configuration size mismatch");
        double w = 1.0;
        for (std::size_t x = 0; x < cfg.size(); ++x) w *= at_site(lat, x)[cfg[x]];
        return w;
    }

private:
    Fn alpha_;
};

/// Exhaustive check that the single-site marginals of nu_alpha^N reproduce
/// alpha: returns max_x max_i |E[eta_i(x)] - alpha_i(x/N)|. Enumerates the
/// whole configuration space, so the lattice is capped at 8 sites.
inline double marginal_check(const Lattice& lat, const ProductMeasure& nu) {
    const std::size_t n = lat.site_count();
    if (n > 8) throw std::invalid_argument("marginal_check: lattice too large to enumerate");
    const std::uint64_t n_states = 1ull << (2 * n);
    std::vector<std::array<double, 4>> marg(n, {0, 0, 0, 0});
    double mass = 0;
    Configuration cfg(n);
    for (std::uint64_t code = 0; code < n_states; ++code) {
        for (std::size_t i = 0; i < n; ++i)
            cfg[i] = static_cast<std::uint8_t>((code >> (2 * i)) & 3u);
        double w = nu.weight(lat, cfg);
        mass += w;
        for (std::size_t x = 0; x < n; ++x) marg[x][cfg[x]] += w;
    }
    double err = std::abs(mass - 1.0);
    for (std::size_t x = 0; x < n; ++x) {
        auto a = nu.at_site(lat, x);
        for (int i = 0; i < 4; ++i)
            err = std::max(err, std::abs(marg[x][static_cast<std::size_t>(i)] -
                                         a[static_cast<std::size_t>(i)]));
    }
    return err;
}

/// Correction factor of the exchange change of variables,
/// R_{i,j}^{x,y}(alpha) = exp((v_j(y)-v_j(x)) - (v_i(y)-v_i(x))) - 1 with
/// v_k = log alpha_k.
inline double exchange_correction(const Lattice& lat, const ProductMeasure& nu, std::size_t x,
                                  std::size_t y, int i, int j) {
    auto ax = nu.at_site(lat, x);
    auto ay = nu.at_site(lat, y);
    auto v = [&](const std::array<double, 4>& a, int k) {
        return std::log(a[static_cast<std::size_t>(k)]);
    };
    return std::exp((v(ay, j) - v(ax, j)) - (v(ay, i) - v(ax, i))) - 1.0;
}

/// Correction factor of the boundary flip change of variables,
/// sigma_{i,x}(alpha)(eta) = eta_i(x)/alpha_i(x/N) - 1.
inline double flip_correction(const Lattice& lat, const ProductMeasure& nu,
                              const Configuration& cfg, std::size_t x, int i) {
    return indicator(cfg[x], i) / nu.at_site(lat, x)[static_cast<std::size_t>(i)] - 1.0;
}

namespace detail {

template <typename Body>
void for_each_config(std::size_t n_sites, Body&& body) {
    if (n_sites > 8)
        throw std::invalid_argument("for_each_config: lattice too large to enumerate");
    const std::uint64_t n_states = 1ull << (2 * n_sites);
    Configuration cfg(n_sites);
    for (std::uint64_t code = 0; code < n_states; ++code) {
        for (std::size_t i = 0; i < n_sites; ++i)
            cfg[i] = static_cast<std::uint8_t>((code >> (2 * i)) & 3u);
        body(cfg);
    }
}

}  // namespace detail

using ConfigFunction = std::function<double(const Configuration&)>;

/// Exchange change of variables: both sides of
///   E_nu[f(eta^{x,y}) - f(eta)] = E_nu[f(eta) R_{eta(y),eta(x)}^{x,y}],
/// computed exhaustively; first is the left-hand side.
inline std::pair<double, double> exchange_change_of_variable(const Lattice& lat,
                                                             const ProductMeasure& nu,
                                                             const ConfigFunction& f,
                                                             std::size_t x, std::size_t y) {
    double lhs = 0, rhs = 0;
    detail::for_each_config(lat.site_count(), [&](const Configuration& cfg) {
        double w = nu.weight(lat, cfg);
        Configuration swapped = cfg;
        std::swap(swapped[x], swapped[y]);
        double fv = f(cfg);
        lhs += w * (f(swapped) - fv);
        rhs += w * fv * exchange_correction(lat, nu, x, y, cfg[y], cfg[x]);
    });
    return {lhs, rhs};
}

/// Boundary flip change of variables: both sides of
///   E_nu[f(sigma_{i,x} eta) - f(eta)] = E_nu[f(eta) (eta_i(x)/alpha_i - 1)].
inline std::pair<double, double> flip_change_of_variable(const Lattice& lat,
                                                         const ProductMeasure& nu,
                                                         const ConfigFunction& f, std::size_t x,
                                                         int i) {
    double lhs = 0, rhs = 0;
    detail::for_each_config(lat.site_count(), [&](const Configuration& cfg) {
        double w = nu.weight(lat, cfg);
        Configuration set = cfg;
        set[x] = static_cast<std::uint8_t>(i);
        double fv = f(cfg);
        lhs += w * (f(set) - fv);
        rhs += w * fv * flip_correction(lat, nu, cfg, x, i);
    });
    return {lhs, rhs};
}

/// Empirical pairing pi^N(G) = N^{-d} sum_x sum_{i=1..3} eta_i(x) G_i(x/N).
inline double empirical_pair(
    const Lattice& lat, const Configuration& cfg,
    const std::function<std::array<double, 3>(std::span<const double>)>& G) {
    if (cfg.size() != lat.site_count())
        throw std::invalid_argument("empirical_pair: configuration size mismatch");
    double scale = 1.0;
    for (int k = 0; k < lat.dim(); ++k) scale /= static_cast<double>(lat.half_width());
    double sum = 0;
    for (std::size_t x = 0; x < cfg.size(); ++x) {
        if (cfg[x] == 0) continue;
        auto u = lat.embed(x);
        auto g = G(std::span<const double>(u.data(), u.size()));
        for (int i = 1; i <= 3; ++i)
            sum += indicator(cfg[x], i) * g[static_cast<std::size_t>(i - 1)];
    }
    return scale * sum;
}

/// Block density of state i over the sup-metric box of radius ell around x.
inline double block_average(const Lattice& lat, const Configuration& cfg, std::size_t x, int ell,
                            int i) {
    auto box = lat.box(x, ell);
    double sum = 0;
    for (auto y : box) sum += indicator(cfg[y], i);
    return sum / static_cast<double>(box.size());
}

}  // namespace gcps
