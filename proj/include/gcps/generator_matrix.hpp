#pragma once

#include <Eigen/Sparse>
#include <Eigen/SparseLU>
#include <cstdint>
#include <queue>
#include <stdexcept>
#include <vector>

#include "gcps/kmc.hpp"
#include "gcps/lattice.hpp"
#include "gcps/params.hpp"

namespace gcps {

/// Which parts of the generator to assemble; the sub-generators are the
/// oracles for the invariance identities.
enum class GeneratorParts : unsigned {
    Contact = 1,
    Exchange = 2,
    Boundary = 4,
    All = 7,
};

inline bool has_part(GeneratorParts parts, GeneratorParts p) {
    return (static_cast<unsigned>(parts) & static_cast<unsigned>(p)) != 0;
}

/// Exact generator of the full chain over the 4^{|B_N|} configuration space.
/// Configurations are encoded base-4, site 0 in the lowest two bits.
struct GeneratorMatrix {
    std::size_t n_states = 0;
    std::size_t n_sites = 0;
    Eigen::SparseMatrix<double, Eigen::RowMajor> Q;
};

inline Configuration unpack_config(std::uint64_t code, std::size_t n_sites) {
    Configuration cfg(n_sites);
    for (std::size_t i = 0; i < n_sites; ++i)
        cfg[i] = static_cast<std::uint8_t>((code >> (2 * i)) & 3u);
    return cfg;
}

inline std::uint64_t pack_config(const Configuration& cfg) {
    std::uint64_t code = 0;
    for (std::size_t i = 0; i < cfg.size(); ++i)
        code |= static_cast<std::uint64_t>(cfg[i]) << (2 * i);
    return code;
}

inline GeneratorMatrix build_generator(const Lattice& lat, const ModelParams& p,
                                       const BoundaryData& b,
                                       GeneratorParts parts = GeneratorParts::All,
                                       std::size_t state_cap = 65536) {
    p.validate();
    const std::size_t n_sites = lat.site_count();
    if (n_sites > 32 || (1ull << (2 * n_sites)) > state_cap)
        throw std::invalid_argument("build_generator: configuration space exceeds cap");
    const std::size_t n_states = 1ull << (2 * n_sites);
    const int N = lat.half_width();
    const double pair_rate = exchange_rate(N, p);

    std::vector<Eigen::Triplet<double>> trip;
    Configuration cfg(n_sites);
    for (std::uint64_t code = 0; code < n_states; ++code) {
        for (std::size_t i = 0; i < n_sites; ++i)
            cfg[i] = static_cast<std::uint8_t>((code >> (2 * i)) & 3u);
        double out_rate = 0;
        auto add = [&](std::uint64_t to, double rate) {
            if (rate <= 0 || to == code) return;
            trip.emplace_back(static_cast<int>(code), static_cast<int>(to), rate);
            out_rate += rate;
        };
        auto with_site = [&](std::size_t x, std::uint8_t s) {
            return (code & ~(3ull << (2 * x))) | (static_cast<std::uint64_t>(s) << (2 * x));
        };
        if (has_part(parts, GeneratorParts::Contact)) {
            for (std::size_t x = 0; x < n_sites; ++x) {
                auto rates = contact_rates(cfg, lat, x, p);
                for (int i = 0; i < 4; ++i)
                    add(with_site(x, static_cast<std::uint8_t>(i)),
                        rates[static_cast<std::size_t>(i)]);
            }
        }
        if (has_part(parts, GeneratorParts::Boundary)) {
            for (std::size_t x = 0; x < n_sites; ++x) {
                if (lat.face_of(x) == 0) continue;
                auto rates = boundary_rates(cfg, lat, x, p, b, N);
                for (int i = 0; i < 4; ++i)
                    add(with_site(x, static_cast<std::uint8_t>(i)),
                        rates[static_cast<std::size_t>(i)]);
            }
        }
        if (has_part(parts, GeneratorParts::Exchange)) {
            for (auto [a, bb] : lat.exchange_pairs()) {
                if (cfg[a] == cfg[bb]) continue;
                std::uint64_t to = with_site(a, cfg[bb]);
                to = (to & ~(3ull << (2 * bb))) | (static_cast<std::uint64_t>(cfg[a]) << (2 * bb));
                add(to, pair_rate);
            }
        }
        if (out_rate > 0)
            trip.emplace_back(static_cast<int>(code), static_cast<int>(code), -out_rate);
    }

    GeneratorMatrix G;
    G.n_states = n_states;
    G.n_sites = n_sites;
    G.Q.resize(static_cast<int>(n_states), static_cast<int>(n_states));
    G.Q.setFromTriplets(trip.begin(), trip.end());
    return G;
}

/// (Q f)(eta) = sum_eta' Q[eta,eta'] f(eta'); rows sum to zero, so this is
/// the generator applied to f.
inline Eigen::VectorXd apply_generator(const GeneratorMatrix& G, const Eigen::VectorXd& f) {
    return G.Q * f;
}

/// Solves pi Q = 0, sum pi = 1 by sparse LU on the transposed system with
/// one equation replaced by the normalization.
inline Eigen::VectorXd stationary_distribution(const GeneratorMatrix& G,
                                               double residual_tol = 1e-10) {
    const int n = static_cast<int>(G.n_states);
    Eigen::SparseMatrix<double> A = G.Q.transpose();
    // overwrite last row with the normalization sum(pi) = 1
    Eigen::SparseMatrix<double> Acol(n, n);
    std::vector<Eigen::Triplet<double>> trip;
    for (int k = 0; k < A.outerSize(); ++k)
        for (Eigen::SparseMatrix<double>::InnerIterator it(A, k); it; ++it)
            if (it.row() != n - 1) trip.emplace_back(it.row(), it.col(), it.value());
    for (int j = 0; j < n; ++j) trip.emplace_back(n - 1, j, 1.0);
    Acol.setFromTriplets(trip.begin(), trip.end());

    Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
    lu.compute(Acol);
    if (lu.info() != Eigen::Success)
        throw std::runtime_error("stationary_distribution: factorization failed (reducible chain?)");
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n);
    rhs[n - 1] = 1.0;
    Eigen::VectorXd pi = lu.solve(rhs);
    if (lu.info() != Eigen::Success)
        throw std::runtime_error("stationary_distribution: solve failed");

    Eigen::VectorXd residual = G.Q.transpose() * pi;
    if (residual.lpNorm<Eigen::Infinity>() > residual_tol)
        throw std::runtime_error("stationary_distribution: residual exceeds tolerance");
    if (pi.minCoeff() < -residual_tol)
        throw std::runtime_error("stationary_distribution: negative mass (reducible chain?)");
    return pi;
}

/// Exact marginal E[eta_i(x)] under a distribution over configurations.
inline std::vector<std::array<double, 4>> occupation_marginals(const GeneratorMatrix& G,
                                                               const Eigen::VectorXd& pi) {
    std::vector<std::array<double, 4>> m(G.n_sites, {0, 0, 0, 0});
    for (std::uint64_t code = 0; code < G.n_states; ++code) {
        double w = pi[static_cast<int>(code)];
        for (std::size_t x = 0; x < G.n_sites; ++x)
            m[x][(code >> (2 * x)) & 3u] += w;
    }
    return m;
}

/// Reachability of every configuration from every other (strong connectivity
/// via forward search from state 0 on Q and Q^T).
inline bool is_irreducible(const GeneratorMatrix& G) {
    auto reach_all = [&](const Eigen::SparseMatrix<double, Eigen::RowMajor>& M) {
        std::vector<char> seen(G.n_states, 0);
        std::queue<int> q;
        q.push(0);
        seen[0] = 1;
        std::size_t count = 1;
        while (!q.empty()) {
            int v = q.front();
            q.pop();
            for (Eigen::SparseMatrix<double, Eigen::RowMajor>::InnerIterator it(M, v); it; ++it) {
                if (it.value() > 0 && !seen[static_cast<std::size_t>(it.col())]) {
                    seen[static_cast<std::size_t>(it.col())] = 1;
                    ++count;
                    q.push(static_cast<int>(it.col()));
                }
            }
        }
        return count == G.n_states;
    };
    Eigen::SparseMatrix<double, Eigen::RowMajor> QT = G.Q.transpose();
    return reach_all(G.Q) && reach_all(QT);
}

}  // namespace gcps
